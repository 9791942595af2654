"""Acceptance gate: every release-blocking property at its stated budget.

Each test here is a hard requirement.  Budgets (trial counts, corpus sizes,
wall-clock limits) are part of the contract and must not be reduced.
"""

import hashlib
import random
import time
from fractions import Fraction

import pytest

from orelco.cli import main
from orelco.covers import (FiniteQuotient, build_unwrapped_cover,
                           find_exponent_n_quotient, validate_quotient,
                           verify_cover)
from orelco.harness import (CampaignConfig, GeneratorParams, campaign_csv,
                            random_uniform_quotient, run_property_campaign)
from orelco.orbicomplex import (build_orbicomplex, degree, wcycles_audit)
from orelco.complexes import Graph, euler_characteristic
from orelco.pipeline import present_subgroup
import orelco.pipeline as pipeline_module
from orelco.words import dehn_solve, free_reduce, inverse_word

AB2 = (("a", 1), ("b", 1))
ABAB_INV = (("a", 1), ("b", 1), ("a", 1), ("b", -1))

GROUP_FILE = """\
vertex *
edge a : * -> * label a
edge b : * -> * label b
relator a b
branch 2
"""


def _orbi(relator, n):
    symbols = sorted({sym for sym, _ in relator})
    return build_orbicomplex(Graph.rose(symbols), relator, n)


# ---------------------------------------------------------------------------
# 1. inequality suite: three relator/branch combinations, 1000 trials each


@pytest.mark.parametrize("relator,n,seed", [
    (AB2, 2, 11),
    (ABAB_INV, 2, 12),
    (AB2, 3, 13),
])
def test_inequality_campaign_1000_trials(relator, n, seed):
    start = time.monotonic()
    params = GeneratorParams(vertex_budget=6, relator=relator, branch_index=n)
    cfg = CampaignConfig(master_seed=seed, trials=1000, params=params,
                         suites=("wcycles",))
    report = run_property_campaign(cfg)
    elapsed = time.monotonic() - start
    assert report.pass_counts["wcycles"] == (1000, 1000)
    assert all(row.passed for row in report.rows)
    assert all(row.slack1 <= 0 for row in report.rows)
    assert all(row.slack2 <= 0 for row in report.rows)
    assert elapsed < 60.0


# ---------------------------------------------------------------------------
# 2. worked unwrapped covers, exact


def test_worked_cover_ab_branch_2():
    start = time.monotonic()
    x = _orbi(AB2, 2)
    q = FiniteQuotient(2, {"a": (1, 0), "b": (0, 1)})
    assert validate_quotient(q, x) == []
    cover = build_unwrapped_cover(x, q)
    c = cover.cover
    assert len(c.skeleton.vertices) == 2
    assert len(c.skeleton.edges) == 4
    assert len(c.cells) == 1
    (boundary,) = c.cells.values()
    assert len(boundary) == 4
    report = verify_cover(cover)
    assert report.passed
    assert report.euler == -1
    chi_gamma = euler_characteristic(c, dimension=1) // 2  # chi of the rose
    assert chi_gamma == -1
    assert Fraction(report.euler) == 2 * (Fraction(-1) + Fraction(1, 2))
    assert degree(cover.covering_map) == 2 == x.branch_index * len(c.cells)
    audit = wcycles_audit(cover.covering_map)
    assert audit.slack1 == 0
    assert time.monotonic() - start < 1.0


def test_worked_cover_a_over_two_symbol_rose_branch_3():
    start = time.monotonic()
    x = build_orbicomplex(Graph.rose(["a", "b"]), (("a", 1),), 3)
    q = FiniteQuotient(3, {"a": (1, 2, 0), "b": (0, 1, 2)})
    assert validate_quotient(q, x) == []
    cover = build_unwrapped_cover(x, q)
    c = cover.cover
    assert len(c.skeleton.vertices) == 3
    assert len(c.skeleton.edges) == 6
    assert len(c.cells) == 1
    report = verify_cover(cover)
    assert report.passed
    assert report.euler == -2
    assert time.monotonic() - start < 1.0


# ---------------------------------------------------------------------------
# 3. two-cell lifts partition into families of cardinality exactly n


@pytest.mark.parametrize("relator,n", [(AB2, 2), (ABAB_INV, 2), (AB2, 3)])
def test_families_have_cardinality_n(relator, n):
    x = _orbi(relator, n)
    rng = random.Random(100 + n + len(relator))
    found = 0
    attempts = 0
    while found < 20 and attempts < 400:
        attempts += 1
        q = random_uniform_quotient(rng, x, max_degree=4 * n)
        if q is None:
            continue
        found += 1
        cover = build_unwrapped_cover(x, q)
        assert cover.families
        for members in cover.families.values():
            assert len(members) == n
        total = sum(len(members) for members in cover.families.values())
        assert total == len(cover.cover.cells) * n
    assert found >= 20  # 3 parametrizations give >= 60 quotients overall


# ---------------------------------------------------------------------------
# 4. folding laws on random morphisms


def test_fold_laws_500_random_morphisms():
    start = time.monotonic()
    params = GeneratorParams(vertex_budget=6, relator=AB2, branch_index=2)
    cfg = CampaignConfig(master_seed=41, trials=500, params=params,
                         suites=("fold",))
    report = run_property_campaign(cfg)
    assert report.pass_counts["fold"] == (500, 500)
    assert time.monotonic() - start < 30.0


# ---------------------------------------------------------------------------
# 5. word problem corpus: conjugate products vs quotient-detected words


def _random_word(rng, length):
    letters = []
    for _ in range(length):
        letters.append((rng.choice("ab"), rng.choice((1, -1))))
    return free_reduce(tuple(letters))


def test_dehn_corpus_2000_words():
    start = time.monotonic()
    x = _orbi(AB2, 2)
    q = find_exponent_n_quotient(x, 8, 0)
    assert validate_quotient(q, x) == []
    power = AB2 * 2
    rng = random.Random(71)
    identity = tuple(range(q.degree))

    trivial_checked = 0
    while trivial_checked < 1000:
        k = rng.randint(1, 4)
        product = []
        for _ in range(k):
            u = _random_word(rng, rng.randint(0, 6))
            body = power if rng.random() < 0.5 else inverse_word(power)
            product.extend(u + body + inverse_word(u))
        word = free_reduce(tuple(product))
        result = dehn_solve(word, x)
        assert result.trivial, f"conjugate product judged nontrivial: {word}"
        trivial_checked += 1

    nontrivial_checked = 0
    while nontrivial_checked < 1000:
        word = _random_word(rng, rng.randint(1, 12))
        if not word or q.permutation_of(word) == identity:
            continue
        result = dehn_solve(word, x)
        assert not result.trivial, \
            f"word with nontrivial quotient image judged trivial: {word}"
        nontrivial_checked += 1

    assert trivial_checked + nontrivial_checked >= 2000
    assert time.monotonic() - start < 60.0


# ---------------------------------------------------------------------------
# 6. pipeline end-to-end on the two reference subgroups


def test_pipeline_stabilizer_subgroup():
    start = time.monotonic()
    x = _orbi(AB2, 2)
    gens = [(("b", 1),), (("a", 1), ("a", 1)), (("a", 1), ("b", 1), ("a", -1))]
    pres, report = present_subgroup(gens, x, max_word_len=12, max_stages=200,
                                    seed=0)
    assert pres.conclusive
    assert pres.stage <= 200
    assert len(pres.relators) <= 2  # cell bound with 3 seed generators, n = 2
    assert 1 - len(pres.symbols) + len(pres.relators) == -1
    for rel in pres.relators:
        sub = dict(zip(pres.symbols, pres.gen_words))
        expanded = []
        for sym, sign in rel:
            expanded.extend(sub[sym] if sign > 0 else inverse_word(sub[sym]))
        assert dehn_solve(free_reduce(tuple(expanded)), x).trivial
    assert time.monotonic() - start < 120.0


def test_pipeline_cyclic_subgroup_presents_freely():
    start = time.monotonic()
    x = _orbi(AB2, 2)
    pres, report = present_subgroup([(("a", 1),)], x, max_word_len=12,
                                    max_stages=200, seed=0)
    assert pres.conclusive
    assert pres.relators == ()
    assert len(pres.symbols) == 1
    assert any("finite-index" in note for note in pres.notes)
    assert time.monotonic() - start < 120.0


# ---------------------------------------------------------------------------
# 7. invariant hard-checks execute and never fire on passing runs


def test_invariant_checks_run_but_never_fire(monkeypatch):
    calls = {"count": 0}
    original = pipeline_module._check_stage

    def counting(state):
        calls["count"] += 1
        return original(state)

    monkeypatch.setattr(pipeline_module, "_check_stage", counting)
    x = _orbi(AB2, 2)
    gens = [(("b", 1),), (("a", 1), ("a", 1)), (("a", 1), ("b", 1), ("a", -1))]
    pres, _ = present_subgroup(gens, x, max_word_len=8, max_stages=200, seed=0)
    assert calls["count"] >= 1
    assert pres.conclusive


def test_campaign_rows_all_within_hard_bounds():
    params = GeneratorParams(vertex_budget=6, relator=AB2, branch_index=2)
    cfg = CampaignConfig(master_seed=55, trials=300, params=params)
    report = run_property_campaign(cfg)
    for row in report.rows:
        assert row.passed
    for suite, (passed, total) in report.pass_counts.items():
        assert passed == total


# ---------------------------------------------------------------------------
# 8. byte-identical determinism


def _sha(text):
    return hashlib.sha256(text.encode()).hexdigest()


def test_campaign_output_hash_stable():
    params = GeneratorParams(vertex_budget=5, relator=AB2, branch_index=2)
    cfg = CampaignConfig(master_seed=77, trials=120, params=params)
    first = campaign_csv(run_property_campaign(cfg))
    second = campaign_csv(run_property_campaign(cfg))
    assert _sha(first) == _sha(second)


def test_cli_outputs_hash_stable(tmp_path, capsys):
    group = tmp_path / "g.txt"
    group.write_text(GROUP_FILE)

    def invoke(argv):
        code = main(argv)
        out = capsys.readouterr().out
        return code, out

    runs = []
    for tag in ("one", "two"):
        target = tmp_path / f"cover-{tag}.txt"
        code, out = invoke(["cover", "build", "--group", str(group),
                            "--seed", "4", "--out", str(target)])
        assert code == 0
        runs.append((_sha(out), _sha(target.read_text())))
    assert runs[0] == runs[1]

    runs = []
    for tag in ("one", "two"):
        target = tmp_path / f"pres-{tag}.txt"
        code, out = invoke(["subgroup", "present", "--group", str(group),
                            "--gens", "b ; a a ; a b a~",
                            "--max-word-len", "8", "--seed", "0",
                            "--out", str(target)])
        assert code == 0
        runs.append((_sha(out), _sha(target.read_text())))
    assert runs[0] == runs[1]
