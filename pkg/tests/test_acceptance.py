"""Acceptance suite: one test (or parametrized family) per criterion.

Outcomes are exact rationals, so every comparison uses zero tolerance.
Sample sizes are pinned below; seeds are fixed so runs are reproducible.
"""

from __future__ import annotations

import json
import random
import time
from fractions import Fraction

import pytest

from gen import integer_points, random_ground_implication, random_polyhedron, random_system
from lassorank.checker import (implication_valid, lemma1_mu_search, verify_bms,
                               verify_certificates, verify_nondecreasing,
                               verify_or_to_plus_ground, weighted_halfspace_valid,
                               find_ranking_with_invariant)
from lassorank.cli import main as cli_main
from lassorank.core import (AffineTerm, Constraint, Domain, Polyhedron, RankingFunction, Success,
                            SupportingInvariant)
from lassorank.corpus import INT_GCD, INT_NONE, REAL, corpus, entry, random_lasso
from lassorank.farkas import apply_farkas
from lassorank.intprep import gcd_tighten
from lassorank.lp import LT, LinearConstraint, feasible, fourier_motzkin, polyhedron_system
from lassorank.pipeline import AnalysisConfig, analyze, prepare, synthesize
from lassorank.transform import Bound, SymbolicAffine, TemplateImplication

N_SOUNDNESS = 1000
N_COMPLETENESS = 150
N_FARKAS = 500
N_MU_SEARCH = 500
N_GRID = 200
N_LP = 1000
TOLERANCE = Fraction(0)  # exact arithmetic throughout

MODE_CONFIG = {
    REAL: AnalysisConfig(domain_override=Domain.REAL),
    INT_GCD: AnalysisConfig(domain_override=Domain.INT, int_tighten="gcd"),
    INT_NONE: AnalysisConfig(domain_override=Domain.INT, int_tighten="none"),
}

criterion = pytest.mark.criterion


def _argument(f: RankingFunction, inv: SupportingInvariant, delta=1) -> dict:
    def form(x):
        return {"coeffs": {k: str(v) for k, v in x.coeffs.items()}, "const": str(x.constant)}
    return {"ranking": form(f), "invariant": form(inv), "delta": str(delta)}


def _cli_check(tmp_path, source: str, argument: dict, *extra: str) -> int:
    prog = tmp_path / "p.lasso"
    arg = tmp_path / "arg.json"
    prog.write_text(source)
    arg.write_text(json.dumps(argument))
    return cli_main(["check", str(prog), "--argument", str(arg), *extra])


# -- 1 ------------------------------------------------------------------------

CORPUS_CASES = [(e.name, mode, outcome) for e in corpus() for mode, outcome in e.expected.items()]


@criterion(1, "corpus outcome table reproduced by analyze")
@pytest.mark.parametrize("name,mode,outcome", CORPUS_CASES,
                         ids=[f"{n}-{m}" for n, m, _ in CORPUS_CASES])
def test_corpus_outcomes(name, mode, outcome):
    analysis = analyze(entry(name).source, MODE_CONFIG[mode])
    assert analysis.result.status == outcome


def test_corpus_table_is_complete():
    names = {e.name for e in corpus()}
    assert names == {"P_yPositive", "P_diff42", "P_bound", "P_zeno", "P_zeno_div", "P_wild",
                     "P_array", "P_nonIntegral1", "P_nonIntegral2"}


# -- 2 ------------------------------------------------------------------------

REFERENCE_WITNESSES = [
    ("P_yPositive", RankingFunction({"x": 1}, 0), SupportingInvariant({"y": 1}, -1)),
    ("P_diff42", RankingFunction({"x": 1}, 0), SupportingInvariant({"x": 1, "y": -1}, -42)),
    ("P_bound", RankingFunction({"x": 1}, 0), SupportingInvariant({"y": 1}, -23)),
    # Literal witness as printed; i grows along the loop, so this one cannot pass.
    ("P_array", RankingFunction({"i": 1, "aLength": -1}, 0), SupportingInvariant({"offset": 1}, -1)),
]


@criterion(2, "check accepts the reference witnesses with delta = 1")
@pytest.mark.parametrize("name,f,inv", REFERENCE_WITNESSES, ids=[w[0] for w in REFERENCE_WITNESSES])
def test_reference_witnesses_accepted(tmp_path, name, f, inv):
    assert _cli_check(tmp_path, entry(name).source, _argument(f, inv)) == 0


def test_array_witness_with_corrected_sign_is_accepted(tmp_path):
    f = RankingFunction({"aLength": 1, "i": -1}, 0)
    inv = SupportingInvariant({"offset": 1}, -1)
    assert _cli_check(tmp_path, entry("P_array").source, _argument(f, inv)) == 0


# -- 3 ------------------------------------------------------------------------

@criterion(3, "P_bound (f=x, I: y>=23) passes BMS but violates ground phi4")
def test_phi4_violation():
    p = entry("P_bound").program
    f, inv = RankingFunction({"x": 1}, 0), SupportingInvariant({"y": 1}, -23)
    assert verify_bms(p, f, inv, 1).bms == (True, True, True, True)
    verdicts = verify_or_to_plus_ground(p, f, inv, 1)
    assert verdicts[3] is False


# -- 4 ------------------------------------------------------------------------

def _sweep_program(seed: int):
    dims = 1 + seed % 3
    rows = 2 + (seed // 3) % 3
    domain = Domain.INT if seed % 5 == 0 else Domain.REAL
    return random_lasso(seed, dims=dims, rows=rows, domain=domain)


@criterion(4, f"soundness sweep over {N_SOUNDNESS} random programs")
def test_soundness_sweep():
    successes = 0
    failures = []
    for seed in range(N_SOUNDNESS):
        res = synthesize(_sweep_program(seed), AnalysisConfig(self_check=False))
        if not isinstance(res, Success):
            continue
        successes += 1
        p = res.program
        if not (verify_certificates(p, res)
                and all(verify_bms(p, res.ranking, res.invariant, res.delta).bms)):
            failures.append(seed)
    print(f"soundness: {successes}/{N_SOUNDNESS} successes, {len(failures)} failures")
    assert failures == []
    assert successes >= N_SOUNDNESS // 10  # the sweep must exercise the Success path


# -- 5 ------------------------------------------------------------------------

def _nondecreasing_witnesses():
    for e in corpus():
        for i, w in enumerate(e.witnesses):
            yield pytest.param(e.name, w, id=f"{e.name}-{i}")


@criterion(5, "Success whenever a BMS witness with non-decreasing invariant exists")
@pytest.mark.parametrize("name,witness", list(_nondecreasing_witnesses()))
def test_completeness_corpus(name, witness):
    cfg = MODE_CONFIG[witness.mode]
    p = prepare(entry(name).program, cfg)
    bms_ok = all(verify_bms(p, witness.ranking, witness.invariant, witness.delta).bms)
    nondecreasing = verify_nondecreasing(p, witness.invariant)
    assert nondecreasing == witness.nondecreasing
    if bms_ok and nondecreasing:
        assert synthesize(p, cfg).status == "success"


def _candidate_invariants(names):
    yield SupportingInvariant({}, 0)
    for n in names:
        for sign in (1, -1):
            for c in range(-3, 4):
                yield SupportingInvariant({n: sign}, c)
    if len(names) >= 2:
        a, b = names[:2]
        for sa, sb in ((1, 1), (1, -1), (-1, 1)):
            for c in range(-2, 3):
                yield SupportingInvariant({a: sa, b: sb}, c)


@criterion(5, "Success whenever a BMS witness with non-decreasing invariant exists")
def test_completeness_random():
    found = 0
    failures = []
    for seed in range(N_COMPLETENESS):
        p = random_lasso(10_000 + seed, dims=1 + seed % 2, rows=3)
        for inv in _candidate_invariants(p.program_vars):
            if not verify_nondecreasing(p, inv):
                continue
            f = find_ranking_with_invariant(p, inv)
            if f is None or not all(verify_bms(p, f, inv, 1).bms):
                continue
            found += 1
            if synthesize(p).status != "success":
                failures.append(seed)
            break
    print(f"completeness: witnesses found for {found}/{N_COMPLETENESS} programs")
    assert failures == []
    assert found >= 10


# -- 6 ------------------------------------------------------------------------

@criterion(6, f"Farkas block feasibility matches refutation on {N_FARKAS} ground implications")
def test_farkas_equivalence():
    rng = random.Random(6)
    disagreements = []
    valid_count = 0
    for k in range(N_FARKAS):
        g = random_ground_implication(rng)
        by_refutation = implication_valid(g)
        t = TemplateImplication("g", g.lhs, SymbolicAffine.ground(g.rhs), Bound.ZERO)
        by_farkas = bool(feasible(apply_farkas(t, 1)))
        # third opinion from elimination
        coeffs = {v: c for v, c in g.rhs.coeffs}
        negated = polyhedron_system(g.lhs).with_constraints(
            LinearConstraint(coeffs, LT, g.bound - g.rhs.constant), unknowns=coeffs)
        by_fm = not fourier_motzkin(negated)
        valid_count += by_refutation
        if not by_refutation == by_farkas == by_fm:
            disagreements.append(k)
    print(f"farkas: {valid_count}/{N_FARKAS} valid implications")
    assert disagreements == []
    assert N_FARKAS // 5 <= valid_count <= N_FARKAS - N_FARKAS // 5


# -- 7 ------------------------------------------------------------------------

def _disjunctive_instance(rng: random.Random):
    """Bounded polytope P and forms g, h with P -> g >= 0 or h > 0, P not -> h > 0."""
    while True:
        dims = rng.randint(1, 3)
        poly = random_polyhedron(rng, dims, rng.randint(0, 3), boxed=True, rational=False)
        if not feasible(polyhedron_system(poly)):
            continue
        A, b, _ = poly.to_matrix()
        xs = poly.variables
        hv = [rng.randint(-2, 2) for _ in xs]
        h0 = rng.randint(-3, 3)
        h = AffineTerm(dict(zip(xs, hv)), h0)
        below = poly.conjoin(Constraint.leq(h, 0))
        if not feasible(polyhedron_system(below)):
            continue  # P would imply h > 0
        gv = [rng.randint(-2, 2) for _ in xs]
        g = AffineTerm(dict(zip(xs, gv)))
        # smallest integer offset making g >= 0 on the part of P where h <= 0
        for g0 in range(-12, 40):
            if implication_valid_on(below, g + g0):
                return A, b, (gv, g0), (hv, h0)


def implication_valid_on(poly: Polyhedron, term: AffineTerm) -> bool:
    from lassorank.transform import GroundImplication
    return implication_valid(GroundImplication("mu", poly, term, Fraction(0)))


@criterion(7, f"weighted-sum multiplier search on {N_MU_SEARCH} random instances")
def test_mu_search_property():
    rng = random.Random(7)
    failures = []
    positive_mu = 0
    for k in range(N_MU_SEARCH):
        A, b, g, h = _disjunctive_instance(rng)
        mu = lemma1_mu_search(A, b, g, h)
        if mu is None or mu < 0 or not weighted_halfspace_valid(A, b, g, h, mu):
            failures.append(k)
        elif mu > 0:
            positive_mu += 1
    print(f"mu search: {positive_mu}/{N_MU_SEARCH} instances needed mu > 0")
    assert failures == []
    assert positive_mu >= N_MU_SEARCH // 10


# -- 8 ------------------------------------------------------------------------

@criterion(8, "integer tightening: P_nonIntegral1 modes and the grid oracle")
@pytest.mark.parametrize("mode,outcome", [(REAL, "infeasible"), (INT_NONE, "infeasible"),
                                          (INT_GCD, "success")])
def test_nonintegral1_modes(mode, outcome):
    assert synthesize(entry("P_nonIntegral1").program, MODE_CONFIG[mode]).status == outcome


@criterion(8, "integer tightening: P_nonIntegral1 modes and the grid oracle")
def test_gcd_tighten_grid_oracle():
    rng = random.Random(8)
    changed = 0
    for k in range(N_GRID):
        dims = 1 + k % 3
        poly = random_polyhedron(rng, dims, rng.randint(1, 4))
        tight = gcd_tighten(poly)
        changed += tight != poly
        assert integer_points(tight) == integer_points(poly), k
    print(f"grid oracle: tightening changed {changed}/{N_GRID} polyhedra")
    assert changed >= N_GRID // 2


# -- 9 ------------------------------------------------------------------------

@criterion(9, f"simplex and Fourier-Motzkin agree on {N_LP} random systems")
def test_lp_oracle_agreement():
    rng = random.Random(9)
    disagreements = []
    sat = strict_systems = 0
    for k in range(N_LP):
        sys = random_system(rng, max_rows=rng.choice((6, 12, 24)))
        out = feasible(sys)
        strict_systems += sys.has_strict
        if bool(out) != bool(fourier_motzkin(sys)):
            disagreements.append(k)
        if out:
            sat += 1
            assert sys.satisfied_by(out.assignment), k
    print(f"lp: {sat}/{N_LP} satisfiable, {strict_systems} with strict rows")
    assert disagreements == []
    assert N_LP // 5 <= sat <= N_LP - N_LP // 5
    assert strict_systems >= N_LP // 4


def test_suite_budget():
    """Sanity timing for a typical analysis; the full suite stays well under a minute."""
    start = time.perf_counter()
    for e in corpus():
        for mode in e.expected:
            synthesize(e.program, MODE_CONFIG[mode])
    assert time.perf_counter() - start < 10
