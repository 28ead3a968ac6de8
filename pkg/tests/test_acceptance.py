"""Acceptance gate: the eight headline checks with their time budgets.

Each test exercises one end-to-end claim at its stated tolerance and
prints a single PASS/FAIL line (through the capture bypass, so the
lines appear in ordinary pytest runs).  Two lines are expected to read
FAIL: the excluded-modulus list for the ideal-block certificate calls
a = -1 a failure but the containment is measured (and independently
cross-checked) to hold, and the stated miniversal complement contains
a vector that already lies in the tangent space, so it cannot complete
a direct sum.  Those tests assert what the criteria state and fail
honestly; the surrounding assertions pin what is actually measured.
"""

import time
from fractions import Fraction

import numpy as np

from tanfam.families import classify, double_umbrella_form, family_from_invariants, fold_form
from tanfam.geometry import (
    DeformationParams,
    GridSpec,
    MODE_BEAKS,
    apply_deformation,
    count_cusps,
    envelope_curves,
    fit_cubic_coefficient,
    trace_criminant,
)
from tanfam.jets import MapGerm, SOURCE_VARS, TruncatedPoly
from tanfam.selfcheck import (
    check_chain_rule,
    check_composition,
    check_leibniz,
    check_rank_oracle,
    check_ring_laws,
)
from tanfam.tangent import (
    build_extended_tangent_space,
    build_reduced_tangent_space,
    contains_ideal_block,
    miniversality_check,
)


def _report(capsys, number: int, ok: bool, description: str) -> None:
    with capsys.disabled():
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} -- {description}")


def test_classification_is_exact_and_instant(capsys):
    start = time.perf_counter()
    fold = classify(family_from_invariants(Fraction(1), Fraction(0), Fraction(0)))
    minus = classify(family_from_invariants(Fraction(0), Fraction(1), Fraction(0)))
    plus = classify(family_from_invariants(Fraction(0), Fraction(1), Fraction(1, 2)))
    elapsed = time.perf_counter() - start
    ok = (
        fold.variant == "TypeI"
        and minus.variant == "A1Minus"
        and minus.a == Fraction(-1)
        and minus.projection_form_applicable is False
        and plus.variant == "A1Plus"
        and plus.a == Fraction(1, 4)
        and plus.projection_form_applicable is True
        and elapsed < 1.0
    )
    _report(
        capsys,
        1,
        ok,
        f"three representative families classified exactly in {elapsed:.3f}s",
    )
    assert fold.variant == "TypeI"
    assert (minus.variant, minus.a) == ("A1Minus", Fraction(-1))
    assert minus.projection_form_applicable is False
    assert (plus.variant, plus.a) == ("A1Plus", Fraction(1, 4))
    assert plus.projection_form_applicable is True
    assert elapsed < 1.0


def test_ideal_block_certificate_over_moduli(capsys):
    start = time.perf_counter()
    generic = {}
    for a in (Fraction(-1, 2), Fraction(1, 5), Fraction(1, 4)):
        for b in (Fraction(-1), Fraction(1)):
            basis = build_extended_tangent_space(double_umbrella_form(a, b), order=6)
            generic[(a, b)] = contains_ideal_block(basis, 3, 5, 4).holds
    excluded = {}
    for a in (Fraction(-1), Fraction(0), Fraction(1, 3)):
        germ = double_umbrella_form(a, Fraction(1), validate=False)
        basis = build_extended_tangent_space(germ, order=6)
        check = contains_ideal_block(basis, 3, 5, 4)
        excluded[a] = (check.holds, check.witness)
    elapsed = time.perf_counter() - start

    generic_ok = all(generic.values())
    failures_as_stated = {a: (not h and w is not None) for a, (h, w) in excluded.items()}
    ok = generic_ok and all(failures_as_stated.values()) and elapsed < 30.0
    measured = ", ".join(
        f"a={a}: {'holds' if h else 'fails'}" for a, (h, _) in excluded.items()
    )
    _report(
        capsys,
        2,
        ok,
        "block containment holds for the six generic (a, b) pairs "
        f"({elapsed:.2f}s); excluded moduli measured as [{measured}] -- "
        "a = -1 holds despite being listed as a failure case "
        "(independent symbolic cross-check agrees with the measurement)",
    )
    assert generic_ok
    assert elapsed < 30.0
    assert failures_as_stated[Fraction(0)]
    assert failures_as_stated[Fraction(1, 3)]
    assert failures_as_stated[Fraction(-1)], (
        "containment at a = -1 is measured to hold (and an independent "
        "symbolic rank computation agrees), contradicting the stated "
        "expectation that every excluded modulus fails with a witness"
    )


def test_fold_reduced_space_contains_stated_block(capsys):
    start = time.perf_counter()
    basis = build_reduced_tangent_space(fold_form(8), order=4)
    check = contains_ideal_block(basis, 2, 3, 2)
    elapsed = time.perf_counter() - start
    ok = bool(check) and elapsed < 5.0
    _report(
        capsys,
        3,
        ok,
        f"reduced fold space absorbs the (2, 3, 2) block at order 4 in {elapsed:.2f}s",
    )
    assert check.holds
    assert elapsed < 5.0


def test_miniversal_complement_certificate(capsys):
    start = time.perf_counter()
    cap = 8
    t = TruncatedPoly.variable(SOURCE_VARS, "t", cap)
    zero = TruncatedPoly.zero(SOURCE_VARS, cap)
    bump = t * t + t**3
    complement = [(zero, t, zero), (bump, zero, zero), (zero, bump, zero)]
    verdict = miniversality_check(double_umbrella_form(Fraction(1, 5), 1, cap), complement, order=6)
    degenerate = miniversality_check(
        double_umbrella_form(Fraction(1, 5), 0, cap, validate=False), complement, order=6
    )
    elapsed = time.perf_counter() - start

    codim_ok = verdict["codimension"] == 3
    degenerate_ok = degenerate["spans"] is False
    direct_sum_ok = verdict["direct_sum"] is True
    ok = codim_ok and degenerate_ok and direct_sum_ok and elapsed < 30.0
    dependents = verdict["dependent_complement_vectors"]
    _report(
        capsys,
        4,
        ok,
        f"codimension 3 at order 6 and b = 0 degeneration confirmed ({elapsed:.2f}s); "
        f"stated complement leaves dependent vectors {dependents} -- "
        "(t^2 + t^3, 0, 0) already lies in the tangent space, so the stated "
        "triple cannot complete a direct sum",
    )
    assert codim_ok
    assert degenerate_ok
    assert elapsed < 30.0
    assert direct_sum_ok, (
        f"the stated complement does not complete a direct sum: "
        f"{dependents} already lie in the extended tangent space"
    )


def test_envelope_recovers_cubic_coefficient(capsys):
    start = time.perf_counter()
    xi = TruncatedPoly.variable(SOURCE_VARS, "xi", 8)
    t = TruncatedPoly.variable(SOURCE_VARS, "t", 8)
    target = MapGerm((xi + t, t * t * xi))
    grid = GridSpec.square(1.0, 512)
    criminant = trace_criminant(target, grid)
    envelope = envelope_curves(target, criminant)
    fits = [fit_cubic_coefficient(branch) for branch in envelope.branches]
    best = max(fits, key=abs)
    error = abs(best - 4.0 / 27.0)
    elapsed = time.perf_counter() - start
    ok = envelope.branch_count == 2 and error <= 1e-3 and elapsed < 5.0
    _report(
        capsys,
        5,
        ok,
        f"two envelope branches at 512; cubic coefficient off by {error:.2e} "
        f"({elapsed:.2f}s)",
    )
    assert envelope.branch_count == 2
    assert error <= 1e-3
    assert elapsed < 5.0


def test_beaks_transition_cusp_counts_stable(capsys):
    start = time.perf_counter()
    scenarios = {
        Fraction(-1, 2): (GridSpec.square(1.0, 256), GridSpec.square(1.0, 512)),
        Fraction(1, 4): (
            GridSpec(-1.5, 1.5, -1.5, 1.5, 256, 256),
            GridSpec(-1.5, 1.5, -1.5, 1.5, 512, 512),
        ),
    }
    ok = True
    summaries = []
    for a, (coarse, fine) in scenarios.items():
        base = double_umbrella_form(a, 1)
        counts = {}
        for lam in (-0.1, 0.0, 0.1):
            deformed = apply_deformation(base, DeformationParams(lam=lam), MODE_BEAKS)
            counts[lam] = (
                count_cusps(deformed, coarse).count,
                count_cusps(deformed, fine).count,
            )
        stable = all(lo == hi for lo, hi in counts.values())
        jump = abs(counts[0.1][1] - counts[-0.1][1]) == 2
        middle = counts[0.0][1] == 0
        ok = ok and stable and jump and middle
        summaries.append(
            f"a={a}: counts "
            + "/".join(str(counts[lam][1]) for lam in (-0.1, 0.0, 0.1))
            + (" stable" if stable else " UNSTABLE")
        )
        assert stable, f"a={a}: cusp counts change between 256 and 512: {counts}"
        assert jump, f"a={a}: cusp count must jump by exactly 2 across lambda=0: {counts}"
        assert middle, f"a={a}: transitional slice expected cusp-free: {counts}"
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 20.0
    _report(capsys, 6, ok, "; ".join(summaries) + f" ({elapsed:.2f}s)")
    assert elapsed < 20.0


def test_randomized_algebra_suites_clean(capsys):
    start = time.perf_counter()
    results = [
        check_ring_laws(seed=0, rounds=1000),
        check_leibniz(seed=0, rounds=1000),
        check_chain_rule(seed=0, rounds=1000),
        check_composition(seed=0, rounds=1000),
    ]
    elapsed = time.perf_counter() - start
    clean = all(result.ok for result in results)
    ok = clean and elapsed < 30.0
    _report(
        capsys,
        7,
        ok,
        f"4 x 1000 randomized algebra rounds, "
        f"{sum(len(r.failures) for r in results)} failures ({elapsed:.2f}s)",
    )
    for result in results:
        assert result.ok, f"{result.name}: {result.failures}"
        assert result.rounds == 1000
    assert elapsed < 30.0


def test_random_germ_ranks_match_naive_oracle(capsys):
    start = time.perf_counter()
    result = check_rank_oracle(seed=0, samples=20, order=3)
    elapsed = time.perf_counter() - start
    ok = result.ok and elapsed < 30.0
    _report(
        capsys,
        8,
        ok,
        f"20 random germs, fibered and full ranks vs naive enumeration, "
        f"{len(result.failures)} mismatches ({elapsed:.2f}s)",
    )
    assert result.ok, result.failures
    assert elapsed < 30.0
