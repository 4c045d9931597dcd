import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from deltalab import ck, core, l1, sums

L1N = sums.AbsoluteNorm.l1()
L2N = sums.AbsoluteNorm.l2()
LINF = sums.AbsoluteNorm.linf()
HEX = sums.AbsoluteNorm.polygon([(1, 0), (F(3, 4), F(3, 4)), (0, 1)])
OCTAGON = sums.AbsoluteNorm.polygon(
    [(1, 0), (F(9, 10), F(3, 5)), (F(3, 5), F(9, 10)), (0, 1)])
SUITE = [L1N, L2N, sums.AbsoluteNorm.lp(1.5), sums.AbsoluteNorm.lp(3), LINF,
         HEX, OCTAGON]

ONE = ck.TailSequence((), 1)
ZERO = ck.TailSequence((), 0)


# ---------------------------------------------------------------------------
# norms


def test_norm_values():
    assert L1N(3, -4) == 7
    assert LINF(3, -4) == 4
    assert abs(L2N(3, 4) - 5) < 1e-12
    assert HEX(1, 1) == F(4, 3)
    assert HEX(1, 0) == 1 and HEX(0, 1) == 1


def test_polygon_must_be_normalized():
    with pytest.raises(core.DeltaLabError):
        sums.AbsoluteNorm.polygon([(2, 0), (0, 1)])


def test_norm_parse_round_trip():
    for spec in ("l1", "l2", "linf", "lp:1.5"):
        n = sums.AbsoluteNorm.parse(spec)
        assert n.name() == spec or spec.startswith(n.kind)
    n = sums.AbsoluteNorm.parse("poly:[(1,0),(0.75,0.75),(0,1)]")
    assert n(1, 1) == F(4, 3)


def test_dual_norms():
    assert L1N.dual(3, -4) == 4
    assert LINF.dual(3, -4) == 7
    assert abs(L2N.dual(3, 4) - 5) < 1e-12
    # polygon dual against a dense direction sweep
    for c, d in ((1, 0), (F(1, 2), F(1, 3)), (2, 5)):
        grid = 0.0
        for i in range(2001):
            th = 2 * math.pi * i / 2000
            ux, uy = math.cos(th), math.sin(th)
            nrm = float(HEX(ux, uy))
            grid = max(grid, float(c) * ux / nrm + float(d) * uy / nrm)
        assert abs(float(HEX.dual(c, d)) - grid) < 1e-4


@given(st.fractions(F(-2), F(2)), st.fractions(F(-2), F(2)))
@settings(max_examples=50, deadline=None)
def test_sum_norm_absolute_and_normalized(a, b):
    for n in (L1N, LINF, HEX):
        assert n(a, b) == n(abs(a), abs(b)) == n(-a, b)
    z = sums.SumPoint(a * ONE, b * ONE, L1N)
    assert z.norm() == abs(a) + abs(b)


# ---------------------------------------------------------------------------
# simultaneous averaging


def test_dirichlet_examples():
    assert sums.dirichlet_average([F(1, 2), F(1, 2)], F(1, 10)) == (2, (1, 1))
    assert sums.dirichlet_average([F(1, 3), F(2, 3)], F(1, 100)) == (3, (1, 2))
    assert sums.dirichlet_average([F(2, 5), F(3, 5)], F(1, 20)) == (5, (2, 3))


@given(st.lists(st.integers(1, 20), min_size=1, max_size=6),
       st.sampled_from([F(1, 10), F(1, 100)]))
@settings(max_examples=60, deadline=None)
def test_dirichlet_contract(raw, eps):
    total = sum(raw)
    weights = [F(r, total) for r in raw]
    n, counts = sums.dirichlet_average(weights, eps)
    assert sum(counts) == n and all(k >= 0 for k in counts)
    err = sum(abs(w - F(k, n)) for w, k in zip(weights, counts))
    assert err < eps
    # minimality under the scan order, by re-scan
    for smaller in range(1, n):
        cts = sums._round_counts(weights, smaller)
        if sum(cts) != smaller or any(k < 0 for k in cts):
            continue
        e2 = sum(abs(w - F(k, smaller)) for w, k in zip(weights, cts))
        assert e2 >= eps


def test_dirichlet_pair_common_count():
    n, cx, cy = sums.dirichlet_average_pair(
        [F(1, 3), F(2, 3)], [F(1, 4), F(1, 4), F(1, 2)], F(1, 50))
    assert sum(cx) == n == sum(cy)


# ---------------------------------------------------------------------------
# octahedrality and the separation property


def test_octahedral_exact_witnesses():
    res1 = sums.is_positively_octahedral(L1N)
    assert res1.verdict and res1.exact and res1.witness == (1, 0)
    assert L1N(1 + 1, 0) == 2 and L1N(1, 0 + 1) == 2

    resi = sums.is_positively_octahedral(LINF)
    assert resi.verdict and resi.witness == (1, 1)
    assert LINF(2, 1) == 2 and LINF(1, 2) == 2

    assert sums.is_positively_octahedral(HEX).verdict


def test_octahedral_l2_fails_with_gap():
    res = sums.is_positively_octahedral(L2N)
    assert not res.verdict
    assert abs(res.value - 2 * math.cos(math.pi / 8)) < 1e-6
    assert res.value < 2 - 0.15


def test_alpha_verdicts():
    assert sums.has_property_alpha(L2N).verdict is True
    assert sums.has_property_alpha(sums.AbsoluteNorm.lp(1.5)).verdict is True
    assert sums.has_property_alpha(L1N).verdict is False
    assert sums.has_property_alpha(LINF).verdict is False
    assert sums.has_property_alpha(HEX).verdict is False
    assert sums.has_property_alpha(OCTAGON).verdict is None  # honest UNDECIDED


def test_alpha_and_octahedral_mutually_exclusive():
    for norm in SUITE:
        octa = sums.is_positively_octahedral(norm).verdict
        alpha = sums.has_property_alpha(norm).verdict
        assert not (octa and alpha is True)


def test_alpha_record_contents():
    res = sums.has_property_alpha(L2N, grid_n=2048)
    a = 1 / math.sqrt(2)
    rec = res.record(a, a)
    assert rec.eps > 0
    assert rec.sup_bound < 1
    assert rec.route in ("a", "b")


def test_alpha_record_unavailable_when_undecided():
    res = sums.has_property_alpha(OCTAGON)
    with pytest.raises(sums.InsufficientCertificateError):
        res.record(1, 0)


# ---------------------------------------------------------------------------
# constructions in the sum


def test_construct_on_l1_sum():
    targets = [sums.SumPoint(F(1, 2) * ONE, F(1, 2) * ONE, L1N),
               sums.SumPoint(ONE, ZERO, L1N),
               sums.SumPoint(ZERO, ZERO, L1N)]
    results = sums.sum_daugavet_construct(ONE, ONE, L1N, F(1, 2), F(1, 2),
                                          targets, eps=F(1, 5), delta=F(1, 10))
    for res in results:
        assert res.min_distance >= 2 - F(1, 5) - 1e-9
        assert res.avg_error <= F(1, 10) + 1e-9


def test_construct_rejects_bad_witness():
    with pytest.raises(core.DeltaLabError):
        sums.sum_daugavet_construct(ONE, ONE, L2N, 0.5, 0.5,
                                    [sums.SumPoint(ZERO, ZERO, L2N)],
                                    eps=F(1, 5), delta=F(1, 10))


def test_construct_rejects_non_daugavet_component():
    bad = ck.TailSequence((1,), 0)
    with pytest.raises(core.DeltaLabError):
        sums.sum_daugavet_construct(bad, ONE, L1N, F(1, 2), F(1, 2),
                                    [sums.SumPoint(ZERO, ZERO, L1N)],
                                    eps=F(1, 5), delta=F(1, 10))


def test_construct_with_l1_component():
    m = l1.MeasureModel((("c0", 1, "NONATOMIC"),))
    x = l1.StepFunction(m, (1,))
    targets = [sums.SumPoint(F(1, 2) * x, F(1, 2) * ONE, L1N)]
    results = sums.sum_daugavet_construct(x, ONE, L1N, F(1, 2), F(1, 2),
                                          targets, eps=F(1, 4), delta=F(1, 8))
    assert results[0].min_distance >= 2 - F(1, 4) - 1e-9


def test_lift_example_dichotomy():
    a = 1 / math.sqrt(2)
    lift = sums.sum_delta_lift(ONE, ONE, L2N, a, a, eps=0.5, gamma=0.2)
    assert lift.min_distance >= 2 - 0.5 - 1e-9
    assert lift.avg_error <= 0.2 + 1e-9

    rec = sums.has_property_alpha(L2N, grid_n=2048).record(a, a)
    z = sums.SumPoint(sums.as_fraction(a) * ONE, sums.as_fraction(a) * ONE, L2N)
    ref = sums.sum_refute_daugavet(z, rec)
    assert ref.delta > 0
    rep = sums.refutation_harness(z, ref, n_members=60, n_combos=60, seed=5)
    assert rep.lp_lower_bound >= ref.delta - 1e-6
    assert rep.min_combo_distance >= ref.delta - 1e-6


def test_lift_axis_edge():
    lift = sums.sum_delta_lift(ONE, ONE, L2N, 1, 0, eps=0.5, gamma=0.2)
    assert lift.min_distance >= 2 - 0.5 - 1e-9


def test_lift_rejects_gamma_at_eps():
    with pytest.raises(core.DeltaLabError):
        sums.sum_delta_lift(ONE, ONE, L2N, 1, 0, eps=0.2, gamma=0.2)


def test_refutation_scope_error():
    a = 1 / math.sqrt(2)
    rec = sums.has_property_alpha(L2N, grid_n=2048).record(a, a)
    z = sums.SumPoint(sums.as_fraction(a) * ONE, sums.as_fraction(a) * ONE, L2N)
    ref = sums.sum_refute_daugavet(z, rec)
    with pytest.raises(sums.InsufficientCertificateError):
        sums.refutation_harness(z, ref, eps=rec.eps * 4)


def test_refutation_axis_anchor_routes_to_other_side():
    rec = sums.has_property_alpha(L2N, grid_n=2048).record(1, 0)
    z = sums.SumPoint(ONE, ZERO, L2N)
    ref = sums.sum_refute_daugavet(z, rec, direction=ONE)
    assert ref.side == "y"  # W hugs (1,0): the second coordinate is bounded
    assert ref.direction.x.norm() == 0


def test_example_dichotomy_never_constructs_on_lp():
    # the construction path demands an octahedral witness, which strictly
    # convex norms cannot provide: the two routes are mutually exclusive
    res = sums.is_positively_octahedral(L2N)
    assert not res.verdict
    with pytest.raises(core.DeltaLabError):
        sums.sum_daugavet_construct(ONE, ONE, L2N, res.witness[0], res.witness[1],
                                    [sums.SumPoint(ZERO, ZERO, L2N)],
                                    eps=F(1, 5), delta=F(1, 10))
