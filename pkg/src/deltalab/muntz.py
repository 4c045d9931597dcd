"""Muntz space numerics on [0,1].

Working objects are generalized polynomials sum_k a_k t^{lam_k} over an
exponent ladder 0 < lam_1 < lam_2 < ... with sum 1/lam_n < oo (the closed
span without constants).  Sup norms come with certified enclosures: a
Descartes-guided critical-point isolation when it can certify itself, and an
interval branch-and-bound fallback; the two mechanisms guard each other.

Everything near the right endpoint is parametrized by u = 1 - t and powers
evaluate as exp(lam * log1p(-u)).  The witness chains need exponents around
1e60 and thresholds 1 - t around 1e-60: hopeless in t coordinates, exactly
representable in u.
"""

from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import lp
from .core import (
    Certificate,
    CertificationError,
    DeltaLabError,
    Functional,
    Refutation,
    SpaceTag,
    VerificationError,
    Verdict,
    hull_distance_info,
)
from .util import UNIT_TOL, as_fraction, sgn

NORM_TOL = 1e-10


class LadderExhaustedError(DeltaLabError):
    """LADDER_TOO_SHORT: materialize more terms to continue the search."""


def _squares_rule(n: int) -> Fraction:
    return Fraction(n * n)


@dataclass(frozen=True)
class ExponentLadder:
    """Strictly increasing positive exponents, explicit or rule-generated.

    `includes_constant` marks the span-with-constants variant; the Delta/
    Daugavet decision procedures refuse it (the characterization is only
    settled for the constant-free span with lam_1 >= 1).  Summability of
    1/lam_n is exact for the built-in rules and taken on trust for custom
    ones: it is a property of the infinite tail.
    """

    name: str
    explicit: Optional[tuple] = None
    rule: Optional[Callable[[int], Fraction]] = None
    includes_constant: bool = False
    summable: bool = True

    def __post_init__(self):
        if (self.explicit is None) == (self.rule is None):
            raise DeltaLabError("ladder needs exactly one of explicit/rule")
        if self.explicit is not None:
            ex = tuple(as_fraction(v) for v in self.explicit)
            object.__setattr__(self, "explicit", ex)
            if any(v <= 0 for v in ex) or any(a >= b for a, b in zip(ex, ex[1:])):
                raise DeltaLabError("exponents must be strictly increasing and positive")
        else:
            probe = [self.rule(n) for n in range(1, 9)]
            if any(v <= 0 for v in probe) or any(a >= b for a, b in zip(probe, probe[1:])):
                raise DeltaLabError("rule must generate strictly increasing positive exponents")

    @classmethod
    def squares(cls) -> "ExponentLadder":
        """lam_n = n^2 (summable, lam_1 = 1)."""
        return cls(name="n^2", rule=_squares_rule)

    @classmethod
    def from_list(cls, lambdas, includes_constant=False, summable=True) -> "ExponentLadder":
        return cls(name="explicit", explicit=tuple(lambdas),
                   includes_constant=includes_constant, summable=summable)

    def lambda_at(self, k: int) -> Fraction:
        if k < 1:
            raise DeltaLabError("ladder indices are 1-based")
        if self.explicit is not None:
            if k > len(self.explicit):
                raise LadderExhaustedError(
                    f"LADDER_TOO_SHORT: index {k} > {len(self.explicit)} materialized terms")
            return self.explicit[k - 1]
        return as_fraction(self.rule(k))

    def min_index_where(self, pred) -> int:
        """Least k with pred(lambda_k), for predicates monotone in lambda."""
        if self.explicit is not None:
            for k in range(1, len(self.explicit) + 1):
                if pred(self.explicit[k - 1]):
                    return k
            raise LadderExhaustedError("LADDER_TOO_SHORT: predicate never satisfied")
        hi = 1
        for _ in range(200):
            if pred(self.lambda_at(hi)):
                break
            hi *= 2
        else:
            raise LadderExhaustedError("LADDER_TOO_SHORT: predicate unreachable")
        lo = max(1, hi // 2)
        while lo < hi:
            mid = (lo + hi) // 2
            if pred(self.lambda_at(mid)):
                hi = mid
            else:
                lo = mid + 1
        return hi


# ---------------------------------------------------------------------------
# numeric kernel in u = 1 - t coordinates


def pow_u(lam: float, u: float) -> float:
    """t^lam at t = 1 - u, stable for huge lam and tiny u."""
    if u >= 1.0:
        return 0.0
    if u <= 0.0:
        return 1.0
    return math.exp(lam * math.log1p(-u))


@dataclass(frozen=True)
class Enclosure:
    lo: float
    hi: float
    at_u: float

    @property
    def width(self):
        return self.hi - self.lo


def _float_terms(pairs):
    return [(float(lam), float(c)) for lam, c in pairs]


def _eval_pairs_u(fpairs, const: float, u: float) -> float:
    return const + sum(c * pow_u(lam, u) for lam, c in fpairs)


def _range_abs_bound(fpairs, const, ulo, uhi):
    """Zeroth-order bound for |p| on [ulo, uhi]: powers are monotone in u."""
    lo = hi = const
    for lam, c in fpairs:
        a = c * pow_u(lam, uhi)
        b = c * pow_u(lam, ulo)
        if a > b:
            a, b = b, a
        lo += a
        hi += b
    slack = 1e-15 * (abs(lo) + abs(hi) + 1.0)
    return max(abs(lo), abs(hi)) + slack


def sup_abs_bb(pairs, const=Fraction(0), u_lo=0.0, u_hi=1.0, tol=NORM_TOL,
               max_nodes=400_000) -> Enclosure:
    """Certified enclosure of sup |p| over t in [1-u_hi, 1-u_lo].

    Branch-and-bound with two interval bounds guarding each other: the
    monotone-range bound (sharp far from maxima) and the centered form
    |p(mid)| + (w/2) sup|p'| (quadratic convergence at smooth maxima).
    Intervals split arithmetically, or geometrically when they span many
    scales, so spikes at depth 1e-60 localize in a few hundred nodes.
    """
    fpairs = _float_terms(pairs)
    c0 = float(const)
    u_lo, u_hi = float(u_lo), float(u_hi)
    dpairs = [(lam - 1.0, c * lam) for lam, c in fpairs]

    def val(u):
        return abs(_eval_pairs_u(fpairs, c0, u))

    def bound(a, b):
        rb = _range_abs_bound(fpairs, c0, a, b)
        # range of p' over the interval, with sign cancellation: near a
        # critical point this shrinks like the interval, so the centered
        # form converges quadratically
        dlo = dhi = 0.0
        for lam1, cl in dpairs:
            x1 = cl * pow_u(lam1, b)
            x2 = cl * pow_u(lam1, a)
            if x1 > x2:
                x1, x2 = x2, x1
            dlo += x1
            dhi += x2
        dmax = max(abs(dlo), abs(dhi))
        cb = val(0.5 * (a + b)) + 0.5 * (b - a) * dmax
        cb += 1e-15 * (cb + 1.0)
        return min(rb, cb)

    best = val(u_lo)
    at = u_lo
    for u in (u_hi, 0.5 * (u_lo + u_hi)):
        v = val(u)
        if v > best:
            best, at = v, u

    heap = [(-bound(u_lo, u_hi), u_lo, u_hi)]
    stuck_hi = 0.0
    for _ in range(max_nodes):
        if not heap:
            return Enclosure(best, max(best, stuck_hi), at)
        neg_ub, a, b = heapq.heappop(heap)
        ub = -neg_ub
        if ub <= best + tol:
            return Enclosure(best, max(best, ub, stuck_hi), at)
        if a > 0 and b / a > 16.0:
            mid = math.sqrt(a * b)
        elif a == 0.0 and b > 1e-12:
            mid = b / 4.0
        else:
            mid = 0.5 * (a + b)
        if not (a < mid < b):
            stuck_hi = max(stuck_hi, ub)
            continue
        v = val(mid)
        if v > best:
            best, at = v, mid
        for lo_, hi_ in ((a, mid), (mid, b)):
            child = bound(lo_, hi_)
            if child > best + 0.5 * tol:
                heapq.heappush(heap, (-child, lo_, hi_))
    raise CertificationError(f"sup-norm enclosure not within {tol} after {max_nodes} nodes")


def descartes_bound(pairs) -> int:
    """Sign changes of the coefficient sequence ordered by exponent (zeros
    skipped): an upper bound for the number of positive roots."""
    ordered = sorted(pairs, key=lambda kc: kc[0])
    signs = [sgn(c) for _, c in ordered if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0)


def _derivative_pairs(pairs):
    return [(lam - 1, c * lam) for lam, c in pairs if c != 0]


def _eval_pairs_t(fpairs, const: float, t: float) -> float:
    total = const
    for lam, c in fpairs:
        if t == 0.0:
            total += c * (1.0 if lam == 0 else 0.0)
        else:
            total += c * t ** lam
    return total


def _isolate_positive_roots(pairs, lo=0.0, hi=1.0, base_grid=257, max_refine=6):
    """Bracket the roots of a generalized polynomial on (lo, hi).

    Certified when the number of sign-change brackets matches the Descartes
    bound (then every root is simple and bracketed); returns None otherwise.
    """
    bound = descartes_bound(pairs)
    fpairs = _float_terms(pairs)
    for r in range(max_refine):
        n = base_grid * 2 ** r
        ts = np.linspace(lo, hi, n)
        vals = [_eval_pairs_t(fpairs, 0.0, float(t)) for t in ts]
        brackets = []
        for i in range(n - 1):
            if vals[i] == 0.0:
                continue
            if vals[i] * vals[i + 1] < 0:
                brackets.append((float(ts[i]), float(ts[i + 1])))
        if len(brackets) == bound:
            return brackets
    return None


def _bisect_bracket(fpairs, a, b, width=1e-13):
    fa = _eval_pairs_t(fpairs, 0.0, a)
    while b - a > width:
        m = 0.5 * (a + b)
        fm = _eval_pairs_t(fpairs, 0.0, m)
        if fm == 0.0:
            return m, m
        if fa * fm < 0:
            b = m
        else:
            a, fa = m, fm
    return a, b


def _sup_via_roots(pairs, const, tol) -> Optional[Enclosure]:
    """Certified sup enclosure via critical-point isolation, or None."""
    dpairs = _derivative_pairs(pairs)
    if any(lam < 0 for lam, _ in dpairs):
        return None
    if max((abs(float(lam)) for lam, _ in pairs), default=0.0) > 1e8:
        return None
    brackets = _isolate_positive_roots(dpairs)
    if brackets is None:
        return None
    fpairs = _float_terms(pairs)
    dfl = _float_terms(dpairs)
    c0 = float(const)
    lip = sum(abs(c) for _, c in dfl) + 1.0
    candidates = [0.0, 1.0]
    maxwidth = 0.0
    for a, b in brackets:
        a2, b2 = _bisect_bracket(dfl, a, b)
        candidates.append(0.5 * (a2 + b2))
        maxwidth = max(maxwidth, b2 - a2)
    best, at = 0.0, 0.0
    for t in candidates:
        v = abs(_eval_pairs_t(fpairs, c0, t))
        if v > best:
            best, at = v, t
    hi = best + maxwidth * lip + 1e-14 * (best + 1.0)
    if hi - best > tol:
        return None
    return Enclosure(best, hi, 1.0 - at)


# ---------------------------------------------------------------------------
# generalized polynomials


@dataclass(frozen=True)
class MuntzPolynomial:
    """sum over terms of a_k t^{lam_k} (+ an internal constant offset used
    for shifted objects like f - f(1); public constructions keep it zero)."""

    ladder: ExponentLadder
    terms: tuple
    const: Fraction = Fraction(0)

    space_tag = SpaceTag.MUNTZ

    def __post_init__(self):
        clean = {}
        for k, c in self.terms:
            c = as_fraction(c)
            if c != 0:
                clean[int(k)] = clean.get(int(k), Fraction(0)) + c
        terms = tuple(sorted((k, c) for k, c in clean.items() if c != 0))
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "const", as_fraction(self.const))

    @classmethod
    def monomial(cls, ladder, k, coeff=1):
        return cls(ladder, ((k, coeff),))

    def exponent_pairs(self):
        return [(self.ladder.lambda_at(k), c) for k, c in self.terms]

    def at_one(self) -> Fraction:
        return self.const + sum((c for _, c in self.terms), Fraction(0))

    def eval_u(self, u) -> float:
        return _eval_pairs_u(_float_terms(self.exponent_pairs()), float(self.const), float(u))

    def eval_t(self, t) -> float:
        return self.eval_u(1.0 - float(t))

    def derivative_value(self, t: float) -> float:
        return _eval_pairs_t(_float_terms(_derivative_pairs(self.exponent_pairs())), 0.0, t)

    def sup_enclosure(self, tol=NORM_TOL, u_lo=0.0, u_hi=1.0) -> Enclosure:
        pairs = self.exponent_pairs()
        if not pairs and self.const == 0:
            return Enclosure(0.0, 0.0, 0.0)
        if u_lo == 0.0 and u_hi == 1.0:
            enc = _sup_via_roots(pairs, self.const, tol)
            if enc is not None:
                return enc
        return sup_abs_bb(pairs, self.const, u_lo, u_hi, tol)

    def norm(self) -> float:
        """Certified upper bound of the sup norm (safe for ball membership)."""
        return self.sup_enclosure().hi

    def _merge(self, other, sign):
        if not isinstance(other, MuntzPolynomial):
            raise DeltaLabError("generalized polynomials combine with their own kind")
        if other.ladder != self.ladder:
            raise DeltaLabError("polynomials must share an exponent ladder")
        terms = dict(self.terms)
        for k, c in other.terms:
            terms[k] = terms.get(k, Fraction(0)) + sign * c
        return MuntzPolynomial(self.ladder, tuple(terms.items()),
                               self.const + sign * other.const)

    def __add__(self, other):
        return self._merge(other, 1)

    def __sub__(self, other):
        return self._merge(other, -1)

    def __neg__(self):
        return MuntzPolynomial(self.ladder, tuple((k, -c) for k, c in self.terms), -self.const)

    def __mul__(self, scalar):
        s = as_fraction(scalar)
        return MuntzPolynomial(self.ladder, tuple((k, s * c) for k, c in self.terms),
                               s * self.const)

    __rmul__ = __mul__

    def shifted(self, offset) -> "MuntzPolynomial":
        return MuntzPolynomial(self.ladder, self.terms, self.const + as_fraction(offset))


def sup_norm(p: MuntzPolynomial, tol=NORM_TOL) -> Enclosure:
    """Certified enclosure of ||p|| on [0,1] (width <= tol)."""
    return p.sup_enclosure(tol)


@dataclass(frozen=True)
class PointEvaluationFunctional(Functional):
    """Finite signed combination of point evaluations, sum c_i p(t_i).

    Nodes are stored as u = 1 - t.  The reported dual norm sum |c_i| is exact
    for sign-aligned single-node families (the ones used here) and an upper
    bound in general.
    """

    nodes: tuple  # ((u, coeff), ...)

    space_tag = SpaceTag.MUNTZ

    def __post_init__(self):
        object.__setattr__(
            self, "nodes",
            tuple((float(u), as_fraction(c)) for u, c in self.nodes))

    def __call__(self, p: MuntzPolynomial):
        total = Fraction(0)
        inexact = 0.0
        for u, c in self.nodes:
            if u == 0.0:
                total += c * p.at_one()
            else:
                inexact += float(c) * p.eval_u(u)
        return float(total) + inexact if inexact else total

    def dual_norm(self):
        return sum((abs(c) for _, c in self.nodes), Fraction(0))


# ---------------------------------------------------------------------------
# spike functions


@dataclass(frozen=True)
class Spike:
    k: int
    l: int
    f: MuntzPolynomial
    norm_enclosure: Enclosure
    off_interval_sup: float  # certified sup over [0, 1-eps]
    peak_u: float


def spike_search(ladder: ExponentLadder, eps, delta, norm_tol=NORM_TOL) -> Spike:
    """Normalized two-term bump (t^{lam_k} - t^{lam_l}) / norm: nonnegative,
    and certified below `delta` on [0, 1-eps].

    k is minimal with (1-eps)^{lam_k} < delta/2 and l minimal above k with
    certified two-term norm > 1/2 (both predicates are monotone in the
    exponent, so binary search preserves minimality).
    """
    eps, delta = float(eps), float(delta)
    if not (0 < eps < 1 and 0 < delta < 1):
        raise DeltaLabError("spike search needs eps, delta in (0,1)")

    log_base = math.log1p(-eps)  # < 0
    thresh = math.log(delta / 2)

    k = ladder.min_index_where(lambda lam: float(lam) * log_base < thresh)
    lam_k = ladder.lambda_at(k)

    def norm_enc(l, tol):
        pairs = ((lam_k, Fraction(1)), (ladder.lambda_at(l), Fraction(-1)))
        return sup_abs_bb(pairs, Fraction(0), 0.0, 1.0, tol)

    def far_enough(lam_l):
        pairs = ((lam_k, Fraction(1)), (lam_l, Fraction(-1)))
        enc = sup_abs_bb(pairs, Fraction(0), 0.0, 1.0, 1e-4)
        if enc.lo <= 0.5 < enc.hi:  # straddling: decide at full precision
            enc = sup_abs_bb(pairs, Fraction(0), 0.0, 1.0, 1e-12)
        return enc.lo > 0.5

    l = ladder.min_index_where(lambda lam: lam > lam_k and far_enough(lam))
    raw_enc = norm_enc(l, norm_tol)
    scale = as_fraction(2.0 / (raw_enc.lo + raw_enc.hi))
    f = MuntzPolynomial(ladder, ((k, scale), (l, -scale)))

    enc = f.sup_enclosure(norm_tol)
    if not (1 - 1e-8 <= enc.lo and enc.hi <= 1 + 1e-8):
        raise VerificationError(f"spike normalization drifted: [{enc.lo}, {enc.hi}]")
    off = f.sup_enclosure(norm_tol, u_lo=eps, u_hi=1.0)
    if not off.hi < delta:
        raise VerificationError(
            f"spike not small on [0, 1-eps]: sup <= {off.hi} vs delta = {delta}")
    # nonnegativity is structural: lam_k < lam_l and equal positive weights
    return Spike(k=k, l=l, f=f, norm_enclosure=enc, off_interval_sup=off.hi,
                 peak_u=enc.at_u)


# ---------------------------------------------------------------------------
# Delta / Daugavet decision and witnesses


def _require_constant_free(ladder: ExponentLadder):
    if ladder.includes_constant:
        raise DeltaLabError(
            "decision procedures need the constant-free span (the question is open "
            "when constants are present)")
    if ladder.lambda_at(1) < 1:
        raise DeltaLabError("decision procedures need lam_1 >= 1")


def _require_certified_unit(p: MuntzPolynomial) -> Enclosure:
    enc = p.sup_enclosure(min(NORM_TOL, 1e-10))
    if not (enc.lo >= 1 - float(UNIT_TOL) - enc.width and enc.hi <= 1 + float(UNIT_TOL)):
        raise DeltaLabError(f"point must have unit norm, enclosure [{enc.lo}, {enc.hi}]")
    return enc


def is_daugavet_point_muntz(f: MuntzPolynomial):
    """Daugavet (equivalently Delta) iff the norm is attained at the right
    endpoint: |f(1)| = 1."""
    _require_constant_free(f.ladder)
    _require_certified_unit(f)
    f1 = f.at_one()
    if abs(f1) >= 1 - UNIT_TOL:
        return True, Certificate(verdict=Verdict.DAUGAVET_YES, log=(("f(1)", f1),))
    cert = Certificate(
        verdict=Verdict.DELTA_NO,
        refutation=Refutation(
            refuter=PointEvaluationFunctional(((0.0, Fraction(sgn(f1) or 1)),)),
            bound=Fraction(0),
            margin=Fraction(1) - abs(f1),
            note="norm not attained at 1; interior peaks separate far candidates "
                 "(see separation_check_muntz)"),
        log=(("f(1)", f1),),
    )
    return False, cert


@dataclass(frozen=True)
class MuntzWitness:
    members: tuple
    spikes: tuple
    thresholds_u: tuple
    m: int
    delta: float
    min_distance: float
    avg_error_direct: float
    avg_error_structural: float
    flipped: bool


def daugavet_witness_muntz(f: MuntzPolynomial, g: MuntzPolynomial, eps, delta,
                           norm_tol=NORM_TOL) -> MuntzWitness:
    """Far family around g for an endpoint-norming f (|f(1)| = 1).

    Builds m = ceil(2/delta) nested spikes on shrinking right neighborhoods
    of 1, sets g_i = g - (g(1)+1) f_i and returns the members
    (1+delta)^{-1} g_i.  Verification is mandatory: certified member norms,
    point-evaluation distance lower bounds >= 2 - 3 delta at the spike
    peaks, and the average within 3 delta of g both by a direct certified
    sup and by the structural bound assembled from the per-spike
    certificates.  Failure raises with diagnostics; nothing unverified is
    returned.
    """
    eps, delta = float(eps), float(delta)
    if not 3 * delta < eps:
        raise DeltaLabError("need 3*delta < eps")
    _require_certified_unit(f)
    if g.sup_enclosure(norm_tol).hi > 1 + float(UNIT_TOL):
        raise DeltaLabError("g must lie in the unit ball")
    f1 = f.at_one()
    if abs(abs(f1) - 1) > UNIT_TOL:
        raise DeltaLabError("witness construction needs |f(1)| = 1")

    flipped = f1 < 0
    ff = -f if flipped else f
    gg = -g if flipped else g
    g1 = gg.at_one()

    m = math.ceil(2 / delta)

    # u_1: both f and g certified within delta of their value at 1 on [t_1, 1]
    scan_tol = delta / 100
    u = 0.5
    for _ in range(360):
        okf = ff.shifted(-ff.at_one()).sup_enclosure(scan_tol, 0.0, u).hi < delta
        okg = gg.shifted(-g1).sup_enclosure(scan_tol, 0.0, u).hi < delta
        if okf and okg:
            break
        u *= 0.5
    else:
        raise CertificationError("no certified continuity threshold below delta")

    thresholds = [u]
    spikes = []
    for i in range(m):
        spike = spike_search(ff.ladder, eps=thresholds[-1], delta=delta / 2,
                             norm_tol=norm_tol)
        spikes.append(spike)
        u_next = thresholds[-1] * 0.5
        for _ in range(4000):
            if spike.f.sup_enclosure(scan_tol, 0.0, u_next).hi < delta / 2:
                break
            u_next *= 0.5
            if u_next < 1e-300:
                raise CertificationError("spike tail threshold underflowed")
        else:
            raise CertificationError("no certified tail threshold for spike")
        thresholds.append(u_next)

    coef = g1 + 1
    scale = 1 / (1 + as_fraction(delta))
    members, dists = [], []
    for spike in spikes:
        gi = gg - coef * spike.f
        enc_gi = gi.sup_enclosure(1e-9)
        if enc_gi.hi > (1 + delta) * (1 + 1e-9):
            raise VerificationError(
                f"||g_i|| = {enc_gi.hi} exceeds 1 + delta (spike k={spike.k}, l={spike.l})")
        member = scale * gi
        s_u = spike.peak_u
        dist = abs(member.eval_u(s_u) - ff.eval_u(s_u))
        if dist < 2 - 3 * delta - 1e-8:
            raise VerificationError(
                f"member distance {dist} < 2 - 3*delta at peak u={s_u}")
        members.append(member)
        dists.append(dist)

    avg = None
    w = Fraction(1, m)
    for member in members:
        term = w * member
        avg = term if avg is None else avg + term
    resid = gg - avg
    enc_r = resid.sup_enclosure(1e-9)
    structural = delta / (1 + delta) + float(coef) / (m * (1 + delta)) * (
        1 + (m - 1) * delta / 2)
    if enc_r.hi > 3 * delta + 1e-8:
        raise VerificationError(f"average drifted: certified {enc_r.hi} > 3*delta")
    if enc_r.hi > structural + 1e-8:
        raise VerificationError(
            f"direct bound {enc_r.hi} exceeds the structural bound {structural}")

    if flipped:
        members = [-mem for mem in members]
    return MuntzWitness(
        members=tuple(members), spikes=tuple(spikes), thresholds_u=tuple(thresholds),
        m=m, delta=delta, min_distance=min(dists), avg_error_direct=enc_r.hi,
        avg_error_structural=structural, flipped=flipped)


def delta_family(f: MuntzPolynomial, target: MuntzPolynomial, eps, gamma):
    """Equal-weight far family approximating `target` within gamma."""
    eps, gamma = float(eps), float(gamma)
    delta = min(gamma / 3, eps / 3.0003)
    wit = daugavet_witness_muntz(f, target, eps, delta)
    weights = [Fraction(1, wit.m)] * wit.m
    return list(wit.members), weights


# ---------------------------------------------------------------------------
# Bernstein-type estimate (linear programming on grids)


@dataclass(frozen=True)
class BernsteinResult:
    lower_bound: float     # certified: |p'(t*)| / certified ||p||
    grid_value: float      # raw LP optimum (grid-feasible)
    at: float
    coeffs: tuple
    norm_hi: float


def bernstein_estimate(ladder: ExponentLadder, terms: int, s, grid_n: int) -> BernsteinResult:
    """Lower bound for the truncated derivative-growth constant
    c(Lambda_M, s) = sup ||p'||_[0,s] / ||p||_[0,1] over the first M terms.

    One LP per objective node t*: maximize p'(t*) subject to |p(t_j)| <= 1
    on a [0,1] grid.  The reported bound re-evaluates the optimizer with a
    certified sup norm, so grid slack cannot inflate it.
    """
    s = float(s)
    if not 0 < s < 1:
        raise DeltaLabError("s must lie in (0,1)")
    if terms < 1:
        raise DeltaLabError("need at least one ladder term")
    if grid_n < max(2, terms + 1):
        raise DeltaLabError("degenerate grid: need grid_n >= max(2, terms+1)")
    lambdas = [float(ladder.lambda_at(k)) for k in range(1, terms + 1)]

    t_grid = np.linspace(0.0, 1.0, grid_n)
    T = np.stack([np.power(t_grid, lam) for lam in lambdas], axis=1)
    A_ub = np.vstack([T, -T])
    b_ub = np.ones(2 * grid_n)

    best = None
    for t_star in np.linspace(0.0, s, grid_n):
        d = np.array([lam * (t_star ** (lam - 1) if t_star > 0 or lam != 1 else 1.0)
                      for lam in lambdas])
        if t_star == 0.0:
            d = np.array([lam if lam == 1 else 0.0 for lam in lambdas])
        try:
            val, a = lp.linprog_mixed(-d, A_ub=A_ub, b_ub=b_ub,
                                      bounds=[(None, None)] * terms)
        except lp.Unbounded as exc:
            raise DeltaLabError(f"degenerate grid: {exc}") from exc
        if best is None or -val > best[0]:
            best = (-val, float(t_star), tuple(float(x) for x in a))

    grid_value, at, coeffs = best
    p_hat = MuntzPolynomial(ladder, tuple((k + 1, as_fraction(c))
                                          for k, c in enumerate(coeffs)))
    enc = p_hat.sup_enclosure(1e-9)
    deriv = abs(p_hat.derivative_value(at))
    lower = deriv / enc.hi if enc.hi > 0 else 0.0
    return BernsteinResult(lower_bound=lower, grid_value=grid_value, at=at,
                           coeffs=coeffs, norm_hi=enc.hi)


# ---------------------------------------------------------------------------
# separation of non-endpoint-norming points from their far sets


@dataclass(frozen=True)
class PeakData:
    peaks: tuple
    off_peak_max: float
    half_width: float
    eps_max: float
    bernstein: Optional[BernsteinResult]


@dataclass(frozen=True)
class SeparationRow:
    index: int
    status: str          # "verified" | "skipped"
    note: str
    peak: Optional[float] = None
    peak_gap: Optional[float] = None
    distance_lo: Optional[float] = None


@dataclass(frozen=True)
class SeparationReport:
    rows: tuple
    peaks: PeakData
    hull_lower: Optional[float]
    hull_value: Optional[float]
    eps: float


def _locate_peaks(f: MuntzPolynomial, min_separation=1e-4, tol=1e-7):
    """Interior points where |f| attains its (unit) norm, numerically
    isolated; falls back to a dense grid with a widened tolerance."""
    pairs = f.exponent_pairs()
    brackets = _isolate_positive_roots(_derivative_pairs(pairs))
    candidates = []
    if brackets is not None:
        dfl = _float_terms(_derivative_pairs(pairs))
        for a, b in brackets:
            a2, b2 = _bisect_bracket(dfl, a, b)
            candidates.append(0.5 * (a2 + b2))
    else:
        ts = np.linspace(0.0, 1.0, 8193)
        vals = np.abs([f.eval_t(float(t)) for t in ts])
        for i in range(1, len(ts) - 1):
            if vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1]:
                candidates.append(float(ts[i]))
        warnings.warn("critical-point isolation uncertified; using grid maxima")

    peaks = [t for t in candidates if abs(f.eval_t(t)) >= 1 - tol]
    if not peaks:
        warnings.warn("no peaks at tolerance 1e-7; widening to 1e-5")
        peaks = [t for t in candidates if abs(f.eval_t(t)) >= 1 - 1e-5]
    merged = []
    for t in sorted(peaks):
        if merged and t - merged[-1] < min_separation:
            warnings.warn(f"merging peaks {merged[-1]} and {t} closer than {min_separation}")
            continue
        merged.append(t)
    return merged


def separation_check_muntz(f: MuntzPolynomial, candidates: Sequence[MuntzPolynomial],
                           eps, min_separation=1e-4) -> SeparationReport:
    """For |f(1)| < 1: each far candidate must beat distance 1 at a peak of
    |f|, and the batch stays a guaranteed hull distance > eps away from f.

    eps must clear the threshold min(1/(2m), 1 - off-peak max, 1/4) computed
    from the numerically isolated peaks; candidates that are not certifiably
    far are skipped with a note.
    """
    eps = float(eps)
    _require_constant_free(f.ladder)
    _require_certified_unit(f)
    f1 = f.at_one()
    if abs(f1) >= 1 - UNIT_TOL:
        raise DeltaLabError("separation needs |f(1)| < 1")

    peaks = _locate_peaks(f, min_separation)
    if not peaks:
        raise CertificationError("could not locate any norm-attaining peak")
    m = len(peaks)
    y_m = max(peaks)
    s = (1 + y_m) / 2

    gaps = [peaks[0]] + [b - a for a, b in zip(peaks, peaks[1:])] + [1 - y_m]
    half = min(min(gaps) / 2, (1 - y_m) * 0.9) / 2
    bern = None
    try:
        max_k = max(k for k, _ in f.terms)
        bern = bernstein_estimate(f.ladder, max_k, s, 128)
        if bern.lower_bound > 0:
            half = min(half, 0.49 / bern.lower_bound)
    except DeltaLabError:
        pass

    segments = []
    lo = 0.0
    for y in peaks:
        segments.append((lo, max(lo, y - half)))
        lo = min(1.0, y + half)
    segments.append((lo, 1.0))
    off_max = 0.0
    for a, b in segments:
        if b - a <= 0:
            continue
        enc = f.sup_enclosure(1e-9, u_lo=1 - b, u_hi=1 - a)
        off_max = max(off_max, enc.hi)
    eps_max = min(1 / (2 * m), 1 - off_max, 0.25)
    if not eps < eps_max:
        raise DeltaLabError(f"eps = {eps} must be below the threshold {eps_max}")

    rows, accepted = [], []
    for i, p in enumerate(candidates):
        enc_d = (f - p).sup_enclosure(1e-9)
        if enc_d.lo < 2 - eps:
            rows.append(SeparationRow(i, "skipped",
                                      f"not certifiably far: ||f-p|| <= {enc_d.hi}"))
            continue
        t_at = 1 - enc_d.at_u
        k = min(range(m), key=lambda j: abs(peaks[j] - t_at))
        if abs(peaks[k] - t_at) > half + 1e-9:
            raise VerificationError(
                f"far distance attained at t={t_at}, outside every peak interval")
        gap = abs(f.eval_t(peaks[k]) - p.eval_t(peaks[k]))
        if not gap > 1:
            raise VerificationError(
                f"candidate {i}: |f(y_k) - p(y_k)| = {gap} <= 1 at y_k = {peaks[k]}")
        rows.append(SeparationRow(i, "verified", "", peak=peaks[k], peak_gap=gap,
                                  distance_lo=enc_d.lo))
        accepted.append(p)

    hull_lower = hull_value = None
    if accepted:
        res = hull_distance_info(f, accepted, tol=min(eps / 10, 1e-3))
        hull_lower, hull_value = res.lower, res.value
        if not hull_lower > eps:
            raise VerificationError(
                f"batch hull distance lower bound {hull_lower} fails to clear eps = {eps}")
    peakdata = PeakData(tuple(peaks), off_max, half, eps_max, bern)
    return SeparationReport(tuple(rows), peakdata, hull_lower, hull_value, eps)


# ---------------------------------------------------------------------------
# convex decomposition into endpoint-norming parts


@dataclass(frozen=True)
class MuntzDecomposition:
    mu: Fraction
    f_plus: MuntzPolynomial
    f_minus: MuntzPolynomial
    n: int
    deficit: float
    norm_plus: Enclosure
    norm_minus: Enclosure


def _last_sign_change(pairs) -> float:
    """Right end of the last bracketed root on (0,1), or 0.0 when none;
    grid fallback when isolation is uncertified."""
    if not pairs:
        return 0.0
    brackets = _isolate_positive_roots(pairs)
    if brackets is not None:
        return brackets[-1][1] if brackets else 0.0
    fpairs = _float_terms(pairs)
    ts = np.linspace(1e-6, 1.0, 4097)
    vals = [_eval_pairs_t(fpairs, 0.0, float(t)) for t in ts]
    last = 0.0
    for i in range(len(ts) - 1):
        if vals[i] * vals[i + 1] < 0:
            last = float(ts[i + 1])
    return last


def convex_dld2p_decompose_muntz(f: MuntzPolynomial, cap=400,
                                 norm_tol=NORM_TOL) -> MuntzDecomposition:
    """Write f (strict norm deficit) as mu f+ + (1-mu) f- with f+-(1) = +-1,
    both parts certified inside the ball, and coefficient-exact
    reconstruction: f+- = f + (+-1 - f(1)) t^{lam_n} and mu = (f(1)+1)/2.

    The search starts at the least n with t0^{lam_n} < deficit/2 (t0 past
    the last sign change of f' and f'') and accepts the first n whose parts
    certify; the cap is a budget, termination is guaranteed by summability.
    """
    _require_constant_free(f.ladder)
    enc = f.sup_enclosure(norm_tol)
    if not enc.hi < 1:
        raise DeltaLabError("decomposition needs a strict norm deficit (||f|| < 1)")
    s = 1 - enc.hi

    if not f.terms:
        one = MuntzPolynomial.monomial(f.ladder, 1)
        return MuntzDecomposition(Fraction(1, 2), one, -one, 1, 1.0,
                                  one.sup_enclosure(norm_tol),
                                  one.sup_enclosure(norm_tol))

    pairs = f.exponent_pairs()
    dpairs = _derivative_pairs(pairs)
    d_at_one = sum((c for _, c in dpairs), Fraction(0))
    increasing = d_at_one > 0 or (
        d_at_one == 0 and f.derivative_value(1.0 - 1e-6) > 0)
    if increasing:
        inner = convex_dld2p_decompose_muntz(-f, cap=cap, norm_tol=norm_tol)
        return MuntzDecomposition(
            mu=1 - inner.mu, f_plus=-inner.f_minus, f_minus=-inner.f_plus,
            n=inner.n, deficit=inner.deficit,
            norm_plus=inner.norm_minus, norm_minus=inner.norm_plus)

    t0 = max(_last_sign_change(dpairs),
             _last_sign_change(_derivative_pairs(dpairs)))
    t0 = min(t0, 0.999)
    if t0 <= 0:
        n0 = 1
    else:
        bound = math.log(s / 2) / math.log(t0)
        n0 = f.ladder.min_index_where(lambda lam: float(lam) > bound)

    f1 = f.at_one()
    mu = (f1 + 1) / 2
    for n in range(n0, n0 + cap + 1):
        mono = MuntzPolynomial.monomial(f.ladder, n)
        f_plus = f + (1 - f1) * mono
        f_minus = f - (1 + f1) * mono
        enc_p = f_plus.sup_enclosure(norm_tol)
        enc_m = f_minus.sup_enclosure(norm_tol)
        if enc_p.hi <= 1 + 1e-9 and enc_m.hi <= 1 + 1e-9:
            recon = mu * f_plus + (1 - mu) * f_minus
            if recon.terms != f.terms or recon.const != f.const:
                raise VerificationError("reconstruction is not coefficient-exact")
            if f_plus.at_one() != 1 or f_minus.at_one() != -1:
                raise VerificationError("endpoint values of the parts are off")
            return MuntzDecomposition(mu, f_plus, f_minus, n, float(s), enc_p, enc_m)
    raise CertificationError(
        f"no certified part found for n in [{n0}, {n0 + cap}]; largest tried {n0 + cap}")
