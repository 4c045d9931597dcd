"""Shared geometry kernel for the space models.

Vocabulary used throughout the package, for a real Banach space X with unit
ball B and sphere S:

* a *slice* is ``{y in B : phi(y) > 1 - eps}`` for a norm-one functional phi;
* ``far_eps(x) = {y in B : ||x - y|| >= 2 - eps}`` is the far set of x;
* x in S is a *Delta point* if x lies in the closed convex hull of
  ``far_eps(x)`` for every eps > 0, and a *Daugavet point* if that hull is
  the whole ball for every eps > 0.

The kernel works over duck-typed payload points (step functions, truncated
sequences, generalized polynomials).  Polyhedral payloads expose an exact
coordinate embedding; the sup-norm payloads expose certified enclosures and
are handled by a cutting-plane loop.

On the slice criterion for Delta points we use the reading that the far
witness must lie inside the slice itself (matching the Daugavet criterion);
`check_delta_via_slices` documents and implements that reading.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

from . import lp
from .util import UNIT_TOL, as_fraction, sgn


class SpaceTag(Enum):
    L1 = "L1"
    C_SEQ = "C_SEQ"
    MUNTZ = "MUNTZ"
    SUM = "SUM"


class DeltaLabError(Exception):
    pass


class MixedSpaceError(DeltaLabError):
    pass


class EmptySliceError(DeltaLabError):
    pass


class NotPolyhedralError(DeltaLabError):
    pass


class VerificationError(DeltaLabError):
    """A constructed object failed its own re-verification."""


class CertificationError(DeltaLabError):
    """A certified enclosure could not be tightened to the requested width."""


def require_unit(point, tol=UNIT_TOL):
    n = point.norm()
    if abs(n - 1) > tol:
        raise DeltaLabError(f"point must have unit norm, got {float(n)!r}")


# ---------------------------------------------------------------------------
# functionals, slices, rank-1 operators


class Functional:
    """Base class for dual elements; subclasses live with their space model."""

    space_tag: SpaceTag

    def __call__(self, point):  # pragma: no cover - abstract
        raise NotImplementedError

    def dual_norm(self):  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class Slice:
    """S(phi, eps) = {y in the unit ball : phi(y) > 1 - eps}, dual_norm(phi)=1."""

    functional: Functional
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eps", as_fraction(self.eps))
        if self.eps <= 0:
            raise DeltaLabError("slice needs eps > 0")
        if abs(self.functional.dual_norm() - 1) > UNIT_TOL:
            raise DeltaLabError("slice functional must have dual norm 1")

    def contains(self, point, tol=UNIT_TOL):
        return point.norm() <= 1 + tol and self.functional(point) > 1 - self.eps


@dataclass(frozen=True)
class Rank1Operator:
    """T = phi (x) direction, acting as p -> phi(p) * direction."""

    functional: Functional
    direction: Any

    def apply(self, point):
        return self.functional(point) * self.direction

    @property
    def is_projection(self):
        return abs(self.functional(self.direction) - 1) <= UNIT_TOL


# ---------------------------------------------------------------------------
# certificates


class Verdict(Enum):
    DELTA_YES = "DELTA_YES"
    DELTA_NO = "DELTA_NO"
    DAUGAVET_YES = "DAUGAVET_YES"
    DAUGAVET_NO = "DAUGAVET_NO"


@dataclass(frozen=True)
class WitnessRecord:
    """A far family for one (eps, delta, target): each member is far from the
    anchor and the weighted combination approximates the target."""

    eps: Any
    delta: Any
    target: Any
    members: tuple  # ((point, weight), ...)
    min_distance: Any
    combo_error: Any
    anchor: Any = None


@dataclass(frozen=True)
class Refutation:
    """Quantitative obstruction: either a rank-1 projection with
    ||Id - P|| = bound < 2, or a separating functional with a positive
    hull-distance bound."""

    refuter: Any  # Functional | Rank1Operator
    bound: Any
    margin: Any
    note: str = ""


@dataclass(frozen=True)
class Certificate:
    verdict: Verdict
    witness: tuple = ()
    refutation: Optional[Refutation] = None
    log: tuple = ()

    def recheck(self):
        """Re-verify whatever the certificate claims from its own data."""
        if self.refutation is not None and self.verdict in (Verdict.DELTA_NO, Verdict.DAUGAVET_NO):
            if self.refutation.margin <= 0:
                raise VerificationError("refutation carries no positive margin")
            if isinstance(self.refutation.refuter, Rank1Operator):
                norm = id_minus_rank1_norm(self.refutation.refuter)
                if norm > self.refutation.bound:
                    raise VerificationError(
                        f"||Id-P|| = {float(norm)} exceeds certified bound {float(self.refutation.bound)}"
                    )
        for rec in self.witness:
            for member, _ in rec.members:
                if member.norm() > 1 + UNIT_TOL:
                    raise VerificationError("witness member leaves the unit ball")
                if rec.anchor is not None:
                    d = (rec.anchor - member).norm()
                    # exact payload norms compare exactly; enclosure-backed
                    # ones get the enclosure slack
                    slack = 0 if isinstance(d, Fraction) else 1e-6
                    if d < 2 - rec.eps - slack:
                        raise VerificationError(
                            f"witness member at distance {float(d)} < 2 - eps")
            combo = None
            for member, weight in rec.members:
                term = weight * member
                combo = term if combo is None else combo + term
            if rec.target is not None and combo is not None:
                err = (rec.target - combo).norm()
                if err > rec.combo_error + UNIT_TOL:
                    raise VerificationError("witness combination drifted from target")
        return True


# ---------------------------------------------------------------------------
# distance to a convex hull


@dataclass(frozen=True)
class HullResult:
    value: Any
    lower: Any
    upper: Any
    weights: tuple
    iterations: int = 0


def _standard_form_w1(weights, target, vectors):
    """min sum_c m_c |x_c - (P lam)_c| over the simplex, as A z = b, z >= 0.

    Variables: lam (k), d+ (n), d- (n).
    """
    k, n = len(vectors), len(target)
    rows, rhs = [], []
    for c in range(n):
        row = [vectors[i][c] for i in range(k)]
        row += [1 if j == c else 0 for j in range(n)]
        row += [-1 if j == c else 0 for j in range(n)]
        rows.append(row)
        rhs.append(target[c])
    rows.append([1] * k + [0] * (2 * n))
    rhs.append(1)
    cost = [0] * k + list(weights) + list(weights)
    return cost, rows, rhs, k


def _standard_form_winf(target, vectors):
    """min max_c |x_c - (P lam)_c| over the simplex, as A z = b, z >= 0.

    Variables: lam (k), d+ (n), d- (n), s (n), t.
    """
    k, n = len(vectors), len(target)
    nvar = k + 3 * n + 1
    rows, rhs = [], []
    for c in range(n):
        row = [0] * nvar
        for i in range(k):
            row[i] = vectors[i][c]
        row[k + c] = 1
        row[k + n + c] = -1
        rows.append(row)
        rhs.append(target[c])
    for c in range(n):
        row = [0] * nvar
        row[k + c] = 1
        row[k + n + c] = 1
        row[k + 2 * n + c] = 1
        row[-1] = -1
        rows.append(row)
        rhs.append(0)
    row = [0] * nvar
    for i in range(k):
        row[i] = 1
    rows.append(row)
    rhs.append(1)
    cost = [0] * (nvar - 1) + [1]
    return cost, rows, rhs, k


def hull_distance_info(target, points, tol=1e-9, exact=None, max_rounds=200):
    """Distance from `target` to the convex hull of `points`, with weights.

    Polyhedral payloads reduce to one linear program (exact rational simplex
    when `exact`, HiGHS otherwise).  Sup-norm payloads run a cutting-plane
    loop: a master LP on finitely many evaluation nodes gives a lower bound,
    a certified sup-norm of the achieved residual gives an upper bound, and
    nodes are added until the gap is at most `tol`.
    """
    if not points:
        raise DeltaLabError("hull_distance needs a nonempty point list")
    tags = {p.space_tag for p in points} | {target.space_tag}
    if len(tags) != 1:
        raise MixedSpaceError(f"mixed space tags {sorted(t.value for t in tags)}")

    embed = getattr(type(target), "hull_embedding", None)
    if embed is not None:
        kind, weights, vectors = embed([target, *points])
        tvec, pvecs = vectors[0], vectors[1:]
        if kind == "w1":
            cost, rows, rhs, k = _standard_form_w1(weights, tvec, pvecs)
        elif kind == "winf":
            cost, rows, rhs, k = _standard_form_winf(tvec, pvecs)
        else:  # pragma: no cover - embeddings only emit the two kinds
            raise DeltaLabError(f"unknown embedding kind {kind!r}")
        if exact is None:
            exact = len(rows) * len(cost) <= 30_000
        if exact:
            value, z = lp.simplex_exact(cost, rows, rhs)
            lam = tuple(z[:k])
        else:
            value, z = lp.simplex_float(cost, rows, rhs)
            lam = tuple(float(v) for v in z[:k])
        return HullResult(value=value, lower=value, upper=value, weights=lam, iterations=1)

    return _hull_distance_exchange(target, points, tol, max_rounds)


def _hull_distance_exchange(target, points, tol, max_rounds):
    sup_enclosure = getattr(type(target), "sup_enclosure", None)
    eval_u = getattr(type(target), "eval_u", None)
    if sup_enclosure is None or eval_u is None:
        raise NotPolyhedralError(
            f"{type(target).__name__} has neither a polyhedral embedding nor certified sup-norms"
        )
    k = len(points)
    nodes = [Fraction(j, 8) for j in range(9)]  # u-coordinates, u = 1 - t
    for p in points:
        enc = (target - p).sup_enclosure(max(tol, 1e-12))
        nodes.append(enc.at_u)
    nodes = sorted(set(nodes))

    lam = None
    for rounds in range(1, max_rounds + 1):
        cols = k + 1
        A_ub, b_ub = [], []
        for u in nodes:
            tv = target.eval_u(u)
            pv = [p.eval_u(u) for p in points]
            A_ub.append([v for v in pv] + [-1.0])
            b_ub.append(tv)
            A_ub.append([-v for v in pv] + [-1.0])
            b_ub.append(-tv)
        cost = [0.0] * k + [1.0]
        lower, z = lp.linprog_mixed(
            cost, A_ub=A_ub, b_ub=b_ub, A_eq=[[1.0] * k + [0.0]], b_eq=[1.0],
            bounds=[(0, None)] * k + [(None, None)])
        lam = z[:k]
        residual = target - _combine(points, lam)
        enc = residual.sup_enclosure(max(tol * 0.25, 1e-13))
        upper = enc.hi
        if upper - lower <= tol:
            return HullResult(value=upper, lower=lower, upper=upper,
                              weights=tuple(float(v) for v in lam), iterations=rounds)
        if enc.at_u in nodes:
            # stagnated node set: bisect around the active maximizer
            nodes.extend([enc.at_u / 2, (enc.at_u + 1) / 2])
        nodes.append(enc.at_u)
        nodes = sorted(set(nodes))
    raise CertificationError(f"hull distance gap > {tol} after {max_rounds} rounds")


def _combine(points, weights):
    acc = None
    for p, w in zip(points, weights):
        term = float(w) * p
        acc = term if acc is None else acc + term
    return acc


def hull_distance(target, points, tol=1e-9, exact=None):
    """min over convex weights of ||target - sum_i w_i p_i||, within tol."""
    return hull_distance_info(target, points, tol=tol, exact=exact).value


# ---------------------------------------------------------------------------
# ||Id - T|| for rank-1 T on the polyhedral models


def id_minus_rank1_norm(op: Rank1Operator):
    """Exact operator norm of Id - T on the finite polyhedral models.

    The zero operator is handled generically (||Id|| = 1); otherwise the
    payload computes the maximum of ||(Id-T)e|| over the extreme points of
    its model's unit ball.
    """
    if op.functional.dual_norm() == 0:
        return Fraction(1)
    impl = getattr(op.direction, "_id_minus_rank1_norm", None)
    if impl is None:
        raise NotPolyhedralError(
            "exact operator norms need a polyhedral model; use id_minus_rank1_lower_bound"
        )
    return impl(op.functional)


def id_minus_rank1_lower_bound(op: Rank1Operator, ball_points: Sequence) -> float:
    """Sampled lower bound sup ||(Id-T)p|| over the supplied ball points."""
    best = 0.0
    for p in ball_points:
        if p.norm() > 1 + UNIT_TOL:
            raise DeltaLabError("lower-bound sample outside the unit ball")
        img = p - op.functional(p) * op.direction
        best = max(best, float(img.norm()))
    return best


# ---------------------------------------------------------------------------
# exact slice polytopes (geometry over Fraction vectors)


def crosspolytope_slice_vertices(masses, coeffs, thresh):
    """Vertices of {sum_c m_c |y_c| <= 1} cap {sum_c a_c m_c y_c >= thresh}.

    The ball is a weighted cross-polytope with vertices +-e_c/m_c; vertices of
    the intersection are ball vertices inside the halfspace plus edge cuts.
    All arithmetic is exact.
    """
    n = len(masses)
    masses = [as_fraction(m) for m in masses]
    coeffs = [as_fraction(a) for a in coeffs]
    thresh = as_fraction(thresh)

    verts = []
    for c in range(n):
        for s in (1, -1):
            v = [Fraction(0)] * n
            v[c] = Fraction(s, 1) / masses[c]
            verts.append((tuple(v), s * coeffs[c]))

    out = {v for v, phi in verts if phi >= thresh}
    for (v1, phi1), (v2, phi2) in itertools.combinations(verts, 2):
        if n > 1 and all(a == -b for a, b in zip(v1, v2)):
            continue  # antipodal pairs are not edges (except the 1-d segment)
        if (phi1 >= thresh) == (phi2 >= thresh):
            continue
        t = (thresh - phi1) / (phi2 - phi1)
        if 0 < t < 1:
            cut = tuple((1 - t) * a + t * b for a, b in zip(v1, v2))
            out.add(cut)
    return [tuple(v) for v in sorted(out)]


def cube_slice_vertices(dim, weights, thresh, max_dim=14):
    """Vertices of [-1,1]^dim cap {sum_j w_j y_j >= thresh}, exact."""
    if dim > max_dim:
        raise DeltaLabError(f"cube slice enumeration capped at dim {max_dim}, got {dim}")
    weights = [as_fraction(w) for w in weights]
    thresh = as_fraction(thresh)

    out = set()
    for signs in itertools.product((1, -1), repeat=dim):
        phi = sum(w * s for w, s in zip(weights, signs))
        if phi >= thresh:
            out.add(tuple(Fraction(s) for s in signs))
        for j in range(dim):
            if signs[j] != 1 or weights[j] == 0:
                continue
            base = phi - weights[j]
            lo, hi = base - weights[j], base + weights[j]
            if (lo >= thresh) == (hi >= thresh):
                continue
            yj = (thresh - base) / weights[j]
            if -1 < yj < 1:
                cut = tuple(Fraction(s) if i != j else yj for i, s in enumerate(signs))
                out.add(cut)
    return [tuple(v) for v in sorted(out)]


@dataclass(frozen=True)
class SlicePolytope:
    kind: str  # "w1" | "winf"
    weights: Optional[tuple]
    vertices: tuple

    def distance(self, u, v):
        if self.kind == "w1":
            return sum(m * abs(a - b) for m, a, b in zip(self.weights, u, v))
        return max(abs(a - b) for a, b in zip(u, v))

    def diameter(self):
        best = Fraction(0)
        verts = self.vertices
        for i in range(len(verts)):
            for j in range(i + 1, len(verts)):
                d = self.distance(verts[i], verts[j])
                if d > best:
                    best = d
        return best


def slice_diameter(slc: Slice, exact=True, sampler: Optional[Callable] = None,
                   samples: int = 2000, rng=None):
    """Diameter of a slice of the unit ball.

    Exact mode enumerates the vertices of the closed slice polytope (the
    diameter of a polytope is attained at a vertex pair).  Sampled mode
    rejection-samples ball points through `sampler(rng)` and reports the best
    pairwise distance found: a certified lower bound.
    """
    if exact:
        build = getattr(slc.functional, "slice_polytope", None)
        if build is None:
            raise NotPolyhedralError("exact slice diameters need a polyhedral model")
        poly = build(slc.eps)
        if not poly.vertices:
            raise EmptySliceError("no unit-ball point satisfies the slice")
        return poly.diameter()
    if sampler is None:
        raise DeltaLabError("sampled slice diameter needs a ball sampler")
    hits = []
    for _ in range(samples):
        p = sampler(rng)
        if slc.contains(p):
            hits.append(p)
    if not hits:
        raise EmptySliceError("sampler found no point of the slice")
    best = 0.0
    for i in range(len(hits)):
        for j in range(i + 1, len(hits)):
            best = max(best, float((hits[i] - hits[j]).norm()))
    return best


# ---------------------------------------------------------------------------
# slice-wise Delta search


@dataclass(frozen=True)
class SliceSearchRow:
    index: int
    found: bool
    witness: Any
    distance: Any
    functional_value: Any


@dataclass(frozen=True)
class SliceSearchReport:
    eps: Any
    rows: tuple
    positive: bool


def check_delta_via_slices(x, eps, slice_family: Sequence[Slice], search_budget: int = 64,
                           generator: Optional[Callable] = None) -> SliceSearchReport:
    """For each slice containing x, hunt for y in the slice with
    ||x - y|| >= 2 - eps.

    Polyhedral models search the slice polytope's vertices (exact); other
    models fall back to a caller-supplied `generator(x, slc, eps, budget)`
    yielding candidate slice points.  Slices where nothing is found within
    the budget are reported NEGATIVE rather than raised.
    """
    require_unit(x)
    eps = as_fraction(eps)
    rows = []
    for idx, slc in enumerate(slice_family):
        if not slc.contains(x):
            raise DeltaLabError(f"slice {idx} does not contain the anchor point")
        best_y, best_d = None, None
        build = getattr(slc.functional, "slice_polytope", None)
        if build is not None:
            poly = build(slc.eps)
            lift = slc.functional.point_from_coords
            for vert in poly.vertices:
                y = lift(vert)
                d = (x - y).norm()
                if best_d is None or d > best_d:
                    best_y, best_d = y, d
        elif generator is not None:
            for y in itertools.islice(generator(x, slc, eps, search_budget), search_budget):
                if not slc.contains(y):
                    continue
                d = (x - y).norm()
                if best_d is None or d > best_d:
                    best_y, best_d = y, d
        found = best_d is not None and best_d >= 2 - eps
        rows.append(SliceSearchRow(
            index=idx,
            found=found,
            witness=best_y if found else None,
            distance=best_d,
            functional_value=slc.functional(best_y) if best_y is not None else None,
        ))
    return SliceSearchReport(eps=eps, rows=tuple(rows), positive=all(r.found for r in rows))
