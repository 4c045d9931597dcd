"""Absolute normalized norms on R^2 and direct sums X (+)_N Y.

The geometry of Daugavet points in a sum is governed by two mutually
exclusive features of N: positive octahedrality (some nonnegative unit pair
adds norm-2 with both unit vectors; then Daugavet points survive the sum)
and a separation property forcing one coordinate of near-far pairs below 1
(then the sum has no Daugavet points at all, even when every sphere point of
both components is a Delta point).  Octahedrality is decided exactly for
l1, linf and polygonal norms; the separation property ships as a sufficient
test (strict convexity) plus per-pair certified records, a necessary
violation (octahedrality), and an honest UNDECIDED in between.
"""

from __future__ import annotations

import ast
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import ck as ck_mod
from . import l1 as l1_mod
from . import muntz as muntz_mod
from . import lp
from .core import (
    DeltaLabError,
    SpaceTag,
    VerificationError,
    require_unit,
)
from .util import UNIT_TOL, as_fraction, sgn


class InsufficientCertificateError(DeltaLabError):
    pass


# ---------------------------------------------------------------------------
# absolute normalized norms


def _graham_hull(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]  # CCW


@dataclass(frozen=True)
class AbsoluteNorm:
    """N(a,b) = N(|a|,|b|), N(1,0) = N(0,1) = 1.

    Kinds: "lp" with p in [1, inf] (exact for p = 1, inf; float otherwise)
    and "polygonal" (gauge of a symmetric polygon, exact rationals).
    Monotonicity in each coordinate is re-checked on a coarse grid at
    construction.
    """

    kind: str
    p: Optional[float] = None
    quadrant_vertices: Optional[tuple] = None
    label: str = ""
    facets: tuple = field(default=(), compare=False, repr=False)
    hull: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.kind == "lp":
            if self.p is None or (self.p != math.inf and self.p < 1):
                raise DeltaLabError("lp norms need p in [1, inf]")
        elif self.kind == "polygonal":
            verts = tuple((as_fraction(a), as_fraction(b))
                          for a, b in self.quadrant_vertices)
            if any(a < 0 or b < 0 for a, b in verts):
                raise DeltaLabError("quadrant vertices must be nonnegative")
            object.__setattr__(self, "quadrant_vertices", verts)
            full = []
            for a, b in verts + ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))):
                for sa in (1, -1):
                    for sb in (1, -1):
                        full.append((sa * a, sb * b))
            hull = _graham_hull(full)
            if len(hull) < 3:
                raise DeltaLabError("polygon is degenerate")
            facets = []
            for v, w in zip(hull, hull[1:] + hull[:1]):
                nx, ny = w[1] - v[1], v[0] - w[0]
                c = nx * v[0] + ny * v[1]
                if c <= 0:
                    raise DeltaLabError("origin is not interior to the polygon")
                facets.append((nx, ny, c))
            object.__setattr__(self, "facets", tuple(facets))
            object.__setattr__(self, "hull", tuple(hull))
            if self(1, 0) != 1 or self(0, 1) != 1:
                raise DeltaLabError("polygon gauge is not normalized at the axes")
        else:
            raise DeltaLabError(f"unknown norm kind {self.kind!r}")
        self._check_monotone_grid()

    def _check_monotone_grid(self, steps=5, tol=1e-12):
        vals = [Fraction(i, steps - 1) for i in range(steps)]
        for i, a in enumerate(vals):
            for j, b in enumerate(vals):
                if i + 1 < steps and float(self(vals[i + 1], b)) < float(self(a, b)) - tol:
                    raise DeltaLabError("norm is not monotone in the first coordinate")
                if j + 1 < steps and float(self(a, vals[j + 1])) < float(self(a, b)) - tol:
                    raise DeltaLabError("norm is not monotone in the second coordinate")

    # constructors ---------------------------------------------------------
    @classmethod
    def l1(cls):
        return cls(kind="lp", p=1.0, label="l1")

    @classmethod
    def l2(cls):
        return cls(kind="lp", p=2.0, label="l2")

    @classmethod
    def linf(cls):
        return cls(kind="lp", p=math.inf, label="linf")

    @classmethod
    def lp(cls, p):
        p = float(p)
        return cls(kind="lp", p=p, label=f"lp:{p:g}")

    @classmethod
    def polygon(cls, quadrant_vertices):
        return cls(kind="polygonal", quadrant_vertices=tuple(quadrant_vertices),
                   label="poly")

    @classmethod
    def parse(cls, spec: str) -> "AbsoluteNorm":
        spec = spec.strip()
        if spec == "l1":
            return cls.l1()
        if spec == "l2":
            return cls.l2()
        if spec == "linf":
            return cls.linf()
        if spec.startswith("lp:"):
            return cls.lp(float(spec[3:]))
        if spec.startswith("poly:"):
            verts = ast.literal_eval(spec[5:])
            return cls.polygon(verts)
        raise DeltaLabError(f"cannot parse norm spec {spec!r}")

    # evaluation -----------------------------------------------------------
    def __call__(self, a, b):
        if self.kind == "lp":
            if self.p == 1.0:
                return abs(a) + abs(b)
            if self.p == math.inf:
                return max(abs(a), abs(b))
            af, bf = abs(float(a)), abs(float(b))
            if af == 0 and bf == 0:
                return 0.0
            m = max(af, bf)
            return m * ((af / m) ** self.p + (bf / m) ** self.p) ** (1 / self.p)
        a, b = abs(as_fraction(a)), abs(as_fraction(b))
        return max((nx * a + ny * b) / c for nx, ny, c in self.facets)

    def dual(self, c, d):
        """Dual norm max{ca + db : N(a,b) <= 1}."""
        if self.kind == "lp":
            if self.p == 1.0:
                return max(abs(c), abs(d))
            if self.p == math.inf:
                return abs(c) + abs(d)
            q = self.p / (self.p - 1)
            return (abs(float(c)) ** q + abs(float(d)) ** q) ** (1 / q)
        c, d = as_fraction(c), as_fraction(d)
        return max(c * vx + d * vy for vx, vy in self.hull)

    @property
    def is_exact(self):
        return self.kind == "polygonal" or (self.kind == "lp" and self.p in (1.0, math.inf))

    def name(self):
        return self.label or self.kind


@dataclass(frozen=True)
class SumPoint:
    x: object
    y: object
    norm_rule: AbsoluteNorm

    space_tag = SpaceTag.SUM

    def norm(self):
        return self.norm_rule(self.x.norm(), self.y.norm())

    def _binop(self, other, op):
        if not isinstance(other, SumPoint) or other.norm_rule != self.norm_rule:
            raise DeltaLabError("sum points must share the norm rule")
        return SumPoint(op(self.x, other.x), op(self.y, other.y), self.norm_rule)

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    def __neg__(self):
        return SumPoint(-self.x, -self.y, self.norm_rule)

    def __mul__(self, scalar):
        return SumPoint(scalar * self.x, scalar * self.y, self.norm_rule)

    __rmul__ = __mul__

    def distance(self, other):
        d = self - other
        return self.norm_rule(d.x.norm(), d.y.norm())


# ---------------------------------------------------------------------------
# simultaneous rational approximation of convex weights


def _round_counts(weights, n):
    base = [int(n * w + Fraction(1, 2)) for w in weights]
    diff = n - sum(base)
    if diff != 0:
        rema = sorted(
            range(len(weights)),
            key=lambda i: (-(n * weights[i] - base[i]), i))
        j = 0
        while diff != 0 and j < 4 * len(weights):
            i = rema[j % len(weights)]
            if diff > 0:
                base[i] += 1
                diff -= 1
            elif base[i] > 0:
                base[i] -= 1
                diff += 1
            j += 1
    return base


def _normalize_weights(weights):
    w = [as_fraction(v) for v in weights]
    if any(v <= 0 for v in w):
        raise DeltaLabError("weights must be positive")
    total = sum(w, Fraction(0))
    if abs(total - 1) > Fraction(1, 10**9):
        raise DeltaLabError("weights must sum to 1")
    return [v / total for v in w]


def dirichlet_average(weights, eps, n_max=1_000_000):
    """Smallest n (under the scan order) with counts k_i summing to n and
    sum |w_i - k_i/n| < eps; largest-remainder rounding at each n."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise DeltaLabError("eps must be positive")
    w = _normalize_weights(weights)
    for n in range(1, n_max + 1):
        counts = _round_counts(w, n)
        if any(k < 0 for k in counts) or sum(counts) != n:
            continue
        err = sum(abs(wi - Fraction(k, n)) for wi, k in zip(w, counts))
        if err < eps:
            return n, tuple(counts)
    raise DeltaLabError("dirichlet scan exhausted (unreachable for positive eps)")


def dirichlet_average_pair(weights_x, weights_y, eps, n_max=1_000_000):
    """One common n making both weight vectors eps-close to k/n averages."""
    eps = as_fraction(eps)
    wx, wy = _normalize_weights(weights_x), _normalize_weights(weights_y)
    for n in range(1, n_max + 1):
        cx, cy = _round_counts(wx, n), _round_counts(wy, n)
        if sum(cx) != n or sum(cy) != n or min(cx + cy, default=0) < 0:
            continue
        ex = sum(abs(w - Fraction(k, n)) for w, k in zip(wx, cx))
        ey = sum(abs(w - Fraction(k, n)) for w, k in zip(wy, cy))
        if ex < eps and ey < eps:
            return n, tuple(cx), tuple(cy)
    raise DeltaLabError("dirichlet scan exhausted")


# ---------------------------------------------------------------------------
# positively octahedral norms


@dataclass(frozen=True)
class OctahedralResult:
    verdict: bool
    witness: Optional[tuple]
    value: float
    exact: bool


def verify_octahedral_witness(norm: AbsoluteNorm, a, b, tol=1e-9) -> bool:
    na = float(norm(a, b))
    return (abs(na - 1) <= tol
            and float(norm(as_fraction(a) + 1, b)) >= 2 - tol
            and float(norm(a, as_fraction(b) + 1)) >= 2 - tol)


def is_positively_octahedral(norm: AbsoluteNorm, tol=None, grid_n=4096) -> OctahedralResult:
    """Search for a nonnegative unit pair adding norm 2 with both unit
    vectors; exact for l1/linf/polygonal, grid verdict otherwise."""
    if norm.kind == "lp" and norm.p == 1.0:
        return OctahedralResult(True, (Fraction(1), Fraction(0)), 2.0, True)
    if norm.kind == "lp" and norm.p == math.inf:
        return OctahedralResult(True, (Fraction(1), Fraction(1)), 2.0, True)
    if norm.kind == "polygonal":
        candidates = [v for v in norm.hull if v[0] >= 0 and v[1] >= 0]
        # a facet containing both axis points yields interior witnesses too
        for nx, ny, c in norm.facets:
            if nx * 1 + ny * 0 == c and nx * 0 + ny * 1 == c:
                mid = (Fraction(1, 2), Fraction(1, 2))
                candidates.append((mid[0] / norm(*mid), mid[1] / norm(*mid)))
        for a, b in candidates:
            if norm(a, b) == 1 and norm(a + 1, b) == 2 and norm(a, b + 1) == 2:
                return OctahedralResult(True, (a, b), 2.0, True)
        best = _octahedral_grid_max(norm, grid_n)
        return OctahedralResult(False, None, best, True)

    tol = 1e-6 if tol is None else tol
    best, arg = -1.0, None
    for i in range(grid_n + 1):
        th = math.pi / 2 * i / grid_n
        ux, uy = math.cos(th), math.sin(th)
        nrm = float(norm(ux, uy))
        a, b = ux / nrm, uy / nrm
        v = min(float(norm(a + 1, b)), float(norm(a, b + 1)))
        if v > best:
            best, arg = v, (a, b)
    if best >= 2 - tol:
        return OctahedralResult(True, arg, best, False)
    return OctahedralResult(False, arg, best, False)


def _octahedral_grid_max(norm, grid_n):
    best = -1.0
    for i in range(grid_n + 1):
        th = math.pi / 2 * i / grid_n
        ux, uy = math.cos(th), math.sin(th)
        nrm = float(norm(ux, uy))
        a, b = ux / nrm, uy / nrm
        best = max(best, min(float(norm(a + 1, b)), float(norm(a, b + 1))))
    return best


# ---------------------------------------------------------------------------
# the separation property (alpha)


@dataclass(frozen=True)
class AlphaRecord:
    c: float
    d: float
    eps: float
    radius: float
    route: str       # "a": first coordinate bounded on W; "b": second
    sup_bound: float  # certified sup of the bounded coordinate over W cap ball


@dataclass(frozen=True)
class AlphaResult:
    verdict: Optional[bool]   # True / False / None = UNDECIDED
    note: str
    octahedral_witness: Optional[tuple]
    strict_margin: Optional[float]
    sample_records: tuple
    norm: AbsoluteNorm = field(compare=False, repr=False, default=None)
    grid_n: int = field(compare=False, default=4096)

    def record(self, c, d) -> AlphaRecord:
        if self.verdict is not True:
            raise InsufficientCertificateError(
                f"no separation certificate for this norm ({self.note})")
        return _alpha_record(self.norm, c, d, self.grid_n)


def _alpha_record(norm: AbsoluteNorm, c, d, grid_n) -> AlphaRecord:
    cf, df = float(c), float(d)
    if abs(float(norm(cf, df)) - 1) > 1e-9:
        raise DeltaLabError("alpha records are issued for unit pairs (c,d)")
    route = "a" if cf <= df else "b"
    bounded = cf if route == "a" else df
    if bounded >= 1 - 1e-12:
        route = "b" if route == "a" else "a"
        bounded = df if route == "b" else cf
        if bounded >= 1 - 1e-12:
            raise InsufficientCertificateError(
                "both coordinates reach 1 at (c,d); no bounded route")
    r = (1 - bounded) / 2

    # sup of N((a,b) + (c,d)) over the ball quadrant outside W; by coordinate
    # monotonicity the sup lives on the sphere arc outside W or on the part
    # of the W-boundary inside the ball.  Each 1-d arc gets a Lipschitz slack.
    n = grid_n
    for _ in range(4):
        step = math.pi / 2 / n
        worst = 0.0
        for i in range(n + 1):
            th = math.pi / 2 * i / n
            ux, uy = math.cos(th), math.sin(th)
            nrm = float(norm(ux, uy))
            a, b = ux / nrm, uy / nrm
            if float(norm(a - cf, b - df)) >= r:
                worst = max(worst, float(norm(a + cf, b + df)) + 9 * step)
        for i in range(4 * n + 1):
            ps = 2 * math.pi * i / (4 * n)
            ux, uy = math.cos(ps), math.sin(ps)
            nrm = float(norm(ux, uy))
            a, b = cf + r * ux / nrm, df + r * uy / nrm
            if a < 0 or b < 0 or float(norm(a, b)) > 1:
                continue
            worst = max(worst, float(norm(a + cf, b + df)) + 6 * r * step)
        eps = 2 - worst
        if eps > 0:
            return AlphaRecord(c=cf, d=df, eps=eps, radius=r, route=route,
                               sup_bound=bounded + r)
        n *= 4
    raise InsufficientCertificateError(
        f"certified separation margin vanished at ({cf}, {df}); refine the grid")


def has_property_alpha(norm: AbsoluteNorm, tol=None, grid_n=4096) -> AlphaResult:
    """Three-way verdict: octahedral => False; grid-certified strict
    convexity => True (with on-demand per-(c,d) records); else UNDECIDED.
    """
    octa = is_positively_octahedral(norm, tol=tol, grid_n=min(grid_n, 2048))
    if octa.verdict:
        return AlphaResult(False, "positively octahedral", octa.witness, None, (),
                           norm=norm, grid_n=grid_n)

    pts = []
    for i in range(0, grid_n + 1, max(1, grid_n // 256)):
        th = math.pi / 2 * i / grid_n
        ux, uy = math.cos(th), math.sin(th)
        nrm = float(norm(ux, uy))
        pts.append((ux / nrm, uy / nrm))
    margin = math.inf
    for (ax, ay), (bx, by) in zip(pts, pts[1:]):
        mid = float(norm((ax + bx) / 2, (ay + by) / 2))
        margin = min(margin, 1 - mid)
    if margin > 1e-12:
        samples = []
        for cd in ((1.0, 0.0), (0.0, 1.0), (0.5, 0.5)):
            nrm = float(norm(*cd))
            samples.append(_alpha_record(norm, cd[0] / nrm, cd[1] / nrm, grid_n))
        return AlphaResult(True, "strictly convex on the sphere grid", None,
                           margin, tuple(samples), norm=norm, grid_n=grid_n)
    return AlphaResult(None, "neither octahedral nor grid-strictly-convex",
                       None, margin, (), norm=norm, grid_n=grid_n)


# ---------------------------------------------------------------------------
# component far-family dispatch


def _family_for(point) -> Callable:
    if isinstance(point, l1_mod.StepFunction):
        def fam(anchor, target, eps, gamma):
            members, weights, _, anchor2, target2 = l1_mod.delta_family(
                anchor, target, eps, gamma)
            return members, weights, anchor2, target2
        return fam
    if isinstance(point, ck_mod.TailSequence):
        def fam(anchor, target, eps, gamma):
            members, weights = ck_mod.delta_family(anchor, target, eps, gamma)
            return members, weights, anchor, target
        return fam
    if isinstance(point, muntz_mod.MuntzPolynomial):
        def fam(anchor, target, eps, gamma):
            members, weights = muntz_mod.delta_family(anchor, target, eps, gamma)
            return members, weights, anchor, target
        return fam
    raise DeltaLabError(f"no far-family generator for {type(point).__name__}")


def _is_daugavet(point) -> bool:
    if isinstance(point, l1_mod.StepFunction):
        return l1_mod.is_daugavet_point_l1(point)[0]
    if isinstance(point, ck_mod.TailSequence):
        return ck_mod.is_daugavet_point_ck(point)[0]
    if isinstance(point, muntz_mod.MuntzPolynomial):
        return muntz_mod.is_daugavet_point_muntz(point)[0]
    raise DeltaLabError(f"no Daugavet decision for {type(point).__name__}")


def _zero_like(point):
    return 0 * point


def _scaled_family(anchor, target_component, scale, eps_comp, gamma, fam):
    """Far family for the normalized target, members rescaled by `scale`.

    scale == 0 yields the single zero member (the proof's u = 0 branch).
    Returns (weighted members, possibly-lifted anchor, possibly-lifted
    scaled target); lifting (L1 refinement) depends only on (anchor, eps),
    so repeated calls stay on one model."""
    if scale == 0:
        return [(_zero_like(anchor), Fraction(1))], anchor, _zero_like(anchor)
    normalized = (1 / as_fraction(scale)) * target_component
    members, weights, anchor2, target2 = fam(anchor, normalized, eps_comp, gamma)
    scale = as_fraction(scale)
    return ([(scale * m, w) for m, w in zip(members, weights)],
            anchor2, scale * target2)


@dataclass(frozen=True)
class SumConstructResult:
    target: SumPoint
    members: tuple
    count: int
    min_distance: float
    avg_error: float


def _assemble_pairs(parts_x, parts_y, anchor_pair, norm, eps, delta, target):
    """Pair weighted component families into equal-count sum members and
    re-verify distances and the average against the target."""
    ax, ay = anchor_pair
    mem_x, w_x = zip(*parts_x)
    mem_y, w_y = zip(*parts_y)
    n, cx, cy = dirichlet_average_pair(w_x, w_y, as_fraction(delta) / 4)
    xs = [m for m, k in zip(mem_x, cx) for _ in range(k)]
    ys = [m for m, k in zip(mem_y, cy) for _ in range(k)]
    members = [SumPoint(px, py, norm) for px, py in zip(xs, ys)]

    z = SumPoint(ax, ay, norm)
    dmin = min(float(z.distance(mem)) for mem in members)
    if dmin < 2 - float(eps) - 1e-9:
        raise VerificationError(
            f"constructed member at distance {dmin} < 2 - eps from the anchor")
    avg = None
    w = Fraction(1, n)
    for mem in members:
        term = w * mem
        avg = term if avg is None else avg + term
    err = float(target.distance(avg))
    if err > float(delta) + 1e-9:
        raise VerificationError(f"average misses the target by {err} > delta")
    return members, n, dmin, err


def sum_daugavet_construct(x, y, norm: AbsoluteNorm, a, b, targets: Sequence,
                           eps, delta) -> list:
    """Far families in X (+)_N Y around z = (a x, b y) for each target.

    Needs x, y Daugavet points and (a, b) an octahedral witness of N.
    Targets may be sphere or ball points of the sum (interior targets split
    along the chord through the origin).  Every member and the average are
    re-verified; failures raise with diagnostics.
    """
    if not verify_octahedral_witness(norm, a, b):
        raise DeltaLabError("(a, b) is not an octahedral witness for this norm")
    if not (_is_daugavet(x) and _is_daugavet(y)):
        raise DeltaLabError("both components must be Daugavet points")
    require_unit(x)
    require_unit(y)
    a, b = as_fraction(a), as_fraction(b)
    fam_x, fam_y = _family_for(x), _family_for(y)
    nu = norm(1, 1)
    eps_comp = as_fraction(eps) / as_fraction(nu)
    gamma = as_fraction(delta) / 4

    results = []
    for target in targets:
        if not isinstance(target, SumPoint):
            target = SumPoint(target[0], target[1], norm)
        r = as_fraction(target.norm())
        if r > 1 + UNIT_TOL:
            raise DeltaLabError("targets must lie in the unit ball")
        if r >= 1 - UNIT_TOL:
            branches = [(target, Fraction(1))]
        elif r == 0:
            zp = SumPoint(x, _zero_like(y), norm)
            branches = [(zp, Fraction(1, 2)), (-zp, Fraction(1, 2))]
        else:
            zp = (1 / r) * target
            branches = [(zp, (1 + r) / 2), (-zp, (1 - r) / 2)]

        parts_x, parts_y = [], []
        anchor_x, anchor_y = x, y
        tx_acc = ty_acc = None
        for branch, bw in branches:
            su, sv = branch.x.norm(), branch.y.norm()
            bx, anchor_x, tx = _scaled_family(x, branch.x, su, eps_comp, gamma, fam_x)
            by, anchor_y, ty = _scaled_family(y, branch.y, sv, eps_comp, gamma, fam_y)
            # equalize the branch pair before merging across branches
            n, cx, cy = dirichlet_average_pair([w for _, w in bx], [w for _, w in by],
                                               gamma)
            xs = [m for (m, _), k in zip(bx, cx) for _ in range(k)]
            ys = [m for (m, _), k in zip(by, cy) for _ in range(k)]
            parts_x += [(m, bw / n) for m in xs]
            parts_y += [(m, bw / n) for m in ys]
            tx_acc = bw * tx if tx_acc is None else tx_acc + bw * tx
            ty_acc = bw * ty if ty_acc is None else ty_acc + bw * ty

        target_check = SumPoint(tx_acc, ty_acc, norm)
        members, n, dmin, err = _assemble_pairs(
            parts_x, parts_y, (a * anchor_x, b * anchor_y), norm, eps, delta,
            target_check)
        results.append(SumConstructResult(target, tuple(members), n, dmin, err))
    return results


@dataclass(frozen=True)
class LiftResult:
    point: SumPoint
    members: tuple
    count: int
    min_distance: float
    avg_error: float


def sum_delta_lift(x, y, norm: AbsoluteNorm, a, b, eps, gamma) -> LiftResult:
    """Certified membership evidence that (a x, b y) is a Delta point of the
    sum: matched-count component far families, pair distances >= 2 - eps in
    the N-norm, and the average within gamma of (a x, b y)."""
    a, b = as_fraction(a), as_fraction(b)
    if abs(float(norm(a, b)) - 1) > 1e-9:
        raise DeltaLabError("need N(a, b) = 1")
    if not as_fraction(gamma) < as_fraction(eps):
        raise DeltaLabError("need gamma < eps")
    require_unit(x)
    require_unit(y)

    gam = as_fraction(gamma) / 2
    if a == 0:
        parts_x, anchor_x = [(_zero_like(x), Fraction(1))], x
    else:
        fam = _family_for(x)
        members, weights, anchor_x, _ = fam(x, x, eps, gam)
        parts_x = list(zip(members, weights))
    if b == 0:
        parts_y, anchor_y = [(_zero_like(y), Fraction(1))], y
    else:
        fam = _family_for(y)
        members, weights, anchor_y, _ = fam(y, y, eps, gam)
        parts_y = list(zip(members, weights))

    mem_x, w_x = zip(*parts_x)
    mem_y, w_y = zip(*parts_y)
    n, cx, cy = dirichlet_average_pair(w_x, w_y, gam)
    xs = [m for m, k in zip(mem_x, cx) for _ in range(k)]
    ys = [m for m, k in zip(mem_y, cy) for _ in range(k)]
    members = [SumPoint(a * px, b * py, norm) for px, py in zip(xs, ys)]

    z = SumPoint(a * anchor_x, b * anchor_y, norm)
    dmin = min(float(z.distance(mem)) for mem in members)
    if dmin < 2 - float(eps) - 1e-9:
        raise VerificationError(f"lift member at distance {dmin} < 2 - eps")
    avg = None
    w = Fraction(1, n)
    for mem in members:
        term = w * mem
        avg = term if avg is None else avg + term
    err = float(z.distance(avg))
    if err > float(gamma) + 1e-9:
        raise VerificationError(f"lift average misses (a x, b y) by {err}")
    return LiftResult(z, tuple(members), n, dmin, err)


# ---------------------------------------------------------------------------
# refutation side


@dataclass(frozen=True)
class SumRefutation:
    delta: float
    direction: SumPoint
    record: AlphaRecord
    side: str  # "x" | "y"


def sum_refute_daugavet(z: SumPoint, record: AlphaRecord,
                        direction=None) -> SumRefutation:
    """Direction (w, 0) or (0, w) every far-set hull stays delta away from.

    delta = 1 - sup of the bounded coordinate over the record's
    neighbourhood W; members of the far set have their component norms in W,
    so convex combinations lose at least delta against a unit vector on the
    bounded side."""
    c, d = float(z.x.norm()), float(z.y.norm())
    if abs(c - record.c) > 1e-9 or abs(d - record.d) > 1e-9:
        raise DeltaLabError("record was issued for a different (||x||, ||y||)")
    delta = 1 - record.sup_bound
    if delta <= 0:
        raise InsufficientCertificateError("record carries no positive margin")
    side = "x" if record.route == "a" else "y"
    if direction is None:
        comp = z.x if side == "x" else z.y
        nrm = comp.norm()
        if nrm == 0:
            raise DeltaLabError(
                f"anchor has zero {side}-component; pass `direction` explicitly")
        unit = (1 / as_fraction(nrm)) * comp
    else:
        unit = direction
        if abs(float(unit.norm()) - 1) > 1e-9:
            raise DeltaLabError("direction must be unit norm")
    if side == "x":
        dirpoint = SumPoint(unit, _zero_like(z.y), z.norm_rule)
    else:
        dirpoint = SumPoint(_zero_like(z.x), unit, z.norm_rule)
    return SumRefutation(delta=delta, direction=dirpoint, record=record, side=side)


def ck_far_member_sampler(z: SumPoint, eps):
    """Sampler of far-set members for sums of sequence-model components:
    anti-aligned rescalings of the anchor components with fresh-coordinate
    noise, rejection-checked for membership."""
    eps = float(eps)
    c, d = z.x.norm(), z.y.norm()
    if float(c) == 0 or float(d) == 0:
        raise DeltaLabError("sampler needs nonzero anchor components")

    def sample(rng):
        xi1 = Fraction(rng.randrange(0, 1000), 1000) * as_fraction(eps) / 4
        xi2 = Fraction(rng.randrange(0, 1000), 1000) * as_fraction(eps) / 4
        su = max(Fraction(0), as_fraction(c) - xi1)
        sv = max(Fraction(0), as_fraction(d) - xi2)
        u = (-su / as_fraction(c)) * z.x
        v = (-sv / as_fraction(d)) * z.y
        k = len(u.prefix) + rng.randrange(0, 3)
        noise = Fraction(rng.randrange(-1000, 1001), 1000) * su
        u = u.with_value(k, noise)
        return SumPoint(u, v, z.norm_rule)

    return sample


@dataclass(frozen=True)
class HarnessReport:
    n_members: int
    eps: float
    delta: float
    min_member_distance: float
    min_combo_distance: float
    lp_lower_bound: float
    w_membership_ok: bool


def refutation_harness(z: SumPoint, refutation: SumRefutation, n_members=200,
                       n_combos=200, seed=0, tol=1e-6, eps=None,
                       member_sampler=None) -> HarnessReport:
    """Sample the far set of z and verify the refutation quantitatively:
    every member's component norms sit in the record's W with the bounded
    coordinate <= 1 - delta, random convex combinations stay delta away from
    the direction, and a scalarized-LP lower bound on the exact hull
    distance clears delta - tol."""
    record = refutation.record
    if eps is None:
        eps = record.eps
    if eps > record.eps + 1e-15:
        raise InsufficientCertificateError(
            f"certificate scope: record covers eps <= {record.eps}, got {eps}")
    rng = random.Random(seed)
    sampler = member_sampler or ck_far_member_sampler(z, eps)

    members = []
    tries = 0
    while len(members) < n_members and tries < n_members * 50:
        tries += 1
        cand = sampler(rng)
        if float(cand.norm()) > 1 + 1e-12:
            continue
        if float(z.distance(cand)) >= 2 - eps:
            members.append(cand)
    if len(members) < max(2, n_members // 10):
        raise DeltaLabError(f"sampler produced only {len(members)} far members")

    w_ok = True
    norm = z.norm_rule
    for mem in members:
        mu, mv = float(mem.x.norm()), float(mem.y.norm())
        if float(norm(mu - record.c, mv - record.d)) > record.radius + 1e-9:
            w_ok = False
        bounded = mu if record.route == "a" else mv
        if bounded > record.sup_bound + 1e-9:
            w_ok = False
    if not w_ok:
        raise VerificationError("a sampled far member escaped the record's W")

    dists = [float(refutation.direction.distance(mem)) for mem in members]
    combo_best = min(dists)
    for _ in range(n_combos):
        k = rng.randrange(2, min(10, len(members)) + 1)
        picks = [members[rng.randrange(len(members))] for _ in range(k)]
        raw = [rng.random() for _ in range(k)]
        tot = sum(raw)
        combo = None
        for pt, wv in zip(picks, raw):
            term = (wv / tot) * pt
            combo = term if combo is None else combo + term
        combo_best = min(combo_best, float(refutation.direction.distance(combo)))
    if combo_best < refutation.delta - tol:
        raise VerificationError(
            f"sampled combination at {combo_best} beats delta = {refutation.delta}")

    lp_lower = hull_lower_bound_scalarized(refutation.direction, members, norm)
    if lp_lower < refutation.delta - tol:
        raise VerificationError(
            f"LP hull lower bound {lp_lower} fails delta - tol")
    return HarnessReport(
        n_members=len(members), eps=float(eps), delta=refutation.delta,
        min_member_distance=min(dists), min_combo_distance=combo_best,
        lp_lower_bound=lp_lower, w_membership_ok=w_ok)


def _epigraph_rows(base_vec, member_vecs, weights, kind, col_offset, p_col,
                   n_cols):
    """Inequality rows enforcing p >= ||base - sum lam_i member_i|| for one
    component; returns (A_ub, b_ub, A_eq, b_eq, n_aux)."""
    ncoord = len(base_vec)
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    if kind == "winf":
        for cidx in range(ncoord):
            row = [0.0] * n_cols
            for i, mv in enumerate(member_vecs):
                row[i] = float(mv[cidx])
            row[p_col] = -1.0
            A_ub.append(row)
            b_ub.append(float(base_vec[cidx]))
            row2 = [-v for v in row]
            row2[p_col] = -1.0
            A_ub.append(row2)
            b_ub.append(-float(base_vec[cidx]))
        return A_ub, b_ub, A_eq, b_eq, 0
    # weighted-l1: aux variables d+ and d- per coordinate
    for cidx in range(ncoord):
        row = [0.0] * n_cols
        for i, mv in enumerate(member_vecs):
            row[i] = float(mv[cidx])
        row[col_offset + cidx] = 1.0
        row[col_offset + ncoord + cidx] = -1.0
        A_eq.append(row)
        b_eq.append(float(base_vec[cidx]))
    row = [0.0] * n_cols
    for cidx in range(ncoord):
        row[col_offset + cidx] = float(weights[cidx])
        row[col_offset + ncoord + cidx] = float(weights[cidx])
    row[p_col] = -1.0
    A_ub.append(row)
    b_ub.append(0.0)
    return A_ub, b_ub, A_eq, b_eq, 2 * ncoord


def hull_lower_bound_scalarized(point: SumPoint, members: Sequence[SumPoint],
                                norm: AbsoluteNorm, n_dirs=33) -> float:
    """Certified lower bound on the distance from `point` to the convex hull
    of `members` in the sum norm, via LP duality: for each nonnegative
    direction theta, min over the hull of theta . (px, py) divided by the
    dual norm of theta bounds the distance from below."""
    k = len(members)
    kind_x, wx, vec_x = type(point.x).hull_embedding([point.x] + [m.x for m in members])
    kind_y, wy, vec_y = type(point.y).hull_embedding([point.y] + [m.y for m in members])
    nx, ny = len(vec_x[0]), len(vec_y[0])
    aux_x = 0 if kind_x == "winf" else 2 * nx
    aux_y = 0 if kind_y == "winf" else 2 * ny
    n_cols = k + aux_x + aux_y + 2
    p_col, q_col = n_cols - 2, n_cols - 1

    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    rows = _epigraph_rows(vec_x[0], vec_x[1:], wx, kind_x, k, p_col, n_cols)
    A_ub += rows[0]; b_ub += rows[1]; A_eq += rows[2]; b_eq += rows[3]
    rows = _epigraph_rows(vec_y[0], vec_y[1:], wy, kind_y, k + aux_x, q_col, n_cols)
    A_ub += rows[0]; b_ub += rows[1]; A_eq += rows[2]; b_eq += rows[3]
    simplex = [0.0] * n_cols
    for i in range(k):
        simplex[i] = 1.0
    A_eq.append(simplex)
    b_eq.append(1.0)
    bounds = [(0, None)] * (n_cols - 2) + [(None, None), (None, None)]

    best = 0.0
    for i in range(n_dirs):
        th = math.pi / 2 * i / (n_dirs - 1)
        t1, t2 = math.cos(th), math.sin(th)
        cost = [0.0] * n_cols
        cost[p_col], cost[q_col] = t1, t2
        val, _ = lp.linprog_mixed(cost, A_ub=A_ub, b_ub=b_ub,
                                  A_eq=A_eq or None, b_eq=b_eq or None, bounds=bounds)
        dual = float(norm.dual(t1, t2))
        if dual > 0:
            best = max(best, val / dual)
    return best
