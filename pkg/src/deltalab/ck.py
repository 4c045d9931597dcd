"""Sequence models of C(K).

The variant C models c = C([0, omega]): a finite prefix of values plus a
limit value, with every index beyond the prefix evaluating to the limit.
C0 forces the limit to zero, and LINF_N drops the limit coordinate entirely
(a finite K, so no limit points at all).

A point with prefix length n embeds isometrically into the sup-norm cube on
n+1 coordinates (prefix + limit); prefixes can always be extended, which is
the model's substitute for "K is infinite".  Values are exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .core import (
    Certificate,
    DeltaLabError,
    Functional,
    Rank1Operator,
    Refutation,
    SlicePolytope,
    SpaceTag,
    VerificationError,
    Verdict,
    WitnessRecord,
    cube_slice_vertices,
    require_unit,
)
from .util import UNIT_TOL, as_fraction, sgn


class Variant(Enum):
    C = "C"
    C0 = "C0"
    LINF_N = "LINF_N"


class NonNormAttainingError(DeltaLabError):
    pass


@dataclass(frozen=True)
class TailSequence:
    prefix: tuple
    limit: Optional[Fraction] = None
    variant: Variant = Variant.C

    space_tag = SpaceTag.C_SEQ

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(as_fraction(v) for v in self.prefix))
        if self.variant is Variant.LINF_N:
            if self.limit is not None:
                raise DeltaLabError("LINF_N has no limit coordinate")
            if not self.prefix:
                raise DeltaLabError("LINF_N needs at least one coordinate")
        else:
            lim = as_fraction(self.limit if self.limit is not None else 0)
            if self.variant is Variant.C0 and lim != 0:
                raise DeltaLabError("C0 forces limit = 0")
            object.__setattr__(self, "limit", lim)

    def value_at(self, k: int) -> Fraction:
        """Evaluation at 0-based index k; beyond the prefix it is the limit."""
        if k < len(self.prefix):
            return self.prefix[k]
        if self.variant is Variant.LINF_N:
            raise DeltaLabError(f"index {k} outside the finite model")
        return self.limit

    def norm(self) -> Fraction:
        best = max((abs(v) for v in self.prefix), default=Fraction(0))
        if self.variant is not Variant.LINF_N:
            best = max(best, abs(self.limit))
        return best

    def embed(self, length: int):
        """Coordinates (prefix padded with the limit up to `length`, limit)."""
        if self.variant is Variant.LINF_N:
            if length != len(self.prefix):
                raise DeltaLabError("LINF_N points have a fixed dimension")
            return list(self.prefix)
        coords = [self.value_at(k) for k in range(length)]
        coords.append(self.limit)
        return coords

    def _binop(self, other, op):
        if not isinstance(other, TailSequence):
            raise DeltaLabError("tail sequences combine with tail sequences")
        if (self.variant is Variant.LINF_N) != (other.variant is Variant.LINF_N):
            raise DeltaLabError("cannot mix LINF_N with limit variants")
        if self.variant is Variant.LINF_N:
            if len(self.prefix) != len(other.prefix):
                raise DeltaLabError("LINF_N points need matching dimension")
            return TailSequence(
                tuple(op(a, b) for a, b in zip(self.prefix, other.prefix)),
                None, Variant.LINF_N)
        n = max(len(self.prefix), len(other.prefix))
        prefix = tuple(op(self.value_at(k), other.value_at(k)) for k in range(n))
        limit = op(self.limit, other.limit)
        variant = Variant.C0 if (
            self.variant is Variant.C0 and other.variant is Variant.C0) else Variant.C
        return TailSequence(prefix, limit, variant)

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    def __neg__(self):
        lim = None if self.variant is Variant.LINF_N else -self.limit
        return TailSequence(tuple(-v for v in self.prefix), lim, self.variant)

    def __mul__(self, scalar):
        s = as_fraction(scalar)
        lim = None if self.variant is Variant.LINF_N else s * self.limit
        variant = self.variant
        if variant is Variant.C0 and lim != 0:  # unreachable; C0 limits are 0
            variant = Variant.C
        return TailSequence(tuple(s * v for v in self.prefix), lim, variant)

    __rmul__ = __mul__

    def with_value(self, k: int, value) -> "TailSequence":
        """Copy with index k set to `value` (prefix extended as needed)."""
        if self.variant is Variant.LINF_N:
            if k >= len(self.prefix):
                raise DeltaLabError("cannot extend a LINF_N point")
            vals = list(self.prefix)
        else:
            vals = [self.value_at(i) for i in range(max(k + 1, len(self.prefix)))]
        vals[k] = as_fraction(value)
        lim = None if self.variant is Variant.LINF_N else self.limit
        return TailSequence(tuple(vals), lim, self.variant)

    @staticmethod
    def hull_embedding(points: Sequence["TailSequence"]):
        linf = points[0].variant is Variant.LINF_N
        for p in points[1:]:
            if (p.variant is Variant.LINF_N) != linf:
                raise DeltaLabError("cannot mix LINF_N with limit variants")
        if linf:
            n = len(points[0].prefix)
            return "winf", None, [p.embed(n) for p in points]
        n = max(len(p.prefix) for p in points)
        return "winf", None, [p.embed(n) for p in points]

    def _id_minus_rank1_norm(self, functional: "SequenceFunctional") -> Fraction:
        """Exact norm of Id - phi (x) self on the truncated model.

        The embedded model is the sup-norm cube, where the maximum of
        ||(Id-T)e|| over the +-1 extreme points is the largest absolute row
        sum of the matrix.  One fresh coordinate beyond both prefixes stands
        in for the free tail positions.
        """
        if self.variant is Variant.LINF_N:
            n = len(self.prefix)
            if len(functional.weights) > n:
                raise DeltaLabError("functional is longer than the finite model")
            x = self.embed(n)
            w = list(functional.weights) + [Fraction(0)] * (n - len(functional.weights))
        else:
            n = max(len(self.prefix), len(functional.weights)) + 1
            x = self.embed(n)  # length n + 1 (limit last)
            w = list(functional.weights) + [Fraction(0)] * (n - len(functional.weights))
            w.append(functional.limit_coeff)
        best = Fraction(0)
        for j in range(len(x)):
            row = sum(abs((1 if k == j else 0) - x[j] * w[k]) for k in range(len(x)))
            if row > best:
                best = row
        return best


@dataclass(frozen=True)
class SequenceFunctional(Functional):
    """Dual element: summable weights on the prefix plus a limit coefficient.

    phi(f) = sum_k w_k f(k) + w_lim * lim(f); the dual norm is
    sum |w_k| + |w_lim|.
    """

    weights: tuple
    limit_coeff: Fraction = Fraction(0)
    variant: Variant = Variant.C

    space_tag = SpaceTag.C_SEQ

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(as_fraction(v) for v in self.weights))
        object.__setattr__(self, "limit_coeff", as_fraction(self.limit_coeff))
        if self.variant is Variant.LINF_N and self.limit_coeff != 0:
            raise DeltaLabError("LINF_N functionals have no limit coefficient")

    def __call__(self, f: TailSequence):
        total = sum((w * f.value_at(k) for k, w in enumerate(self.weights)), Fraction(0))
        if self.variant is not Variant.LINF_N:
            if f.variant is Variant.LINF_N:
                raise DeltaLabError("limit functional applied to a LINF_N point")
            total += self.limit_coeff * f.limit
        return total

    def dual_norm(self) -> Fraction:
        return sum((abs(w) for w in self.weights), abs(self.limit_coeff))

    def slice_polytope(self, eps) -> SlicePolytope:
        eps = as_fraction(eps)
        if self.variant is Variant.LINF_N:
            dims = list(self.weights)
        else:
            # one fresh coordinate beyond the prefix, then the limit coordinate
            dims = list(self.weights) + [Fraction(0), self.limit_coeff]
        verts = cube_slice_vertices(len(dims), dims, 1 - eps)
        return SlicePolytope("winf", None, tuple(verts))

    def point_from_coords(self, coords) -> TailSequence:
        if self.variant is Variant.LINF_N:
            return TailSequence(tuple(coords), None, Variant.LINF_N)
        return TailSequence(tuple(coords[:-1]), coords[-1], Variant.C)


# ---------------------------------------------------------------------------
# decision procedures and constructions


def is_daugavet_point_ck(f: TailSequence):
    """Daugavet (equivalently Delta) iff the norm is attained in the limit:
    |lim f| = 1.  Finite models (LINF_N) never have such points."""
    require_unit(f)
    if f.variant is Variant.LINF_N:
        ref = refute_delta_ck(f)
        return False, ref.certificate
    if abs(f.limit) == 1:
        cert = Certificate(verdict=Verdict.DAUGAVET_YES, log=(("limit", f.limit),))
        return True, cert
    ref = refute_delta_ck(f)
    return False, ref.certificate


@dataclass(frozen=True)
class CkWitness:
    members: tuple
    fresh_indices: tuple
    min_distance: Fraction
    avg_error: Fraction
    average: TailSequence
    certificate: Certificate = None


def daugavet_witness_ck(f: TailSequence, g: TailSequence, eps, m: int) -> CkWitness:
    """m far points surrounding g: copies of g with one fresh index flipped
    to -lim(f).  Each is 2-far from f at that index (f equals its limit
    there), and the average moves g by at most 2/m."""
    eps = as_fraction(eps)
    require_unit(f)
    if f.variant is Variant.LINF_N or abs(f.limit) != 1:
        raise DeltaLabError("witness construction needs |lim f| = 1")
    if g.norm() > 1 + UNIT_TOL:
        raise DeltaLabError("target must lie in the unit ball")
    if m < 1:
        raise DeltaLabError("m >= 1 required")

    start = max(len(f.prefix), len(g.prefix))
    flip = -f.limit
    members, fresh = [], []
    for i in range(m):
        members.append(g.with_value(start + i, flip))
        fresh.append(start + i)

    dmin = min((f - gi).norm() for gi in members)
    if dmin < 2 - eps:
        raise VerificationError(f"witness distance {float(dmin)} below 2 - eps")
    avg = _average(members)
    err = (g - avg).norm()
    if err > Fraction(2, m):
        raise VerificationError(f"average drifted {float(err)} > 2/m")
    for gi in members:
        if gi.norm() > 1:
            raise VerificationError("witness member left the unit ball")
    cert = Certificate(
        verdict=Verdict.DAUGAVET_YES,
        witness=(WitnessRecord(
            eps=eps, delta=Fraction(2, m), target=g,
            members=tuple((gi, Fraction(1, m)) for gi in members),
            min_distance=dmin, combo_error=Fraction(2, m), anchor=f),))
    return CkWitness(tuple(members), tuple(fresh), dmin, err, avg, cert)


def _average(points):
    acc = None
    w = Fraction(1, len(points))
    for p in points:
        term = w * p
        acc = term if acc is None else acc + term
    return acc


@dataclass(frozen=True)
class CkRefutation:
    projection: Rank1Operator
    H: tuple
    delta: Fraction
    bound: Fraction
    exact_norm: Fraction
    certificate: Certificate


def refute_delta_ck(f: TailSequence) -> CkRefutation:
    """Averaged point-evaluation projection P with ||Id - P|| < 2, exact.

    H is the set of prefix indices where |f| = 1; delta the gap to 1 off H.
    The projection averages sign-corrected evaluations over H; its exact
    operator norm is max(2 - 2/|H|, 2 - delta) <= 2 - min(delta, 2/|H|).
    """
    require_unit(f)
    if f.variant is not Variant.LINF_N and abs(f.limit) == 1:
        raise DeltaLabError("f is a Daugavet point; nothing to refute")
    H = tuple(k for k, v in enumerate(f.prefix) if abs(v) == 1)
    if not H:
        raise NonNormAttainingError("f does not attain its norm on the prefix")
    off = [abs(v) for k, v in enumerate(f.prefix) if k not in H]
    if f.variant is not Variant.LINF_N:
        off.append(abs(f.limit))
    delta = 1 - (max(off) if off else Fraction(0))

    weights = [Fraction(0)] * len(f.prefix)
    for k in H:
        weights[k] = Fraction(sgn(f.prefix[k]), len(H))
    mu = SequenceFunctional(
        tuple(weights), Fraction(0),
        Variant.LINF_N if f.variant is Variant.LINF_N else Variant.C)
    P = Rank1Operator(mu, f)
    exact = f._id_minus_rank1_norm(mu)
    bound = 2 - min(delta, Fraction(2, len(H)))
    if exact > bound:
        raise VerificationError(
            f"exact ||Id-P|| = {float(exact)} exceeds the formula bound {float(bound)}")
    cert = Certificate(
        verdict=Verdict.DELTA_NO,
        refutation=Refutation(refuter=P, bound=bound, margin=2 - bound,
                              note=f"H = {H}, delta = {float(delta)}"),
        log=(("exact_norm", exact),),
    )
    return CkRefutation(P, H, delta, bound, exact, cert)


@dataclass(frozen=True)
class CkDecomposition:
    lam: Fraction
    f_plus: TailSequence
    f_minus: TailSequence
    tail_index: int  # 1-based first rewritten index
    reconstruction_error: Fraction


def convex_dld2p_decompose_ck(f: TailSequence, eps) -> CkDecomposition:
    """Write f as lam*f+ + (1-lam)*f- with both parts Daugavet points.

    The parts copy f up to a tail index and are constantly +-1 afterwards;
    lam = (1 + lim f)/2.  The tail index is the least one where all later
    prefix values are within eps of the limit, so the reconstruction error
    is < eps (and exactly 0 when the tail starts beyond the prefix).

    Accepts any ball point (the parts are unit regardless)."""
    eps = as_fraction(eps)
    if f.norm() > 1 + UNIT_TOL:
        raise DeltaLabError("decomposition needs a point of the unit ball")
    if f.variant is Variant.LINF_N:
        raise DeltaLabError("decomposition needs a limit variant")

    k0 = len(f.prefix)
    while k0 > 0 and abs(f.prefix[k0 - 1] - f.limit) < eps:
        k0 -= 1
    head = f.prefix[:k0]
    f_plus = TailSequence(head, Fraction(1), Variant.C)
    f_minus = TailSequence(head, Fraction(-1), Variant.C)
    lam = (1 + f.limit) / 2

    recon = lam * f_plus + (1 - lam) * f_minus
    err = (recon - f).norm()
    if not err < eps:
        raise VerificationError(f"reconstruction error {float(err)} >= eps")
    for part in (f_plus, f_minus):
        if part.norm() != 1:
            raise VerificationError("decomposition part is not unit norm")
        ok, _ = is_daugavet_point_ck(part)
        if not ok:
            raise VerificationError("decomposition part is not a Daugavet point")
    return CkDecomposition(lam, f_plus, f_minus, k0 + 1, err)


@dataclass(frozen=True)
class C0Report:
    rows: tuple
    all_delta_no: bool


def c0_delta_empty_check(samples: Sequence[TailSequence]) -> C0Report:
    """Every unit c0 point is refuted through the c-embedding (limit 0 < 1)."""
    rows = []
    for p in samples:
        if p.variant is not Variant.C0:
            raise DeltaLabError("samples must be C0 points")
        embedded = TailSequence(p.prefix, Fraction(0), Variant.C)
        ref = refute_delta_ck(embedded)
        rows.append((p, ref.certificate.verdict, ref.bound))
    return C0Report(tuple(rows), all(v is Verdict.DELTA_NO for _, v, _ in rows))


# ---------------------------------------------------------------------------
# far families and samplers


def delta_family(f: TailSequence, target: TailSequence, eps, gamma):
    """Equal-weight far family approximating `target` within gamma."""
    gamma = as_fraction(gamma)
    m = max(1, math.ceil(2 / gamma))
    wit = daugavet_witness_ck(f, target, eps, m)
    weights = [Fraction(1, m)] * m
    return list(wit.members), weights


def random_unit(rng, prefix_len: int, grid=(-1, Fraction(-1, 2), 0, Fraction(1, 2), 1),
                daugavet: Optional[bool] = None) -> TailSequence:
    """Random unit point of the c model with values on a coarse grid.

    daugavet=True forces |limit| = 1; daugavet=False forces |limit| < 1 with
    the norm attained on the prefix."""
    for _ in range(256):
        prefix = tuple(Fraction(rng.choice(grid)) for _ in range(prefix_len))
        if daugavet is True:
            limit = Fraction(rng.choice((-1, 1)))
        elif daugavet is False:
            limit = Fraction(rng.choice([g for g in grid if abs(Fraction(g)) < 1]))
        else:
            limit = Fraction(rng.choice(grid))
        p = TailSequence(prefix, limit, Variant.C)
        if p.norm() != 1:
            continue
        if daugavet is False and not any(abs(v) == 1 for v in prefix):
            continue
        return p
    raise DeltaLabError("failed to sample a unit point")


def ball_sampler(prefix_len: int):
    """Sampler of ball points for sampled slice diameters."""
    def sample(rng):
        prefix = tuple(Fraction(rng.randrange(-1000, 1001), 1000) for _ in range(prefix_len))
        limit = Fraction(rng.randrange(-1000, 1001), 1000)
        return TailSequence(prefix, limit, Variant.C)
    return sample
