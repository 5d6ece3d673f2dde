"""Quasihomomorphisms into K or into Z/Q, and the constructions built on them.

A QuasiMap with ``target=None`` is scalar valued (ints or Fractions); any
other target is an AbelianGroup and values are KValues.  Defects are always
measured exactly on balls:

    D_r(chi) = max over e1, e2 in ball(r) of |chi(e1) + chi(e2) - chi(e1 e2)|
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import _parallel
from .errors import InputError
from .groups import (
    DEFAULT_BALL_CAP,
    AbelianGroup,
    FreeGroup,
    Group,
    GroupValue,
    KValue,
    ball,
    invert_word,
)


def qnorm(v) -> int | Fraction:
    return v.norm() if isinstance(v, KValue) else abs(v)


@dataclass(eq=False)
class QuasiMap:
    domain: Group
    target: AbelianGroup | None
    rule: Callable
    name: str = "chi"
    _cache: dict = field(default_factory=dict, repr=False)
    _defects: dict = field(default_factory=dict, repr=False)

    def __call__(self, g: GroupValue):
        if g.group is not self.domain and g.group != self.domain:
            raise InputError(f"{g!r} is not in the domain {self.domain} of {self.name}")
        v = self._cache.get(g.nf)
        if v is None:
            v = self.rule(g)
            if self.target is not None and not isinstance(v, KValue):
                from .cocycles import as_kvalue

                v = as_kvalue(self.target, v)
            self._cache[g.nf] = v
        return v

    def deviation(self, e1: GroupValue, e2: GroupValue):
        return self(e1) + self(e2) - self(e1 * e2)

    def __sub__(self, other: QuasiMap) -> QuasiMap:
        return QuasiMap(self.domain, self.target, lambda g: self(g) - other(g), f"{self.name} - {other.name}")

    def __add__(self, other: QuasiMap) -> QuasiMap:
        return QuasiMap(self.domain, self.target, lambda g: self(g) + other(g), f"{self.name} + {other.name}")

    def scaled(self, c) -> QuasiMap:
        return QuasiMap(self.domain, self.target, lambda g: c * self(g), f"{c}*{self.name}")


def homomorphism(G: Group, images: Sequence, target: AbelianGroup | None = None, name: str = "lambda") -> QuasiMap:
    """The homomorphism sending generator i to images[i], evaluated along a word for g.

    Only well defined when the images respect G's relations; callers pick
    images that do (e.g. any images on a free group, or a map killing the
    commutator subgroup).
    """
    images = list(images)
    if len(images) != G.rank:
        raise InputError(f"need {G.rank} generator images, got {len(images)}")

    def rule(g):
        total = target.zero() if target is not None else 0
        for i, s in G.normal_word(g):
            total = total + images[i] * s if target is None else total + (images[i] if s == 1 else -images[i])
        return total

    return QuasiMap(G, target, rule, name)


def defect_on_ball(chi: QuasiMap, r: int, cap: int = DEFAULT_BALL_CAP, jobs: int = 1):
    """(exact defect over ball(r)^2, first attaining pair); cached per radius."""
    hit = chi._defects.get(r)
    if hit is not None:
        return hit
    B = ball(chi.domain, r, cap)

    def scan(part):
        best, wit = -1, None
        for g in part:
            for h in B:
                n = qnorm(chi.deviation(g, h))
                if n > best:
                    best, wit = n, (g, h)
        return best, wit

    hit = _parallel.first_max(_parallel.map_chunks(scan, B, jobs))
    chi._defects[r] = hit
    return hit


def defect_growth(chi: QuasiMap, radii: Sequence[int], cap: int = DEFAULT_BALL_CAP, jobs: int = 1) -> list[dict]:
    rows = []
    for r in radii:
        value, (g, h) = defect_on_ball(chi, r, cap, jobs)
        G = chi.domain
        rows.append(
            {
                "r": r,
                "defect": value,
                "witness_1": G.format_word(G.normal_word(g)),
                "witness_2": G.format_word(G.normal_word(h)),
            }
        )
    return rows


def homogenize(phi: QuasiMap, g: GroupValue, n: int) -> Fraction:
    if n < 1:
        raise InputError("homogenisation exponent must be >= 1")
    if phi.target is not None and (phi.target.dim != 1 or phi.target.torsion):
        raise InputError("homogenisation needs a rank-1 target")
    v = phi(g**n)
    return Fraction(int(v) if isinstance(v, KValue) else v, n)


# ---------------------------------------------------------------------------
# Brooks counting quasimorphisms on free groups


def _check_free_word(F: FreeGroup, w) -> tuple:
    w = tuple(w)
    if not w:
        raise InputError("Brooks word must be nonempty")
    for i, s in w:
        if not 0 <= i < F.rank or s not in (1, -1):
            raise InputError(f"invalid letter ({i}, {s}) for {F}")
    for a, b in zip(w, w[1:]):
        if a[0] == b[0] and a[1] == -b[1]:
            raise InputError(f"Brooks word {F.format_word(w)} is not reduced")
    return w


def count_occurrences(word: tuple, w: tuple) -> int:
    m = len(w)
    return sum(1 for i in range(len(word) - m + 1) if word[i : i + m] == w)


def brooks(F: FreeGroup, w) -> QuasiMap:
    """phi_w(g) = #(w in reduced g) - #(w^-1 in reduced g), overlaps counted."""
    if not isinstance(F, FreeGroup):
        raise InputError("Brooks maps are defined on free groups")
    w = _check_free_word(F, w)
    wi = invert_word(w)
    return QuasiMap(F, None, lambda g: count_occurrences(g.nf, w) - count_occurrences(g.nf, wi), f"phi_{F.format_word(w)}")


def brooks_defect_radius(w) -> int:
    """Radius whose ball already realises the global defect of phi_w.

    Writing g = x c and h = c^-1 y with gh = x y reduced, occurrences inside
    x, y and c cancel, and the rest only see |w| - 1 letters on each side of
    the two junctions.  Truncating x, y and c to those letters keeps the
    deviation, so |g|, |h| <= 2(|w| - 1) suffices.
    """
    return 2 * (len(tuple(w)) - 1)


def _cyclic_core(word: tuple) -> tuple:
    while len(word) >= 2 and word[0][0] == word[-1][0] and word[0][1] == -word[-1][1]:
        word = word[1:-1]
    return word


def _cyclic_count(core: tuple, w: tuple) -> int:
    if not core:
        return 0
    m, n = len(w), len(core)
    reps = -(-(m + n) // n) + 1
    long = core * reps
    return sum(1 for i in range(n) if long[i : i + m] == w)


def brooks_homogeneous(F: FreeGroup, w) -> QuasiMap:
    """The homogenisation of phi_w in closed form: cyclic counts on the cyclic core."""
    w = _check_free_word(F, w)
    wi = invert_word(w)

    def rule(g):
        core = _cyclic_core(g.nf)
        return _cyclic_count(core, w) - _cyclic_count(core, wi)

    return QuasiMap(F, None, rule, f"hom phi_{F.format_word(w)}")


# ---------------------------------------------------------------------------
# Busemann quasimorphism for actions on the integer line


@dataclass
class LineAction:
    """G acting on the integer line: generator i acts by x -> signs[i] * x + shifts[i].

    The declared ray is x_n = n (towards +infinity) with basepoint x_0 = 0.
    Only translations fix that end, so every sign must be +1.
    """

    group: Group
    shifts: tuple
    signs: tuple = None

    def __post_init__(self):
        self.shifts = tuple(int(s) for s in self.shifts)
        if self.signs is None:
            self.signs = (1,) * len(self.shifts)
        if len(self.shifts) != self.group.rank or len(self.signs) != self.group.rank:
            raise InputError("line action needs one shift per generator")
        for i, s in enumerate(self.signs):
            if s != 1:
                raise InputError(f"generator {self.group.generator_names[i]} reflects the line; the end is not fixed")
        # the shifts must define a homomorphism G -> Z; checked on ball(2)
        B = ball(self.group, 2)
        for g in B:
            for h in B:
                if self.translation(g * h) != self.translation(g) + self.translation(h):
                    raise InputError(f"shifts do not define an action (relation broken at {g!r}, {h!r})")

    def translation(self, g: GroupValue) -> int:
        return sum(self.shifts[i] * s for i, s in self.group.normal_word(g))

    def act(self, g: GroupValue, x: int) -> int:
        return x + self.translation(g)


def busemann(action: LineAction, g: GroupValue, T: int = 64) -> int:
    """max over n in [T, 2T] of d(g x0, x_n) - d(x0, x_n) on the integer line."""
    if T < 1:
        raise InputError("truncation T must be >= 1")
    gx0 = action.act(g, 0)
    return max(abs(gx0 - n) - n for n in range(T, 2 * T + 1))


def busemann_map(action: LineAction, T: int = 64) -> QuasiMap:
    return QuasiMap(action.group, None, lambda g: busemann(action, g, T), f"busemann(T={T})")


# ---------------------------------------------------------------------------
# quasiline metric


@dataclass(frozen=True)
class LowerBound:
    """Marker: the target was not reached; the true distance is at least ``value``."""

    value: int

    def __repr__(self):
        return f">={self.value}"


@dataclass(eq=False)
class QuasilineMetric:
    base: Group
    potential: QuasiMap
    C: int

    def __post_init__(self):
        if self.C < 1:
            raise InputError("scale C must be a positive integer")
        if self.potential.target is not None:
            raise InputError("the potential must be scalar valued")


def quasiline_generators(QL: QuasilineMetric, radius: int, cap: int = DEFAULT_BALL_CAP) -> list[GroupValue]:
    """S_C restricted to ball(radius): |potential| <= C, plus the declared generators, symmetrised."""
    G = QL.base
    seen = {}
    for s in ball(G, radius, cap):
        if not s.is_identity() and abs(QL.potential(s)) <= QL.C:
            seen.setdefault(s, None)
            seen.setdefault(s.inverse(), None)
    for i, sign in G.letters():
        seen.setdefault(G.letter(i, sign), None)
    return list(seen)


def quasiline_distance(QL: QuasilineMetric, g: GroupValue, search_radius: int, max_steps: int | None = None,
                       cap: int = DEFAULT_BALL_CAP):
    """Word length of g over S_C (taken inside ball(search_radius)).

    Bidirectional BFS up to ``max_steps`` (default search_radius) steps;
    returns LowerBound(max_steps + 1) when g is not reached.  The finite
    generator pool makes the result an upper bound for the true S_C length.
    """
    G = QL.base
    if g.is_identity():
        return 0
    steps = search_radius if max_steps is None else max_steps
    S = quasiline_generators(QL, search_radius, cap)
    Sinv = [s.inverse() for s in S]
    fwd = {G.identity()}
    bwd = {g}
    fwd_layer, bwd_layer = [G.identity()], [g]
    d_f = d_b = 0
    while d_f + d_b < steps:
        # expand the smaller frontier
        if len(fwd_layer) <= len(bwd_layer):
            nxt = []
            for u in fwd_layer:
                for s in S:
                    v = u * s
                    if v in bwd:
                        return d_f + d_b + 1
                    if v not in fwd:
                        fwd.add(v)
                        nxt.append(v)
            fwd_layer, d_f = nxt, d_f + 1
        else:
            nxt = []
            for u in bwd_layer:
                for s in Sinv:
                    v = u * s
                    if v in fwd:
                        return d_f + d_b + 1
                    if v not in bwd:
                        bwd.add(v)
                        nxt.append(v)
            bwd_layer, d_b = nxt, d_b + 1
        if len(fwd) + len(bwd) > cap:
            from .errors import ResourceCapError

            raise ResourceCapError("quasiline search grew too large", cap)
    return LowerBound(steps + 1)


# ---------------------------------------------------------------------------
# kernel retraction and abelianisation correction


def rational_inverse(M: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact Gauss-Jordan inverse over Q; raises InputError when singular."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise InputError(f"matrix {[[str(x) for x in row] for row in M]} is singular")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


@dataclass(eq=False)
class Retraction:
    """Psi = floor(M^-1 (phi_1, ..., phi_n)) as a QuasiMap to Z^n, with its bookkeeping."""

    psi: QuasiMap
    matrix: list
    inverse: list
    defect_factor: Fraction  # ||M^-1||_1 (max column sum)


def retract_to_kernel(phis: Sequence[QuasiMap], basis: Sequence[GroupValue], target: AbelianGroup | None = None) -> Retraction:
    n = len(phis)
    if n == 0 or len(basis) != n:
        raise InputError("need as many quasimaps as basis elements")
    G = phis[0].domain

    def scalar(v):
        return int(v) if isinstance(v, KValue) else v

    M = [[Fraction(scalar(phi(z))) for z in basis] for phi in phis]
    Minv = rational_inverse(M)
    K = target or AbelianGroup(n, (), None)

    def rule(e):
        v = [Fraction(scalar(phi(e))) for phi in phis]
        coords = [sum((Minv[i][j] * v[j] for j in range(n)), Fraction(0)) for i in range(n)]
        return K.kvalue(tuple(math.floor(c) for c in coords))

    norm1 = max(sum(abs(Minv[i][j]) for i in range(n)) for j in range(n))
    psi = QuasiMap(G, K, rule, "Psi")
    return Retraction(psi, M, Minv, norm1)


def abelianization_correction(X: QuasiMap, pairs: Sequence[tuple[GroupValue, QuasiMap]]) -> QuasiMap:
    """X' = X - sum_j X(x_j) lambda_j, after checking lambda_j(x_i) = delta_ij."""
    xs = [x for x, _ in pairs]
    lams = [lam for _, lam in pairs]
    for j, lam in enumerate(lams):
        for i, x in enumerate(xs):
            want = 1 if i == j else 0
            if lam(x) != want:
                raise InputError(f"lambda_{j}(x_{i}) = {lam(x)}, expected {want}", witness=(i, j))
    coeffs = [X(x) for x in xs]
    if not pairs:
        return X

    def rule(g):
        return X(g) - sum((c * lam(g) for c, lam in zip(coeffs, lams)), 0)

    return QuasiMap(X.domain, X.target, rule, f"{X.name} corrected")


def conjugation_invariance_probe(phi: Callable, G: Group, r: int, member: Callable, cap: int = DEFAULT_BALL_CAP,
                                 jobs: int = 1):
    """max |phi(g l g^-1) - phi(l)| over g in ball(r), l in ball(r) with member(l)."""
    B = ball(G, r, cap)
    N = [x for x in B if member(x)]

    def scan(part):
        best, wit = -1, None
        for g in part:
            gi = g.inverse()
            for lam in N:
                v = qnorm(phi(g * lam * gi) - phi(lam))
                if v > best:
                    best, wit = v, (g, lam)
        return best, wit

    return _parallel.first_max(_parallel.map_chunks(scan, B, jobs))


def homogenization_table(phi: QuasiMap, g: GroupValue, ns: Sequence[int], defect) -> dict:
    """phi(g^n)/n and phi(g^2n)/2n per n, with the Cauchy bound |difference| <= D/n."""
    rows = []
    for n in ns:
        a, b = homogenize(phi, g, n), homogenize(phi, g, 2 * n)
        gap = abs(b - a)
        rows.append({"n": n, "phi_n": a, "phi_2n": b, "gap": gap, "bound": Fraction(defect, n),
                     "passed": gap <= Fraction(defect, n)})
    G = phi.domain
    return {"map": phi.name, "element": G.format_word(G.normal_word(g)), "defect": defect, "rows": rows,
            "passed": all(row["passed"] for row in rows)}


def busemann_report(action: LineAction, elements: Sequence[GroupValue], T: int = 64, r: int = 2) -> dict:
    """Busemann values against minus the translation length, plus the defect on ball(r)."""
    G = action.group
    rows = []
    for g in elements:
        t = action.translation(g)
        value = busemann(action, g, T)
        rows.append({"element": G.format_word(G.normal_word(g)), "translation": t, "value": value,
                     "passed": value == -t or abs(t) >= T})
    D, _ = defect_on_ball(busemann_map(action, T), r)
    return {"T": T, "shifts": list(action.shifts), "rows": rows, "defect": D,
            "passed": all(row["passed"] for row in rows) and D == 0}
