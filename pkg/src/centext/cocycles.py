"""Inhomogeneous 2-cocycles and the extension <-> cocycle dictionary.

Conventions (fixed once, used everywhere):

    delta omega(g1, g2, g3) = omega(g2, g3) - omega(g1 g2, g3) + omega(g1, g2 g3) - omega(g1, g2)
    delta b(g, h)           = b(g) + b(h) - b(gh)

The Euler cocycle of a bundle with section sigma is
omega(g, h) = iota^-1(sigma(g) sigma(h) sigma(gh)^-1), and the twisted product
on K x G is (k1, g1)(k2, g2) = (k1 + k2 + omega(g1, g2), g1 g2).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import _parallel
from .errors import InputError, StructuralError
from .groups import (
    DEFAULT_BALL_CAP,
    AbelianGroup,
    Group,
    GroupValue,
    KValue,
    ball,
    element,
)


def as_kvalue(K: AbelianGroup, v) -> KValue:
    """Coerce ints, coordinate tuples and KValues into K."""
    if isinstance(v, KValue):
        if v.owner is not K and v.owner != K:
            raise InputError(f"coefficient mismatch: value in {v.owner}, expected {K}")
        return v
    if isinstance(v, int):
        if v == 0:
            return K.zero()
        if K.dim != 1:
            raise InputError(f"scalar {v} given for coefficient group {K}")
        return K.kvalue((v,))
    if isinstance(v, (tuple, list)):
        return K.kvalue(tuple(v))
    raise InputError(f"cannot read {v!r} as an element of {K}")


@dataclass(eq=False)
class Cocycle:
    """A map G x G -> K with a per-pair cache.

    ``normalized`` is a claim checked by ``check_normalized``; ``provenance`` is
    free text describing where the rule came from.
    """

    base: Group
    coefficients: AbelianGroup
    rule: Callable
    normalized: bool = False
    provenance: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, g: GroupValue, h: GroupValue) -> KValue:
        for x in (g, h):
            if x.group is not self.base and x.group != self.base:
                raise InputError(f"{x!r} is not in the base group {self.base}")
        key = (g.nf, h.nf)
        v = self._cache.get(key)
        if v is None:
            v = as_kvalue(self.coefficients, self.rule(g, h))
            self._cache[key] = v
        return v

    def check_normalized(self, r: int = 2) -> tuple | None:
        """First g in ball(r) with omega(1, g) or omega(g, 1) nonzero, else None."""
        e = self.base.identity()
        for g in ball(self.base, r):
            if not self(e, g).is_zero():
                return (e, g)
            if not self(g, e).is_zero():
                return (g, e)
        return None

    def __sub__(self, other: Cocycle) -> Cocycle:
        _same_shape(self, other)
        return Cocycle(
            self.base,
            self.coefficients,
            lambda g, h: self(g, h) - other(g, h),
            provenance=f"({self.provenance}) - ({other.provenance})",
        )

    def __add__(self, other: Cocycle) -> Cocycle:
        _same_shape(self, other)
        return Cocycle(
            self.base,
            self.coefficients,
            lambda g, h: self(g, h) + other(g, h),
            provenance=f"({self.provenance}) + ({other.provenance})",
        )


def _same_shape(a: Cocycle, b: Cocycle):
    if a.base != b.base or a.coefficients != b.coefficients:
        raise InputError("cocycles live over different groups")


def zero_cocycle(G: Group, K: AbelianGroup) -> Cocycle:
    return Cocycle(G, K, lambda g, h: K.zero(), normalized=True, provenance="zero cocycle")


def constant_cocycle(G: Group, K: AbelianGroup, c) -> Cocycle:
    c = as_kvalue(K, c)
    return Cocycle(G, K, lambda g, h: c, normalized=c.is_zero(), provenance=f"constant {c!r}")


def delta2(omega: Cocycle, g1: GroupValue, g2: GroupValue, g3: GroupValue) -> KValue:
    return omega(g2, g3) - omega(g1 * g2, g3) + omega(g1, g2 * g3) - omega(g1, g2)


def coboundary(b: Callable, G: Group, K: AbelianGroup, name: str = "b") -> Cocycle:
    """delta b(g, h) = b(g) + b(h) - b(gh)."""
    e = G.identity()

    def rule(g, h):
        return as_kvalue(K, b(g)) + as_kvalue(K, b(h)) - as_kvalue(K, b(g * h))

    normalized = as_kvalue(K, b(e)).is_zero()
    return Cocycle(G, K, rule, normalized=normalized, provenance=f"coboundary of {name}")


def cocycle_violation(omega: Cocycle, r: int = 2, cap: int = DEFAULT_BALL_CAP, jobs: int = 1):
    """First triple in ball(r)^3 (in ball order) where delta omega != 0, else None."""
    B = ball(omega.base, r, cap)

    def scan(part):
        for g1 in part:
            for g2 in B:
                for g3 in B:
                    if not delta2(omega, g1, g2, g3).is_zero():
                        return (g1, g2, g3)
        return None

    for hit in _parallel.map_chunks(scan, B, jobs):
        if hit is not None:
            return hit
    return None


def normalize_cocycle(omega: Cocycle) -> tuple[Cocycle, KValue]:
    """omega' = omega - delta(const c) with c = omega(1, 1); returns (omega', c).

    delta of the constant cochain c is the constant cocycle c, and for a
    cocycle omega(g, 1) = omega(1, g) = omega(1, 1), so omega' is normalised.
    """
    e = omega.base.identity()
    c = omega(e, e)
    if c.is_zero():
        if omega.normalized:
            return omega, c
        out = Cocycle(omega.base, omega.coefficients, omega.rule, True, omega.provenance)
        return out, c
    out = Cocycle(
        omega.base,
        omega.coefficients,
        lambda g, h: omega(g, h) - c,
        normalized=True,
        provenance=f"normalisation of ({omega.provenance}) by {c!r}",
    )
    return out, c


def sup_norm_on_ball(omega: Cocycle, r: int, cap: int = DEFAULT_BALL_CAP, jobs: int = 1):
    """(max norm of omega over ball(r)^2, first attaining pair in ball order)."""
    B = ball(omega.base, r, cap)

    def scan(part):
        best, wit = -1, None
        for g in part:
            for h in B:
                n = omega(g, h).norm()
                if n > best:
                    best, wit = n, (g, h)
        return best, wit

    return _parallel.first_max(_parallel.map_chunks(scan, B, jobs))


# ---------------------------------------------------------------------------
# twisted products and bundles


class ExtensionGroup(Group):
    """K x_omega G: pairs (k, g) with (k1, g1)(k2, g2) = (k1 + k2 + omega(g1, g2), g1 g2).

    Generators: the basis of K first, then (0, s) for each generator s of G.
    """

    kind = "Extension"

    def __init__(self, kernel: AbelianGroup, base: Group, cocycle: Cocycle):
        self.kernel = kernel
        self.base = base
        self.cocycle = cocycle
        names = list(kernel.generator_names)
        for n in base.generator_names:
            names.append(n if n not in names else f"s_{n}")
        super().__init__(names)

    def _key(self):
        return ("Extension", id(self))

    def _identity_nf(self):
        return (self.kernel._identity_nf(), self.base._identity_nf())

    def _gen_nf(self, i):
        d = self.kernel.dim
        if i < d:
            return (self.kernel._gen_nf(i), self.base._identity_nf())
        return (self.kernel._identity_nf(), self.base._gen_nf(i - d))

    def _mul(self, p, q):
        G, K = self.base, self.kernel
        w = self.cocycle(GroupValue(G, p[1]), GroupValue(G, q[1])).coords
        return (K.canonical(tuple(a + b + c for a, b, c in zip(p[0], q[0], w))), G._mul(p[1], q[1]))

    def _inv(self, p):
        G, K = self.base, self.kernel
        g = GroupValue(G, p[1])
        gi = G._inv(p[1])
        w = self.cocycle(g, GroupValue(G, gi)).coords
        return (K.canonical(tuple(-a - c for a, c in zip(p[0], w))), gi)

    def pair(self, k: KValue, g: GroupValue) -> GroupValue:
        return GroupValue(self, (k.coords, g.nf))

    def k_part(self, e: GroupValue) -> KValue:
        return KValue(self.kernel, e.nf[0])

    def g_part(self, e: GroupValue) -> GroupValue:
        return GroupValue(self.base, e.nf[1])

    def format_nf(self, nf):
        return f"({KValue(self.kernel, nf[0])!r}, {self.base.format_nf(nf[1])})"

    def __repr__(self):
        return f"{self.kernel!r} x_w {self.base!r}"


@dataclass(eq=False)
class ExtensionBundle:
    """A central extension 1 -> K -> E -> G -> 1 with executable arrows.

    ``kernel_coordinate`` is iota^-1: it raises StructuralError on elements
    outside iota(K).  ``cocycle`` is set when the total group is the twisted
    product K x_omega G (product form).
    """

    kernel: AbelianGroup
    base: Group
    total: Group
    inclusion: Callable
    projection: Callable
    section: Callable
    kernel_coordinate: Callable
    section_normalized: bool = True
    name: str = "extension"
    cocycle: Cocycle | None = None

    @property
    def product_form(self) -> bool:
        return self.cocycle is not None and isinstance(self.total, ExtensionGroup)

    def __repr__(self):
        return f"ExtensionBundle({self.name}: {self.kernel!r} -> {self.total!r} -> {self.base!r})"


def euler_cocycle(ext: ExtensionBundle) -> Cocycle:
    def rule(g, h):
        return ext.kernel_coordinate(ext.section(g) * ext.section(h) * ext.section(g * h).inverse())

    return Cocycle(
        ext.base, ext.kernel, rule, normalized=ext.section_normalized, provenance=f"Euler cocycle of {ext.name}"
    )


def build_extension(
    K: AbelianGroup, G: Group, omega: Cocycle, verify_radius: int = 2, name: str | None = None, jobs: int = 1
) -> ExtensionBundle:
    """Twisted product bundle for a cocycle; refuses cocycles that fail on ball(verify_radius)^3."""
    if omega.base != G or omega.coefficients != K:
        raise InputError("cocycle does not match the requested kernel and base")
    if not omega.normalized or omega.check_normalized(1) is not None:
        omega, _ = normalize_cocycle(omega)
    bad = omega.check_normalized(verify_radius)
    if bad is not None:
        raise InputError(f"cocycle is not normalisable at {bad}", witness=bad)
    bad = cocycle_violation(omega, verify_radius, jobs=jobs)
    if bad is not None:
        raise InputError(f"cocycle condition fails at {bad}; the twisted product would not associate", witness=bad)
    E = ExtensionGroup(K, G, omega)

    def kernel_coordinate(e):
        if not E.g_part(e).is_identity():
            raise StructuralError(f"{e!r} is not in the kernel")
        return E.k_part(e)

    return ExtensionBundle(
        kernel=K,
        base=G,
        total=E,
        inclusion=lambda k: E.pair(as_kvalue(K, k), G.identity()),
        projection=E.g_part,
        section=lambda g: E.pair(K.zero(), g),
        kernel_coordinate=kernel_coordinate,
        section_normalized=True,
        name=name or f"twisted product by {omega.provenance or 'cocycle'}",
        cocycle=omega,
    )


def verify_bundle(ext: ExtensionBundle, r: int = 2, kr: int = 2) -> list[str]:
    """Check the bundle invariants on balls; returns a list of violations."""
    problems = []
    eG = ext.base.identity()
    for k in ext.kernel.kball(kr):
        if ext.projection(ext.inclusion(k)) != eG:
            problems.append(f"pi(iota({k!r})) != 1")
        if ext.kernel_coordinate(ext.inclusion(k)) != k:
            problems.append(f"iota^-1(iota({k!r})) != {k!r}")
    for g in ball(ext.base, r):
        if ext.projection(ext.section(g)) != g:
            problems.append(f"pi(sigma({g!r})) != {g!r}")
    if ext.section_normalized and not ext.section(eG).is_identity():
        problems.append("sigma(1) != 1")
    kgens = [ext.inclusion(k) for k in ext.kernel.basis()]
    for e in ball(ext.total, r):
        for z in kgens:
            if z * e != e * z:
                problems.append(f"iota(K) not central: {z!r}, {e!r}")
    return problems


def isomorphism_check(a: ExtensionBundle, b: ExtensionBundle, r: int, cap: int = DEFAULT_BALL_CAP):
    """Check the canonical map E_a -> E_b, e -> iota_b(k) sigma_b(g) is an isomorphism on ball(r).

    Here g = pi_a(e) and k = iota_a^-1(e sigma_a(g)^-1).  Checks, for e in
    ball(r) of E_a and every generator letter s: f(e s) = f(e) f(s); f is
    injective on the ball; f commutes with inclusions and projections; and the
    reverse map undoes f.  Returns the first failure or None.
    """
    if a.kernel != b.kernel or a.base != b.base:
        return ("groups differ", None)

    def f(e):
        g = a.projection(e)
        k = a.kernel_coordinate(e * a.section(g).inverse())
        return b.inclusion(k) * b.section(g)

    def f_inv(e):
        g = b.projection(e)
        k = b.kernel_coordinate(e * b.section(g).inverse())
        return a.inclusion(k) * a.section(g)

    letters = [a.total.letter(i, s) for i, s in a.total.letters()]
    images = [f(s) for s in letters]
    seen = {}
    for e in ball(a.total, r, cap):
        fe = f(e)
        if fe in seen:
            return ("not injective", (seen[fe], e))
        seen[fe] = e
        if f_inv(fe) != e:
            return ("reverse map fails", e)
        if b.projection(fe) != a.projection(e):
            return ("projections differ", e)
        for s, fs in zip(letters, images):
            if f(e * s) != fe * fs:
                return ("not a homomorphism", (e, s))
    for k in a.kernel.kball(r):
        if f(a.inclusion(k)) != b.inclusion(k):
            return ("inclusions differ", k)
    return None


# ---------------------------------------------------------------------------
# table import


def cocycle_from_table(G: Group, K: AbelianGroup, rows, provenance: str = "table") -> Cocycle:
    """Rows of (word, word, K-vector); word strings use the group's generator names.

    Pairs not listed raise InputError when evaluated.
    """
    table = {}
    for row in rows:
        try:
            u, v, k = row
        except (TypeError, ValueError):
            raise InputError(f"malformed cocycle row {row!r}") from None
        g = element(G, u) if isinstance(u, str) else u
        h = element(G, v) if isinstance(v, str) else v
        key = (g.nf, h.nf)
        val = as_kvalue(K, k)
        if key in table and table[key] != val:
            raise InputError(f"conflicting table entries for ({u}, {v})")
        table[key] = val

    def rule(g, h):
        try:
            return table[(g.nf, h.nf)]
        except KeyError:
            raise InputError(f"cocycle table has no entry for ({g!r}, {h!r})") from None

    omega = Cocycle(G, K, rule, provenance=provenance)
    e = G.identity().nf
    omega.normalized = all(v.is_zero() for (x, y), v in table.items() if x == e or y == e)
    return omega


def cocycle_law_table(omega: Cocycle, radii, cap: int = DEFAULT_BALL_CAP, jobs: int = 1) -> dict:
    """delta omega = 0 on ball(r)^3 for each r, with the first failing triple."""
    G = omega.base
    rows = []
    for r in radii:
        hit = cocycle_violation(omega, r, cap, jobs)
        rows.append({
            "r": r,
            "passed": hit is None,
            "witness": None if hit is None else " | ".join(G.format_word(G.normal_word(g)) for g in hit),
        })
    return {"cocycle": omega.provenance, "rows": rows, "passed": all(row["passed"] for row in rows)}
