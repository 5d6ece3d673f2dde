"""Central-extension bundles, quotient central extensions and their probes.

Registry bundles:

    heisenberg_bundle()        Z -> H3 -> Z^2, sigma(a, b) = x^a y^b
    trivial_bundle(K, G)       K x G in product form
    heisenberg_mod_bundle(m)   Z/m -> H3/<z^m> -> Z^2 (product form, omega mod m)
    triangle_bundle()          <S> -> <S, alpha, beta, gamma> -> <alpha, beta, gamma>
    square_coboundary_bundle() Z x_omega Z with omega = delta(n^2) = -2mn

A quotient central extension (QCE) is a top row 1 -> K -> E -> G -> 1, a
normal subgroup N of E with N meeting K trivially, and the bottom row
1 -> K -> E/N -> G/pi(N) -> 1.  Quotients only exist through registered
normal forms: every QCE here carries executable p: E -> E/N and
p_G: G -> G/pi(N), membership in pi(N) and the inverse of pi on N.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .cocycles import (
    Cocycle,
    ExtensionBundle,
    ExtensionGroup,
    as_kvalue,
    build_extension,
    coboundary,
    cocycle_from_table,
    euler_cocycle,
    isomorphism_check,
    sup_norm_on_ball,
    verify_bundle,
    zero_cocycle,
)
from .errors import InputError, StructuralError
from .groups import (
    DEFAULT_BALL_CAP,
    AbelianGroup,
    AffineGroupZ3,
    AffineMapZ3,
    Cyclic,
    FreeAbelian,
    FreeGroup,
    Group,
    GroupValue,
    HeisenbergGroup,
    KValue,
    ball,
    evaluate_word,
)
from .quasimorphisms import QuasiMap, defect_on_ball, qnorm


def Z() -> AbelianGroup:
    return AbelianGroup(1, (), ("z",))


# ---------------------------------------------------------------------------
# registry bundles


def heisenberg_bundle() -> ExtensionBundle:
    H = HeisenbergGroup()
    G = FreeAbelian(2, ("x", "y"))
    K = Z()

    def kernel_coordinate(e):
        a, b, c = e.nf
        if a or b:
            raise StructuralError(f"{e!r} is not central")
        return K.kvalue(c)

    return ExtensionBundle(
        kernel=K,
        base=G,
        total=H,
        inclusion=lambda k: H.center(int(as_kvalue(K, k))),
        projection=lambda e: GroupValue(G, e.nf[:2]),
        section=lambda g: H.value(g.nf[0], g.nf[1], 0),
        kernel_coordinate=kernel_coordinate,
        name="heisenberg",
    )


def trivial_bundle(K: AbelianGroup | None = None, G: Group | None = None) -> ExtensionBundle:
    K = K or Z()
    G = G or FreeAbelian(2, ("x", "y"))
    return build_extension(K, G, zero_cocycle(G, K), name=f"trivial {K!r} x {G!r}")


def heisenberg_mod_bundle(m: int = 2) -> ExtensionBundle:
    """Kernel of the Heisenberg bundle reduced mod m, in product form."""
    G = FreeAbelian(2, ("x", "y"))
    K = Cyclic(m, "z")
    omega = Cocycle(G, K, lambda g, h: -h.nf[0] * g.nf[1], normalized=True,
                    provenance=f"Heisenberg Euler cocycle mod {m}")
    return build_extension(K, G, omega, name=f"heisenberg mod {m}")


def square_coboundary_bundle() -> ExtensionBundle:
    G = FreeAbelian(1, ("t",))
    K = Z()
    omega = coboundary(lambda g: g.nf[0] ** 2, G, K, "n^2")
    return build_extension(K, G, omega, name="square coboundary over Z")


def carry_cocycle_bundle() -> ExtensionBundle:
    """Z/2 -> E -> Z with omega(m, n) = 1 iff m and n are both odd (a Z/4-like twist)."""
    G = FreeAbelian(1, ("t",))
    K = Cyclic(2, "z")
    omega = Cocycle(G, K, lambda g, h: (g.nf[0] % 2) * (h.nf[0] % 2), normalized=True, provenance="carry bit")
    return build_extension(K, G, omega, name="carry cocycle")


# triangle group data

ALPHA = AffineMapZ3(((0, 1, 0), (1, 0, 0), (0, 0, 1)), (0, 0, 0))
BETA = AffineMapZ3(((1, 0, 0), (0, 0, 1), (0, 1, 0)), (0, 0, 0))
GAMMA = AffineMapZ3(((0, 0, 1), (0, 1, 0), (1, 0, 0)), (-3, 0, 3))
SHIFT = AffineMapZ3.translation_by((1, 1, 1))
L_MAP = AffineMapZ3.translation_by((1, 1, -2))
T1, T2 = ALPHA, BETA
T3 = AffineMapZ3(((0, 0, 1), (0, 1, 0), (1, 0, 0)), (0, 0, 0))


def triangle_groups() -> tuple[AffineGroupZ3, AffineGroupZ3]:
    E = AffineGroupZ3([("S", SHIFT), ("alpha", ALPHA), ("beta", BETA), ("gamma", GAMMA)])
    G = AffineGroupZ3([("alpha", ALPHA), ("beta", BETA), ("gamma", GAMMA)])
    return E, G


def _sum_shift(m: AffineMapZ3) -> int:
    """How much m changes x + y + z (the linear parts here preserve the sum)."""
    return sum(m.translation)


def triangle_bundle() -> ExtensionBundle:
    """Z = <S> -> <S, alpha, beta, gamma> -> <alpha, beta, gamma>, split by inclusion."""
    E, G = triangle_groups()
    K = Z()

    def projection(e):
        s = _sum_shift(e.nf)
        if s % 3:
            raise StructuralError(f"{e!r} shifts x+y+z by {s}")
        k = s // 3
        return GroupValue(G, AffineMapZ3.translation_by((-k, -k, -k)).compose(e.nf))

    def kernel_coordinate(e):
        m = e.nf
        t = m.translation
        if m.matrix != ((1, 0, 0), (0, 1, 0), (0, 0, 1)) or not t[0] == t[1] == t[2]:
            raise StructuralError(f"{e!r} is not a power of S")
        return K.kvalue(t[0])

    return ExtensionBundle(
        kernel=K,
        base=G,
        total=E,
        inclusion=lambda k: GroupValue(E, AffineMapZ3.translation_by((int(k),) * 3)),
        projection=projection,
        section=lambda g: GroupValue(E, g.nf),
        kernel_coordinate=kernel_coordinate,
        name="triangle",
    )


def registry_bundles() -> dict[str, Callable[[], ExtensionBundle]]:
    return {
        "heisenberg": heisenberg_bundle,
        "trivial": trivial_bundle,
        "heisenberg-mod2": lambda: heisenberg_mod_bundle(2),
        "triangle": triangle_bundle,
        "trivial-free": lambda: trivial_bundle(Z(), FreeGroup(2, ("x", "y"))),
        "square-coboundary": square_coboundary_bundle,
        "carry": carry_cocycle_bundle,
    }


def product_form(ext: ExtensionBundle, verify_radius: int = 2) -> ExtensionBundle:
    """The twisted-product model of ext built from its Euler cocycle."""
    if ext.product_form:
        return ext
    return build_extension(ext.kernel, ext.base, euler_cocycle(ext), verify_radius, name=f"{ext.name} (product form)")


# ---------------------------------------------------------------------------
# the constructive conversions


def chi_from_cocycle(ext: ExtensionBundle) -> QuasiMap:
    """chi(k, g) = k; its deviation at (e1, e2) is exactly -omega(pi e1, pi e2)."""
    if not ext.product_form:
        raise InputError(f"{ext.name} is not in product form; convert with product_form() first")
    E = ext.total
    return QuasiMap(E, ext.kernel, E.k_part, f"chi[{ext.name}]")


def _check_identity_on_kernel(ext: ExtensionBundle, chi, r: int = 5):
    for k in ext.kernel.kball(r):
        got = as_kvalue(ext.kernel, chi(ext.inclusion(k)))
        if got != k:
            raise InputError(f"chi is not the identity on the kernel: chi(iota({k!r})) = {got!r}", witness=k)


def cocycle_from_chi(ext: ExtensionBundle, chi: QuasiMap, kernel_radius: int = 5) -> Cocycle:
    """omega' = omega - delta b with b(g) = chi(sigma(g)).

    Exact identity behind the bound (product form, normalised omega):
    omega'(g, h) = dev(iota(omega(g, h)), sigma(gh)) - dev(sigma g, sigma h),
    with dev(e1, e2) = chi(e1) + chi(e2) - chi(e1 e2).
    """
    _check_identity_on_kernel(ext, chi, kernel_radius)
    omega = ext.cocycle if ext.product_form else euler_cocycle(ext)
    K = ext.kernel
    b = lambda g: as_kvalue(K, chi(ext.section(g)))  # noqa: E731
    db = coboundary(b, ext.base, K, f"chi o sigma [{chi.name}]")
    out = omega - db
    out.normalized = omega.normalized and db.normalized
    out.provenance = f"cocycle from {chi.name}"
    return out


def chi_cocycle_report(ext: ExtensionBundle, chi: QuasiMap, r: int, cap: int = DEFAULT_BALL_CAP) -> dict:
    """sup |omega'| on ball(r) next to the exact two-deviation certificate per pair."""
    omega2 = cocycle_from_chi(ext, chi)
    value, wit = sup_norm_on_ball(omega2, r, cap)
    omega = ext.cocycle if ext.product_form else euler_cocycle(ext)
    worst_dev = 0
    identity_ok = True
    for g in ball(ext.base, r, cap):
        for h in ball(ext.base, r, cap):
            d1 = chi.deviation(ext.section(g), ext.section(h))
            d2 = chi.deviation(ext.inclusion(omega(g, h)), ext.section(g * h))
            identity_ok &= omega2(g, h) == d2 - d1
            worst_dev = max(worst_dev, qnorm(d1), qnorm(d2))
    return {
        "radius": r,
        "sup_norm": value,
        "witness": wit,
        "max_deviation": worst_dev,
        "bound": 2 * worst_dev,
        "identity_holds": identity_ok,
        "bound_holds": value <= 2 * worst_dev,
    }


def cocycle_from_section(ext: ExtensionBundle, section: Callable, r: int = 5) -> Cocycle:
    """omega(g, h) = iota^-1(sigma(gh)^-1 sigma(g) sigma(h)) for a normalised set-theoretic section."""
    e = ext.base.identity()
    if not section(e).is_identity():
        raise InputError("section is not normalised: sigma(1) != 1")
    for g in ball(ext.base, r):
        if ext.projection(section(g)) != g:
            raise InputError(f"not a section: pi(sigma({g!r})) != {g!r}", witness=g)

    def rule(g, h):
        return ext.kernel_coordinate(section(g * h).inverse() * section(g) * section(h))

    return Cocycle(ext.base, ext.kernel, rule, normalized=True, provenance="cocycle of a section")


def perturbed_section(ext: ExtensionBundle, g0: GroupValue, k0) -> Callable:
    k0 = as_kvalue(ext.kernel, k0)
    return lambda g: ext.inclusion(k0) * ext.section(g) if g == g0 else ext.section(g)


@dataclass(eq=False)
class Decomposition:
    chi_l: QuasiMap  # chi itself, certified identity on L
    chi_quotient: QuasiMap  # q o chi with values in K/L
    quotient: AbelianGroup
    project: Callable  # q: K -> K/L
    subgroup: list  # generators of L in K


def decompose_bounded(ext: ExtensionBundle, chi: QuasiMap, divisors: Sequence[int], r: int = 5) -> Decomposition:
    """Split along the diagonal subgroup L = d_1 Z + ... + d_k Z of K = Z^k.

    d_i = 1 puts the whole i-th factor in L, d_i = 0 leaves it out.
    """
    K = ext.kernel
    divisors = [int(d) for d in divisors]
    if K.torsion or len(divisors) != K.free_rank or any(d < 0 for d in divisors):
        raise InputError(
            f"subgroup must be a diagonal divisor list of length {K.free_rank} over a free kernel; got {divisors}"
        )
    _check_identity_on_kernel(ext, chi, r)
    free_idx = [i for i, d in enumerate(divisors) if d == 0]
    tor_idx = [i for i, d in enumerate(divisors) if d >= 2]
    Q = AbelianGroup(len(free_idx), [divisors[i] for i in tor_idx], [f"q{i + 1}" for i in free_idx + tor_idx] or None)

    def project(k):
        c = as_kvalue(K, k).coords
        return Q.kvalue(tuple(c[i] for i in free_idx) + tuple(c[i] for i in tor_idx))

    gens = [K.kvalue(tuple(d if j == i else 0 for j in range(K.dim))) for i, d in enumerate(divisors) if d]
    chi_q = QuasiMap(chi.domain, Q, lambda e: project(chi(e)), f"{chi.name} mod L")
    # certificates: chi is the identity on L, q o chi is q on K
    for k in K.kball(r):
        if project(chi(ext.inclusion(k))) != project(k):
            raise InputError(f"q o chi differs from q at {k!r}")
    for g in gens:
        for n in range(-r, r + 1):
            if chi(ext.inclusion(g * n)) != g * n:
                raise InputError(f"chi is not the identity on L at {g * n!r}")
    return Decomposition(chi, chi_q, Q, project, gens)


# ---------------------------------------------------------------------------
# quotient central extensions


@dataclass(eq=False)
class QCEBundle:
    top: ExtensionBundle
    bottom: ExtensionBundle | None
    n_generators: list
    project_total: Callable  # p: E -> E/N
    project_base: Callable  # p_G: G -> G/pi(N)
    in_image_of_n: Callable  # G -> bool
    lift_to_n: Callable  # pi(N) -> N
    tau: Callable | None  # G/pi(N) -> E with p o tau = bottom section
    name: str = "qce"
    in_n: Callable | None = None  # E -> bool, defaults to p(e) == 1

    def member_n(self, e: GroupValue) -> bool:
        if self.in_n is not None:
            return self.in_n(e)
        return self.project_total(e).is_identity()

    def top_section(self, g: GroupValue) -> GroupValue:
        """sigma(g) = n tau(p_G g), with n in N chosen so that pi(sigma(g)) = g."""
        t = self.tau(self.project_base(g))
        rest = g * self.top.projection(t).inverse()
        return self.lift_to_n(rest) * t


def _heisenberg_eval(H: HeisenbergGroup, F: FreeGroup, w: GroupValue) -> GroupValue:
    return evaluate_word(H, w.nf)


def heisenberg_qce() -> QCEBundle:
    """Top row Z x F2 (trivial), N = <<z^-1 [x, y]>>, bottom row the Heisenberg bundle."""
    F = FreeGroup(2, ("x", "y"))
    K = Z()
    top = trivial_bundle(K, F)
    bottom = heisenberg_bundle()
    H = bottom.total
    E = top.total
    A = bottom.base

    def p(e):
        return H.center(int(E.k_part(e))) * evaluate_word(H, E.g_part(e).nf)

    def p_g(w):
        a = sum(s for i, s in w.nf if i == 0)
        b = sum(s for i, s in w.nf if i == 1)
        return GroupValue(A, (a, b))

    def in_image(w):
        return p_g(w).is_identity()

    def lift(w):
        if not in_image(w):
            raise InputError(f"{w!r} is not in pi(N)")
        c = evaluate_word(H, w.nf).nf[2]
        return E.pair(K.kvalue(-c), w)

    def tau(g):
        a, b = g.nf
        return E.pair(K.zero(), evaluate_word(F, ((0, 1 if a > 0 else -1),) * abs(a) + ((1, 1 if b > 0 else -1),) * abs(b)))

    x, y = F.generators()
    gen = E.pair(K.kvalue(-1), x * y * x.inverse() * y.inverse())
    return QCEBundle(top, bottom, [gen], p, p_g, in_image, lift, tau, name="heisenberg qce")


def free_cover(ext: ExtensionBundle, sample_radius: int = 4) -> QCEBundle:
    """Top row K x F with F free on G's generators; P(k, w) = iota(k) sigma~(w).

    sigma~ sends the i-th free generator to sigma(s_i), so P is a homomorphism
    and the bottom row is ext itself.  N = ker P meets K trivially.
    """
    G = ext.base
    F = FreeGroup(G.rank, G.generator_names)
    K = ext.kernel
    top = trivial_bundle(K, F)
    E = top.total
    lifts = [ext.section(s) for s in G.generators()]
    lift_inv = [x.inverse() for x in lifts]

    def sigma_tilde(w):
        out = ext.total.identity()
        for i, s in w.nf:
            out = out * (lifts[i] if s == 1 else lift_inv[i])
        return out

    def p(e):
        return ext.inclusion(E.k_part(e)) * sigma_tilde(E.g_part(e))

    def p_g(w):
        return evaluate_word(G, w.nf)

    def in_image(w):
        return p_g(w).is_identity()

    def lift(w):
        if not in_image(w):
            raise InputError(f"{w!r} is not in pi(N)")
        return E.pair(-ext.kernel_coordinate(sigma_tilde(w)), w)

    def tau(g):
        w = GroupValue(F, G.normal_word(g))
        k = ext.kernel_coordinate(ext.section(g) * sigma_tilde(w).inverse())
        return E.pair(k, w)

    sample = [lift(w) for w in ball(F, sample_radius) if not w.is_identity() and in_image(w)]
    return QCEBundle(top, ext, sample, p, p_g, in_image, lift, tau, name=f"free cover of {ext.name}")


def twisted_z_qce() -> QCEBundle:
    """Top row Z x_omega Z with omega = delta(n^2) = -2mn, N = <(0, 2)>, bottom over Z/2.

    (0, 2)^j = (c_j, 2j) with c_j = -4 j (j - 1); the quotient E/N is
    Z x_w Z/2 with w(1, 1) = -2.  Here delta(chi pi^-1) = -omega is nonzero,
    which pins the sign of the boundary identity.
    """
    top = square_coboundary_bundle()
    E, G, K = top.total, top.base, top.kernel
    C2 = Cyclic(2, "u")
    bar = cocycle_from_table(
        C2, K, [("1", "1", 0), ("1", "u", 0), ("u", "1", 0), ("u", "u", -2)], provenance="E/N cocycle"
    )
    bottom = build_extension(K, C2, bar, name="Z x_w Z/2")
    Eb = bottom.total

    def c(j):
        return -4 * j * (j - 1)

    def p(e):
        k, g = int(E.k_part(e)), E.g_part(e).nf[0]
        j, eps = divmod(g, 2)
        return Eb.pair(K.kvalue(k - c(j) + 4 * eps * j), GroupValue(C2, C2.canonical((eps,))))

    def p_g(g):
        return GroupValue(C2, C2.canonical((g.nf[0],)))

    def in_image(g):
        return g.nf[0] % 2 == 0

    def lift(g):
        if not in_image(g):
            raise InputError(f"{g!r} is not in pi(N)")
        j = g.nf[0] // 2
        return E.pair(K.kvalue(c(j)), g)

    def tau(gb):
        return E.pair(K.zero(), GroupValue(G, (gb.nf[0] % 2,)))

    gen = E.pair(K.zero(), GroupValue(G, (2,)))
    return QCEBundle(top, bottom, [gen], p, p_g, in_image, lift, tau, name="twisted Z qce")


def verify_qce(qce: QCEBundle, r: int = 3, cap: int = DEFAULT_BALL_CAP) -> list[str]:
    """Structural checks on balls; returns a list of violations."""
    problems = []
    top, bot = qce.top, qce.bottom
    eE = top.total.identity()
    for e in ball(top.total, r, cap):
        if qce.member_n(e) and top.projection(e).is_identity() and e != eE:
            problems.append(f"N meets K at {e!r}")
        if bot is not None and bot.projection(qce.project_total(e)) != qce.project_base(top.projection(e)):
            problems.append(f"projections do not commute at {e!r}")
    if bot is not None:
        for k in top.kernel.kball(r):
            if qce.project_total(top.inclusion(k)) != bot.inclusion(k):
                problems.append(f"p o iota != iota_bar at {k!r}")
    for g in ball(top.base, r, cap):
        if qce.in_image_of_n(g) != qce.project_base(g).is_identity():
            problems.append(f"membership test disagrees with p_G at {g!r}")
        if qce.in_image_of_n(g):
            n = qce.lift_to_n(g)
            if not qce.member_n(n) or top.projection(n) != g:
                problems.append(f"lift of {g!r} is not in N over it")
    if qce.tau is not None and bot is not None:
        seen = {}
        if not qce.tau(bot.base.identity()).is_identity():
            problems.append("tau(1) != 1")
        for gb in ball(bot.base, r, cap):
            t = qce.tau(gb)
            if qce.project_total(t) != bot.section(gb):
                problems.append(f"p o tau != sigma_bar at {gb!r}")
            if t in seen:
                problems.append(f"tau not injective: {seen[t]!r}, {gb!r}")
            seen[t] = gb
    for n in qce.n_generators:
        if not qce.member_n(n):
            problems.append(f"declared generator {n!r} is not in N")
    return problems


def pullback_check(qce: QCEBundle, r: int, cap: int = DEFAULT_BALL_CAP) -> dict:
    """p(sigma(g) sigma(h) sigma(gh)^-1) = sigma_bar(pg) sigma_bar(ph) sigma_bar(p(gh))^-1 on ball(r)."""
    if qce.bottom is None or qce.tau is None:
        raise InputError(f"{qce.name} has no section data")
    top, bot = qce.top, qce.bottom
    p, pg = qce.project_total, qce.project_base
    violations = []
    B = ball(top.base, r, cap)
    sig = {g: qce.top_section(g) for g in B}
    for g in B:
        if p(sig[g]) != bot.section(pg(g)):
            violations.append({"kind": "p sigma != sigma_bar p", "g": repr(g)})
    pairs = 0
    for g in B:
        for h in B:
            gh = g * h
            s_gh = sig.get(gh) or qce.top_section(gh)
            top_val = sig[g] * sig[h] * s_gh.inverse()
            bg, bh = pg(g), pg(h)
            bot_val = bot.section(bg) * bot.section(bh) * bot.section(bg * bh).inverse()
            pairs += 1
            if p(top_val) != bot_val:
                violations.append({"kind": "pushforward", "g": repr(g), "h": repr(h)})
                continue
            if top.kernel_coordinate(top_val) != bot.kernel_coordinate(bot_val):
                violations.append({"kind": "euler values", "g": repr(g), "h": repr(h)})
    return {"name": qce.name, "radius": r, "pairs": pairs, "passed": not violations, "violations": violations[:20]}


def restricted_qm(qce: QCEBundle, chi: QuasiMap, probe_radius: int = 3, cap: int = DEFAULT_BALL_CAP) -> QuasiMap:
    """chi pi^-1 on pi(N); raises StructuralError if pi is not injective on N (tested ball)."""
    top = qce.top
    for e in ball(top.total, probe_radius, cap):
        if qce.member_n(e) and top.projection(e).is_identity() and not e.is_identity():
            raise StructuralError(f"N meets the kernel at {e!r}", witness=e)

    def rule(g):
        if not qce.in_image_of_n(g):
            raise InputError(f"{g!r} is not in pi(N)")
        return chi(qce.lift_to_n(g))

    return QuasiMap(top.base, chi.target, rule, f"{chi.name} pi^-1")


def boundary_identity_check(qce: QCEBundle, chi: QuasiMap, omega: Cocycle, r: int,
                            cap: int = DEFAULT_BALL_CAP) -> dict:
    """Check delta(chi pi^-1)(n1, n2) = -omega(n1, n2) on pi(N) cap ball(r).

    With delta b(g, h) = b(g) + b(h) - b(gh) and chi the K-coordinate of the
    product form, chi(n1 n2) = chi(n1) + chi(n2) + omega(pi n1, pi n2) on N,
    which gives the minus sign.
    """
    phi = restricted_qm(qce, chi, min(r, 3), cap)
    members = [g for g in ball(qce.top.base, r, cap) if qce.in_image_of_n(g)]
    violations = []
    for n1 in members:
        for n2 in members:
            lhs = phi(n1) + phi(n2) - phi(n1 * n2)
            rhs = -omega(n1, n2)
            if lhs != rhs:
                violations.append({"n1": repr(n1), "n2": repr(n2), "delta": repr(lhs), "minus_omega": repr(rhs)})
    return {
        "name": qce.name,
        "radius": r,
        "identity": "delta(chi pi^-1) = -omega on pi(N)",
        "elements": len(members),
        "pairs": len(members) ** 2,
        "passed": not violations,
        "first_violation": violations[0] if violations else None,
        "violations": len(violations),
    }


def extendability_probe(qce: QCEBundle, chi: QuasiMap, phi: QuasiMap, r: int,
                        elements: Sequence[GroupValue] | None = None, cap: int = DEFAULT_BALL_CAP) -> dict:
    """Slack (max |phi - chi pi^-1| on the test elements, defect of phi on ball(r)).

    The test elements default to pi(N) cap ball(r); long elements such as
    [x, y]^k can be supplied explicitly.
    """
    psi = restricted_qm(qce, chi, 2, cap)
    if elements is None:
        elements = [g for g in ball(qce.top.base, r, cap) if qce.in_image_of_n(g)]
    rows = []
    worst, wit = 0, None
    for g in elements:
        m = qnorm(phi(g) - psi(g))
        rows.append({"element": repr(g), "phi": phi(g), "chi_pi_inv": psi(g), "mismatch": m})
        if m > worst:
            worst, wit = m, g
    D, _ = defect_on_ball(phi, r, cap)
    return {
        "name": qce.name,
        "radius": r,
        "mismatch": worst,
        "mismatch_witness": repr(wit) if wit is not None else None,
        "defect": D,
        "slack": (worst, D),
        "rows": rows,
    }


# ---------------------------------------------------------------------------
# induced quasimorphisms on quotients


@dataclass(eq=False)
class QuotientDatum:
    source: Group
    target: Group
    project: Callable  # source -> target
    lift: Callable  # target -> source, a chosen preimage
    in_kernel: Callable  # source -> bool


def descend_qm(chi: QuasiMap, quotient: QuotientDatum, n: int = 64, check_radius: int = 4,
               pinned: Callable | None = None, cap: int = DEFAULT_BALL_CAP) -> tuple[QuasiMap, dict]:
    """phi(q) = floor(chi(lift(q)^n) / n) on free coordinates, torsion coordinates 0.

    When ``pinned(lift(q))`` holds (a subgroup where chi is a homomorphism)
    the value is chi(lift(q)) exactly.  The report compares phi p with chi on
    ball(check_radius).
    """
    if n < 1:
        raise InputError("homogenisation exponent must be >= 1")
    for e in ball(quotient.source, 4, cap):
        if quotient.in_kernel(e) and qnorm(chi(e)) != 0:
            raise InputError(f"chi does not vanish on N at {e!r}", witness=e)
    K = chi.target

    def rule(q):
        e = quotient.lift(q)
        if pinned is not None and pinned(e):
            return chi(e)
        v = chi(e**n)
        if K is None:
            return math.floor(Fraction(v, n))
        free = tuple(math.floor(Fraction(c, n)) for c in v.coords[: K.free_rank])
        return K.kvalue(free + (0,) * len(K.torsion))

    phi = QuasiMap(quotient.target, K, rule, f"{chi.name} descended")
    worst, wit = 0, None
    pinned_ok = True
    for e in ball(quotient.source, check_radius, cap):
        d = qnorm(phi(quotient.project(e)) - chi(e))
        if d > worst:
            worst, wit = d, e
        if pinned is not None and pinned(e) and phi(quotient.project(e)) != chi(e):
            pinned_ok = False
    D, _ = defect_on_ball(chi, 2, cap)
    report = {
        "exponent": n,
        "radius": check_radius,
        "max_distance": worst,
        "witness": repr(wit) if wit is not None else None,
        "defect_r2": D,
        "pinned_exact": pinned_ok,
    }
    return phi, report


# ---------------------------------------------------------------------------
# growth tables


def boundedness_probe(ext: ExtensionBundle, radii: Sequence[int], cap: int = DEFAULT_BALL_CAP, jobs: int = 1) -> dict:
    """(r, sup norm of the Euler cocycle on ball(r), witness) plus a flat/growing hint.

    The hint is "flat" when the values over the later half of the radii are
    constant; it is evidence only.
    """
    omega = euler_cocycle(ext)
    G = ext.base
    rows = []
    for r in radii:
        value, (g, h) = sup_norm_on_ball(omega, r, cap, jobs)
        rows.append({"r": r, "sup_norm": value, "g": G.format_word(G.normal_word(g)),
                     "h": G.format_word(G.normal_word(h))})
    vals = [row["sup_norm"] for row in rows]
    if len(vals) < 2:
        hint = "undetermined"
    else:
        tail = vals[len(vals) // 2 :]
        hint = "flat" if len(set(tail)) == 1 else "growing"
    return {"name": ext.name, "rows": rows, "hint": hint}


# ---------------------------------------------------------------------------
# seeded noise and example tables


def noisy_chi(ext: ExtensionBundle, chi: QuasiMap, B: int, seed: int) -> QuasiMap:
    """chi + n(pi e) with n: G -> [-B, B] on the first kernel coordinate, n(1) = 0.

    n(g) depends only on (seed, g), so values never depend on evaluation order.
    """
    K = ext.kernel
    unit = K.basis()[0]

    def noise(g):
        if g.is_identity():
            return 0
        return random.Random(f"{seed}|{g.nf!r}").randint(-B, B)

    return QuasiMap(chi.domain, K, lambda e: chi(e) + noise(ext.projection(e)) * unit,
                    f"{chi.name} + noise(B={B}, seed={seed})")


def noise_round_trip(ext: ExtensionBundle, B: int, seed: int, r: int = 4, cap: int = DEFAULT_BALL_CAP,
                     jobs: int = 1) -> dict:
    """Rebuild the cocycle from a noisy chi; the change is delta(noise), so at most 3B."""
    ext = product_form(ext)
    chi = noisy_chi(ext, chi_from_cocycle(ext), B, seed)
    rebuilt = cocycle_from_chi(ext, chi)
    diff = rebuilt - ext.cocycle
    change, _ = sup_norm_on_ball(diff, r, cap, jobs)
    value, _ = sup_norm_on_ball(rebuilt, r, cap, jobs)
    base, _ = sup_norm_on_ball(ext.cocycle, r, cap, jobs)
    return {"name": ext.name, "B": B, "seed": seed, "radius": r, "original_sup": base, "rebuilt_sup": value,
            "change_sup": change, "passed": change <= 3 * B and value <= base + 3 * B}


def heisenberg_example(radii, cap: int = DEFAULT_BALL_CAP, jobs: int = 1) -> dict:
    """Sup norm of the Heisenberg Euler cocycle on ball(r) next to r^2."""
    probe = boundedness_probe(heisenberg_bundle(), radii, cap, jobs)
    rows = [{"r": row["r"], "sup_norm": row["sup_norm"], "r_squared": row["r"] ** 2,
             "passed": row["sup_norm"] == row["r"] ** 2} for row in probe["rows"]]
    return {"name": "heisenberg", "rows": rows, "hint": probe["hint"], "passed": all(r["passed"] for r in rows)}


def commutator_power_slack(qce: QCEBundle, chi: QuasiMap, images: Sequence[int], ks: Sequence[int], r: int = 2) -> dict:
    """Mismatch of the homomorphism F2 -> Z (generator images given) against chi pi^-1 at [x, y]^k."""
    from .quasimorphisms import homomorphism

    F = qce.top.base
    phi = homomorphism(F, images, None, f"hom{tuple(images)}")
    x, y = F.generators()
    c = x * y * x.inverse() * y.inverse()
    psi = restricted_qm(qce, chi, 2)
    rows = []
    for k in ks:
        g = c**k
        mismatch = qnorm(phi(g) - psi(g))
        rows.append({"k": k, "phi": phi(g), "chi_pi_inv": psi(g), "slack": mismatch, "passed": mismatch >= k})
    return {"name": qce.name, "images": list(images), "rows": rows, "passed": all(row["passed"] for row in rows)}


def registry_qces() -> dict[str, Callable[[], QCEBundle]]:
    return {
        "heisenberg": heisenberg_qce,
        "free-cover": lambda: free_cover(heisenberg_bundle()),
        "twisted": twisted_z_qce,
    }


def qce_chi(qce: QCEBundle) -> QuasiMap:
    """chi of the top row (its K-coordinate in product form)."""
    return chi_from_cocycle(qce.top)


def extension_summary(ext: ExtensionBundle, r: int = 2, iso_radius: int = 4) -> dict:
    """Bundle checks plus the round trip through the Euler cocycle."""
    problems = verify_bundle(ext, r)
    rebuilt = build_extension(ext.kernel, ext.base, euler_cocycle(ext), r, name=f"{ext.name} rebuilt")
    failure = isomorphism_check(ext, rebuilt, iso_radius)
    return {
        "name": ext.name,
        "kernel": repr(ext.kernel),
        "base": repr(ext.base),
        "product_form": ext.product_form,
        "problems": problems,
        "round_trip_radius": iso_radius,
        "round_trip": failure is None,
        "round_trip_witness": None if failure is None else repr(failure),
        "passed": not problems and failure is None,
    }
