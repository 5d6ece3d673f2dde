"""Exact checks on the (3,3,3) triangle group acting on Z^3 and its product with <S>."""
from __future__ import annotations

from .extensions import ALPHA, BETA, GAMMA, L_MAP, SHIFT, T3, triangle_groups
from .groups import IDENTITY_MAP, AffineMapZ3, ball


def _map(f) -> AffineMapZ3:
    return AffineMapZ3.from_function(f)


def _power(m: AffineMapZ3, n: int) -> AffineMapZ3:
    out = IDENTITY_MAP
    for _ in range(n):
        out = out @ m
    return out


def _preserves_sum(m: AffineMapZ3) -> bool:
    cols = [sum(m.matrix[i][j] for i in range(3)) for j in range(3)]
    return cols == [1, 1, 1] and sum(m.translation) == 0


def verify_triangle_remark(order_range: int = 100, ball_radius: int = 6) -> dict:
    """Run every check; the report lists (name, passed, detail) per check."""
    checks = []

    def check(name, ok, detail=""):
        checks.append({"check": name, "passed": bool(ok), "detail": detail})

    a, b, g = ALPHA, BETA, GAMMA
    for name, m in (("alpha", a), ("beta", b), ("gamma", g)):
        check(f"{name}^2 = id", (m @ m).is_identity(), repr(m))
        check(f"{name} != id", not m.is_identity())
    for name, m in (("alpha beta", a @ b), ("beta gamma", b @ g), ("alpha gamma", a @ g)):
        check(f"({name}) has order 3", not m.is_identity() and not (m @ m).is_identity() and _power(m, 3).is_identity(),
              repr(m))

    ab = _map(lambda v: (v[2], v[0], v[1]))
    check("alpha beta = (x,y,z) -> (z,x,y)", a @ b == ab, repr(a @ b))

    abg = a @ b @ g
    target = _map(lambda v: (v[0] + 3, v[2] - 3, v[1]))
    check("alpha beta gamma = (x,y,z) -> (x+3, z-3, y)", abg == target, repr(abg))

    orbit_ok, never_id = True, True
    m = IDENTITY_MAP
    for n in range(1, order_range + 1):
        m = m @ abg
        if m((0, 0, 0))[0] != 3 * n:
            orbit_ok = False
        if m.is_identity():
            never_id = False
    check(f"(alpha beta gamma)^n(o) has first coordinate 3n, n <= {order_range}", orbit_ok)
    check(f"(alpha beta gamma)^n != id for 1 <= n <= {order_range}", never_id)

    Sinv = SHIFT.inverse()
    for name, m in (("alpha", a), ("beta", b), ("gamma", g)):
        check(f"S commutes with {name}", SHIFT @ m == m @ SHIFT)
    check("S alpha S^-1 = alpha", SHIFT @ a @ Sinv == a)

    _, G = triangle_groups()
    elems = ball(G, ball_radius)
    check(f"every element of ball({ball_radius}) preserves x+y+z", all(_preserves_sum(e.nf) for e in elems),
          f"{len(elems)} elements")
    powers = {_power(SHIFT, k) for k in range(1, 3 * ball_radius + 1)}
    powers |= {p.inverse() for p in powers}
    check(f"<S> meets ball({ball_radius}) of G trivially", not any(e.nf in powers for e in elems))

    for name, m in (("S", SHIFT), ("alpha", a), ("beta", b), ("gamma", g)):
        check(f"{name} preserves Z^3", abs(m.det()) == 1 and all(isinstance(x, int) for x in m.translation))

    conj = L_MAP.inverse() @ T3 @ L_MAP
    check("gamma = L^-1 o T3 o L (maps composed right to left)", conj == g, repr(conj))
    other = L_MAP @ T3 @ L_MAP.inverse()
    check("L o T3 o L^-1 is the reflection (z+3, y, x-3)", other == _map(lambda v: (v[2] + 3, v[1], v[0] - 3)),
          repr(other))
    check("L preserves the plane x+y+z = 0", _preserves_sum(L_MAP))

    return {"name": "triangle", "passed": all(c["passed"] for c in checks), "checks": checks}
