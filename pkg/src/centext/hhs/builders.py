"""Small named HHS models used by the tests, the CLI and the examples."""
from __future__ import annotations

from ..errors import InputError
from .model import CoordinateGraph, GroupAction, HHSModel, close_nesting, validate_model


def _path_graph(n: int, prefix: str = "") -> CoordinateGraph:
    return CoordinateGraph([f"{prefix}{i}" for i in range(n)], [(i, i + 1) for i in range(n - 1)])


def _point() -> CoordinateGraph:
    return CoordinateGraph(["*"], [])


def path_model(n: int = 11) -> HHSModel:
    """A path with one domain whose coordinate graph is the path itself."""
    labels = [str(i) for i in range(n)]
    dist = [[abs(i - j) for j in range(n)] for i in range(n)]
    g = _path_graph(n)
    m = HHSModel(labels, dist, ["S"], "S", close_nesting(["S"], []), set(), {"S": g},
                 {"S": [frozenset((i,)) for i in range(n)]}, {}, name=f"path{n}")
    validate_model(m)
    return m


def cycle_model(m_half: int = 6) -> HHSModel:
    """A cycle of length 2*m_half with the antipodal involution as its action."""
    n = 2 * m_half
    labels = [str(i) for i in range(n)]
    dist = [[min(abs(i - j), n - abs(i - j)) for j in range(n)] for i in range(n)]
    g = CoordinateGraph(labels[:], [(i, (i + 1) % n) for i in range(n)])
    flip = [(i + m_half) % n for i in range(n)]
    action = GroupAction([flip], [{"S": flip}])
    m = HHSModel(labels, dist, ["S"], "S", close_nesting(["S"], []), set(), {"S": g},
                 {"S": [frozenset((i,)) for i in range(n)]}, {}, action, name=f"cycle{n}")
    validate_model(m)
    return m


def grid_model(n: int = 11, corrupted: bool = False, extra: bool = False, flip: bool = False) -> HHSModel:
    """n x n grid with the L1 metric and factor domains U (first coordinate) and V (second).

    corrupted: pi_U is reversed on odd rows (second coordinate odd).
    extra: adds a domain Y below S, transverse to U and V, with a one-vertex graph.
    flip: attaches the involution reversing the first coordinate on X and CU.
    """
    pts = [(i, j) for i in range(n) for j in range(n)]
    labels = [f"{i},{j}" for i, j in pts]
    dist = [[abs(a[0] - b[0]) + abs(a[1] - b[1]) for b in pts] for a in pts]
    domains = ["S", "U", "V"] + (["Y"] if extra else [])
    nesting = close_nesting(domains, [("U", "S"), ("V", "S")] + ([("Y", "S")] if extra else []))
    graphs = {"S": _point(), "U": _path_graph(n), "V": _path_graph(n)}
    proj_u = [frozenset((n - 1 - i if corrupted and j % 2 else i,)) for i, j in pts]
    projections = {
        "S": [frozenset((0,))] * len(pts),
        "U": proj_u,
        "V": [frozenset((j,)) for i, j in pts],
    }
    rho = {("U", "S"): frozenset((0,)), ("V", "S"): frozenset((0,))}
    if extra:
        mid = n // 2
        graphs["Y"] = _point()
        projections["Y"] = [frozenset((0,))] * len(pts)
        rho.update({
            ("Y", "S"): frozenset((0,)),
            ("Y", "U"): frozenset((mid,)),
            ("Y", "V"): frozenset((mid,)),
            ("U", "Y"): frozenset((0,)),
            ("V", "Y"): frozenset((0,)),
        })
    action = None
    if flip:
        index = {p: k for k, p in enumerate(pts)}
        perm = [index[(n - 1 - i, j)] for i, j in pts]
        gp = {W: list(range(len(graphs[W]))) for W in domains}
        gp["U"] = [n - 1 - i for i in range(n)]
        action = GroupAction([perm], [gp])
    name = "grid" + ("-corrupted" if corrupted else "") + ("-extra" if extra else "") + ("-flip" if flip else "")
    m = HHSModel(labels, dist, domains, "S", nesting, {frozenset(("U", "V"))}, graphs, projections, rho,
                 action, name=name)
    validate_model(m)
    return m


BUILTINS = {
    "path": path_model,
    "grid": grid_model,
    "corrupted-grid": lambda: grid_model(corrupted=True),
    "grid-extra": lambda: grid_model(extra=True),
    "grid-flip": lambda: grid_model(flip=True),
    "cycle": cycle_model,
}


def builtin_model(name: str) -> HHSModel:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise InputError(f"unknown builtin model {name!r}; known: {', '.join(sorted(BUILTINS))}") from None


def resolve_model(spec: str) -> HHSModel:
    """'builtin:NAME' or a path to a model document."""
    from .model import load_model

    if spec.startswith("builtin:"):
        return builtin_model(spec.split(":", 1)[1])
    return load_model(spec)
