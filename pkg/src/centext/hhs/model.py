"""Finite combinatorial HHS models and their JSON document format.

Everything is stored by index: points 0..n-1, domains by name, coordinate
graph vertices 0..k-1 per domain (labels kept for I/O).  Distances:

    d_W(x, y)       = diam(pi_W(x) u pi_W(y))
    d_W(A, B)       = min distance between the sets A and B (point-to-set
                      and set-to-set, e.g. d_W(pi_W(x), rho^V_W))
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError


@dataclass(eq=False)
class CoordinateGraph:
    labels: list
    edges: list  # pairs of vertex indices
    dist: list = field(default=None, repr=False)

    def __post_init__(self):
        n = len(self.labels)
        if n == 0:
            raise InputError("coordinate graph needs at least one vertex")
        adj = [[] for _ in range(n)]
        for u, v in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) out of range")
            adj[u].append(v)
            adj[v].append(u)
        self.adj = [sorted(set(a)) for a in adj]
        self.dist = [_bfs(self.adj, s) for s in range(n)]
        for row in self.dist:
            if any(d < 0 for d in row):
                raise InputError("coordinate graph is disconnected")

    def __len__(self):
        return len(self.labels)

    def diam(self, S=None) -> int:
        S = range(len(self)) if S is None else S
        S = list(S)
        return max((self.dist[a][b] for a in S for b in S), default=0)

    def set_dist(self, A, B) -> int:
        return min(self.dist[a][b] for a in A for b in B)

    def neighborhood(self, A, r: int) -> frozenset:
        return frozenset(v for v in range(len(self)) if min(self.dist[v][a] for a in A) <= r)

    def distances_avoiding(self, source: int, removed: frozenset) -> list:
        """BFS distances from source in the graph with ``removed`` deleted (-1 = unreachable)."""
        n = len(self)
        out = [-1] * n
        if source in removed:
            return out
        out[source] = 0
        q = deque([source])
        while q:
            u = q.popleft()
            for v in self.adj[u]:
                if out[v] < 0 and v not in removed:
                    out[v] = out[u] + 1
                    q.append(v)
        return out


def _bfs(adj, s):
    out = [-1] * len(adj)
    out[s] = 0
    q = deque([s])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if out[v] < 0:
                out[v] = out[u] + 1
                q.append(v)
    return out


@dataclass(eq=False)
class GroupAction:
    """Generators acting by permutations of points and of each coordinate graph."""

    point_perms: list  # list of permutation lists on point indices
    graph_perms: list  # list of {domain: permutation list on vertex indices}


@dataclass(eq=False)
class HHSModel:
    point_labels: list
    dist: list  # symmetric integer table
    domains: list  # names, in a fixed order
    maximal: str
    nesting: set  # pairs (V, W) with V nested in W, reflexive-transitive closure
    orthogonal: set  # frozensets {V, W}
    graphs: dict  # domain -> CoordinateGraph
    projections: dict  # domain -> list over points of frozenset of vertices
    rho: dict  # (V, W) -> frozenset of vertices of CW
    action: GroupAction | None = None
    name: str = "model"

    # -- relations -----------------------------------------------------------------
    def nested(self, V, W) -> bool:
        return (V, W) in self.nesting

    def proper_nested(self, V, W) -> bool:
        return V != W and (V, W) in self.nesting

    def orth(self, V, W) -> bool:
        return frozenset((V, W)) in self.orthogonal and V != W

    def transverse(self, V, W) -> bool:
        return V != W and not self.orth(V, W) and not self.nested(V, W) and not self.nested(W, V)

    def nested_in(self, W) -> list:
        return [V for V in self.domains if self.nested(V, W)]

    @property
    def n_points(self) -> int:
        return len(self.point_labels)

    # -- distances -----------------------------------------------------------------
    def d_W(self, W, x: int, y: int) -> int:
        g = self.graphs[W]
        return g.diam(self.projections[W][x] | self.projections[W][y])

    def d_W_point_set(self, W, x: int, A) -> int:
        return self.graphs[W].set_dist(self.projections[W][x], A)

    def copy_with(self, **kw) -> HHSModel:
        data = dict(
            point_labels=self.point_labels,
            dist=self.dist,
            domains=self.domains,
            maximal=self.maximal,
            nesting=self.nesting,
            orthogonal=self.orthogonal,
            graphs=self.graphs,
            projections=self.projections,
            rho=self.rho,
            action=self.action,
            name=self.name,
        )
        data.update(kw)
        return HHSModel(**data)


def validate_model(m: HHSModel):
    """Check the model invariants; raises InputError naming the missing datum."""
    n = m.n_points
    if n == 0:
        raise InputError("model has no points")
    if len(m.dist) != n or any(len(row) != n for row in m.dist):
        raise InputError("points: distance table is not square")
    for i in range(n):
        if m.dist[i][i] != 0:
            raise InputError(f"points: d({m.point_labels[i]}, itself) != 0")
        for j in range(n):
            if m.dist[i][j] != m.dist[j][i] or m.dist[i][j] < 0:
                raise InputError(f"points: distance table not symmetric at ({i}, {j})")
    D = np.array(m.dist, dtype=np.int64)
    for j in range(n):
        bad = np.argwhere(D > D[:, j : j + 1] + D[j : j + 1, :])
        if len(bad):
            i, k = (int(v) for v in bad[0])
            raise InputError(f"points: triangle inequality fails at ({i}, {j}, {k})")
    if len(set(m.domains)) != len(m.domains):
        raise InputError("domains: duplicate names")
    if m.maximal not in m.domains:
        raise InputError(f"domains: maximal element {m.maximal!r} is not a domain")
    for V, W in m.nesting:
        if V not in m.domains or W not in m.domains:
            raise InputError(f"domains: nesting pair ({V}, {W}) names an unknown domain")
        if V != W and (W, V) in m.nesting:
            raise InputError(f"domains: nesting is not antisymmetric at ({V}, {W})")
    for pair in m.orthogonal:
        for V in pair:
            if V not in m.domains:
                raise InputError(f"domains: orthogonality names unknown domain {V!r}")
    for W in m.domains:
        if W not in m.graphs:
            raise InputError(f"coordinate_graphs: missing graph for {W!r}")
        if W not in m.projections or len(m.projections[W]) != n:
            raise InputError(f"projections: missing or incomplete projection to {W!r}")
        k = len(m.graphs[W])
        for x, S in enumerate(m.projections[W]):
            if any(not 0 <= v < k for v in S):
                raise InputError(f"projections: vertex out of range in pi_{W}({m.point_labels[x]})")
    for (V, W), S in m.rho.items():
        if V not in m.domains or W not in m.domains:
            raise InputError(f"relative_projections: unknown pair ({V}, {W})")
        k = len(m.graphs[W])
        if any(not 0 <= v < k for v in S):
            raise InputError(f"relative_projections: vertex out of range in rho^{V}_{W}")


def close_nesting(domains, pairs) -> set:
    """Reflexive-transitive closure of the declared nesting pairs."""
    rel = {(d, d) for d in domains} | {tuple(p) for p in pairs}
    for k in domains:
        for i in domains:
            if (i, k) in rel:
                for j in domains:
                    if (k, j) in rel:
                        rel.add((i, j))
    return rel


def graph_distance_table(n: int, edges) -> list:
    g = CoordinateGraph(list(range(n)), list(edges))
    return g.dist


# ---------------------------------------------------------------------------
# documents


def model_from_doc(doc: dict) -> HHSModel:
    try:
        pts = doc["points"]
        labels = [str(x) for x in pts["labels"]]
        index = {lab: i for i, lab in enumerate(labels)}
        if "distance" in pts:
            dist = [[int(v) for v in row] for row in pts["distance"]]
        elif "edges" in pts:
            dist = graph_distance_table(len(labels), [(index[str(a)], index[str(b)]) for a, b in pts["edges"]])
        else:
            raise InputError("points: need 'distance' or 'edges'")
        dom = doc["domains"]
        names = [str(x) for x in dom["names"]]
        maximal = str(dom["maximal"])
        nesting = close_nesting(names, [(str(a), str(b)) for a, b in dom.get("nesting", [])])
        orthogonal = {frozenset((str(a), str(b))) for a, b in dom.get("orthogonal", [])}
        graphs, vindex = {}, {}
        for W in names:
            gd = doc["coordinate_graphs"][W]
            vl = [str(v) for v in gd["vertices"]]
            vindex[W] = {v: i for i, v in enumerate(vl)}
            graphs[W] = CoordinateGraph(vl, [(vindex[W][str(a)], vindex[W][str(b)]) for a, b in gd.get("edges", [])])
        projections = {}
        for W in names:
            table = doc["projections"][W]
            projections[W] = [frozenset(vindex[W][str(v)] for v in table[lab]) for lab in labels]
        rho = {}
        for row in doc.get("relative_projections", []):
            V, W = str(row["from"]), str(row["to"])
            rho[(V, W)] = frozenset(vindex[W][str(v)] for v in row["set"])
        action = None
        if doc.get("group_action"):
            pp, gp = [], []
            for gen in doc["group_action"]:
                pp.append([index[str(gen["points"][lab])] for lab in labels])
                gp.append(
                    {
                        W: [vindex[W][str(gen["graphs"][W][v])] for v in graphs[W].labels]
                        if W in gen.get("graphs", {})
                        else list(range(len(graphs[W])))
                        for W in names
                    }
                )
            action = GroupAction(pp, gp)
    except KeyError as exc:
        raise InputError(f"model document is missing {exc}") from None
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed model document: {exc}") from None
    m = HHSModel(labels, dist, names, maximal, nesting, orthogonal, graphs, projections, rho, action,
                 str(doc.get("name", "model")))
    validate_model(m)
    return m


def model_to_doc(m: HHSModel) -> dict:
    labels = m.point_labels
    doc = {
        "name": m.name,
        "points": {"labels": labels, "distance": m.dist},
        "domains": {
            "names": m.domains,
            "maximal": m.maximal,
            "nesting": sorted([V, W] for V, W in m.nesting if V != W),
            "orthogonal": sorted(sorted(p) for p in m.orthogonal),
        },
        "coordinate_graphs": {
            W: {"vertices": m.graphs[W].labels, "edges": [[m.graphs[W].labels[a], m.graphs[W].labels[b]]
                                                          for a, b in m.graphs[W].edges]}
            for W in m.domains
        },
        "projections": {
            W: {labels[x]: sorted(m.graphs[W].labels[v] for v in S) for x, S in enumerate(m.projections[W])}
            for W in m.domains
        },
        "relative_projections": [
            {"from": V, "to": W, "set": sorted(m.graphs[W].labels[v] for v in S)}
            for (V, W), S in sorted(m.rho.items())
        ],
    }
    if m.action is not None:
        doc["group_action"] = [
            {
                "points": {labels[i]: labels[j] for i, j in enumerate(pp)},
                "graphs": {W: {m.graphs[W].labels[i]: m.graphs[W].labels[j] for i, j in enumerate(gp[W])}
                           for W in m.domains},
            }
            for pp, gp in zip(m.action.point_perms, m.action.graph_perms)
        ]
    return doc


def load_model(path: str) -> HHSModel:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read model {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"model {path} is not valid JSON: {exc}") from None
    return model_from_doc(doc)
