"""Model transformations: dropping bounded domains, and quotienting by a finite action."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from .axioms import AxiomReport, Context, check_axioms, min_delta, passing_up_table
from .model import CoordinateGraph, HHSModel, validate_model


@dataclass
class RestrictResult:
    model: HHSModel
    kept: list
    dropped: list
    threshold: int
    delta: int
    passing_up: dict  # the adjusted function P'
    report: AxiomReport

    @property
    def passed(self) -> bool:
        return self.report.passed


def restrict_to_unbounded(m: HHSModel, threshold: int, delta: int | None = None, jobs: int = 1) -> RestrictResult:
    """Keep S and every domain whose coordinate graph has diameter > threshold.

    delta defaults to the least passing constant of m (searched up to threshold).
    The output is re-checked at delta with finite dimension in place of containers
    (dropping domains can remove containers) and with the passing-up function
    P'(t) = P(delta) for t <= delta, P(t) otherwise.
    """
    if delta is None:
        delta = min_delta(m, threshold, jobs=jobs)
        if delta is None:
            raise InputError(f"model does not pass at any delta <= threshold {threshold}; threshold is below its constant")
    if threshold < delta:
        raise InputError(f"threshold {threshold} is below delta {delta}")
    kept = [W for W in m.domains if W == m.maximal or m.graphs[W].diam() > threshold]
    dropped = [W for W in m.domains if W not in kept]
    keep = set(kept)
    sub = m.copy_with(
        domains=kept,
        nesting={(V, W) for V, W in m.nesting if V in keep and W in keep},
        orthogonal={p for p in m.orthogonal if p <= keep},
        graphs={W: m.graphs[W] for W in kept},
        projections={W: m.projections[W] for W in kept},
        rho={(V, W): S for (V, W), S in m.rho.items() if V in keep and W in keep},
        action=None,
        name=f"{m.name}-unbounded",
    )
    validate_model(sub)
    original = passing_up_table(Context(m, jobs), delta)
    adjusted = {t: (original[delta] if t <= delta and delta in original else original[t]) for t in original}
    report = check_axioms(sub, delta, containers="finite-dimension", large_links="passing-up", jobs=jobs)
    report.passing_up = adjusted
    return RestrictResult(sub, kept, dropped, threshold, delta, adjusted, report)


@dataclass
class QuotientResult:
    model: HHSModel
    orbit_diameters: dict  # "X" and every domain -> max orbit diameter
    B: int
    delta: int
    delta_prime: int
    report_at_delta: AxiomReport
    report_at_delta_prime: AxiomReport

    @property
    def passed(self) -> bool:
        return self.report_at_delta_prime.passed


def _orbits(n: int, perms: list) -> list:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for p in perms:
        for i, j in enumerate(p):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def _check_action(m: HHSModel, action):
    n = m.n_points
    D = np.array(m.dist, dtype=np.int64)
    for k, (pp, gp) in enumerate(zip(action.point_perms, action.graph_perms)):
        if sorted(pp) != list(range(n)):
            raise InputError(f"generator {k} is not a permutation of the points", witness=(k,))
        P = np.array(pp)
        bad = np.argwhere(D[np.ix_(P, P)] != D)
        if len(bad):
            x, y = (int(v) for v in bad[0])
            raise InputError(f"generator {k} is not an isometry at ({m.point_labels[x]}, {m.point_labels[y]})",
                             witness=(k, x, y))
        for W in m.domains:
            g = m.graphs[W]
            q = gp[W]
            if sorted(q) != list(range(len(g))):
                raise InputError(f"generator {k} is not a permutation of C{W}", witness=(k, W))
            for u, v in g.edges:
                if q[v] not in g.adj[q[u]]:
                    raise InputError(f"generator {k} does not preserve edge ({u}, {v}) of C{W}", witness=(k, W, u, v))
            for x in range(n):
                if frozenset(q[a] for a in m.projections[W][x]) != m.projections[W][pp[x]]:
                    raise InputError(f"generator {k} is not equivariant for pi_{W} at {m.point_labels[x]}",
                                     witness=(k, W, x))
        for (V, W), S in m.rho.items():
            if frozenset(gp[W][a] for a in S) != S:
                raise InputError(f"generator {k} moves rho^{V}_{W}", witness=(k, V, W))


def quotient_model(m: HHSModel, action=None, delta: int = 0, jobs: int = 1) -> QuotientResult:
    """Orbit-space model: d([x],[y]) = min over representatives, C[W] = CW / action.

    Records the largest orbit diameter B (over X and every coordinate graph) and
    re-checks the axioms at delta and at delta + 2B.
    """
    action = action if action is not None else m.action
    gens = list(zip(action.point_perms, action.graph_perms)) if action is not None else []
    if action is not None:
        _check_action(m, action)
    orbits = _orbits(m.n_points, [p for p, _ in gens])
    gorbits = {W: _orbits(len(m.graphs[W]), [g[W] for _, g in gens]) for W in m.domains}
    if all(len(o) == 1 for o in orbits) and all(len(o) == 1 for W in m.domains for o in gorbits[W]):
        q = m.copy_with(action=None)
        diams = {"X": 0, **{W: 0 for W in m.domains}}
    else:
        D = np.array(m.dist, dtype=np.int64)
        dist = [[int(D[np.ix_(a, b)].min()) for b in orbits] for a in orbits]
        labels = ["~".join(m.point_labels[i] for i in o) for o in orbits]
        graphs, projections, rho = {}, {}, {}
        gpos = {}
        for W in m.domains:
            g = m.graphs[W]
            go = gorbits[W]
            gpos[W] = {v: k for k, o in enumerate(go) for v in o}
            edges = sorted({tuple(sorted((gpos[W][u], gpos[W][v]))) for u, v in g.edges} - {(k, k) for k in range(len(go))})
            graphs[W] = CoordinateGraph(["~".join(g.labels[v] for v in o) for o in go], edges)
            projections[W] = [frozenset(gpos[W][v] for v in m.projections[W][o[0]]) for o in orbits]
        for (V, W), S in m.rho.items():
            rho[(V, W)] = frozenset(gpos[W][v] for v in S)
        q = m.copy_with(point_labels=labels, dist=dist, graphs=graphs, projections=projections, rho=rho,
                        action=None, name=f"{m.name}-quotient")
        diams = {"X": max(int(D[np.ix_(o, o)].max()) for o in orbits)}
        for W in m.domains:
            diams[W] = max(m.graphs[W].diam(o) for o in gorbits[W])
    validate_model(q)
    B = max(diams.values())
    at = check_axioms(q, delta, jobs=jobs)
    at_prime = check_axioms(q, delta + 2 * B, jobs=jobs)
    return QuotientResult(q, diams, B, delta, delta + 2 * B, at, at_prime)
