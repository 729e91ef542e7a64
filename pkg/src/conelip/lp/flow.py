"""Uncapacitated min-cost flow by successive shortest paths with potentials."""

import heapq
from dataclasses import dataclass

import numpy as np

from ..exceptions import SolverError, Unbalanced, ValidationError

BALANCE_TOL = 1e-12


@dataclass(frozen=True)
class FlowNetwork:
    """Nodes ``0..n-1`` with ``divergence[v]`` = required net outflow.

    ``arcs`` holds ``(tail, head, cost)`` triples; every arc has unbounded
    capacity and nonnegative cost.
    """

    divergence: tuple
    arcs: tuple

    @classmethod
    def complete(cls, divergence, cost_matrix):
        """Complete directed graph with arc costs from ``cost_matrix``."""
        n = len(divergence)
        arcs = tuple(
            (i, j, float(cost_matrix[i][j])) for i in range(n) for j in range(n) if i != j
        )
        return cls(tuple(float(v) for v in divergence), arcs)


@dataclass
class FlowResult:
    cost: float
    flow: np.ndarray
    potentials: np.ndarray
    augmentations: int


def min_cost_flow(network):
    div = np.asarray(network.divergence, dtype=float)
    n = len(div)
    scale = max(1.0, float(np.abs(div).sum()))
    if abs(div.sum()) > BALANCE_TOL * scale:
        raise Unbalanced(f"divergences sum to {div.sum():.3g}, not 0")
    arcs = list(network.arcs)
    for tail, head, cost in arcs:
        if cost < 0:
            raise ValidationError("arc costs must be nonnegative")
        if not (0 <= tail < n and 0 <= head < n):
            raise ValidationError(f"arc ({tail},{head}) references a missing node")

    out_arcs = [[] for _ in range(n)]
    in_arcs = [[] for _ in range(n)]
    for e, (tail, head, _) in enumerate(arcs):
        out_arcs[tail].append(e)
        in_arcs[head].append(e)

    flow = np.zeros(len(arcs))
    excess = div.copy()
    pi = np.zeros(n)
    tol = BALANCE_TOL * scale
    rounds = 0
    while True:
        sources = [v for v in range(n) if excess[v] > tol]
        if not sources:
            break
        dist = np.full(n, np.inf)
        pred = [None] * n  # (arc, forward?)
        heap = []
        for s in sources:
            dist[s] = 0.0
            heapq.heappush(heap, (0.0, s))
        done = np.zeros(n, dtype=bool)
        while heap:
            d, v = heapq.heappop(heap)
            if done[v]:
                continue
            done[v] = True
            for e in out_arcs[v]:
                w = arcs[e][1]
                nd = d + max(0.0, arcs[e][2] + pi[v] - pi[w])
                if nd < dist[w]:
                    dist[w] = nd
                    pred[w] = (e, True)
                    heapq.heappush(heap, (nd, w))
            for e in in_arcs[v]:
                if flow[e] <= 0:
                    continue
                w = arcs[e][0]
                nd = d + max(0.0, -arcs[e][2] + pi[v] - pi[w])
                if nd < dist[w]:
                    dist[w] = nd
                    pred[w] = (e, False)
                    heapq.heappush(heap, (nd, w))
        sinks = [v for v in range(n) if excess[v] < -tol and np.isfinite(dist[v])]
        if not sinks:
            raise SolverError("no augmenting path: demand unreachable from supply")
        t = min(sinks, key=lambda v: (dist[v], v))
        path = []
        v = t
        while pred[v] is not None:
            e, fwd = pred[v]
            path.append((e, fwd))
            v = arcs[e][0] if fwd else arcs[e][1]
        s = v
        delta = min(excess[s], -excess[t])
        for e, fwd in path:
            if not fwd:
                delta = min(delta, flow[e])
        for e, fwd in path:
            flow[e] += delta if fwd else -delta
        excess[s] -= delta
        excess[t] += delta
        pi += np.minimum(dist, dist[t])
        rounds += 1
        if rounds > 10 * (n + len(arcs)) ** 2:
            raise SolverError("min-cost flow did not terminate")
    cost = float(sum(c * f for (_, _, c), f in zip(arcs, flow)))
    return FlowResult(cost=cost, flow=flow, potentials=pi, augmentations=rounds)
