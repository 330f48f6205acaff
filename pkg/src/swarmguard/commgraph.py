"""Communication graph, synchronous message passing and distributed clique partition.

The clique partition runs as a three-round protocol over :class:`SyncNetwork`:

1. every robot broadcasts a hello and learns its neighbour set ``N_i``;
2. every robot broadcasts ``N_i+ = N_i | {i}`` and picks as its candidate
   clique the largest ``N_i+ & N_j+`` over neighbours ``j`` (ties go to the
   smallest ``j``); isolated robots pick ``{i}``;
3. every robot broadcasts its candidate; its final clique is the set of
   robots in ``N_i+`` that announced exactly the same candidate.

Robots sharing a candidate set ``C`` all belong to ``C``, and ``C`` lies in
each of their closed neighbourhoods, so they are pairwise adjacent and each
final group is a clique.  Optional per-robot payloads are relayed on the
same three rounds, so after round three each robot also knows the payloads
of every robot within three hops.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidParameterError


@dataclass(frozen=True)
class CommGraph:
    n: int
    neighbors: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.neighbors) != self.n:
            raise InvalidParameterError("neighbour table length must equal n")
        for i, nbrs in enumerate(self.neighbors):
            if i in nbrs:
                raise InvalidParameterError(f"self-loop at robot {i}")
            for j in nbrs:
                if not 0 <= j < self.n or i not in self.neighbors[j]:
                    raise InvalidParameterError(f"edge ({i}, {j}) is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "CommGraph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for i, j in edges:
            if i == j:
                raise InvalidParameterError(f"self-loop at robot {i}")
            nbrs[i].add(j)
            nbrs[j].add(i)
        return cls(n, tuple(frozenset(s) for s in nbrs))

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in sorted(self.neighbors[i]) if i < j]

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])

    def adjacent(self, i: int, j: int) -> bool:
        return j in self.neighbors[i]

    def is_clique(self, members: Iterable[int]) -> bool:
        members = list(members)
        return all(self.adjacent(a, b) for k, a in enumerate(members) for b in members[k + 1 :])


def build_graph(positions: Sequence[Sequence[float]] | np.ndarray, comm_range: float) -> CommGraph:
    """Disk graph: robots ``i != j`` are adjacent iff ``||p_i - p_j|| <= comm_range``."""
    if not comm_range > 0:
        raise InvalidParameterError(f"comm_range must be positive, got {comm_range}")
    pts = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(pts)
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    adj = dist <= comm_range
    np.fill_diagonal(adj, False)
    return CommGraph(n, tuple(frozenset(np.flatnonzero(adj[i]).tolist()) for i in range(n)))


def k_hop_neighbors(graph: CommGraph, robot: int, k: int) -> set[int]:
    """Robots at hop distance 1..k from ``robot`` (the robot itself excluded)."""
    if not 0 <= robot < graph.n:
        raise KeyError(f"unknown robot {robot}")
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    depth = {robot: 0}
    queue = deque([robot])
    while queue:
        u = queue.popleft()
        if depth[u] == k:
            continue
        for v in graph.neighbors[u]:
            if v not in depth:
                depth[v] = depth[u] + 1
                queue.append(v)
    del depth[robot]
    return set(depth)


# --- synchronous network -------------------------------------------------------


class SyncNetwork:
    """Lock-step message delivery over the edges of a :class:`CommGraph`.

    Messages sent during a round become visible to receivers only after
    :meth:`deliver`.  A broadcast to ``d`` neighbours counts ``d`` sends.
    """

    def __init__(self, graph: CommGraph):
        self.graph = graph
        self.rounds = 0
        self.sent = [0] * graph.n
        self._outbox: list[tuple[int, int, Any]] = []

    def send(self, src: int, dst: int, payload: Any) -> None:
        if not self.graph.adjacent(src, dst):
            raise InvalidParameterError(f"robots {src} and {dst} are not in communication range")
        self._outbox.append((src, dst, payload))
        self.sent[src] += 1

    def broadcast(self, src: int, payload: Any, to: Iterable[int] | None = None) -> None:
        for dst in sorted(self.graph.neighbors[src] if to is None else to):
            self.send(src, dst, payload)

    def deliver(self) -> list[dict[int, Any]]:
        """Close the current round; returns per-robot inbox ``{sender: payload}``."""
        inbox: list[dict[int, Any]] = [{} for _ in range(self.graph.n)]
        for src, dst, payload in self._outbox:
            inbox[dst][src] = payload
        self._outbox = []
        self.rounds += 1
        return inbox


# --- distributed clique partition ---------------------------------------------


@dataclass(frozen=True)
class CliquePartition:
    cliques: tuple[tuple[int, ...], ...]
    assignment: tuple[int, ...]

    @classmethod
    def from_groups(cls, n: int, groups: Iterable[Iterable[int]]) -> "CliquePartition":
        ordered = sorted((tuple(sorted(g)) for g in groups), key=lambda c: c[0])
        assignment = [-1] * n
        for k, members in enumerate(ordered):
            for i in members:
                if assignment[i] != -1:
                    raise InvalidParameterError(f"robot {i} is in two cliques")
                assignment[i] = k
        if -1 in assignment:
            raise InvalidParameterError(f"robot {assignment.index(-1)} is in no clique")
        return cls(tuple(ordered), tuple(assignment))

    @property
    def k(self) -> int:
        return len(self.cliques)

    def clique_of(self, robot: int) -> tuple[int, ...]:
        return self.cliques[self.assignment[robot]]

    def to_dict(self) -> dict[str, list[int]]:
        return {str(k): list(c) for k, c in enumerate(self.cliques)}


@dataclass
class DcpResult:
    partition: CliquePartition
    messages: list[int]
    rounds: int
    candidates: list[frozenset[int]]
    # per round, per robot local compute seconds
    compute_times: list[list[float]] = field(default_factory=list)
    # robot -> {robot within 3 hops (and itself): payload}
    relayed: list[dict[int, Any]] | None = None

    @property
    def parallel_compute_time(self) -> float:
        """Sum over rounds of the slowest robot's local computation."""
        return sum(max(ts, default=0.0) for ts in self.compute_times)


def _pick_candidate(i: int, closed: frozenset[int], received: Mapping[int, frozenset[int]]) -> frozenset[int]:
    best, best_size = frozenset((i,)), 0
    for j in sorted(received):
        inter = closed & received[j]
        if len(inter) > best_size:
            best, best_size = inter, len(inter)
    return best


def dcp_partition(graph: CommGraph, payloads: Sequence[Any] | None = None) -> DcpResult:
    """Simulate the three-round clique partition protocol on ``graph``."""
    n = graph.n
    net = SyncNetwork(graph)
    clock = time.perf_counter
    compute: list[list[float]] = []
    known: list[dict[int, Any]] | None = None
    if payloads is not None:
        known = [{i: payloads[i]} for i in range(n)]

    # round 1: hello (+ own payload)
    for i in range(n):
        net.broadcast(i, ("hello", dict(known[i]) if known else None))
    inbox = net.deliver()
    times, nbrs = [], []
    for i in range(n):
        t0 = clock()
        nbrs.append(frozenset(inbox[i]))
        if known:
            for _, (_, relay) in inbox[i].items():
                known[i].update(relay)
        times.append(clock() - t0)
    compute.append(times)

    # round 2: share closed neighbourhoods (+ payloads heard so far)
    closed = [nbrs[i] | {i} for i in range(n)]
    for i in range(n):
        net.broadcast(i, (closed[i], dict(known[i]) if known else None))
    inbox = net.deliver()
    times, candidates = [], []
    for i in range(n):
        t0 = clock()
        received = {j: msg[0] for j, msg in inbox[i].items()}
        candidates.append(_pick_candidate(i, closed[i], received))
        if known:
            for _, (_, relay) in inbox[i].items():
                known[i].update(relay)
        times.append(clock() - t0)
    compute.append(times)

    # round 3: announce candidate cliques (+ payloads heard so far)
    for i in range(n):
        net.broadcast(i, (candidates[i], dict(known[i]) if known else None))
    inbox = net.deliver()
    times, local_views = [], []
    for i in range(n):
        t0 = clock()
        view = {i} | {j for j, msg in inbox[i].items() if msg[0] == candidates[i]}
        local_views.append(frozenset(view))
        if known:
            for _, (_, relay) in inbox[i].items():
                known[i].update(relay)
        times.append(clock() - t0)
    compute.append(times)

    groups = set(local_views)
    for i in range(n):
        for j in local_views[i]:
            if local_views[j] != local_views[i]:
                raise AssertionError(f"inconsistent clique views at robots {i} and {j}")
    partition = CliquePartition.from_groups(n, groups)
    return DcpResult(partition, list(net.sent), net.rounds, candidates, compute, known)


def validate_partition(graph: CommGraph, partition: CliquePartition) -> None:
    """Raise AssertionError unless the partition is disjoint, covering and made of cliques."""
    seen: set[int] = set()
    for members in partition.cliques:
        if not members:
            raise AssertionError("empty clique")
        overlap = seen.intersection(members)
        if overlap:
            raise AssertionError(f"robots {sorted(overlap)} appear in two cliques")
        seen.update(members)
        if not graph.is_clique(members):
            raise AssertionError(f"{members} is not a clique")
    if seen != set(range(graph.n)):
        raise AssertionError(f"robots {sorted(set(range(graph.n)) - seen)} are uncovered")
