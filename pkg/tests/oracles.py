"""Slow, independent reference implementations used only by the tests.

Nothing here imports the package's algorithms: coverage is plain Python set
arithmetic over explicitly constructed rectangles, subsets are enumerated
with integer bit loops, and the planners are re-coded from their textbook
descriptions.
"""

from __future__ import annotations

import math

import networkx as nx
import numpy as np


# --- geometry ------------------------------------------------------------------

KINDS = ["forward", "backward", "left", "right", "stay"]


def region(x, y, kind, l_t, l_o):
    """(xmin, ymin, xmax, ymax) of a motion primitive's sensing rectangle."""
    h = l_o / 2
    if kind == "forward":
        return (x, y - h, x + l_t, y + h)
    if kind == "backward":
        return (x - l_t, y - h, x, y + h)
    if kind == "left":
        return (x - h, y, x + h, y + l_t)
    if kind == "right":
        return (x - h, y - l_t, x + h, y)
    return (x - h, y - h, x + h, y + h)


def inside(rect, p):
    return rect[0] <= p[0] <= rect[2] and rect[1] <= p[1] <= rect[3]


def geometric_cover(robot_xy, targets_xy, l_t=10.0, l_o=3.0):
    """action id -> frozenset of covered target indices, action id = robot*5 + kind."""
    cover = {}
    for r, (x, y) in enumerate(robot_xy):
        for k, kind in enumerate(KINDS):
            rect = region(float(x), float(y), kind, l_t, l_o)
            cover[r * 5 + k] = frozenset(j for j, p in enumerate(targets_xy) if inside(rect, p))
    return cover


# --- set-function oracle ---------------------------------------------------------


class SetCoverage:
    """Coverage function on explicit frozensets."""

    def __init__(self, cover: dict[int, frozenset], owner: dict[int, int]):
        self.cover = {a: frozenset(c) for a, c in cover.items()}
        self.owner = dict(owner)
        self.robots = sorted(set(owner.values()))
        self.by_robot = {r: sorted(a for a in owner if owner[a] == r) for r in self.robots}

    @classmethod
    def from_objective(cls, obj):
        cover = {a: frozenset(i for i in range(m.bit_length()) if m >> i & 1) for a, m in obj.masks.items()}
        return cls(cover, obj.owner)

    def f(self, actions) -> int:
        out = set()
        for a in actions:
            out |= self.cover[a]
        return len(out)

    # greedy with ties to the smallest (robot, action)
    def greedy(self, robots, base=()):
        chosen, picked = {}, list(base)
        left = sorted(robots)
        while left:
            best = None
            for r in left:
                for a in self.by_robot[r]:
                    g = self.f(picked + [a]) - self.f(picked)
                    if best is None or g > best[0]:
                        best = (g, r, a)
            _, r, a = best
            chosen[r] = a
            picked.append(a)
            left.remove(r)
        return chosen

    def best_single(self, r):
        best = None
        for a in self.by_robot[r]:
            v = len(self.cover[a])
            if best is None or v > best[1]:
                best = (a, v)
        return best

    def robust(self, robots, n_baits):
        ranked = sorted(robots, key=lambda r: (-self.best_single(r)[1], r))
        chosen = {r: self.best_single(r)[0] for r in ranked[:n_baits]}
        # greedy ignores the baits' coverage
        chosen.update(self.greedy(ranked[n_baits:]))
        return chosen

    def worst_case(self, actions, alpha):
        """min over removals of size exactly min(alpha, |S|), plain bit loop."""
        actions = sorted(actions)
        n = len(actions)
        size = min(alpha, n)
        best = None
        for bits in range(1 << n):
            if bin(bits).count("1") != size:
                continue
            removed = tuple(actions[i] for i in range(n) if bits >> i & 1)
            kept = [actions[i] for i in range(n) if not bits >> i & 1]
            v = self.f(kept)
            if best is None or (v, removed) < best:
                best = (v, removed)
        return best

    def any_size_worst(self, actions, alpha):
        """min over all removals with |A| <= alpha (value only)."""
        actions = sorted(actions)
        n = len(actions)
        best = None
        for bits in range(1 << n):
            if bin(bits).count("1") <= alpha:
                v = self.f(actions[i] for i in range(n) if not bits >> i & 1)
                best = v if best is None else min(best, v)
        return best

    def full_assignments(self, robots=None):
        robots = self.robots if robots is None else robots

        def rec(i):
            if i == len(robots):
                yield []
                return
            for a in self.by_robot[robots[i]]:
                for rest in rec(i + 1):
                    yield [a] + rest

        yield from rec(0)

    def partial_assignments(self):
        def rec(i):
            if i == len(self.robots):
                yield []
                return
            for rest in rec(i + 1):
                yield rest
                for a in self.by_robot[self.robots[i]]:
                    yield [a] + rest

        yield from rec(0)

    def f_star(self, alpha):
        return max(self.any_size_worst(S, alpha) for S in self.full_assignments())

    def curvature(self):
        """1 - min over feasible S and x in S (f({x}) > 0) of (f(S) - f(S - x)) / f({x})."""
        lo = None
        for S in self.partial_assignments():
            for x in S:
                single = len(self.cover[x])
                if single == 0:
                    continue
                rest = [a for a in S if a != x]
                r = (self.f(S) - self.f(rest)) / single
                lo = r if lo is None else min(lo, r)
        return 0.0 if lo is None else 1.0 - lo

    def greedy_attack(self, actions, alpha):
        current = sorted(actions)
        removed = []
        for _ in range(min(alpha, len(current))):
            best = None
            for x in current:
                v = self.f([a for a in current if a != x])
                if best is None or v < best[0]:
                    best = (v, x)
            current.remove(best[1])
            removed.append(best[1])
        return self.f(current), tuple(sorted(removed))


# --- graphs ------------------------------------------------------------------------


def disk_edges(points, r):
    pts = [tuple(map(float, p)) for p in points]
    return {
        (i, j)
        for i in range(len(pts))
        for j in range(i + 1, len(pts))
        if math.hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]) <= r
    }


def nx_partition_ok(n, edges, partition):
    """Independent check with networkx: disjoint, covering, every part complete."""
    G = nx.Graph()
    G.add_nodes_from(range(n))
    G.add_edges_from(edges)
    flat = [i for c in partition.cliques for i in c]
    if sorted(flat) != list(range(n)):
        return False
    for c in partition.cliques:
        sub = G.subgraph(c)
        if sub.number_of_edges() != len(c) * (len(c) - 1) // 2:
            return False
    return all(partition.clique_of(i) == c for c in partition.cliques for i in c)


# --- Kalman filter -----------------------------------------------------------------


def textbook_kf_step(x, P, F, Q, H, R, z):
    """Predict then update, standard (non-Joseph) covariance form."""
    x = F @ x
    P = F @ P @ F.T + Q
    S = H @ P @ H.T + R
    K = P @ H.T @ np.linalg.inv(S)
    x = x + K @ (z - H @ x)
    P = (np.eye(len(x)) - K @ H) @ P
    return x, P
