"""Bipartite graphs and Hopcroft-Karp maximum matching."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

INF = float("inf")


@dataclass(frozen=True)
class BipartiteGraph:
    """Left vertices ``0..n_left-1``, right vertices ``0..n_right-1``."""

    n_left: int
    n_right: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, n_left: int, n_right: int, edges=()):
        object.__setattr__(self, "n_left", n_left)
        object.__setattr__(self, "n_right", n_right)
        edges = frozenset((int(u), int(v)) for u, v in edges)
        for u, v in edges:
            if not (0 <= u < n_left and 0 <= v < n_right):
                raise ValueError(f"edge ({u}, {v}) out of range")
        object.__setattr__(self, "edges", edges)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n_left)]
        for u, v in sorted(self.edges):
            adj[u].append(v)
        return adj


def hopcroft_karp(adj: list[list[int]], n_right: int) -> list[int | None]:
    """Maximum matching; returns ``match_left[u]`` (right partner or None)."""
    n_left = len(adj)
    match_l: list[int | None] = [None] * n_left
    match_r: list[int | None] = [None] * n_right
    dist = [INF] * n_left

    def bfs() -> bool:
        q = deque()
        for u in range(n_left):
            if match_l[u] is None:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = INF
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w is None:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def dfs(root: int) -> bool:
        # iterative augmenting-path search along the BFS layering
        stack = [(root, iter(adj[root]))]
        path = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                w = match_r[v]
                if w is None:
                    path.append((u, v))
                    for a, b in path:
                        match_l[a] = b
                        match_r[b] = a
                    return True
                if dist[w] == dist[u] + 1:
                    path.append((u, v))
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[u] = INF
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] is None:
                dfs(u)
    return match_l


def max_matching_size(g: BipartiteGraph) -> int:
    return sum(1 for v in hopcroft_karp(g.adjacency(), g.n_right) if v is not None)


def bipartite_perfect_matching(g: BipartiteGraph) -> bool:
    if g.n_left != g.n_right:
        return False
    return max_matching_size(g) == g.n_left
