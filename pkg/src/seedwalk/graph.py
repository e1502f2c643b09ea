"""Undirected simple graphs in a compact offsets+targets adjacency layout.

Node ids are dense integers 0..n-1; arbitrary external string labels are
kept alongside for input/output. Graphs are immutable after construction
and safe for concurrent reads.
"""

from __future__ import annotations

from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import ParseError


class Graph:
    """Immutable undirected simple graph.

    adjacency is stored as two arrays: ``offsets`` (length n+1) and
    ``targets`` (length 2m), with each node's neighbor list sorted
    ascending. ``labels[v]`` is the external label of internal id v.
    """

    __slots__ = ("offsets", "targets", "labels", "_label_ids", "duplicates_collapsed")

    def __init__(
        self,
        offsets: np.ndarray,
        targets: np.ndarray,
        labels: Sequence[str] | None = None,
        duplicates_collapsed: int = 0,
    ):
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.targets = np.asarray(targets, dtype=np.int64)
        n = len(self.offsets) - 1
        self.labels = list(labels) if labels is not None else [str(v) for v in range(n)]
        if len(self.labels) != n:
            raise ValueError(f"{len(self.labels)} labels for {n} nodes")
        self._label_ids = {lab: v for v, lab in enumerate(self.labels)}
        self.duplicates_collapsed = duplicates_collapsed

    @property
    def n(self) -> int:
        return len(self.offsets) - 1

    @property
    def m(self) -> int:
        return len(self.targets) // 2

    def degree(self, v: int) -> int:
        self._check_node(v)
        return int(self.offsets[v + 1] - self.offsets[v])

    def degrees(self) -> np.ndarray:
        """Degree of every node, as an array."""
        return np.diff(self.offsets)

    def neighbors(self, v: int) -> np.ndarray:
        self._check_node(v)
        return self.targets[self.offsets[v] : self.offsets[v + 1]]

    def id_of(self, label: str) -> int:
        try:
            return self._label_ids[label]
        except KeyError:
            raise KeyError(f"unknown node label {label!r}") from None

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ValueError(f"node id {v} out of range [0, {self.n})")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        labels: Sequence[str] | None = None,
    ) -> "Graph":
        """Build a graph from (u, w) id pairs; duplicates are collapsed."""
        seen: set[tuple[int, int]] = set()
        dup = 0
        for u, w in edges:
            if u == w:
                raise ValueError(f"self-loop on node {u}")
            key = (u, w) if u < w else (w, u)
            if key in seen:
                dup += 1
            else:
                seen.add(key)
        if seen:
            pairs = np.array(sorted(seen), dtype=np.int64)
            if pairs.min() < 0 or pairs.max() >= n:
                raise ValueError("edge endpoint out of range")
            both = np.concatenate([pairs, pairs[:, ::-1]])
        else:
            both = np.empty((0, 2), dtype=np.int64)
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        counts = np.bincount(both[:, 0], minlength=n)
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        return cls(offsets, both[:, 1].copy(), labels, duplicates_collapsed=dup)

    def validate(self) -> None:
        """Re-check the structural invariants; raises ValueError on violation."""
        n = self.n
        deg = self.degrees()
        if deg.sum() != 2 * self.m:
            raise ValueError("degree sum != 2m")
        u = np.repeat(np.arange(n, dtype=np.int64), deg)
        w = self.targets
        if w.size:
            if (u == w).any():
                raise ValueError("self-loop present")
            if w.min() < 0 or w.max() >= n:
                raise ValueError("neighbor id out of range")
            # sorted, duplicate-free neighbor lists: strictly increasing within rows
            same_row = u[1:] == u[:-1]
            if (np.diff(w) <= 0)[same_row].any():
                raise ValueError("neighbor list not strictly increasing")
            # symmetry: the set of directed arcs equals its reverse
            fwd = np.sort(u * n + w)
            rev = np.sort(w * n + u)
            if not np.array_equal(fwd, rev):
                raise ValueError("adjacency not symmetric")


def load_edge_list(source: str | Path | IO[str] | Iterable[str]) -> Graph:
    """Parse a whitespace-separated edge list into a Graph.

    One edge per line as two labels; lines starting with '#' are comments;
    blank lines are skipped. Labels are re-indexed densely in order of first
    appearance. Duplicate edges are collapsed (count kept on the returned
    graph); self-loops and malformed lines raise ParseError.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_edge_list(fh)

    label_ids: dict[str, int] = {}
    labels: list[str] = []
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    dup = 0

    def intern(lab: str) -> int:
        v = label_ids.get(lab)
        if v is None:
            v = len(labels)
            label_ids[lab] = v
            labels.append(lab)
        return v

    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected two labels, got {len(parts)}")
        a, b = parts
        if a == b:
            raise ParseError(f"line {lineno}: self-loop on node {a!r}")
        u, w = intern(a), intern(b)
        key = (u, w) if u < w else (w, u)
        if key in seen:
            dup += 1
        else:
            seen.add(key)
            edges.append(key)

    if not edges:
        raise ParseError("empty edge list")
    g = Graph.from_edges(len(labels), edges, labels)
    g.duplicates_collapsed = dup
    return g


def write_edge_list(g: Graph, stream: IO[str]) -> None:
    """Write each undirected edge once (lower internal id first)."""
    deg = g.degrees()
    u = np.repeat(np.arange(g.n, dtype=np.int64), deg)
    mask = u < g.targets
    for a, b in zip(u[mask], g.targets[mask]):
        stream.write(f"{g.labels[a]} {g.labels[b]}\n")


def check_seed_reachability(g: Graph, seeds: Iterable[int]) -> np.ndarray:
    """Return the sorted ids of nodes with no path to any seed (empty = ok).

    Undirected BFS from the whole seed set at once.
    """
    seed_arr = np.unique(np.fromiter(seeds, dtype=np.int64))
    if seed_arr.size == 0:
        raise ValueError("seed set is empty")
    if seed_arr[0] < 0 or seed_arr[-1] >= g.n:
        raise ValueError("seed id out of range")
    visited = np.zeros(g.n, dtype=bool)
    visited[seed_arr] = True
    frontier = seed_arr
    while frontier.size:
        starts = g.offsets[frontier]
        counts = g.offsets[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        base = np.repeat(starts, counts)
        step = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        nbrs = g.targets[base + step]
        fresh = np.unique(nbrs[~visited[nbrs]])
        visited[fresh] = True
        frontier = fresh
    return np.flatnonzero(~visited)
