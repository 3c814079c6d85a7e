"""Rooted motion tree: cost bookkeeping, exact nearest/near queries, rewiring.

The spatial index is a hybrid of a periodically rebuilt scipy cKDTree and a
brute-force tail scan over vertices inserted since the last rebuild. Both
query paths are exact, and nearest-vertex ties are broken by lowest vertex
index, so results are identical to a full linear scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

__all__ = ["CandidateList", "MotionTree", "near_radius"]

_REBUILD_TAIL = 2048
_COST_TOL = 1e-9
_REWIRE_TOL = 1e-12


def near_radius(
    n: int,
    d: int,
    gamma: float,
    max_radius: float = math.inf,
    log_base: float = math.e,
) -> float:
    """Shrinking connection-ball radius gamma * (log n / n)^(1/d).

    For a single-vertex tree the formula degenerates (log 1 = 0); the
    configured ``max_radius`` is returned instead so the second vertex can
    always reach the root.
    """
    if n < 1:
        raise ValueError("vertex count must be >= 1")
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    if d < 2:
        raise ValueError("dimension must be >= 2")
    if n == 1:
        return max_radius
    return gamma * (math.log(n, log_base) / n) ** (1.0 / d)


@dataclass
class CandidateList:
    """Near vertices sorted ascending by total cost through each candidate.

    ``total_cost[i] = cost_to_root(vertex[i]) + ||vertex[i] - query||``.
    """

    query: np.ndarray
    vertices: np.ndarray  # int indices
    total_costs: np.ndarray

    def __len__(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def empty(self) -> bool:
        return self.vertices.shape[0] == 0


class MotionTree:
    def __init__(self, root: np.ndarray, capacity: int = 1024):
        root = np.asarray(root, dtype=float)
        self.dimension = int(root.shape[0])
        self._pts = np.empty((max(capacity, 16), self.dimension))
        self._pts[0] = root
        self.size = 1
        self.parent = [-1]
        self.edge_cost = [0.0]
        self.cost = [0.0]
        self.last_cost_changes: list = []
        self.children: list[list[int]] = [[]]
        self._kd: cKDTree | None = None
        self._kd_size = 0

    # -- storage ---------------------------------------------------------

    @property
    def root(self) -> np.ndarray:
        return self._pts[0]

    def point(self, idx: int) -> np.ndarray:
        return self._pts[idx]

    def points(self) -> np.ndarray:
        return self._pts[: self.size]

    def add(self, z: np.ndarray, parent: int) -> int:
        if not 0 <= parent < self.size:
            raise ValueError(f"parent index {parent} out of range for tree of size {self.size}")
        z = np.asarray(z, dtype=float)
        if self.size == self._pts.shape[0]:
            grown = np.empty((2 * self._pts.shape[0], self.dimension))
            grown[: self.size] = self._pts[: self.size]
            self._pts = grown
        idx = self.size
        self._pts[idx] = z
        self.size += 1
        w = z - self._pts[parent]
        ec = math.sqrt(float(w @ w))
        self.parent.append(parent)
        self.edge_cost.append(ec)
        self.cost.append(self.cost[parent] + ec)
        self.children.append([])
        self.children[parent].append(idx)
        if self.size - self._kd_size >= _REBUILD_TAIL:
            # cheap unbalanced build: the tail scan keeps queries exact, so
            # rebuild cost should stay a negligible slice of per-insert work
            self._kd = cKDTree(self._pts[: self.size].copy(),
                               balanced_tree=False, compact_nodes=False)
            self._kd_size = self.size
        return idx

    # -- queries ---------------------------------------------------------

    def nearest_vertex(self, z: np.ndarray) -> int:
        """Index of the vertex closest to z; ties go to the lowest index."""
        if self.size == 0:
            raise ValueError("tree is empty")
        z = np.asarray(z, dtype=float)
        best_d = math.inf
        best_i = -1
        if self._kd is not None:
            d_kd, i_kd = self._kd.query(z)
            best_d, best_i = float(d_kd), int(i_kd)
        tail = self._pts[self._kd_size : self.size]
        if tail.shape[0]:
            dw = tail - z
            dt = np.sqrt((dw * dw).sum(axis=1))
            j = int(np.argmin(dt))
            if dt[j] < best_d or (dt[j] == best_d and self._kd_size + j < best_i):
                best_d, best_i = float(dt[j]), self._kd_size + j
        if self._kd is not None:
            # enforce lowest-index tie-breaking inside the kd-tree part too
            ties = self._kd.query_ball_point(z, best_d)
            if ties:
                cand = min(ties)
                if cand < best_i and float(np.linalg.norm(self._pts[cand] - z)) <= best_d:
                    best_i = cand
        return best_i

    def neighboring_vertices(self, z: np.ndarray, radius: float) -> np.ndarray:
        """Sorted indices of all vertices within the closed ball of ``radius``."""
        z = np.asarray(z, dtype=float)
        idx: list[int] = []
        if self._kd is not None:
            idx.extend(self._kd.query_ball_point(z, radius))
        tail = self._pts[self._kd_size : self.size]
        if tail.shape[0]:
            dw = tail - z
            dt = (dw * dw).sum(axis=1)
            idx.extend((np.nonzero(dt <= radius * radius)[0] + self._kd_size).tolist())
        return np.array(sorted(idx), dtype=int)

    def list_sorting(self, z: np.ndarray, near: np.ndarray) -> CandidateList:
        """Candidate parents sorted ascending by cost-through-candidate.

        Collision status is not evaluated here; feasibility is deferred to
        ``pick_best_parent``.
        """
        z = np.asarray(z, dtype=float)
        near = np.asarray(near, dtype=int)
        if near.shape[0] == 0:
            return CandidateList(z, near, np.empty(0))
        diff = self._pts[near] - z
        link = np.sqrt((diff * diff).sum(axis=1))
        total = np.array([self.cost[v] for v in near]) + link
        order = np.lexsort((near, total))
        return CandidateList(z, near[order], total[order])

    def pick_best_parent(self, env, cand: CandidateList, resolution: float) -> int | None:
        """First candidate (lowest total cost) with a collision-free edge to the query."""
        for idx in cand.vertices:
            if env.segment_free(self._pts[idx], cand.query, resolution):
                return int(idx)
        return None

    # -- mutation --------------------------------------------------------

    def rewire(self, env, new_idx: int, near: np.ndarray, resolution: float) -> int:
        """Reparent near vertices through ``new_idx`` on strict cost improvement.

        Cost decreases are propagated depth-first through each reparented
        vertex's descendants. Returns the number of reparent operations.
        Every vertex whose cost changed is listed in ``last_cost_changes``
        so callers can refresh cached bests without a full rescan.
        """
        near = np.asarray(near, dtype=int)
        count = 0
        self.last_cost_changes = []
        z_new = self._pts[new_idx]
        if near.shape[0] == 0:
            return 0
        diff = self._pts[near] - z_new
        links = np.sqrt((diff * diff).sum(axis=1))
        old_costs = np.array([self.cost[v] for v in near])
        improvable = near[self.cost[new_idx] + links < old_costs - _REWIRE_TOL]
        for v in improvable:
            v = int(v)
            if v == new_idx or v == 0:
                continue
            wv = z_new - self._pts[v]
            link = math.sqrt(float(wv @ wv))
            new_cost = self.cost[new_idx] + link
            # recheck: an earlier rewire in this pass may have lowered v's cost
            if new_cost < self.cost[v] - _REWIRE_TOL and env.segment_free(
                z_new, self._pts[v], resolution
            ):
                old_parent = self.parent[v]
                self.children[old_parent].remove(v)
                self.parent[v] = new_idx
                self.children[new_idx].append(v)
                self.edge_cost[v] = link
                delta = new_cost - self.cost[v]
                stack = [v]
                while stack:
                    u = stack.pop()
                    self.cost[u] += delta
                    self.last_cost_changes.append(u)
                    stack.extend(self.children[u])
                count += 1
        return count

    # -- paths and audits ------------------------------------------------

    def extract_path(self, idx: int) -> np.ndarray:
        """Root-to-vertex point sequence as an (m, d) array."""
        if not 0 <= idx < self.size:
            raise ValueError(f"vertex index {idx} out of range")
        chain = []
        while idx != -1:
            chain.append(idx)
            idx = self.parent[idx]
        chain.reverse()
        return self._pts[np.array(chain, dtype=int)].copy()

    def audit(self, env=None, resolution: float = 0.05) -> list[str]:
        """Full structural check; returns a list of violation descriptions."""
        problems = []
        seen_root = 0
        for v in range(self.size):
            p = self.parent[v]
            if p == -1:
                seen_root += 1
                if self.cost[v] != 0.0:
                    problems.append(f"root vertex {v} has nonzero cost {self.cost[v]}")
                continue
            expected_edge = float(np.linalg.norm(self._pts[v] - self._pts[p]))
            if abs(self.edge_cost[v] - expected_edge) > _COST_TOL:
                problems.append(f"vertex {v}: edge_cost {self.edge_cost[v]} != {expected_edge}")
            if abs(self.cost[v] - (self.cost[p] + self.edge_cost[v])) > _COST_TOL:
                problems.append(f"vertex {v}: cost recursion violated")
            if env is not None and not env.segment_free(self._pts[p], self._pts[v], resolution):
                problems.append(f"vertex {v}: edge to parent {p} is not collision-free")
        if seen_root != 1:
            problems.append(f"tree has {seen_root} roots, expected exactly 1")
        # acyclicity / reachability from the root via children lists
        reached = 0
        stack = [0]
        visited = [False] * self.size
        while stack:
            u = stack.pop()
            if visited[u]:
                problems.append(f"cycle detected at vertex {u}")
                return problems
            visited[u] = True
            reached += 1
            stack.extend(self.children[u])
        if reached != self.size:
            problems.append(f"only {reached} of {self.size} vertices reachable from root")
        return problems

    def dump(self) -> str:
        """Debug/rendering dump: one line per vertex, ``id,parent_id,coords...,cost``."""
        lines = []
        for v in range(self.size):
            coords = ",".join(repr(float(c)) for c in self._pts[v])
            lines.append(f"{v},{self.parent[v]},{coords},{self.cost[v]!r}")
        return "\n".join(lines) + "\n"
