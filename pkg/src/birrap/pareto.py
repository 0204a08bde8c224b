"""Dominance relations, crowding distance, and the capacity-bounded
nondominated archive shared by every solver.

Objective pairs are (f_r, f_c) with f_r maximized and f_c minimized
throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Evaluation


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True when a strictly dominates b (a no worse in both, better in one)."""
    fr_a, fc_a = a
    fr_b, fc_b = b
    return fr_a >= fr_b and fc_a <= fc_b and (fr_a > fr_b or fc_a < fc_b)


def nondominated_filter(points) -> list[int]:
    """Indices of all points not dominated by any other point.

    Duplicate objective pairs are all retained (identity never strictly
    dominates). The returned index list is sorted; as a set it does not
    depend on input order. O(n log n) sweep over the f_c-sorted points.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("expected an (n, 2) array of (f_r, f_c) pairs")
    m = len(pts)
    if m == 0:
        return []
    fr = pts[:, 0]
    fc = pts[:, 1]
    order = np.lexsort((-fr, fc))  # f_c ascending, f_r descending within ties
    fr_s = fr[order]
    fc_s = fc[order]
    # group indices by distinct f_c value
    starts = np.flatnonzero(np.r_[True, fc_s[1:] != fc_s[:-1]])
    group_of = np.cumsum(np.r_[True, fc_s[1:] != fc_s[:-1]]) - 1
    group_max = np.maximum.reduceat(fr_s, starts)
    # best f_r among groups with strictly smaller f_c
    before = np.empty(len(starts))
    before[0] = -np.inf
    if len(starts) > 1:
        before[1:] = np.maximum.accumulate(group_max)[:-1]
    dominated = (before[group_of] >= fr_s) | (group_max[group_of] > fr_s)
    return sorted(order[~dominated].tolist())


def crowding_distance(front) -> np.ndarray:
    """Crowding distance of each point of a mutually nondominated front.

    Per objective, a point's neighbors are the nearest strictly smaller and
    strictly larger values across the whole front; each contributes its
    range-normalized squared gap, and the distance is the square root of the
    total. A point missing a neighbor on either side of a non-degenerate
    objective gets +inf; a degenerate objective (max == min) contributes 0.
    A single-point front is +inf by convention.
    """
    F = np.atleast_2d(np.asarray(front, dtype=float))
    m, n_obj = F.shape
    if m == 0:
        return np.empty(0)
    if m == 1:
        return np.array([math.inf])
    total = np.zeros(m)
    boundary = np.zeros(m, dtype=bool)
    for i in range(n_obj):
        v = F[:, i]
        vmin = v.min()
        vmax = v.max()
        if vmax == vmin:
            continue
        span = vmax - vmin
        uniq = np.unique(v)
        pos = np.searchsorted(uniq, v)
        no_lower = pos == 0
        no_upper = pos == len(uniq) - 1
        boundary |= no_lower | no_upper
        inner = ~(no_lower | no_upper)
        lo = np.where(inner, uniq[np.maximum(pos - 1, 0)], 0.0)
        hi = np.where(inner, uniq[np.minimum(pos + 1, len(uniq) - 1)], 0.0)
        total += np.where(inner, ((v - lo) / span) ** 2 + ((hi - v) / span) ** 2, 0.0)
    out = np.sqrt(total)
    out[boundary] = math.inf
    return out


@dataclass
class ArchiveEntry:
    """One archived solution with its evaluation.

    solution is whatever carrier the owning solver uses (mixed genes for the
    swarm solvers, an (n, r) pair for the particle swarm baseline); the
    evaluation must be reproducible from it.
    """

    solution: object
    evaluation: Evaluation


def _solution_key(solution) -> tuple:
    """Hashable identity of a solution payload, for set-membership checks."""
    if isinstance(solution, np.ndarray):
        return tuple(solution.tolist())
    if isinstance(solution, (list, tuple)):
        return tuple(_solution_key(v) if isinstance(v, (list, tuple, np.ndarray)) else float(v) for v in solution)
    return (float(solution),)


class ParetoArchive:
    """Capacity-bounded set of mutually nondominated entries.

    insert() maintains mutual nondominance on every call; truncate()
    enforces the capacity bound by discarding minimum-crowding entries.
    Single-owner mutable structure: callers must not mutate it from
    multiple threads (the pure predicates above are freely reentrant).
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("archive capacity must be >= 1")
        self.capacity = capacity
        self.entries: list[ArchiveEntry] = []
        self._pairs: list[tuple[float, float]] = []  # cache of (f_r, f_c)
        self._keys: set[tuple] = set()  # current members, by solution identity

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def objectives(self) -> np.ndarray:
        return np.array(self._pairs, dtype=float).reshape(len(self._pairs), 2)

    def insert(self, entry: ArchiveEntry) -> bool:
        """Offer a candidate; returns True when it enters the archive.

        Membership is a set union over solutions: re-offering a solution
        already present leaves the archive unchanged. A new solution is
        rejected iff some existing entry strictly dominates it; on
        acceptance every entry it strictly dominates is removed. Distinct
        solutions with equal objective pairs are admitted.
        """
        key = _solution_key(entry.solution)
        if key in self._keys:
            return False
        fr = entry.evaluation.f_r
        fc = entry.evaluation.f_c
        pairs = self._pairs
        for efr, efc in pairs:
            if efr >= fr and efc <= fc and (efr > fr or efc < fc):
                return False
        keep = [
            k
            for k, (efr, efc) in enumerate(pairs)
            if not (fr >= efr and fc <= efc and (fr > efr or fc < efc))
        ]
        if len(keep) != len(pairs):
            self.entries = [self.entries[k] for k in keep]
            self._pairs = [pairs[k] for k in keep]
            self._keys = {_solution_key(e.solution) for e in self.entries}
        self.entries.append(entry)
        self._pairs.append((fr, fc))
        self._keys.add(key)
        return True

    def truncate(self) -> int:
        """Drop down to capacity, keeping the largest crowding distances.

        Crowding is computed once over the current entries (batch). Ties
        break deterministically by higher f_r, then lower f_c, then
        insertion order. Returns the number of removed entries.
        """
        excess = len(self.entries) - self.capacity
        if excess <= 0:
            return 0
        d = crowding_distance(self._pairs)
        ranked = sorted(
            range(len(self.entries)),
            key=lambda k: (-d[k], -self._pairs[k][0], self._pairs[k][1], k),
        )
        keep = sorted(ranked[: self.capacity])
        self.entries = [self.entries[k] for k in keep]
        self._pairs = [self._pairs[k] for k in keep]
        self._keys = {_solution_key(e.solution) for e in self.entries}
        return excess
