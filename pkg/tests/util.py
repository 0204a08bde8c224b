"""Shared test helpers: independent brute-force oracles kept deliberately
separate from the package implementations they check."""

import math

from birrap.model import Evaluation


def brute_nondominated(points) -> list[int]:
    """O(n^2) all-pairs dominance scan (maximize first, minimize second)."""
    pts = [(float(a), float(b)) for a, b in points]
    keep = []
    for i, (fr_i, fc_i) in enumerate(pts):
        dominated = False
        for j, (fr_j, fc_j) in enumerate(pts):
            if j == i:
                continue
            if fr_j >= fr_i and fc_j <= fc_i and (fr_j > fr_i or fc_j < fc_i):
                dominated = True
                break
        if not dominated:
            keep.append(i)
    return keep


def eq13_crowding(front) -> list[float]:
    """Naive per-point recomputation of the crowding formula."""
    pts = [tuple(float(v) for v in p) for p in front]
    m = len(pts)
    if m == 1:
        return [math.inf]
    n_obj = len(pts[0])
    out = []
    for k in range(m):
        total = 0.0
        unbounded = False
        for i in range(n_obj):
            vals = [p[i] for p in pts]
            vmin, vmax = min(vals), max(vals)
            if vmax == vmin:
                continue
            v = pts[k][i]
            smaller = [u for u in vals if u < v]
            larger = [u for u in vals if u > v]
            if not smaller or not larger:
                unbounded = True
                break
            total += ((v - max(smaller)) / (vmax - vmin)) ** 2
            total += ((min(larger) - v) / (vmax - vmin)) ** 2
        out.append(math.inf if unbounded else math.sqrt(total))
    return out


def naive_gd_sp(front, reference) -> tuple[float, float]:
    """Independent loop-based recomputation of the two front indicators."""
    d = []
    for fr, fc in front:
        d.append(min(math.hypot(fr - pr, fc - pc) for pr, pc in reference))
    n = len(d)
    gd = math.sqrt(sum(x * x for x in d)) / n
    dbar = sum(d) / n
    sp = math.sqrt(sum((dbar - x) ** 2 for x in d) / (n - 1)) if n >= 2 else math.nan
    return gd, sp


def make_eval(f_r, f_c, feasible=True, r_s=0.9, g_v=10.0, g_c=100.0, g_w=50.0):
    """Fabricate an Evaluation with a chosen objective pair."""
    qualified = f_r >= 0.1 and f_c <= 100_000.0
    return Evaluation(r_s, g_v, g_c, g_w, float(f_r), float(f_c), feasible, qualified)
