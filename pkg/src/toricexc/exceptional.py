"""Exceptional collections of line bundles: checking and windowed search."""
from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .cohomology import ForbiddenData, forbidden_index_sets, forbidden_membership, ForbiddenSet
from .errors import TorsionNotSupported
from .fan import StackyFan, rank_k0


class MembershipOracle:
    """Forbidden-set membership for differences of line bundles.

    ``fast`` maps labels to closed-form predicates; when absent, integer
    feasibility on the fibers is used.
    Results are cached per difference vector.
    """

    def __init__(self, fan: StackyFan, data: ForbiddenData | None = None, fast: dict | None = None):
        if fan.has_torsion:
            raise TorsionNotSupported("collection search runs on torsion-free Picard groups")
        self.fan = fan
        self.data = data or forbidden_index_sets(fan)
        self.sets = [ForbiddenSet(fan, tuple(I), label) for label, I in self.data.sets]
        self.fast = fast
        self._cache: dict = {}

    def labels(self, d) -> frozenset:
        d = tuple(int(x) for x in d)
        hit = self._cache.get(d)
        if hit is None:
            if self.fast is not None:
                hit = frozenset(lab for lab, f in self.fast.items() if f(*d))
            else:
                hit = frozenset(K.label for K in self.sets if forbidden_membership(K, d))
            self._cache[d] = hit
        return hit

    def in_all(self, d) -> bool:
        return bool(self.labels(d))

    def in_bad(self, d) -> bool:
        return any(lab != "eff" for lab in self.labels(d))

    def in_eff(self, d) -> bool:
        return "eff" in self.labels(d)


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


@dataclass
class ExceptionalVerdict:
    ok: bool
    violation: tuple | None = None     # (i, j, labels)
    checked_pairs: int = 0


def is_exceptional(fan: StackyFan, bundles, oracle: MembershipOracle | None = None) -> ExceptionalVerdict:
    """``L_i - L_j`` avoids every forbidden set for all ``i < j``."""
    oracle = oracle or MembershipOracle(fan)
    L = [tuple(b) for b in bundles]
    count = 0
    for i in range(len(L)):
        for j in range(i + 1, len(L)):
            count += 1
            hit = oracle.labels(_sub(L[i], L[j]))
            if hit:
                return ExceptionalVerdict(False, (i, j, sorted(hit)), count)
    return ExceptionalVerdict(True, None, count)


def is_strong_exceptional(fan: StackyFan, bundles, oracle: MembershipOracle | None = None) -> ExceptionalVerdict:
    """Exceptional and, for ``i < j``, ``H^{>0}(L_j - L_i) = 0`` as well."""
    oracle = oracle or MembershipOracle(fan)
    v = is_exceptional(fan, bundles, oracle)
    if not v.ok:
        return v
    L = [tuple(b) for b in bundles]
    count = v.checked_pairs
    for i in range(len(L)):
        for j in range(i + 1, len(L)):
            count += 1
            if oracle.in_bad(_sub(L[j], L[i])):
                return ExceptionalVerdict(False, (j, i, sorted(oracle.labels(_sub(L[j], L[i])))), count)
    return ExceptionalVerdict(True, None, count)


# --- windowed search -----------------------------------------------------------


@dataclass
class SearchResult:
    collection: list
    flag: str                     # "exact" or "lower_bound"
    nodes: int
    upper_bound: int | None = None
    stats: dict = field(default_factory=dict)


def parse_window(text: str) -> list[tuple[int, int]]:
    """``"x0..x1,y0..y1,z0..z1"`` into integer ranges."""
    out = []
    for part in text.split(","):
        lo, hi = part.split("..")
        out.append((int(lo), int(hi)))
    return out


def _bits(mask_array) -> int:
    packed = np.packbits(mask_array.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _iter_bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def max_exceptional_search(
    fan: StackyFan,
    window,
    budget: int = 10**6,
    oracle: MembershipOracle | None = None,
    slab: dict | None = None,
    seed: list | None = None,
) -> SearchResult:
    """Largest exceptional collection inside a box of ``Pic``.

    Branch and bound over candidate sets: two bundles can coexist when at
    least one order is admissible; a set is admissible when the forced
    orders are acyclic.  ``slab`` (``{"axis", "amplitude", "z_fixed"}``)
    adds the slab bounds on one coordinate.  Classes of an exceptional
    collection are independent in ``K0``, so reaching ``rk K0`` ends the
    search with an exact answer.
    """
    oracle = oracle or MembershipOracle(fan)
    ceiling = rank_k0(fan)
    ranges = [range(lo, hi + 1) for lo, hi in window]
    if len(ranges) != fan.picard_rank:
        raise ValueError("window dimension must equal the Picard rank")
    pts = np.array(list(product(*ranges)), dtype=np.int64).reshape(-1, len(ranges))
    n = len(pts)
    # admissibility of "u before v" depends on u - v only
    spans = [hi - lo for lo, hi in window]
    shape = tuple(2 * s + 1 for s in spans)
    ok_before = np.zeros(shape, dtype=bool)
    for d in product(*[range(-s, s + 1) for s in spans]):
        idx = tuple(x + s for x, s in zip(d, spans))
        ok_before[idx] = not oracle.in_all(d)
    offs = np.array(spans, dtype=np.int64)
    before = []   # before[u]: v such that u before v is fine
    after = []    # after[u]: v such that v before u is fine
    for u in range(n):
        diff = pts[u] - pts + offs
        b = ok_before[tuple(diff.T)]
        diff2 = pts - pts[u] + offs
        a = ok_before[tuple(diff2.T)]
        before.append(_bits(b))
        after.append(_bits(a))
    adj = [before[u] | after[u] for u in range(n)]
    for u in range(n):
        adj[u] &= ~(1 << u)
    must_before = [before[u] & ~after[u] for u in range(n)]   # u must precede these

    slab_axis = slab["axis"] if slab else None
    zvals = pts[:, slab_axis] if slab else None

    state = {"nodes": 0, "best": [], "exhausted": True, "done": False}
    t0 = time.perf_counter()

    def acyclic_add(S, order_mask, v):
        """Forced relations remain acyclic after adding ``v`` to ``S``."""
        preds = 0
        succs = must_before[v] & order_mask
        for u in S:
            if must_before[u] >> v & 1:
                preds |= 1 << u
        if preds & succs:
            return False
        # propagate reachability from successors within S
        frontier, seen = succs, succs
        while frontier:
            nxt = 0
            for u in _iter_bits(frontier):
                nxt |= must_before[u] & order_mask
            nxt &= ~seen
            if nxt & preds:
                return False
            seen |= nxt
            frontier = nxt
        return not (seen & preds)

    def color_bound(P):
        colors = 0
        uncolored = P
        while uncolored:
            colors += 1
            avail = uncolored
            while avail:
                v = (avail & -avail).bit_length() - 1
                uncolored &= ~(1 << v)
                avail &= ~(1 << v) & ~adj[v]
        return colors

    def slab_bound(S, P):
        if not slab:
            return None
        amp, zf = slab["amplitude"], slab["z_fixed"]
        counts: dict = {}
        for u in S:
            counts[zvals[u]] = counts.get(zvals[u], 0) + 1
        cand: dict = {}
        for u in _iter_bits(P):
            cand[zvals[u]] = cand.get(zvals[u], 0) + 1
        zs = sorted(set(counts) | set(cand))
        if not zs:
            return len(S)
        best = 0
        zmin_s = min(counts) if counts else None
        zmax_s = max(counts) if counts else None
        for z0 in zs:
            z1 = z0 + amp
            if counts and (zmin_s < z0 or zmax_s > z1):
                continue
            tot = 0
            for z in zs:
                if z0 <= z <= z1:
                    tot += min(zf, counts.get(z, 0) + cand.get(z, 0))
            best = max(best, tot)
        return best

    def expand(S, order_mask, P):
        state["nodes"] += 1
        if state["nodes"] > budget:
            state["exhausted"] = False
            return
        if len(S) > len(state["best"]):
            state["best"] = list(S)
            if len(S) >= ceiling:
                state["done"] = True
                return
        if not P:
            return
        size = bin(P).count("1")
        bound = len(S) + size
        if bound <= len(state["best"]):
            return
        if size <= 600:
            bound = min(bound, len(S) + color_bound(P))
        sb = slab_bound(S, P)
        if sb is not None:
            bound = min(bound, sb)
        if bound <= len(state["best"]):
            return
        while P:
            if len(S) + bin(P).count("1") <= len(state["best"]):
                return
            v = (P & -P).bit_length() - 1
            P &= ~(1 << v)
            if not acyclic_add(S, order_mask, v):
                continue
            newP = P & adj[v]
            if slab:
                amp = slab["amplitude"]
                zs = [zvals[u] for u in S] + [zvals[v]]
                lo, hi = max(zs) - amp, min(zs) + amp
                keep = 0
                for u in _iter_bits(newP):
                    if lo <= zvals[u] <= hi:
                        keep |= 1 << u
                newP = keep
            S.append(v)
            expand(S, order_mask | (1 << v), newP)
            S.pop()
            if state["done"] or not state["exhausted"]:
                return

    if seed:
        index = {tuple(int(x) for x in p): i for i, p in enumerate(pts)}
        seed_idx = [index[tuple(s)] for s in seed if tuple(s) in index]
        state["best"] = seed_idx
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10000))
    try:
        expand([], 0, (1 << n) - 1)
    finally:
        sys.setrecursionlimit(old)
    chosen = state["best"]
    ordered = _topological(chosen, must_before, pts)
    flag = "exact" if state["exhausted"] or len(chosen) >= ceiling else "lower_bound"
    return SearchResult(
        [tuple(int(x) for x in pts[i]) for i in ordered],
        flag,
        state["nodes"],
        upper_bound=ceiling,
        stats={"candidates": n, "seconds": time.perf_counter() - t0},
    )


def _topological(chosen, must_before, pts):
    remaining = list(chosen)
    out = []
    while remaining:
        # a vertex none of the remaining ones must precede
        for u in sorted(remaining, key=lambda i: tuple(pts[i])):
            if not any(must_before[w] >> u & 1 for w in remaining if w != u):
                out.append(u)
                remaining.remove(u)
                break
        else:
            raise AssertionError("forced order has a cycle")
    return out
