"""Independent brute-force reference implementations used only by tests.

These deliberately avoid the library's incremental data structures and
pruning: everything is recomputed from definitions over a bounded window,
so agreement with the fast paths is meaningful.
"""

from hatkit.kitegrid import (
    HexVec,
    Isometry,
    KiteCoord,
    apply,
    kite_neighbours,
    kite_vertex_keys,
)
from hatkit.polykite import Polykite, transform_kites


def naive_candidate_neighbours(shape: Polykite, window=8):
    """Scan every isometry with |t| inside a window; keep touching non-overlaps."""
    base = shape.kites
    base_verts = set()
    for c in base:
        base_verts.update(kite_vertex_keys(c))
    out = {}
    for refl in (False, True):
        for rot in range(6):
            for q in range(-window, window + 1):
                for r in range(-window, window + 1):
                    iso = Isometry(rot, refl, HexVec(q, r))
                    placed = transform_kites(base, iso)
                    if placed & base:
                        continue
                    verts = set()
                    for c in placed:
                        verts.update(kite_vertex_keys(c))
                    if verts & base_verts:
                        key = frozenset(placed)
                        cur = out.get(key)
                        me = (refl, rot, q, r)
                        if cur is None or me < cur[0]:
                            out[key] = (me, iso)
    return sorted((iso for _, iso in out.values()), key=lambda g: (g.reflected, g.rot, g.t.q, g.t.r))


def naive_enumerate_1patches(shape, candidates, compatible):
    """All complete surrounds of shape by placements from `candidates`.

    `compatible(g, h)` decides whether two placed copies may coexist.  Pure
    depth-first over the target kites in a fixed arbitrary order; no
    choice-minimizing heuristic, no memoization.  Returns a set of
    frozensets of placed-tile kite-sets.
    """
    base = shape.kites
    targets = set()
    base_verts = set()
    for c in base:
        base_verts.update(kite_vertex_keys(c))
    # candidate target kites: anything sharing a vertex with the shape
    fringe_hexes = set()
    for c in base:
        fringe_hexes.add(c.hex)
        for n in kite_neighbours(c):
            fringe_hexes.add(n.hex)
    for h in set(fringe_hexes):
        for dq in (-1, 0, 1):
            for dr in (-1, 0, 1):
                fringe_hexes.add(HexVec(h.q + dq, h.r + dr))
    for h in fringe_hexes:
        for k in range(6):
            c = KiteCoord(h, k)
            if c in base:
                continue
            if any(v in base_verts for v in kite_vertex_keys(c)):
                targets.add(c)

    cand_list = list(candidates)
    cand_kites = [transform_kites(base, g) for g in cand_list]
    cover_index = {}
    for i, ks in enumerate(cand_kites):
        for c in ks:
            cover_index.setdefault(c, []).append(i)

    order = sorted(targets, key=lambda c: (c.hex.q, c.hex.r, c.k))
    results = set()

    def rec(placed_ids, covered):
        open_targets = [c for c in order if c not in covered]
        if not open_targets:
            results.add(frozenset(frozenset(cand_kites[i]) for i in placed_ids))
            return
        x = open_targets[0]
        for i in cover_index.get(x, ()):
            ks = cand_kites[i]
            if any(c in covered or c in base for c in ks):
                continue
            ok = True
            for j in placed_ids:
                if not compatible(cand_list[j], cand_list[i]):
                    ok = False
                    break
            if not ok:
                continue
            rec(placed_ids + [i], covered | ks)

    rec([], set())
    return results
