"""Discrete coordinates and symmetry algebra for the kite grid.

The plane is tiled by hexagons of side 2, each cut into six kites around
its center.  Hexagon centers sit at q*(3, sqrt3) + r*(0, 2*sqrt3) for
integer axial coordinates (q, r); kite k of a hexagon is the quadrilateral
(center, M_{k-1}, V_k, M_k) where V_j is the hexagon vertex at angle 60*j
degrees and M_j the edge midpoint at angle 30 + 60*j.  Kite sides come in
two kinds: the two center-to-midpoint sides of length sqrt(3) and the two
midpoint-to-vertex sides of length 1.

Isometries are (rotation by 60*rot degrees) o (optional reflection across
the x-axis, which passes through the apex of kite 0) followed by a hexagon
lattice translation.  The reflection is applied before the rotation.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

from .exact import EP_ZERO, ExactPoint, QS3, V2, V2_ZERO, unit_dir


class HexVec(NamedTuple):
    q: int
    r: int

    def __add__(self, o):
        return HexVec(self.q + o.q, self.r + o.r)

    def __sub__(self, o):
        return HexVec(self.q - o.q, self.r - o.r)

    def __neg__(self):
        return HexVec(-self.q, -self.r)

    def rot60(self, n=1):
        q, r = self
        for _ in range(n % 6):
            q, r = -r, q + r
        return HexVec(q, r)

    def mirror_x(self):
        return HexVec(self.q, -self.q - self.r)

    def cart(self) -> V2:
        """Cartesian center of the hexagon at this axial position."""
        # basis vectors: (3, sqrt3) and (0, 2*sqrt3)
        return V2(QS3(3 * self.q), QS3(0, self.q + 2 * self.r))

    def bpart(self) -> V2:
        """Cartesian center divided by sqrt(3) (the pure b-part of the center)."""
        return V2(QS3(0, self.q), QS3(self.q + 2 * self.r))


HEX_ORIGIN = HexVec(0, 0)

# Neighbour directions: hexagon adjacent across the edge whose midpoint is M_d.
HEX_DIRS = (
    HexVec(1, 0), HexVec(0, 1), HexVec(-1, 1),
    HexVec(-1, 0), HexVec(0, -1), HexVec(1, -1),
)


class KiteCoord(NamedTuple):
    hex: HexVec
    k: int

    def translate(self, t: HexVec):
        return KiteCoord(self.hex + t, self.k)


class Isometry(NamedTuple):
    rot: int
    reflected: bool
    t: HexVec

    def __repr__(self):
        return f"Iso(rot={self.rot}, refl={int(self.reflected)}, t=({self.t.q},{self.t.r}))"


IDENTITY = Isometry(0, False, HEX_ORIGIN)


def apply_hex(g: Isometry, h: HexVec) -> HexVec:
    if g.reflected:
        h = h.mirror_x()
    return h.rot60(g.rot) + g.t


def apply(g: Isometry, c: KiteCoord) -> KiteCoord:
    """Act on a kite coordinate: reflect, then rotate, then translate."""
    k = c.k
    if g.reflected:
        k = -k
    return KiteCoord(apply_hex(g, c.hex), (k + g.rot) % 6)


def compose(g: Isometry, h: Isometry) -> Isometry:
    """The isometry 'g after h'."""
    rot = (g.rot + (-h.rot if g.reflected else h.rot)) % 6
    return Isometry(rot, g.reflected ^ h.reflected, apply_hex(g, h.t))


def invert(g: Isometry) -> Isometry:
    rot = g.rot if g.reflected else (-g.rot) % 6
    lin = Isometry(rot, g.reflected, HEX_ORIGIN)
    return Isometry(rot, g.reflected, apply_hex(lin, -g.t))


def kite_neighbours(c: KiteCoord):
    """The four kites sharing an edge with c, in a fixed order.

    Order: across the two long sides (within the hexagon), then across the
    two short sides (into adjacent hexagons).
    """
    h, k = c
    return (
        KiteCoord(h, (k - 1) % 6),
        KiteCoord(h, (k + 1) % 6),
        KiteCoord(h + HEX_DIRS[(k - 1) % 6], (k + 2) % 6),
        KiteCoord(h + HEX_DIRS[k], (k + 4) % 6),
    )


@lru_cache(maxsize=None)
def _kite_corner_offsets(k):
    # corners of kite k of the hexagon at the origin, as ExactPoints
    o = EP_ZERO
    m_prev = ExactPoint(V2_ZERO, unit_dir(2 * k - 1))
    v = ExactPoint(unit_dir(2 * k + 2), unit_dir(2 * k - 1))
    m = ExactPoint(V2_ZERO, unit_dir(2 * k + 1))
    return (o, m_prev, v, m)


def kite_vertices(c: KiteCoord):
    """Corner points of kite c, counterclockwise: center, M_{k-1}, V_k, M_k.

    Returned as ExactPoints; hexagon vertices are split into a unit-side
    step (a-part) from their predecessor midpoint plus the midpoint's b-part.
    The split is a fixed convention; evaluation at (1, sqrt3) is exact grid
    geometry regardless.
    """
    shift = ExactPoint(V2_ZERO, c.hex.bpart())
    return tuple(p + shift for p in _kite_corner_offsets(c.k % 6))


# side kind tags: 'a' = unit side, 'b' = sqrt(3) side
KITE_SIDE_KINDS = ("b", "a", "a", "b")


def kite_sides(c: KiteCoord):
    """The four directed sides of kite c, CCW, as ((start, end), kind)."""
    vs = kite_vertices(c)
    return tuple(
        ((vs[i], vs[(i + 1) % 4]), KITE_SIDE_KINDS[i]) for i in range(4)
    )


def planar_apply(g: Isometry, p: ExactPoint) -> ExactPoint:
    """Apply a grid isometry to an exact point (both (a,b)-parts transform)."""
    if g.reflected:
        p = p.mirror_x()
    p = p.rot60(g.rot)
    return ExactPoint(p.ap, p.bp + g.t.bpart())


@lru_cache(maxsize=None)
def _vertex_key_cache(c: KiteCoord):
    keys = []
    for p in kite_vertices(c):
        v = p.at_hat()
        mx, nx = v.x.halves()
        my, ny = v.y.halves()
        keys.append((mx, nx, my, ny))
    return tuple(keys)


def kite_vertex_keys(c: KiteCoord):
    """Corner coordinates as hashable integer 4-tuples (for fast set logic)."""
    return _vertex_key_cache(c)


def point_group():
    """The twelve isometries fixing the origin hexagon's center."""
    return [Isometry(r, refl, HEX_ORIGIN) for refl in (False, True) for r in range(6)]
