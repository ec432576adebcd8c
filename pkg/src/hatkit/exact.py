"""Exact arithmetic over Q(sqrt3) and the planar points built from it.

Everything geometric in this package bottoms out in numbers of the form
a + b*sqrt(3) with rational a, b.  Grid vertices actually live on the
half-integer lattice (m + n*sqrt(3))/2, but intermediate quantities
(areas, dot products) need full rational coefficients, so QS3 stores two
Fractions and the half-integer view is just an accessor used at the
serialization boundary.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


class QS3:
    """A number a + b*sqrt(3), a and b rational.  Immutable."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))

    def __setattr__(self, *_):
        raise AttributeError("QS3 is immutable")

    @classmethod
    def from_halves(cls, m, n):
        """Build (m + n*sqrt(3))/2 from the integer pair (m, n)."""
        return cls(Fraction(m, 2), Fraction(n, 2))

    def halves(self):
        """Return (m, n) with self == (m + n*sqrt(3))/2, or raise if off-lattice."""
        m, n = 2 * self.a, 2 * self.b
        if m.denominator != 1 or n.denominator != 1:
            raise ValueError(f"{self!r} is not on the half-integer lattice")
        return int(m), int(n)

    def __add__(self, o):
        o = _coerce(o)
        return QS3(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = _coerce(o)
        return QS3(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return _coerce(o) - self

    def __neg__(self):
        return QS3(-self.a, -self.b)

    def __mul__(self, o):
        o = _coerce(o)
        return QS3(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _coerce(o)
        # multiply by the conjugate; norm = a^2 - 3 b^2 is nonzero unless o == 0
        norm = o.a * o.a - 3 * o.b * o.b
        if norm == 0:
            raise ZeroDivisionError("division by zero in QS3")
        inv = QS3(o.a / norm, -o.b / norm)
        return self * inv

    def conj(self):
        return QS3(self.a, -self.b)

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            o = QS3(o)
        if not isinstance(o, QS3):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def sign(self):
        """Exact sign of the real value a + b*sqrt(3)."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with 3 b^2, sign follows the larger term
        big_a = a * a > 3 * b * b
        if a > 0:
            return 1 if big_a else -1
        return -1 if big_a else 1

    def __lt__(self, o):
        return (self - _coerce(o)).sign() < 0

    def __le__(self, o):
        return (self - _coerce(o)).sign() <= 0

    def __gt__(self, o):
        return (self - _coerce(o)).sign() > 0

    def __ge__(self, o):
        return (self - _coerce(o)).sign() >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * 1.7320508075688772

    def __repr__(self):
        return f"QS3({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}√3"
        return f"{self.a}{'+' if self.b > 0 else ''}{self.b}√3"


def _coerce(x):
    if isinstance(x, QS3):
        return x
    if isinstance(x, (int, Fraction)):
        return QS3(x)
    raise TypeError(f"cannot coerce {type(x).__name__} into QS3")


ZERO = QS3(0)
ONE = QS3(1)
SQRT3 = QS3(0, 1)
HALF = QS3(Fraction(1, 2))


class V2:
    """An exact point/vector of the plane with QS3 coordinates."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        object.__setattr__(self, "x", _coerce(x))
        object.__setattr__(self, "y", _coerce(y))

    def __setattr__(self, *_):
        raise AttributeError("V2 is immutable")

    def __add__(self, o):
        return V2(self.x + o.x, self.y + o.y)

    def __sub__(self, o):
        return V2(self.x - o.x, self.y - o.y)

    def __neg__(self):
        return V2(-self.x, -self.y)

    def scale(self, s):
        return V2(self.x * s, self.y * s)

    def dot(self, o):
        return self.x * o.x + self.y * o.y

    def cross(self, o):
        return self.x * o.y - self.y * o.x

    def rot60(self, n=1):
        """Rotate counterclockwise by n * 60 degrees about the origin."""
        v = self
        c, s = HALF, QS3(0, Fraction(1, 2))  # cos 60, sin 60
        for _ in range(n % 6):
            v = V2(v.x * c - v.y * s, v.x * s + v.y * c)
        return v

    def mirror_x(self):
        """Reflect across the x-axis."""
        return V2(self.x, -self.y)

    def __eq__(self, o):
        return isinstance(o, V2) and self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        return f"V2({self.x}, {self.y})"

    def approx(self):
        return (float(self.x), float(self.y))


V2_ZERO = V2(ZERO, ZERO)

# cos/sin of multiples of 30 degrees, as QS3
_COS30 = (
    ONE, QS3(0, Fraction(1, 2)), HALF, ZERO, -HALF, QS3(0, Fraction(-1, 2)),
    -ONE, QS3(0, Fraction(-1, 2)), -HALF, ZERO, HALF, QS3(0, Fraction(1, 2)),
)


@lru_cache(maxsize=None)
def unit_dir(d):
    """Unit vector at angle d * 30 degrees (d taken mod 12)."""
    d = d % 12
    return V2(_COS30[d], _COS30[(d - 3) % 12])


class ExactPoint:
    """A plane point a*(xa, ya) + b*(xb, yb) for symbolic side lengths a, b.

    The a-part collects displacements along unit sides of the kite grid and
    the b-part along the sqrt(3) sides (stored divided by sqrt(3), so both
    parts are unit-scaled).  Evaluating at (a, b) = (1, sqrt(3)) recovers the
    ordinary grid coordinates; other (a, b) give the deformed tile family.
    """

    __slots__ = ("ap", "bp")

    def __init__(self, ap: V2, bp: V2):
        object.__setattr__(self, "ap", ap)
        object.__setattr__(self, "bp", bp)

    def __setattr__(self, *_):
        raise AttributeError("ExactPoint is immutable")

    @property
    def xa(self):
        return self.ap.x

    @property
    def ya(self):
        return self.ap.y

    @property
    def xb(self):
        return self.bp.x

    @property
    def yb(self):
        return self.bp.y

    def __add__(self, o):
        return ExactPoint(self.ap + o.ap, self.bp + o.bp)

    def __sub__(self, o):
        return ExactPoint(self.ap - o.ap, self.bp - o.bp)

    def __neg__(self):
        return ExactPoint(-self.ap, -self.bp)

    def rot60(self, n=1):
        return ExactPoint(self.ap.rot60(n), self.bp.rot60(n))

    def mirror_x(self):
        return ExactPoint(self.ap.mirror_x(), self.bp.mirror_x())

    def at(self, a, b):
        """Numeric evaluation at side lengths (a, b); returns float pair."""
        xa, ya = self.ap.approx()
        xb, yb = self.bp.approx()
        return (a * xa + b * xb, a * ya + b * yb)

    def eval_exact(self, a: QS3, b: QS3) -> V2:
        """Exact evaluation at QS3 side lengths (a, b)."""
        return V2(a * self.ap.x + b * self.bp.x, a * self.ap.y + b * self.bp.y)

    def at_hat(self) -> V2:
        """Exact grid coordinates, i.e. evaluation at (1, sqrt(3))."""
        return self.eval_exact(ONE, SQRT3)

    def __eq__(self, o):
        return isinstance(o, ExactPoint) and self.ap == o.ap and self.bp == o.bp

    def __hash__(self):
        return hash((self.ap, self.bp))

    def __repr__(self):
        return f"ExactPoint(a*{self.ap!r} + b*{self.bp!r})"


EP_ZERO = ExactPoint(V2_ZERO, V2_ZERO)
