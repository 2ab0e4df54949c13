from fractions import Fraction

from landaukit.kinematics import FourVector
from landaukit.symbolic import Poly, p_vector
from landaukit.symbolic.poly import const_vector


def side_vector(tp, s):
    """``p_s`` as a polynomial vector: the free ``p`` plus the constant offset."""
    return p_vector() + const_vector(tp.offset(s))


def vec_eq(a, b):
    return all(Poly.lift(x) == Poly.lift(y) for x, y in zip(a, b))


def fv(*xs):
    return FourVector(*(Fraction(x) for x in xs))
