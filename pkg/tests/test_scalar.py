from fractions import Fraction as F

import pytest

from kerovlab import scalar as sc
from kerovlab.scalar import MixedRadicalError, Surd


def test_sqrt_rational_is_plain():
    assert sc.sqrt(F(9, 4)) == F(3, 2)
    assert isinstance(sc.sqrt(F(9, 4)), F)


def test_sqrt_canonical_radicand():
    x = Surd.sqrt(F(8, 3))
    assert x.s == 6 and x.c == F(2, 3)
    assert x.square() == F(8, 3)


def test_equal_radicands_add():
    a, b = Surd.sqrt(2), Surd.sqrt(8)
    assert a + b == Surd(3, 2)


def test_mixed_radicands_refuse_to_add():
    with pytest.raises(MixedRadicalError):
        Surd.sqrt(2) + Surd.sqrt(3)


def test_products_close():
    assert Surd.sqrt(2) * Surd.sqrt(3) == Surd(1, 6)
    assert Surd.sqrt(2) * Surd.sqrt(2) == 2


def test_negative_square_root_squares_back():
    i = Surd.sqrt(-3)
    assert i.square() == -3


def test_pochhammer_and_falling():
    assert sc.pochhammer(F(1, 2), 3) == F(1, 2) * F(3, 2) * F(5, 2)
    assert sc.falling(5, 3) == 60
    assert sc.falling(2, 3) == 0


def test_parse_number_modes():
    assert sc.parse_number("3/4") == F(3, 4)
    assert sc.parse_number("7") == F(7)
    assert isinstance(sc.parse_number("0.4"), float)


def test_format_exact():
    assert sc.format_exact(F(3, 4)) == "3/4"
    assert "sqrt" in sc.format_exact(Surd(2, 3))


def test_close_mixed_backends():
    assert sc.close(Surd.sqrt(2), 2 ** 0.5)
    assert not sc.close(F(1, 3), 0.3334)
