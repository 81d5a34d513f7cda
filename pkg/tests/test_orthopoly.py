import math
from fractions import Fraction as F

import pytest

from kerovlab import scalar as sc
from kerovlab.orthopoly import PolyError, PolySpec, eval_monic, norm_squared


def hyp(n, x, b, z):
    """Terminating sum_k (-n)_k (-x)_k / (b)_k k! z^k, with b = None for the 2F0 case."""
    out = F(0)
    for k in range(n + 1):
        den = math.factorial(k) * (sc.pochhammer(b, k) if b is not None else 1)
        out += sc.pochhammer(-n, k) * sc.pochhammer(-x, k) / den * z ** k
    return out


def meixner_hyp(n, x, t, xi):
    return hyp(n, x, t, 1 - 1 / xi) * sc.pochhammer(t, n) / (1 - 1 / xi) ** n


def charlier_hyp(n, x, a):
    return hyp(n, x, None, -1 / a) * (-a) ** n


def krawtchouk_hyp(n, x, N, p):
    return hyp(n, x, -N, 1 / p) * sc.pochhammer(-N, n) * p ** n


def test_low_degrees():
    t, xi = F(7, 2), F(1, 3)
    m = PolySpec.meixner(t, xi)
    assert eval_monic(m, 0, 5) == 1
    assert eval_monic(m, 1, 5) == 5 - xi * t / (1 - xi)
    assert eval_monic(PolySpec.charlier(F(3, 2)), 1, 4) == 4 - F(3, 2)


@pytest.mark.parametrize("t,xi", [(F(7, 2), F(1, 3)), (F(6), F(2, 5)), (F(1, 2), F(1, 2))])
def test_meixner_matches_hypergeometric(t, xi):
    m = PolySpec.meixner(t, xi)
    for n in range(7):
        for x in range(9):
            assert eval_monic(m, n, x) == meixner_hyp(n, x, t, xi)


def test_charlier_matches_hypergeometric():
    c = PolySpec.charlier(F(5, 3))
    for n in range(7):
        for x in range(9):
            assert eval_monic(c, n, x) == charlier_hyp(n, x, F(5, 3))


def test_krawtchouk_matches_hypergeometric():
    k = PolySpec.krawtchouk(6, F(1, 3))
    for n in range(7):
        for x in range(7):
            assert eval_monic(k, n, x) == krawtchouk_hyp(n, x, 6, F(1, 3))


def test_norms():
    t, xi = F(7, 2), F(1, 3)
    assert norm_squared(PolySpec.meixner(t, xi), 0) == 1
    assert norm_squared(PolySpec.meixner(t, xi), 1) == xi * t / (1 - xi) ** 2
    g = F(5, 3)
    assert norm_squared(PolySpec.charlier(g), 4) == g ** 4 * 24


def _gram(spec, top, xs):
    w = [spec.weight(x) for x in xs]
    vals = {n: [float(eval_monic(spec, n, x)) for x in xs] for n in range(top + 1)}
    return lambda a, b: sum(float(wx) * va * vb for wx, va, vb in zip(w, vals[a], vals[b]))


@pytest.mark.parametrize("spec", [PolySpec.meixner(F(7, 2), F(1, 3)), PolySpec.meixner(2.5, 0.4),
                                  PolySpec.charlier(F(3, 2))])
def test_orthogonality_by_summation(spec):
    # truncation at 250: weight tail far below 1e-10 at these parameters
    ip = _gram(spec, 6, range(250))
    for a in range(7):
        for b in range(a, 7):
            # normalized pairing, so the tolerance is scale free
            scale = math.sqrt(float(norm_squared(spec, a)) * float(norm_squared(spec, b)))
            assert abs(ip(a, b) / scale - (a == b)) <= 1e-10


def test_krawtchouk_orthogonality():
    spec = PolySpec.krawtchouk(6, F(1, 3))
    for a in range(7):
        for b in range(7):
            s = sum(spec.weight(x) * eval_monic(spec, a, x) * eval_monic(spec, b, x) for x in range(7))
            assert s == (norm_squared(spec, a) if a == b else 0)


def test_weights_normalized():
    assert sum(PolySpec.meixner(F(3), F(1, 2)).weight(x) for x in range(200)) == pytest.approx(1, abs=1e-12)
    assert sum(PolySpec.krawtchouk(5, F(1, 4)).weight(x) for x in range(6)) == 1


def test_invalid_parameters():
    with pytest.raises(PolyError):
        PolySpec.meixner(-1, F(1, 2))
    with pytest.raises(PolyError):
        PolySpec.meixner(1, F(3, 2))
    with pytest.raises(PolyError):
        PolySpec.charlier(0)
    with pytest.raises(PolyError):
        eval_monic(PolySpec.krawtchouk(3, F(1, 2)), 4, 1)
