import pytest

from kerovlab.kerov import make_kerov


@pytest.fixture(scope="session")
def young23():
    return make_kerov("young", 6, z=2, zp=3)


@pytest.fixture(scope="session")
def schur5():
    return make_kerov("schur", 6, a=5)


@pytest.fixture(scope="session")
def pascal12():
    return make_kerov("pascal", 7, ts=(1, 2))
