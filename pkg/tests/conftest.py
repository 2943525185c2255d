import numpy as np
import pytest

from qcss.csscode import expand
from qcss.extend import extend_pair
from qcss.field import GF2e
from qcss.perms import Perm
from qcss.protograph import PermArrays, assemble


@pytest.fixture(scope="session")
def gf8():
    return GF2e(3)


@pytest.fixture(scope="session")
def gf256():
    return GF2e(8)


@pytest.fixture(scope="session")
def arrays_p9_a():
    """P=9, L=4 with f = (x+8, 7x+7), g = (x+3, x+6)."""
    P = 9
    return PermArrays(f=(Perm.cpm(P, 8), Perm.apm(P, 7, 7)),
                      g=(Perm.cpm(P, 3), Perm.cpm(P, 6)), P=P, L=4)


@pytest.fixture(scope="session")
def arrays_p9_b():
    """P=9, L=4 with f = (x+1, x+7), g = (x+1, x+5)."""
    P = 9
    return PermArrays(f=(Perm.cpm(P, 1), Perm.cpm(P, 7)),
                      g=(Perm.cpm(P, 1), Perm.cpm(P, 5)), P=P, L=4)


@pytest.fixture(scope="session")
def big_apm_arrays():
    """P=6300, L=8 affine arrays with girth 16."""
    P = 6300
    f = (Perm.apm(P, 1051, 2795), Perm.apm(P, 4201, 225),
         Perm.apm(P, 1051, 110), Perm.apm(P, 2101, 1675))
    g = (Perm.apm(P, 5041, 1122), Perm.apm(P, 5041, 4350),
         Perm.apm(P, 3781, 1686), Perm.apm(P, 2521, 2298))
    return PermArrays(f=f, g=g, P=P, L=8)


@pytest.fixture(scope="session")
def small_code(gf8, arrays_p9_a):
    """The e=3, P=9, L=4 code (n=108) used by decoder tests."""
    ext = extend_pair(assemble(arrays_p9_a), gf8, rng_seed=5)
    return expand(ext, gf8)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
