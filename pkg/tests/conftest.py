import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from atomiso.compile import Compiler
from atomiso.theories import get_backend


@pytest.fixture(scope="session")
def eq_comp():
    return Compiler(get_backend("equality"))


@pytest.fixture(scope="session")
def dlo_comp():
    return Compiler(get_backend("dlo"))


@pytest.fixture(scope="session")
def cyc_comp():
    return Compiler(get_backend("cyclic"))


@pytest.fixture
def comp_for(eq_comp, dlo_comp, cyc_comp):
    return {"equality": eq_comp, "dlo": dlo_comp, "cyclic": cyc_comp}.__getitem__
