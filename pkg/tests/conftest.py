"""Shared fixtures: kernel backend parametrization and small builders."""

import pytest

from uwbsim import _core_py

try:
    from uwbsim import _core
    BACKENDS = [_core_py, _core]
except ImportError:  # compiled extension not built
    _core = None
    BACKENDS = [_core_py]


@pytest.fixture(params=BACKENDS, ids=lambda m: m.BACKEND)
def kern(request):
    """Each kernel implementation in turn (pure Python, compiled)."""
    return request.param


@pytest.fixture
def both_backends():
    """The list of available kernel implementations, for agreement checks."""
    return BACKENDS
