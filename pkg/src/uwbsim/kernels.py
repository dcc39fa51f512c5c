"""Kernel backend selection: compiled extension if built, else pure Python.

Set ``UWBSIM_PURE_PYTHON=1`` to force the fallback (used by the kernel
benchmark and by tests that exercise both twins).
"""

import os

if os.environ.get("UWBSIM_PURE_PYTHON"):
    from . import _core_py as impl
else:
    try:
        from . import _core as impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _core_py as impl

BACKEND = impl.BACKEND

dbm_to_mw = impl.dbm_to_mw
mw_to_dbm = impl.mw_to_dbm
crossover_distance = impl.crossover_distance
path_loss_db = impl.path_loss_db
rx_powers_mw = impl.rx_powers_mw
bit_error_rate = impl.bit_error_rate
packet_success_prob = impl.packet_success_prob
reception_success_prob = impl.reception_success_prob
