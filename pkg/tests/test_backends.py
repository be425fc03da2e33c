"""Backend parity and deterministic parallel reductions."""

import numpy as np
import pytest

from lenslab import backend
from lenslab.evolution import collocation_system
from lenslab.parallel import map_indexed
from lenslab.randomfield import SampleStream, mu0_law, sample


def _advance_with(kernel, n_modes=12, p=5.0):
    work = collocation_system(n_modes, True)
    u0 = sample(mu0_law(), n_modes, SampleStream(seed=17))
    c0 = np.zeros(work.n_modes, dtype=complex)
    c0[:n_modes] = u0.coeffs
    return kernel(c0, work.values, work.analysis_matrix, 0.0, 1e-3, 300, 0.1, p, True)


def test_python_backend_always_available():
    assert "python" in backend.available_backends()


@pytest.mark.skipif(
    "compiled" not in backend.available_backends(), reason="extension not built"
)
def test_backends_agree():
    out_py, subs_py, _ = _advance_with(backend.kernel_for("python"))
    out_c, subs_c, _ = _advance_with(backend.kernel_for("compiled"))
    assert subs_py == subs_c
    assert np.abs(out_py - out_c).max() <= 1e-12


def test_failure_flag_promoted():
    # a state far beyond the substep budget must raise, not return garbage
    work = collocation_system(4, False)
    c0 = np.full(4, 1e12, dtype=complex)
    with pytest.raises(Exception) as exc:
        backend.harmonic_advance(
            c0, work.values, work.analysis_matrix, 0.0, 1e-2, 10, 0.1, 5.0, True
        )
    assert "stable range" in str(exc.value)


@pytest.mark.parametrize("threads", [1, 2, 8])
def test_map_indexed_order_and_determinism(threads):
    def work(i):
        return np.sin(np.arange(100) * (i + 1)).sum()

    got = map_indexed(work, 40, threads)
    assert got == [work(i) for i in range(40)]
