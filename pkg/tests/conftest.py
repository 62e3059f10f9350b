"""Shared fixtures. The expensive reference runs (explicit RK3 at a small
Courant number, 144 h tidal runs) are session-scoped so every test that needs
them reuses a single simulation."""

import numpy as np
import pytest

import mlswe as m


@pytest.fixture(scope="session")
def ref_internal_wave():
    """Explicit reference for the internal-wave case: RK3 at C_cel = 0.1,
    advanced to t = 4.8 s (about 45 s of wall time)."""
    spec = m.case_internal_wave(integrator="rk3", dt=None, target_ccel=0.1,
                                t_final=4.8, output_interval=4.8)
    result = m.run_case(spec)
    assert result.report.verdict == "completed"
    return result


@pytest.fixture(scope="session")
def ref_lock_exchange():
    """Explicit reference for the lock exchange: RK3 at C_cel = 0.1 to
    t = 84 s (about 35 s of wall time)."""
    spec = m.case_lock_exchange(integrator="rk3", dt=None, target_ccel=0.1,
                                t_final=84.0, output_interval=42.0)
    result = m.run_case(spec)
    assert result.report.verdict == "completed"
    return result


@pytest.fixture(scope="session")
def lock_imex():
    """Semi-implicit lock-exchange run at dt = 0.1 s to t = 84 s with the
    output cadence needed for front tracking."""
    result = m.run_case(m.case_lock_exchange())
    assert result.report.verdict == "completed"
    return result


@pytest.fixture(scope="session")
def imex_internal_wave():
    """Factory: semi-implicit internal-wave run at a given dt (cached)."""
    cache = {}

    def run(dt, t_final=4.8):
        key = (dt, t_final)
        if key not in cache:
            out = min(t_final, 4.8)
            cache[key] = m.run_case(m.case_internal_wave(
                dt=dt, t_final=t_final, output_interval=out))
        return cache[key]

    return run


@pytest.fixture(scope="session")
def tidal_uniform_144h():
    """Uniform-layout tidal run over 144 h at dt = 20 s (about 2 min)."""
    result = m.run_case(m.case_tidal(layout="uniform", t_final=144 * 3600.0,
                                     output_interval=1200.0))
    return result


@pytest.fixture(scope="session")
def tidal_nvar4_144h():
    """Variable-layer-count tidal run (4 layers in the shallow region) over
    144 h at dt = 20 s."""
    result = m.run_case(m.case_tidal(layout="nvar4", t_final=144 * 3600.0,
                                     output_interval=1200.0))
    return result


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
