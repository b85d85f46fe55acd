import numpy as np
import pytest

from gluewalk import kernels
from gluewalk.channel import PhaseDampingChannel, apply_closed_form
from gluewalk.graph import build_glued_trees
from gluewalk.walk import grover_coin, step_density

from oracles import random_density, random_unitary

needs_numba = pytest.mark.skipif("numba" not in kernels.available_backends(), reason="numba missing")


@pytest.mark.parametrize("backend", kernels.available_backends())
@pytest.mark.parametrize("eta", [1.0, 0.9, 0.0])
def test_fused_step_equals_step_then_channel(backend, eta):
    g = build_glued_trees(2)
    rho = random_density(np.random.default_rng(5), g.dimension)
    coin = grover_coin(3)
    ch = PhaseDampingChannel(eta)
    fused = kernels.dephased_step(rho, coin.matrix, g.ports, ch.coin_mask(), backend=backend)
    np.testing.assert_allclose(fused, apply_closed_form(step_density(rho, coin, g), ch), atol=1e-14)


@needs_numba
def test_backends_agree_with_complex_coin():
    rng = np.random.default_rng(11)
    g = build_glued_trees(3)
    rho = random_density(rng, g.dimension)
    C = random_unitary(rng, 3)
    mask = PhaseDampingChannel(0.77).coin_mask()
    a = kernels.dephased_step(rho, C, g.ports, mask, backend="numpy")
    b = kernels.dephased_step(rho, C, g.ports, mask, backend="numba")
    np.testing.assert_allclose(a, b, atol=1e-14, rtol=0)


@needs_numba
def test_numba_result_independent_of_thread_count():
    g = build_glued_trees(4)
    rho = random_density(np.random.default_rng(2), g.dimension)
    mask = PhaseDampingChannel(0.9).coin_mask()
    before = kernels.set_threads()
    try:
        kernels.set_threads(1)
        one = kernels.dephased_step(rho, grover_coin(3).matrix, g.ports, mask, backend="numba")
        kernels.set_threads(64)
        many = kernels.dephased_step(rho, grover_coin(3).matrix, g.ports, mask, backend="numba")
    finally:
        kernels.set_threads(before)
    np.testing.assert_array_equal(one, many)


def test_out_must_not_alias():
    g = build_glued_trees(1)
    rho = np.eye(18, dtype=complex) / 18
    with pytest.raises(ValueError):
        kernels.dephased_step(rho, grover_coin(3).matrix, g.ports, np.ones((3, 3)), out=rho)


def test_backend_env_flag(monkeypatch):
    monkeypatch.setenv("GLUEWALK_BACKEND", "numpy")
    assert kernels._default_backend() == "numpy"
    monkeypatch.setenv("GLUEWALK_BACKEND", "fortran")
    with pytest.raises(RuntimeError):
        kernels._default_backend()
