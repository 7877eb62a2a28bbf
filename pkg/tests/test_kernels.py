import itertools
import os
import subprocess
import sys

import numpy as np
import pytest

from superpack import _pykernels, kernels
from superpack.lattice import CASE_I, CASE_III

try:
    from superpack import _ckernels
except ImportError:  # pragma: no cover - extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")
BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])


def _levi_cofactor(B):
    # oracle: cofactor by explicit minors
    C = np.empty((3, 3))
    for i, k in itertools.product(range(3), repeat=2):
        m = np.delete(np.delete(B, i, 0), k, 1)
        C[i, k] = (-1) ** (i + k) * (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    return C


@pytest.mark.parametrize("mod", BACKENDS)
def test_cofactor_matches_minors(mod):
    rng = np.random.default_rng(0)
    for _ in range(50):
        B = rng.standard_normal((3, 3))
        np.testing.assert_allclose(mod.cofactor(B), _levi_cofactor(B), atol=1e-14)


@pytest.mark.parametrize("mod", BACKENDS)
def test_lattice_norms_box(mod):
    B = np.eye(3)
    U, n = mod.lattice_norms(B, 2.0, (1, 2, 0))
    assert len(U) == 3 * 5 * 1 - 1
    assert not np.any(np.all(U == 0, axis=1))
    np.testing.assert_allclose(n, np.linalg.norm(U, axis=1))
    # lexicographic order
    assert [tuple(u) for u in U] == sorted(tuple(u) for u in U)


@pytest.mark.parametrize("mod", BACKENDS)
@pytest.mark.parametrize("p", [1.0, 1.37, 2.0, 3.1])
def test_lattice_norms_values(mod, p):
    rng = np.random.default_rng(1)
    B = rng.standard_normal((3, 3))
    U, n = mod.lattice_norms(B, p, (2, 3, 1))
    ref = (np.abs(U @ B.T) ** p).sum(axis=1) ** (1 / p)
    np.testing.assert_allclose(n, ref, rtol=1e-13)


@needs_ext
@pytest.mark.parametrize("case", [CASE_I, CASE_III])
@pytest.mark.parametrize("p", [1.0, 1.3, 2.0, 2.6])
def test_backends_agree(case, p):
    rng = np.random.default_rng(2)
    U = case.vectors
    for _ in range(20):
        B = rng.standard_normal((3, 3))
        lam = rng.standard_normal(len(U))
        np.testing.assert_allclose(
            _ckernels.stationarity_residual(B, lam, U, p),
            _pykernels.stationarity_residual(B, lam, U, p),
            rtol=1e-13,
            atol=1e-13,
        )
        np.testing.assert_allclose(
            _ckernels.stationarity_jacobian(B, lam, U, p),
            _pykernels.stationarity_jacobian(B, lam, U, p),
            rtol=1e-13,
            atol=1e-13,
        )
        Uc, nc = _ckernels.lattice_norms(B, p, (2, 2, 2))
        Up, np_ = _pykernels.lattice_norms(B, p, (2, 2, 2))
        np.testing.assert_array_equal(Uc, Up)
        np.testing.assert_allclose(nc, np_, rtol=1e-14)


@pytest.mark.parametrize("mod", BACKENDS)
def test_jacobian_finite_differences(mod):
    rng = np.random.default_rng(3)
    U = CASE_III.vectors
    h = 1e-6
    for _ in range(10):
        p = rng.uniform(1.1, 2.0)
        z = np.concatenate([rng.standard_normal(9), rng.standard_normal(7)])

        def F(w):
            return mod.stationarity_residual(w[:9].reshape(3, 3), w[9:], U, p)

        J = mod.stationarity_jacobian(z[:9].reshape(3, 3), z[9:], U, p)
        fd = np.column_stack([(F(z + h * e) - F(z - h * e)) / (2 * h) for e in np.eye(16)])
        assert np.max(np.abs(J - fd)) <= 1e-5


def test_readonly_inputs_accepted():
    B = np.eye(3)
    B.setflags(write=False)
    U, n = kernels.lattice_norms(B, 1.5, (1, 1, 1))
    assert len(n) == 26


def test_backend_flag():
    assert kernels.BACKEND in ("cython", "python")
    if _ckernels is not None:
        assert kernels.BACKEND == "cython"


def test_pure_python_switch():
    env = dict(os.environ, SUPERPACK_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from superpack import kernels; print(kernels.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"
