import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weightlab import kernels
from weightlab.space import make_cyclic_space, make_dyadic_space

compiled_only = pytest.mark.skipif(kernels.BACKEND != "compiled", reason="compiled extension not built")


def _bases():
    yield make_dyadic_space(4)[1]
    yield make_cyclic_space(12)[1]


def _reference_sums(vals, basis):
    return np.stack([(vals[..., s] * basis.mass[s]).sum(axis=-1) for s in basis.sets], axis=-1)


@pytest.mark.parametrize("backend", ["python", pytest.param("compiled", marks=compiled_only)])
def test_set_sums_against_loop(backend, rng):
    for basis in _bases():
        vals = rng.exponential(size=(3, basis.n))
        got = kernels.set_sums(vals, basis.mass, basis.csr, backend=backend)
        np.testing.assert_allclose(got, _reference_sums(vals, basis), rtol=1e-13)


@pytest.mark.parametrize("recip", [0.0, 0.25, 1.0, 1 / 3])
@pytest.mark.parametrize("backend", ["python", pytest.param("compiled", marks=compiled_only)])
def test_set_lp_norms_against_loop(backend, recip, rng):
    for basis in _bases():
        vals = rng.exponential(size=basis.n)
        got = kernels.set_lp_norms(vals, basis.mass, basis.csr, recip, backend=backend)
        if recip == 0:
            ref = [vals[s].max() for s in basis.sets]
        else:
            ref = [((vals[s] ** (1 / recip)) * basis.mass[s]).sum() ** recip for s in basis.sets]
        np.testing.assert_allclose(got, ref, rtol=1e-12)


@pytest.mark.parametrize("backend", ["python", pytest.param("compiled", marks=compiled_only)])
def test_scatter_against_loop(backend, rng):
    for basis in _bases():
        setvals = rng.exponential(size=len(basis))
        best, _ = kernels.scatter_max(setvals, basis.csr, backend=backend)
        total = kernels.scatter_add(setvals, basis.csr, backend=backend)
        ref_max = np.zeros(basis.n)
        ref_add = np.zeros(basis.n)
        for j, s in enumerate(basis.sets):
            ref_max[s] = np.maximum(ref_max[s], setvals[j])
            ref_add[s] += setvals[j]
        np.testing.assert_allclose(best, ref_max)
        np.testing.assert_allclose(total, ref_add, rtol=1e-13)


@compiled_only
@given(st.integers(0, 2**31 - 1), st.floats(0.05, 1.0))
def test_backends_agree(seed, recip):
    basis = make_dyadic_space(5)[1]
    r = np.random.default_rng(seed)
    vals = r.exponential(size=(2, basis.n))
    setvals = r.exponential(size=(2, len(basis)))
    for name, args in (
        ("set_sums", (vals, basis.mass, basis.csr)),
        ("set_lp_norms", (vals, basis.mass, basis.csr, recip)),
        ("scatter_add", (setvals, basis.csr)),
    ):
        fn = getattr(kernels, name)
        np.testing.assert_allclose(fn(*args, backend="compiled"), fn(*args, backend="python"), rtol=1e-12)
    a = kernels.scatter_max(setvals, basis.csr, backend="compiled")[0]
    b = kernels.scatter_max(setvals, basis.csr, backend="python")[0]
    np.testing.assert_array_equal(a, b)


def test_environment_forces_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, WEIGHTLAB_PURE_PYTHON="1")
    code = "import weightlab.kernels as k; print(k.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    suite = subprocess.run([sys.executable, "-m", "weightlab.cli", "suite", "--only", "2"], env=env,
                           capture_output=True, text=True)
    assert suite.returncode == 0, suite.stderr
