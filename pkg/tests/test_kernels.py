import subprocess
import sys

import numpy as np
import pytest

from riopt import kernels

BACKENDS = kernels.backends()


def test_both_backends_present():
    # the compiled extension is part of the build; the fallback is always there
    assert set(BACKENDS) == {"python", "cython"}
    assert kernels.BACKEND in BACKENDS


@pytest.mark.parametrize("env,expect", [("1", "python"), ("", "cython")])
def test_backend_selection(env, expect):
    r = subprocess.run(
        [sys.executable, "-c", "from riopt import kernels; print(kernels.BACKEND)"],
        capture_output=True,
        text=True,
        env={"RIOPT_PURE_PYTHON": env, "PATH": "/usr/bin:/bin"},
    )
    assert r.stdout.strip() == expect


def _brute_suffix_max(x):
    return np.array([np.max(x[i:]) for i in range(x.size)])


def _brute_hull(x, y):
    # vertex k is on the upper hull iff no chord between points on either side passes strictly above it
    n = x.size
    keep = []
    for k in range(n):
        if k in (0, n - 1):
            keep.append(k)
            continue
        on = True
        for i in range(k):
            for j in range(k + 1, n):
                yk = y[i] + (y[j] - y[i]) * (x[k] - x[i]) / (x[j] - x[i])
                if yk >= y[k]:
                    on = False
                    break
            if not on:
                break
        if on:
            keep.append(k)
    return np.array(keep)


def _brute_minform(vals, s, t, alpha):
    return np.array([max(v * min(tk ** (1 - alpha), tk * sj**-alpha) for v, sj in zip(vals, s)) for tk in t])


def _brute_window(u, w):
    n = u.size
    return np.array([sum(w[i] * max(u[i : k + 1]) for i in range(k)) for k in range(n)])


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_suffix_max(name):
    impl = BACKENDS[name]
    rng = np.random.default_rng(0)
    for n in (0, 1, 2, 17, 200):
        x = rng.normal(size=n)
        np.testing.assert_array_equal(impl.suffix_max(x), _brute_suffix_max(x) if n else x)
    x = np.array([1.0, np.inf, 2.0])
    np.testing.assert_array_equal(impl.suffix_max(x), [np.inf, np.inf, 2.0])


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_upper_hull(name):
    impl = BACKENDS[name]
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(2, 25))
        x = np.cumsum(rng.uniform(0.1, 1.0, size=n))
        y = rng.normal(size=n)
        np.testing.assert_array_equal(impl.upper_hull(x, y), _brute_hull(x, y))
    # collinear interior points are dropped
    np.testing.assert_array_equal(impl.upper_hull(np.arange(4.0), np.arange(4.0)), [0, 3])


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_minform_sup(name):
    impl = BACKENDS[name]
    rng = np.random.default_rng(2)
    s = np.sort(10.0 ** rng.uniform(-20, 0, size=40))
    vals = rng.exponential(size=40)
    t = np.sort(10.0 ** rng.uniform(-20, 0, size=30))
    np.testing.assert_allclose(impl.minform_sup(vals, s, t, 0.6), _brute_minform(vals, s, t, 0.6), rtol=1e-14)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_window_sup_integral(name):
    impl = BACKENDS[name]
    rng = np.random.default_rng(3)
    u = rng.normal(size=30)
    w = rng.uniform(size=30)
    np.testing.assert_allclose(impl.window_sup_integral(u, w), _brute_window(u, w), rtol=1e-13, atol=1e-15)


def test_backends_agree_on_large_inputs():
    rng = np.random.default_rng(4)
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    x = np.cumsum(rng.uniform(0.1, 1.0, size=3000))
    y = np.sqrt(x) + 0.01 * rng.normal(size=3000)
    np.testing.assert_array_equal(py.upper_hull(x, y), cy.upper_hull(x, y))
    np.testing.assert_array_equal(py.suffix_max(y), cy.suffix_max(y))
    s = np.sort(10.0 ** rng.uniform(-30, 0, size=500))
    np.testing.assert_allclose(py.minform_sup(y[:500], s, s, 0.5), cy.minform_sup(y[:500], s, s, 0.5), rtol=1e-14)
    np.testing.assert_allclose(py.window_sup_integral(y[:400], x[:400]), cy.window_sup_integral(y[:400], x[:400]), rtol=1e-12)
