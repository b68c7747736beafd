"""Dirichlet-to-Neumann operator: values, Poisson extension, spectra."""

import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from detglue.errors import BranchError, DomainError
from detglue.dtn import (RootOfMinusOne, assemble_triangular_dtn,
                         dtn_inverse_eigensum, dtn_spectrum, dtn_value_1d,
                         omega_matrix, poisson_extend, roots_of_minus_one)
from detglue.geometry import Circle, TorusCut


def test_roots_of_minus_one():
    for d in (1, 2, 3):
        roots = roots_of_minus_one(d)
        assert len(roots) == d
        for r in roots:
            assert r.value ** d == pytest.approx(-1.0)
    assert roots_of_minus_one(1)[0].value == pytest.approx(-1.0)
    # d=2: exactly +/- i with no roundoff dust in the components
    vals = sorted((r.value for r in roots_of_minus_one(2)), key=lambda z: z.imag)
    assert vals[0] == -1j and vals[1] == 1j


def test_dtn_value_closed_form():
    # r(w) = 2 w tanh(w L / 2) for the circle cut at a point
    L, m = 2.0, 1.5
    r = dtn_value_1d(L, m * m)
    w = m
    assert r == pytest.approx(2 * w * math.tanh(w * L / 2), rel=1e-12)


def test_poisson_solution_satisfies_bvp():
    L, w_sq = 2.0, 2.25
    u = poisson_extend(L, w_sq, (1.0, 1.0))
    # boundary data and the ODE -u'' + w^2 u = 0 on a sample of points
    assert u.value(0.0) == pytest.approx(1.0)
    assert u.value(L) == pytest.approx(1.0)
    h = 1e-5
    for y in (0.3, 0.9, 1.7):
        upp = (u.value(y + h) - 2 * u.value(y) + u.value(y - h)) / h ** 2
        assert upp == pytest.approx(w_sq * u.value(y), rel=1e-5)
    # residual of the closed-form solution is at machine precision
    jump = u.normal_jump()
    r = dtn_value_1d(L, w_sq)
    assert jump == pytest.approx(r * 1.0, rel=1e-12)


def test_dtn_jump_finite_difference_oracle():
    """Second-order FD discretization of the cut-circle boundary problem."""
    L, m, t = 2.0, 1.0, 0.7
    alpha = -1.0  # d = 1
    w_sq = m * m - alpha * t

    def fd_jump(n):
        h = L / n
        # solve -u'' + w^2 u = 0 with u(0) = u(L) = 1 on the interior grid
        main = np.full(n - 1, 2.0 / h ** 2 + w_sq)
        off = np.full(n - 2, -1.0 / h ** 2)
        rhs = np.zeros(n - 1)
        rhs[0] += 1.0 / h ** 2
        rhs[-1] += 1.0 / h ** 2
        A = np.diag(main) + np.diag(off, 1) + np.diag(off, -1)
        u = np.linalg.solve(A, rhs)
        # one-sided second-order derivatives at both endpoints
        up0 = (-1.5 * 1.0 + 2.0 * u[0] - 0.5 * u[1]) / h
        upL = (1.5 * 1.0 - 2.0 * u[-1] + 0.5 * u[-2]) / h
        return upL - up0

    exact = dtn_value_1d(L, m * m, shift=alpha * t).real
    rel = abs(fd_jump(10000) - exact) / abs(exact)
    assert rel < 1e-6
    # second-order convergence
    e1 = abs(fd_jump(500) - exact)
    e2 = abs(fd_jump(1000) - exact)
    assert e1 / e2 == pytest.approx(4.0, rel=0.15)


def test_dtn_inverse_eigensum_oracle():
    # R(alpha t)^{-1} phi . phi from the circle eigenfunction expansion
    geom = Circle(2.0, 1.0)
    root = roots_of_minus_one(1)[0]
    t = 0.7
    inv = dtn_inverse_eigensum(geom, root, t, 1.0, 200000)
    exact = 1.0 / dtn_value_1d(geom.L, geom.m ** 2, shift=root.value * t)
    assert inv.real == pytest.approx(exact.real, abs=2e-5)


def test_dtn_spectrum_torus_agmon_guard():
    g = TorusCut(1.0, 2 * math.pi, 1.0)
    root = roots_of_minus_one(2)[0]  # alpha = e^{i pi/2} = i
    spec = dtn_spectrum(g, root, 0.5, 8)
    # values stay in the allowed sector around the positive axis
    for v in spec.values:
        assert abs(cmath.phase(complex(v))) < math.pi - 0.1
    # mode values match 2 w tanh(w L1 / 2) with w^2 = nu_k^2 + m^2 - alpha t
    w = cmath.sqrt(1.0 + 1.0 - 0.5j)
    expected = 2 * w * cmath.tanh(w * g.L1 / 2)
    found = min(spec.values, key=lambda v: abs(complex(v) - expected))
    assert complex(found) == pytest.approx(expected, rel=1e-12)


def test_triangular_dtn_off_diagonal_divided_difference():
    """Off-diagonal entries are divided differences of r over the shifts."""
    g = Circle(2.0, 1.0)
    t = 0.8
    tri = assemble_triangular_dtn(g, t, 2, 4)
    alphas = [r.value for r in roots_of_minus_one(2)]

    def r_at(shift):
        return dtn_value_1d(g.L, g.m ** 2, shift=shift)

    M = tri.matrices[0]  # lowest mode
    r0 = r_at(alphas[0] * t)
    r1 = r_at(alphas[1] * t)
    assert M[0][0] == pytest.approx(r0, rel=1e-12)
    assert M[1][1] == pytest.approx(r1, rel=1e-12)
    dd = (r1 - r0) / (alphas[1] * t - alphas[0] * t)
    assert M[0][1] == pytest.approx(dd, rel=1e-10)
    assert M[1][0] == 0


def test_triangular_dtn_confluent_limit():
    # at t = 0 all shifts coincide; the off-diagonal is r'(z) at z = 0,
    # i.e. -dr/dw / (2w) evaluated at w = m -- not zero
    g = Circle(2.0, 1.0)
    tri = assemble_triangular_dtn(g, 0.0, 2, 2)
    M = tri.matrices[0]
    w = mp.mpf(g.m)
    drdw = mp.diff(lambda u: 2 * u * mp.tanh(u * g.L / 2), w)
    expected = complex(-drdw / (2 * w))
    assert M[0][1] == pytest.approx(expected, rel=1e-8)
    assert abs(complex(M[0][1])) > 1.0  # genuinely nonvanishing


def test_omega_matrix_structure_and_inverse():
    om = omega_matrix(0.7, 3)
    M = np.array(om.matrix, dtype=complex)
    assert np.allclose(np.diag(M), 1.0)
    assert np.allclose(np.triu(M, 1), 0.0)
    inv = np.array(om.inverse(), dtype=complex)
    assert np.allclose(M @ inv, np.eye(3), atol=1e-12)


def test_degenerate_fiber_rejected():
    with pytest.raises(DomainError):
        dtn_value_1d(2.0, 0.0)  # w = 0: degenerate extension problem
