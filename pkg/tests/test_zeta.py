"""Zeta continuation engine against closed-form oracles."""

import math
from fractions import Fraction

import mpmath as mp
import pytest

from detglue.errors import ContinuationError, DomainError
from detglue.geometry import (BoundaryConditionKind, EigenSequence,
                              circle_eigenvalues, interval_eigenvalues)
from detglue.zeta import (complex_log_det, fit_heat_expansion, heat_trace,
                          log_det, mellin_zeta, zeta_at, zeta_laurent)


def test_riemann_zeta_at_4():
    # interval L=pi, m=0: lambda_k = k^2, zeta_A(s) = zeta_R(2s)
    seq = interval_eigenvalues(math.pi, 0.0, BoundaryConditionKind.DIRICHLET)
    r = zeta_at(seq, 2.0)
    assert r.value_at.real == pytest.approx(float(mp.zeta(4)), abs=1e-12)


def test_continuation_requires_flag_in_divergence_region():
    seq = interval_eigenvalues(math.pi, 0.0, BoundaryConditionKind.DIRICHLET)
    with pytest.raises(ContinuationError):
        zeta_at(seq, 0.2)
    r = zeta_at(seq, 0.2, continued=True)
    assert r.value_at.real == pytest.approx(float(mp.zeta(0.4)), abs=1e-10)


def test_log_2pi_oracle():
    # logDet = -2 zeta_R'(0) = log(2 pi)
    seq = interval_eigenvalues(math.pi, 0.0, BoundaryConditionKind.DIRICHLET)
    ld = log_det(seq)
    assert ld.value.real == pytest.approx(math.log(2 * math.pi), abs=1e-12)


def test_circle_massive_oracle():
    # circle L=2, m=1: Det = (2 sinh 1)^2
    seq = circle_eigenvalues(2.0, 1.0)
    ld = log_det(seq)
    assert ld.value.real == pytest.approx(2 * math.log(2 * math.sinh(1.0)),
                                          abs=1e-12)


def test_shift_consistency():
    # zeta of (A + x) equals zeta of the shifted sequence
    seq = circle_eigenvalues(2.0, 1.0)
    a = zeta_at(seq, 1.7, shift=3.0)
    b = zeta_at(seq.shifted(3.0), 1.7)
    assert a.value_at.real == pytest.approx(b.value_at.real, rel=1e-12)
    with pytest.raises(DomainError):
        zeta_at(seq, 1.7, shift=-2.0)


def test_laurent_residue_at_minus_half():
    # heat trace (L/sqrt(4 pi t)) e^{-t m^2} gives, at s = -1/2, the residue
    # c_{1/2} / Gamma(-1/2) = L m^2 / (4 pi)
    L, m = 2.0, 1.3
    seq = circle_eigenvalues(L, m)
    residue, _finite = zeta_laurent(seq, -0.5)
    assert residue.real == pytest.approx(L * m ** 2 / (4 * math.pi), rel=1e-10)


def test_complex_log_det_matches_real_engine():
    seq = circle_eigenvalues(2.0, 1.0)
    direct = log_det(seq)
    values = [seq.mode_value(j) for j in range(400)]
    mults = [seq.mode_multiplicity(j) for j in range(400)]
    via_complex = complex_log_det(values, seq.weyl, mults)
    assert via_complex.value.real == pytest.approx(direct.value.real, abs=1e-8)


def test_heat_trace_poisson_oracle():
    # theta(t) for the massless circle via Poisson summation:
    # sum_{k in Z} e^{-t (2 pi k / L)^2} = (L/sqrt(4 pi t)) sum_n e^{-n^2 L^2/(4t)}
    L, m = 2.0, 1.0
    seq = circle_eigenvalues(L, m)
    for t in (0.01, 0.05, 0.2):
        theta = heat_trace(seq, t)
        with mp.workdps(30):
            exact = mp.exp(-t * m * m) * mp.nsum(
                lambda n: mp.exp(-n * n * L * L / (4 * t)), [-mp.inf, mp.inf]) \
                * L / mp.sqrt(4 * mp.pi * t)
        assert theta == pytest.approx(float(exact), rel=1e-12)


def test_heat_fit_and_mellin():
    seq = circle_eigenvalues(2.0, 1.0)
    t_grid = [0.0002 * 1.25 ** i for i in range(24)]
    exps = [Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1),
            Fraction(3, 2), Fraction(2)]
    expansion = fit_heat_expansion(seq, t_grid, exps)
    c_half = dict(expansion.terms)[Fraction(-1, 2)]
    assert c_half.real == pytest.approx(2.0 / math.sqrt(4 * math.pi), abs=1e-6)
    val, err = mellin_zeta(seq, 3.0, expansion)
    direct = zeta_at(seq, 3.0).value_at.real
    ref = math.gamma(3.0) * direct
    assert abs(val - ref) < max(err, 1e-9) + 1e-9
