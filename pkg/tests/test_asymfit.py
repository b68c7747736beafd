"""Large-shift expansion fitting and the vanishing of the constant term pi_0."""

import math
from fractions import Fraction

import numpy as np
import pytest

from detglue.asymfit import (fit_expansion, pi0, sample_family,
                             sequence_family, verify_prop27)
from detglue.errors import DomainError, FitError
from detglue.geometry import (BoundaryConditionKind, circle_eigenvalues,
                              interval_eigenvalues)
from detglue.zeta import fit_heat_expansion

GRID = list(np.logspace(2, 4, 48))
DEEP = list(range(-1, 6))  # basis reaching past the Weyl terms


def test_sample_family_guards():
    family = sequence_family(circle_eigenvalues(2.0, 1.0))
    with pytest.raises(DomainError):
        sample_family(family, [1.0, 2.0, 3.0])  # spans < 2 decades
    with pytest.raises(DomainError):
        sample_family(family, [100.0, 50.0, 10000.0])  # not increasing
    with pytest.raises(DomainError):
        sample_family(family, [-1.0, 100.0, 10000.0])  # not positive


def test_sample_family_frozen_value():
    # logDet(A + 100) for the interval L=2, m=1: closed form
    # log(2 sinh(sqrt(101) L) / sqrt(101)) = 17.79219098...
    seq = interval_eigenvalues(2.0, 1.0, BoundaryConditionKind.DIRICHLET)
    family = sequence_family(seq)
    samples = sample_family(family, [100.0, 1000.0, 10000.0])
    w = math.sqrt(101.0)
    closed = math.log(2 * math.sinh(w * 2.0) / w)
    assert samples[0][1] == pytest.approx(closed, abs=1e-10)
    assert samples[0][1] == pytest.approx(17.79219098, abs=1e-7)


def test_fit_rejects_underdetermined_and_singular():
    with pytest.raises(FitError):
        fit_expansion([(1.0, 1.0, 1e-12), (10.0, 2.0, 1e-12)], 2.0, 1)


def test_pi0_vanishes_for_circle_and_interval():
    for seq in (circle_eigenvalues(2.0, 1.0),
                interval_eigenvalues(math.pi, 0.0,
                                     BoundaryConditionKind.DIRICHLET)):
        family = sequence_family(seq)
        samples = sample_family(family, GRID)
        expansion = fit_expansion(samples, 2.0, 1, j_range=DEEP)
        p0, _bar = pi0(expansion)
        assert abs(p0) < 1e-4


def test_fitted_weyl_coefficients_match_closed_form():
    # logDet(A + lambda) ~ L sqrt(lambda) - log(lambda)/2 + O(lambda^{-1/2})
    # for the interval (Dirichlet): pi_{-1} = L, q_0 = -1/2
    L = math.pi
    seq = interval_eigenvalues(L, 0.0, BoundaryConditionKind.DIRICHLET)
    samples = sample_family(sequence_family(seq), GRID)
    expansion = fit_expansion(samples, 2.0, 1, j_range=DEEP)
    assert expansion.pi[-1] == pytest.approx(L, abs=1e-6)
    assert expansion.q[0] == pytest.approx(-0.5, abs=1e-6)


def test_verify_prop27_dual_route():
    seq = interval_eigenvalues(math.pi, 0.0, BoundaryConditionKind.DIRICHLET)
    t_grid = [0.0002 * 1.25 ** i for i in range(24)]
    exps = [Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1),
            Fraction(3, 2), Fraction(2)]
    heat = fit_heat_expansion(seq, t_grid, exps)
    report = verify_prop27(seq, heat, GRID)
    assert report.applicable
    # heat coefficients predict the fitted expansion coefficients
    assert report.max_coefficient_discrepancy < 1e-3
