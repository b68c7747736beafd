"""Model geometries and eigenvalue sequences."""

import math

import pytest

from detglue.errors import DomainError
from detglue.geometry import (BoundaryConditionKind, Circle, Interval,
                              TorusCut, circle_eigenvalues,
                              interval_eigenvalues, power_sequence,
                              torus_mode_problems)


def test_circle_spectrum_values():
    L, m = 2.0, 1.0
    seq = circle_eigenvalues(L, m)
    vals = seq.eigenvalues(5)
    assert vals[0] == pytest.approx(m * m)
    assert vals[1] == pytest.approx(m * m + (2 * math.pi / L) ** 2)
    assert vals[2] == pytest.approx(m * m + (2 * math.pi / L) ** 2)
    # doubly degenerate nonzero modes
    assert seq.mode_multiplicity(0) == 1
    assert seq.mode_multiplicity(1) == 2


def test_interval_dirichlet_spectrum():
    L, m = math.pi, 0.0
    seq = interval_eigenvalues(L, m, BoundaryConditionKind.DIRICHLET)
    vals = seq.eigenvalues(4)
    assert vals == pytest.approx([1.0, 4.0, 9.0, 16.0])


def test_positivity_guards():
    with pytest.raises(DomainError):
        Circle(2.0, 0.0)
    with pytest.raises(DomainError):
        Circle(-1.0, 1.0)
    with pytest.raises(DomainError):
        TorusCut(0.0, 2 * math.pi, 1.0)
    # massless Dirichlet interval is fine (spectrum stays positive)
    Interval(math.pi, 0.0, BoundaryConditionKind.DIRICHLET)


def test_shifted_sequence_matches_pointwise():
    seq = circle_eigenvalues(2.0, 1.0)
    shifted = seq.shifted(3.0)
    for a, b in zip(seq.eigenvalues(6), shifted.eigenvalues(6)):
        assert b == pytest.approx(a + 3.0)


def test_power_sequence_exact():
    seq = circle_eigenvalues(2.0, 1.0)
    cubed = power_sequence(seq, 3)
    for a, b in zip(seq.eigenvalues(6), cubed.eigenvalues(6)):
        assert b == pytest.approx(a ** 3, rel=1e-14)


def test_torus_mode_problems_are_shifted_circles():
    g = TorusCut(1.0, 2 * math.pi, 1.0)
    problems = torus_mode_problems(g, 3)
    # transverse masses nu_k^2 + m^2 with nu_k = 2 pi k / L2 = k here
    masses = sorted({p.effective_mass_sq for p in problems})
    assert masses == pytest.approx([1.0, 2.0, 5.0, 10.0])


def test_weyl_tail_agrees_with_explicit_law():
    seq = circle_eigenvalues(2.0, 1.0)
    # the Weyl descriptor reproduces the exact dispersion for this model
    for j in range(seq.weyl.tail_start, seq.weyl.tail_start + 5):
        law = seq.weyl.mode_value(j)
        exact = 1.0 + (2 * math.pi * j / 2.0) ** 2
        assert law == pytest.approx(exact, rel=1e-14)
