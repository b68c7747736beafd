"""Determinant gluing: Det(A) = c Det(A_Gamma, B) Det(R) and its t-families.

Cutting a closed model geometry along Gamma relates three zeta-regularized
determinants: the closed operator A, the Dirichlet operator on the cut
manifold, and the DtN operator R on Gamma.  The gluing constant c is local;
this module computes all three determinants independently, extracts c, and
verifies the derivative/trace identities that prove the formula.

The two-dimensional (cut torus) determinants reduce exactly to the
one-dimensional zeta engine:

  * closed torus: per cut mode k the fiber is a circle of circumference L1
    and mass w_k = sqrt(nu_k^2 + z); summing the fiber Weyl parts in closed
    form leaves an exponentially convergent remainder,

      logDet = L1 (A_nu + (2 - 2 log 2) R_nu) + 2 sum_k mult log(1 - e^{-w_k L1})

    with (R_nu, A_nu) the residue/finite part of the cut-circle zeta at -1/2;
  * cylinder with Dirichlet ends: the doubling identity expresses the
    Dirichlet fiber determinant through a circle of circumference 2 L1,

      logDet_D(z) = 1/2 logDet_torus(2 L1; z) - 1/2 logDet_nu(z).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath as mp
import numpy as np

from .asymfit import LogDetFamily, fit_expansion, sample_family
from .dtn import (RootOfMinusOne, assemble_triangular_dtn, dtn_spectrum,
                  dtn_value_1d, omega_matrix, roots_of_minus_one)
from .errors import DomainError
from .geometry import (BoundaryConditionKind, Circle, EigenSequence, TorusCut,
                       WeylDescriptor, circle_eigenvalues, interval_eigenvalues,
                       power_sequence)
from .zeta import LogDet, complex_log_det, log_det, zeta_at, zeta_laurent

_DPS = 30


@dataclass(frozen=True)
class GluingReport:
    geometry: object
    t: float
    log_det_closed: float
    log_det_dirichlet: float
    log_det_R: float
    log_c: float
    residual: float
    error_estimates: dict


@dataclass(frozen=True)
class FamilyTrace:
    """Eq-(4.1)-style t-family: both sides and the extracted constant."""

    geometry: object
    order: int
    t_grid: tuple[float, ...]
    closed: tuple[float, ...]
    dirichlet: tuple[float, ...]
    dtn_sum: tuple[float, ...]
    c_values: tuple[float, ...]
    c_mean: float
    max_deviation: float


@dataclass(frozen=True)
class VerificationReport:
    name: str
    lhs: complex
    rhs: complex
    abs_error: float
    rel_error: float
    details: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# closed / Dirichlet / DtN determinants per geometry
# ---------------------------------------------------------------------------

def closed_log_det(geometry, z: complex = 0.0, k_max: int = 256) -> LogDet:
    """logDet(A + z) on the closed geometry."""
    if isinstance(geometry, Circle):
        return log_det(circle_eigenvalues(geometry.L, geometry.m), shift=z)
    if isinstance(geometry, TorusCut):
        return torus_log_det(geometry, z, k_max)
    raise DomainError(f"unsupported geometry: {geometry!r}")


def dirichlet_log_det(geometry, z: complex = 0.0, k_max: int = 256) -> LogDet:
    """logDet(A_Gamma + z, Dirichlet) on the geometry cut along Gamma."""
    if isinstance(geometry, Circle):
        return log_det(interval_eigenvalues(geometry.L, geometry.m,
                                            BoundaryConditionKind.DIRICHLET),
                       shift=z)
    if isinstance(geometry, TorusCut):
        return cylinder_log_det(geometry, z, k_max)
    raise DomainError(f"unsupported geometry: {geometry!r}")


def dtn_log_det(geometry, root: RootOfMinusOne, t: float, k_max: int = 256) -> LogDet:
    """logDet R(alpha_root t) on the cut Gamma."""
    spec = dtn_spectrum(geometry, root, t, k_max)
    if spec.weyl is None:
        return complex_log_det(spec.values, None, spec.multiplicities)
    return complex_log_det(spec.values, spec.weyl, spec.multiplicities)


def _torus_fiber_sum(L1: float, nu_data, z: complex) -> tuple[complex, float]:
    """sum_k mult 2 log(1 - e^{-w_k L1}) with w_k = sqrt(nu_k^2 + z)."""
    with mp.workdps(_DPS):
        total = mp.mpc(0)
        last = mp.mpf(0)
        for nu2, mult in nu_data:
            w = mp.sqrt(mp.mpc(nu2) + mp.mpc(z))
            term = 2 * mult * mp.log(1 - mp.exp(-w * L1))
            total += term
            last = abs(term)
        return complex(total), float(last)


def torus_log_det(g: TorusCut, z: complex = 0.0, k_max: int = 256) -> LogDet:
    """logDet of the closed torus operator A + z via fiber reduction."""
    nu_seq = circle_eigenvalues(g.L2, g.m)
    res, fin = zeta_laurent(nu_seq, -0.5, shift=z)
    weyl_part = g.L1 * (fin + (2.0 - 2.0 * math.log(2.0)) * res)
    nu_data = [(nu_seq.mode_value(k), nu_seq.mode_multiplicity(k))
               for k in range(k_max + 1)]
    fiber, tail = _torus_fiber_sum(g.L1, nu_data, z)
    value = weyl_part + fiber
    if complex(z).imag == 0:
        value = complex(value.real, 0.0)
    return LogDet(value, 1e-13 * (1 + abs(value)) + 4 * tail)


def cylinder_log_det(g: TorusCut, z: complex = 0.0, k_max: int = 256) -> LogDet:
    """logDet of the cut cylinder with Dirichlet ends, via the doubling identity."""
    doubled = TorusCut(2 * g.L1, g.L2, g.m)
    big = torus_log_det(doubled, z, k_max)
    nu = log_det(circle_eigenvalues(g.L2, g.m), shift=z)
    value = 0.5 * big.value - 0.5 * nu.value
    return LogDet(value, 0.5 * (big.error_estimate + nu.error_estimate))


# ---------------------------------------------------------------------------
# the gluing formula
# ---------------------------------------------------------------------------

def glue(geometry, k_max: int = 256, t: float = 0.0) -> GluingReport:
    """Compute the three determinants of the d=1 family A + t and extract c."""
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t}")
    root = roots_of_minus_one(1)[0]  # alpha_0 = -1, so A - alpha_0 t = A + t
    closed = closed_log_det(geometry, t, k_max)
    dirich = dirichlet_log_det(geometry, t, k_max)
    dtn = dtn_log_det(geometry, root, t, k_max)
    log_c = closed.value.real - dirich.value.real - dtn.value.real
    errs = {
        "log_det_closed": closed.error_estimate,
        "log_det_dirichlet": dirich.error_estimate,
        "log_det_R": dtn.error_estimate,
        "log_c": closed.error_estimate + dirich.error_estimate + dtn.error_estimate,
    }
    return GluingReport(geometry, t, closed.value.real, dirich.value.real,
                        dtn.value.real, log_c, 0.0, errs)


def verify_eq41(geometry, d: int, t_grid, k_max: int = 256) -> FamilyTrace:
    """Constancy of logDet(A^d + t^d) - logDet(A_Gamma^d + t^d) - sum_k logDet R(alpha_k t).

    The degree-d family factorizes as prod_k (A - alpha_k t) over the d-th
    roots of -1, so each side is assembled from the d shifted determinants.
    """
    if any(t <= 0 for t in t_grid):
        raise DomainError("t grid must be positive")
    roots = roots_of_minus_one(d)
    closed, dirich, dtn_sums, c_vals = [], [], [], []
    for t in t_grid:
        cl = sum(closed_log_det(geometry, -r.value * t, k_max).value for r in roots)
        di = sum(dirichlet_log_det(geometry, -r.value * t, k_max).value for r in roots)
        dt = sum(dtn_log_det(geometry, r, t, k_max).value for r in roots)
        closed.append(cl.real)
        dirich.append(di.real)
        dtn_sums.append(dt.real)
        c_vals.append(cl.real - di.real - dt.real)
    mean = sum(c_vals) / len(c_vals)
    dev = max(abs(c - mean) for c in c_vals)
    return FamilyTrace(geometry, d, tuple(float(t) for t in t_grid),
                       tuple(closed), tuple(dirich), tuple(dtn_sums),
                       tuple(c_vals), mean, dev)


# ---------------------------------------------------------------------------
# derivative / trace identities
# ---------------------------------------------------------------------------

def _circle_resolvent_trace(L: float, m: float, t: float) -> float:
    """tr(P(t) B ((A+t)^{-1})_Gamma) on the circle, by quadrature.

    The closed resolvent kernel restricted to the cut point is
    k(0, y) = cosh(w (L/2 - min(y, L-y))) / (2 w sinh(w L / 2)); composing
    with the Poisson extension u of unit boundary data gives the kernel
    u(y) k(0, y), whose integral is the trace.
    """
    with mp.workdps(_DPS):
        w = mp.sqrt(m * m + t)

        def integrand(y):
            dist = min(y, L - y)
            k0y = mp.cosh(w * (L / 2 - dist)) / (2 * w * mp.sinh(w * L / 2))
            u = (mp.sinh(w * (L - y)) + mp.sinh(w * y)) / mp.sinh(w * L)
            return u * k0y

        return float(mp.quad(integrand, [0, L / 2, L]))


def verify_lemma41(geometry, d: int, t: float, h: float,
                   k_max: int = 256) -> VerificationReport:
    """d/dt [logDet(A^d+t^d) - logDet Dirichlet] vs d/dt logDet R_d(t) vs the trace formula."""
    if not 0 < h < t:
        raise DomainError(f"need 0 < h < t, got h={h}, t={t}")
    if d != 1 or not isinstance(geometry, Circle):
        raise DomainError("trace-formula verification implemented for the circle, d=1")
    root = roots_of_minus_one(1)[0]

    def difference(tt: float) -> float:
        return (closed_log_det(geometry, tt, k_max).value.real
                - dirichlet_log_det(geometry, tt, k_max).value.real)

    lhs_fd = (difference(t + h) - difference(t - h)) / (2 * h)
    rhs_fd = (dtn_log_det(geometry, root, t + h, k_max).value.real
              - dtn_log_det(geometry, root, t - h, k_max).value.real) / (2 * h)
    trace = d * t ** (d - 1) * _circle_resolvent_trace(geometry.L, geometry.m, t)
    err = max(abs(lhs_fd - trace), abs(rhs_fd - trace))
    return VerificationReport(
        "lemma41", lhs_fd, trace, err, err / max(abs(trace), 1e-300),
        {"fd_of_difference": lhs_fd, "fd_of_log_det_R": rhs_fd, "trace_formula": trace})


@dataclass(frozen=True)
class QFamily:
    """A determinant family Q(t) with independent logdet and trace evaluators."""

    label: str
    log_det_at: Callable[[float], float]
    trace_at: Callable[[float], float]


def spectral_q_family(seq: EigenSequence, d: int) -> QFamily:
    """Q(t) = A^d + t^d for a model spectrum A."""
    powered = power_sequence(seq, d)

    def ld(t: float) -> float:
        return log_det(powered, shift=t ** d).value.real

    def tr(t: float) -> float:
        # tr Q^{-1} dQ/dt = d t^{d-1} zeta_{A^d}(1, t^d); absolutely convergent
        z = zeta_at(powered, 1.0, shift=t ** d, continued=True)
        return d * t ** (d - 1) * z.value_at.real

    return QFamily(f"spectral-d{d}", ld, tr)


def dtn_q_family(geometry, d: int = 1, k_max: int = 64) -> QFamily:
    """Q(t) = R_d(t), the (mode-truncated) triangular DtN family."""

    def ld(t: float) -> float:
        T = assemble_triangular_dtn(geometry, t, d, k_max)
        return sum(m * T.mode_log_det(i)
                   for i, m in enumerate(T.multiplicities)).real

    def tr(t: float) -> float:
        # finite matrix trace per mode: tr(M^{-1} M') with M' from the
        # high-precision derivative of each closed-form entry
        from .dtn import _divided_difference_mp, _mode_masses
        alphas = [r.value for r in roots_of_minus_one(d)]
        T0 = assemble_triangular_dtn(geometry, t, d, k_max)
        L, masses = _mode_masses(geometry, k_max)
        total = 0.0
        with mp.workdps(_DPS):
            for i, (nu2, mult) in enumerate(masses):
                Mdot = np.zeros((d, d), dtype=complex)
                for j in range(d):
                    for k in range(j, d):
                        Mdot[j, k] = complex(mp.diff(
                            lambda tt, _j=j, _k=k: _divided_difference_mp(
                                L, nu2, [a * tt for a in alphas[_j:_k + 1]]),
                            mp.mpf(t)))
                total += mult * np.trace(np.linalg.solve(T0.matrices[i], Mdot)).real
        return total

    return QFamily(f"dtn-d{d}", ld, tr)


def matrix_q_family(fn: Callable[[float], np.ndarray], label: str = "matrix") -> QFamily:
    """Q(t) given directly as a finite matrix function."""

    def ld(t: float) -> float:
        sign, logdet = np.linalg.slogdet(fn(t))
        if sign <= 0:
            raise DomainError(f"matrix family not positive at t={t}")
        return float(logdet)

    def tr(t: float) -> float:
        delta = 1e-7 * max(1.0, abs(t))
        Mdot = (fn(t + delta) - fn(t - delta)) / (2 * delta)
        return float(np.trace(np.linalg.solve(fn(t), Mdot)).real)

    return QFamily(label, ld, tr)


def verify_lemma310(family: QFamily, t: float, h: float) -> VerificationReport:
    """Finite difference of logDet Q(t) against tr(Q^{-1} dQ/dt)."""
    if not 0 < h < t:
        raise DomainError(f"need 0 < h < t, got h={h}, t={t}")
    fd = (family.log_det_at(t + h) - family.log_det_at(t - h)) / (2 * h)
    tr = family.trace_at(t)
    err = abs(fd - tr)
    return VerificationReport(f"lemma310-{family.label}", fd, tr, err,
                              err / max(abs(tr), 1e-300))


def verify_power_identity(seq: EigenSequence, d: int) -> VerificationReport:
    """logDet(A^d) = d logDet(A), the two sides continued independently."""
    if d < 2:
        raise DomainError(f"need d >= 2, got {d}")
    lhs = log_det(power_sequence(seq, d))
    rhs = log_det(seq)
    err = abs(lhs.value - d * rhs.value)
    return VerificationReport(
        "power-identity", lhs.value, d * rhs.value, err,
        err / max(abs(d * rhs.value), 1e-300),
        {"error_budget": lhs.error_estimate + d * rhs.error_estimate})


def _product_weyl(geometry: TorusCut, t: float) -> WeylDescriptor:
    """Tail law of r(i t) r(-i t) per mode: 4 sqrt((nu^2)^2 + t^2)."""
    from fractions import Fraction
    c = (2.0 * math.pi / geometry.L2) ** 2
    m2 = geometry.m ** 2
    # ((c k^2 + m^2)^2 + t^2) expanded in k
    return WeylDescriptor(
        terms=((Fraction(4), c * c), (Fraction(2), 2 * c * m2),
               (Fraction(0), m2 * m2 + t * t)),
        multiplicity=2, tail_start=1, power=Fraction(1, 2), scale=4.0)


def verify_triangular_identity(geometry, d: int, t: float,
                               k_max: int = 256) -> VerificationReport:
    """logDet R~_d(t) = sum_k logDet R(alpha_k t), per mode and regularized.

    Also checks that conjugating the triangular matrices by Omega(t) leaves
    the per-mode log-determinants unchanged.
    """
    if d != 2:
        raise DomainError("triangular identity exercised at d=2")
    T = assemble_triangular_dtn(geometry, t, d, k_max)
    roots = roots_of_minus_one(d)
    specs = [dtn_spectrum(geometry, r, t, k_max) for r in roots]

    per_mode_max = 0.0
    omega_max = 0.0
    Om = omega_matrix(t, d)
    for i in range(len(T.matrices)):
        lhs_mode = cmath.log(complex(np.prod(np.diag(T.matrices[i]))))
        rhs_mode = sum(cmath.log(s.values[i]) for s in specs)
        per_mode_max = max(per_mode_max, abs(lhs_mode - rhs_mode))
        conj = Om.matrix @ T.matrices[i] @ Om.inverse()
        eig = np.linalg.eigvals(conj)
        conj_ld = sum(cmath.log(z) for z in eig)
        omega_max = max(omega_max, abs(conj_ld - rhs_mode))

    if isinstance(geometry, TorusCut):
        products = tuple(specs[0].values[i] * specs[1].values[i]
                         for i in range(len(specs[0].values)))
        lhs = complex_log_det(products, _product_weyl(geometry, t),
                              specs[0].multiplicities)
        rhs_parts = [complex_log_det(s.values, s.weyl, s.multiplicities)
                     for s in specs]
    else:
        lhs = complex_log_det([specs[0].values[0] * specs[1].values[0]], None)
        rhs_parts = [complex_log_det(s.values, None) for s in specs]
    rhs = sum(p.value for p in rhs_parts)
    err = abs(lhs.value - rhs)
    return VerificationReport(
        "triangular-identity", lhs.value, rhs, err,
        err / max(abs(rhs), 1e-300),
        {"per_mode_max": per_mode_max,
         "omega_conjugation_max": omega_max,
         "imag_part_of_sum": abs(rhs.imag),
         "error_budget": lhs.error_estimate + sum(p.error_estimate for p in rhs_parts)})


# ---------------------------------------------------------------------------
# c from the asymptotic route
# ---------------------------------------------------------------------------

def extract_c_from_pi0(geometry, d: int, grid=None, j_range=None,
                       log_range=None, k_max: int = 256, chi: float = None):
    """log c = -(1/d) sum_k pi_0(R(alpha_k t)) from the fitted DtN expansions.

    Fits the (real) summed family sum_k logDet R(alpha_k t) over the t grid
    and returns (log_c, error_bar, expansion).  On the cut torus the DtN
    eigenvalues scale like sqrt(t), so the family expands in half-powers of
    t and the default basis weight is chi = 2; on the circle it is chi = 1.
    """
    roots = roots_of_minus_one(d)
    if chi is None:
        chi = 2.0 if isinstance(geometry, TorusCut) else 1.0
    if grid is None:
        # the torus family carries exponentially small tanh corrections that
        # only drop below the fit residual for t above ~1e3
        grid = list(np.logspace(3, 5, 48) if isinstance(geometry, TorusCut)
                    else np.logspace(2, 4, 48))
    if j_range is None:
        j_range = [-1, 0, 1, 2, 3, 4, 5]
    if log_range is None:
        log_range = [0]

    def summed(t: float) -> LogDet:
        parts = [dtn_log_det(geometry, r, t, k_max) for r in roots]
        total = sum(p.value for p in parts)
        return LogDet(complex(total.real, 0.0),
                      sum(p.error_estimate for p in parts) + abs(total.imag))

    family = LogDetFamily(summed, chi=chi, d=1, label=f"dtn-sum-d{d}")
    samples = sample_family(family, grid)
    expansion = fit_expansion(samples, chi=chi, d=1, j_range=j_range,
                              log_range=log_range)
    p0 = expansion.pi.get(0, 0.0)
    # empirical truncation-bias bar: refit on the doubled grid
    scaled = sample_family(family, [2.0 * x for x in grid])
    p0_scaled = fit_expansion(scaled, chi=chi, d=1, j_range=j_range,
                              log_range=log_range).pi.get(0, 0.0)
    bar = expansion.pi0_error() + abs(p0 - p0_scaled)
    return -p0 / d, bar / d, expansion
