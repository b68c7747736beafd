"""Poisson extensions and Dirichlet-to-Neumann (DtN) operators on the cut.

Cutting a model geometry along a circle Gamma turns each Fourier mode into a
two-point fiber problem (-d2/dx2 + w^2) u = 0 on [0, L].  The DtN value of a
mode is the jump of the normal derivative of the Poisson extension of unit
boundary data; with the jump oriented so that the t = 0 operator is positive,

    r = 2 w tanh(w L / 2),    w = sqrt(effective_mass_sq - shift), Re w > 0.

The d-th order factorization A^d + t^d = prod_k (A - alpha_k t) over the
d-th roots of -1 leads to a per-mode d x d upper-triangular DtN matrix whose
off-diagonal entries are resolvent chains; because resolvents map Poisson
extensions to divided differences of Poisson extensions, every entry is a
divided difference of r over the participating shifts.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import BranchError, DomainError
from .geometry import Circle, TorusCut, WeylDescriptor, torus_mode_problems
from .zeta import BranchConvention

_DPS = 30


@dataclass(frozen=True)
class RootOfMinusOne:
    """alpha_k = e^{i (pi + 2 k pi) / d}, the k-th d-th root of -1."""

    index: int
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise DomainError(f"root order must be >= 1, got {self.order}")
        if not 0 <= self.index < self.order:
            raise DomainError(f"root index {self.index} outside [0, {self.order - 1}]")
        v = self.value
        if abs(v ** self.order + 1) > 1e-15 * self.order:
            raise DomainError("root fails alpha^d = -1")

    @property
    def value(self) -> complex:
        v = cmath.exp(1j * math.pi * (1 + 2 * self.index) / self.order)
        # snap axis-adjacent roundoff dust so exact-axis roots stay exact
        re = 0.0 if abs(v.real) < 1e-15 else v.real
        im = 0.0 if abs(v.imag) < 1e-15 else v.imag
        return complex(re, im)


def roots_of_minus_one(d: int) -> list[RootOfMinusOne]:
    """All d-th roots of -1, ordered by increasing argument from pi/d."""
    if d < 1:
        raise DomainError(f"need d >= 1, got {d}")
    return [RootOfMinusOne(k, d) for k in range(d)]


# ---------------------------------------------------------------------------
# fiber problems
# ---------------------------------------------------------------------------

def _fiber_w(effective_mass_sq: complex, shift: complex):
    """Principal sqrt(m_eff^2 - shift) with the decaying-extension branch Re w > 0."""
    w = mp.sqrt(mp.mpc(effective_mass_sq) - mp.mpc(shift))
    if mp.re(w) <= 0:
        raise DomainError(
            f"degenerate fiber: Re w = {float(mp.re(w))} for shift {shift}")
    return w


def dtn_value_1d(fiber_length: float, effective_mass_sq: float,
                 shift: complex = 0.0) -> complex:
    """DtN value r = 2 w tanh(w L / 2) of one fiber mode."""
    if fiber_length <= 0:
        raise DomainError(f"fiber length must be positive, got {fiber_length}")
    with mp.workdps(_DPS):
        w = _fiber_w(effective_mass_sq, shift)
        return complex(2 * w * mp.tanh(w * fiber_length / 2))


@dataclass(frozen=True)
class PoissonSolution:
    """Closed-form solution of (-d2/dx2 + w^2) u = 0 on [0, L].

    Boundary data: u(0) = phi_minus, u(L) = phi_plus.
    """

    L: float
    w_sq: complex
    phi_plus: complex
    phi_minus: complex

    @property
    def w(self) -> complex:
        with mp.workdps(_DPS):
            return complex(_fiber_w(self.w_sq, 0.0))

    def value(self, x: float) -> complex:
        if not 0 <= x <= self.L:
            raise DomainError(f"x = {x} outside fiber [0, {self.L}]")
        with mp.workdps(_DPS):
            w = _fiber_w(self.w_sq, 0.0)
            s = mp.sinh(w * self.L)
            u = (self.phi_minus * mp.sinh(w * (self.L - x))
                 + self.phi_plus * mp.sinh(w * x)) / s
            return complex(u)

    def derivative(self, x: float) -> complex:
        with mp.workdps(_DPS):
            w = _fiber_w(self.w_sq, 0.0)
            s = mp.sinh(w * self.L)
            du = w * (-self.phi_minus * mp.cosh(w * (self.L - x))
                      + self.phi_plus * mp.cosh(w * x)) / s
            return complex(du)

    def normal_jump(self) -> complex:
        """u'(L) - u'(0); equals r * phi for matched boundary data phi."""
        return self.derivative(self.L) - self.derivative(0.0)


def poisson_extend(fiber_length: float, w_sq: complex,
                   boundary: tuple[complex, complex]) -> PoissonSolution:
    """Poisson extension of boundary data (phi_plus, phi_minus) into the fiber."""
    if fiber_length <= 0:
        raise DomainError(f"fiber length must be positive, got {fiber_length}")
    with mp.workdps(_DPS):
        _fiber_w(w_sq, 0.0)  # validates Re w > 0
    phi_plus, phi_minus = boundary
    return PoissonSolution(fiber_length, complex(w_sq), complex(phi_plus),
                           complex(phi_minus))


# ---------------------------------------------------------------------------
# DtN spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DtNSpectrum:
    """Per-mode DtN values r_k for one shift alpha * t, with their tail law."""

    geometry: object
    shift: complex
    values: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    weyl: WeylDescriptor | None

    def __post_init__(self):
        branch = BranchConvention()
        for v in self.values:
            if branch.violates(v):
                raise BranchError(f"DtN value {v} inside the Agmon sector")


def _mode_masses(geometry, k_max: int):
    """(L, [(nu_k^2, mult)]) for the cut geometry."""
    if isinstance(geometry, Circle):
        return geometry.L, [(geometry.m ** 2, 1)]
    if isinstance(geometry, TorusCut):
        probs = torus_mode_problems(geometry, k_max)
        return geometry.L1, [(p.effective_mass_sq, p.multiplicity) for p in probs]
    raise DomainError(f"unsupported geometry for DtN: {geometry!r}")


def dtn_spectrum(geometry, root: RootOfMinusOne, t: float, k_max: int = 0) -> DtNSpectrum:
    """DtN spectrum of the family member R(alpha_root t)."""
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t}")
    shift = root.value * t
    L, masses = _mode_masses(geometry, k_max)
    values = tuple(dtn_value_1d(L, nu2, shift) for nu2, _ in masses)
    mults = tuple(m for _, m in masses)
    weyl = None
    if isinstance(geometry, TorusCut):
        from fractions import Fraction
        weyl = WeylDescriptor(
            terms=((Fraction(2), (2.0 * math.pi / geometry.L2) ** 2),
                   (Fraction(0), geometry.m ** 2 - shift)),
            multiplicity=2, tail_start=1,
            power=Fraction(1, 2), scale=2.0)
    return DtNSpectrum(geometry, shift, values, mults, weyl)


def dtn_inverse_eigensum(geometry, root: RootOfMinusOne, t: float,
                         phi: complex, j_max: int) -> complex:
    """Truncated eigen-sum for <R(alpha t)^{-1} phi, phi> on the cut point.

    Uses the closed-geometry eigenfunctions evaluated at the cut:
    sum_j |psi_j(0)|^2 / (lambda_j - alpha t).  Converges like 1/lambda and
    serves as an independent oracle for 1/r.
    """
    if not isinstance(geometry, Circle):
        raise DomainError("eigen-sum oracle implemented for the circle cut only")
    if phi == 0:
        return 0j
    shift = root.value * t
    L, m = geometry.L, geometry.m
    lam0 = m * m
    if abs(lam0 - shift) < 1e-12:
        raise DomainError("eigenvalue collision lambda_j = alpha t")
    total = (1.0 / L) / (lam0 - shift)
    for k in range(1, j_max + 1):
        lam = m * m + (2.0 * math.pi * k / L) ** 2
        # cosine mode carries weight 2/L at the cut point; sine mode vanishes
        total += (2.0 / L) / (lam - shift)
    return abs(phi) ** 2 * total


# ---------------------------------------------------------------------------
# triangular family R_d(t)
# ---------------------------------------------------------------------------

def _divided_difference_mp(L: float, nu2: float, nodes):
    """Divided difference of z -> dtn_value_1d(L, nu2, z) over the nodes (mpmath)."""
    def rho(z):
        w = _fiber_w(nu2, z)
        return 2 * w * mp.tanh(w * L / 2)

    n = len(nodes)
    if all(abs(z - nodes[0]) < 1e-14 for z in nodes):
        # confluent case (t = 0): n-th shift-derivative over factorial
        return mp.diff(rho, mp.mpc(nodes[0]), n - 1) / mp.factorial(n - 1)
    table = [mp.mpc(rho(z)) for z in nodes]
    zs = [mp.mpc(z) for z in nodes]
    for order in range(1, n):
        table = [(table[i + 1] - table[i]) / (zs[i + order] - zs[i])
                 for i in range(n - order)]
    return table[0]


def _divided_difference(L: float, nu2: float, nodes: list[complex]) -> complex:
    with mp.workdps(_DPS):
        return complex(_divided_difference_mp(L, nu2, nodes))


@dataclass(frozen=True)
class TriangularDtN:
    """Per-mode d x d upper-triangular DtN matrices for A^d + t^d."""

    geometry: object
    t: float
    order: int
    matrices: tuple[np.ndarray, ...]
    multiplicities: tuple[int, ...]

    def mode_log_det(self, i: int) -> complex:
        """Principal-branch log-determinant of mode i (sum over the diagonal)."""
        return complex(sum(cmath.log(z) for z in np.diag(self.matrices[i])))


def assemble_triangular_dtn(geometry, t: float, d: int, k_max: int = 0) -> TriangularDtN:
    """Upper-triangular matrices R~_d(t) per Fourier mode of the cut.

    Entry (j, k) for j < k is the resolvent chain
    jump o (A - alpha_j t)^{-1}_B ... (A - alpha_{k-1} t)^{-1}_B P(alpha_k t),
    which collapses to the divided difference of the scalar DtN function over
    the shifts alpha_j t, ..., alpha_k t.
    """
    if d < 1:
        raise DomainError(f"need d >= 1, got {d}")
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t}")
    alphas = [r.value for r in roots_of_minus_one(d)]
    L, masses = _mode_masses(geometry, k_max)
    mats = []
    for nu2, _ in masses:
        M = np.zeros((d, d), dtype=complex)
        for j in range(d):
            for k in range(j, d):
                nodes = [a * t for a in alphas[j:k + 1]]
                M[j, k] = _divided_difference(L, nu2, nodes)
        mats.append(M)
    return TriangularDtN(geometry, t, d, tuple(mats),
                         tuple(m for _, m in masses))


@dataclass(frozen=True)
class OmegaMatrix:
    """Unit lower-triangular change of boundary basis with det = 1."""

    t: float
    order: int
    matrix: np.ndarray

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)


def _complete_homogeneous(n: int, variables: list[complex]) -> complex:
    """h_n(variables): sum of all degree-n monomials."""
    # dp over prefixes: h[j] = h_j using variables seen so far
    h = [1.0 + 0j] + [0j] * n
    for v in variables:
        for j in range(1, n + 1):
            h[j] = h[j] + v * h[j - 1]
    return h[n]


def omega_matrix(t: float, d: int) -> OmegaMatrix:
    """Omega(t): entry (i, j) = t^{i-j} h_{i-j}(alpha_0, ..., alpha_j) for i >= j."""
    if d < 1:
        raise DomainError(f"need d >= 1, got {d}")
    alphas = [r.value for r in roots_of_minus_one(d)]
    M = np.eye(d, dtype=complex)
    for i in range(d):
        for j in range(i):
            M[i, j] = t ** (i - j) * _complete_homogeneous(i - j, alphas[:j + 1])
    return OmegaMatrix(t, d, M)
