"""Separable model geometries and their exact eigenvalue data.

Three flat geometries are supported: a circle of circumference L with mass
m > 0, an interval of length L with Dirichlet or Neumann conditions, and a
flat torus cut along one of its two generating circles.  Every spectrum is
organized by *mode index* j: a nondecreasing eigenvalue per mode plus a
multiplicity, with an exact polynomial tail law that downstream zeta
summation continues analytically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .errors import DomainError


class BoundaryConditionKind(enum.Enum):
    """Dirichlet = restriction to the boundary, Neumann = normal derivative."""

    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class Circle:
    """Closed circle of circumference ``L`` carrying -d2/dx2 + m^2."""

    L: float
    m: float

    def __post_init__(self):
        if self.L <= 0:
            raise DomainError(f"circle circumference must be positive, got {self.L}")
        if self.m <= 0:
            raise DomainError(f"circle mass must be positive, got {self.m}")


@dataclass(frozen=True)
class Interval:
    """Interval [0, L] with -d2/dx2 + m^2 and a boundary condition."""

    L: float
    m: float
    bc: BoundaryConditionKind = BoundaryConditionKind.DIRICHLET

    def __post_init__(self):
        if self.L <= 0:
            raise DomainError(f"interval length must be positive, got {self.L}")
        if self.m < 0:
            raise DomainError(f"interval mass must be nonnegative, got {self.m}")
        if self.bc is BoundaryConditionKind.NEUMANN and self.m == 0:
            raise DomainError("Neumann interval needs m > 0 (zero mode otherwise)")


@dataclass(frozen=True)
class TorusCut:
    """Flat torus circle(L1) x circle(L2), cut along the circle of circumference L2.

    L1 is transverse to the cut: each Fourier mode k along the cut reduces to
    a fiber problem on a circle/interval of length L1 with effective mass
    sqrt(m^2 + (2 pi k / L2)^2).
    """

    L1: float
    L2: float
    m: float

    def __post_init__(self):
        if self.L1 <= 0 or self.L2 <= 0:
            raise DomainError(f"torus circumferences must be positive, got {self.L1}, {self.L2}")
        if self.m <= 0:
            raise DomainError(f"torus mass must be positive, got {self.m}")


ModelGeometry = Circle | Interval | TorusCut


@dataclass(frozen=True)
class ModeProblem:
    """One Fourier mode of the cut torus: a 1D fiber problem of length L1."""

    mode_index: int
    effective_mass_sq: float
    fiber_length: float
    multiplicity: int

    def __post_init__(self):
        if self.multiplicity not in (1, 2):
            raise DomainError(f"mode multiplicity must be 1 or 2, got {self.multiplicity}")


@dataclass(frozen=True)
class WeylDescriptor:
    """Exact large-index law of an eigenvalue stream.

    Modes j >= tail_start have eigenvalue ``scale * (sum_i coeff_i * j**exp_i) ** power``
    with a constant multiplicity.  ``terms`` holds (exponent, coefficient)
    pairs with strictly decreasing exponents; the leading coefficient is
    real positive, lower coefficients may be complex (shifted spectra).
    """

    terms: tuple[tuple[Fraction, complex], ...]
    multiplicity: int
    tail_start: int
    power: Fraction = Fraction(1)
    scale: complex = 1.0

    def __post_init__(self):
        exps = [e for e, _ in self.terms]
        if any(e1 <= e2 for e1, e2 in zip(exps, exps[1:])):
            raise DomainError("weyl exponents must be strictly decreasing")
        if not self.terms or not (complex(self.terms[0][1]).real > 0):
            raise DomainError("weyl leading coefficient must be positive")
        if self.multiplicity < 1 or self.tail_start < 0:
            raise DomainError("weyl multiplicity/tail_start out of range")

    @property
    def p(self) -> Fraction:
        """Leading exponent in the *sorted* enumeration lambda_k ~ a k^p."""
        return self.terms[0][0] * self.power

    @property
    def a(self) -> float:
        """Leading coefficient of the sorted-index law."""
        a0 = complex(self.terms[0][1]).real
        return abs(self.scale) * a0 ** float(self.power) / self.multiplicity ** float(self.p)

    def mode_value(self, j: int) -> complex:
        base = sum(c * j ** float(e) for e, c in self.terms)
        v = self.scale * complex(base) ** float(self.power)
        if v.imag == 0:
            return complex(v.real, 0.0)
        return v


@dataclass(frozen=True)
class EigenSequence:
    """Sorted eigenvalue stream: explicit low modes plus an exact tail law.

    Mode indices run from ``first_index``; ``explicit`` lists (value,
    multiplicity) for modes first_index..tail_start-1, and modes from
    ``weyl.tail_start`` on follow the weyl law exactly.  ``generator``
    exposes the sorted-with-multiplicity enumeration the zeta layer consumes.
    """

    explicit: tuple[tuple[complex, int], ...]
    weyl: WeylDescriptor | None
    count_available: int | None = None  # total eigenvalue count when finite
    first_index: int = 0

    def __post_init__(self):
        if self.weyl is None and self.count_available is None:
            raise DomainError("finite sequence needs an explicit count")
        if self.weyl is not None:
            if len(self.explicit) != self.weyl.tail_start - self.first_index:
                raise DomainError("explicit modes must cover exactly [first_index, tail_start)")

    # -- mode-level access -------------------------------------------------
    def mode_value(self, j: int) -> complex:
        i = j - self.first_index
        if i < 0:
            raise IndexError(j)
        if i < len(self.explicit):
            return complex(self.explicit[i][0])
        if self.weyl is None:
            raise IndexError(j)
        return self.weyl.mode_value(j)

    def mode_multiplicity(self, j: int) -> int:
        i = j - self.first_index
        if i < 0:
            raise IndexError(j)
        if i < len(self.explicit):
            return self.explicit[i][1]
        if self.weyl is None:
            raise IndexError(j)
        return self.weyl.multiplicity

    def modes(self) -> Iterator[tuple[complex, int]]:
        j = self.first_index
        while True:
            if self.weyl is None and j - self.first_index >= len(self.explicit):
                return
            yield self.mode_value(j), self.mode_multiplicity(j)
            j += 1

    # -- sorted enumeration ------------------------------------------------
    def generator(self, i: int) -> float:
        """i-th eigenvalue (0-based) of the sorted stream, multiplicity repeated."""
        if i < 0:
            raise IndexError(i)
        if self.count_available is not None and i >= self.count_available:
            raise IndexError(i)
        seen = 0
        for v, mult in self.modes():
            if i < seen + mult:
                return v.real if v.imag == 0 else v  # model spectra are real
            seen += mult
        raise IndexError(i)

    def eigenvalues(self, n: int) -> list[float]:
        """First n sorted eigenvalues with multiplicity."""
        out: list[float] = []
        for v, mult in self.modes():
            for _ in range(mult):
                out.append(v.real)
                if len(out) == n:
                    return out
        return out

    def shifted(self, x: complex) -> "EigenSequence":
        """Sequence with x added to every eigenvalue (law constant term shifts)."""
        explicit = tuple((v + x, m) for v, m in self.explicit)
        weyl = self.weyl
        if weyl is not None:
            if weyl.power != 1 or weyl.scale != 1.0:
                raise DomainError("shift only supported for plain polynomial laws")
            weyl = _shift_law(weyl, x)
        return EigenSequence(explicit, weyl, self.count_available, self.first_index)

    @staticmethod
    def from_values(values, multiplicities=None) -> "EigenSequence":
        mults = multiplicities or [1] * len(values)
        explicit = tuple((complex(v), int(m)) for v, m in zip(values, mults))
        return EigenSequence(explicit, None, sum(m for _, m in explicit))


def _shift_law(weyl: WeylDescriptor, x: complex) -> WeylDescriptor:
    terms = dict(weyl.terms)
    zero = Fraction(0)
    terms[zero] = terms.get(zero, 0.0) + x
    ordered = tuple(sorted(terms.items(), key=lambda t: t[0], reverse=True))
    ordered = tuple((e, c) for e, c in ordered if c != 0 or e == weyl.terms[0][0])
    return WeylDescriptor(ordered, weyl.multiplicity, weyl.tail_start,
                          weyl.power, weyl.scale)


# ---------------------------------------------------------------------------
# spectra of the model operators
# ---------------------------------------------------------------------------

def circle_eigenvalues(L: float, m: float) -> EigenSequence:
    """Spectrum {m^2 + (2 pi k / L)^2 : k in Z} of the massive circle operator."""
    Circle(L, m)  # validate
    c = (2.0 * math.pi / L) ** 2
    weyl = WeylDescriptor(
        terms=((Fraction(2), c), (Fraction(0), m * m)),
        multiplicity=2,
        tail_start=1,
    )
    return EigenSequence(explicit=((complex(m * m), 1),), weyl=weyl)


def interval_eigenvalues(L: float, m: float,
                         bc: BoundaryConditionKind = BoundaryConditionKind.DIRICHLET
                         ) -> EigenSequence:
    """Spectrum of -d2/dx2 + m^2 on [0, L] with the given boundary condition."""
    Interval(L, m, bc)  # validate
    c = (math.pi / L) ** 2
    weyl = WeylDescriptor(
        terms=((Fraction(2), c), (Fraction(0), m * m)),
        multiplicity=1,
        tail_start=1,
    )
    if bc is BoundaryConditionKind.DIRICHLET:
        return EigenSequence(explicit=(), weyl=weyl, first_index=1)
    return EigenSequence(explicit=((complex(m * m), 1),), weyl=weyl)


def torus_mode_problems(g: TorusCut, k_max: int) -> list[ModeProblem]:
    """Fourier reduction of the cut torus: fiber problems for modes k = 0..k_max."""
    if k_max < 0:
        raise DomainError(f"k_max must be nonnegative, got {k_max}")
    out = []
    for k in range(k_max + 1):
        nu2 = g.m ** 2 + (2.0 * math.pi * k / g.L2) ** 2
        out.append(ModeProblem(mode_index=k, effective_mass_sq=nu2,
                               fiber_length=g.L1, multiplicity=1 if k == 0 else 2))
    return out


def power_sequence(seq: EigenSequence, d: int) -> EigenSequence:
    """Sequence {lambda_k^d}; the tail law is expanded to an exact polynomial."""
    if d < 1:
        raise DomainError(f"power must be >= 1, got {d}")
    if d == 1:
        return seq
    explicit = tuple((v ** d, m) for v, m in seq.explicit)
    weyl = seq.weyl
    if weyl is not None:
        if weyl.power != 1 or weyl.scale != 1.0:
            raise DomainError("power_sequence needs a plain polynomial law")
        terms = {Fraction(0): 1.0 + 0.0j}
        base = dict(weyl.terms)
        for _ in range(d):
            nxt: dict[Fraction, complex] = {}
            for e1, c1 in terms.items():
                for e2, c2 in base.items():
                    nxt[e1 + e2] = nxt.get(e1 + e2, 0.0) + c1 * c2
            terms = nxt
        ordered = tuple(sorted(((e, c) for e, c in terms.items() if c != 0),
                               key=lambda t: t[0], reverse=True))
        weyl = WeylDescriptor(ordered, weyl.multiplicity, weyl.tail_start)
    return EigenSequence(explicit, weyl, seq.count_available, seq.first_index)
