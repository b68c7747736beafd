"""Spectral zeta functions, analytic continuation, and log-determinants.

The continuation strategy: split the eigenvalue sum at a mode index J where
the tail law dominates, sum the head directly, and continue the tail in
closed form.  For a polynomial mode law ``a0 j^p0 + ...`` the tail

    sum_{j>=J} (a0 j^p0 + ...)^(-s)
      = a0^(-s) sum_n C(-s, n) sum_w c_{n,w} zetaH(p0 s + w, J)

with the inner coefficients coming from powers of the subleading part.  All
special functions are evaluated with mpmath at elevated precision, so the
double-precision results carry error estimates far below every tolerance
used downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .errors import BranchError, ContinuationError, DomainError, FitError
from .geometry import EigenSequence, WeylDescriptor

_DPS = 30
_TAIL_TOL = mp.mpf("1e-28")


@dataclass(frozen=True)
class ZetaResult:
    value_at: complex
    derivative_at: complex
    error_estimate: float
    terms_used: int


@dataclass(frozen=True)
class LogDet:
    value: complex
    error_estimate: float

    @property
    def real(self) -> float:
        return self.value.real


@dataclass(frozen=True)
class BranchConvention:
    """Cut along angle pi with an exclusion sector of half-width/radius eps."""

    cut_angle: float = math.pi
    exclusion_radius: float = 0.1

    def violates(self, z: complex) -> bool:
        eps = self.exclusion_radius
        if abs(z) < eps:
            return True
        return abs(abs(math.atan2(z.imag, z.real)) - math.pi) < eps


@dataclass(frozen=True)
class HeatTraceExpansion:
    """Fitted small-t expansion theta(t) ~ sum c_i t^i."""

    terms: tuple[tuple[Fraction, float], ...]
    residual: float
    condition_number: float

    def __post_init__(self):
        exps = [e for e, _ in self.terms]
        if any(e1 >= e2 for e1, e2 in zip(exps, exps[1:])):
            raise DomainError("expansion exponents must be strictly increasing")

    @property
    def i0(self) -> Fraction:
        return self.terms[0][0]

    def coefficient(self, exponent) -> float:
        for e, c in self.terms:
            if e == Fraction(exponent):
                return c
        raise KeyError(exponent)

    def evaluate(self, t: float) -> float:
        return sum(c * t ** float(e) for e, c in self.terms)


# ---------------------------------------------------------------------------
# tail continuation
# ---------------------------------------------------------------------------

def _binom_neg(s, n: int):
    """C(-s, n) = (-1)^n (s)_n / n! as an mpmath value."""
    if n == 0:
        return mp.mpf(1)
    return (-1) ** n * mp.rf(s, n) / mp.factorial(n)


def _binom_neg_deriv(s, n: int):
    """d/ds C(-s, n)."""
    if n == 0:
        return mp.mpf(0)
    # rising factorial (s)_n = prod_{k=0}^{n-1} (s+k); product-rule derivative
    factors = [s + k for k in range(n)]
    total = mp.mpf(0)
    for i in range(n):
        prod = mp.mpf(1)
        for j in range(n):
            if j != i:
                prod *= factors[j]
        total += prod
    return (-1) ** n * total / mp.factorial(n)


class _TailSum:
    """Continuation of sum_{j>=J} (a0 j^p0 + lower)^(-sigma)."""

    def __init__(self, terms, J: int):
        self.p0 = mp.mpf(float(terms[0][0]))
        self.a0 = mp.mpc(terms[0][1])
        self.J = J
        sub = {float(terms[0][0] - e): mp.mpc(c) / self.a0 for e, c in terms[1:]}
        self.u_norm = sum(abs(c) * mp.mpf(J) ** (-d) for d, c in sub.items())
        if self.u_norm > 0.5:
            raise ContinuationError(
                f"tail split index {J} too small for law (u-norm {float(self.u_norm):.3g})")
        self._expansion = self._expand(sub)

    def _expand(self, sub):
        """List of (n, {w: coeff}) with u^n truncated below _TAIL_TOL at j=J."""
        out = [(0, {mp.mpf(0): mp.mpc(1)})]
        if not sub:
            return out
        J = mp.mpf(self.J)
        power = dict(sub)
        n = 1
        while True:
            kept = {w: c for w, c in power.items() if abs(c) * J ** (-w) > _TAIL_TOL}
            if not kept and n > 1:
                break
            out.append((n, kept or dict(power)))
            # magnitude of the whole n-th order term at j = J
            if self.u_norm ** n * (n + 4) < _TAIL_TOL or n > 120:
                break
            nxt: dict = {}
            for w1, c1 in power.items():
                for w2, c2 in sub.items():
                    key = w1 + w2
                    nxt[key] = nxt.get(key, mp.mpc(0)) + c1 * c2
            power = {w: c for w, c in nxt.items() if abs(c) * J ** (-w) > _TAIL_TOL / 10}
            if not power:
                break
            n += 1
        return out

    def _pieces(self, sigma):
        """Yield (g(s)-factor callable data, w) per expansion term at sigma."""
        for n, coeffs in self._expansion:
            for w, c in coeffs.items():
                yield n, w, c

    def value(self, sigma):
        """Tail value at sigma; raises ContinuationError on a pole."""
        total = mp.mpc(0)
        for n, w, c in self._pieces(sigma):
            arg = self.p0 * sigma + w
            if abs(arg - 1) < mp.mpf("1e-12"):
                if abs(_binom_neg(sigma, n) * c) > mp.mpf("1e-25"):
                    raise ContinuationError(f"tail pole at sigma={complex(sigma)}")
                continue
            total += _binom_neg(sigma, n) * c * mp.zeta(arg, self.J)
        return self.a0 ** (-sigma) * total

    def value_and_deriv(self, sigma):
        """(tail(sigma), tail'(sigma)); pole terms allowed only if killed by a zero of C(-s,n)."""
        val = mp.mpc(0)
        der = mp.mpc(0)
        loga0 = mp.log(self.a0)
        pref = self.a0 ** (-sigma)
        for n, w, c in self._pieces(sigma):
            arg = self.p0 * sigma + w
            b = _binom_neg(sigma, n)
            db = _binom_neg_deriv(sigma, n)
            if abs(arg - 1) < mp.mpf("1e-12"):
                # zetaH(1 + p0 (s-sigma), J) = 1/(p0 (s-sigma)) - psi(J) + O(s-sigma)
                g = b * c
                if abs(g) > mp.mpf("1e-25"):
                    raise ContinuationError(f"tail pole at sigma={complex(sigma)}")
                gp = db * c  # d/ds of the analytic prefactor at the pole
                val += gp / self.p0
                d2 = c * mp.diff(lambda s: _binom_neg(s, n), sigma, 2)
                der += d2 / (2 * self.p0) - gp * mp.psi(0, self.J)
                continue
            z = mp.zeta(arg, self.J)
            dz = mp.zeta(arg, self.J, 1)
            val += b * c * z
            der += db * c * z + b * c * self.p0 * dz
        return pref * val, pref * (der - loga0 * val)

    def laurent(self, sigma0):
        """(residue, finite part) of the tail at a (possibly) simple pole sigma0."""
        res = mp.mpc(0)
        fin = mp.mpc(0)
        loga0 = mp.log(self.a0)
        pref = self.a0 ** (-sigma0)
        for n, w, c in self._pieces(sigma0):
            arg = self.p0 * sigma0 + w
            b = _binom_neg(sigma0, n)
            if abs(arg - 1) < mp.mpf("1e-12"):
                g = b * c
                dg = _binom_neg_deriv(sigma0, n) * c
                res += g / self.p0
                fin += dg / self.p0 - g * mp.psi(0, self.J)
            else:
                fin += b * c * mp.zeta(arg, self.J)
        # multiply by a0^{-s} = pref (1 - log a0 (s-sigma0) + ...)
        return pref * res, pref * (fin - loga0 * res)


# ---------------------------------------------------------------------------
# sequence-level summation
# ---------------------------------------------------------------------------

def _split_index(weyl: WeylDescriptor, shift: complex) -> int:
    p0 = float(weyl.terms[0][0])
    a0 = complex(weyl.terms[0][1])
    lower = [(float(p0 - e), complex(c)) for e, c in weyl.terms[1:]]
    if shift != 0:
        # shift merges into the constant term of the inner polynomial
        lower = _merge_shift(lower, p0, shift)
    J = max(weyl.tail_start, 1)
    while sum(abs(c) / abs(a0) * J ** (-d) for d, c in lower) > 0.25:
        J *= 2
        if J > 10 ** 7:
            raise ContinuationError("tail split index exceeds budget 1e7")
    return J


def _merge_shift(lower, p0, shift):
    out = dict(lower)
    out[p0] = out.get(p0, 0.0) + complex(shift)
    return list(out.items())


def _shifted_terms(weyl: WeylDescriptor, shift: complex):
    terms = {e: complex(c) for e, c in weyl.terms}
    z = Fraction(0)
    terms[z] = terms.get(z, 0.0) + complex(shift)
    return tuple(sorted(terms.items(), key=lambda t: t[0], reverse=True))


def _head_modes(seq: EigenSequence, J: int):
    """(value, mult) for all modes with index < J (or all modes if finite)."""
    out = []
    j = seq.first_index
    while (seq.weyl is not None and j < J) or (
            seq.weyl is None and j - seq.first_index < len(seq.explicit)):
        out.append((seq.mode_value(j), seq.mode_multiplicity(j)))
        j += 1
    return out


def _check_branch(values, branch: BranchConvention | None):
    for v, _ in values:
        z = complex(v)
        if z == 0 or (z.real < 0 and z.imag == 0):
            raise BranchError(f"spectrum point {z} on the branch cut")
        if branch is not None and branch.violates(z):
            raise BranchError(f"spectrum point {z} inside the protected sector")


def zeta_at(seq: EigenSequence, s: complex, shift: complex = 0.0, *,
            continued: bool = False) -> ZetaResult:
    """zeta(s, shift) = sum (lambda_k + shift)^(-s), continued past the abscissa.

    With ``continued=False`` the call insists on absolute convergence and
    raises ContinuationError in the divergence region.
    """
    if complex(shift).real < 0:
        raise DomainError(f"shift must have nonnegative real part, got {shift}")
    with mp.workdps(_DPS):
        if seq.weyl is not None and seq.weyl.power != 1 and shift != 0:
            raise ContinuationError("shifts require a plain polynomial law")
        if seq.weyl is not None and not continued:
            abscissa = 1.0 / float(seq.weyl.p)
            if complex(s).real <= abscissa:
                raise ContinuationError(
                    f"Re s = {complex(s).real} is at or below the abscissa {abscissa}; "
                    "pass continued=True for analytic continuation")
        sm = mp.mpc(s)
        if seq.weyl is None:
            head = _head_modes(seq, 0)
            _check_branch([(v + shift, m) for v, m in head], None)
            val = sum(m * (mp.mpc(v) + shift) ** (-sm) for v, m in head)
            der = sum(-m * mp.log(mp.mpc(v) + shift) * (mp.mpc(v) + shift) ** (-sm)
                      for v, m in head)
            return ZetaResult(complex(val), complex(der), 1e-15 * (1 + abs(complex(val))),
                              len(head))
        weyl = seq.weyl
        J = _split_index(weyl, shift)
        head = [(v + shift, m) for v, m in _head_modes(seq, J)]
        _check_branch(head, None)
        hv = sum(m * mp.mpc(v) ** (-sm) for v, m in head)
        hd = sum(-m * mp.log(mp.mpc(v)) * mp.mpc(v) ** (-sm) for v, m in head)
        tail = _TailSum(_shifted_terms(weyl, shift), J)
        power = mp.mpf(float(weyl.power))
        scale = mp.mpc(weyl.scale)
        tv, td = tail.value_and_deriv(power * sm)
        mult = weyl.multiplicity
        val = hv + mult * scale ** (-sm) * tv
        der = hd + mult * scale ** (-sm) * (power * td - mp.log(scale) * tv)
        err = float(10 ** (-_DPS + 6)) * (1 + abs(complex(val)))
        return ZetaResult(complex(val), complex(der), max(err, 5e-16 * (1 + abs(complex(val)))),
                          len(head))


def zeta_laurent(seq: EigenSequence, s0: complex, shift: complex = 0.0):
    """(residue, finite part) of zeta(s, shift) at s0 (residue 0 off poles)."""
    with mp.workdps(_DPS):
        sm = mp.mpc(s0)
        if seq.weyl is None:
            r = zeta_at(seq, s0, shift)
            return 0j, r.value_at
        weyl = seq.weyl
        if weyl.power != 1 and shift != 0:
            raise ContinuationError("shifts require a plain polynomial law")
        J = _split_index(weyl, shift)
        head = [(v + shift, m) for v, m in _head_modes(seq, J)]
        _check_branch(head, None)
        hv = sum(m * mp.mpc(v) ** (-sm) for v, m in head)
        tail = _TailSum(_shifted_terms(weyl, shift), J)
        power = mp.mpf(float(weyl.power))
        scale = mp.mpc(weyl.scale)
        res_t, fin_t = tail.laurent(power * sm)
        mult = weyl.multiplicity
        pref = scale ** (-sm)
        residue = mult * pref * res_t / power
        finite = hv + mult * pref * (fin_t - mp.log(scale) * res_t / power)
        return complex(residue), complex(finite)


def log_det(seq: EigenSequence, shift: complex = 0.0) -> LogDet:
    """-(d/ds) zeta(s, shift) at s = 0, the zeta-regularized log-determinant."""
    r = zeta_at(seq, 0.0, shift, continued=True)
    value = -r.derivative_at
    if _spectrum_is_real_positive(seq, shift):
        if abs(value.imag) > 10 * r.error_estimate:
            raise ContinuationError(
                f"imaginary residue {value.imag} in a real-spectrum determinant")
        value = complex(value.real, 0.0)
    return LogDet(value, r.error_estimate)


def _spectrum_is_real_positive(seq: EigenSequence, shift: complex) -> bool:
    if complex(shift).imag != 0:
        return False
    for v, _ in seq.explicit:
        if complex(v).imag != 0:
            return False
    if seq.weyl is not None:
        if complex(seq.weyl.scale).imag != 0:
            return False
        if any(complex(c).imag != 0 for _, c in seq.weyl.terms):
            return False
    return True


def complex_log_det(values, weyl: WeylDescriptor | None = None,
                    multiplicities=None,
                    branch: BranchConvention = BranchConvention()) -> LogDet:
    """Zeta-determinant of a complex spectrum with Agmon angle pi.

    Finite spectra (``weyl is None``) are summed directly.  Otherwise
    ``values[k]`` is the k-th mode of an infinite spectrum whose modes follow
    ``weyl`` asymptotically, with values[k]/law(k) -> 1 exponentially; the
    law part is continued in closed form and the ratio sum converges.
    """
    mults = list(multiplicities) if multiplicities is not None else None
    vals = [complex(v) for v in values]
    if mults is None:
        mults = [1] * len(vals)
        if weyl is not None:
            mults = [1 if k == 0 else weyl.multiplicity for k in range(len(vals))]
    _check_branch(list(zip(vals, mults)), branch)
    with mp.workdps(_DPS):
        if weyl is None:
            total = sum(m * mp.log(mp.mpc(v)) for v, m in zip(vals, mults))
            return LogDet(complex(total), 1e-15 * (1 + abs(complex(total))))
        if len(vals) <= weyl.tail_start:
            raise DomainError("need at least one law-governed value for regularization")
        explicit = tuple((weyl.mode_value(k), mults[k]) for k in range(weyl.tail_start))
        law_seq = EigenSequence(explicit, weyl)
        base = log_det(law_seq)
        corr = mp.mpc(0)
        last = mp.mpf(0)
        for k, (v, m) in enumerate(zip(vals, mults)):
            ratio = mp.mpc(v) / mp.mpc(law_seq.mode_value(k))
            term = m * mp.log(ratio)
            corr += term
            last = abs(term)
        err = base.error_estimate + float(2 * last) + 1e-15 * (1 + abs(complex(corr)))
        return LogDet(complex(base.value + complex(corr)), err)


# ---------------------------------------------------------------------------
# heat traces
# ---------------------------------------------------------------------------

def heat_trace(seq: EigenSequence, t: float) -> float:
    """theta(t) = sum e^{-t lambda_k}, truncated below the roundoff floor."""
    if t <= 0:
        raise DomainError(f"heat trace needs t > 0, got {t}")
    acc = 0.0
    for v, m in seq.modes():
        term = m * math.exp(-t * v.real)
        acc += term
        if term < 1e-20 * (acc + 1.0):
            break
    return acc


def fit_heat_expansion(seq: EigenSequence, t_grid, exponents) -> HeatTraceExpansion:
    """Least-squares coefficients of theta(t) on the basis {t^e : e in exponents}."""
    t = np.asarray(sorted(t_grid), dtype=float)
    if t[0] <= 0:
        raise DomainError("t grid must be positive")
    if t[-1] / t[0] < 10.0:
        raise DomainError("t grid must span at least one decade")
    exps = sorted(Fraction(e) for e in exponents)
    theta = np.array([heat_trace(seq, ti) for ti in t])
    design = np.column_stack([t ** float(e) for e in exps])
    # normalize columns so the condition number reflects the basis geometry
    norms = np.linalg.norm(design, axis=0)
    cond = float(np.linalg.cond(design / norms))
    if cond > 1e12:
        raise FitError(f"heat-expansion design matrix ill-conditioned (cond {cond:.3g})")
    coef, _, _, _ = np.linalg.lstsq(design / norms, theta, rcond=None)
    coef = coef / norms
    resid = float(np.max(np.abs(design @ coef - theta)))
    return HeatTraceExpansion(tuple(zip(exps, (float(c) for c in coef))), resid, cond)


def mellin_zeta(seq: EigenSequence, s: float, expansion: HeatTraceExpansion,
                t_split: float = 0.05):
    """Gamma(s) zeta(s) via the Mellin transform of the heat trace.

    Integrates theta(t) t^{s-1} numerically on [t_split, inf) and uses the
    fitted small-t expansion below t_split.  Returns (value, error_estimate).
    """
    with mp.workdps(_DPS):
        upper = mp.quad(lambda t: heat_trace(seq, float(t)) * mp.mpf(t) ** (s - 1),
                        [t_split, 1.0, 10.0, mp.inf])
        lower = mp.mpf(0)
        for e, c in expansion.terms:
            lower += c * mp.mpf(t_split) ** (float(e) + s) / (float(e) + s)
        err = expansion.residual * t_split ** s / s + 1e-12
        return float(upper + lower), float(err)
