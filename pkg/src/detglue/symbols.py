"""Exact resolvent-parametrix symbol calculus for Laplace-type model operators.

Scalar symbols in one covariable: an operator family P(lambda) of order m
with parameter weight chi is described by its homogeneous components
p_m, p_{m-1}, ..., p_0 (sympy expressions in x, xi, lam).  The parametrix
symbols r_{-m-j} are built by the recursion

    r_{-m}   = (mu - p_m)^{-1}
    r_{-m-j} = -(mu - p_m)^{-1} sum_{k<j} sum_{|a|+l+k=j}
                 (1/a!) d_xi^a p_{m-l} D_x^a r_{-m-k}

and stored exactly as sums q_l (mu - p_m)^{-l} with polynomial q_l.  The
minus-sign convention matches the contour orientation used to define
complex powers: summing the constant-coefficient terms reproduces the
geometric expansion of (mu - p_m + sum_{l>=1} p_{m-l})^{-1}.

The continued mu-contour integrals collapse to

    J_k(s) = sum_l C_l(s) int q_l p_m^{-s-l+1} dxi,
    C_l(s) = (-1)^{l-1} s (s+1) ... (s+l-2) / (l-1)!

with C_1 = 1; since every term of r_{-m-k} has pole order l >= k+1 and
C_l(0) = 0 for l >= 2, the values J_k(0) vanish for k > d while the
s-derivative at 0 yields the expansion constant pi_0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import sympy as sp

from .errors import ContinuationError, DomainError

x, xi, mu = sp.symbols("x xi mu")
lam = sp.Symbol("lam", positive=True)
_DPS = 30


@dataclass(frozen=True)
class OperatorSymbolData:
    """Homogeneous symbol components of a scalar elliptic family.

    components maps the homogeneity degree j to p_j(lam; x, xi); degree
    means p_j(tau^chi lam; x, tau xi) = tau^j p_j.
    """

    m: int
    chi: int
    d: int
    components: dict

    def __post_init__(self):
        if self.m < 1 or self.d != 1:
            raise DomainError("scalar model class: order >= 1, dimension 1")
        if self.m not in self.components:
            raise DomainError("leading component p_m missing")
        pm = self.components[self.m]
        # ellipticity with parameter on a sample grid
        for xv in (-3.0, -1.0, 0.5, 2.0):
            for lv in (0.25, 1.0, 4.0):
                v = complex(pm.subs({x: 0, xi: xv, lam: lv}))
                if abs(v) == 0:
                    raise DomainError(f"p_m vanishes at xi={xv}, lam={lv}")

    @property
    def p_m(self) -> sp.Expr:
        return self.components[self.m]

    def component(self, degree: int) -> sp.Expr:
        return self.components.get(degree, sp.Integer(0))


@dataclass(frozen=True)
class SymbolExpr:
    """One parametrix term r_{-m-j} = sum_l q_l (mu - p_m)^{-l}."""

    op: OperatorSymbolData
    grading: int  # j; the term is homogeneous of degree -m-j
    terms: dict  # pole order l -> polynomial q_l

    def as_rational(self) -> sp.Expr:
        pm = self.op.p_m
        return sp.Add(*(q * (mu - pm) ** (-l) for l, q in self.terms.items()))

    def is_zero(self) -> bool:
        return all(sp.expand(q) == 0 for q in self.terms.values())

    def min_pole_order(self) -> int:
        orders = [l for l, q in self.terms.items() if sp.expand(q) != 0]
        return min(orders) if orders else 0

    def canonical_text(self) -> str:
        parts = []
        for l in sorted(self.terms):
            q = sp.expand(self.terms[l])
            if q == 0:
                continue
            parts.append(f"(mu - p_m)^-{l} * ({sp.sstr(q, order='lex')})")
        body = " + ".join(parts) if parts else "0"
        return f"r[-{self.op.m}-{self.grading}] = {body}"


def _term_mul(terms: dict, factor: sp.Expr) -> dict:
    return {l: sp.expand(q * factor) for l, q in terms.items()}


def _term_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for l, q in b.items():
        out[l] = sp.expand(out.get(l, sp.Integer(0)) + q)
    return out


def _term_diff(terms: dict, op: OperatorSymbolData, var: sp.Symbol) -> dict:
    """Derivative of sum q_l (mu - p_m)^{-l} with respect to var."""
    dpm = sp.diff(op.p_m, var)
    out: dict = {}
    for l, q in terms.items():
        out[l] = sp.expand(out.get(l, sp.Integer(0)) + sp.diff(q, var))
        if dpm != 0:
            out[l + 1] = sp.expand(out.get(l + 1, sp.Integer(0)) + l * q * dpm)
    return out


def parametrix_terms(op: OperatorSymbolData, j_max: int) -> list[SymbolExpr]:
    """Exact parametrix symbols [r_{-m}, ..., r_{-m-j_max}]."""
    if j_max > 6:
        raise DomainError(f"j_max = {j_max} exceeds the complexity guard 6")
    rs = [SymbolExpr(op, 0, {1: sp.Integer(1)})]
    for j in range(1, j_max + 1):
        acc: dict = {}
        for k in range(j):
            for l in range(0, j - k + 1):
                alpha = j - k - l
                p_comp = op.component(op.m - l)
                if p_comp == 0:
                    continue
                dp = sp.diff(p_comp, xi, alpha) if alpha else p_comp
                if dp == 0:
                    continue
                dr = rs[k].terms
                for _ in range(alpha):
                    dr = _term_diff(dr, op, x)
                # D_x = -i d/dx
                factor = dp * (-sp.I) ** alpha / sp.factorial(alpha)
                acc = _term_add(acc, _term_mul(dr, factor))
        # multiply by -(mu - p_m)^{-1}: negate and raise every pole order
        new = {l + 1: sp.expand(-q) for l, q in acc.items() if sp.expand(q) != 0}
        rs.append(SymbolExpr(op, j, new))
    return rs


def check_homogeneity(term: SymbolExpr, tau) -> bool:
    """Exact check of r_j(tau^m mu, tau^chi lam; x, tau xi) = tau^{-m-j} r_j."""
    t = sp.Rational(tau)
    if t <= 0:
        raise DomainError(f"scaling factor must be positive, got {tau}")
    op = term.op
    expr = term.as_rational()
    scaled = expr.subs({xi: t * xi, mu: t ** op.m * mu, lam: t ** op.chi * lam},
                       simultaneous=True)
    target = t ** (-op.m - term.grading) * expr
    return sp.cancel(sp.together(scaled - target)) == 0


def constant_coefficient_closure(op: OperatorSymbolData, j_max: int) -> bool:
    """Exact grading-by-grading match against the geometric-series oracle.

    For x-independent symbols the recursion resums to
    (mu - p_m + sum_{l>=1} p_{m-l})^{-1}; the oracle expands that geometric
    series and compares each grading j <= j_max term by term.
    """
    if any(sp.diff(p, x) != 0 for p in op.components.values()):
        raise DomainError("closure oracle applies to x-independent symbols")
    rs = parametrix_terms(op, j_max)
    pm = op.p_m
    lower = {op.m - l: op.component(op.m - l) for l in range(1, op.m + 1)}
    # geometric series: sum_n (-b)^n (mu - p_m)^{-n-1}, b = sum of lower parts,
    # graded by total drop in homogeneity
    graded: dict[int, sp.Expr] = {0: (mu - pm) ** (-1)}
    # expand (-b)^n into graded pieces: each p_{m-l} factor drops the grade by l
    def products(n):
        if n == 0:
            return {0: sp.Integer(1)}
        prev = products(n - 1)
        out: dict[int, sp.Expr] = {}
        for g, e in prev.items():
            for l in range(1, op.m + 1):
                p = lower.get(op.m - l, sp.Integer(0))
                if p == 0:
                    continue
                out[g + l] = sp.expand(out.get(g + l, sp.Integer(0)) - e * p)
        return out

    for n in range(1, j_max + 1):
        for g, e in products(n).items():
            if g > j_max or e == 0:
                continue
            graded[g] = graded.get(g, sp.Integer(0)) + e * (mu - pm) ** (-n - 1)
    for j in range(j_max + 1):
        diff = sp.together(rs[j].as_rational() - graded.get(j, sp.Integer(0)))
        if sp.cancel(diff) != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# continued contour integrals
# ---------------------------------------------------------------------------

def _c_factor_value(l: int, s) -> complex:
    """C_l(s) = (-1)^{l-1} s (s+1) ... (s+l-2) / (l-1)!."""
    if l == 1:
        return 1.0 + 0j
    with mp.workdps(_DPS):
        prod = mp.mpc(1)
        for i in range(l - 1):
            prod *= (mp.mpc(s) + i)
        return complex((-1) ** (l - 1) * prod / mp.factorial(l - 1))


def _c_factor_deriv0(l: int) -> float:
    """d/ds C_l(s) at s = 0 (l >= 2): (-1)^{l-1} / (l-1)."""
    if l < 2:
        raise DomainError("derivative factor defined for l >= 2")
    return (-1) ** (l - 1) / (l - 1)


def _xi_integral(q: sp.Expr, pm: sp.Expr, exponent: complex, omega: complex,
                 x_val: float):
    """int q(xi) p_m(xi)^{exponent} dxi over the real line, with error."""
    subs = {lam: omega, x: x_val}
    q_f = sp.lambdify(xi, q.subs(subs), "mpmath")
    p_f = sp.lambdify(xi, pm.subs(subs), "mpmath")

    def integrand(t):
        return q_f(t) * mp.power(p_f(t), exponent)

    with mp.workdps(_DPS):
        val, err = mp.quad(integrand, [-mp.inf, -2, 0, 2, mp.inf], error=True)
        return complex(val), float(err)


def J_k_value(op: OperatorSymbolData, k: int, s: complex, omega: complex = 1.0,
              x_val: float = 0.0):
    """J_k(s, omega; x) = sum_l C_l(s) int q_l p_m^{-s-l+1} dxi, with error.

    Valid where the xi-integrals converge absolutely: Re s > (d-k)/m, or
    s = 0 with k > d.
    """
    rs = parametrix_terms(op, k)
    term = rs[k]
    s_ok = complex(s).real > (op.d - k) / op.m
    if not s_ok and not (k > op.d and s == 0):
        raise DomainError(
            f"s = {s} outside the convergence region Re s > {(op.d - k) / op.m}")
    total = 0j
    err = 0.0
    for l, q in term.terms.items():
        if sp.expand(q) == 0:
            continue
        c = _c_factor_value(l, s)
        val, e = _xi_integral(q, op.p_m, -(complex(s) + l - 1), omega, x_val)
        total += c * val
        err += abs(c) * e + 1e-25 * abs(val)
    return total, err


@dataclass(frozen=True)
class J0Result:
    value: complex | None
    is_pole: bool
    pole_location: complex | None = None


def J0_closed_form(op: OperatorSymbolData, s: complex, omega: complex = 1.0,
                   x_val: float = 0.0) -> J0Result:
    """J_0(s) = int p_m^{-s} dxi in closed form for p_m = xi^2 + lam.

    Equals sqrt(pi) Gamma(s - 1/2) / Gamma(s) * omega^{1/2 - s}; simple
    poles where Gamma(s - 1/2) blows up (s = 1/2, -1/2, -3/2, ...).
    """
    if sp.expand(op.p_m - (xi ** 2 + lam)) != 0:
        raise DomainError("closed form available for the model symbol xi^2 + lam")
    sm = complex(s)
    half_shift = sm - 0.5
    if abs(half_shift - round(half_shift.real)) < 1e-12 and round(half_shift.real) <= 0 \
            and abs(half_shift.imag) < 1e-12:
        return J0Result(None, True, sm)
    with mp.workdps(_DPS):
        v = mp.sqrt(mp.pi) * mp.gamma(sm - 0.5) / mp.gamma(sm) \
            * mp.power(mp.mpc(omega), 0.5 - sm)
        return J0Result(complex(v), False)


@dataclass(frozen=True)
class Pi0Report:
    value: float
    contributions: dict
    error_estimate: float


def pi0_symbolic(op: OperatorSymbolData, volume: float, omega: complex = 1.0,
                 x_val: float = 0.0, j_max: int | None = None) -> Pi0Report:
    """pi_0 = (Vol / (2 pi)^d) d/ds J_d(s)|_0 via the product rule.

    Every term of r_{-m-d} carries pole order l >= 2, so C_l(0) = 0 and

        d/ds [C_l(s) I_l(s)]|_0 = C_l'(0) I_l(0)

    with I_l(0) = int q_l p_m^{1-l} dxi.  Odd-in-xi parts of q_l integrate
    to zero over the symmetric line and are dropped before quadrature (they
    are also the only possible sources of non-absolute convergence here).
    """
    if j_max is None:
        j_max = op.d
    if j_max < op.d:
        raise DomainError("need the recursion at least to grading d")
    rs = parametrix_terms(op, op.d)
    term = rs[op.d]
    contributions = {}
    total = 0j
    err = 0.0
    for l, q in term.terms.items():
        q_even = sp.expand((q + q.subs(xi, -xi)) / 2)
        if q_even == 0:
            continue
        if l < 2:
            raise ContinuationError("unexpected pole order 1 at grading d")
        val, e = _xi_integral(q_even, op.p_m, -(l - 1), omega, x_val)
        contrib = _c_factor_deriv0(l) * val
        contributions[(l, op.d)] = contrib
        total += contrib
        err += abs(_c_factor_deriv0(l)) * e
    value = volume / (2.0 * math.pi) ** op.d * total
    if abs(value.imag) > 1e-10 + 10 * err:
        raise ContinuationError(f"pi0 came out non-real: {value}")
    return Pi0Report(float(value.real), contributions,
                     float(volume / (2 * math.pi) ** op.d * err + 1e-12))


def circle_operator_symbols(m_mass: float = 1.0) -> OperatorSymbolData:
    """Symbol data of A + lambda on the circle: p_2 = xi^2 + lam, p_0 = m^2."""
    return OperatorSymbolData(2, 2, 1, {2: xi ** 2 + lam,
                                        0: sp.Rational(m_mass) ** 2})


def rotated_control_symbols(b: float = 1.0) -> OperatorSymbolData:
    """Negative control A + lambda + b sqrt(lambda): the half-power term
    breaks the heat-expansion hypothesis, so pi_0 must not vanish.

    Dual-route value: the fitted family logDet(A + lambda + b sqrt(lambda))
    has pi_0 = Vol b / 2, and so does the symbol route.
    """
    return OperatorSymbolData(2, 2, 1, {2: xi ** 2 + lam,
                                        1: sp.Rational(b) * sp.sqrt(lam)})
