"""Large-parameter expansion fitting for log-determinant families.

A log-determinant family lambda -> logDet P(lambda) of an elliptic family
with parameter weight chi on a d-dimensional model admits

    logDet P(lambda) ~ sum_{j >= -d} pi_j lambda^{-j/chi}
                       + sum_{j=0..d} q_j lambda^{j/chi} log lambda.

This module samples families on log-spaced grids and extracts {pi_j, q_j}
by weighted least squares.  The constant coefficient pi_0 is the quantity
the gluing formula consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, FitError
from .geometry import EigenSequence
from .zeta import HeatTraceExpansion, LogDet, log_det

import mpmath as mp


@dataclass(frozen=True)
class LogDetFamily:
    """Deterministic callback lambda -> LogDet with its expansion metadata."""

    evaluate: Callable[[float], LogDet]
    chi: float
    d: int
    label: str = ""


@dataclass(frozen=True)
class AsymptoticExpansion:
    """Fitted coefficients of the large-parameter expansion."""

    chi: float
    d: int
    pi: dict  # j -> coefficient of lambda^{-j/chi}
    q: dict  # j -> coefficient of lambda^{j/chi} log lambda
    residual: float
    condition_number: float
    error_bars: dict = field(default_factory=dict)

    def pi0_error(self) -> float:
        return self.error_bars.get(("pi", 0), self.residual)


def sequence_family(seq: EigenSequence, chi: float = 2.0, d: int = 1,
                    label: str = "") -> LogDetFamily:
    """Family lambda -> logDet(A + lambda) of a fixed spectrum."""
    return LogDetFamily(lambda lam: log_det(seq, shift=lam), chi, d, label)


def sample_family(family: LogDetFamily, grid) -> list[tuple[float, float, float]]:
    """(lambda, value, error) samples of the family on a strictly increasing grid."""
    g = list(grid)
    if any(x <= 0 for x in g):
        raise DomainError("family grid must be positive")
    if any(a >= b for a, b in zip(g, g[1:])):
        raise DomainError("family grid must be strictly increasing")
    if g[-1] / g[0] < 99.0:
        raise DomainError("family grid must span at least two decades")
    out = []
    for lam in g:
        try:
            ld = family.evaluate(lam)
        except Exception as exc:
            raise type(exc)(f"family evaluation failed at lambda={lam}: {exc}") from exc
        out.append((float(lam), float(ld.value.real), float(ld.error_estimate)))
    return out


def fit_expansion(samples, chi: float, d: int, j_range=None,
                  log_range=None) -> AsymptoticExpansion:
    """Weighted least-squares coefficients on the basis lambda^{-j/chi}, lambda^{j/chi} log lambda.

    j_range lists the power indices j (coefficient pi_j of lambda^{-j/chi});
    log_range lists the log-term indices (coefficient q_j of
    lambda^{j/chi} log lambda), defaulting to 0..d.
    """
    if j_range is None:
        j_range = list(range(-d, 2 * d + 1))
    if log_range is None:
        log_range = list(range(0, d + 1))
    lam = np.array([s[0] for s in samples])
    y = np.array([s[1] for s in samples])
    errs = np.array([max(s[2], 1e-15) for s in samples])
    cols = []
    labels = []
    for j in j_range:
        cols.append(lam ** (-j / chi))
        labels.append(("pi", j))
    for j in log_range:
        cols.append(lam ** (j / chi) * np.log(lam))
        labels.append(("q", j))
    if len(samples) < 2 * len(cols):
        raise FitError(f"need >= {2 * len(cols)} samples for {len(cols)} coefficients, "
                       f"got {len(samples)}")
    design = np.column_stack(cols)
    w = 1.0 / errs
    A = design * w[:, None]
    b = y * w
    norms = np.linalg.norm(A, axis=0)
    cond = float(np.linalg.cond(A / norms))
    if cond > 1e12:
        raise FitError(f"ill-conditioned fit (cond {cond:.3g}); change the grid")
    coef, _, _, _ = np.linalg.lstsq(A / norms, b, rcond=None)
    coef = coef / norms
    resid = float(np.max(np.abs(design @ coef - y)))
    pinv = np.linalg.pinv(A / norms) / norms[:, None]
    bars = {}
    for i, lab in enumerate(labels):
        bars[lab] = float(np.linalg.norm(pinv[i]) * max(resid, float(np.max(errs))))
    pi = {j: float(c) for (kind, j), c in zip(labels, coef) if kind == "pi"}
    q = {j: float(c) for (kind, j), c in zip(labels, coef) if kind == "q"}
    return AsymptoticExpansion(chi, d, pi, q, resid, cond, bars)


def pi0(expansion: AsymptoticExpansion) -> tuple[float, float]:
    """The constant (non-log) coefficient with its error bar."""
    return expansion.pi.get(0, 0.0), expansion.pi0_error()


@dataclass(frozen=True)
class Prop27Report:
    """Dual-route comparison of fitted and heat-trace-predicted expansions."""

    applicable: bool
    pi0_fitted: float
    pi0_error: float
    max_coefficient_discrepancy: float
    details: dict


def verify_prop27(seq: EigenSequence, heat: HeatTraceExpansion, grid,
                  chi: float = 2.0, d: int = 1) -> Prop27Report:
    """Cross-check the fitted logDet(A + lambda) expansion against heat data.

    The heat expansion theta(t) ~ sum c_i t^i with i_0 < 0 predicts, for the
    lambda -> infinity expansion of logDet(A + lambda):

        non-integer i < 0:  coefficient of lambda^{-i} is -c_i Gamma(i)
        i = 0:              coefficient of log lambda is c_0

    (sign convention logDet = -zeta'(0)).  Whenever i_0 >= 0 the hypothesis
    fails and the report is marked inapplicable.
    """
    if heat.i0 >= 0:
        return Prop27Report(False, 0.0, 0.0, math.inf,
                            {"reason": "heat expansion has no negative leading exponent"})
    family = sequence_family(seq, chi, d)
    samples = sample_family(family, grid)
    exp = fit_expansion(samples, chi, d)
    p0, p0err = pi0(exp)
    details = {}
    worst = 0.0
    for e, c in heat.terms:
        if e < 0 and e.denominator != 1:
            predicted = -c * float(mp.gamma(float(e)))
            # lambda^{-e} = lambda^{-j/chi} with j = chi * e
            j = int(round(float(e) * chi))
            fitted = exp.pi.get(j, 0.0)
            details[f"lambda^{-float(e)}"] = (predicted, fitted)
            worst = max(worst, abs(predicted - fitted))
        elif e == 0:
            # zeta(s) contains c_0 lambda^{-s}; -d/ds at 0 gives +c_0 log lambda
            predicted = c
            fitted = exp.q.get(0, 0.0)
            details["log-term"] = (predicted, fitted)
            worst = max(worst, abs(predicted - fitted))
    return Prop27Report(True, p0, p0err, worst, details)
