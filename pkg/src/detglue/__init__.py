"""detglue: zeta-regularized determinants and the Mayer-Vietoris-style
gluing constant on separable model geometries.

Computes logDet = -zeta'(0) for Laplace-type operators on the circle,
the interval, and the cut flat torus; the spectrum of the associated
Dirichlet-to-Neumann operator on the cut; and verifies the gluing formula
Det(A) = c Det(A_Gamma, B) Det(R) with an independently derived constant.
"""

__version__ = "0.1.0"

from .errors import (BranchError, ConfigError, ContinuationError, DetglueError,
                     DomainError, EmitError, FitError)
from .geometry import (BoundaryConditionKind, Circle, EigenSequence, Interval,
                       TorusCut, WeylDescriptor, circle_eigenvalues,
                       interval_eigenvalues, power_sequence,
                       torus_mode_problems)
from .zeta import (LogDet, ZetaResult, complex_log_det, fit_heat_expansion,
                   heat_trace, log_det, mellin_zeta, zeta_at, zeta_laurent)
from .dtn import (DtNSpectrum, PoissonSolution, RootOfMinusOne,
                  assemble_triangular_dtn, dtn_spectrum, dtn_value_1d,
                  omega_matrix, poisson_extend, roots_of_minus_one)
from .asymfit import (AsymptoticExpansion, LogDetFamily, fit_expansion, pi0,
                      sample_family, sequence_family, verify_prop27)
from .gluing import (GluingReport, closed_log_det, dirichlet_log_det,
                     dtn_log_det, extract_c_from_pi0, glue, verify_eq41,
                     verify_lemma41, verify_lemma310, verify_power_identity,
                     verify_triangular_identity)
from .symbols import (OperatorSymbolData, SymbolExpr, J0_closed_form,
                      J_k_value, check_homogeneity,
                      constant_coefficient_closure, circle_operator_symbols,
                      parametrix_terms, pi0_symbolic, rotated_control_symbols)
