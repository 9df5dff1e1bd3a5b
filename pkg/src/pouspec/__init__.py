"""Spectral analysis of positive finite-rank operators with a partition of
unity: basis systems, normalized positive functionals, operator assembly,
collocation matrices, eigensolver, Gershgorin classification, and a batch
reporting front end."""

from .bases import (BasisSystem, check_nonnegativity, check_partition_of_unity,
                    clamped_knots, make_bernstein_basis, make_bspline_basis,
                    make_hat_basis)
from .checks import CheckResult
from .errors import (ConfigError, DomainError, EigensolverError,
                     NotConstructibleError, UnsupportedSizeError)
from .functionals import (DiracFunctional, Functional, IntervalAverageFunctional,
                          WeightedQuadratureFunctional,
                          check_functional_normalization, integrate_gauss_legendre,
                          make_kantorovich_functionals)
from .functions import (BasisCombination, ClosedForm, Function, Interval,
                        SampledFunction, UNIT_INTERVAL, constant, cosine_wave,
                        eval_function, exponential, monomial, polynomial,
                        random_function, sine_wave)
from .operators import (OperatorSpec, apply_adjoint, apply_operator,
                        bernstein_operator, coefficient_vector, estimate_operator_norm,
                        greville_abscissae, hat_dirac_operator, kantorovich_operator,
                        kernel_witness, kernel_witness_report, operator_power_apply,
                        schoenberg_operator, verify_adjoint_identity,
                        verify_constant_reproduction, verify_norm_bound,
                        verify_positivity)
from .report import (AnalysisConfig, AnalysisReport, IterateSettings, OutputFlags,
                     Tolerances, build_operator, config_from_mapping, dumps_json,
                     emit_report, emit_svg, exit_code_for, parse_config,
                     report_to_mapping, run_analyze)
from .spectra import (CollocationMatrix, GershgorinDisk, IterateResult,
                      SpectrumReport, build_collocation_matrix,
                      char_poly_eigen_oracle, characteristic_polynomial,
                      check_row_stochastic, classify_spectrum, eigenvalues,
                      gershgorin_disks, iterate_limit, matrix_power,
                      pair_eigenvalues, sort_eigenvalues)

__version__ = "0.1.0"
