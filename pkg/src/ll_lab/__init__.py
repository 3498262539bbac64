"""Landau-Lifshitz with strong easy-axis anisotropy, its anisotropic NLS form and the cubic NLS limit."""
from .dynamics import (IntegratorConfig, IntegratorError, Scheme, Trajectory, ValidityBreach,
                       evolve_cs, evolve_ll, evolve_nls_eps, f_eps_residual, stability_bound)
from .energetics import (BoundRecord, EnergyReport, KEpsReport, cs_hamiltonian, cs_invariants, e_ll_k,
                         energy_report, frak_e_k, k_eps_0, landau_lifshitz_energy,
                         nls_energy_eps, norm_equivalence_check)
from .equations import (AnisotropyParams, consistency_residual, cs_rhs, f_eps, ll_rhs,
                        nls_eps_rhs, remainder_R_eps, second_order_ll_residual)
from .experiments import (ConfigError, ConvergenceReport, Report, StudyConfig, emit_report,
                          parse_config, run_conservation_suite, run_convergence_study,
                          run_soliton_convergence, run_traveling_wave_suite)
from .fields import (Magnetization, SphereError, ValidityError, WaveField, check_sphere_constraint,
                     magnetization_from_wavefield, renormalize, scaled_energy_identity_residual,
                     wavefield_from_magnetization)
from .solitons import (CsSolitonParams, InadmissibleError, SolitonParams, UndersizedBoxError,
                       appendix_identity_residuals, cs_bright_soliton, first_order_correction,
                       ll_soliton_case_i, ll_soliton_case_ii, ll_traveling_wave, tw_residual,
                       upsilon_eps)
from .spectral import Grid, make_grid, sobolev_norm, spectral_derivative

__version__ = "0.1.0"
