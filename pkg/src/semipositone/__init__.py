"""Numerical laboratory for semipositone biharmonic problems on R^N, N >= 5:
radial mountain-pass solves through Riesz potentials, hypothesis checkers,
and a-sweeps against the positone limit."""

from .radial_core import (RadialField, RadialGrid, h2_inner, h2_norm,
                          integrate, laplacian, lp_norm, make_grid,
                          sphere_area, zeros)
from .nonlinearity import (NonlinearitySpec, ShiftedNonlinearity, CheckReport,
                           check_f1, check_f2, check_f3, check_f4,
                           check_prop33, critical_exponent, eval_F, eval_Fa,
                           eval_f, eval_f0, eval_fa, example_nonlinearity,
                           growth_envelope, linear_nonlinearity,
                           power_nonlinearity, zero_nonlinearity)
from .weight import (WeightSpec, check_g1, check_g2, example_weight,
                     g2_left_side, sample_on_grid, table_weight, zero_weight)
from .riesz_potential import (KernelMatrix, RieszConstants, RieszSolution,
                              apply_potential, decay_constant, load_kernel,
                              riesz_constants, riesz_solve, ring_kernel,
                              ring_kernel_pairs, save_kernel, weak_lp_profile)
from .energy import (EnergyReport, GeometryConstants, big_g, energy_report,
                     estimate_a1, estimate_bg, fa_prime_values, gradient_map,
                     i_a, lower_bound_beta1, n_a, random_trial_fields,
                     rim_levels, weak_pairing)
from .mountain_pass import (MPConfig, MPPath, MPSolution, cerami_diagnostics,
                            find_vtilde, make_bump, mp_solve)
from .sweep_cli import (Config, SweepReport, SweepRow, build_problem, emit,
                        parse_config, run_sweep)

__version__ = "0.1.0"
