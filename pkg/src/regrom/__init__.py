"""Galerkin and Leray-regularized reduced order models with deconvolution."""
from .config import ExperimentConfig, parse_config, parse_config_text
from .estimators import POD, ReducedOrderModel
from .exceptions import (ConfigError, MatrixFileError, RankDeficiencyError,
                         RegromError, SolverFailure, UndefinedEnergyError)
from .fem1d import (FemSystem1D, FemTrajectory, Mesh1D, NewtonConfig,
                    assemble_burgers_nonlinearity, assemble_fem_system,
                    build_uniform_mesh, burgers_initial_condition,
                    solve_burgers_fom)
from .experiment import run_experiment, sweep
from .filters import (AdConfig, FilterConfig, apply_filter, deconvolve,
                      deconvolve_lavrentiev, deconvolve_tikhonov,
                      deconvolve_van_cittert)
from .metrics import (ErrorSeries, kinetic_energy_series, l2_error_series,
                      relative_reduction, time_average_errors)
from .operators import (RomOperators, compute_filter_offset, grom_rhs,
                        project_operators)
from .pod import (PodBasis, SnapshotSet, center_snapshots, compute_pod,
                  energy_fractions, lift, pod_from_snapshots, project)
from .solvers import (RomModel, RomTrajectory, TimeScheme,
                      assemble_convection_matrix, run_rom, step_rom)

project_initial_condition = project

__version__ = "0.1.0"
