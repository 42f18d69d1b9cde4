"""sphereproj: window statistics of random projections of sphere point sets.

Project a configuration of points on S^{d-1} onto a random direction,
rescale around a level, and study the law of the number of projections
falling in an O(1/n)-wide window: exact projection densities, Poisson
goodness-of-fit experiments, and the pair-separation conditions that
govern the limit.
"""

from .conditions import (ConditionReport, condition_sum_cube, condition_sum_exact,
                         condition_sum_sampled, df_conditions)
from .density import (DensityValue, GramMatrix, finite_d_intensity,
                      gaussian_intensity, gram_matrix, joint_density,
                      joint_density_batch, pair_correlation, pair_window_bound)
from .directions import (Direction, DirectionModel, bernoulli, perturbed_bernoulli,
                         project, project_all, project_indices, random_perturbation,
                         sample_direction, uniform_sphere)
from .errors import (EnumerationGuardError, InvalidInputError, SingularGramError,
                     SphereprojError)
from .experiments import (ExperimentResult, df_ks, factorial_moments,
                          poisson_diagnostics, poisson_pmf,
                          run_point_process_experiment, write_experiment_csv)
from .point_configs import (PointConfig, cube, duplicated_basis, explicit,
                            inner_product, load_points, load_vector, make_config,
                            point, random_uniform, sample_vertices, save_points,
                            save_vector)
from .window_counting import (HitList, WindowSpec, count_cube_mitm, count_direct,
                              count_window)

__version__ = "0.1.0"
