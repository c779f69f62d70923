"""Piecewise smooth planar vector fields: simulation, symbolic dynamics,
transfer matrices, pressure, tent map entropy and box dimension."""

from .errors import (ConvergenceError, DegenerateFitError,
                     DegenerateTangencyError, DomainError, MismatchError,
                     PsvfkitError)
from .model import (BoundaryClass, PlanarField, Polynomial, Psvf,
                    build_petal_system, build_zk, check_refractive,
                    classify_boundary_point, divergence, lie_derivative,
                    petal_slimness, psvf_from_json, psvf_to_json,
                    sector_field, zk_folds, zk_polynomial, zk_stations)
from .flow import (ALWAYS_LEFT, ALWAYS_RIGHT, Always, Event, Prescribed,
                   RandomWeighted, Trajectory, fold_hits, integrate,
                   save_events_jsonl, save_trajectory_csv, time_one_map)
from .symbolic import (Arc, ArcPartition, Itinerary, TransitionGraph,
                       admissible, admissible_word_count, arc_partition,
                       golden_mean_graph, itinerary, petal_arcs,
                       petal_transition_graph, random_admissible_word,
                       realize_word, seq_distance, shift, traj_distance,
                       zk_arcs, zk_transition_graph)
from .transfer import (PressureCurve, SpectralResult, TransferMatrix,
                       empirical_matrix, graph_entropy, graph_matrix,
                       is_irreducible, petal_matrix, pressure,
                       pressure_curve, save_pressure_csv, spectral_radius,
                       zk_matrix)
from .tent import (LapStructure, entropy_lap, entropy_separated, lap_count,
                   lap_structure, orbit, separated_set_size, tent_eval,
                   tent_itinerary)
from .dimension import (CantorSpec, DimensionEstimate, EntropyDimensionMatch,
                        box_count, box_dimension, cantor_for_dimension,
                        cantor_set, check_dimension_entropy)

__version__ = "0.1.0"
