"""meshstream: locality tooling for unstructured-mesh streaming solvers.

Subpackages and modules:

* ``meshcore``      graphs, labelings, meshes, metrics, descriptor streams
* ``reorder``       GPS and AM1 bandwidth-reducing orderings, exact oracle
* ``accesspattern`` bounded serial-bandwidth streaming schedules
* ``streamsim``     window simulator and analytic performance model
* ``eulerfv``       cell-centered finite-volume Euler solver
* ``pipegen``       dataflow pipeline leveling, ordering and clustering
* ``cli``           the ``meshstream`` executable
"""

__version__ = "0.1.0"

from .meshcore import (Graph, Labeling, TriMesh, classical_bandwidth, c_bw,
                       dual_graph, load_gmsh, read_edge_list, read_labeling,
                       serial_bandwidth, write_edge_list, write_gmsh,
                       write_labeling)
from .reorder import am1_reorder, exact_min_sbw, gps_reorder, pseudo_diameter
from .accesspattern import (AccessPattern, generate_bounded_pattern,
                            validate_pattern)
from .streamsim import (MemoryUnitConfig, NeighborhoodConfig, PerfConfig,
                        capacity_for, perf_model, simulate_stream, speedup)
from .eulerfv import (FlowField, SolverConfig, cons_to_prim,
                      flop_count_per_update, lax_friedrichs_face_flux,
                      prim_to_cons, run_case, timestep)

__all__ = [
    "Graph", "Labeling", "TriMesh", "classical_bandwidth", "serial_bandwidth",
    "c_bw", "dual_graph", "load_gmsh", "write_gmsh", "read_edge_list",
    "write_edge_list", "read_labeling", "write_labeling",
    "am1_reorder", "gps_reorder", "exact_min_sbw", "pseudo_diameter",
    "AccessPattern", "generate_bounded_pattern", "validate_pattern",
    "MemoryUnitConfig", "NeighborhoodConfig", "PerfConfig", "capacity_for",
    "perf_model", "simulate_stream", "speedup",
    "FlowField", "SolverConfig", "cons_to_prim", "prim_to_cons",
    "lax_friedrichs_face_flux", "timestep", "run_case",
    "flop_count_per_update",
]
