"""Inferring router-level topologies from traces that contain anonymous hops.

The library builds the canonic topology of a trace set, its star conflict
graph, and every topology obtained by merging non-conflicting stars; it
then measures how far those topologies can differ.
"""

__version__ = "0.1.0"

from .axioms import MappingError, Verdict, Violation, effective_alpha, identity_mapping, verify
from .canonic import Topology, all_pairs_distances, bfs, build_canonic, components
from .enumeration import (Ensemble, MergePartition, bell_number, bell_triangle,
                          enumerate_inferrable, induce_topology, iter_independent_partitions,
                          merge_pair)
from .generators import (GroundTruth, gen_diameter_chain, gen_fullexp_diameter,
                         gen_fullexp_triangles, gen_star_network, gen_triangle_ratio,
                         make_fully_explored, random_ground_truth, realize_star_graph,
                         sample_traces)
from .metrics import (BoundAudit, MetricRecord, audit_ensemble, is_fully_explored, measure,
                      stretch, triangle_count)
from .stargraph import (ChromaticPolynomial, LimitExceeded, StarGraph, build_star_graph,
                        chromatic_number, chromatic_polynomial, counting_upper_bound)
from .traces import (Trace, TraceFormatError, TraceSet, as_alpha, ceil_alpha, parse_trace_set,
                     serialize_trace_set)

__all__ = [
    "BoundAudit", "ChromaticPolynomial", "Ensemble", "GroundTruth", "LimitExceeded",
    "MappingError", "MergePartition", "MetricRecord", "StarGraph", "Topology", "Trace",
    "TraceFormatError", "TraceSet", "Verdict", "Violation", "all_pairs_distances", "as_alpha",
    "audit_ensemble", "bell_number", "bell_triangle", "bfs", "build_canonic", "build_star_graph",
    "ceil_alpha", "chromatic_number", "chromatic_polynomial", "components",
    "counting_upper_bound", "effective_alpha", "enumerate_inferrable", "gen_diameter_chain",
    "gen_fullexp_diameter", "gen_fullexp_triangles", "gen_star_network", "gen_triangle_ratio",
    "identity_mapping", "induce_topology", "is_fully_explored", "iter_independent_partitions",
    "make_fully_explored", "measure", "merge_pair", "parse_trace_set", "random_ground_truth",
    "realize_star_graph", "sample_traces", "serialize_trace_set", "stretch", "triangle_count",
    "verify",
]
