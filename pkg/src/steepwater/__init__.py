"""Steepest (lexicographic) watershed on graphs and pixel grids."""
from .flooding import HierarchicalQueue, fill_pits, flood_under_ceiling, hq_watershed
from .graph_core import (
    DrainageGraph,
    IterationOverflow,
    Steepness,
    WeightedGraph,
    build_drainage_graph,
    find_flat_zones,
    find_regional_minima,
    lexicographic_compare,
    steepest_watershed_graph,
)
from .grid import (
    HEX6,
    SQUARE4,
    SQUARE8,
    ArrowField,
    Connectivity,
    GridImage,
    decode_arrows,
    encode_arrows,
    get_connectivity,
    grid_to_graph,
)
from .grid_watershed import WatershedResult, watershed
from .plateau import geodesic_plateau_distance
from .trajectory import SeedSet, trace_downstream

__version__ = "0.1.0"

__all__ = [
    "HierarchicalQueue", "fill_pits", "flood_under_ceiling", "hq_watershed",
    "DrainageGraph", "IterationOverflow", "Steepness", "WeightedGraph",
    "build_drainage_graph", "find_flat_zones", "find_regional_minima",
    "lexicographic_compare", "steepest_watershed_graph",
    "HEX6", "SQUARE4", "SQUARE8", "ArrowField", "Connectivity", "GridImage",
    "decode_arrows", "encode_arrows", "get_connectivity", "grid_to_graph",
    "WatershedResult", "watershed", "geodesic_plateau_distance",
    "SeedSet", "trace_downstream",
]
