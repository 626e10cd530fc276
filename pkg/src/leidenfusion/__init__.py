"""Connected k-way graph partitioning: size-capped Leiden communities fused
greedily into k blocks, with baselines, metrics and subgraph export."""

__version__ = "0.1.0"

from .baselines import LpaConfig, lpa_partition, random_partition
from .export import SubgraphBundle, export_inner, export_repli, write_bundle
from .fusion import (CutState, FusionConfig, fuse, largest_edge_cut_neighbor, lf_partition,
                     split_into_components)
from .graph import (ComponentLabeling, DisconnectedGraphError, Graph, connected_components,
                    cut_edges, induced_subgraph, load_edge_list)
from .leiden import LeidenConfig, leiden_communities, modularity, move_gain
from .metrics import MetricsReport, metrics_report
from .partition import Partition, read_partition_file, write_partition_file

__all__ = [
    "ComponentLabeling", "CutState", "DisconnectedGraphError", "FusionConfig", "Graph",
    "LeidenConfig", "LpaConfig", "MetricsReport", "Partition", "SubgraphBundle",
    "connected_components", "cut_edges", "export_inner", "export_repli", "fuse",
    "induced_subgraph", "largest_edge_cut_neighbor", "leiden_communities", "lf_partition",
    "load_edge_list", "lpa_partition", "metrics_report", "modularity", "move_gain",
    "random_partition", "read_partition_file", "split_into_components", "write_bundle",
    "write_partition_file",
]
