"""Mesh and graph core: representations, Gmsh ingestion, metrics, descriptors."""

from .graph import (Graph, Labeling, c_bw, classical_bandwidth,
                    read_edge_list, read_labeling, serial_bandwidth,
                    write_edge_list, write_labeling)
from .mesh import BOUNDARY_KINDS, TriMesh, dual_graph
from .gmsh_io import load_gmsh, write_gmsh
from .descriptors import (DescriptorConfig, DescriptorStream, boundary_slot,
                          check_index_capacity, read_descriptor_stream,
                          write_descriptor_stream)

__all__ = [
    "Graph", "Labeling", "classical_bandwidth", "serial_bandwidth", "c_bw",
    "read_edge_list", "write_edge_list", "read_labeling", "write_labeling",
    "TriMesh", "dual_graph", "BOUNDARY_KINDS", "load_gmsh", "write_gmsh",
    "DescriptorConfig", "DescriptorStream", "write_descriptor_stream",
    "read_descriptor_stream", "check_index_capacity", "boundary_slot",
]
