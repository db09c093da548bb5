"""
String and membrane operators, syndromes and anyon statistics.
"""

from .operators import (
    LatticePath,
    MetacheckReport,
    SurfaceRegion,
    SyndromeConfig,
    boundary_face_graph,
    boundary_loop,
    check_metachecks,
    code_operator,
    corner_string,
    corner_vertices,
    edge_operator,
    end_face,
    excitation_clusters,
    membrane_operator,
    native_pauli,
    path_face,
    shortest_path,
    string_operator,
    surface_arc,
    surface_disk,
    surface_string,
    syndrome_of,
    torus_plane,
)
from .statistics import (
    BraidingResult,
    braiding_phase,
    bulk_junction_hops,
    chiral_central_charge,
    dress_hops,
    gauss_sum,
    surface_anyon_string,
    surface_braiding,
    surface_flower,
    surface_junction_hops,
    t_junction_phase,
    tensor_hops,
)

__all__ = [
    'BraidingResult', 'LatticePath', 'MetacheckReport', 'SurfaceRegion', 'SyndromeConfig',
    'boundary_face_graph', 'boundary_loop', 'braiding_phase', 'bulk_junction_hops',
    'check_metachecks', 'chiral_central_charge', 'code_operator', 'corner_string',
    'corner_vertices', 'dress_hops', 'edge_operator', 'end_face', 'excitation_clusters',
    'gauss_sum', 'membrane_operator', 'native_pauli', 'path_face', 'shortest_path',
    'string_operator', 'surface_anyon_string', 'surface_arc', 'surface_braiding', 'surface_disk',
    'surface_flower', 'surface_junction_hops', 'surface_string', 'syndrome_of', 't_junction_phase',
    'tensor_hops', 'torus_plane',
]
