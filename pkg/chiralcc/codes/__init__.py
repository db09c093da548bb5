from .analysis import (DistanceResult, LogicalStructure, RedundancyReport, SubgroupResult,
                       code_distance, commutation_matrix, gauge_center, group_contains,
                       is_stabilizer_element, is_subgroup, logical_class, logical_structure,
                       noncommuting_pairs, redundancy_relations, volume_operators)
from .builders import (FAMILIES, GaugeCode, StabilizerCode, build_2dcc, build_3dcc, build_boundary,
                       build_chiral, build_gauge, build_xyz, face_operator, native_exponents,
                       tensor_codes, volume_operator)

__all__ = [
    'DistanceResult', 'FAMILIES', 'GaugeCode', 'LogicalStructure', 'RedundancyReport',
    'StabilizerCode', 'SubgroupResult', 'build_2dcc', 'build_3dcc', 'build_boundary',
    'build_chiral', 'build_gauge', 'build_xyz', 'code_distance', 'commutation_matrix',
    'face_operator', 'gauge_center', 'group_contains', 'is_stabilizer_element', 'is_subgroup',
    'logical_class', 'logical_structure', 'native_exponents', 'noncommuting_pairs',
    'redundancy_relations', 'tensor_codes', 'volume_operator', 'volume_operators',
]
