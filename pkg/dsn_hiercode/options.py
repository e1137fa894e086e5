from enum import Enum


class BaseOptions(str, Enum):

    def __str__(self) -> str:
        return self.value

    def __repr__(self) -> str:
        return self.value

    @classmethod
    def list(cls):
        return list(map(lambda c: c.value, cls))


class ConstructionOptions(BaseOptions):
    single_level = "single_level"
    multi_level = "multi_level"


class RecoveryStatusOptions(BaseOptions):
    recovered_local = "RecoveredLocal"
    recovered_coop = "RecoveredCoop"
    failed = "Failed"


class CostModelOptions(BaseOptions):
    shortest_path = "shortest_path"
    direct_link = "direct_link"


class SolveKindOptions(BaseOptions):
    unique = "Unique"
    underdetermined = "Underdetermined"
    inconsistent = "Inconsistent"


class ErrorCode(BaseOptions):
    field_context = "field_context"
    field_capacity = "field_capacity"
    not_irreducible = "not_irreducible"
    division_by_zero = "division_by_zero"
    distinctness = "distinctness"
    dimension = "dimension"
    schema = "schema"
    unknown_node = "unknown_node"
    node_ids = "node_ids"
    self_loop = "self_loop"
    duplicate_edge = "duplicate_edge"
    non_positive_latency = "non_positive_latency"
    coop_not_neighbors = "coop_not_neighbors"
    coop_empty = "coop_empty"
    delta_not_below_r = "delta_not_below_r"
    unreachable = "unreachable"
    malformed_cycle = "malformed_cycle"
    cycle_level = "cycle_level"
    cycle_gamma = "cycle_gamma"
    cooperation_conflict = "cooperation_conflict"
    incompatible_graph = "incompatible_graph"
    field_too_small = "field_too_small"
    negative_padding = "negative_padding"
    negative_local_capability = "negative_local_capability"
    helper_domain = "helper_domain"
    inconsistent_side_info = "inconsistent_side_info"
    container = "container"
    file_access = "file_access"
    usage = "usage"
