from typing import Any, Dict, Optional

from dsn_hiercode.options import ErrorCode


class HierCodeError(Exception):
    """Base error; `code` is the machine-readable identifier shown by the CLI."""

    code: ErrorCode = ErrorCode.usage

    def __init__(self, message: str, code: Optional[ErrorCode] = None, **detail: Any):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.message = message
        self.detail: Dict[str, Any] = detail

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.code.value, "message": self.message, "detail": self.detail}


class FieldContextError(HierCodeError):
    code = ErrorCode.field_context


class IrreducibilityError(HierCodeError):
    code = ErrorCode.not_irreducible


class CapacityError(HierCodeError):
    code = ErrorCode.field_capacity


class FieldDivisionError(HierCodeError, ZeroDivisionError):
    code = ErrorCode.division_by_zero


class DistinctnessError(HierCodeError):
    code = ErrorCode.distinctness


class DimensionError(HierCodeError):
    code = ErrorCode.dimension


class TopologyError(HierCodeError):
    code = ErrorCode.schema


class UnreachableError(HierCodeError):
    code = ErrorCode.unreachable


class CooperationGraphError(HierCodeError):
    code = ErrorCode.malformed_cycle


class ConstructionError(HierCodeError):
    code = ErrorCode.field_too_small


class HelperDomainError(HierCodeError):
    code = ErrorCode.helper_domain


class InconsistentSideInfoError(HierCodeError):
    code = ErrorCode.inconsistent_side_info


class ContainerError(HierCodeError):
    code = ErrorCode.container


class FileAccessError(HierCodeError):
    code = ErrorCode.file_access
