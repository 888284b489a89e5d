"""
Executable model of Cortex-M protection semantics: MPU evaluation,
MPU register replay and audit, SAU/IDAU attribution, TT queries and the
privilege/security-state transition machine.
"""

from .attribution import (
    AttributionConfig,
    AttributionRegion,
    SecurityAttr,
    idau_attribution,
    resolve_attribution,
    sau_attribution,
)
from .audit import Issue, IssueKind, audit_mpu_config
from .context import (
    BlxnsCall,
    BxnsExit,
    ExceptionEntry,
    ExceptionReturn,
    Mode,
    SecurityContext,
    SecurityState,
    SgEntry,
    StackPointer,
    Svc,
    WriteControlNPriv,
    WriteControlSpsel,
    all_events,
    explore,
    step_security_context,
)
from .errors import IllegalTransition, InvalidConfig, ModelError, UnknownRegister
from .loader import (
    attribution_from_dict,
    context_from_dict,
    event_from_value,
    mpu_config_from_dict,
    read_document,
    transition_script_from_dict,
)
from .mpu import (
    AP_SYMBOLS,
    V7M_AP,
    V8M_AP,
    Access,
    Decision,
    MpuArch,
    MpuConfig,
    MpuRegion,
    Privilege,
    eval_mpu_access,
    parse_ap,
)
from .reconstruct import MpuWrite, canonical_write_log, in_mpu_window, reconstruct_mpu_config
from .tt import Permissions, TTResult, tt_query

__all__ = [
    "AP_SYMBOLS",
    "Access",
    "AttributionConfig",
    "AttributionRegion",
    "BlxnsCall",
    "BxnsExit",
    "Decision",
    "ExceptionEntry",
    "ExceptionReturn",
    "IllegalTransition",
    "InvalidConfig",
    "Issue",
    "IssueKind",
    "Mode",
    "ModelError",
    "MpuArch",
    "MpuConfig",
    "MpuRegion",
    "MpuWrite",
    "Permissions",
    "Privilege",
    "SecurityAttr",
    "SecurityContext",
    "SecurityState",
    "SgEntry",
    "StackPointer",
    "Svc",
    "TTResult",
    "UnknownRegister",
    "V7M_AP",
    "V8M_AP",
    "WriteControlNPriv",
    "WriteControlSpsel",
    "all_events",
    "attribution_from_dict",
    "audit_mpu_config",
    "canonical_write_log",
    "context_from_dict",
    "eval_mpu_access",
    "event_from_value",
    "explore",
    "idau_attribution",
    "in_mpu_window",
    "mpu_config_from_dict",
    "parse_ap",
    "read_document",
    "reconstruct_mpu_config",
    "resolve_attribution",
    "sau_attribution",
    "step_security_context",
    "transition_script_from_dict",
    "tt_query",
]
