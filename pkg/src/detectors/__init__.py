"""
Security-feature detectors and the per-image analysis pipeline.
"""

from .canary import CanaryMatch, detect_stack_canary, find_pattern_matches
from .control import (
    detect_barrier_compliance,
    detect_privilege_separation,
    detect_stack_limit_usage,
    detect_stack_separation,
    detect_svc_usage,
)
from .memory import detect_mpu_usage, detect_readback_protection
from .model import (
    FEATURE_LABELS,
    FOOTNOTED_FEATURES,
    Evidence,
    Feature,
    FeatureMatrix,
    Finding,
    Verdict,
)
from .observations import collect_observations
from .pipeline import FirmwareAnalyzer, run_all
from .rtos import detect_rtos, detect_task_stack_guard

__all__ = [
    "CanaryMatch",
    "Evidence",
    "FEATURE_LABELS",
    "FOOTNOTED_FEATURES",
    "Feature",
    "FeatureMatrix",
    "Finding",
    "FirmwareAnalyzer",
    "Verdict",
    "collect_observations",
    "detect_barrier_compliance",
    "detect_mpu_usage",
    "detect_privilege_separation",
    "detect_readback_protection",
    "detect_rtos",
    "detect_stack_canary",
    "detect_stack_limit_usage",
    "detect_stack_separation",
    "detect_svc_usage",
    "detect_task_stack_guard",
    "find_pattern_matches",
    "run_all",
]
