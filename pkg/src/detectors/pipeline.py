"""
Per-image analysis pipeline: base, vector table, disassembly, control
flow, then every detector.

Analysis-stage failures never escape: a failed stage turns the rows that
depend on it into Indeterminate findings and is recorded on the matrix.
"""

import logging
from typing import Callable, Dict, List, Optional

from cfg.flow import ControlFlow, recover_control_flow
from config.patterns import PatternSet, load_patterns
from config.profiles import VendorProfile
from config.settings import Settings
from disasm.recursive import disassemble
from image.base_address import infer_base_address
from image.vector_table import parse_vector_table
from ingest.model import FirmwareImage
from utils.logger import LoggerMixin, log_performance

from .canary import detect_stack_canary
from .control import (
    detect_barrier_compliance,
    detect_privilege_separation,
    detect_stack_limit_usage,
    detect_stack_separation,
    detect_svc_usage,
)
from .memory import detect_mpu_usage, detect_readback_protection
from .model import Feature, FeatureMatrix, Finding, indeterminate
from .observations import collect_observations
from .rtos import detect_rtos, detect_task_stack_guard

logger = logging.getLogger(__name__)


class FirmwareAnalyzer(LoggerMixin):
    """Runs the detector pipeline over images with a fixed profile and settings."""

    def __init__(self, profile: VendorProfile, settings: Optional[Settings] = None,
                 patterns: Optional[PatternSet] = None):
        self.setup_logger()
        self.profile = profile
        self.analysis = dict(settings.analysis) if settings else {}
        self.patterns = patterns or load_patterns()
        self.errors: List[str] = []

    def _option(self, key: str, default: int) -> int:
        return int(self.analysis.get(key, default))

    def _stage(self, name: str, func: Callable, *args):
        try:
            return func(*args)
        except Exception as e:
            message = f"{name}: {e}"
            self.logger.warning(message)
            self.errors.append(message)
            return None

    def resolve_base(self, image: FirmwareImage, declared: Optional[int] = None) -> Optional[FirmwareImage]:
        if image.base is not None:
            return image
        candidate = self._stage(
            "base inference", infer_base_address, image, None,
            self._option("base_alignment", 0x1000),
            self._option("base_search_limit", 0x10000000),
            declared,
            self._option("vector_check_entries", 16),
        )
        if candidate is None:
            return None
        if declared is not None and candidate.base != declared:
            self.logger.warning(f"{image.image_id}: declared base 0x{declared:08x} lost to 0x{candidate.base:08x}")
        self.logger.info(f"{image.image_id}: base 0x{candidate.base:08x} (score {float(candidate.score):.3f})")
        return image.with_base(candidate.base)

    def recover(self, image: FirmwareImage) -> Optional[ControlFlow]:
        table = self._stage("vector table", parse_vector_table, image, None,
                            self._option("max_vector_entries", 512))
        if table is None:
            return None
        roots = table.entry_points()
        index = self._stage("disassembly", disassemble, image, roots)
        if index is None:
            return None
        return self._stage("control flow", recover_control_flow, image, index, roots,
                           self._option("min_string_length", 4), self._option("const_window", 16))

    def _detect(self, feature: Feature, func: Callable, *args) -> Finding:
        finding = self._stage(f"{feature.value} detector", func, *args)
        return finding if finding is not None else indeterminate(feature, "detector failed")

    @log_performance(logger)
    def analyze(self, image: FirmwareImage) -> FeatureMatrix:
        self.errors = []
        findings: Dict[Feature, Finding] = {}
        observations = {}

        placed = self.resolve_base(image, image.declared_base)
        flow = self.recover(placed) if placed is not None else None

        if flow is not None:
            privilege = self._detect(Feature.PRIVILEGE_SEPARATION, detect_privilege_separation, flow)
            findings[Feature.PRIVILEGE_SEPARATION] = privilege
            findings[Feature.STACK_SEPARATION] = self._detect(Feature.STACK_SEPARATION, detect_stack_separation, flow)
            findings[Feature.STACK_LIMIT] = self._detect(Feature.STACK_LIMIT, detect_stack_limit_usage, flow.index)
            findings[Feature.SVC_LIBRARY_CALL] = self._detect(Feature.SVC_LIBRARY_CALL, detect_svc_usage,
                                                              flow.index, privilege)
            memory = self._stage("mpu detector", detect_mpu_usage, flow, self.profile)
            if memory is not None:
                findings[Feature.MPU], findings[Feature.SMPU] = memory
            findings[Feature.STACK_CANARY] = self._detect(Feature.STACK_CANARY, detect_stack_canary,
                                                          flow, self.patterns)
            findings[Feature.BARRIER] = self._detect(Feature.BARRIER, detect_barrier_compliance, flow.index,
                                                     self._option("barrier_window", 10))
            rtos = self._detect(Feature.RTOS, detect_rtos, flow, self.profile)
            findings[Feature.RTOS] = rtos
            findings[Feature.TASK_STACK_GUARD] = self._detect(Feature.TASK_STACK_GUARD, detect_task_stack_guard,
                                                              flow, self.profile, rtos)
            observations = self._stage("observations", collect_observations, flow, self.profile) or {}

        findings[Feature.READBACK_PROTECTION] = self._detect(
            Feature.READBACK_PROTECTION, detect_readback_protection, placed or image, self.profile)

        note = self.errors[0] if self.errors else "analysis did not run"
        for feature in Feature:
            if feature not in findings:
                findings[feature] = indeterminate(feature, note)

        return FeatureMatrix(
            image_id=image.image_id,
            profile_id=self.profile.id,
            findings=tuple(findings.values()),
            device_id=image.device_id,
            base=placed.base if placed is not None else None,
            errors=tuple(self.errors),
            observations=observations,
        )


def run_all(image: FirmwareImage, profile: VendorProfile, settings: Optional[Settings] = None,
            patterns: Optional[PatternSet] = None) -> FeatureMatrix:
    return FirmwareAnalyzer(profile, settings, patterns).analyze(image)
