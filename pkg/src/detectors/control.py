"""
Detectors driven by special-register writes: privilege separation,
stack separation, stack-limit registers, SVC usage and the barrier
after CONTROL updates.
"""

from dataclasses import dataclass
from typing import List, Optional

from cfg.constprop import const_value_at, defining_instr
from cfg.flow import ControlFlow
from disasm.index import InstrIndex
from disasm.instr import CONTROL_SYSM, PSP_SYSM, STACK_LIMIT_SYSM, Instr, Kind

from .model import Evidence, Feature, Finding, Verdict

CONTROL_NPRIV = 1 << 0
CONTROL_SPSEL = 1 << 1
BARRIER_WINDOW = 10


@dataclass(frozen=True)
class ControlWrite:
    instr: Instr
    value: Optional[int]   # full value, when constant
    set_bits: int          # bits known to be set (OR on a CONTROL read)

    def sets(self, bit: int) -> bool:
        if self.value is not None:
            return bool(self.value & bit)
        return bool(self.set_bits & bit)

    @property
    def known(self) -> bool:
        return self.value is not None or bool(self.set_bits)


def control_writes(flow: ControlFlow) -> List[ControlWrite]:
    index, window = flow.index, flow.const_window
    writes = []
    for instr in index.of_kind(Kind.MSR):
        if instr.sysm not in CONTROL_SYSM:
            continue
        value = const_value_at(index, instr.addr, instr.rn, window)
        set_bits = 0
        if value is None:
            set_bits = _or_on_control_read(index, instr, window)
        writes.append(ControlWrite(instr, value, set_bits))
    return writes


def _or_on_control_read(index: InstrIndex, msr: Instr, window: int) -> int:
    """Immediate ORed into a value read with MRS CONTROL, or 0."""
    orr = defining_instr(index, msr.addr, msr.rn, window)
    if orr is None or orr.kind is not Kind.ORR_IMM:
        return 0
    source = defining_instr(index, orr.addr, orr.rn, window)
    if source is None or source.kind is not Kind.MRS or source.sysm not in CONTROL_SYSM:
        return 0
    return orr.imm


def _describe(write: ControlWrite, flow: ControlFlow) -> dict:
    return {
        "address": f"0x{write.instr.addr:08x}",
        "register": write.instr.sysm_name,
        "value": f"0x{write.value:08x}" if write.value is not None else None,
        "or_bits": f"0x{write.set_bits:x}" if write.set_bits else None,
        "reachable": flow.call_graph.in_call_tree(write.instr.addr),
    }


def _value_note(write: ControlWrite) -> str:
    if write.value is not None:
        return f"MSR {write.instr.sysm_name} <- {write.value:#x}"
    if write.set_bits:
        return f"MSR {write.instr.sysm_name} <- {write.instr.sysm_name} | {write.set_bits:#x}"
    return f"MSR {write.instr.sysm_name} with unresolved value"


def detect_privilege_separation(flow: ControlFlow) -> Finding:
    writes = control_writes(flow)
    detail = {"control_writes": [_describe(w, flow) for w in writes]}
    dropping = [w for w in writes if w.sets(CONTROL_NPRIV)]
    if dropping:
        evidence = tuple(
            Evidence(w.instr.addr, _value_note(w) + ("" if flow.call_graph.in_call_tree(w.instr.addr) else ", not in call tree"))
            for w in dropping
        )
        return Finding(Feature.PRIVILEGE_SEPARATION, Verdict.PRESENT, evidence, detail)
    unknown = [w for w in writes if not w.known]
    if writes and len(unknown) == len(writes):
        evidence = tuple(Evidence(w.instr.addr, _value_note(w)) for w in unknown)
        return Finding(Feature.PRIVILEGE_SEPARATION, Verdict.INDETERMINATE, evidence, detail)
    evidence = tuple(Evidence(w.instr.addr, _value_note(w)) for w in writes)
    return Finding(Feature.PRIVILEGE_SEPARATION, Verdict.ABSENT, evidence, detail)


def detect_stack_separation(flow: ControlFlow) -> Finding:
    writes = control_writes(flow)
    psp_writes = [i for i in flow.index.of_kind(Kind.MSR) if i.sysm in PSP_SYSM]
    spsel = [w for w in writes if w.sets(CONTROL_SPSEL)]
    uses_psp = bool(psp_writes or spsel)
    detail = {
        "stacks": "MSP+PSP" if uses_psp else "MSP-only",
        "psp_writes": [f"0x{i.addr:08x}" for i in psp_writes],
        "spsel_writes": [f"0x{w.instr.addr:08x}" for w in spsel],
    }
    if uses_psp:
        evidence = tuple(Evidence(i.addr, f"MSR {i.sysm_name}") for i in psp_writes)
        evidence += tuple(Evidence(w.instr.addr, _value_note(w) + ", SPSEL set") for w in spsel)
        return Finding(Feature.STACK_SEPARATION, Verdict.PRESENT, evidence, detail)
    unknown = [w for w in writes if not w.known]
    if writes and len(unknown) == len(writes):
        detail["stacks"] = "unknown"
        evidence = tuple(Evidence(w.instr.addr, _value_note(w)) for w in unknown)
        return Finding(Feature.STACK_SEPARATION, Verdict.INDETERMINATE, evidence, detail)
    return Finding(Feature.STACK_SEPARATION, Verdict.ABSENT, (), detail)


def detect_stack_limit_usage(index: InstrIndex) -> Finding:
    # MRS of a limit register is a read, not configuration
    writes = [i for i in index.of_kind(Kind.MSR) if i.sysm in STACK_LIMIT_SYSM]
    detail = {"registers": sorted({i.sysm_name for i in writes})}
    if writes:
        evidence = tuple(Evidence(i.addr, f"MSR {i.sysm_name}") for i in writes)
        return Finding(Feature.STACK_LIMIT, Verdict.PRESENT, evidence, detail)
    return Finding(Feature.STACK_LIMIT, Verdict.ABSENT, (), detail)


def detect_svc_usage(index: InstrIndex, privilege: Finding) -> Finding:
    """
    SVC counts as a library-call gate when everything runs privileged:
    with real privilege separation it is a genuine escalation path.
    """
    sites = index.of_kind(Kind.SVC)
    detail = {
        "immediates": sorted({i.imm for i in sites}),
        "sites": len(sites),
        "privilege_separation": privilege.verdict.value,
    }
    if not sites:
        return Finding(Feature.SVC_LIBRARY_CALL, Verdict.ABSENT, (), detail)
    evidence = tuple(Evidence(i.addr, f"SVC #{i.imm}") for i in sites)
    if privilege.verdict is Verdict.INDETERMINATE:
        return Finding(Feature.SVC_LIBRARY_CALL, Verdict.INDETERMINATE, evidence, detail)
    if privilege.verdict is Verdict.PRESENT:
        return Finding(Feature.SVC_LIBRARY_CALL, Verdict.ABSENT, evidence, detail)
    return Finding(Feature.SVC_LIBRARY_CALL, Verdict.PRESENT, evidence, detail)


def detect_barrier_compliance(index: InstrIndex, window: int = BARRIER_WINDOW) -> Finding:
    writes = [i for i in index.of_kind(Kind.MSR) if i.sysm in CONTROL_SYSM]
    if not writes:
        return Finding(Feature.BARRIER, Verdict.INDETERMINATE,
                       (Evidence(None, "no CONTROL writes"),), {"control_writes": 0}, applicable=False)

    evidence, failing = [], 0
    for msr in writes:
        following = index.following(msr.addr, window)
        position = next((n for n, i in enumerate(following, 1) if i.kind is Kind.ISB), None)
        if position is None:
            failing += 1
            evidence.append(Evidence(msr.addr, f"no ISB within {window} instructions"))
        else:
            evidence.append(Evidence(msr.addr, f"ISB at position {position}"))

    detail = {"control_writes": len(writes), "non_compliant": failing, "window": window}
    verdict = Verdict.ABSENT if failing else Verdict.PRESENT
    return Finding(Feature.BARRIER, verdict, tuple(evidence), detail)
