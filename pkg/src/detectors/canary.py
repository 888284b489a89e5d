"""
Stack-protector detection.

Two independent signals: the libc failure message referenced from a
function that is actually called, or a prologue/epilogue pair matching
one of the configured toolchain pattern families.
"""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from cfg.constprop import const_value_at, defining_instr
from cfg.flow import ControlFlow
from cfg.functions import Function
from config.patterns import PatternFamily, PatternSet, PatternStep, is_variable
from disasm.instr import Instr

from .model import Evidence, Feature, Finding, Verdict

STACK_SMASHING_MESSAGE = "stack smashing detected"
KNOWN_GUARD_VALUES = {0xFF0A0000: "terminator", 0x00000000: "zero"}

Bindings = Dict[str, int]


@dataclass(frozen=True)
class CanaryMatch:
    family: str
    function: int
    prologue: int
    epilogue: int
    guard: Optional[int]


def _bind(bindings: Bindings, name, actual: Optional[int]) -> bool:
    if actual is None:
        return False
    if not is_variable(name):
        return name == actual
    if name in bindings:
        return bindings[name] == actual
    bindings[name] = actual
    return True


def _match_step(step: PatternStep, instr: Instr, bindings: Bindings, flow: ControlFlow) -> Optional[Bindings]:
    if instr.kind not in step.kinds:
        return None
    bound = dict(bindings)
    for name, expected in step.fields:
        if not _bind(bound, expected, getattr(instr, name)):
            return None

    if step.operands:
        for first, second in ((instr.rn, instr.rm), (instr.rm, instr.rn)):
            attempt = dict(bound)
            if _bind(attempt, step.operands[0], first) and _bind(attempt, step.operands[1], second):
                bound = attempt
                break
        else:
            return None

    if step.base_value or step.base_from:
        if instr.rn is None:
            return None
        if step.base_from:
            source = defining_instr(flow.index, instr.addr, instr.rn, flow.const_window)
            if source is None or source.kind not in step.base_from:
                return None
        if step.base_value:
            value = const_value_at(flow.index, instr.addr, instr.rn, flow.const_window)
            if not _bind(bound, step.base_value, value):
                return None
    return bound


def _match_sequence(steps: Sequence[PatternStep], instrs: Sequence[Instr], start: int,
                    bindings: Bindings, flow: ControlFlow, max_gap: int
                    ) -> Iterator[Tuple[Bindings, int, int]]:
    """Yields (bindings, position after the last step, address of the first step)."""
    def extend(step_no: int, pos: int, bound: Bindings, first: Optional[int]):
        if step_no == len(steps):
            yield bound, pos, first
            return
        stop = len(instrs) if step_no == 0 else min(len(instrs), pos + max_gap + 1)
        for p in range(pos, stop):
            matched = _match_step(steps[step_no], instrs[p], bound, flow)
            if matched is not None:
                yield from extend(step_no + 1, p + 1, matched, instrs[p].addr if first is None else first)

    yield from extend(0, start, bindings, None)


def match_family(family: PatternFamily, function: Function, flow: ControlFlow, max_gap: int) -> Optional[CanaryMatch]:
    instrs = [flow.index.get(a) for a in sorted(function.body)]
    for bound, end, prologue in _match_sequence(family.prologue, instrs, 0, {}, flow, max_gap):
        for final, _, epilogue in _match_sequence(family.epilogue, instrs, end, bound, flow, max_gap):
            return CanaryMatch(family.name, function.entry, prologue, epilogue, final.get("GUARD"))
    return None


def find_pattern_matches(flow: ControlFlow, patterns: PatternSet) -> List[CanaryMatch]:
    matches = []
    for function in flow.functions:
        for family in patterns.families:
            found = match_family(family, function, flow, patterns.max_gap)
            if found is not None:
                matches.append(found)
                break
    return matches


def detect_stack_canary(flow: ControlFlow, patterns: PatternSet) -> Finding:
    graph = flow.call_graph
    evidence: List[Evidence] = []
    detail = {"message": False, "message_called": False, "families": [], "functions": []}

    for string in flow.strings.matching(STACK_SMASHING_MESSAGE):
        detail["message"] = True
        for site in sorted(string.xrefs):
            if graph.in_call_tree(site):
                detail["message_called"] = True
                evidence.append(Evidence(site, f"references \"{string.text.strip()}\" from a called function"))

    matches = find_pattern_matches(flow, patterns)
    for match in matches:
        evidence.append(Evidence(match.function, f"{match.family} stack-protector prologue/epilogue"))
    detail["families"] = sorted({m.family for m in matches})
    detail["functions"] = [f"0x{m.function:08x}" for m in matches]

    guards = {m.guard for m in matches if m.guard is not None}
    known = {}
    for guard in sorted(guards):
        value = flow.image.read_u32(guard)
        if value in KNOWN_GUARD_VALUES:
            known[f"0x{guard:08x}"] = KNOWN_GUARD_VALUES[value]
    if known:
        detail["fixed_guard_values"] = known

    verdict = Verdict.PRESENT if evidence else Verdict.ABSENT
    return Finding(Feature.STACK_CANARY, verdict, tuple(evidence), detail)
