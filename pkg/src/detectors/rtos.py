"""RTOS identification and task-stack overflow guards from string evidence."""

from typing import List

from cfg.flow import ControlFlow
from cfg.strings import StringRef
from config.profiles import VendorProfile

from .model import Evidence, Feature, Finding, Verdict, indeterminate

MIN_UNREFERENCED_OCCURRENCES = 2


def _called_sites(string: StringRef, flow: ControlFlow) -> List[int]:
    return [site for site in sorted(string.xrefs) if flow.call_graph.in_call_tree(site)]


def detect_rtos(flow: ControlFlow, profile: VendorProfile) -> Finding:
    """
    An RTOS counts when a signature string is referenced from a called
    function, or when at least two distinct strings carry the signature.
    Single unreferenced hits are usually SDK path fragments in dead data.
    """
    detected, evidence = [], []
    for signature in profile.rtos_signatures:
        hits = {}
        for needle in signature.substrings:
            for string in flow.strings.matching(needle):
                hits[string.addr] = string
        if not hits:
            continue
        called = [(s, site) for s in hits.values() for site in _called_sites(s, flow)]
        if called:
            detected.append(signature.name)
            evidence += [Evidence(site, f"{signature.name}: \"{s.text.strip()[:48]}\"") for s, site in called]
        elif len(hits) >= MIN_UNREFERENCED_OCCURRENCES:
            detected.append(signature.name)
            evidence += [Evidence(addr, f"{signature.name}: \"{s.text.strip()[:48]}\"") for addr, s in sorted(hits.items())]

    detail = {"rtos": sorted(detected)}
    if detected:
        return Finding(Feature.RTOS, Verdict.PRESENT, tuple(evidence), detail)
    return Finding(Feature.RTOS, Verdict.ABSENT, (), detail)


def detect_task_stack_guard(flow: ControlFlow, profile: VendorProfile, rtos: Finding) -> Finding:
    if rtos.verdict is not Verdict.PRESENT:
        return indeterminate(Feature.TASK_STACK_GUARD, "no RTOS detected", applicable=False)

    evidence, markers_seen = [], []
    for name in rtos.detail.get("rtos", []):
        for marker in profile.guard_markers(name):
            for string in flow.strings.matching(marker):
                markers_seen.append(string.text.strip())
                evidence += [Evidence(site, f"{name} stack guard: \"{marker}\"") for site in _called_sites(string, flow)]

    detail = {"markers": sorted(set(markers_seen)), "rtos": rtos.detail.get("rtos", [])}
    if evidence:
        return Finding(Feature.TASK_STACK_GUARD, Verdict.PRESENT, tuple(evidence), detail)
    return Finding(Feature.TASK_STACK_GUARD, Verdict.ABSENT, (), detail)
