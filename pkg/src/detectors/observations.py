"""Evidence reported alongside the feature rows without a verdict."""

from typing import Any, Dict, List

from cfg.flow import ControlFlow
from config.profiles import VendorProfile
from disasm.instr import Kind
from image.cores import core_features

from .memory import StoreSite, resolved_stores

SAU_REGISTERS = {
    0xE000EDD0: "SAU_CTRL",
    0xE000EDD4: "SAU_TYPE",
    0xE000EDD8: "SAU_RNR",
    0xE000EDDC: "SAU_RBAR",
    0xE000EDE0: "SAU_RLAR",
}
VTOR = 0xE000ED08


def _hex(addresses) -> List[str]:
    return [f"0x{a:08x}" for a in sorted(addresses)]


def _writes(stores: List[StoreSite], names: Dict[int, str]) -> List[Dict[str, Any]]:
    return [
        {
            "site": f"0x{s.address:08x}",
            "register": names[s.target],
            "value": f"0x{s.value:08x}" if s.value is not None else None,
        }
        for s in stores if s.target in names
    ]


def collect_observations(flow: ControlFlow, profile: VendorProfile) -> Dict[str, Any]:
    index = flow.index
    stores = resolved_stores(flow)

    def sites(*kinds: Kind) -> List[str]:
        return _hex(i.addr for i in index.of_kind(*kinds))

    core = core_features(profile.core)
    return {
        "instructions": len(index),
        "functions": len(flow.functions),
        "call_edges": len(flow.call_graph.edges),
        "strings": len(flow.strings),
        "trustzone": {
            "sg": sites(Kind.SG),
            "bxns": sites(Kind.BXNS),
            "blxns": sites(Kind.BLXNS),
            "tt": sites(Kind.TT),
        },
        "unprivileged_ldst": sites(Kind.LDRT, Kind.STRT),
        "cps": sites(Kind.CPS),
        "sau_writes": _writes(stores, SAU_REGISTERS),
        "vtor_writes": _writes(stores, {VTOR: "VTOR"}),
        "core": core.to_dict() if core else None,
    }
