"""The bundle of control-flow results shared by the detectors."""

from dataclasses import dataclass
from typing import Iterable, Optional

from disasm.index import InstrIndex
from ingest.model import FirmwareImage

from .callgraph import CallGraph, build_call_graph
from .constprop import DEFAULT_WINDOW
from .functions import FunctionSet, identify_functions
from .strings import MIN_STRING_LENGTH, StringTable, find_strings


@dataclass(frozen=True)
class ControlFlow:
    image: FirmwareImage
    index: InstrIndex
    functions: FunctionSet
    call_graph: CallGraph
    strings: StringTable
    const_window: int = DEFAULT_WINDOW


def recover_control_flow(image: FirmwareImage, index: InstrIndex, roots: Optional[Iterable[int]] = None,
                         min_string_length: int = MIN_STRING_LENGTH,
                         const_window: int = DEFAULT_WINDOW) -> ControlFlow:
    functions = identify_functions(index)
    return ControlFlow(
        image=image,
        index=index,
        functions=functions,
        call_graph=build_call_graph(functions, index, roots),
        strings=find_strings(image, index, min_string_length),
        const_window=const_window,
    )
