"""
Control-flow recovery: functions, call graph, strings and constant
propagation over a disassembled image.
"""

from .callgraph import CallGraph, build_call_graph
from .constprop import const_value_at, defined_value, defining_instr, store_target
from .flow import ControlFlow, recover_control_flow
from .functions import Function, FunctionSet, identify_functions
from .strings import StringRef, StringTable, find_strings

__all__ = [
    "CallGraph",
    "ControlFlow",
    "Function",
    "FunctionSet",
    "StringRef",
    "StringTable",
    "build_call_graph",
    "const_value_at",
    "defined_value",
    "defining_instr",
    "find_strings",
    "identify_functions",
    "recover_control_flow",
    "store_target",
]
