"""C-subset front end: parsing, IR, and CFG construction."""

from .cfg import build_cfg, cfg_reachable_count
from .ir import AstNode, CallSite, Cfg, CfgNode, FunctionIR, SourceUnit, make_function_id
from .parser import parse_unit

__all__ = [
    "AstNode", "CallSite", "Cfg", "CfgNode", "FunctionIR", "SourceUnit",
    "build_cfg", "cfg_reachable_count", "make_function_id", "parse_unit",
]
