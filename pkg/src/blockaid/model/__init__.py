"""Program tree, container codec, and structural comparison."""

from .ast import (
    Block,
    BlockNode,
    Expression,
    Literal,
    OpaqueBlock,
    Parameter,
    ParameterReporter,
    ProcedureDefinition,
    Program,
    Script,
    ScriptId,
    Target,
    VariableReporter,
    copy_program,
    iter_blocks,
    new_program,
    new_sprite,
    validate,
)
from .diff import Change, ChangeKind, scripts_equal, structural_diff, structurally_equal
from .sb3 import load_sb3, save_sb3

__all__ = [
    "Block",
    "BlockNode",
    "Change",
    "ChangeKind",
    "Expression",
    "Literal",
    "OpaqueBlock",
    "Parameter",
    "ParameterReporter",
    "ProcedureDefinition",
    "Program",
    "Script",
    "ScriptId",
    "Target",
    "VariableReporter",
    "copy_program",
    "iter_blocks",
    "load_sb3",
    "new_program",
    "new_sprite",
    "save_sb3",
    "scripts_equal",
    "structural_diff",
    "structurally_equal",
    "validate",
]
