"""Program tree: targets, scripts, blocks, and expression nodes.

All values are treated as immutable after construction; operations elsewhere
in the toolkit build modified copies instead of mutating in place, so a
Program can be shared freely between concurrent request handlers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Iterator, Union

from . import opcodes
from .opcodes import OPCODES, Shape

ScriptId = str


@dataclass
class Literal:
    """A literal value sitting in an input slot."""

    value: int | float | str


@dataclass
class VariableReporter:
    """A round variable reporter used inside an input slot."""

    name: str


@dataclass
class ParameterReporter:
    """A custom-block parameter used inside its definition body."""

    name: str
    boolean: bool = False


@dataclass
class Block:
    opcode: str
    inputs: dict[str, "Expression | None"] = field(default_factory=dict)
    fields: dict[str, str] = field(default_factory=dict)
    substacks: list[list["BlockNode"]] = field(default_factory=list)


@dataclass
class OpaqueBlock:
    """An unsupported block kept as raw container records.

    It survives re-serialization untouched but cannot be printed as text.
    ``records`` maps the original container ids to their raw JSON records;
    ``root_id`` names the entry block of the preserved subgraph.
    """

    root_id: str
    records: dict[str, dict]

    @property
    def opcode(self) -> str:
        return self.records[self.root_id].get("opcode", "?")


BlockNode = Union[Block, OpaqueBlock]
Expression = Union[Literal, VariableReporter, ParameterReporter, Block, OpaqueBlock]


@dataclass
class Script:
    id: ScriptId
    blocks: list[BlockNode] = field(default_factory=list)


@dataclass
class Parameter:
    name: str
    kind: str  # "value" (number/text) or "boolean"


@dataclass
class ProcedureDefinition:
    #: prototype in proccode form, e.g. ``"jump %s"``
    prototype: str
    parameters: list[Parameter] = field(default_factory=list)
    body: Script = field(default_factory=lambda: Script(id=""))
    warp: bool = False


@dataclass
class Target:
    name: str
    is_stage: bool = False
    scripts: list[Script] = field(default_factory=list)
    procedures: list[ProcedureDefinition] = field(default_factory=list)
    variables: dict[str, Any] = field(default_factory=dict)
    lists: dict[str, list] = field(default_factory=dict)
    #: costume names, first entry is the current costume
    costumes: list[str] = field(default_factory=list)
    #: raw costume records carried through from the container, keyed by name
    costume_entries: dict[str, dict] = field(default_factory=dict)
    #: top-level non-block entries in the container block map (floating
    #: variable reporters and the like), carried through verbatim
    floating_blocks: dict[str, Any] = field(default_factory=dict)
    #: uninterpreted target-level container keys (sounds, volume, ...)
    extra: dict[str, Any] = field(default_factory=dict)

    def all_stacks(self) -> list[Script]:
        """Procedure bodies followed by plain scripts, in model order."""
        return [p.body for p in self.procedures] + list(self.scripts)


@dataclass
class Program:
    stage: Target
    sprites: list[Target] = field(default_factory=list)
    #: container format version string
    meta: str = "3.0.0"
    #: non-code archive members carried through unchanged (md5ext -> bytes)
    assets: dict[str, bytes] = field(default_factory=dict)
    #: uninterpreted top-level container keys (monitors, extensions, meta)
    extra: dict[str, Any] = field(default_factory=dict)

    def targets(self) -> Iterator[Target]:
        yield self.stage
        yield from self.sprites

    def target(self, name: str) -> Target | None:
        for t in self.targets():
            if t.name == name:
                return t
        return None

    def find_script(self, script_id: ScriptId) -> tuple[Target, Script] | None:
        for t in self.targets():
            for s in t.all_stacks():
                if s.id == script_id:
                    return t, s
        return None

    def next_script_id(self, target: Target) -> ScriptId:
        taken = set()
        for s in target.all_stacks():
            _, _, ordinal = s.id.rpartition(":")
            if ordinal.isdigit():
                taken.add(int(ordinal))
        n = max(taken, default=0) + 1
        return f"{target.name}:{n}"


def iter_blocks(blocks: list[BlockNode]) -> Iterator[BlockNode]:
    """Yield every block in a sequence, including nested substacks."""
    for b in blocks:
        yield b
        if isinstance(b, Block):
            for stack in b.substacks:
                yield from iter_blocks(stack)


def iter_expressions(block: Block) -> Iterator[Expression]:
    for value in block.inputs.values():
        if value is None:
            continue
        yield value
        if isinstance(value, Block):
            yield from iter_expressions(value)


def copy_program(program: Program) -> Program:
    """Deep copy of the code structure; asset bytes are shared."""
    import copy as _copy

    memo: dict = {}
    stage = _copy.deepcopy(program.stage, memo)
    sprites = _copy.deepcopy(program.sprites, memo)
    return Program(
        stage=stage,
        sprites=sprites,
        meta=program.meta,
        assets=dict(program.assets),
        extra=_copy.deepcopy(program.extra),
    )


def validate(program: Program) -> list[str]:
    """Check the documented tree invariants; returns human-readable violations."""
    problems: list[str] = []
    names = [s.name for s in program.sprites]
    if len(set(names)) != len(names):
        problems.append("sprite names are not unique")
    if any(not n for n in names):
        problems.append("a sprite has an empty name")
    seen_ids: set[str] = set()
    for target in program.targets():
        for script in target.all_stacks():
            if script.id in seen_ids:
                problems.append(f"duplicate script id {script.id!r}")
            seen_ids.add(script.id)
            problems.extend(_check_script(target, script))
        prototypes = {p.prototype for p in target.procedures}
        for script in target.all_stacks():
            for blk in iter_blocks(script.blocks):
                if isinstance(blk, Block) and blk.opcode == opcodes.PROCEDURE_CALL:
                    proccode = blk.fields.get("PROCCODE", "")
                    if proccode not in prototypes:
                        problems.append(
                            f"{target.name}/{script.id}: call to undefined block {proccode!r}"
                        )
    return problems


def _check_script(target: Target, script: Script) -> list[str]:
    problems = []
    where = f"{target.name}/{script.id}"
    for i, blk in enumerate(script.blocks):
        if isinstance(blk, Block) and opcodes.is_hat(blk.opcode) and i != 0:
            problems.append(f"{where}: hat block at position {i}")
    problems.extend(_check_sequence(where, script.blocks))
    return problems


def _check_sequence(where: str, blocks: list[BlockNode]) -> list[str]:
    problems = []
    for i, blk in enumerate(blocks):
        if not isinstance(blk, Block):
            continue
        if blk.opcode == "control_forever" and i != len(blocks) - 1:
            problems.append(f"{where}: forever is not the last block of its sequence")
        spec = OPCODES.get(blk.opcode)
        if spec is not None:
            if spec.shape in (Shape.REPORTER, Shape.BOOLEAN):
                problems.append(f"{where}: reporter {blk.opcode} in statement position")
            if len(blk.substacks) > spec.substacks:
                problems.append(f"{where}: {blk.opcode} has too many substacks")
            known = {s.name for s in spec.slots}
            for key in list(blk.inputs) + list(blk.fields):
                if key not in known:
                    problems.append(f"{where}: {blk.opcode} has unknown slot {key!r}")
        for stack in blk.substacks:
            problems.extend(_check_sequence(where, stack))
    return problems


def new_program() -> Program:
    """An empty program: one stage, no sprites."""
    return Program(stage=Target(name="Stage", is_stage=True, costumes=["backdrop1"]))


def new_sprite(name: str) -> Target:
    """A sprite with the default cat costume and nothing else."""
    return Target(name=name, costumes=["costume1"])


__all__ = [
    "Block",
    "BlockNode",
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
    "iter_expressions",
    "new_program",
    "new_sprite",
    "validate",
    "replace",
]
