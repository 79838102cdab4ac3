"""Container codec for the Scratch 3 project archive.

The archive is a zip holding ``project.json`` plus asset files.  Only the
code-bearing subset of the JSON is interpreted: targets with their names,
block graphs, variables, lists, and costume names.  Monitors, sounds,
comments, and asset bytes are carried through untouched.  Blocks with
opcodes outside the static table are preserved as opaque raw records so
real-world projects survive a load/save cycle even when they cannot be
analysed.

Serialization is canonical: block ids are regenerated with a depth-first
counter, keys are sorted, and zip timestamps are fixed, so saving the same
program twice yields identical bytes.
"""

from __future__ import annotations

import hashlib
import io
import json
import re
import zipfile
from importlib import resources
from typing import Any

from ..errors import MalformedArchive, SchemaError
from . import opcodes
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
    Target,
    VariableReporter,
)
from .opcodes import OPCODES, Slot, SlotKind

_NUMBER_RE = re.compile(r"^-?\d+(\.\d+)?([eE][+-]?\d+)?$")

_CAT_SVG = resources.files(__package__).joinpath("data/cat.svg").read_bytes()
_BACKDROP_SVG = resources.files(__package__).joinpath("data/backdrop.svg").read_bytes()

DEFAULT_SPRITE_COSTUME = "costume1"
DEFAULT_STAGE_COSTUME = "backdrop1"


def _asset_md5(data: bytes) -> str:
    return hashlib.md5(data).hexdigest()


_CAT_MD5 = _asset_md5(_CAT_SVG)
_BACKDROP_MD5 = _asset_md5(_BACKDROP_SVG)


def default_costume_entry(name: str, is_stage: bool) -> dict:
    """Placeholder costume record; sprites get the bundled cat image."""
    md5 = _BACKDROP_MD5 if is_stage else _CAT_MD5
    entry = {
        "assetId": md5,
        "name": name,
        "md5ext": f"{md5}.svg",
        "dataFormat": "svg",
        "rotationCenterX": 240 if is_stage else 48,
        "rotationCenterY": 180 if is_stage else 48,
    }
    return entry


def default_costume_bytes(is_stage: bool) -> tuple[str, bytes]:
    md5 = _BACKDROP_MD5 if is_stage else _CAT_MD5
    return f"{md5}.svg", _BACKDROP_SVG if is_stage else _CAT_SVG


def coerce_number(value: Any) -> int | float | str:
    """Numeric-looking strings become numbers; everything else is unchanged."""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, float)):
        return int(value) if isinstance(value, float) and value.is_integer() else value
    text = str(value)
    if _NUMBER_RE.match(text.strip()):
        num = float(text)
        return int(num) if num.is_integer() else num
    return text


def format_number(value: int | float) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return repr(value) if isinstance(value, float) else str(value)


_PROCCODE_MARKER_RE = re.compile(r"%[snb]")


def proccode_parameter_kinds(proccode: str) -> list[str]:
    return ["boolean" if m == "%b" else "value" for m in _PROCCODE_MARKER_RE.findall(proccode)]


# --------------------------------------------------------------------------
# loading


def load_sb3(data: bytes) -> Program:
    """Materialize a Program from archive bytes.

    Raises MalformedArchive when the bytes are not a zip with a
    ``project.json`` member, and SchemaError when the JSON violates the
    documented subset.
    """
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile as exc:
        raise MalformedArchive(f"not a zip archive: {exc}") from exc
    names = archive.namelist()
    if "project.json" not in names:
        raise MalformedArchive("archive has no project.json member")
    try:
        project = json.loads(archive.read("project.json").decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"invalid JSON: {exc}", path="project.json") from exc

    if not isinstance(project, dict) or "targets" not in project:
        raise SchemaError("missing required key", path="targets")
    raw_targets = project["targets"]
    if not isinstance(raw_targets, list):
        raise SchemaError("must be a list", path="targets")

    stage: Target | None = None
    sprites: list[Target] = []
    for i, raw in enumerate(raw_targets):
        target = _load_target(raw, path=f"targets[{i}]")
        if target.is_stage:
            if stage is not None:
                raise SchemaError("more than one stage", path=f"targets[{i}].isStage")
            stage = target
        else:
            sprites.append(target)
    if stage is None:
        raise SchemaError("no stage target", path="targets")

    assets = {n: archive.read(n) for n in names if n != "project.json"}
    meta = project.get("meta", {})
    semver = meta.get("semver", "3.0.0") if isinstance(meta, dict) else "3.0.0"
    extra = {k: v for k, v in project.items() if k != "targets"}
    return Program(stage=stage, sprites=sprites, meta=semver, assets=assets, extra=extra)


_TARGET_KEYS = {"isStage", "name", "blocks", "variables", "lists", "costumes", "currentCostume", "broadcasts"}


def _load_target(raw: Any, path: str) -> Target:
    if not isinstance(raw, dict):
        raise SchemaError("target must be an object", path=path)
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise SchemaError("missing or empty target name", path=f"{path}.name")
    blocks_raw = raw.get("blocks", {})
    if not isinstance(blocks_raw, dict):
        raise SchemaError("blocks must be an object", path=f"{path}.blocks")

    variables = {}
    for var_id, entry in (raw.get("variables") or {}).items():
        if not isinstance(entry, list) or len(entry) < 2:
            raise SchemaError("variable entry must be [name, value]", path=f"{path}.variables.{var_id}")
        variables[str(entry[0])] = entry[1]
    lists = {}
    for list_id, entry in (raw.get("lists") or {}).items():
        if not isinstance(entry, list) or len(entry) < 2 or not isinstance(entry[1], list):
            raise SchemaError("list entry must be [name, values]", path=f"{path}.lists.{list_id}")
        lists[str(entry[0])] = list(entry[1])

    costume_names: list[str] = []
    costume_entries: dict[str, dict] = {}
    for entry in raw.get("costumes") or []:
        if isinstance(entry, dict) and "name" in entry:
            costume_names.append(str(entry["name"]))
            costume_entries[str(entry["name"])] = entry
    current = raw.get("currentCostume", 0)
    if isinstance(current, int) and 0 < current < len(costume_names):
        costume_names = (
            [costume_names[current]] + costume_names[:current] + costume_names[current + 1:]
        )

    target = Target(
        name=name,
        is_stage=bool(raw.get("isStage", False)),
        variables=variables,
        lists=lists,
        costumes=costume_names,
        costume_entries=costume_entries,
        extra={k: v for k, v in raw.items() if k not in _TARGET_KEYS},
    )
    try:
        _load_blocks(target, blocks_raw, path=f"{path}.blocks")
    except RecursionError:
        raise SchemaError("block graph is nested too deeply", path=f"{path}.blocks") from None
    return target


def _load_blocks(target: Target, blocks_raw: dict, path: str) -> None:
    records: dict[str, dict] = {}
    for block_id, rec in blocks_raw.items():
        if isinstance(rec, dict):
            if "opcode" not in rec:
                raise SchemaError("block record has no opcode", path=f"{path}.{block_id}")
            records[block_id] = rec
        else:
            target.floating_blocks[block_id] = rec

    loader = _BlockLoader(records, path)
    roots = [
        (rec.get("y", 0) or 0, rec.get("x", 0) or 0, block_id)
        for block_id, rec in records.items()
        if rec.get("topLevel") and not rec.get("shadow")
    ]
    ordinal = 0
    for _, _, root_id in sorted(roots):
        ordinal += 1
        script_id = f"{target.name}:{ordinal}"
        rec = records[root_id]
        if rec.get("opcode") == opcodes.PROCEDURE_DEFINITION:
            definition = loader.load_procedure(root_id, script_id)
            if definition is not None:
                target.procedures.append(definition)
                continue
        target.scripts.append(Script(id=script_id, blocks=loader.load_chain(root_id)))


class _BlockLoader:
    def __init__(self, records: dict[str, dict], path: str) -> None:
        self.records = records
        self.path = path

    def load_chain(self, block_id: str | None) -> list[BlockNode]:
        blocks: list[BlockNode] = []
        while block_id:
            rec = self.records.get(block_id)
            if rec is None:
                break
            blocks.append(self.load_block(block_id))
            block_id = rec.get("next")
        return blocks

    def load_block(self, block_id: str) -> BlockNode:
        rec = self.records[block_id]
        opcode = rec.get("opcode", "")
        if opcode == opcodes.PROCEDURE_CALL:
            return self._load_call(block_id, rec)
        if opcode in (opcodes.ARGUMENT_REPORTER_VALUE, opcodes.ARGUMENT_REPORTER_BOOLEAN):
            # expression decoding yields ParameterReporter before reaching
            # here; a floating argument reporter is preserved raw
            return self._load_opaque(block_id)
        spec = OPCODES.get(opcode)
        if spec is None:
            return self._load_opaque(block_id)
        block = Block(opcode=opcode)
        raw_inputs = rec.get("inputs", {}) or {}
        for slot in spec.slots:
            if slot.kind in opcodes.INPUT_KINDS:
                block.inputs[slot.name] = self._decode_input(raw_inputs.get(slot.name), slot)
            else:
                block.fields[slot.name] = self._decode_selection(rec, raw_inputs, slot)
        for n in range(spec.substacks):
            key = opcodes.SUBSTACK if n == 0 else opcodes.SUBSTACK2
            block.substacks.append(self.load_chain(_referenced_id(raw_inputs.get(key))))
        return block

    def _load_call(self, block_id: str, rec: dict) -> Block:
        mutation = rec.get("mutation", {}) or {}
        proccode = str(mutation.get("proccode", ""))
        try:
            arg_ids = json.loads(mutation.get("argumentids", "[]"))
        except json.JSONDecodeError:
            arg_ids = []
        kinds = proccode_parameter_kinds(proccode)
        block = Block(opcode=opcodes.PROCEDURE_CALL, fields={"PROCCODE": proccode})
        raw_inputs = rec.get("inputs", {}) or {}
        for i, arg_id in enumerate(arg_ids):
            kind = kinds[i] if i < len(kinds) else "value"
            slot = Slot(f"ARG{i + 1}", SlotKind.BOOLEAN if kind == "boolean" else SlotKind.TEXT)
            block.inputs[slot.name] = self._decode_input(raw_inputs.get(arg_id), slot)
        return block

    def load_procedure(self, root_id: str, script_id: str) -> ProcedureDefinition | None:
        rec = self.records[root_id]
        proto_id = _referenced_id((rec.get("inputs", {}) or {}).get("custom_block"))
        proto = self.records.get(proto_id or "")
        if proto is None or proto.get("opcode") != opcodes.PROCEDURE_PROTOTYPE:
            return None
        mutation = proto.get("mutation", {}) or {}
        proccode = str(mutation.get("proccode", ""))
        try:
            names = json.loads(mutation.get("argumentnames", "[]"))
        except json.JSONDecodeError:
            names = []
        kinds = proccode_parameter_kinds(proccode)
        parameters = [
            Parameter(name=str(n), kind=kinds[i] if i < len(kinds) else "value")
            for i, n in enumerate(names)
        ]
        body = Script(id=script_id, blocks=self.load_chain(rec.get("next")))
        return ProcedureDefinition(
            prototype=proccode,
            parameters=parameters,
            body=body,
            warp=str(mutation.get("warp", "false")) == "true",
        )

    def _decode_selection(self, rec: dict, raw_inputs: dict, slot: Slot) -> str:
        if slot.sb3_field:
            entry = (rec.get("fields", {}) or {}).get(slot.name)
            if isinstance(entry, list) and entry:
                return slot.to_display(str(entry[0]))
            return slot.default
        raw = raw_inputs.get(slot.name)
        value = _primitive_of(raw)
        if isinstance(value, list) and len(value) >= 2 and value[0] == 11:
            return str(value[1])  # broadcast primitive
        ref = _referenced_id(raw)
        menu = self.records.get(ref or "")
        if menu is not None and slot.menu_opcode and menu.get("opcode") == slot.menu_opcode:
            entry = (menu.get("fields", {}) or {}).get(slot.menu_field or slot.name)
            if isinstance(entry, list) and entry:
                return slot.to_display(str(entry[0]))
        return slot.default

    def _decode_input(self, raw: Any, slot: Slot) -> Expression | None:
        if raw is None:
            return None
        if not isinstance(raw, list) or len(raw) < 2:
            raise SchemaError("malformed input", path=self.path)
        value = raw[1]
        if value is None:
            return None
        if isinstance(value, str):
            rec = self.records.get(value)
            if rec is None:
                return None
            if rec.get("opcode") in (opcodes.ARGUMENT_REPORTER_VALUE, opcodes.ARGUMENT_REPORTER_BOOLEAN):
                name = str((rec.get("fields", {}).get("VALUE") or [""])[0])
                return ParameterReporter(
                    name=name,
                    boolean=rec.get("opcode") == opcodes.ARGUMENT_REPORTER_BOOLEAN,
                )
            return self.load_block(value)
        if isinstance(value, list) and value:
            code = value[0]
            if code in (4, 5, 6, 7, 8):
                return Literal(coerce_number(value[1]))
            if code == 9:
                return Literal(str(value[1]))
            if code == 10:
                text = str(value[1])
                if slot.kind is SlotKind.NUMBER:
                    return Literal(coerce_number(text))
                return Literal(text)
            if code == 11:
                return Literal(str(value[1]))
            if code == 12:
                return VariableReporter(str(value[1]))
            if code == 13:
                return Block(opcode="data_listcontents", fields={"LIST": str(value[1])})
        raise SchemaError(f"unsupported input primitive {value!r}", path=self.path)

    def _load_opaque(self, root_id: str) -> OpaqueBlock:
        # keep the root plus everything reachable through its inputs; each
        # referenced block brings along its own next-chain (substacks), but
        # the root's next-chain belongs to the enclosing sequence
        keep: dict[str, dict] = {}
        stack = [root_id]
        while stack:
            current = stack.pop()
            rec = self.records.get(current)
            if rec is None or current in keep:
                continue
            keep[current] = rec
            for ref in _input_references(rec):
                nxt: str | None = ref
                while nxt and nxt not in keep:
                    stack.append(nxt)
                    nxt = self.records.get(nxt, {}).get("next")
        return OpaqueBlock(root_id=root_id, records=keep)


def _referenced_id(raw: Any) -> str | None:
    if isinstance(raw, list) and len(raw) >= 2 and isinstance(raw[1], str):
        return raw[1]
    if isinstance(raw, list) and len(raw) >= 3 and isinstance(raw[2], str):
        return raw[2]
    return None


def _primitive_of(raw: Any) -> Any:
    if isinstance(raw, list) and len(raw) >= 2 and isinstance(raw[1], list):
        return raw[1]
    return None


def _input_references(rec: dict) -> list[str]:
    refs = []
    for raw in (rec.get("inputs", {}) or {}).values():
        if isinstance(raw, list):
            for item in raw[1:]:
                if isinstance(item, str):
                    refs.append(item)
    return refs


# --------------------------------------------------------------------------
# saving


def save_sb3(program: Program) -> bytes:
    """Serialize a Program to canonical archive bytes."""
    writer = _ProgramWriter(program)
    project = writer.build()
    payload = json.dumps(project, sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    out = io.BytesIO()
    with zipfile.ZipFile(out, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        _write_member(zf, "project.json", payload.encode("utf-8"))
        for name in sorted(writer.assets):
            _write_member(zf, name, writer.assets[name])
    return out.getvalue()


def _write_member(zf: zipfile.ZipFile, name: str, data: bytes) -> None:
    info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
    info.compress_type = zipfile.ZIP_DEFLATED
    zf.writestr(info, data)


class _ProgramWriter:
    def __init__(self, program: Program) -> None:
        self.program = program
        self.assets: dict[str, bytes] = dict(program.assets)
        self.broadcast_ids: dict[str, str] = {}
        self.variable_ids: dict[tuple[str, str], str] = {}
        self.list_ids: dict[tuple[str, str], str] = {}
        # declarations are widened with referenced-but-undeclared names at
        # save time without mutating the program itself
        self.declared_vars: dict[str, dict[str, Any]] = {}
        self.declared_lists: dict[str, dict[str, list]] = {}

    def build(self) -> dict:
        ordered = [self.program.stage] + list(self.program.sprites)
        self._collect_names(ordered)
        targets = []
        for layer, target in enumerate(ordered):
            targets.append(self._build_target(target, layer))
        project: dict[str, Any] = {
            k: v for k, v in self.program.extra.items() if k not in ("targets", "meta", "extensions")
        }
        project["targets"] = targets
        project.setdefault("monitors", [])
        project["extensions"] = self._extensions(ordered)
        meta = dict(self.program.extra.get("meta", {}))
        meta.setdefault("vm", "0.2.0")
        meta.setdefault("agent", "blockaid")
        meta["semver"] = self.program.meta
        project["meta"] = meta
        return project

    def _extensions(self, targets: list[Target]) -> list[str]:
        loaded = set(self.program.extra.get("extensions", []) or [])
        for target in targets:
            for script in target.all_stacks():
                for blk in _walk(script.blocks):
                    if isinstance(blk, Block) and blk.opcode.startswith("pen_"):
                        loaded.add("pen")
        return sorted(loaded)

    def _collect_names(self, targets: list[Target]) -> None:
        stage = targets[0]
        self.declared_vars = {t.name: dict(t.variables) for t in targets}
        self.declared_lists = {t.name: {k: list(v) for k, v in t.lists.items()} for t in targets}
        for target in targets:
            local_vars = self.declared_vars[target.name]
            local_lists = self.declared_lists[target.name]
            for script in target.all_stacks():
                for blk in _walk(script.blocks):
                    if not isinstance(blk, Block):
                        continue
                    for expr in _walk_expressions(blk):
                        if isinstance(expr, VariableReporter) and expr.name not in local_vars \
                                and expr.name not in self.declared_vars[stage.name]:
                            local_vars[expr.name] = 0
                    spec = OPCODES.get(blk.opcode)
                    if spec is None:
                        continue
                    for slot in spec.field_slots:
                        value = blk.fields.get(slot.name, slot.default)
                        if slot.kind is SlotKind.BROADCAST:
                            self.broadcast_ids.setdefault(value, "")
                        elif slot.name == "VARIABLE" and value not in local_vars \
                                and value not in self.declared_vars[stage.name]:
                            local_vars[value] = 0
                        elif slot.name == "LIST" and value not in local_lists \
                                and value not in self.declared_lists[stage.name]:
                            local_lists[value] = []
        for n, name in enumerate(sorted(self.broadcast_ids)):
            self.broadcast_ids[name] = f"bc{n + 1}"
        for t_index, target in enumerate(targets):
            for v_index, name in enumerate(self.declared_vars[target.name]):
                self.variable_ids[(target.name, name)] = f"v{t_index}.{v_index + 1}"
            for l_index, name in enumerate(self.declared_lists[target.name]):
                self.list_ids[(target.name, name)] = f"l{t_index}.{l_index + 1}"

    def _variable_id(self, target: Target, name: str) -> str:
        if (target.name, name) in self.variable_ids:
            return self.variable_ids[(target.name, name)]
        stage = self.program.stage
        return self.variable_ids.get((stage.name, name), f"v?.{name}")

    def _list_id(self, target: Target, name: str) -> str:
        if (target.name, name) in self.list_ids:
            return self.list_ids[(target.name, name)]
        stage = self.program.stage
        return self.list_ids.get((stage.name, name), f"l?.{name}")

    def _build_target(self, target: Target, layer: int) -> dict:
        body = _TargetWriter(self, target)
        blocks = body.build_blocks()
        blocks.update(target.floating_blocks)
        record: dict[str, Any] = dict(target.extra)
        record["isStage"] = target.is_stage
        record["name"] = target.name
        record["blocks"] = blocks
        record["variables"] = {
            self.variable_ids[(target.name, name)]: [name, value]
            for name, value in self.declared_vars[target.name].items()
        }
        record["lists"] = {
            self.list_ids[(target.name, name)]: [name, list(values)]
            for name, values in self.declared_lists[target.name].items()
        }
        record["costumes"] = self._costumes(target)
        record["currentCostume"] = 0
        record.setdefault("sounds", [])
        record.setdefault("volume", 100)
        record.setdefault("layerOrder", layer)
        if target.is_stage:
            record["broadcasts"] = {v: k for k, v in sorted(self.broadcast_ids.items())}
            record.setdefault("tempo", 60)
        else:
            record.setdefault("visible", True)
            record.setdefault("x", 0)
            record.setdefault("y", 0)
            record.setdefault("size", 100)
            record.setdefault("direction", 90)
            record.setdefault("draggable", False)
            record.setdefault("rotationStyle", "all around")
        return record

    def _costumes(self, target: Target) -> list[dict]:
        entries = []
        for name in target.costumes:
            entry = target.costume_entries.get(name)
            if entry is None:
                entry = default_costume_entry(name, target.is_stage)
                md5ext, data = default_costume_bytes(target.is_stage)
                self.assets.setdefault(md5ext, data)
            entries.append(entry)
        return entries


class _TargetWriter:
    def __init__(self, writer: _ProgramWriter, target: Target) -> None:
        self.writer = writer
        self.target = target
        self.blocks: dict[str, dict] = {}
        self.reserved = set(target.floating_blocks)
        for script in target.all_stacks():
            for blk in _walk(script.blocks):
                if isinstance(blk, OpaqueBlock):
                    self.reserved.update(blk.records)
        self.counter = 0

    def new_id(self) -> str:
        self.counter += 1
        while f"b{self.counter}" in self.reserved:
            self.counter += 1
        return f"b{self.counter}"

    def build_blocks(self) -> dict[str, dict]:
        stacks: list[tuple[ProcedureDefinition | None, Script]] = [
            (proc, proc.body) for proc in self.target.procedures
        ] + [(None, script) for script in self.target.scripts]
        for index, (proc, script) in enumerate(stacks):
            y = index * 120
            if proc is not None:
                self._emit_procedure(proc, y)
            else:
                self._emit_chain(script.blocks, parent=None, top_level=True, y=y)
        return self.blocks

    def _emit_chain(
        self, blocks: list[BlockNode], parent: str | None, top_level: bool, y: int = 0
    ) -> str | None:
        first_id: str | None = None
        prev_id: str | None = None
        for node in blocks:
            block_id = self._emit_block(node, parent=prev_id or parent, top_level=top_level and prev_id is None, y=y)
            if prev_id is not None:
                self.blocks[prev_id]["next"] = block_id
            if first_id is None:
                first_id = block_id
            prev_id = block_id
        return first_id

    def _emit_block(self, node: BlockNode, parent: str | None, top_level: bool, y: int = 0) -> str:
        if isinstance(node, OpaqueBlock):
            return self._emit_opaque(node, parent, top_level, y)
        block_id = self.new_id()
        rec: dict[str, Any] = {
            "opcode": node.opcode,
            "next": None,
            "parent": parent,
            "inputs": {},
            "fields": {},
            "shadow": False,
            "topLevel": top_level,
        }
        if top_level:
            rec["x"] = 0
            rec["y"] = y
        self.blocks[block_id] = rec
        if node.opcode == opcodes.PROCEDURE_CALL:
            self._fill_call(block_id, rec, node)
            return block_id
        spec = OPCODES.get(node.opcode)
        if spec is None:
            raise SchemaError(f"cannot serialize unknown opcode {node.opcode!r}")
        for slot in spec.slots:
            if slot.kind in opcodes.INPUT_KINDS:
                encoded = self._encode_input(node.inputs.get(slot.name), slot, block_id)
                if encoded is not None:
                    rec["inputs"][slot.name] = encoded
            else:
                self._encode_selection(node.fields.get(slot.name, slot.default), slot, block_id, rec)
        for n in range(spec.substacks):
            stack = node.substacks[n] if n < len(node.substacks) else []
            if stack:
                child = self._emit_chain(stack, parent=block_id, top_level=False)
                rec["inputs"][opcodes.SUBSTACK if n == 0 else opcodes.SUBSTACK2] = [2, child]
        return block_id

    def _emit_opaque(self, node: OpaqueBlock, parent: str | None, top_level: bool, y: int) -> str:
        for raw_id, raw in node.records.items():
            rec = dict(raw)
            if raw_id == node.root_id:
                rec["parent"] = parent
                rec["next"] = None
                rec["topLevel"] = top_level
                if top_level:
                    rec["x"] = 0
                    rec["y"] = y
                else:
                    rec.pop("x", None)
                    rec.pop("y", None)
            self.blocks[raw_id] = rec
        return node.root_id

    def _fill_call(self, block_id: str, rec: dict, node: Block) -> None:
        proccode = node.fields.get("PROCCODE", "")
        kinds = proccode_parameter_kinds(proccode)
        arg_ids = [f"p{i + 1}" for i in range(len(kinds))]
        warp = "false"
        for proc in self.target.procedures:
            if proc.prototype == proccode:
                warp = "true" if proc.warp else "false"
        rec["mutation"] = {
            "tagName": "mutation",
            "children": [],
            "proccode": proccode,
            "argumentids": json.dumps(arg_ids),
            "warp": warp,
        }
        for i, arg_id in enumerate(arg_ids):
            kind = SlotKind.BOOLEAN if kinds[i] == "boolean" else SlotKind.TEXT
            encoded = self._encode_input(node.inputs.get(f"ARG{i + 1}"), Slot(arg_id, kind), block_id)
            if encoded is not None:
                rec["inputs"][arg_id] = encoded

    def _emit_procedure(self, proc: ProcedureDefinition, y: int) -> None:
        root_id = self.new_id()
        proto_id = self.new_id()
        kinds = proccode_parameter_kinds(proc.prototype)
        arg_ids = [f"p{i + 1}" for i in range(len(kinds))]
        proto_inputs = {}
        for i, param in enumerate(proc.parameters):
            shadow_id = self.new_id()
            boolean = param.kind == "boolean"
            self.blocks[shadow_id] = {
                "opcode": opcodes.ARGUMENT_REPORTER_BOOLEAN if boolean else opcodes.ARGUMENT_REPORTER_VALUE,
                "next": None,
                "parent": proto_id,
                "inputs": {},
                "fields": {"VALUE": [param.name, None]},
                "shadow": True,
                "topLevel": False,
            }
            if i < len(arg_ids):
                proto_inputs[arg_ids[i]] = [1, shadow_id]
        self.blocks[root_id] = {
            "opcode": opcodes.PROCEDURE_DEFINITION,
            "next": None,
            "parent": None,
            "inputs": {"custom_block": [1, proto_id]},
            "fields": {},
            "shadow": False,
            "topLevel": True,
            "x": 0,
            "y": y,
        }
        self.blocks[proto_id] = {
            "opcode": opcodes.PROCEDURE_PROTOTYPE,
            "next": None,
            "parent": root_id,
            "inputs": proto_inputs,
            "fields": {},
            "shadow": True,
            "topLevel": False,
            "mutation": {
                "tagName": "mutation",
                "children": [],
                "proccode": proc.prototype,
                "argumentids": json.dumps(arg_ids),
                "argumentnames": json.dumps([p.name for p in proc.parameters]),
                "argumentdefaults": json.dumps(
                    ["false" if p.kind == "boolean" else "" for p in proc.parameters]
                ),
                "warp": "true" if proc.warp else "false",
            },
        }
        first = self._emit_chain(proc.body.blocks, parent=root_id, top_level=False)
        if first is not None:
            self.blocks[root_id]["next"] = first

    def _encode_selection(self, value: str, slot: Slot, block_id: str, rec: dict) -> None:
        raw_value = slot.to_raw(value)
        if slot.kind is SlotKind.BROADCAST:
            bc_id = self.writer.broadcast_ids.get(value, "bc?")
            if slot.sb3_field:
                rec["fields"][slot.name] = [value, bc_id]
            else:
                rec["inputs"][slot.name] = [1, [11, value, bc_id]]
            return
        if slot.sb3_field:
            if slot.name == "VARIABLE":
                rec["fields"][slot.name] = [value, self.writer._variable_id(self.target, value)]
            elif slot.name == "LIST":
                rec["fields"][slot.name] = [value, self.writer._list_id(self.target, value)]
            else:
                rec["fields"][slot.name] = [value, None]
            return
        menu_id = self.new_id()
        self.blocks[menu_id] = {
            "opcode": slot.menu_opcode,
            "next": None,
            "parent": block_id,
            "inputs": {},
            "fields": {slot.menu_field or slot.name: [raw_value, None]},
            "shadow": True,
            "topLevel": False,
        }
        rec["inputs"][slot.name] = [1, menu_id]

    def _encode_input(self, expr: Expression | None, slot: Slot, parent_id: str) -> list | None:
        if expr is None:
            return None
        if isinstance(expr, Literal):
            if isinstance(expr.value, (int, float)):
                return [1, [4, format_number(expr.value)]]
            if slot.kind is SlotKind.COLOR:
                return [1, [9, expr.value]]
            return [1, [10, expr.value]]
        if isinstance(expr, VariableReporter):
            var_id = self.writer._variable_id(self.target, expr.name)
            return [3, [12, expr.name, var_id], [10, ""]]
        if isinstance(expr, ParameterReporter):
            shadow_id = self.new_id()
            self.blocks[shadow_id] = {
                "opcode": opcodes.ARGUMENT_REPORTER_BOOLEAN if expr.boolean else opcodes.ARGUMENT_REPORTER_VALUE,
                "next": None,
                "parent": parent_id,
                "inputs": {},
                "fields": {"VALUE": [expr.name, None]},
                "shadow": False,
                "topLevel": False,
            }
            if expr.boolean or slot.kind is SlotKind.BOOLEAN:
                return [2, shadow_id]
            return [3, shadow_id, [10, ""]]
        if isinstance(expr, Block) and expr.opcode == "data_listcontents":
            name = expr.fields.get("LIST", "")
            return [3, [13, name, self.writer._list_id(self.target, name)], [10, ""]]
        if isinstance(expr, (Block, OpaqueBlock)):
            child_id = self._emit_block(expr, parent=parent_id, top_level=False)
            if slot.kind is SlotKind.BOOLEAN:
                return [2, child_id]
            return [3, child_id, [10, ""]]
        raise SchemaError(f"cannot encode expression {expr!r}")


def _walk(blocks: list[BlockNode]):
    for blk in blocks:
        yield blk
        if isinstance(blk, Block):
            for stack in blk.substacks:
                yield from _walk(stack)


def _walk_expressions(block: Block):
    for value in block.inputs.values():
        if value is None:
            continue
        yield value
        if isinstance(value, Block):
            yield from _walk_expressions(value)
