"""Static opcode table.

Every block the toolkit understands is described here once: its textual
template, the kind of every slot, how the slot is stored in the container
format, and how many nested block sequences it owns.  The printer, the
parser, the container codec, and the coverage tests are all driven by this
table, so adding a block means adding exactly one entry.

Template syntax: literal words with ``{SLOT}`` markers, e.g.
``"say {MESSAGE} for {SECS} seconds"``.  Slot names match the container
format's input/field keys.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Shape(Enum):
    HAT = "hat"
    STATEMENT = "statement"
    REPORTER = "reporter"
    BOOLEAN = "boolean"


class SlotKind(Enum):
    NUMBER = "number"      # round insert, accepts literals and reporters
    TEXT = "text"          # square insert, accepts literals and reporters
    BOOLEAN = "boolean"    # angle insert, boolean reporters only
    COLOR = "color"        # colour literal, printed like a dropdown
    DROPDOWN = "dropdown"  # fixed selection, stored in Block.fields
    BROADCAST = "broadcast"  # message-name selection, stored in Block.fields


#: Slot kinds whose values live in Block.inputs (expression slots).
INPUT_KINDS = frozenset({SlotKind.NUMBER, SlotKind.TEXT, SlotKind.BOOLEAN, SlotKind.COLOR})

SUBSTACK = "SUBSTACK"
SUBSTACK2 = "SUBSTACK2"


@dataclass(frozen=True)
class Slot:
    name: str
    kind: SlotKind
    #: container encoding: True -> field record, False -> input record
    sb3_field: bool = False
    #: shadow-menu opcode for menu-backed dropdowns (sb3_field is False then)
    menu_opcode: str | None = None
    menu_field: str | None = None
    default: str = ""
    #: raw container value -> printed value (e.g. ``_mouse_`` -> ``mouse-pointer``)
    display: tuple[tuple[str, str], ...] = ()
    #: closed set of accepted values; empty means any value is accepted
    choices: tuple[str, ...] = ()

    def to_display(self, raw: str) -> str:
        for stored, shown in self.display:
            if stored == raw:
                return shown
        return raw

    def to_raw(self, shown: str) -> str:
        for stored, displayed in self.display:
            if displayed == shown:
                return stored
        return shown


@dataclass(frozen=True)
class OpcodeSpec:
    opcode: str
    category: str
    shape: Shape
    template: str
    slots: tuple[Slot, ...] = ()
    substacks: int = 0
    #: parse-only template variants (e.g. ``turn cw ...`` for ``turn right ...``)
    aliases: tuple[str, ...] = ()

    def slot(self, name: str) -> Slot:
        for s in self.slots:
            if s.name == name:
                return s
        raise KeyError(f"{self.opcode} has no slot {name!r}")

    @property
    def input_slots(self) -> tuple[Slot, ...]:
        return tuple(s for s in self.slots if s.kind in INPUT_KINDS)

    @property
    def field_slots(self) -> tuple[Slot, ...]:
        return tuple(s for s in self.slots if s.kind not in INPUT_KINDS)


def _num(name: str) -> Slot:
    return Slot(name, SlotKind.NUMBER)


def _txt(name: str) -> Slot:
    return Slot(name, SlotKind.TEXT)


def _bool(name: str) -> Slot:
    return Slot(name, SlotKind.BOOLEAN)


def _color(name: str) -> Slot:
    return Slot(name, SlotKind.COLOR)


def _dd(name: str, default: str, *, menu: str | None = None, menu_field: str | None = None,
        display: tuple[tuple[str, str], ...] = (), choices: tuple[str, ...] = ()) -> Slot:
    return Slot(
        name,
        SlotKind.DROPDOWN,
        sb3_field=menu is None,
        menu_opcode=menu,
        menu_field=menu_field or name,
        default=default,
        display=display,
        choices=choices,
    )


_TOUCH_DISPLAY = (("_mouse_", "mouse-pointer"), ("_edge_", "edge"))

_SPECS: list[OpcodeSpec] = [
    # --- events ---------------------------------------------------------
    OpcodeSpec("event_whenflagclicked", "events", Shape.HAT, "when green flag clicked",
               aliases=("when flag clicked",)),
    OpcodeSpec("event_whenkeypressed", "events", Shape.HAT, "when {KEY_OPTION} key pressed",
               (_dd("KEY_OPTION", "space"),)),
    OpcodeSpec("event_whenthisspriteclicked", "events", Shape.HAT, "when this sprite clicked"),
    OpcodeSpec("event_whenbroadcastreceived", "events", Shape.HAT, "when I receive {BROADCAST_OPTION}",
               (Slot("BROADCAST_OPTION", SlotKind.BROADCAST, sb3_field=True, default="message1"),)),
    OpcodeSpec("event_broadcast", "events", Shape.STATEMENT, "broadcast {BROADCAST_INPUT}",
               (Slot("BROADCAST_INPUT", SlotKind.BROADCAST, default="message1"),)),
    OpcodeSpec("event_broadcastandwait", "events", Shape.STATEMENT, "broadcast {BROADCAST_INPUT} and wait",
               (Slot("BROADCAST_INPUT", SlotKind.BROADCAST, default="message1"),)),
    # --- motion ---------------------------------------------------------
    OpcodeSpec("motion_movesteps", "motion", Shape.STATEMENT, "move {STEPS} steps", (_num("STEPS"),)),
    OpcodeSpec("motion_turnright", "motion", Shape.STATEMENT, "turn right {DEGREES} degrees",
               (_num("DEGREES"),), aliases=("turn cw {DEGREES} degrees",)),
    OpcodeSpec("motion_turnleft", "motion", Shape.STATEMENT, "turn left {DEGREES} degrees",
               (_num("DEGREES"),), aliases=("turn ccw {DEGREES} degrees",)),
    OpcodeSpec("motion_gotoxy", "motion", Shape.STATEMENT, "go to x: {X} y: {Y}", (_num("X"), _num("Y"))),
    OpcodeSpec("motion_pointindirection", "motion", Shape.STATEMENT, "point in direction {DIRECTION}",
               (_num("DIRECTION"),)),
    OpcodeSpec("motion_changexby", "motion", Shape.STATEMENT, "change x by {DX}", (_num("DX"),)),
    OpcodeSpec("motion_setx", "motion", Shape.STATEMENT, "set x to {X}", (_num("X"),)),
    OpcodeSpec("motion_changeyby", "motion", Shape.STATEMENT, "change y by {DY}", (_num("DY"),)),
    OpcodeSpec("motion_sety", "motion", Shape.STATEMENT, "set y to {Y}", (_num("Y"),)),
    OpcodeSpec("motion_ifonedgebounce", "motion", Shape.STATEMENT, "if on edge, bounce"),
    OpcodeSpec("motion_xposition", "motion", Shape.REPORTER, "x position"),
    OpcodeSpec("motion_yposition", "motion", Shape.REPORTER, "y position"),
    OpcodeSpec("motion_direction", "motion", Shape.REPORTER, "direction"),
    # --- looks ----------------------------------------------------------
    OpcodeSpec("looks_sayforsecs", "looks", Shape.STATEMENT, "say {MESSAGE} for {SECS} seconds",
               (_txt("MESSAGE"), _num("SECS"))),
    OpcodeSpec("looks_say", "looks", Shape.STATEMENT, "say {MESSAGE}", (_txt("MESSAGE"),)),
    OpcodeSpec("looks_thinkforsecs", "looks", Shape.STATEMENT, "think {MESSAGE} for {SECS} seconds",
               (_txt("MESSAGE"), _num("SECS"))),
    OpcodeSpec("looks_think", "looks", Shape.STATEMENT, "think {MESSAGE}", (_txt("MESSAGE"),)),
    OpcodeSpec("looks_switchcostumeto", "looks", Shape.STATEMENT, "switch costume to {COSTUME}",
               (_dd("COSTUME", "costume1", menu="looks_costume"),)),
    OpcodeSpec("looks_nextcostume", "looks", Shape.STATEMENT, "next costume"),
    OpcodeSpec("looks_switchbackdropto", "looks", Shape.STATEMENT, "switch backdrop to {BACKDROP}",
               (_dd("BACKDROP", "backdrop1", menu="looks_backdrops"),)),
    OpcodeSpec("looks_show", "looks", Shape.STATEMENT, "show"),
    OpcodeSpec("looks_hide", "looks", Shape.STATEMENT, "hide"),
    OpcodeSpec("looks_changesizeby", "looks", Shape.STATEMENT, "change size by {CHANGE}", (_num("CHANGE"),)),
    OpcodeSpec("looks_setsizeto", "looks", Shape.STATEMENT, "set size to {SIZE} %", (_num("SIZE"),)),
    OpcodeSpec("looks_size", "looks", Shape.REPORTER, "size"),
    # --- sound ----------------------------------------------------------
    OpcodeSpec("sound_playuntildone", "sound", Shape.STATEMENT, "play sound {SOUND_MENU} until done",
               (_dd("SOUND_MENU", "pop", menu="sound_sounds_menu"),)),
    OpcodeSpec("sound_play", "sound", Shape.STATEMENT, "start sound {SOUND_MENU}",
               (_dd("SOUND_MENU", "pop", menu="sound_sounds_menu"),)),
    OpcodeSpec("sound_stopallsounds", "sound", Shape.STATEMENT, "stop all sounds"),
    OpcodeSpec("sound_changevolumeby", "sound", Shape.STATEMENT, "change volume by {VOLUME}", (_num("VOLUME"),)),
    OpcodeSpec("sound_setvolumeto", "sound", Shape.STATEMENT, "set volume to {VOLUME} %", (_num("VOLUME"),)),
    OpcodeSpec("sound_volume", "sound", Shape.REPORTER, "volume"),
    # --- control --------------------------------------------------------
    OpcodeSpec("control_wait", "control", Shape.STATEMENT, "wait {DURATION} seconds", (_num("DURATION"),)),
    OpcodeSpec("control_repeat", "control", Shape.STATEMENT, "repeat {TIMES}", (_num("TIMES"),), substacks=1),
    OpcodeSpec("control_forever", "control", Shape.STATEMENT, "forever", substacks=1),
    OpcodeSpec("control_if", "control", Shape.STATEMENT, "if {CONDITION} then", (_bool("CONDITION"),),
               substacks=1, aliases=("if {CONDITION}",)),
    OpcodeSpec("control_if_else", "control", Shape.STATEMENT, "if {CONDITION} then", (_bool("CONDITION"),),
               substacks=2),
    OpcodeSpec("control_wait_until", "control", Shape.STATEMENT, "wait until {CONDITION}", (_bool("CONDITION"),)),
    OpcodeSpec("control_repeat_until", "control", Shape.STATEMENT, "repeat until {CONDITION}",
               (_bool("CONDITION"),), substacks=1),
    OpcodeSpec("control_stop", "control", Shape.STATEMENT, "stop {STOP_OPTION}",
               (_dd("STOP_OPTION", "all",
                    choices=("all", "this script", "other scripts in sprite")),)),
    # --- sensing --------------------------------------------------------
    OpcodeSpec("sensing_touchingobject", "sensing", Shape.BOOLEAN, "touching {TOUCHINGOBJECTMENU}?",
               (_dd("TOUCHINGOBJECTMENU", "_mouse_", menu="sensing_touchingobjectmenu",
                    display=_TOUCH_DISPLAY),)),
    OpcodeSpec("sensing_touchingcolor", "sensing", Shape.BOOLEAN, "touching color {COLOR}?", (_color("COLOR"),)),
    OpcodeSpec("sensing_keypressed", "sensing", Shape.BOOLEAN, "key {KEY_OPTION} pressed?",
               (_dd("KEY_OPTION", "space", menu="sensing_keyoptions"),)),
    OpcodeSpec("sensing_mousedown", "sensing", Shape.BOOLEAN, "mouse down?"),
    OpcodeSpec("sensing_mousex", "sensing", Shape.REPORTER, "mouse x"),
    OpcodeSpec("sensing_mousey", "sensing", Shape.REPORTER, "mouse y"),
    OpcodeSpec("sensing_timer", "sensing", Shape.REPORTER, "timer"),
    OpcodeSpec("sensing_resettimer", "sensing", Shape.STATEMENT, "reset timer"),
    OpcodeSpec("sensing_askandwait", "sensing", Shape.STATEMENT, "ask {QUESTION} and wait", (_txt("QUESTION"),)),
    OpcodeSpec("sensing_answer", "sensing", Shape.REPORTER, "answer"),
    # --- operators ------------------------------------------------------
    OpcodeSpec("operator_add", "operators", Shape.REPORTER, "{NUM1} + {NUM2}", (_num("NUM1"), _num("NUM2"))),
    OpcodeSpec("operator_subtract", "operators", Shape.REPORTER, "{NUM1} - {NUM2}", (_num("NUM1"), _num("NUM2"))),
    OpcodeSpec("operator_multiply", "operators", Shape.REPORTER, "{NUM1} * {NUM2}", (_num("NUM1"), _num("NUM2"))),
    OpcodeSpec("operator_divide", "operators", Shape.REPORTER, "{NUM1} / {NUM2}", (_num("NUM1"), _num("NUM2"))),
    OpcodeSpec("operator_random", "operators", Shape.REPORTER, "pick random {FROM} to {TO}",
               (_num("FROM"), _num("TO"))),
    OpcodeSpec("operator_gt", "operators", Shape.BOOLEAN, "{OPERAND1} > {OPERAND2}",
               (_txt("OPERAND1"), _txt("OPERAND2"))),
    OpcodeSpec("operator_lt", "operators", Shape.BOOLEAN, "{OPERAND1} < {OPERAND2}",
               (_txt("OPERAND1"), _txt("OPERAND2"))),
    OpcodeSpec("operator_equals", "operators", Shape.BOOLEAN, "{OPERAND1} = {OPERAND2}",
               (_txt("OPERAND1"), _txt("OPERAND2"))),
    OpcodeSpec("operator_and", "operators", Shape.BOOLEAN, "{OPERAND1} and {OPERAND2}",
               (_bool("OPERAND1"), _bool("OPERAND2"))),
    OpcodeSpec("operator_or", "operators", Shape.BOOLEAN, "{OPERAND1} or {OPERAND2}",
               (_bool("OPERAND1"), _bool("OPERAND2"))),
    OpcodeSpec("operator_not", "operators", Shape.BOOLEAN, "not {OPERAND}", (_bool("OPERAND"),)),
    OpcodeSpec("operator_join", "operators", Shape.REPORTER, "join {STRING1} {STRING2}",
               (_txt("STRING1"), _txt("STRING2"))),
    OpcodeSpec("operator_letter_of", "operators", Shape.REPORTER, "letter {LETTER} of {STRING}",
               (_num("LETTER"), _txt("STRING"))),
    OpcodeSpec("operator_length", "operators", Shape.REPORTER, "length of {STRING}", (_txt("STRING"),)),
    OpcodeSpec("operator_contains", "operators", Shape.BOOLEAN, "{STRING1} contains {STRING2}?",
               (_txt("STRING1"), _txt("STRING2"))),
    OpcodeSpec("operator_mod", "operators", Shape.REPORTER, "{NUM1} mod {NUM2}", (_num("NUM1"), _num("NUM2"))),
    OpcodeSpec("operator_round", "operators", Shape.REPORTER, "round {NUM}", (_num("NUM"),)),
    OpcodeSpec("operator_mathop", "operators", Shape.REPORTER, "{OPERATOR} of {NUM}",
               (_dd("OPERATOR", "abs",
                    choices=("abs", "floor", "ceiling", "sqrt", "sin", "cos", "tan",
                             "asin", "acos", "atan", "ln", "log", "e ^", "10 ^")),
                _num("NUM"))),
    # --- variables / lists ----------------------------------------------
    OpcodeSpec("data_setvariableto", "variables", Shape.STATEMENT, "set {VARIABLE} to {VALUE}",
               (_dd("VARIABLE", "my variable"), _txt("VALUE"))),
    OpcodeSpec("data_changevariableby", "variables", Shape.STATEMENT, "change {VARIABLE} by {VALUE}",
               (_dd("VARIABLE", "my variable"), _num("VALUE"))),
    OpcodeSpec("data_showvariable", "variables", Shape.STATEMENT, "show variable {VARIABLE}",
               (_dd("VARIABLE", "my variable"),)),
    OpcodeSpec("data_hidevariable", "variables", Shape.STATEMENT, "hide variable {VARIABLE}",
               (_dd("VARIABLE", "my variable"),)),
    OpcodeSpec("data_addtolist", "variables", Shape.STATEMENT, "add {ITEM} to {LIST}",
               (_txt("ITEM"), _dd("LIST", "my list"))),
    OpcodeSpec("data_deleteoflist", "variables", Shape.STATEMENT, "delete {INDEX} of {LIST}",
               (_num("INDEX"), _dd("LIST", "my list"))),
    OpcodeSpec("data_deletealloflist", "variables", Shape.STATEMENT, "delete all of {LIST}",
               (_dd("LIST", "my list"),)),
    OpcodeSpec("data_insertatlist", "variables", Shape.STATEMENT, "insert {ITEM} at {INDEX} of {LIST}",
               (_txt("ITEM"), _num("INDEX"), _dd("LIST", "my list"))),
    OpcodeSpec("data_replaceitemoflist", "variables", Shape.STATEMENT, "replace item {INDEX} of {LIST} with {ITEM}",
               (_num("INDEX"), _dd("LIST", "my list"), _txt("ITEM"))),
    OpcodeSpec("data_itemoflist", "variables", Shape.REPORTER, "item {INDEX} of {LIST}",
               (_num("INDEX"), _dd("LIST", "my list"))),
    OpcodeSpec("data_lengthoflist", "variables", Shape.REPORTER, "length of {LIST}", (_dd("LIST", "my list"),)),
    OpcodeSpec("data_listcontainsitem", "variables", Shape.BOOLEAN, "{LIST} contains {ITEM}?",
               (_dd("LIST", "my list"), _txt("ITEM"))),
    OpcodeSpec("data_listcontents", "variables", Shape.REPORTER, "contents of {LIST}", (_dd("LIST", "my list"),)),
    # --- pen -------------------------------------------------------------
    OpcodeSpec("pen_clear", "pen", Shape.STATEMENT, "erase all"),
    OpcodeSpec("pen_stamp", "pen", Shape.STATEMENT, "stamp"),
    OpcodeSpec("pen_penDown", "pen", Shape.STATEMENT, "pen down"),
    OpcodeSpec("pen_penUp", "pen", Shape.STATEMENT, "pen up"),
    OpcodeSpec("pen_setPenColorToColor", "pen", Shape.STATEMENT, "set pen color to {COLOR}", (_color("COLOR"),)),
    OpcodeSpec("pen_changePenSizeBy", "pen", Shape.STATEMENT, "change pen size by {SIZE}", (_num("SIZE"),)),
    OpcodeSpec("pen_setPenSizeTo", "pen", Shape.STATEMENT, "set pen size to {SIZE}", (_num("SIZE"),)),
]

OPCODES: dict[str, OpcodeSpec] = {spec.opcode: spec for spec in _SPECS}

#: shadow-menu opcode -> name of the field holding the selected value
MENU_OPCODES: dict[str, str] = {
    "looks_costume": "COSTUME",
    "looks_backdrops": "BACKDROP",
    "sound_sounds_menu": "SOUND_MENU",
    "sensing_touchingobjectmenu": "TOUCHINGOBJECTMENU",
    "sensing_keyoptions": "KEY_OPTION",
}

#: opcodes handled structurally rather than via templates
PROCEDURE_DEFINITION = "procedures_definition"
PROCEDURE_PROTOTYPE = "procedures_prototype"
PROCEDURE_CALL = "procedures_call"
ARGUMENT_REPORTER_VALUE = "argument_reporter_string_number"
ARGUMENT_REPORTER_BOOLEAN = "argument_reporter_boolean"

STRUCTURAL_OPCODES = frozenset({
    PROCEDURE_DEFINITION,
    PROCEDURE_PROTOTYPE,
    PROCEDURE_CALL,
    ARGUMENT_REPORTER_VALUE,
    ARGUMENT_REPORTER_BOOLEAN,
})

#: every category the grammar covers; used by coverage and acceptance tests
CATEGORIES = (
    "motion", "looks", "sound", "events", "control",
    "sensing", "operators", "variables", "my-blocks", "pen",
)

LOOP_OPCODES = frozenset({"control_forever", "control_repeat", "control_repeat_until"})
CONDITIONAL_OPCODES = frozenset({"control_if", "control_if_else"})


def is_supported(opcode: str) -> bool:
    return opcode in OPCODES or opcode in STRUCTURAL_OPCODES or opcode in MENU_OPCODES


def is_hat(opcode: str) -> bool:
    spec = OPCODES.get(opcode)
    return spec is not None and spec.shape is Shape.HAT
