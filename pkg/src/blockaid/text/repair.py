"""Heuristic cleanup of LLM-produced block text before parsing.

Rules run in a fixed order and the whole pass is idempotent:

1. markdown code fences are stripped (prose outside fences is dropped),
2. typographic quotes and dashes become their ASCII forms,
3. frequently invented opcodes are mapped to real ones,
4. brace-scoped control bodies are rewritten to ``then``/``else``/``end``,
5. "original version"/"modified version" suffixes on script-id comments are
   removed, dropping a script marked original when a modified duplicate of
   the same id is present.
"""

from __future__ import annotations

import re

from .grammar import OPENERS, SCRIPT_COMMENT_RE, SPRITE_COMMENT_RE

_CLOSERS = {v: k for k, v in OPENERS.items()}

_TYPOGRAPHY = str.maketrans({
    "‘": "'", "’": "'",
    "“": '"', "”": '"',
    "–": "-", "—": "-", "−": "-",
    " ": " ",
})

_OPCODE_FIXES = (
    (re.compile(r"\bset rotation to\b"), "point in direction"),
    (re.compile(r"\bwhen the green flag is clicked\b"), "when green flag clicked"),
)


def repair_text(text: str) -> str:
    text = _strip_fences(text)
    text = text.translate(_TYPOGRAPHY)
    for pattern, replacement in _OPCODE_FIXES:
        text = pattern.sub(replacement, text)
    text = _rewrite_braces(text)
    text = _dedupe_versions(text)
    return text


def _strip_fences(text: str) -> str:
    lines = text.splitlines()
    if not any(line.strip().startswith("```") for line in lines):
        return text
    regions: list[list[str]] = []
    open_at: int | None = None
    for i, line in enumerate(lines):
        if line.strip().startswith("```"):
            if open_at is None:
                open_at = i
            else:
                regions.append(lines[open_at + 1:i])
                open_at = None
    if open_at is not None:
        regions.append(lines[open_at + 1:])
    return "\n".join("\n".join(region).strip("\n") for region in regions)


def _rewrite_braces(text: str) -> str:
    if "{" not in text and "}" not in text:
        return text
    out: list[str] = []
    for line in text.splitlines():
        parts = _split_braces(line)
        if len(parts) == 1:
            out.append(line)
            continue
        indent = line[: len(line) - len(line.lstrip())]
        buffer = ""
        i = 0
        while i < len(parts):
            part = parts[i]
            if part == "{":
                if buffer.strip():
                    out.append(indent + buffer.strip())
                buffer = ""
            elif part == "}":
                if buffer.strip():
                    out.append(indent + buffer.strip())
                buffer = ""
                if (
                    i + 2 < len(parts)
                    and parts[i + 1].strip() == "else"
                    and parts[i + 2] == "{"
                ):
                    out.append(indent + "else")
                    i += 2
                else:
                    out.append(indent + "end")
            else:
                buffer += part
            i += 1
        if buffer.strip():
            out.append(indent + buffer.strip())
    return "\n".join(out)


def _split_braces(line: str) -> list[str]:
    """Split on braces that sit outside any ``()``/``[]``/``<>`` group."""
    parts: list[str] = []
    buffer: list[str] = []
    stack: list[str] = []
    for ch in line:
        if ch in OPENERS:
            stack.append(ch)
            buffer.append(ch)
        elif ch in _CLOSERS and stack and OPENERS[stack[-1]] == ch:
            stack.pop()
            buffer.append(ch)
        elif ch in "{}" and not stack:
            parts.append("".join(buffer))
            buffer = []
            parts.append(ch)
        else:
            buffer.append(ch)
    parts.append("".join(buffer))
    return [p for p in parts if p != ""] or [""]


def _dedupe_versions(text: str) -> str:
    lines = text.splitlines()
    marks: list[tuple[int, str, str | None]] = []  # (line index, id, suffix kind)
    for i, line in enumerate(lines):
        match = SCRIPT_COMMENT_RE.match(line)
        if match:
            suffix = (match.group("suffix") or "").lower()
            kind = "original" if suffix.startswith("original") else (
                "modified" if suffix.startswith("modified") else None
            )
            marks.append((i, match.group("id"), kind))
    if not any(kind for _, _, kind in marks):
        return text

    modified_ids = {sid for _, sid, kind in marks if kind == "modified"}
    drop: set[int] = set()
    for pos, (start, sid, kind) in enumerate(marks):
        if kind == "original" and sid in modified_ids:
            end = len(lines)
            for j in range(start + 1, len(lines)):
                if SCRIPT_COMMENT_RE.match(lines[j]) or SPRITE_COMMENT_RE.match(lines[j]):
                    end = j
                    break
            drop.update(range(start, end))

    out: list[str] = []
    for i, line in enumerate(lines):
        if i in drop:
            continue
        match = SCRIPT_COMMENT_RE.match(line)
        if match and match.group("suffix"):
            out.append(f"// script-id: {match.group('id')}")
        else:
            out.append(line)
    return "\n".join(out)
