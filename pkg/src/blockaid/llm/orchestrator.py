"""Task orchestration: render prompt, call the model, repair/parse/retry the
reply, and merge accepted fragments back into the program.

Code-producing tasks share one pipeline: the raw reply goes through
``repair_text``, then ``parse_fragments``; scripts that still fail to parse
are sent back to the model (all unparseable scripts in one round) for at
most three retry rounds, after which they are dropped and reported.  The
provider is therefore called at most four times per request.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import EmptyResponse, NothingUsable, TargetScriptMissing
from ..lint import (
    Issue,
    IssueLocation,
    KIND_BUG,
    KIND_PERFUME,
    KIND_SMELL,
    SEVERITY_INFO,
    SEVERITY_WARN,
)
from ..model.ast import (
    Block,
    BlockNode,
    Program,
    Script,
    ScriptId,
    VariableReporter,
    copy_program,
    iter_blocks,
    new_sprite,
)
from ..text.parser import ParseDiagnostic, ParsedFragment, parse_fragments
from ..text.printer import AnnotatedText, print_program
from ..text.repair import repair_text
from .prompts import DefaultPromptProvider, PromptProvider
from .providers import CompletionParams, LlmProvider
from .tasks import (
    AnalyzeTask,
    AskTask,
    CompleteTask,
    ExplainTask,
    FixTask,
    MODE_PERFUMES,
)

MAX_RETRY_ROUNDS = 3


@dataclass(frozen=True)
class DroppedFragment:
    text: str
    diagnostics: list[ParseDiagnostic]


@dataclass
class FixOutcome:
    updated: Program
    replaced: list[ScriptId] = field(default_factory=list)
    added_scripts: list[ScriptId] = field(default_factory=list)
    added_sprites: list[str] = field(default_factory=list)
    dropped: list[DroppedFragment] = field(default_factory=list)
    attempts_used: int = 0


@dataclass
class AnalyzeReport:
    issues: list[Issue] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def prototype_map(program: Program) -> dict[str, list[str]]:
    return {t.name: [p.prototype for p in t.procedures] for t in program.targets()}


def _require_issue(program: Program, issue: Issue) -> str:
    target = program.target(issue.location.target)
    if target is None:
        raise ValueError(f"issue {issue.id} does not belong to this program")
    if issue.location.script_id is not None and program.find_script(issue.location.script_id) is None:
        raise ValueError(f"issue {issue.id} points at a missing script")
    return target.name


def explain_issue(
    program: Program,
    issue: Issue,
    provider: LlmProvider,
    prompts: PromptProvider | None = None,
    *,
    language: str = "en",
    params: CompletionParams | None = None,
) -> Issue:
    """Ask the model for a learner-friendly explanation and append it."""
    prompts = prompts or DefaultPromptProvider()
    target_name = _require_issue(program, issue)
    context = print_program(program, target_name)
    task = ExplainTask(issue=issue, output_language=language)
    response = provider.complete(prompts.render(task, context, issue), params or CompletionParams())
    if not response.strip():
        raise EmptyResponse("the model returned an empty explanation")
    return issue.with_explanation(response)


def fix_issue(
    program: Program,
    issue: Issue,
    provider: LlmProvider,
    prompts: PromptProvider | None = None,
    *,
    language: str = "en",
    params: CompletionParams | None = None,
) -> FixOutcome:
    """Request, repair, and merge a fix for one reported issue."""
    prompts = prompts or DefaultPromptProvider()
    target_name = _require_issue(program, issue)
    context = print_program(program, target_name)
    task = FixTask(issue=issue, output_language=language)
    prompt = prompts.render(task, context, issue)
    accepted, dropped, attempts = _code_response_loop(
        program, provider, prompts, prompt, params or CompletionParams(), language
    )
    if not accepted:
        raise NothingUsable(dropped, attempts)
    accepted = [_with_default_sprite(f, target_name) for f in accepted]
    outcome = merge_fragments(program, accepted)
    outcome.dropped = dropped
    outcome.attempts_used = attempts
    return outcome


def ask(
    program: Program,
    question: str,
    scope: str,
    provider: LlmProvider,
    prompts: PromptProvider | None = None,
    *,
    language: str = "en",
    params: CompletionParams | None = None,
) -> str:
    """Free-form question over the sprite or whole-program code context."""
    if not question.strip():
        raise ValueError("question must not be empty")
    prompts = prompts or DefaultPromptProvider()
    context = print_program(program, scope)
    task = AskTask(question=question, scope=scope, output_language=language)
    return provider.complete(prompts.render(task, context), params or CompletionParams())


def analyze(
    program: Program,
    target: str,
    mode: str,
    provider: LlmProvider,
    prompts: PromptProvider | None = None,
    *,
    language: str = "en",
    params: CompletionParams | None = None,
) -> AnalyzeReport:
    """Have the model look for issues (or perfumes) beyond the detectors."""
    prompts = prompts or DefaultPromptProvider()
    context = print_program(program, target)
    task = AnalyzeTask(mode=mode, target=target, output_language=language)
    response = provider.complete(prompts.render(task, context), params or CompletionParams())
    return _parse_analyze_response(program, target, mode, response)


_ANALYZE_SEVERITY = {KIND_BUG: SEVERITY_WARN, KIND_SMELL: SEVERITY_INFO, KIND_PERFUME: SEVERITY_INFO}


def _parse_analyze_response(program: Program, target: str, mode: str, response: str) -> AnalyzeReport:
    report = AnalyzeReport()
    counter = 0
    # issue locations must resolve in the program even when the reply names
    # an unknown sprite or the whole program was analysed
    fallback = target if program.target(target) is not None else program.stage.name
    for lineno, raw in enumerate(response.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) < 4:
            report.warnings.append(f"line {lineno}: not in KIND | TITLE | SPRITE | DESCRIPTION form")
            continue
        kind = parts[0].lower()
        if mode == MODE_PERFUMES:
            kind = KIND_PERFUME
        elif kind not in (KIND_BUG, KIND_SMELL, KIND_PERFUME):
            report.warnings.append(f"line {lineno}: unknown kind {parts[0]!r}")
            continue
        sprite = parts[2] if program.target(parts[2]) is not None else fallback
        counter += 1
        report.issues.append(
            Issue(
                id=f"llm@{sprite}:{counter}",
                finder="llm",
                kind=kind,
                severity=_ANALYZE_SEVERITY[kind],
                generic_description=f"{parts[1]}: {' | '.join(parts[3:])}",
                location=IssueLocation(target=sprite, script_id=None, block_index=None),
            )
        )
    return report


def complete_script(
    program: Program,
    script_id: ScriptId,
    provider: LlmProvider,
    prompts: PromptProvider | None = None,
    *,
    language: str = "en",
    params: CompletionParams | None = None,
) -> FixOutcome:
    """Extend one script with model-proposed code."""
    prompts = prompts or DefaultPromptProvider()
    found = program.find_script(script_id)
    if found is None:
        raise ValueError(f"unknown script id {script_id!r}")
    target, _ = found
    context = print_program(program, target.name)
    task = CompleteTask(script_id=script_id, output_language=language)
    prompt = prompts.render(task, context)
    accepted, dropped, attempts = _code_response_loop(
        program,
        provider,
        prompts,
        prompt,
        params or CompletionParams(),
        language,
        require_script=script_id,
        reminder_context=context,
    )
    if not any(f.script_id == script_id for f in accepted):
        raise TargetScriptMissing(script_id, attempts)
    accepted = [_with_default_sprite(f, target.name) for f in accepted]
    outcome = merge_fragments(program, accepted)
    outcome.dropped = dropped
    outcome.attempts_used = attempts
    return outcome


def _with_default_sprite(fragment: ParsedFragment, sprite: str) -> ParsedFragment:
    if fragment.sprite_name:
        return fragment
    return ParsedFragment(
        sprite_name=sprite,
        script_id=fragment.script_id,
        script=fragment.script,
        id_suffix=fragment.id_suffix,
        procedure=fragment.procedure,
    )


def _code_response_loop(
    program: Program,
    provider: LlmProvider,
    prompts: PromptProvider,
    prompt: str,
    params: CompletionParams,
    language: str,
    require_script: ScriptId | None = None,
    reminder_context: AnnotatedText | None = None,
):
    """Shared complete -> repair -> parse -> retry pipeline.

    Returns (accepted fragments, dropped fragments, retry rounds used).
    """
    prototypes = prototype_map(program)
    accepted: dict[object, ParsedFragment] = {}

    def absorb(text: str):
        result = parse_fragments(repair_text(text), procedures=prototypes)
        for fragment in result.fragments:
            key = fragment.script_id or ("anon", len(accepted))
            accepted[key] = fragment
        return result.failures

    failures = absorb(provider.complete(prompt, params))
    attempts = 0
    while attempts < MAX_RETRY_ROUNDS:
        missing_target = require_script is not None and not any(
            f.script_id == require_script for f in accepted.values()
        )
        if not failures and not missing_target:
            break
        attempts += 1
        if failures:
            retry_prompt = prompts.render_retry(failures, language)
        else:
            retry_prompt = prompts.render_target_reminder(
                require_script, reminder_context or AnnotatedText(text=""), language
            )
        failures = absorb(provider.complete(retry_prompt, params))
    dropped = [DroppedFragment(text=f.text, diagnostics=f.diagnostics) for f in failures]
    return list(accepted.values()), dropped, attempts


def merge_fragments(program: Program, fragments: list[ParsedFragment]) -> FixOutcome:
    """Apply parsed fragments to a copy of the program.

    A fragment whose id names an existing script replaces that script; a
    known sprite with a fresh id gains a new script; an unknown sprite is
    created with the default cat costume.
    """
    updated = copy_program(program)
    outcome = FixOutcome(updated=updated)
    for fragment in fragments:
        sprite_name = fragment.sprite_name
        if not sprite_name and fragment.script_id and ":" in fragment.script_id:
            sprite_name = fragment.script_id.rpartition(":")[0]
        if not sprite_name:
            raise ValueError("fragment carries no sprite attribution")
        target = updated.target(sprite_name)
        if target is None:
            target = new_sprite(sprite_name)
            updated.sprites.append(target)
            outcome.added_sprites.append(sprite_name)
        if fragment.procedure is not None:
            _merge_procedure(updated, target, fragment, outcome)
        else:
            _merge_script(updated, target, fragment, outcome)
        _declare_names(updated, target, fragment.script.blocks)
    return outcome


def _merge_script(updated: Program, target, fragment: ParsedFragment, outcome: FixOutcome) -> None:
    script_id = fragment.script_id
    if script_id:
        # the id comment is the alignment key: replace wherever the id lives
        found = updated.find_script(script_id)
        if found is not None:
            found[1].blocks = fragment.script.blocks
            outcome.replaced.append(script_id)
            return
    new_id = script_id or updated.next_script_id(target)
    target.scripts.append(Script(id=new_id, blocks=fragment.script.blocks))
    outcome.added_scripts.append(new_id)


def _merge_procedure(updated: Program, target, fragment: ParsedFragment, outcome: FixOutcome) -> None:
    incoming = fragment.procedure
    script_id = fragment.script_id
    for proc in target.procedures:
        if (script_id and proc.body.id == script_id) or proc.prototype == incoming.prototype:
            proc.prototype = incoming.prototype
            proc.parameters = incoming.parameters
            proc.warp = incoming.warp
            proc.body = Script(id=proc.body.id, blocks=fragment.script.blocks)
            outcome.replaced.append(proc.body.id)
            return
    new_id = script_id or updated.next_script_id(target)
    incoming.body = Script(id=new_id, blocks=fragment.script.blocks)
    target.procedures.append(incoming)
    outcome.added_scripts.append(new_id)


def _declare_names(updated: Program, target, blocks: list[BlockNode]) -> None:
    stage = updated.stage
    for block in iter_blocks(blocks):
        if not isinstance(block, Block):
            continue
        for expr in _expressions(block):
            if isinstance(expr, VariableReporter):
                if expr.name not in target.variables and expr.name not in stage.variables:
                    target.variables[expr.name] = 0
        name = block.fields.get("VARIABLE")
        if name and name not in target.variables and name not in stage.variables:
            target.variables[name] = 0
        name = block.fields.get("LIST")
        if name and name not in target.lists and name not in stage.lists:
            target.lists[name] = []


def _expressions(block: Block):
    for value in block.inputs.values():
        if value is None:
            continue
        yield value
        if isinstance(value, Block):
            yield from _expressions(value)
