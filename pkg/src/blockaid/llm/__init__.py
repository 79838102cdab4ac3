"""LLM task orchestration: prompts, providers, and the repair/merge pipeline."""

from .orchestrator import (
    AnalyzeReport,
    DroppedFragment,
    FixOutcome,
    MAX_RETRY_ROUNDS,
    analyze,
    ask,
    complete_script,
    explain_issue,
    fix_issue,
    merge_fragments,
)
from .prompts import (
    DefaultPromptProvider,
    PromptProvider,
    create_prompt_provider,
    register_prompt_provider,
)
from .providers import (
    CompletionParams,
    LlmProvider,
    MockProvider,
    OPENAI_BASE_URL,
    OpenAiCompatibleProvider,
    prompt_digest,
    seed_mock,
)
from .tasks import (
    AnalyzeTask,
    AskTask,
    CompleteTask,
    ExplainTask,
    FixTask,
    MODE_NEW_ISSUES,
    MODE_PERFUMES,
    PromptTask,
)

__all__ = [
    "AnalyzeReport",
    "AnalyzeTask",
    "AskTask",
    "CompleteTask",
    "CompletionParams",
    "DefaultPromptProvider",
    "DroppedFragment",
    "ExplainTask",
    "FixOutcome",
    "FixTask",
    "LlmProvider",
    "MAX_RETRY_ROUNDS",
    "MODE_NEW_ISSUES",
    "MODE_PERFUMES",
    "MockProvider",
    "OPENAI_BASE_URL",
    "OpenAiCompatibleProvider",
    "PromptProvider",
    "PromptTask",
    "analyze",
    "ask",
    "complete_script",
    "create_prompt_provider",
    "explain_issue",
    "fix_issue",
    "merge_fragments",
    "prompt_digest",
    "register_prompt_provider",
    "seed_mock",
]
