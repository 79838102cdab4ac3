"""blockaid: Scratch program analysis with LLM-assisted explanations and fixes."""

__version__ = "0.1.0"
