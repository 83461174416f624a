"""Speech-command pipeline and deterministic simulator for an Obi-class
assistive feeding robot driven by LLM-generated code."""

__version__ = "0.1.0"
