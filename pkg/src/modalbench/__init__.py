"""Workbench for natural-language modal-syllogism benchmarks.

Synthesizes yes/no questions from machine-verified logical forms, scores
language models through answer-token log-probabilities, reproduces the
associated statistical analyses, and serves a keypress study for humans.
"""

__version__ = "0.1.0"
