"""relgrid: grounded relational commands on a grid, with adversarial distractors."""
from .commands import Command, Pattern, parse, render, rule_filter, sample_commands
from .distractors import Example, GenerationFailure, GeneratorConfig, generate_example
from .kernels import BACKEND
from .matching import MatchResult, resolve
from .planner import plan
from .world import World, WorldObject

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Command",
    "Example",
    "GenerationFailure",
    "GeneratorConfig",
    "MatchResult",
    "Pattern",
    "World",
    "WorldObject",
    "generate_example",
    "parse",
    "plan",
    "render",
    "resolve",
    "rule_filter",
    "sample_commands",
]
