"""Step-two Carnot groups: spec parsing, group law, built-in groups, horizontal operator."""

from step2heat.group.builtins import builtin_group, free_step_two, heisenberg, quaternionic
from step2heat.group.law import dilate, horizontal_step, inverse, multiply
from step2heat.group.operator import HorizontalOperator
from step2heat.group.spec import (
    is_heisenberg_type,
    j_of,
    load_group_spec,
    parse_group_spec,
)

__all__ = [
    "HorizontalOperator",
    "builtin_group",
    "dilate",
    "free_step_two",
    "heisenberg",
    "horizontal_step",
    "inverse",
    "is_heisenberg_type",
    "j_of",
    "load_group_spec",
    "multiply",
    "parse_group_spec",
    "quaternionic",
]
