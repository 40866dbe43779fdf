"""System group models to skills and executable BPMN processes."""

from ._core import (
    SkillforgeError,
    aggregate_states,
    canonicalize,
    derive_ports,
    generate_bpmn,
    generate_skill_templates,
    run_process,
    signalize,
    validate_model,
)

__all__ = [
    "SkillforgeError",
    "aggregate_states",
    "canonicalize",
    "derive_ports",
    "generate_bpmn",
    "generate_skill_templates",
    "run_process",
    "signalize",
    "validate_model",
]
