"""Task planning with lazily queried perception."""

from ._percplan import (
    DomainError,
    Instance,
    ParseError,
    Plan,
    RunMetrics,
    RunOutcome,
    emit_report,
    load_instance,
    make_instance,
    parse_plan,
    render_plan,
    run_experiment,
    run_strategy,
    verify_plan,
)

STRATEGIES = ("none", "filt", "pre", "repl")

__all__ = [
    "DomainError",
    "Instance",
    "ParseError",
    "Plan",
    "RunMetrics",
    "RunOutcome",
    "STRATEGIES",
    "emit_report",
    "load_instance",
    "make_instance",
    "parse_plan",
    "render_plan",
    "run_experiment",
    "run_strategy",
    "verify_plan",
]
