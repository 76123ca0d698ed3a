"""Python bindings for the equilibrium-problem solvers.

`run` takes a config as a dict (same schema as the CLI's JSON files) and
returns the exit code, the parsed summary and the iterate records.
"""

import json
from dataclasses import dataclass, field

from ._core import Geometry, SolverError, retract_box
from ._core import run_config as _run_config

__all__ = ["Geometry", "SolverError", "retract_box", "run", "RunResult"]


@dataclass
class RunResult:
    exit_code: int
    summary: dict
    diagnostic: str
    records: list = field(default_factory=list)


def run(config, base_dir="", quantization=None, seed=42):
    text = config if isinstance(config, str) else json.dumps(config)
    code, summary, diagnostic, records = _run_config(text, str(base_dir), quantization, seed)
    return RunResult(code, json.loads(summary), diagnostic, list(records))
