"""Single output path for every command: text, JSON or CSV.

Each result is first turned into a Report (scalar fields plus an optional
table) and only then rendered, so the three formats carry the same numbers.
JSON carries a top-level schema version; CSV writes the table with '.'
decimals and a fixed number of significant digits.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from qst_bell.models import (
    BellEstimate,
    BellReport,
    EigenDecomposition,
    GameSummary,
    LhvResult,
    PerturbationResult,
    SeesawResult,
    TargetSet,
)
from qst_bell.quantum.linalg import fidelity, project_alice, to_json_pairs
from qst_bell.quantum.states import (
    computational_basis,
    fourier_basis,
    intermediate_grid,
    max_entangled,
    steering_vector,
)
from qst_bell.utils.config import OutputConfig
from qst_bell.utils.errors import DomainError

FORMATS = ("text", "json", "csv")


@dataclass(frozen=True)
class Report:
    """Rendered result of one command."""

    command: str
    fields: dict[str, Any] = field(default_factory=dict)
    table: pd.DataFrame | None = None
    table_name: str = "table"


def _plain(value: Any) -> Any:
    """Convert numpy scalars, enums and complex numbers into JSON-native values."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return to_json_pairs(value)
        return _plain(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return None if math.isnan(value) else float(value)
    return value


def to_json(report: Report, schema_version: int = 1) -> str:
    payload: dict[str, Any] = {"schema": schema_version, "command": report.command}
    payload.update(_plain(report.fields))
    if report.table is not None:
        payload[report.table_name] = _plain(report.table.to_dict(orient="records"))
    return json.dumps(payload, indent=2) + "\n"


def to_csv(report: Report, significant_digits: int = 7) -> str:
    """The table as CSV; a report without a table becomes one row of its scalar fields."""
    frame = report.table
    if frame is None:
        scalars = {k: v for k, v in _plain(report.fields).items() if not isinstance(v, (list, dict))}
        frame = pd.DataFrame([scalars])
    return frame.to_csv(index=False, float_format=f"%.{significant_digits}g", lineterminator="\n")


def _format_scalar(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    if value is None:
        return "undefined"
    return str(value)


def to_text(report: Report) -> str:
    """Aligned `key: value` lines followed by the table; nested values are JSON-only."""
    fields = _plain(report.fields)
    scalars = {k: v for k, v in fields.items() if not isinstance(v, (list, dict))}
    lines = [f"[{report.command}]"]
    if scalars:
        width = max(len(k) for k in scalars)
        lines.extend(f"{k.ljust(width)} : {_format_scalar(v)}" for k, v in scalars.items())
    for name, value in fields.items():
        if isinstance(value, dict) and all(not isinstance(v, (list, dict)) for v in value.values()):
            lines.append(f"{name}:")
            lines.extend(f"  {k}: {_format_scalar(v)}" for k, v in value.items())
    if report.table is not None:
        lines.append("")
        lines.append(report.table.to_string(index=False, float_format=lambda x: f"{x:.10g}"))
    return "\n".join(lines) + "\n"


def render(report: Report, fmt: str = "text", config: OutputConfig | None = None) -> str:
    config = config or OutputConfig()
    if fmt == "json":
        return to_json(report, config.schema_version)
    if fmt == "csv":
        return to_csv(report, config.csv_significant_digits)
    if fmt == "text":
        return to_text(report)
    raise DomainError(f"Unknown output format: {fmt}. Supported: {', '.join(FORMATS)}")


def emit(report: Report, fmt: str = "text", out_path: Path | None = None, config: OutputConfig | None = None) -> None:
    """Render fully, then write to out_path or stdout in one piece."""
    content = render(report, fmt, config)
    if out_path is None:
        sys.stdout.write(content)
        sys.stdout.flush()
        return
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(content, encoding="utf-8")


# ── Report builders ─────────────────────────────────────────────────────────


def states_report(d: int) -> Report:
    """Bases, intermediate grid, overlaps and fire probabilities at dimension d."""
    a_basis = computational_basis(d)
    aprime_basis = fourier_basis(d)
    grid = intermediate_grid(d)
    state = max_entangled(d)

    records = []
    for target in TargetSet.all(d):
        m = grid[target]
        fire, _ = project_alice(state, steering_vector(d, target), d)
        records.append(
            {
                "k": target.k,
                "l": target.l,
                "fidelity_a": fidelity(a_basis[target.k], m),
                "fidelity_aprime": fidelity(aprime_basis[target.l], m),
                "fire_probability": fire,
            }
        )

    return Report(
        command="states show",
        fields={
            "d": d,
            "normalizer": grid.normalizer,
            "mub_overlap": fidelity(a_basis[0], aprime_basis[0]),
            "basis_a": a_basis.vectors,
            "basis_aprime": aprime_basis.vectors,
            "intermediate_states": grid.states.reshape(d * d, d),
            "max_entangled": state,
        },
        table=pd.DataFrame.from_records(records),
        table_name="grid",
    )


def game_report(summary: GameSummary) -> Report:
    return Report(
        command="game simulate",
        fields={
            "d": summary.d,
            "rounds": summary.rounds,
            "seed": summary.seed,
            "policy": summary.policy,
            "announced": summary.announced,
            "fire_rate": summary.fire_rate,
            "std_err_fire": summary.std_err_fire,
            "rates_defined": summary.rates_defined,
            "pass_rate_given_announce": summary.pass_rate_given_announce,
            "fail_rate_given_announce": summary.fail_rate_given_announce,
            "std_err_pass": summary.std_err_pass,
            "outcome_counts": summary.outcome_counts,
        },
    )


def estimate_report(estimate: BellEstimate, exact: float) -> Report:
    return Report(
        command="game estimate",
        fields={
            "d": estimate.d,
            "rounds": estimate.rounds,
            "seed": estimate.seed,
            "estimate": estimate.value,
            "std_err": estimate.std_err,
            "exact": exact,
            "deviation_in_std_err": (estimate.value - exact) / estimate.std_err if estimate.std_err else None,
        },
    )


def bell_report(report: BellReport, groups: bool = False) -> Report:
    """Exact value with the per-pair joint table, or the per-M-set grouping."""
    table = report.group_rows() if groups else report.table.to_frame()
    return Report(
        command="bell exact",
        fields={
            "d": report.d,
            "quantum": report.quantum_value,
            "classical": report.classical_bound,
            "ratio": report.violation_ratio,
        },
        table=table,
        table_name="groups" if groups else "pairs",
    )


def operator_report(d: int, decomposition: EigenDecomposition | None, trace: float, overlap: float | None) -> Report:
    fields: dict[str, Any] = {"d": d, "dimension": d * d, "trace": trace}
    table = None
    if decomposition is not None:
        fields["top_eigenvalue"] = decomposition.top_value
        fields["top_fidelity_max_entangled"] = overlap
        fields["top_eigenvector"] = decomposition.top_vector
        table = pd.DataFrame({"index": range(len(decomposition.eigenvalues)), "eigenvalue": decomposition.eigenvalues})
    return Report(command="bell operator", fields=fields, table=table, table_name="eigenvalues")


def seesaw_report(result: SeesawResult, seed: int) -> Report:
    table = pd.DataFrame(
        {
            "trial": range(len(result.trial_values)),
            "value": result.trial_values,
            "iterations": result.iterations,
        }
    )
    return Report(
        command="bell seesaw",
        fields={
            "d": result.d,
            "seed": seed,
            "trials": len(result.trial_values),
            "best_value": result.best_value,
            "quantum_limit": 2.0 * math.sqrt(result.d),
            "converged": result.converged,
        },
        table=table,
        table_name="runs",
    )


def lhv_report(result: LhvResult) -> Report:
    return Report(
        command="bell lhv",
        fields={
            "d": result.d,
            "mode": result.mode,
            "max": result.max_value,
            "count": result.strategies_scanned,
            "argmax": {
                "a": result.argmax.a,
                "a_prime": result.argmax.a_prime,
                "fires": result.argmax.fires,
            },
        },
    )


def sweep_report(frame: pd.DataFrame) -> Report:
    return Report(command="bell sweep", table=frame, table_name="rows")


def perturbation_report(result: PerturbationResult, seed: int) -> Report:
    return Report(
        command="bell perturb",
        fields={
            "d": result.d,
            "seed": seed,
            "samples": result.samples,
            "scale": result.scale,
            "baseline": result.baseline,
            "max_perturbed": result.max_perturbed,
            "ascent_found": result.ascent_found,
        },
    )
