"""On-disk formats: JSON state files, JSONL report records, plain text tables.

State file::

    {"n_qubits": 2, "amplitudes": [[re, im], ...]}
    {"n_qubits": 2, "density_matrix": [[[re, im], ...], ...]}

An optional ``"normalize": true`` rescales amplitudes instead of rejecting them.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Sequence

import numpy as np

from .qcore import DensityMatrix, PureState


class StateFormatError(ValueError):
    pass


def _complex_list(items, what: str) -> np.ndarray:
    if not isinstance(items, list):
        raise StateFormatError(f"{what} must be a list")
    out = []
    for pair in items:
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)):
            raise StateFormatError(f"{what} entries must be [re, im] number pairs")
        out.append(complex(pair[0], pair[1]))
    return np.array(out, dtype=complex)


def parse_state(text: str) -> PureState | DensityMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"state file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise StateFormatError("state file must hold a JSON object")
    n = doc.get("n_qubits")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise StateFormatError("n_qubits must be a positive integer")
    has_amp, has_rho = "amplitudes" in doc, "density_matrix" in doc
    if has_amp == has_rho:
        raise StateFormatError("give exactly one of 'amplitudes' or 'density_matrix'")
    try:
        if has_amp:
            amps = _complex_list(doc["amplitudes"], "amplitudes")
            if amps.size != 2**n:
                raise StateFormatError(f"expected {2**n} amplitudes, got {amps.size}")
            if doc.get("normalize", False):
                return PureState.from_amplitudes(amps)
            return PureState(amps)
        rows = doc["density_matrix"]
        if not isinstance(rows, list) or len(rows) != 2**n:
            raise StateFormatError(f"density_matrix must have {2**n} rows")
        m = np.stack([_complex_list(r, "density_matrix row") for r in rows])
        if m.shape != (2**n, 2**n):
            raise StateFormatError("density_matrix must be square")
        return DensityMatrix(m)
    except StateFormatError:
        raise
    except ValueError as exc:
        raise StateFormatError(str(exc)) from None


def load_state(path: str) -> PureState | DensityMatrix:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise StateFormatError(f"cannot read state file: {exc}") from None
    return parse_state(text)


def _pairs(v: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in v]


def dump_state(state: PureState | DensityMatrix) -> str:
    if isinstance(state, PureState):
        doc = {"n_qubits": state.n_qubits, "amplitudes": _pairs(state.amplitudes)}
    else:
        doc = {"n_qubits": state.n_qubits, "density_matrix": [_pairs(r) for r in state.matrix]}
    return json.dumps(doc) + "\n"


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (np.floating, np.integer)):
        return _clean(value.item())
    return value


def jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps({k: _clean(v) for k, v in r.items()}) + "\n" for r in records)


def report_records(report) -> list[dict]:
    """Quantity records followed by one record per relation."""
    out = [{"type": "quantity", "name": k, "value": v} for k, v in report.quantities().items()]
    out += [{"type": "relation", **r.as_record()} for r in report.relations]
    return out


def _cell(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.12g}"
    return str(v)


def text_table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    cells = [list(header)] + [[_cell(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in cells)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, (float, np.floating)) else str(v) for v in r))
    return "\n".join(lines) + "\n"


def report_table(report) -> str:
    quantities = text_table(("quantity", "value"), report.quantities().items())
    relations = text_table(
        ("relation", "kind", "lhs", "rhs", "residual", "tolerance", "verdict"),
        ((r.name, r.kind, r.lhs, r.rhs, r.residual, r.tolerance, r.verdict) for r in report.relations),
    )
    return quantities + "\n" + relations
