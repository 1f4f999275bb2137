"""
JSON scenario files and CSV output.

A scenario looks like::

    {
      "dimension": 2,
      "initial_state": {"type": "pure", "vector": [[1, 0], [0, 0]]},
      "hypotheses": [
        {"label": "undriven",
         "hamiltonian": {"preset": "two_level", "rabi": 0, "detuning": 0, "kappa": 1}},
        {"hamiltonian": {"matrix": [[[0, 0], [2, 0]], [[2, 0], [0, 0]]]},
         "channels": [{"preset": "decay", "kappa": 1}]}
      ],
      "time": {"t_max": 5, "steps": 500}
    }

Complex numbers are ``[re, im]`` pairs. A ``two_level`` Hamiltonian preset
without a ``channels`` key also brings its decay channel ``sqrt(kappa)|g><e|``.
A matrix Hamiltonian may carry ``"drives": [{"coefficient": {...}, "matrix": ...}]``
with coefficients ``{"type": "constant", "value"}``,
``{"type": "piecewise", "breakpoints", "values"}`` or
``{"type": "sinusoid", "amplitude", "frequency", "phase", "offset"}``.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ValidationError
from .model import (
    Constant,
    Hypothesis,
    HypothesisPair,
    PiecewiseConstant,
    Sinusoid,
    TimeDependentHamiltonian,
    TwoLevelParams,
    build_two_level,
    validate_pair,
)

__all__ = ["Scenario", "load_scenario", "parse_scenario", "time_grid", "write_csv", "format_float"]


@dataclass
class Scenario:
    pair: HypothesisPair
    t_max: Optional[float] = None
    steps: Optional[int] = None


def _complex(entry, where: str) -> complex:
    if (
        not isinstance(entry, (list, tuple))
        or len(entry) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
    ):
        raise ValidationError(f"{where}: expected a [re, im] pair, got {entry!r}")
    return complex(entry[0], entry[1])


def _matrix(rows, d: int, where: str) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != d or any(
        not isinstance(r, list) or len(r) != d for r in rows
    ):
        raise ValidationError(f"{where}: expected a {d}x{d} nested list of [re, im] pairs")
    return np.array([[_complex(e, where) for e in r] for r in rows], dtype=complex)


def _number(obj: dict, key: str, where: str, default=None) -> float:
    val = obj.get(key, default)
    if val is None or isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ValidationError(f"{where}: '{key}' must be a number")
    return float(val)


def _coefficient(spec: dict, where: str):
    kind = spec.get("type")
    if kind == "constant":
        return Constant(_number(spec, "value", where))
    if kind == "piecewise":
        return PiecewiseConstant(
            tuple(float(b) for b in spec.get("breakpoints", [])),
            tuple(float(v) for v in spec.get("values", [])),
        )
    if kind == "sinusoid":
        return Sinusoid(
            _number(spec, "amplitude", where),
            _number(spec, "frequency", where),
            _number(spec, "phase", where, 0.0),
            _number(spec, "offset", where, 0.0),
        )
    raise ValidationError(f"{where}: unknown coefficient type {kind!r}")


def _two_level_params(spec: dict, where: str) -> TwoLevelParams:
    return TwoLevelParams(
        _number(spec, "rabi", where, 0.0),
        _number(spec, "detuning", where, 0.0),
        _number(spec, "kappa", where, 1.0),
    )


def _hypothesis(spec: dict, d: int, index: int) -> Hypothesis:
    where = f"hypotheses[{index}]"
    if not isinstance(spec, dict) or "hamiltonian" not in spec:
        raise ValidationError(f"{where}: missing 'hamiltonian'")
    label = str(spec.get("label", f"H{index}"))
    hspec = spec["hamiltonian"]
    preset_channels: tuple = ()
    if isinstance(hspec, dict) and hspec.get("preset") == "two_level":
        if d != 2:
            raise ValidationError(f"{where}: two_level preset needs dimension 2")
        preset = build_two_level(_two_level_params(hspec, where + ".hamiltonian"), label)
        ham = preset.hamiltonian
        preset_channels = preset.channels
    elif isinstance(hspec, dict) and "matrix" in hspec:
        drives = tuple(
            (
                _coefficient(dr.get("coefficient", {}), f"{where}.drives[{j}]"),
                _matrix(dr.get("matrix"), d, f"{where}.drives[{j}]"),
            )
            for j, dr in enumerate(hspec.get("drives", []))
        )
        ham = TimeDependentHamiltonian(_matrix(hspec["matrix"], d, where + ".hamiltonian"), drives)
    else:
        raise ValidationError(f"{where}: hamiltonian needs 'preset': 'two_level' or 'matrix'")

    if "channels" not in spec:
        channels = preset_channels
    else:
        channels = []
        for j, cspec in enumerate(spec["channels"]):
            cw = f"{where}.channels[{j}]"
            if isinstance(cspec, dict) and cspec.get("preset") == "decay":
                if d != 2:
                    raise ValidationError(f"{cw}: decay preset needs dimension 2")
                kappa = _number(cspec, "kappa", cw, 1.0)
                if kappa < 0:
                    raise ValidationError(f"{cw}: kappa must be non-negative")
                channels.append(math.sqrt(kappa) * np.array([[0, 1], [0, 0]], dtype=complex))
            elif isinstance(cspec, dict) and "matrix" in cspec:
                channels.append(_matrix(cspec["matrix"], d, cw))
            else:
                raise ValidationError(f"{cw}: channel needs 'preset': 'decay' or 'matrix'")
    return Hypothesis(label, ham, tuple(channels))


def parse_scenario(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ValidationError("scenario must be a JSON object")
    d = doc.get("dimension")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ValidationError("'dimension' must be a positive integer")
    init = doc.get("initial_state")
    if not isinstance(init, dict) or init.get("type") != "pure":
        raise ValidationError("initial_state must be {'type': 'pure', 'vector': [...]}")
    vector = init.get("vector")
    if not isinstance(vector, list) or len(vector) != d:
        raise ValidationError(f"initial_state.vector must have {d} entries")
    psi = np.array([_complex(e, "initial_state.vector") for e in vector])
    hyps = doc.get("hypotheses")
    if not isinstance(hyps, list) or len(hyps) != 2:
        raise ValidationError("scenario needs exactly two hypotheses")
    pair = validate_pair(HypothesisPair(_hypothesis(hyps[0], d, 0), _hypothesis(hyps[1], d, 1), psi))

    scn = Scenario(pair)
    tspec = doc.get("time")
    if tspec is not None:
        if not isinstance(tspec, dict):
            raise ValidationError("'time' must be an object")
        scn.t_max = _number(tspec, "t_max", "time")
        steps = tspec.get("steps")
        if not isinstance(steps, int) or isinstance(steps, bool):
            raise ValidationError("time.steps must be an integer")
        scn.steps = steps
    return scn


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file. ``OSError`` propagates for I/O problems."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    return parse_scenario(doc)


def time_grid(t_max: float, steps: int) -> np.ndarray:
    """``steps`` equal intervals on ``[0, t_max]`` (``steps + 1`` points)."""
    if not t_max > 0:
        raise ValidationError("t_max must be positive")
    if steps < 1:
        raise ValidationError("steps must be >= 1")
    return np.linspace(0.0, t_max, steps + 1)


def format_float(x: float) -> str:
    # 17 significant digits round-trip every double exactly
    return format(float(x), ".17g")


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> None:
    """Write a header and numeric rows; ``path`` of ``None`` or ``'-'`` means stdout."""
    lines = [list(header)] + [[format_float(v) for v in row] for row in rows]
    if path is None or str(path) == "-":
        csv.writer(sys.stdout, lineterminator="\n").writerows(lines)
        return
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(lines)
