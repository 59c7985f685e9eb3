"""JSON model files.

Format::

    {"drift": {"xi": r, "eta": r},
     "gaussian": {"var_xi": r, "cov": r, "var_eta": r},
     "jumps": [{"rate": r, "x": r, "y": r}, ...]}

``jumps`` may instead be ``{"lambda": r, "atoms": [{"p": r, "x": r, "y": r}]}``
with probabilities summing to one. ``gaussian`` and ``jumps`` are optional.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .levy import (
    AtomicJumpMeasure,
    BivariateTriplet,
    GaussianCovariance,
    JumpAtom,
    ModelError,
)


class ModelFileError(ModelError):
    """A model file that cannot be read; the message names the offending field."""


def _num(obj: dict, key: str, where: str, default: float | None = None) -> float:
    if key not in obj:
        if default is not None:
            return default
        raise ModelFileError(f"{where}.{key}: missing")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ModelFileError(f"{where}.{key}: expected a number, got {val!r}")
    if not math.isfinite(val):
        raise ModelFileError(f"{where}.{key}: must be finite, got {val!r}")
    return float(val)


def _obj(val: Any, where: str) -> dict:
    if not isinstance(val, dict):
        raise ModelFileError(f"{where}: expected an object, got {type(val).__name__}")
    return val


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ModelFileError(f"{where}: unknown field(s) {', '.join(extra)}")


def _jumps(val: Any) -> AtomicJumpMeasure:
    if isinstance(val, list):
        atoms = []
        for i, item in enumerate(val):
            where = f"jumps[{i}]"
            item = _obj(item, where)
            _check_keys(item, {"rate", "x", "y"}, where)
            try:
                atoms.append(JumpAtom(_num(item, "rate", where), _num(item, "x", where), _num(item, "y", where)))
            except ModelFileError:
                raise
            except ModelError as exc:
                raise ModelFileError(f"{where}: {exc}") from exc
        return AtomicJumpMeasure(tuple(atoms))
    obj = _obj(val, "jumps")
    _check_keys(obj, {"lambda", "atoms"}, "jumps")
    lam = _num(obj, "lambda", "jumps")
    raw = obj.get("atoms")
    if not isinstance(raw, list):
        raise ModelFileError("jumps.atoms: expected a list")
    triples = []
    for i, item in enumerate(raw):
        where = f"jumps.atoms[{i}]"
        item = _obj(item, where)
        _check_keys(item, {"p", "x", "y"}, where)
        p = _num(item, "p", where)
        if not 0 <= p <= 1:
            raise ModelFileError(f"{where}.p: probability must lie in [0, 1], got {p!r}")
        triples.append((p, _num(item, "x", where), _num(item, "y", where)))
    try:
        return AtomicJumpMeasure.from_compound_poisson(lam, triples)
    except ModelError as exc:
        raise ModelFileError(f"jumps: {exc}") from exc


def model_from_dict(data: Any) -> BivariateTriplet:
    data = _obj(data, "model")
    _check_keys(data, {"drift", "gaussian", "jumps", "name", "description"}, "model")
    drift = _obj(data.get("drift", {}), "drift")
    _check_keys(drift, {"xi", "eta"}, "drift")
    gauss = _obj(data.get("gaussian", {}), "gaussian")
    _check_keys(gauss, {"var_xi", "cov", "var_eta"}, "gaussian")
    try:
        gaussian = GaussianCovariance(
            _num(gauss, "var_xi", "gaussian", 0.0),
            _num(gauss, "cov", "gaussian", 0.0),
            _num(gauss, "var_eta", "gaussian", 0.0),
        )
    except ModelFileError:
        raise
    except ModelError as exc:
        raise ModelFileError(f"gaussian: {exc}") from exc
    jumps = _jumps(data.get("jumps", []))
    try:
        return BivariateTriplet(
            _num(drift, "xi", "drift", 0.0), _num(drift, "eta", "drift", 0.0), gaussian, jumps
        )
    except ModelFileError:
        raise
    except ModelError as exc:
        raise ModelFileError(f"model: {exc}") from exc


def model_to_dict(triplet: BivariateTriplet) -> dict:
    g = triplet.gaussian
    return {
        "drift": {"xi": triplet.drift_xi, "eta": triplet.drift_eta},
        "gaussian": {"var_xi": g.var_xi, "cov": g.cov, "var_eta": g.var_eta},
        "jumps": [{"rate": a.rate, "x": a.x, "y": a.y} for a in triplet.atoms],
    }


def loads_model(text: str, source: str = "<string>") -> BivariateTriplet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        return model_from_dict(data)
    except ModelFileError as exc:
        raise ModelFileError(f"{source}: {exc}") from exc


def load_model(path: str | Path) -> BivariateTriplet:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelFileError(f"{path}: cannot read ({exc.strerror})") from exc
    return loads_model(text, str(path))


def dump_model(triplet: BivariateTriplet, path: str | Path | None = None) -> str:
    text = json.dumps(model_to_dict(triplet), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
