"""JSON files for curves, Legendrians, fronts, families, models and reports.

Every file is a JSON object with a ``format`` tag. Floats are written with
17 significant digits so that a load after a save reproduces the arrays
bit for bit. See ``docs/formats.md`` for the field lists.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path
from typing import Any

import numpy as np

from .curves import SampledCurve
from .errors import FormatError, IoFailure, NonFinitePoint
from .fronts import Front
from .geiges import LegendrianCurve
from .models import EngelModel, model_from_manifest, model_to_manifest

VERSION = 1
CURVE = "engelflex.curve"
LEGENDRIAN = "engelflex.legendrian"
FRONT = "engelflex.front"
FAMILY = "engelflex.family"
MODEL = "engelflex.model"
REPORT = "engelflex.report"


def _num(v: float) -> str:
    v = float(v)
    if not math.isfinite(v):
        raise NonFinitePoint(f"cannot serialise non-finite value {v}")
    s = format(v, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 0, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits.

    Numeric arrays are written one row per line to keep files diffable.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    nl = "\n" if indent else ""
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[" + nl + ("," + nl).join(items) + nl + end + "]"
    if isinstance(obj, dict):
        items = [pad + json.dumps(str(k)) + ": " + dumps(v, indent, _level + 1) for k, v in obj.items()]
        return "{" + nl + ("," + nl).join(items) + nl + end + "}"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path, obj: dict) -> None:
    try:
        Path(path).write_text(dumps(obj, indent=1) + "\n")
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


def read_json(path, expect: str | None = None) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path} is not JSON: {e}") from e
    if not isinstance(d, dict):
        raise FormatError(f"{path} does not hold an object")
    if expect is not None and d.get("format") != expect:
        raise FormatError(f"{path}: expected format {expect!r}, found {d.get('format')!r}")
    return d


def _array(d: dict, key: str, cols: int | None) -> np.ndarray:
    if key not in d:
        raise FormatError(f"missing field {key!r}")
    a = np.asarray(d[key], dtype=float)
    if cols is None:
        if a.ndim != 1:
            raise FormatError(f"{key!r} must be a flat array")
    elif a.ndim != 2 or a.shape[1] != cols:
        raise FormatError(f"{key!r} must be an array of {cols}-vectors")
    if not np.all(np.isfinite(a)):
        raise NonFinitePoint(f"{key!r} holds non-finite values")
    return a


# ---------------------------------------------------------------------------
# curves


def curve_to_dict(c: SampledCurve) -> dict:
    d = {"format": CURVE, "version": VERSION, "closed": bool(c.closed), "params": c.params, "points": c.points}
    if c.framing is not None:
        d["framing"] = c.framing
    return d


def curve_from_dict(d: dict) -> SampledCurve:
    framing = _array(d, "framing", 4) if d.get("framing") is not None else None
    return SampledCurve(_array(d, "params", None), _array(d, "points", 4), bool(d.get("closed", False)), framing)


def save_curve(c: SampledCurve, path) -> None:
    write_json(path, curve_to_dict(c))


def load_curve(path) -> SampledCurve:
    return curve_from_dict(read_json(path, CURVE))


def legendrian_to_dict(l: LegendrianCurve) -> dict:
    return {"format": LEGENDRIAN, "version": VERSION, "closed": bool(l.closed), "params": l.params, "points": l.points}


def save_legendrian(l: LegendrianCurve, path) -> None:
    write_json(path, legendrian_to_dict(l))


def load_legendrian(path) -> LegendrianCurve:
    d = read_json(path, LEGENDRIAN)
    return LegendrianCurve(_array(d, "params", None), _array(d, "points", 3), bool(d.get("closed", False)))


def front_to_dict(f: Front) -> dict:
    return {
        "format": FRONT,
        "version": VERSION,
        "closed": bool(f.closed),
        "params": f.params,
        "points": f.points,
        "cusp_marks": list(f.cusp_marks),
        "slope_bound": None if math.isinf(f.slope_bound) else float(f.slope_bound),
        "loop_windows": [list(w) for w in f.loop_windows],
    }


def front_from_dict(d: dict) -> Front:
    sb = d.get("slope_bound")
    return Front(
        _array(d, "params", None),
        _array(d, "points", 2),
        [float(c) for c in d.get("cusp_marks", [])],
        math.inf if sb is None else float(sb),
        bool(d.get("closed", False)),
        [tuple(map(float, w)) for w in d.get("loop_windows", [])],
    )


def save_front(f: Front, path) -> None:
    write_json(path, front_to_dict(f))


def load_front(path) -> Front:
    return front_from_dict(read_json(path, FRONT))


# ---------------------------------------------------------------------------
# models, families, reports


def save_model(m: EngelModel, path) -> None:
    d = {"format": MODEL, "version": VERSION}
    d.update(model_to_manifest(m))
    write_json(path, d)


def load_model(path) -> EngelModel:
    d = read_json(path, MODEL)
    return model_from_manifest(d)


def save_family(h, directory) -> list[Path]:
    """Write ``family.json`` plus one ``slice_NNN.json`` per time slice."""
    directory = Path(directory)
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as e:
        raise IoFailure(f"cannot create {directory}: {e}") from e
    names = [f"slice_{k:03d}.json" for k in range(len(h.slices))]
    written = []
    for name, c in zip(names, h.slices):
        save_curve(c, directory / name)
        written.append(directory / name)
    index = {"format": FAMILY, "version": VERSION, "time_grid": h.time_grid, "slices": names}
    if h.windows:
        index["windows"] = [list(w) for w in h.windows]
    if h.amplitudes is not None:
        index["amplitudes"] = h.amplitudes
    if h.report is not None:
        index["report"] = report_dict(h.report)
    write_json(directory / "family.json", index)
    written.append(directory / "family.json")
    return written


def load_family(directory):
    from .homotopy import HomotopyFamily

    directory = Path(directory)
    d = read_json(directory / "family.json", FAMILY)
    slices = [load_curve(directory / name) for name in d.get("slices", [])]
    times = _array(d, "time_grid", None)
    if len(times) != len(slices):
        raise FormatError("time grid and slice list differ in length")
    amps = np.asarray(d["amplitudes"], dtype=float) if "amplitudes" in d else None
    windows = [tuple(w) for w in d.get("windows", [])]
    return HomotopyFamily(times, slices, None, amps, windows)


def report_dict(r) -> dict:
    return {
        "passed": bool(r.passed),
        "first_bad": r.first_bad,
        "reason": r.reason,
        "residuals": list(map(float, r.residuals)),
        "closure_defects": list(map(float, r.closure_defects)),
        "rotations": list(r.rotations),
        "classes": list(r.classes),
    }


def deformation_report(d, front_file: str | None = None) -> dict:
    """Model descriptor, front reference, closure defect and residuals."""
    from .rigidity import deformation_residual

    out = {"format": REPORT, "version": VERSION, "kind": "torus_deformation"}
    out["model"] = model_to_manifest(d.model)
    if front_file is not None:
        out["front"] = front_file
    out["closure_defect"] = float(d.closure_defect)
    out["angle_residual"] = float(d.angle_residual)
    out["y_residual"] = float(d.y_residual)
    out["horizontality_residual"] = float(deformation_residual(d))
    out["y0"] = d.y0
    out["y1"] = d.y1
    out["info"] = {k: float(v) for k, v in d.info.items()}
    return out
