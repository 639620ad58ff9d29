"""JSON and CSV interchange. Matrices are {"rows", "cols", "data"} with
data a row-major list of [re, im] pairs; JSON output is key-sorted with
two-space indent so equal inputs give byte-identical files."""

from __future__ import annotations

import json
import math

import numpy as np

from .dilation import Dilation
from .instruments import Instrument
from .report import Report
from .sampling import Histogram
from .states import State

CSV_HEADER = "outcome_index,count,exact_probability"


class InputError(ValueError):
    """Malformed or inconsistent external input."""


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise InputError("matrix payload must be two-dimensional")
    data = [[float(np.real(v)), float(np.imag(v))] for v in m.reshape(-1)]
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "data": data}


def matrix_from_json(obj, expect_square: bool = False) -> np.ndarray:
    if not isinstance(obj, dict):
        raise InputError("matrix payload must be an object")
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"matrix payload missing fields: {exc}") from exc
    if rows <= 0 or cols <= 0 or len(data) != rows * cols:
        raise InputError("matrix payload has inconsistent shape")
    if expect_square and rows != cols:
        raise InputError("matrix payload must be square")
    flat = np.empty(rows * cols, dtype=complex)
    for i, pair in enumerate(data):
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2
                or not all(isinstance(v, (int, float)) for v in pair)):
            raise InputError(f"matrix entry {i} is not an [re, im] pair")
        re, im = float(pair[0]), float(pair[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise InputError(f"matrix entry {i} is not finite")
        flat[i] = complex(re, im)
    return flat.reshape(rows, cols)


def vector_from_json(obj) -> np.ndarray:
    m = matrix_from_json(obj)
    if 1 not in m.shape:
        raise InputError("vector payload must have one row or one column")
    return m.reshape(-1)


def state_to_json(s: State) -> dict:
    return {"dim": s.dim, "density": matrix_to_json(s.density)}


def state_from_json(obj, validate: bool = True) -> State:
    if not isinstance(obj, dict) or "density" not in obj:
        raise InputError("state payload must carry a density field")
    density = matrix_from_json(obj["density"], expect_square=True)
    if "dim" in obj and int(obj["dim"]) != density.shape[0]:
        raise InputError("state payload dim does not match its density")
    s = State(density)
    if validate:
        try:
            s.validate()
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    return s


def instrument_to_json(E: Instrument) -> dict:
    return {"dim": E.observed_dim,
            "outcomes": [{"label": E.labels[i],
                          "choi": matrix_to_json(E.chois[i])}
                         for i in range(E.outcomes)]}


def instrument_from_json(obj, validate: bool = True) -> Instrument:
    if not isinstance(obj, dict) or "outcomes" not in obj or "dim" not in obj:
        raise InputError("instrument payload must carry dim and outcomes")
    d = int(obj["dim"])
    chois, labels = [], []
    if not obj["outcomes"]:
        raise InputError("instrument payload has no outcomes")
    for i, entry in enumerate(obj["outcomes"]):
        if not isinstance(entry, dict) or "choi" not in entry:
            raise InputError(f"outcome {i} missing its choi field")
        c = matrix_from_json(entry["choi"], expect_square=True)
        if c.shape[0] != d * d:
            raise InputError(f"outcome {i}: choi side {c.shape[0]} != dim^2")
        chois.append(c)
        labels.append(str(entry.get("label", f"E{i + 1}")))
    E = Instrument(observed_dim=d, chois=tuple(chois), labels=tuple(labels))
    if validate:
        try:
            E.validate()
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    return E


def dilation_to_json(dil: Dilation) -> dict:
    return {"observed_dim": dil.observed_dim,
            "probe_dim": dil.probe_dim,
            "kraus_rank": dil.kraus_rank,
            "labels": list(dil.labels),
            "omega": matrix_to_json(dil.omega.reshape(-1, 1)),
            "projections": [matrix_to_json(e) for e in dil.projections],
            "unitary": matrix_to_json(dil.unitary)}


def dilation_from_json(obj) -> Dilation:
    try:
        d = int(obj["observed_dim"])
        P = int(obj["probe_dim"])
        labels = tuple(str(x) for x in obj.get("labels", []))
        omega = vector_from_json(obj["omega"])
        projections = tuple(matrix_from_json(e, expect_square=True)
                            for e in obj["projections"])
        unitary = matrix_from_json(obj["unitary"], expect_square=True)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"dilation payload malformed: {exc}") from exc
    if omega.size != P or unitary.shape[0] != d * P:
        raise InputError("dilation payload dimensions are inconsistent")
    return Dilation(observed_dim=d, probe_dim=P, omega=omega,
                    projections=projections, unitary=unitary, labels=labels,
                    kraus_rank=int(obj.get("kraus_rank", 0)))


def report_to_json(rep: Report) -> dict:
    out = {"checks": [{"name": c.name,
                       "residual": float(c.residual),
                       "tolerance": float(c.tolerance),
                       "pass": bool(c.passed)} for c in rep.checks],
           "meta": dict(rep.meta)}
    if rep.derived:
        out["derived"] = _plain(rep.derived)
    if rep.notes:
        out["meta"] = {**out["meta"], "notes": list(rep.notes)}
    return out


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return [_plain(complex(v)) for v in obj.reshape(-1)]
        return [_plain(float(v)) for v in obj.reshape(-1)]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return [float(obj.real), float(obj.imag)]
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def histogram_csv(hist: Histogram) -> str:
    lines = [CSV_HEADER]
    for i in range(hist.counts.size):
        lines.append(f"{i},{int(hist.counts[i])},{float(hist.probabilities[i])!r}")
    return "\n".join(lines) + "\n"


def write_histogram_csv(path, hist: Histogram) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(histogram_csv(hist))


def read_histogram_csv(path) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not lines or lines[0] != CSV_HEADER:
        raise InputError("histogram CSV header mismatch")
    counts, probs = [], []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 3:
            raise InputError(f"histogram CSV row malformed: {ln!r}")
        counts.append(int(parts[1]))
        probs.append(float(parts[2]))
    return np.asarray(counts, dtype=np.int64), np.asarray(probs)
