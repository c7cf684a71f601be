"""JSON wire formats.

vector:   {"n": int, "entries": [real, ...]}
matrix:   {"d": int, "entries": [[[re, im], ...], ...]}   (row-major)
channel:  {"d_in": int, "d_out": int, "kraus": [matrix, ...]} or
          {"d_in": int, "d_out": int, "choi": matrix}
tomo:     {"basis": [matrix, ...], "frequencies": [real, ...], "t": real}
"""

import json

import numpy as np

from .channels import Channel
from .errors import ValidationError


def _require(doc, key, kind):
    if not isinstance(doc, dict) or key not in doc:
        raise ValidationError(f"missing field {key!r}")
    value = doc[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ValidationError(f"field {key!r} must be an integer")
    if kind is list and not isinstance(value, list):
        raise ValidationError(f"field {key!r} must be a list")
    return value


def vector_from_json(doc):
    n = _require(doc, "n", int)
    entries = _require(doc, "entries", list)
    if len(entries) != n or n < 1:
        raise ValidationError(f"vector declares n={n} but has {len(entries)} entries")
    try:
        vec = np.array(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad vector entries: {exc}") from None
    if vec.ndim != 1 or not np.all(np.isfinite(vec)):
        raise ValidationError("vector entries must be finite reals")
    return vec


def vector_to_json(vec):
    vec = np.asarray(vec, dtype=float)
    return {"n": int(vec.size), "entries": vec.tolist()}


def matrix_from_json(doc):
    d = _require(doc, "d", int)
    rows = _require(doc, "entries", list)
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad matrix entries: {exc}") from None
    if arr.shape != (d, d, 2):
        raise ValidationError(f"matrix entries must have shape ({d}, {d}, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("matrix entries must be finite")
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    pairs = np.stack([m.real, m.imag], axis=-1)
    return {"d": int(m.shape[0]), "entries": pairs.tolist()}


def channel_from_json(doc):
    d_in = _require(doc, "d_in", int)
    d_out = _require(doc, "d_out", int)
    if "kraus" in doc:
        kraus = [_rect_matrix(k, d_out, d_in) for k in _require(doc, "kraus", list)]
        if not kraus:
            raise ValidationError("empty Kraus list")
        return Channel(d_in, d_out, kraus=kraus)
    if "choi" in doc:
        return Channel(d_in, d_out, choi=matrix_from_json(doc["choi"]))
    raise ValidationError("channel needs 'kraus' or 'choi'")


def _rect_matrix(doc, rows, cols):
    # Kraus operators may be rectangular; "d" is ignored when shapes differ.
    entries = _require(doc, "entries", list)
    arr = np.array(entries, dtype=float)
    if arr.shape != (rows, cols, 2):
        raise ValidationError(f"Kraus operator must have shape ({rows}, {cols}, 2)")
    return arr[..., 0] + 1j * arr[..., 1]


def tomo_from_json(doc):
    basis = [matrix_from_json(m) for m in _require(doc, "basis", list)]
    freqs = np.array(_require(doc, "frequencies", list), dtype=float)
    if "t" not in doc:
        raise ValidationError("missing field 't'")
    return basis, freqs, float(doc["t"])


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None


def dump(doc, path=None):
    text = json.dumps(doc, indent=2)
    if path is None:
        print(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
