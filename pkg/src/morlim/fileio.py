"""Disk formats: Matrix Market models, JSON reports/configs, CSV tables.

All writes are atomic (temp file + rename in the target directory) so a
crashed run never leaves a half-written model behind.  JSON follows two
conventions used across the package: complex numbers are encoded as
``[real, imag]`` pairs and non-finite floats become ``null``.
"""

from __future__ import annotations

import io
import json
import math
import os
import tempfile

import numpy as np
import scipy.io

from .ltimodel import StateSpace

MODEL_FILES = ("A.mtx", "B.mtx", "C.mtx")


def _atomic_write_bytes(path, payload):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_text(path, text):
    _atomic_write_bytes(path, text.encode("utf-8"))


# ---------------------------------------------------------------------------
# Matrix Market


def write_matrix(path, M):
    buf = io.BytesIO()
    scipy.io.mmwrite(buf, np.atleast_2d(np.asarray(M)))
    _atomic_write_bytes(path, buf.getvalue())


def read_matrix(path):
    path = os.fspath(path)
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such matrix file: {path}")
    M = scipy.io.mmread(path)
    if hasattr(M, "todense"):
        M = M.todense()
    return np.asarray(M)


def write_statespace(dirpath, sys):
    """A.mtx / B.mtx / C.mtx in a directory."""
    dirpath = os.fspath(dirpath)
    os.makedirs(dirpath, exist_ok=True)
    for name, M in zip(MODEL_FILES, (sys.A, sys.B, sys.C)):
        write_matrix(os.path.join(dirpath, name), M)


def read_statespace(dirpath):
    dirpath = os.fspath(dirpath)
    mats = []
    for name in MODEL_FILES:
        mats.append(read_matrix(os.path.join(dirpath, name)))
    return StateSpace(*mats)


# ---------------------------------------------------------------------------
# JSON


def jsonable(obj):
    """Recursively convert to JSON-encodable types.

    Complex values become [real, imag]; non-finite floats become null.
    """
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return [jsonable(z.real), jsonable(z.imag)]
    if isinstance(obj, np.ndarray):
        return [jsonable(x) for x in obj.tolist()] if obj.ndim else jsonable(obj.item())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    raise TypeError(f"cannot encode {type(obj).__name__} as JSON")


def write_json(path, obj):
    text = json.dumps(jsonable(obj), indent=2, sort_keys=True,
                      allow_nan=False) + "\n"
    _atomic_write_text(path, text)


def read_json(path):
    path = os.fspath(path)
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# CSV


def _cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if math.isfinite(v) else ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    raise TypeError(f"cannot encode {type(v).__name__} in CSV")


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")
