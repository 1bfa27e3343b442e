"""JSON and CSV encodings for graphs, scars and result tables.

Complex numbers travel as ``[re, im]`` pairs and matrices as row-major
lists of such pairs.  Output is deterministic: keys are sorted, floats
use ``repr`` in JSON and ``%.17g`` in CSV, so equal inputs give
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .graphcore import CentralScattering, StarGraph


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_vector(v) -> list[list[float]]:
    return [complex_pair(z) for z in np.asarray(v).ravel()]


def encode_matrix(M) -> list[list[list[float]]]:
    return [encode_vector(row) for row in np.asarray(M)]


def decode_complex(pair) -> complex:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise ValueError(f"expected [re, im] pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def decode_vector(data) -> np.ndarray:
    return np.array([decode_complex(p) for p in data], dtype=complex)


def decode_matrix(data) -> np.ndarray:
    rows = [decode_vector(r) for r in data]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix must be a non-empty square list of rows")
    return np.array(rows)


def graph_to_dict(g: StarGraph, sqrt_primes: bool = False) -> dict:
    c = g.central
    central: Any = {"explicit": encode_matrix(c.explicit)} if c.kind == "explicit" else c.kind
    return {"B": g.B, "lengths": "sqrt-primes" if sqrt_primes else [float(x) for x in g.lengths], "central": central}


def graph_from_dict(d: dict) -> StarGraph:
    """Inverse of :func:`graph_to_dict`; raises ``ValueError`` on malformed input."""
    try:
        B = int(d["B"])
        lengths = d.get("lengths", "sqrt-primes")
        central = d.get("central", "fourier")
    except (KeyError, TypeError) as exc:
        raise ValueError(f"graph description needs a 'B' entry: {exc}") from exc
    if B < 1:
        raise ValueError("B must be >= 1")
    if isinstance(central, dict):
        if "explicit" not in central:
            raise ValueError("a central-scattering object must have an 'explicit' matrix")
        cs = CentralScattering.from_matrix(decode_matrix(central["explicit"]))
    elif central in ("fourier", "et-paley", "kirchhoff"):
        cs = CentralScattering(central)
    else:
        raise ValueError(f"unknown central scattering {central!r}")
    if lengths == "sqrt-primes":
        return StarGraph.with_sqrt_primes(B, cs)
    L = np.asarray(lengths, dtype=float)
    if L.shape != (B,):
        raise ValueError(f"expected {B} lengths, got {L.size}")
    return StarGraph(L, cs)


def scar_to_dict(scar) -> dict:
    return {
        "family": scar.family,
        "B": scar.B,
        "j": scar.j,
        "kappa": scar.kappa,
        "eps1": scar.eps1,
        "eps2": scar.eps2,
        "eigenvalue": complex_pair(scar.eigenvalue),
        "vector": encode_vector(scar.vec),
    }


def _clean(obj):
    """Make ``obj`` JSON-safe: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_pair(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def metadata(config: dict) -> dict:
    return {"artifact_version": __version__, "config": _clean(config)}


def write_json(path: Path | str, payload: dict, config: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"metadata": metadata(config), **payload}
    path.write_text(dumps(doc))
    return path


def format_cell(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence], config: dict) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(metadata(config), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_cell(x) for x in row])
    return buf.getvalue()


def write_csv(path: Path | str, columns: Sequence[str], rows: Iterable[Sequence], config: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(columns, rows, config))
    return path


def read_csv(path: Path | str) -> tuple[dict, list[dict]]:
    """Return ``(metadata, rows)``; the metadata comes from the ``#`` header line."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError("missing metadata header")
    meta = json.loads(lines[0][2:])
    rows = list(csv.DictReader(lines[1:]))
    return meta, rows
