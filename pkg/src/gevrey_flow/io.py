"""Artifact writers: deterministic JSON/CSV and binary field dumps.

Artifacts are byte-stable for a fixed configuration, seed and kernel backend;
wall-clock information is confined to the ``meta`` block of JSON documents so
everything outside it compares byte-identically across reruns.

Binary field dump layout (little-endian), one record per stored snapshot:

    uint32  d        spatial dimension
    uint32  K        per-axis frequency cutoff
    float64 t        snapshot time
    float64 w        nu * W(t) at the snapshot
    complex128[(2K+1)^d]  coefficients in row-major mode order
"""

import datetime
import json
import struct

import numpy as np

from .dynamics import SimulationResult
from .spectral import Lattice, SpectralField

_HEADER = struct.Struct("<IIdd")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def write_json(path, payload: dict, include_meta: bool = True) -> None:
    doc = dict(_jsonable(payload))
    if include_meta:
        doc["meta"] = {
            "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat()
        }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_snapshot_csv(path, result: SimulationResult) -> None:
    """Header ``t,W,<norm labels...>`` and one row per stored snapshot."""
    labels = [sched.label for sched in result.schedules]
    with open(path, "w") as fh:
        fh.write(",".join(["t", "W"] + labels) + "\n")
        for i, state in enumerate(result.states):
            cells = [repr(float(state.t)), repr(float(state.w))]
            cells += [repr(float(result.norms[lab][i])) for lab in labels]
            fh.write(",".join(cells) + "\n")


def read_snapshot_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [
            [float(cell) for cell in line.strip().split(",")]
            for line in fh
            if line.strip()
        ]
    return header, np.asarray(rows)


def write_field_dumps(path, result: SimulationResult, stride: int = 1) -> None:
    """Dump every ``stride``-th stored snapshot in the documented binary layout."""
    if stride < 1:
        raise ValueError("field dump stride must be >= 1")
    with open(path, "wb") as fh:
        for state in result.states[::stride]:
            lat = state.rho.lattice
            fh.write(_HEADER.pack(lat.d, lat.K, state.t, state.w))
            fh.write(np.ascontiguousarray(state.rho.coeffs, dtype="<c16").tobytes())


def read_field_dumps(path):
    """Read records back as (t, w, SpectralField) triples."""
    out = []
    with open(path, "rb") as fh:
        while True:
            head = fh.read(_HEADER.size)
            if not head:
                break
            d, K, t, w = _HEADER.unpack(head)
            lat = Lattice(d=int(d), K=int(K))
            raw = fh.read(16 * lat.n_modes)
            if len(raw) != 16 * lat.n_modes:
                raise ValueError("truncated field dump record")
            coeffs = np.frombuffer(raw, dtype="<c16").astype(np.complex128)
            out.append((t, w, SpectralField(lat, coeffs, real_valued=False)))
    return out
