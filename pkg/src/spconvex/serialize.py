"""JSON / CSV wire formats.

Matrix JSON: ``{"rows": n, "cols": n, "data": [[re, im], ...]}`` row-major.
Channel JSON: ``{"kraus": [<matrix JSON>, ...]}``.
CSV export columns: ``check,param,trial_seed,gap,normalized_gap``.
"""

from __future__ import annotations

import csv
import hashlib
import json
from typing import IO

import numpy as np

from .channels import QuantumChannel
from .errors import DimensionError


def matrix_to_json(M) -> dict:
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {A.shape}")
    data = [[float(z.real), float(z.imag)] for z in A.ravel(order="C")]
    return {"rows": int(A.shape[0]), "cols": int(A.shape[1]), "data": data}


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = obj["data"]
    if len(data) != rows * cols:
        raise DimensionError(f"matrix JSON claims {rows}x{cols} but has {len(data)} entries")
    flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    return flat.reshape(rows, cols)


def channel_to_json(channel: QuantumChannel) -> dict:
    return {"kraus": [matrix_to_json(K) for K in channel.kraus]}


def channel_from_json(obj: dict) -> QuantumChannel:
    kraus = tuple(matrix_from_json(k) for k in obj["kraus"])
    return QuantumChannel(kraus=kraus, weights=None, kind="custom")


def inputs_digest(*matrices) -> str:
    """Short stable digest of a tuple of matrices, for replay bookkeeping."""
    h = hashlib.sha256()
    for M in matrices:
        A = np.ascontiguousarray(np.asarray(M, dtype=np.complex128))
        h.update(str(A.shape).encode())
        h.update(A.tobytes())
    return h.hexdigest()[:16]


def dump_json(obj: dict, fh: IO[str]) -> None:
    json.dump(obj, fh, indent=2, sort_keys=True)
    fh.write("\n")


def records_to_csv(records, fh: IO[str]) -> None:
    writer = csv.writer(fh)
    writer.writerow(["check", "param", "trial_seed", "gap", "normalized_gap"])
    for rec in records:
        writer.writerow([rec.check, rec.param, rec.trial_seed, repr(rec.gap), repr(rec.normalized_gap)])


__all__ = [
    "channel_from_json",
    "channel_to_json",
    "dump_json",
    "inputs_digest",
    "matrix_from_json",
    "matrix_to_json",
    "records_to_csv",
]
