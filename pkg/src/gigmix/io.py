"""File formats: value vectors, label vectors, responsibilities, fit results.

Two value-vector formats are supported:

* ``txt`` — one decimal value per line, UTF-8, '.' decimal separator,
  ``#``-prefixed comment lines and blank lines ignored.
* ``f64le`` — an 8-byte unsigned little-endian count header followed by that
  many little-endian 64-bit floats.

Floats written to text (CSV/JSON) use the shortest round-trip representation,
so identical numbers always serialize to identical bytes.
"""

from __future__ import annotations

import json
import struct

import numpy as np

RESULT_SCHEMA_VERSION = 1


def read_values_txt(path) -> np.ndarray:
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: not a decimal value: {line!r}") from exc
    return np.asarray(values, dtype=float)


def write_values_txt(path, values) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in np.asarray(values, dtype=float).ravel():
            fh.write(f"{float(v)!r}\n")


def read_values_f64le(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(8)
        if len(header) != 8:
            raise ValueError(f"{path}: truncated f64le header")
        (count,) = struct.unpack("<Q", header)
        payload = fh.read()
    if len(payload) != 8 * count:
        raise ValueError(
            f"{path}: expected {8 * count} payload bytes for {count} values, got {len(payload)}"
        )
    return np.frombuffer(payload, dtype="<f8").astype(float)


def write_values_f64le(path, values) -> None:
    x = np.asarray(values, dtype="<f8").ravel()
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", x.size))
        fh.write(x.tobytes())


def read_values(path, fmt: str) -> np.ndarray:
    if fmt == "txt":
        return read_values_txt(path)
    if fmt == "f64le":
        return read_values_f64le(path)
    raise ValueError(f"unknown input format {fmt!r}")


def read_labels_txt(path) -> np.ndarray:
    """Activation labels, one integer in {-1, 0, 1} per line."""
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                v = int(line)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: not an integer label: {line!r}") from exc
            if v not in (-1, 0, 1):
                raise ValueError(f"{path}:{lineno}: label must be -1, 0 or 1, got {v}")
            labels.append(v)
    return np.asarray(labels, dtype=np.int8)


def write_gamma_csv(path, gamma) -> None:
    g = np.asarray(gamma, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("gamma1,gamma2,gamma3\n")
        for row in g:
            fh.write(f"{float(row[0])!r},{float(row[1])!r},{float(row[2])!r}\n")


def write_labeled_csv(path, values, labels) -> None:
    v = np.asarray(values, dtype=float).ravel()
    l = np.asarray(labels).ravel()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("value,label\n")
        for vi, li in zip(v, l):
            fh.write(f"{float(vi)!r},{int(li)}\n")


def _floats(seq):
    return [float(v) for v in np.asarray(seq, dtype=float).ravel()]


def ml_result_to_dict(result, model: str, seed: int, include_timing: bool = False) -> dict:
    p = result.params
    doc = {
        "schema_version": RESULT_SCHEMA_VERSION,
        "kind": "ml",
        "model": model,
        "seed": int(seed),
        "converged": bool(result.converged),
        "iterations": int(result.iterations),
        "degenerate_rows": int(result.degenerate_rows),
        "loglik_trace": _floats(result.loglik_trace),
        "params": {
            "pi": _floats(p.pi),
            "gaussian": {"mu": float(p.comp1.mu), "tau": float(p.comp1.tau)},
            "positive": {
                "family": p.comp2.family.kind,
                "shape": float(p.comp2.shape),
                "rate": float(p.comp2.rate),
            },
            "negative": {
                "family": p.comp3.family.kind,
                "shape": float(p.comp3.shape),
                "rate": float(p.comp3.rate),
            },
        },
    }
    if include_timing:
        doc["wall_time_seconds"] = float(result.wall_time_seconds)
    return doc


def vb_result_to_dict(result, model: str, seed: int, include_timing: bool = False) -> dict:
    s = result.state
    e = result.expectations
    doc = {
        "schema_version": RESULT_SCHEMA_VERSION,
        "kind": "vb",
        "model": model,
        "seed": int(seed),
        "converged": bool(result.converged),
        "iterations": int(result.iterations),
        "degenerate_rows": int(result.degenerate_rows),
        "nfe_trace": _floats(result.nfe_trace),
        "state": {
            "lambda_hat": _floats(s.lambda_hat),
            "m_hat": float(s.m_hat),
            "tau_hat": float(s.tau_hat),
            "c_hat": float(s.c_hat),
            "b_hat": float(s.b_hat),
            "d_hat": _floats(s.d_hat),
            "e_hat": _floats(s.e_hat),
            "log_a_hat": _floats(s.log_a_hat),
            "b_hat_s": _floats(s.b_hat_s),
            "c_hat_s": _floats(s.c_hat_s),
        },
        "expectations": {
            "pi": _floats(e.pi),
            "log_pi": _floats(e.log_pi),
            "mu": float(e.mu),
            "mu2": float(e.mu2),
            "tau": float(e.tau),
            "log_tau": float(e.log_tau),
            "r": _floats(e.r),
            "log_r": _floats(e.log_r),
            "s": _floats(e.s),
            "log_gamma_s": _floats(e.log_gamma_s),
        },
    }
    if include_timing:
        doc["wall_time_seconds"] = float(result.wall_time_seconds)
    return doc


def write_json(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
