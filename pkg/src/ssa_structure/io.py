"""JSON file formats for states, channels and reports.

Complex entries are two-element ``[re, im]`` arrays and floats are written
with ``repr`` (shortest round-trip form), so canonically written files parse
and re-serialize to identical bytes.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .channels import COMPLETENESS_TOL, KrausChannel
from .states import STATE_TOL, GapReport, MultipartiteState

FORMAT_VERSION = "1.0"
REPORT_KINDS = ("gap", "markov", "theorem1", "araki_lieb", "bi_ssa", "channel_saturation", "holevo_saturation")


class InputError(ValueError):
    """Problem with an input file, tagged with the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class SchemaError(InputError):
    """The file does not have the expected shape or types."""


class InvariantViolation(InputError):
    """The file is well formed but its content breaks a physical invariant."""


# ---------------------------------------------------------------- writing

def _plain(x: Any, path: str = "$") -> Any:
    """Convert numpy and dataclass-free containers into JSON-ready Python values."""
    if isinstance(x, dict):
        return {str(k): _plain(v, f"{path}.{k}") for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v, f"{path}[{i}]") for i, v in enumerate(x)]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return _plain(encode_complex(x), path)
        return _plain(x.tolist(), path)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if not math.isfinite(v):
            raise ValueError(f"non-finite number at {path}")
        return v
    if isinstance(x, (complex, np.complexfloating)):
        return _plain([x.real, x.imag], path)
    if x is None or isinstance(x, str):
        return x
    raise TypeError(f"cannot serialize {type(x).__name__} at {path}")


def _depth(x: Any) -> int:
    if isinstance(x, list):
        return 1 + max((_depth(v) for v in x), default=0)
    return 0


def _scalar(x: Any) -> str:
    if isinstance(x, float):
        return repr(x)
    return json.dumps(x, ensure_ascii=False)


def _render(x: Any, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_render(v, indent + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(x, list):
        # leaf lists (numbers, [re, im] pairs, matrix rows) stay on one line
        if _depth(x) <= 2 and not any(isinstance(v, dict) for v in x) and \
                not any(isinstance(w, dict) for v in x if isinstance(v, list) for w in v):
            return "[" + ", ".join(_render(v, 0) for v in x) + "]"
        if not x:
            return "[]"
        return "[\n" + ",\n".join(inner + _render(v, indent + 1) for v in x) + "\n" + pad + "]"
    return _scalar(x)


def dumps(doc: dict) -> str:
    """Canonical text form of a document (trailing newline included)."""
    return _render(_plain(doc), 0) + "\n"


def encode_complex(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return np.stack([m.real, m.imag], axis=-1).tolist()


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------- reading

def _load_json(source) -> dict:
    if isinstance(source, dict):
        return source
    try:
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
    except OSError as e:
        raise SchemaError("$", f"cannot read file ({e.strerror})") from e
    except json.JSONDecodeError as e:
        raise SchemaError("$", f"invalid JSON at line {e.lineno} column {e.colno}") from e
    if not isinstance(doc, dict):
        raise SchemaError("$", "top level must be an object")
    return doc


def _field(doc: dict, key: str, path: str = "$"):
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "missing field")
    return doc[key]


def _check_version(doc: dict) -> None:
    v = _field(doc, "format_version")
    if v != FORMAT_VERSION:
        raise SchemaError("$.format_version", f"unsupported version {v!r}, expected {FORMAT_VERSION!r}")


def _number(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(path, "expected a number")
    v = float(x)
    if not math.isfinite(v):
        raise SchemaError(path, "number is not finite")
    return v


def _count(x, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < 1:
        raise SchemaError(path, "expected a positive integer")
    return x


def decode_complex(x, shape: tuple[int, int], path: str) -> np.ndarray:
    rows, cols = shape
    if not isinstance(x, list) or len(x) != rows:
        raise SchemaError(path, f"expected {rows} rows")
    out = np.empty(shape, dtype=np.complex128)
    for i, row in enumerate(x):
        if not isinstance(row, list) or len(row) != cols:
            raise SchemaError(f"{path}[{i}]", f"expected {cols} entries")
        for j, z in enumerate(row):
            p = f"{path}[{i}][{j}]"
            if not isinstance(z, list) or len(z) != 2:
                raise SchemaError(p, "complex entry must be [re, im]")
            out[i, j] = complex(_number(z[0], p + "[0]"), _number(z[1], p + "[1]"))
    return out


def state_document(state: MultipartiteState, provenance: dict | None = None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "labels": list(state.labels),
        "dims": list(state.dims),
        "matrix": encode_complex(state.matrix),
    }
    if provenance is not None:
        doc["provenance"] = provenance
    return doc


def save_state(path, state: MultipartiteState, provenance: dict | None = None) -> None:
    write_text(path, dumps(state_document(state, provenance)))


def parse_state(doc: dict) -> MultipartiteState:
    _check_version(doc)
    labels = _field(doc, "labels")
    if not isinstance(labels, list) or not labels or not all(isinstance(x, str) and x for x in labels):
        raise SchemaError("$.labels", "expected a non-empty list of names")
    if len(set(labels)) != len(labels):
        raise SchemaError("$.labels", "labels must be distinct")
    dims = _field(doc, "dims")
    if not isinstance(dims, list):
        raise SchemaError("$.dims", "expected a list")
    dims = [_count(d, f"$.dims[{i}]") for i, d in enumerate(dims)]
    if len(dims) != len(labels):
        raise SchemaError("$.dims", f"{len(dims)} dims for {len(labels)} labels")
    d = int(np.prod(dims))
    m = decode_complex(_field(doc, "matrix"), (d, d), "$.matrix")
    herm = float(np.abs(m - m.conj().T).max())
    if herm > STATE_TOL:
        raise InvariantViolation("$.matrix", f"not Hermitian (max asymmetry {herm:.3e})")
    tr = float(np.trace(m).real)
    if abs(tr - 1) > STATE_TOL:
        raise InvariantViolation("$.matrix.trace", f"trace is {tr!r}, expected 1")
    low = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
    if low < -STATE_TOL:
        raise InvariantViolation("$.matrix.eigenvalues", f"not positive semidefinite (min eigenvalue {low:.3e})")
    return MultipartiteState(m, tuple(dims), tuple(labels))


def load_state(source) -> MultipartiteState:
    return parse_state(_load_json(source))


def state_provenance(source) -> dict | None:
    return _load_json(source).get("provenance")


def channel_document(phi: KrausChannel, provenance: dict | None = None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "dim_in": phi.dim_in,
        "dim_out": phi.dim_out,
        "kraus": [encode_complex(k) for k in phi.kraus],
    }
    if provenance is not None:
        doc["provenance"] = provenance
    return doc


def save_channel(path, phi: KrausChannel, provenance: dict | None = None) -> None:
    write_text(path, dumps(channel_document(phi, provenance)))


def parse_channel(doc: dict) -> KrausChannel:
    _check_version(doc)
    d_in = _count(_field(doc, "dim_in"), "$.dim_in")
    d_out = _count(_field(doc, "dim_out"), "$.dim_out")
    kraus = _field(doc, "kraus")
    if not isinstance(kraus, list) or not kraus:
        raise SchemaError("$.kraus", "expected a non-empty list of matrices")
    ks = tuple(decode_complex(k, (d_out, d_in), f"$.kraus[{i}]") for i, k in enumerate(kraus))
    err = float(np.linalg.norm(sum(k.conj().T @ k for k in ks) - np.eye(d_in)))
    if err > COMPLETENESS_TOL:
        raise InvariantViolation("$.kraus.completeness", f"||sum K^dag K - I||_F = {err:.3e}")
    return KrausChannel(ks)


def load_channel(source) -> KrausChannel:
    return parse_channel(_load_json(source))


def report_document(kind: str, payload: dict, tolerances: dict, provenance: dict | None = None) -> dict:
    if kind not in REPORT_KINDS:
        raise ValueError(f"unknown report kind {kind!r}")
    return {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "payload": payload,
        "tolerances": tolerances,
        "provenance": provenance,
    }


def load_report(source) -> dict:
    doc = _load_json(source)
    _check_version(doc)
    kind = _field(doc, "kind")
    if kind not in REPORT_KINDS:
        raise SchemaError("$.kind", f"unknown report kind {kind!r}")
    _field(doc, "payload")
    return doc


# ---------------------------------------------------------------- payloads

def gap_payload(g: GapReport) -> dict:
    return {
        "identity": g.identity_name,
        "lhs_bits": g.lhs_bits,
        "rhs_bits": g.rhs_bits,
        "gap_bits": g.gap_bits,
        "saturated": g.saturated,
        "tol": g.tol,
        "details": {k: v.gap_bits if isinstance(v, GapReport) else v for k, v in g.details.items()},
    }


def _blocks(dec, weights=None) -> list:
    out = []
    for k, b in enumerate(dec.blocks):
        rec = {"dim_L": b.dim_L, "dim_R": b.dim_R}
        if weights is not None:
            rec["weight"] = weights[k]
        rec["isometry"] = b.isometry
        out.append(rec)
    return out


def markov_payload(st) -> dict:
    return {
        "labels": list(st.labels),
        "dims": list(st.dims),
        "gap": gap_payload(st.gap),
        "petz_error": st.petz_error,
        "block_dims": [list(d) for d in st.block_dims()],
        "weights": st.weights,
        "b_decomposition": _blocks(st.b_decomposition, st.weights),
        "left_states": st.left_states,
        "right_states": st.right_states,
        "reassembly_error": st.reassembly_error,
    }


def theorem1_payload(st) -> dict:
    cells = []
    for i, j in st.cells():
        cells.append({
            "a_block": i,
            "c_block": j,
            "weight": st.joint_weights[i, j],
            "pure_block": st.pure_blocks[(i, j)],
            "residual_state": st.residual_states[(i, j)],
        })
    return {
        "labels": list(st.labels),
        "dims": list(st.dims),
        "gap": gap_payload(st.gap),
        "a_block_dims": [list(d) for d in st.a_dims()],
        "c_block_dims": [list(d) for d in st.c_dims()],
        "joint_weights": st.joint_weights,
        "a_decomposition": _blocks(st.a_decomposition),
        "c_decomposition": _blocks(st.c_decomposition),
        "cells": cells,
        "min_purity": st.min_purity,
        "reassembly_error": st.reassembly_error,
    }


def araki_lieb_payload(st) -> dict:
    return {
        "labels": list(st.labels),
        "dims": list(st.dims),
        "gap": gap_payload(st.gap),
        "dim_L": st.dim_L,
        "dim_R": st.dim_R,
        "isometry": st.isometry,
        "omega_L": st.omega_L,
        "psi_RC": st.psi_RC,
        "purity": st.purity,
        "reassembly_error": st.reassembly_error,
    }


def bi_ssa_payload(rep) -> dict:
    return {
        "gap_abc": gap_payload(rep.gap_abc),
        "gap_bac": gap_payload(rep.gap_bac),
        "a_block_dims": [list(d) for d in rep.a_markov.block_dims()],
        "b_block_dims": [list(d) for d in rep.b_markov.block_dims()],
        "cell_weights": rep.cell_weights,
        "sectors": [{"a_block": i, "b_block": j, "sector": k} for (i, j), k in sorted(rep.sectors.items())],
        "sector_weights": rep.sector_weights,
        "c_states": rep.c_states,
        "consistency_error": rep.consistency_error,
        "reassembly_error": rep.reassembly_error,
    }


def channel_saturation_payload(rep) -> dict:
    return {
        "gram": rep.gram,
        "singular_values": rep.singular_values,
        "gram_second_singular": rep.gram_second_singular,
        "rank_one": rep.rank_one,
        "lambda": None if rep.lam is None else [[z.real, z.imag] for z in rep.lam],
        "M": rep.M,
        "reconstruction_error": rep.reconstruction_error,
        "product_identity_error": rep.product_identity_error,
        "average_entropy": gap_payload(rep.average_entropy),
    }


def holevo_saturation_payload(rep) -> dict:
    return {
        "gap": gap_payload(rep.gap),
        "output_blocks": [
            {"dim_L": b.dim_L, "dim_R": b.dim_R, "weight": b.weight, "isometry": b.isometry, "state": b.state}
            for b in rep.output_blocks
        ],
        "output_error": rep.output_error,
        "structure": theorem1_payload(rep.structure),
    }


def coherent_payload(rep) -> dict:
    out = {
        "identity": "coherent_information",
        "coherent_information": rep.coherent_information,
        "input_entropy": rep.input_entropy,
        "gap_bits": rep.gap_bits,
        "saturated": rep.saturated,
    }
    if rep.product_error is not None:
        out["product_error"] = rep.product_error
        out["product_ok"] = rep.product_ok
    return out
