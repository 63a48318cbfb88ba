"""Canonical JSON serialization and schema parsing for the CLI.

Emission is byte-deterministic: object keys are sorted, separators are
fixed, and every float is rendered with 17 significant digits (enough to
round-trip IEEE doubles exactly).  Parsing accepts integers wherever
decimals are expected and converts shape or type problems into
``InputError`` so the CLI can map them to a stable exit code.
"""

import json
import math

import numpy as np

from .errors import InputError
from .glue import GlueInstance, glue_instance
from .linalg import PointCloud
from .metric import FiniteMetricSpace, UnionPartition, build_partition, \
    validate_metric

__all__ = ["canonical_dumps", "to_jsonable", "load_json", "parse_space",
           "parse_partition", "parse_cloud", "parse_glue"]


def to_jsonable(value):
    """Recursively convert numpy scalars/arrays into plain Python."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if value is None or isinstance(value, str):
        return value
    raise InputError(f"cannot serialize value of type {type(value).__name__}")


def _emit(value, out):
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise InputError(f"non-finite number in output: {value!r}")
        out.append(format(value, ".17g"))
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _emit(value[key], out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        raise InputError(f"cannot serialize value of type {type(value).__name__}")


def canonical_dumps(value) -> str:
    """Deterministic JSON text for a jsonable structure."""
    out = []
    _emit(to_jsonable(value), out)
    out.append("\n")
    return "".join(out)


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _require(obj, key, where):
    if not isinstance(obj, dict):
        raise InputError(f"{where} must be a JSON object")
    if key not in obj:
        raise InputError(f"{where} is missing field {key!r}")
    return obj[key]


def _matrix(value, where):
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError):
        raise InputError(f"{where} must be a numeric matrix") from None
    if arr.ndim != 2:
        raise InputError(f"{where} must be two-dimensional")
    return arr


def parse_space(obj) -> FiniteMetricSpace:
    """{"labels": [...]?, "dist": [[...]]} -> validated space."""
    dist = _matrix(_require(obj, "dist", "space"), "space.dist")
    labels = obj.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != dist.shape[0]:
            raise InputError("space.labels must list one label per point")
        labels = tuple(labels)
    return validate_metric(dist, labels=labels)


def parse_partition(obj, X: FiniteMetricSpace) -> UnionPartition:
    """{"a": [...], "b": [...]} -> validated partition of ``X``."""
    a = _require(obj, "a", "partition")
    b = _require(obj, "b", "partition")
    try:
        return build_partition(X, np.asarray(a, dtype=np.intp),
                               np.asarray(b, dtype=np.intp))
    except (TypeError, ValueError):
        raise InputError("partition sides must be integer index lists") \
            from None


def parse_cloud(obj, where="points") -> PointCloud:
    """{"dim": k, "points": [[...]]} -> point cloud."""
    pts = _matrix(_require(obj, "points", where), f"{where}.points")
    dim = obj.get("dim")
    if dim is not None and int(dim) != pts.shape[1]:
        raise InputError(
            f"{where}.dim = {dim} but points have {pts.shape[1]} columns")
    return PointCloud(pts)


def _indices(value, where):
    try:
        return np.asarray(value, dtype=np.intp).ravel()
    except (TypeError, ValueError):
        raise InputError(f"{where} must be an integer index list") from None


def parse_glue(obj) -> GlueInstance:
    """{"u_points", "v_points", "a_idx", "b_idx", "pairing"} -> instance."""
    u = parse_cloud(_require(obj, "u_points", "glue input"), "u_points")
    v = parse_cloud(_require(obj, "v_points", "glue input"), "v_points")
    return glue_instance(
        u, v,
        _indices(_require(obj, "a_idx", "glue input"), "a_idx"),
        _indices(_require(obj, "b_idx", "glue input"), "b_idx"),
        _indices(_require(obj, "pairing", "glue input"), "pairing"),
    )
