"""JSON file formats and a deterministic serialiser.

Formats (index 0 is always the basepoint)::

    space        {"kind": "points", "norm": "l2", "dim": 2, "points": [[0, 0], ...]}
                 {"kind": "matrix", "dist": [[...], ...]}
    field        {"values": [0, ...]}
    partial      {"domain": [0, 1], "values": [0, 1]}
    rays         {"norm": "l2", "dim": 2, "directions": [[1, 0], ...], "values": [1, -1]}
    ph element   {"norm": "l2", "dim": 2, "terms": [{"x": [2, 0], "a": 1.0}, ...]}
    free element {"terms": [{"point": 1, "a": 1.0}, ...]}

Numbers may also be given as strings such as ``"1/3"``; they are read as
exact rationals. Floats are written with 17 significant digits.
"""

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._validation import fmt_number, to_fraction
from .cone import RaySystem
from .elements import FreeElement, PHFreeElement
from .exceptions import ValidationError
from .mcshane import PartialField
from .metric import build_space


def _num(x, exact=False):
    if exact or isinstance(x, str):
        return to_fraction(x)
    return float(x)


def read_json(source):
    if isinstance(source, dict):
        return source
    try:
        return json.loads(Path(source).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: invalid JSON ({exc})") from exc


def _encode(obj, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ", " if indent is None else ","
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, Fraction):
        return str(obj.numerator) if obj.denominator == 1 else json.dumps(fmt_number(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return json.dumps(str(float(obj)))
        return fmt_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq)
        if flat or indent is None:
            return "[" + ", ".join(_encode(v, None, 0) for v in seq) + "]"
        return "[" + sep.join(f"{pad}{_encode(v, indent, level + 1)}" for v in seq) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent=None):
    """Deterministic JSON; floats carry 17 significant digits."""
    return _encode(obj, indent, 0)


def write_json(obj, path, indent=2):
    Path(path).write_text(dumps(obj, indent) + "\n")


def load_space(source, exact=False):
    return build_space(read_json(source), exact=exact)


def load_field(source, exact=False):
    return [_num(v, exact) for v in read_json(source)["values"]]


def load_partial(source, exact=False):
    data = read_json(source)
    return PartialField(data["domain"], [_num(v, exact) for v in data["values"]])


def load_rays(source):
    """``(rays, values)``; entries of ``values`` may be ``None`` (unknown)."""
    data = read_json(source)
    dirs = np.array([[float(_num(c)) for c in d] for d in data["directions"]])
    dim = data.get("dim")
    if dim is not None and dirs.shape[1] != dim:
        raise ValidationError(f"directions must have dimension {dim}")
    rays = RaySystem(dirs, data.get("norm", "l2"))
    values = data.get("values")
    if values is not None:
        values = [None if v is None else float(_num(v)) for v in values]
        if len(values) != len(rays):
            raise ValidationError("one value per direction is required")
    return rays, values


def load_free_element(source, exact=False):
    data = read_json(source)
    return FreeElement.from_terms((t["point"], _num(t["a"], exact)) for t in data["terms"])


def load_ph_element(source, exact=False):
    data = read_json(source)
    norm = data.get("norm", "l2")
    dim = data.get("dim")
    terms = [([_num(c, exact) for c in t["x"]], _num(t["a"], exact)) for t in data["terms"]]
    if dim is not None and any(len(x) != dim for x, _ in terms):
        raise ValidationError(f"every point must have dimension {dim}")
    if not terms:
        return PHFreeElement(np.zeros((0, dim or 1)), np.zeros(0), norm)
    return PHFreeElement(
        np.array([x for x, _ in terms], dtype=object if exact else float),
        np.array([a for _, a in terms], dtype=object if exact else float),
        norm,
    )
