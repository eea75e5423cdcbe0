"""Small helpers shared by the report types."""
from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

import numpy as np

from .cxratio import INF, chordal


def same_point(a, b, tol: float = 1e-8) -> bool:
    """True when two extended complex points agree in chordal distance."""
    return chordal(a, b) <= tol


def fmt_point(p) -> str:
    if p is INF:
        return "inf"
    p = complex(p)
    return f"{p.real:.10g}{p.imag:+.10g}i"


def point_to_json(p):
    if p is INF:
        return "inf"
    p = complex(p)
    return [p.real, p.imag]


def point_from_json(obj):
    if isinstance(obj, str):
        if obj.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        raise ValueError(f"cannot parse point {obj!r}")
    re, im = obj
    return complex(float(re), float(im))


def pi_multiple(value: float, tol: float = 1e-6, max_den: int = 12) -> str:
    """Format ``value`` (in units of pi) as a rational multiple when close."""
    frac = Fraction(value).limit_denominator(max_den)
    if abs(float(frac) - value) <= tol:
        if frac == 0:
            return "0"
        if frac.denominator == 1:
            return f"{frac.numerator}π"
        return f"{frac.numerator}π/{frac.denominator}"
    return f"{value * math.pi:.6g}"


def to_jsonable(obj):
    """Recursively convert report objects to JSON-friendly structures."""
    if obj is INF:
        return "inf"
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj
