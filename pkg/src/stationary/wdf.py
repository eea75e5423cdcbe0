"""
Weierstrass data files (WDF): a small JSON format.

Example::

    {
      "version": 1,
      "phi": {"num": [[0, 0], [-1, 0], [1, 0]], "den": [[0.458, 0], ...]},
      "psi": {...},
      "dh":  {...},
      "punctures": [[0, 0], "inf"],
      "involution": "antipodal",
      "metadata": "epsilon_family eps=0.1"
    }

Coefficients are ``[re, im]`` pairs in ascending degree.  Catalog entries
that are not rational are stored as ``{"callable": "<entry>.<phi|psi|dh>",
"params": {...}}`` and rebuilt from the catalog on load.  An optional
``"catalog"`` object records the entry name and parameters, and an optional
``"xz_form"`` list records the partial-fraction form of ``x_z``.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ._util import point_from_json, point_to_json, to_jsonable
from .cxratio import Poly, RationalMap
from .weierstrass import WeierstrassData, catalog

__all__ = ["WDF_VERSION", "WdfError", "dumps", "loads", "save", "load", "to_document", "from_document"]

WDF_VERSION = 1
_SLOTS = (("phi", "phi"), ("psi", "psi"), ("dh", "h"))


class WdfError(ValueError):
    """Malformed or unsupported WDF document."""


def _coeffs_out(p: Poly) -> list:
    return [[float(c.real), float(c.imag)] for c in np.asarray(p.coeffs, dtype=complex)]


def _coeffs_in(obj, what: str) -> np.ndarray:
    try:
        arr = np.array([complex(float(re), float(im)) for re, im in obj], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise WdfError(f"{what}: coefficients must be [re, im] pairs") from exc
    if arr.size == 0:
        raise WdfError(f"{what}: empty coefficient list")
    if not np.all(np.isfinite(arr)):
        raise WdfError(f"{what}: non-finite coefficient")
    return arr


def _params_out(params: dict) -> dict:
    return to_jsonable(params)


def to_document(data: WeierstrassData, metadata: str = "", include_xz: bool = False) -> dict:
    """The JSON object for ``data``."""
    doc: dict = {"version": WDF_VERSION}
    for key, attr in _SLOTS:
        f = getattr(data, attr)
        if isinstance(f, RationalMap):
            doc[key] = {"num": _coeffs_out(f.num), "den": _coeffs_out(f.den)}
        else:
            if not data.name:
                raise WdfError("callable data without a catalog name cannot be serialised")
            doc[key] = {"callable": f"{data.name}.{key}", "params": _params_out(data.params)}
    doc["punctures"] = [point_to_json(p) for p in data.punctures]
    doc["involution"] = "antipodal" if data.involution_antipodal else "none"
    if not metadata and data.name:
        args = " ".join(f"{k}={v}" for k, v in data.params.items() if k != "a")
        metadata = f"{data.name} {args}".strip()
    doc["metadata"] = metadata
    if data.name:
        doc["catalog"] = {"name": data.name, "params": _params_out(data.params)}
    if include_xz and data.is_rational:
        from .vecform import xz_from_data

        doc["xz_form"] = [
            {
                "kind": b.kind,
                "power": b.power,
                "center": None if b.center is None else point_to_json(b.center),
                "vector": [[float(x.real), float(x.imag)] for x in v],
            }
            for b, v in xz_from_data(data).terms
        ]
    return doc


def _callable_slot(obj: dict, key: str):
    name = obj.get("callable", "")
    entry, _, slot = name.rpartition(".")
    if slot != key or not entry:
        raise WdfError(f"{key}: callable must be named '<entry>.{key}', got {name!r}")
    params = obj.get("params", {}) or {}
    if not isinstance(params, dict):
        raise WdfError(f"{key}: params must be an object")
    try:
        data = catalog(entry, **params)
    except (KeyError, TypeError, ValueError) as exc:
        raise WdfError(f"{key}: cannot rebuild callable {name!r}: {exc}") from exc
    return getattr(data, dict(_SLOTS)[key]), data


def from_document(doc: dict) -> WeierstrassData:
    """Build :class:`WeierstrassData` from a parsed WDF object."""
    if not isinstance(doc, dict):
        raise WdfError("top level must be a JSON object")
    if doc.get("version") != WDF_VERSION:
        raise WdfError(f"unsupported WDF version {doc.get('version')!r} (expected {WDF_VERSION})")
    maps = {}
    source = None
    for key, attr in _SLOTS:
        obj = doc.get(key)
        if not isinstance(obj, dict):
            raise WdfError(f"missing or malformed {key!r}")
        if "callable" in obj:
            maps[attr], source = _callable_slot(obj, key)
        else:
            if "num" not in obj or "den" not in obj:
                raise WdfError(f"{key}: need 'num' and 'den' or 'callable'")
            num = Poly(_coeffs_in(obj["num"], f"{key}.num"))
            den = Poly(_coeffs_in(obj["den"], f"{key}.den"))
            if den.is_zero():
                raise WdfError(f"{key}: zero denominator")
            maps[attr] = RationalMap(num, den, reduce=False)
    try:
        punctures = tuple(point_from_json(p) for p in doc.get("punctures", []))
    except (TypeError, ValueError) as exc:
        raise WdfError(f"bad puncture entry: {exc}") from exc
    inv = doc.get("involution", "none")
    if inv not in ("antipodal", "none"):
        raise WdfError(f"involution must be 'antipodal' or 'none', got {inv!r}")
    meta = doc.get("catalog") or {}
    name = meta.get("name", source.name if source else "")
    params = source.params if source else meta.get("params", {})
    try:
        return WeierstrassData(
            maps["phi"], maps["psi"], maps["h"], punctures, 0, inv == "antipodal", name, params
        )
    except (TypeError, ValueError) as exc:
        raise WdfError(f"invalid Weierstrass data: {exc}") from exc


def dumps(data: WeierstrassData, metadata: str = "", include_xz: bool = False) -> str:
    doc = to_document(data, metadata, include_xz)
    # one top-level key per line keeps coefficient lists readable
    body = ",\n".join(
        f"  {json.dumps(k)}: {json.dumps(v, ensure_ascii=False)}" for k, v in doc.items()
    )
    return "{\n" + body + "\n}\n"


def loads(text: str) -> WeierstrassData:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WdfError(f"not valid JSON: {exc}") from exc
    return from_document(doc)


def save(data: WeierstrassData, path, metadata: str = "", include_xz: bool = False) -> Path:
    path = Path(path)
    path.write_text(dumps(data, metadata, include_xz), encoding="utf-8")
    return path


def load(path) -> WeierstrassData:
    return loads(Path(path).read_text(encoding="utf-8"))
