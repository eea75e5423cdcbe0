import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stationary import wdf
from stationary.cxratio import Poly, RationalMap
from stationary.weierstrass import WeierstrassData, catalog

CATALOG = [
    ("meeks", {}),
    ("meeks", {"lam": complex(np.exp(1.1j)), "m": 3}),
    ("epsilon_family", {"eps": 0.1}),
    ("epsilon_family", {"eps": 1e-8}),
    ("section4_candidate", {}),
    ("rejected_m2", {}),
    ("essential", {"p": 2}),
]
Z = np.array([0.3 + 0.2j, -1.1 + 0.9j, 1.7 - 0.4j])


def _close(p, q):
    scale = max(1.0, np.abs(p).max())
    return p.shape == q.shape and np.abs(p - q).max() <= 1e-15 * scale


def _same_map(a, b):
    if isinstance(a, RationalMap):
        return _close(a.num.coeffs, b.num.coeffs) and _close(a.den.coeffs, b.den.coeffs)
    return np.allclose(a(Z), b(Z), rtol=1e-15)


@pytest.mark.parametrize("name,params", CATALOG)
def test_round_trip(name, params):
    d = catalog(name, **params)
    e = wdf.loads(wdf.dumps(d))
    for attr in ("phi", "psi", "h"):
        assert _same_map(getattr(d, attr), getattr(e, attr))
    assert e.punctures == d.punctures
    assert e.involution_antipodal == d.involution_antipodal
    assert e.name == d.name


coeff = st.builds(complex, st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))


@given(st.lists(coeff, min_size=1, max_size=5), st.lists(coeff, min_size=0, max_size=5))
def test_round_trip_arbitrary_coefficients(num, den):
    # monic numerator of degree >= 1 keeps phi non-constant
    f = RationalMap(Poly(num + [1.0]), Poly(den + [1.0]), reduce=False)
    d = WeierstrassData(f, RationalMap.z() * 2 + 1, RationalMap.z() + 1, ())
    e = wdf.loads(wdf.dumps(d))
    assert _same_map(f, e.phi)


def test_layout_and_metadata():
    text = wdf.dumps(catalog("epsilon_family", eps=0.1))
    doc = json.loads(text)
    assert doc["version"] == 1
    assert doc["involution"] == "antipodal"
    assert doc["punctures"] == [[0.0, 0.0], "inf"]
    a0 = doc["phi"]["den"][0][0] / doc["phi"]["den"][-1][0]
    assert abs(a0 - np.sqrt(0.21)) < 1e-15
    assert text.count("\n") == len(doc) + 2


def test_callable_entry():
    doc = json.loads(wdf.dumps(catalog("essential", p=3)))
    assert doc["phi"] == {"callable": "essential.phi", "params": {"p": 3}}


def test_xz_form_included():
    doc = json.loads(wdf.dumps(catalog("section4_candidate"), include_xz=True))
    kinds = {(t["kind"], t["power"]) for t in doc["xz_form"]}
    assert ("pole_power", 3) in kinds and ("monomial", 1) in kinds


def test_save_load(tmp_path):
    p = wdf.save(catalog("meeks"), tmp_path / "m.wdf")
    assert wdf.load(p).name == "meeks"


@pytest.mark.parametrize(
    "mutate,msg",
    [
        (lambda d: d.update(version=2), "version"),
        (lambda d: d.pop("phi"), "phi"),
        (lambda d: d["phi"].update(num=[["a", 0]]), "pairs"),
        (lambda d: d["phi"].update(den=[[0, 0]]), "zero denominator"),
        (lambda d: d.update(involution="mirror"), "involution"),
        (lambda d: d.update(punctures=[[0, 0], [0, 0]]), "duplicate"),
        (lambda d: d.update(phi={"callable": "nowhere.phi"}), "callable"),
    ],
)
def test_malformed_documents(mutate, msg):
    doc = json.loads(wdf.dumps(catalog("meeks")))
    mutate(doc)
    with pytest.raises(wdf.WdfError, match=msg):
        wdf.from_document(doc)


def test_not_json():
    with pytest.raises(wdf.WdfError):
        wdf.loads("{nope")
