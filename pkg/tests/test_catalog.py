import numpy as np
import pytest

from obsequiv import ObservedSystem, topologically_equivalent
from obsequiv.catalog import (
    CENTER_FAMILIES,
    HYPERBOLIC_FAMILIES,
    Catalog3DEntry,
    catalog_representative,
    classify_3d_siso,
)
from obsequiv.errors import MixedSpectrum, NotSISO, ShapeError

from generators import conjugate, well_conditioned


def _entries():
    out = []
    for fam in CENTER_FAMILIES:
        if fam.startswith("center:rot"):
            out += [Catalog3DEntry(fam, {"mu": mu}) for mu in (-1.0, -4.0, -0.25)]
        else:
            out.append(Catalog3DEntry(fam))
    out += [
        Catalog3DEntry("3=0+3+0", {"mu1": -6.0, "mu2": -11.0, "mu3": -6.0}),
        Catalog3DEntry("3=0+3+0", {"mu1": 1.0, "mu2": 2.0, "mu3": -3.0}),
        Catalog3DEntry("3=0+2+1", {"mu1": 3.0, "mu2": -2.0, "iota": 1}),
        Catalog3DEntry("3=0+2+1", {"mu1": -2.0, "mu2": -5.0, "iota": -1}),
        Catalog3DEntry("3=0+1+2", {"mu": -2.0, "iota1": 1, "iota2": -1}),
        Catalog3DEntry("3=0+1+2", {"mu": 0.5, "iota1": -1, "iota2": -1}),
    ]
    for iotas in [(1, 1, 1), (1, 1, -1), (1, -1, -1), (-1, -1, -1)]:
        out.append(Catalog3DEntry("3=0+0+3", dict(zip(("iota1", "iota2", "iota3"), iotas))))
    return out


def _same(a, b):
    assert a.family == b.family
    assert a.params.keys() == b.params.keys()
    for key in a.params:
        assert abs(a.params[key] - b.params[key]) <= 1e-8 * max(1, abs(b.params[key])), key


def test_zero_center_with_last_output():
    e = classify_3d_siso(ObservedSystem(np.zeros((3, 3)), [[0.0, 0.0, 1.0]]))
    assert e.family == "center:zero|C=001"
    assert e.family == CENTER_FAMILIES[1]


def test_all_unstable_unobserved():
    e = classify_3d_siso(ObservedSystem(np.eye(3), np.zeros((1, 3))))
    assert e.family == "3=0+0+3"
    assert (e.params["iota1"], e.params["iota2"], e.params["iota3"]) == (1, 1, 1)


def test_one_observed_two_unobserved():
    rng = np.random.default_rng(51)
    R = well_conditioned(rng, 3)
    S = conjugate(ObservedSystem(np.diag([-2.0, -1.0, -1.0]), [[5.0, 0.0, 0.0]]), R)
    e = classify_3d_siso(S)
    assert e.family == "3=0+1+2"
    assert abs(e.params["mu"] + 2.0) <= 1e-8
    assert (e.params["iota1"], e.params["iota2"]) == (-1, -1)


@pytest.mark.parametrize("entry", _entries(), ids=lambda e: f"{e.family}{sorted(e.params.items())}")
def test_representative_classifies_to_itself(entry):
    _same(classify_3d_siso(catalog_representative(entry)), entry)


@pytest.mark.parametrize("entry", _entries(), ids=lambda e: f"{e.family}{sorted(e.params.items())}")
def test_conjugated_representative_keeps_its_family(entry):
    rng = np.random.default_rng(52)
    S = entry.representative()
    for _ in range(5):
        _same(classify_3d_siso(conjugate(S, well_conditioned(rng, 3))), entry)


def test_distinct_families_are_not_equivalent():
    reps = [e for e in _entries() if not e.family.startswith("3=0+3+0")]
    seen = {}
    for e in reps:
        seen.setdefault(e.family, e)
    firsts = list(seen.values())
    for i, a in enumerate(firsts):
        for b in firsts[i + 1:]:
            assert not topologically_equivalent(a.representative(), b.representative()).equivalent, (a, b)


def test_mixed_spectrum_rejected():
    with pytest.raises(MixedSpectrum):
        classify_3d_siso(ObservedSystem(np.diag([0.0, 1.0, -1.0]), [[1.0, 1.0, 1.0]]))


def test_shape_errors():
    with pytest.raises(ShapeError):
        classify_3d_siso(ObservedSystem(np.eye(2), [[1.0, 0.0]]))
    with pytest.raises(NotSISO):
        classify_3d_siso(ObservedSystem(np.eye(3), np.eye(3)))


def test_entry_validation():
    with pytest.raises(ValueError):
        Catalog3DEntry("nope")
    with pytest.raises(ValueError):
        Catalog3DEntry("3=0+0+3", {"iota1": -1, "iota2": 1, "iota3": 1})
    with pytest.raises(ValueError):
        Catalog3DEntry("center:rot|C=000", {"mu": 1.0})
    with pytest.raises(ValueError):
        Catalog3DEntry("3=0+2+1", {"mu1": 1.0, "mu2": 1.0, "iota": 2})


def test_families_are_listed_once():
    assert len(set(CENTER_FAMILIES)) == len(CENTER_FAMILIES) == 14
    assert HYPERBOLIC_FAMILIES == ("3=0+3+0", "3=0+2+1", "3=0+1+2", "3=0+0+3")
