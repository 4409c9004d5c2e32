"""Tests for the surface catalog."""

import math

import pytest

from assocfam import (
    ConfigError,
    HomogeneousSpace,
    ParamOutOfRange,
    UnknownEntry,
    WarpedProduct,
    get_entry,
    list_catalog,
    make_surface,
    parse_space,
)
from assocfam.catalog import ParamSpec

NAMES = [
    "slice-product",
    "vertical-cylinder",
    "warped-cylinder",
    "helicoid-product",
    "nil3-vertical-plane",
    "tilted-plane-product",
    "graph",
]


def test_catalog_listing():
    entries = list_catalog()
    assert [entry.name for entry in entries] == NAMES
    for entry in entries:
        assert isinstance(parse_space(entry.default_space), entry.families)
        summary = entry.summary()
        assert summary["name"] == entry.name
        assert len(summary["params"]) == len(entry.params)


def test_expected_verdicts():
    assert get_entry("graph").expected is None
    assert get_entry("graph").expected_case is None
    nil = get_entry("nil3-vertical-plane")
    assert nil.expected_case == "T_equals_dt"
    assert nil.summary()["expected"] == {
        "outcome": "NotExists",
        "obstruction": "relationHandtau",
        "case": "T_equals_dt",
    }


def test_unknown_entry():
    with pytest.raises(UnknownEntry) as exc:
        get_entry("catenoid")
    assert exc.value.value == "catenoid"
    assert isinstance(exc.value, ConfigError)


def test_make_surface_uses_defaults():
    imm = make_surface("helicoid-product")
    assert imm.name == "helicoid-product"
    assert imm.space == HomogeneousSpace(-1.0, 0.0)
    assert imm.orientation == 0
    assert imm.chart_domain == ((0.1, 1.0), (-1.5, 1.5))


def test_helicoid_accepts_a_constant_warp():
    imm = make_surface("helicoid-product", {"space": "W(1,1,1,0,a=const[2],I=[-2,2])", "pitch": 1})
    assert isinstance(imm.space, WarpedProduct)
    assert imm.chart_domain == ((0.1, 1.0), (-1.5, 1.5))


def test_space_may_be_an_object():
    space = parse_space("W(1,1,1,0,a=const[2],I=[-1,1])")
    imm = make_surface("slice-product", {"space": space, "t0": "0.5"})
    assert imm.space is space
    assert isinstance(imm.space, WarpedProduct)


def test_string_parameters_are_coerced():
    imm = make_surface("tilted-plane-product", {"slope": "1.5"})
    assert imm.map(0.2, 0.0)[2] == pytest.approx(0.3)


def test_chart_shrinks_in_hyperbolic_bases():
    imm = make_surface("tilted-plane-product", {"space": "E(-8,0)"})
    (u0, u1), _ = imm.chart_domain
    assert u1 == pytest.approx(0.9 * math.sqrt(2 / 8))
    assert u0 == -u1


@pytest.mark.parametrize(
    ("name", "params", "param"),
    [
        ("helicoid-product", {"pitch": 0}, "pitch"),
        ("helicoid-product", {"pitch": "steep"}, "pitch"),
        ("tilted-plane-product", {"slope": 6}, "slope"),
        ("tilted-plane-product", {"slope": math.nan}, "slope"),
        ("vertical-cylinder", {"base": "ellipse"}, "base"),
        ("vertical-cylinder", {"base": "circle", "radius": 5.0}, "radius"),
        ("slice-product", {"height": 1.0}, "height"),
        ("slice-product", {"space": "W(1,1,1,0,a=cosh[2,0],I=[-1,1])", "t0": 2.0}, "t0"),
        ("slice-product", {"space": "W(1,1,1,1,a=cosh[2,0],I=[-1,1])"}, "t0"),
        ("nil3-vertical-plane", {"offset": 2.0}, "offset"),
        ("graph", {"phi": 1.0}, "phi"),
        ("helicoid-product", {"space": "W(1,1,1,0,a=cosh[2,0],I=[-1,1])"}, "space"),
        ("helicoid-product", {"space": "W(-1,1,1,0,a=const[1],I=[-2,2])"}, "space"),
        ("helicoid-product", {"space": "W(1,1,1,0,a=const[1],I=[-1,1])"}, "pitch"),
        ("warped-cylinder", {"space": "E(-1,0)"}, "space"),
        ("warped-cylinder", {"space": "W(-1,1,1,0,a=cosh[2,0],I=[-1,1])"}, "base"),
    ],
)
def test_parameters_out_of_range(name, params, param):
    with pytest.raises(ParamOutOfRange) as exc:
        make_surface(name, params)
    assert exc.value.name == param


def test_bad_graph_expression():
    with pytest.raises(ConfigError):
        make_surface("graph", {"phi": "u*"})
    with pytest.raises(ConfigError):
        make_surface("graph", {"phi": "t*u"})


def test_bad_space_argument():
    with pytest.raises(ConfigError):
        make_surface("slice-product", {"space": 3})
    with pytest.raises(ConfigError):
        make_surface("slice-product", {"space": "E(1)"})


def test_param_spec_describe():
    spec = ParamSpec("slope", 0.5, "slope", low=-5.0, high=5.0, nonzero=True)
    assert spec.describe() == "slope in [-5, 5] (default 0.5)"
    assert spec.coerce(2) == 2.0
    choice = ParamSpec("base", "geodesic", "base", kind="choice", choices=("geodesic", "circle"))
    assert choice.describe() == "base in {geodesic, circle} (default geodesic)"
    assert choice.coerce(" circle ") == "circle"
