"""Tests for report models and their serialization."""

import json

import pytest

from assocfam import (
    ConfigError,
    ContractViolation,
    EquationResidual,
    FamilySweep,
    GridSpec,
    PointFailure,
    ResidualReport,
    Tolerances,
    Verdict,
)
from assocfam._serialize import csv_text, dumps, format_float


def _report(max_abs=1e-12, theta=None, failures=None):
    return ResidualReport(
        space="E(-1,0)",
        surface="helicoid-product",
        grid=GridSpec(3, 3),
        tolerance=1e-8,
        equations=[
            EquationResidual("r_G", max_abs, max_abs / 2, (0.1, 0.2)),
            EquationResidual("r_C", 0.0, 0.0, None),
        ],
        failures=failures or [],
        theta=theta,
    )


def test_grid_points():
    grid = GridSpec(3, 2, 0.0)
    assert grid.points(((0.0, 1.0), (0.0, 2.0))) == [
        (0.0, 0.0),
        (0.0, 2.0),
        (0.5, 0.0),
        (0.5, 2.0),
        (1.0, 0.0),
        (1.0, 2.0),
    ]
    assert GridSpec(1, 1, 0.1).points(((0.0, 1.0), (2.0, 4.0))) == [(0.5, 3.0)]
    assert GridSpec(3, 1, 0.25).points(((0.0, 4.0), (0.0, 1.0)))[0] == (1.0, 0.5)


def test_grid_parse():
    assert GridSpec.parse("7x5") == GridSpec(7, 5)
    assert GridSpec.parse(" 3X3 ", 0.1) == GridSpec(3, 3, 0.1)
    assert GridSpec.from_dict(GridSpec(4, 6, 0.2).to_dict()) == GridSpec(4, 6, 0.2)


@pytest.mark.parametrize("text", ["7", "7x", "0x3", "ax3", "3x3x3"])
def test_bad_grid_text(text):
    with pytest.raises(ConfigError):
        GridSpec.parse(text)


def test_grid_validation():
    with pytest.raises(ConfigError):
        GridSpec(3, 3, 0.5)
    with pytest.raises(ConfigError):
        GridSpec(True, 3)
    with pytest.raises(ValueError):
        GridSpec.from_dict({"nu": 3, "nv": 3, "margin": -0.1})


def test_tolerances():
    assert Tolerances().residual == 1e-8
    with pytest.raises(ConfigError):
        Tolerances(residual=0.0)
    with pytest.raises(ConfigError):
        Tolerances(case=float("inf"))


def test_report_passes_only_within_tolerance():
    assert _report().passed
    assert not _report(max_abs=1e-6).passed
    failure = PointFailure((0.0, 0.0), "DomainError", "outside")
    assert not _report(failures=[failure]).passed
    assert _report(max_abs=1e-6).max_residual() == 1e-6
    assert _report().equation("r_C").argmax is None
    with pytest.raises(KeyError):
        _report().equation("r_T")


def test_report_dict_layout():
    data = _report(theta=0.5).to_dict()
    assert list(data) == [
        "space",
        "surface",
        "theta",
        "grid",
        "tolerance",
        "passed",
        "equations",
        "failures",
        "notes",
    ]
    assert ResidualReport.from_dict(data).to_dict() == data


def test_report_from_dict_rejects_contradictions():
    data = _report().to_dict()
    data["passed"] = False
    with pytest.raises(ValueError):
        ResidualReport.from_dict(data)
    data = _report().to_dict()
    data["tolerance"] = "tight"
    with pytest.raises(ValueError):
        ResidualReport.from_dict(data)
    data = _report().to_dict()
    data["equations"][0]["argmax"] = [0.1]
    with pytest.raises(ValueError):
        ResidualReport.from_dict(data)


def test_report_csv():
    lines = _report(theta=0.25).to_csv().splitlines()
    assert lines[0] == "theta,equation,max_abs,mean_abs,argmax_u,argmax_v,tolerance,passed"
    fields = lines[1].split(",")
    assert fields[:2] == ["0.25", "r_G"]
    assert float(fields[2]) == 1e-12
    assert fields[4:] == ["0.10000000000000001", "0.20000000000000001", "1e-08", "True"]
    assert lines[2].startswith("0.25,r_C,0,0,,,")


def test_family_sweep():
    sweep = FamilySweep(
        space="E(-1,0)",
        surface="helicoid-product",
        law="canonical",
        reports=[_report(theta=0.0), _report(1e-3, theta=0.5), _report(1e-3, theta=1.0)],
    )
    assert sweep.thetas == [0.0, 0.5, 1.0]
    assert not sweep.passed
    assert sweep.first_failing_theta == 0.5
    summary = sweep.summary()
    assert summary[1] == {"theta": 0.5, "r_G": 1e-3, "r_C": 0.0, "failures": 0, "passed": False}
    data = json.loads(sweep.to_json())
    assert data["first_failing_theta"] == 0.5
    assert FamilySweep.from_dict(data).to_json() == sweep.to_json()
    assert len(sweep.to_csv().splitlines()) == 1 + 3 * 2


def test_verdict_validation():
    with pytest.raises(ContractViolation):
        Verdict("NotExists", "minimalOrUmbilical", "generic")
    with pytest.raises(ContractViolation):
        Verdict("Exists", "none", "generic")
    with pytest.raises(ContractViolation):
        Verdict("ExistsMinimalProduct", "none", "anywhere")
    with pytest.raises(ValueError):
        Verdict.from_dict(
            {"outcome": "NotExists", "obstruction": "x", "case": "generic", "magnitude": 0.0}
        )


def test_verdict_round_trip_and_csv():
    region = Verdict("ExistsTotallyUmbilical", "none", "T_zero")
    verdict = Verdict(
        "Undetermined",
        "mixedCase",
        "mixed",
        space="E(-1,0)",
        surface="graph",
        diagnostics={"max_abs_H": 0.5},
        regions={"T_zero": region},
        notes=["changes case"],
    )
    assert not verdict.is_definite
    assert region.is_definite
    assert Verdict.from_dict(json.loads(verdict.to_json())).to_json() == verdict.to_json()
    assert verdict.to_csv().splitlines() == [
        "key,value",
        "outcome,Undetermined",
        "obstruction,mixedCase",
        "case,mixed",
        "magnitude,0",
        "diagnostics.max_abs_H,0.5",
        "regions.T_zero,ExistsTotallyUmbilical",
    ]


def test_serialization_is_deterministic():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(3) == "3"
    with pytest.raises(ValueError):
        format_float(float("nan"))
    text = dumps({"b": [1.0, 2], "a": {"c": None, "d": True}, "e": []})
    assert text == (
        '{\n  "b": [1, 2],\n  "a": {\n    "c": null,\n    "d": true\n  },\n  "e": []\n}\n'
    )
    assert csv_text(("x", "y"), [[None, 0.5]]) == "x,y\n,0.5\n"
