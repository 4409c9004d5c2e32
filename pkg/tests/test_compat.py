"""Tests for the structure-equation residual suite."""

import pytest

from assocfam import (
    ContractViolation,
    GridSpec,
    HomogeneousSpace,
    Immersion,
    extract,
    list_catalog,
    make_surface,
    parse_space,
    pointwise_residuals,
    residual_grid,
)
from assocfam.compat import (
    HOMOGENEOUS_EQUATIONS,
    WARPED_EQUATIONS,
    closedness_residual,
    gradient_residual,
    report_from_samples,
    residual_homogeneous,
    residual_warped,
)
from assocfam.jets import lift
from assocfam.surface import sample_grid

GRID = GridSpec(7, 7)
WARPED = "W(1,1,1,0,a=cosh[2,0],I=[-1,1])"


@pytest.mark.parametrize("entry", list_catalog(), ids=lambda entry: entry.name)
def test_catalog_defaults_pass(entry):
    report = residual_grid(make_surface(entry.name), GRID)
    assert report.passed, report.to_json()
    assert report.failures == []
    assert report.theta is None


@pytest.mark.parametrize(
    ("name", "params"),
    [
        ("slice-product", {"space": WARPED, "t0": 0.3}),
        ("slice-product", {"space": "W(-1,1,0,0,a=exp[1,0],I=[-1,1])", "t0": -0.2}),
        ("slice-product", {"space": "E(-1,0)", "t0": 2.0}),
        ("vertical-cylinder", {"base": "circle", "radius": 0.5}),
        ("vertical-cylinder", {"space": "E(1,0.25)"}),
        ("warped-cylinder", {"base": "circle"}),
        ("helicoid-product", {"space": "E(1,0)", "pitch": -0.5}),
        ("nil3-vertical-plane", {"angle": 1.0, "offset": 0.3}),
        ("tilted-plane-product", {"space": "E(-1,0.5)", "slope": 1.5}),
        ("graph", {"space": "E(0,0.5)", "phi": "0.1*u*u-0.3*v"}),
        ("graph", {"space": WARPED, "phi": "0.2*sin(u)*v"}),
    ],
)
def test_surfaces_pass_in_other_spaces(name, params):
    report = residual_grid(make_surface(name, params), GRID)
    assert report.passed, report.to_json()


def test_equation_names_follow_the_family():
    homogeneous = residual_grid(make_surface("slice-product"), GRID)
    warped = residual_grid(make_surface("slice-product", {"space": WARPED}), GRID)
    assert [eq.name for eq in homogeneous.equations] == list(HOMOGENEOUS_EQUATIONS)
    assert [eq.name for eq in warped.equations] == list(WARPED_EQUATIONS)


def test_wrong_tau_is_detected():
    tau = 0.2
    imm = make_surface("slice-product", {"space": "E(1,0)"})
    report = residual_grid(imm, GRID, space=HomogeneousSpace(1.0, tau))
    assert not report.passed
    assert report.equation("r_G").max_abs == pytest.approx(3 * tau * tau, rel=1e-9)
    assert report.equation("r_G").mean_abs == pytest.approx(3 * tau * tau, rel=1e-9)
    assert report.equation("r_T").max_abs == pytest.approx(tau, rel=1e-9)
    assert report.equation("r_f").max_abs == pytest.approx(0.0, abs=1e-12)


def test_other_family_is_rejected():
    with pytest.raises(ContractViolation):
        residual_grid(make_surface("slice-product"), GRID, space=parse_space(WARPED))


def test_pointwise_residuals():
    d = extract(make_surface("helicoid-product"), (0.5, 0.1))
    values = pointwise_residuals(d, parse_space("E(-1,0)"))
    assert set(values) == set(HOMOGENEOUS_EQUATIONS)
    assert max(values.values()) <= 1e-9


def test_gradient_and_closedness_on_warped_graph():
    space = parse_space(WARPED)
    d = extract(make_surface("graph", {"space": WARPED}), (0.3, 0.4))
    assert gradient_residual(d, space) <= 1e-10
    assert closedness_residual(d) <= 1e-10
    assert pointwise_residuals(d, space)["r_grad"] <= 1e-10


def test_failed_points_fail_the_report():
    imm = Immersion(
        HomogeneousSpace(-1.0, 0.0), ((-3.0, 3.0), (-0.5, 0.5)), lambda u, v: (u, v, 0.0), 1
    )
    report = residual_grid(imm, GRID)
    assert not report.passed
    assert report.failures
    assert {failure.error for failure in report.failures} == {"DomainError"}
    # points inside the chart still contribute
    assert report.equation("r_G").argmax is not None
    assert report.max_residual() <= 1e-9


def test_argmax_is_a_grid_point():
    imm = make_surface("slice-product", {"space": "E(1,0)"})
    report = residual_grid(imm, GRID, space=HomogeneousSpace(1.0, 0.3))
    points = GRID.points(imm.chart_domain)
    for eq in report.equations:
        assert eq.argmax in points


def test_rotated_warped_reports_carry_a_note():
    imm = make_surface("slice-product", {"space": WARPED})
    samples = sample_grid(imm, GRID)
    report = report_from_samples(samples, imm.space, imm.name, GRID, theta=0.5, rotated=True)
    assert report.theta == 0.5
    assert report.notes
    plain = report_from_samples(samples, imm.space, imm.name, GRID)
    assert plain.notes == []


def test_residual_homogeneous_on_a_slice():
    d = extract(make_surface("slice-product"), (0.0, 0.0))
    assert max(residual_homogeneous(d, 1.0, 0.0)) <= 1e-10
    wrong = residual_homogeneous(d, 1.0, 0.2)
    assert wrong.r_G == pytest.approx(3 * 0.2**2, abs=1e-10)
    assert wrong.r_T == pytest.approx(0.2, abs=1e-10)


def test_residual_warped_uses_the_given_height():
    space = parse_space(WARPED)
    d = extract(make_surface("graph", {"space": WARPED}), (0.3, 0.4))
    assert max(residual_warped(d, space)) <= 1e-10
    assert residual_warped(d, space, pi=0.8).r_G > 1.0


def _wavy_graph(u, v):
    return (u, v, 0.2 * u * v + 0.1 * lift("sin", u))


def _lorentzian_strip(u, v):
    return (u, 0.2 * v, v)


@pytest.mark.parametrize("orientation", [1, -1])
@pytest.mark.parametrize(
    ("space", "chart", "domain"),
    [
        ("W(-1,1,1,0,a=cosh[2,0],I=[-1,1])", _wavy_graph, ((-0.8, 0.8), (-0.8, 0.8))),
        ("W(-1,-1,-1,0,a=custom[t*t+2],I=[-1,1])", _wavy_graph, ((-0.8, 0.8), (-0.8, 0.8))),
        ("W(1,1,1,1,a=cosh[2,0],I=[-1,1])", _lorentzian_strip, ((-0.8, 0.8), (-0.9, 0.9))),
    ],
    ids=["timelike-t", "timelike-t-custom-warp", "lorentzian-fiber"],
)
def test_semi_riemannian_surfaces_pass(space, chart, domain, orientation):
    imm = Immersion(parse_space(space), domain, chart, orientation)
    report = residual_grid(imm, GRID)
    assert report.passed, report.to_json()
    flipped = residual_grid(imm.flipped(), GRID)
    assert flipped.max_residual() == pytest.approx(report.max_residual(), abs=1e-10)


def test_cylinder_over_a_lorentzian_fiber_passes():
    space = "W(1,1,1,1,a=cosh[2,0],I=[-1,1])"
    report = residual_grid(make_surface("warped-cylinder", {"space": space}), GRID)
    assert report.passed, report.to_json()
    assert [eq.name for eq in report.equations] == list(WARPED_EQUATIONS)
