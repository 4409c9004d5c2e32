"""Unit tests for surface extraction."""

import dataclasses
import json

import numpy as np
import pytest

from assocfam import (
    ConfigError,
    ContractViolation,
    DegenerateImmersion,
    DomainError,
    GridSpec,
    HomogeneousSpace,
    Immersion,
    LightlikeNormal,
    PointFailure,
    SignatureError,
    extract,
    list_catalog,
    make_surface,
    parse_space,
    residual_grid,
    sample_grid,
)
from assocfam.surface import (
    codazzi_identity_defect,
    covariant_data,
    first_fundamental,
    frame_matrices,
    gauss_curvature,
    normal_and_sign,
    resolve_orientation,
    shape_operator,
    split_shape,
    structure_projection,
)

GRID = GridSpec(5, 5)


def _flat_patch(space, lo=-0.5, hi=0.5):
    return Immersion(space, ((lo, hi), (lo, hi)), lambda u, v: (u, v, 0.0), orientation=1)


def test_slice_in_product_is_totally_geodesic():
    imm = make_surface("slice-product", {"space": "E(1,0)"})
    q = (0.3, -0.2)
    d = extract(imm, q)
    assert d.K == pytest.approx(1.0, abs=1e-10)
    assert np.abs(d.T).max() == pytest.approx(0.0, abs=1e-14)
    assert d.f == pytest.approx(1.0)
    assert np.abs(d.A).max() == pytest.approx(0.0, abs=1e-12)
    assert d.eps3 == 1


def test_point_wrappers_agree_with_extract():
    imm = make_surface("slice-product", {"space": "E(1,0)"})
    q = (0.0, 0.0)
    d = extract(imm, q)
    assert first_fundamental(imm, q) == pytest.approx(np.eye(2))
    assert gauss_curvature(imm, q) == pytest.approx(d.K)
    assert shape_operator(imm, q) == pytest.approx(d.A)
    nu, eps3 = normal_and_sign(imm, q)
    assert nu == pytest.approx(d.nu)
    assert eps3 == 1
    T, f = structure_projection(imm, q)
    assert f == pytest.approx(1.0)
    assert covariant_data(imm, q).df == pytest.approx(d.df, abs=1e-14)


def test_vertical_plane_in_nil_has_bundle_shape_operator():
    imm = make_surface("nil3-vertical-plane", {"angle": 0.4})
    d = extract(imm, (0.2, 0.1))
    frame = frame_matrices(d)
    assert abs(d.f) <= 1e-12
    assert d.norm(d.T) == pytest.approx(1.0)
    assert d.H == pytest.approx(0.0, abs=1e-12)
    assert abs(frame.A[0, 1]) == pytest.approx(0.5)
    assert frame.A[0, 0] == pytest.approx(0.0, abs=1e-12)
    assert frame.A[1, 1] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("space", ["E(-1,0)", "E(1,0)", "E(-2,0)"])
def test_helicoid_is_minimal(space):
    imm = make_surface("helicoid-product", {"space": space, "pitch": 0.7})
    for _, d in sample_grid(imm, GRID):
        assert not isinstance(d, PointFailure)
        assert abs(d.H) <= 1e-8


@pytest.mark.parametrize(
    "space",
    ["E(-1,0.25)", "E(1,0.3)", "E(0,0.5)", "W(1,1,1,0,a=cosh[2,0],I=[-1,1])"],
)
def test_shape_operator_splits_against_rotation(space):
    imm = make_surface("graph", {"space": space, "phi": "0.2*u*v+0.1*u*u"})
    d = extract(imm, (0.3, -0.4))
    J, A = d.Jmat, d.A
    assert J @ J == pytest.approx(-np.eye(2), abs=1e-12)
    assert J @ A + A @ J == pytest.approx(2 * d.H * J, abs=1e-12)
    H, Ac, Aa = split_shape(A, J)
    assert H == pytest.approx(d.H)
    assert Ac + Aa == pytest.approx(A)
    assert np.trace(Aa) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize(
    "space",
    [
        "E(-1,0)",
        "E(1,0.3)",
        "E(0,0.5)",
        "W(1,1,1,0,a=cosh[2,0],I=[-1,1])",
        "W(1,1,0,0,a=custom[t*t+1],I=[-1,1])",
    ],
)
def test_codazzi_identity_holds(space):
    imm = make_surface("graph", {"space": space, "phi": "0.3*sin(u)*v+0.2*u"})
    for _, d in sample_grid(imm, GRID):
        assert not isinstance(d, PointFailure)
        assert codazzi_identity_defect(d) <= 1e-9


def test_split_shape():
    H, Ac, Aa = split_shape(np.array([[1.0, 2.0], [2.0, 3.0]]), np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert H == 2.0
    assert Ac == pytest.approx(2 * np.eye(2))
    assert Aa == pytest.approx(np.array([[-1.0, 2.0], [2.0, 1.0]]))


def test_flipping_orientation_negates_oriented_data():
    imm = resolve_orientation(make_surface("tilted-plane-product"))
    assert imm.orientation in (-1, 1)
    q = (0.1, 0.2)
    d = extract(imm, q)
    e = extract(imm.flipped(), q)
    assert e.nu == pytest.approx(-d.nu)
    assert e.f == pytest.approx(-d.f)
    assert e.A == pytest.approx(-d.A)
    assert e.Jmat == pytest.approx(-d.Jmat)
    assert e.T == pytest.approx(d.T)
    assert e.K == pytest.approx(d.K)


def test_orientation_makes_f_non_negative():
    d = extract(make_surface("tilted-plane-product", {"slope": -2.0}), (0.0, 0.0))
    assert d.f > 0


def test_flipping_unresolved_orientation_is_rejected():
    with pytest.raises(ContractViolation):
        make_surface("slice-product").flipped()


def test_immersion_validates_its_arguments():
    space = HomogeneousSpace(-1.0, 0.0)
    with pytest.raises(ContractViolation):
        Immersion(space, ((0.0, 1.0), (0.0, 1.0)), lambda u, v: (u, v, 0.0), 2)
    with pytest.raises(ContractViolation):
        Immersion(space, ((1.0, 0.0), (0.0, 1.0)), lambda u, v: (u, v, 0.0))


def test_degenerate_immersion():
    imm = Immersion(
        HomogeneousSpace(-1.0, 0.0), ((-0.5, 0.5), (-0.5, 0.5)), lambda u, v: (u, u, 0.0), 1
    )
    with pytest.raises(DegenerateImmersion) as exc:
        extract(imm, (0.1, 0.1))
    assert exc.value.point == (0.1, 0.1)


def test_lightlike_normal():
    space = parse_space("W(-1,1,0,0,a=const[1],I=[-1,1])")
    imm = Immersion(space, ((-0.5, 0.5), (-0.5, 0.5)), lambda u, v: (u, v, u), 1)
    with pytest.raises(LightlikeNormal):
        extract(imm, (0.1, 0.1))


def test_timelike_surface_has_wrong_signature():
    space = parse_space("W(-1,1,1,0,a=cosh[2,0],I=[-1,1])")
    imm = Immersion(space, ((-0.5, 0.5), (-0.5, 0.5)), lambda u, v: (u, 0.0, v), 1)
    with pytest.raises(SignatureError):
        extract(imm, (0.1, 0.1))


def test_point_outside_the_chart():
    imm = _flat_patch(HomogeneousSpace(-1.0, 0.0))
    with pytest.raises(DomainError):
        extract(imm, (3.0, 0.0))


def test_sample_grid_records_failures_in_grid_order():
    imm = _flat_patch(HomogeneousSpace(-1.0, 0.0), -3.0, 3.0)
    samples = sample_grid(imm, GridSpec(3, 3, 0.0))
    assert [q for q, _ in samples] == GridSpec(3, 3, 0.0).points(imm.chart_domain)
    failures = [item for _, item in samples if isinstance(item, PointFailure)]
    assert failures
    assert all(item.error == "DomainError" for item in failures)
    assert not isinstance(samples[4][1], PointFailure)


def test_thread_count_does_not_change_results(monkeypatch):
    imm = make_surface("graph", {"phi": "0.3*u*v"})
    serial = sample_grid(imm, GRID, threads=1)
    monkeypatch.setenv("ASSOCFAM_THREADS", "3")
    pooled = sample_grid(imm, GRID)
    assert [q for q, _ in pooled] == GRID.points(imm.chart_domain)
    for (q1, d1), (q2, d2) in zip(serial, pooled):
        assert q1 == q2
        assert d1.to_json() == d2.to_json()
    wide = sample_grid(imm, GRID, threads=8)
    assert [d.to_json() for _, d in wide] == [d.to_json() for _, d in serial]


def test_bad_thread_environment(monkeypatch):
    monkeypatch.setenv("ASSOCFAM_THREADS", "many")
    with pytest.raises(ConfigError):
        sample_grid(make_surface("slice-product"), GRID)
    with pytest.raises(ConfigError):
        sample_grid(make_surface("slice-product"), GRID, threads=0)


def test_surface_data_json():
    d = extract(make_surface("helicoid-product"), (0.5, 0.2))
    data = json.loads(d.to_json())
    assert data["point"] == [0.5, 0.2]
    assert data["eps3"] == 1
    assert np.array(data["nablaA"]).shape == (2, 2, 2)
    assert d.to_json() == extract(make_surface("helicoid-product"), (0.5, 0.2)).to_json()


def test_field_jets_required():
    d = extract(make_surface("slice-product"), (0.0, 0.0))
    assert d.field_jets.f.value() == pytest.approx(d.f)
    with pytest.raises(ContractViolation):
        dataclasses.replace(d, _jets=None).field_jets


@pytest.mark.parametrize("name", [entry.name for entry in list_catalog()])
def test_rotation_anticommutes_with_traceless_shape_on_catalog(name):
    for _, d in sample_grid(make_surface(name), GridSpec(4, 3)):
        assert not isinstance(d, PointFailure)
        lhs = d.Jmat @ d.A + d.A @ d.Jmat
        assert lhs == pytest.approx(2 * d.H * d.Jmat, abs=1e-10)
        assert codazzi_identity_defect(d) <= 1e-9


def test_shear_reparametrization_keeps_invariants_and_residuals():
    space = HomogeneousSpace(-1.0, 0.0)

    def height(x, y):
        return 0.5 * x + 0.2 * x * y

    plain = Immersion(
        space, ((-0.6, 0.6), (-0.6, 0.6)), lambda u, v: (u, v, height(u, v)), 1
    )
    sheared = Immersion(
        space,
        ((-0.45, 0.45), (-0.6, 0.6)),
        lambda u, v: (u + 0.3 * v, v, height(u + 0.3 * v, v)),
        1,
    )
    for u, v in [(0.2, 0.1), (-0.3, 0.3), (0.25, -0.5)]:
        d, e = extract(plain, (u, v)), extract(sheared, (u - 0.3 * v, v))
        assert abs(e.H) == pytest.approx(abs(d.H), abs=1e-12)
        assert e.K == pytest.approx(d.K, abs=1e-10)
        assert abs(e.f) == pytest.approx(abs(d.f), abs=1e-12)
        assert e.norm(e.T) == pytest.approx(d.norm(d.T), abs=1e-12)
    before = residual_grid(plain, GRID)
    after = residual_grid(sheared, GRID)
    assert before.passed and after.passed
    for ours, theirs in zip(before.equations, after.equations):
        assert ours.name == theirs.name
        assert abs(ours.max_abs - theirs.max_abs) <= 1e-8
