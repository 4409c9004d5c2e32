"""Tests for the command-line front end."""

import json

import pytest

from assocfam.cli import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, EXIT_UNDETERMINED, main

GRID = ["--grid", "7x7"]


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_prints_a_passing_report(capsys):
    code, out, _ = _run(capsys, "verify", "--surface", "slice-product", *GRID)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["passed"] is True
    assert data["space"] == "E(1,0)"
    assert [eq["name"] for eq in data["equations"]] == ["r_G", "r_C", "r_T", "r_f"]


def test_verify_writes_identical_files(tmp_path, capsys):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["verify", "--space", "E(-1,0.25)", "--surface", "tilted-plane-product", *GRID]
    assert main([*argv, "--out", str(first)]) == EXIT_OK
    assert main([*argv, "--out", str(second)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert first.read_bytes() == second.read_bytes()
    assert sorted(p.name for p in tmp_path.iterdir()) == ["a.json", "b.json"]


def test_verify_csv(capsys):
    code, out, _ = _run(
        capsys, "verify", "--surface", "helicoid-product", "--format", "csv", *GRID
    )
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("theta,equation,max_abs")
    assert len(out.splitlines()) == 5


def test_verify_fails_below_rounding(capsys):
    code, out, _ = _run(capsys, "verify", "--surface", "helicoid-product", "--tol", "1e-300", *GRID)
    assert code == EXIT_FAILED
    assert json.loads(out)["passed"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--space", "E(1)", "--surface", "slice-product"],
        ["verify", "--surface", "catenoid"],
        ["verify", "--surface", "helicoid-product", "--param", "pitch=0"],
        ["verify", "--surface", "helicoid-product", "--param", "pitch"],
        ["verify", "--surface", "slice-product", "--param", "space=E(1,0)"],
        ["verify", "--surface", "slice-product", "--param", "t0=1", "--param", "t0=2"],
        ["verify", "--surface", "slice-product", "--grid", "7by7"],
        ["verify", "--surface", "slice-product", "--tol", "-1"],
        ["verify", "--surface", "slice-product", "--margin", "0.6"],
        ["family", "--surface", "slice-product", "--thetas", "0,quarter"],
        ["family", "--surface", "slice-product", "--thetas", "0,inf"],
        ["family", "--surface", "slice-product", "--law", "custom(F1=2)"],
        ["classify", "--space", "E(0,0)", "--surface", "graph"],
    ],
)
def test_configuration_errors(capsys, argv):
    code, out, err = _run(capsys, *argv)
    assert code == EXIT_CONFIG
    assert out == ""
    assert "error" in err


def test_argument_errors_exit_with_config_code(capsys):
    assert main(["verify"]) == EXIT_CONFIG
    assert main(["transform", "--surface", "slice-product"]) == EXIT_CONFIG
    capsys.readouterr()


def test_version_comes_from_the_distribution(capsys):
    from importlib.metadata import version as dist_version

    import assocfam
    from assocfam._version import UNINSTALLED_VERSION, distribution_version

    assert assocfam.__version__ == dist_version("assocfam")
    assert distribution_version("assocfam-not-installed") == UNINSTALLED_VERSION
    assert main(["--version"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == f"assocfam {assocfam.__version__}"


def test_family_passes_for_the_helicoid(capsys):
    code, out, _ = _run(capsys, "family", "--surface", "helicoid-product", *GRID)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["law"] == "canonical"
    assert len(data["thetas"]) == 4
    assert data["first_failing_theta"] is None


def test_family_fails_for_the_nil_plane(capsys):
    code, out, err = _run(
        capsys,
        "family",
        "--surface",
        "nil3-vertical-plane",
        "--thetas",
        "0,0.7853981633974483",
        *GRID,
    )
    assert code == EXIT_FAILED
    assert json.loads(out)["first_failing_theta"] == 0.7853981633974483
    assert "first failing theta" in err


def test_family_custom_law(capsys):
    code, out, _ = _run(
        capsys,
        "family",
        "--surface",
        "slice-product",
        "--law",
        "custom(F1=1+sin(theta))",
        "--thetas",
        "0.3",
        *GRID,
    )
    assert code in (EXIT_OK, EXIT_FAILED)
    assert json.loads(out)["law"].startswith("custom(F1=1+sin(theta)")


def test_classify_definite_verdict(capsys):
    code, out, _ = _run(capsys, "classify", "--surface", "nil3-vertical-plane", *GRID)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["outcome"] == "NotExists"
    assert data["obstruction"] == "relationHandtau"
    assert data["magnitude"] > 0


def test_classify_undetermined_verdict(tmp_path, capsys):
    target = tmp_path / "verdict.csv"
    code = main(
        [
            "classify",
            "--surface",
            "graph",
            "--param",
            "phi=u*u*u",
            "--format",
            "csv",
            "--out",
            str(target),
            *GRID,
        ]
    )
    assert code == EXIT_UNDETERMINED
    rows = target.read_text(encoding="utf-8").splitlines()
    assert rows[1] == "outcome,Undetermined"
    assert "regions.T_zero,ExistsTotallyUmbilical" in rows
    capsys.readouterr()
