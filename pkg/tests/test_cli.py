import json
import math

import pytest

from nonlocal_supersol.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestClassify:
    def test_whole_space_existence(self, capsys):
        code, out, _ = run(
            capsys, "classify", "--N", "4", "--m", "2", "--alpha", "1",
            "--p", "2", "--q", "1", "--domain", "rn", "--operator-class", "hm+upper",
        )
        assert code == 0
        assert json.loads(out) == {"status": "Existence", "tags": ["Cor2.6-ii3-A"]}

    def test_low_dimension_nonexistence(self, capsys):
        code, out, _ = run(
            capsys, "classify", "--N", "3", "--m", "3", "--alpha", "1",
            "--p", "2", "--q", "1", "--domain", "exterior", "--operator-class", "hm",
        )
        assert code == 0
        data = json.loads(out)
        assert data["status"] == "Nonexistence" and data["tags"] == ["Thm2.1(i)"]

    def test_fraction_arguments(self, capsys):
        code, out, _ = run(
            capsys, "classify", "--N", "4", "--m", "2", "--alpha", "1",
            "--p", "1/2", "--q", "5", "--domain", "exterior", "--operator-class", "hm",
        )
        assert code == 0
        assert "Thm2.1(ii1)" in json.loads(out)["tags"]

    def test_missing_flag_exits_2(self, capsys):
        code = main(["classify", "--N", "4", "--m", "2", "--alpha", "1", "--q", "1"])
        capsys.readouterr()
        assert code == 2

    def test_invalid_alpha_exits_2(self, capsys):
        code, _, err = run(
            capsys, "classify", "--N", "4", "--m", "2", "--alpha", "9",
            "--p", "1", "--q", "1",
        )
        assert code == 2
        assert "alpha" in err

    def test_system_classification(self, capsys):
        code, out, _ = run(
            capsys, "classify", "--system", "--N", "5", "--m", "2", "--m2", "2",
            "--alpha", "1", "--beta", "1", "--p", "3/2", "--q", "3/2",
            "--r", "3/2", "--s", "3/2", "--shape", "1",
        )
        assert code == 0
        assert json.loads(out)["tags"] == ["Thm2.12(i)"]


class TestRegion(object):
    def test_small_region_outputs(self, tmp_path, capsys):
        base = tmp_path / "fig"
        code, _, _ = run(
            capsys, "region", "--N", "4", "--m", "2", "--alpha", "1",
            "--p-range", "0", "5", "--q-range", "-1", "5", "--res", "8",
            "--out", str(base),
        )
        assert code == 0
        csv = (tmp_path / "fig.csv").read_text().splitlines()
        assert csv[0] == "p,q,status,tags"
        assert len(csv) == 1 + 8 * 8
        svg = (tmp_path / "fig.svg").read_text()
        assert svg.startswith("<svg") and "line" in svg
        manifest = json.loads((tmp_path / "fig.manifest.json").read_text())
        assert manifest["subcommand"] == "region"
        assert "config_hash" in manifest and "timestamp" in manifest

    def test_determinism(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        for base in (a, b):
            run(
                capsys, "region", "--N", "4", "--m", "2", "--alpha", "3",
                "--p-range", "0", "4", "--q-range", "0", "4", "--res", "6",
                "--out", str(base),
            )
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()

    def test_unwritable_path_exits_3(self, capsys):
        code, _, err = run(
            capsys, "region", "--N", "4", "--m", "2", "--alpha", "1",
            "--p-range", "0", "2", "--q-range", "0", "2", "--res", "4",
            "--out", "/nonexistent-dir/fig",
        )
        assert code == 3


class TestRieszEval:
    def test_newtonian_ball(self, capsys):
        code, out, _ = run(
            capsys, "riesz-eval", "--N", "3", "--alpha", "2", "--f", "indicator(0,1)",
            "--p", "1", "--r", "0",
        )
        assert code == 0
        data = json.loads(out)
        assert data["status"] == "Finite"
        assert data["value"] == pytest.approx(0.5, abs=1e-8)

    def test_zero_density(self, capsys):
        code, out, _ = run(
            capsys, "riesz-eval", "--N", "3", "--alpha", "2", "--f", "0",
            "--p", "1", "--r", "1",
        )
        assert code == 0
        assert json.loads(out)["value"] == 0.0

    def test_divergent_is_exit_zero(self, capsys):
        code, out, _ = run(
            capsys, "riesz-eval", "--N", "4", "--alpha", "2", "--f", "(1+r)^-2",
            "--p", "1", "--r", "1",
        )
        assert code == 0
        data = json.loads(out)
        assert data["status"] == "Divergent"
        assert data["value"] == math.inf

    def test_parse_failure_exits_2(self, capsys):
        code, _, err = run(
            capsys, "riesz-eval", "--N", "3", "--alpha", "2", "--f", "sin(r)",
            "--p", "1", "--r", "0",
        )
        assert code == 2


class TestCertify:
    def test_hypothesis_gate_names_violation(self, capsys):
        code, _, err = run(
            capsys, "certify", "--theorem", "2.4", "--N", "4", "--m", "2",
            "--alpha", "1", "--p", "0.4", "--q", "1",
        )
        assert code == 2
        assert "0.5" in err and "Thm2.1(ii1)" in err

    def test_bounded_certification(self, tmp_path, capsys):
        base = tmp_path / "cert"
        code, out, _ = run(
            capsys, "certify", "--theorem", "2.7", "--N", "2", "--m", "2",
            "--R", "1", "--p", "1", "--q", "1", "--grid-points", "60",
            "--rel-tol", "1e-7", "--out", str(base),
        )
        assert code == 0
        data = json.loads(out)
        assert data["status"] == "Certified"
        assert 0 < data["tuned_params"]["amplitude"] <= 1.0
        assert (tmp_path / "cert.csv").read_text().startswith("r,lhs,rhs,margin,budget")
        assert (tmp_path / "cert.manifest.json").exists()

    def test_unknown_theorem_exits_2(self, capsys):
        code, _, _ = run(
            capsys, "certify", "--theorem", "9.9", "--N", "2", "--m", "2",
            "--p", "1", "--q", "1",
        )
        assert code == 2

    def test_whole_space_certification_small_grid(self, capsys):
        code, out, _ = run(
            capsys, "certify", "--theorem", "2.3ii", "--N", "5", "--m", "2",
            "--alpha", "1", "--p", "2", "--q", "1", "--grid-points", "40",
            "--rel-tol", "1e-7",
        )
        assert code == 0
        assert json.loads(out)["status"] == "Certified"


class TestCertifySystem:
    def test_system_certification(self, capsys):
        code = main([
            "certify", "--theorem", "2.12i", "--N", "5", "--m", "2", "--m2", "2",
            "--alpha", "1", "--beta", "1", "--p", "1.5", "--q", "1.5",
            "--r", "1.5", "--s", "1.5", "--grid-points", "30", "--rel-tol", "1e-7",
        ])
        out = capsys.readouterr().out
        assert code == 0
        data = json.loads(out)
        assert data["component_u"]["status"] == "Certified"
        assert data["component_v"]["status"] == "Certified"

    def test_system_gate(self, capsys):
        code = main([
            "certify", "--theorem", "2.12i", "--N", "5", "--m", "2", "--m2", "2",
            "--alpha", "1", "--beta", "1", "--p", "0.2", "--q", "1.5",
            "--r", "1.5", "--s", "1.5",
        ])
        err = capsys.readouterr().err
        assert code == 2
        assert "hypothesis rejected" in err


class TestAdHocProfile:
    def test_profile_certification(self, capsys):
        profile = json.dumps({"family": "power_decay", "epsilon": 0.01, "gamma": 2.0})
        code, out, _ = run(
            capsys, "certify", "--profile", profile, "--N", "5", "--m", "2",
            "--alpha", "1", "--p", "2", "--q", "1", "--grid-points", "40",
            "--rel-tol", "1e-7",
        )
        assert code == 0
        assert json.loads(out)["status"] == "Certified"

    def test_profile_failure_exits_1(self, capsys):
        profile = json.dumps({"family": "constant", "value": 1.0})
        code, out, _ = run(
            capsys, "certify", "--profile", profile, "--N", "5", "--m", "2",
            "--alpha", "4.5", "--p", "1", "--q", "1", "--grid-points", "20",
            "--rel-tol", "1e-6",
        )
        # constant profiles have a divergent convolution over the whole space
        assert code == 0
        assert json.loads(out)["status"] == "Divergent"

    def test_bad_profile_json_exits_2(self, capsys):
        code, _, err = run(
            capsys, "certify", "--profile", "{\"family\": \"nope\"}", "--N", "5",
            "--m", "2", "--alpha", "1", "--p", "2", "--q", "1",
        )
        assert code == 2


def test_threads_env_var(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("NONLOCAL_SUPERSOL_THREADS", "4")
    base = tmp_path / "fig"
    code, _, _ = run(
        capsys, "region", "--N", "4", "--m", "2", "--alpha", "1",
        "--p-range", "0", "3", "--q-range", "0", "3", "--res", "6",
        "--out", str(base),
    )
    assert code == 0
    monkeypatch.setenv("NONLOCAL_SUPERSOL_THREADS", "1")
    base2 = tmp_path / "fig2"
    run(
        capsys, "region", "--N", "4", "--m", "2", "--alpha", "1",
        "--p-range", "0", "3", "--q-range", "0", "3", "--res", "6",
        "--out", str(base2),
    )
    assert (tmp_path / "fig.csv").read_bytes() == (tmp_path / "fig2.csv").read_bytes()


def test_bounded_domain_classify(capsys):
    code, out, _ = run(
        capsys, "classify", "--N", "4", "--m", "2", "--alpha", "1",
        "--p", "4", "--q", "1/2", "--domain", "bounded:1", "--operator-class", "hm",
    )
    assert code == 0
    assert json.loads(out) == {"status": "Existence", "tags": ["Thm2.7"]}
