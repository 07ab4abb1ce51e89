import json
import math

import pytest

from diskgen.cli import main, parse_angle

KOEBE = {"tau": {"re": 0, "im": 0}, "source": {"atoms_p": [{"angle": math.pi, "weight": 1.0}]}}
LINEAR = {"tau": {"re": 0, "im": 0}, "source": {"constant_p": 1.0}}
TWO_SLIT = {"tau": {"re": 0, "im": 0},
            "source": {"atoms_p": [{"angle": 0.0, "weight": 0.5}, {"angle": math.pi, "weight": 0.5}]}}
UNIFORM = {"atoms": [], "density": {"type": "uniform", "c": 1.0}}


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_angle_forms():
    assert parse_angle("pi") == math.pi
    assert parse_angle("-pi/2") == -math.pi / 2
    assert parse_angle("3pi/4") == 3 * math.pi / 4
    assert parse_angle("1.5*pi") == 1.5 * math.pi
    assert parse_angle("0.25") == 0.25


def test_classify_koebe(tmp_path, capsys):
    code, out, _ = run(["classify", "--spec", write(tmp_path, "k.json", KOEBE), "--angles", "0,pi"], capsys)
    assert code == 0
    rows = json.loads(out)
    assert rows[0]["tag"] == "null_point" and abs(rows[0]["dilation"] - 0.5) < 1e-6
    assert rows[1]["tag"] == "pole" and abs(rows[1]["mass"] - 2) < 1e-9
    assert all("residual" in r for r in rows)


def test_classify_uniform_measure_all_other(tmp_path, capsys):
    code, out, _ = run(["classify", "--spec", write(tmp_path, "u.json", UNIFORM), "--angles", "16"], capsys)
    assert code == 0
    assert {r["tag"] for r in json.loads(out)} == {"other"}


def test_classify_missing_tau(tmp_path, capsys):
    code, _, err = run(["classify", "--spec", write(tmp_path, "b.json", {"source": {"constant_p": 1}})], capsys)
    assert code == 1 and "tau" in err


def test_classify_malformed_json(tmp_path, capsys):
    code, _, err = run(["classify", "--spec", write(tmp_path, "b.json", "{not json")], capsys)
    assert code == 1 and "JSON" in err


def test_classify_bad_field_named(tmp_path, capsys):
    spec = {"tau": {"re": 0, "im": 0}, "source": {"atoms_p": [{"weight": 1}]}}
    code, _, err = run(["classify", "--spec", write(tmp_path, "b.json", spec)], capsys)
    assert code == 1 and "source" in err


def test_classify_reports_inconclusive(tmp_path, capsys):
    spec = {"density": {"type": "power_cusp", "center": math.pi, "exponent": 1.5}}
    code, out, _ = run(["classify", "--spec", write(tmp_path, "c.json", spec), "--angles", "pi"], capsys)
    assert code == 2 and json.loads(out)[0]["tag"] == "inconclusive"


def test_classify_limits(tmp_path, capsys):
    path = write(tmp_path, "k.json", KOEBE)
    assert run(["classify", "--spec", path, "--angles", "5000"], capsys)[0] == 1
    assert run(["classify", "--spec", path, "--tol-pole", "-1", "--angles", "4"], capsys)[0] == 1


def test_flow_linear(tmp_path, capsys):
    code, out, _ = run(["flow", "--spec", write(tmp_path, "l.json", LINEAR), "--z0", "0.5", "--t-end", "1"], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "t,re,im,v_re,v_im"
    t, x, y, vr, vi = map(float, lines[-1].split(","))
    assert t == 1.0 and abs(x - 0.18394) < 1e-5 and y == 0 and abs(vr - 0.36788) < 1e-5 and vi == 0


def test_flow_koebe_matches_oracle(tmp_path, capsys):
    code, out, _ = run(["flow", "--spec", write(tmp_path, "k.json", KOEBE), "--z0", "0.25,0", "--t-end", "0.7"],
                       capsys)
    assert code == 0
    x = float(out.strip().split("\n")[-1].split(",")[1])
    w = math.exp(-0.7) * 0.25 / 0.75 ** 2
    assert abs(x - 2 * w / (1 + 2 * w + math.sqrt(1 + 4 * w))) < 1e-8


def test_flow_input_errors(tmp_path, capsys):
    path = write(tmp_path, "l.json", LINEAR)
    assert run(["flow", "--spec", path, "--z0", "0.5", "--t-end", "-1"], capsys)[0] == 1
    assert run(["flow", "--spec", path, "--z0", "1.5", "--t-end", "1"], capsys)[0] == 1
    assert run(["flow", "--spec", path, "--t-end", "1"], capsys)[0] == 1


def test_koenigs_linear(tmp_path, capsys):
    code, out, _ = run(["koenigs", "--spec", write(tmp_path, "l.json", LINEAR), "--angles", "8"], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "theta,upsilon,abs_h" and lines[-1].startswith("# max_identity_residual=")
    for row in lines[1:-1]:
        th, ups, ah = map(float, row.split(","))
        assert abs(ups - th) < 1e-9 and abs(ah - 1) < 1e-9


def test_koenigs_plateaus(tmp_path, capsys):
    code, out, _ = run(["koenigs", "--spec", write(tmp_path, "t.json", TWO_SLIT),
                        "--angles", "0.5,2.0,3.0,4.0,6.0"], capsys)
    assert code == 0
    ups = [float(r.split(",")[1]) for r in out.strip().split("\n")[1:-1]]
    assert ups == pytest.approx([0.0, math.pi, math.pi, math.pi, 2 * math.pi], abs=1e-6)


def test_multislit_commands(tmp_path, capsys):
    code, out, _ = run(["multislit", "--spec", write(tmp_path, "m.json",
                        {"pole_atoms": [{"angle": 0, "mass": 0.3}, {"angle": math.pi, "mass": 0.7}]})], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and abs(rep["sum_sigma"] - 1) < 1e-10
    path = write(tmp_path, "n.json", {"pole_atoms": [{"angle": 0, "mass": 3}, {"angle": 2, "mass": 7}]})
    assert run(["multislit", "--spec", path], capsys)[0] == 1
    assert run(["multislit", "--spec", path, "--normalize"], capsys)[0] == 0
    code, out, _ = run(["multislit", "--spec", write(tmp_path, "t.json", {"tips": [0, math.pi / 2, math.pi]})],
                       capsys)
    assert code == 0 and json.loads(out)["sigma"] == pytest.approx([0.25, 0.25, 0.5])


@pytest.mark.parametrize("name", ["step_measure", "no_tip", "koebe_suite", "half_plane_suite"])
def test_examples_pass(name, capsys):
    code, out, _ = run(["example", name], capsys)
    assert code == 0 and "FAIL" not in out


def test_cusp_example_with_alpha(capsys):
    code, out, _ = run(["example", "cusp", "--alpha", "2.5,1.5"], capsys)
    assert code == 0 and "alpha=2.5" in out and "alpha=1.5" in out


def test_unknown_example_lists_names(capsys):
    code, _, err = run(["example", "bogus"], capsys)
    assert code == 1 and "step_measure" in err and "koebe_suite" in err


def test_selftest(capsys):
    code, out, _ = run(["selftest", "--seed", "6"], capsys)
    assert code == 0 and "FAIL" not in out


def test_output_is_deterministic(tmp_path, capsys):
    path = write(tmp_path, "k.json", KOEBE)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["classify", "--spec", path, "--angles", "32", "--out", str(a)]) == 0
    assert main(["classify", "--spec", path, "--angles", "32", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_usage_error_exit_code(capsys):
    assert main(["nonsense"]) == 1
    assert main([]) == 1
