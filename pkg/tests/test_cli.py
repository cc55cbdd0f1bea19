import json
import math
import subprocess
import sys

import pytest

from osclog.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_pv1d(capsys):
    code, out, _ = _run(capsys, "pv1d", "--poly", "[0,1]")
    rec = json.loads(out)
    assert code == 0
    assert rec["value_re"] == pytest.approx(0, abs=1e-9)
    assert rec["value_im"] == pytest.approx(math.pi, abs=1e-9)


def test_sublevel_endpoints(capsys):
    code, out, _ = _run(capsys, "sublevel", "--poly", "[0,-3,1]", "--alpha", "1")
    (a, b), = json.loads(out)["intervals"]
    assert code == 0
    assert a == pytest.approx((3 + math.sqrt(5)) / 2) and b == pytest.approx((3 + math.sqrt(13)) / 2)


def test_sublevel_sweep_csv(capsys):
    code, out, _ = _run(capsys, "sublevel", "--sweep", "5", "--seed", "1")
    assert code == 0 and out.splitlines()[0].startswith("degree,alpha,M")
    assert len(out.splitlines()) == 6


def test_pvn_remark(capsys):
    code, out, _ = _run(capsys, "pvn", "--poly", "1 1 0", "--kernel", "cos:1", "--remark")
    rec = json.loads(out)
    assert code == 0
    assert rec["value_im"] == pytest.approx(2 * math.pi, abs=1e-6)
    assert rec["remark_im"] == pytest.approx(rec["value_im"], abs=1e-6)


def test_bound_csv(capsys):
    code, out, _ = _run(capsys, "bound", "--cases", "5")
    assert code == 0 and out.splitlines()[0] == "test_id,d,k,t,alpha,bk_abs,bracket,ok"


def test_vdc_and_polweight(capsys):
    code, out, _ = _run(capsys, "vdc", "--poly", "[0,1,0,1]", "--a", "1", "--b", "2", "--lambdas", "10,100")
    assert code == 0 and out.splitlines()[0] == "lambda,integral_modulus,N,ratio"
    code, out, _ = _run(capsys, "polweight", "--random", "3", "--n", "2", "--k", "3")
    assert code == 0 and len(out.splitlines()) == 4


def test_certify_json(capsys, tmp_path):
    f = tmp_path / "c.json"
    code, _, err = _run(capsys, "certify", "--poly", "1 1 0; 1 0 2", "--kernel", "cos:1", "--no-measure",
                        "--out", str(f))
    assert code == 0 and "total bracket" in err
    assert json.loads(f.read_text())["degree_ladder"] == [2, 1]


def test_hypothesis_error_exit_2(capsys):
    code, _, err = _run(capsys, "vdc", "--poly", "[0,0,0.5]", "--a", "0", "--b", "1")
    assert code == 2 and "error" in err


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"cases": 3, "seed": 4}))
    code, out, _ = _run(capsys, "bound", "--config", str(cfg))
    assert code == 0
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, err = _run(capsys, "bound", "--config", str(cfg))
    assert code == 2 and "config.bogus" in err


def test_growth_deterministic_bytes():
    argv = [sys.executable, "-m", "osclog", "growth", "--degrees", "2,4,8", "--n", "1", "--kernel", "sign",
            "--samples", "50", "--seed", "7"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a.startswith(b"d,n,kernel_id")
