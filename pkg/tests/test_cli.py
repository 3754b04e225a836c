import io
import json

import pytest

from simapprox.cli import RunConfig, main, resolve_config, build_parser

SQRT2 = "alg:-2,0,1:1,2"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def jsonl(text):
    return [json.loads(line) for line in text.splitlines()]


def test_bounds_table_csv():
    code, out, _ = run("bounds", "table", "--digits", "4", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 11
    assert lines[0].startswith("n,laurent,schleischitz,badziahin,new")
    assert lines[1].split(",")[4] == "0.3370" and lines[-1].split(",")[4] == "0.1286"


def test_bounds_subcommands():
    code, out, _ = run("bounds", "root", "--poly", "1,-3,-2")
    rec = jsonl(out)[0]
    assert code == 0 and rec["sign_lo"] == 1 and rec["sign_hi"] == -1
    assert abs(rec["approx"] - 0.2807764064) < 1e-9
    code, out, _ = run("bounds", "bracket", "--m-from", "2", "--m-to", "5")
    assert code == 0 and all(r["status"] == "PASS" for r in jsonl(out))
    code, out, _ = run("bounds", "verify-thm11", "--from", "12", "--to", "20")
    assert code == 0 and len(jsonl(out)) == 9
    code, out, _ = run("bounds", "root", "--poly", "1,-3,0,4,-1", "--interval", "1/3,1/2")
    assert code == 0 and jsonl(out)[0]["approx"] == pytest.approx(0.42450690, abs=1e-8)


def test_minimal_run_and_downstream():
    code, out, _ = run("minimal", "run", "--xi", SQRT2, "--n", "1", "--xmax", "51")
    recs = jsonl(out)
    assert code == 0 and [r["x"] for r in recs][-1] == [29, 41] and len(recs) == 5
    assert "/" in recs[0]["L_lo"]
    code, out, _ = run("minimal", "exponents", "--xi", SQRT2, "--n", "1", "--xmax", "10000")
    assert code == 0 and abs(jsonl(out)[0]["lambda_hat_slope"] - 1) < 0.01
    code, out, _ = run("minimal", "structure", "--xi", "cf:fib:1,2", "--n", "2", "--xmax", "100000")
    assert code == 0 and jsonl(out)[0]["I"]
    code, out, _ = run("minimal", "checkP", "--xi", "cf:fib:1,2", "--n", "2", "--xmax", "100000",
                       "--j", "0", "--ell", "1", "--i0", "1")
    assert code == 0 and jsonl(out)[0]["passed"]


def test_minimal_reads_records_from_file(tmp_path):
    _, out, _ = run("minimal", "run", "--xi", SQRT2, "--n", "1", "--xmax", "1000")
    path = tmp_path / "recs.jsonl"
    path.write_text(out)
    code, out2, _ = run("minimal", "exponents", "--input", str(path))
    assert code == 0 and jsonl(out2)[0]["records"] == len(jsonl(out))


def test_parallel_shards_byte_identical():
    base = ["minimal", "run", "--xi", "cf:fib:1,2", "--n", "2", "--xmax", "200000"]
    assert run(*base)[1] == run(*base, "--shards", "2")[1]


def test_exit_codes():
    assert run("bogus")[0] == 1
    assert run("minimal", "run", "--n", "1")[0] == 1
    assert run("minimal", "run", "--xi", SQRT2, "--n", "2", "--xmax", "10")[0] == 1
    assert run("minimal", "run", "--xi", SQRT2, "--n", "1", "--xmax", "10", "--format", "csv")[0] == 1
    assert run("minimal", "run", "--xi", "dec:1.41421356", "--n", "1", "--xmax", "1000000")[0] == 1
    code, _, err = run("uop", "avoid", "--basis", "1,0,0", "--ell", "1", "--v-basis", "1,0;0,1")
    assert code == 1 and "contained" in err


def test_contract_violation_exit_code(monkeypatch):
    from simapprox import bounds

    def broken(*args, **kwargs):
        from simapprox.errors import ContractViolation
        raise ContractViolation("synthetic", {"n": 12})

    monkeypatch.setattr(bounds, "verify_thm11_conditions", broken)
    code, _, err = run("bounds", "verify-thm11", "--from", "12", "--to", "12")
    assert code == 2 and "CONTRACT VIOLATION" in err and '"n": 12' in err


def test_uop_and_subspace_commands():
    code, out, _ = run("uop", "profile", "--basis", "1,2,4,8,16;1,1,1,1,1")
    assert code == 0 and jsonl(out)[0]["profile"] == [2, 2, 2, 2, 1, 0]
    code, out, _ = run("uop", "avoid", "--basis", "0,0,1", "--ell", "1")
    assert code == 0 and jsonl(out)[0]["a"] == [0, 1]
    code, out, _ = run("uop", "degeneracy", "--basis", "1,2,4,8,16", "--j", "0", "--ell", "1")
    assert code == 0 and jsonl(out)[0]["t_range"] == [0, 3]
    code, out, _ = run("uop", "project", "--basis", "1,2,4,8,16", "--ell", "1")
    assert jsonl(out)[0]["basis"] == [[1, 2, 4, 8]]
    code, out, _ = run("uop", "construct-c", "--v-basis", "0,1", "--x", "1,2,3")
    assert jsonl(out)[0]["C"] == [-1, -2]
    code, out, _ = run("subspace", "complement", "--basis", "1,2,3")
    assert jsonl(out)[0]["height_squared"] == 14
    code, out, _ = run("subspace", "schmidt", "--basis", "1,1", "--other", "1,-1")
    assert jsonl(out)[0] == {"lhs": 1, "rhs": 4, "holds": True}
    assert run("subspace", "sum", "--basis", "1,1")[0] == 1
    assert run("subspace", "show", "--basis", "", )[0] == 1
    code, out, _ = run("subspace", "show", "--basis", "", "--ambient", "3")
    assert jsonl(out)[0]["dim"] == 0


def test_proptest_summary():
    code, out, _ = run("proptest", "--suite", "heights", "--seed", "0")
    recs = jsonl(out)
    assert code == 0 and recs[-1] == {"summary": "PASS", "suites": 2, "cases": 1000}
    assert run("proptest", "--suite", "nope")[0] == 1


def test_run_config_roundtrip():
    cfg = RunConfig(xi=SQRT2, n=3, x_max=1000, max_bits=512, emit="pretty", seed=7, shards=2)
    assert RunConfig.parse(cfg.to_text()) == cfg
    assert RunConfig.parse(RunConfig().to_text()) == RunConfig()
    assert RunConfig().max_bits == 4096 and RunConfig().shards == 1 and RunConfig().seed == 0


def test_config_precedence(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(f"# defaults\n--xi {SQRT2} --n 1\n--xmax 51 --max-bits 300\n")
    args = build_parser().parse_args(["minimal", "run", "--config", str(path), "--xmax", "20"])
    cfg = resolve_config(args, environ={"SIMAPPROX_MAX_BITS": "999"})
    assert (cfg.xi, cfg.n, cfg.x_max, cfg.max_bits) == (SQRT2, 1, 20, 300)
    args = build_parser().parse_args(["minimal", "run", "--xi", SQRT2])
    assert resolve_config(args, environ={"SIMAPPROX_MAX_BITS": "999"}).max_bits == 999
    code, out, _ = run("minimal", "run", "--config", str(path))
    assert code == 0 and len(jsonl(out)) == 5
