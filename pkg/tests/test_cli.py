import json
from fractions import Fraction
from importlib import resources

import pytest

from flpf.cli import EXIT_CHECK, EXIT_LIMIT, EXIT_OK, EXIT_PARSE, main
from flpf.errors import NetworkFileError
from flpf.netfile import parse_network, parse_rational, serialize_network

DATA = resources.files("flpf.data")
HEXAGON = str(DATA / "hexagon.json")
PATH3 = str(DATA / "three_link_path.json")
MULTI = str(DATA / "three_link_multistate.json")
FOUR = str(DATA / "four_link.json")


def test_parse_rational_rejects_zero_denominator():
    with pytest.raises(NetworkFileError):
        parse_rational("1/0", "p")


def test_parse_rational_rejects_float():
    with pytest.raises(NetworkFileError):
        parse_rational(0.5, "p")


def test_parse_errors_have_field_context():
    with pytest.raises(NetworkFileError) as e:
        parse_network({"links": ["a"], "fading": {"mode": "iid", "p": "1/0"}})
    assert "fading.p" in str(e.value)
    with pytest.raises(NetworkFileError):
        parse_network({"links": []})
    with pytest.raises(NetworkFileError):
        parse_network(
            {"links": ["a", "b"], "interference": [["a", "z"]],
             "fading": {"mode": "iid", "p": "1"}}
        )
    with pytest.raises(NetworkFileError):
        parse_network(
            {"links": ["a"], "fading": {"mode": "explicit",
                                        "states": [{"state": "2", "prob": "1"}]}}
        )


def test_roundtrip_all_bundled():
    for path in (HEXAGON, PATH3, MULTI, FOUR):
        nf = parse_network(path)
        doc = serialize_network(nf)
        nf2 = parse_network(doc)
        assert nf2.graph == nf.graph
        assert nf2.fading == nf.fading
        assert serialize_network(nf2) == doc


def test_cmd_flpf_hexagon(capsys):
    rc = main(["flpf", HEXAGON, "--oracle-tol", "1/1000000"])
    out = capsys.readouterr().out
    assert rc == EXIT_OK
    assert "exact pooling factor: 2/3" in out
    assert "minimizing subset: a,b,c,d,e,f" in out
    assert "oracle agreement: OK" in out


def test_cmd_flpf_subset(capsys):
    rc = main(["flpf", PATH3, "--subset", "a,b,c"])
    out = capsys.readouterr().out
    assert rc == EXIT_OK and "pooling factor: 3/4" in out


def test_cmd_flpf_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"links": ["a"], "fading": {"mode": "iid", "p": "1/0"}}')
    rc = main(["flpf", str(bad)])
    assert rc == EXIT_PARSE
    assert "fading.p" in capsys.readouterr().err


def test_cmd_flpf_limit(monkeypatch, capsys):
    monkeypatch.setenv("FLPF_MAX_LINKS", "3")
    rc = main(["flpf", HEXAGON])
    assert rc == EXIT_LIMIT


def test_cmd_sweep_deterministic(tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    for out in (out1, out2):
        rc = main([
            "sweep", HEXAGON, "--from", "0.2", "--to", "1.0", "--step", "0.2",
            "--out", str(out),
        ])
        assert rc == EXIT_OK
    assert out1.read_bytes() == out2.read_bytes()
    rows = out1.read_text().splitlines()
    assert rows[0] == "p,lower_min,lower_full,inverse_degree,exact"
    last = rows[-1].split(",")
    assert last[0] == "1" and last[2] == "2/3" and last[3] == "1/2"


def test_cmd_sweep_single_link(tmp_path):
    net = tmp_path / "one.json"
    net.write_text(
        '{"links": ["l"], "interference": [], "fading": {"mode": "iid", "p": "1"}}'
    )
    out = tmp_path / "one.csv"
    rc = main([
        "sweep", str(net), "--from", "0.25", "--to", "1.0", "--step", "0.25",
        "--exact", "--out", str(out),
    ])
    assert rc == EXIT_OK
    for row in out.read_text().splitlines()[1:]:
        p, lo_min, lo_full, inv, exact = row.split(",")
        assert lo_min == lo_full == inv == exact == "1"


def test_cmd_sweep_requires_iid(capsys):
    rc = main(["sweep", PATH3, "--from", "0.5", "--to", "1.0", "--step", "0.5"])
    assert rc == EXIT_PARSE


def test_cmd_sweep_worker_pool_same_bytes(tmp_path):
    seq = tmp_path / "seq.csv"
    par = tmp_path / "par.csv"
    for out, workers in ((seq, "1"), (par, "3")):
        rc = main([
            "sweep", HEXAGON, "--from", "0.25", "--to", "1.0", "--step", "0.25",
            "--workers", workers, "--out", str(out),
        ])
        assert rc == EXIT_OK
    assert seq.read_bytes() == par.read_bytes()


def test_cmd_flpf_csv_row(capsys):
    rc = main(["flpf", HEXAGON, "--csv"])
    out = capsys.readouterr().out.splitlines()
    assert rc == EXIT_OK
    assert out[0] == "links,interference_degree,exact,lower_min,inverse_degree,argmin"
    assert out[1] == "6,2,2/3,1/2,1/2,a,b,c,d,e,f"


def test_cmd_flpf_no_bounds(capsys):
    rc = main(["flpf", HEXAGON, "--no-bounds"])
    out = capsys.readouterr().out
    assert rc == EXIT_OK
    assert "exact pooling factor" in out and "lower bound" not in out


def test_cmd_region(capsys):
    rc = main(["region", PATH3, "--rates", "0,5/6,0", "--scaling", "idegree"])
    out = capsys.readouterr().out
    assert rc == EXIT_OK and "location: boundary (inside closure)" in out
    rc = main(["region", PATH3, "--rates", "0,5/6,0", "--scaling", "gamma=4/5"])
    out = capsys.readouterr().out
    assert rc == EXIT_OK and "location: exterior" in out and "certificate" in out


def test_cmd_region_rates_from_file(capsys):
    rc = main(["region", PATH3, "--scaling", "none"])
    out = capsys.readouterr().out
    assert rc == EXIT_OK and "location: interior" in out


def test_cmd_simulate_iid(tmp_path, capsys):
    out = tmp_path / "verdicts.jsonl"
    rc = main([
        "simulate", PATH3, "--mode", "iid", "--rates", "7/24,7/24,7/24",
        "--slots", "50000", "--seeds", "2", "--out", str(out),
    ])
    assert rc == EXIT_OK
    text = capsys.readouterr().out
    assert "aggregate: 2/2 stable" in text
    records = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(records) == 2
    assert all(r["verdict"] == "stable" for r in records)


def test_cmd_simulate_worker_pool_matches_sequential(tmp_path, capsys):
    outs = []
    for name, workers in (("s.jsonl", "1"), ("p.jsonl", "2")):
        out = tmp_path / name
        rc = main([
            "simulate", PATH3, "--mode", "iid", "--rates", "1/4,1/4,1/4",
            "--slots", "30000", "--seeds", "2", "--workers", workers,
            "--out", str(out),
        ])
        assert rc == EXIT_OK
        outs.append(out.read_text())
    assert outs[0] == outs[1]


def test_cmd_simulate_adversarial(tmp_path, capsys):
    rc = main([
        "simulate", PATH3, "--mode", "adversarial", "--slots", "60000",
        "--seeds", "1", "--out", str(tmp_path / "v.jsonl"),
    ])
    assert rc == EXIT_OK
    text = capsys.readouterr().out
    assert "unstable" in text and "equal-queue boundaries: yes" in text


def test_cmd_simulate_adversarial_needs_decomposition(capsys):
    rc = main(["simulate", HEXAGON, "--mode", "adversarial", "--slots", "20000"])
    assert rc == EXIT_PARSE


def test_cmd_simulate_trace_csv(tmp_path):
    rc = main([
        "simulate", PATH3, "--mode", "iid", "--rates", "1/4,1/4,1/4",
        "--slots", "20000", "--seeds", "1",
        "--trace-csv", str(tmp_path / "tr.csv"),
    ])
    assert rc == EXIT_OK
    assert (tmp_path / "tr_seed0.csv").exists()


def test_cmd_examples_list(capsys):
    rc = main(["examples", "--list"])
    out = capsys.readouterr().out
    assert rc == EXIT_OK
    assert "hexagon-no-fading-exact-2/3" in out
    assert "FAIL" not in out


def test_cmd_examples_all_pass(capsys):
    rc = main(["examples"])
    out = capsys.readouterr().out
    assert rc == EXIT_OK
    assert "9/9 checks passed" in out


def test_cmd_examples_corrupted_bundle(tmp_path, capsys):
    for name in ("hexagon.json", "three_link_path.json",
                 "four_link.json", "three_link_multistate.json"):
        (tmp_path / name).write_text((DATA / name).read_text())
    (tmp_path / "hexagon.json").write_text('{"links": ["a"], "fading": {"mode": "iid", "p": "1/0"}}')
    rc = main(["examples", "--data-dir", str(tmp_path)])
    out = capsys.readouterr().out
    assert rc == EXIT_CHECK
    assert "FAIL" in out and "error" in out
