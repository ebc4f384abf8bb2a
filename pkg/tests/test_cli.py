import os
import subprocess
import sys

import pytest

from annostream.cli import main
from annostream.stream import read_annotation, write_annotation


def gen(tmp_path, *args, name="s.txt"):
    out = tmp_path / name
    assert main(["gen", *args, "--out", str(out)]) == 0
    return out


def test_gen_is_byte_deterministic(tmp_path):
    a = gen(tmp_path, "--protocol", "dag", "--n", "4", "--m", "3", "--seed", "7", name="a")
    b = gen(tmp_path, "--protocol", "dag", "--n", "4", "--m", "3", "--seed", "7", name="b")
    assert a.read_bytes() == b.read_bytes()


def test_prove_is_byte_deterministic(tmp_path):
    s = gen(tmp_path, "--protocol", "matching", "--n", "9", "--m", "14", "--seed", "3")
    outs = []
    for k in range(2):
        ann = tmp_path / f"a{k}"
        assert main(["prove", "--protocol", "matching", "--in", str(s), "--out", str(ann)]) == 0
        outs.append(ann.read_bytes())
    assert outs[0] == outs[1]


def test_usage_errors(capsys):
    assert main(["gen", "--protocol", "matching", "--n", "0"]) == 2
    assert main(["gen", "--protocol", "dag", "--n", "2", "--m", "5"]) == 2
    assert main(["gen", "--protocol", "nope"]) == 2
    with pytest.raises(SystemExit) as e:
        main(["frobnicate", "--protocol", "dag"])
    assert e.value.code == 2


@pytest.mark.parametrize("proto,args", [
    ("dag", ["--n", "6", "--m", "8"]),
    ("lp", ["--b", "3", "--c", "3", "--seed", "1"]),
    ("sssp", ["--n", "6", "--m", "10"]),
    ("matvec", ["--b", "9", "--c", "7", "--alpha", "1/2"]),
    ("mwbpm", ["--n", "6", "--m", "9"]),
    ("memcheck", ["--n", "5", "--m", "30"]),
])
def test_round_trip(tmp_path, capsys, proto, args):
    s = gen(tmp_path, "--protocol", proto, *args)
    ann = tmp_path / "ann"
    assert main(["prove", "--protocol", proto, "--in", str(s), "--out", str(ann)]) == 0
    capsys.readouterr()
    assert main(["verify", "--protocol", proto, "--in", str(s), "--ann", str(ann)]) == 0
    line = capsys.readouterr().out.strip()
    fields = dict(kv.split("=", 1) for kv in line.split())
    assert fields["protocol"] == proto and fields["outcome"] in ("value", "accept")
    assert int(fields["hcost"]) > 0 and int(fields["vcost"]) > 0


def test_wrong_protocol_tag(tmp_path):
    s = gen(tmp_path, "--protocol", "dag", "--n", "5", "--m", "6")
    ann = tmp_path / "ann"
    main(["prove", "--protocol", "dag", "--in", str(s), "--out", str(ann)])
    assert main(["verify", "--protocol", "bfs", "--in", str(s), "--ann", str(ann)]) == 2


def test_attacked_annotation_exits_one(tmp_path, capsys):
    s = gen(tmp_path, "--protocol", "matching", "--n", "8", "--m", "12")
    ann = tmp_path / "ann"
    main(["prove", "--protocol", "matching", "--in", str(s), "--out", str(ann)])
    toks = list(read_annotation(ann.read_text()))
    toks[0] = type(toks[0])("CLAIM", (toks[0].args[0] + 1,))
    ann.write_text(write_annotation(toks, "matching"))
    assert main(["verify", "--protocol", "matching", "--in", str(s), "--ann", str(ann)]) == 1
    assert "outcome=bottom" in capsys.readouterr().out


def test_attack_and_bench_reports(capsys):
    assert main(["attack", "--protocol", "dag", "--n", "6", "--m", "9", "--trials", "20"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 6 and all("rate=1.0000" in ln for ln in lines)
    assert main(["bench", "--protocol", "dag", "--sizes", "64,256", "--trials", "2",
                 "--jobs", "2"]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    sizes = [int(dict(kv.split("=") for kv in r.split())["size"]) for r in rows]
    assert sizes == [64, 64, 256, 256]


def test_human_mode(capsys):
    assert main(["attack", "--protocol", "bfs", "--n", "5", "--trials", "5",
                 "--mutate", "drop-token", "--human"]) == 0
    assert "mutate" in capsys.readouterr().out.splitlines()[1]


def test_field_prime_override(tmp_path):
    s = gen(tmp_path, "--protocol", "dag", "--n", "6", "--m", "8")
    env = dict(os.environ, ANNOSTREAM_FIELD_P=str(2 ** 31 - 1))
    cmd = [sys.executable, "-m", "annostream.cli"]
    ann = tmp_path / "ann"
    subprocess.run(cmd + ["prove", "--protocol", "dag", "--in", str(s), "--out", str(ann)],
                   env=env, check=True)
    res = subprocess.run(cmd + ["verify", "--protocol", "dag", "--in", str(s), "--ann", str(ann)],
                         env=env, capture_output=True, text=True)
    assert res.returncode == 0 and "outcome=value" in res.stdout
