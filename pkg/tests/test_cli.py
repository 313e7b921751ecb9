import json

import pytest

from cusparr.arrange import build_char2, dual_points, read_arrangement
from cusparr.cli import build_parser, main
from cusparr.gf import field_new
from cusparr.projplane import write_points
from cusparr.triples import read_triple_system


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path, capsys):
    paths = {}
    for name, argv in {
        "L9": ["build", "--construction", "char3", "--p", "3", "--n", "2"],
        "L27": ["build", "--construction", "char3", "--p", "3", "--n", "3"],
        "C7": ["build", "--construction", "char2", "--p", "2", "--n", "3"],
        "G7": ["build", "--construction", "generic", "--p", "7"],
        "ceva": ["build", "--construction", "ceva", "--p", "7"],
    }.items():
        path = tmp_path / f"{name}.txt"
        assert run(capsys, *argv, "-o", path)[0] == 0
        paths[name] = path
    return paths


def test_build_sizes(files):
    assert len(read_arrangement(files["L9"])) == 9
    assert len(read_arrangement(files["C7"])) == 7
    assert len(read_arrangement(files["G7"])) == 7


def test_build_to_stdout(capsys):
    code, out, _ = run(capsys, "build", "--construction", "char3", "--p", "3")
    assert code == 0
    assert out.splitlines() == ["field p=3 n=1 modulus=0,1", "0 0:1:0", "1 1:1:1", "2 1:2:1"]


def test_build_mismatch_exit_2(capsys):
    code, _, err = run(capsys, "build", "--construction", "char3", "--p", "5")
    assert code == 2 and err.startswith("error:")
    assert run(capsys, "build", "--construction", "char2", "--p", "2", "--n", "1")[0] == 2
    assert run(capsys, "build", "--construction", "char3", "--p", "3", "--n", "2", "--modulus", "1,1,1")[0] == 2


def test_audit(files, capsys):
    code, out, _ = run(capsys, "audit", files["L27"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "lines=27" and "construction=char3" in lines
    assert "t[3]=117" in lines and "t[2]=0" in lines


def test_audit_generic_flags_mismatch(files, capsys):
    code, out, _ = run(capsys, "audit", files["G7"])
    assert code == 0
    assert "t[2]=6" in out and "t[3]=5" in out
    assert "q(q-3)/6" in out
    code, out, _ = run(capsys, "audit", "--json", files["G7"])
    data = json.loads(out)
    assert data["t[2]"] == 6 and data["t[3]"] == 5 and data["mismatches"] == 2


def test_audit_bad_multiplicity_exit_3(tmp_path, capsys):
    path = tmp_path / "pencil.txt"
    path.write_text("field p=3 n=1 modulus=0,1\n0 1:0:0\n1 1:1:0\n2 1:2:0\n3 0:1:0\n")
    code, out, _ = run(capsys, "audit", path)
    assert code == 3 and "t[4]=1" in out


def test_audit_points_listing(files, capsys):
    code, out, _ = run(capsys, "audit", "--points", files["L9"])
    assert code == 0
    assert sum(1 for line in out.splitlines() if " -> {" in line) == 12


def test_format_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("field p=3 n=1 modulus=0,1\n0 1:0\n")
    code, _, err = run(capsys, "audit", bad)
    assert code == 2 and ":2:" in err
    assert run(capsys, "audit", tmp_path / "missing.txt")[0] == 2


def test_unknown_flag_is_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["audit", "x.txt", "--frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_configuration(files, capsys):
    assert run(capsys, "configuration", files["L9"], "--r", "4")[0] == 0
    code, out, _ = run(capsys, "configuration", files["G7"], "--r", "2")
    assert code == 1 and out.startswith("configuration=violated")


def test_cubic_fit_c15(tmp_path, capsys):
    F16 = field_new(2, 4)
    path = tmp_path / "c15-points.txt"
    write_points(path, F16, dual_points(build_char2(F16)))
    code, out, _ = run(capsys, "cubic-fit", path)
    assert code == 0
    assert "dim=1" in out.splitlines()
    assert "class[0]=cusp singular=0:0:1" in out.splitlines()
    data = json.loads(run(capsys, "cubic-fit", "--json", path)[1])
    assert data["dim"] == 1 and data["class[0]"] == "cusp" and data["singular[0]"] == "0:0:1"


def test_dual_points_command(files, tmp_path, capsys):
    out = tmp_path / "pts.txt"
    assert run(capsys, "dual-points", files["C7"], "-o", out)[0] == 0
    assert len(out.read_text().splitlines()) == 8


def test_matroid_pipeline(files, tmp_path, capsys):
    m9, ceva = tmp_path / "m9.ts", tmp_path / "ceva9.ts"
    assert run(capsys, "matroid", "extract", files["L9"], "-o", m9)[0] == 0
    assert run(capsys, "matroid", "extract", files["ceva"], "-o", ceva)[0] == 0
    code, out, _ = run(capsys, "matroid", "iso", ceva, m9)
    assert code == 0 and out.startswith("isomorphic=yes")
    assert len(out.splitlines()) == 10
    code, out, _ = run(capsys, "matroid", "aut", m9)
    assert code == 0 and "order=432" in out
    assert run(capsys, "matroid", "steiner", m9)[0] == 0
    g7 = tmp_path / "g7.ts"
    run(capsys, "matroid", "extract", files["G7"], "-o", g7)
    assert run(capsys, "matroid", "steiner", g7)[0] == 1
    code, out, _ = run(capsys, "matroid", "iso", m9, g7)
    assert code == 1 and out.strip() == "isomorphic=no"


def test_matroid_make_and_restrict(tmp_path, capsys):
    n8, fano = tmp_path / "n8.ts", tmp_path / "fano.ts"
    assert run(capsys, "matroid", "make", "--kind", "N", "--p", "2", "--n", "3", "-o", n8)[0] == 0
    assert run(capsys, "matroid", "make", "--kind", "projection", "--n", "3", "-o", fano)[0] == 0
    assert run(capsys, "matroid", "iso", n8, fano)[0] == 0
    m27, sub = tmp_path / "m27.ts", tmp_path / "sub.ts"
    run(capsys, "matroid", "make", "--kind", "M", "--p", "3", "--n", "3", "-o", m27)
    assert run(capsys, "matroid", "restrict", m27, "--span", "3", "3", "1,3", "-o", sub)[0] == 0
    ts = read_triple_system(sub)
    assert len(ts.ground) == 9 and len(ts) == 12
    assert run(capsys, "matroid", "restrict", m27, "--labels", "0,1,2", "-o", sub)[0] == 0
    assert len(read_triple_system(sub)) == 1
    assert run(capsys, "matroid", "restrict", m27)[0] == 2


def test_realize_command(tmp_path, capsys):
    fano = tmp_path / "fano.ts"
    run(capsys, "matroid", "make", "--kind", "projection", "--n", "3", "-o", fano)
    code, out, _ = run(capsys, "realize", fano, "--field", "2", "1")
    assert code == 0 and out.startswith("status=realizable")
    code, out, _ = run(capsys, "realize", fano, "--field", "3", "1")
    assert code == 1 and out.startswith("status=unrealizable")
    data = json.loads(run(capsys, "realize", "--json", fano, "--field", "2", "1")[1])
    assert data["status"] == "realizable" and data["witnesses"] == 1
    assert data["point[1]"] == "1:0:0"


def test_realize_scope_gate(tmp_path, capsys):
    fano = tmp_path / "fano.ts"
    run(capsys, "matroid", "make", "--kind", "projection", "--n", "3", "-o", fano)
    code, _, err = run(capsys, "realize", fano, "--field", "2", "5")
    assert code == 2 and "--best-effort" in err
    code, out, _ = run(capsys, "realize", fano, "--field", "2", "5", "--best-effort")
    assert code == 0 and out.startswith("status=realizable")


def test_realize_unknown_when_out_of_scope(tmp_path, capsys):
    fano = tmp_path / "fano.ts"
    run(capsys, "matroid", "make", "--kind", "projection", "--n", "3", "-o", fano)
    code, out, _ = run(capsys, "realize", fano, "--field", "7", "2", "--best-effort")
    assert code == 1 and out.startswith("status=unknown")


def test_export_ideal(tmp_path, capsys):
    m27, ideal = tmp_path / "m27.ts", tmp_path / "m27.ideal"
    run(capsys, "matroid", "make", "--kind", "M", "--p", "3", "--n", "3", "-o", m27)
    code, out, _ = run(capsys, "export-ideal", m27, "--normalize", "-o", ideal)
    assert code == 0
    assert out.splitlines() == ["variables=69", "vanishing=117", "nonvanishing=2804"]
    text = ideal.read_text().splitlines()
    assert text[0].startswith("ring vars=")
    i, j = text.index("== vanishing =="), text.index("== nonvanishing ==")
    assert j - i - 1 == 117


def test_byte_identical_reruns(tmp_path, capsys):
    outs = []
    for k in range(2):
        a, ts, ideal = tmp_path / f"a{k}.txt", tmp_path / f"t{k}.ts", tmp_path / f"i{k}.txt"
        run(capsys, "build", "--construction", "char3", "--p", "3", "--n", "3", "-o", a)
        run(capsys, "matroid", "extract", a, "-o", ts)
        run(capsys, "export-ideal", ts, "-o", ideal)
        outs.append((a.read_bytes(), ts.read_bytes(), ideal.read_bytes()))
        outs.append(run(capsys, "realize", ts, "--field", "3", "3")[1])
    assert outs[0] == outs[2] and outs[1] == outs[3]


def _subcommand_paths():
    parser = build_parser()
    paths = []

    def walk(p, prefix):
        for action in p._actions:
            if action.__class__.__name__ == "_SubParsersAction":
                for name, sub in action.choices.items():
                    paths.append(prefix + [name])
                    walk(sub, prefix + [name])

    walk(parser, [])
    return paths


@pytest.mark.parametrize("path", _subcommand_paths(), ids=lambda p: " ".join(p))
def test_help_documents_formats_and_exit_codes(path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(path + ["--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "--json" in out
    assert "file formats:" in out
    if path[-1] in {"audit", "configuration", "iso", "steiner", "realize", "build"}:
        assert "exit" in out


def test_top_level_help(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    assert "exit codes" in out
