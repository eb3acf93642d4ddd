import json
import math
import os

from bellscope.catalog import render_cg_table, run_pipeline, verify_catalog
from bellscope.cli import main
from bellscope.data import bundled_inequality
from bellscope.scenario import Model, ParamTag, Scenario


def test_render_ch_matches_transcription():
    # the standard CH table: marginals (-1, 0) each, joints
    # [[1, 1], [1, -1]], bound 0
    text = render_cg_table(bundled_inequality("CH"))
    expected = "\n".join([
        "     ||  -1 |   0",
        "=====++==========",
        "  -1 ||   1 |   1",
        "-----++----------",
        "   0 ||   1 |  -1",
        "<= 0",
    ])
    assert text == expected


def test_render_s51_contains_table_rows():
    text = render_cg_table(bundled_inequality("S51_242"))
    rows = text.splitlines()
    assert rows[0].split("||")[1].split() == ["-1", "|", "-2", "|", "-2", "|", "-2"]
    assert rows[2].split("||")[1].split() == ["-3", "|", "3", "|", "2", "|", "2"]
    assert text.endswith("<= 0")


def test_render_fullcorr_terms():
    text = render_cg_table(bundled_inequality("I_CORR"))
    assert text.startswith("- <A1B1C1>")
    assert "<= 10" in text


def test_render_multipartite_terms():
    text = render_cg_table(bundled_inequality("I_GHZ"))
    assert "p(a2)" in text and text.endswith("<= 0")


def test_zero_functional_rendering():
    from bellscope.polytope import Inequality
    from bellscope.rational import QQ
    z = Inequality(Scenario(2, 2, 2), ParamTag.NO_SIGNALLING,
                   tuple(QQ(0) for _ in range(8)), QQ(1))
    assert render_cg_table(z).splitlines()[-1] == "<= 1"


def test_pipeline_catalog_round_trip(tmp_path):
    out = tmp_path / "cat.json"
    cat = run_pipeline(Scenario(2, 2, 2), Model.LOCAL, out_path=str(out))
    data = json.loads(out.read_text())
    assert data["meta"]["counts"]["classes"] == 4
    verify_catalog(data)   # raises on mismatch
    # byte-identical rewrite
    cat.write(str(out) + ".again")
    assert (tmp_path / "cat.json.again").read_text() == out.read_text()


def test_cli_stage_by_stage(tmp_path, capsys):
    v = tmp_path / "v.json"
    s = tmp_path / "s.json"
    f = tmp_path / "f.json"
    e = tmp_path / "e.json"
    c = tmp_path / "c.json"
    assert main(["vertices", "--scenario", "2,2,2", "--model", "local",
                 "--out", str(v)]) == 0
    assert main(["symmetrize", "--in", str(v), "--out", str(s)]) == 0
    assert main(["facets", "--in", str(s), "--out", str(f)]) == 0
    assert main(["extend", "--in", str(f), "--out", str(e)]) == 0
    assert main(["classify", "--in", str(e), "--out", str(c)]) == 0
    classes = json.loads(c.read_text())
    assert len(classes) == 4
    out = capsys.readouterr().out
    assert "10 extremal symmetric points" in out
    assert "14 facets" in out


def test_cli_check_valid_and_invalid(tmp_path, capsys):
    v = tmp_path / "v.json"
    main(["vertices", "--scenario", "2,2,2", "--out", str(v)])
    assert main(["check", "--ineq", "builtin:CH", "--vertices", str(v)]) == 0
    assert "facet: yes" in capsys.readouterr().out
    bad = tmp_path / "bad.json"
    ineq = bundled_inequality("CH")
    from dataclasses import replace
    from bellscope.rational import QQ
    flipped = replace(ineq, coeffs=tuple(-c for c in ineq.coeffs))
    bad.write_text(json.dumps(flipped.to_json()))
    assert main(["check", "--ineq", str(bad), "--vertices", str(v)]) == 2


def test_cli_budget_exhaustion_exit_code(tmp_path):
    v = tmp_path / "v.json"
    s = tmp_path / "s.json"
    f = tmp_path / "f.json"
    ck = tmp_path / "ck.json"
    main(["vertices", "--scenario", "3,2,2", "--out", str(v)])
    main(["symmetrize", "--in", str(v), "--out", str(s)])
    rc = main(["facets", "--in", str(s), "--out", str(f),
               "--budget", "0.000001", "--checkpoint", str(ck)])
    assert rc == 3
    assert ck.exists()
    # resume without budget completes
    assert main(["facets", "--in", str(s), "--out", str(f),
                 "--checkpoint", str(ck)]) == 0
    assert len(json.loads(f.read_text())) > 0


def test_cli_local_test_and_render(tmp_path, capsys):
    v = tmp_path / "v.json"
    p = tmp_path / "p.json"
    main(["vertices", "--scenario", "2,2,2", "--out", str(v)])
    from bellscope.scenario import uniform_distribution, convert
    u = convert(uniform_distribution(Scenario(2, 2, 2)), ParamTag.NO_SIGNALLING)
    p.write_text(json.dumps(u.to_json()))
    assert main(["local-test", "--point", str(p), "--vertices", str(v)]) == 0
    assert "inside" in capsys.readouterr().out
    assert main(["render", "--ineq", "builtin:S51_242"]) == 0


def test_cli_quantum_report(tmp_path, capsys):
    ang = tmp_path / "angles.json"
    phi1 = math.acos(0.25) - 2 * math.asin(0.25)
    phi2 = math.acos(0.25)
    phi3 = -2 * math.asin(0.25)
    ang.write_text(json.dumps([[0.0, phi2], [phi1, phi3], [0.0, phi2], [phi1, phi3]]))
    rc = main(["quantum", "--state", "w4", "--angles", str(ang),
               "--ineq", "builtin:I_W"])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["violation"] is True
    assert abs(report["margin"] - 1 / 16) < 1e-9


def test_cli_pipeline_with_verify(tmp_path, capsys):
    out = tmp_path / "cat.json"
    rc = main(["pipeline", "--scenario", "2,2,2", "--model", "local",
               "--out", str(out), "--verify"])
    assert rc == 0
    assert "verification passed" in capsys.readouterr().out


def test_pipeline_threads_flag_deterministic(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run_pipeline(Scenario(2, 2, 2), Model.LOCAL, out_path=str(a), threads=1)
    run_pipeline(Scenario(2, 2, 2), Model.LOCAL, out_path=str(b), threads=4)
    da = json.loads(a.read_text())
    db = json.loads(b.read_text())
    da["meta"]["options"].pop("threads")
    db["meta"]["options"].pop("threads")
    da["meta"].pop("elapsed_secs")
    db["meta"].pop("elapsed_secs")
    assert da == db
