import json

import pytest

import vareffect as ve


FEATURES_CSV = """name,kind,values,legacy,legacy_value
VAR1,enum,0|1|2,,
VAR2,enum,0|1,,
VAR3,enum,0|1,,
"""

LISTING = """#if VAR1 > 0 && VAR2 != 0
int a;
#if VAR3 != 1
int b;
#endif
#endif
"""


def test_version():
    assert ve.__version__ == "0.1.0"


def test_parse_simplify_roundtrip():
    assert ve.parse_formula("A && (B || A)") == "A && (A || B)"
    assert ve.simplify_formula("A && (B || A)") == "A"
    assert ve.simplify_formula("A || !A") == "true"
    with pytest.raises(ve.VareffectError):
        ve.parse_formula("A &&")


def test_feature_effect_examples():
    assert ve.feature_effect("p", ["p"]) == "true"
    assert ve.feature_effect("p", ["A && p"]) == "A"
    assert ve.feature_effect("p", ["p && g", "p && !g"]) == "true"
    assert ve.feature_effect("p", []) == "false"


def test_sat_and_tautology():
    assert ve.is_satisfiable("A && !B")
    assert not ve.is_satisfiable("A && !A")
    assert ve.is_tautology("A || !A")
    assert not ve.is_tautology("A")
    assert ve.is_tautology("!(F=1 && F=2)", axioms=["!(F=1 && F=2)"])


def test_domain_axioms_and_translation():
    axioms = ve.domain_axioms(FEATURES_CSV)
    assert any("VAR1" in ax for ax in axioms)
    r = ve.translate_condition("VAR1 > 0", FEATURES_CSV)
    assert r["formula"] == "VAR1=1 || VAR1=2"
    assert r["degraded_nodes"] == 0
    assert r["unknown_features"] == []


def test_scan_blocks():
    tree = json.loads(ve.scan_blocks(LISTING, "listing.c"))
    assert tree["blocks"][0]["condition"] == "VAR1 > 0 && VAR2 != 0"


def test_analyze_and_aggregate(tmp_path):
    features = tmp_path / "features.csv"
    features.write_text(FEATURES_CSV)
    for product in ("p1", "p2"):
        src = tmp_path / product / "src"
        src.mkdir(parents=True)
        (src / "main.c").write_text(LISTING)
        (src / "other.c").write_text("#if VAR2 != 0\nint c;\n#endif\n")

    outs = []
    for product in ("p1", "p2"):
        out = tmp_path / "out" / product
        r = ve.analyze(
            products=[str(tmp_path / product)],
            features=str(features),
            out_dir=str(out),
        )
        assert r["exit_code"] == 0, r["stderr"]
        result = out / product / "result.json"
        assert result.exists()
        outs.append(str(result))

    agg = tmp_path / "agg"
    r = ve.aggregate(inputs=outs, out_dir=str(agg))
    assert r["exit_code"] == 0, r["stderr"]
    report = json.loads((agg / "aggregate.json").read_text())
    by_name = {f["feature"]: f for f in report["features"]}
    assert by_name["VAR2"]["category"] == "INDEPENDENT"
    assert by_name["VAR3"]["category"] == "DEPENDENT"
    assert by_name["VAR2"]["occurrence_count"] == 2


def test_aggregate_rejects_single_input(tmp_path):
    r = ve.aggregate(inputs=["only-one.json"], out_dir=str(tmp_path))
    assert r["exit_code"] == 2
