import json
from pathlib import Path

from latfree.cli import main, run

DATA = Path(__file__).parent / "data"


def code(*argv):
    return run(list(argv))[0]


def test_documented_examples():
    assert code("lat", "eq", "(wedge x (vee x y))", "x") == 0
    assert code("check", "--theory", "VLA1P", "--algebra", str(DATA / "m2_entrywise.alg")) == 0
    assert code("free", "--base", "lat", "--preset", "M3", "--target", "vl", "prove", "(gen a)", "(gen bot)") == 0


def test_negative_answers_exit_one():
    assert code("lat", "eq", "(wedge x (vee y z))", "(vee (wedge x y) (wedge x z))") == 1
    assert code("check", "--preset", "m2", "--f-algebra") == 1
    assert code("check", "--theory", "DLAT", "--algebra", str(DATA / "n5.alg")) == 1
    assert code("free", "--base", "lat", "--preset", "B4", "--target", "vl", "prove", "(gen a)", "(gen b)") == 1


def test_usage_and_data_errors():
    assert code("bogus") == 64
    assert code("lat", "eq", "x") == 64
    assert code("check", "--nope") == 64
    assert code("check", "--algebra", str(DATA / "missing.alg")) == 66
    assert code("lat", "eq", "(wedge x", "x") == 65
    assert code("fvl", "eq", "--expr", "x1") == 64


def test_check_report_mentions_mode():
    status, text = run(["check", "--theory", "DLAT", "--algebra", str(DATA / "n5.alg")])
    assert "exhaustive" in text and "FAIL" in text
    status, text = run(["check", "--theory", "VL", "--preset", "Q2", "--samples", "50"])
    assert status == 0 and "sampled" in text and "probe set" in text


def test_custom_identities():
    status, text = run(["check", "--identities", str(DATA / "distributivity.idents"), "--algebra", str(DATA / "n5.alg")])
    assert status == 1


def test_sat_with_premise():
    status, _ = run(["sat", "--preset", "M3", "--identity", "(vee v1 v2) = (vee v2 v1)"])
    assert status == 0
    status, _ = run(["sat", "--preset", "N5", "--premise", "(wedge v1 v2) = v1", "--identity", "(vee v1 v2) = v2"])
    assert status == 0


def test_lat_collapse_and_embed():
    status, text = run(["lat", "collapse", "--preset", "M3"])
    assert status == 0 and "j(a) = j(bot)" in text
    status, text = run(["lat", "embed", "--preset", "B4"])
    assert status == 0
    assert code("lat", "embed", "--preset", "N5") == 1


def test_dlat():
    status, text = run(["dlat", "nf", "(wedge x (vee y z))"])
    assert status == 0 and "{{x,y},{x,z}}" in text
    assert code("dlat", "eq", "(wedge x (vee y z))", "(vee (wedge x y) (wedge x z))") == 0


def test_fvl_commands():
    assert code("fvl", "eq", str(DATA / "forms.txt")) == 0
    status, text = run(["fvl", "leq", "--expr", "(vee x1 x2)", "--expr", "x1"])
    assert status == 1 and "witness point (0, 1)" in text
    status, text = run(["fvl", "rho", "--expr", "x1", "--n", "2", "--points", str(DATA / "points.txt")])
    assert status == 0 and "rho lower bound 1" in text
    status, text = run(["fvl", "kernel", "--expr", "x2", "--expr", "(scale 2 x2)", "--expr", "x1", "--n", "2",
                        "--points", str(DATA / "points.txt")])
    assert status == 0


def test_free_relations_and_json():
    status, text = run(["free", "--base", "lat", "--preset", "M3", "--target", "vl", "relations"])
    assert status == 0 and "50" in text
    status, text = run(
        ["free", "--base", "set", "--gens", "a,b", "--target", "VLA1", "prove", "(dot a b)", "(dot b a)", "--json"]
    )
    data = json.loads(text)
    assert status == 1 and data["status"] == "SEPARATED"
    assert data["witness"]["model"].startswith("M2")


def test_free_lattice_file():
    assert code("free", "--base", "lat", "--lattice", str(DATA / "m3.poset"), "--target", "vl", "prove", "a", "bot") == 0


def test_quotient():
    status, text = run(["quotient", "--preset", "N5", "--pair", "0,1", "--json"])
    data = json.loads(text)
    assert status == 0 and data["size"] < 5


def test_saturate():
    lat = ["saturate", "--theory", "LAT", "--gens", "x,y", "--height", "1"]
    assert code(*lat, "--query", "(wedge x (vee x y)) = x") == 0
    assert code(*lat, "--query", "(vee x y) = x") == 2
    assert code(*lat, "--pair", "(vee x y) = x", "--query", "(vee x y) = x") == 0
    sig = DATA / "binary.sig"
    bare = ["saturate", "--signature", str(sig), "--gens", "x,y", "--height", "1"]
    assert code(*bare, "--pair", "x = y", "--query", "(f x x) = (f y x)") == 0
    assert code(*bare, "--pair", "x = (f x x)", "--query", "(f x x) = (f x (f x x))") == 0
    assert code(*bare, "--pair", "x = (f x x)", "--query", "(f x x) = (f y y)") == 2
    assert code("saturate", "--gens", "x") == 64


def test_seed_determinism():
    args = ["check", "--theory", "VLA1P", "--preset", "m3", "--samples", "30", "--seed", "5"]
    assert run(args) == run(args)


def test_main_prints(capsys):
    assert main(["lat", "eq", "x", "x"]) == 0
    assert "TRUE" in capsys.readouterr().out
