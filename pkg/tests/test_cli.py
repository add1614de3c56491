"""End-to-end command-line behavior, exit codes, and output formats."""

import json

import pytest

from laurentgerms.cli import main
from laurentgerms.exprio import deserialize
from laurentgerms.germs import germ_equal


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured


def run_json(capsys, *argv):
    code, captured = run(capsys, *argv)
    assert code == 0, captured.err
    return json.loads(captured.out)


def write_json(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


# ---------------------------------------------------------------------------
# verification and decomposition

def test_verify_reports_exact_equality(capsys):
    got = run_json(capsys, "verify", "1/(x1*x2)",
                   "1/(x1*(x1+x2)) + 1/(x2*(x1+x2))")
    assert got == {"kind": "verify", "dim": 2, "equal": True}
    got = run_json(capsys, "verify", "1/(x1*x2)", "1/(x1*(x1+x2))")
    assert got["equal"] is False


def test_decompose_splits_polar_and_polynomial_parts(capsys):
    got = run_json(capsys, "decompose", "(x1+x2^2)/x1")
    assert got["kind"] == "germ-sum"
    assert got["poly"] == "1"
    assert got["polar"] == [{"numerator": "eps2^2",
                             "factors": [{"form": ["1", "0"], "power": 1}]}]


def test_laurent_expansion_known_coefficients(capsys, tmp_path):
    def summarize(payload):
        return {(tuple(tuple(f["form"]) for f in t["factors"]),
                 t["numerator"]) for t in payload["terms"]}

    got = run_json(capsys, "laurent", "(x1+2*x2)/(x1*(x1+x2)*x2)")
    assert got["kind"] == "expansion" and got["poly"] == "0"
    assert summarize(got) == {
        ((("1", "0"), ("1", "1")), "2"),
        ((("0", "1"), ("1", "1")), "1"),
    }
    support = write_json(tmp_path, "fam.json",
                         [[[1, 0], [1, 1]], [[0, 1], [1, 1]]])
    same = run_json(capsys, "laurent", "(x1+2*x2)/(x1*(x1+x2)*x2)",
                    "--support", support)
    assert same == got


def test_projections(capsys):
    plus = run_json(capsys, "project-plus", "(1+x1)/x1")
    assert plus == {"kind": "polynomial", "dim": 2, "poly": "1"}
    minus = run_json(capsys, "project-minus", "(1+x1)/x1")
    assert minus["polar"] == [{"numerator": "1",
                               "factors": [{"form": ["1", "0"], "power": 1}]}]


def test_grade_orders_components_by_span_and_order(capsys):
    got = run_json(capsys, "grade", "1/(x1*x2) + 1/x1")
    assert got["kind"] == "graded-split"
    assert [(c["span"], c["p_order"]) for c in got["components"]] == [
        ([["1", "0"]], 1),
        ([["1", "0"], ["0", "1"]], 2),
    ]


def test_jk_residue_command(capsys, tmp_path):
    got = run_json(capsys, "jk", "1/(x1*x2)")
    assert len(got["polar"]) == 1
    axis = write_json(tmp_path, "axis.json", [["1", "0"]])
    kept = run_json(capsys, "jk", "1/x1", "--subspace", axis)
    assert len(kept["polar"]) == 1
    dropped = run_json(capsys, "jk", "1/x1^2", "--subspace", axis)
    assert dropped["polar"] == [] and dropped["poly"] == "0"


def test_brion_vergne_command(capsys, tmp_path):
    arr = write_json(tmp_path, "arr.json", [[1, 0], [0, 1], [1, 1]])
    got = run_json(capsys, "brion-vergne", "1/(x1*x2) + 1/x1^2",
                   "--arrangement", arr)
    assert got["kind"] == "brion-vergne"
    assert len(got["generating"]["polar"]) == 1
    assert len(got["rest"]["polar"]) == 1
    assert got["rest"]["polar"][0]["factors"][0]["power"] == 2


def test_p_order_and_p_res_commands(capsys):
    assert run_json(capsys, "p-order", "1/(x1*x2)") == {
        "kind": "p-order", "dim": 2, "p_order": 2}
    got = run_json(capsys, "p-res", "(1+x2)/x1^2")
    assert got["polar"] == [{"numerator": "1",
                             "factors": [{"form": ["1", "0"], "power": 2}]}]


def test_coproduct_command(capsys):
    got = run_json(capsys, "coproduct", "x1+x2")
    assert got == {"kind": "coproduct", "dim": 2,
                   "terms": [{"left": "eps2 + eps1", "right": None}]}


# ---------------------------------------------------------------------------
# cone subcommands

def test_cone_refine_reports_pieces_per_input(capsys, tmp_path):
    family = write_json(tmp_path, "family.json",
                        [[[1, 0], [0, 1]], [[1, 0], [1, 1]]])
    got = run_json(capsys, "cone", "refine", family)
    assert got["kind"] == "refinement"
    assert len(got["pieces"]) == 2
    assert got["index_sets"] == [[0, 1], [1]]


def test_cone_check_finds_witnesses(capsys, tmp_path):
    good = write_json(tmp_path, "good.json",
                      [[[1, 0], [1, 1]], [[0, 1], [1, 1]]])
    got = run_json(capsys, "cone", "check", good)
    assert got == {"kind": "positioning-check",
                   "properly_positioned": True, "witness": None}

    overlap = write_json(tmp_path, "overlap.json",
                         [[[1, 0], [0, 1]], [[1, 0], [1, 1]]])
    got = run_json(capsys, "cone", "check", overlap)
    assert got["properly_positioned"] is False
    assert got["witness"] == {"pair": [0, 1],
                              "reason": "intersection is not a common face"}

    line = write_json(tmp_path, "line.json", [[[1, 0]], [[-1, 0]]])
    got = run_json(capsys, "cone", "check", line)
    assert got["witness"]["reason"] == "union contains a line"


# ---------------------------------------------------------------------------
# exponential sums

def test_exp_sum_smooth_report(capsys, tmp_path):
    cone = write_json(tmp_path, "cone.json", [[1, 0], [1, 1]])
    got = run_json(capsys, "exp-sum", "--cone", cone)
    assert got["smooth"] is True
    assert got["p_order"] == 2
    assert got["truncation"] == 8
    want = [{"numerator": "1", "factors": [{"form": ["1", "0"], "power": 1},
                                           {"form": ["1", "1"], "power": 1}]}]
    assert got["p_res"]["polar"] == want
    assert got["exp_integral"]["polar"] == want
    check = got["numeric_check"]
    assert check["point"] == ["-1", "0"] and check["height"] == 40
    assert check["residual"] < 1e-6

    shallow = run_json(capsys, "--trunc", "4", "exp-sum", "--cone", cone)
    assert shallow["truncation"] == 4
    assert shallow["p_res"] == got["p_res"]


def test_exp_sum_non_smooth_report(capsys, tmp_path):
    cone = write_json(tmp_path, "cone.json", [[1, 0], [1, 2]])
    got = run_json(capsys, "exp-sum", "--cone", cone)
    assert got["smooth"] is False
    assert got["p_order"] == 2
    assert got["truncation"] is None and got["numeric_check"] is None
    pres = deserialize(got["p_res"])
    integral = deserialize(got["exp_integral"])
    assert germ_equal(pres, integral)


def test_exp_sum_with_explicit_lattice(capsys, tmp_path):
    cone = write_json(tmp_path, "cone.json", [[2, 0], [0, 1]])
    lattice = write_json(tmp_path, "lattice.json", [[2, 0], [0, 1]])
    got = run_json(capsys, "exp-sum", "--cone", cone, "--lattice", lattice)
    assert got["generators"] == [["0", "1"], ["2", "0"]]
    assert got["smooth"] is True


# ---------------------------------------------------------------------------
# global flags

def test_gram_flag_changes_the_inner_product_but_not_invariants(capsys,
                                                                tmp_path):
    gram = write_json(tmp_path, "gram.json", [[2, 1], [1, 1]])
    standard = run_json(capsys, "p-order", "1/(x1*(x1+x2))")
    skewed = run_json(capsys, "--gram", gram, "p-order", "1/(x1*(x1+x2))")
    assert standard == skewed


def test_dim_flag_controls_the_variable_range(capsys):
    got = run_json(capsys, "--dim", "3", "p-order", "1/(x1*x2*x3)")
    assert got == {"kind": "p-order", "dim": 3, "p_order": 3}
    code, _ = run(capsys, "--dim", "2", "p-order", "1/(x1*x2*x3)")
    assert code == 2


def test_output_is_deterministic(capsys, tmp_path):
    family = write_json(tmp_path, "family.json",
                        [[[1, 0], [0, 1]], [[1, 0], [1, 1]]])
    first = run(capsys, "cone", "refine", family)
    second = run(capsys, "cone", "refine", family)
    assert first == second


# ---------------------------------------------------------------------------
# exit codes

def test_exit_code_2_for_parse_and_format_errors(capsys, tmp_path):
    for argv in (
        ["verify", "x1++", "x1"],
        ["decompose", "x5"],
        ["p-order", "1/(x1", ],
        ["jk", "1/x1", "--subspace", str(tmp_path / "absent.json")],
    ):
        code, captured = run(capsys, *argv)
        assert code == 2, argv
        assert captured.err.startswith("error:")
    bad_rows = write_json(tmp_path, "bad.json", [[1, 0], [1]])
    code, _ = run(capsys, "cone", "refine", bad_rows)
    assert code == 2


def test_exit_code_3_for_mathematical_errors(capsys, tmp_path):
    cases = [
        ["decompose", "1/(x1*x2+1)"],
        ["decompose", "1/(x1-x1)"],
        ["exp-sum", "--cone", write_json(tmp_path, "dep.json",
                                         [[1, 0], [2, 0]])],
        ["laurent", "1/(x1*x2)", "--support",
         write_json(tmp_path, "overlap.json",
                    [[[1, 0], [0, 1]], [[1, 0], [1, 1]]])],
    ]
    for argv in cases:
        code, captured = run(capsys, *argv)
        assert code == 3, argv
        assert captured.err.startswith("error:")
    bad_gram = write_json(tmp_path, "gram.json", [[1, 2], [2, 1]])
    code, _ = run(capsys, "--gram", bad_gram, "decompose", "1/x1")
    assert code == 3


def test_exit_code_4_when_the_dimension_cap_is_hit(capsys, tmp_path):
    rays = [[1 if j == i else 0 for j in range(7)] for i in range(7)]
    family = write_json(tmp_path, "big.json", [rays])
    code, captured = run(capsys, "--dim", "7", "cone", "refine", family)
    assert code == 4
    assert captured.err.startswith("error:")
    code, _ = run(capsys, "--dim", "7", "--dim-cap", "7",
                  "cone", "refine", family)
    assert code == 0
