"""Golden CLI corpus: corpus/<name>/{input.json, expected.json}.

input.json is {"argv": [...], "input": doc or null, "input2": doc or null};
the documents are written to temporary files and passed as --input /
--input2.  expected.json is {"exit": code, "output": doc or null}.

Regenerate with ``python tests/golden.py`` after a deliberate format change.
"""
import contextlib
import io
import json
import math
import os
import sys
import tempfile

from mtphi.cli import run

ROOT = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "corpus")

CETA = {
    "field": {"p": 5, "precision": 10, "eisenstein": [], "branch": "0/1"},
    "dims": {"0": 1, "1": 1, "2": 1},
    "eta": [["1", "0", "0"], ["3/2", "1", "0"], ["7", "10", "1"]],
}

RAMIFIED_CETA = {
    "field": {"p": 3, "precision": 8, "eisenstein": ["3", "0", "1"], "branch": "0/1"},
    "dims": {"-1": 1, "1": 1},
    "eta": [["1", "0"], [{"pi_coeffs": [{"val": 0, "digits": [2]}, {"val": 0, "digits": [1]}]}, "1"]],
}

NOT_MIXED_TATE = {
    "field": {"p": 5, "precision": 10, "eisenstein": [], "branch": "0/1"},
    "dim": 2,
    "phi": [["1", "0"], ["0", "1/5"]],
    "monodromy": [["0", "0"], ["0", "0"]],
    "filtration": [{"step": 0, "basis": [["1", "0"], ["0", "1"]]}],
}

BAD_RELATION = dict(NOT_MIXED_TATE, phi=[["1", "0"], ["0", "1"]], monodromy=[["0", "0"], ["1", "0"]])

TWO_DIM_MTHS = {
    "dim": 2,
    "weights": [{"step": -2, "basis": [[1, 0]]}, {"step": 0, "basis": [[1, 0], [0, 1]]}],
    "hodge": [{"step": -1, "basis": [[1, 0], [0, 1]]}, {"step": 0, "basis": [[[0.3, 0.7], 1]]}],
}


def cases():
    """(name, argv, input, input2); an input may name an earlier case to reuse its output."""
    return [
        ("kummer_p", ["kummer", "--q", "5/1", "--p", "5", "--precision", "20", "--branch", "0/1"], None, None),
        ("kummer_p_eta_st", ["eta-st"], "@kummer_p", None),
        ("kummer_unit", ["kummer", "--q", "6/1", "--p", "5", "--precision", "6"], None, None),
        ("kummer_unit_eta", ["eta"], "@kummer_unit", None),
        ("kummer_unit_eta_deligne", ["eta", "--deligne"], "@kummer_unit", None),
        ("kummer_unit_crystalline", ["crystalline"], "@kummer_unit", None),
        ("kummer_p_crystalline", ["crystalline"], "@kummer_p", None),
        ("kummer_check", ["check"], "@kummer_p", None),
        ("kummer_psi", ["psi"], "@kummer_unit", None),
        ("ext_build_zero", ["ext-build", "--a", "0/1", "--n", "2", "--p", "5", "--precision", "10"], None, None),
        ("ext_class_zero", ["ext-class", "--n", "2"], "@ext_build_zero", None),
        ("ext_build_a", ["ext-build", "--a", "7/3", "--n", "2", "--p", "5", "--precision", "10"], None, None),
        ("ext_build_b", ["ext-build", "--a", "1/25", "--n", "2", "--p", "5", "--precision", "10"], None, None),
        ("baer_sum", ["baer-sum", "--n", "2"], "@ext_build_a", "@ext_build_b"),
        ("baer_sum_class", ["ext-class", "--n", "2"], "@baer_sum", None),
        ("phi_inv", ["phi-inv"], CETA, None),
        ("psi_of_phi_inv", ["psi"], "@phi_inv", None),
        ("reconstruct_eta", ["reconstruct-eta"], CETA, None),
        ("reconstruct_eta_ramified", ["reconstruct-eta"], RAMIFIED_CETA, None),
        ("lie_dims_d1", ["lie-dims", "--d", "1", "--cutoff", "4"], None, None),
        ("lie_dims_d2", ["lie-dims", "--d", "2", "--cutoff", "5"], None, None),
        ("lie_dims_too_big", ["lie-dims", "--d", "1", "--cutoff", "13"], None, None),
        ("arch_d_two_dim", ["arch-d", "--epsilon"], TWO_DIM_MTHS, None),
        ("arch_polylog_bd", ["arch-polylog", "--k", "1", "--z", "0.5", "--bd", "--include-top"], None, None),
        ("arch_polylog_li2", ["arch-polylog", "--k", "2", "--z", "0.3+0.2j", "--bd"], None, None),
        ("arch_polylog_outside", ["arch-polylog", "--k", "2", "--z", "0.99"], None, None),
        ("eta_not_mixed_tate", ["eta"], NOT_MIXED_TATE, None),
        ("check_bad_relation", ["check"], BAD_RELATION, None),
        ("ext_build_low_precision", ["ext-build", "--a", "1/25", "--n", "2", "--p", "5", "--precision", "2"], None, None),
        ("eta_precision_exhausted", ["eta"], "@ext_build_low_precision", None),
        ("corpus_small", ["corpus", "--seed", "0", "--count", "3", "--precision", "8"], None, None),
    ]


def invoke(argv, input_doc=None, input2_doc=None):
    """Run the CLI in-process; returns (exit code, parsed stdout or None)."""
    with tempfile.TemporaryDirectory() as tmp:
        extra = []
        for flag, doc in (("--input", input_doc), ("--input2", input2_doc)):
            if doc is not None:
                path = os.path.join(tmp, flag.strip("-") + ".json")
                with open(path, "w", encoding="utf-8") as fh:
                    json.dump(doc, fh)
                extra += [flag, path]
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = run(argv[:1] + extra + argv[1:])
    text = out.getvalue()
    return code, (json.loads(text) if text.strip() else None)


def resolve(ref, outputs):
    if isinstance(ref, str) and ref.startswith("@"):
        return outputs[ref[1:]]
    return ref


def load(name):
    with open(os.path.join(ROOT, name, "input.json"), encoding="utf-8") as fh:
        inp = json.load(fh)
    with open(os.path.join(ROOT, name, "expected.json"), encoding="utf-8") as fh:
        exp = json.load(fh)
    return inp, exp


def close(a, b, tol=1e-12) -> bool:
    """Structural equality with a float tolerance."""
    if isinstance(a, float) or isinstance(b, float):
        if not isinstance(a, (int, float)) or not isinstance(b, (int, float)):
            return False
        return math.isclose(a, b, rel_tol=tol, abs_tol=tol)
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(close(a[k], b[k], tol) for k in a)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(close(x, y, tol) for x, y in zip(a, b))
    return a == b


def regenerate():
    outputs = {}
    for name, argv, inp, inp2 in cases():
        doc, doc2 = resolve(inp, outputs), resolve(inp2, outputs)
        code, out = invoke(argv, doc, doc2)
        outputs[name] = out
        d = os.path.join(ROOT, name)
        os.makedirs(d, exist_ok=True)
        with open(os.path.join(d, "input.json"), "w", encoding="utf-8") as fh:
            json.dump({"argv": argv, "input": doc, "input2": doc2}, fh, indent=2)
            fh.write("\n")
        with open(os.path.join(d, "expected.json"), "w", encoding="utf-8") as fh:
            json.dump({"exit": code, "output": out}, fh, indent=2)
            fh.write("\n")
        print(f"{name}: exit {code}")


if __name__ == "__main__":
    sys.path.insert(0, os.path.dirname(__file__))
    regenerate()
