"""Acceptance suite: every criterion runs at its stated tolerance and prints
one pass/fail line.  The whole pipeline runs twice with one seed; criteria
assert on the first run, the determinism criterion compares the two."""

import json

import pytest

from acceptance_pipeline import run_criteria

SEED = 20240809


@pytest.fixture(scope="module")
def runs():
    first = run_criteria(SEED)
    second = run_criteria(SEED)
    return first, second


def _report(name: str, ok: bool, detail: str):
    print(f"[{name}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{name}: {detail}"


def test_criterion_1_z2_fa_values(runs):
    (artifacts, timings), _ = runs
    doc = json.loads(artifacts["criterion_1"])
    ok = (
        doc["fa"][4] == 1
        and doc["fa"][8] == 4
        and doc["fa"] == doc["fa_brute_oracle"]
        and doc["witness_8"] == "a a b b a' a' b' b'"
        and not doc["gaps"]
        and timings["criterion_1"] < 120
    )
    _report(
        "criterion 1",
        ok,
        f"FA={doc['fa']} oracle match, witness '{doc['witness_8']}', "
        f"{timings['criterion_1']:.1f}s < 120s",
    )


def test_criterion_2_solver_equivalence(runs):
    (artifacts, timings), _ = runs
    doc = json.loads(artifacts["criterion_2"])
    ok = doc["discrepancies"] == 0 and doc["count"] >= 100 and timings["criterion_2"] < 600
    _report(
        "criterion 2",
        ok,
        f"{doc['count']} distinct cycles of length <= 8, ilp == brute everywhere, "
        f"{timings['criterion_2']:.1f}s < 600s",
    )


def test_criterion_3_surface_suite(runs):
    (artifacts, _), _ = runs
    doc = json.loads(artifacts["criterion_3"])
    ok = doc["chains"] >= 1000 and doc["failures"] == 0
    _report(
        "criterion 3",
        ok,
        f"{doc['chains']} randomized chains across 3 balls, verify+area+boundary 100% pass",
    )


def test_criterion_4_t_cycle_uniqueness(runs):
    (artifacts, _), _ = runs
    doc = json.loads(artifacts["criterion_4"])
    with_faces = [r for r in doc["instances"] if r["conj_faces"]]
    ok = len(doc["instances"]) >= 200 and doc["failures"] == 0 and len(with_faces) >= 150
    _report(
        "criterion 4",
        ok,
        f"{len(doc['instances'])} fillings, stable-letter faces partition into t-cycles, "
        "both boundaries closed",
    )


def test_criterion_5_transfer_bounds(runs):
    (artifacts, _), _ = runs
    doc = json.loads(artifacts["criterion_5"])
    consts = doc["constants"]
    identity_ok = (
        consts["z3"]["C"] == 1
        and consts["z3"]["C_prime"] == 1
        and consts["z3"]["C_double_prime"] == 0
        and consts["z3"]["M"] == 1
    )
    ok = doc["failures"] == 0 and identity_ok and len(doc["instances"]) >= 40
    _report(
        "criterion 5",
        ok,
        f"{len(doc['instances'])} transfer pairs within C/C'/C'' bounds; "
        f"identity constants C=C'=1, C''=0, M=1",
    )


def test_criterion_6_pushdown(runs):
    (artifacts, _), _ = runs
    doc = json.loads(artifacts["criterion_6"])
    we = doc["worked_example"]
    worked_ok = (
        we["initial_area"] == 5
        and we["steps"] == 1
        and we["final_area"] == 1
        and we["bound_report_overall"]
    )
    ok = len(doc["instances"]) >= 200 and doc["failures"] == 0 and worked_ok
    _report(
        "criterion 6",
        ok,
        f"{len(doc['instances'])} push-downs terminate in the kernel with audited bounds; "
        f"worked example 5 -> 1 in one step, f(8)={we['fa_h'][8]} from its FA table",
    )


def test_criterion_7_hyperbolic_plugin(runs):
    (artifacts, timings), _ = runs
    doc = json.loads(artifacts["criterion_7"])
    ok = (
        doc["composite_m1"] == doc["expected_ceilings"]
        and doc["degree_m1"] <= 2
        and doc["degree_m2"] == 3
        and doc["f_dominates_n"]
        and timings["criterion_7"] < 60
    )
    _report(
        "criterion 7",
        ok,
        f"composite(M=1) == n(log2 n + 1) ceilings on n <= 1024, degrees "
        f"d={doc['degree_m1']} (M=1) and d={doc['degree_m2']} (M=2), "
        f"{timings['criterion_7']:.1f}s",
    )


def test_criterion_8_presentation_independence(runs):
    (artifacts, _), _ = runs
    doc = json.loads(artifacts["criterion_8"])
    constants = [
        doc["f_forward_C"],
        doc["f_backward_C"],
        doc["g_forward_C"],
        doc["g_backward_C"],
    ]
    ok = doc["equivalent"] and all(c is not None and c <= 8 for c in constants)
    _report(
        "criterion 8",
        ok,
        f"two Z^2 presentations equivalent on n <= 8 with constants {constants} (all <= 8)",
    )


def test_criterion_9_determinism(runs):
    (first_art, _), (second_art, _) = runs
    same = first_art.keys() == second_art.keys() and all(
        first_art[k] == second_art[k] for k in first_art
    )
    _report(
        "criterion 9",
        same,
        f"two seeded runs of criteria 1-8 produced byte-identical JSON "
        f"({len(first_art)} artifacts)",
    )
