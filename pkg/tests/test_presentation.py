import pytest

from loomfold.cartan import Gcm, canonical_matrix
from loomfold.errors import ScopeViolation
from loomfold.folding import validate_aut
from loomfold.polys import LPoly, SerreFamily, family_p, family_qlimit
from loomfold.presentation import (
    Verifier,
    serialize_elem,
    suite_window,
)
from loomfold.realize import Realization


def _setup(label, perm, mode_bound=2, fam_builder=family_p):
    g = Gcm(canonical_matrix(label))
    mu = validate_aut(g, perm)
    fam = fam_builder(g, mu)
    m1, m2 = suite_window(g, mu, fam, mode_bound)
    real = Realization(g, mu, m1_window=m1, m2_window=m2)
    return real, fam


def test_cartan_relations_trivial_mu():
    real, _ = _setup("A2", [0, 1])
    rep = Verifier(real).verify_cartan_relations(2)
    assert rep.passed
    kinds = {c.kind for c in rep.checks}
    assert {"H", "HXplus", "HXminus", "XX", "Xperiod"} <= kinds


def test_cartan_relations_twisted():
    real, _ = _setup("A2", [1, 0])
    assert Verifier(real).verify_cartan_relations(3).passed


def test_locality_orthogonal_pair():
    real, _ = _setup("A3", [0, 1, 2])
    # orthogonal nodes: the weight is 1, so the commutator itself vanishes
    rep = Verifier(real).verify_locality(0, 2, 2)
    assert rep.passed
    assert all(c.checked == 25 for c in rep.checks)


def test_locality_diagonal():
    real, _ = _setup("A2", [1, 0])
    assert Verifier(real).verify_locality(0, 0, 2).passed


def test_locality_special_type():
    real, _ = _setup("A1^(1)", [1, 0])
    v = Verifier(real)
    for i in range(2):
        for j in range(2):
            assert v.verify_locality(i, j, 2).passed, (i, j)


def test_serre_family_p_usual():
    real, fam = _setup("A2", [0, 1])
    rep = Verifier(real).verify_serre(fam, 0, 1, 2)
    assert rep.passed


def test_serre_triality_weighted():
    real, fam = _setup("D4", [2, 1, 3, 0])
    v = Verifier(real)
    assert v.verify_serre(fam, 0, 1, 2).passed
    assert v.verify_serre(fam, 1, 0, 2).passed


def test_AS_vacuous_and_special():
    real, _ = _setup("A2", [1, 0])
    rep = Verifier(real).verify_AS(2)
    assert rep.passed and all(c.grid == "vacuous" for c in rep.checks)
    real2, _ = _setup("A1^(1)", [1, 0])
    rep2 = Verifier(real2).verify_AS(2)
    assert rep2.passed
    assert all(c.grid != "vacuous" for c in rep2.checks)
    real3, _ = _setup("A1^(1)", [0, 1])
    assert Verifier(real3).verify_AS(2).passed


def test_thm1_requires_finite():
    real, _ = _setup("A2^(1)", [0, 2, 1])
    with pytest.raises(ScopeViolation):
        Verifier(real).verify_thm1_ds(2)


def test_thm1_cases_a3_flip():
    real, _ = _setup("A3", [2, 1, 0], 3)
    rep = Verifier(real).verify_thm1_ds(3)
    assert rep.passed
    assert {c.pair for c in rep.checks} == {(0, 1), (1, 0), (1, 2), (2, 1)}


def test_p1_window_certificate_failure_payload():
    real, fam = _setup("A2^(1)", [0, 2, 1])
    plain = SerreFamily("plain")
    for (i, j), sigmas in fam.entries.items():
        variables = next(iter(sigmas.values())).vars
        plain.entries[(i, j)] = {
            s: (LPoly.one(variables) if s == (0, 1) else LPoly.zero(variables))
            for s in sigmas
        }
    rep = Verifier(real).verify_P1_at_window(plain, 2)
    assert not rep.passed
    bad = [c for c in rep.checks if not c.passed]
    assert bad
    modes, residual = bad[0].failures[0]
    assert residual
    payload = serialize_elem(residual)
    assert payload and all("coeff" in item for item in payload)


def test_report_json_shape():
    real, fam = _setup("A2", [1, 0])
    rep = Verifier(real).run_suite(fam, 1)
    data = rep.to_json()
    assert data["pass"] is True
    assert data["total"] == len(rep.checks)
    for chk in data["checks"]:
        assert {"relation", "pair", "modes", "pass", "checked"} <= set(chk)


def test_out_of_window_recorded_as_gap():
    g = Gcm(canonical_matrix("A2"))
    mu = validate_aut(g, [1, 0])
    real = Realization(g, mu, m1_window=3, m2_window=2)
    rep = Verifier(real).verify_locality(0, 1, 2)
    gaps = [c for c in rep.checks if c.gaps]
    assert gaps
    data = rep.to_json()
    assert any("out_of_window" in c for c in data["checks"])


def test_window_enlargement_stability():
    # a pass never becomes a failure with a larger window
    g = Gcm(canonical_matrix("A2"))
    mu = validate_aut(g, [1, 0])
    fam = family_p(g, mu)
    small = suite_window(g, mu, fam, 2)
    for extra in (0, 4, 9):
        real = Realization(g, mu, m1_window=small[0] + extra, m2_window=small[1] + extra)
        assert Verifier(real).run_suite(fam, 2).passed


def test_qlimit_suite_small():
    real, fam = _setup("A2", [1, 0], 2, family_qlimit)
    rep = Verifier(real).verify_P1_at_window(fam, 2)
    assert rep.passed
    assert all(c.kind.startswith("P1") for c in rep.checks)


@pytest.mark.parametrize(
    "label,perm,modes",
    [
        ("A2^(2)", [0, 1], 2),
        ("D4^(3)", [0, 1, 2], 1),
        ("D3^(2)", [2, 1, 0], 2),  # flip of a twisted chain: N=2 on an r=2 core
    ],
)
def test_twisted_loop_cores_full_suite(label, perm, modes):
    real, fam = _setup(label, perm, modes)
    rep = Verifier(real).run_suite(fam, modes)
    assert rep.passed, [(c.kind, c.pair) for c in rep.checks if not c.passed][:2]
