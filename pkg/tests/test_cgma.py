import numpy as np
import pytest

from cgmalab import freemodel
from cgmalab.cgma import (
    AmbiguousMatch,
    HarnessError,
    NetFixture,
    PhaseAmbiguityError,
    TranslationSystem,
    assemble_translations,
    build_axis_unitary,
    centrality_defect,
    check_axis_consistency,
    check_cgma,
    check_commutation,
    check_modular_stability,
    check_star_relation,
    induced_wedge_map,
    lift_representation,
    sabotage,
    spectrum_report,
    two_factor_fixture,
)
from cgmalab.freemodel import Left, Right
from cgmalab.geometry import IDENTITY, translation
from cgmalab.tomita import AntilinearOperator, conjugation, op_norm
from cgmalab.wedges import W1, complement, edge_reflection, wedge_equal


@pytest.fixture(scope="module")
def model():
    return freemodel.build_model(1.0, 40, 0.05)


@pytest.fixture(scope="module")
def net(model):
    return model.net()


def test_healthy_model_fixture(net):
    rep = check_cgma(net)
    assert rep.ok
    assert rep["a"].status == rep["c"].status == rep["d"].status == "pass"
    assert rep["b"].status == "skipped"
    assert rep["b"].detail["reason"] == "no algebras at one-particle level"
    assert rep["c"].residual <= 1e-10


@pytest.mark.parametrize("kind, partner, failing", [
    ("duplicate-conjugation", 0, ["a"]),
    ("non-involutive", None, ["c"]),
    ("wrong-wedge", 3, ["d"]),
])
def test_sabotage_fails_only_its_condition(net, kind, partner, failing):
    other = None if partner is None else net.ids[partner]
    bad = sabotage(net, kind, net.ids[1], other)
    assert check_cgma(bad).failed() == failing


def test_duplicate_reports_witness_pair(net):
    bad = sabotage(net, "duplicate-conjugation", net.ids[1], net.ids[0])
    assert sorted(check_cgma(bad)["a"].witness) == sorted([net.ids[0], net.ids[1]])


def test_unknown_sabotage(net):
    with pytest.raises(HarnessError):
        sabotage(net, "nonsense", net.ids[0])


def test_two_factor_fixture_passes_everything():
    rep = check_cgma(two_factor_fixture())
    assert rep.ok
    assert all(c.status == "pass" for c in rep.conditions.values())
    assert rep["a"].detail["order"] == "evaluated"


def test_two_factor_ids_exchange():
    fx = two_factor_fixture()
    m = induced_wedge_map(fx, "W")
    assert m.images == {"W": "W'", "W'": "W"}


def test_induced_map_of_model_conjugation(net):
    m = induced_wedge_map(net, "R(0,0)")
    # J_0 reverses translations and swaps the complementary pair
    assert m.images["R(0,0)"] == "L(0,0)"
    img = m.images["R(0.3,0.2)"]
    assert not isinstance(img, str)
    assert wedge_equal(img, Left(-0.3, -0.2).wedge, 1e-8)


def test_ambiguous_match_reports_both_ids(model):
    tags = [Right(), Right(0.3, 0.2), Left()]
    fx = model.net(tags)
    fx2 = NetFixture(family={**fx.family, "dup": Left().wedge},
                     conj={**fx.conj, "dup": fx.conj["L(0,0)"]}, dim=fx.dim,
                     flow=lambda i, t: fx.flow_at("L(0,0)" if i == "dup" else i, t),
                     flow_probe=fx.flow_probe, continuum=model)
    with pytest.raises(AmbiguousMatch) as err:
        induced_wedge_map(fx2, "R(0,0)")
    assert "L(0,0)" in str(err.value) and "dup" in str(err.value)


def test_mismatched_dimension_rejected(net):
    conj = dict(net.conj)
    conj[net.ids[0]] = conjugation(3)
    with pytest.raises(HarnessError):
        NetFixture(family=net.family, conj=conj, dim=net.dim)


def test_conjugation_only_fixture_cannot_separate_complements():
    # J_W = J_W' under Haag duality, so conjugations alone do not tell W from W'
    fx = two_factor_fixture()
    bare = NetFixture(family=fx.family, conj=fx.conj, dim=fx.dim)
    rep = check_cgma(bare)
    assert rep["a"].status == "fail"
    assert rep["a"].detail["reason"] == "distinct wedges share the same data"
    assert rep["b"].status == "skipped"


def test_star_relation(net):
    xi = np.array([0.3, 0.2, 0, 0])
    res = check_star_relation(net, translation(xi), [Right(0.15, 0.1), Right()])
    assert res.residual <= 1e-12 and res.checked > 0
    assert check_star_relation(net, IDENTITY, []).residual == 0.0
    with pytest.raises(HarnessError):
        check_star_relation(net, translation(xi), [Right(0.3, 0.2), Right()])


def test_lift_and_centrality(net):
    lift = lift_representation(translation([0.4, 0.1, 0, 0]), net)
    assert len(lift.word) == 2 and not isinstance(lift.operator, AntilinearOperator)
    Z, defect = centrality_defect(net, translation([0.4, 0.1, 0, 0]), translation([-0.2, 0.3, 0, 0]))
    assert defect <= 1e-10
    assert op_norm(Z - np.eye(net.dim)) <= 1e-12
    lam = edge_reflection(W1)
    Z, defect = centrality_defect(net, lam, lam)
    assert op_norm(Z - np.eye(net.dim)) <= 1e-12


def test_axis_unitary_identities(net, model):
    A = build_axis_unitary(net, "R(0,0)", [0.8, -0.3])
    assert A.ok(1e-12), A.residuals
    assert np.allclose(A.induced[1.0], [0.8, -0.3, 0, 0])
    assert op_norm(A.V[0.5] - model.U([0.4, -0.15])) <= 1e-12


def test_axis_consistency_levels(net):
    op = check_axis_consistency(net, 0.7)
    geo = check_axis_consistency(None, 0.7)
    assert op.residual <= 1e-12 and geo.residual <= 1e-12
    assert op.level != geo.level
    assert check_axis_consistency(net, 0.0).residual == 0.0
    single = NetFixture(family={"a": W1, "b": W1 + [0, 1, 0, 0]}, conj={"a": conjugation(2), "b": conjugation(2)},
                        dim=2)
    with pytest.raises(HarnessError):
        check_axis_consistency(single, 1.0)


def test_commutation(net):
    assert check_commutation(net, [0.6, -0.9]) <= 1e-12
    assert check_commutation(net, [0.6, 0.0]) == 0.0
    assert check_commutation(None, [0.6, 2.0, 2.0, -1.0]) <= 1e-12


def test_translation_system(net, model):
    T = assemble_translations(net, seed=3)
    assert T.residuals["analytic"] <= 1e-12
    assert T.residuals["group_law"] <= 1e-12
    assert np.array_equal(T.unitary([0.0, 0.0]), np.eye(net.dim))


def test_spectrum_cones(model, net):
    spec = spectrum_report(assemble_translations(net))
    assert spec.cone == "Forward" and spec.violations == 0 and not spec.trivial
    p = spec.points
    assert np.allclose(p[:, 0] ** 2 - p[:, 1] ** 2, 1.0, atol=1e-8)
    assert np.allclose(np.sort(spec.rapidities()), model.grid.theta, atol=1e-8)
    refl = freemodel.build_model(1.0, 40, 0.05, time_reflected=True).net()
    assert spectrum_report(assemble_translations(refl)).cone == "Backward"


def test_spectrum_phase_ambiguity(net):
    T = assemble_translations(net)
    with pytest.raises(PhaseAmbiguityError) as err:
        spectrum_report(T, levels=0)
    assert err.value.suggested_levels >= 1


class _Flat:
    def conj_at(self, W):
        return conjugation(3)


def test_trivial_spectrum_flagged():
    fx = NetFixture(family={"R": W1, "L": complement(W1)}, conj={"R": conjugation(3), "L": conjugation(3)},
                    dim=3, continuum=_Flat())
    spec = spectrum_report(TranslationSystem(fx, (0, 1), {}), levels=2)
    assert spec.trivial and spec.cone == "Forward"
    assert "trivial representation" in spec.notes[0]


def test_modular_stability(net, model):
    rep = check_modular_stability(net, [0.0])
    assert rep.operator_residual <= 1e-14
    rep = check_modular_stability(net, [model.flow_probe, 2 * model.flow_probe])
    assert rep.operator_checked > 0
    assert rep.operator_residual <= 1e-11
    assert rep.geometric_residual <= 1e-9
    assert {c["axis"] for c in rep.certificates} == {1, 2, 3}


def test_stability_needs_flow():
    fx = two_factor_fixture()
    bare = NetFixture(family=fx.family, conj=fx.conj, dim=fx.dim)
    with pytest.raises(HarnessError):
        check_modular_stability(bare, [0.1])


def test_report_json_is_plain(net):
    rep = check_cgma(net).to_json()
    import json

    text = json.dumps(rep, allow_nan=False)
    assert "no algebras at one-particle level" in text
