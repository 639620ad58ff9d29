import numpy as np
import pytest

import measurelab as ml
from measurelab._linalg import basis_vector, random_density
from measurelab.states import State, diagonal_state

PROJECTIVE_CHECKS = [
    "interaction-unitary",
    "meter-resolution",
    "probe-normalized",
    "effects-are-diagonal-units",
    "branch-law-pinching",
    "weights-match-diagonal",
    "component-purity",
    "component-orthogonality",
    "decomposition-reconstruction",
    "restriction-is-pinching",
    "exact-observation",
    "conditional-expectation-meter",
    "sampling-consistency",
]

IDENTITY_CHECKS = [
    "interaction-unitary",
    "meter-resolution",
    "probe-normalized",
    "no-information-first-outcome",
    "effects-scalar",
    "sampling-consistency",
]


def test_projective_report_passes_across_configurations():
    for k, n in [(2, 2), (2, 3), (3, 2)]:
        p = ml.build_projective_scenario(k, n)
        rep = ml.run_projective_check(p, shots=20000)
        assert [c.name for c in rep.checks] == PROJECTIVE_CHECKS
        assert rep.all_pass, [c.name for c in rep.failures()]


def test_projective_report_generic_flavor():
    p = ml.build_projective_scenario(2, 2, flavor="generic")
    rep = ml.run_projective_check(p, shots=20000)
    assert rep.all_pass
    assert rep.meta["config"]["flavor"] == "generic"


def test_projective_config_echo():
    p = ml.build_projective_scenario(2, 3)
    rep = ml.run_projective_check(p, shots=12345, seed=5)
    cfg = rep.meta["config"]
    assert cfg["k"] == 2 and cfg["levels"] == 3 and cfg["flavor"] == "natural"
    assert cfg["d"] == 2 and cfg["shots"] == 12345 and cfg["seed"] == 5
    assert cfg["identity_interaction"] is False
    assert rep.meta["seed"] == 5


def test_projective_weights_follow_the_diagonal():
    p = ml.build_projective_scenario(2, 3)
    rep = ml.run_projective_check(p, state=diagonal_state(np.array([0.3, 0.7])))
    by_name = {c.name: c for c in rep.checks}
    assert by_name["weights-match-diagonal"].residual < 1e-10
    assert np.abs(np.asarray(rep.derived["weights"]) - [0.3, 0.7]).max() < 1e-10


def test_projective_histogram_in_derived():
    p = ml.build_projective_scenario(2, 2)
    rep = ml.run_projective_check(p, state=diagonal_state(np.array([0.3, 0.7])),
                                  shots=1000, seed=7)
    hist = rep.derived["histogram"]
    counts = np.asarray(hist["counts"])
    assert int(counts.sum()) == 1000
    assert counts.tolist() == [318, 682]


def test_identity_interaction_gives_no_information():
    p = ml.build_projective_scenario(2, 2, identity_interaction=True)
    rep = ml.run_projective_check(p, state=State(
        random_density(2, np.random.default_rng(3))))
    assert [c.name for c in rep.checks] == IDENTITY_CHECKS
    assert rep.all_pass
    assert rep.meta["config"]["identity_interaction"] is True
    w = np.asarray(rep.derived["weights"])
    assert abs(w[0] - 1.0) < 1e-12
    assert np.abs(w[1:]).max() < 1e-12


def test_custom_apparatus_vectors():
    k, n = 2, 2
    K = k ** n
    vecs = [basis_vector(3, K), basis_vector(1, K)]
    p = ml.build_projective_scenario(k, n, apparatus_vectors=vecs)
    rep = ml.run_projective_check(p)
    assert rep.all_pass


def test_apparatus_vector_validation():
    with pytest.raises(ValueError):
        ml.build_projective_scenario(2, 2, apparatus_vectors=[basis_vector(0, 4)])
    # pointer for outcome 0 must live in the first meter class
    with pytest.raises(ValueError, match="meter range"):
        ml.build_projective_scenario(
            2, 2, apparatus_vectors=[basis_vector(1, 4), basis_vector(0, 4)])
    # length is a free parameter: vectors are normalized on the way in
    p = ml.build_projective_scenario(
        2, 2, apparatus_vectors=[basis_vector(0, 4) * 2.0, basis_vector(1, 4)])
    assert ml.run_projective_check(p).all_pass


def test_projective_notes_mention_the_finite_truncation():
    p = ml.build_projective_scenario(2, 2)
    rep = ml.run_projective_check(p)
    assert rep.notes


def test_chi_ladder_report_passes():
    for k in (2, 3):
        rep = ml.chi_ladder_report(k, levels=3)
        assert rep.all_pass, [c.name for c in rep.failures()]
        names = [c.name for c in rep.checks]
        for j in range(1, k):
            assert f"twisted-overlap-power-{j}" in names
            assert f"disjointness-probe-power-{j}" in names
        for n in range(2, 4):
            assert f"state-invariance-level-{n}" in names
            assert f"ladder-isometry-level-{n}" in names
        assert "symmetry-implementing-unitary" in names
        assert "symmetry-unitary-order" in names
        assert len(rep.notes) >= 2


def test_chi_ladder_deeper_stack():
    rep = ml.chi_ladder_report(2, levels=4)
    assert rep.all_pass
    assert rep.meta["config"] == {"k": 2, "levels": 4, "flavor": "natural"}


def test_tensor_power_report_frozen_dimensions():
    rep = ml.tensor_power_report(2, 2, 2)
    assert rep.all_pass
    assert rep.derived["surrogate_dimension"] == 4
    assert rep.derived["projection_ranks"] == [4, 4, 4, 4]
    single = ml.tensor_power_report(3, 2, 1)
    assert single.all_pass
    assert single.derived["surrogate_dimension"] == 3
    assert single.derived["projection_ranks"] == [3, 3, 3]


def test_tensor_power_report_two_qutrit_copies():
    rep = ml.tensor_power_report(3, 2, 2)
    assert rep.all_pass
    assert rep.derived["surrogate_dimension"] == 9
    assert rep.derived["projection_ranks"] == [9] * 9
    assert rep.meta["config"] == {"k": 3, "levels": 2, "copies": 2}


def test_tensor_power_size_cap():
    with pytest.raises(ValueError, match="4096"):
        ml.tensor_power_report(2, 4, 4)


def test_scenario_reports_serialize():
    from measurelab import serialize as sz

    p = ml.build_projective_scenario(2, 2)
    rep = ml.run_projective_check(p)
    txt = sz.dumps(sz.report_to_json(rep))
    assert '"pass": true' in txt
