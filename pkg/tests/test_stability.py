"""Convergence estimates, word probes, greedy search, equivalence harness."""

import numpy as np
import pytest

from mjlslab import (
    MJLS,
    MarkovChain,
    MatrixSet,
    almost_sure_exponential_estimate,
    consistent_convergence_estimate,
    consistent_convergence_probe,
    diagonal_shortcut_check,
    greedy_pointwise_search,
    periodic_stability_probe,
    pointwise_convergence_estimate,
    pointwise_equivalence_harness,
    pointwise_exponential_estimate,
    spectral_finiteness_probe,
    spectral_radius,
    word_product,
)
from oracles import rotation

IID2 = MarkovChain([0.5, 0.5], [[0.5, 0.5], [0.5, 0.5]])
IID1 = MarkovChain([1.0], [[1.0]])

CONTRACTIONS = MatrixSet.from_list([0.8 * np.eye(2), np.diag([0.5, 0.9])])
SHEAR = MatrixSet.from_list([[[1.0, 0.0], [1.0, 1.0]]])
SHRINK_ROT = MatrixSet.from_list([np.diag([0.5, 1.0]), rotation(np.pi / 2)])

# families whose products all stay bounded, for the equivalence harness
PRODUCT_BOUNDED = [
    MatrixSet.from_list([np.diag([0.5, 1.0]), rotation(np.pi / 2)]),
    MatrixSet.from_list([np.diag([1.0 / 3.0, 1.0]), rotation(np.pi / 4)]),
    MatrixSet.from_list([0.9 * rotation(np.pi / 6), np.diag([0.8, 1.0])]),
    MatrixSet.from_list([np.diag([0.5, 0.5]), np.eye(2)]),
    MatrixSet.from_list([rotation(np.pi / 3), np.diag([1.0, 0.7])]),
]


def test_mjls_alphabet_check():
    with pytest.raises(ValueError):
        MJLS(CONTRACTIONS, IID1)


def test_pointwise_estimate_contracting_family():
    m = MJLS(CONTRACTIONS, IID2)
    rep = pointwise_convergence_estimate(m, [1.0, 1.0], trials=50, horizon=300, seed=0)
    assert rep.fraction_converged == 1.0
    assert rep.fraction_exponential == 1.0
    assert rep.positive_evidence and rep.exponential_evidence
    assert rep.converged_count == 50
    assert rep.tail_fits.max() < np.log(0.9) + 0.05


def test_pointwise_estimate_growing_family():
    m = MJLS(SHEAR, IID1)
    rep = pointwise_convergence_estimate(m, [0.0, 1.0], trials=20, horizon=300, seed=0)
    assert rep.fraction_converged == 0.0
    assert not rep.positive_evidence


def test_pointwise_estimate_rejects_zero_vector():
    m = MJLS(CONTRACTIONS, IID2)
    with pytest.raises(ValueError):
        pointwise_convergence_estimate(m, [0.0, 0.0], trials=5, horizon=50, seed=0)


def test_estimates_are_seed_reproducible():
    m = MJLS(SHRINK_ROT, IID2)
    a = pointwise_convergence_estimate(m, [1.0, 0.0], trials=30, horizon=200, seed=9)
    b = pointwise_convergence_estimate(m, [1.0, 0.0], trials=30, horizon=200, seed=9)
    assert np.array_equal(a.final_log_norms, b.final_log_norms)
    c = pointwise_convergence_estimate(m, [1.0, 0.0], trials=30, horizon=200, seed=10)
    assert not np.array_equal(a.final_log_norms, c.final_log_norms)


def test_exponential_fraction_never_exceeds_converged_fraction():
    rng = np.random.default_rng(40)
    for _ in range(8):
        mats = [rng.standard_normal((2, 2)) * rng.uniform(0.4, 1.1) for _ in range(2)]
        m = MJLS(MatrixSet.from_list(mats), IID2)
        x = rng.standard_normal(2)
        x /= np.linalg.norm(x)
        rep = pointwise_convergence_estimate(m, x, trials=40, horizon=250, seed=1)
        assert rep.fraction_exponential <= rep.fraction_converged + 1e-15


def test_pointwise_and_exponential_share_trajectories():
    m = MJLS(SHRINK_ROT, IID2)
    conv = pointwise_convergence_estimate(m, [1.0, 0.0], trials=40, horizon=400, seed=2)
    expo = pointwise_exponential_estimate(m, [1.0, 0.0], trials=40, horizon=400, seed=2)
    assert np.array_equal(conv.final_log_norms, expo.final_log_norms)
    assert np.array_equal(conv.tail_fits, expo.tail_fits)


def test_consistent_estimate_uses_matrix_norms():
    m = MJLS(CONTRACTIONS, IID2)
    rep = consistent_convergence_estimate(m, trials=30, horizon=300, seed=0)
    assert rep.kind == "matrix"
    assert rep.fraction_converged == 1.0
    # the shear never brings the product norm down
    rep = consistent_convergence_estimate(MJLS(SHEAR, IID1), trials=10, horizon=300, seed=0)
    assert rep.fraction_converged == 0.0


def test_periodic_stability_probe_verdicts():
    probe = periodic_stability_probe(CONTRACTIONS, max_len=4)
    assert probe.verdict == "periodically-stable-so-far"
    assert probe.best_value < 0.9 + 1e-9
    assert probe.objective == "max-over-words"

    probe = periodic_stability_probe(SHRINK_ROT, max_len=4)
    assert probe.verdict == "not-periodically-stable"
    assert probe.best_value == pytest.approx(1.0, abs=1e-12)


def test_probe_best_value_recomputes_from_best_word():
    # the reported extremum must reproduce from its witness word
    for s in (CONTRACTIONS, SHRINK_ROT, SHEAR):
        for probe_fn in (periodic_stability_probe, consistent_convergence_probe):
            probe = probe_fn(s, max_len=5)
            w = probe.best_word
            direct = spectral_radius(word_product(s, w)) ** (1.0 / len(w))
            assert probe.best_value == pytest.approx(direct, abs=1e-9)


def test_consistent_probe_finds_contracting_word():
    probe = consistent_convergence_probe(SHRINK_ROT, max_len=3)
    assert probe.verdict == "consistently-convergent"
    assert probe.best_value < 1.0


def test_consistent_probe_det_one_lower_bound():
    # |det| = 1 for both generators forces every averaged rho to stay >= 1
    s = MatrixSet.from_list([np.diag([0.5, 2.0]), rotation(np.pi / 6)])
    probe = consistent_convergence_probe(s, max_len=6)
    assert probe.best_value >= 1.0 - 1e-9
    assert probe.verdict == "not-found"


def test_det_pm_one_families_never_drop_below_one():
    reflect = np.array([[0.0, 1.0], [1.0, 0.0]])
    families = [
        MatrixSet.from_list([rotation(0.3), reflect]),
        MatrixSet.from_list([np.diag([0.25, -4.0]), rotation(np.pi / 5)]),
        MatrixSet.from_list([np.array([[1.0, 1.0], [0.0, 1.0]]), reflect]),
    ]
    for s in families:
        probe = consistent_convergence_probe(s, max_len=5)
        assert probe.best_value >= 1.0 - 1e-9


def test_spectral_finiteness_nilpotent_pair():
    s = MatrixSet.from_list([[[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]])
    rep = spectral_finiteness_probe(s, max_len=2, jsr_depth=12)
    assert rep.lower == pytest.approx(1.0, abs=1e-12)
    assert rep.upper == pytest.approx(1.0, abs=1e-12)
    assert rep.gap == pytest.approx(0.0, abs=1e-12)
    assert rep.finiteness_evidence
    assert len(rep.lower_word) == 2


def test_greedy_search_steers_push_pull_system():
    s = MatrixSet.from_list([np.diag([0.5, 2.0]), rotation(np.pi / 6)])
    res = greedy_pointwise_search(s, [0.0, 1.0], lookahead=13, max_steps=800, eps=1e-4)
    assert res.success
    assert res.final_norm < 1e-4
    assert res.steps <= 800
    # replaying the returned word reproduces the final norm
    replay = np.array([0.0, 1.0]) @ word_product(s, res.word)
    assert np.linalg.norm(replay) == pytest.approx(res.final_norm, rel=1e-9)


def test_greedy_search_stalls_on_expanding_family():
    res = greedy_pointwise_search(SHEAR, [0.0, 1.0], lookahead=3, max_steps=200, eps=1e-6)
    assert not res.success
    assert res.failure_reason is not None


def test_equivalence_harness_on_product_bounded_families():
    for i, s in enumerate(PRODUCT_BOUNDED):
        m = MJLS(s, IID2)
        rep = pointwise_equivalence_harness(
            m, trials=60, horizon=600, num_initials=8, seed=100 + i
        )
        assert rep.gate_passed, f"family {i} failed the boundedness gate"
        assert rep.positive_implies_exponential, f"family {i} broke the implication"
        assert rep.equivalence_evidence
        assert rep.max_discrepancy <= 0.05


def test_equivalence_harness_gate_rejects_growth():
    rep = pointwise_equivalence_harness(
        MJLS(SHEAR, IID1), trials=10, horizon=200, num_initials=4, seed=0
    )
    assert not rep.gate_passed
    assert rep.gate.verdict == "growth-detected"
    assert not rep.equivalence_evidence
    # estimates still run and are reported
    assert rep.fractions_converged.shape == (4,)


def test_almost_sure_estimate_contracting_family():
    m = MJLS(CONTRACTIONS, IID2)
    rep = almost_sure_exponential_estimate(m, trials=30, horizon=400, seed=0)
    assert rep.gate_passed
    assert rep.evidence
    assert rep.max_tail_fit < -1e-3


def test_almost_sure_estimate_gate_failure_is_flagged():
    m = MJLS(SHRINK_ROT, IID2)
    rep = almost_sure_exponential_estimate(m, trials=10, horizon=200, seed=0)
    assert not rep.gate_passed
    assert not rep.evidence
    assert rep.warnings
    assert rep.tail_fits.shape == (10,)


def test_diagonal_shortcut_agrees():
    s = MatrixSet.from_list([np.diag([0.5, 0.8]), np.diag([0.9, 0.6])])
    m = MJLS(s, IID2)
    rep = diagonal_shortcut_check(m, trials=20, horizon=300, seed=0)
    assert rep.agree
    assert rep.pointwise_positive and rep.consistent_positive


def test_diagonal_shortcut_rejects_off_diagonal():
    m = MJLS(SHRINK_ROT, IID2)
    with pytest.raises(ValueError, match="matrix 2"):
        diagonal_shortcut_check(m, trials=5, horizon=50, seed=0)
