"""Finite-state Markov chains for jump linear systems.

Covers validation of (initial, transition) pairs, irreducibility, the
decomposition of a stationary chain into recurrent classes plus transient
states, cylinder measures on the path space, and seeded trajectory sampling.

States are 1-indexed everywhere in the public interface; arrays are 0-indexed
internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iter_product

import numpy as np
import scipy.sparse
from scipy.sparse import csgraph

from .products import BudgetExceededError
from .rng import philox_stream

ROW_SUM_TOL = 1e-12
DIST_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10
ENUM_BUDGET = 10**7


@dataclass(frozen=True)
class MarkovChain:
    """Initial distribution and transition matrix; shape checks only here.

    Stochasticity, nonnegativity and stationarity are reported by
    validate_chain rather than enforced, so mildly defective inputs can still
    be analyzed and their defects quantified.
    """

    initial: np.ndarray
    transition: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.initial, dtype=float).reshape(-1)
        t = np.asarray(self.transition, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError(f"transition must be square, got shape {t.shape}")
        if p.shape[0] != t.shape[0]:
            raise ValueError(
                f"initial has {p.shape[0]} entries but transition is {t.shape[0]}x{t.shape[1]}"
            )
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(t))):
            raise ValueError("chain entries must be finite")
        object.__setattr__(self, "initial", p)
        object.__setattr__(self, "transition", t)

    @property
    def num_states(self) -> int:
        return self.initial.shape[0]


@dataclass
class ValidationReport:
    num_states: int
    row_sum_defect: float
    min_entry: float
    initial_sum_defect: float
    stationarity_defect: float
    issues: list[str] = field(default_factory=list)
    valid: bool = False


def validate_chain(
    chain: MarkovChain,
    row_tol: float = ROW_SUM_TOL,
    dist_tol: float = DIST_SUM_TOL,
    stationary_tol: float = STATIONARY_TOL,
) -> ValidationReport:
    """Quantified validity check: row sums, signs, total mass, stationarity.

    The stationarity defect is ||p P - p|| in the max norm. The chain is
    `valid` when every defect is inside its tolerance.
    """
    p, t = chain.initial, chain.transition
    report = ValidationReport(
        num_states=chain.num_states,
        row_sum_defect=float(np.max(np.abs(t.sum(axis=1) - 1.0))),
        min_entry=float(min(p.min(), t.min())),
        initial_sum_defect=float(abs(p.sum() - 1.0)),
        stationarity_defect=float(np.max(np.abs(p @ t - p))),
    )
    if report.row_sum_defect > row_tol:
        bad = int(np.argmax(np.abs(t.sum(axis=1) - 1.0)))
        report.issues.append(
            f"transition row {bad + 1} sums to {t[bad].sum():.17g}, expected 1"
        )
    if report.min_entry < 0.0:
        report.issues.append(f"negative entry {report.min_entry:.17g}")
    if report.initial_sum_defect > dist_tol:
        report.issues.append(
            f"initial distribution sums to {p.sum():.17g}, expected 1"
        )
    if report.stationarity_defect > stationary_tol:
        report.issues.append(
            f"initial distribution is not stationary, defect {report.stationarity_defect:.3g}"
        )
    report.valid = not report.issues
    return report


def _positive_graph(chain: MarkovChain) -> scipy.sparse.csr_matrix:
    return scipy.sparse.csr_matrix((chain.transition > 0.0).astype(np.int8))


def is_irreducible(chain: MarkovChain) -> bool:
    """True when the positive-transition digraph is strongly connected."""
    n_comp, _ = csgraph.connected_components(
        _positive_graph(chain), directed=True, connection="strong"
    )
    return int(n_comp) == 1


@dataclass(frozen=True)
class ErgodicDecomposition:
    """Recurrent classes, transient states and the conditional chains.

    States are 1-indexed. Classes are ordered by their smallest state. The
    weight of a class is the initial mass it carries; conditional chains
    restrict the transition matrix to the class and renormalize the initial
    mass (a class with zero weight gets a uniform placeholder initial and
    `zero_mass_matches_transient` is False in that case).
    """

    transient_states: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    weights: np.ndarray
    conditional_chains: tuple[MarkovChain, ...]
    zero_mass_matches_transient: bool


def ergodic_decomposition(chain: MarkovChain) -> ErgodicDecomposition:
    """Split the state space into recurrent classes and transient states.

    A class is a strongly connected component of the positive-transition
    digraph with no positive edge leaving it; every other state is transient.
    For an exactly stationary chain the transient states are precisely the
    states with zero initial mass, which is reported as a flag rather than
    assumed.
    """
    p, t = chain.initial, chain.transition
    n = chain.num_states
    n_comp, labels = csgraph.connected_components(
        _positive_graph(chain), directed=True, connection="strong"
    )

    closed = []
    for comp in range(int(n_comp)):
        members = np.flatnonzero(labels == comp)
        outside = np.ones(n, dtype=bool)
        outside[members] = False
        if not (t[np.ix_(members, outside)] > 0.0).any():
            closed.append(tuple(int(s) + 1 for s in sorted(members)))
    closed.sort(key=lambda c: c[0])

    recurrent = {s for cls in closed for s in cls}
    transient = tuple(s for s in range(1, n + 1) if s not in recurrent)

    weights = np.array([sum(p[s - 1] for s in cls) for cls in closed])
    conditionals = []
    for cls, w in zip(closed, weights):
        ix = [s - 1 for s in cls]
        sub_t = t[np.ix_(ix, ix)].copy()
        if w > 0.0:
            sub_p = p[ix] / w
        else:
            sub_p = np.full(len(ix), 1.0 / len(ix))
        conditionals.append(MarkovChain(sub_p, sub_t))

    zero_mass = {s for s in range(1, n + 1) if p[s - 1] == 0.0}
    return ErgodicDecomposition(
        transient_states=transient,
        classes=tuple(closed),
        weights=weights,
        conditional_chains=tuple(conditionals),
        zero_mass_matches_transient=zero_mass == set(transient),
    )


def cylinder_measure(chain: MarkovChain, word) -> float:
    """Measure of the cylinder fixing the first symbols to `word` (1-indexed).

    Empty word gives 1. The value is p[w1] times the product of transition
    probabilities along the word.
    """
    word = [int(s) for s in word]
    for s in word:
        if not 1 <= s <= chain.num_states:
            raise ValueError(f"symbol {s} outside 1..{chain.num_states}")
    if not word:
        return 1.0
    out = float(chain.initial[word[0] - 1])
    for a, b in zip(word, word[1:]):
        out *= float(chain.transition[a - 1, b - 1])
    return out


def shift_invariance_defect(
    chain: MarkovChain, max_len: int, budget: int = ENUM_BUDGET
) -> float:
    """max over words w, |w| <= max_len, of |mu([w]) - sum_k mu([k w])|.

    Zero (to rounding) exactly when the initial distribution is stationary.
    Enumeration work is bounded: max_len * K**max_len beyond `budget` is
    refused with BudgetExceededError rather than attempted.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    k = chain.num_states
    if max_len * k**max_len > budget:
        raise BudgetExceededError(
            f"shift-invariance enumeration needs {max_len * k**max_len} word visits, "
            f"budget is {budget}"
        )
    p, t = chain.initial, chain.transition
    p_shift = p @ t
    worst = 0.0
    for length in range(1, max_len + 1):
        for word in iter_product(range(k), repeat=length):
            tail = 1.0
            for a, b in zip(word, word[1:]):
                tail *= t[a, b]
            defect = abs(p[word[0]] * tail - p_shift[word[0]] * tail)
            if defect > worst:
                worst = defect
    return worst


def _pick_index(cum: np.ndarray, probs: np.ndarray, u: float) -> int:
    """Inverse-CDF draw with ties broken toward the lower index.

    Symbol i owns the half-open interval (cum[i-1], cum[i]]; u exactly on a
    boundary therefore selects the lower positive-mass index. Zero-mass
    symbols are never selected.
    """
    k = len(probs)
    idx = int(np.searchsorted(cum, u, side="left"))
    if idx >= k:
        idx = k - 1
        while idx > 0 and probs[idx] <= 0.0:
            idx -= 1
    while idx < k - 1 and probs[idx] <= 0.0:
        idx += 1
    if probs[idx] <= 0.0:
        while idx > 0 and probs[idx] <= 0.0:
            idx -= 1
        if probs[idx] <= 0.0:
            raise ValueError("distribution has no positive mass")
    return idx


def sample_trajectory(
    chain: MarkovChain, horizon: int, seed: int, stream: int = 0
) -> np.ndarray:
    """Sample `horizon` states (1-indexed) from the chain, deterministically.

    The generator is keyed by (seed, stream); one uniform is drawn per step in
    order, so a longer horizon with the same key extends the shorter sample.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    p, t = chain.initial, chain.transition
    cum_p = np.cumsum(p)
    cum_t = np.cumsum(t, axis=1)
    us = philox_stream(seed, stream).random(horizon)
    out = np.empty(horizon, dtype=np.int64)
    state = _pick_index(cum_p, p, us[0])
    out[0] = state + 1
    for n in range(1, horizon):
        state = _pick_index(cum_t[state], t[state], us[n])
        out[n] = state + 1
    return out
