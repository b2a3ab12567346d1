"""Convergence classifiers for Markovian and deterministic switched systems.

Three Monte Carlo estimates grade a jump linear system the way the stability
definitions do: per-vector convergence of x A(n) to zero, per-vector
exponential decay of its log-norm, and decay of the full product norm. Word
probes enumerate finite products to test periodic stability (every word
contracting) and consistent convergence (some word contracting), a greedy
lookahead search builds stabilizing switching sequences one block at a time,
and two harnesses bundle the estimates with their hypothesis gates: product
boundedness for the pointwise/exponential equivalence and periodic stability
for almost-sure exponential decay.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_row_vector
from .markov import MarkovChain, sample_trajectory
from .products import (
    ENUM_BUDGET,
    BoundednessReport,
    BudgetExceededError,
    MatrixSet,
    _batch_rho,
    _level_products,
    boundedness_probe,
    jsr_bounds,
    word_from_index,
)
from .rng import unit_vectors
from .splitting import RENORM_EVERY

# horizon * delta should cover |log eps| so that an exponential trial can
# actually reach eps by the end of the run; reports flag the pairing
EPS_DEFAULT = 1e-6
DELTA_DEFAULT = 1e-3
PROBE_MARGIN = 1e-9
FINITENESS_GAP_TOL = 1e-6
POSITIVE_EVIDENCE_TRIALS = 5
GATE_DEPTH_DEFAULT = 8
PROBE_LEN_DEFAULT = 8


@dataclass(frozen=True)
class MJLS:
    """A matrix family driven by a Markov chain over the same alphabet."""

    system: MatrixSet
    chain: MarkovChain

    def __post_init__(self):
        if self.chain.num_states != self.system.num_matrices:
            raise ValueError(
                f"chain has {self.chain.num_states} states but the family has "
                f"{self.system.num_matrices} matrices"
            )


def _symbol_paths(m: MJLS, trials: int, horizon: int, seed: int) -> np.ndarray:
    """One trajectory per trial, trial t drawn from stream t of the seed.

    Streams are keyed by (seed, trial index), so trial t is the same array no
    matter how many trials run or in what order.
    """
    if trials < 1 or horizon < 2:
        raise ValueError("need at least one trial and a horizon of at least 2")
    out = np.empty((trials, horizon), dtype=np.int64)
    for t in range(trials):
        out[t] = sample_trajectory(m.chain, horizon, seed, stream=t)
    return out


def _vector_histories(s: MatrixSet, trajs: np.ndarray, x) -> np.ndarray:
    """log ||x A(n)|| per trial and step; -inf after an exact zero product."""
    trials, horizon = trajs.shape
    v = np.tile(as_row_vector(x, s.dim), (trials, 1))
    hist = np.full((trials, horizon), -np.inf)
    acc = np.zeros(trials)
    alive = np.ones(trials, dtype=bool)
    for n in range(horizon):
        sym = trajs[:, n]
        for k in range(s.num_matrices):
            rows = alive & (sym == k + 1)
            if rows.any():
                v[rows] = v[rows] @ s.matrices[k]
        nrm = np.linalg.norm(v, axis=1)
        alive &= nrm > 0.0
        hist[alive, n] = acc[alive] + np.log(nrm[alive])
        if (n + 1) % RENORM_EVERY == 0 and alive.any():
            acc[alive] += np.log(nrm[alive])
            v[alive] /= nrm[alive, None]
    return hist


def _matrix_histories(s: MatrixSet, trajs: np.ndarray) -> np.ndarray:
    """log ||A(n)||_2 per trial and step, renormalized like the vector case."""
    trials, horizon = trajs.shape
    a = np.tile(np.eye(s.dim), (trials, 1, 1))
    hist = np.full((trials, horizon), -np.inf)
    acc = np.zeros(trials)
    alive = np.ones(trials, dtype=bool)
    for n in range(horizon):
        sym = trajs[:, n]
        for k in range(s.num_matrices):
            rows = alive & (sym == k + 1)
            if rows.any():
                a[rows] = a[rows] @ s.matrices[k]
        nrm = np.linalg.svd(a, compute_uv=False)[:, 0]
        alive &= nrm > 0.0
        hist[alive, n] = acc[alive] + np.log(nrm[alive])
        if (n + 1) % RENORM_EVERY == 0 and alive.any():
            acc[alive] += np.log(nrm[alive])
            a[alive] /= nrm[alive, None, None]
    return hist


def _tail_slopes(hist: np.ndarray) -> np.ndarray:
    """Least-squares slope of each row over its trailing half.

    Rows containing -inf inside the window get slope -inf, matching the
    scalar tail_slope convention.
    """
    trials, n = hist.shape
    if n < 2:
        raise ValueError("need at least two history points for a slope")
    start = min(n - 2, n // 2)
    ys = hist[:, start:]
    ns = np.arange(start + 1, n + 1, dtype=float)
    ns -= ns.mean()
    denom = float((ns * ns).sum())
    bad = np.isneginf(ys).any(axis=1)
    safe = np.where(np.isneginf(ys), 0.0, ys)
    slopes = ((safe - safe.mean(axis=1, keepdims=True)) * ns).sum(axis=1) / denom
    slopes[bad] = -np.inf
    return slopes


@dataclass
class ConvergenceReport:
    """Monte Carlo convergence evidence from one batch of trajectories.

    A trial converges when its final norm is below eps, and counts as
    exponential when additionally its tail log-norm slope is below -delta.
    Requiring both keeps fraction_exponential <= fraction_converged by
    construction; the raw per-trial finals and fits are carried so nothing
    is hidden by that choice. pairing_ok records whether horizon * delta
    covers |log eps|, the regime in which an exponential trial is expected
    to have reached eps by the end of the run.

    positive_evidence needs at least 5 converged trials: a nonzero fraction
    backed by a handful of trajectories, not a single fluke.
    """

    kind: str
    trials: int
    horizon: int
    seed: int
    eps: float
    delta: float
    initial: np.ndarray | None
    final_log_norms: np.ndarray
    tail_fits: np.ndarray
    converged_count: int
    exponential_count: int
    fraction_converged: float
    fraction_exponential: float
    positive_evidence: bool
    exponential_evidence: bool
    pairing_ok: bool


def _build_report(
    kind: str,
    initial,
    trials: int,
    horizon: int,
    seed: int,
    eps: float,
    delta: float,
    hist: np.ndarray,
) -> ConvergenceReport:
    if eps <= 0 or delta <= 0:
        raise ValueError("eps and delta must be positive")
    fits = _tail_slopes(hist)
    finals = hist[:, -1].copy()
    converged = finals < np.log(eps)
    exponential = converged & (fits < -delta)
    cc = int(converged.sum())
    ec = int(exponential.sum())
    return ConvergenceReport(
        kind=kind,
        trials=trials,
        horizon=horizon,
        seed=seed,
        eps=eps,
        delta=delta,
        initial=None if initial is None else np.asarray(initial, dtype=float),
        final_log_norms=finals,
        tail_fits=fits,
        converged_count=cc,
        exponential_count=ec,
        fraction_converged=cc / trials,
        fraction_exponential=ec / trials,
        positive_evidence=cc >= POSITIVE_EVIDENCE_TRIALS,
        exponential_evidence=ec >= POSITIVE_EVIDENCE_TRIALS,
        pairing_ok=bool(horizon * delta >= abs(np.log(eps))),
    )


def pointwise_convergence_estimate(
    m: MJLS,
    x,
    trials: int,
    horizon: int,
    eps: float = EPS_DEFAULT,
    seed: int = 0,
    delta: float = DELTA_DEFAULT,
) -> ConvergenceReport:
    """Share of sampled trajectories along which x A(n) reaches norm < eps."""
    xr = as_row_vector(x, m.system.dim)
    if float(np.linalg.norm(xr)) == 0.0:
        raise ValueError("initial vector must be nonzero")
    trajs = _symbol_paths(m, trials, horizon, seed)
    hist = _vector_histories(m.system, trajs, xr)
    return _build_report("vector", xr, trials, horizon, seed, eps, delta, hist)


def pointwise_exponential_estimate(
    m: MJLS,
    x,
    trials: int,
    horizon: int,
    delta: float = DELTA_DEFAULT,
    seed: int = 0,
    eps: float = EPS_DEFAULT,
) -> ConvergenceReport:
    """Same sampling as the pointwise estimate, read through the tail slopes.

    With matching (trials, horizon, seed) this reuses the exact trajectories
    of pointwise_convergence_estimate, so the two fractions are comparable
    trial by trial.
    """
    return pointwise_convergence_estimate(m, x, trials, horizon, eps, seed, delta)


def consistent_convergence_estimate(
    m: MJLS,
    trials: int,
    horizon: int,
    eps: float = EPS_DEFAULT,
    delta: float = DELTA_DEFAULT,
    seed: int = 0,
) -> ConvergenceReport:
    """Convergence of the full product norm ||A(n)||_2 instead of a vector."""
    trajs = _symbol_paths(m, trials, horizon, seed)
    hist = _matrix_histories(m.system, trajs)
    return _build_report("matrix", None, trials, horizon, seed, eps, delta, hist)


@dataclass
class WordProbeResult:
    """Extremal averaged spectral radius over all words up to a length.

    best_value is rho(S_w)^(1/|w|) at best_word; objective says whether the
    probe maximized (periodic stability) or minimized (consistent
    convergence). truncated marks an enumeration stopped by the budget.
    """

    objective: str
    best_word: tuple[int, ...]
    best_value: float
    depth: int
    verdict: str
    truncated: bool


def _rho_extremes(s: MatrixSet, max_len: int, budget: int):
    """Min and max of rho(S_w)^(1/|w|) over 1 <= |w| <= max_len, one pass.

    Ties keep the earliest find, so shorter words win and within a length the
    lexicographically smallest word wins.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    min_val, max_val = np.inf, -np.inf
    min_word = max_word = None
    completed = 0
    for length, arr in _level_products(s, max_len, budget):
        vals = _batch_rho(arr) ** (1.0 / length)
        j = int(np.argmin(vals))
        if vals[j] < min_val:
            min_val = float(vals[j])
            min_word = word_from_index(j, length, s.num_matrices)
        j = int(np.argmax(vals))
        if vals[j] > max_val:
            max_val = float(vals[j])
            max_word = word_from_index(j, length, s.num_matrices)
        completed = length
    if completed == 0:
        raise BudgetExceededError(
            f"word enumeration at length 1 already exceeds the budget {budget}"
        )
    return min_val, min_word, max_val, max_word, completed, completed < max_len


def periodic_stability_probe(
    s: MatrixSet, max_len: int, budget: int = ENUM_BUDGET
) -> WordProbeResult:
    """Largest averaged spectral radius over all words up to max_len.

    Every periodic switching sequence with period <= max_len is stable iff
    this maximum is below 1; the verdict keeps the so-far qualifier since
    longer words are unexplored.
    """
    _, _, max_val, max_word, completed, truncated = _rho_extremes(s, max_len, budget)
    stable = max_val < 1.0 - PROBE_MARGIN
    return WordProbeResult(
        objective="max-over-words",
        best_word=max_word,
        best_value=max_val,
        depth=completed,
        verdict="periodically-stable-so-far" if stable else "not-periodically-stable",
        truncated=truncated,
    )


def consistent_convergence_probe(
    s: MatrixSet, max_len: int, budget: int = ENUM_BUDGET
) -> WordProbeResult:
    """Smallest averaged spectral radius over all words up to max_len.

    A single word with rho(S_w) < 1 makes the periodic repetition of w drive
    every initial vector to zero, so finding one certifies consistent
    convergence; not finding one within max_len proves nothing.
    """
    min_val, min_word, _, _, completed, truncated = _rho_extremes(s, max_len, budget)
    found = min_val < 1.0 - PROBE_MARGIN
    return WordProbeResult(
        objective="min-over-words",
        best_word=min_word,
        best_value=min_val,
        depth=completed,
        verdict="consistently-convergent" if found else "not-found",
        truncated=truncated,
    )


@dataclass
class FinitenessReport:
    """Gap between the best word's growth rate and the deep norm bound.

    When the lower bound achieved by a concrete word meets the upper bound
    from deep norm enumeration, that word attains the joint spectral radius
    up to the gap: finiteness evidence at tolerance 1e-6.
    """

    max_len: int
    jsr_depth: int
    lower: float
    lower_word: tuple[int, ...]
    upper: float
    gap: float
    finiteness_evidence: bool
    truncated: bool


def spectral_finiteness_probe(
    s: MatrixSet, max_len: int, jsr_depth: int, budget: int = ENUM_BUDGET
) -> FinitenessReport:
    shallow = jsr_bounds(s, max_len, budget)
    deep = jsr_bounds(s, jsr_depth, budget)
    gap = deep.upper - shallow.lower
    return FinitenessReport(
        max_len=max_len,
        jsr_depth=jsr_depth,
        lower=shallow.lower,
        lower_word=shallow.lower_word,
        upper=deep.upper,
        gap=float(gap),
        finiteness_evidence=bool(gap < FINITENESS_GAP_TOL),
        truncated=shallow.truncated or deep.truncated,
    )


@dataclass
class GreedySearchResult:
    """Outcome of the blockwise greedy norm-minimizing switching search."""

    success: bool
    word: np.ndarray
    steps: int
    final_norm: float
    block_norms: np.ndarray
    failure_reason: str | None = None


def greedy_pointwise_search(
    s: MatrixSet,
    x,
    lookahead: int,
    max_steps: int,
    eps: float,
    budget: int = ENUM_BUDGET,
) -> GreedySearchResult:
    """Stabilize one vector by greedily appending norm-minimizing blocks.

    Each round scores every word of length `lookahead` by the norm it leaves
    and appends the best one, breaking ties toward the lexicographically
    smallest word. Success is a norm below eps within max_steps symbols
    (mid-block prefixes count); three consecutive blocks without strict
    decrease abandon the search with the trace collected so far.
    """
    if lookahead < 1:
        raise ValueError("lookahead must be at least 1")
    k, d = s.num_matrices, s.dim
    if k**lookahead > budget:
        raise BudgetExceededError(
            f"{k}^{lookahead} lookahead words exceed the budget {budget}"
        )
    blocks = s.matrices.copy()
    for _ in range(lookahead - 1):
        blocks = np.matmul(blocks[:, None], s.matrices[None]).reshape(-1, d, d)

    v = as_row_vector(x, d).copy()
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("initial vector must be nonzero")
    word: list[int] = []
    block_norms: list[float] = []
    stall = 0

    def _result(success, reason=None):
        return GreedySearchResult(
            success=success,
            word=np.array(word, dtype=np.int64),
            steps=len(word),
            final_norm=float(np.linalg.norm(v)),
            block_norms=np.array(block_norms),
            failure_reason=reason,
        )

    if norm < eps:
        return _result(True)
    while len(word) + lookahead <= max_steps:
        scores = np.linalg.norm(np.einsum("e,meh->mh", v, blocks), axis=1)
        digits = word_from_index(int(np.argmin(scores)), lookahead, k)
        for sym in digits:
            v = v @ s.matrices[sym - 1]
            word.append(int(sym))
            if float(np.linalg.norm(v)) < eps:
                block_norms.append(float(np.linalg.norm(v)))
                return _result(True)
        new_norm = float(np.linalg.norm(v))
        block_norms.append(new_norm)
        stall = stall + 1 if new_norm >= norm else 0
        norm = new_norm
        if stall >= 3:
            return _result(False, "no strict decrease over 3 consecutive blocks")
    return _result(False, f"norm still {norm:.3g} after {len(word)} steps")


@dataclass
class EquivalenceReport:
    """Paired pointwise/exponential fractions over many initial vectors.

    For product-bounded families the two classifications should agree; the
    harness samples one batch of trajectories, scores every initial vector
    on that same batch, and reports the per-initial fraction pairs plus the
    worst discrepancy. gate_passed reflects the boundedness probe; when it
    fails the estimates still run but the equivalence claim has no backing
    hypothesis and the report says so.
    """

    trials: int
    horizon: int
    num_initials: int
    seed: int
    eps: float
    delta: float
    gate: BoundednessReport
    gate_passed: bool
    initials: np.ndarray
    fractions_converged: np.ndarray
    fractions_exponential: np.ndarray
    converged_counts: np.ndarray
    exponential_counts: np.ndarray
    max_discrepancy: float
    positive_implies_exponential: bool
    equivalence_evidence: bool
    warnings: tuple[str, ...] = field(default_factory=tuple)


def pointwise_equivalence_harness(
    m: MJLS,
    trials: int,
    horizon: int,
    num_initials: int,
    seed: int,
    eps: float = EPS_DEFAULT,
    delta: float = DELTA_DEFAULT,
    gate_depth: int = GATE_DEPTH_DEFAULT,
    budget: int = ENUM_BUDGET,
) -> EquivalenceReport:
    gate = boundedness_probe(m.system, gate_depth, budget, prune=True)
    gate_passed = gate.verdict == "bounded-so-far"
    notes: list[str] = []
    if not gate_passed:
        notes.append(
            "product boundedness not established (probe verdict "
            f"{gate.verdict!r}); equivalence of the two classifications is "
            "not guaranteed for this family"
        )
    trajs = _symbol_paths(m, trials, horizon, seed)
    initials = unit_vectors(m.system.dim, num_initials, seed, stream_offset=3)
    fc = np.empty(num_initials)
    fe = np.empty(num_initials)
    cc = np.empty(num_initials, dtype=np.int64)
    ec = np.empty(num_initials, dtype=np.int64)
    for i, x in enumerate(initials):
        hist = _vector_histories(m.system, trajs, x)
        rep = _build_report("vector", x, trials, horizon, seed, eps, delta, hist)
        fc[i] = rep.fraction_converged
        fe[i] = rep.fraction_exponential
        cc[i] = rep.converged_count
        ec[i] = rep.exponential_count
    implied = bool(np.all((fc == 0.0) | (fe > 0.0)))
    return EquivalenceReport(
        trials=trials,
        horizon=horizon,
        num_initials=num_initials,
        seed=seed,
        eps=eps,
        delta=delta,
        gate=gate,
        gate_passed=gate_passed,
        initials=initials,
        fractions_converged=fc,
        fractions_exponential=fe,
        converged_counts=cc,
        exponential_counts=ec,
        max_discrepancy=float(np.abs(fc - fe).max()),
        positive_implies_exponential=implied,
        equivalence_evidence=gate_passed and implied,
        warnings=tuple(notes),
    )


@dataclass
class AlmostSureReport:
    """Tail decay fits across trajectories under a periodic-stability gate.

    evidence holds when the word probe found every short word contracting
    and every sampled trajectory's product norm decays at rate delta. The
    fits are reported raw either way.
    """

    trials: int
    horizon: int
    seed: int
    delta: float
    probe: WordProbeResult
    gate_passed: bool
    tail_fits: np.ndarray
    max_tail_fit: float
    evidence: bool
    warnings: tuple[str, ...] = field(default_factory=tuple)


def almost_sure_exponential_estimate(
    m: MJLS,
    trials: int,
    horizon: int,
    seed: int,
    delta: float = DELTA_DEFAULT,
    probe_len: int = PROBE_LEN_DEFAULT,
    budget: int = ENUM_BUDGET,
) -> AlmostSureReport:
    probe = periodic_stability_probe(m.system, probe_len, budget)
    gate_passed = probe.verdict == "periodically-stable-so-far"
    notes: list[str] = []
    if not gate_passed:
        notes.append(
            f"periodic stability probe failed at max_len {probe_len} "
            f"(max averaged spectral radius {probe.best_value:.6g}); the "
            "almost-sure decay hypothesis is not established"
        )
    trajs = _symbol_paths(m, trials, horizon, seed)
    fits = _tail_slopes(_matrix_histories(m.system, trajs))
    max_fit = float(fits.max())
    return AlmostSureReport(
        trials=trials,
        horizon=horizon,
        seed=seed,
        delta=delta,
        probe=probe,
        gate_passed=gate_passed,
        tail_fits=fits,
        max_tail_fit=max_fit,
        evidence=gate_passed and max_fit < -delta,
        warnings=tuple(notes),
    )


@dataclass
class DiagonalShortcutReport:
    """All-ones pointwise estimate versus the consistent estimate.

    For diagonal families the all-ones vector dominates every coordinate, so
    driving it to zero drives the whole product norm to zero; the report
    checks that the two positivity verdicts agree on matched trajectories.
    """

    pointwise: ConvergenceReport
    consistent: ConvergenceReport
    pointwise_positive: bool
    consistent_positive: bool
    agree: bool


def diagonal_shortcut_check(
    m: MJLS,
    trials: int,
    horizon: int,
    seed: int,
    eps: float = EPS_DEFAULT,
    delta: float = DELTA_DEFAULT,
) -> DiagonalShortcutReport:
    d = m.system.dim
    off = m.system.matrices * (1.0 - np.eye(d))
    if np.abs(off).max() > 0.0:
        bad = int(np.argmax(np.abs(off).reshape(m.system.num_matrices, -1).max(1)))
        raise ValueError(f"matrix {bad + 1} is not diagonal")
    trajs = _symbol_paths(m, trials, horizon, seed)
    ones = np.ones(d)
    pw = _build_report(
        "vector", ones, trials, horizon, seed, eps, delta,
        _vector_histories(m.system, trajs, ones),
    )
    cs = _build_report(
        "matrix", None, trials, horizon, seed, eps, delta,
        _matrix_histories(m.system, trajs),
    )
    return DiagonalShortcutReport(
        pointwise=pw,
        consistent=cs,
        pointwise_positive=pw.fraction_converged > 0.0,
        consistent_positive=cs.fraction_converged > 0.0,
        agree=(pw.fraction_converged > 0.0) == (cs.fraction_converged > 0.0),
    )
