"""Quantum judge, dichotomy search for eigenvalues, and the quantum selector.

The judge answers "is there an eigenvalue below the threshold?".  The
Hamiltonian is rescaled so the trial threshold maps to pi, a random state is
amplified towards the Heaviside-marked subspace, and the mark-0 probability
after one more filter pass is compared with a cut.  Bisection over the
threshold then brackets the lowest eigenvalue.

The selector rescales so the wanted eigenvalue maps to 0, amplifies towards
the coin-0 subspace of the frozen Dirac filter and post-selects the coin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .amplify import FixedPointConfig, Initializer, MarkingOracle, fixed_point_amplify
from .dirac import CoinConfig, dirac_frozen_circuit, frozen_layout as coin_layout
from .errors import ConfigError, DegenerateInputError, ValidationError
from .hamiltonian import AffineSpectrumMap, PauliHamiltonian, check_dense, hamiltonian_set, spectrum_map
from .heaviside import FilterConfig, filter_circuit, filter_layout
from .reference import SpectrumReference, brute_force_eigs
from .state import StateVector, project_pattern, reduced_physical_state, sample_probability

EXISTS = "below-threshold-exists"
NONE_BELOW = "none-below"


def judge_target(R: int) -> tuple[float, float]:
    """Normalized interval for the judge: ``[0, 2pi - 2pi/2**(R-1)]``.

    One representation bin is kept free above the spectrum so every shifted
    Hamiltonian still stays below ``2pi``.
    """
    return 0.0, 2 * math.pi - 2 * math.pi / 2 ** (R - 1)


SELECTOR_TARGET = (-math.pi / 2, math.pi / 2)


def default_p_min(n_qubits: int) -> float:
    return 1 / (2 * 2**n_qubits)


def _derived_seed(*parts: int) -> int:
    return int(np.random.SeedSequence([int(p) & 0xFFFFFFFF for p in parts]).generate_state(1)[0])


@dataclass
class JudgeVerdict:
    mark0_probability: float
    decision: str
    shift_index: int
    probabilities: list[float]
    oracle_calls: int
    threshold_raw: float | None = None

    @property
    def exists(self) -> bool:
        return self.decision == EXISTS


def quantum_judge(
    h_normalized: PauliHamiltonian,
    config: FilterConfig,
    seed: int,
    amp: FixedPointConfig | None = None,
    strategy: str = "frozen",
    decision_cut: float = 0.5,
    shots: int = 0,
    init_kind: str = "phase",
) -> JudgeVerdict:
    """Decide whether ``h_normalized`` has an eigenvalue below pi.

    The spectrum must already lie in ``judge_target(config.R)``.  Each shifted
    Hamiltonian ``H_w`` gets its own amplified run; the verdict uses the
    largest mark-0 probability.
    """
    check_dense(h_normalized)
    n = h_normalized.n_qubits
    amp = amp or FixedPointConfig(0.1, default_p_min(n))
    layout = filter_layout(n, config, strategy)
    init = Initializer.random(layout, seed, init_kind)
    rng = np.random.default_rng(_derived_seed(seed, 7))
    probs, calls = [], 0
    for hw in hamiltonian_set(h_normalized, config.W, config.R):
        oracle = MarkingOracle(filter_circuit(layout, hw, config, strategy))
        run = fixed_point_amplify(init, oracle, amp)
        probs.append(sample_probability(run.probability, shots, rng))
        calls += run.oracle_calls
    w = int(np.argmax(probs))
    best = probs[w]
    return JudgeVerdict(best, EXISTS if best > decision_cut else NONE_BELOW, w, probs, calls)


@dataclass
class JudgeStep:
    lo: float
    hi: float
    threshold: float
    map: AffineSpectrumMap
    eps_raw: float
    verdict: JudgeVerdict


@dataclass
class DichotomyTrace:
    brackets: list[tuple[float, float]]
    E_c: float
    iterations: int
    eps: float
    steps: list[JudgeStep] = field(default_factory=list)
    eps_v: float | None = None
    oracle_calls: int = 0
    gap: float | None = None

    @property
    def resolution(self) -> float:
        """Largest raw-unit judge uncertainty met along the way."""
        return max((s.eps_raw for s in self.steps), default=self.eps)


def _threshold_map(bounds, threshold: float, config: FilterConfig) -> AffineSpectrumMap:
    return spectrum_map(bounds, judge_target(config.R), pin=(threshold, math.pi))


def _vote(verdicts: list[JudgeVerdict]) -> JudgeVerdict:
    yes = sum(v.exists for v in verdicts)
    pick = [v for v in verdicts if v.exists == (2 * yes > len(verdicts))]
    best = max(pick, key=lambda v: v.mark0_probability)
    best.oracle_calls = sum(v.oracle_calls for v in verdicts)
    return best


def _bisect(config, eps, bounds, judge, search=None) -> DichotomyTrace:
    """Halve ``search`` (default ``bounds``) ``ceil(log2(width / eps))`` times.

    Normalization maps always use the full spectrum ``bounds`` so every
    eigenvalue stays inside the judge's target interval.
    """
    lo, hi = search or bounds
    if not hi > lo:
        return DichotomyTrace([(lo, hi)], 0.5 * (lo + hi), 0, eps)
    iterations = max(0, math.ceil(math.log2((hi - lo) / eps)))
    brackets = [(lo, hi)]
    steps = []
    calls = 0
    for k in range(iterations):
        m = 0.5 * (lo + hi)
        amap = _threshold_map(bounds, m, config)
        verdict = judge(amap, m, k)
        verdict.threshold_raw = m
        calls += verdict.oracle_calls
        steps.append(JudgeStep(lo, hi, m, amap, amap.inverse_width(config.eps), verdict))
        if verdict.exists:
            hi = m
        else:
            lo = m
        brackets.append((lo, hi))
    return DichotomyTrace(brackets, 0.5 * (lo + hi), iterations, eps, steps, oracle_calls=calls)


def default_dichotomy_eps(bounds, config: FilterConfig) -> float:
    """Judge resolution ``config.eps`` expressed in raw units at the first midpoint."""
    lo, hi = bounds
    amap = _threshold_map(bounds, 0.5 * (lo + hi), config)
    return amap.inverse_width(config.eps)


def dichotomy_lowest(
    h_raw: PauliHamiltonian,
    config: FilterConfig,
    seed: int,
    eps: float | None = None,
    bounds: tuple[float, float] | None = None,
    amp: FixedPointConfig | None = None,
    strategy: str = "frozen",
    repeats: int = 1,
    shots: int = 0,
    reference: SpectrumReference | None = None,
    decision_cut: float = 0.5,
) -> DichotomyTrace:
    """Bisect ``[lo0, hi0]`` (crude Pauli bound by default) down to width ``eps``.

    Every step maps the midpoint to pi and asks the judge; ``repeats`` > 1
    takes a majority vote over independently seeded judge runs.
    """
    check_dense(h_raw)
    if h_raw.is_zero():
        raise ValidationError("cannot search the spectrum of the zero operator")
    bounds = tuple(bounds or h_raw.crude_bounds())
    eps = eps or default_dichotomy_eps(bounds, config)
    if not eps > 0:
        raise ConfigError("eps must be positive")

    def judge(amap, m, k):
        hn = amap.transform(h_raw)
        return _vote([
            quantum_judge(hn, config, _derived_seed(seed, k, r), amp, strategy, decision_cut, shots)
            for r in range(repeats)
        ])

    trace = _bisect(config, eps, bounds, judge)
    if reference is not None:
        trace.eps_v = abs(trace.E_c - reference.ground)
    return trace


def band_judge(
    h_raw: PauliHamiltonian,
    lo_threshold: float,
    hi_threshold: float,
    config: FilterConfig,
    seed: int,
    bounds: tuple[float, float] | None = None,
    amp: FixedPointConfig | None = None,
    strategy: str = "frozen",
) -> JudgeVerdict:
    """Is there an eigenvalue in ``[lo_threshold, hi_threshold)``?

    ``hi_threshold`` maps to pi; outcomes below the image of ``lo_threshold``
    are rejected through the filter's ``x_min``.
    """
    if not lo_threshold < hi_threshold:
        raise ValidationError("band needs lo_threshold < hi_threshold")
    bounds = tuple(bounds or h_raw.crude_bounds())
    amap = _threshold_map(bounds, hi_threshold, config)
    verdict = quantum_judge(amap.transform(h_raw), _band_config(amap, lo_threshold, config), seed, amp, strategy)
    verdict.threshold_raw = hi_threshold
    return verdict


def _band_config(amap: AffineSpectrumMap, lo_threshold: float, config: FilterConfig) -> FilterConfig:
    y = amap.apply(lo_threshold)
    x_min = min(max(0, math.ceil(y / config.bin_width)), config.half - 1)
    return config.with_(x_min=x_min)


def next_eigenvalue(
    h_raw: PauliHamiltonian,
    E_k: float,
    config: FilterConfig,
    seed: int,
    eps: float | None = None,
    margin: float | None = None,
    bounds: tuple[float, float] | None = None,
    amp: FixedPointConfig | None = None,
    strategy: str = "frozen",
) -> DichotomyTrace:
    """Lowest eigenvalue above ``E_k + margin`` by bisection with band judges.

    ``margin`` defaults to twice the judge resolution in raw units.
    """
    bounds = tuple(bounds or h_raw.crude_bounds())
    eps = eps or default_dichotomy_eps(bounds, config)
    margin = margin if margin is not None else 2 * eps
    lo_edge = E_k + margin
    search = (lo_edge, bounds[1])

    def judge(amap, m, k):
        hn = amap.transform(h_raw)
        return quantum_judge(hn, _band_config(amap, lo_edge, config), _derived_seed(seed, 101, k), amp, strategy)

    if not search[1] > search[0]:
        raise ValidationError("no room above E_k inside the spectrum bounds")
    return _bisect(config, eps, bounds, judge, search)


def estimate_gap(ground: DichotomyTrace, excited: DichotomyTrace) -> DichotomyTrace:
    """Record a conservative gap on ``ground`` from the next eigenvalue's bisection.

    Both estimates may be off by their final half-width plus the judge
    resolution, so those are subtracted from the raw difference.
    """
    slack = sum(0.5 * (t.brackets[-1][1] - t.brackets[-1][0]) + t.resolution for t in (ground, excited))
    gap = excited.E_c - ground.E_c - slack
    if not gap > 0:
        raise ConfigError("bisection traces do not resolve a positive gap")
    ground.gap = gap
    return ground


@dataclass
class SelectorResult:
    physical_state: StateVector
    eps_s: float | None
    lambda_overlaps: np.ndarray | None
    success_probability: float
    coin: CoinConfig
    map: AffineSpectrumMap
    gap_source: str
    oracle_calls: int


def resolve_gap(gap: float | None, trace: DichotomyTrace | None, reference: SpectrumReference | None, E_g: float) -> tuple[float, str]:
    """Gap precedence: explicit value, then a bisection trace, then the exact spectrum."""
    if gap is not None:
        if not gap > 0:
            raise ConfigError(f"gap must be positive, got {gap}")
        return float(gap), "user"
    if trace is not None and trace.gap is not None:
        return float(trace.gap), "trace"
    if reference is not None:
        return reference.gap_at(E_g), "oracle"
    raise ConfigError("the selector needs a spectral gap: pass gap=, a trace with a gap, or a reference spectrum")


def quantum_selector(
    h_raw: PauliHamiltonian,
    E_g: float,
    seed: int,
    coin: CoinConfig | None = None,
    gap: float | None = None,
    trace: DichotomyTrace | None = None,
    reference: SpectrumReference | None = None,
    eps: float = 1e-7,
    K: int | None = None,
    bounds: tuple[float, float] | None = None,
    amp: FixedPointConfig | None = None,
    init_kind: str = "phase",
    qualified_tol: float = 1e-9,
) -> SelectorResult:
    """Project a random state onto the eigenspace of ``E_g``.

    Without an explicit ``coin`` the coin count is designed from the gap
    (in normalized units) and ``eps``; ``K`` below the required counter size
    raises CapacityError before any simulation.  ``eps_s`` is reported when
    a ``reference`` spectrum is available.
    """
    check_dense(h_raw)
    n = h_raw.n_qubits
    if h_raw.is_zero():
        raise ValidationError("cannot select from the zero operator")
    amap = spectrum_map(tuple(bounds or h_raw.crude_bounds()), SELECTOR_TARGET, pin=(E_g, 0.0))
    if coin is None:
        delta_raw, source = resolve_gap(gap, trace, reference, E_g)
        coin = CoinConfig.design(amap.apply_width(delta_raw), eps, n, K)
    else:
        source = "config"
    h = amap.transform(h_raw)
    layout = coin_layout(n, coin.K)
    oracle = MarkingOracle(dirac_frozen_circuit(layout, h, coin.M))
    init = Initializer.random(layout, seed, init_kind)
    run = fixed_point_amplify(init, oracle, amp or FixedPointConfig(0.1, default_p_min(n)))
    kept = project_pattern(run.output, layout, "mark", "0")
    if kept.norm() == 0.0:
        raise DegenerateInputError("post-selection on the coin found zero probability")
    physical = reduced_physical_state(kept.renormalized(), layout)
    eps_s = lambdas = None
    if reference is not None:
        eps_s = error_metrics(physical, reference, E_g=E_g, tol=qualified_tol)[1]
        lambdas = reference.overlaps(init.unitary[:, 0])
    return SelectorResult(physical, eps_s, lambdas, run.probability, coin, amap, source, run.oracle_calls)


def error_metrics(
    result,
    reference: SpectrumReference,
    E_c: float | None = None,
    E_g: float | None = None,
    tol: float = 1e-9,
) -> tuple[float | None, float | None]:
    """``(eps_v, eps_s)``; either is None when its inputs are missing.

    ``result`` may be a DichotomyTrace (for ``eps_v``), a SelectorResult or a
    physical StateVector (for ``eps_s``).  The qualified subspace is spanned
    by the eigenvectors within ``tol`` of ``E_g`` (default: the ground energy).
    """
    eps_v = eps_s = None
    if isinstance(result, DichotomyTrace):
        E_c = result.E_c
    if E_c is not None:
        eps_v = abs(E_c - reference.ground)
    state = result.physical_state if isinstance(result, SelectorResult) else result
    if isinstance(state, StateVector):
        if state.dim != reference.eigenvectors.shape[0]:
            raise ValidationError(f"state of dimension {state.dim} vs spectrum of size {reference.eigenvectors.shape[0]}")
        target = reference.ground if E_g is None else E_g
        idx = reference.qualified(target, tol)
        weight = reference.subspace_weight(state, idx) / max(state.norm() ** 2, 1e-300)
        eps_s = float(min(max(1 - weight, 0.0), 1.0))
    return eps_v, eps_s


def ground_state_pipeline(h_raw: PauliHamiltonian, config: FilterConfig, seed: int, **kw):
    """Judge-driven bisection followed by the selector at the estimated energy.

    The selector pins the bisection estimate; its gap is taken from the exact
    spectrum, so this helper is meant for desk-scale demonstrations.
    """
    ref = brute_force_eigs(h_raw)
    trace = dichotomy_lowest(h_raw, config, seed, reference=ref)
    sel = quantum_selector(h_raw, trace.E_c, seed, reference=ref, **kw)
    return trace, sel
