"""Fixed-stride random walks on the space of pure states.

A walk starts from a Haar-random state of dimension D = 2**qubits and
takes ``steps`` tangent steps of fixed Fubini-Study length ``delta_s``,
each along a fresh uniformly random direction of the local metric
eigenframe.  After every step the span

    L_t = fs_distance(walker, start)

is recorded.  The walk has reached the far edge when its final span
comes within ``epsilon`` of the maximal distance pi/2.

Two success margins are supported.  Mode ``"paper"`` ties the margin to
the dimension: epsilon = pi/2 - arccos(1/sqrt(D)), i.e. the walker only
has to get as far from the start as a typical independent random state
would already be.  Mode ``"fixed"`` uses an explicit value.

The per-trial critical stride is the smallest delta_s at which a walk
from the trial's initial state reaches the far edge, located by probing
an ascending stride grid with fresh step directions per probe; see
:func:`critical_step_for_trial`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .hilbert import (
    HALF_PI,
    DegenerateFrameError,
    StateVector,
    fs_distance,
    metric_tensor,
    random_state,
    random_tangent_step,
    state_from_angles,
    to_coords,
)

__all__ = [
    "WalkConfig",
    "WalkRecord",
    "UnitaryProbe",
    "HeuristicModel",
    "TrialCritical",
    "CriticalStepResult",
    "WalkFailureError",
    "paper_epsilon",
    "run_walk",
    "critical_step_for_trial",
    "critical_step_length",
    "dimension_factor",
    "heuristic_span",
    "heuristic_critical_step",
    "unitary_span",
]

#: Default relative width (in units of pi/2) to which the per-trial
#: critical stride is bracketed.
BRACKET_REL_WIDTH = 1e-3

EPSILON_MODES = ("paper", "fixed")

_DEGENERATE_RETRIES = 8
_NUDGE_SCALE = 1e-9


class WalkFailureError(RuntimeError):
    """A walk step could not be completed."""


def paper_epsilon(qubits: int) -> float:
    """Success margin at which a typical random state already counts as far.

    Two independent Haar states of dimension D have root-mean-square
    overlap 1/sqrt(D), i.e. typical separation arccos(1/sqrt(D)); the
    margin is the gap between that and the maximum pi/2.
    """
    if qubits < 1:
        raise ValueError(f"qubits must be >= 1, got {qubits}")
    return float(HALF_PI - np.arccos(2.0 ** (-qubits / 2.0)))


@dataclass(frozen=True)
class WalkConfig:
    """Parameters of one walk.

    ``epsilon`` may be omitted in mode "paper" (it is then filled in
    from the qubit count) but must be given in mode "fixed".  With
    ``exact_step`` the raw tangent displacement is rescaled by a root
    find so each realized step distance equals delta_s to relative 1e-6,
    instead of only to first order.
    """

    qubits: int
    steps: int
    delta_s: float
    epsilon_mode: str = "paper"
    epsilon: float | None = None
    exact_step: bool = False

    def __post_init__(self) -> None:
        if self.qubits < 1:
            raise ValueError(f"qubits must be >= 1, got {self.qubits}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if not 0.0 < self.delta_s <= HALF_PI:
            raise ValueError(f"delta_s must lie in (0, pi/2], got {self.delta_s}")
        if self.epsilon_mode == "paper":
            want = paper_epsilon(self.qubits)
            if self.epsilon is None:
                object.__setattr__(self, "epsilon", want)
            elif abs(self.epsilon - want) > 1e-12:
                raise ValueError(
                    "epsilon in paper mode is determined by the qubit count"
                )
        elif self.epsilon_mode == "fixed":
            if self.epsilon is None:
                raise ValueError("fixed epsilon mode requires an epsilon value")
            if not 0.0 < self.epsilon <= HALF_PI:
                raise ValueError(f"epsilon must lie in (0, pi/2], got {self.epsilon}")
        else:
            raise ValueError(f"unknown epsilon_mode {self.epsilon_mode!r}")

    @property
    def dim(self) -> int:
        return 2**self.qubits


@dataclass(frozen=True, eq=False)
class WalkRecord:
    """Spans L_0 .. L_M of one walk and its success flag."""

    spans: np.ndarray
    reached: bool

    def __post_init__(self) -> None:
        spans = np.asarray(self.spans, dtype=np.float64).copy()
        spans.flags.writeable = False
        object.__setattr__(self, "spans", spans)

    @property
    def final_span(self) -> float:
        return float(self.spans[-1])


def run_walk(
    initial: StateVector, config: WalkConfig, rng: np.random.Generator
) -> WalkRecord:
    """Walk ``config.steps`` strides from ``initial`` and record spans.

    Each step: express the walker in chart coordinates, eigendecompose
    the metric there, draw a random tangent direction of length delta_s,
    displace the angles, and renormalize.  spans[0] is 0 and spans[t]
    the Fubini-Study distance of the walker after t steps back to the
    start.  Given the same initial state and generator state the record
    is reproduced bit for bit.
    """
    if initial.dim != config.dim:
        raise ValueError(
            f"initial state dimension {initial.dim} does not match config ({config.dim})"
        )
    spans = np.zeros(config.steps + 1)
    state = initial
    for t in range(1, config.steps + 1):
        state = _advance(state, config.delta_s, config.exact_step, rng)
        spans[t] = fs_distance(initial, state)
    reached = (HALF_PI - spans[-1]) <= config.epsilon
    return WalkRecord(spans=spans, reached=bool(reached))


def _advance(
    state: StateVector, delta_s: float, exact_step: bool, rng: np.random.Generator
) -> StateVector:
    coords = to_coords(state)
    theta = coords.theta
    frame = metric_tensor(coords)
    for _ in range(_DEGENERATE_RETRIES):
        try:
            step = random_tangent_step(frame, delta_s, rng)
            break
        except DegenerateFrameError:
            # Singular chart point: nudge infinitesimally and retry.
            nudged = state_from_angles(theta + _NUDGE_SCALE * rng.standard_normal(theta.shape))
            coords = to_coords(nudged)
            theta = coords.theta
            frame = metric_tensor(coords)
    else:
        raise WalkFailureError("metric frame stayed fully degenerate after retries")
    if exact_step:
        return _exact_stride(state, theta, step.d_theta, delta_s)
    return state_from_angles(theta + step.d_theta)


def _exact_stride(
    state: StateVector, theta: np.ndarray, d_theta: np.ndarray, delta_s: float
) -> StateVector:
    """Rescale the displacement so the realized distance equals delta_s.

    Scans outward along the ray theta + c * d_theta until the realized
    distance crosses the target, then root-finds the crossing (relative
    accuracy much better than 1e-6).  Strides near pi/2 may not be
    realizable along a given ray at all; in that case the step falls
    back to the scale that maximizes the realized distance.
    """

    def realized(c: float) -> float:
        return fs_distance(state, state_from_angles(theta + c * d_theta))

    lo = 0.0
    for hi in np.arange(0.25, 64.25, 0.25):
        if realized(hi) >= delta_s:
            if realized(hi) == delta_s:
                c = float(hi)
            else:
                c = float(
                    brentq(lambda x: realized(x) - delta_s, lo, hi, xtol=1e-12, rtol=1e-14)
                )
            return state_from_angles(theta + c * d_theta)
        lo = float(hi)
    best = minimize_scalar(
        lambda x: -realized(x), bounds=(0.0, 64.0), method="bounded",
        options={"xatol": 1e-9},
    )
    return state_from_angles(theta + float(best.x) * d_theta)


def _as_seedseq(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, (int, np.integer)):
        return np.random.SeedSequence(int(seed) % 2**64)
    return np.random.SeedSequence(seed)


@dataclass(frozen=True)
class TrialCritical:
    """Critical stride of a single trial."""

    value: float
    censored: bool


def critical_step_for_trial(
    qubits: int,
    steps: int,
    trial_seed,
    *,
    epsilon_mode: str = "paper",
    epsilon: float | None = None,
    exact_step: bool = False,
    bracket_rel_width: float = BRACKET_REL_WIDTH,
) -> TrialCritical:
    """Smallest stride at which this trial's walk reaches the far edge.

    The trial's substream is split once into an initial-state stream and
    a direction stream.  Candidate strides are scanned upward on an
    additive grid of step ``bracket_rel_width * pi/2`` starting at the
    triangle-inequality floor (pi/2 - epsilon) / steps, below which no
    walk of ``steps`` strides can reach the far edge.  Each probe runs a
    full walk drawing fresh directions from the trial's stream, and the
    first succeeding stride is returned; every returned value is thereby
    bracketed between the last failing probe and itself, a bracket of
    width at most bracket_rel_width * pi/2.  The top candidate is pi/2
    exactly; a trial that still fails there is censored: recorded at
    pi/2 and flagged, to be excluded from averages by the caller.

    Results are reproducible bit for bit from (seed, qubit count, steps,
    stride grid): probe order is deterministic, and the direction stream
    is consumed sequentially across probes.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    ss = _as_seedseq(trial_seed)
    init_ss, dir_ss = ss.spawn(2)
    initial = random_state(2**qubits, np.random.default_rng(init_ss))
    rng = np.random.default_rng(dir_ss)

    def reaches(delta_s: float) -> bool:
        cfg = WalkConfig(
            qubits=qubits,
            steps=steps,
            delta_s=delta_s,
            epsilon_mode=epsilon_mode,
            epsilon=epsilon,
            exact_step=exact_step,
        )
        return run_walk(initial, cfg, rng).reached

    eps = paper_epsilon(qubits) if epsilon_mode == "paper" else float(epsilon)
    grid = bracket_rel_width * HALF_PI
    s = (HALF_PI - eps) / steps
    while s < HALF_PI:
        if reaches(s):
            return TrialCritical(value=float(s), censored=False)
        s += grid
    if reaches(HALF_PI):
        return TrialCritical(value=float(HALF_PI), censored=False)
    return TrialCritical(value=float(HALF_PI), censored=True)


@dataclass(frozen=True, eq=False)
class CriticalStepResult:
    """Per-trial critical strides with censoring information.

    ``mean`` and ``std_error`` are computed over uncensored trials only;
    censored trials sit in ``values`` at pi/2 with their flag set.  With
    every trial censored both statistics are NaN.
    """

    values: np.ndarray
    censored: np.ndarray
    mean: float
    std_error: float

    def __post_init__(self) -> None:
        for name in ("values", "censored"):
            a = np.asarray(getattr(self, name)).copy()
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    @property
    def n_trials(self) -> int:
        return self.values.shape[0]

    @property
    def censored_count(self) -> int:
        return int(np.count_nonzero(self.censored))


def critical_step_length(
    qubits: int,
    steps: int,
    trials: int,
    seed,
    *,
    epsilon_mode: str = "paper",
    epsilon: float | None = None,
    exact_step: bool = False,
    bracket_rel_width: float = BRACKET_REL_WIDTH,
) -> CriticalStepResult:
    """Mean critical stride over independent trials.

    ``seed`` may be an integer or a SeedSequence; per-trial substreams
    are spawned from it, so any scheduling of the trials (including
    none) yields identical results, trial by trial.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    base = _as_seedseq(seed)
    outcomes = [
        critical_step_for_trial(
            qubits,
            steps,
            trial_ss,
            epsilon_mode=epsilon_mode,
            epsilon=epsilon,
            exact_step=exact_step,
            bracket_rel_width=bracket_rel_width,
        )
        for trial_ss in base.spawn(trials)
    ]
    values = np.array([t.value for t in outcomes])
    censored = np.array([t.censored for t in outcomes])
    kept = values[~censored]
    if kept.size > 0:
        mean = float(kept.mean())
        std_error = float(kept.std(ddof=1) / math.sqrt(kept.size)) if kept.size > 1 else 0.0
    else:
        mean = math.nan
        std_error = math.nan
    return CriticalStepResult(values=values, censored=censored, mean=mean, std_error=std_error)


def dimension_factor(qubits: int) -> float:
    """Empirical reachable-fraction factor f = 10.5 * qubits**-1.5."""
    if qubits < 1:
        raise ValueError(f"qubits must be >= 1, got {qubits}")
    return 10.5 * qubits**-1.5


@dataclass(frozen=True)
class HeuristicModel:
    """Diffusive span estimate and the factor it is built from."""

    dimension_factor: float
    span_estimate: float

    @classmethod
    def evaluate(cls, delta_s: float, steps: int, qubits: int) -> "HeuristicModel":
        return cls(
            dimension_factor=dimension_factor(qubits),
            span_estimate=heuristic_span(delta_s, steps, qubits),
        )


def heuristic_span(delta_s: float, steps: int, qubits: int) -> float:
    """Diffusive estimate (2/pi) * delta_s * sqrt(steps * f(qubits)).

    Normalized so that a span of 1 means the far edge pi/2; the factor
    f(qubits) shrinks the effective reachable volume as the register
    grows.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    return (2.0 / np.pi) * delta_s * math.sqrt(steps * dimension_factor(qubits))


def heuristic_critical_step(steps: int, qubits: int) -> float:
    """Stride at which the heuristic span reaches the far edge.

    Inverts heuristic_span(...) == 1: delta_s = (pi/2) / sqrt(steps * f).
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    return HALF_PI / math.sqrt(steps * dimension_factor(qubits))


@dataclass(frozen=True, eq=False)
class UnitaryProbe:
    """A short burst of Hamiltonian evolutions applied in sequence.

    Each Hamiltonian acts for time ``dt`` (hbar = 1).  For small dt the
    Fubini-Study distance travelled from a state psi approaches
    dt * sigma, where sigma is the dispersion of the summed generator in
    psi; :func:`unitary_span` returns both sides of that comparison.
    """

    hamiltonians: tuple
    dt: float

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        hams = tuple(np.asarray(h, dtype=np.complex128) for h in self.hamiltonians)
        if not hams:
            raise ValueError("at least one Hamiltonian is required")
        d = hams[0].shape[0] if hams[0].ndim == 2 else 0
        frozen = []
        for h in hams:
            if h.ndim != 2 or h.shape != (d, d) or d == 0:
                raise ValueError("Hamiltonians must be square matrices of equal size")
            if not np.allclose(h, h.conj().T, atol=1e-12, rtol=0.0):
                raise ValueError("Hamiltonians must be Hermitian to 1e-12")
            h = h.copy()
            h.flags.writeable = False
            frozen.append(h)
        object.__setattr__(self, "hamiltonians", tuple(frozen))

    @property
    def dim(self) -> int:
        return self.hamiltonians[0].shape[0]

    def generator_dispersion(self, psi: StateVector) -> float:
        """Dispersion sqrt(<H^2> - <H>^2) of the summed generator in psi."""
        if psi.dim != self.dim:
            raise ValueError(f"dimension mismatch: {psi.dim} != {self.dim}")
        total = sum(self.hamiltonians)
        hpsi = total @ psi.amplitudes
        e1 = float(np.vdot(psi.amplitudes, hpsi).real)
        e2 = float(np.vdot(hpsi, hpsi).real)
        return math.sqrt(max(e2 - e1 * e1, 0.0))


def _evolve(h: np.ndarray, dt: float, phi: np.ndarray) -> np.ndarray:
    # exp(-i dt H) phi through the eigendecomposition of Hermitian H
    w, v = np.linalg.eigh(h)
    return v @ (np.exp(-1j * dt * w) * (v.conj().T @ phi))


def unitary_span(psi: StateVector, probe: UnitaryProbe) -> tuple[float, float]:
    """Span travelled under a probe, and its dispersion-based prediction.

    Applies exp(-i dt H_j) for each Hamiltonian in sequence and returns
    (realized Fubini-Study distance from psi, dt * dispersion of the
    summed generator in psi).  The two agree to first order in dt.
    """
    if psi.dim != probe.dim:
        raise ValueError(f"dimension mismatch: {psi.dim} != {probe.dim}")
    phi = psi.amplitudes
    for h in probe.hamiltonians:
        phi = _evolve(h, probe.dt, phi)
    evolved = StateVector.from_array(phi)
    return fs_distance(psi, evolved), probe.dt * probe.generator_dispersion(psi)
