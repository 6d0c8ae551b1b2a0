"""Self-distillation chain over a fixed Gram spectrum.

Round t fits on the previous round's predictions. In rotated coordinates the
recurrence is z_{t+1} = A_t z_t with A_t = D (c_t I + D)^-1, so the whole
chain needs a single eigendecomposition. The chain stops at the first round
whose targets satisfy ||y_t||^2 <= K eps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .const import DEFAULT_MAX_ROUNDS
from .errors import CollapseCondition, CollapsedRound, OutOfRange, PreconditionViolation
from .kernels import Dataset, KernelSpec, anchored_mask, build_gram, kernel_vector
from .regression import (
    FitConfig,
    GramSystem,
    RegressionModel,
    fit,
    is_collapsed,
    prepare_system,
    solve_multiplier,
    training_error,
)
from .spectral import GramSpectrum, solve_shifted

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DistillationState:
    """Everything known about round t."""

    t: int
    y: NDArray[np.float64]
    z: NDArray[np.float64]
    c: float
    a_diag: NDArray[np.float64]
    b_diag: NDArray[np.float64]
    norm_z: float
    train_error_vs_eps: float
    train_error_vs_y0: float

    @property
    def norm_y(self) -> float:
        """Return ||y_t||."""
        return float(np.linalg.norm(self.y))


@dataclass(frozen=True)
class Collapse:
    """Marker for the first round whose targets collapsed."""

    t: int
    norm_sq: float
    threshold: float

    def as_error(self) -> CollapseCondition:
        """Return the equivalent exception."""
        return CollapseCondition(self.norm_sq, self.threshold, self.t)


def _make_state(
    system: GramSystem,
    t: int,
    y: NDArray[np.float64],
    z: NDArray[np.float64],
    c: float,
    b_prev: NDArray[np.float64] | None,
) -> DistillationState:
    d = system.spectrum.eigvals
    a_diag = d / (c + d)
    b_diag = a_diag.copy() if b_prev is None else b_prev * a_diag
    offset = system.anchored_error(y)
    fitted = system.embed(system.spectrum.unrotate(a_diag * z))
    residual = fitted - system.data.labels
    return DistillationState(
        t=t,
        y=y,
        z=z,
        c=c,
        a_diag=a_diag,
        b_diag=b_diag,
        norm_z=float(np.linalg.norm(z)),
        train_error_vs_eps=training_error(system.spectrum, z, c, n_samples=system.n_samples) + offset,
        train_error_vs_y0=float(residual @ residual) / system.n_samples,
    )


def initial_state(system: GramSystem, config: FitConfig) -> DistillationState:
    """Fit round 0 on the original labels.

    Raises CollapseCondition or InfeasibleTolerance when round 0 has no
    non-trivial solution.
    """
    y0 = np.array(system.data.labels)
    norm_sq = float(y0 @ y0)
    if is_collapsed(norm_sq, system.n_samples, config.epsilon):
        raise CollapseCondition(norm_sq, system.n_samples * config.epsilon, 0)
    z0 = system.rotate(y0)
    c0 = solve_multiplier(
        system.spectrum,
        z0,
        config,
        n_samples=system.n_samples,
        offset=system.anchored_error(y0),
    )
    _LOGGER.debug("Round 0: c=%.17g ||z||=%.17g", c0, float(np.linalg.norm(z0)))
    return _make_state(system, 0, y0, z0, c0, None)


def distill_step(
    system: GramSystem, prev: DistillationState, config: FitConfig
) -> DistillationState | Collapse:
    """Advance one round: y_{t+1} = V^T A_t V y_t, then solve c_{t+1}."""
    t = prev.t + 1
    z = prev.a_diag * prev.z
    y = system.embed(system.spectrum.unrotate(z))
    norm_sq = float(y @ y)
    threshold = system.n_samples * config.epsilon
    if is_collapsed(norm_sq, system.n_samples, config.epsilon):
        _LOGGER.debug("Round %d collapsed: ||y||^2=%.17g <= %.17g", t, norm_sq, threshold)
        return Collapse(t=t, norm_sq=norm_sq, threshold=threshold)
    c = solve_multiplier(
        system.spectrum,
        z,
        config,
        n_samples=system.n_samples,
        offset=system.anchored_error(y),
    )
    _LOGGER.debug("Round %d: c=%.17g ||z||=%.17g", t, c, float(np.linalg.norm(z)))
    return _make_state(system, t, y, z, c, prev.b_diag)


@dataclass(frozen=True, eq=False)
class DistillationTrace:
    """Recorded rounds of one chain."""

    system: GramSystem
    config: FitConfig
    states: tuple[DistillationState, ...]
    collapsed_at: int | None = None
    theory_origin: int = field(init=False)

    def __post_init__(self) -> None:
        """Locate the first round with no anchored targets."""
        origin = len(self.states)
        for state in self.states:
            if not np.any(state.y[self.system.anchored_index]):
                origin = state.t
                break
        object.__setattr__(self, "theory_origin", origin)

    @property
    def spectrum(self) -> GramSpectrum:
        """Return the shared Gram spectrum."""
        return self.system.spectrum

    @property
    def epsilon(self) -> float:
        """Return the loss tolerance."""
        return self.config.epsilon

    @property
    def n_samples(self) -> int:
        """Return K."""
        return self.system.n_samples

    @property
    def y0(self) -> NDArray[np.float64]:
        """Return the original labels."""
        return self.system.data.labels

    @property
    def rounds(self) -> int:
        """Return the number of non-collapsed rounds recorded."""
        return len(self.states)

    @property
    def c_history(self) -> NDArray[np.float64]:
        """Return c_0 ... c_T."""
        return np.array([state.c for state in self.states])

    @property
    def origin_reached(self) -> bool:
        """Whether some recorded round has no anchored targets."""
        return self.theory_origin < len(self.states)

    def predictions(self, t: int) -> NDArray[np.float64]:
        """Return f_t at the training points, V^T B_t z_0 (zero at anchors)."""
        state = self.states[t]
        return self.system.embed(self.spectrum.unrotate(state.b_diag * self.states[0].z))


def run_chain(
    data: Dataset,
    kernel: KernelSpec,
    config: FitConfig,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    system: GramSystem | None = None,
) -> DistillationTrace:
    """Distill until collapse or ``max_rounds`` recorded rounds."""
    if max_rounds < 1:
        raise PreconditionViolation("max_rounds must be at least 1")
    system = system or prepare_system(data, kernel)
    states = [initial_state(system, config)]
    collapsed_at: int | None = None
    while len(states) < max_rounds:
        step = distill_step(system, states[-1], config)
        if isinstance(step, Collapse):
            collapsed_at = step.t
            break
        states.append(step)

    if collapsed_at is None:
        _LOGGER.info("Recorded %d rounds without collapse (max_rounds=%d)", len(states), max_rounds)
    else:
        _LOGGER.info("Recorded %d rounds; collapsed at round %d", len(states), collapsed_at)
    return DistillationTrace(
        system=system, config=config, states=tuple(states), collapsed_at=collapsed_at
    )


def model_at(trace: DistillationTrace, t: int) -> RegressionModel:
    """Return f_t(x) = g_x^T V^T D^-1 B_t z_0 as an evaluable model."""
    if t < 0:
        raise OutOfRange(f"round {t} is negative")
    if trace.collapsed_at is not None and t >= trace.collapsed_at:
        raise CollapsedRound(f"round {t} is at or after the collapse at round {trace.collapsed_at}")
    if t >= trace.rounds:
        raise OutOfRange(f"round {t} was not recorded (last is {trace.rounds - 1})")

    system = trace.system
    state = trace.states[t]
    weights = state.b_diag * trace.states[0].z / system.spectrum.eigvals
    return RegressionModel(
        c=state.c,
        dual_coeffs=system.spectrum.unrotate(weights),
        kernel=system.kernel,
        data_points=system.free_points,
        n_samples=system.n_samples,
        achieved_error=state.train_error_vs_eps,
        train_predictions=trace.predictions(t),
    )


def basis_projection(system: GramSystem, x: ArrayLike) -> NDArray[np.float64]:
    """Return p_x = D^-1 V g_x, so that f_t(x) = p_x^T B_t z_0."""
    g_x = kernel_vector(system.kernel, system.data, x, subset=system.free_index)
    return (system.spectrum.eigvecs @ g_x) / system.spectrum.eigvals


@dataclass(frozen=True, eq=False)
class RefitRound:
    """One round of the from-scratch chain."""

    t: int
    y: NDArray[np.float64]
    c: float
    predictions: NDArray[np.float64]


@dataclass(frozen=True)
class RefitChain:
    """Rounds of the from-scratch chain and where it collapsed."""

    rounds: tuple[RefitRound, ...]
    collapsed_at: int | None


def refit_chain(
    data: Dataset,
    kernel: KernelSpec,
    config: FitConfig,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> RefitChain:
    """Distill by calling ``fit`` afresh every round and predicting with a dense solve.

    Independent of the spectral recurrence; used to cross-check it.
    """
    labels = np.array(data.labels)
    rounds: list[RefitRound] = []
    collapsed_at: int | None = None
    for t in range(max_rounds):
        try:
            model = fit(data.with_labels(labels), kernel, config)
        except CollapseCondition:
            collapsed_at = t
            break
        free = np.flatnonzero(~anchored_mask(kernel, data))
        gram = build_gram(kernel, data, subset=free)
        fitted = np.zeros(data.K)
        fitted[free] = gram.entries @ solve_shifted(gram, model.c, labels[free])
        rounds.append(RefitRound(t=t, y=labels, c=model.c, predictions=fitted))
        labels = fitted
    return RefitChain(rounds=tuple(rounds), collapsed_at=collapsed_at)

