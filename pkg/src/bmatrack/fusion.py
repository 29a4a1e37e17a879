"""Particle filter whose observation model is a Bayesian average over features.

All candidate models share one particle set.  Each model keeps its own
importance-weight row, and a posterior probability over models is carried
from frame to frame through a forgetting step (a power-and-renormalise map)
followed by a Bayes update with each model's particle estimate of its
marginal likelihood.  The reported state is the model-averaged particle mean.

Two pieces are not part of the bare recursion and are added to keep long
runs healthy: systematic resampling from the model-averaged weights when
their effective sample size drops, and a floor on model probabilities so a
model that fails for a while can still come back.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .core import Frame, Region, StateVector, TrackerConfig, clamp_boxes, clamp_region, region_from_state
from .dynamics import make_rng, propagate_states
from .errors import AllZeroWeights, DegenerateWeights, FrameGeometryChanged, RegionTooSmall
from .observation import Template, batch_likelihood, build_template, update_template_feature

log = logging.getLogger(__name__)

POSTERIOR_FLOOR = 1e-6
DEGENERATE_MASS = 1e-300


@dataclass(frozen=True, eq=False)
class ParticleEnsemble:
    """Shared particle states with one weight row per model.

    ``states`` is ``(N, 6)``, ``weights`` is ``(M, N)`` and
    ``model_posterior`` has length ``M``; ``models`` names the rows.
    """

    states: np.ndarray
    weights: np.ndarray
    model_posterior: np.ndarray
    models: tuple
    frame_shape: tuple
    frame_index: int

    @property
    def n_particles(self) -> int:
        return self.states.shape[0]

    def mixture_weights(self) -> np.ndarray:
        return mixture_weights(self.weights, self.model_posterior)


@dataclass(frozen=True)
class StepOutput:
    frame: int
    estimate: StateVector
    model_posterior: tuple
    per_model_marginal: tuple
    template_updated: tuple
    ess: float
    resampled: bool = False
    models: tuple = ("color", "texture")

    def posterior_of(self, model: str) -> float:
        """Posterior of ``model``; 0 for a model this run does not use."""
        return self.model_posterior[self.models.index(model)] if model in self.models else 0.0

    def updated(self, model: str) -> bool:
        return self.template_updated[self.models.index(model)] if model in self.models else False


def init(f0: Frame, init_region: Region, cfg: TrackerConfig) -> tuple[ParticleEnsemble, Template]:
    """Place every particle on ``init_region`` and build the template there."""
    region = clamp_region(init_region, f0.width, f0.height)
    template = build_template(f0, region)
    n, m = cfg.n_particles, len(cfg.models)
    state = np.array([region.cx, region.cy, 0.0, 0.0, region.w, region.h])
    ens = ParticleEnsemble(
        states=np.tile(state, (n, 1)),
        weights=np.full((m, n), 1.0 / n),
        model_posterior=np.full(m, 1.0 / m),
        models=cfg.models,
        frame_shape=f0.shape,
        frame_index=f0.index,
    )
    return ens, template


def sigma_for(cfg: TrackerConfig, model: str) -> float:
    return cfg.sigma_color if model == "color" else cfg.sigma_texture


def likelihood_matrix(states: np.ndarray, frame: Frame, template: Template, cfg: TrackerConfig, models) -> np.ndarray:
    """``L[m, i]``: likelihood of particle ``i`` under model ``m``."""
    boxes = clamp_boxes(states, frame.width, frame.height)
    return np.stack([batch_likelihood(frame, boxes, template, m, sigma_for(cfg, m)) for m in models])


def weight_update(prev_weights: np.ndarray, likelihoods: np.ndarray) -> np.ndarray:
    """Multiply each weight row by its likelihoods and renormalise."""
    unnorm = np.asarray(prev_weights, dtype=np.float64) * likelihoods
    if np.any(np.max(unnorm, axis=-1) < DEGENERATE_MASS):
        raise DegenerateWeights("all importance weights of a model vanished")
    return unnorm / unnorm.sum(axis=-1, keepdims=True)


def forget_predict(pi, alpha: float) -> np.ndarray:
    """Flatten the model posterior: ``pi**alpha`` renormalised."""
    powered = np.asarray(pi, dtype=np.float64) ** alpha
    return powered / powered.sum()


def estimate_marginal_likelihood(prev_weights_row, likelihood_row) -> float:
    return float(np.dot(prev_weights_row, likelihood_row))


def floor_simplex(p, floor: float = POSTERIOR_FLOOR) -> np.ndarray:
    """Raise entries below ``floor`` to it and rescale the rest to keep sum 1."""
    p = np.asarray(p, dtype=np.float64)
    if p.size * floor >= 1:
        return np.full(p.shape, 1.0 / p.size)
    fixed = np.zeros(p.shape, dtype=bool)
    while True:
        low = ~fixed & (p < floor)
        if not low.any():
            return p
        fixed |= low
        free = ~fixed
        p = np.where(fixed, floor, p)
        p[free] *= (1.0 - floor * fixed.sum()) / p[free].sum()


def model_posterior_update(pi_pred, marginals, floor: float = POSTERIOR_FLOOR) -> np.ndarray:
    post = np.asarray(pi_pred, dtype=np.float64) * np.asarray(marginals, dtype=np.float64)
    total = post.sum()
    if not total > 0:
        return floor_simplex(np.asarray(pi_pred, dtype=np.float64), floor)
    return floor_simplex(post / total, floor)


def mixture_weights(weights: np.ndarray, pi) -> np.ndarray:
    """Per-particle weight under the model average, ``sum_m pi_m * w[m, i]``."""
    return np.asarray(pi, dtype=np.float64) @ np.asarray(weights, dtype=np.float64)


def bma_estimate(ens: ParticleEnsemble) -> StateVector:
    return StateVector.from_array(mixture_weights(ens.weights, ens.model_posterior) @ ens.states)


def effective_sample_size(weights) -> float:
    w = np.asarray(weights, dtype=np.float64)
    return float(1.0 / np.sum(w * w))


def systematic_indices(weights, rng: np.random.Generator) -> np.ndarray:
    """Systematic resampling: one uniform offset, ``N`` evenly spaced pointers."""
    w = np.asarray(weights, dtype=np.float64)
    n = w.size
    positions = (np.arange(n) + rng.random()) / n
    cumulative = np.cumsum(w)
    cumulative[-1] = 1.0
    return np.minimum(np.searchsorted(cumulative, positions, side="right"), n - 1)


def resample(ens: ParticleEnsemble, rng: np.random.Generator) -> ParticleEnsemble:
    """Draw states from the mixture weights; every weight row becomes uniform."""
    idx = systematic_indices(ens.mixture_weights(), rng)
    n = ens.n_particles
    return ParticleEnsemble(
        states=ens.states[idx],
        weights=np.full(ens.weights.shape, 1.0 / n),
        model_posterior=ens.model_posterior,
        models=ens.models,
        frame_shape=ens.frame_shape,
        frame_index=ens.frame_index,
    )


def check_slump_and_update(
    pi, cfg: TrackerConfig, estimate: StateVector, frame: Frame, template: Template, models=None
) -> tuple[Template, tuple]:
    """Refresh the reference of every model whose posterior fell below the threshold.

    The new reference is taken from the region of ``estimate``.  A feature
    refreshed less than ``cfg.slump_cooldown`` frames ago is left alone, and
    so is one whose extraction fails.
    """
    models = cfg.models if models is None else models
    flags = []
    region = None
    for model, p in zip(models, pi):
        last = template.last_update(model)
        due = p < cfg.slump_threshold and (last is None or frame.index - last >= cfg.slump_cooldown)
        if not due:
            flags.append(False)
            continue
        if region is None:
            region = clamp_region(region_from_state(estimate), frame.width, frame.height)
        try:
            template = update_template_feature(template, frame, region, model)
        except (RegionTooSmall, AllZeroWeights):
            flags.append(False)
            continue
        log.debug("frame %d: %s posterior %.3g, template refreshed", frame.index, model, p)
        flags.append(True)
    return template, tuple(flags)


def step(
    ens: ParticleEnsemble,
    template: Template,
    frame: Frame,
    cfg: TrackerConfig,
    rng: np.random.Generator,
) -> tuple[ParticleEnsemble, Template, StepOutput]:
    """Advance the filter by one frame."""
    if frame.shape != ens.frame_shape:
        raise FrameGeometryChanged(f"frame {frame.index} is {frame.shape}, tracking started on {ens.frame_shape}")
    if frame.index <= ens.frame_index:
        raise ValueError(f"frame index {frame.index} does not follow {ens.frame_index}")

    states = propagate_states(ens.states, cfg.sigma_diag, rng, cfg.constant_velocity)
    lik = likelihood_matrix(states, frame, template, cfg, ens.models)
    weights = weight_update(ens.weights, lik)
    marginals = np.einsum("mi,mi->m", ens.weights, lik)

    if cfg.fusion_mode == "fixed-equal":
        pi = ens.model_posterior
    else:
        pi = model_posterior_update(forget_predict(ens.model_posterior, cfg.alpha), marginals)

    ens = ParticleEnsemble(states, weights, pi, ens.models, ens.frame_shape, frame.index)
    estimate = bma_estimate(ens)
    template, flags = check_slump_and_update(pi, cfg, estimate, frame, template, ens.models)

    ess = effective_sample_size(ens.mixture_weights())
    resampled = ess < cfg.ess_fraction * ens.n_particles
    if resampled:
        ens = resample(ens, rng)

    out = StepOutput(
        frame=frame.index,
        estimate=estimate,
        model_posterior=tuple(float(p) for p in pi),
        per_model_marginal=tuple(float(v) for v in marginals),
        template_updated=flags,
        ess=ess,
        resampled=bool(resampled),
        models=ens.models,
    )
    return ens, template, out


@dataclass
class Tracker:
    """Stateful wrapper that owns the ensemble, template and random stream.

    >>> tracker = Tracker(TrackerConfig())            # doctest: +SKIP
    >>> tracker.start(frames[0], Region(60, 120, 40, 30))
    >>> outputs = [tracker.update(f) for f in frames[1:]]
    """

    cfg: TrackerConfig
    rng: Optional[np.random.Generator] = None
    ensemble: Optional[ParticleEnsemble] = field(default=None, init=False)
    template: Optional[Template] = field(default=None, init=False)

    def __post_init__(self):
        if self.rng is None:
            self.rng = make_rng(self.cfg.rng_seed)

    def start(self, frame: Frame, region: Region) -> StepOutput:
        self.ensemble, self.template = init(frame, region, self.cfg)
        m = len(self.ensemble.models)
        return StepOutput(
            frame=frame.index,
            estimate=StateVector.from_array(self.ensemble.states[0]),
            model_posterior=tuple(float(p) for p in self.ensemble.model_posterior),
            per_model_marginal=(float("nan"),) * m,
            template_updated=(False,) * m,
            ess=float(self.ensemble.n_particles),
            models=self.ensemble.models,
        )

    def update(self, frame: Frame) -> StepOutput:
        if self.ensemble is None:
            raise RuntimeError("call start() before update()")
        self.ensemble, self.template, out = step(self.ensemble, self.template, frame, self.cfg, self.rng)
        return out


def track(frames: Iterable[Frame], init_region: Region, cfg: TrackerConfig) -> list[StepOutput]:
    """Run a fresh tracker over ``frames``; the first frame initialises it.

    One output per frame, the first being the initial state.
    """
    it = iter(frames)
    tracker = Tracker(cfg)
    outputs = [tracker.start(next(it), init_region)]
    outputs.extend(tracker.update(f) for f in it)
    return outputs
