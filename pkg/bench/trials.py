# bench/trials.py
# ---------------------------------------------------------
# One Monte-Carlo trial and the method registry.
#
# A trial draws a single realization (channels, reflections, noise)
# from its own generator; every requested method is scored on that
# same realization. Draw order is fixed:
#   channels -> cascaded training (if any cascaded method)
#            -> two-timescale training (if any two-timescale method)
#
# Registry entries map a method name to its family and a runner that
# returns the trial's NMSE (NMSE_G for the cascaded family, NMSE_h
# for the two-timescale family).
# ---------------------------------------------------------

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from bench.metrics import nmse_cascaded, nmse_h
from bench.spec import ExperimentSpec, SweepVariable
from channel.dictionary import Dictionary, build_dictionary
from channel.geometry import cascaded_arguments, generate_channels, ris_user_arguments
from channel.types import ChannelSet, SystemConfig
from estimators.cascaded import cascaded_laomp, cascaded_omp, cascaded_somp, estimate_cascaded_3d
from estimators.least_squares import ls_cascaded, oracle_ls
from estimators.pursuit import GreedyConfig, StopRule, noise_floor_tolerance
from estimators.twotimescale import twotimescale_cooperative, twotimescale_individual, twotimescale_oracle_ls
from measurement.observation import Observation, build_ts_observations, synthesize_twotimescale
from measurement.pilots import PilotBook, effective_noise_power, make_pilots, noise_power_for_snr
from measurement.reflection import ReflectionSchedule, draw_reflections, make_schedule
from measurement.sensing import build_twotimescale_sensing
from util.seeding import trial_rng


class Family(str, Enum):
    CASCADED = "cascaded"
    TWOTIMESCALE = "two-timescale"


@dataclass(frozen=True)
class SweepPoint:
    snr_db: float
    measurements: int


def sweep_point(spec: ExperimentSpec, value: float) -> SweepPoint:
    if spec.sweep_variable is SweepVariable.SNR_DB:
        return SweepPoint(float(value), spec.measurements)
    return SweepPoint(spec.snr_db, int(value))


@dataclass(frozen=True, eq=False)
class Workbench:
    """Per-experiment constants shared read-only by every trial."""

    spec: ExperimentSpec
    dict_R: Dictionary
    dict_T: tuple[Dictionary, ...]
    pilots: PilotBook

    @classmethod
    def for_spec(cls, spec: ExperimentSpec) -> Workbench:
        sc = spec.scenario
        grid_bs = spec.estimation.grid_bs
        dict_T = {J: build_dictionary(J, grid_bs) for J in set(sc.bs_antennas)}
        T = spec.measurement.pilot_length or sc.num_users
        return cls(
            spec=spec,
            dict_R=build_dictionary(sc.ris_elements, spec.estimation.grid_ris),
            dict_T=tuple(dict_T[J] for J in sc.bs_antennas),
            pilots=make_pilots(sc.num_users, T, sc.pilot_power),
        )


@dataclass(frozen=True, eq=False)
class TrialContext:
    bench: Workbench
    config: SystemConfig
    channels: ChannelSet
    effective_noise: float
    measurements: int
    schedule: ReflectionSchedule | None = None
    observations: tuple[Observation, ...] | None = None
    # per RIS: per-BS (Q'J_m x K) measurements, per-BS Phi_m, stacked Phi_tilde
    tt_measurements: tuple[list[np.ndarray], ...] | None = None
    tt_phis: tuple[list[np.ndarray], ...] | None = None
    tt_stacked: tuple[np.ndarray, ...] | None = None

    @property
    def spec(self) -> ExperimentSpec:
        return self.bench.spec


def build_trial(bench: Workbench, point: SweepPoint, trial_index: int, stream: int, families: set[Family]) -> TrialContext:
    spec = bench.spec
    config = replace(spec.scenario, noise_power=noise_power_for_snr(spec.scenario.pilot_power, point.snr_db))
    rng = trial_rng(config.rng_seed, trial_index, stream)
    model = spec.measurement.reflection_model

    channels = generate_channels(config, rng, bench.dict_R, bench.dict_T[0], spec.on_grid)
    ctx = TrialContext(
        bench=bench,
        config=config,
        channels=channels,
        effective_noise=effective_noise_power(config.noise_power, bench.pilots),
        measurements=point.measurements,
    )

    if Family.CASCADED in families:
        schedule = make_schedule(config.ris_elements, config.num_ris, point.measurements, model, rng)
        observations = build_ts_observations(config, channels, schedule, bench.pilots, rng)
        ctx = replace(ctx, schedule=schedule, observations=tuple(observations))

    if Family.TWOTIMESCALE in families:
        ys, phis, stacked = [], [], []
        for n in range(config.num_ris):
            V = draw_reflections(config.ris_elements, point.measurements, model, rng)
            ys.append(synthesize_twotimescale(channels, n, V, bench.pilots, config.noise_power, rng))
            F_list = [channels.bs_ris[m][n] for m in range(config.num_bs)]
            phi_m, phi_tilde = build_twotimescale_sensing(F_list, V, bench.dict_R)
            phis.append(phi_m)
            stacked.append(phi_tilde)
        ctx = replace(ctx, tt_measurements=tuple(ys), tt_phis=tuple(phis), tt_stacked=tuple(stacked))

    return ctx


# ---------------------------------------------------------
# Greedy settings per solver
# ---------------------------------------------------------

def greedy_config(
    ctx: TrialContext,
    look_ahead: int,
    sparsity: int,
    entries: int,
    scale: float,
    look_ahead_depth: int | None = None,
) -> GreedyConfig:
    """
    Known path counts give the sparsity; the noise floor gives epsilon.
    Under the residual-only rule the atom cap falls back to the number
    of observed entries.
    """
    est = ctx.spec.estimation
    cap = entries if est.stop_rule is StopRule.RESIDUAL_THRESHOLD else sparsity
    return GreedyConfig(
        look_ahead=look_ahead,
        residual_tol=noise_floor_tolerance(ctx.effective_noise, entries, scale),
        max_atoms=max(1, cap),
        stop_rule=est.stop_rule,
        score=est.score,
        look_ahead_depth=look_ahead_depth,
    )


def _cascaded_sparsity(config: SystemConfig) -> int:
    return config.paths_bs_ris * config.paths_ris_user


# ---------------------------------------------------------
# Cascaded family
# ---------------------------------------------------------

def _cascaded_truths(ctx: TrialContext) -> list:
    c = ctx.config
    return [
        [[ctx.channels.cascaded(m, n, k) for k in range(c.num_users)] for n in range(c.num_ris)]
        for m in range(c.num_bs)
    ]


def _per_user(ctx: TrialContext, solve: Callable[[np.ndarray, np.ndarray, int, int, int], object]) -> float:
    """Apply `solve(Y_k, V_n, m, n, k)` to every (m, n, k) and score against the truths."""
    c = ctx.config
    estimates = []
    for m in range(c.num_bs):
        per_ris = []
        for n in range(c.num_ris):
            Y = ctx.observations[n].per_bs_tensors[m].data
            V = ctx.schedule.block(n)
            per_ris.append([solve(Y[:, :, k], V, m, n, k).estimated_channel for k in range(c.num_users)])
        estimates.append(per_ris)
    return nmse_cascaded(estimates, _cascaded_truths(ctx))


def run_ls(ctx: TrialContext) -> float:
    c = ctx.config
    estimates = []
    for m in range(c.num_bs):
        by_ris = [[None] * c.num_users for _ in range(c.num_ris)]
        for k in range(c.num_users):
            Y_bar = np.hstack([ctx.observations[n].per_bs_tensors[m].data[:, :, k] for n in range(c.num_ris)])
            for n, G_hat in enumerate(ls_cascaded(Y_bar, ctx.schedule)):
                by_ris[n][k] = G_hat
        estimates.append(by_ris)
    return nmse_cascaded(estimates, _cascaded_truths(ctx))


def run_oracle_ls(ctx: TrialContext) -> float:
    paths = ctx.channels

    def solve(Y_k, V, m, n, k):
        ris_args, bs_args = cascaded_arguments(paths.bs_ris_paths[m][n], paths.ris_user_paths[n][k])
        return oracle_ls(Y_k, ris_args, bs_args, V)

    return _per_user(ctx, solve)


def _one_dimensional(ctx: TrialContext, look_ahead: int, solver) -> float:
    bench = ctx.bench
    scale = ctx.spec.estimation.residual_scale

    def solve(Y_k, V, m, n, k):
        cfg = greedy_config(ctx, look_ahead, _cascaded_sparsity(ctx.config), Y_k.size, scale)
        return solver(Y_k, V, bench.dict_R, bench.dict_T[m], cfg)

    return _per_user(ctx, solve)


def run_omp(ctx: TrialContext) -> float:
    return _one_dimensional(ctx, 1, cascaded_omp)


def run_laomp(ctx: TrialContext) -> float:
    return _one_dimensional(ctx, ctx.spec.estimation.look_ahead_1d, cascaded_laomp)


def run_somp(ctx: TrialContext) -> float:
    bench = ctx.bench
    scale = ctx.spec.estimation.residual_scale

    def solve(Y_k, V, m, n, k):
        cfg = greedy_config(ctx, 1, _cascaded_sparsity(ctx.config), Y_k.size, scale)
        return cascaded_somp(Y_k, V, bench.dict_R, cfg)

    return _per_user(ctx, solve)


def run_mlaomp_3d(ctx: TrialContext) -> float:
    """
    Both stages may grow to atom_factor_3d times the known path count and
    otherwise stop on the noise floor, so extra atoms absorb off-grid
    leakage. Rollouts are limited to look_ahead_depth_3d atoms.
    """
    c = ctx.config
    bench = ctx.bench
    est = ctx.spec.estimation
    factor, depth = est.atom_factor_3d, est.look_ahead_depth_3d
    estimates = []
    for m in range(c.num_bs):
        per_ris = []
        for n in range(c.num_ris):
            Y = ctx.observations[n].per_bs_tensors[m]
            V = ctx.schedule.block(n)
            cfg_aod = greedy_config(
                ctx, est.look_ahead_aod, factor * c.paths_bs_ris, Y.data.size, est.residual_scale, depth
            )
            cfg_aoa = greedy_config(
                ctx,
                est.look_ahead_aoa,
                factor * _cascaded_sparsity(c),
                c.paths_bs_ris * ctx.measurements,
                est.aoa_residual_scale,
                depth,
            )
            results = estimate_cascaded_3d(
                Y,
                V,
                bench.dict_R,
                bench.dict_T[m],
                cfg_aod,
                cfg_aoa,
                noise_power=ctx.effective_noise,
                aoa_scale=est.aoa_residual_scale,
            )
            per_ris.append([r.estimated_channel for r in results])
        estimates.append(per_ris)
    return nmse_cascaded(estimates, _cascaded_truths(ctx))


# ---------------------------------------------------------
# Two-timescale family
# ---------------------------------------------------------

def _ris_user_truths(ctx: TrialContext) -> list:
    c = ctx.config
    return [[ctx.channels.ris_user[n][k] for k in range(c.num_users)] for n in range(c.num_ris)]


def run_tt_individual(ctx: TrialContext) -> float:
    """NMSE_h of each BS estimating alone, averaged over the BSs."""
    c = ctx.config
    est = ctx.spec.estimation
    truths = _ris_user_truths(ctx)
    per_bs = []
    for m in range(c.num_bs):
        estimates = []
        for n in range(c.num_ris):
            y = ctx.tt_measurements[n][m]
            cfg = greedy_config(ctx, est.look_ahead_aoa, c.paths_ris_user, y.shape[0], est.residual_scale)
            estimates.append(
                [
                    twotimescale_individual(y[:, k], ctx.tt_phis[n][m], ctx.bench.dict_R, cfg).estimated_channel
                    for k in range(c.num_users)
                ]
            )
        per_bs.append(nmse_h(estimates, truths))
    return float(np.mean(per_bs))


def run_tt_cooperative(ctx: TrialContext) -> float:
    c = ctx.config
    est = ctx.spec.estimation
    estimates = []
    for n in range(c.num_ris):
        y = np.vstack(ctx.tt_measurements[n])
        cfg = greedy_config(ctx, est.look_ahead_aoa, c.paths_ris_user, y.shape[0], est.residual_scale)
        estimates.append(
            [
                twotimescale_cooperative(y[:, k], ctx.tt_stacked[n], ctx.bench.dict_R, cfg).estimated_channel
                for k in range(c.num_users)
            ]
        )
    return nmse_h(estimates, _ris_user_truths(ctx))


def run_tt_oracle_ls(ctx: TrialContext) -> float:
    c = ctx.config
    estimates = []
    for n in range(c.num_ris):
        y = np.vstack(ctx.tt_measurements[n])
        phi = np.vstack(ctx.tt_phis[n])
        estimates.append(
            [
                twotimescale_oracle_ls(
                    y[:, k], phi, ris_user_arguments(ctx.channels.ris_user_paths[n][k])
                ).estimated_channel
                for k in range(c.num_users)
            ]
        )
    return nmse_h(estimates, _ris_user_truths(ctx))


@dataclass(frozen=True)
class MethodEntry:
    family: Family
    run: Callable[[TrialContext], float]


METHOD_REGISTRY: dict[str, MethodEntry] = {
    "ls": MethodEntry(Family.CASCADED, run_ls),
    "oracle-ls": MethodEntry(Family.CASCADED, run_oracle_ls),
    "omp": MethodEntry(Family.CASCADED, run_omp),
    "laomp": MethodEntry(Family.CASCADED, run_laomp),
    "somp": MethodEntry(Family.CASCADED, run_somp),
    "3d-mlaomp": MethodEntry(Family.CASCADED, run_mlaomp_3d),
    "tt-oracle-ls": MethodEntry(Family.TWOTIMESCALE, run_tt_oracle_ls),
    "tt-individual": MethodEntry(Family.TWOTIMESCALE, run_tt_individual),
    "tt-cooperative": MethodEntry(Family.TWOTIMESCALE, run_tt_cooperative),
}

def families_for(methods) -> set[Family]:
    return {METHOD_REGISTRY[name].family for name in methods}
