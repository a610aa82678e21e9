from dataclasses import replace

import numpy as np
import pytest

from channel.dictionary import build_dictionary
from channel.geometry import generate_channels
from measurement.observation import (
    build_observation_tensor,
    build_ts_observations,
    synthesize_subframe,
    synthesize_twotimescale,
)
from measurement.pilots import (
    despread,
    despread_all,
    effective_noise_power,
    make_pilots,
    noise_power_for_snr,
)
from measurement.reflection import EntryModel, ReflectionSchedule, draw_reflections, make_schedule, split_training
from measurement.sensing import build_twotimescale_sensing, sensing_matrix
from util.errors import InvalidArgumentError


def _random(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# ---------------------------------------------------------
# Pilots
# ---------------------------------------------------------

def test_pilots_are_orthogonal():
    pilots = make_pilots(3, 5, 2.0)
    S = pilots.sequences
    np.testing.assert_allclose(S.conj() @ S.T, 2.0 * 5 * np.eye(3), atol=1e-12)
    assert pilots.energy == pytest.approx(10.0)


def test_despread_matches_loop(rng):
    for _ in range(100):
        K = int(rng.integers(1, 5))
        T = K + int(rng.integers(0, 3))
        J = int(rng.integers(1, 5))
        pilots = make_pilots(K, T, float(rng.uniform(0.5, 2.0)))
        E = _random(rng, (J, K))

        Y = np.zeros((J, T), dtype=complex)
        for k in range(K):
            Y += np.outer(E[:, k], pilots.sequences[k].conj())

        out = despread_all(Y, pilots)
        assert np.linalg.norm(out - E) <= 1e-12 * np.linalg.norm(E)
        for k in range(K):
            np.testing.assert_allclose(despread(Y, pilots, k), E[:, k], atol=1e-12)


def test_pilot_errors():
    with pytest.raises(InvalidArgumentError):
        make_pilots(4, 3, 1.0)
    with pytest.raises(InvalidArgumentError):
        make_pilots(2, 2, 0.0)
    with pytest.raises(InvalidArgumentError):
        despread(np.zeros((2, 2)), make_pilots(2, 2, 1.0), 2)


def test_noise_power_helpers():
    assert noise_power_for_snr(1.0, 10.0) == pytest.approx(0.1)
    assert noise_power_for_snr(2.0, 0.0) == pytest.approx(2.0)
    assert effective_noise_power(0.1, make_pilots(4, 8, 1.0)) == pytest.approx(0.1 / 8)


# ---------------------------------------------------------
# Reflection schedules
# ---------------------------------------------------------

def test_schedule_blocks_and_stacked_pattern(rng):
    schedule = make_schedule(6, 3, 4, EntryModel.UNIT_MODULUS, rng)
    assert schedule.num_ris == 3 and schedule.total_subframes == 12
    np.testing.assert_allclose(np.abs(schedule.block(1)), 1.0)

    V = schedule.stacked()
    assert V.shape == (18, 12)
    for i in range(3):
        for j in range(3):
            Vi, Vj = V[i * 6:(i + 1) * 6], V[j * 6:(j + 1) * 6]
            if i != j:
                assert not np.any(Vi @ Vj.conj().T)
    np.testing.assert_array_equal(V[6:12, schedule.block_columns(1)], schedule.block(1))


def test_unit_modulus_is_enforced():
    with pytest.raises(InvalidArgumentError):
        ReflectionSchedule((np.full((2, 2), 0.5),), EntryModel.UNIT_MODULUS)
    ReflectionSchedule((np.full((2, 2), 0.5),), EntryModel.COMPLEX_GAUSSIAN)


def test_only_time_switching():
    with pytest.raises(InvalidArgumentError):
        ReflectionSchedule((np.ones((2, 2)),), mode="simultaneous")


def test_split_training():
    assert split_training(96, 3) == 32
    with pytest.raises(InvalidArgumentError):
        split_training(97, 3)
    with pytest.raises(InvalidArgumentError):
        split_training(2, 3)


# ---------------------------------------------------------
# Observations
# ---------------------------------------------------------

def test_subframe_matches_loop(small_config, rng):
    channels = generate_channels(small_config, rng)
    pilots = make_pilots(3, 4, 1.0)
    v = [np.exp(1j * rng.uniform(0, 2 * np.pi, 8)), None]

    Y = synthesize_subframe(channels, 1, v, pilots, 0.0, None)

    expected = np.zeros((4, 4), dtype=complex)
    F = channels.bs_ris[1][0].entries
    for k in range(3):
        h = channels.ris_user[0][k].entries[:, 0]
        expected += np.outer(F.conj().T @ (v[0] * h), pilots.sequences[k].conj())
    np.testing.assert_allclose(Y, expected, atol=1e-12)


def test_noiseless_tensor_slices_are_cascaded_products(small_config, rng):
    channels = generate_channels(small_config, rng)
    pilots = make_pilots(3, 3, 1.0)
    schedule = make_schedule(8, 2, 5, EntryModel.UNIT_MODULUS, rng)

    observations = build_ts_observations(small_config, channels, schedule, pilots, None, noise_power=0.0)
    assert len(observations) == 2
    for n, obs in enumerate(observations):
        assert obs.active_ris == n and obs.num_bs == 2
        assert obs.snr_db == float("inf")
        for m in range(2):
            Y = obs.per_bs_tensors[m]
            assert Y.dims == (4, 5, 3)
            for k in range(3):
                G = channels.cascaded(m, n, k).entries
                expected = G.conj().T @ schedule.block(n)
                assert np.linalg.norm(Y.data[:, :, k] - expected) <= 1e-12 * np.linalg.norm(expected)


def test_inactive_ris_does_not_leak_into_the_block(small_config, rng):
    channels = generate_channels(small_config, rng)
    pilots = make_pilots(3, 3, 1.0)
    schedule = make_schedule(8, 2, 6, EntryModel.UNIT_MODULUS, rng)
    other = generate_channels(small_config, np.random.default_rng(99))
    swapped = replace(
        channels,
        bs_ris=tuple((row[0], other.bs_ris[m][1]) for m, row in enumerate(channels.bs_ris)),
        ris_user=(channels.ris_user[0], other.ris_user[1]),
    )

    for n, (a, b) in enumerate(
        zip(
            build_ts_observations(small_config, channels, schedule, pilots, None, noise_power=0.0),
            build_ts_observations(small_config, swapped, schedule, pilots, None, noise_power=0.0),
        )
    ):
        for m in range(2):
            same = np.allclose(a.per_bs_tensors[m].data, b.per_bs_tensors[m].data, rtol=0.0, atol=1e-12)
            # only RIS 1 changed, so only its own block may differ
            assert same is (n == 0)


def test_despread_noise_variance(small_config):
    rng = np.random.default_rng(11)
    channels = generate_channels(small_config, rng)
    pilots = make_pilots(3, 4, 1.0)
    schedule = make_schedule(8, 2, 1024, EntryModel.UNIT_MODULUS, rng)

    clean = build_observation_tensor(small_config, channels, schedule, pilots, None, 0, noise_power=0.0)
    noisy = build_observation_tensor(small_config, channels, schedule, pilots, rng, 0, noise_power=0.4)

    diffs = np.concatenate([(a.data - b.data).ravel() for a, b in zip(noisy.per_bs_tensors, clean.per_bs_tensors)])
    expected = effective_noise_power(0.4, pilots)
    assert np.mean(np.abs(diffs) ** 2) == pytest.approx(expected, rel=0.05)


def test_active_ris_range(small_config, rng):
    channels = generate_channels(small_config, rng)
    schedule = make_schedule(8, 2, 2, EntryModel.UNIT_MODULUS, rng)
    with pytest.raises(InvalidArgumentError):
        build_observation_tensor(small_config, channels, schedule, make_pilots(3, 3, 1.0), None, 2, 0.0)


def test_twotimescale_measurements_follow_sensing_matrix(small_config, rng):
    channels = generate_channels(small_config, rng)
    pilots = make_pilots(3, 3, 1.0)
    V = draw_reflections(8, 3, EntryModel.COMPLEX_GAUSSIAN, rng)
    dict_R = build_dictionary(8, 16)

    ys = synthesize_twotimescale(channels, 1, V, pilots, 0.0, None)
    phis, stacked = build_twotimescale_sensing([channels.bs_ris[m][1] for m in range(2)], V, dict_R)

    assert stacked.shape == (2 * 3 * 4, 16)
    for m in range(2):
        assert ys[m].shape == (12, 3)
        np.testing.assert_allclose(phis[m], sensing_matrix(channels.bs_ris[m][1], V))
        for k in range(3):
            h = channels.ris_user[1][k].entries[:, 0]
            np.testing.assert_allclose(ys[m][:, k], phis[m] @ h, atol=1e-12)
    np.testing.assert_allclose(stacked[12:], phis[1] @ dict_R.atoms)


def test_sensing_matrix_rows(rng):
    from channel.types import ChannelMatrix, LinkRole

    F = ChannelMatrix(_random(rng, (5, 2)), LinkRole.BS_RIS)
    V = _random(rng, (5, 3))
    phi = sensing_matrix(F, V)
    for q in range(3):
        np.testing.assert_allclose(phi[2 * q:2 * q + 2], F.entries.conj().T @ np.diag(V[:, q]))
    with pytest.raises(InvalidArgumentError):
        sensing_matrix(F, V[:4])
