# channel/geometry.py
# ---------------------------------------------------------
# ULA steering vectors and geometric multipath channels.
#
#   F_mn  = sqrt(L J / P_f) * sum_p beta_p  a_L(theta_p) a_J(phi_p)^H     (L x J)
#   h_nk  = sqrt(L / P_h)   * sum_b gamma_b a_L(varphi_b)                  (L x 1)
#   G_mkn = diag(h_nk^H) F_mn                                              (L x J)
#
# All generators are pure functions of their inputs and the rng handed in.
# Module logger: channel.geometry
# ---------------------------------------------------------

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from channel.types import ChannelMatrix, ChannelSet, LinkRole, PathSet, SystemConfig
from util.errors import InvalidArgumentError
from util.logger import get_logger
from util.seeding import complex_gaussian

if TYPE_CHECKING:
    from channel.dictionary import Dictionary

logger = get_logger("channel.geometry")


def wrap_phase(args) -> np.ndarray:
    """Wrap phase arguments into [-pi, pi)."""
    wrapped = np.mod(np.asarray(args, dtype=float) + np.pi, 2 * np.pi) - np.pi
    # mod can return exactly 2*pi for tiny negative inputs
    return np.where(wrapped >= np.pi, wrapped - 2 * np.pi, wrapped)


def angle_to_phase(angles, spacing_ratio: float) -> np.ndarray:
    return wrap_phase(2 * np.pi * spacing_ratio * np.sin(np.asarray(angles, dtype=float)))


def steering_vector(phase_arg: float, n_elements: int) -> np.ndarray:
    """Unit-norm ULA response: entry i is exp(j*i*phase_arg)/sqrt(N)."""
    if n_elements < 1:
        raise InvalidArgumentError(f"n_elements must be >= 1, got {n_elements}")
    return np.exp(1j * np.arange(n_elements) * phase_arg) / np.sqrt(n_elements)


def steering_matrix(phase_args, n_elements: int) -> np.ndarray:
    """Steering vectors for several arguments, one per column."""
    if n_elements < 1:
        raise InvalidArgumentError(f"n_elements must be >= 1, got {n_elements}")
    args = np.atleast_1d(np.asarray(phase_args, dtype=float))
    return np.exp(1j * np.outer(np.arange(n_elements), args)) / np.sqrt(n_elements)


def gen_bs_ris_channel(paths: PathSet, L: int, J: int) -> ChannelMatrix:
    a_ris = steering_matrix(paths.aoa_arguments, L)
    a_bs = steering_matrix(paths.aod_arguments, J)
    scale = np.sqrt(L * J / paths.num_paths)
    entries = scale * (a_ris * paths.gains) @ a_bs.conj().T
    return ChannelMatrix(entries, LinkRole.BS_RIS)


def gen_ris_user_channel(paths: PathSet, L: int) -> ChannelMatrix:
    a_ris = steering_matrix(paths.aod_arguments, L)
    scale = np.sqrt(L / paths.num_paths)
    return ChannelMatrix(scale * (a_ris @ paths.gains), LinkRole.RIS_USER)


def cascaded_channel(h: ChannelMatrix, F: ChannelMatrix) -> ChannelMatrix:
    """G = diag(h^H) F: row l of F weighted by conj(h[l])."""
    if h.num_rows != F.num_rows:
        raise InvalidArgumentError(
            f"RIS dimension mismatch: h has {h.num_rows} rows, F has {F.num_rows}"
        )
    if h.shape[1] != 1:
        raise InvalidArgumentError(f"h must be a column, got shape {h.shape}")
    return ChannelMatrix(h.entries.conj() * F.entries, LinkRole.CASCADED)


def cascaded_channel_from_paths(bs_paths: PathSet, ue_paths: PathSet, L: int, J: int) -> ChannelMatrix:
    """
    Sum-of-outer-products form of the cascaded channel.

    With unit-norm steering vectors the scale is sqrt(L*J/(P_f*P_h)); the
    user-side gain appears conjugated and the RIS argument is the cascaded AoA
    wrap(theta_p - varphi_b).
    """
    scale = np.sqrt(L * J / (bs_paths.num_paths * ue_paths.num_paths))
    entries = np.zeros((L, J), dtype=complex)
    for theta, phi, beta in zip(bs_paths.aoa_arguments, bs_paths.aod_arguments, bs_paths.gains):
        a_bs = steering_vector(phi, J)
        for varphi, gamma in zip(ue_paths.aod_arguments, ue_paths.gains):
            a_ris = steering_vector(wrap_phase(theta - varphi), L)
            entries += scale * beta * np.conj(gamma) * np.outer(a_ris, a_bs.conj())
    return ChannelMatrix(entries, LinkRole.CASCADED)


def snap_to_grid(args, grid: Dictionary) -> np.ndarray:
    """Replace each phase argument by its circularly nearest grid point."""
    return grid.grid_args[grid.nearest_indices(args)]


def _num_paths(config: SystemConfig, link: LinkRole) -> int:
    if link is LinkRole.BS_RIS:
        return config.paths_bs_ris
    if link is LinkRole.RIS_USER:
        return config.paths_ris_user
    raise InvalidArgumentError(f"paths are sampled per physical link, not for {link.value}")


def sample_paths(
    config: SystemConfig,
    link: LinkRole,
    rng: np.random.Generator,
    on_grid: bool = False,
    ris_grid: Dictionary | None = None,
    bs_grid: Dictionary | None = None,
) -> PathSet:
    """
    Draw one link's paths: angles uniform on [0, 2*pi) mapped to phase
    arguments, unit-power complex Gaussian gains.

    With on_grid, RIS-side arguments snap to `ris_grid` and BS-side arguments
    to `bs_grid`.
    """
    link = LinkRole(link)
    num_paths = _num_paths(config, link)
    spacing = config.element_spacing_ratio

    aoa = angle_to_phase(rng.uniform(0.0, 2 * np.pi, num_paths), spacing)
    aod = angle_to_phase(rng.uniform(0.0, 2 * np.pi, num_paths), spacing)
    gains = complex_gaussian(rng, num_paths)

    if on_grid:
        if ris_grid is None or (link is LinkRole.BS_RIS and bs_grid is None):
            raise InvalidArgumentError(f"on-grid sampling of a {link.value} link needs its grids")
        if link is LinkRole.BS_RIS:
            aoa = snap_to_grid(aoa, ris_grid)
            aod = snap_to_grid(aod, bs_grid)
        else:
            aod = snap_to_grid(aod, ris_grid)

    return PathSet(aoa, aod, gains)


def generate_channels(
    config: SystemConfig,
    rng: np.random.Generator,
    ris_grid: Dictionary | None = None,
    bs_grid: Dictionary | None = None,
    on_grid: bool = False,
) -> ChannelSet:
    """Draw every F_mn and h_nk of a scenario with independent path sets."""
    L = config.ris_elements

    bs_ris_paths = tuple(
        tuple(
            sample_paths(config, LinkRole.BS_RIS, rng, on_grid, ris_grid, bs_grid)
            for _ in range(config.num_ris)
        )
        for _ in range(config.num_bs)
    )
    ris_user_paths = tuple(
        tuple(
            sample_paths(config, LinkRole.RIS_USER, rng, on_grid, ris_grid, bs_grid)
            for _ in range(config.num_users)
        )
        for _ in range(config.num_ris)
    )

    bs_ris = tuple(
        tuple(gen_bs_ris_channel(p, L, config.bs_antennas[m]) for p in row)
        for m, row in enumerate(bs_ris_paths)
    )
    ris_user = tuple(tuple(gen_ris_user_channel(p, L) for p in row) for row in ris_user_paths)

    logger.debug(
        f"Generated channels: {config.num_bs} BSs x {config.num_ris} RISs x "
        f"{config.num_users} users (L={L}, on_grid={on_grid})"
    )
    return ChannelSet(config, bs_ris, ris_user, bs_ris_paths, ris_user_paths)


def _distinct(args: np.ndarray) -> np.ndarray:
    """Row mask keeping the first of every group of circularly equal argument tuples."""
    keep = np.ones(args.shape[0], dtype=bool)
    phasors = np.exp(1j * args)
    for i in range(1, args.shape[0]):
        same = np.all(np.isclose(phasors[:i], phasors[i], rtol=0.0, atol=1e-12), axis=1)
        keep[i] = not np.any(same & keep[:i])
    return keep


def cascaded_arguments(bs_paths: PathSet, ue_paths: PathSet) -> tuple[np.ndarray, np.ndarray]:
    """
    Exact (RIS argument, BS argument) of every cascaded path, in path order.

    The RIS argument of pair (p, b) is wrap(theta_p - varphi_b). Pairs that
    coincide (possible after on-grid snapping) are listed once.
    """
    ris_args = wrap_phase(bs_paths.aoa_arguments[:, None] - ue_paths.aod_arguments[None, :]).reshape(-1)
    bs_args = np.repeat(bs_paths.aod_arguments, ue_paths.num_paths)
    keep = _distinct(np.column_stack([ris_args, bs_args]))
    return ris_args[keep], bs_args[keep]


def ris_user_arguments(ue_paths: PathSet) -> np.ndarray:
    """Exact RIS-side arguments of h_nk, coinciding paths listed once."""
    args = ue_paths.aod_arguments
    return args[_distinct(args[:, None])]
