# channel/__init__.py
# Channel synthesis and steering dictionaries.

from .types import ChannelMatrix, ChannelSet, LinkRole, PathSet, SystemConfig
from .geometry import (
    cascaded_channel,
    cascaded_channel_from_paths,
    cascaded_arguments,
    gen_bs_ris_channel,
    gen_ris_user_channel,
    generate_channels,
    ris_user_arguments,
    sample_paths,
    snap_to_grid,
    steering_vector,
)
from .dictionary import Dictionary, SupportSet, build_dictionary, reconstruct_cascaded

__all__ = [
    "ChannelMatrix",
    "ChannelSet",
    "LinkRole",
    "PathSet",
    "SystemConfig",
    "cascaded_channel",
    "cascaded_channel_from_paths",
    "cascaded_arguments",
    "gen_bs_ris_channel",
    "gen_ris_user_channel",
    "generate_channels",
    "ris_user_arguments",
    "sample_paths",
    "snap_to_grid",
    "steering_vector",
    "Dictionary",
    "SupportSet",
    "build_dictionary",
    "reconstruct_cascaded",
]
