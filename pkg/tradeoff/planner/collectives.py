"""Collective-communication time from profiled bandwidths

Per-device volumes follow ring collectives over a group of ``g`` devices:

- all-gather of a shard of ``b`` bytes receives ``b * (g - 1)`` bytes
- all-to-all of a shard of ``b`` bytes moves ``b * (g - 1) / g`` bytes
- all-reduce of ``b`` bytes moves ``2 * b * (g - 1) / g`` bytes
"""

import math
from typing import Union

import numpy as np

from ..graph.models import BandwidthProfile, DeviceGraph
from ..utils.errors import ProfileOutOfRange

Bytes = Union[int, float]

INTERPOLATIONS = ("linear", "log")


def comm_time(nbytes: Bytes, profile: BandwidthProfile, interpolation: str = "linear") -> float:
    """Seconds to move ``nbytes`` under ``profile``.

    The effective bandwidth is interpolated between the two profiled sizes
    bracketing ``nbytes``: linearly in bytes, or linearly in log2(bytes) when
    ``interpolation == "log"``. Exact at every profiled size.
    """
    if nbytes < 0:
        raise ValueError("nbytes must be non-negative")
    if nbytes == 0:
        return 0.0
    if nbytes > profile.max_bytes:
        raise ProfileOutOfRange(
            f"{nbytes} bytes exceeds the largest profiled size 2^{profile.max_log2_bytes}"
        )

    log_sizes = np.array([p[0] for p in profile.points], dtype=float)
    bandwidths = np.array([p[1] for p in profile.points], dtype=float)
    if interpolation == "linear":
        bandwidth = float(np.interp(float(nbytes), np.exp2(log_sizes), bandwidths))
    elif interpolation == "log":
        bandwidth = float(np.interp(math.log2(nbytes), log_sizes, bandwidths))
    else:
        raise ValueError(f"Unknown interpolation '{interpolation}'; use one of {INTERPOLATIONS}")
    return profile.latency + nbytes / bandwidth


def all_gather_bytes(shard_bytes: Bytes, group_size: int) -> Bytes:
    return shard_bytes * (group_size - 1)


def all_to_all_bytes(shard_bytes: Bytes, group_size: int) -> Bytes:
    return shard_bytes * (group_size - 1) / group_size


def all_reduce_bytes(nbytes: Bytes, group_size: int) -> Bytes:
    return 2 * nbytes * (group_size - 1) / group_size


def collective_time(dev: DeviceGraph, group_size: int, nbytes: Bytes,
                    interpolation: str = "linear") -> float:
    """Time of one collective within groups of ``group_size`` devices"""
    if group_size <= 1 or nbytes == 0:
        return 0.0
    profile = dev.scheme_for_group(group_size).profile
    return comm_time(nbytes, profile, interpolation)
