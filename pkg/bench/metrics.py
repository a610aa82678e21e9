# bench/metrics.py
# ---------------------------------------------------------
# NMSE metrics.
#
#   NMSE_G : mean over (m, n, k) of ||G_hat - G||_F^2 / ||G||_F^2
#   NMSE_h : mean over (n, k)    of ||h_hat - h||_2^2 / ||h||_2^2
#
# Estimates and truths are matched sequences (flat or nested the same
# way) of ChannelMatrix objects or arrays.
# ---------------------------------------------------------

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import Any

import numpy as np

from channel.types import ChannelMatrix
from util.errors import InvalidArgumentError


def _as_array(item: Any) -> np.ndarray:
    if isinstance(item, ChannelMatrix):
        return item.entries
    return np.asarray(item, dtype=complex)


def _flatten(items: Any, prefix: tuple[int, ...] = ()) -> list[tuple[tuple[int, ...], np.ndarray]]:
    if isinstance(items, (ChannelMatrix, np.ndarray)):
        return [(prefix, _as_array(items))]
    out = []
    for i, item in enumerate(items):
        out.extend(_flatten(item, prefix + (i,)))
    return out


def _relative_errors(estimates: Sequence, truths: Sequence, kind: str) -> np.ndarray:
    est = _flatten(estimates)
    tru = _flatten(truths)
    if not tru:
        raise InvalidArgumentError(f"{kind}: no links to average over")
    if [idx for idx, _ in est] != [idx for idx, _ in tru]:
        raise InvalidArgumentError(f"{kind}: estimates and truths are indexed differently")

    errors = np.empty(len(tru))
    for i, ((link, e), (_, t)) in enumerate(zip(est, tru)):
        if e.shape != t.shape:
            raise InvalidArgumentError(f"{kind}: link {link} has estimate {e.shape} vs truth {t.shape}")
        denom = float(np.vdot(t, t).real)
        if denom == 0.0:
            raise InvalidArgumentError(f"{kind}: truth of link {link} has zero norm")
        diff = e - t
        errors[i] = float(np.vdot(diff, diff).real) / denom
    return errors


def nmse_cascaded(estimates: Sequence, truths: Sequence) -> float:
    return float(np.mean(_relative_errors(estimates, truths, "NMSE_G")))


def nmse_h(estimates: Sequence, truths: Sequence) -> float:
    return float(np.mean(_relative_errors(estimates, truths, "NMSE_h")))


def to_db(value: float) -> float:
    return 10 * math.log10(value) if value > 0 else -math.inf
