"""Link budget: path loss, lognormal shadowing, Rayleigh fading and UL SINR."""
from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

MIN_DISTANCE = 0.1  # meters; keeps d^-alpha finite when a probe sits on a BS


class LinkSample(NamedTuple):
    distance: float
    fading: float = 1.0
    shadow: float = 1.0


def received_power(tx_power, link: LinkSample, alpha):
    return tx_power * link.fading * link.shadow * np.power(link.distance, -alpha)


def mean_received_power(tx_power, distance, shadow, alpha):
    """Fading-averaged received power, the association metric."""
    return tx_power * shadow * np.power(distance, -alpha)


def ul_sinr(serving: LinkSample, device_power: float, interferer_links: Sequence[LinkSample], noise: float, alpha: float) -> float:
    signal = received_power(device_power, serving, alpha)
    interference = sum(received_power(device_power, l, alpha) for l in interferer_links)
    return signal / (interference + noise)


def sample_fading(rng: np.random.Generator, size=None):
    """Rayleigh fading power gains: unit-mean exponential."""
    return rng.standard_exponential(size)


def sample_shadowing(rng: np.random.Generator, mean_db: float, std_db: float, size=None):
    """Lognormal multipliers chi = 10^(X/10), X ~ N(mean_db, std_db^2)."""
    if std_db == 0:
        return np.full(size, 10.0 ** (mean_db / 10.0)) if size is not None else 10.0 ** (mean_db / 10.0)
    return 10.0 ** (rng.normal(mean_db, std_db, size) / 10.0)


def effective_distance(distance, shadow, alpha):
    """Distance of the displaced point: d * chi^(-1/alpha)."""
    return np.asarray(distance) * np.power(shadow, -1.0 / alpha)


def clamp_distance(d):
    return np.maximum(d, MIN_DISTANCE)


def lognormal_mean(mean_db: float, std_db: float) -> float:
    k = math.log(10.0) / 10.0
    return math.exp(k * mean_db + 0.5 * (k * std_db) ** 2)
