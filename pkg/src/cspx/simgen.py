"""Seeded synthetic data for the projection benchmarks and sparse regression.

Random bits come from numpy's Philox4x64 counter-based generator, read as
raw uint64 words; everything downstream (uniform doubles, Box-Muller
normals, index sampling) is done here so output does not depend on the
numpy ``Generator`` method implementations, which are not version-stable.
Each (purpose, seed) pair selects its own Philox key, so streams never
overlap.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

_TWO_M53 = 2.0 ** -53


def stream(purpose: str, seed: int) -> np.random.Philox:
    """Independent raw-bit stream for one (purpose, seed) pair."""
    tag = zlib.crc32(purpose.encode("ascii"))
    return np.random.Philox(key=np.array([seed & (2**64 - 1), tag], dtype=np.uint64))


def uniforms(bits: np.random.Philox, size: int) -> np.ndarray:
    """Doubles on [0, 1) from the top 53 bits of each word."""
    raw = bits.random_raw(size)
    return (raw >> np.uint64(11)).astype(np.float64) * _TWO_M53


def normals(bits: np.random.Philox, size: int) -> np.ndarray:
    """Standard normals by Box-Muller, consuming two words per pair."""
    half = (size + 1) // 2
    u = uniforms(bits, 2 * half)
    u1 = 1.0 - u[0::2]  # (0, 1], keeps log finite
    u2 = u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * math.pi * u2
    out = np.empty(2 * half)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:size]


@dataclass(frozen=True)
class SimulationConfig:
    m: int = 100
    n: int = 1000
    p: float = 0.2
    k_true: int = 20
    snr: float = 6.0
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be positive")
        if not 1 <= self.k_true <= self.n:
            raise ValueError("k_true must lie in [1, n]")
        if not 0.0 <= self.p < 1.0:
            raise ValueError("p must lie in [0, 1)")
        if not self.snr > 0:
            raise ValueError("snr must be positive")


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    w_true: np.ndarray
    config: SimulationConfig


def sample_projection_input(n: int, alpha: float, seed: int) -> np.ndarray:
    """n i.i.d. draws from U[-alpha, alpha)."""
    u = uniforms(stream("projection", seed), n)
    return alpha * (2.0 * u - 1.0)


def sample_ar1_design(m: int, n: int, p: float, seed: int) -> np.ndarray:
    """Rows with Toeplitz covariance p**|i-j| via a stationary AR(1) recurrence.

    Row r consumes words [r*n, (r+1)*n) of the design stream, so each row is a
    fixed block of the counter sequence.
    """
    if not 0.0 <= p < 1.0:
        raise ValueError("p must lie in [0, 1)")
    z = normals(stream("design", seed), m * n).reshape(m, n)
    if p == 0.0:
        return z
    x = np.empty_like(z)
    x[:, 0] = z[:, 0]
    c = math.sqrt(1.0 - p * p)
    for j in range(1, n):
        x[:, j] = p * x[:, j - 1] + c * z[:, j]
    return x


def sample_true_weights(n: int, k_true: int, seed: int) -> np.ndarray:
    """Exactly k_true entries in {-1, +1} at uniformly chosen positions; zeros elsewhere."""
    if not 1 <= k_true <= n:
        raise ValueError("k_true must lie in [1, n]")
    bits = stream("weights", seed)
    # partial Fisher-Yates over positions
    idx = np.arange(n)
    u = uniforms(bits, k_true)
    for i in range(k_true):
        j = i + int(u[i] * (n - i))
        idx[i], idx[j] = idx[j], idx[i]
    signs = np.where(bits.random_raw(k_true) >> np.uint64(63), -1.0, 1.0)
    w = np.zeros(n)
    w[idx[:k_true]] = signs
    return w


def add_snr_noise(signal, snr: float, seed: int) -> np.ndarray:
    """signal + eps with ||signal|| / ||eps|| = sqrt(snr) by construction."""
    signal = np.asarray(signal, dtype=np.float64)
    s_norm = np.linalg.norm(signal)
    if s_norm == 0:
        raise ValueError("signal must be nonzero to set an SNR")
    if not snr > 0:
        raise ValueError("snr must be positive")
    e0 = normals(stream("noise", seed), signal.shape[0])
    eps = e0 * (s_norm / (math.sqrt(snr) * np.linalg.norm(e0)))
    return signal + eps


def generate_dataset(config: SimulationConfig) -> Dataset:
    X = sample_ar1_design(config.m, config.n, config.p, config.seed)
    w = sample_true_weights(config.n, config.k_true, config.seed)
    y = add_snr_noise(X @ w, config.snr, config.seed)
    return Dataset(X=X, y=y, w_true=w, config=config)
