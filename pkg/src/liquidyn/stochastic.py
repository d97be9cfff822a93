"""Seeded Wiener paths and shock series.

Randomness is counter-based. The uniform for step ``j`` of a path seeded with
``s`` is the SplitMix64 output for state ``s + (j + 1) * GOLDEN``, mapped to
the open interval (0, 1) with 53 bits of resolution, and turned into a
standard normal by the inverse normal CDF. Per-path seeds for an ensemble are
``splitmix64(master_seed + (path_index + 1) * GOLDEN)``. Every draw is a pure
function of (seed, step), so ensembles can be split across workers in any way
without changing a single bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from liquidyn.errors import ValidationError

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MASK64 = (1 << 64) - 1


def splitmix64(x) -> np.ndarray:
    """SplitMix64 finaliser applied elementwise to uint64 states."""
    z = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = z + GOLDEN
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _as_u64(seed: int) -> np.uint64:
    return np.uint64(int(seed) & _MASK64)


def derive_seeds(master_seed: int, indices) -> np.ndarray:
    """Per-path seeds for the given path indices; independent of evaluation order."""
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        states = _as_u64(master_seed) + idx * GOLDEN
    return splitmix64(states)


def standard_normals(seeds, n_steps: int) -> np.ndarray:
    """Matrix of standard normal draws, one row per seed, ``n_steps`` columns."""
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
    steps = np.arange(1, n_steps + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        states = seeds[:, None] + steps[None, :] * GOLDEN - GOLDEN
    bits = splitmix64(states) >> np.uint64(11)
    u = (bits.astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(u)


@dataclass(frozen=True)
class WienerPath:
    seed: int
    dt: float
    values: np.ndarray

    @property
    def n_steps(self) -> int:
        return len(self.values) - 1

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.values))


@dataclass(frozen=True)
class ShockConfig:
    sigma: float
    n_steps: int
    dt: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValidationError(f"must be finite and >= 0, got {self.sigma}", "sigma")
        if self.n_steps < 0:
            raise ValidationError(f"must be >= 0, got {self.n_steps}", "n_steps")
        _check_dt(self.dt)


def _check_dt(dt: float) -> None:
    if not (math.isfinite(dt) and dt > 0):
        raise ValidationError(f"must be > 0, got {dt}", "dt")


def wiener_paths(seeds, n_steps: int, dt: float) -> np.ndarray:
    """Cumulative Wiener values ``W_0 .. W_n`` for each seed (rows)."""
    _check_dt(dt)
    if n_steps < 0:
        raise ValidationError(f"must be >= 0, got {n_steps}", "n_steps")
    increments = math.sqrt(dt) * standard_normals(seeds, n_steps)
    out = np.zeros((increments.shape[0], n_steps + 1))
    np.cumsum(increments, axis=1, out=out[:, 1:])
    return out


def wiener_path(seed: int, n_steps: int, dt: float) -> WienerPath:
    values = wiener_paths([_as_u64(seed)], n_steps, dt)[0]
    return WienerPath(seed=int(seed), dt=float(dt), values=values)


def wiener_ensemble(master_seed: int, n_paths: int, n_steps: int, dt: float,
                    workers: int = 1) -> np.ndarray:
    """``n_paths`` paths seeded by :func:`derive_seeds`; rows ordered by path index.

    ``workers > 1`` splits the rows across processes. The result is bitwise
    identical for any worker count.
    """
    seeds = derive_seeds(master_seed, np.arange(n_paths))
    if workers <= 1 or n_paths < 2:
        return wiener_paths(seeds, n_steps, dt)
    from concurrent.futures import ProcessPoolExecutor

    chunks = np.array_split(seeds, min(workers, n_paths))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(wiener_paths, chunks, [n_steps] * len(chunks), [dt] * len(chunks)))
    return np.vstack(parts)


def shock_series(cfg: ShockConfig, path: WienerPath) -> np.ndarray:
    if len(path.values) < cfg.n_steps + 1:
        raise ValidationError(
            f"path has {len(path.values)} values, need {cfg.n_steps + 1}", "path")
    return cfg.sigma * np.asarray(path.values[: cfg.n_steps + 1])
