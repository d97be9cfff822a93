"""Harmonic decomposition of short annual series and the cyclical GDP force."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from liquidyn.errors import ValidationError


@dataclass(frozen=True)
class TimeSeries:
    start_time: float
    values: tuple[float, ...]
    step: float = 1.0

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not all(math.isfinite(v) for v in values):
            raise ValidationError("values must be finite", "values")
        if not (math.isfinite(self.step) and self.step > 0):
            raise ValidationError(f"must be > 0, got {self.step}", "step")
        object.__setattr__(self, "values", values)

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.step * np.arange(len(self.values))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class HarmonicComponent:
    a: float                 # cosine amplitude
    b: float                 # sine amplitude
    omega: float             # angular frequency, rad per unit time
    power: float = 0.0       # mean square of the component over the fitted samples
    peak_period: float = math.nan  # parabolic-interpolated period of the spectral peak

    def __post_init__(self):
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValidationError(f"must be > 0, got {self.omega}", "omega")

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega

    @property
    def amplitude(self) -> float:
        return math.hypot(self.a, self.b)

    @property
    def phase(self) -> float:
        """Phase ``phi`` such that the component equals ``amplitude * cos(omega*t - phi)``."""
        return math.atan2(self.b, self.a)

    def __call__(self, t):
        wt = self.omega * np.asarray(t, dtype=float)
        return self.a * np.cos(wt) + self.b * np.sin(wt)


@dataclass(frozen=True)
class HarmonicModel:
    trend_mean: float
    components: tuple[HarmonicComponent, ...] = field(default_factory=tuple)
    trend_slope: float = 0.0
    residual_power: float = 0.0
    total_power: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))


def eval_trig(A: float, B: float, omega: float, phi: float, t: float) -> float:
    x = omega * t + phi
    return A * math.sin(x) + B * math.cos(x)


def periodogram(values, step: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """One-sided periodogram of a (detrended) series on its Fourier frequencies.

    Returns cycle frequencies ``k / (n * step)`` for ``k = 1 .. n // 2`` and the
    power of each bin, normalised so the powers sum to the mean square of the
    series minus its mean.
    """
    y = np.asarray(values, dtype=float)
    n = y.size
    spectrum = np.fft.rfft(y)[1:]
    power = 2.0 * np.abs(spectrum) ** 2 / n**2
    if n % 2 == 0:
        power[-1] /= 2.0
    freqs = np.arange(1, n // 2 + 1) / (n * step)
    return freqs, power


def _peak_period(freqs: np.ndarray, power: np.ndarray, i: int) -> float:
    if 0 < i < len(power) - 1:
        left, mid, right = power[i - 1], power[i], power[i + 1]
        denom = left - 2 * mid + right
        delta = 0.5 * (left - right) / denom if denom != 0 else 0.0
    else:
        delta = 0.0
    df = freqs[0]
    return 1.0 / (freqs[i] + delta * df)


def fit_harmonics(series: TimeSeries, k: int, detrend: str = "mean") -> HarmonicModel:
    """Fit the ``k`` strongest Fourier-grid harmonics by joint least squares.

    The series is detrended (``"mean"`` or ``"linear"``), bins of the
    periodogram are ranked by power (ties go to the lower frequency), and the
    cosine/sine amplitudes of the selected bins are solved jointly against the
    detrended series in absolute time, so :func:`reconstruct` evaluates the
    fitted cycle at the original time stamps.
    """
    if k < 0:
        raise ValidationError(f"must be >= 0, got {k}", "k")
    n = len(series)
    if n < 2 * k + 2:
        raise ValidationError(f"k={k} needs at least {2 * k + 2} samples, got {n}", "k")
    y = np.asarray(series.values, dtype=float)
    t = series.times

    slope = 0.0
    if detrend == "linear":
        slope, intercept = np.polyfit(t - t.mean(), y, 1)
        mean = intercept - slope * t.mean()
        detrended = y - intercept - slope * (t - t.mean())
    elif detrend == "mean":
        mean = y.mean()
        detrended = y - mean
    else:
        raise ValidationError(f"unknown detrend mode {detrend!r}", "detrend")

    total = float(np.mean(detrended**2))
    scale = max(np.abs(y).max(), 1.0)
    if k == 0 or np.abs(detrended).max() <= 1e-12 * scale:
        return HarmonicModel(trend_mean=float(mean), trend_slope=float(slope),
                             residual_power=total, total_power=total)

    freqs, power = periodogram(detrended, series.step)
    # stable sort on -power keeps the lower frequency first among equal bins
    order = np.argsort(-np.round(power, 15), kind="stable")[:k]
    selected = [int(i) for i in order if power[i] > 0]

    omegas = 2 * np.pi * freqs[selected]
    nyquist = n % 2 == 0 and (n // 2 - 1) in selected
    columns = []
    for j, i in enumerate(selected):
        if nyquist and i == n // 2 - 1:
            # cos and sin are collinear at the Nyquist bin; fit (-1)^i alone
            columns.append((-1.0) ** np.arange(n))
        else:
            columns += [np.cos(omegas[j] * t), np.sin(omegas[j] * t)]
    design = np.column_stack(columns)
    coef, *_ = np.linalg.lstsq(design, detrended, rcond=None)
    residual = detrended - design @ coef

    components = []
    pos = 0
    for j, i in enumerate(selected):
        if nyquist and i == n // 2 - 1:
            angle = np.pi * np.mod(series.start_time / series.step, 2.0)
            a, b = coef[pos] * np.cos(angle), coef[pos] * np.sin(angle)
            pos += 1
        else:
            a, b = coef[pos], coef[pos + 1]
            pos += 2
        comp = HarmonicComponent(a=float(a), b=float(b), omega=float(omegas[j]))
        comp_power = float(np.mean(comp(t) ** 2))
        components.append(HarmonicComponent(
            a=comp.a, b=comp.b, omega=comp.omega, power=comp_power,
            peak_period=_peak_period(freqs, power, i)))
    components.sort(key=lambda c: (-round(c.power, 15), c.omega))
    return HarmonicModel(
        trend_mean=float(mean),
        components=tuple(components),
        trend_slope=float(slope),
        residual_power=float(np.mean(residual**2)),
        total_power=total,
    )


def reconstruct(model: HarmonicModel, t):
    """Cyclical force at ``t`` (scalar or array): the harmonic sum without trend."""
    t_arr = np.asarray(t, dtype=float)
    out = np.zeros_like(t_arr)
    for comp in model.components:
        out = out + comp(t_arr)
    return float(out) if out.ndim == 0 else out


def mean_impact(model: HarmonicModel, t0: float, t1: float, n: int = 1001) -> float:
    """Mean absolute cyclical force over ``n`` evenly spaced points of ``[t0, t1]``."""
    if not t1 > t0:
        raise ValidationError(f"need t1 > t0, got [{t0}, {t1}]", "t1")
    if n < 2:
        raise ValidationError(f"must be >= 2, got {n}", "n")
    grid = np.linspace(t0, t1, n)
    return float(np.mean(np.abs(reconstruct(model, grid))))
