"""Scenario application, one-at-a-time sensitivity and dynamic residual runs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from liquidyn.cycles import HarmonicModel, reconstruct
from liquidyn.errors import ValidationError
from liquidyn.model import (
    PARAMETER_NAMES,
    BalanceResult,
    ParameterSet,
    balance,
    eval_lhs,
    eval_rhs_partial,
)
from liquidyn.stochastic import ShockConfig, derive_seeds, wiener_path, wiener_paths

COMPOSITE_DIFFUSION = "diffusion_term"
TARGETS: tuple[str, ...] = PARAMETER_NAMES + (COMPOSITE_DIFFUSION,)


class Side(str, Enum):
    LHS = "LHS"
    RHS = "RHS"
    BOTH = "BOTH"
    NONE = "NONE"


_LHS_TARGETS = frozenset({"shock", "dv_dt", "internal_tension", "cyclical_force", "rho"})
_RHS_TARGETS = frozenset({"pressure", "stickiness", "diffusion", "risk_premium", "cds",
                          "beta", "epsilon", COMPOSITE_DIFFUSION})


def check_target(target: str) -> str:
    if target not in TARGETS:
        raise ValidationError(f"unknown parameter {target!r}", "target")
    return target


def classify_effect(target: str) -> Side:
    """Which side of the balance a parameter enters."""
    check_target(target)
    if target in _LHS_TARGETS:
        return Side.LHS
    if target in _RHS_TARGETS:
        return Side.RHS
    return Side.NONE


@dataclass(frozen=True)
class Perturbation:
    target: str
    new_value: float
    old_value: Optional[float] = None   # value the scenario author quoted as the baseline

    def __post_init__(self):
        check_target(self.target)
        for name in ("new_value", "old_value"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise ValidationError(f"must be finite, got {value}", self.target)


@dataclass(frozen=True)
class Scenario:
    name: str
    perturbations: tuple[Perturbation, ...] = ()
    fixed_epsilon: Optional[float] = None
    indicators: tuple[Perturbation, ...] = ()   # reported only, never applied
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "perturbations", tuple(self.perturbations))
        object.__setattr__(self, "indicators", tuple(self.indicators))
        targets = [p.target for p in self.perturbations]
        dupes = sorted({t for t in targets if targets.count(t) > 1})
        if dupes:
            raise ValidationError(f"duplicate target(s): {', '.join(dupes)}", dupes[0])
        if "diffusion_term" in targets and "stickiness" in targets:
            raise ValidationError("diffusion_term and stickiness both rescale stickiness",
                                  COMPOSITE_DIFFUSION)


def current_value(p: ParameterSet, target: str) -> float:
    check_target(target)
    return p.diffusion_term if target == COMPOSITE_DIFFUSION else getattr(p, target)


def _apply_one(p: ParameterSet, pert: Perturbation) -> dict[str, float]:
    if pert.target == COMPOSITE_DIFFUSION:
        if p.diffusion == 0:
            raise ValidationError("cannot rescale stickiness while diffusion is zero",
                                  COMPOSITE_DIFFUSION)
        return {"stickiness": pert.new_value / p.diffusion}
    return {pert.target: pert.new_value}


def apply_scenario(base: ParameterSet, s: Scenario) -> ParameterSet:
    """Copy of ``base`` with every perturbation applied.

    A composite ``diffusion_term`` target rescales stickiness against the
    post-scenario LCR, so it commutes with a ``diffusion`` perturbation.
    """
    direct = [p for p in s.perturbations if p.target != COMPOSITE_DIFFUSION]
    composite = [p for p in s.perturbations if p.target == COMPOSITE_DIFFUSION]
    out = base
    for pert in direct:
        out = out.replace(**_apply_one(out, pert))
    for pert in composite:
        out = out.replace(**_apply_one(out, pert))
    return out


def _fixed_epsilon(base: ParameterSet, s: Scenario) -> float:
    return base.epsilon if s.fixed_epsilon is None else s.fixed_epsilon


def run_scenario(base: ParameterSet, s: Scenario) -> BalanceResult:
    return balance(apply_scenario(base, s), _fixed_epsilon(base, s))


@dataclass(frozen=True)
class SensitivityRow:
    target: str
    baseline_value: float
    perturbed_value: float
    delta_lhs: float
    delta_rhs: float
    delta_imbalance: float
    side: Side
    slope: Optional[float]   # delta_imbalance per unit change; None for a zero change


@dataclass(frozen=True)
class SensitivityReport:
    scenario: str
    fixed_epsilon: float
    baseline: BalanceResult
    rows: tuple[SensitivityRow, ...]
    indicators: tuple[Perturbation, ...] = ()


def _side_from_deltas(dl: float, dr: float) -> Side:
    if dl != 0 and dr != 0:
        return Side.BOTH
    if dl != 0:
        return Side.LHS
    if dr != 0:
        return Side.RHS
    return Side.NONE


def oat_sensitivity(base: ParameterSet, s: Scenario) -> SensitivityReport:
    """Apply each perturbation alone and rank by absolute change in imbalance.

    Imbalance is evaluated at the scenario's fixed residual throughout. Ties
    are broken by parameter name.
    """
    eps = _fixed_epsilon(base, s)
    ref = balance(base, eps)
    rows = []
    for pert in s.perturbations:
        single = Scenario(name=pert.target, perturbations=(pert,), fixed_epsilon=eps)
        res = run_scenario(base, single)
        dl = res.lhs - ref.lhs
        dr = res.rhs - ref.rhs
        di = res.imbalance - ref.imbalance
        before = current_value(base, pert.target)
        change = pert.new_value - before
        rows.append(SensitivityRow(
            target=pert.target,
            baseline_value=before,
            perturbed_value=pert.new_value,
            delta_lhs=dl,
            delta_rhs=dr,
            delta_imbalance=di,
            side=_side_from_deltas(dl, dr),
            slope=di / change if change != 0 else None,
        ))
    rows.sort(key=lambda r: (-abs(r.delta_imbalance), r.target))
    return SensitivityReport(scenario=s.name, fixed_epsilon=eps, baseline=ref,
                             rows=tuple(rows), indicators=s.indicators)


@dataclass(frozen=True)
class DynamicEpsilonSeries:
    times: np.ndarray
    epsilon_required: np.ndarray
    cyclical_force: np.ndarray
    shock: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        if any(len(a) != n for a in (self.epsilon_required, self.cyclical_force, self.shock)):
            raise ValidationError("series lengths differ", "times")


def _epsilon_paths(base: ParameterSet, forces: np.ndarray, shocks: np.ndarray) -> np.ndarray:
    # required eps is affine in (shock, cyclical_force) with everything else held fixed
    frozen = base.replace(shock=0.0, cyclical_force=0.0)
    return shocks + base.rho * forces + (eval_lhs(frozen) - eval_rhs_partial(frozen))


def dynamic_epsilon_series(base: ParameterSet, model: HarmonicModel, shock: ShockConfig,
                           seed: int, t0: float) -> DynamicEpsilonSeries:
    """Residual needed at each step when the cycle and the shock evolve in time.

    At step ``i`` the cyclical force is the harmonic reconstruction at
    ``t0 + i*dt`` and the shock is ``sigma * W_i``; all other parameters stay
    at their values in ``base``.
    """
    if shock.n_steps < 1:
        raise ValidationError(f"must be >= 1, got {shock.n_steps}", "n_steps")
    path = wiener_path(seed, shock.n_steps, shock.dt)
    times = t0 + shock.dt * np.arange(shock.n_steps + 1)
    forces = np.asarray(reconstruct(model, times), dtype=float)
    shocks = shock.sigma * path.values
    return DynamicEpsilonSeries(times=times,
                                epsilon_required=_epsilon_paths(base, forces, shocks),
                                cyclical_force=forces, shock=shocks)


def _mc_chunk(base, model, shock, seeds, t0):
    times = t0 + shock.dt * np.arange(shock.n_steps + 1)
    forces = np.asarray(reconstruct(model, times), dtype=float)
    shocks = shock.sigma * wiener_paths(seeds, shock.n_steps, shock.dt)
    eps_req = _epsilon_paths(base, forces[None, :], shocks)
    # imbalance at the fixed residual is eps_fixed - eps_required
    gap = np.abs(base.epsilon - eps_req).max(axis=1)
    return eps_req[:, -1], gap


def _summary(x: np.ndarray) -> dict[str, float]:
    return {
        "mean": float(np.mean(x)),
        "std": float(np.std(x, ddof=1)) if x.size > 1 else 0.0,
        "p05": float(np.percentile(x, 5)),
        "p95": float(np.percentile(x, 95)),
    }


def monte_carlo_balance(base: ParameterSet, model: HarmonicModel, shock: ShockConfig,
                        n_paths: int, master_seed: int, t0: float = 0.0,
                        workers: int = 1) -> dict[str, dict[str, float]]:
    """Distribution of terminal required residual and of the worst fixed-residual gap.

    Path ``i`` uses seed ``derive_seeds(master_seed, [i])[0]``, so the result is
    identical for every ``workers`` setting.
    """
    if n_paths < 1:
        raise ValidationError(f"must be >= 1, got {n_paths}", "n_paths")
    if shock.n_steps < 1:
        raise ValidationError(f"must be >= 1, got {shock.n_steps}", "n_steps")
    seeds = derive_seeds(master_seed, np.arange(n_paths))
    if workers <= 1 or n_paths < 2:
        terminal, gap = _mc_chunk(base, model, shock, seeds, t0)
    else:
        from concurrent.futures import ProcessPoolExecutor

        chunks = np.array_split(seeds, min(workers, n_paths))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_mc_chunk, *zip(*[(base, model, shock, c, t0) for c in chunks])))
        terminal = np.concatenate([p[0] for p in parts])
        gap = np.concatenate([p[1] for p in parts])
    return {
        "terminal_epsilon_required": _summary(terminal),
        "max_abs_imbalance": _summary(gap),
    }
