"""Rearrangement-average bounds, reverse Holder exponents, and empirical RH constants.

For data in GR(epsilon) and parameters epsilon < lambda < 2,
0 < rho < 1 - lambda/2, the running average of the rearrangement is
controlled at every t <= rho * mu(Q_0) by

    fstarstar(t) <= K * fstar(t),
    K = B * (lambda/rho + 1) * epsilon / (lambda - epsilon) + 1,

where B is the overlap constant and rho the per-cube density floor of a
covering of E_t = {f > fstar(t)} with density cap 1 - lambda/2.  The
verification here is honest about discreteness: it builds the covering,
measures the achieved (rho_lo, overlap), and asserts the bound with the
achieved constant K_achieved; the nominal-rho constant is reported for
comparison only.  Two per-cube facts make the chain work and are checked
with margins:

    mean(Q_i) <= lambda/(lambda - epsilon) * fstar(t)        (mean margin)
    osc(Q_i)  <= epsilon*lambda/(lambda - epsilon) * fstar(t) (osc margin)

both requiring osc(Q_i) <= epsilon * mean(Q_i) on each covering cube, which
is re-checked cube by cube.

By a classical argument the average bound yields the reverse Holder
inequality for every exponent

    p < 1 + (lambda - epsilon) / (B * (lambda/rho + 1) * epsilon),

which is what rh_exponent_bound returns; the identity
(p_max - 1) * (K - 1) = 1 ties the two constants together.
optimize_rh_exponent maximizes the exponent over lambda with
rho(lambda) = (1 - lambda/2)(1 - delta) pinned a safety gap below its open
constraint.  rh_constant measures the best empirical RH constant

    c_hat = max_Q (p-mean of f over Q) / (mean of f over Q)

over the enumerated family only; it certifies nothing beyond that family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .covering import build_covering, cell_set
from .errors import DomainError, PreconditionError
from .grids import Cube, EnumerationMode, WeightedGrid, box_sums, default_mode, _prefix_table
from .oscillation import gr_epsilon, oscillation
from .rearrangement import average, evaluate, rearrangement
from . import scan

__all__ = [
    "TailBoundParams",
    "TailCheck",
    "TailBoundReport",
    "rearrangement_bound",
    "rh_exponent_bound",
    "optimize_rh_exponent",
    "verify_rearrangement_bound",
    "rh_constant",
]

DEFAULT_TOL = 1e-12


def _check_bound_params(epsilon: float, lam: float, rho: float, overlap: float):
    if not (0 < epsilon < lam < 2):
        raise DomainError(f"need 0 < epsilon < lambda < 2, got epsilon={epsilon} lambda={lam}")
    if not (0 < rho < 1 - lam / 2):
        raise DomainError(f"need 0 < rho < 1 - lambda/2, got rho={rho} lambda={lam}")
    if not overlap >= 1:
        raise DomainError(f"overlap constant must be >= 1, got {overlap}")


def _k_formula(epsilon: float, lam: float, rho: float, overlap: float) -> float:
    return overlap * (lam / rho + 1.0) * epsilon / (lam - epsilon) + 1.0


def rearrangement_bound(epsilon: float, lam: float, rho: float, overlap: float = 1.0) -> float:
    """K with fstarstar <= K * fstar: B*(lambda/rho + 1)*eps/(lambda - eps) + 1."""
    _check_bound_params(epsilon, lam, rho, overlap)
    return _k_formula(epsilon, lam, rho, overlap)


def rh_exponent_bound(epsilon: float, lam: float, rho: float, overlap: float = 1.0) -> float:
    """Supremum exponent 1 + (lambda - eps)/(B*(lambda/rho + 1)*eps) of the implied RH range."""
    _check_bound_params(epsilon, lam, rho, overlap)
    return 1.0 + (lam - epsilon) / (overlap * (lam / rho + 1.0) * epsilon)


def optimize_rh_exponent(
    epsilon: float, overlap: float = 1.0, delta: float = 1e-6
) -> tuple[float, float, float]:
    """Maximize the exponent bound over lambda in (epsilon, 2).

    rho is tied to lambda as (1 - lambda/2)*(1 - delta), a safety gap below
    the open constraint.  The objective is smooth and single-peaked there;
    golden-section search refines lambda to 1e-9, with a dense-grid
    fallback should the grid sanity check ever beat the search result.
    Returns (lambda_star, rho_star, p_star).
    """
    if not (0 < epsilon < 2):
        raise DomainError(f"need 0 < epsilon < 2, got {epsilon}")
    if not overlap >= 1:
        raise DomainError(f"overlap constant must be >= 1, got {overlap}")
    if not (0 < delta < 1):
        raise DomainError(f"need 0 < delta < 1, got {delta}")

    def objective(lam):
        rho = (1.0 - lam / 2.0) * (1.0 - delta)
        return 1.0 + (lam - epsilon) / (overlap * (lam / rho + 1.0) * epsilon)

    span = 2.0 - epsilon
    a = epsilon + max(1e-12 * span, 1e-15)
    b = 2.0 - max(1e-12 * span, 1e-15)
    lam_star = _golden_max(objective, a, b, tol=1e-9)

    grid = np.linspace(a, b, 1001)
    rho_grid = (1.0 - grid / 2.0) * (1.0 - delta)
    p_grid = 1.0 + (grid - epsilon) / (overlap * (grid / rho_grid + 1.0) * epsilon)
    if p_grid.max() > objective(lam_star) * (1 + 1e-10):
        fine = np.linspace(a, b, 10_000)
        rho_fine = (1.0 - fine / 2.0) * (1.0 - delta)
        p_fine = 1.0 + (fine - epsilon) / (overlap * (fine / rho_fine + 1.0) * epsilon)
        k = int(np.argmax(p_fine))
        lo = fine[max(k - 1, 0)]
        hi = fine[min(k + 1, fine.size - 1)]
        lam_star = _golden_max(objective, lo, hi, tol=1e-9)

    rho_star = (1.0 - lam_star / 2.0) * (1.0 - delta)
    return lam_star, rho_star, objective(lam_star)


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(fn, a: float, b: float, tol: float) -> float:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class TailBoundParams:
    """Admissible parameter set: eps < lambda < 2, 0 < rho < 1 - lambda/2,
    every t in (0, rho * mu(Q_0)] (the mass bound is checked against the data)."""

    epsilon: float
    lam: float
    rho: float
    t_values: tuple[float, ...]

    def __post_init__(self):
        if not (0 < self.epsilon < self.lam < 2):
            raise DomainError(
                f"need 0 < epsilon < lambda < 2, got epsilon={self.epsilon} lambda={self.lam}"
            )
        if not (0 < self.rho < 1 - self.lam / 2):
            raise DomainError(f"need 0 < rho < 1 - lambda/2, got rho={self.rho}")
        ts = tuple(float(t) for t in self.t_values)
        if not ts or any(not (t > 0) for t in ts):
            raise DomainError("t values must be positive")
        object.__setattr__(self, "t_values", ts)


@dataclass(frozen=True)
class TailCheck:
    """One t: rearrangement values, nominal and achieved constants, worst
    per-cube margins of the two covering-cube inequalities, and the verdict."""

    t: float
    fstar: float
    fstarstar: float
    k_nominal: float
    k_achieved: float
    mean_margin: float | None
    osc_margin: float | None
    rho_lo: float | None
    rho_hi: float | None
    overlap: int
    n_cubes: int
    holds: bool
    degenerate: bool

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "fstar": self.fstar,
            "fstarstar": self.fstarstar,
            "k_nominal": self.k_nominal,
            "k_achieved": self.k_achieved,
            "mean_margin": self.mean_margin,
            "osc_margin": self.osc_margin,
            "rho_lo": self.rho_lo,
            "rho_hi": self.rho_hi,
            "overlap": self.overlap,
            "n_cubes": self.n_cubes,
            "holds": self.holds,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class TailBoundReport:
    epsilon: float
    lam: float
    rho: float
    measured_epsilon: float
    mode: EnumerationMode
    checks: tuple[TailCheck, ...]
    holds: bool

    def to_json(self) -> dict:
        worst = [c for c in self.checks if c.rho_lo is not None]
        return {
            "epsilon": self.epsilon,
            "lambda": self.lam,
            "rho": self.rho,
            "measured_epsilon": self.measured_epsilon,
            "mode": self.mode.to_json(),
            "per_t": [c.to_json() for c in self.checks],
            "covering_constants": {
                "rho_lo": min((c.rho_lo for c in worst), default=None),
                "rho_hi": max((c.rho_hi for c in worst), default=None),
                "overlap": max((c.overlap for c in self.checks), default=1),
            },
            "holds": self.holds,
        }


def verify_rearrangement_bound(
    wg: WeightedGrid,
    params: TailBoundParams,
    mode: EnumerationMode | None = None,
    tol: float = DEFAULT_TOL,
    threads: int = 1,
) -> TailBoundReport:
    """Run the full average-vs-rearrangement verification at each t.

    Per t: build E_t = {value > fstar(t)} (strict, matching the
    right-continuous rearrangement so mu(E_t) <= t holds with atoms), cover
    it with density cap 1 - lambda/2, re-check the oscillation inequality on
    every covering cube, record the two per-cube margins, and assert
    fstarstar(t) <= K_achieved * fstar(t).  A zero fstar(t) (possible only
    for data vanishing mu-a.e.) is recorded as degenerate, not asserted.
    """
    mode = mode or default_mode(wg.grid)
    measured = gr_epsilon(wg, mode, threads=threads)
    if measured.epsilon > params.epsilon:
        raise PreconditionError(
            f"input not in GR({params.epsilon}): measured epsilon {measured.epsilon} "
            f"on cube {measured.witness}",
            witness=measured.witness,
        )
    total = wg.total_mass
    for t in params.t_values:
        if t > params.rho * total * (1 + 1e-12):
            raise DomainError(f"t={t} exceeds rho * mu(Q_0) = {params.rho * total}")

    sf = rearrangement(wg)
    eps, lam, rho = params.epsilon, params.lam, params.rho
    rho_cap = 1 - lam / 2
    checks = []
    for t in params.t_values:
        fstar = float(evaluate(sf, t))
        fss = float(average(sf, t))
        if fstar == 0.0:
            checks.append(
                TailCheck(
                    t=t, fstar=0.0, fstarstar=fss,
                    k_nominal=_k_formula(eps, lam, rho, 1.0),
                    k_achieved=_k_formula(eps, lam, rho, 1.0),
                    mean_margin=None, osc_margin=None,
                    rho_lo=None, rho_hi=None, overlap=1, n_cubes=0,
                    holds=bool(fss == 0.0), degenerate=True,
                )
            )
            continue
        target = cell_set(wg, wg.values > fstar)
        cover = build_covering(wg, target, rho=rho, rho_cap=rho_cap)
        mean_margins = []
        osc_margins = []
        for cube in cover.cubes:
            stats = oscillation(wg, cube)
            if stats.osc > eps * stats.mean * (1 + 1e-12):
                raise PreconditionError(
                    f"input not in GR({eps}) on covering cube {cube}: "
                    f"osc/mean = {stats.osc / stats.mean}",
                    witness=cube,
                )
            mean_margins.append(lam / (lam - eps) * fstar - stats.mean)
            osc_margins.append(eps * lam / (lam - eps) * fstar - stats.osc)
        rho_eff = cover.rho_lo if cover.rho_lo is not None and cover.rho_lo > 0 else rho
        k_achieved = _k_formula(eps, lam, rho_eff, cover.overlap)
        k_nominal = _k_formula(eps, lam, rho, cover.overlap)
        checks.append(
            TailCheck(
                t=t, fstar=fstar, fstarstar=fss,
                k_nominal=k_nominal, k_achieved=k_achieved,
                mean_margin=min(mean_margins) if mean_margins else None,
                osc_margin=min(osc_margins) if osc_margins else None,
                rho_lo=cover.rho_lo, rho_hi=cover.rho_hi,
                overlap=cover.overlap, n_cubes=len(cover.cubes),
                holds=bool(k_achieved * fstar - fss >= -tol * fstar),
                degenerate=False,
            )
        )
    return TailBoundReport(
        epsilon=eps, lam=lam, rho=rho,
        measured_epsilon=measured.epsilon, mode=mode,
        checks=tuple(checks), holds=all(c.holds for c in checks),
    )


def rh_constant(
    wg: WeightedGrid, p: float, mode: EnumerationMode | None = None, threads: int = 1
) -> tuple[float, Cube]:
    """Empirical reverse Holder constant over the enumerated family.

    c_hat = max over positive-mass, positive-mean cubes of
    (Sum w*v^p / mu(Q))^(1/p) / mean(Q); always >= 1 by the power-mean
    inequality, with equality exactly for constant data.
    """
    if not p > 1:
        raise DomainError(f"exponent must satisfy p > 1, got {p}")
    mode = mode or default_mode(wg.grid)
    scan.warm_tables(wg)
    wvp_prefix = _prefix_table(wg.weights * wg.values**p)
    inv_p = 1.0 / p

    def work(side, origins, seq_start):
        mass, wv, means = scan.batch_mass_mean(wg, side, origins)
        valid = (mass > 0) & (wv > 0)
        psum = box_sums(wvp_prefix, origins, side)
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(valid, (psum / mass) ** inv_p / means, 0.0)
        return scan.first_extremum(ratio, valid, side, origins, seq_start, maximize=True)

    best = scan.merge_candidates(
        scan.map_batches(wg.grid, mode, work, threads), maximize=True
    )
    if best is None:
        raise DomainError("empty measure: no cube has positive mass and positive mean")
    return best.value, best.cube
