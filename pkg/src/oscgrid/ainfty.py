"""Muckenhoupt A-infinity level-set certificates and both implication directions.

A pair (alpha, beta) in (0,1)^2 certifies the A-infinity condition when

    mu{ x in Q : f(x) > beta * mean(Q) } > alpha * mu(Q)   for every cube Q.

The inequality is kept strict exactly as defined; ties count as failures,
so certificates stay valid under perturbation.  Cubes with mean 0 are
skipped: there f = 0 mu-a.e., no alpha > 0 can certify them, yet they
satisfy the oscillation condition vacuously; skipping keeps the two class
memberships consistent on finite data.  Every report records how many
cubes were skipped.

The two directions of the equivalence with the Gurov-Reshetnyak condition
come with explicit constants:

* from gr_epsilon eps, for any eps < lambda < 2, the pair
  (alpha, beta) = (1 - lambda/2, 1 - eps/lambda) works, with the level-set
  bound holding in the non-strict form >= (1 - lambda/2) * mu(Q);
* from a strict (alpha, beta) certificate, osc(Q) <= 2(1 - alpha*beta) * mean(Q)
  on every cube, i.e. the data lies in GR(2(1 - alpha*beta)).

Composing the two yields roundtrip_epsilon, which strictly dominates the
starting eps: the equivalence costs a constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .grids import Cube, EnumerationMode, WeightedGrid, default_mode
from .oscillation import gr_epsilon
from . import scan

__all__ = [
    "LevelParams",
    "MarginReport",
    "level_fraction",
    "alpha_profile",
    "gr_to_ainfty_params",
    "ainfty_to_gr_bound",
    "roundtrip_epsilon",
    "verify_gr_to_ainfty",
    "verify_ainfty_to_gr",
]

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class LevelParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (0 < self.alpha < 1 and 0 < self.beta < 1):
            raise DomainError(f"alpha and beta must lie in (0,1), got ({self.alpha}, {self.beta})")

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class MarginReport:
    """Worst-case margin of an inequality over a scanned family.

    worst_margin is the raw minimum of LHS - RHS; holds is true when every
    per-cube margin clears -tol times its natural scale (the cube mass for
    measure inequalities, the cube mean for oscillation inequalities).
    """

    worst_margin: float
    witness: Cube
    mode: EnumerationMode
    holds: bool
    cubes_scanned: int
    skipped_zero_mean: int
    tolerance: float

    def to_json(self) -> dict:
        return {
            "worst_margin": self.worst_margin,
            "witness": self.witness.to_json(),
            "mode": self.mode.to_json(),
            "holds": self.holds,
            "cubes_scanned": self.cubes_scanned,
            "skipped_zero_mean": self.skipped_zero_mean,
            "tolerance": self.tolerance,
        }


def _cube_at(origins: np.ndarray, i: int, side: int) -> Cube:
    return Cube(tuple(int(x) for x in origins[i]), side)


def level_fraction(wg: WeightedGrid, cube: Cube, beta: float) -> float:
    """mu{cells in Q with value > beta*mean(Q)} / mu(Q), strict inequality."""
    if not (0 < beta < 1):
        raise DomainError(f"beta must lie in (0,1), got {beta}")
    sl = cube.slices()
    w = wg.weights[sl].ravel()
    v = wg.values[sl].ravel()
    mass = math.fsum(w)
    if not mass > 0:
        raise DomainError("zero-mass cube")
    m = math.fsum(w * v) / mass
    return math.fsum(w[v > beta * m]) / mass


def _check_open_interval(epsilon: float, lam: float):
    if not (0 < epsilon < lam < 2):
        raise DomainError(f"need 0 < epsilon < lambda < 2, got epsilon={epsilon} lambda={lam}")


def gr_to_ainfty_params(epsilon: float, lam: float) -> LevelParams:
    """Certificate guaranteed by GR(epsilon): alpha = 1 - lambda/2, beta = 1 - epsilon/lambda.

    The guarantee is the non-strict bound >= alpha * mu(Q); any alpha
    strictly below 1 - lambda/2 is then a strict certificate.
    """
    _check_open_interval(epsilon, lam)
    return LevelParams(alpha=1.0 - lam / 2.0, beta=1.0 - epsilon / lam)


def ainfty_to_gr_bound(params: LevelParams) -> float:
    """GR parameter guaranteed by a strict (alpha, beta) certificate."""
    return 2.0 * (1.0 - params.alpha * params.beta)


def roundtrip_epsilon(epsilon: float, lam: float) -> float:
    """GR parameter after composing both directions; equals lambda + 2*eps/lambda - eps
    and strictly exceeds eps everywhere in the admissible range."""
    return ainfty_to_gr_bound(gr_to_ainfty_params(epsilon, lam))


def alpha_profile(
    wg: WeightedGrid, beta: float, mode: EnumerationMode | None = None, threads: int = 1
) -> tuple[float, Cube]:
    """Largest certifiable level fraction at this beta.

    Returns (alpha_star, witness) where alpha_star is the minimum of
    level_fraction over positive-mass, positive-mean cubes; (alpha, beta)
    is a valid strict certificate for every alpha < alpha_star.
    """
    if not (0 < beta < 1):
        raise DomainError(f"beta must lie in (0,1), got {beta}")
    mode = mode or default_mode(wg.grid)
    scan.warm_tables(wg)

    def work(side, origins, seq_start):
        mass, wv, means = scan.batch_mass_mean(wg, side, origins)
        valid = (mass > 0) & (wv > 0)
        _, lvl = scan.batch_osc_level(wg, side, origins, thresholds=beta * means)
        frac = np.divide(lvl, mass, out=np.ones_like(lvl), where=mass > 0)
        return scan.first_extremum(frac, valid, side, origins, seq_start, maximize=False)

    best = scan.merge_candidates(
        scan.map_batches(wg.grid, mode, work, threads), maximize=False
    )
    if best is None:
        raise DomainError("empty measure: no cube has positive mass and positive mean")
    return best.value, best.cube


def verify_gr_to_ainfty(
    wg: WeightedGrid,
    epsilon: float,
    lam: float,
    mode: EnumerationMode | None = None,
    tol: float = DEFAULT_TOL,
    threads: int = 1,
) -> MarginReport:
    """Check mu{f > (1 - eps/lambda) mean} >= (1 - lambda/2) mu(Q) on every cube.

    Re-measures gr_epsilon first and refuses data outside GR(epsilon).  The
    margin per cube is level-set mass minus (1 - lambda/2) mu(Q); given the
    precondition it is nonnegative up to rounding, and holds applies the
    -tol*mu(Q) noise floor per cube.
    """
    _check_open_interval(epsilon, lam)
    mode = mode or default_mode(wg.grid)
    measured = gr_epsilon(wg, mode, threads=threads)
    if measured.epsilon > epsilon:
        raise PreconditionError(
            f"input not in GR({epsilon}): measured epsilon {measured.epsilon} "
            f"on cube {measured.witness}",
            witness=measured.witness,
        )
    beta = 1.0 - epsilon / lam
    alpha = 1.0 - lam / 2.0
    scan.warm_tables(wg)

    def work(side, origins, seq_start):
        mass, wv, means = scan.batch_mass_mean(wg, side, origins)
        valid = (mass > 0) & (wv > 0)
        _, lvl = scan.batch_osc_level(wg, side, origins, thresholds=beta * means)
        margin = lvl - alpha * mass
        ok = bool(np.all(margin[valid] >= -tol * mass[valid]))
        cand = scan.first_extremum(margin, valid, side, origins, seq_start, maximize=False)
        skipped = int(np.count_nonzero(mass > 0) - np.count_nonzero(valid))
        return cand, ok, len(origins), skipped

    results = scan.map_batches(wg.grid, mode, work, threads)
    best = scan.merge_candidates((r[0] for r in results), maximize=False)
    if best is None:
        raise DomainError("empty measure: no cube has positive mass and positive mean")
    return MarginReport(
        worst_margin=best.value,
        witness=best.cube,
        mode=mode,
        holds=all(r[1] for r in results),
        cubes_scanned=sum(r[2] for r in results),
        skipped_zero_mean=sum(r[3] for r in results),
        tolerance=tol,
    )


def verify_ainfty_to_gr(
    wg: WeightedGrid,
    params: LevelParams,
    mode: EnumerationMode | None = None,
    tol: float = DEFAULT_TOL,
    threads: int = 1,
) -> MarginReport:
    """Check osc(Q) <= 2(1 - alpha*beta) mean(Q) on every cube.

    First re-checks the strict level-set condition with (alpha, beta) on
    every positive-mean cube and refuses the input otherwise, naming the
    first violating cube in canonical order.
    """
    mode = mode or default_mode(wg.grid)
    bound = ainfty_to_gr_bound(params)
    scan.warm_tables(wg)

    def work(side, origins, seq_start):
        mass, wv, means = scan.batch_mass_mean(wg, side, origins)
        valid = (mass > 0) & (wv > 0)
        osc_num, lvl = scan.batch_osc_level(
            wg, side, origins, means=means, thresholds=params.beta * means
        )
        frac = np.divide(lvl, mass, out=np.ones_like(lvl), where=mass > 0)
        violation = None
        breached = valid & (frac <= params.alpha)
        if breached.any():
            i = int(np.argmax(breached))
            violation = scan.Candidate(
                float(frac[i]), seq_start + i, _cube_at(origins, i, side)
            )
        osc = np.divide(osc_num, mass, out=np.zeros_like(osc_num), where=mass > 0)
        margin = bound * means - osc
        ok = bool(np.all(margin[valid] >= -tol * means[valid]))
        cand = scan.first_extremum(margin, valid, side, origins, seq_start, maximize=False)
        skipped = int(np.count_nonzero(mass > 0) - np.count_nonzero(valid))
        return cand, ok, len(origins), skipped, violation

    results = scan.map_batches(wg.grid, mode, work, threads)
    breach = next((r[4] for r in results if r[4] is not None), None)
    if breach is not None:
        raise PreconditionError(
            f"input not in A_inf(alpha={params.alpha}, beta={params.beta}): "
            f"level condition fails on cube {breach.cube}",
            witness=breach.cube,
        )
    best = scan.merge_candidates((r[0] for r in results), maximize=False)
    if best is None:
        raise DomainError("empty measure: no cube has positive mass and positive mean")
    return MarginReport(
        worst_margin=best.value,
        witness=best.cube,
        mode=mode,
        holds=all(r[1] for r in results),
        cubes_scanned=sum(r[2] for r in results),
        skipped_zero_mean=sum(r[3] for r in results),
        tolerance=tol,
    )
