"""
Spectral Radius
Single Responsibility: Growth rate of accepted-path counts, by power iteration and by count ratios
"""
import logging
import math
from fractions import Fraction
from typing import NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from gridtally.core.config import settings
from gridtally.core.exceptions import InvalidInputException, NonConvergenceException
from gridtally.services.transfer.automaton import TransferAutomaton

logger = logging.getLogger(__name__)


class SpectralDiagnostics(BaseModel):
    """Solver bookkeeping reported next to every radius."""
    iterations: int
    residual: float
    converged: bool
    shift: float
    count_ratio: Optional[float] = None


class SpectralResult(NamedTuple):
    lam: float
    h_bits: float
    diagnostics: SpectralDiagnostics


def spectral_radius(
    a: TransferAutomaton,
    tol: Optional[float] = None,
    max_iters: Optional[int] = None,
    shift: Optional[float] = None,
    cross_check: bool = True
) -> SpectralResult:
    """
    Power iteration on the live part of the transition matrix.

    Iterates v <- (A + shift·I) v with sup-norm normalisation from the
    all-ones vector; the shift breaks periodicity. Stops when the residual
    ‖Av − λv‖∞ / (λ‖v‖∞) of the current vector drops below tol.

    Args:
        cross_check: also propagate the start vector to get a float count ratio

    Returns:
        SpectralResult(lam, h_bits, diagnostics)

    Raises:
        InvalidInputException: the automaton accepts no path
        NonConvergenceException: tol not reached within max_iters
    """
    tol = tol or settings.POWER_TOL
    max_iters = max_iters or settings.POWER_MAX_ITERS
    shift = settings.POWER_SHIFT if shift is None else shift
    if tol <= 0 or max_iters < 1:
        raise InvalidInputException(f"Bad solver options: tol={tol}, max_iters={max_iters}")
    if not a.has_accepted_paths():
        raise InvalidInputException("Automaton accepts no path")

    mask = a.live.astype(np.float64)
    v = mask.copy()
    u = np.zeros(a.n_states)
    u[a.start] = 1.0
    accepted_mass = None
    count_ratio = None

    estimate = math.nan
    residual = math.inf
    iterations = 0
    converged = False
    for iterations in range(1, max_iters + 1):
        av = a.apply_float(v) * mask
        w = av + shift * v
        norm = float(w.max())
        estimate = norm - shift
        if estimate > 0:
            residual = float(np.abs(av - estimate * v).max() / (estimate * np.abs(v).max()))
        v = w / norm

        if cross_check:
            u = a.apply_float(u)
            mass = float(u[a.accept].sum())
            if accepted_mass and mass > 0:
                count_ratio = mass / accepted_mass
            top = float(u.max())
            if top > 0:
                u = u / top
                mass = mass / top
            accepted_mass = mass

        if estimate > 0 and residual < tol:
            converged = True
            break

    if not converged or estimate <= 0:
        raise NonConvergenceException(estimate, residual, iterations)

    if count_ratio is not None and abs(count_ratio - estimate) > 10 * tol * estimate:
        logger.warning(
            f"Count ratio {count_ratio:.12g} and power iteration {estimate:.12g} disagree "
            f"after {iterations} iterations"
        )
    logger.debug(f"Spectral radius {estimate:.12g} after {iterations} iterations (residual {residual:.3g})")
    diagnostics = SpectralDiagnostics(
        iterations=iterations,
        residual=residual,
        converged=converged,
        shift=shift,
        count_ratio=count_ratio
    )
    return SpectralResult(estimate, math.log2(estimate), diagnostics)


def count_ratio_estimate(a: TransferAutomaton, n: int) -> Fraction:
    """
    Exact ratio count(n+1) / count(n).

    Raises:
        InvalidInputException: n < 1 or count(n) = 0
    """
    if n < 1:
        raise InvalidInputException(f"Grid width must be positive, got {n}")
    counts = a.count_sequence(n + 1)
    if counts[n - 1] == 0:
        raise InvalidInputException(f"No accepted path of length {n}; ratio undefined")
    return Fraction(counts[n], counts[n - 1])


def adaptive_count_ratio(a: TransferAutomaton, tol: float, n_max: int = 400) -> Tuple[float, int]:
    """
    Count ratios for growing n until three consecutive ones agree within tol.

    Returns:
        (ratio, n) with ratio = count(n+1) / count(n)
    """
    counts = a.count_sequence(n_max + 1)
    ratios = []
    for n in range(1, n_max + 1):
        if counts[n - 1] == 0:
            ratios = []
            continue
        ratios.append(float(Fraction(counts[n], counts[n - 1])))
        if len(ratios) >= 3:
            r0, r1, r2 = ratios[-3:]
            if abs(r2 - r1) < tol * r2 and abs(r1 - r0) < tol * r2:
                return r2, n
    raise NonConvergenceException(ratios[-1] if ratios else math.nan, math.inf, n_max)
