"""Bracketing of the two principal eigenvalues and eigenfunction extraction.

The upper principal eigenvalue is the supremum of shifts lambda admitting a
positive bounded supersolution of G + lambda v^{alpha+1} <= 0 under the
Neumann condition; below it the maximum principle holds, at and above it the
monotone iteration with negative data becomes unbounded.  That dichotomy is
what the bisection probes: a trial lambda is classified by running
``monotone_iteration`` with g = -1 and watching whether the iterates settle
or blow past the threshold.  The mirrored eigenvalue (negative
eigenfunctions) uses the same engine with g = +1 and decreasing iterates.

Both eigenvalues lie in [-|c|_inf, |c|_inf]: the constant 1 is a
supersolution at lambda = -|c|_inf, and above |c|_inf the positive/negative
constants defeat the maximum principle, which pins the initial bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import GridFunction, RadialGrid
from .operators import CoefficientField, EllipticOperator, sample_profile, signed_power
from .solver import (
    InnerSolveError,
    IterationReport,
    PreconditionError,
    SolveOptions,
    SolveReport,
    SolveWorkspace,
    Verdict,
    _Driver,
    monotone_iteration,
    residual,
)

__all__ = [
    "EigenOptions",
    "EigenEstimate",
    "BracketError",
    "EigenResidualError",
    "lambda_up",
    "lambda_down",
    "eigenfunction_up",
    "solve_general",
]

# Irrational interval split so the probe sequence cannot land exactly on
# symmetric special values (e.g. lambda = 0 for c == 0).
_SPLIT = 2.0 - (1.0 + math.sqrt(5.0)) / 2.0


class BracketError(RuntimeError):
    """A certified endpoint behaved contrary to the theory (configuration
    error) or a probe was ambiguous within the iteration budget."""


class EigenResidualError(RuntimeError):
    """Achieved eigen-equation residual exceeds the requested tolerance."""

    def __init__(self, achieved: float, tol: float):
        self.achieved = achieved
        self.tol = tol
        super().__init__(
            f"eigenfunction residual {achieved:.3e} exceeds tolerance {tol:.3e} "
            f"(bracket too wide)"
        )


@dataclass
class EigenOptions:
    """Options for the eigenvalue bisection.

    ``bracket_width`` defaults to 1e-3 (1 + |c|_inf).  ``g_scale`` is the
    magnitude of the constant data used in the probes (the bracket is
    invariant under it, by homogeneity).  ``eig_residual_tol`` bounds the
    reported eigen-equation residual at the bracket midpoint and defaults
    to 20x the bracket width.
    """

    bracket_width: Optional[float] = None
    g_scale: float = 1.0
    eig_residual_tol: Optional[float] = None
    tol: float = 1e-9
    max_outer: int = 400_000
    inner_max_iter: int = 20000
    U_max: float = 1e6

    def resolved_width(self, c_inf: float) -> float:
        if self.bracket_width is not None:
            if not self.bracket_width > 0:
                raise ValueError("bracket_width must be > 0")
            return self.bracket_width
        return 1e-3 * (1.0 + c_inf)

    def resolved_residual_tol(self, width: float) -> float:
        if self.eig_residual_tol is not None:
            return self.eig_residual_tol
        return 20.0 * width

    def iteration_options(self, workspace: SolveWorkspace) -> SolveOptions:
        return SolveOptions(
            tol=self.tol,
            max_iter=self.max_outer,
            U_max=self.U_max,
            inner_max_iter=self.inner_max_iter,
            workspace=workspace,
        )


@dataclass
class EigenEstimate:
    """Bisection bracket plus the normalized eigenfunction at its midpoint.

    ``lambda_lo`` is certified convergent, ``lambda_hi`` certified blow-up,
    both by direct monotone-iteration runs that can be replayed.  The
    eigenfunction has sup-norm exactly 1 and a strict sign.
    """

    lambda_lo: float
    lambda_hi: float
    eigenfunction: GridFunction
    residual_sup: float
    sign: str
    probes: list

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lambda_lo + self.lambda_hi)

    @property
    def width(self) -> float:
        return self.lambda_hi - self.lambda_lo

    def summary(self):
        return {
            "lambda_lo": self.lambda_lo,
            "lambda_hi": self.lambda_hi,
            "lambda_mid": self.midpoint,
            "residual_sup": self.residual_sup,
            "sign": self.sign,
        }


def _classify(op, coeff, lam, g_profile, grid, opts, ws, direction) -> IterationReport:
    rep = monotone_iteration(
        op,
        coeff,
        lam,
        g_profile,
        grid,
        opts.iteration_options(ws),
        direction=direction,
    )
    if rep.verdict is Verdict.MAX_ITER:
        raise BracketError(
            f"monotone iteration at lambda={lam:.9g} is ambiguous after "
            f"{opts.max_outer} steps (last sup-norm {rep.sup_norms[-1]:.3e}); "
            f"raise max_outer or widen the bracket"
        )
    return rep


def _normalized(final: GridFunction) -> GridFunction:
    sup = final.sup_norm()
    if sup == 0.0:
        raise BracketError("degenerate eigenfunction candidate (identically zero)")
    return GridFunction(final.grid, final.values / sup)


def _bisect(op, coeff, grid, opts, direction: str):
    sign = "positive" if direction == "up" else "negative"
    c_vals = sample_profile(coeff.c, grid.nodes)
    c_inf = float(np.max(np.abs(c_vals)))
    width = opts.resolved_width(c_inf)
    g_const = -opts.g_scale if direction == "up" else opts.g_scale
    g_vals = np.full(grid.n, float(g_const))
    ws = SolveWorkspace()
    probes = []

    lo, hi = -(c_inf + 1.0), c_inf + 1.0
    rep_lo = _classify(op, coeff, lo, g_vals, grid, opts, ws, direction)
    probes.append((lo, rep_lo.verdict.value))
    if rep_lo.verdict is not Verdict.CONVERGED:
        raise BracketError(
            f"iteration at the initial lower end lambda={lo:.9g} did not "
            f"converge; -|c|_inf always admits the constant supersolution, so "
            f"this is a configuration error"
        )
    rep_hi = _classify(op, coeff, hi, g_vals, grid, opts, ws, direction)
    probes.append((hi, rep_hi.verdict.value))
    if rep_hi.verdict is not Verdict.UNBOUNDED:
        raise BracketError(
            f"iteration at lambda={hi:.9g} > |c|_inf converged; the eigenvalue "
            f"is bounded by |c|_inf, so this is a configuration error"
        )

    while hi - lo > width:
        mid = lo + _SPLIT * (hi - lo)
        rep = _classify(op, coeff, mid, g_vals, grid, opts, ws, direction)
        probes.append((mid, rep.verdict.value))
        if rep.verdict is Verdict.CONVERGED:
            lo, rep_lo = mid, rep
        else:
            hi = mid

    phi = _normalized(rep_lo.final)
    if direction == "up":
        if phi.min() <= 0:
            raise BracketError("eigenfunction lost strict positivity")
    else:
        if phi.max() >= 0:
            raise BracketError("eigenfunction lost strict negativity")

    lam_mid = 0.5 * (lo + hi)
    res = residual(op, coeff, lam_mid, 0.0, phi)
    res_sup = res.sup_norm()
    res_tol = opts.resolved_residual_tol(width)
    if res_sup > res_tol:
        raise EigenResidualError(res_sup, res_tol)

    return EigenEstimate(
        lambda_lo=lo,
        lambda_hi=hi,
        eigenfunction=phi,
        residual_sup=res_sup,
        sign=sign,
        probes=probes,
    )


def lambda_up(
    op: EllipticOperator,
    coeff: CoefficientField,
    grid: RadialGrid,
    opts: Optional[EigenOptions] = None,
) -> EigenEstimate:
    """Bracket the upper principal eigenvalue (positive eigenfunction).

    Bisection on [-|c|_inf - 1, |c|_inf + 1]; a trial shift is classified by
    whether the monotone iteration with g = -1 stays bounded.  The returned
    eigenfunction is the normalized final iterate at the certified lower
    end, and ``residual_sup`` is its eigen-equation residual at the bracket
    midpoint.
    """
    return _bisect(op, coeff, grid, opts or EigenOptions(), "up")


def lambda_down(
    op: EllipticOperator,
    coeff: CoefficientField,
    grid: RadialGrid,
    opts: Optional[EigenOptions] = None,
) -> EigenEstimate:
    """Bracket the lower principal eigenvalue (negative eigenfunction).

    Mirror of ``lambda_up``: probes run the monotone iteration with g = +1,
    producing negative decreasing iterates.  Equivalent to ``lambda_up`` for
    the reflected operator -F(-p, -X), which swaps the two Pucci kinds.
    """
    return _bisect(op, coeff, grid, opts or EigenOptions(), "down")


def eigenfunction_up(
    op: EllipticOperator,
    coeff: CoefficientField,
    lambda_bar_est: float,
    grid: RadialGrid,
    opts: Optional[EigenOptions] = None,
) -> GridFunction:
    """Normalized positive eigenfunction from a certified convergent shift.

    Runs the monotone iteration with g = -1 at ``lambda_bar_est`` (the
    certified lower bracket end), normalizes the final iterate to sup-norm
    1, and checks its residual at the bracket midpoint against
    ``opts.eig_residual_tol``; an excessive residual is reported via
    ``EigenResidualError`` rather than silently accepted.
    """
    opts = opts or EigenOptions()
    c_vals = sample_profile(coeff.c, grid.nodes)
    c_inf = float(np.max(np.abs(c_vals)))
    width = opts.resolved_width(c_inf)
    g_vals = np.full(grid.n, -opts.g_scale)
    ws = SolveWorkspace()
    rep = _classify(op, coeff, lambda_bar_est, g_vals, grid, opts, ws, "up")
    if rep.verdict is not Verdict.CONVERGED:
        raise BracketError(
            f"lambda={lambda_bar_est:.9g} is not a certified convergent shift"
        )
    phi = _normalized(rep.final)
    if phi.min() <= 0:
        raise BracketError("eigenfunction lost strict positivity")
    lam_mid = lambda_bar_est + 0.5 * width
    res_sup = residual(op, coeff, lam_mid, 0.0, phi).sup_norm()
    res_tol = opts.resolved_residual_tol(width)
    if res_sup > res_tol:
        raise EigenResidualError(res_sup, res_tol)
    return phi


def solve_general(
    op: EllipticOperator,
    coeff: CoefficientField,
    lam: float,
    g_profile,
    grid: RadialGrid,
    opts: Optional[SolveOptions] = None,
) -> SolveReport:
    """Solve the Neumann problem for sign-changing data below both thresholds.

    Requires lambda below the certified lower ends of both eigenvalue
    brackets (the caller's contract).  Builds the negative solution u0 for
    data |g|_inf and the positive solution v0 for data -|g|_inf, then runs
    the shifted iteration started at u0, keeping every iterate inside the
    sandwich [u0 - slack, v0 + slack]; an escape is reported as a discrete
    sandwich violation (``sandwich_ok=False``), not silently accepted.
    """
    opts = opts if opts is not None else SolveOptions()
    r = grid.nodes
    b, c, _ = coeff.sample(r)
    g = sample_profile(g_profile if g_profile is not None else coeff.g, r)
    g_sup = float(np.max(np.abs(g)))

    mono_opts = SolveOptions(
        tol=opts.tol,
        max_iter=opts.max_iter,
        U_max=opts.U_max,
        inner_max_iter=opts.inner_max_iter,
    )
    rep_v0 = monotone_iteration(
        op, coeff, lam, np.full(grid.n, -g_sup), grid, mono_opts, direction="up"
    )
    if rep_v0.verdict is not Verdict.CONVERGED:
        raise PreconditionError(
            f"solve_general: positive envelope did not converge at "
            f"lambda={lam:.9g} (verdict {rep_v0.verdict.value}); lambda must "
            f"lie below the upper-eigenvalue bracket"
        )
    rep_u0 = monotone_iteration(
        op, coeff, lam, np.full(grid.n, g_sup), grid, mono_opts, direction="down"
    )
    if rep_u0.verdict is not Verdict.CONVERGED:
        raise PreconditionError(
            f"solve_general: negative envelope did not converge at "
            f"lambda={lam:.9g} (verdict {rep_u0.verdict.value}); lambda must "
            f"lie below the lower-eigenvalue bracket"
        )
    v0 = rep_v0.final.values
    u0 = rep_u0.final.values

    c_inf = float(np.max(np.abs(c)))
    c_shift = c - c_inf - 1.0
    factor = lam + c_inf + 1.0
    shift_driver = _Driver(op, grid, b, c_shift)
    full_driver = _Driver(op, grid, b, c + lam)
    tol_base = opts.tol / 10.0
    slack = max(100.0 * opts.tol, 1e-12 * (1.0 + g_sup))
    _, Aeff = op.ellipticity_bounds()
    eps_floor = 10.0 * np.finfo(float).eps * (4.0 * Aeff / grid.h**2 + c_inf + 1.0)

    u = u0.copy()
    sandwich_ok = True
    rs = math.inf
    iterations = 0
    inner = SolveOptions(max_iter=opts.inner_max_iter, U_max=opts.U_max * 10.0 + 10.0)
    for _ in range(1, opts.max_iter + 1):
        g_inner = g - factor * signed_power(u, op.alpha)
        sup_u = float(np.max(np.abs(u)))
        inner.tol = max(
            tol_base * max(1.0, float(np.max(np.abs(g_inner)))),
            eps_floor * (1.0 + sup_u),
        )
        u_new, _, _, inner_rs, _, _, ok, _ = shift_driver.solve(g_inner, u, inner)
        if not ok:
            raise InnerSolveError(
                iterations + 1,
                f"residual_sup={inner_rs:.3e} above tolerance {inner.tol:.3e}",
            )
        change = float(np.max(np.abs(u_new - u)))
        u = u_new
        iterations += 1
        if np.min(u - u0) < -slack or np.max(u - v0) > slack:
            sandwich_ok = False
            break
        res, _ = full_driver.residual(g, u)
        rs = float(np.max(np.abs(res)))
        if rs <= opts.tol:
            break
        if change < opts.tol / 100.0:
            break

    converged = rs <= opts.tol and sandwich_ok
    return SolveReport(
        solution=GridFunction(grid, u),
        residual_sup=rs,
        iterations=iterations,
        dt=math.inf,
        converged=converged,
        bound_violation=False,
        sandwich_ok=sandwich_ok,
    )
