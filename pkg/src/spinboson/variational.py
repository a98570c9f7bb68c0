"""Self-consistent determination of the variational displacement.

The renormalization constant B solves B = rhs(B); roots of
Psi(B) = B - rhs(B) are located by a sign-change scan plus bisection and
ranked by the Bogoliubov-Feynman free energy bound. When the scan finds no
crossing (strong coupling pushes the root below the scan floor) B = 0 is
used as the incoherent candidate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .bath import frame_shift, renormalization_rhs, renormalization_rhs_many
from .model import BathParams, Frame, FrameSolution, ModelParams

PSI_TOL = 1e-10
TIE_TOL = 1e-12
SCAN_FLOOR = 1e-6
LOG_FLOOR = 1e-12
LOG_POINTS = 500


@dataclass(frozen=True)
class PsiCurve:
    B_grid: np.ndarray
    psi_values: np.ndarray


@dataclass(frozen=True)
class VariationalSolution:
    roots: tuple[float, ...]            # ascending candidate B values
    free_energies: tuple[float, ...]    # A_B per candidate
    selected: int
    frame_solution: FrameSolution
    warning: str | None = None

    @property
    def B(self) -> float:
        return self.frame_solution.B


def psi(B: float, model: ModelParams, bath: BathParams) -> float:
    """Psi(B) = B - rhs(B); roots are self-consistent displacements."""
    return B - renormalization_rhs(B, model, bath)


def psi_curve(model: ModelParams, bath: BathParams, b_grid) -> PsiCurve:
    grid = np.asarray(b_grid, dtype=float)
    return PsiCurve(B_grid=grid, psi_values=grid - renormalization_rhs_many(grid, model, bath))


def _scan_grid(scan_points: int) -> np.ndarray:
    log_part = np.logspace(math.log10(LOG_FLOOR), math.log10(SCAN_FLOOR), LOG_POINTS, endpoint=False)
    uniform = np.linspace(SCAN_FLOOR, 1.0, scan_points)
    return np.concatenate([log_part, uniform])


def _bisect_root(model: ModelParams, bath: BathParams, lo: float, hi: float,
                 f_lo: float, f_hi: float) -> float:
    # plain bisection; Psi is smooth so |Psi| at the midpoint limit is far
    # below PSI_TOL unless the bracket floor is hit
    best, best_val = (lo, f_lo) if abs(f_lo) < abs(f_hi) else (hi, f_hi)
    while hi - lo > 1e-16 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        f_mid = psi(mid, model, bath)
        if abs(f_mid) < abs(best_val):
            best, best_val = mid, f_mid
        if abs(f_mid) < PSI_TOL:
            return mid
        if (f_lo < 0.0) == (f_mid < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return best


def _find_roots_impl(model: ModelParams, bath: BathParams, scan_points: int):
    grid = _scan_grid(scan_points)
    vals = grid - renormalization_rhs_many(grid, model, bath)
    roots: list[float] = []
    for i in range(grid.size - 1):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        elif (vals[i] < 0.0) != (vals[i + 1] < 0.0):
            roots.append(
                _bisect_root(model, bath, float(grid[i]), float(grid[i + 1]),
                             float(vals[i]), float(vals[i + 1]))
            )
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    crossed = bool(roots)
    minimizer = float(grid[np.argmin(np.abs(vals))])
    return sorted(roots), crossed, minimizer


def find_roots(model: ModelParams, bath: BathParams, scan_points: int = 2000) -> list[float]:
    """All self-consistent B values found in [LOG_FLOOR, 1], ascending.

    If the scan sees no sign change the |Psi| minimizer on the grid is
    returned with a RuntimeWarning."""
    if scan_points < 100:
        raise ValueError("scan_points must be >= 100")
    if bath.gamma == 0.0:
        return [1.0]
    roots, crossed, minimizer = _find_roots_impl(model, bath, scan_points)
    if not crossed:
        warnings.warn(
            f"no sign change of Psi in [{LOG_FLOOR}, 1]; returning |Psi| minimizer {minimizer:.3e}",
            RuntimeWarning,
            stacklevel=2,
        )
        return [minimizer]
    return roots


def _log_2cosh(x: float) -> float:
    # ln(2 cosh x) without overflow, x >= 0
    return x + math.log1p(math.exp(-2.0 * x))


def select_candidate(roots: list[float], energies: list[float]) -> int:
    """Index of the winning candidate: lowest A_B, ties within TIE_TOL going
    to the larger B. Roots must be ascending."""
    best = min(energies)
    return max(i for i, a in enumerate(energies) if a - best < TIE_TOL)


def free_energy_bound(B: float, model: ModelParams, bath: BathParams) -> float:
    """Bogoliubov-Feynman upper bound A_B for the displacement profile of B:
    -(1/beta) ln(2 cosh(beta eta/2)) plus the scalar shift."""
    if not 0.0 <= B <= 1.0:
        raise ValueError("B must lie in [0, 1]")
    sol = FrameSolution.build(Frame.VARIATIONAL, B, 0.0, model)
    shift = frame_shift(sol, model, bath)
    return -_log_2cosh(0.5 * model.beta * sol.eta) / model.beta + shift


def solve_variational(model: ModelParams, bath: BathParams, scan_points: int = 2000) -> VariationalSolution:
    """Scan, rank by A_B and return the selected frame.

    Near-degenerate candidates (A_B within TIE_TOL) resolve to the larger B."""
    if bath.gamma == 0.0:
        frame = FrameSolution.build(Frame.VARIATIONAL, 1.0, 0.0, model)
        return VariationalSolution(
            roots=(1.0,), free_energies=(free_energy_bound(1.0, model, bath),),
            selected=0, frame_solution=frame,
        )
    roots, crossed, minimizer = _find_roots_impl(model, bath, scan_points)
    warning = None
    if not crossed:
        # the true root sits below the scan floor; the fully displaced
        # incoherent solution is the candidate
        roots = [0.0]
        warning = f"no Psi sign change in scan; using B=0 (grid |Psi| minimizer {minimizer:.3e})"
    energies = [free_energy_bound(b, model, bath) for b in roots]
    selected = select_candidate(roots, energies)
    b_sel = roots[selected]
    sol0 = FrameSolution.build(Frame.VARIATIONAL, b_sel, 0.0, model)
    frame = FrameSolution.build(Frame.VARIATIONAL, b_sel, frame_shift(sol0, model, bath), model)
    return VariationalSolution(
        roots=tuple(roots), free_energies=tuple(energies),
        selected=selected, frame_solution=frame, warning=warning,
    )


def locate_discontinuity(model: ModelParams, bath: BathParams, gamma_range,
                         width: float = 1e-3, min_jump: float = 0.1) -> float | None:
    """Bisect the selected-B curve over a gamma interval for a jump.

    Returns the jump location to `width` resolution, or None when the
    endpoint difference of the final bracket stays below `min_jump`."""
    gammas = [float(g) for g in np.atleast_1d(np.asarray(gamma_range, dtype=float))]
    if not gammas:
        raise ValueError("gamma_range must be nonempty")
    lo, hi = min(gammas), max(gammas)
    if hi <= lo:
        raise ValueError("gamma_range must span an interval")
    cache: dict[float, float] = {}

    def selected_b(g: float) -> float:
        if g not in cache:
            cache[g] = solve_variational(model, BathParams(gamma=g, omega_c=bath.omega_c)).B
        return cache[g]

    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        jump_left = abs(selected_b(mid) - selected_b(lo))
        jump_right = abs(selected_b(hi) - selected_b(mid))
        if jump_left >= jump_right:
            hi = mid
        else:
            lo = mid
    if abs(selected_b(hi) - selected_b(lo)) > min_jump:
        return 0.5 * (lo + hi)
    return None
