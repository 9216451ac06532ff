"""Monotone solution bounds from bordered block matrices.

The lower ladder grows a block matrix one n x n border at a time,

    H_1 = I,    H_{k+1} = [[H_k, R*], [R, I]],
    R = [0 ... 0, A]        for odd k,
    R = [0 ... 0, conj(A)]  for even k,

and reads off a lower bound S_k on every positive definite solution as the
Schur-complement quadratic form of the corner vector [0; ...; 0; A^T]
against H_k (even k) or conj(H_k) (odd k).  The upper ladder G_k swaps the
roles of A and A* and yields upper bounds R_k = I - (quadratic form); it
needs a nonsingular coefficient.  S_k is nondecreasing and R_k nonincreasing
in k, and every solution sits strictly between them.

Each rung is factored once by Cholesky (which doubles as the positive
definiteness check the theory guarantees on solvable instances) and the
quadratic form is computed by a block solve, never by forming an inverse.
A rung whose pivots go negative certifies that no positive definite solution
exists; a rung that is positive but falls below the pivot floor stops the
ladder early with a truncation marker, since deep rungs are known to erode
numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import (
    ConricError,
    DEFAULT_TOLERANCES,
    Tolerances,
    adjoint,
    cholesky_solve,
    cmatrix,
    conj,
    hermitian_eigen,
    pd_solve,
    transpose,
    _cholesky_lower,
    _require_square,
)
from .solver import (
    ProblemInstance,
    _require_nonsingular,
    solve_maximal,
    solve_minimal,
)

# Default ladder depth; deeper rungs gain little and erode numerically.
DEFAULT_DEPTH = 6


class LadderBreakdown(ConricError):
    """A ladder block lost positive definiteness.

    On exact arithmetic this certifies that the equation has no positive
    definite solution.
    """

    def __init__(self, message: str, rung: int):
        super().__init__(message)
        self.rung = rung


@dataclass
class BoundsLadder:
    """Bound matrices S_1..S_K (lower) or R_1..R_K (upper) with diagnostics.

    monotone_gaps[k] is the smallest eigenvalue of the difference between
    consecutive bounds oriented so that nonnegative means monotone;
    ladder_blocks keeps the bordered block matrices for audit.  truncated_at
    is set when a rung fell below the pivot floor while still positive.
    """

    side: str
    depth: int
    matrices: list[np.ndarray]
    monotone_gaps: list[float]
    ladder_blocks: list[np.ndarray]
    truncated_at: int | None = None


def _min_eig(h: np.ndarray) -> float:
    w, _ = hermitian_eigen((h + h.conj().T) / 2.0)
    return float(w[0])


def build_ladder(
    a,
    side: str,
    depth: int = DEFAULT_DEPTH,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BoundsLadder:
    """Construct the bound ladder of the requested side down to ``depth``."""
    if side not in ("lower", "upper"):
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    a = _require_square(cmatrix(a), "build_ladder")
    n = a.shape[0]
    eye = np.eye(n, dtype=np.complex128)

    if side == "lower":
        odd_border, even_border = a, conj(a)
        corner = transpose(a)
        # odd rungs read the conjugated block matrix
        conjugate_on_odd = True
    else:
        _require_nonsingular(a, tol, "upper bound ladder")
        odd_border, even_border = adjoint(a), transpose(a)
        corner = a.copy()
        conjugate_on_odd = False

    block = eye.copy()
    matrices: list[np.ndarray] = []
    blocks: list[np.ndarray] = []
    truncated_at: int | None = None

    for k in range(1, depth + 1):
        blocks.append(block.copy())
        use_conj = (k % 2 == 1) == conjugate_on_odd
        target = np.conj(block) if use_conj else block
        target = (target + target.conj().T) / 2.0
        lower_factor, margin = _cholesky_lower(target, tol)
        if lower_factor is None:
            if margin <= 0.0:
                raise LadderBreakdown(
                    f"ladder block {k} is not positive definite "
                    f"(pivot margin {margin:.3e}); no positive definite solution exists",
                    rung=k,
                )
            truncated_at = k
            blocks.pop()
            break
        u = np.zeros((k * n, n), dtype=np.complex128)
        u[(k - 1) * n :, :] = corner
        z = cholesky_solve(lower_factor, u)
        form = adjoint(u) @ z
        form = (form + form.conj().T) / 2.0
        rung = form if side == "lower" else eye - form
        matrices.append((rung + rung.conj().T) / 2.0)

        if k < depth:
            border = odd_border if k % 2 == 1 else even_border
            grown = np.zeros(((k + 1) * n, (k + 1) * n), dtype=np.complex128)
            grown[: k * n, : k * n] = block
            grown[k * n :, k * n :] = eye
            grown[k * n :, (k - 1) * n : k * n] = border
            grown[(k - 1) * n : k * n, k * n :] = adjoint(border)
            block = grown

    gaps = []
    for k in range(len(matrices) - 1):
        diff = matrices[k + 1] - matrices[k]
        if side == "upper":
            diff = -diff
        gaps.append(_min_eig(diff))
    return BoundsLadder(side, len(matrices), matrices, gaps, blocks, truncated_at)


def closed_form_bounds(a, which: str, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Explicit first three rungs of either ladder.

        S1 = conj(A A*)
        S2 = conj(A) (I - A A*)^-1 A^T
        S3 = conj(A) (I - A (I - conj(A A*))^-1 A*)^-1 A^T
        R1 = I - A* A
        R2 = I - A* (I - conj(A* A))^-1 A
        R3 = I - A* (I - A^T (I - A* A)^-1 conj(A))^-1 A

    Inner inverses are evaluated through Cholesky solves, so an inner matrix
    that is not positive definite raises rather than returning garbage.
    """
    a = _require_square(cmatrix(a), "closed_form_bounds")
    n = a.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    ah = adjoint(a)
    at = transpose(a)
    ac = conj(a)

    def sym(m: np.ndarray) -> np.ndarray:
        return (m + m.conj().T) / 2.0

    if which == "S1":
        return sym(np.conj(a @ ah))
    if which == "S2":
        return sym(ac @ pd_solve(sym(eye - a @ ah), at, tol))
    if which == "S3":
        inner = sym(eye - a @ pd_solve(sym(eye - np.conj(a @ ah)), ah, tol))
        return sym(ac @ pd_solve(inner, at, tol))
    if which == "R1":
        return sym(eye - ah @ a)
    if which == "R2":
        return sym(eye - ah @ pd_solve(sym(eye - np.conj(ah @ a)), a, tol))
    if which == "R3":
        inner = sym(eye - at @ pd_solve(sym(eye - ah @ a), ac, tol))
        return sym(eye - ah @ pd_solve(inner, a, tol))
    raise ValueError(f"which must be one of S1..S3, R1..R3, got {which!r}")


@dataclass
class SandwichReport:
    """Solutions pinched between the deepest rungs of both ladders."""

    lower: BoundsLadder
    upper: BoundsLadder
    x_minus: np.ndarray
    x_plus: np.ndarray
    lower_gap: float  # min eig of x_minus - S_K
    upper_gap: float  # min eig of R_K - x_plus
    lower_trend: list[float]  # last two lower monotone gaps, how much S_k still moves
    consistent: bool


def sandwich_report(a, depth: int = DEFAULT_DEPTH, tol: Tolerances = DEFAULT_TOLERANCES) -> SandwichReport:
    """Bound both extremal solutions by ladders of the given depth.

    Needs a solvable instance with nonsingular coefficient so that the
    minimal solution and the upper ladder both exist.  The lower trend is
    reported without any claim about where S_k converges.
    """
    a = _require_square(cmatrix(a), "sandwich_report")
    instance = ProblemInstance(a, None, tol)
    x_plus = solve_maximal(instance).solution
    x_minus = solve_minimal(instance).solution
    lower = build_ladder(a, "lower", depth, tol)
    upper = build_ladder(a, "upper", depth, tol)
    lower_gap = _min_eig(x_minus - lower.matrices[-1])
    upper_gap = _min_eig(upper.matrices[-1] - x_plus)
    trend = lower.monotone_gaps[-2:]
    consistent = lower_gap > -1e-9 and upper_gap > -1e-9
    return SandwichReport(lower, upper, x_minus, x_plus, lower_gap, upper_gap, trend, consistent)
