"""Fixed point engines for X + A* conj(X)^-1 A = Q type equations.

Two equations are solved here:

* the standard equation  X + B* X^-1 B = I  via the monotone iteration
  ``X_{k+1} = I - B* X_k^-1 B`` started at the identity
  (:func:`standard_solve_maximal`), and
* the conjugate-inverse equation  X + A* conj(X)^-1 A = Q  by reducing to the
  standard one through the lozenge embedding (:func:`solve_maximal`) and to
  its dual through ``Y = I - conj(X)`` (:func:`solve_minimal`).

:func:`solve_maximal` always runs the reduction twice, once through the real
embedding and once as a direct complex iteration, and refuses to answer if
the two disagree.  Both engines certify the returned matrix by its equation
residual, never by iterate stagnation alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .embedding import lozenge, unheart
from .kernel import (
    ConricError,
    DEFAULT_TOLERANCES,
    NotPositiveDefiniteError,
    Tolerances,
    adjoint,
    cmatrix,
    hermitian_eigen,
    is_positive_definite,
    mat_inverse,
    op_norm_2,
    psd_sqrt,
    _require_square,
)

# Largest allowed disagreement between the embedded and direct routes.
CROSS_CHECK_TOL = 1e-8


class NoSolutionEvidence(ConricError):
    """An iterate left the positive definite cone.

    The iteration is monotone inside the cone whenever a positive definite
    solution exists, so leaving the cone certifies non-existence.
    """

    def __init__(self, message: str, iterations: int = 0, trace: list[float] | None = None):
        super().__init__(message)
        self.iterations = iterations
        self.trace = trace if trace is not None else []


class MaxIterationsExceeded(ConricError):
    """Iteration cap reached before the stopping rule certified a solution."""

    def __init__(self, message: str, iterations: int = 0, trace: list[float] | None = None):
        super().__init__(message)
        self.iterations = iterations
        self.trace = trace if trace is not None else []


class InternalInconsistency(ConricError):
    """Two routes that must agree did not; the result cannot be trusted."""


class SingularCoefficient(ConricError):
    """The coefficient matrix is singular to tolerance."""


class NotASolution(ConricError):
    """The supplied matrix does not solve the equation to tolerance."""


@dataclass
class ProblemInstance:
    """Equation data: coefficient ``a``, right-hand side ``q`` (default I)."""

    a: np.ndarray
    q: np.ndarray | None = None
    tol: Tolerances = DEFAULT_TOLERANCES

    def __post_init__(self) -> None:
        self.a = _require_square(cmatrix(self.a), "ProblemInstance")
        n = self.a.shape[0]
        if self.q is None:
            self.q = np.eye(n, dtype=np.complex128)
        else:
            self.q = cmatrix(self.q)
            if self.q.shape != self.a.shape:
                raise ValueError(f"q shape {self.q.shape} does not match a shape {self.a.shape}")
            ok, margin = is_positive_definite(self.q, self.tol)
            if not ok:
                raise NotPositiveDefiniteError(
                    f"q must be positive definite (pivot margin {margin:.3e})"
                )

    @property
    def n(self) -> int:
        return self.a.shape[0]


@dataclass
class SolveOutcome:
    """A certified solution together with how it was reached.

    trace holds the per-step change norms of the iteration that produced the
    solution.  rate_certificate is the norm of (unit-Q solution)^-1 times the
    conjugated coefficient; when below one, the iteration provably converges
    at least linearly and ``linear_rate_guaranteed`` is set.
    """

    solution: np.ndarray
    kind: str
    iterations: int
    residual: float
    trace: list[float] = field(default_factory=list)
    rate_certificate: float | None = None
    linear_rate_guaranteed: bool = False


@dataclass
class QNormalization:
    """Coefficient of the unit right-hand side problem plus the way back."""

    a_q: np.ndarray
    q_sqrt: np.ndarray

    def back(self, y: np.ndarray) -> np.ndarray:
        x = self.q_sqrt @ y @ self.q_sqrt
        return (x + x.conj().T) / 2.0


def normalize_q(p: ProblemInstance) -> QNormalization:
    """Reduce to right-hand side I: a_q = conj(q)^(-1/2) a q^(-1/2).

    The inverse map, applied by the solve routines after the unit solve, is
    x = q^(1/2) y q^(1/2).
    """
    root = psd_sqrt(p.q)
    root_inv = mat_inverse(root, p.tol)
    a_q = np.conj(root_inv) @ p.a @ root_inv
    return QNormalization(a_q, root)


def _fixed_point_generic(
    coeff: np.ndarray,
    conjugate_iterate: bool,
    tol: Tolerances,
    residual_tol: float,
    observer: Callable[[np.ndarray], None] | None,
    keep_trace: bool,
) -> tuple[np.ndarray, int, list[float], float]:
    n = coeff.shape[0]
    ch = adjoint(coeff)
    eye = np.eye(n, dtype=np.complex128)

    def update(w: np.ndarray) -> np.ndarray:
        inner = np.conj(w) if conjugate_iterate else w
        return eye - ch @ mat_inverse(inner, tol) @ coeff

    w = eye.copy()
    if observer is not None:
        observer(w)
    trace: list[float] = []
    for k in range(1, tol.max_iter + 1):
        ok, margin = is_positive_definite(w, tol)
        if not ok:
            raise NoSolutionEvidence(
                f"iterate {k - 1} lost positive definiteness (pivot margin {margin:.3e})",
                iterations=k - 1,
                trace=trace,
            )
        w_next = update(w)
        w_next = (w_next + w_next.conj().T) / 2.0
        change = op_norm_2(w_next - w)
        if keep_trace:
            trace.append(change)
        if observer is not None:
            observer(w_next)
        if change <= tol.stop_rel * op_norm_2(w):
            # the equation defect of an iterate equals its next update step
            res = op_norm_2(w_next - update(w_next))
            if res <= residual_tol:
                return w_next, k, trace, res
        w = w_next
    raise MaxIterationsExceeded(
        f"no certified solution within {tol.max_iter} iterations",
        iterations=tol.max_iter,
        trace=trace,
    )


def _fixed_point_small(
    coeff: np.ndarray,
    conjugate_iterate: bool,
    tol: Tolerances,
    residual_tol: float,
    keep_trace: bool,
) -> tuple[np.ndarray, int, list[float], float]:
    """Scalar-arithmetic twin of the generic loop for n <= 2.

    Identical semantics: same pivot floor (for 2x2 Hermitian the Cholesky
    pivots are exactly [w11, det/w11]), same spectral norms (closed form for
    2x2 Hermitian), same stopping rule.  Exists because boundary instances
    converge sublinearly and can legitimately need tens of millions of
    iterations.
    """
    n = coeff.shape[0]
    trace: list[float] = []
    if n == 1:
        b2 = abs(complex(coeff[0, 0])) ** 2
        w = 1.0
        for k in range(1, tol.max_iter + 1):
            scale = w if w > 0.0 else 1.0
            if w <= tol.pd_floor * scale:
                raise NoSolutionEvidence(
                    f"iterate {k - 1} lost positive definiteness",
                    iterations=k - 1,
                    trace=trace,
                )
            w_next = 1.0 - b2 / w
            change = abs(w_next - w)
            if keep_trace:
                trace.append(change)
            if change <= tol.stop_rel * abs(w) and w_next > 0.0:
                res = abs(w_next - (1.0 - b2 / w_next))
                if res <= residual_tol:
                    return (
                        np.array([[w_next]], dtype=np.complex128),
                        k,
                        trace,
                        res,
                    )
            w = w_next
        raise MaxIterationsExceeded(
            f"no certified solution within {tol.max_iter} iterations",
            iterations=tol.max_iter,
            trace=trace,
        )

    a11 = complex(coeff[0, 0])
    a12 = complex(coeff[0, 1])
    a21 = complex(coeff[1, 0])
    a22 = complex(coeff[1, 1])
    h11 = a11.conjugate()
    h12 = a21.conjugate()
    h21 = a12.conjugate()
    h22 = a22.conjugate()

    def step(w11: float, w12: complex, w22: float) -> tuple[float, complex, float]:
        # invert the Hermitian iterate (or its conjugate) via the adjugate
        det = w11 * w22 - (w12.real * w12.real + w12.imag * w12.imag)
        if conjugate_iterate:
            i11 = w22 / det
            i12 = -w12.conjugate() / det
        else:
            i11 = w22 / det
            i12 = -w12 / det
        i21 = i12.conjugate()
        i22 = w11 / det
        m11 = h11 * i11 + h12 * i21
        m12 = h11 * i12 + h12 * i22
        m21 = h21 * i11 + h22 * i21
        m22 = h21 * i12 + h22 * i22
        t11 = (m11 * a11 + m12 * a21).real
        t12 = m11 * a12 + m12 * a22
        t22 = (m21 * a12 + m22 * a22).real
        return 1.0 - t11, -t12, 1.0 - t22

    def herm_norm(d11: float, d12: complex, d22: float) -> float:
        mean = (d11 + d22) / 2.0
        dev = (d11 - d22) / 2.0
        radius = math.sqrt(dev * dev + d12.real * d12.real + d12.imag * d12.imag)
        return abs(mean) + radius

    w11, w12, w22 = 1.0, 0.0j, 1.0
    stop_rel = tol.stop_rel
    pd_floor = tol.pd_floor
    for k in range(1, tol.max_iter + 1):
        scale = (w11 + w22) / 2.0
        floor = pd_floor * scale if scale > 0.0 else pd_floor
        det = w11 * w22 - (w12.real * w12.real + w12.imag * w12.imag)
        if w11 <= floor or (det / w11 if w11 > 0.0 else -1.0) <= floor:
            raise NoSolutionEvidence(
                f"iterate {k - 1} lost positive definiteness",
                iterations=k - 1,
                trace=trace,
            )
        n11, n12, n22 = step(w11, w12, w22)
        change = herm_norm(n11 - w11, n12 - w12, n22 - w22)
        if keep_trace:
            trace.append(change)
        if change <= stop_rel * herm_norm(w11, w12, w22):
            try:
                r11, r12, r22 = step(n11, n12, n22)
                res = herm_norm(n11 - r11, n12 - r12, n22 - r22)
            except ZeroDivisionError:
                res = math.inf
            if res <= residual_tol:
                solution = np.array(
                    [[n11, n12], [n12.conjugate(), n22]], dtype=np.complex128
                )
                return solution, k, trace, res
        w11, w12, w22 = n11, n12, n22
    raise MaxIterationsExceeded(
        f"no certified solution within {tol.max_iter} iterations",
        iterations=tol.max_iter,
        trace=trace,
    )


def _fixed_point_solve(
    coeff: np.ndarray,
    conjugate_iterate: bool,
    tol: Tolerances,
    residual_tol: float,
    observer: Callable[[np.ndarray], None] | None = None,
    keep_trace: bool = True,
) -> tuple[np.ndarray, int, list[float], float]:
    """Monotone descent from the identity with residual certification.

    Iterates ``W_{k+1} = I - C* inner(W_k)^-1 C`` where ``inner`` is either
    the identity (standard equation) or the entrywise conjugate.  Stops once
    the iterate change falls below ``stop_rel`` relative and the equation
    residual certifies below ``residual_tol``.  Loss of positive definiteness
    raises NoSolutionEvidence; running out of iterations raises
    MaxIterationsExceeded (slow boundary instances land here by design).
    """
    if observer is None and coeff.shape[0] <= 2:
        return _fixed_point_small(coeff, conjugate_iterate, tol, residual_tol, keep_trace)
    return _fixed_point_generic(coeff, conjugate_iterate, tol, residual_tol, observer, keep_trace)


def standard_solve_maximal(
    b,
    tol: Tolerances = DEFAULT_TOLERANCES,
    observer: Callable[[np.ndarray], None] | None = None,
    residual_tol: float | None = None,
    keep_trace: bool = True,
) -> SolveOutcome:
    """Maximal positive definite solution of X + B* X^-1 B = I.

    The iterates decrease monotonically from the identity towards the
    maximal solution whenever one exists.  ``observer``, if given, is called
    with every iterate including the starting identity.
    """
    b = _require_square(cmatrix(b), "standard_solve_maximal")
    rtol = tol.residual_tol if residual_tol is None else residual_tol
    w, iterations, trace, res = _fixed_point_solve(
        b, False, tol, rtol, observer=observer, keep_trace=keep_trace
    )
    certificate = op_norm_2(mat_inverse(w, tol) @ b)
    return SolveOutcome(
        solution=w,
        kind="maximal",
        iterations=iterations,
        residual=res,
        trace=trace,
        rate_certificate=certificate,
        linear_rate_guaranteed=certificate < 1.0,
    )


def _direct_unit_maximal(a: np.ndarray, tol: Tolerances, residual_tol: float) -> np.ndarray:
    """Direct complex iteration Y_{k+1} = I - A* conj(Y_k)^-1 A at unit Q."""
    y, _, _, _ = _fixed_point_solve(a, True, tol, residual_tol, keep_trace=False)
    return y


def solve_maximal(
    p: ProblemInstance,
    observer: Callable[[np.ndarray], None] | None = None,
) -> SolveOutcome:
    """Maximal positive definite solution of X + A* conj(X)^-1 A = Q.

    Normalizes Q away, runs the real embedded iteration on lozenge(a_q),
    extracts the complex solution, and cross-checks it against an
    independently run direct complex iteration; disagreement beyond 1e-8 is
    reported as an internal inconsistency rather than returned.  ``observer``
    receives the iterates of the embedded (doubled-size) run.
    """
    mapping = normalize_q(p)
    a_q = mapping.a_q
    q_scale = max(1.0, op_norm_2(p.q))
    engine_rtol = p.tol.residual_tol / q_scale

    embedded = standard_solve_maximal(
        lozenge(a_q), p.tol, observer=observer, residual_tol=engine_rtol
    )
    x_unit = unheart(embedded.solution)
    x_unit = (x_unit + x_unit.conj().T) / 2.0

    try:
        y_unit = _direct_unit_maximal(a_q, p.tol, engine_rtol)
    except (NoSolutionEvidence, MaxIterationsExceeded) as exc:
        raise InternalInconsistency(
            f"embedded run converged but the direct run failed: {exc}"
        ) from exc
    gap = op_norm_2(x_unit - y_unit)
    if gap > CROSS_CHECK_TOL:
        raise InternalInconsistency(
            f"embedded and direct solutions disagree by {gap:.3e}"
        )

    x = mapping.back(x_unit)
    res = residual(x, p)
    if res > p.tol.residual_tol:
        raise InternalInconsistency(
            f"back-mapped residual {res:.3e} exceeds tolerance {p.tol.residual_tol:.3e}"
        )
    certificate = op_norm_2(mat_inverse(x_unit, p.tol) @ np.conj(a_q))
    return SolveOutcome(
        solution=x,
        kind="maximal",
        iterations=embedded.iterations,
        residual=res,
        trace=embedded.trace,
        rate_certificate=certificate,
        linear_rate_guaranteed=certificate < 1.0,
    )


def _require_nonsingular(a: np.ndarray, tol: Tolerances, who: str) -> None:
    gram = a.conj().T @ a
    w, _ = hermitian_eigen((gram + gram.conj().T) / 2.0)
    smallest = np.sqrt(max(float(w[0]), 0.0))
    if smallest <= tol.pd_floor * op_norm_2(a):
        raise SingularCoefficient(
            f"{who} needs a nonsingular coefficient (smallest singular value {smallest:.3e})"
        )


def solve_minimal(
    p: ProblemInstance,
    observer: Callable[[np.ndarray], None] | None = None,
) -> SolveOutcome:
    """Minimal positive definite solution, available for nonsingular A.

    Uses the substitution Y = I - conj(X), which turns the unit-Q equation
    into the same equation with coefficient A*; the maximal solution of that
    dual problem maps back to the minimal solution of the original one as
    X = I - conj(Y).  The result is certified by its residual in the original
    equation.
    """
    _require_nonsingular(p.a, p.tol, "solve_minimal")
    mapping = normalize_q(p)
    a_q = mapping.a_q
    n = p.n

    dual = ProblemInstance(adjoint(a_q), None, p.tol)
    dual_out = solve_maximal(dual, observer=observer)
    y_plus = dual_out.solution

    x_unit = np.eye(n, dtype=np.complex128) - np.conj(y_plus)
    x_unit = (x_unit + x_unit.conj().T) / 2.0
    x = mapping.back(x_unit)

    ok, margin = is_positive_definite(x, p.tol)
    if not ok:
        raise NoSolutionEvidence(
            f"minimal candidate is not positive definite (pivot margin {margin:.3e})",
            iterations=dual_out.iterations,
            trace=dual_out.trace,
        )
    res = residual(x, p)
    if res > p.tol.residual_tol:
        raise InternalInconsistency(
            f"dual-route residual {res:.3e} exceeds tolerance {p.tol.residual_tol:.3e}"
        )
    return SolveOutcome(
        solution=x,
        kind="minimal",
        iterations=dual_out.iterations,
        residual=res,
        trace=dual_out.trace,
        rate_certificate=dual_out.rate_certificate,
        linear_rate_guaranteed=dual_out.linear_rate_guaranteed,
    )


def residual(x, p: ProblemInstance) -> float:
    """Equation defect ||x + a* conj(x)^-1 a - q|| in the spectral norm."""
    x = cmatrix(x)
    ok, margin = is_positive_definite(x, p.tol)
    if not ok:
        raise NotPositiveDefiniteError(
            f"residual needs a positive definite x (pivot margin {margin:.3e})"
        )
    return op_norm_2(x + adjoint(p.a) @ mat_inverse(np.conj(x), p.tol) @ p.a - p.q)


def extremality_check(x, p: ProblemInstance, kind: str) -> tuple[bool, float]:
    """Certify that a solution is the maximal or minimal one.

    The maximal solution is the unique one whose conjugate inverse times the
    coefficient has con-spectral radius at most 1; the minimal solution is
    the unique one where the adjoint-coefficient variant is at least 1.  The
    test runs on the unit-Q normalization and returns the underlying value
    rho(M conj(M)) alongside the verdict.
    """
    from .embedding import co_spectral_radius_vs_one

    if kind not in ("maximal", "minimal"):
        raise ValueError(f"kind must be 'maximal' or 'minimal', got {kind!r}")
    res = residual(x, p)
    if res > p.tol.residual_tol:
        raise NotASolution(f"residual {res:.3e} exceeds tolerance; not a solution")
    mapping = normalize_q(p)
    root_inv = mat_inverse(mapping.q_sqrt, p.tol)
    y = root_inv @ np.asarray(x, dtype=np.complex128) @ root_inv
    y = (y + y.conj().T) / 2.0
    if kind == "maximal":
        m = mat_inverse(np.conj(y), p.tol) @ mapping.a_q
        ordering, value = co_spectral_radius_vs_one(m, p.tol)
        return ordering in ("below", "at"), value
    m = mat_inverse(np.conj(y), p.tol) @ adjoint(mapping.a_q)
    ordering, value = co_spectral_radius_vs_one(m, p.tol)
    return ordering in ("at", "above"), value
