"""Existence certification for X + A* conj(X)^-1 A = I.

Three layers of evidence, strongest applicable one wins:

* necessary conditions (violations disprove existence),
* the sufficient norm bound ||A|| <= 1/2,
* for invertible A the exact criterion omega(lozenge(A)) <= 1/2.

Every threshold comparison carries a classification band (1e-8, widened to
1e-4 for the numerical radius whose grid search has a known bias bound), and
within-band instances come back "undetermined" instead of being forced to a
boolean: boundary instances such as ||A|| exactly 1/2 are legitimately
solvable and must not be misclassified by rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .embedding import is_con_normal, lozenge
from .kernel import (
    ConricError,
    DEFAULT_TOLERANCES,
    Tolerances,
    adjoint,
    cmatrix,
    hermitian_eigen,
    is_positive_definite,
    numerical_radius,
    op_norm_2,
    spectral_radius,
    _require_square,
)
from .solver import (
    MaxIterationsExceeded,
    NoSolutionEvidence,
    ProblemInstance,
    SingularCoefficient,
    SolveOutcome,
    solve_maximal,
)

# Classification band around each threshold (1/4, 1/2, 1).
BAND = 1e-8
# Wider band for the numerical radius, covering the grid search bias.
OMEGA_BAND = 1e-4


class NotConNormal(ConricError):
    pass


class NormExceedsHalf(ConricError):
    pass


class ConditionCheck(NamedTuple):
    name: str
    holds: bool
    margin: float


@dataclass
class ExistenceReport:
    """Per-condition booleans with signed margins plus an overall verdict."""

    necessary: list[ConditionCheck]
    sufficient_norm_half: ConditionCheck
    exact_invertible: ConditionCheck | None
    verdict: str  # "exists" | "not_exists" | "undetermined"

    def necessary_failures(self) -> list[ConditionCheck]:
        return [c for c in self.necessary if c.margin < -BAND]


def _is_invertible(a: np.ndarray, tol: Tolerances) -> bool:
    gram = a.conj().T @ a
    w, _ = hermitian_eigen((gram + gram.conj().T) / 2.0)
    smallest = np.sqrt(max(float(w[0]), 0.0))
    return smallest > tol.pd_floor * op_norm_2(a)


def check_existence(a, tol: Tolerances = DEFAULT_TOLERANCES) -> ExistenceReport:
    """Evaluate all existence conditions for the unit right-hand side equation.

    Verdict logic: a necessary condition failing beyond its band disproves
    existence; the sufficient norm bound or, for invertible A, the exact
    numerical radius criterion prove it; the exact criterion failing beyond
    its band also disproves it (the criterion is two-sided for invertible A);
    anything else is undetermined.
    """
    a = _require_square(cmatrix(a), "check_existence")
    n = a.shape[0]
    eye = np.eye(n, dtype=np.complex128)

    rho_quarter = 0.25 - spectral_radius(a @ np.conj(a), tol)
    norm_a = op_norm_2(a)
    gram = eye - a @ adjoint(a) - np.conj(adjoint(a) @ a)
    gram_ok, gram_margin = is_positive_definite((gram + gram.conj().T) / 2.0, tol)
    necessary = [
        ConditionCheck("rho_quarter", rho_quarter > 0.0, rho_quarter),
        ConditionCheck("norm_lt_one", norm_a < 1.0, 1.0 - norm_a),
        ConditionCheck("gram_sum", gram_ok, gram_margin),
    ]
    for label, sign in (("co_rho_plus", 1.0), ("co_rho_minus", -1.0)):
        m = a + sign * a.T
        margin = 1.0 - spectral_radius(m @ np.conj(m), tol)
        necessary.append(ConditionCheck(label, margin > 0.0, margin))

    sufficient = ConditionCheck("norm_le_half", norm_a <= 0.5, 0.5 - norm_a)

    exact: ConditionCheck | None = None
    if _is_invertible(a, tol):
        omega = numerical_radius(lozenge(a), tol)
        exact = ConditionCheck("omega_lozenge_le_half", omega <= 0.5, 0.5 - omega)

    if any(c.margin < -BAND for c in necessary):
        verdict = "not_exists"
    elif sufficient.margin > BAND:
        verdict = "exists"
    elif exact is not None and exact.margin > OMEGA_BAND:
        verdict = "exists"
    elif exact is not None and exact.margin < -OMEGA_BAND:
        verdict = "not_exists"
    else:
        verdict = "undetermined"
    return ExistenceReport(necessary, sufficient, exact, verdict)


def con_normal_closed_form(
    a,
    want: str = "maximal",
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """Closed form (I +- (I - 4 A* A)^(1/2)) / 2 for con-normal coefficients.

    Valid exactly when ||A|| <= 1/2 (for con-normal A that bound is also
    necessary); the minimal branch additionally needs A nonsingular.  The
    square root is evaluated spectrally with the tiny negative eigenvalues a
    within-band norm can produce clamped to zero.
    """
    if want not in ("maximal", "minimal"):
        raise ValueError(f"want must be 'maximal' or 'minimal', got {want!r}")
    a = _require_square(cmatrix(a), "con_normal_closed_form")
    ok, margin = is_con_normal(a, tol)
    if not ok:
        raise NotConNormal(f"coefficient is not con-normal (margin {margin:.3e})")
    norm_a = op_norm_2(a)
    if norm_a > 0.5 + BAND:
        raise NormExceedsHalf(
            f"||A|| = {norm_a:.6f} > 1/2: no positive definite solution exists"
        )
    gram = adjoint(a) @ a
    w, v = hermitian_eigen((gram + gram.conj().T) / 2.0)
    if want == "minimal":
        smallest = np.sqrt(max(float(w[0]), 0.0))
        if smallest <= tol.pd_floor * norm_a:
            raise SingularCoefficient("minimal closed form needs a nonsingular coefficient")
    disc = np.sqrt(np.clip(1.0 - 4.0 * w, 0.0, None))
    eigs = (1.0 + disc) / 2.0 if want == "maximal" else (1.0 - disc) / 2.0
    x = (v * eigs) @ v.conj().T
    return (x + x.conj().T) / 2.0


@dataclass
class CrossValidation:
    """Agreement between the condition layer and the actual solve."""

    existence: ExistenceReport
    solver_succeeded: bool
    solver_error: str | None
    outcome: SolveOutcome | None
    consistent: bool
    note: str


def cross_validate(a, tol: Tolerances = DEFAULT_TOLERANCES) -> CrossValidation:
    """Run the existence checks and the solver and compare their answers.

    "exists" must come with a successful solve and "not_exists" with a solver
    failure; an undetermined verdict is consistent with either outcome and
    the solver result is attached as empirical evidence only.
    """
    report = check_existence(a, tol)
    outcome: SolveOutcome | None = None
    error: str | None = None
    try:
        outcome = solve_maximal(ProblemInstance(a, None, tol))
        succeeded = True
    except NoSolutionEvidence as exc:
        error = f"no-solution-evidence: {exc}"
        succeeded = False
    except MaxIterationsExceeded as exc:
        error = f"max-iterations: {exc}"
        succeeded = False

    if report.verdict == "exists":
        consistent = succeeded
        note = "" if consistent else "internal-inconsistency: verdict exists but solver failed"
    elif report.verdict == "not_exists":
        consistent = not succeeded
        note = "" if consistent else "internal-inconsistency: verdict not_exists but solver succeeded"
    else:
        consistent = True
        note = "verdict undetermined; solver outcome is evidence, not proof"
    return CrossValidation(report, succeeded, error, outcome, consistent, note)
