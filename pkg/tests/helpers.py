"""Shared test data and samplers."""

from __future__ import annotations

import numpy as np

# 2x2 instance used throughout: boundary for the classical equation
# (numerical radius exactly 1/2) yet comfortably solvable for the
# conjugate-inverse one, so the two solution sets visibly differ.
EX1_A = np.array(
    [[0.25 + 0.25j, 0.25j], [-0.25j, 0.25 - 0.25j]], dtype=np.complex128
)
_S6 = np.sqrt(6.0)
EX1_X_PLUS = np.array(
    [
        [0.5 + _S6 / 8.0, -0.125 - 0.125j],
        [-0.125 + 0.125j, 0.5 + _S6 / 8.0],
    ],
    dtype=np.complex128,
)
_S2 = np.sqrt(2.0)
EX1_X_PLUS_STANDARD = np.array(
    [
        [_S2 / 8.0 + 0.5, -0.25 - (_S2 / 8.0) * 1j],
        [-0.25 + (_S2 / 8.0) * 1j, _S2 / 8.0 + 0.5],
    ],
    dtype=np.complex128,
)
# frozen from the 2x2 closed form 0.1875 +- |0.125 - 0.125j|
EX1_AAH_EIGS = (0.0107233, 0.3642767)
EX1_NORM = 0.6035533905932738


def scalar_solutions(a: complex) -> tuple[float, float]:
    """Roots of x**2 - x + |a|**2 = 0, the 1x1 equation with q = 1."""
    disc = 1.0 - 4.0 * abs(a) ** 2
    if disc < 0.0:
        raise ValueError(f"no real solution for |a| = {abs(a)}")
    root = np.sqrt(disc)
    return (1.0 + root) / 2.0, (1.0 - root) / 2.0


def random_complex(rng: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def random_with_norm(rng: np.random.Generator, n: int, target: float) -> np.ndarray:
    a = random_complex(rng, n)
    return target * a / np.linalg.norm(a, 2)


def random_solvable(
    rng: np.random.Generator, n: int, max_norm: float = 0.499, min_norm: float = 0.05
) -> np.ndarray:
    """Coefficient with spectral norm below 1/2, hence provably solvable."""
    return random_with_norm(rng, n, float(rng.uniform(min_norm, max_norm)))


def random_nonsingular_solvable(
    rng: np.random.Generator, n: int, max_norm: float = 0.499, min_norm: float = 0.05
) -> np.ndarray:
    while True:
        a = random_solvable(rng, n, max_norm, min_norm)
        singular_values = np.linalg.svd(a, compute_uv=False)
        if singular_values[-1] > 1e-3 * singular_values[0]:
            return a


def random_well_conditioned_solvable(
    rng: np.random.Generator, n: int, lo: float = 0.26, hi: float = 0.49
) -> np.ndarray:
    """Solvable coefficient with all singular values inside [lo, hi].

    Keeps every direction of a depth-6 bound ladder converging slowly
    enough that the strict domination gaps stay above rounding level.
    """
    u = random_unitary(rng, n)
    v = random_unitary(rng, n)
    return u @ np.diag(rng.uniform(lo, hi, size=n)) @ v.conj().T


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    m = random_complex(rng, n)
    return (m + m.conj().T) / 2.0


def random_psd(rng: np.random.Generator, n: int) -> np.ndarray:
    m = random_complex(rng, n)
    return m @ m.conj().T


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    _, v = np.linalg.eigh(random_hermitian(rng, n))
    return v


def scalar_ladder(a: complex, depth: int) -> tuple[list[float], list[float]]:
    """Continued-fraction recursion s1 = |a|^2, s_{k+1} = |a|^2 / (1 - s_k)."""
    mag2 = abs(a) ** 2
    lower = [mag2]
    for _ in range(depth - 1):
        lower.append(mag2 / (1.0 - lower[-1]))
    upper = [1.0 - s for s in lower]
    return lower, upper
