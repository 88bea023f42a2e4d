"""Seeded random parameter generators for property suites."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .doubled import DoubledMatrix, dagger
from .special_class import SpecialClassParams
from .system import PhysicalParams

MAX_COUPLING_NORM = 2.0
# generator-side rejection threshold for the fast dynamics matrix; stricter than
# the library's own singularity threshold so suites avoid near-singular draws
GENERATOR_RCOND = 1e-6


def _complex_square(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, shape) + 1j * rng.uniform(-1.0, 1.0, shape)


def random_doubled(rng: np.random.Generator, n: int, m: int) -> DoubledMatrix:
    return DoubledMatrix(_complex_square(rng, (n, m)), _complex_square(rng, (n, m)))


def random_hermitian_doubled(rng: np.random.Generator, n: int) -> DoubledMatrix:
    a = random_doubled(rng, n, n)
    h = a.expand() + dagger(a.expand())
    return DoubledMatrix(h[:n, :n], h[:n, n:])


def random_coupling(rng: np.random.Generator, m: int, n: int) -> DoubledMatrix:
    """Doubled coupling matrix rescaled so its spectral norm is at most 2."""
    d = random_doubled(rng, m, n)
    norm = np.linalg.norm(d.expand(), 2)
    return d.scaled(min(1.0, MAX_COUPLING_NORM / norm)) if norm > 0 else d


def random_unitary(rng: np.random.Generator, m: int) -> np.ndarray:
    if m == 1:
        return np.array([[np.exp(1j * rng.uniform(0, 2 * np.pi))]])
    return unitary_group.rvs(m, random_state=rng)


def random_physical_params(rng: np.random.Generator, n: int, m: int) -> PhysicalParams:
    """Canonical (``Theta = J``) parameters with Hermitian ``M``, bounded ``N`` and unitary ``S``."""
    return PhysicalParams(M=random_hermitian_doubled(rng, n), N=random_coupling(rng, m, n), S=random_unitary(rng, m))


def _fast_rcond(p: SpecialClassParams) -> float:
    Md, Nb = p.Md.expand(), p.Nb.expand()
    m = p.m_fields
    Jm = np.diag(np.r_[np.ones(m), -np.ones(m)])
    D = 1j * Md + 0.5 * dagger(Nb) @ Jm @ Nb
    svals = np.linalg.svd(D, compute_uv=False)
    return float(svals[-1] / svals[0]) if svals[0] > 0 else 0.0


def random_special_params(rng: np.random.Generator, n_slow: int, n_fast: int, m: int) -> SpecialClassParams:
    """Special-class parameters; draws with a near-singular fast block are redrawn."""
    while True:
        Mb = random_doubled(rng, n_slow, n_fast)
        p = SpecialClassParams(
            Ma=random_hermitian_doubled(rng, n_slow),
            Mb=Mb,
            Mc=Mb.dagger(),
            Md=random_hermitian_doubled(rng, n_fast),
            Na=random_coupling(rng, m, n_slow),
            Nb=random_coupling(rng, m, n_fast),
            S=random_unitary(rng, m),
        )
        if _fast_rcond(p) > GENERATOR_RCOND:
            return p


def suite_dimensions(seed: int, kind: str) -> tuple[int, ...]:
    """Per-seed dimensions: ``(n, m)`` for ``"physical"``, ``(n1, n2, m)`` for ``"special"``."""
    rng = np.random.default_rng([seed, 7])
    if kind == "physical":
        return int(rng.integers(1, 4)), int(rng.integers(1, 3))
    if kind == "special":
        return int(rng.integers(1, 3)), int(rng.integers(1, 3)), int(rng.integers(1, 3))
    raise ValueError(f"unknown suite kind {kind!r}")


def physical_suite(count: int = 100, base_seed: int = 0) -> list[PhysicalParams]:
    out = []
    for k in range(count):
        n, m = suite_dimensions(base_seed + k, "physical")
        out.append(random_physical_params(np.random.default_rng(base_seed + k), n, m))
    return out


def special_suite(count: int = 100, base_seed: int = 0) -> list[SpecialClassParams]:
    out = []
    for k in range(count):
        n1, n2, m = suite_dimensions(base_seed + k, "special")
        out.append(random_special_params(np.random.default_rng(base_seed + k), n1, n2, m))
    return out
