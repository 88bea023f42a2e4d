"""Linear quantum systems in doubled-up form and their realizability tests.

A system with ``n`` oscillator modes driven by ``m`` fields evolves as::

    d[a; a#] = F [a; a#] dt + G [du; du#]
    d[y; y#] = H [a; a#] dt + K [du; du#]

with all four matrices doubled.  It is *physically realizable* when it can be
generated from a commutation matrix ``Theta``, a Hermitian Hamiltonian matrix
``M``, a coupling matrix ``N`` and a unitary scattering matrix ``S`` via
:func:`realize`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .doubled import (
    DEFAULT_TOL,
    Check,
    ComplexArray,
    DoubledMatrix,
    Sigma,
    as_complex_matrix,
    contract,
    dagger,
    hermitian_residual,
    max_abs,
    unitary_residual,
)
from .doubled import J as J_matrix
from .errors import DimensionMismatch, InvalidParameter, NotRealizable, SingularMatrix, StructureViolation

# Below this reciprocal condition number sI - F is treated as singular.
RESOLVENT_RCOND = 1e-13
THETA_RCOND = 1e-12

DEFAULT_SAMPLE_COUNT = 12
DEFAULT_SEED = 42
IMAGINARY_AXIS_FREQS = (0.1, 0.5, 1.0, 2.0, 10.0, 100.0)
SAMPLE_RADIUS = 10.0
SAMPLE_EXCLUSION = 1e-6


@dataclass(frozen=True, eq=False)
class QuantumLinearSystem:
    F: DoubledMatrix
    G: DoubledMatrix
    H: DoubledMatrix
    K: DoubledMatrix

    def __post_init__(self):
        n = self.F.half_rows
        m = self.K.half_rows
        expected = {"F": (n, n), "G": (n, m), "H": (m, n), "K": (m, m)}
        for name, shape in expected.items():
            mat = getattr(self, name)
            if not isinstance(mat, DoubledMatrix):
                raise TypeError(f"{name} must be a DoubledMatrix, got {type(mat).__name__}")
            if (mat.half_rows, mat.half_cols) != shape:
                raise DimensionMismatch(
                    f"{name} has half-shape {(mat.half_rows, mat.half_cols)}, expected {shape} for n={n}, m={m}"
                )

    @property
    def n_modes(self) -> int:
        return self.F.half_rows

    @property
    def m_fields(self) -> int:
        return self.K.half_rows

    def matrices(self) -> tuple[ComplexArray, ComplexArray, ComplexArray, ComplexArray]:
        """Expanded ``(F, G, H, K)``."""
        return self.F.expand(), self.G.expand(), self.H.expand(), self.K.expand()

    @classmethod
    def from_arrays(cls, F: ArrayLike, G: ArrayLike, H: ArrayLike, K: ArrayLike, tol: float = DEFAULT_TOL):
        """Build from full ``2n x 2n`` ... arrays, checking the doubled structure of each."""
        return cls(*(contract(np.asarray(a), tol, name=name) for name, a in zip("FGHK", (F, G, H, K))))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuantumLinearSystem):
            return NotImplemented
        return all(getattr(self, k) == getattr(other, k) for k in "FGHK")


@dataclass(frozen=True, eq=False)
class PhysicalParams:
    """Physical data ``(Theta, M, N, S)``; ``Theta`` defaults to the canonical ``J``."""

    M: DoubledMatrix
    N: DoubledMatrix
    S: ComplexArray
    Theta: ComplexArray | None = None

    def __post_init__(self):
        object.__setattr__(self, "S", as_complex_matrix(self.S, "S"))
        n, m = self.M.half_rows, self.N.half_rows
        if self.M.half_cols != n:
            raise DimensionMismatch(f"M must be square, got half-shape {(n, self.M.half_cols)}")
        if self.N.half_cols != n:
            raise DimensionMismatch(f"N must have half-shape ({m}, {n}), got {(m, self.N.half_cols)}")
        if self.S.shape != (m, m):
            raise DimensionMismatch(f"S must be {m}x{m}, got {self.S.shape}")
        theta = J_matrix(n) if self.Theta is None else as_complex_matrix(self.Theta, "Theta")
        if theta.shape != (2 * n, 2 * n):
            raise DimensionMismatch(f"Theta must be {2 * n}x{2 * n}, got {theta.shape}")
        object.__setattr__(self, "Theta", theta)

    @property
    def n_modes(self) -> int:
        return self.M.half_rows

    @property
    def m_fields(self) -> int:
        return self.N.half_rows

    @property
    def canonical(self) -> bool:
        return bool(np.array_equal(self.Theta, J_matrix(self.n_modes)))

    def residuals(self) -> dict[str, float]:
        theta = self.Theta
        sig = Sigma(self.n_modes)
        svals = np.linalg.svd(theta, compute_uv=False)
        return {
            "M_hermitian": hermitian_residual(self.M.expand()),
            "S_unitary": unitary_residual(self.S),
            "Theta_hermitian": hermitian_residual(theta),
            "Theta_antidoubled": max_abs(sig @ np.conj(theta) @ sig + theta),
            "Theta_rcond": float(svals[-1] / svals[0]) if svals[0] > 0 else 0.0,
        }

    def validate(self, tol: float = DEFAULT_TOL) -> None:
        res = self.residuals()
        for key, fieldname in (("M_hermitian", "M"), ("S_unitary", "S"), ("Theta_hermitian", "Theta"), ("Theta_antidoubled", "Theta")):
            if not res[key] < tol:
                raise StructureViolation(
                    f"{fieldname} fails {key.split('_', 1)[1]} check (residual {res[key]:.3e})",
                    field=fieldname,
                    residual=res[key],
                )
        if not res["Theta_rcond"] > THETA_RCOND:
            raise StructureViolation("Theta is singular", field="Theta", residual=res["Theta_rcond"])


def _result_tol(*arrays: np.ndarray) -> float:
    # products of doubled matrices are doubled up to rounding, which scales with magnitude
    return 1e-9 * max(1.0, *(max_abs(a) for a in arrays))


def _contract_result(arr: np.ndarray, name: str) -> DoubledMatrix:
    return contract(arr, _result_tol(arr), name=name)


def realize(p: PhysicalParams, tol: float = DEFAULT_TOL) -> QuantumLinearSystem:
    """``F = -i Theta M - 1/2 Theta N^dag J N``, ``G = -Theta N^dag J K``, ``H = N``, ``K = diag(S, S#)``."""
    p.validate(tol)
    theta, M, N = p.Theta, p.M.expand(), p.N.expand()
    Jm = J_matrix(p.m_fields)
    K = DoubledMatrix.diag(p.S)
    F = -1j * theta @ M - 0.5 * theta @ dagger(N) @ Jm @ N
    G = -theta @ dagger(N) @ Jm @ K.expand()
    return QuantumLinearSystem(_contract_result(F, "F"), _contract_result(G, "G"), p.N, K)


@dataclass(frozen=True)
class CanonicalExtraction:
    params: PhysicalParams
    hermitian_residual: float
    g_residual: float


def extract_canonical_params(sys: QuantumLinearSystem, tol: float = DEFAULT_TOL) -> CanonicalExtraction:
    """Invert :func:`realize` at ``Theta = J``.

    Takes ``N = H``, ``S`` from the upper-left block of ``K`` and
    ``M = iJ(F + 1/2 J N^dag J N)``.  Raises :class:`NotRealizable` if that
    ``M`` is not Hermitian within ``tol``.  ``g_residual`` is
    ``max|G + J N^dag J K|``, which must also vanish for a canonical
    realization; it is reported, not enforced.
    """
    scat = scattering_form_check(sys.K, tol)
    if not scat.passed:
        raise StructureViolation(
            f"K is not of scattering form diag(S, S#) with unitary S (residual {scat.residual:.3e})",
            field="K",
            residual=scat.residual,
        )
    F, G, H, K = sys.matrices()
    Jn, Jm = J_matrix(sys.n_modes), J_matrix(sys.m_fields)
    M = 1j * Jn @ (F + 0.5 * Jn @ dagger(H) @ Jm @ H)
    herm = hermitian_residual(M)
    if not herm < tol:
        raise NotRealizable(f"extracted Hamiltonian matrix is not Hermitian (residual {herm:.3e})", residual=herm)
    g_res = max_abs(G + Jn @ dagger(H) @ Jm @ K)
    params = PhysicalParams(M=_contract_result(M, "M"), N=sys.H, S=sys.K.r1)
    return CanonicalExtraction(params, herm, g_res)


def _resolvent_solve(F: np.ndarray, s: complex, rhs: np.ndarray) -> np.ndarray:
    A = s * np.eye(F.shape[0]) - F
    svals = np.linalg.svd(A, compute_uv=False)
    rcond = svals[-1] / svals[0] if svals[0] > 0 else 0.0
    if rcond < RESOLVENT_RCOND:
        raise SingularMatrix(f"sI - F is singular at s = {s} (rcond {rcond:.2e})", rcond=rcond)
    return np.linalg.solve(A, rhs)


def evaluate_transfer(F: np.ndarray, G: np.ndarray, H: np.ndarray, K: np.ndarray, s: complex) -> ComplexArray:
    """``H (sI - F)^-1 G + K`` for plain arrays in any state ordering."""
    return H @ _resolvent_solve(F, complex(s), G) + K


def transfer_function(sys: QuantumLinearSystem, s: complex) -> ComplexArray:
    return evaluate_transfer(*sys.matrices(), s)


def _forbidden_points(F: np.ndarray) -> np.ndarray:
    eig = np.linalg.eigvals(F)
    return np.concatenate([eig, -np.conj(eig)])


def default_samples(sys: QuantumLinearSystem, count: int = DEFAULT_SAMPLE_COUNT, seed: int = DEFAULT_SEED) -> list[complex]:
    """Fixed imaginary-axis points followed by seeded random points in ``|s| <= 10``.

    Any point within ``1e-6`` of an eigenvalue of ``F`` or of ``-F^dagger`` is
    replaced by a fresh random draw, so both ``Phi(s)`` and ``Phi(-s*)`` exist.
    """
    if count < 1:
        raise InvalidParameter(f"sample count must be >= 1, got {count}")
    forbidden = _forbidden_points(sys.F.expand())
    rng = np.random.default_rng(seed)

    def admissible(s: complex) -> bool:
        return forbidden.size == 0 or bool(np.min(np.abs(forbidden - s)) > SAMPLE_EXCLUSION)

    def draw() -> complex:
        while True:
            r = SAMPLE_RADIUS * math.sqrt(rng.uniform())
            theta = rng.uniform(0.0, 2.0 * math.pi)
            s = complex(r * math.cos(theta), r * math.sin(theta))
            if admissible(s):
                return s

    out: list[complex] = []
    for w in IMAGINARY_AXIS_FREQS[:count]:
        s = complex(0.0, w)
        out.append(s if admissible(s) else draw())
    while len(out) < count:
        out.append(draw())
    return out


@dataclass(frozen=True)
class JJReport:
    passed: bool
    residual: float
    samples: list[complex]
    per_sample: list[float] = field(repr=False)


def jj_unitarity_check(
    sys: QuantumLinearSystem, samples: Sequence[complex] | None = None, tol: float = 1e-8
) -> JJReport:
    """Max over ``samples`` of ``|Phi(-s*)^dag J Phi(s) - J|``."""
    if samples is None:
        samples = default_samples(sys)
    samples = [complex(s) for s in samples]
    if not samples:
        raise InvalidParameter("jj_unitarity_check needs at least one sample point")
    mats = sys.matrices()
    Jm = J_matrix(sys.m_fields)
    per_sample = []
    for s in samples:
        phi = evaluate_transfer(*mats, s)
        phi_para = evaluate_transfer(*mats, -np.conj(s))
        per_sample.append(max_abs(dagger(phi_para) @ Jm @ phi - Jm))
    worst = max(per_sample)
    return JJReport(worst < tol, worst, samples, per_sample)


class MinimalityCheck(NamedTuple):
    minimal: bool
    controllability_rank: int
    observability_rank: int


def numerical_rank(a: np.ndarray, atol: float = 1e-10, rtol: float = 1e-8) -> int:
    svals = np.linalg.svd(a, compute_uv=False)
    if svals.size == 0:
        return 0
    return int(np.sum(svals > atol + rtol * svals[0]))


def _krylov(F: np.ndarray, B: np.ndarray) -> np.ndarray:
    # F is rescaled to unit norm first: the column span is unchanged but the
    # powers F^k stay O(1), so the relative rank threshold is not swamped.
    scale = np.linalg.norm(F, 2)
    Fn = F / scale if scale > 0 else F
    blocks = [B]
    for _ in range(F.shape[0] - 1):
        blocks.append(Fn @ blocks[-1])
    return np.hstack(blocks)


def minimality_check(sys: QuantumLinearSystem, atol: float = 1e-10, rtol: float = 1e-8) -> MinimalityCheck:
    F, G, H, _ = sys.matrices()
    ctrb = numerical_rank(_krylov(F, G), atol, rtol)
    obsv = numerical_rank(_krylov(F.T, H.T), atol, rtol)
    full = F.shape[0]
    return MinimalityCheck(ctrb == full and obsv == full, ctrb, obsv)


class EigenPairCheck(NamedTuple):
    passed: bool
    min_pair_sum: float
    pair: tuple[int, int]
    eigenvalues: tuple[complex, ...]


def eigenvalue_pair_check(sys: QuantumLinearSystem, tol: float = DEFAULT_TOL) -> EigenPairCheck:
    """Smallest ``|lambda_i + lambda_j|`` over ``i <= j``; passes iff it exceeds ``tol``."""
    eig = np.linalg.eigvals(sys.F.expand())
    sums = np.abs(eig[:, None] + eig[None, :])
    sums[np.tril_indices(eig.size, -1)] = np.inf
    i, j = np.unravel_index(np.argmin(sums), sums.shape)
    worst = float(sums[i, j])
    return EigenPairCheck(worst > tol, worst, (int(i), int(j)), tuple(complex(e) for e in eig))


def scattering_form_check(K: DoubledMatrix, tol: float = DEFAULT_TOL) -> Check:
    """``K = diag(S, S#)`` with ``S`` unitary; residual is the worse of the two violations."""
    res = max(max_abs(K.r2), unitary_residual(K.r1))
    return Check(res < tol, res)


@dataclass(frozen=True)
class RealizabilityReport:
    minimal: bool
    controllability_rank: int
    observability_rank: int
    eig_condition: bool
    eig_min_pair_sum: float
    jj_unitary: bool
    jj_residual_max: float
    scattering_form_ok: bool
    scattering_residual: float
    canonical_M_hermiticity_residual: float | None
    canonical_G_residual: float | None
    samples: list[complex]
    verdict: str

    def residuals(self) -> dict[str, float]:
        out = {
            "eig_min_pair_sum": self.eig_min_pair_sum,
            "jj_residual_max": self.jj_residual_max,
            "scattering_residual": self.scattering_residual,
        }
        if self.canonical_M_hermiticity_residual is not None:
            out["canonical_M_hermiticity_residual"] = self.canonical_M_hermiticity_residual
            out["canonical_G_residual"] = self.canonical_G_residual
        return out


def check_physical_realizability(
    sys: QuantumLinearSystem,
    samples: Sequence[complex] | None = None,
    tol: float = 1e-8,
    *,
    count: int = DEFAULT_SAMPLE_COUNT,
    seed: int = DEFAULT_SEED,
) -> RealizabilityReport:
    """Run the minimality, eigenvalue, (J,J)-unitarity and scattering-form checks.

    ``tol`` applies to the (J,J)-unitarity and scattering residuals.  The
    verdict is ``"pass"`` when everything holds, ``"inconclusive"`` when both
    frequency-domain conditions hold but minimality or the eigenvalue
    hypothesis fails, and ``"fail"`` otherwise.

    The canonical (``Theta = J``) reconstruction residuals are reported when
    ``K`` has scattering form; they do not enter the verdict because a
    realizable system may need a non-canonical ``Theta``.
    """
    if samples is None:
        samples = default_samples(sys, count, seed)
    mini = minimality_check(sys)
    eig = eigenvalue_pair_check(sys)
    jj = jj_unitarity_check(sys, samples, tol)
    scat = scattering_form_check(sys.K, tol)

    herm = g_res = None
    if scat.passed:
        F, G, H, K = sys.matrices()
        Jn, Jm = J_matrix(sys.n_modes), J_matrix(sys.m_fields)
        M = 1j * Jn @ (F + 0.5 * Jn @ dagger(H) @ Jm @ H)
        herm = hermitian_residual(M)
        g_res = max_abs(G + Jn @ dagger(H) @ Jm @ K)

    conditions = jj.passed and scat.passed
    hypotheses = mini.minimal and eig.passed
    if conditions and hypotheses:
        verdict = "pass"
    elif conditions:
        verdict = "inconclusive"
    else:
        verdict = "fail"
    return RealizabilityReport(
        minimal=mini.minimal,
        controllability_rank=mini.controllability_rank,
        observability_rank=mini.observability_rank,
        eig_condition=eig.passed,
        eig_min_pair_sum=eig.min_pair_sum,
        jj_unitary=jj.passed,
        jj_residual_max=jj.residual,
        scattering_form_ok=scat.passed,
        scattering_residual=scat.residual,
        canonical_M_hermiticity_residual=herm,
        canonical_G_residual=g_res,
        samples=list(jj.samples),
        verdict=verdict,
    )
