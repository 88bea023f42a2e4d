"""Singular perturbations of the Hamiltonian and coupling matrices.

In this family the full system is realizable at ``Theta = J`` for every
``eps > 0``: the fast-mode rows and columns of ``M`` scale as ``1/sqrt(eps)``
(``1/eps`` on the fast diagonal block ``Md``) and the fast columns of ``N``
as ``1/sqrt(eps)``.  After rescaling the fast state by ``1/sqrt(eps)`` every
block of the perturbed form is ``eps``-free.

The reduced model is generally *not* realizable because its feedthrough
``K0`` may squeeze.  :func:`decompose` splits it into a realizable dynamic
part preceded by a static Bogoliubov transformation ``K~``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .doubled import (
    Check,
    ComplexArray,
    DoubledMatrix,
    as_complex_matrix,
    dagger,
    doubled_residual,
    hermitian_residual,
    max_abs,
    unitary_residual,
)
from .doubled import J as J_matrix
from .errors import DimensionMismatch, InternalInconsistency, SingularFastDynamics, StructureViolation
from .perturbation import FAST_RCOND, PerturbedSystem
from .system import PhysicalParams, QuantumLinearSystem, _contract_result, realize

DECOMPOSITION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpecialClassParams:
    Ma: DoubledMatrix
    Mb: DoubledMatrix
    Mc: DoubledMatrix
    Md: DoubledMatrix
    Na: DoubledMatrix
    Nb: DoubledMatrix
    S: ComplexArray

    def __post_init__(self):
        object.__setattr__(self, "S", as_complex_matrix(self.S, "S"))
        n1, n2, m = self.Ma.half_rows, self.Md.half_rows, self.Na.half_rows
        expected = {
            "Ma": (n1, n1), "Mb": (n1, n2), "Mc": (n2, n1), "Md": (n2, n2), "Na": (m, n1), "Nb": (m, n2),
        }
        for name, shape in expected.items():
            block = getattr(self, name)
            if (block.half_rows, block.half_cols) != shape:
                raise DimensionMismatch(f"{name} has half-shape {(block.half_rows, block.half_cols)}, expected {shape}")
        if self.S.shape != (m, m):
            raise DimensionMismatch(f"S must be {m}x{m}, got {self.S.shape}")

    @property
    def n_slow(self) -> int:
        return self.Ma.half_rows

    @property
    def n_fast(self) -> int:
        return self.Md.half_rows

    @property
    def m_fields(self) -> int:
        return self.Na.half_rows

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpecialClassParams):
            return NotImplemented
        return all(getattr(self, k) == getattr(other, k) for k in ("Ma", "Mb", "Mc", "Md", "Na", "Nb")) and np.array_equal(
            self.S, other.S
        )


class ValidationReport(NamedTuple):
    passed: bool
    residuals: dict[str, float]


def validate_params(p: SpecialClassParams, tol: float = 1e-10) -> ValidationReport:
    x = {k: getattr(p, k).expand() for k in ("Ma", "Mb", "Mc", "Md", "Na", "Nb")}
    residuals = {
        "Ma_hermitian": hermitian_residual(x["Ma"]),
        "Md_hermitian": hermitian_residual(x["Md"]),
        "Mc_minus_Mb_dagger": max_abs(x["Mc"] - dagger(x["Mb"])),
        "S_unitary": unitary_residual(p.S),
        "doubled": max(doubled_residual(a) for a in x.values()),
    }
    return ValidationReport(all(r < tol for r in residuals.values()), residuals)


def _require_valid(p: SpecialClassParams, tol: float) -> None:
    report = validate_params(p, tol)
    if not report.passed:
        name, worst = max(report.residuals.items(), key=lambda kv: kv[1])
        raise StructureViolation(f"special-class parameters fail {name} (residual {worst:.3e})", field=name, residual=worst)


def to_perturbed(p: SpecialClassParams, tol: float = 1e-10) -> PerturbedSystem:
    _require_valid(p, tol)
    Ma, Mb, Mc, Md, Na, Nb = (getattr(p, k).expand() for k in ("Ma", "Mb", "Mc", "Md", "Na", "Nb"))
    J1, J2, Jm = J_matrix(p.n_slow), J_matrix(p.n_fast), J_matrix(p.m_fields)
    K = DoubledMatrix.diag(p.S)
    Kx = K.expand()
    blocks = {
        "Fa": -J1 @ (1j * Ma + 0.5 * dagger(Na) @ Jm @ Na),
        "Fb": -J1 @ (1j * Mb + 0.5 * dagger(Na) @ Jm @ Nb),
        "Fc": -J2 @ (1j * Mc + 0.5 * dagger(Nb) @ Jm @ Na),
        "Fd": -J2 @ (1j * Md + 0.5 * dagger(Nb) @ Jm @ Nb),
        "Ga": -J1 @ dagger(Na) @ Jm @ Kx,
        "Gb": -J2 @ dagger(Nb) @ Jm @ Kx,
    }
    return PerturbedSystem(
        **{k: _contract_result(v, k) for k, v in blocks.items()}, Ha=p.Na, Hb=p.Nb, K=K
    )


class _Pieces(NamedTuple):
    """Raw (uncontracted) arrays shared by the reduction and the decomposition."""

    F0: np.ndarray
    G0: np.ndarray
    H0: np.ndarray
    K0: np.ndarray
    M_tilde: np.ndarray
    M_tilde_alt: np.ndarray
    N_tilde: np.ndarray
    K_tilde: np.ndarray


def _fast_checked(D: np.ndarray, label: str) -> np.ndarray:
    svals = np.linalg.svd(D, compute_uv=False)
    rcond = float(svals[-1] / svals[0]) if svals[0] > 0 else 0.0
    if not rcond > FAST_RCOND:
        raise SingularFastDynamics(f"{label} is singular (reciprocal condition {rcond:.2e})", rcond=rcond)
    return D


def _pieces(p: SpecialClassParams) -> _Pieces:
    Ma, Mb, Mc, Md, Na, Nb = (getattr(p, k).expand() for k in ("Ma", "Mb", "Mc", "Md", "Na", "Nb"))
    J1, Jm = J_matrix(p.n_slow), J_matrix(p.m_fields)
    K = DoubledMatrix.diag(p.S).expand()

    NbJNb = dagger(Nb) @ Jm @ Nb
    NbJNa = dagger(Nb) @ Jm @ Na
    NaJNb = dagger(Na) @ Jm @ Nb
    # D = iMd + 1/2 Nb^dag J Nb drives the fast mode; Dc = -iMd + ... is its adjoint
    D = _fast_checked(1j * Md + 0.5 * NbJNb, "fast dynamics matrix iMd + 1/2 Nb^dag J Nb")
    Dc = _fast_checked(-1j * Md + 0.5 * NbJNb, "fast dynamics matrix -iMd + 1/2 Nb^dag J Nb")

    def Dinv(x):
        return np.linalg.solve(D, x)

    def Dcinv(x):
        return np.linalg.solve(Dc, x)

    slow_fast = 1j * Mb + 0.5 * NaJNb
    fast_slow = 1j * Mc + 0.5 * NbJNa
    NbJK = dagger(Nb) @ Jm @ K

    F0 = -J1 @ (1j * Ma + 0.5 * dagger(Na) @ Jm @ Na) + J1 @ slow_fast @ Dinv(fast_slow)
    G0 = -J1 @ dagger(Na) @ Jm @ K + J1 @ slow_fast @ Dinv(NbJK)
    H0 = Na - Nb @ Dinv(fast_slow)
    K0 = K - Nb @ Dinv(NbJK)

    N_tilde = Na - Nb @ Dinv(fast_slow)
    K_tilde = K - Nb @ Dinv(NbJK)
    M_tilde = (
        Ma
        - 0.5j * Mb @ Dinv(Mc)
        + 0.5j * Mb @ Dcinv(Mc)
        - 0.25 * Mb @ Dinv(NbJNa)
        - 0.25 * Mb @ Dcinv(NbJNa)
        - 0.25 * NaJNb @ Dinv(Mc)
        - 0.25 * NaJNb @ Dcinv(Mc)
        + 0.125j * NaJNb @ Dinv(NbJNa)
        - 0.125j * NaJNb @ Dcinv(NbJNa)
    )
    M_tilde_alt = 1j * J1 @ (F0 + 0.5 * J1 @ dagger(N_tilde) @ Jm @ N_tilde)
    return _Pieces(F0, G0, H0, K0, M_tilde, M_tilde_alt, N_tilde, K_tilde)


def reduce_special(p: SpecialClassParams) -> QuantumLinearSystem:
    """Reduced model evaluated directly from the physical blocks.

    Algebraically identical to ``perturbation.reduce(to_perturbed(p))`` but
    never forms ``Fa .. Fd``.
    """
    pc = _pieces(p)
    return QuantumLinearSystem(
        _contract_result(pc.F0, "F0"), _contract_result(pc.G0, "G0"), _contract_result(pc.H0, "H0"), _contract_result(pc.K0, "K0")
    )


def bogoliubov_residual(B: DoubledMatrix) -> float:
    Bx = B.expand()
    Jm = J_matrix(B.half_rows)
    eye = np.eye(Bx.shape[0])
    return max(max_abs(Jm @ dagger(Bx) @ Jm @ Bx - eye), max_abs(Bx @ Jm @ dagger(Bx) @ Jm - eye))


def is_bogoliubov(B: DoubledMatrix, tol: float = 1e-10) -> Check:
    """``J B^dag J B = B J B^dag J = I``."""
    if B.half_rows != B.half_cols:
        raise DimensionMismatch(f"a Bogoliubov matrix must be square, got {B.shape}")
    res = bogoliubov_residual(B)
    return Check(res < tol, res)


@dataclass(frozen=True, eq=False)
class BogoliubovComponent:
    """A static (memoryless) Bogoliubov transformation ``[dy; dy#] = B [du; du#]``."""

    B: DoubledMatrix

    def __post_init__(self):
        check = is_bogoliubov(self.B, 1e-9 * max(1.0, max_abs(self.B.expand()) ** 2))
        if not check.passed:
            raise StructureViolation(
                f"B is not a Bogoliubov transformation (residual {check.residual:.3e})", field="B", residual=check.residual
            )

    @property
    def m_fields(self) -> int:
        return self.B.half_rows

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BogoliubovComponent):
            return NotImplemented
        return self.B == other.B


def series_with_static(sys: QuantumLinearSystem, B: BogoliubovComponent) -> QuantumLinearSystem:
    """Feed the input through ``B`` before ``sys``: ``(F, G B, H, K B)``."""
    if B.m_fields != sys.m_fields:
        raise DimensionMismatch(f"static component has {B.m_fields} fields, system has {sys.m_fields}")
    return QuantumLinearSystem(sys.F, sys.G @ B.B, sys.H, sys.K @ B.B)


@dataclass(frozen=True)
class Decomposition:
    pr_params: PhysicalParams
    static_part: BogoliubovComponent
    reconstruction_residual: float
    m_formula_agreement: float


def _max_system_gap(a: QuantumLinearSystem, b: QuantumLinearSystem) -> float:
    return max(max_abs(x - y) for x, y in zip(a.matrices(), b.matrices()))


def decompose(p: SpecialClassParams, tol: float = DECOMPOSITION_TOL) -> Decomposition:
    """Split the reduced model into a realizable system preceded by a static squeezer.

    The realizable part has ``Theta = J``, ``M = M~``, ``N = N~`` and
    ``S = I``; the static part is ``K~``.  ``M~`` is computed twice, from the
    closed-form nine-term expression and as ``iJ(F0 + 1/2 J N~^dag J N~)``;
    disagreement beyond ``tol`` raises :class:`InternalInconsistency`.
    """
    pc = _pieces(p)
    agreement = max_abs(pc.M_tilde - pc.M_tilde_alt)
    if not agreement < tol:
        raise InternalInconsistency(f"the two Hamiltonian-matrix formulas disagree by {agreement:.3e}")
    dec, _ = _assemble_decomposition(p, pc, realize_tol=tol)
    return dec


def _assemble_decomposition(p: SpecialClassParams, pc: _Pieces, realize_tol: float):
    params = PhysicalParams(
        M=_contract_result(pc.M_tilde, "M~"), N=_contract_result(pc.N_tilde, "N~"), S=np.eye(p.m_fields)
    )
    static = BogoliubovComponent(_contract_result(pc.K_tilde, "K~"))
    reduced = QuantumLinearSystem(*(_contract_result(a, n) for a, n in zip(pc[:4], ("F0", "G0", "H0", "K0"))))
    rebuilt = series_with_static(realize(params, realize_tol), static)
    agreement = max_abs(pc.M_tilde - pc.M_tilde_alt)
    return Decomposition(params, static, _max_system_gap(rebuilt, reduced), agreement), reduced


@dataclass(frozen=True)
class DecompositionReport:
    passed: bool
    residuals: dict[str, float]
    decomposition: Decomposition


def verify_decomposition(p: SpecialClassParams, tol: float = DECOMPOSITION_TOL) -> DecompositionReport:
    """Check every identity behind the decomposition and report each residual.

    Residuals: ``M_hermitian`` and ``M_doubled`` for ``M~``; ``N_doubled`` and
    ``K_doubled`` (the Sigma-symmetry of ``N~``, ``K~``); ``K_bogoliubov``;
    ``series_reconstruction`` (realizable part after ``K~`` versus the reduced
    model); ``G_identity`` (``|G0 + J N~^dag J K~|``) and
    ``M_formula_agreement``.
    """
    pc = _pieces(p)
    dec, _ = _assemble_decomposition(p, pc, realize_tol=math.inf)
    J1, Jm = J_matrix(p.n_slow), J_matrix(p.m_fields)
    residuals = {
        "M_hermitian": hermitian_residual(pc.M_tilde),
        "M_doubled": doubled_residual(pc.M_tilde),
        "N_doubled": doubled_residual(pc.N_tilde),
        "K_doubled": doubled_residual(pc.K_tilde),
        "K_bogoliubov": bogoliubov_residual(dec.static_part.B),
        "series_reconstruction": dec.reconstruction_residual,
        "G_identity": max_abs(pc.G0 + J1 @ dagger(pc.N_tilde) @ Jm @ pc.K_tilde),
        "M_formula_agreement": dec.m_formula_agreement,
    }
    return DecompositionReport(all(r < tol for r in residuals.values()), residuals, dec)
