"""Singular perturbation of linear quantum systems.

A :class:`PerturbedSystem` holds a slow state ``a1`` and a fast state ``a2``
whose dynamics are sped up by ``1/eps``::

    d[a1; a1#]     = Fa x1 + Fb x2 + Ga du
    eps d[a2; a2#] = Fc x1 + Fd x2 + Gb du
    dy             = Ha x1 + Hb x2 + K du

Setting ``eps = 0`` and solving the fast equation algebraically (adiabatic
elimination) gives the reduced model returned by :func:`reduce`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .doubled import ComplexArray, DoubledMatrix, join_blocks, max_abs
from .errors import DimensionMismatch, InvalidParameter, SingularFastDynamics
from .system import QuantumLinearSystem, _contract_result, _resolvent_solve, evaluate_transfer, transfer_function

# Fd is rejected when its reciprocal condition number is at or below this.
FAST_RCOND = 1e-12

EXACT = "exact"

_BLOCKS = ("Fa", "Fb", "Fc", "Fd", "Ga", "Gb", "Ha", "Hb", "K")


@dataclass(frozen=True, eq=False)
class PerturbedSystem:
    Fa: DoubledMatrix
    Fb: DoubledMatrix
    Fc: DoubledMatrix
    Fd: DoubledMatrix
    Ga: DoubledMatrix
    Gb: DoubledMatrix
    Ha: DoubledMatrix
    Hb: DoubledMatrix
    K: DoubledMatrix

    def __post_init__(self):
        n1, n2, m = self.Fa.half_rows, self.Fd.half_rows, self.K.half_rows
        expected = {
            "Fa": (n1, n1), "Fb": (n1, n2), "Fc": (n2, n1), "Fd": (n2, n2),
            "Ga": (n1, m), "Gb": (n2, m), "Ha": (m, n1), "Hb": (m, n2), "K": (m, m),
        }
        for name, shape in expected.items():
            block = getattr(self, name)
            if not isinstance(block, DoubledMatrix):
                raise TypeError(f"{name} must be a DoubledMatrix, got {type(block).__name__}")
            if (block.half_rows, block.half_cols) != shape:
                raise DimensionMismatch(
                    f"{name} has half-shape {(block.half_rows, block.half_cols)}, expected {shape}"
                )

    @property
    def n_slow(self) -> int:
        return self.Fa.half_rows

    @property
    def n_fast(self) -> int:
        return self.Fd.half_rows

    @property
    def m_fields(self) -> int:
        return self.K.half_rows

    def blocks(self) -> dict[str, DoubledMatrix]:
        return {name: getattr(self, name) for name in _BLOCKS}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PerturbedSystem):
            return NotImplemented
        return all(getattr(self, k) == getattr(other, k) for k in _BLOCKS)


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (eps > 0 and math.isfinite(eps)):
        raise InvalidParameter(f"eps must be a positive finite number, got {eps}")
    return eps


def assemble(ps: PerturbedSystem, eps: float) -> QuantumLinearSystem:
    """Full system at a given ``eps > 0`` in the canonical ``[a1; a2; a1#; a2#]`` layout."""
    eps = _check_eps(eps)
    inv = 1.0 / eps
    return QuantumLinearSystem(
        F=join_blocks([[ps.Fa, ps.Fb], [ps.Fc.scaled(inv), ps.Fd.scaled(inv)]]),
        G=join_blocks([[ps.Ga], [ps.Gb.scaled(inv)]]),
        H=join_blocks([[ps.Ha, ps.Hb]]),
        K=ps.K,
    )


def assemble_blocks(ps: PerturbedSystem, eps: float) -> tuple[ComplexArray, ...]:
    """Full ``(F, G, H, K)`` arrays in the ``[a1; a1#; a2; a2#]`` (slow-then-fast) layout.

    The state ordering differs from :func:`assemble` by a permutation, so the
    transfer functions of the two must coincide.
    """
    eps = _check_eps(eps)
    x = {k: v.expand() for k, v in ps.blocks().items()}
    F = np.block([[x["Fa"], x["Fb"]], [x["Fc"] / eps, x["Fd"] / eps]])
    G = np.vstack([x["Ga"], x["Gb"] / eps])
    H = np.hstack([x["Ha"], x["Hb"]])
    return F, G, H, x["K"]


class _FastSolver:
    """Conditioning-checked ``Fd`` shared by the reduction formulas."""

    def __init__(self, Fd: np.ndarray):
        svals = np.linalg.svd(Fd, compute_uv=False)
        self.rcond = float(svals[-1] / svals[0]) if svals[0] > 0 else 0.0
        if not self.rcond > FAST_RCOND:
            raise SingularFastDynamics(
                f"fast block Fd is singular (reciprocal condition {self.rcond:.2e})", rcond=self.rcond
            )
        self._Fd = Fd

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return np.linalg.solve(self._Fd, rhs)


def _reduced_arrays(ps: PerturbedSystem):
    x = {k: v.expand() for k, v in ps.blocks().items()}
    fast = _FastSolver(x["Fd"])
    FdFc = fast.solve(x["Fc"])
    FdGb = fast.solve(x["Gb"])
    F0 = x["Fa"] - x["Fb"] @ FdFc
    G0 = x["Ga"] - x["Fb"] @ FdGb
    H0 = x["Ha"] - x["Hb"] @ FdFc
    K0 = x["K"] - x["Hb"] @ FdGb
    return x, fast, (F0, G0, H0, K0)


def reduce(ps: PerturbedSystem) -> QuantumLinearSystem:
    """Schur-complement reduction obtained by setting ``eps = 0``.

    ``F0 = Fa - Fb Fd^-1 Fc``, ``G0 = Ga - Fb Fd^-1 Gb``,
    ``H0 = Ha - Hb Fd^-1 Fc``, ``K0 = K - Hb Fd^-1 Gb``.
    """
    _, _, reduced = _reduced_arrays(ps)
    return QuantumLinearSystem(*(_contract_result(a, name) for a, name in zip(reduced, ("F0", "G0", "H0", "K0"))))


def first_order_term(ps: PerturbedSystem, s: complex) -> ComplexArray:
    """Coefficient ``L(s)`` of ``eps`` in ``Phi_eps(s) = Phi_0(s) + eps L(s) + O(eps^2)``.

    ``L(s) = -s (H0 (sI-F0)^-1 Fb + Hb) Fd^-2 (Fc (sI-F0)^-1 G0 + Gb)``,
    from expanding ``(eps s - Fd)^-1 = -Fd^-1 - eps s Fd^-2 + O(eps^2)`` in
    the fast equation.
    """
    s = complex(s)
    x, fast, (F0, G0, H0, _) = _reduced_arrays(ps)
    left = H0 @ _resolvent_solve(F0, s, x["Fb"]) + x["Hb"]
    right = x["Fc"] @ _resolvent_solve(F0, s, G0) + x["Gb"]
    return -s * left @ fast.solve(fast.solve(right))


def _residual_pair(ps: PerturbedSystem, reduced: QuantumLinearSystem, L: np.ndarray, eps: float, s: complex):
    phi_eps = evaluate_transfer(*assemble_blocks(ps, eps), s)
    gap = phi_eps - transfer_function(reduced, s)
    return max_abs(gap), max_abs(gap - eps * L)


def expansion_residual(ps: PerturbedSystem, eps: float, s: complex, *, corrected: bool = True) -> float:
    """``|Phi_eps(s) - Phi_0(s) - eps L(s)|_max``; with ``corrected=False`` the ``eps L`` term is dropped."""
    eps = _check_eps(eps)
    raw, corr = _residual_pair(ps, reduce(ps), first_order_term(ps, s), eps, complex(s))
    return corr if corrected else raw


@dataclass(frozen=True)
class ConvergenceRow:
    eps: float
    residual: float
    order: float | str | None
    raw_residual: float
    raw_order: float | str | None


def _local_order(r_prev: float, r: float, e_prev: float, e: float, floor: float) -> float | str:
    if r_prev <= floor and r <= floor:
        return EXACT
    if r_prev <= 0 or r <= 0:
        return math.nan
    return math.log(r / r_prev) / math.log(e / e_prev)


def convergence_probe(ps: PerturbedSystem, s: complex, eps_list: Sequence[float]) -> list[ConvergenceRow]:
    """Residual table over a decreasing ``eps`` sweep with local convergence orders.

    ``order`` is the empirical exponent of the first-order-corrected residual
    between consecutive rows (about 2 when the expansion is right), and
    ``raw_order`` the same for ``|Phi_eps - Phi_0|`` (about 1).  The first row
    has no order.  When both residuals of a pair are at rounding level the
    order is the string ``"exact"``.
    """
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 2:
        raise InvalidParameter("convergence_probe needs at least two eps values")
    for e in eps_list:
        _check_eps(e)
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise InvalidParameter(f"eps values must be strictly decreasing, got {eps_list}")
    s = complex(s)
    reduced = reduce(ps)
    L = first_order_term(ps, s)
    floor = 1e-13 * max(1.0, max_abs(transfer_function(reduced, s)))

    rows: list[ConvergenceRow] = []
    for k, eps in enumerate(eps_list):
        raw, corr = _residual_pair(ps, reduced, L, eps, s)
        if k == 0:
            order = raw_order = None
        else:
            prev = rows[-1]
            order = _local_order(prev.residual, corr, prev.eps, eps, floor)
            raw_order = _local_order(prev.raw_residual, raw, prev.eps, eps, floor)
        rows.append(ConvergenceRow(eps, corr, order, raw, raw_order))
    return rows
