"""Optical cavity (mode a1) coupled to a fast degenerate squeezer (mode a2).

The cavity sees the input field through two mirrors with couplings ``k1``
and ``k2``; the squeezer has coupling ``gamma`` and squeezing strength
``chi``.  There is one input field, so ``n = 2`` and ``m = 1``.

The ``(a2#, a2)`` entry of the drift matrix is ``-conj(chi)``, which is what
the doubled structure requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .doubled import ComplexArray, DoubledMatrix, max_abs, sub_block
from .errors import InvalidParameter
from .perturbation import PerturbedSystem, reduce
from .special_class import SpecialClassParams
from .system import QuantumLinearSystem, extract_canonical_params


@dataclass(frozen=True)
class CavitySqueezerParams:
    """Couplings ``k1, k2 >= 0``, squeezer coupling ``gamma > 0`` and squeezing ``chi``.

    In the perturbed family ``gamma`` and ``chi`` are the rescaled values,
    so that the physical squeezer runs at ``gamma/eps`` and ``chi/eps``.
    """

    k1: float
    k2: float
    gamma: float
    chi: complex = 0j

    def __post_init__(self):
        for name in ("k1", "k2", "gamma"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParameter(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.k1 < 0 or self.k2 < 0:
            raise InvalidParameter(f"couplings must be non-negative, got k1={self.k1}, k2={self.k2}")
        if not self.gamma > 0:
            raise InvalidParameter(f"gamma must be positive, got {self.gamma}")
        chi = complex(self.chi)
        if not (math.isfinite(chi.real) and math.isfinite(chi.imag)):
            raise InvalidParameter(f"chi must be finite, got {chi}")
        object.__setattr__(self, "chi", chi)

    @property
    def mirror_sum(self) -> float:
        return math.sqrt(self.k1) + math.sqrt(self.k2)

    def at_eps(self, eps: float) -> CavitySqueezerParams:
        """Physical parameters ``gamma/eps``, ``chi/eps`` of the rescaled family."""
        if not eps > 0:
            raise InvalidParameter(f"eps must be positive, got {eps}")
        return CavitySqueezerParams(self.k1, self.k2, self.gamma / eps, self.chi / eps)


def build_full(p: CavitySqueezerParams) -> QuantumLinearSystem:
    s, g = p.mirror_sum, p.gamma
    F = DoubledMatrix(
        [[-0.5 * s**2, -math.sqrt(p.k1 * g)], [-math.sqrt(p.k2 * g), -0.5 * g]],
        [[0, 0], [0, -p.chi]],
    )
    G = DoubledMatrix([[-s], [-math.sqrt(g)]], np.zeros((2, 1)))
    H = DoubledMatrix([[s, math.sqrt(g)]], np.zeros((1, 2)))
    return QuantumLinearSystem(F, G, H, DoubledMatrix.identity(1))


def build_perturbed(p: CavitySqueezerParams) -> PerturbedSystem:
    """Slow cavity / fast squeezer blocks, with the fast state rescaled by ``1/sqrt(eps)``."""
    s, g = p.mirror_sum, p.gamma

    def scalar(x):
        return DoubledMatrix([[x]], [[0]])

    return PerturbedSystem(
        Fa=scalar(-0.5 * s**2),
        Fb=scalar(-math.sqrt(p.k1 * g)),
        Fc=scalar(-math.sqrt(p.k2 * g)),
        Fd=DoubledMatrix([[-0.5 * g]], [[-p.chi]]),
        Ga=scalar(-s),
        Gb=scalar(-math.sqrt(g)),
        Ha=scalar(s),
        Hb=scalar(math.sqrt(g)),
        K=DoubledMatrix.identity(1),
    )


def special_params(p: CavitySqueezerParams) -> SpecialClassParams:
    """Hamiltonian/coupling blocks of the example, recovered from :func:`build_full`.

    At ``eps = 1`` the rescaling is the identity, so the canonical ``(M, N)`` of
    the full system partitioned into cavity/squeezer blocks are exactly the
    ``eps``-free special-class blocks.
    """
    ext = extract_canonical_params(build_full(p))
    M, N = ext.params.M, ext.params.N
    slow, fast, out = slice(0, 1), slice(1, 2), slice(0, 1)
    return SpecialClassParams(
        Ma=sub_block(M, slow, slow),
        Mb=sub_block(M, slow, fast),
        Mc=sub_block(M, fast, slow),
        Md=sub_block(M, fast, fast),
        Na=sub_block(N, out, slow),
        Nb=sub_block(N, out, fast),
        S=ext.params.S,
    )


def literal_reduced_formulas(p: CavitySqueezerParams) -> dict[str, ComplexArray]:
    """Closed-form reduced matrices quoted for this example (2x2, [a1; a1#] layout).

    Kept for comparison only; they disagree with the general reduction (see
    :func:`reduced_reference`).
    """
    s, g, chi = p.mirror_sum, p.gamma, p.chi
    eye = np.eye(2)
    inv = np.linalg.inv(np.array([[g / 2, -chi], [-np.conj(chi), g / 2]]))
    return {
        "F0": -0.5 * s**2 * eye + g * math.sqrt(p.k1 * p.k2) * inv,
        "G0": -0.5 * s * eye + g * math.sqrt(p.k2) * inv,
        "H0": 0.5 * s * eye - g * math.sqrt(p.k1) * inv,
        "K0": eye - g * inv,
    }


@dataclass(frozen=True)
class ReducedReference:
    system: QuantumLinearSystem
    literal: dict[str, ComplexArray]
    discrepancy: dict[str, float]


def reduced_reference(p: CavitySqueezerParams) -> ReducedReference:
    """Reduced example model from the general Schur-complement reduction.

    ``discrepancy`` holds the max-entry gap between each reduced matrix and
    its closed-form counterpart.
    """
    system = reduce(build_perturbed(p))
    literal = literal_reduced_formulas(p)
    computed = dict(zip(("F0", "G0", "H0", "K0"), system.matrices()))
    discrepancy = {k: max_abs(computed[k] - literal[k]) for k in literal}
    return ReducedReference(system, literal, discrepancy)
