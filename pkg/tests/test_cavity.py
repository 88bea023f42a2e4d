from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from qsr.cavity import (
    CavitySqueezerParams,
    build_full,
    build_perturbed,
    literal_reduced_formulas,
    reduced_reference,
)
from qsr.doubled import max_abs
from qsr.errors import InvalidParameter, SingularFastDynamics
from qsr.perturbation import assemble
from qsr.system import (
    check_physical_realizability,
    default_samples,
    extract_canonical_params,
    jj_unitarity_check,
    transfer_function,
)

GRID = [
    CavitySqueezerParams(k1, k2, g, chi)
    for k1, k2, g, chi in itertools.product((0.5, 1.0, 4.0), (1.0, 2.0), (0.7, 2.0), (0.0, 0.2 + 0.1j))
]


def label(p: CavitySqueezerParams) -> str:
    return f"k1={p.k1:g},k2={p.k2:g},g={p.gamma:g},chi={p.chi}"


class TestParams:
    @pytest.mark.parametrize("kw", [dict(k1=-1.0), dict(k2=-0.1), dict(gamma=0.0), dict(gamma=math.nan)])
    def test_invalid(self, kw):
        args = dict(k1=1.0, k2=1.0, gamma=1.0) | kw
        with pytest.raises(InvalidParameter):
            CavitySqueezerParams(**args)

    def test_rescaling(self):
        p = CavitySqueezerParams(1, 4, 1, 0.2).at_eps(0.1)
        assert p.gamma == pytest.approx(10)
        assert p.chi == pytest.approx(2)
        with pytest.raises(InvalidParameter):
            CavitySqueezerParams(1, 4, 1).at_eps(0)


class TestBuildFull:
    def test_unit_couplings(self):
        F = build_full(CavitySqueezerParams(1, 1, 1, 0)).F.expand()
        expected = [[-2, -1, 0, 0], [-1, -0.5, 0, 0], [0, 0, -2, -1], [0, 0, -1, -0.5]]
        np.testing.assert_allclose(F, expected, atol=1e-15)

    def test_no_squeezing_separates_sectors(self):
        F = build_full(CavitySqueezerParams(2, 3, 1.5, 0)).F
        assert max_abs(F.r2) == 0

    def test_squeezing_couples_conjugate_fast_mode(self):
        chi = 0.3 - 0.4j
        F = build_full(CavitySqueezerParams(1, 1, 1, chi)).F.expand()
        assert F[1, 3] == -chi
        assert F[3, 1] == -np.conj(chi)

    @pytest.mark.parametrize("p", GRID, ids=label)
    def test_realizable(self, p):
        sys = build_full(p)
        assert extract_canonical_params(sys).hermitian_residual < 1e-10
        assert check_physical_realizability(sys).jj_unitary


class TestBuildPerturbed:
    def test_unit_couplings(self):
        ps = build_perturbed(CavitySqueezerParams(1, 1, 1, 0))
        eye = np.eye(2)
        expected = {"Fa": -2 * eye, "Fb": -eye, "Fc": -eye, "Fd": -0.5 * eye, "Ga": -2 * eye,
                    "Gb": -eye, "Ha": 2 * eye, "Hb": eye, "K": eye}
        for name, block in ps.blocks().items():
            np.testing.assert_allclose(block.expand(), expected[name], atol=1e-15)

    @pytest.mark.parametrize("p", GRID[::3], ids=label)
    @pytest.mark.parametrize("eps", [1.0, 0.2, 0.01])
    def test_rescaled_family_matches_full_model(self, p, eps):
        fam, full = assemble(build_perturbed(p), eps), build_full(p.at_eps(eps))
        for s in default_samples(full):
            assert max_abs(transfer_function(fam, s) - transfer_function(full, s)) < 1e-9


class TestReducedReference:
    def test_perfect_mirror(self):
        sys = reduced_reference(CavitySqueezerParams(1, 1, 1, 0)).system
        for s in (0.3j, 2 + 5j, 100j):
            np.testing.assert_allclose(transfer_function(sys, s), -np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("w", [0.1, 1.0, 10.0])
    def test_all_pass(self, w):
        sys = reduced_reference(CavitySqueezerParams(1, 4, 1, 0)).system
        phi = transfer_function(sys, 1j * w)
        np.testing.assert_allclose(phi, (0.5 - 1j * w) / (0.5 + 1j * w) * np.eye(2), atol=1e-14)

    def test_squeezed_feedthrough(self):
        K0 = reduced_reference(CavitySqueezerParams(1, 1, 2, 0.5)).system.K.expand()
        np.testing.assert_allclose(K0, [[-5 / 3, 4 / 3], [4 / 3, -5 / 3]], atol=1e-12)

    @pytest.mark.parametrize("p", GRID, ids=label)
    def test_reduced_model_is_realizable(self, p):
        assert jj_unitarity_check(reduced_reference(p).system).residual < 1e-8

    @pytest.mark.parametrize("p", [q for q in GRID if q.chi == 0], ids=label)
    def test_feedthrough_without_squeezing(self, p):
        np.testing.assert_allclose(reduced_reference(p).system.K.expand(), -np.eye(2), atol=1e-14)

    def test_threshold_squeezing_is_singular(self):
        with pytest.raises(SingularFastDynamics):
            reduced_reference(CavitySqueezerParams(1, 1, 2, 1))

    def test_literal_formulas_flagged(self):
        ref = reduced_reference(CavitySqueezerParams(1, 4, 1, 0))
        assert ref.discrepancy["F0"] < 1e-14
        assert ref.discrepancy["K0"] < 1e-14
        # the closed-form input and output matrices carry a spurious factor 1/2
        assert ref.discrepancy["G0"] == pytest.approx(3.5)
        assert ref.discrepancy["H0"] == pytest.approx(0.5)
        assert set(ref.literal) == set(literal_reduced_formulas(CavitySqueezerParams(1, 4, 1, 0)))

    def test_literal_feedthrough_wrong_with_squeezing(self):
        ref = reduced_reference(CavitySqueezerParams(1, 1, 2, 0.5))
        assert ref.discrepancy["K0"] == pytest.approx(8 / 3)
