from __future__ import annotations

import math

import numpy as np
import pytest

import qsr.special_class as special_class
from qsr.cavity import CavitySqueezerParams, build_perturbed, special_params
from qsr.doubled import DoubledMatrix, J, max_abs, unitary_residual
from qsr.errors import DimensionMismatch, InternalInconsistency, SingularFastDynamics, StructureViolation
from qsr.perturbation import assemble, reduce
from qsr.random_models import random_doubled, random_hermitian_doubled, random_unitary, special_suite
from qsr.special_class import (
    BogoliubovComponent,
    SpecialClassParams,
    decompose,
    is_bogoliubov,
    reduce_special,
    series_with_static,
    to_perturbed,
    validate_params,
    verify_decomposition,
)
from qsr.system import QuantumLinearSystem, jj_unitarity_check, realize


def dims(p: SpecialClassParams) -> str:
    return f"n{p.n_slow}-{p.n_fast}-m{p.m_fields}"


SQUEEZED_K = np.array([[-5 / 3, 4 / 3], [4 / 3, -5 / 3]])


def zero_params(n1=1, n2=1, m=1) -> SpecialClassParams:
    z = DoubledMatrix.zeros
    return SpecialClassParams(z(n1, n1), z(n1, n2), z(n2, n1), z(n2, n2), z(m, n1), z(m, n2), np.eye(m))


def uncoupled_fast_params(rng, n1=2, n2=1, m=1) -> SpecialClassParams:
    """Fast modes with no field coupling (Nb = 0) and an invertible Md."""
    Mb = random_doubled(rng, n1, n2)
    Md = random_hermitian_doubled(rng, n2)
    Md = DoubledMatrix(Md.r1 + 3 * np.eye(n2), Md.r2)
    return SpecialClassParams(
        Ma=random_hermitian_doubled(rng, n1),
        Mb=Mb,
        Mc=Mb.dagger(),
        Md=Md,
        Na=random_doubled(rng, m, n1),
        Nb=DoubledMatrix.zeros(m, n2),
        S=random_unitary(rng, m),
    )


class TestValidate:
    def test_zero_params(self):
        report = validate_params(zero_params())
        assert report.passed
        assert all(r == 0 for r in report.residuals.values())

    def test_pure_squeezing_fast_hamiltonian(self):
        p = zero_params()
        Md = DoubledMatrix([[0]], [[1j]])
        np.testing.assert_array_equal(Md.expand(), [[0, 1j], [-1j, 0]])
        report = validate_params(SpecialClassParams(p.Ma, p.Mb, p.Mc, Md, p.Na, p.Nb, p.S))
        assert report.passed

    def test_mismatched_cross_terms(self, rng):
        p = special_suite(1, base_seed=3)[0]
        r1 = p.Mc.r1.copy()
        r1[0, 0] += 1
        bad = SpecialClassParams(p.Ma, p.Mb, DoubledMatrix(r1, p.Mc.r2), p.Md, p.Na, p.Nb, p.S)
        report = validate_params(bad)
        assert not report.passed
        assert report.residuals["Mc_minus_Mb_dagger"] == pytest.approx(1.0)
        with pytest.raises(StructureViolation):
            to_perturbed(bad)

    def test_dimension_mismatch(self):
        p = zero_params()
        with pytest.raises(DimensionMismatch):
            SpecialClassParams(p.Ma, p.Mb, p.Mc, p.Md, p.Na, DoubledMatrix.zeros(2, 1), p.S)


class TestToPerturbed:
    def test_zero_params(self):
        ps = to_perturbed(zero_params())
        for name, block in ps.blocks().items():
            if name != "K":
                assert max_abs(block.expand()) == 0
        np.testing.assert_array_equal(ps.K.expand(), np.eye(2))

    @pytest.mark.parametrize("k1, k2, gamma, chi", [(1, 1, 2, 0.5), (1, 2, 1, 0.3 + 0.2j), (0.5, 4, 3, -1j)])
    def test_cavity_fast_blocks(self, k1, k2, gamma, chi):
        ps = to_perturbed(special_params(CavitySqueezerParams(k1, k2, gamma, chi)))
        np.testing.assert_allclose(
            ps.Fd.expand(), [[-gamma / 2, -chi], [-np.conj(chi), -gamma / 2]], atol=1e-14
        )
        np.testing.assert_allclose(ps.Gb.expand(), -math.sqrt(gamma) * np.eye(2), atol=1e-14)
        np.testing.assert_allclose(ps.Hb.expand(), math.sqrt(gamma) * np.eye(2), atol=1e-14)

    @pytest.mark.parametrize("p", special_suite(count=4, base_seed=40), ids=dims)
    def test_full_system_realizable_for_every_eps(self, p):
        ps = to_perturbed(p)
        for eps in (1.0, 0.1, 1e-3):
            assert jj_unitarity_check(assemble(ps, eps)).residual < 1e-8


class TestReduceSpecial:
    @pytest.mark.parametrize("seed", range(4))
    def test_uncoupled_fast_closed_form(self, seed):
        p = uncoupled_fast_params(np.random.default_rng(seed))
        Ma, Mb, Mc, Md, Na = (getattr(p, k).expand() for k in ("Ma", "Mb", "Mc", "Md", "Na"))
        J1, Jm = J(p.n_slow), J(p.m_fields)
        K = DoubledMatrix.diag(p.S).expand()
        F0 = -J1 @ (1j * Ma + 0.5 * Na.conj().T @ Jm @ Na) + J1 @ (1j * Mb) @ np.linalg.inv(1j * Md) @ (1j * Mc)
        red = reduce_special(p)
        np.testing.assert_allclose(red.F.expand(), F0, atol=1e-12)
        np.testing.assert_allclose(red.G.expand(), -J1 @ Na.conj().T @ Jm @ K, atol=1e-12)
        np.testing.assert_allclose(red.H.expand(), Na, atol=1e-12)
        np.testing.assert_allclose(red.K.expand(), K, atol=1e-12)

    def test_cavity_unit_couplings(self):
        red = reduce_special(special_params(CavitySqueezerParams(1, 1, 1, 0)))
        for a in red.matrices()[:3]:
            np.testing.assert_allclose(a, 0, atol=1e-14)
        np.testing.assert_allclose(red.K.expand(), -np.eye(2), atol=1e-14)

    @pytest.mark.parametrize("p", special_suite(count=12, base_seed=100), ids=dims)
    def test_agrees_with_general_reduction(self, p):
        direct, general = reduce_special(p), reduce(to_perturbed(p))
        for a, b in zip(direct.matrices(), general.matrices()):
            assert max_abs(a - b) < 1e-10
        assert jj_unitarity_check(direct).residual < 1e-8

    def test_singular_fast_dynamics(self):
        with pytest.raises(SingularFastDynamics):
            reduce_special(special_params(CavitySqueezerParams(1, 1, 2, 1)))


class TestBogoliubov:
    @pytest.mark.parametrize(
        "B, passed, residual",
        [
            (DoubledMatrix.identity(1), True, 0.0),
            (DoubledMatrix([[math.cosh(1)]], [[math.sinh(1)]]), True, None),
            (DoubledMatrix.identity(1).scaled(2.0), False, 3.0),
        ],
    )
    def test_examples(self, B, passed, residual):
        check = is_bogoliubov(B)
        assert check.passed is passed
        if residual is not None:
            assert check.residual == pytest.approx(residual, abs=1e-14)

    def test_component_rejects_amplifier(self):
        with pytest.raises(StructureViolation):
            BogoliubovComponent(DoubledMatrix.identity(1).scaled(2.0))

    def test_non_square_rejected(self):
        with pytest.raises(DimensionMismatch):
            is_bogoliubov(DoubledMatrix.zeros(1, 2))


class TestSeries:
    def test_identity_leaves_system(self, damped_cavity):
        sys = realize(damped_cavity)
        assert series_with_static(sys, BogoliubovComponent(DoubledMatrix.identity(1))) == sys

    def test_field_count_mismatch(self, damped_cavity):
        with pytest.raises(DimensionMismatch):
            series_with_static(realize(damped_cavity), BogoliubovComponent(DoubledMatrix.identity(2)))


class TestDecompose:
    def test_all_zero_params_are_singular(self):
        with pytest.raises(SingularFastDynamics):
            decompose(zero_params())

    @pytest.mark.parametrize("seed", range(4))
    def test_uncoupled_fast_closed_form(self, seed):
        p = uncoupled_fast_params(np.random.default_rng(seed))
        dec = decompose(p)
        Ma, Mb, Mc, Md = (getattr(p, k).expand() for k in ("Ma", "Mb", "Mc", "Md"))
        np.testing.assert_allclose(dec.pr_params.M.expand(), Ma - Mb @ np.linalg.solve(Md, Mc), atol=1e-12)
        np.testing.assert_allclose(dec.pr_params.N.expand(), p.Na.expand(), atol=1e-12)
        K = dec.static_part.B
        np.testing.assert_allclose(K.expand(), DoubledMatrix.diag(p.S).expand(), atol=1e-12)
        # scattering and Bogoliubov at once
        assert max_abs(K.r2) < 1e-12 and unitary_residual(K.r1) < 1e-12
        assert is_bogoliubov(K).passed

    def test_cavity_all_pass(self):
        p = special_params(CavitySqueezerParams(1, 4, 1, 0))
        dec = decompose(p)
        np.testing.assert_allclose(dec.pr_params.M.expand(), 0, atol=1e-14)
        np.testing.assert_allclose(dec.pr_params.N.expand(), -np.eye(2), atol=1e-14)
        np.testing.assert_allclose(dec.static_part.B.expand(), -np.eye(2), atol=1e-14)
        rebuilt = series_with_static(realize(dec.pr_params), dec.static_part)
        F, G, H, K = rebuilt.matrices()
        np.testing.assert_allclose(F, -0.5 * np.eye(2), atol=1e-14)
        for a in (G, H, K):
            np.testing.assert_allclose(a, -np.eye(2), atol=1e-14)
        for a, b in zip(rebuilt.matrices(), reduce_special(p).matrices()):
            np.testing.assert_allclose(a, b, atol=1e-14)

    def test_cavity_squeezing(self):
        dec = decompose(special_params(CavitySqueezerParams(1, 1, 2, 0.5)))
        B = dec.static_part.B
        np.testing.assert_allclose(B.expand(), SQUEEZED_K, atol=1e-12)
        assert abs(B.r1[0, 0]) ** 2 - abs(B.r2[0, 0]) ** 2 == pytest.approx(1.0, abs=1e-12)
        assert max_abs(B.r2) > 1  # genuinely non-unitary

    def test_detuned_idle_fast_mode(self):
        # all couplings zero; the fast mode only needs a nonzero frequency so that D is invertible
        p = zero_params()
        p = SpecialClassParams(p.Ma, p.Mb, p.Mc, DoubledMatrix.identity(1), p.Na, p.Nb, p.S)
        report = verify_decomposition(p)
        assert report.passed
        assert all(r == 0 for r in report.residuals.values())
        dec = report.decomposition
        zero_sys = realize(dec.pr_params)
        assert all(max_abs(a) == 0 for a in zero_sys.matrices()[:3])
        assert dec.static_part == BogoliubovComponent(DoubledMatrix.identity(1))

    @pytest.mark.parametrize("p", special_suite(count=12, base_seed=200), ids=dims)
    def test_random_residuals(self, p):
        report = verify_decomposition(p)
        assert report.passed, report.residuals
        assert set(report.residuals) == {
            "M_hermitian", "M_doubled", "N_doubled", "K_doubled", "K_bogoliubov",
            "series_reconstruction", "G_identity", "M_formula_agreement",
        }

    def test_formula_disagreement_is_an_internal_error(self, monkeypatch):
        original = special_class._pieces

        def corrupted(p):
            pc = original(p)
            return pc._replace(M_tilde=pc.M_tilde + 1e-3)

        monkeypatch.setattr(special_class, "_pieces", corrupted)
        with pytest.raises(InternalInconsistency):
            decompose(special_params(CavitySqueezerParams(1, 4, 1, 0)))


def test_special_params_match_perturbed_example():
    p = CavitySqueezerParams(1.5, 0.7, 1.3, 0.2 - 0.1j)
    ps, ref = to_perturbed(special_params(p)), build_perturbed(p)
    for name, block in ps.blocks().items():
        assert max_abs(block.expand() - ref.blocks()[name].expand()) < 1e-13


def test_static_system_roundtrip():
    sys = QuantumLinearSystem(
        DoubledMatrix.identity(1).scaled(-1.0), DoubledMatrix.zeros(1, 1), DoubledMatrix.zeros(1, 1), DoubledMatrix.identity(1)
    )
    assert series_with_static(sys, BogoliubovComponent(DoubledMatrix([[math.cosh(0.5)]], [[math.sinh(0.5)]]))).K.r2[0, 0] == pytest.approx(
        math.sinh(0.5)
    )
