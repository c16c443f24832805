"""Generators: geometric family, two-block family, randoms, controls."""

import numpy as np
import pytest

from sepfactory import (
    GeneratorSpec,
    Prng,
    assemble_factor,
    blocks,
    check_state,
    example1_state,
    example2_state,
    generate,
    geometric_tail,
    is_ppt,
    maximally_entangled,
    npt_witness,
    op_norm,
    partial_trace,
    partial_transpose,
    qubit_pathway,
    random_density,
    random_semi_ssppt,
    verify_semi_ssppt,
)
from sepfactory.errors import NormalityFailed, NotContraction

from conftest import fro, hermitize, random_psd


class TestExample1:
    @pytest.mark.parametrize("n,db,seed", [
        (1, 2, 0), (2, 2, 1), (3, 2, 7), (3, 4, 4), (5, 3, 9), (8, 2, 2),
    ])
    def test_unit_factor_mass(self, n, db, seed):
        _, cert = example1_state(n, db, seed=seed)
        assert abs(sum(cert.row_norms) - 1.0) <= 1e-12
        # independent path: trace of the assembled factor Gram
        x = assemble_factor(cert)
        assert abs(np.trace(x.conj().T @ x).real - 1.0) <= 1e-12

    def test_geometric_tail_closed_form(self):
        for i in range(1, 21):
            total = 0.0
            j = i + 1
            while True:
                term = 0.25**j
                if total + term == total:
                    break
                total += term
                j += 1
            assert abs(total - geometric_tail(i)) <= 1e-15
            assert abs(geometric_tail(i) - 0.25**i / 3.0) <= 1e-18

    def test_finite_tail_matches_partial_sum(self):
        for i, n in [(1, 3), (2, 5), (3, 4)]:
            direct = sum(0.25**j for j in range(i + 1, n + 1))
            assert abs(geometric_tail(i, n) - direct) <= 1e-16

    def test_single_row(self):
        rho, cert = example1_state(1, 3, seed=5)
        assert cert.s_ops == {}
        assert check_state(rho, tol=1e-10).verdict == "valid_state"

    def test_certificate_verifies(self):
        for n, db, seed in [(2, 3, 11), (4, 2, 12), (3, 3, 13)]:
            _, cert = example1_state(n, db, seed=seed)
            assert verify_semi_ssppt(cert, tol=1e-10).verdict

    def test_coefficients_are_scaled_powers(self):
        _, cert = example1_state(4, 2, seed=8)
        for i in range(1, 4):
            s_i = cert.s_ops[(i, i + 1)] * 2.0 ** (i + 1)
            for j in range(i + 1, 5):
                np.testing.assert_allclose(
                    cert.s_ops[(i, j)], s_i * 0.5**j, atol=1e-15
                )

    def test_geometric_mode_trace_deficit(self):
        # with the fixed coefficient mass 9/2 per row, the finite-row factor
        # mass has closed form 1 - 4^-n (3n + 1) / 2
        for n in (2, 3, 5, 8):
            _, cert = example1_state(n, 2, seed=3, mode="geometric")
            predicted = 1.0 - 0.25**n * (3 * n + 1) / 2.0
            assert abs(sum(cert.row_norms) - predicted) <= 1e-12

    def test_determinism(self):
        a, ca = example1_state(3, 2, seed=42)
        b, cb = example1_state(3, 2, seed=42)
        assert a.matrix.tobytes() == b.matrix.tobytes()
        for key in ca.s_ops:
            assert ca.s_ops[key].tobytes() == cb.s_ops[key].tobytes()

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            example1_state(2, 2, seed=0, mode="nope")

    def test_degenerate_draw_exhausts_retries(self):
        from sepfactory.errors import DegenerateDraw
        from sepfactory.generators import _draw_until

        with pytest.raises(DegenerateDraw):
            _draw_until(lambda: 0.0, lambda x: x != 0.0, attempts=5)


class TestExample2:
    def test_zero_coupling(self):
        r11 = random_psd(200, 3)
        z = np.zeros((3, 3), dtype=complex)
        rho = example2_state(r11, z, z)
        expected = np.zeros((6, 6), dtype=complex)
        expected[:3, :3] = r11 / np.trace(r11).real
        np.testing.assert_allclose(rho.matrix, expected, atol=1e-14)

    def test_identity_contractions_equal_blocks(self):
        d = 3
        eye = np.eye(d, dtype=complex)
        rho = example2_state(eye / d, eye, eye)
        grid = blocks(rho, "A")
        np.testing.assert_allclose(grid[0][0], grid[1][1], atol=1e-14)
        np.testing.assert_allclose(grid[0][0], eye / (2 * d), atol=1e-14)

    def test_block_ordering_invariant(self):
        for seed in range(12):
            rng = Prng(600 + seed)
            db = 2 + seed % 3
            r11 = random_psd(700 + seed, db)
            d_op = rng.complex_matrix(db, db)
            d_op /= op_norm(d_op)
            t_op = rng.complex_matrix(db, db)
            t_op /= op_norm(t_op)
            rho = example2_state(r11, d_op, t_op)
            assert check_state(rho, tol=1e-10).verdict == "valid_state"
            grid = blocks(rho, "A")
            diff = hermitize(grid[0][0] - grid[1][1])
            assert np.linalg.eigvalsh(diff)[0] >= -1e-10

    def test_not_contraction(self):
        r11 = random_psd(201, 2)
        big = 1.5 * np.eye(2, dtype=complex)
        with pytest.raises(NotContraction):
            example2_state(r11, big, np.eye(2, dtype=complex))

    def test_marginal_norm_clipped(self):
        r11 = random_psd(202, 2)
        d = (1.0 + 5e-13) * np.eye(2, dtype=complex)
        rho = example2_state(r11, d, d)
        assert check_state(rho, tol=1e-10).verdict == "valid_state"

    def test_base_block_must_be_psd(self):
        from sepfactory.errors import NotPSD

        bad = np.diag([1.0, -1.0]).astype(complex)
        with pytest.raises(NotPSD):
            example2_state(bad, np.eye(2, dtype=complex),
                           np.eye(2, dtype=complex))

    def test_generic_contractions_make_entangled_states_seed29(self):
        # the two-block family with free contractions leaves the separable
        # cone: this instance carries a strict witness and the block-ordering
        # pathway refuses it on the normality check
        rng = Prng(29)
        g = rng.complex_matrix(3, 3)
        r11 = g @ g.conj().T
        d_op = rng.complex_matrix(3, 3)
        d_op /= op_norm(d_op)
        t_op = rng.complex_matrix(3, 3)
        t_op /= op_norm(t_op)
        rho = example2_state(r11, d_op, t_op)
        assert check_state(rho, tol=1e-10).verdict == "valid_state"
        with pytest.raises(NormalityFailed):
            qubit_pathway(rho, seed=29)
        report = npt_witness(rho, tol=1e-9)
        assert report is not None
        assert report.value_on_target < -1e-3


class TestRandomSemiSsppt:
    def test_verifies_by_construction(self):
        for seed in (0, 1, 99, 12345):
            _, cert = random_semi_ssppt(3, 3, seed=seed)
            assert verify_semi_ssppt(cert, tol=1e-10).verdict

    def test_is_ppt(self):
        for seed in range(6):
            rho, _ = random_semi_ssppt(2 + seed % 3, 2 + seed % 2, seed=seed)
            flag, _, _ = is_ppt(rho, 1e-9)
            assert flag

    def test_dim_a_one(self):
        rho, cert = random_semi_ssppt(1, 4, seed=3)
        assert cert.s_ops == {}
        assert check_state(rho, tol=1e-10).verdict == "valid_state"

    def test_determinism(self):
        a, _ = random_semi_ssppt(3, 2, seed=8)
        b, _ = random_semi_ssppt(3, 2, seed=8)
        assert a.matrix.tobytes() == b.matrix.tobytes()

    def test_well_conditioned_diagonal_operators(self):
        _, cert = random_semi_ssppt(3, 4, seed=9, well_conditioned=True)
        for x in cert.x_ops:
            s = np.linalg.svd(x, compute_uv=False)
            assert s[-1] / s[0] > 0.2


class TestMaximallyEntangled:
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_rank_one_unit_trace(self, d):
        rho = maximally_entangled(d)
        assert abs(np.trace(rho.matrix) - 1.0) <= 1e-14
        eigs = np.linalg.eigvalsh(rho.matrix)
        assert abs(eigs[-1] - 1.0) <= 1e-12
        assert np.all(np.abs(eigs[:-1]) <= 1e-12)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_marginals_maximally_mixed(self, d):
        rho = maximally_entangled(d)
        for side in ("A", "B"):
            np.testing.assert_allclose(
                partial_trace(rho, side), np.eye(d) / d, atol=1e-14
            )

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_negative_partial_transpose(self, d):
        rho = maximally_entangled(d)
        flag, ta, tb = is_ppt(rho, 1e-9)
        assert not flag
        assert abs(ta + 1.0 / d) <= 1e-10
        assert abs(tb + 1.0 / d) <= 1e-10
        # independent oracle
        lap = np.linalg.eigvalsh(partial_transpose(rho, "B").matrix)[0]
        assert abs(lap + 1.0 / d) <= 1e-12


class TestRandomDensity:
    def test_valid_state(self):
        rho = random_density(2, 3, 0, seed=4)
        assert check_state(rho, tol=1e-10).verdict == "valid_state"

    def test_rank_control(self):
        rho = random_density(2, 2, 1, seed=5)
        eigs = np.linalg.eigvalsh(rho.matrix)
        assert np.sum(eigs > 1e-10) == 1


class TestGenerateDispatch:
    def test_example1(self):
        rho, cert, meta = generate(GeneratorSpec("example1", n=2, dim_b=2, seed=1))
        assert cert is not None
        assert meta["kind"] == "example1"
        assert (rho.dim_a, rho.dim_b) == (2, 2)

    def test_example2(self):
        rho, cert, meta = generate(GeneratorSpec("example2", dim_b=3, seed=2))
        assert cert is None
        assert (rho.dim_a, rho.dim_b) == (2, 3)

    def test_random_ssppt(self):
        rho, cert, _ = generate(
            GeneratorSpec("random_ssppt", dim_a=3, dim_b=2, seed=3)
        )
        assert verify_semi_ssppt(cert).verdict

    def test_random_density(self):
        rho, cert, _ = generate(
            GeneratorSpec("random_density", dim_a=2, dim_b=2, rank=1, seed=4)
        )
        assert cert is None

    def test_maximally_entangled(self):
        rho, _, meta = generate(GeneratorSpec("maximally_entangled", dim_a=3))
        assert (rho.dim_a, rho.dim_b) == (3, 3)
        assert meta["d"] == 3

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            generate(GeneratorSpec("nope"))
