import math
import random
from fractions import Fraction

import pytest

from binorms.groups import FreeWord, Heisenberg, LatticeVector, Permutation, commutator, conjugate
from binorms.norms import (
    cancellation_norm,
    free_cancellation_context,
    heisenberg_context,
    integer_line_context,
    lattice_context,
)
from binorms.pqm import (
    FeketeHypothesisError,
    FiniteOrderError,
    LimitScheme,
    PqmError,
    SubadditiveCorrection,
    WalkSpecError,
    WindowCertificateError,
    antisymmetrise,
    brooks_qm,
    c_trick_witness,
    coordinate_handle,
    defect_estimate,
    detect_undistorted,
    fekete_limit,
    forward_inequalities_check,
    generator_bound,
    homogeneity_check,
    homogenise,
    homogenised_handle,
    lipschitz_estimate,
    mcshane_extend,
    measure_constants,
    norm_handle,
    scaled_coordinate_handle,
    walk_build,
    walk_handle,
)
from binorms.sampling import all_reduced_words, element_sampler, sample_pairs

A = FreeWord.generator(2, 1)
B = FreeWord.generator(2, 2)
Z = integer_line_context()
Z2 = lattice_context(2)
F2 = free_cancellation_context(2)


def zint(n):
    return LatticeVector((n,))


class TestLimitScheme:
    def test_validation(self):
        with pytest.raises(ValueError):
            LimitScheme("plain", 4)
        with pytest.raises(ValueError):
            LimitScheme("arith", 8, k=0)
        with pytest.raises(ValueError):
            LimitScheme("fancy", 8)

    def test_indices(self):
        assert LimitScheme("plain", 8).indices() == [1, 2, 3, 4, 5, 6, 7, 8]
        assert LimitScheme("arith", 8, k=3).indices() == [3, 6, 9, 12, 15, 18, 21, 24]

    def test_parse(self):
        assert LimitScheme.parse("arith:2", 16) == LimitScheme("arith", 16, k=2)
        assert LimitScheme.parse("cesaro", 8).kind == "cesaro"


class TestDefectEstimate:
    def test_homomorphism_has_zero_defect(self):
        f = coordinate_handle(Z2)
        pairs = sample_pairs(element_sampler("lattice", dim=2, box=6), 3, 300)
        assert defect_estimate(f, pairs).value == 0

    def test_integer_norm_defect_is_two(self):
        f = norm_handle(Z)
        grid = [(zint(i), zint(j)) for i in range(-3, 4) for j in range(-3, 4)]
        est = defect_estimate(f, grid)
        assert est.value == 2
        # attained at the opposite-sign unit pair; ties break by encoding
        assert est.witness == ("[-1]", "[1]")
        delta = abs(f(zint(1)) - f(zint(0)) + f(zint(-1)))
        assert delta == 2 * min(f(zint(1)), f(zint(-1)))

    def test_brooks_defect_exhaustive_short(self):
        h_ab = brooks_qm(A * B)
        words = all_reduced_words(2, 4)
        pairs = [(g, h) for g in words for h in words]
        est = defect_estimate(h_ab, pairs)
        assert est.value == 1  # frozen: exhaustive over every reduced pair <= 4
        assert est.zero_min_violations == 0

    def test_brooks_defect_exhaustive_length_five(self):
        # the recorded regression value: every reduced pair up to length 5
        h_ab = brooks_qm(A * B)
        words = all_reduced_words(2, 5)
        est = defect_estimate(h_ab, ((g, h) for g in words for h in words))
        assert est.value == 1
        assert est.witness == ("a", "b")


class TestLipschitzEstimate:
    def test_norm_is_one_lipschitz(self):
        f = norm_handle(Z2)
        pairs = sample_pairs(element_sampler("lattice", dim=2, box=6), 5, 300)
        assert lipschitz_estimate(f, pairs).value <= 1

    def test_scaled_coordinate(self):
        f = scaled_coordinate_handle(Z, 3)
        pairs = [(zint(i), zint(j)) for i in range(-3, 4) for j in range(-3, 4)]
        assert lipschitz_estimate(f, pairs).value == 3

    def test_lipschitz_bounded_by_sigma_plus_twice_defect(self):
        # C-hat <= sigma-hat + 2 D-hat for every built-in handle
        cases = [
            (norm_handle(Z), element_sampler("lattice", dim=1, box=6), Z),
            (coordinate_handle(Z2), element_sampler("lattice", dim=2, box=6), Z2),
            (brooks_qm(A * B), element_sampler("free", rank=2, max_len=5), F2),
        ]
        for f, draw, ctx in cases:
            pairs = sample_pairs(draw, 11, 400)
            gens = ctx.generator_sample(11, 60)
            measure_constants(f, pairs, gens, seed=11)
            c_hat = lipschitz_estimate(f, pairs).value
            bound = f.measured.generator_bound_sigma + 2 * f.measured.defect_D
            assert float(c_hat) <= float(bound) + 1e-9


class TestGeneratorBound:
    def test_norm_on_generators(self):
        f = norm_handle(Z)
        assert generator_bound(f, [zint(1), zint(-1)]).value == 1

    def test_scaled(self):
        f = scaled_coordinate_handle(Z, 3)
        assert generator_bound(f, [zint(1), zint(-1)]).value == 3

    def test_brooks_on_sampled_conjugates(self):
        h_ab = brooks_qm(A * B)
        gens = [conjugate(s, y) for y in all_reduced_words(2, 3)
                for s in (A, B, A.inverse(), B.inverse())]
        assert generator_bound(h_ab, gens).value == 1  # frozen


class TestHomogenise:
    def test_norm_on_integers(self):
        res = homogenise(norm_handle(Z), zint(1), LimitScheme("plain", 16))
        assert res.estimate == 1 and res.converged

    def test_brooks_on_its_pattern(self):
        h_ab = brooks_qm(A * B)
        res = homogenise(h_ab, A * B, LimitScheme("plain", 16))
        assert res.estimate == 1 and res.converged

    def test_doubling_walk_diverges(self):
        res = homogenise(walk_handle(walk_build("doubling-blocks")), zint(1),
                         LimitScheme("plain", 2 ** 12))
        assert not res.converged
        assert float(res.limsup_est - res.liminf_est) >= 0.25

    def test_bounded_by_norm_and_subadditive(self):
        f = norm_handle(F2)
        scheme = LimitScheme("plain", 8)
        words = all_reduced_words(2, 2)
        tau = {w: float(homogenise(f, w, scheme).estimate) for w in words}
        pairs = sample_pairs(element_sampler("free", rank=2, max_len=2), 17, 60)
        # measured (C, D) for the norm handle: C <= 1, D <= 2, bound (2C + D) min
        for g, h in pairs:
            tg = tau.get(g, float(homogenise(f, g, scheme).estimate))
            assert -1e-9 <= tg <= cancellation_norm(g) + 1e-9
            th = tau.get(h, float(homogenise(f, h, scheme).estimate))
            tgh = float(homogenise(f, g * h, scheme).estimate)
            m = min(cancellation_norm(g), cancellation_norm(h))
            assert abs(tg - tgh + th) <= 4 * m + 1e-6


class TestHomogeneityCheck:
    def test_translation_length_on_integers(self):
        f_hom = homogenised_handle(norm_handle(Z), LimitScheme("arith", 8, k=1))
        residual, _ = homogeneity_check(f_hom, zint(2), [3])
        assert residual == 0

    def test_free_generator(self):
        f_hom = homogenised_handle(norm_handle(F2), LimitScheme("arith", 8, k=2))
        residual, table = homogeneity_check(f_hom, A, [2])
        assert residual == 0
        assert table[0][1] == 2  # tau(a^2) = 2

    def test_commutator_recorded_values(self):
        scheme = LimitScheme("arith", 16, k=2)
        res = homogenise(norm_handle(F2), commutator(A, B), scheme)
        # ||[a,b]^n|| = n+1 (n odd), n+2 (n even): frozen window statistics
        assert res.liminf_est == Fraction(17, 16)
        assert res.limsup_est == Fraction(10, 9)
        assert float(res.estimate) == pytest.approx(1.0828589812964813, abs=1e-12)
        f_hom = homogenised_handle(norm_handle(F2), scheme)
        residual, _ = homogeneity_check(f_hom, commutator(A, B), [2, 3])
        assert residual <= 0.17  # frozen; decays like 1/window


class TestFekete:
    def test_linear_sequence(self):
        res = fekete_limit(lambda n: 2.5 * n, SubadditiveCorrection.zero(), 256)
        assert float(res.estimate) == pytest.approx(2.5, abs=1e-12)

    def test_half_ceiling(self):
        res = fekete_limit(lambda n: (n + 1) // 2, SubadditiveCorrection.zero(), 2 ** 12)
        assert abs(float(res.estimate) - 0.5) < 1e-3

    def test_sqrt_drift(self):
        res = fekete_limit(lambda n: 3 * n + math.sqrt(n), SubadditiveCorrection.sqrt(2), 2 ** 14)
        assert abs(float(res.estimate) - 3) < 1e-2

    def test_hypothesis_violation_reports_pair(self):
        # superadditive growth violates subadditivity with zero correction
        with pytest.raises(FeketeHypothesisError) as exc:
            fekete_limit(lambda n: n * n, SubadditiveCorrection.zero(), 64)
        m, n = exc.value.pair
        assert m >= 1 and n >= 1

    def test_non_monotone_phi_rejected(self):
        bad = SubadditiveCorrection(lambda t: -t, "decreasing")
        with pytest.raises(PqmError):
            fekete_limit(lambda n: float(n), bad, 64)

    def test_integrability_witness(self):
        assert SubadditiveCorrection.sqrt(2).integrability_witness().apparently_convergent
        linear = SubadditiveCorrection(lambda t: t, "linear")
        assert not linear.integrability_witness().apparently_convergent

    def test_agrees_with_homogenisation_for_bounded_defect(self):
        h_ab = brooks_qm(A * B)
        seq = lambda n: h_ab((A * B) ** n)
        rf = fekete_limit(seq, SubadditiveCorrection.constant(2.0), 64)
        rh = homogenise(h_ab, A * B, LimitScheme("plain", 64))
        assert abs(float(rf.estimate) - float(rh.estimate)) < 1e-9


class TestAntisymmetrise:
    def test_homomorphism_unchanged(self):
        f = coordinate_handle(Z2)
        fbar = antisymmetrise(f)
        draw = element_sampler("lattice", dim=2, box=8)
        rng = random.Random(2)
        for _ in range(100):
            v = draw(rng)
            assert fbar(v) == f(v)

    def test_norm_becomes_zero(self):
        fbar = antisymmetrise(norm_handle(F2))
        rng = random.Random(3)
        draw = element_sampler("free", rank=2, max_len=6)
        for _ in range(50):
            assert fbar(draw(rng)) == 0

    def test_exact_antisymmetry_and_idempotence(self):
        h_ab = brooks_qm(A * B)
        fbar = antisymmetrise(h_ab)
        fbarbar = antisymmetrise(fbar)
        rng = random.Random(4)
        draw = element_sampler("free", rank=2, max_len=6)
        for _ in range(100):
            w = draw(rng)
            assert fbar(w) + fbar(w.inverse()) == 0
            assert fbarbar(w) == fbar(w)

    def test_homogenisation_preserves_antisymmetry(self):
        fbar = antisymmetrise(brooks_qm(A * B))
        f_hom = homogenised_handle(fbar, LimitScheme("plain", 12))
        rng = random.Random(5)
        draw = element_sampler("free", rank=2, max_len=3)
        for _ in range(15):
            w = draw(rng)
            assert f_hom(w.inverse()) == -f_hom(w)


class TestMcShaneExtension:
    def test_integer_line_identity_extension(self):
        ext = mcshane_extend(Z, zint(1), 1, 16)
        for h in range(-8, 9):
            assert ext(zint(h)) == h

    def test_restriction_is_exact_for_smaller_c(self):
        ext = mcshane_extend(Z, zint(3), Fraction(3, 2), 16)
        for m in range(-8, 9):
            assert ext(zint(3) ** m) == Fraction(3, 2) * m

    def test_identity_value_zero(self):
        ext = mcshane_extend(F2, A, 1, 8)
        assert ext(F2.identity()) == 0

    def test_free_group_restriction(self):
        ext = mcshane_extend(F2, A, 1, 12)
        for m in range(-6, 7):
            assert ext(A ** m) == m

    def test_certificates_fire_below_growth_floor(self):
        ext = mcshane_extend(Z, zint(1), Fraction(1, 2), 16)
        value, cert = ext.eval_with_certificate(zint(3))
        assert value == Fraction(3, 2)
        assert cert.exact and cert.pos_closed and cert.neg_closed

    def test_lipschitz_on_certified_pairs(self):
        ext = mcshane_extend(Z, zint(1), Fraction(1, 2), 20)
        points = [zint(h) for h in range(-4, 5)]
        for h1 in points:
            v1, c1 = ext.eval_with_certificate(h1)
            for h2 in points:
                v2, c2 = ext.eval_with_certificate(h2)
                if c1.exact and c2.exact:
                    assert abs(v1 - v2) <= Z.dist(h1, h2)  # exact, tolerance 0

    def test_finite_order_rejected(self):
        from binorms.norms import symmetric_transposition_context

        ctx = symmetric_transposition_context(5)
        with pytest.raises(FiniteOrderError):
            mcshane_extend(ctx, Permutation.transposition(1, 2), Fraction(1, 2), 8)

    def test_window_certificate_failure(self):
        with pytest.raises(WindowCertificateError):
            mcshane_extend(Z, zint(1), 2, 8)  # ||g^n|| = n < 2n


class TestDetectUndistorted:
    def test_integer_five(self):
        wit = detect_undistorted(Z, zint(5), LimitScheme("arith", 8, k=2), 64)
        assert wit.verdict == "undistorted"
        assert wit.c_est == 5 and wit.value_at_g == 5

    def test_free_generator(self):
        wit = detect_undistorted(F2, A, LimitScheme("arith", 8, k=2), 32)
        assert wit.verdict == "undistorted"
        assert wit.c_est == 1 and wit.value_at_g == 1

    def test_heisenberg_commutator_is_undecided(self):
        ctx = heisenberg_context()
        hab = commutator(Heisenberg(1, 0, 0), Heisenberg(0, 1, 0))
        wit = detect_undistorted(ctx, hab, LimitScheme("arith", 8, k=2), 32)
        assert wit.verdict == "distorted-or-undecided"
        assert wit.pqm is None and wit.value_at_g is None
        assert all(norm <= 2 for _, norm, _ in wit.trace)
        assert len(wit.trace) == 32

    def test_detector_pqm_is_antisymmetric_on_cyclic_subgroup(self):
        wit = detect_undistorted(Z, zint(5), LimitScheme("arith", 8, k=2), 64)
        f = wit.pqm
        assert f(zint(10)) == 10 and f(zint(-10)) == -10

    def test_value_equals_c_est_exactly(self):
        wit = detect_undistorted(F2, A * B, LimitScheme("arith", 8, k=2), 24)
        assert wit.value_at_g == wit.c_est == 2


class TestCTrick:
    def test_n_one_is_empty(self):
        res = c_trick_witness(A, B, 1)
        assert res.witnesses == ()

    def test_abelian_witnesses_are_trivial(self):
        u, v = LatticeVector((2, -1)), LatticeVector((1, 3))
        res = c_trick_witness(u, v, 4)
        assert all(c.is_identity() for c in res.witnesses)

    def test_free_pair_n3(self):
        res = c_trick_witness(A, B, 3)
        assert len(res.witnesses) == 2
        lhs, rhs = res.norm_bound_check(cancellation_norm)
        assert lhs <= rhs == 4

    def test_g_shape_certificates(self):
        res = c_trick_witness(A, B, 4, base="g")
        assert all(cert.base_label == "g" for cert in res.certificates)
        res_h = c_trick_witness(A, B, 4, base="h")
        assert all(cert.base_label == "h" for cert in res_h.certificates)

    def test_heisenberg_pair(self):
        res = c_trick_witness(Heisenberg(1, 0, 0), Heisenberg(0, 1, 0), 5)
        assert len(res.witnesses) == 4  # verified exactly in the constructor


class TestBrooks:
    def test_counting_examples(self):
        h_a = brooks_qm(A)
        h_ab = brooks_qm(A * B)
        assert h_a(A ** 5) == 5
        assert h_ab((A * B) ** 3) == 3
        assert h_ab(B.inverse() * A.inverse()) == -1

    def test_single_letter_pattern_is_exponent_sum(self):
        h_a = brooks_qm(A)
        rng = random.Random(9)
        draw = element_sampler("free", rank=2, max_len=8)
        for _ in range(100):
            w = draw(rng)
            assert h_a(w) == w.exponent_sums()[0]

    def test_rejects_non_free_input(self):
        from binorms.groups import FamilyMismatchError

        h_a = brooks_qm(A)
        with pytest.raises(FamilyMismatchError):
            h_a(LatticeVector((1,)))

    def test_rejects_empty_pattern(self):
        with pytest.raises(ValueError):
            brooks_qm(FreeWord(2, ()))


class TestWalks:
    def test_alternating_returns_to_zero(self):
        w = walk_build("alternating")
        for k in range(50):
            assert w(2 * k) == 0

    def test_all_up(self):
        w = walk_build("all-up")
        for n in range(50):
            assert w(n) == n

    def test_unit_steps(self):
        for kind in ("alternating", "all-up", "doubling-blocks"):
            w = walk_build(kind)
            for n in range(-200, 200):
                assert abs(w(n + 1) - w(n)) == 1
        assert walk_build("doubling-blocks")(0) == 0

    def test_doubling_block_boundaries(self):
        # w(2^k - 1) = (1 - (-2)^k) / 3: two subsequence limits +-1/3
        w = walk_build("doubling-blocks")
        assert [(w(2 ** k - 1)) for k in range(1, 13)] == [
            1, -1, 3, -5, 11, -21, 43, -85, 171, -341, 683, -1365,
        ]

    def test_doubling_blocks_have_two_sublimits(self):
        w = walk_build("doubling-blocks")
        for k in (10, 12, 14):
            n_even, n_odd = 2 ** k - 1, 2 ** (k + 1) - 1
            assert abs(w(n_even) / n_even - (-1 / 3)) < 2e-3
            assert abs(w(n_odd) / n_odd - (1 / 3)) < 2e-3

    def test_closed_form_matches_cumulative_steps(self):
        w = walk_build("doubling-blocks")
        acc = 0
        for i in range(600):
            assert w(i) == acc
            j = 0
            while 2 ** (j + 1) - 1 <= i:
                j += 1
            acc += 1 if j % 2 == 0 else -1

    def test_malformed_spec(self):
        with pytest.raises(WalkSpecError):
            walk_build("sideways")


def test_forward_inequalities_on_builtins():
    cases = [
        (norm_handle(Z), element_sampler("lattice", dim=1, box=8)),
        (norm_handle(F2), element_sampler("free", rank=2, max_len=5)),
        (brooks_qm(A * B), element_sampler("free", rank=2, max_len=5)),
        (coordinate_handle(Z2), element_sampler("lattice", dim=2, box=8)),
    ]
    for f, draw in cases:
        pairs = sample_pairs(draw, 23, 500)
        gens = f.ctx.generator_sample(23, 50)
        measure_constants(f, pairs, gens, seed=23)
        report = forward_inequalities_check(f, pairs)
        assert report.violations == 0
