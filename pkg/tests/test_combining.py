import numpy as np
import pytest
from hypothesis import given, strategies as st

from gma.arrays import PathSet, channel_vector
from gma.combining import (Combiner, LinkPowers, batch_objective, batch_sinr,
                           batch_sum_rate, channel_stack, combiner_sinr,
                           interference_covariance, metric_profiles,
                           mmse_combiner, mrc_snr, noise_power_dbm,
                           objective_metric, sinr, sum_rate)

from util import make_cfg, random_paths, sherman_morrison_sinr


def random_channels(rng, K, N=4, scale=1.0):
    return scale * (rng.standard_normal((K, N)) + 1j * rng.standard_normal((K, N)))


class TestPowers:
    def test_noise_power_over_default_bandwidth(self):
        assert noise_power_dbm(-174.0, 1e6) == -114.0

    def test_from_dbm_matches_hand_computation(self):
        powers = LinkPowers.from_dbm([10.0, 10.0])
        np.testing.assert_allclose(powers.p_bar, 10 ** 12.4, rtol=1e-12)

    def test_rejects_negative_or_non_finite(self):
        with pytest.raises(ValueError):
            LinkPowers(p_bar=np.array([-1.0]))
        with pytest.raises(ValueError):
            LinkPowers(p_bar=np.array([np.inf]))

    def test_zero_power_is_allowed(self):
        assert LinkPowers(p_bar=np.array([0.0])).K == 1


class TestMrcSnr:
    def test_all_ones_channel(self):
        assert mrc_snr(np.ones(4, dtype=complex), 1.0) == 4.0

    def test_zero_channel(self):
        assert mrc_snr(np.zeros(4, dtype=complex), 5.0) == 0.0

    def test_single_unit_path_is_flat_in_position_and_sparsity(self, cfg_small, rng):
        ps = PathSet(gains=np.array([np.exp(0.3j)]), aoas=np.array([-0.4]))
        p_bar = 2.5
        for _ in range(10):
            y = rng.uniform(0.0, cfg_small.y_max)
            eta = int(rng.integers(1, cfg_small.eta_max + 1))
            h = channel_vector(y, eta, ps, cfg_small)
            np.testing.assert_allclose(mrc_snr(h, p_bar), p_bar * cfg_small.N,
                                       rtol=1e-12)

    def test_rejects_negative_power(self):
        with pytest.raises(ValueError):
            mrc_snr(np.ones(4, dtype=complex), -1.0)


class TestInterferenceCovariance:
    def test_single_user_is_identity(self, rng):
        h = random_channels(rng, 1)
        C = interference_covariance(0, h, LinkPowers(p_bar=np.array([3.0])))
        assert np.array_equal(C, np.eye(4))

    def test_zero_interferer_is_identity(self, rng):
        hs = [random_channels(rng, 1)[0], np.zeros(4, dtype=complex)]
        C = interference_covariance(0, hs, LinkPowers(p_bar=np.array([1.0, 9.0])))
        assert np.array_equal(C, np.eye(4))

    def test_matches_naive_triple_loop(self, rng):
        K, N = 3, 4
        hs = random_channels(rng, K, N)
        p = np.array([0.5, 2.0, 1.5])
        C = interference_covariance(1, hs, LinkPowers(p_bar=p))
        expected = np.zeros((N, N), dtype=complex)
        for a in range(N):
            for b in range(N):
                expected[a, b] = 1.0 if a == b else 0.0
                for i in range(K):
                    if i != 1:
                        expected[a, b] += p[i] * hs[i][a] * np.conj(hs[i][b])
        np.testing.assert_allclose(C, expected, rtol=1e-12)

    @given(seed=st.integers(0, 10 ** 6))
    def test_hermitian_with_unit_eigenvalue_floor(self, seed):
        r = np.random.default_rng(seed)
        K = int(r.integers(1, 6))
        hs = random_channels(r, K)
        C = interference_covariance(0, hs, LinkPowers(p_bar=r.uniform(0.1, 5.0, K)))
        assert np.max(np.abs(C - C.conj().T)) < 1e-12
        assert np.linalg.eigvalsh(C).min() >= 1.0 - 1e-9

    def test_rejects_mismatched_lengths(self, rng):
        hs = [np.ones(4, dtype=complex), np.ones(3, dtype=complex)]
        with pytest.raises(ValueError):
            interference_covariance(0, hs, LinkPowers(p_bar=np.array([1.0, 1.0])))


class TestMmseCombiner:
    def test_identity_covariance_gives_mrc_direction(self, rng):
        h = random_channels(rng, 1)[0]
        v = mmse_combiner(h, np.eye(4, dtype=complex))
        np.testing.assert_allclose(v.weights, h / np.linalg.norm(h), rtol=1e-12)

    def test_scaled_identity_keeps_direction(self, rng):
        h = random_channels(rng, 1)[0]
        v = mmse_combiner(h, 4.0 * np.eye(4, dtype=complex))
        np.testing.assert_allclose(np.abs(np.vdot(v.weights, h / np.linalg.norm(h))),
                                   1.0, rtol=1e-12)

    def test_unit_norm(self, rng):
        hs = random_channels(rng, 3)
        powers = LinkPowers(p_bar=np.array([1.0, 2.0, 0.5]))
        C = interference_covariance(0, hs, powers)
        v = mmse_combiner(hs[0], C)
        assert abs(np.linalg.norm(v.weights) - 1.0) <= 1e-12

    def test_beats_random_combiners(self, rng):
        hs = random_channels(rng, 3)
        powers = LinkPowers(p_bar=np.array([2.0, 1.0, 3.0]))
        C = interference_covariance(0, hs, powers)
        v_star = mmse_combiner(hs[0], C)
        best = combiner_sinr(v_star, hs[0], C, powers.p_bar[0])
        V = rng.standard_normal((1000, 4)) + 1j * rng.standard_normal((1000, 4))
        V /= np.linalg.norm(V, axis=1, keepdims=True)
        nums = powers.p_bar[0] * np.abs(V.conj() @ hs[0]) ** 2
        dens = np.einsum("vn,nm,vm->v", V.conj(), C, V).real
        assert np.all(best >= nums / dens - 1e-9 * best)

    def test_rejects_zero_channel(self):
        with pytest.raises(ValueError):
            mmse_combiner(np.zeros(4, dtype=complex), np.eye(4, dtype=complex))

    def test_combiner_requires_unit_norm(self):
        with pytest.raises(ValueError):
            Combiner(weights=np.array([1.0, 1.0], dtype=complex))


class TestSinr:
    def test_single_user_equals_mrc(self, cfg_small, rng):
        ps = random_paths(rng, L=3)
        powers = LinkPowers(p_bar=np.array([2.0]))
        h = channel_vector(0.01, 2, ps, cfg_small)
        assert sinr(0, 0.01, 2, [ps], powers, cfg_small) == mrc_snr(h, 2.0)

    def test_orthogonal_interferer_costs_nothing(self, cfg_small):
        # eta=1, y=0, half-wavelength spacing: AoAs 0 and arcsin(1/2) give
        # exactly orthogonal steering vectors for N=4
        users = [PathSet(gains=np.array([1.0 + 0j]), aoas=np.array([0.0])),
                 PathSet(gains=np.array([1.0 + 0j]), aoas=np.array([np.arcsin(0.5)]))]
        powers = LinkPowers(p_bar=np.array([3.0, 3.0]))
        h1 = channel_vector(0.0, 1, users[0], cfg_small).entries
        h2 = channel_vector(0.0, 1, users[1], cfg_small).entries
        assert abs(np.vdot(h2, h1)) < 1e-12
        got = sinr(0, 0.0, 1, users, powers, cfg_small)
        expected = sherman_morrison_sinr(3.0, h1, 3.0, h2)
        np.testing.assert_allclose(got, expected, rtol=1e-12)
        np.testing.assert_allclose(got, 3.0 * cfg_small.N, rtol=1e-12)

    def test_identical_interferer_saturates(self, cfg_small, rng):
        ps = random_paths(rng, L=2)
        users = [ps, ps]
        powers = LinkPowers(p_bar=np.array([2.0, 5.0]))
        h = channel_vector(0.003, 2, ps, cfg_small).entries
        got = sinr(0, 0.003, 2, users, powers, cfg_small)
        h2 = np.sum(np.abs(h) ** 2)
        np.testing.assert_allclose(got, 2.0 * h2 / (1.0 + 5.0 * h2), rtol=1e-9)
        np.testing.assert_allclose(got, sherman_morrison_sinr(2.0, h, 5.0, h),
                                   rtol=1e-9)

    @given(seed=st.integers(0, 10 ** 6))
    def test_equals_rayleigh_quotient_at_mmse_combiner(self, seed):
        r = np.random.default_rng(seed)
        cfg = make_cfg()
        K = int(r.integers(2, 5))
        users = [random_paths(r, L=2) for _ in range(K)]
        powers = LinkPowers(p_bar=r.uniform(0.5, 4.0, K))
        y = r.uniform(0.0, cfg.y_max)
        eta = int(r.integers(1, cfg.eta_max + 1))
        hs = [channel_vector(y, eta, u, cfg).entries for u in users]
        C = interference_covariance(0, hs, powers)
        v = mmse_combiner(hs[0], C)
        quotient = combiner_sinr(v, hs[0], C, powers.p_bar[0])
        direct = sinr(0, y, eta, users, powers, cfg)
        np.testing.assert_allclose(direct, quotient, rtol=1e-9)


class TestSumRate:
    def test_unit_sinr_gives_one_bit(self, cfg_small):
        ps = PathSet(gains=np.array([1.0 + 0j]), aoas=np.array([0.2]))
        powers = LinkPowers(p_bar=np.array([1.0 / cfg_small.N]))
        np.testing.assert_allclose(sum_rate(0.0, 1, [ps], powers, cfg_small),
                                   1.0, rtol=1e-12)

    def test_zero_channels_give_zero_rate(self, cfg_small):
        ps = PathSet(gains=np.array([0.0 + 0j]), aoas=np.array([0.2]))
        powers = LinkPowers(p_bar=np.array([2.0, 2.0]))
        assert sum_rate(0.01, 1, [ps, ps], powers, cfg_small) == 0.0

    def test_matches_per_user_sinr_calls(self, cfg_small, rng):
        users = [random_paths(rng, L=3) for _ in range(5)]
        powers = LinkPowers(p_bar=rng.uniform(0.5, 3.0, 5))
        total = sum_rate(0.02, 3, users, powers, cfg_small)
        per_user = [sinr(k, 0.02, 3, users, powers, cfg_small) for k in range(5)]
        np.testing.assert_allclose(total, np.sum(np.log2(1.0 + np.array(per_user))),
                                   rtol=1e-12)

    @given(seed=st.integers(0, 10 ** 6))
    def test_invariant_under_user_permutation(self, seed):
        r = np.random.default_rng(seed)
        cfg = make_cfg()
        K = int(r.integers(2, 6))
        users = [random_paths(r, L=2) for _ in range(K)]
        p = r.uniform(0.5, 3.0, K)
        perm = r.permutation(K)
        a = sum_rate(0.01, 2, users, LinkPowers(p_bar=p), cfg)
        b = sum_rate(0.01, 2, [users[i] for i in perm],
                     LinkPowers(p_bar=p[perm]), cfg)
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_single_user_power_scaling_is_exact(self, cfg_small, rng):
        ps = random_paths(rng, L=4)
        p0 = 1.7
        g1 = sinr(0, 0.01, 2, [ps], LinkPowers(p_bar=np.array([p0])), cfg_small)
        g4 = sinr(0, 0.01, 2, [ps], LinkPowers(p_bar=np.array([4 * p0])), cfg_small)
        assert g4 == 4.0 * g1


class TestBatchedEvaluation:
    def test_matches_reference_per_point_path(self, cfg_small, rng):
        users = [random_paths(rng, L=3) for _ in range(4)]
        powers = LinkPowers(p_bar=rng.uniform(0.5, 3.0, 4))
        ys = rng.uniform(0.0, cfg_small.y_max, 20)
        H = channel_stack(ys, 2, users, cfg_small)
        gammas = batch_sinr(H, powers)
        rates = batch_sum_rate(H, powers)
        for b in (0, 7, 19):
            for k in range(4):
                np.testing.assert_allclose(
                    gammas[b, k], sinr(k, ys[b], 2, users, powers, cfg_small),
                    rtol=1e-9)
            np.testing.assert_allclose(
                rates[b], sum_rate(ys[b], 2, users, powers, cfg_small), rtol=1e-9)

    def test_single_user_fast_path(self, cfg_small, rng):
        ps = random_paths(rng, L=2)
        powers = LinkPowers(p_bar=np.array([2.0]))
        ys = rng.uniform(0.0, cfg_small.y_max, 8)
        H = channel_stack(ys, 1, [ps], cfg_small)
        expected = 2.0 * np.sum(np.abs(H[:, 0, :]) ** 2, axis=1)
        np.testing.assert_array_equal(batch_sinr(H, powers)[:, 0], expected)
        np.testing.assert_array_equal(batch_objective(H, powers), expected)

    def test_objective_metric_units(self, cfg_small, rng):
        ps = random_paths(rng, L=2)
        one = LinkPowers(p_bar=np.array([2.0]))
        h = channel_vector(0.01, 2, ps, cfg_small)
        np.testing.assert_allclose(objective_metric(0.01, 2, [ps], one, cfg_small),
                                   mrc_snr(h, 2.0), rtol=1e-12)
        users = [random_paths(rng, L=2) for _ in range(3)]
        many = LinkPowers(p_bar=np.array([1.0, 2.0, 3.0]))
        np.testing.assert_allclose(
            objective_metric(0.01, 2, users, many, cfg_small),
            sum_rate(0.01, 2, users, many, cfg_small), rtol=1e-9)

    def test_metric_profiles_match_single_point(self, cfg_small, rng):
        users = [random_paths(rng, L=3) for _ in range(3)]
        powers = LinkPowers(p_bar=rng.uniform(0.5, 3.0, 3))
        ys = rng.uniform(0.0, cfg_small.y_max, 11)
        for eta, vals in metric_profiles(ys, [1, 3, 5], users, powers, cfg_small):
            for b in (0, 5, 10):
                np.testing.assert_allclose(
                    vals[b], objective_metric(ys[b], eta, users, powers, cfg_small),
                    rtol=1e-12)

    def test_single_point_reevaluates_bit_identically(self, cfg_small, rng):
        users = [random_paths(rng, L=3) for _ in range(3)]
        powers = LinkPowers(p_bar=rng.uniform(0.5, 3.0, 3))
        first = objective_metric(0.017, 4, users, powers, cfg_small)
        assert first == objective_metric(0.017, 4, users, powers, cfg_small)

    def test_rejects_wrong_stack_shape(self, rng):
        with pytest.raises(ValueError):
            batch_sinr(np.zeros((3, 2, 4), dtype=complex),
                       LinkPowers(p_bar=np.array([1.0])))
