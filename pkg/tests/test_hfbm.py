
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hlrs import hfbm
from hlrs.errors import NumericalPSDError, ParameterError

from oracles import inner_product_oracle

ALPHAS = (0.25, 0.5, 0.75, 1.25, 1.5, 1.75)

# mpmath quadrature of the kernel inner product (40 digits)
COV_05_1_3 = 0.60753787663726027
INCVAR_03_1_2 = 2.1165270422881823
CROSS_05 = -0.082785232173292192
CROSS_15 = 0.075525627196819077

alphas = st.floats(0.02, 1.98).filter(lambda a: abs(a - 1) > 1e-3)
times = st.floats(1e-3, 1e3)


class TestTimeGrid:
    def test_rejects_bad_grids(self):
        for bad in ([], [1.0, 1.0], [2.0, 1.0], [-1.0, 1.0], [0.0, 0.0, 1.0], [1.0, np.inf]):
            with pytest.raises(ParameterError):
                hfbm.TimeGrid(bad)

    def test_origin(self):
        g = hfbm.TimeGrid([0.0, 1.0, 2.0])
        assert g.has_origin
        np.testing.assert_array_equal(g.positive, [1.0, 2.0])

    def test_constructors(self):
        assert len(hfbm.TimeGrid.uniform(0.5, 2.0, 4)) == 4
        np.testing.assert_allclose(hfbm.TimeGrid.geometric(1.0, 100.0, 3).times, [1.0, 10.0, 100.0])
        np.testing.assert_allclose(hfbm.TimeGrid([1.0, 2.0]).scaled(3.0).times, [3.0, 6.0])

    def test_immutable(self):
        g = hfbm.TimeGrid([1.0, 2.0])
        with pytest.raises(ValueError):
            g.times[0] = 5.0


class TestCovariance:
    @pytest.mark.parametrize("alpha", ALPHAS + (1.0,))
    def test_diagonal_is_time(self, alpha):
        for t in (0.1, 1.0, 7.3):
            assert hfbm.covariance(alpha, t, t) == t

    def test_brownian(self):
        assert hfbm.covariance(1.0, 2.0, 5.0) == 2.0

    def test_origin(self):
        assert hfbm.covariance(0.5, 0.0, 3.0) == 0.0

    def test_pinned(self, backend):
        assert hfbm.covariance(0.5, 1.0, 3.0) == pytest.approx(COV_05_1_3, rel=1e-12)

    def test_broadcasting(self):
        s = np.array([[1.0], [2.0]])
        t = np.array([1.0, 3.0, 4.0])
        out = hfbm.covariance(0.7, s, t)
        assert out.shape == (2, 3)
        assert out[1, 2] == hfbm.covariance(0.7, 2.0, 4.0)

    def test_negative_time(self):
        with pytest.raises(ParameterError):
            hfbm.covariance(0.5, -1.0, 1.0)

    def test_oracle_on_random_triples(self, backend):
        rng = np.random.default_rng(11)
        for _ in range(50):
            alpha = rng.choice([rng.uniform(0.05, 0.95), rng.uniform(1.05, 1.95)])
            s, t = np.sort(rng.uniform(0.05, 5.0, 2))
            assert hfbm.covariance(alpha, s, t) == pytest.approx(inner_product_oracle(alpha, s, t), rel=1e-6)

    @settings(max_examples=200, deadline=None)
    @given(alpha=alphas, s=times, t=times)
    def test_symmetry(self, alpha, s, t):
        assert hfbm.covariance(alpha, s, t) == hfbm.covariance(alpha, t, s)

    @settings(max_examples=200, deadline=None)
    @given(alpha=alphas, s=times, t=times)
    def test_cauchy_schwarz(self, alpha, s, t):
        assert hfbm.covariance(alpha, s, t) ** 2 <= s * t * (1 + 1e-12)

    @settings(max_examples=200, deadline=None)
    @given(alpha=alphas, s=times, t=times)
    def test_domination(self, alpha, s, t):
        c, m = hfbm.covariance(alpha, s, t), min(s, t)
        if alpha < 1:
            assert c <= m * (1 + 1e-12)
        else:
            assert c >= m * (1 - 1e-12)

    @pytest.mark.parametrize(
        "alpha",
        [
            pytest.param(
                0.25,
                marks=pytest.mark.xfail(
                    strict=True, reason="off-diagonal approach is like eps^(alpha/2); gap 2.6e-2 at alpha=0.25, eps=1e-6"
                ),
            ),
            *ALPHAS[1:],
        ],
    )
    def test_continuity_at_diagonal(self, alpha):
        for t in (0.5, 1.0, 4.0):
            assert hfbm.covariance(alpha, t, t * (1 + 1e-6)) == pytest.approx(t, abs=1e-3 * t)


class TestCovarianceMatrix:
    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize(
        "grid", [np.linspace(0.01, 10, 512), np.geomspace(1e-3, 1e3, 512), np.arange(1, 513, dtype=float)]
    )
    def test_factorizes_without_jitter(self, alpha, grid):
        cm = hfbm.covariance_matrix(alpha, grid)
        assert cm.jitter == 0.0
        np.testing.assert_allclose(cm.cholesky @ cm.cholesky.T, cm.entries, atol=1e-10 * grid[-1])

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 1.6])
    def test_self_similar(self, alpha):
        grid = np.geomspace(0.1, 5.0, 20)
        base = hfbm.covariance_matrix(alpha, grid).entries
        scaled = hfbm.covariance_matrix(alpha, 3.7 * grid).entries
        np.testing.assert_allclose(scaled, 3.7 * base, rtol=1e-12)

    def test_leading_zero(self):
        cm = hfbm.covariance_matrix(0.5, [0.0, 1.0, 2.0])
        np.testing.assert_array_equal(cm.entries[0], 0.0)
        np.testing.assert_array_equal(cm.cholesky[0], 0.0)
        np.testing.assert_allclose(cm.cholesky @ cm.cholesky.T, cm.entries, atol=1e-14)

    def test_brownian_matrix(self):
        np.testing.assert_array_equal(hfbm.covariance_matrix(1.0, [1.0, 2.0, 3.0]).entries,
                                      [[1, 1, 1], [1, 2, 2], [1, 2, 3]])

    def test_psd_failure_reports_eigenvalue(self):
        bad = np.array([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(NumericalPSDError) as err:
            hfbm._cholesky_with_jitter(bad)
        assert err.value.min_eigenvalue == pytest.approx(-1.0)


class TestIncrements:
    def test_from_origin(self):
        assert hfbm.increment_variance(0.4, 0.0, 2.5) == 2.5

    def test_brownian(self):
        assert hfbm.increment_variance(1.0, 1.5, 4.0) == pytest.approx(2.5, rel=1e-15)

    def test_pinned(self):
        assert hfbm.increment_variance(0.3, 1.0, 2.0) == pytest.approx(INCVAR_03_1_2, rel=1e-10)

    def test_ordering(self):
        with pytest.raises(ParameterError):
            hfbm.increment_variance(0.5, 2.0, 1.0)

    def test_cross_covariance(self):
        assert hfbm.increment_cross_covariance(1.0, 1, 2, 3, 4) == 0.0
        assert hfbm.increment_cross_covariance(0.5, 1, 2, 3, 4) == pytest.approx(CROSS_05, rel=1e-10)
        assert hfbm.increment_cross_covariance(1.5, 1, 2, 3, 4) == pytest.approx(CROSS_15, rel=1e-10)
        assert CROSS_05 < 0 < CROSS_15

    def test_cross_needs_ordered_intervals(self):
        with pytest.raises(ParameterError):
            hfbm.increment_cross_covariance(0.5, 1, 3, 2, 4)


class TestMemoryRatio:
    @settings(max_examples=30, deadline=None)
    @given(t=st.integers(2, 50), m=st.integers(1, 5000))
    def test_brownian_is_one(self, t, m):
        assert hfbm.memory_ratio(1.0, t, m) == 1.0

    def test_one_block(self):
        assert hfbm.memory_ratio(0.5, 2, 1) == pytest.approx(1.0, rel=1e-14)

    def test_trends(self):
        down = [hfbm.memory_ratio(0.5, 2, m) for m in (1, 10, 100, 1000)]
        up = [hfbm.memory_ratio(1.5, 2, m) for m in (1, 10, 100, 1000)]
        assert all(b < a for a, b in zip(down, down[1:]))
        assert all(b > a for a, b in zip(up, up[1:]))

    def test_numerator_is_increment_variance(self):
        for alpha in (0.5, 1.5):
            assert hfbm.memory_numerator(alpha, 3) == pytest.approx(hfbm.increment_variance(alpha, 2.0, 3.0), rel=1e-13)

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 1.6])
    def test_vectorized_matches_single(self, alpha):
        ms = [1, 7, 10, 250, 3000]
        single = [hfbm.memory_ratio(alpha, 3, m) for m in ms]
        np.testing.assert_allclose(hfbm.memory_ratios(alpha, 3, ms), single, rtol=1e-11)

    def test_report(self):
        rep = hfbm.memory_ratio_report(0.5, 2, [10, 100])
        assert rep.m_values == (10, 100) and len(rep.ratios) == 2

    def test_parameters(self):
        with pytest.raises(ParameterError):
            hfbm.memory_ratio(0.5, 1, 10)
        with pytest.raises(ParameterError):
            hfbm.memory_ratio(0.5, 2, 0)


class TestCharacteristicExponent:
    def test_unit_vectors(self):
        grid = [0.5, 1.0, 2.0]
        for j, t in enumerate(grid):
            k = np.zeros(3)
            k[j] = 1.0
            assert hfbm.joint_charfn_exponent(0.6, grid, k) == t

    def test_zero(self):
        assert hfbm.joint_charfn_exponent(0.6, [1.0, 2.0], [0.0, 0.0]) == 0.0

    def test_increment(self):
        q = hfbm.joint_charfn_exponent(1.5, [1.0, 2.0], [1.0, -1.0])
        assert q == pytest.approx(hfbm.increment_variance(1.5, 1.0, 2.0), rel=1e-13)

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            hfbm.joint_charfn_exponent(0.6, [1.0, 2.0], [1.0])
