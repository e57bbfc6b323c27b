import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bskop.errors import DomainError, EmptyCandidateError, UnavailableDerivativeError
from bskop.fields import ScalarField, catalog, catalog_names, differentiable_names
from bskop.moduli import (
    ModulusGrid,
    binary_indices,
    compute_modulus,
    derivative_norms,
    kfunctional_candidates,
    kfunctional_upper,
    local_modulus,
    lp_modulus,
    lp_modulus_profile,
    mixed_partial,
    sobolev_seminorm,
    tau_modulus,
    tau_property_check,
)

DELTAS = (0.05, 0.1)


def pair_oscillation(f, x, delta, extra=(), m=1001):
    """Brute force sup |f(s) - f(t)| over sampled pairs of the 1-D window."""
    lo, hi = max(0.0, x - delta / 2), min(1.0, x + delta / 2)
    t = np.unique(np.concatenate([np.linspace(lo, hi, m), [e for e in extra if lo <= e <= hi]]))
    v = f.values(t[:, None])
    return float(np.max(np.abs(v[:, None] - v[None, :])))


class TestLpModulus:
    def test_constant(self):
        for d in (1, 2):
            assert lp_modulus(catalog("one", d), 0.1) == 0.0

    def test_linear_against_dense_search(self):
        # analytic inner integral: int_0^{1-h} |h| dx = h (1 - h)
        h = np.linspace(1e-6, 0.1, 100001)
        oracle = float(np.max(h * (1 - h)))
        assert oracle == pytest.approx(0.09, abs=1e-12)
        assert lp_modulus(catalog("pr1", 1), 0.1, 1.0) == pytest.approx(oracle, rel=0.02)

    @pytest.mark.parametrize("delta", DELTAS)
    def test_linear_exact_on_grid(self, delta):
        assert lp_modulus(catalog("pr1", 1), delta, 1.0) == pytest.approx(delta * (1 - delta), rel=1e-12)

    def test_step_p2(self):
        # |step(x+h) - step(x)| = 1 on a set of measure h
        assert lp_modulus(catalog("step", 1), 0.1, 2.0) == pytest.approx(math.sqrt(0.1), rel=1e-12)

    @pytest.mark.parametrize("d", [1, 2])
    def test_monotone_on_catalog(self, d):
        for name in catalog_names(d):
            f = catalog(name, d)
            a, b = lp_modulus(f, 0.05), lp_modulus(f, 0.1)
            assert a <= b * (1 + 1e-12), name

    def test_profile_is_non_decreasing(self):
        prof = lp_modulus_profile(catalog("cos", 1), [0.01, 0.02, 0.3, 0.5, 0.9])
        assert all(b >= a for a, b in zip(prof, prof[1:]))

    @pytest.mark.parametrize("delta", [0.0, -0.1, 1.5])
    def test_delta_domain(self, delta):
        with pytest.raises(DomainError):
            lp_modulus(catalog("pr1", 1), delta)

    def test_p_domain(self):
        with pytest.raises(DomainError):
            lp_modulus(catalog("pr1", 1), 0.1, 0.5)


class TestLocalModulus:
    def test_constant(self):
        assert local_modulus(catalog("one", 2), (0.3, 0.4), 0.1) == 0.0

    @pytest.mark.parametrize("x", [0.05, 0.3, 0.5, 0.95])
    def test_linear_interior(self, x):
        f = catalog("pr1", 1)
        oracle = pair_oscillation(f, x, 0.1)
        assert oracle == pytest.approx(0.1, abs=1e-12)
        assert local_modulus(f, x, 0.1) == pytest.approx(oracle, abs=1e-12)

    def test_linear_near_boundary(self):
        # window clipped to [0, 0.07]
        assert local_modulus(catalog("pr1", 1), 0.02, 0.1) == pytest.approx(0.07, abs=1e-12)

    def test_step_at_jump(self):
        f = catalog("step", 1)
        oracle = pair_oscillation(f, 0.5, 0.1, extra=[0.5])
        assert oracle == 1.0
        assert local_modulus(f, 0.5, 0.1) == 1.0

    def test_step_window_touching_jump(self):
        # the window [0.4, 0.5] contains the jump point itself
        assert local_modulus(catalog("step", 1), 0.45, 0.1) == 1.0
        assert local_modulus(catalog("step", 1), 0.3, 0.1) == 0.0

    def test_two_dimensional_linear(self):
        assert local_modulus(catalog("pr2", 2), (0.5, 0.5), 0.2) == pytest.approx(0.2, abs=1e-12)

    def test_point_domain(self):
        with pytest.raises(DomainError):
            local_modulus(catalog("pr1", 1), 1.3, 0.1)


class TestTau:
    def test_constant(self):
        assert tau_modulus(catalog("one", 1), 0.1) == 0.0

    @pytest.mark.parametrize("delta", DELTAS)
    def test_step_window_measure(self, delta):
        # local modulus is 1 on [1/2 - delta/2, 1/2 + delta/2] and 0 elsewhere
        assert tau_modulus(catalog("step", 1), delta, 1.0) == pytest.approx(delta, rel=0.03)

    def test_linear(self):
        # omega(x) = delta in the interior and shrinks linearly to delta/2 at the ends
        delta = 0.1
        exact = delta * (1 - delta) + 2 * (delta / 2) * (3 * delta / 4)
        assert tau_modulus(catalog("pr1", 1), delta, 1.0) == pytest.approx(exact, rel=1e-12)

    @pytest.mark.parametrize("d", [1, 2])
    @pytest.mark.parametrize("delta", DELTAS)
    def test_dominates_integral_modulus(self, d, delta):
        for name in catalog_names(d):
            f = catalog(name, d)
            tau, omega = tau_modulus(f, delta), lp_modulus(f, delta)
            assert tau >= omega * (1 - 1e-9), name

    @pytest.mark.parametrize("d", [1, 2])
    def test_monotone(self, d):
        for name in catalog_names(d):
            f = catalog(name, d)
            assert tau_modulus(f, 0.05) <= tau_modulus(f, 0.1) * (1 + 1e-12), name


class TestRefinementStability:
    @pytest.mark.parametrize("delta", DELTAS)
    def test_one_dimensional(self, delta):
        grid = ModulusGrid.default(1)
        fine = grid.refined()
        for name in catalog_names(1):
            f = catalog(name, 1)
            for fn in (lp_modulus, tau_modulus):
                a, b = fn(f, delta, 1.0, grid), fn(f, delta, 1.0, fine)
                assert abs(a - b) <= 0.02 * max(abs(b), 1e-300), (name, fn.__name__)

    def test_two_dimensional(self):
        grid = ModulusGrid.default(2)
        fine = grid.refined()
        for name in catalog_names(2):
            f = catalog(name, 2)
            for fn in (lp_modulus, tau_modulus):
                a, b = fn(f, 0.1, 1.0, grid), fn(f, 0.1, 1.0, fine)
                assert abs(a - b) <= 0.02 * max(abs(b), 1e-300), (name, fn.__name__)


class TestPartials:
    def test_examples(self):
        g = mixed_partial(catalog("prod", 2), (1, 1))
        np.testing.assert_allclose(g.values(np.random.default_rng(1).random((10, 2))), 1.0)
        g = mixed_partial(catalog("sq1", 2), (1, 0))
        pts = np.random.default_rng(2).random((10, 2))
        np.testing.assert_allclose(g.values(pts), 2 * pts[:, 0])

    @pytest.mark.parametrize("alpha", [(0, 0), (2, 0), (1,)])
    def test_bad_alpha(self, alpha):
        with pytest.raises(DomainError):
            mixed_partial(catalog("prod", 2), alpha)

    def test_unavailable(self):
        with pytest.raises(UnavailableDerivativeError):
            mixed_partial(catalog("kink", 1), (1,))
        with pytest.raises(UnavailableDerivativeError):
            mixed_partial(ScalarField(1, lambda x: x[..., 0]), (1,))

    def test_singular_axis_untouched(self):
        # the kink lives on axis 1; differentiating along axis 2 is fine
        g = mixed_partial(catalog("kink", 2), (0, 1))
        assert np.all(g.values(np.random.default_rng(3).random((5, 2))) == 0.0)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_first_order_differences_match_exact(self, d):
        axis = np.linspace(0, 1, 21)
        pts = np.stack(np.meshgrid(*[axis] * d, indexing="ij"), axis=-1).reshape(-1, d)
        for name in differentiable_names(d):
            f = catalog(name, d)
            plain = ScalarField(d, f.values, smooth=True)
            for alpha in binary_indices(d):
                if sum(alpha) != 1:
                    continue
                exact = mixed_partial(f, alpha).values(pts)
                approx = mixed_partial(plain, alpha).values(pts)
                assert np.max(np.abs(exact - approx)) <= 1e-6, (name, alpha)

    def test_mixed_differences_limited_by_rounding(self):
        # nested quotients with step h carry rounding error of order eps*|f|/h^2 ~ 1e-5
        axis = np.linspace(0, 1, 21)
        pts = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
        for name in differentiable_names(2):
            f = catalog(name, 2)
            plain = ScalarField(2, f.values, smooth=True)
            exact = mixed_partial(f, (1, 1)).values(pts)
            approx = mixed_partial(plain, (1, 1)).values(pts)
            scale = 1.0 + np.max(np.abs(f.values(pts)))
            assert np.max(np.abs(exact - approx)) <= 1e-5 * scale, name


class TestSobolev:
    def test_examples(self):
        f = ScalarField(2, lambda x: x[..., 0] + x[..., 1], smooth=True)
        assert sobolev_seminorm(f, 1.0) == pytest.approx(2.0, abs=1e-9)
        assert sobolev_seminorm(catalog("one", 2), 1.0) == 0.0
        assert sobolev_seminorm(catalog("sq1", 1), 2.0) == pytest.approx(2 / math.sqrt(3), abs=1e-13)

    def test_derivative_norms_prod(self):
        norms = derivative_norms(catalog("prod", 2), 1.0)
        assert norms[(1, 1)] == pytest.approx(1.0, abs=1e-14)
        assert norms[(1, 0)] == pytest.approx(0.5, abs=1e-14)


class TestKFunctional:
    def test_constant(self):
        assert kfunctional_upper(catalog("one", 1), 0.1) == 0.0

    @pytest.mark.parametrize("name", ["pr1", "sq1", "exp", "cos"])
    def test_bounded_by_seminorm(self, name):
        f = catalog(name, 1)
        for t in (1e-3, 0.05, 0.3):
            assert kfunctional_upper(f, t) <= t * sobolev_seminorm(f) * (1 + 1e-12)

    def test_kink_between_ct_and_t(self):
        f = catalog("kink", 1)
        ratios = []
        for t in (0.005, 0.01, 0.02, 0.05):
            k = kfunctional_upper(f, t)
            assert 0.0 < k <= t
            # the Steklov family cannot beat a fixed multiple of omega_1(f; t)_1
            assert k >= 0.1 * lp_modulus(f, t)
            ratios.append(k / t)
        assert min(ratios) > 0.5

    def test_step_has_only_smoothed_candidates(self):
        cands = kfunctional_candidates(catalog("step", 1), 0.1)
        assert all(label.startswith("steklov") for label, _ in cands)

    def test_empty_candidates(self):
        with pytest.raises(EmptyCandidateError):
            kfunctional_upper(catalog("step", 1), 0.1, radii=[2.0])

    def test_t_domain(self):
        with pytest.raises(DomainError):
            kfunctional_upper(catalog("pr1", 1), 0.0)


class TestTauProperties:
    def test_constant(self):
        rep = tau_property_check(catalog("one", 1), 1.0, [0.05, 0.1])
        assert rep.passed and rep.tau == [0.0, 0.0]

    def test_linear_example(self):
        rep = tau_property_check(catalog("pr1", 1), 1.0, [0.1])
        assert rep.derivative_rhs == [pytest.approx(0.2, abs=1e-14)]
        assert rep.tau[0] == pytest.approx(0.1, rel=0.05)
        assert rep.passed

    @pytest.mark.parametrize("d", [1, 2])
    def test_scaling_factor(self, d):
        rep = tau_property_check(catalog("cos", d), 1.0, [0.05], lam=2.0)
        assert rep.scaling_factor == 6.0 ** (d + 1)

    def test_step_without_partials(self):
        rep = tau_property_check(catalog("step", 1), 1.0, [0.05, 0.1])
        assert rep.derivative_bound is None and rep.passed

    def test_unsorted(self):
        with pytest.raises(DomainError):
            tau_property_check(catalog("pr1", 1), 1.0, [0.1, 0.05])


class TestInvariants:
    @settings(max_examples=25, deadline=None)
    @given(delta=st.floats(0.01, 1.0), c=st.floats(-5, 5), p=st.sampled_from([1.0, 2.0, 3.5]))
    def test_constants_vanish(self, delta, c, p):
        f = ScalarField(1, lambda x: np.full(x.shape[:-1], c))
        grid = ModulusGrid(33, 9, 33, 2)
        assert lp_modulus(f, delta, p, grid) == 0.0
        assert tau_modulus(f, delta, p, grid) == 0.0

    @settings(max_examples=25, deadline=None)
    @given(delta=st.floats(0.01, 1.0), loc=st.floats(0.05, 0.95))
    def test_non_negative(self, delta, loc):
        grid = ModulusGrid(33, 9, 33, 2)
        for name in (f"step@{loc}", f"kink@{loc}"):
            f = catalog(name, 1)
            assert lp_modulus(f, delta, 1.0, grid) >= 0.0
            assert tau_modulus(f, delta, 1.0, grid) >= 0.0

    def test_compute_modulus_dispatch(self):
        f = catalog("pr1", 1)
        assert compute_modulus("omega_lp", f, 0.1).value == pytest.approx(0.09, rel=1e-12)
        assert compute_modulus("local", f, 0.1, x=[0.5]).value == pytest.approx(0.1, abs=1e-12)
        rep = compute_modulus("tau", f, 0.1)
        assert rep.kind == "tau" and rep.grid_spec["x_points"] == 257
        with pytest.raises(DomainError):
            compute_modulus("nope", f)
