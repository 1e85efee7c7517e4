import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fenton_minimax.formulas import Affine, Quadratic
from fenton_minimax.kernels import (Kernel, KernelFlags, custom_kernel,
                                    kernel_eval, kernel_from_json,
                                    kernel_to_json, kernel_validate,
                                    log_kernel, power_kernel, singularize,
                                    sqrt_kernel, strictify, zero_kernel)

STOCK = [zero_kernel(), log_kernel(), sqrt_kernel(), power_kernel(0.5),
         power_kernel(1.5)]

NO_FLAGS = KernelFlags(singular=False, monotone=False, strictly_monotone=False,
                       strictly_concave=False, cusp=False)
PLAIN_MONOTONE = KernelFlags(singular=False, monotone=True,
                             strictly_monotone=False, strictly_concave=False,
                             cusp=False)


def _ulps_apart(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / math.ulp(max(abs(a), abs(b)))

inner = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)
nonzero = inner.filter(lambda t: abs(t) > 1e-12)


class TestFamilies:
    def test_values(self):
        assert kernel_eval(zero_kernel(), 0.37) == 0.0
        assert kernel_eval(log_kernel(), 0.5) == math.log(0.5)
        assert kernel_eval(log_kernel(), -0.5) == math.log(0.5)
        assert kernel_eval(log_kernel(), 0.0) == -math.inf
        assert kernel_eval(sqrt_kernel(), 0.25) == 0.5
        assert kernel_eval(sqrt_kernel(), 0.0) == 0.0
        assert kernel_eval(power_kernel(0.5), 0.25) == -2.0
        assert kernel_eval(power_kernel(0.5), 0.0) == -math.inf

    def test_flags(self):
        assert log_kernel().flags == KernelFlags(
            singular=True, monotone=True, strictly_monotone=True,
            strictly_concave=True, cusp=True)
        z = zero_kernel().flags
        assert not z.singular and z.monotone
        assert not z.strictly_monotone and not z.strictly_concave and not z.cusp
        s = sqrt_kernel().flags
        assert not s.singular and s.cusp and s.strictly_monotone
        p = power_kernel(0.5).flags
        assert p.singular and p.strictly_concave and p.cusp

    def test_power_exponent_range(self):
        with pytest.raises(ValueError):
            power_kernel(0.0)
        with pytest.raises(ValueError):
            power_kernel(-1.0)

    def test_domain_enforced(self):
        with pytest.raises(ValueError):
            log_kernel().eval(1.5)
        with pytest.raises(ValueError):
            log_kernel().eval_many(np.array([0.2, -1.2]))

    def test_eval_many_matches_eval(self):
        # the vector path may use a different libm; anything beyond a couple
        # of ulps would indicate a genuinely different formula
        ts = np.linspace(-1.0, 1.0, 41)
        for k in STOCK:
            vs = k.eval_many(ts)
            for t, v in zip(ts, vs):
                s = k.eval(float(t))
                assert (s == v) or _ulps_apart(s, float(v)) <= 2

    def test_scaled(self):
        k = log_kernel().scaled(2.5)
        assert k.eval(0.5) == 2.5 * math.log(0.5)
        with pytest.raises(ValueError):
            log_kernel().scaled(-1.0)


class TestStrictify:
    def test_adds_sqrt_term(self):
        k = strictify(log_kernel(), 0.1)
        t = 0.36
        assert k.eval(t) == pytest.approx(math.log(t) + 0.1 * math.sqrt(t), abs=1e-15)
        assert k.eval(0.0) == -math.inf

    def test_upgrades_flags(self):
        k = strictify(zero_kernel(), 0.5)
        assert k.flags.strictly_monotone
        assert k.flags.strictly_concave
        assert k.flags.cusp
        assert not k.flags.singular

    def test_requires_monotone(self):
        hump = custom_kernel(Quadratic(-1.0, -1.0, 0.0), Quadratic(-1.0, 1.0, 0.0),
                             NO_FLAGS)
        with pytest.raises(ValueError):
            strictify(hump, 0.1)

    def test_eta_positive(self):
        with pytest.raises(ValueError):
            strictify(log_kernel(), 0.0)

    @given(nonzero)
    def test_majorizes_original(self, t):
        k0, k1 = log_kernel(), strictify(log_kernel(), 0.2)
        assert k1.eval(t) >= k0.eval(t)
        assert k1.eval(t) - k0.eval(t) == pytest.approx(0.2 * math.sqrt(abs(t)))


class TestSingularize:
    def test_exact_locality(self):
        k0, k1 = sqrt_kernel(), singularize(sqrt_kernel(), 0.25)
        for t in (0.25, 0.3, 0.5, 1.0, -0.25, -0.9):
            assert k1.eval(t) == k0.eval(t)
        assert k1.eval(0.1) == k0.eval(0.1) + math.log(0.1 / 0.25)
        assert k1.eval(0.0) == -math.inf

    def test_sets_singular_flag(self):
        k = singularize(zero_kernel(), 0.25)
        assert k.flags.singular
        assert k.flags.cusp

    def test_minorizes_original(self):
        k0, k1 = log_kernel(), singularize(log_kernel(), 0.1)
        ts = np.linspace(-1, 1, 101)
        assert np.all(k1.eval_many(ts) <= k0.eval_many(ts) + 1e-15)

    def test_layers_compose(self):
        k = singularize(singularize(zero_kernel(), 0.5), 0.25)
        assert k.eval(0.1) == pytest.approx(math.log(0.1 / 0.5) + math.log(0.1 / 0.25))
        assert k.eval(0.75) == 0.0


class TestValidate:
    @pytest.mark.parametrize("k", STOCK + [strictify(zero_kernel(), 0.5),
                                           singularize(zero_kernel(), 0.25),
                                           strictify(log_kernel(), 0.1),
                                           singularize(sqrt_kernel(), 0.1)])
    def test_stock_kernels_pass(self, k):
        rep = kernel_validate(k)
        assert rep.passed, [v.flag for v in rep.violations]

    def test_catches_wrong_monotone_flag(self):
        # rises toward 0 from the left, falls on the right: the opposite
        # of the declared shape
        bad = custom_kernel(Affine(1.0, 0.0), Affine(-1.0, 0.0), PLAIN_MONOTONE)
        rep = kernel_validate(bad)
        assert not rep.passed
        assert any(v.flag == "monotone" for v in rep.violations)

    def test_catches_missing_cusp(self):
        # an affine kernel has bounded divided differences at 0
        flags = KernelFlags(singular=False, monotone=True,
                            strictly_monotone=True, strictly_concave=False,
                            cusp=True)
        flat = custom_kernel(Affine(-1.0, 0.0), Affine(1.0, 0.0), flags)
        rep = kernel_validate(flat)
        assert any(v.flag == "cusp" for v in rep.violations)

    def test_grid_size_floor(self):
        with pytest.raises(ValueError):
            kernel_validate(log_kernel(), grid_size=4)


class TestJson:
    @pytest.mark.parametrize("k", STOCK + [strictify(log_kernel(), 0.3),
                                           singularize(power_kernel(0.5), 0.2),
                                           log_kernel().scaled(2.0)])
    def test_roundtrip(self, k):
        back = kernel_from_json(kernel_to_json(k))
        ts = np.linspace(-1, 1, 33)
        assert np.array_equal(back.eval_many(ts), k.eval_many(ts))
        assert back.flags == k.flags

    def test_unknown_family_rejected(self):
        with pytest.raises(ValueError):
            kernel_from_json({"family": "bessel"})


@given(nonzero, nonzero)
def test_midpoint_concavity_same_side(u, v):
    if u * v <= 0:
        u, v = abs(u), abs(v)
    mid = 0.5 * (u + v)
    for k in (log_kernel(), sqrt_kernel(), power_kernel(0.5)):
        lhs = k.eval(mid)
        rhs = 0.5 * (k.eval(u) + k.eval(v))
        if math.isfinite(rhs):
            assert lhs >= rhs - 1e-9 * max(1.0, abs(rhs))


@given(st.floats(min_value=1e-6, max_value=1.0), st.floats(min_value=1e-6, max_value=1.0))
def test_monotone_orientation(s, t):
    # non-decreasing away from 0 on the right, mirrored on the left
    lo, hi = sorted((s, t))
    for k in (log_kernel(), sqrt_kernel(), power_kernel(0.5),
              strictify(zero_kernel(), 0.5)):
        assert k.eval(lo) <= k.eval(hi) + 1e-12
        assert k.eval(-hi) >= k.eval(-lo) - 1e-12
