"""Log-modulus of continuity against closed-form moduli."""

import math

import numpy as np
import pytest

from expkant import moduli, signals
from expkant.core import Signal, ValidationError


class TestLogModulus:
    def test_log_signal_modulus_is_delta(self):
        # |ln x - ln y| <= delta attains delta for the log signal
        f = signals.clipped_log()
        for delta in (0.01, 0.1, 0.5):
            assert moduli.log_modulus(f, delta, window=(-2, 2)) == \
                pytest.approx(delta, rel=1e-6)

    def test_constant_modulus_is_zero(self):
        f = signals.constant(3.0)
        assert moduli.log_modulus(f, 0.25, window=(-4, 4)) == 0.0

    def test_holder_bump_exact(self):
        # piecewise (delta/R)^nu modulus by construction
        for nu, radius in ((0.5, 1.0), (0.3, 2.0), (1.0, 1.5)):
            f = signals.holder_bump(nu, radius=radius)
            for delta in (0.05, 0.2):
                want = (delta / radius) ** nu
                got = moduli.log_modulus(f, delta)
                assert got == pytest.approx(want, rel=1e-3)
                assert got <= want + 1e-12  # grid estimate is a lower bound

    def test_monotone_in_delta(self):
        f = signals.random_bump(4)
        vals = [moduli.log_modulus(f, d) for d in (0.05, 0.1, 0.2, 0.4)]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_subadditivity_random_signals(self):
        rng = np.random.default_rng(2)
        for seed in range(6):
            f = signals.random_bump(seed)
            lam = float(rng.uniform(0.5, 4.0))
            assert moduli.subadditivity_check(f, 0.1, lam)

    def test_validation(self):
        with pytest.raises(ValidationError):
            moduli.log_modulus(signals.constant(1.0), 0.0)
        with pytest.raises(ValidationError):
            moduli.log_modulus(signals.constant(1.0), 0.1, window=(1.0, -1.0))


class TestCurveAndFit:
    def test_holder_order_recovered(self):
        f = signals.holder_bump(0.5, radius=1.0)
        deltas = np.geomspace(1e-3, 0.25, 9)
        curve = moduli.modulus_curve(f, deltas)
        assert curve.fitted_order == pytest.approx(0.5, abs=0.05)

    def test_lipschitz_order_clipped_to_one(self):
        curve = moduli.modulus_curve(signals.clipped_log(),
                                     np.geomspace(1e-3, 0.2, 7),
                                     window=(-2, 2))
        assert curve.fitted_order == pytest.approx(1.0, abs=1e-6)

    def test_zero_marker(self):
        curve = moduli.modulus_curve(signals.constant(2.0), [0.1, 0.2, 0.4])
        assert curve.is_zero
        assert curve.fitted_order is None

    def test_deltas_sorted_descending(self):
        curve = moduli.modulus_curve(signals.random_bump(1), [0.1, 0.4, 0.2])
        assert curve.deltas == (0.4, 0.2, 0.1)
        d = curve.to_dict()
        assert d["deltas"] == [0.4, 0.2, 0.1]
