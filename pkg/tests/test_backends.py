"""Agreement between the compiled extension and the numpy fallback."""

import numpy as np
import pytest

from expkant import _kernels_py, backend

pytestmark = pytest.mark.skipif(
    not backend.HAVE_COMPILED,
    reason="compiled extension not built; nothing to compare")

from expkant import _fastkern  # noqa: E402


def grids():
    rng = np.random.default_rng(12)
    yield np.linspace(-8.0, 8.0, 5001)
    yield rng.uniform(-50.0, 50.0, 2000)
    yield np.array([0.0, 1.5, -1.5, 0.5, -0.5])  # spline knots


class TestPointwiseAgreement:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_bspline(self, n):
        for v in grids():
            np.testing.assert_allclose(_fastkern.bspline_values(v, n),
                                       _kernels_py.bspline_values(v, n),
                                       rtol=0, atol=1e-12)

    def test_fejer(self):
        for v in grids():
            np.testing.assert_allclose(_fastkern.fejer_values(v),
                                       _kernels_py.fejer_values(v),
                                       rtol=0, atol=1e-12)


class TestSumAgreement:
    def setup_method(self):
        rng = np.random.default_rng(3)
        self.y = np.linspace(0.0, 1.0, 257)
        self.t = np.arange(-40.0, 41.0)
        self.coeffs = rng.standard_normal(self.t.size)

    @pytest.mark.parametrize("kind,n", [(backend.KIND_BSPLINE, 2),
                                        (backend.KIND_BSPLINE, 4),
                                        (backend.KIND_FEJER, 0)])
    @pytest.mark.parametrize("beta", [0.0, 0.5, 2.0])
    def test_phase_weighted_sum(self, kind, n, beta):
        a = _fastkern.phase_weighted_sum(self.y, self.t, beta, kind, n)
        b = _kernels_py.phase_weighted_sum(self.y, self.t, beta, kind, n)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-13)

    @pytest.mark.parametrize("kind,n", [(backend.KIND_BSPLINE, 2),
                                        (backend.KIND_BSPLINE, 5),
                                        (backend.KIND_FEJER, 0)])
    def test_weighted_series_sum(self, kind, n):
        a = _fastkern.weighted_series_sum(self.y, self.t, self.coeffs, kind, n)
        b = _kernels_py.weighted_series_sum(self.y, self.t, self.coeffs,
                                            kind, n)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-13)


class TestBackendSelection:
    def test_active_backend_exports(self):
        assert backend.BACKEND in ("compiled", "python")
        assert callable(backend.bspline_values)
        assert callable(backend.weighted_series_sum)

    def test_python_fallback_forced(self):
        # the fallback must be importable and callable on its own
        v = np.linspace(-2, 2, 11)
        out = _kernels_py.bspline_values(v, 2)
        assert out.shape == v.shape
        assert out[5] == pytest.approx(0.75)
