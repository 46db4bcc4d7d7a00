import numpy as np
import pytest

from dpdfit.datagen import ContaminationSpec, Dataset, contaminated_sample
from dpdfit.models import IsoNormal, Normal1D, NormalParams


def normal_spec(**overrides):
    model = Normal1D()
    base = dict(
        model=model,
        truth=model.from_natural(NormalParams(mu=0.0, sigma=1.0)),
        outlier_mean=10.0,
        outlier_sd=1.0,
        xi=0.1,
        n=1000,
    )
    base.update(overrides)
    return ContaminationSpec(**base)


class TestContaminatedSample:
    def test_no_contamination(self):
        ds = contaminated_sample(normal_spec(xi=0.0), np.random.default_rng(0))
        assert ds.n == 1000
        assert not ds.is_outlier.any()

    def test_near_total_contamination(self):
        ds = contaminated_sample(normal_spec(xi=1 - 1e-12, n=100),
                                 np.random.default_rng(1))
        assert ds.is_outlier.all()

    def test_outlier_fraction_concentrates(self):
        ds = contaminated_sample(normal_spec(n=100_000), np.random.default_rng(2))
        assert abs(ds.is_outlier.mean() - 0.1) < 0.005

    def test_outliers_come_from_the_cloud(self):
        ds = contaminated_sample(normal_spec(n=5000), np.random.default_rng(3))
        assert ds.points[ds.is_outlier].min() > 4.0
        assert ds.points[~ds.is_outlier].max() < 6.0

    def test_fixed_count_mode(self):
        spec = normal_spec(n=500, xi=0.01, fixed_count=True)
        for seed in range(5):
            ds = contaminated_sample(spec, np.random.default_rng(seed))
            assert int(ds.is_outlier.sum()) == 5

    def test_seed_determinism(self):
        spec = normal_spec()
        a = contaminated_sample(spec, np.random.default_rng(42))
        b = contaminated_sample(spec, np.random.default_rng(42))
        np.testing.assert_array_equal(a.points, b.points)
        np.testing.assert_array_equal(a.is_outlier, b.is_outlier)

    def test_multivariate_points(self):
        model = IsoNormal(3)
        spec = ContaminationSpec(
            model=model,
            truth=np.full(3, 0.5),
            outlier_mean=np.full(3, 100.5),
            outlier_sd=0.1,
            xi=0.01,
            n=500,
            fixed_count=True,
        )
        ds = contaminated_sample(spec, np.random.default_rng(4))
        assert ds.points.shape == (500, 3)
        assert np.allclose(ds.points[ds.is_outlier].mean(axis=0), 100.5, atol=0.3)

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            normal_spec(xi=1.0)
        with pytest.raises(ValueError):
            normal_spec(n=0)


class TestDatasetCsv:
    def test_roundtrip_scalar(self, tmp_path):
        ds = contaminated_sample(normal_spec(n=200), np.random.default_rng(5))
        path = tmp_path / "data.csv"
        ds.to_csv(path)
        back = Dataset.from_csv(path)
        np.testing.assert_array_equal(back.points, ds.points)
        np.testing.assert_array_equal(back.is_outlier, ds.is_outlier)

    def test_roundtrip_multivariate(self, tmp_path):
        model = IsoNormal(2)
        spec = ContaminationSpec(
            model=model, truth=np.zeros(2), outlier_mean=np.full(2, 10.0),
            outlier_sd=1.0, xi=0.2, n=50,
        )
        ds = contaminated_sample(spec, np.random.default_rng(6))
        path = tmp_path / "data.csv"
        ds.to_csv(path)
        back = Dataset.from_csv(path)
        np.testing.assert_array_equal(back.points, ds.points)
        np.testing.assert_array_equal(back.is_outlier, ds.is_outlier)
