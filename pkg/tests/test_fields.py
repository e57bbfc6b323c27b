import math

import numpy as np
import pytest

from bskop.errors import DomainError, UnavailableDerivativeError
from bskop.fields import ScalarField, Singularity, catalog, catalog_names, differentiable_names


class TestCatalog:
    def test_names(self):
        assert catalog_names(1) == ["one", "pr1", "sq1", "exp", "cos", "step", "kink"]
        assert "prod" in catalog_names(2) and "pr2" in catalog_names(2)
        assert "step" not in differentiable_names(2)

    @pytest.mark.parametrize("name, x, expected", [
        ("one", (0.3, 0.2), 1.0),
        ("pr2", (0.3, 0.2), 0.2),
        ("sq1", (0.3, 0.2), 0.09),
        ("prod", (0.3, 0.2), 0.06),
        ("exp", (0.3, 0.2), math.exp(0.5)),
        ("cos", (0.3, 0.2), math.cos(0.3 * math.pi) * math.cos(0.2 * math.pi)),
        ("step", (0.5, 0.2), 1.0),
        ("step", (0.49, 0.2), 0.0),
        ("kink2@0.25", (0.9, 0.0), 0.25),
    ])
    def test_values(self, name, x, expected):
        assert catalog(name, 2)(*x) == pytest.approx(expected, abs=1e-15)

    def test_singularity_declarations(self):
        assert catalog("step@0.3", 1).singularities == (Singularity(0, 0.3, "jump"),)
        assert catalog("kink2", 2).jump_points(1) == []
        assert catalog("kink2", 2).singular_points(1) == [0.5]

    @pytest.mark.parametrize("name", ["sin", "pr", "one1", "exp@0.2", "pr0"])
    def test_unknown(self, name):
        with pytest.raises((KeyError, DomainError)):
            catalog(name, 2)

    def test_location_range(self):
        with pytest.raises(DomainError):
            catalog("step@1.5", 1)

    def test_axis_range(self):
        with pytest.raises(DomainError):
            catalog("pr3", 2)

    def test_domain_check(self):
        with pytest.raises(DomainError):
            catalog("pr1", 1)(-0.1)
        with pytest.raises(DomainError):
            catalog("pr1", 2)(0.1)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_exact_partials_of_cos(self, d):
        f = catalog("cos", d)
        pts = np.random.default_rng(5).random((7, d))
        alpha = (1,) + (0,) * (d - 1)
        expected = -math.pi * np.sin(math.pi * pts[:, 0]) * np.prod(np.cos(math.pi * pts[:, 1:]), axis=-1)
        np.testing.assert_allclose(f.partial(alpha).values(pts), expected, atol=1e-14)

    def test_nonsmooth_partials(self):
        with pytest.raises(UnavailableDerivativeError):
            catalog("step", 1).partial((1,))

    def test_mapping_partials(self):
        f = ScalarField(1, lambda x: x[..., 0] ** 3, partials={(1,): lambda x: 3 * x[..., 0] ** 2})
        assert f.has_partials
        assert f.partial((1,)).values(np.array([[0.5]]))[0] == pytest.approx(0.75)

    def test_singularity_validation(self):
        with pytest.raises(DomainError):
            Singularity(0, 0.5, "cusp")
