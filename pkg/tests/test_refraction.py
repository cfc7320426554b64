import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helmopen.errors import NonPositiveIndex, OriginSingularity, ParseError
from helmopen.refraction import (
    AngularLinear,
    Constant,
    GaussianPair,
    check_admissibility,
    eval_n,
    parse_refraction,
    radial_average_n,
)

MODELS = [Constant(1.0), Constant(2.0), GaussianPair(), AngularLinear(0.1), AngularLinear(0.8)]


def test_point_values():
    assert eval_n(AngularLinear(0.1), (1.0, 0.0)) == pytest.approx(2.1, abs=1e-15)
    assert eval_n(AngularLinear(0.1), (-1.0, 0.0)) == pytest.approx(1.9, abs=1e-15)
    assert eval_n(GaussianPair(), (1.0, 0.0)) == pytest.approx(2 + 1 + math.exp(-4), abs=1e-12)
    assert eval_n(GaussianPair(), (1.0, 0.0)) == pytest.approx(3.0183156, abs=1e-7)
    assert eval_n(Constant(2.0), (0.3, -7.0)) == 2.0


@pytest.mark.parametrize("model", [GaussianPair(), AngularLinear(0.1)])
def test_origin_singularity(model):
    with pytest.raises(OriginSingularity):
        eval_n(model, (0.0, 0.0))


@pytest.mark.parametrize("r", [0.3, 1.0, 4.5])
def test_radial_averages(r):
    assert radial_average_n(Constant(1.7), r) == pytest.approx(1.7, abs=1e-15)
    assert radial_average_n(AngularLinear(0.6), r) == pytest.approx(2.0, abs=1e-14)


def test_gaussian_average_far_away():
    assert abs(radial_average_n(GaussianPair(), 10.0) - 2.0) < 1e-6


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.tag())
@pytest.mark.parametrize("r", [0.5, 1.0, 3.0])
def test_average_stable_under_doubling(model, r):
    assert abs(radial_average_n(model, r, 64) - radial_average_n(model, r, 128)) <= 1e-12


def test_admissibility_constant():
    a = check_admissibility(Constant(3.0), 8.0)
    assert a.sup_deviation == 0.0 and a.admissible


@settings(max_examples=20, deadline=None)
@given(a=st.floats(0.0, 1.9))
def test_angular_sup_deviation(a):
    assert check_admissibility(AngularLinear(a), 4.0).sup_deviation == pytest.approx(a / (2 - a), abs=1e-6)


def test_angular_sup_deviation_example():
    assert check_admissibility(AngularLinear(0.1), 8.0).sup_deviation == pytest.approx(0.052632, abs=1e-6)


def test_nonpositive_index():
    with pytest.raises(NonPositiveIndex):
        check_admissibility(AngularLinear(2.5), 2.0)
    with pytest.raises(NonPositiveIndex):
        Constant(0.0)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.tag())
def test_bounds_hold_at_random_points(model):
    rng = np.random.default_rng(42)
    r = rng.uniform(1e-3, 20.0, 10_000)
    t = rng.uniform(0, 2 * np.pi, 10_000)
    n = model(np.column_stack([r * np.cos(t), r * np.sin(t)]))
    assert n.min() >= model.lower_bound - 1e-12
    assert n.max() <= model.upper_bound + 1e-12


@pytest.mark.parametrize(
    "text,expected",
    [("constant:2.0", Constant(2.0)), ("gaussian_pair", GaussianPair()), ("angular:0.1", AngularLinear(0.1)), (" Angular:0.8 ", AngularLinear(0.8)), ("angular", AngularLinear(0.1))],
)
def test_parse(text, expected):
    assert parse_refraction(text) == expected


@pytest.mark.parametrize("text", ["", "constant:abc", "angular:-1", "gaussian_pair:3", "cubic:1"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_refraction(text)
