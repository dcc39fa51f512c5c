"""Random-access theory cross-check: the medium reduces to the classic
ALOHA delivery ratios exp(-2G) (pure) and exp(-G) (slotted) when the
processing gain is 1 and attempts form a Poisson process."""

import math

import pytest

from uwbsim.validation import aloha_delivery_ratio, collision_channel


def test_collision_channel_has_no_spreading_margin():
    p = collision_channel()
    assert p.processing_gain == pytest.approx(1.0)
    p.validate()


@pytest.mark.parametrize("load", [0.1, 0.5, 1.0])
def test_pure_aloha_matches_exp_minus_2g(load):
    ratio = aloha_delivery_ratio(load, slotted=False, seed=42,
                                 n_attempts=12000)
    assert ratio == pytest.approx(math.exp(-2.0 * load), rel=0.05)


@pytest.mark.parametrize("load", [0.1, 0.5, 1.0])
def test_slotted_aloha_matches_exp_minus_g(load):
    ratio = aloha_delivery_ratio(load, slotted=True, seed=42,
                                 n_attempts=12000)
    assert ratio == pytest.approx(math.exp(-load), rel=0.05)


def test_slotting_doubles_throughput_at_unit_load():
    pure = aloha_delivery_ratio(1.0, slotted=False, seed=7, n_attempts=8000)
    slotted = aloha_delivery_ratio(1.0, slotted=True, seed=7, n_attempts=8000)
    assert slotted / pure == pytest.approx(math.e, rel=0.1)
