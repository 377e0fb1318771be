"""Shared fixtures and helpers for the test suite."""
from __future__ import annotations

import numpy as np
import pytest

from mrtpower.benchmarks import reference_design
from mrtpower.design import RandomizationSchedule, build_design
from mrtpower.trends import TrendSpec


@pytest.fixture
def heartsteps_design():
    """The worked-example design: 42 days x 5 decision times, constant
    availability 0.7, constant randomization 0.5, quadratic effect rising
    from 0 to a peak at day 29."""
    return build_design(
        days=42, per_day=5,
        randomization=RandomizationSchedule(mode="constant", values=0.5),
        availability=TrendSpec(kind="constant", average=0.7,
                               role="availability"),
        effect=TrendSpec(kind="quadratic", average=0.1, initial=0.0,
                         changing_point=29.0),
    )


@pytest.fixture
def row1_design():
    """First reference configuration: 100 days x 5, constant effect 0.12."""
    return reference_design(100, 5, 0)


def make_design(days=10, per_day=5, rho=0.5, tau=0.7, effect_kind="constant",
                effect_avg=0.12, effect_init=0.0, effect_cp=None, q=None):
    """Loose keyword-driven design builder for property tests."""
    if effect_kind == "constant":
        effect = TrendSpec(kind="constant", average=effect_avg)
    elif effect_kind == "linear":
        effect = TrendSpec(kind="linear", average=effect_avg,
                           initial=effect_init)
    else:
        effect = TrendSpec(kind="quadratic", average=effect_avg,
                           initial=effect_init,
                           changing_point=effect_cp
                           if effect_cp is not None else days / 2 + 1)
    rand = (RandomizationSchedule(mode="constant", values=rho)
            if np.isscalar(rho) else
            RandomizationSchedule(mode="per_time", values=np.asarray(rho)))
    return build_design(
        days=days, per_day=per_day, randomization=rand,
        availability=TrendSpec(kind="constant", average=tau,
                               role="availability"),
        effect=effect, q=q)
