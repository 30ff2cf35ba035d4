"""Hypothesis strategies shared by the property tests."""

import numpy as np
from hypothesis import strategies as hs
from hypothesis.extra.numpy import arrays

from covariant_em.exterior import KForm, Metric
from covariant_em.sampling import random_metric

finite = hs.floats(-10, 10, allow_nan=False, allow_infinity=False)


def kforms(degree):
    from math import comb
    return arrays(float, (comb(4, degree),), elements=finite).map(lambda a: KForm(degree, a))


@hs.composite
def metrics(draw):
    seed = draw(hs.integers(0, 2**32 - 1))
    return random_metric(np.random.default_rng(seed))


seeds = hs.integers(0, 2**32 - 1)
