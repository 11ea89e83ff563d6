import numpy as np
import pytest

import kgchain as kg


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_state(params: kg.LatticeParams, rng, scale=1.0) -> kg.SiteState:
    n = params.n_sites
    return kg.SiteState(scale * rng.normal(size=n), scale * rng.normal(size=n))
