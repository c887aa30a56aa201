import pytest

from bslab import hyperbolic as hyp


@pytest.fixture(scope="session")
def octagon():
    return hyp.build_octagon_group()


@pytest.fixture(scope="session")
def ball8(octagon):
    """Cutoff 2 * 0.6 systole + 2 circumradius: decides InjRad <= R for R <= 0.6 systole."""
    return hyp.group_ball(octagon, hyp.required_cutoff(0.6 * hyp.SYSTOLE))
