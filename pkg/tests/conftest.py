import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracles.py

from faircon.core import Allocation, Contract, Instance
from faircon.instances import gen_example, gen_random


@pytest.fixture
def ex52() -> Instance:
    """Example instance at eps = 1/100: one task, a weak cheap agent and a
    strong expensive one."""
    return gen_example("5.2", Fraction(1, 100))


def make_contract(inst: Instance, assignment, alphas, subsidies=None) -> Contract:
    return Contract(
        Allocation(tuple(assignment), inst.n),
        tuple(Fraction(a) if not isinstance(a, float) else Fraction(a) for a in alphas),
        tuple(subsidies) if subsidies is not None else None,
    )


def random_instances(count, n_max, m_max, seed0=1000, profile_mix=True):
    """Seeded random instances with sizes cycling up to the caps."""
    from faircon.instances import PROFILES

    out = []
    for t in range(count):
        n = 1 + (t % n_max)
        m = 1 + (t * 3 + 1) % m_max
        profile = PROFILES[t % len(PROFILES)] if profile_mix else "uniform"
        out.append(gen_random(n, m, seed0 + t, profile))
    return out
