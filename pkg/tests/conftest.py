import random
from fractions import Fraction

import pytest

from mmsfair import Instance

EX23_TEXT = """\
# three players, five items
3 5
1/2 1/2 1/3 1/3 1/3
1/2 1/4 1/4 1/4 0
1/2 1/2 1 1/2 1/2
"""


@pytest.fixture
def ex23() -> Instance:
    """The 3x5 instance used throughout: shares 1/2, 1/4, 1 for 3 bundles."""
    return Instance.from_rows(
        [
            [Fraction(1, 2), Fraction(1, 2), Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)],
            [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4), Fraction(1, 4), 0],
            [Fraction(1, 2), Fraction(1, 2), 1, Fraction(1, 2), Fraction(1, 2)],
        ]
    )


def random_instance(rng: random.Random, n: int, m: int, top: int = 9) -> Instance:
    return Instance.from_rows(
        [[rng.randrange(top + 1) for _ in range(m)] for _ in range(n)]
    )
