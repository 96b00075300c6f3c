"""Exact grid helpers shared by the certificates.

Grid points are the dyadic rationals k / 2^G. They are handled through their
integer numerators k, and grids of function values are brought to a common
denominator so the inner loops compare plain integers.
"""

import math
from collections.abc import Sequence
from fractions import Fraction


def grid_numerators(depth: int, grid_depth: int) -> list[int]:
    """Numerators k of the certified grid {k / 2^G} ∩ ([2^-N, 1] ∪ {0}), ascending.

    Args:
        depth: N, the resolution of the phi function.
        grid_depth: G, so the grid spacing is 2^-G.

    Returns:
        [0, k_min, k_min + 1, ..., 2^G] where k_min / 2^G is the first point >= 2^-N.
    """
    top = 2**grid_depth
    k_min = 2 ** (grid_depth - depth) if grid_depth >= depth else 1
    return [0, *range(k_min, top + 1)]


def grid_point(k: int, grid_depth: int) -> Fraction:
    """The grid point k / 2^G."""
    return Fraction(k, 2**grid_depth)


def least_grid_numerator_above(threshold: Fraction, grid_depth: int, k_min: int) -> int:
    """Smallest k >= k_min with k / 2^G > threshold (threshold >= 0)."""
    scaled = threshold * 2**grid_depth
    return max(math.floor(scaled) + 1, k_min)


def common_denominator(values: Sequence[Fraction]) -> tuple[list[int], int]:
    """Scale `values` to integers over their least common denominator.

    Returns:
        (numerators, denominator) with values[i] == numerators[i] / denominator.
    """
    denominator = math.lcm(*(v.denominator for v in values)) if values else 1
    return [v.numerator * (denominator // v.denominator) for v in values], denominator

