"""
Example tables and generalized polygons shared by the tests.
"""
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from src.billiards.tables import NibbledEllipse
from src.polygons.generalized import build_generalized
from src.polygons.staircase import GammaElement, StaircaseProfile, build_basic

SYMMETRIC_K1 = {
    "a": 2.0,
    "b": 1.0,
    "quadrants": {q: {"alphas": [2.0, 1.0], "betas": [0.0, 0.5]} for q in ("pp", "pm", "mp", "mm")},
}

ASYMMETRIC_K2 = {
    "a": 2.0,
    "b": 1.0,
    "quadrants": {
        "pp": {"alphas": [2.0, 1.6, 1.0], "betas": [0.0, 0.2, 0.7]},
        "pm": {"alphas": [2.0, 1.4, 1.0], "betas": [0.0, 0.3, 0.7]},
        "mp": {"alphas": [2.0, 1.5, 1.0], "betas": [0.0, 0.2, 0.6]},
        "mm": {"alphas": [2.0, 1.3, 1.0], "betas": [0.0, 0.3, 0.6]},
    },
}

MIXED_K = {
    "a": 3.0,
    "b": 1.5,
    "quadrants": {
        "pp": {"alphas": [3.0, 2.5, 2.0, 1.5], "betas": [0.0, 0.3, 0.6, 1.1]},
        "pm": {"alphas": [3.0, 2.2, 1.5], "betas": [0.0, 0.5, 1.1]},
        "mp": {"alphas": [3.0, 2.4, 1.5], "betas": [0.0, 0.3, 0.9]},
        "mm": {"alphas": [3.0, 2.0, 1.5], "betas": [0.0, 0.5, 0.9]},
    },
}

TEN_PART_TYPES = {
    1: GammaElement.ID,
    2: GammaElement.V,
    3: GammaElement.ID,
    4: GammaElement.H,
    5: GammaElement.VH,
    6: GammaElement.H,
    7: GammaElement.VH,
    8: GammaElement.V,
    9: GammaElement.ID,
    10: GammaElement.V,
}

TEN_PART_RELATIONS = {
    "V": [(1, 2), (4, 5), (6, 7), (9, 10)],
    "H": [(5, 8), (6, 9), (7, 10)],
    "v": [(2, 3), (5, 6), (7, 4), (8, 9)],
    "h": [(1, 4), (2, 5), (3, 6)],
}


def symmetric_table() -> NibbledEllipse:
    """a=2, b=1, every quadrant k=1 with β_1 = 0.5."""
    return NibbledEllipse.from_dict(SYMMETRIC_K1)


def asymmetric_table() -> NibbledEllipse:
    """a=2, b=1, k=2 in every quadrant with β^t=0.2 < β^b=0.3 < β^l=0.6 < β^r=0.7."""
    return NibbledEllipse.from_dict(ASYMMETRIC_K2)


def mixed_table() -> NibbledEllipse:
    """a=3, b=1.5, k=(3, 2, 2, 2) with β^t=0.3 < β^b=0.5 < β^l=0.9 < β^r=1.1."""
    return NibbledEllipse.from_dict(MIXED_K)


def symmetric(pairs):
    return [p for m, n in pairs for p in ((m, n), (n, m))]


def two_rectangle_polygon(width: float = 2.0, other_width: float = 1.5, height: float = 1.0):
    """P₁ = [0,w]×[0,h] and P₂ = [−w′,0]×[0,h] glued along their long vertical sides."""
    first = build_basic(StaircaseProfile((width,), (height,)), GammaElement.ID, 1)
    second = build_basic(StaircaseProfile((other_width,), (height,)), GammaElement.V, 2)
    return build_generalized([first, second], {"V": symmetric([(1, 2)])})


def ten_part_polygon():
    """Ten k=2 parts with x̄=(1,2), ȳ=(2,1) and a mixed gluing pattern."""
    profile = StaircaseProfile((1.0, 2.0), (2.0, 1.0))
    parts = [build_basic(profile, gamma, label) for label, gamma in TEN_PART_TYPES.items()]
    relations = {kind: symmetric(pairs) for kind, pairs in TEN_PART_RELATIONS.items()}
    return build_generalized(parts, relations)
