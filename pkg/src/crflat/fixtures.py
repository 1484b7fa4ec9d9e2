"""Reference maps used throughout the test suite and the documentation."""
from __future__ import annotations

import json

from .maps import MapSpec, cayley, parse_map


def linear_fixture(n: int = 1, N: int = 2) -> MapSpec:
    """The standard linear embedding (z, 0, w) of H^{n+1} into H^{N+1}."""
    comps = [f"z{k + 1}" for k in range(n)] + ["0"] * (N - n) + ["w"]
    return parse_map(json.dumps({
        "model": "siegel", "n": n, "N": N, "components": comps, "name": "linear",
    }))


def whitney_ball() -> MapSpec:
    """Whitney map B^2 -> B^3: (z, w) -> (z, z w, w^2)."""
    return parse_map(json.dumps({
        "model": "ball", "n": 1, "N": 2,
        "components": ["z1", "z1*w", "w^2"],
        "name": "whitney-ball",
    }))


def whitney_siegel() -> MapSpec:
    """Whitney map transported to the Siegel model by the Cayley transform."""
    return cayley(whitney_ball())


def rank_one_exact() -> MapSpec:
    """A rational proper map H^2 -> H^4 that is fully normalized at the origin.

    f = z/(1-2iw), phi = (2z^2, 2zw)/(1-2iw), g = w; at 0 it satisfies the
    third-stage normal form exactly with mu_1 = 4 and mu_11 = 2, all
    coefficients Gaussian-rational.
    """
    return parse_map(json.dumps({
        "model": "siegel", "n": 1, "N": 3,
        "components": [
            "z1/(1-2*i*w)",
            "2*z1^2/(1-2*i*w)",
            "2*z1*w/(1-2*i*w)",
            "w",
        ],
        "name": "rank-one-normalized",
    }))


def non_proper_fixture() -> MapSpec:
    """(z, 0, w + z^2): fails the properness identity at weight two."""
    return parse_map(json.dumps({
        "model": "siegel", "n": 1, "N": 2,
        "components": ["z1", "0", "w+z1^2"],
        "name": "non-proper",
    }))
