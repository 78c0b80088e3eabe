"""Shared test helpers.

The important piece is the reference decision procedure in oracle.py:
tests compare the real solver against exhaustive relu-phase enumeration
plus Fourier-Motzkin elimination, which shares no code with the simplex
or the DPLL search.
"""

from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from relucheck.network import Network, load_network


def mk_net(name: str, input_dim: int, layers: list[tuple]) -> Network:
    """Build a network through the JSON loader so the real path is used.

    layers entries are (weights, bias, activation) with int or "p/q"
    cell values."""
    doc = {
        "name": name,
        "input_dim": input_dim,
        "layers": [
            {"weights": w, "bias": b, "activation": act} for w, b, act in layers
        ],
    }
    return load_network(json.dumps(doc))


def write_net(path, net_doc: dict) -> None:
    path.write_text(json.dumps(net_doc))


def rand_frac(rng: random.Random, span: int = 2, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-span * den, span * den), den)


def random_network(
    rng: random.Random,
    name: str = "n",
    input_dim: int | None = None,
    max_hidden_layers: int = 2,
    max_width: int = 3,
    output_dim: int | None = None,
) -> Network:
    if input_dim is None:
        input_dim = rng.randint(1, 3)
    widths = [input_dim]
    for _ in range(rng.randint(1, max_hidden_layers)):
        widths.append(rng.randint(1, max_width))
    widths.append(output_dim if output_dim is not None else rng.randint(1, max_width))
    layers = []
    for k in range(1, len(widths)):
        act = "relu" if k < len(widths) - 1 else "linear"
        w = [
            [str(rand_frac(rng)) for _ in range(widths[k - 1])]
            for _ in range(widths[k])
        ]
        b = [str(rand_frac(rng)) for _ in range(widths[k])]
        layers.append((w, b, act))
    return mk_net(name, input_dim, layers)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0)
