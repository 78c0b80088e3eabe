"""Deterministic large-instance builders for the acceptance tests.

Image-classifier scale: 196 inputs (14x14), a 10-unit relu classifier
and a 196-out autoencoder. Weights are seed-0 pseudorandom with
magnitudes around 1/fan_in. The autoencoder's biases are chosen so one
interior reference point reconstructs exactly; that keeps the instance
falsifiable, so termination can be checked together with counterexample
replay instead of waiting on an exhaustive proof.
"""

from __future__ import annotations

import random
from fractions import Fraction

from relucheck.network import Network, evaluate

from conftest import mk_net

INPUT_DIM = 196
HIDDEN = 10
DEN = 10**6


def _q(rng: random.Random, scale: Fraction) -> str:
    # uniform multiple of scale/DEN in [-scale, scale]; every weight in a
    # row shares one denominator, which keeps the exact tableau narrow
    return str(Fraction(rng.randrange(-DEN, DEN + 1), DEN) * scale)


def _matrix(rng, rows, cols, scale):
    return [[_q(rng, scale) for _ in range(cols)] for _ in range(rows)]


def reference_point() -> tuple[Fraction, ...]:
    # interior, irregular, deterministic
    return tuple(Fraction(97 * (i + 1) % 53 + 1, 110) for i in range(INPUT_DIM))


def build_classifier() -> Network:
    rng = random.Random(0)
    w1 = _matrix(rng, HIDDEN, INPUT_DIM, Fraction(1, INPUT_DIM))
    b1 = [str(Fraction(rng.randrange(DEN + 1), DEN)) for _ in range(HIDDEN)]
    w2 = _matrix(rng, HIDDEN, HIDDEN, Fraction(1, HIDDEN))
    b2 = [str(Fraction(rng.randrange(DEN + 1), DEN)) for _ in range(HIDDEN)]
    return mk_net(
        "bigf", INPUT_DIM, [(w1, b1, "relu"), (w2, b2, "linear")]
    )


def build_autoencoder() -> Network:
    rng = random.Random(1)
    xstar = reference_point()
    w1 = [
        [Fraction(_q(rng, Fraction(1, INPUT_DIM))) for _ in range(INPUT_DIM)]
        for _ in range(HIDDEN)
    ]
    # bias so the hidden pre-activation at the reference point is a fixed
    # positive target in (0, 1): the relu is strictly active there
    targets = [Fraction(k + 2, HIDDEN + 3) for k in range(HIDDEN)]
    b1 = []
    for k in range(HIDDEN):
        acc = sum(w1[k][i] * xstar[i] for i in range(INPUT_DIM))
        b1.append(targets[k] - acc)
    w2 = [
        [Fraction(_q(rng, Fraction(1, HIDDEN))) for _ in range(HIDDEN)]
        for _ in range(INPUT_DIM)
    ]
    # output bias makes the reference point reconstruct exactly
    b2 = []
    for i in range(INPUT_DIM):
        acc = sum(w2[i][k] * targets[k] for k in range(HIDDEN))
        b2.append(xstar[i] - acc)
    return mk_net(
        "bigae",
        INPUT_DIM,
        [
            ([[str(v) for v in row] for row in w1], [str(v) for v in b1], "relu"),
            ([[str(v) for v in row] for row in w2], [str(v) for v in b2], "linear"),
        ],
    )


def winning_class(net: Network) -> int:
    out, _ = evaluate(net, reference_point())
    best = max(range(len(out)), key=lambda i: (out[i], -i))
    # the acceptance instance needs a strict winner at the reference point
    assert all(out[j] < out[best] for j in range(len(out)) if j != best)
    return best
