import json
import random
from fractions import Fraction

import pytest

from relucheck.network import (
    NetworkFormatError,
    as_graph,
    evaluate,
    load_network,
    render_network,
    validate,
)

from conftest import mk_net, random_network


# hand-computed: hidden relu([1,-1;2,0]x + [0,-1]), output [1,1]x + 1/2
# at x=(1,2): pre (-1, 1) -> post (0, 1) -> output 3/2
FROZEN_NET = [
    ([[1, -1], [2, 0]], [0, -1], "relu"),
    ([[1, 1]], ["1/2"], "linear"),
]


def test_evaluate_frozen_example():
    net = mk_net("t", 2, FROZEN_NET)
    out, trace = evaluate(net, (Fraction(1), Fraction(2)))
    assert trace.pre[0] == (Fraction(-1), Fraction(1))
    assert trace.post[0] == (Fraction(0), Fraction(1))
    assert out == (Fraction(3, 2),)


def test_evaluate_checks_input_arity():
    net = mk_net("t", 2, FROZEN_NET)
    with pytest.raises(ValueError):
        evaluate(net, (Fraction(1),))


def test_load_parses_decimals_exactly():
    net = mk_net("t", 1, [([[0.1]], [0], "linear")])
    assert net.layers[0].weights[0][0] == Fraction(1, 10)


def test_load_accepts_pq_strings():
    net = mk_net("t", 1, [([["-3/7"]], ["1/2"], "linear")])
    assert net.layers[0].weights[0][0] == Fraction(-3, 7)
    assert net.layers[0].bias[0] == Fraction(1, 2)


def test_dims():
    net = mk_net("t", 2, FROZEN_NET)
    assert net.input_dim == 2
    assert net.output_dim == 1
    # input width first, then each layer
    assert net.layer_sizes() == (2, 2, 1)


def test_render_round_trip():
    net = mk_net("t", 2, FROZEN_NET)
    again = load_network(render_network(net))
    assert again == net


def test_render_round_trip_random(rng):
    for k in range(25):
        net = random_network(rng, name=f"n{k}")
        assert load_network(render_network(net)) == net


def test_validate_reports_each_problem():
    doc = {
        "name": "bad",
        "input_dim": 2,
        "layers": [
            {"weights": [[1, 2], [3]], "bias": [0], "activation": "relu"},
            {"weights": [[1, 1, 1]], "bias": [0], "activation": "tanh"},
        ],
    }
    with pytest.raises(NetworkFormatError) as err:
        load_network(json.dumps(doc))
    text = str(err.value)
    assert "layer 0" in text  # ragged rows / bias mismatch
    assert "layer 1" in text  # width mismatch and unknown activation
    assert "tanh" in text


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("name"),
        lambda d: d.update(input_dim=0),
        lambda d: d.update(layers=[]),
        lambda d: d["layers"][0].update(weights=[]),
        lambda d: d["layers"][0].update(bias="x"),
    ],
)
def test_load_rejects_malformed(mutate):
    doc = {
        "name": "n",
        "input_dim": 1,
        "layers": [{"weights": [[1]], "bias": [0], "activation": "linear"}],
    }
    mutate(doc)
    with pytest.raises(NetworkFormatError):
        load_network(json.dumps(doc))


def test_load_rejects_non_json():
    with pytest.raises(NetworkFormatError):
        load_network("{not json")


def test_validate_on_good_network_is_empty():
    net = mk_net("t", 2, FROZEN_NET)
    assert validate(net) == []


def test_graph_matches_layer_evaluation(rng):
    # graph view must agree with the layer evaluator on random nets
    for k in range(10):
        net = random_network(rng, name=f"g{k}")
        graph = as_graph(net)
        incoming: dict = {}
        for src, dst, w in graph.edges:
            incoming.setdefault(dst, []).append((src, w))
        nodes = sorted(graph.activation, key=lambda n: (n.layer, n.index))
        for _ in range(5):
            x = tuple(Fraction(rng.randint(-4, 4), 2) for _ in range(net.input_dim))
            out, _ = evaluate(net, x)
            values = {node: x[i] for i, node in enumerate(graph.inputs)}
            for node in nodes:
                acc = graph.bias[node]
                for src, w in incoming.get(node, ()):
                    acc += w * values[src]
                if graph.activation[node] == "relu" and acc < 0:
                    acc = Fraction(0)
                values[node] = acc
            assert tuple(values[n] for n in graph.outputs) == out
