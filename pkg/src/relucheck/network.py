"""Feed-forward network model with exact-rational weights.

A network is a stack of dense layers, each ReLU or linear (identity).
Weights load from a small JSON format in which every number may be an
integer, a decimal string, or a "p/q" string; all three parse exactly.
Evaluation is exact and returns a per-neuron trace alongside the output
vector, which the rest of the tool uses to cross-check solver models.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .rationals import format_rational, parse_rational

RELU = "relu"
LINEAR = "linear"
_ACTIVATIONS = (RELU, LINEAR)


class NetworkFormatError(ValueError):
    """Raised for malformed network documents; message lists every violation."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("\n".join(self.violations))


@dataclass(frozen=True)
class Layer:
    """One dense layer. weights[i][j] feeds input j into neuron i."""

    weights: tuple[tuple[Fraction, ...], ...]
    bias: tuple[Fraction, ...]
    activation: str

    @property
    def size(self) -> int:
        return len(self.bias)

    @property
    def fan_in(self) -> int:
        return len(self.weights[0]) if self.weights else 0


@dataclass(frozen=True)
class Network:
    name: str
    input_dim: int
    layers: tuple[Layer, ...]

    @property
    def output_dim(self) -> int:
        return self.layers[-1].size

    def layer_sizes(self) -> tuple[int, ...]:
        return (self.input_dim,) + tuple(layer.size for layer in self.layers)


@dataclass(frozen=True)
class EvalTrace:
    """Pre- and post-activation values for every non-input neuron.

    pre[l][i] is the weighted sum feeding neuron i of layer l, post[l][i]
    the value after the activation. For linear layers the two coincide.
    """

    pre: tuple[tuple[Fraction, ...], ...]
    post: tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class NodeRef:
    """Graph-view node id: layer -1 for inputs, 0-based layers otherwise."""

    layer: int
    index: int


@dataclass(frozen=True)
class NetworkGraph:
    """Weighted-DAG view of a network for structural consumers.

    Edges carry the (nonzero) dense weights; activation and bias are maps
    over non-input nodes only.
    """

    inputs: tuple[NodeRef, ...]
    outputs: tuple[NodeRef, ...]
    edges: tuple[tuple[NodeRef, NodeRef, Fraction], ...]
    activation: dict[NodeRef, str] = field(hash=False)
    bias: dict[NodeRef, Fraction] = field(hash=False)


def _parse_matrix(raw: object, errors: list[str], where: str) -> tuple[tuple[Fraction, ...], ...]:
    if not isinstance(raw, list) or not raw:
        errors.append(f"{where}: weights must be a non-empty list of rows")
        return ()
    rows = []
    for i, row in enumerate(raw):
        if not isinstance(row, list):
            errors.append(f"{where}: weights row {i} is not a list")
            return ()
        try:
            rows.append(tuple(parse_rational(v) for v in row))
        except ValueError as exc:
            errors.append(f"{where}: weights row {i}: {exc}")
            return ()
    return tuple(rows)


def _parse_vector(raw: object, errors: list[str], where: str) -> tuple[Fraction, ...]:
    if not isinstance(raw, list):
        errors.append(f"{where}: bias must be a list")
        return ()
    try:
        return tuple(parse_rational(v) for v in raw)
    except ValueError as exc:
        errors.append(f"{where}: bias: {exc}")
        return ()


def load_network(text: str) -> Network:
    """Parse a JSON network document and validate it.

    Decimal literals in the JSON are intercepted before float conversion,
    so 0.1 means exactly 1/10.
    """
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError([f"invalid JSON: {exc}"]) from exc
    if not isinstance(doc, dict):
        raise NetworkFormatError(["document must be a JSON object"])

    errors: list[str] = []
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        errors.append("missing or empty network name")
        name = "?"
    input_dim = doc.get("input_dim")
    if not isinstance(input_dim, int) or isinstance(input_dim, bool) or input_dim < 1:
        errors.append("input_dim must be a positive integer")
        input_dim = 1
    raw_layers = doc.get("layers")
    if not isinstance(raw_layers, list) or not raw_layers:
        errors.append("layers must be a non-empty list")
        raise NetworkFormatError(errors)

    layers = []
    for idx, raw in enumerate(raw_layers):
        where = f"layer {idx}"
        if not isinstance(raw, dict):
            errors.append(f"{where}: not an object")
            continue
        activation = raw.get("activation")
        if activation not in _ACTIVATIONS:
            errors.append(
                f"{where}: unknown activation {activation!r}, expected one of {_ACTIVATIONS}"
            )
            activation = LINEAR
        weights = _parse_matrix(raw.get("weights"), errors, where)
        bias = _parse_vector(raw.get("bias"), errors, where)
        layers.append(Layer(weights=weights, bias=bias, activation=activation))

    net = Network(name=name, input_dim=input_dim, layers=tuple(layers))
    errors.extend(validate(net))
    if errors:
        raise NetworkFormatError(errors)
    return net


def validate(net: Network) -> list[str]:
    """Return one message per violated structural invariant (empty if sound)."""
    errors: list[str] = []
    if net.input_dim < 1:
        errors.append("input_dim must be a positive integer")
    if not net.layers:
        errors.append("network needs at least one layer")
        return errors
    prev = net.input_dim
    for idx, layer in enumerate(net.layers):
        where = f"layer {idx}"
        if layer.activation not in _ACTIVATIONS:
            errors.append(f"{where}: unknown activation {layer.activation!r}")
        if not layer.weights:
            errors.append(f"{where}: empty weight matrix")
            continue
        if len(layer.weights) != len(layer.bias):
            errors.append(
                f"{where}: {len(layer.weights)} weight rows but {len(layer.bias)} bias entries"
            )
        widths = {len(row) for row in layer.weights}
        if len(widths) != 1:
            errors.append(f"{where}: ragged weight rows {sorted(widths)}")
            continue
        (width,) = widths
        if width != prev:
            errors.append(f"{where}: expects {width} inputs but previous width is {prev}")
        prev = len(layer.weights)
    return errors


def render_network(net: Network) -> str:
    """Serialize back to the JSON format; load_network(render_network(n)) == n."""
    doc = {
        "name": net.name,
        "input_dim": net.input_dim,
        "layers": [
            {
                "activation": layer.activation,
                "weights": [[format_rational(w) for w in row] for row in layer.weights],
                "bias": [format_rational(b) for b in layer.bias],
            }
            for layer in net.layers
        ],
    }
    return json.dumps(doc, indent=1)


def evaluate(net: Network, inputs: Sequence[Fraction]) -> tuple[tuple[Fraction, ...], EvalTrace]:
    """Exact forward pass. Returns the output vector and the full trace."""
    if len(inputs) != net.input_dim:
        raise ValueError(f"network {net.name} expects {net.input_dim} inputs, got {len(inputs)}")
    current: tuple[Fraction, ...] = tuple(Fraction(x) for x in inputs)
    pres: list[tuple[Fraction, ...]] = []
    posts: list[tuple[Fraction, ...]] = []
    zero = Fraction(0)
    for layer in net.layers:
        pre = tuple(
            sum((w * x for w, x in zip(row, current)), b)
            for row, b in zip(layer.weights, layer.bias)
        )
        if layer.activation == RELU:
            post = tuple(v if v > zero else zero for v in pre)
        else:
            post = pre
        pres.append(pre)
        posts.append(post)
        current = post
    return current, EvalTrace(pre=tuple(pres), post=tuple(posts))


def as_graph(net: Network) -> NetworkGraph:
    """Expose the weighted-graph view (inputs, outputs, edges, activation, bias).

    Zero weights contribute no edge.
    """
    inputs = tuple(NodeRef(-1, i) for i in range(net.input_dim))
    edges: list[tuple[NodeRef, NodeRef, Fraction]] = []
    activation: dict[NodeRef, str] = {}
    bias: dict[NodeRef, Fraction] = {}
    prev = list(inputs)
    for l, layer in enumerate(net.layers):
        nodes = [NodeRef(l, i) for i in range(layer.size)]
        for i, node in enumerate(nodes):
            activation[node] = layer.activation
            bias[node] = layer.bias[i]
            for j, w in enumerate(layer.weights[i]):
                if w:
                    edges.append((prev[j], node, w))
        prev = nodes
    return NetworkGraph(
        inputs=inputs,
        outputs=tuple(prev),
        edges=tuple(edges),
        activation=activation,
        bias=bias,
    )
