"""Seeded permutation generators for the benchmark and the tests.

A generator is named by a spec string `kind:n[:key=value...]`, for example
`sorted:8`, `uniform_random:4096:seed=7` or `planted_lis:4096:k=64`. The
kind, length, seed and shape parameters fully determine the permutation
of 1..n that comes out.
"""

from dataclasses import dataclass, field

import numpy as np

from config import default_seed
from core import BadSpec, Sequence

KINDS = ("uniform_random", "sorted", "reversed", "planted_lis",
         "block_decreasing", "sawtooth")
PARAM_KEYS = ("k", "b", "p")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int
    seed: int = 0
    params: dict = field(default_factory=dict)

    def label(self):
        """Generator column of the bench CSV: kind plus shape parameters."""
        extra = ":".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.kind}:{extra}" if extra else self.kind

    def __str__(self):
        text = f"{self.kind}:{self.n}:seed={self.seed}"
        for k in sorted(self.params):
            text += f":{k}={self.params[k]}"
        return text


def _int_field(text, what):
    try:
        return int(text)
    except ValueError:
        raise BadSpec(f"{what} must be an integer, got {text!r}") from None


def parse_kind(text):
    """`kind[:key=value...]` without a length -> (kind, params, seed or None)."""
    kind, _, rest = text.strip().partition(":")
    if kind not in KINDS:
        raise BadSpec(f"unknown generator {kind!r}; expected one of {', '.join(KINDS)}")
    params = {}
    seed = None
    for item in filter(None, rest.split(":")):
        key, eq, val = item.partition("=")
        if not eq:
            raise BadSpec(f"expected key=value, got {item!r}")
        if key == "seed":
            seed = _int_field(val, "seed")
        elif key in PARAM_KEYS:
            params[key] = _int_field(val, key)
        else:
            raise BadSpec(f"unknown generator parameter {key!r}")
    return kind, params, seed


def parse_spec(text):
    """Full spec string `kind:n[:key=value...]` -> GeneratorSpec."""
    kind, sep, rest = text.strip().partition(":")
    if not sep:
        raise BadSpec(f"generator spec needs a length: {text!r}")
    n_text, _, tail = rest.partition(":")
    n = _int_field(n_text, "n")
    kind, params, seed = parse_kind(f"{kind}:{tail}" if tail else kind)
    spec = GeneratorSpec(kind, n, default_seed() if seed is None else seed, params)
    _check(spec)
    return spec


def _param(spec, key):
    if key not in spec.params:
        raise BadSpec(f"{spec.kind} needs parameter {key}")
    return spec.params[key]


def _check(spec):
    if spec.n < 0:
        raise BadSpec(f"n must be >= 0, got {spec.n}")
    if spec.kind == "planted_lis":
        k = _param(spec, "k")
        if not (1 <= k <= spec.n) or spec.n % k:
            raise BadSpec(f"planted_lis needs 1 <= k <= n and k | n (k={k}, n={spec.n})")
    elif spec.kind == "block_decreasing" and _param(spec, "b") < 1:
        raise BadSpec("block_decreasing needs b >= 1")
    elif spec.kind == "sawtooth" and _param(spec, "p") < 1:
        raise BadSpec("sawtooth needs p >= 1")


def _blocks_descending(n, size):
    """Value ranges of `size` in decreasing order, the lowest one possibly short."""
    out = []
    hi = n
    while hi > 0:
        lo = max(0, hi - size)
        out.append(np.arange(lo + 1, hi + 1))
        hi = lo
    return out


def generate(spec):
    if isinstance(spec, str):
        spec = parse_spec(spec)
    _check(spec)
    n = spec.n
    rng = np.random.default_rng(spec.seed & 0xFFFFFFFFFFFFFFFF)

    if spec.kind == "uniform_random":
        values = rng.permutation(n) + 1
    elif spec.kind == "sorted":
        values = np.arange(1, n + 1)
    elif spec.kind == "reversed":
        values = np.arange(n, 0, -1)
    elif spec.kind == "planted_lis":
        # k blocks of increasing value ranges, each block read downwards
        size = n // spec.params["k"]
        values = np.arange(1, n + 1).reshape(-1, size)[:, ::-1].ravel()
    elif spec.kind == "block_decreasing":
        blocks = _blocks_descending(n, spec.params["b"])
        values = np.concatenate([rng.permutation(b) for b in blocks]) if blocks else np.arange(0)
    else:
        blocks = _blocks_descending(n, spec.params["p"])
        values = np.concatenate(blocks) if blocks else np.arange(0)

    return Sequence(tuple(int(v) for v in values))
