"""Uniform d-regular multigraph samplers (directed and undirected).

Both models work on n*d "points": point t belongs to the fiber of
vertex t // d.  Directed: a uniform permutation P of the points sends
each point of fiber k to some fiber l, contributing one k->l edge, so
every row and column sum of the adjacency matrix is d.  Undirected: a
uniform perfect pairing of the points; each cross pair adds 1 to both
symmetric entries, and a within-fiber pair (a loop) adds 2 to the
diagonal, keeping row sums d and diagonals even.

The generating permutation or pairing order is retained as a witness so
any sample can be replayed or cross-checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParamsError


@dataclass(frozen=True)
class GraphParams:
    n: int
    d: int
    mode: str  # "directed" | "undirected"

    def __post_init__(self):
        if self.mode not in ("directed", "undirected"):
            raise InvalidParamsError(f"mode must be directed|undirected, got {self.mode!r}")
        if self.n < 1 or self.d < 1:
            raise InvalidParamsError(f"need n >= 1 and d >= 1, got n={self.n}, d={self.d}")
        if self.mode == "undirected" and (self.n * self.d) % 2:
            raise InvalidParamsError(
                f"undirected model needs an even point count, got n*d = {self.n * self.d}"
            )


@dataclass(frozen=True)
class Graph:
    params: GraphParams
    adjacency: tuple[tuple[int, ...], ...]
    witness: tuple[int, ...]
    seed: int | None = None


def _generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _seed_field(seed) -> int | None:
    return int(seed) if isinstance(seed, (int, np.integer)) else None


def directed_adjacency(n: int, d: int, perm: np.ndarray) -> np.ndarray:
    a = np.zeros((n, n), dtype=np.int64)
    src = np.arange(n * d) // d
    np.add.at(a, (src, np.asarray(perm) // d), 1)
    return a


def undirected_adjacency(n: int, d: int, order: np.ndarray) -> np.ndarray:
    a = np.zeros((n, n), dtype=np.int64)
    order = np.asarray(order)
    u = order[0::2] // d
    v = order[1::2] // d
    # loops (u == v) land on the diagonal twice, once per endpoint
    np.add.at(a, (u, v), 1)
    np.add.at(a, (v, u), 1)
    return a


def sample_directed(n: int, d: int, seed) -> Graph:
    """Sample the directed model: witness is the point permutation."""
    params = GraphParams(n=n, d=d, mode="directed")
    rng = _generator(seed)
    perm = rng.permutation(n * d)  # the generator's native Fisher-Yates shuffle
    a = directed_adjacency(n, d, perm)
    return Graph(
        params=params,
        adjacency=tuple(tuple(int(x) for x in row) for row in a),
        witness=tuple(int(x) for x in perm),
        seed=_seed_field(seed),
    )


def sample_undirected(n: int, d: int, seed) -> Graph:
    """Sample the undirected model: witness pairs consecutive entries."""
    params = GraphParams(n=n, d=d, mode="undirected")
    rng = _generator(seed)
    order = rng.permutation(n * d)
    a = undirected_adjacency(n, d, order)
    return Graph(
        params=params,
        adjacency=tuple(tuple(int(x) for x in row) for row in a),
        witness=tuple(int(x) for x in order),
        seed=_seed_field(seed),
    )


def sample(params: GraphParams, seed) -> Graph:
    if params.mode == "directed":
        return sample_directed(params.n, params.d, seed)
    return sample_undirected(params.n, params.d, seed)


def duplicate_row_detect(g) -> bool:
    """True iff two distinct adjacency rows are equal as integer vectors.

    A sufficient certificate of singularity over the rationals (the
    difference of the two vertex rows is in the left kernel).
    """
    rows = g.adjacency if isinstance(g, Graph) else g
    seen = set()
    for row in rows:
        key = tuple(int(x) for x in row)
        if key in seen:
            return True
        seen.add(key)
    return False


def graph_to_json(g: Graph) -> dict:
    return {
        "n": g.params.n,
        "d": g.params.d,
        "mode": g.params.mode,
        "adjacency": [list(row) for row in g.adjacency],
        "witness": list(g.witness),
        "seed": g.seed,
    }


def graph_from_json(data: dict) -> Graph:
    params = GraphParams(n=int(data["n"]), d=int(data["d"]), mode=data["mode"])
    return Graph(
        params=params,
        adjacency=tuple(tuple(int(x) for x in row) for row in data["adjacency"]),
        witness=tuple(int(x) for x in data["witness"]),
        seed=data.get("seed"),
    )
