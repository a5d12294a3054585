"""Logical-to-physical variable maps (chains) on a hardware graph.

A logical model on N fully connected variables is carried by the hardware as N
disjoint connected chains of qubits.  Encoding replicates each logical value
across its chain; decoding majority-votes each chain back to one value, with
an explicit 0 marking an exact tie.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (BrokenQubitError, DisconnectedChainError, EmbeddingError,
                     InputError, OverlapError, ParseError, UnknownQubitError)


class Embedding:
    """N disjoint connected chains over the active qubits of a graph.

    ``qubit_order`` fixes the physical column order used by encode/decode and
    by models built on the chain union: the sorted union of all chain ids.
    """

    def __init__(self, graph, chains):
        self.graph = graph
        self.chains = [tuple(int(q) for q in ch) for ch in chains]
        _validate(graph, self.chains)
        union = sorted(q for ch in self.chains for q in ch)
        self.qubit_order = np.asarray(union, dtype=np.int32)
        self._qpos = {q: i for i, q in enumerate(union)}
        self.chain_of = {}
        for i, ch in enumerate(self.chains):
            for q in ch:
                self.chain_of[q] = i
        # physical column -> logical index, for vectorized encode/decode
        self._col_logical = np.array([self.chain_of[int(q)] for q in self.qubit_order],
                                     dtype=np.int64)
        self._induced = None

    @classmethod
    def identity(cls, graph):
        """One single-qubit chain per active vertex (logical == physical)."""
        return cls(graph, [[int(v)] for v in graph.vertices])

    @property
    def n_logical(self):
        return len(self.chains)

    @property
    def n_physical(self):
        return len(self.qubit_order)

    def chain_sizes(self):
        return [len(ch) for ch in self.chains]

    def induced_graph(self):
        """Hardware subgraph on the chain union (the trained model's graph)."""
        if self._induced is None:
            self._induced = self.graph.induced(self.qubit_order)
        return self._induced

    def encode(self, logical):
        """Replicate logical rows (..., N) onto physical columns (..., M)."""
        logical = np.asarray(logical)
        if logical.shape[-1] != self.n_logical:
            raise InputError(f"expected {self.n_logical} logical columns, "
                             f"got {logical.shape[-1]}")
        return np.ascontiguousarray(logical[..., self._col_logical])

    def decode(self, physical, fallback=None):
        """Majority-vote physical rows (..., M) down to logical rows (..., N).

        Exact vote ties yield 0 unless ``fallback`` replaces them.
        """
        physical = np.asarray(physical)
        if physical.shape[-1] != self.n_physical:
            raise InputError(f"expected {self.n_physical} physical columns, "
                             f"got {physical.shape[-1]}")
        flat = physical.reshape(-1, self.n_physical).astype(np.int64)
        sums = np.zeros((flat.shape[0], self.n_logical), dtype=np.int64)
        np.add.at(sums.T, self._col_logical, flat.T)
        out = np.sign(sums).astype(np.int8)
        if fallback is not None:
            out[out == 0] = fallback
        return out.reshape(physical.shape[:-1] + (self.n_logical,))

    def clamp_map(self, values):
        """Expand {logical index: +/-1} to {qubit id: +/-1} over whole chains."""
        out = {}
        for i, v in values.items():
            i = int(i)
            if not 0 <= i < self.n_logical:
                raise InputError(f"no logical variable {i}")
            if v not in (-1, 1):
                raise InputError(f"clamp value for variable {i} must be +/-1, got {v}")
            for q in self.chains[i]:
                out[q] = int(v)
        return out


def _validate(graph, chains):
    if not chains:
        raise EmbeddingError("embedding has no chains")
    seen = {}
    for i, ch in enumerate(chains):
        if not ch:
            raise EmbeddingError(f"chain {i} is empty")
        if len(set(ch)) != len(ch):
            raise EmbeddingError(f"chain {i} lists a qubit more than once")
        for q in ch:
            if not graph.has_vertex(q):
                if graph.kind == "chimera":
                    spec = graph.meta
                    if 0 <= q < spec.n_qubits and q in spec.broken:
                        raise BrokenQubitError(
                            f"chain {i} uses broken qubit {q}")
                raise UnknownQubitError(
                    f"chain {i} uses unknown qubit id {q}")
            if q in seen:
                raise OverlapError(
                    f"qubit {q} appears in chains {seen[q]} and {i}")
            seen[q] = i
    for i, ch in enumerate(chains):
        if not graph.connected(ch):
            raise DisconnectedChainError(f"chain {i} is not connected")


def clique_embed(graph, n):
    """Chains coupling every pair of n logical variables, by nested L shapes.

    Logical variable v = d*t + k owns the horizontal qubits of shore position
    k in cells (d, 0..d) and the vertical qubits of position k in cells
    (d..D-1, d), where D = ceil(n / t).  The two arms meet in the diagonal
    cell (d, d), every pair of chains meets in some cell, and no chain exceeds
    D + 1 qubits.  Requires an intact lattice region of D x D cells.
    """
    if graph.kind != "chimera":
        raise InputError("clique embedding requires a chimera graph")
    spec = graph.meta
    t = spec.shore
    if n < 1:
        raise InputError(f"need at least one logical variable, got {n}")
    d_max = (n + t - 1) // t
    if d_max > min(spec.rows, spec.cols):
        raise InputError(
            f"{n} logical variables need a {d_max}x{d_max}-cell region; "
            f"graph has {spec.rows}x{spec.cols} cells of shore {t}")
    chains = []
    for v in range(n):
        d, k = divmod(v, t)
        ch = [spec.qubit_id(d, c, 1, k) for c in range(d + 1)]
        ch += [spec.qubit_id(r, d, 0, k) for r in range(d, d_max)]
        chains.append(ch)
    return Embedding(graph, chains)


@dataclass(frozen=True)
class EmbeddingStats:
    """Size summary of an embedding on its graph."""

    n_logical: int
    n_physical: int
    min_chain: int
    max_chain: int
    usage: float            # fraction of active qubits used
    couplers: int           # hardware couplers inside the chain union
    logical_params: int     # N*(N-1)/2 couplings + N fields
    physical_params: int    # usable couplers + qubit count

    def row(self):
        return (f"{self.n_logical}\t{self.n_physical}\t{self.min_chain}\t"
                f"{self.max_chain}\t{round(100 * self.usage)}%\t"
                f"{self.logical_params}\t{self.physical_params}")


def embedding_stats(emb):
    n = emb.n_logical
    m = emb.n_physical
    sizes = emb.chain_sizes()
    couplers = emb.induced_graph().n_edges
    return EmbeddingStats(
        n_logical=n,
        n_physical=m,
        min_chain=min(sizes),
        max_chain=max(sizes),
        usage=m / emb.graph.n_vertices,
        couplers=couplers,
        logical_params=n * (n - 1) // 2 + n,
        physical_params=couplers + m,
    )


def save_embedding(emb, path):
    with open(path, "w") as f:
        f.write(dump_embedding(emb))


def dump_embedding(emb):
    lines = [f"# {emb.n_logical} chains, {emb.n_physical} qubits"]
    for i, ch in enumerate(emb.chains):
        lines.append(f"chain {i}: " + " ".join(str(q) for q in ch))
    return "\n".join(lines) + "\n"


def parse_embedding(graph, text, path=None):
    """Read ``chain <i>: <q> ...`` lines; indices 0..N-1 must each appear once."""
    found = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        parts = head.split()
        if len(parts) != 2 or parts[0] != "chain" or not sep:
            raise ParseError("expected: chain <i>: <qubit ids>", path, ln)
        try:
            idx = int(parts[1])
            qubits = [int(tok) for tok in rest.split()]
        except ValueError:
            raise ParseError("chain index and qubit ids must be integers",
                             path, ln) from None
        if idx in found:
            raise ParseError(f"chain {idx} defined twice", path, ln)
        if not qubits:
            raise ParseError(f"chain {idx} has no qubits", path, ln)
        found[idx] = qubits
    if not found:
        raise ParseError("no chains in embedding file", path)
    n = len(found)
    missing = [i for i in range(n) if i not in found]
    if missing:
        raise ParseError(f"chain indices must cover 0..{n - 1}; "
                         f"missing {missing[0]}", path)
    return Embedding(graph, [found[i] for i in range(n)])


def load_embedding(graph, path):
    with open(path) as f:
        return parse_embedding(graph, f.read(), path=str(path))
