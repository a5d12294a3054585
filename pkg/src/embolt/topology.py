"""Hardware connectivity graphs.

The annealer lattice is a rows x cols grid of complete bipartite K_{t,t} unit
cells ("shore size" t).  Within a cell the two shores are fully connected to
each other and carry no edges internally.  Shore 0 qubits additionally couple
to the same-position shore 0 qubit in the cells directly above and below;
shore 1 qubits couple left and right.

Qubit ids are fixed by the cell-major layout

    id(r, c, u, k) = ((r * cols + c) * 2 + u) * t + k

with u the shore (0 vertical, 1 horizontal) and k the position in the shore.
Broken qubits are removed together with their incident couplers; the ids of
the remaining qubits never shift.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ParseError


@dataclass(frozen=True)
class ChimeraSpec:
    """Size and defect mask of a lattice: rows x cols cells of shore size t."""

    rows: int
    cols: int
    shore: int
    broken: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or self.shore < 1:
            raise InputError(f"lattice dimensions must be positive, got "
                             f"{self.rows}x{self.cols} shore {self.shore}")
        object.__setattr__(self, "broken", frozenset(int(q) for q in self.broken))
        for q in self.broken:
            if not 0 <= q < self.n_qubits:
                raise InputError(f"broken qubit {q} outside id range "
                                 f"[0, {self.n_qubits})")

    @property
    def n_qubits(self):
        return self.rows * self.cols * 2 * self.shore

    def qubit_id(self, r, c, u, k):
        if not (0 <= r < self.rows and 0 <= c < self.cols
                and u in (0, 1) and 0 <= k < self.shore):
            raise InputError(f"no qubit at cell ({r},{c}) shore {u} position {k}")
        return ((r * self.cols + c) * 2 + u) * self.shore + k

    def qubit_coords(self, q):
        if not 0 <= q < self.n_qubits:
            raise InputError(f"qubit id {q} outside [0, {self.n_qubits})")
        k = q % self.shore
        rest = q // self.shore
        u = rest % 2
        cell = rest // 2
        return cell // self.cols, cell % self.cols, u, k


class HardwareGraph:
    """An undirected coupling graph over integer qubit ids.

    Instances are immutable once built.  ``vertices`` is sorted;  ``edges``
    holds one row (a, b) with a < b per coupler, sorted lexicographically.
    """

    def __init__(self, kind, meta, vertices, edges):
        self.kind = kind          # "chimera" or "complete"
        self.meta = meta          # ChimeraSpec, or int for complete graphs
        self.vertices = np.asarray(sorted(vertices), dtype=np.int32)
        edges = sorted(tuple(sorted(e)) for e in edges)
        self.edges = np.array(edges, dtype=np.int32).reshape(len(edges), 2)
        self._vpos = {int(v): i for i, v in enumerate(self.vertices)}
        if len(self._vpos) != len(self.vertices):
            raise InputError("duplicate vertex ids")
        self._epos = {}
        adj = {int(v): [] for v in self.vertices}
        for i, (a, b) in enumerate(self.edges):
            a, b = int(a), int(b)
            if a == b:
                raise InputError(f"self loop on qubit {a}")
            if a not in adj or b not in adj:
                raise InputError(f"edge ({a},{b}) references unknown qubit")
            if (a, b) in self._epos:
                raise InputError(f"duplicate edge ({a},{b})")
            self._epos[(a, b)] = i
            adj[a].append(b)
            adj[b].append(a)
        self._adj = {v: sorted(ns) for v, ns in adj.items()}
        self._csr = None
        self._epos_arrays = None

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    def has_vertex(self, q):
        return int(q) in self._vpos

    def has_edge(self, a, b):
        a, b = int(a), int(b)
        return (min(a, b), max(a, b)) in self._epos

    def neighbors(self, q):
        q = int(q)
        if q not in self._adj:
            raise InputError(f"qubit {q} is not an active vertex of this graph")
        return list(self._adj[q])

    def degree(self, q):
        return len(self.neighbors(q))

    def vertex_index(self, q):
        q = int(q)
        if q not in self._vpos:
            raise InputError(f"qubit {q} is not an active vertex of this graph")
        return self._vpos[q]

    def edge_index(self, a, b):
        a, b = int(a), int(b)
        key = (min(a, b), max(a, b))
        if key not in self._epos:
            raise InputError(f"no coupler between qubits {a} and {b}")
        return self._epos[key]

    def induced(self, keep):
        """Subgraph on the given qubit ids with every coupler among them."""
        keep = set(int(q) for q in keep)
        for q in keep:
            if q not in self._vpos:
                raise InputError(f"qubit {q} is not an active vertex of this graph")
        edges = [(a, b) for (a, b) in self._epos if a in keep and b in keep]
        return HardwareGraph(self.kind, self.meta, keep, edges)

    def csr(self):
        """Adjacency in CSR form over vertex positions: (indptr, nbr, eidx).

        nbr holds neighbor positions, eidx the matching edge indices.
        """
        if self._csr is None:
            n = self.n_vertices
            counts = np.zeros(n + 1, dtype=np.int64)
            for a, b in self.edges:
                counts[self._vpos[int(a)] + 1] += 1
                counts[self._vpos[int(b)] + 1] += 1
            indptr = np.cumsum(counts)
            nbr = np.zeros(indptr[-1], dtype=np.int64)
            eidx = np.zeros(indptr[-1], dtype=np.int64)
            fill = indptr[:-1].copy()
            for i, (a, b) in enumerate(self.edges):
                pa, pb = self._vpos[int(a)], self._vpos[int(b)]
                nbr[fill[pa]], eidx[fill[pa]] = pb, i
                fill[pa] += 1
                nbr[fill[pb]], eidx[fill[pb]] = pa, i
                fill[pb] += 1
            self._csr = (indptr, nbr, eidx)
        return self._csr

    def edge_positions(self):
        """Vertex positions (ia, ib) of each edge's endpoints, cached."""
        if self._epos_arrays is None:
            ia = np.array([self._vpos[int(a)] for a in self.edges[:, 0]],
                          dtype=np.int64)
            ib = np.array([self._vpos[int(b)] for b in self.edges[:, 1]],
                          dtype=np.int64)
            self._epos_arrays = (ia, ib)
        return self._epos_arrays

    def connected(self, ids):
        """True if the given ids induce a connected subgraph (single id: True)."""
        ids = [int(q) for q in ids]
        if not ids:
            return False
        members = set(ids)
        seen = {ids[0]}
        stack = [ids[0]]
        while stack:
            q = stack.pop()
            for nb in self._adj.get(q, ()):
                if nb in members and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == len(members)

    def header_lines(self):
        """Text header identifying the underlying lattice (used in dumps)."""
        if self.kind == "chimera":
            s = self.meta
            lines = [f"chimera {s.rows} {s.cols} {s.shore}"]
            lines += [f"broken {q}" for q in sorted(s.broken)]
            return lines
        return [f"complete {self.meta}"]


def build_chimera(spec):
    """Construct the coupling graph for a lattice spec, minus broken qubits."""
    t = spec.shore
    broken = spec.broken
    vertices = [q for q in range(spec.n_qubits) if q not in broken]
    edges = []

    def alive(q):
        return q not in broken

    for r in range(spec.rows):
        for c in range(spec.cols):
            base = (r * spec.cols + c) * 2 * t
            for j in range(t):
                v = base + j
                for k in range(t):
                    h = base + t + k
                    if alive(v) and alive(h):
                        edges.append((v, h))
            if r + 1 < spec.rows:
                down = ((r + 1) * spec.cols + c) * 2 * t
                for k in range(t):
                    if alive(base + k) and alive(down + k):
                        edges.append((base + k, down + k))
            if c + 1 < spec.cols:
                right = (r * spec.cols + c + 1) * 2 * t
                for k in range(t):
                    if alive(base + t + k) and alive(right + t + k):
                        edges.append((base + t + k, right + t + k))
    return HardwareGraph("chimera", spec, vertices, edges)


def complete_graph(n):
    """All-to-all graph on ids 0..n-1 (logical models without an embedding)."""
    if n < 1:
        raise InputError(f"complete graph needs at least one vertex, got {n}")
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return HardwareGraph("complete", n, range(n), edges)


def dump_graph(g):
    """Serialize a graph's lattice identity as text (not its edge list)."""
    return "\n".join(g.header_lines()) + "\n"


def parse_graph(text, path=None):
    """Rebuild a graph from dump_graph output (comments and blanks allowed)."""
    kind = None
    args = None
    broken = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "chimera":
            if kind is not None:
                raise ParseError("repeated graph header", path, ln)
            if len(parts) != 4:
                raise ParseError("expected: chimera <rows> <cols> <shore>", path, ln)
            kind, args = "chimera", parts[1:]
        elif parts[0] == "complete":
            if kind is not None:
                raise ParseError("repeated graph header", path, ln)
            if len(parts) != 2:
                raise ParseError("expected: complete <n>", path, ln)
            kind, args = "complete", parts[1:]
        elif parts[0] == "broken":
            if kind != "chimera":
                raise ParseError("broken line before chimera header", path, ln)
            if len(parts) != 2:
                raise ParseError("expected: broken <id>", path, ln)
            broken.append(_int(parts[1], path, ln))
        else:
            raise ParseError(f"unknown directive {parts[0]!r}", path, ln)
    if kind is None:
        raise ParseError("missing graph header", path)
    if kind == "complete":
        return complete_graph(_int(args[0], path))
    spec = ChimeraSpec(_int(args[0], path), _int(args[1], path),
                       _int(args[2], path), frozenset(broken))
    return build_chimera(spec)


def load_graph(path):
    with open(path) as f:
        return parse_graph(f.read(), path=str(path))


def _int(tok, path=None, line=None):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer, got {tok!r}", path, line) from None
