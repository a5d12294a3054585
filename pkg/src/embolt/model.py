"""Ising models over a hardware graph, and their on-disk checkpoints.

Spins take values in {-1, +1}.  The energy of a configuration z is

    E(z) = - sum_{(a,b)} J_ab z_a z_b - sum_a h_a z_a

with one coupling per graph edge and one field per vertex.  Parameters are
used exactly as stored; nothing is ever rescaled behind the caller's back.
"""

from dataclasses import dataclass

import numpy as np

from . import topology
from ._util import fmt_float
from .errors import InputError, ParamRangeError, ParseError

H_RANGE = (-2.0, 2.0)
J_RANGE = (-1.0, 1.0)
INIT_SCALE = 1e-6


@dataclass
class MomentVector:
    """First and second moments (or their gradients) in model coordinates.

    ``first`` aligns with graph vertices, ``second`` with graph edges.
    """

    first: np.ndarray
    second: np.ndarray

    def __sub__(self, other):
        return MomentVector(self.first - other.first, self.second - other.second)


class IsingModel:
    """Fields h (per vertex) and couplings J (per edge) on a graph."""

    def __init__(self, graph, h=None, J=None, h_range=H_RANGE, J_range=J_RANGE):
        self.graph = graph
        n, m = graph.n_vertices, graph.n_edges
        self.h = np.zeros(n) if h is None else np.asarray(h, dtype=float).copy()
        self.J = np.zeros(m) if J is None else np.asarray(J, dtype=float).copy()
        if self.h.shape != (n,):
            raise InputError(f"h must have {n} entries, got {self.h.shape}")
        if self.J.shape != (m,):
            raise InputError(f"J must have {m} entries, got {self.J.shape}")
        self.h_range = (float(h_range[0]), float(h_range[1]))
        self.J_range = (float(J_range[0]), float(J_range[1]))

    def copy(self):
        m = IsingModel(self.graph, self.h, self.J, self.h_range, self.J_range)
        return m

    def energy(self, z):
        """Energy of one configuration (M,) or a batch (..., M)."""
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != self.graph.n_vertices:
            raise InputError(f"configuration needs {self.graph.n_vertices} "
                             f"spins, got {z.shape[-1]}")
        ia, ib = self.graph.edge_positions()
        pair = (z[..., ia] * z[..., ib]) @ self.J
        return -pair - z @ self.h

    def check_ranges(self):
        """Raise if any parameter sits outside its allowed range."""
        lo, hi = self.h_range
        bad = np.where((self.h < lo) | (self.h > hi))[0]
        if bad.size:
            q = int(self.graph.vertices[bad[0]])
            raise ParamRangeError(
                f"field h[{q}] = {self.h[bad[0]]} outside [{lo}, {hi}]")
        lo, hi = self.J_range
        bad = np.where((self.J < lo) | (self.J > hi))[0]
        if bad.size:
            a, b = (int(v) for v in self.graph.edges[bad[0]])
            raise ParamRangeError(
                f"coupling J[{a},{b}] = {self.J[bad[0]]} outside [{lo}, {hi}]")

    def max_abs_param(self):
        hm = float(np.max(np.abs(self.h))) if self.h.size else 0.0
        jm = float(np.max(np.abs(self.J))) if self.J.size else 0.0
        return max(hm, jm)


def init_model(graph, seed, scale=INIT_SCALE, h_range=H_RANGE, J_range=J_RANGE):
    """Fresh model with parameters drawn uniformly from [-scale, scale]."""
    rng = np.random.default_rng(seed)
    h = rng.uniform(-scale, scale, graph.n_vertices)
    J = rng.uniform(-scale, scale, graph.n_edges)
    return IsingModel(graph, h, J, h_range, J_range)


@dataclass
class Checkpoint:
    """A model plus everything needed to resume its training run."""

    model: IsingModel
    iteration: int = 0
    seed: int = 0
    vh: np.ndarray = None       # momentum velocity for fields
    vJ: np.ndarray = None       # momentum velocity for couplings
    note: str = ""

    def __post_init__(self):
        g = self.model.graph
        if self.vh is None:
            self.vh = np.zeros(g.n_vertices)
        if self.vJ is None:
            self.vJ = np.zeros(g.n_edges)


def dump_checkpoint(ck):
    m = ck.model
    g = m.graph
    lines = ["model v1"]
    lines += g.header_lines()
    lines.append(f"seed {ck.seed}")
    lines.append(f"iter {ck.iteration}")
    if ck.note:
        lines.append(f"note {ck.note}")
    lines.append(f"hrange {fmt_float(m.h_range[0])} {fmt_float(m.h_range[1])}")
    lines.append(f"jrange {fmt_float(m.J_range[0])} {fmt_float(m.J_range[1])}")
    for i, q in enumerate(g.vertices):
        lines.append(f"h {int(q)} {fmt_float(m.h[i])}")
    for i, (a, b) in enumerate(g.edges):
        lines.append(f"J {int(a)} {int(b)} {fmt_float(m.J[i])}")
    for i, q in enumerate(g.vertices):
        lines.append(f"vh {int(q)} {fmt_float(ck.vh[i])}")
    for i, (a, b) in enumerate(g.edges):
        lines.append(f"vJ {int(a)} {int(b)} {fmt_float(ck.vJ[i])}")
    return "\n".join(lines) + "\n"


def save_checkpoint(ck, path):
    with open(path, "w") as f:
        f.write(dump_checkpoint(ck))


def parse_checkpoint(text, path=None):
    """Rebuild a checkpoint; the parameter lines define the (sub)graph.

    The header names the full lattice; the vertices present in ``h`` lines
    select the active subgraph (e.g. an embedding's chain union), and the
    ``J`` lines must list exactly the lattice couplers among them.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != "model v1":
        raise ParseError("not a checkpoint file (missing 'model v1' header)",
                         path, 1)
    header = []
    seed = 0
    iteration = 0
    note = ""
    h_range, J_range = H_RANGE, J_RANGE
    h_entries = []
    J_entries = []
    v_entries = {"vh": [], "vJ": []}
    for ln, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag in ("chimera", "complete", "broken"):
                header.append(line)
            elif tag == "seed":
                seed = int(parts[1])
            elif tag == "iter":
                iteration = int(parts[1])
            elif tag == "note":
                note = line.partition(" ")[2]
            elif tag == "hrange":
                h_range = (float(parts[1]), float(parts[2]))
            elif tag == "jrange":
                J_range = (float(parts[1]), float(parts[2]))
            elif tag == "h":
                h_entries.append((int(parts[1]), float(parts[2])))
            elif tag == "J":
                J_entries.append((int(parts[1]), int(parts[2]), float(parts[3])))
            elif tag == "vh":
                v_entries["vh"].append((int(parts[1]), float(parts[2])))
            elif tag == "vJ":
                v_entries["vJ"].append((int(parts[1]), int(parts[2]),
                                        float(parts[3])))
            else:
                raise ParseError(f"unknown directive {tag!r}", path, ln)
        except (IndexError, ValueError):
            raise ParseError(f"malformed {tag!r} line", path, ln) from None
    base = topology.parse_graph("\n".join(header), path=path)
    if not h_entries:
        raise ParseError("checkpoint has no field entries", path)
    keep = [q for q, _ in h_entries]
    if len(set(keep)) != len(keep):
        raise ParseError("duplicate field entry", path)
    graph = base if len(keep) == base.n_vertices else None
    if graph is None or sorted(keep) != sorted(int(v) for v in base.vertices):
        graph = base.induced(keep)
    model = IsingModel(graph, h_range=h_range, J_range=J_range)
    for q, val in h_entries:
        model.h[graph.vertex_index(q)] = val
    listed = set()
    for a, b, val in J_entries:
        model.J[graph.edge_index(a, b)] = val
        listed.add((min(a, b), max(a, b)))
    if len(listed) != graph.n_edges or len(J_entries) != graph.n_edges:
        raise ParseError(
            f"checkpoint lists {len(J_entries)} couplings but the graph "
            f"induced by its fields has {graph.n_edges}", path)
    model.check_ranges()
    ck = Checkpoint(model, iteration=iteration, seed=seed, note=note)
    for q, val in v_entries["vh"]:
        ck.vh[graph.vertex_index(q)] = val
    for a, b, val in v_entries["vJ"]:
        ck.vJ[graph.edge_index(a, b)] = val
    return ck


def load_checkpoint(path):
    with open(path) as f:
        return parse_checkpoint(f.read(), path=str(path))
