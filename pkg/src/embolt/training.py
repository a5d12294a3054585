"""Moment-matching gradient ascent with momentum, coupling-only L2 decay,
minibatches, and the dynamic-range stopping rule.

Each iteration compares data moments (positive phase) against model moments
from a sampler (negative phase) and steps every parameter along the
difference.  The inverse temperature of the sampler is never estimated; it is
absorbed into the effective learning rate.  Training halts early the moment
any parameter would leave its allowed range.
"""

import sys
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import samplers, topology
from ._util import derive_seed, fmt_float
from .errors import InputError
from .model import Checkpoint, IsingModel, init_model


@dataclass
class TrainConfig:
    learning_rate: float = 0.0025
    momentum: float = 0.5
    l2: float = 1e-5                # couplings only, never fields
    minibatch: int = 0              # 0 = full batch
    max_iters: int = 1000
    sampler: samplers.SamplerConfig = field(
        default_factory=lambda: samplers.SamplerConfig(kind="sa"))
    stop_on_range_exit: bool = True
    seed: int = 0
    eval_every: int = 0             # 0 = never call the eval hook

    def validate(self):
        if self.learning_rate <= 0:
            raise InputError(f"learning rate must be positive, "
                             f"got {self.learning_rate}")
        if not 0 <= self.momentum < 1:
            raise InputError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.l2 < 0:
            raise InputError(f"l2 strength must be non-negative, got {self.l2}")
        if self.minibatch < 0:
            raise InputError(f"minibatch must be non-negative, "
                             f"got {self.minibatch}")
        if self.max_iters < 0:
            raise InputError(f"max_iters must be non-negative, "
                             f"got {self.max_iters}")
        self.sampler.validate()
        return self


def positive_phase(data, graph):
    """Empirical moments of extended (physical) data rows."""
    data = np.asarray(data)
    if data.ndim != 2 or data.shape[0] == 0:
        raise InputError("positive phase needs a non-empty 2d data matrix")
    return samplers.moments_from_samples(graph, data)


def gradient(pos, neg):
    """Moment difference driving the ascent: data phase minus model phase."""
    if pos.first.shape != neg.first.shape or pos.second.shape != neg.second.shape:
        raise InputError("moment vectors have mismatched shapes")
    return pos - neg


@dataclass
class RangeExit:
    """The update that was refused because it would leave the dynamic range."""

    offenders: list                 # ("h", qubit) or ("J", (a, b)) entries
    values: list                    # the values the parameters would have taken
    iteration: int = None

    def first(self):
        return self.offenders[0]


def update(m, grad, cfg, vh, vJ):
    """One velocity step on every parameter, in place.

    Returns None on success, or a RangeExit (with the model and velocities
    untouched) when any parameter would leave its range and
    cfg.stop_on_range_exit is set.
    """
    new_vh = cfg.momentum * vh + cfg.learning_rate * grad.first
    new_vJ = cfg.momentum * vJ + cfg.learning_rate * (grad.second - cfg.l2 * m.J)
    cand_h = m.h + new_vh
    cand_J = m.J + new_vJ
    if cfg.stop_on_range_exit:
        offenders = []
        values = []
        lo, hi = m.h_range
        for i in np.where((cand_h < lo) | (cand_h > hi))[0]:
            offenders.append(("h", int(m.graph.vertices[i])))
            values.append(float(cand_h[i]))
        lo, hi = m.J_range
        for i in np.where((cand_J < lo) | (cand_J > hi))[0]:
            a, b = m.graph.edges[i]
            offenders.append(("J", (int(a), int(b))))
            values.append(float(cand_J[i]))
        if offenders:
            return RangeExit(offenders, values)
    vh[:] = new_vh
    vJ[:] = new_vJ
    m.h[:] = cand_h
    m.J[:] = cand_J
    return None


@dataclass
class LogRow:
    iteration: int
    grad_h_mean: float
    grad_J_mean: float
    max_param: float
    eval_value: float = None
    wall_time: float = 0.0


def format_log(rows):
    """Deterministic tab-separated log text (wall time deliberately omitted)."""
    lines = ["# iteration\tgrad_h\tgrad_J\tmax_param\tlambda_av"]
    for r in rows:
        ev = fmt_float(r.eval_value) if r.eval_value is not None else "-"
        lines.append("\t".join([str(r.iteration), fmt_float(r.grad_h_mean),
                                fmt_float(r.grad_J_mean),
                                fmt_float(r.max_param), ev]))
    return "\n".join(lines) + "\n"


@dataclass
class TrainResult:
    checkpoint: Checkpoint
    log: list
    stop_reason: str                # "max_iters" or "range_exit"
    range_exit: RangeExit = None
    neg_path: str = ""              # "analytic" or "sampled"


class _Batcher:
    """Seeded epoch shuffling; remainder batches are kept, not dropped."""

    def __init__(self, n_rows, batch, seed):
        self.n = n_rows
        self.batch = batch
        self.rng = np.random.default_rng(derive_seed(seed, 997))
        self.order = None
        self.ptr = 0

    def next(self):
        if self.batch == 0 or self.batch >= self.n:
            return slice(None)
        if self.order is None or self.ptr >= self.n:
            self.order = self.rng.permutation(self.n)
            self.ptr = 0
        out = self.order[self.ptr:self.ptr + self.batch]
        self.ptr += self.batch
        return out


def train(data, cfg, emb=None, graph=None, start=None, eval_hook=None,
          quiet=True):
    """Fit a model to logical +/-1 rows.

    With an embedding the data is replicated onto chains and the model lives
    on the hardware subgraph induced by the chain union; otherwise the model
    lives on ``graph`` (default: complete graph over the data columns).
    ``start`` resumes from a Checkpoint (or wraps a bare IsingModel).
    ``eval_hook(model, iteration) -> float`` is called every
    cfg.eval_every iterations and its value logged.
    """
    cfg.validate()
    rows = np.asarray(getattr(data, "rows", data))
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise InputError("training data must be a non-empty 2d matrix")
    if not np.isin(rows, (-1, 1)).all():
        raise InputError("training data must contain only +/-1")

    if emb is not None:
        if rows.shape[1] != emb.n_logical:
            raise InputError(f"data has {rows.shape[1]} columns but the "
                             f"embedding has {emb.n_logical} chains")
        g = emb.induced_graph()
        phys = emb.encode(rows)
    else:
        g = graph if graph is not None else topology.complete_graph(rows.shape[1])
        if rows.shape[1] != g.n_vertices:
            raise InputError(f"data has {rows.shape[1]} columns but the "
                             f"graph has {g.n_vertices} vertices")
        phys = rows

    if start is None:
        ck = Checkpoint(init_model(g, cfg.seed), seed=cfg.seed)
    elif isinstance(start, IsingModel):
        ck = Checkpoint(start.copy(), seed=cfg.seed)
    else:
        ck = Checkpoint(start.model.copy(), iteration=start.iteration,
                        seed=start.seed, vh=start.vh.copy(), vJ=start.vJ.copy())
    m = ck.model
    if m.graph.n_vertices != phys.shape[1]:
        raise InputError("checkpoint graph does not match the (extended) data")

    neg_path = "analytic" if cfg.sampler.kind in ("exact", "quantum") \
        else "sampled"
    batcher = _Batcher(rows.shape[0], cfg.minibatch, cfg.seed)
    full_pos = positive_phase(phys, g) if cfg.minibatch == 0 else None
    log = []
    stop_reason = "max_iters"
    exit_info = None
    for t in range(ck.iteration + 1, cfg.max_iters + 1):
        t0 = time.perf_counter()
        pos = full_pos if full_pos is not None \
            else positive_phase(phys[batcher.next()], g)
        ncfg = replace(cfg.sampler, seed=derive_seed(cfg.sampler.seed, t))
        neg = samplers.negative_phase(m, ncfg)
        grad = gradient(pos, neg.moments)
        exit_info = update(m, grad, cfg, ck.vh, ck.vJ)
        if exit_info is not None:
            exit_info.iteration = t
            stop_reason = "range_exit"
            break
        ck.iteration = t
        ev = None
        if eval_hook is not None and cfg.eval_every and t % cfg.eval_every == 0:
            ev = eval_hook(m, t)
        row = LogRow(t, float(np.abs(grad.first).mean()),
                     float(np.abs(grad.second).mean()) if grad.second.size else 0.0,
                     m.max_abs_param(), ev, time.perf_counter() - t0)
        log.append(row)
        if not quiet:
            print(f"iter {t}  grad_h {row.grad_h_mean:.3e}  "
                  f"grad_J {row.grad_J_mean:.3e}  max|p| {row.max_param:.4f}  "
                  f"{row.wall_time:.3f}s", file=sys.stderr)
    return TrainResult(ck, log, stop_reason, exit_info, neg_path)
