"""Boltzmann and quantum-Gibbs samplers standing in for annealing hardware.

Three interchangeable back ends produce spin configurations and moments for a
model:

* ``exact``   - full enumeration of the state space (small systems only);
* ``sa``      - simulated annealing with single-site Metropolis proposals and
                a linear inverse-temperature ramp;
* ``quantum`` - the diagonal of a transverse-field thermal state
                rho = exp(-beta * H_q) / Z with
                H_q = -Gamma * sum_i X_i + diag(E(z)),
                so Gamma = 0 reproduces the classical Boltzmann distribution.

Clamping fixes chosen qubits to given values, either by freezing them out of
the dynamics (``freeze``) or by overwriting their fields with a saturating
bias (``strong_field``, the hardware-style analogue and the quantum default).
"""

import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import _sa_kernel
from ._util import derive_seed, fmt_float, nonzero_seed
from .errors import InputError, ParseError, SizeLimitError
from .model import MomentVector

EXACT_LIMIT = 25
QUANTUM_LIMIT = 12
_CHUNK = 1 << 16

KINDS = ("exact", "sa", "quantum")


@dataclass
class SamplerConfig:
    """Everything a sampler call depends on (all of it echoed in outputs)."""

    kind: str = "sa"
    beta: float = 1.0
    gamma: float = 0.0          # transverse field strength (quantum only)
    t_max: int = 15200          # proposals per annealing run
    n_samples: int = 1
    seed: int = 0
    clamp: dict = None          # {qubit id: +/-1}
    clamp_mode: str = None      # freeze | strong_field; None = kind default
    h_max: float = 2.0          # bias magnitude used by strong_field
    exact_limit: int = EXACT_LIMIT
    quantum_limit: int = QUANTUM_LIMIT

    def resolved_clamp_mode(self):
        if self.clamp_mode is not None:
            return self.clamp_mode
        return "strong_field" if self.kind == "quantum" else "freeze"

    def validate(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown sampler kind {self.kind!r}")
        if self.beta < 0:
            raise InputError(f"beta must be non-negative, got {self.beta}")
        if self.t_max < 1:
            raise InputError(f"t_max must be at least 1, got {self.t_max}")
        if self.n_samples < 0:
            raise InputError(f"n_samples must be non-negative, got {self.n_samples}")
        if self.h_max <= 0:
            raise InputError(f"h_max must be positive, got {self.h_max}")
        if self.resolved_clamp_mode() not in ("freeze", "strong_field"):
            raise InputError(f"unknown clamp mode {self.clamp_mode!r}")
        return self


@dataclass
class SampleSet:
    """Spin configurations plus the configuration that produced them."""

    samples: np.ndarray         # (n, M) int8 in {-1, +1}
    qubits: np.ndarray          # (M,) global qubit ids, model vertex order
    config: SamplerConfig
    analytic: MomentVector = None   # set when the back end knows exact moments

    @property
    def n(self):
        return self.samples.shape[0]


@dataclass
class NegativePhase:
    """Model-side moments for one learning step."""

    moments: MomentVector
    samples: SampleSet = None
    log_z: float = None


def moments_from_samples(graph, samples):
    """Empirical first and second moments of rows aligned to graph vertices."""
    z = np.asarray(samples, dtype=float)
    if z.ndim != 2 or z.shape[1] != graph.n_vertices:
        raise InputError(f"expected rows of {graph.n_vertices} spins")
    if z.shape[0] == 0:
        raise InputError("no samples to average")
    ia, ib = graph.edge_positions()
    return MomentVector(z.mean(axis=0), (z[:, ia] * z[:, ib]).mean(axis=0))


# ---------------------------------------------------------------------------
# clamping

@dataclass
class _SubProblem:
    """A model restricted to its unclamped qubits."""

    n_total: int
    free_pos: np.ndarray        # positions of free qubits in the model order
    fixed: np.ndarray           # int8 per position: 0 if free, else +/-1
    h_eff: np.ndarray           # fields on free qubits, clamped spins absorbed
    ia: np.ndarray              # free-free edge endpoints, indices into free order
    ib: np.ndarray
    jv: np.ndarray              # couplings on free-free edges
    edge_idx: np.ndarray        # their edge positions in the parent graph
    e0: float                   # energy carried by clamped qubits alone

    @property
    def n_free(self):
        return len(self.free_pos)


def _reduce(model, clamp):
    g = model.graph
    n = g.n_vertices
    fixed = np.zeros(n, dtype=np.int8)
    for q, v in (clamp or {}).items():
        if int(v) not in (-1, 1):
            raise InputError(f"clamp value for qubit {q} must be +/-1, got {v}")
        fixed[g.vertex_index(q)] = int(v)
    free_pos = np.where(fixed == 0)[0]
    in_free = -np.ones(n, dtype=np.int64)
    in_free[free_pos] = np.arange(len(free_pos))
    ia, ib = g.edge_positions()
    za = fixed[ia].astype(float)
    zb = fixed[ib].astype(float)
    both = (za != 0) & (zb != 0)
    e0 = -float(model.J[both] @ (za[both] * zb[both]))
    e0 -= float(model.h[fixed != 0] @ fixed[fixed != 0])
    h_eff = model.h[free_pos].copy()
    half_a = (za == 0) & (zb != 0)    # a free, b clamped
    np.add.at(h_eff, in_free[ia[half_a]], model.J[half_a] * zb[half_a])
    half_b = (zb == 0) & (za != 0)
    np.add.at(h_eff, in_free[ib[half_b]], model.J[half_b] * za[half_b])
    keep = (za == 0) & (zb == 0)
    return _SubProblem(
        n_total=n,
        free_pos=free_pos,
        fixed=fixed,
        h_eff=h_eff,
        ia=in_free[ia[keep]],
        ib=in_free[ib[keep]],
        jv=model.J[keep].copy(),
        edge_idx=np.where(keep)[0],
        e0=e0,
    )


def clamp_fields(model, clamp, h_max=2.0):
    """Copy of the model with each clamped qubit's field forced to +/-h_max.

    The clamped qubit stays a dynamical variable; the strong field just makes
    the opposite state very unlikely.
    """
    biased = model.copy()
    for q, v in (clamp or {}).items():
        if int(v) not in (-1, 1):
            raise InputError(f"clamp value for qubit {q} must be +/-1, got {v}")
        biased.h[model.graph.vertex_index(q)] = int(v) * h_max
    return biased


def _resolve(model, cfg):
    """Apply the configured clamping, returning (working model, subproblem)."""
    mode = cfg.resolved_clamp_mode()
    if not cfg.clamp:
        return model, _reduce(model, None)
    if mode == "freeze":
        return model, _reduce(model, cfg.clamp)
    biased = clamp_fields(model, cfg.clamp, cfg.h_max)
    return biased, _reduce(biased, None)


def _check_limit(n_free, limit, default, what):
    if n_free > limit:
        raise SizeLimitError(
            f"{what} over {n_free} free qubits exceeds the cap of {limit}; "
            f"raise the limit in the sampler config to override")
    if limit > default and n_free > default:
        warnings.warn(
            f"{what} over {n_free} free qubits (default cap {default}); "
            f"this may be very slow or exhaust memory", RuntimeWarning,
            stacklevel=3)


# ---------------------------------------------------------------------------
# exact enumeration

def _spin_chunk(s0, s1, nf):
    s = np.arange(s0, s1, dtype=np.int64)
    z = np.empty((s1 - s0, nf))
    for k in range(nf):
        z[:, k] = 1.0 - 2.0 * ((s >> k) & 1)
    return z


def _chunk_energy(z, sub):
    e = -(z @ sub.h_eff)
    if len(sub.jv):
        if len(sub.jv) <= 128:
            e -= (z[:, sub.ia] * z[:, sub.ib]) @ sub.jv
        else:
            for j in range(len(sub.jv)):
                e -= sub.jv[j] * z[:, sub.ia[j]] * z[:, sub.ib[j]]
    return e


def _free_log_z(sub, beta):
    nf = sub.n_free
    m = -np.inf
    acc = 0.0
    for s0 in range(0, 1 << nf, _CHUNK):
        x = -beta * _chunk_energy(_spin_chunk(s0, min(s0 + _CHUNK, 1 << nf), nf), sub)
        cm = float(x.max())
        if cm > m:
            acc *= np.exp(m - cm)
            m = cm
        acc += float(np.exp(x - m).sum())
    return m + np.log(acc)


# Enumeration tables are expensive to rebuild, and a training loop asks for
# the same (n_free, edge list) thousands of times.  Keep the last few spin /
# pair-product tables around, but only while they are small enough to be a
# clear win over the chunked streaming path.
_TABLE_BYTES_MAX = 192 * (1 << 20)
_TABLE_KEEP = 4
_tables = {}


def _enum_tables(sub):
    nf = sub.n_free
    need = (1 << nf) * max(nf, len(sub.jv), 1) * 8
    if need > _TABLE_BYTES_MAX:
        return None
    key = (nf, sub.ia.tobytes(), sub.ib.tobytes())
    hit = _tables.pop(key, None)
    if hit is None:
        z = _spin_chunk(0, 1 << nf, nf)
        hit = (z, z[:, sub.ia] * z[:, sub.ib])
    _tables[key] = hit                  # reinsert: dict order doubles as LRU
    while len(_tables) > _TABLE_KEEP:
        _tables.pop(next(iter(_tables)))
    return hit


def _lift_moments(model, sub, first_free, second_free):
    """Expand free-subsystem moments to the full vertex/edge layout."""
    g = model.graph
    first = sub.fixed.astype(float)
    first[sub.free_pos] = first_free
    ia, ib = g.edge_positions()
    second = first[ia] * first[ib]     # right wherever at most one end is free
    second[sub.edge_idx] = second_free
    half = (sub.fixed[ia] == 0) != (sub.fixed[ib] == 0)
    fa = np.where(sub.fixed[ia] == 0, first[ia], sub.fixed[ia])
    fb = np.where(sub.fixed[ib] == 0, first[ib], sub.fixed[ib])
    second[half] = (fa * fb)[half]
    return MomentVector(first, second)


def exact_thermal(model, beta, clamp=None, clamp_mode=None, limit=EXACT_LIMIT):
    """Analytic moments and log partition function by enumeration.

    Returns (MomentVector over the full model layout, log Z).  With freeze
    clamping, log Z is that of the conditional (clamped) system.
    """
    cfg = SamplerConfig(kind="exact", beta=beta, clamp=clamp,
                        clamp_mode=clamp_mode, exact_limit=limit)
    work, sub = _resolve(model, cfg)
    _check_limit(sub.n_free, limit, EXACT_LIMIT, "exact enumeration")
    nf = sub.n_free
    tables = _enum_tables(sub) if nf else None
    if tables is not None:
        z, zz = tables
        x = beta * (z @ sub.h_eff)
        if len(sub.jv):
            x += beta * (zz @ sub.jv)
        m = float(x.max())
        w = np.exp(x - m)
        tot = float(w.sum())
        log_z = m + np.log(tot)
        p = w / tot
        first = p @ z
        second = p @ zz if len(sub.jv) else np.zeros(0)
        return _lift_moments(work, sub, first, second), log_z - beta * sub.e0
    log_z = _free_log_z(sub, beta) if nf else 0.0
    first = np.zeros(nf)
    second = np.zeros(len(sub.jv))
    for s0 in range(0, 1 << nf, _CHUNK):
        z = _spin_chunk(s0, min(s0 + _CHUNK, 1 << nf), nf)
        p = np.exp(-beta * _chunk_energy(z, sub) - log_z)
        first += p @ z
        for j in range(len(sub.jv)):
            second[j] += p @ (z[:, sub.ia[j]] * z[:, sub.ib[j]])
    return _lift_moments(work, sub, first, second), log_z - beta * sub.e0


def exact_log_z(model, beta, clamp=None, clamp_mode=None, limit=EXACT_LIMIT):
    return exact_thermal(model, beta, clamp, clamp_mode, limit)[1]


def exact_probabilities(model, beta, clamp=None, clamp_mode=None, limit=20):
    """Full probability vector over all 2^M configurations (tests, small M).

    State s maps to spins z_k = 1 - 2*((s >> k) & 1) with k indexing the
    model's vertex order.  Freeze-clamped states off the constraint get 0.
    """
    cfg = SamplerConfig(kind="exact", beta=beta, clamp=clamp,
                        clamp_mode=clamp_mode, exact_limit=limit)
    work, sub = _resolve(model, cfg)
    _check_limit(work.graph.n_vertices, limit, 20, "probability table")
    n = work.graph.n_vertices
    log_z = _free_log_z(sub, beta) if sub.n_free else 0.0
    out = np.zeros(1 << n)
    nf = sub.n_free
    clamped_bits = 0
    for pos in np.where(sub.fixed != 0)[0]:
        if sub.fixed[pos] == -1:
            clamped_bits |= 1 << int(pos)
    for s0 in range(0, 1 << nf, _CHUNK):
        s1 = min(s0 + _CHUNK, 1 << nf)
        z = _spin_chunk(s0, s1, nf)
        probs = np.exp(-beta * _chunk_energy(z, sub) - log_z)
        sf = np.arange(s0, s1, dtype=np.int64)
        full = np.full(s1 - s0, clamped_bits, dtype=np.int64)
        for k in range(nf):
            full |= ((sf >> k) & 1) << int(sub.free_pos[k])
        out[full] = probs
    return out


def _draw_states(sub, beta, log_z, rng, n_samples):
    """Inverse-CDF draws over the free subsystem, chunking kept invisible."""
    nf = sub.n_free
    u = rng.random(n_samples)
    order = np.argsort(u, kind="stable")
    us = u[order]
    states = np.empty(n_samples, dtype=np.int64)
    j = 0
    acc = 0.0
    last = 0
    for s0 in range(0, 1 << nf, _CHUNK):
        s1 = min(s0 + _CHUNK, 1 << nf)
        if j >= n_samples:
            break
        z = _spin_chunk(s0, s1, nf)
        p = np.exp(-beta * _chunk_energy(z, sub) - log_z)
        local = np.cumsum(p)
        hi = acc + local[-1]
        j2 = int(np.searchsorted(us, hi, side="left"))
        if j2 > j:
            pos = np.searchsorted(local, us[j:j2] - acc, side="right")
            states[j:j2] = s0 + np.minimum(pos, s1 - s0 - 1)
            j = j2
        acc = hi
        last = s1 - 1
    states[j:] = last                  # float tail beyond the summed mass
    out = np.empty(n_samples, dtype=np.int64)
    out[order] = states
    return out


def _assemble(sub, states):
    """Turn free-subsystem state integers into full +/-1 rows."""
    n = len(states)
    rows = np.tile(sub.fixed, (n, 1)).astype(np.int8)
    s = np.asarray(states, dtype=np.int64)
    for k in range(sub.n_free):
        rows[:, sub.free_pos[k]] = (1 - 2 * ((s >> k) & 1)).astype(np.int8)
    return rows


def exact_sample(model, cfg):
    cfg.validate()
    work, sub = _resolve(model, cfg)
    _check_limit(sub.n_free, cfg.exact_limit, EXACT_LIMIT, "exact enumeration")
    log_z = _free_log_z(sub, cfg.beta) if sub.n_free else 0.0
    rng = np.random.default_rng(cfg.seed)
    if sub.n_free:
        states = _draw_states(sub, cfg.beta, log_z, rng, cfg.n_samples)
    else:
        states = np.zeros(cfg.n_samples, dtype=np.int64)
    rows = _assemble(sub, states)
    return SampleSet(rows, model.graph.vertices.copy(), replace(cfg))


# ---------------------------------------------------------------------------
# simulated annealing

def sa_sample(model, cfg):
    cfg.validate()
    work, sub = _resolve(model, cfg)
    g = work.graph
    indptr, nbr, eidx = g.csr()
    nbr_j = work.J[eidx]
    h = work.h.copy()
    if cfg.resolved_clamp_mode() == "strong_field":
        free = np.arange(g.n_vertices, dtype=np.int64)
        fixed = np.zeros(g.n_vertices, dtype=np.int8)
    else:
        free = sub.free_pos.astype(np.int64)
        fixed = sub.fixed
    seeds = np.array(
        [nonzero_seed(derive_seed(cfg.seed, i)) for i in range(cfg.n_samples)],
        dtype=np.uint64).reshape(cfg.n_samples)
    out = np.empty((cfg.n_samples, g.n_vertices), dtype=np.int8)
    if cfg.n_samples:
        _sa_kernel.run_chains(indptr, nbr, nbr_j, h, float(cfg.beta),
                              int(cfg.t_max), free, fixed, seeds, out)
    return SampleSet(out, model.graph.vertices.copy(), replace(cfg))


# ---------------------------------------------------------------------------
# quantum Gibbs (transverse-field thermal state, exact diagonalization)

@dataclass
class QuantumThermal:
    """Eigendecomposition of H_q = -Gamma*sum X + diag(E) on the free qubits."""

    sub: _SubProblem
    beta: float
    gamma: float
    energies: np.ndarray        # eigenvalues of H_q
    vectors: np.ndarray         # eigenvectors, columns
    probs: np.ndarray           # diagonal of rho over free states
    ln_rho_diag: np.ndarray     # (ln rho)_zz over free states
    log_z: float                # includes the clamped-energy offset


def quantum_thermal(model, beta, gamma, clamp=None, clamp_mode=None,
                    limit=QUANTUM_LIMIT):
    cfg = SamplerConfig(kind="quantum", beta=beta, gamma=gamma, clamp=clamp,
                        clamp_mode=clamp_mode, quantum_limit=limit)
    work, sub = _resolve(model, cfg)
    _check_limit(sub.n_free, limit, QUANTUM_LIMIT, "quantum diagonalization")
    nf = sub.n_free
    dim = 1 << nf
    diag = _chunk_energy(_spin_chunk(0, dim, nf), sub) if nf else np.zeros(1)
    ham = np.zeros((dim, dim))
    ham[np.arange(dim), np.arange(dim)] = diag
    idx = np.arange(dim)
    for k in range(nf):
        ham[idx, idx ^ (1 << k)] = -gamma
    w, v = np.linalg.eigh(ham)
    shifted = -beta * w
    m = shifted.max()
    log_z = m + np.log(np.exp(shifted - m).sum())
    weights = np.exp(shifted - log_z)
    v2 = v * v
    probs = v2 @ weights
    ln_rho = v2 @ (shifted - log_z)
    return QuantumThermal(sub, beta, gamma, w, v, probs, ln_rho,
                          log_z - beta * sub.e0)


def quantum_moments(model, qt):
    """Analytic Z moments of the thermal state, lifted to the full layout."""
    sub = qt.sub
    nf = sub.n_free
    if nf == 0:
        return _lift_moments(model, sub, np.zeros(0), np.zeros(0))
    z = _spin_chunk(0, 1 << nf, nf)
    first = qt.probs @ z
    second = np.empty(len(sub.jv))
    for j in range(len(sub.jv)):
        second[j] = qt.probs @ (z[:, sub.ia[j]] * z[:, sub.ib[j]])
    return _lift_moments(model, sub, first, second)


def quantum_sample(model, cfg):
    cfg.validate()
    qt = quantum_thermal(model, cfg.beta, cfg.gamma, cfg.clamp, cfg.clamp_mode,
                         cfg.quantum_limit)
    rng = np.random.default_rng(cfg.seed)
    cum = np.cumsum(qt.probs)
    states = np.searchsorted(cum, rng.random(cfg.n_samples) * cum[-1],
                             side="right")
    states = np.minimum(states, len(qt.probs) - 1)
    rows = _assemble(qt.sub, states)
    ss = SampleSet(rows, model.graph.vertices.copy(), replace(cfg))
    ss.analytic = quantum_moments(model, qt)
    return ss


# ---------------------------------------------------------------------------
# dispatch

def sample(model, cfg):
    """Draw cfg.n_samples configurations with the configured back end."""
    cfg.validate()
    if cfg.kind == "exact":
        return exact_sample(model, cfg)
    if cfg.kind == "sa":
        return sa_sample(model, cfg)
    return quantum_sample(model, cfg)


def negative_phase(model, cfg):
    """Model moments for one learning step.

    The exact and quantum back ends return analytic expectations (no draws);
    the sa back end averages cfg.n_samples annealed configurations.
    """
    cfg.validate()
    if cfg.kind == "exact":
        mv, log_z = exact_thermal(model, cfg.beta, cfg.clamp, cfg.clamp_mode,
                                  cfg.exact_limit)
        return NegativePhase(mv, None, log_z)
    if cfg.kind == "quantum":
        qt = quantum_thermal(model, cfg.beta, cfg.gamma, cfg.clamp,
                             cfg.clamp_mode, cfg.quantum_limit)
        return NegativePhase(quantum_moments(model, qt), None, qt.log_z)
    ss = sa_sample(model, cfg)
    return NegativePhase(moments_from_samples(model.graph, ss.samples), ss)


# ---------------------------------------------------------------------------
# sample set serialization

def dump_samples(ss):
    cfg = ss.config
    lines = ["# samples v1",
             f"# kind {cfg.kind}",
             f"# beta {fmt_float(cfg.beta)}",
             f"# gamma {fmt_float(cfg.gamma)}",
             f"# t_max {cfg.t_max}",
             f"# seed {cfg.seed}",
             "# qubits " + " ".join(str(int(q)) for q in ss.qubits)]
    if cfg.clamp:
        pairs = " ".join(f"{int(q)}:{int(v)}" for q, v in sorted(cfg.clamp.items()))
        lines.append(f"# clamp {cfg.resolved_clamp_mode()} {pairs}")
    for row in ss.samples:
        lines.append(" ".join("+1" if s > 0 else "-1" for s in row))
    return "\n".join(lines) + "\n"


def save_samples(ss, path):
    with open(path, "w") as f:
        f.write(dump_samples(ss))


def parse_samples(text, path=None):
    meta = {}
    qubits = None
    rows = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) >= 2 and parts[0] == "qubits":
                qubits = np.array([int(t) for t in parts[1:]], dtype=np.int32)
            elif len(parts) >= 2:
                meta[parts[0]] = parts[1]
            continue
        try:
            row = [int(t) for t in line.split()]
        except ValueError:
            raise ParseError("sample rows must be +1/-1 integers", path, ln) \
                from None
        if any(s not in (-1, 1) for s in row):
            raise ParseError("sample rows must contain only +1/-1", path, ln)
        rows.append(row)
    if qubits is None:
        raise ParseError("missing '# qubits' header", path)
    if any(len(r) != len(qubits) for r in rows):
        raise ParseError("sample row width does not match qubit list", path)
    cfg = SamplerConfig(
        kind=meta.get("kind", "sa"),
        beta=float(meta.get("beta", 1.0)),
        gamma=float(meta.get("gamma", 0.0)),
        t_max=int(meta.get("t_max", 15200)),
        n_samples=len(rows),
        seed=int(meta.get("seed", 0)),
    )
    samples = np.array(rows, dtype=np.int8).reshape(len(rows), len(qubits))
    return SampleSet(samples, qubits, cfg)


def load_samples(path):
    with open(path) as f:
        return parse_samples(f.read(), path=str(path))
