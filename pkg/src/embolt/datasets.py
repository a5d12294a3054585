"""Benchmark data: bars-and-stripes pictures, Sherrington-Kirkpatrick
instances sampled at beta = 1, digit images, and corrupted variants.

All values are +/-1 spins.  Corruption produces a mask of unknown pixels as
first-class output so downstream reconstruction clamps only what is known.
"""

from dataclasses import dataclass

import numpy as np

from . import model as model_mod
from . import samplers, topology
from ._util import fmt_float
from .errors import InputError, ParseError


@dataclass
class LogicalDataset:
    rows: np.ndarray            # (n, N) int8 in {-1, +1}
    labels: np.ndarray = None   # (n,) int, optional
    shape: tuple = None         # (img_rows, img_cols) of the leading pixels
    split: str = ""

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.int8)
        if self.rows.ndim != 2:
            raise InputError("dataset rows must form a 2d matrix")
        if not np.isin(self.rows, (-1, 1)).all():
            raise InputError("dataset entries must be +/-1")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if len(self.labels) != len(self.rows):
                raise InputError("label count does not match row count")

    @property
    def n_rows(self):
        return self.rows.shape[0]

    @property
    def n_vars(self):
        return self.rows.shape[1]


def gen_bas(rows, cols, seed):
    """All horizontal-stripe and vertical-bar pictures, shuffled, split in two.

    Emits one picture per row pattern (2^rows) plus one per column pattern
    (2^cols); the all-dark and all-light pictures appear in both families and
    are deliberately kept twice.
    """
    if rows < 1 or cols < 1:
        raise InputError("picture dimensions must be positive")
    pics = []
    for bits in range(1 << rows):
        vals = np.array([1 if (bits >> r) & 1 else -1 for r in range(rows)],
                        dtype=np.int8)
        pics.append(np.repeat(vals, cols))
    for bits in range(1 << cols):
        vals = np.array([1 if (bits >> c) & 1 else -1 for c in range(cols)],
                        dtype=np.int8)
        pics.append(np.tile(vals, rows))
    pics = np.array(pics, dtype=np.int8)
    order = np.random.default_rng(seed).permutation(len(pics))
    half = len(pics) // 2
    train = LogicalDataset(pics[order[:half]], shape=(rows, cols), split="train")
    test = LogicalDataset(pics[order[half:]], shape=(rows, cols), split="test")
    return train, test


@dataclass
class SKInstance:
    """A fully connected spin glass with Gaussian couplings and no fields."""

    n: int
    zeta: float
    seed: int
    J: np.ndarray               # aligned to complete_graph(n).edges order
    beta: float = 1.0

    def graph(self):
        return topology.complete_graph(self.n)

    def to_model(self):
        g = self.graph()
        return model_mod.IsingModel(g, h=np.zeros(self.n), J=self.J,
                                    h_range=(-1e9, 1e9), J_range=(-1e9, 1e9))

    def log_z(self):
        if not hasattr(self, "_log_z"):
            self._log_z = samplers.exact_log_z(self.to_model(), self.beta)
        return self._log_z


def gen_sk(n, zeta, seed):
    """Couplings drawn i.i.d. from N(0, (zeta/sqrt(n))^2), fields zero."""
    if n < 2:
        raise InputError("spin glass needs at least 2 variables")
    rng = np.random.default_rng(seed)
    J = rng.normal(0.0, zeta / np.sqrt(n), n * (n - 1) // 2)
    return SKInstance(n, float(zeta), int(seed), J)


def sk_sample(inst, d, seed):
    """d exact Boltzmann samples of the instance at its beta."""
    cfg = samplers.SamplerConfig(kind="exact", beta=inst.beta, n_samples=d,
                                 seed=seed)
    ss = samplers.exact_sample(inst.to_model(), cfg)
    return LogicalDataset(ss.samples, split="train")


def dump_sk(inst):
    lines = [f"sk v1 n={inst.n} zeta={fmt_float(inst.zeta)} seed={inst.seed} "
             f"beta={fmt_float(inst.beta)}"]
    edges = inst.graph().edges
    for k, (i, j) in enumerate(edges):
        lines.append(f"J {int(i)} {int(j)} {fmt_float(inst.J[k])}")
    return "\n".join(lines) + "\n"


def save_sk(inst, path):
    with open(path, "w") as f:
        f.write(dump_sk(inst))


def parse_sk(text, path=None):
    lines = [l for l in text.splitlines() if l.split("#", 1)[0].strip()]
    if not lines or not lines[0].startswith("sk v1"):
        raise ParseError("not a spin-glass instance file (missing 'sk v1')",
                         path, 1)
    fields = dict(tok.split("=", 1) for tok in lines[0].split()[2:])
    try:
        n = int(fields["n"])
        zeta = float(fields.get("zeta", 0.0))
        seed = int(fields.get("seed", 0))
        beta = float(fields.get("beta", 1.0))
    except (KeyError, ValueError):
        raise ParseError("malformed instance header", path, 1) from None
    g = topology.complete_graph(n)
    J = np.zeros(g.n_edges)
    filled = 0
    for ln, raw in enumerate(lines[1:], start=2):
        parts = raw.split()
        if parts[0] != "J" or len(parts) != 4:
            raise ParseError("expected: J <i> <j> <value>", path, ln)
        try:
            J[g.edge_index(int(parts[1]), int(parts[2]))] = float(parts[3])
        except ValueError:
            raise ParseError("malformed coupling line", path, ln) from None
        filled += 1
    if filled != g.n_edges:
        raise ParseError(f"expected {g.n_edges} couplings, found {filled}", path)
    return SKInstance(n, zeta, seed, J, beta)


def load_sk(path):
    with open(path) as f:
        return parse_sk(f.read(), path=str(path))


def load_optdigits(path_train, path_test, include_classes=True):
    """Ingest the comma-separated 8x8 digit scans, keeping classes 1-4.

    Pictures are cropped to 7x6 (dropping the leftmost column, the rightmost
    column, and the bottom row) and binarized at the gray-scale midpoint
    (pixel >= 8 -> +1).  With include_classes, four one-hot +/-1 class
    variables are appended after the 42 pixels.
    """
    train = _read_optdigits(path_train, include_classes)
    test = _read_optdigits(path_test, include_classes)
    train.split, test.split = "train", "test"
    return train, test


_KEEP_CLASSES = (1, 2, 3, 4)


def _read_optdigits(path, include_classes):
    rows = []
    labels = []
    with open(path) as f:
        for ln, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 65:
                raise ParseError(f"expected 65 comma-separated fields, "
                                 f"got {len(parts)}", str(path), ln)
            try:
                vals = [int(p) for p in parts]
            except ValueError:
                raise ParseError("non-integer field", str(path), ln) from None
            pixels, label = vals[:64], vals[64]
            if not 0 <= label <= 9:
                raise ParseError(f"unknown class {label}", str(path), ln)
            if any(not 0 <= p <= 16 for p in pixels):
                raise ParseError("pixel value outside 0..16", str(path), ln)
            if label not in _KEEP_CLASSES:
                continue
            img = np.array(pixels, dtype=np.int64).reshape(8, 8)
            img = img[:7, 1:7]
            spins = np.where(img >= 8, 1, -1).astype(np.int8).ravel()
            if include_classes:
                onehot = -np.ones(len(_KEEP_CLASSES), dtype=np.int8)
                onehot[_KEEP_CLASSES.index(label)] = 1
                spins = np.concatenate([spins, onehot])
            rows.append(spins)
            labels.append(label)
    if not rows:
        raise ParseError("no usable rows (classes 1-4) in file", str(path))
    return LogicalDataset(np.array(rows, dtype=np.int8),
                          labels=np.array(labels), shape=(7, 6))


def _pixel_count(ds):
    if ds.shape is not None:
        return ds.shape[0] * ds.shape[1]
    return ds.n_vars


def corrupt_salt_pepper(ds, fraction, seed):
    """Replace a per-picture random set of pixels with random +/-1 values.

    Exactly floor(fraction * pixel_count) pixels are masked per picture; the
    returned mask marks them 1.  Trailing class variables are never touched.
    """
    if not 0 <= fraction <= 1:
        raise InputError(f"fraction must be in [0, 1], got {fraction}")
    p = _pixel_count(ds)
    k = int(fraction * p)
    rng = np.random.default_rng(seed)
    rows = ds.rows.copy()
    mask = np.zeros_like(ds.rows, dtype=np.int8)
    for i in range(ds.n_rows):
        hit = rng.choice(p, size=k, replace=False)
        mask[i, hit] = 1
        rows[i, hit] = rng.integers(0, 2, size=k) * 2 - 1
    out = LogicalDataset(rows, labels=ds.labels, shape=ds.shape, split=ds.split)
    return out, mask


def corrupt_block(ds, block_rows, block_cols, anchor=(0, 0)):
    """Black out a fixed rectangle in every picture; mask marks it 1."""
    if ds.shape is None:
        raise InputError("block corruption needs an image shape")
    r, c = ds.shape
    ar, ac = anchor
    if block_rows < 1 or block_cols < 1:
        raise InputError("block dimensions must be positive")
    if ar < 0 or ac < 0 or ar + block_rows > r or ac + block_cols > c:
        raise InputError(f"{block_rows}x{block_cols} block at {anchor} does "
                         f"not fit in a {r}x{c} picture")
    pic_mask = np.zeros((r, c), dtype=np.int8)
    pic_mask[ar:ar + block_rows, ac:ac + block_cols] = 1
    flat = pic_mask.ravel()
    rows = ds.rows.copy()
    rows[:, :r * c][:, flat == 1] = 1        # rendered dark
    mask = np.zeros_like(ds.rows, dtype=np.int8)
    mask[:, :r * c] = flat
    out = LogicalDataset(rows, labels=ds.labels, shape=ds.shape, split=ds.split)
    return out, mask


# ---------------------------------------------------------------------------
# serialization

def dump_dataset(ds):
    head = f"dataset v1 n={ds.n_vars}"
    if ds.shape is not None:
        head += f" shape={ds.shape[0]}x{ds.shape[1]}"
    lines = [head]
    for i, row in enumerate(ds.rows):
        text = " ".join("+1" if v > 0 else "-1" for v in row)
        if ds.labels is not None:
            text += f" | {int(ds.labels[i])}"
        lines.append(text)
    return "\n".join(lines) + "\n"


def save_dataset(ds, path):
    with open(path, "w") as f:
        f.write(dump_dataset(ds))


def parse_dataset(text, path=None):
    lines = text.splitlines()
    if not lines or not lines[0].startswith("dataset v1"):
        raise ParseError("not a dataset file (missing 'dataset v1')", path, 1)
    n = None
    shape = None
    for tok in lines[0].split()[2:]:
        key, _, val = tok.partition("=")
        if key == "n":
            n = int(val)
        elif key == "shape":
            r, _, c = val.partition("x")
            shape = (int(r), int(c))
        else:
            raise ParseError(f"unknown header field {key!r}", path, 1)
    if n is None:
        raise ParseError("header missing n=<count>", path, 1)
    rows = []
    labels = []
    for ln, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        body, sep, lab = line.partition("|")
        try:
            vals = [int(t) for t in body.split()]
            if sep:
                labels.append(int(lab.strip()))
        except ValueError:
            raise ParseError("malformed data row", path, ln) from None
        if len(vals) != n or any(v not in (-1, 1) for v in vals):
            raise ParseError(f"row needs {n} values of +/-1", path, ln)
        rows.append(vals)
    if labels and len(labels) != len(rows):
        raise ParseError("some rows have labels and some do not", path)
    return LogicalDataset(np.array(rows, dtype=np.int8).reshape(len(rows), n),
                          labels=np.array(labels) if labels else None,
                          shape=shape)


def load_dataset(path):
    with open(path) as f:
        return parse_dataset(f.read(), path=str(path))


def dump_mask(mask):
    mask = np.asarray(mask)
    lines = [f"mask v1 n={mask.shape[1]}"]
    for row in mask:
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def save_mask(mask, path):
    with open(path, "w") as f:
        f.write(dump_mask(mask))


def parse_mask(text, path=None):
    lines = text.splitlines()
    if not lines or not lines[0].startswith("mask v1"):
        raise ParseError("not a mask file (missing 'mask v1')", path, 1)
    try:
        n = int(lines[0].split()[2].partition("=")[2])
    except (IndexError, ValueError):
        raise ParseError("malformed mask header", path, 1) from None
    rows = []
    for ln, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        try:
            vals = [int(t) for t in line.split()]
        except ValueError:
            raise ParseError("malformed mask row", path, ln) from None
        if len(vals) != n or any(v not in (0, 1) for v in vals):
            raise ParseError(f"mask row needs {n} values of 0/1", path, ln)
        rows.append(vals)
    return np.array(rows, dtype=np.int8).reshape(len(rows), n)


def load_mask(path):
    with open(path) as f:
        return parse_mask(f.read(), path=str(path))
