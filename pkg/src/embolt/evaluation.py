"""Quality measures for trained models: the average log-likelihood proxy
under a known generator, vote-based reconstruction and classification,
relative entropy against enumerable distributions, and bitmap rendering.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import samplers
from ._util import derive_seed, fmt_float
from .errors import InputError, ParseError

INDETERMINATE = -1


def lambda_av(inst, samples):
    """Average log-likelihood of samples under the generating model.

    Lambda = -beta * mean E_Q(s) - log Z_Q, computable only because the
    generator Q (a spin-glass instance) is fully known.
    """
    rows = np.asarray(getattr(samples, "rows", samples), dtype=np.int8)
    if rows.ndim == 1:
        rows = rows[None, :]
    if rows.shape[0] == 0:
        raise InputError("no samples to score")
    q = inst.to_model()
    if rows.shape[1] != q.graph.n_vertices:
        raise InputError(f"samples have {rows.shape[1]} columns, "
                         f"instance has {q.graph.n_vertices}")
    return float(-inst.beta * q.energy(rows).mean() - inst.log_z())


def reconstruct(m, e, picture, mask, cfg, votes=100):
    """Fill in the masked pixels of one picture by repeated sampling.

    Known pixels are clamped (whole chains); each of ``votes`` draws is
    decoded per chain, and each masked pixel takes the majority value over
    the votes.  Returns (reconstructed picture, number of vote ties); tied
    pixels fall back to -1.  Known pixels pass through unchanged.
    """
    picture = np.asarray(picture).ravel()
    mask = np.asarray(mask).ravel()
    if picture.shape != mask.shape or len(picture) != e.n_logical:
        raise InputError("picture/mask must both have one entry per chain")
    known = {i: int(picture[i]) for i in np.where(mask == 0)[0]}
    vote_cfg = replace(cfg, clamp=e.clamp_map(known), n_samples=votes)
    ss = samplers.sample(m, vote_cfg)
    decoded = e.decode(ss.samples)              # (votes, N) ternary
    sums = decoded.astype(np.int64).sum(axis=0)
    out = picture.copy()
    ties = 0
    for i in np.where(mask == 1)[0]:
        if sums[i] > 0:
            out[i] = 1
        elif sums[i] < 0:
            out[i] = -1
        else:
            out[i] = -1
            ties += 1
    return out, ties


def reconstruct_set(m, e, ds, mask, cfg, votes=100):
    """Reconstruct every picture of a dataset; seeds derived per picture."""
    rows = np.asarray(getattr(ds, "rows", ds))
    mask = np.asarray(mask)
    if mask.shape != rows.shape:
        raise InputError("mask shape must match the dataset")
    out = rows.copy()
    ties = 0
    for i in range(rows.shape[0]):
        pic_cfg = replace(cfg, seed=derive_seed(cfg.seed, i))
        out[i], t = reconstruct(m, e, rows[i], mask[i], pic_cfg, votes)
        ties += t
    return out, ties


def mistake_rate(truth, recon, mask):
    """(mean mistakes per picture, mistake fraction) over masked pixels."""
    truth = np.atleast_2d(np.asarray(truth))
    recon = np.atleast_2d(np.asarray(recon))
    mask = np.atleast_2d(np.asarray(mask))
    if truth.shape != recon.shape or truth.shape != mask.shape:
        raise InputError("truth, reconstruction, and mask shapes must match")
    masked = int(mask.sum())
    wrong = int(((truth != recon) & (mask == 1)).sum())
    if masked == 0:
        return 0.0, 0.0
    return wrong / truth.shape[0], wrong / masked


def classify(m, e, picture, class_vars, cfg, votes=100):
    """Assign a picture to the class its samples vote for.

    Pixel chains are clamped; ``class_vars`` lists the logical indices of the
    one-hot class variables.  A vote is valid when exactly one of them
    decodes to +1.  Returns (winning position in class_vars, per-position
    valid-vote counts); INDETERMINATE (-1) when no vote is valid.  Count ties
    break toward the earlier position.
    """
    picture = np.asarray(picture).ravel()
    class_vars = [int(c) for c in class_vars]
    pixels = [i for i in range(e.n_logical) if i not in set(class_vars)]
    if len(picture) == e.n_logical:
        known = {i: int(picture[i]) for i in pixels}
    elif len(picture) == len(pixels):
        known = {i: int(picture[k]) for k, i in enumerate(pixels)}
    else:
        raise InputError("picture must cover the pixel variables")
    vote_cfg = replace(cfg, clamp=e.clamp_map(known), n_samples=votes)
    ss = samplers.sample(m, vote_cfg)
    decoded = e.decode(ss.samples)[:, class_vars]
    valid = (decoded == 1).sum(axis=1) == 1
    counts = (decoded[valid] == 1).sum(axis=0)
    if not valid.any():
        return INDETERMINATE, counts
    return int(np.argmax(counts)), counts


def classify_set(m, e, ds, class_vars, cfg, votes=100):
    """Classify every picture; returns (predictions, accuracy, confusion).

    Dataset labels are matched positionally: label value = class_vars
    position via the dataset's label order (labels must already be 0-based
    positions or convertible by the caller).  Confusion maps (true, pred)
    pairs to counts, with pred = INDETERMINATE for abstentions.
    """
    rows = np.asarray(getattr(ds, "rows", ds))
    labels = getattr(ds, "labels", None)
    preds = []
    for i in range(rows.shape[0]):
        pic = rows[i][:rows.shape[1] - len(class_vars)] \
            if rows.shape[1] == e.n_logical else rows[i]
        pic_cfg = replace(cfg, seed=derive_seed(cfg.seed, i))
        pred, _ = classify(m, e, pic, class_vars, pic_cfg, votes)
        preds.append(pred)
    preds = np.array(preds)
    accuracy = None
    confusion = {}
    if labels is not None:
        uniq = sorted(set(int(l) for l in labels))
        pos = {lab: k for k, lab in enumerate(uniq)}
        truth = np.array([pos[int(l)] for l in labels])
        accuracy = float((preds == truth).mean())
        for t, p in zip(truth, preds):
            confusion[(int(t), int(p))] = confusion.get((int(t), int(p)), 0) + 1
    return preds, accuracy, confusion


def relative_entropy(data, m, beta, gamma=None):
    """KL divergence of the empirical data distribution from the model.

    Classical (gamma None): KL(q || Boltzmann(m, beta)) via enumeration of
    log Z.  Quantum: Tr[rho_D ln rho_D] - Tr[rho_D ln rho] with rho_D the
    diagonal empirical density and rho the transverse-field thermal state.
    The convention 0*ln(0) = 0 applies.
    """
    rows = np.asarray(getattr(data, "rows", data), dtype=np.int8)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise InputError("need a non-empty data matrix")
    n = m.graph.n_vertices
    if rows.shape[1] != n:
        raise InputError(f"data has {rows.shape[1]} columns, model has {n}")
    states, counts = np.unique(
        ((1 - rows.astype(np.int64)) // 2 * (1 << np.arange(n))).sum(axis=1),
        return_counts=True)
    q = counts / counts.sum()
    entropy = -float(np.sum(q * np.log(q)))
    if gamma is None:
        log_z = samplers.exact_log_z(m, beta)
        uniq_rows = np.stack([(1 - 2 * ((states >> k) & 1)) for k in range(n)],
                             axis=1).astype(np.int8)
        cross = float(np.sum(q * (-beta * m.energy(uniq_rows) - log_z)))
    else:
        qt = samplers.quantum_thermal(m, beta, gamma)
        cross = float(np.sum(q * qt.ln_rho_diag[states]))
    return -entropy - cross


@dataclass
class EvalReport:
    """Whatever a given evaluation produced; unset fields stay None."""

    lambda_av_model: float = None
    lambda_av_data: float = None
    mistakes_mean: float = None
    mistake_fraction: float = None
    accuracy: float = None
    confusion: dict = field(default_factory=dict)
    ties: int = None
    indeterminate: int = None
    moment_gap_first: float = None
    moment_gap_second: float = None

    def to_kv(self):
        lines = []
        for key in ("lambda_av_model", "lambda_av_data", "mistakes_mean",
                    "mistake_fraction", "accuracy", "ties", "indeterminate",
                    "moment_gap_first", "moment_gap_second"):
            val = getattr(self, key)
            if val is None:
                continue
            if isinstance(val, float):
                lines.append(f"{key} = {fmt_float(val)}")
            else:
                lines.append(f"{key} = {val}")
        for (t, p), c in sorted(self.confusion.items()):
            lines.append(f"confusion_{t}_{p} = {c}")
        return "\n".join(lines) + "\n"

    def to_text(self):
        return self.to_kv().replace(" = ", "\t")


def save_report(report, path):
    with open(path, "w") as f:
        f.write(report.to_kv())


# ---------------------------------------------------------------------------
# portable bitmap rendering

def render_pbm(pictures, shape, path, cols=None, tie=-1):
    """Write a row-major grid of pictures as a plain bitmap (+1 = black).

    Ternary inputs are allowed: 0 entries take the ``tie`` value in the
    bitmap, and when any are present a companion .pgm gray map (0/1/2 for
    -1/0/+1) is written next to the bitmap.  Returns the written paths.
    """
    pics = np.atleast_2d(np.asarray(pictures))
    r, c = shape
    if pics.shape[1] != r * c:
        raise InputError(f"pictures have {pics.shape[1]} pixels, "
                         f"shape {r}x{c} needs {r * c}")
    n = pics.shape[0]
    if cols is None:
        cols = max(1, math.ceil(math.sqrt(n)))
    grid_rows = math.ceil(n / cols)
    canvas = -np.ones((grid_rows * r, cols * c), dtype=np.int8)
    has_tie = bool((pics == 0).any())
    tie_canvas = canvas.copy()
    for i in range(n):
        gr, gc = divmod(i, cols)
        img = pics[i].reshape(r, c)
        tie_canvas[gr * r:(gr + 1) * r, gc * c:(gc + 1) * c] = img
        canvas[gr * r:(gr + 1) * r, gc * c:(gc + 1) * c] = \
            np.where(img == 0, tie, img)
    h, w = canvas.shape
    body = "\n".join(" ".join("1" if v > 0 else "0" for v in row)
                     for row in canvas)
    with open(path, "w") as f:
        f.write(f"P1\n{w} {h}\n{body}\n")
    written = [str(path)]
    if has_tie:
        gray = str(path) + ".pgm"
        body = "\n".join(" ".join(str(int(v) + 1) for v in row)
                         for row in tie_canvas)
        with open(gray, "w") as f:
            f.write(f"P2\n{w} {h}\n2\n{body}\n")
        written.append(gray)
    return written


def parse_pbm(text, path=None):
    """Read a plain bitmap back into a +/-1 matrix (1 -> +1)."""
    toks = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0]
        toks.extend(line.split())
    if not toks or toks[0] != "P1":
        raise ParseError("not a plain bitmap (missing P1)", path, 1)
    try:
        w, h = int(toks[1]), int(toks[2])
        bits = [int(t) for t in toks[3:]]
    except (IndexError, ValueError):
        raise ParseError("malformed bitmap", path) from None
    if len(bits) != w * h or any(b not in (0, 1) for b in bits):
        raise ParseError(f"expected {w * h} bits of 0/1", path)
    return (2 * np.array(bits, dtype=np.int8) - 1).reshape(h, w)


def load_pbm(path):
    with open(path) as f:
        return parse_pbm(f.read(), path=str(path))
