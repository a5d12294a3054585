"""Command-line pipelines: data generation, embedding, training, sampling,
reconstruction, classification, scoring, and rendering.

Every command writes its outputs plus a manifest capturing the resolved
arguments, seeds, and input digests; ``replay`` re-runs a manifest and, by
construction, reproduces the outputs byte for byte.  Exit codes: 0 success,
2 invalid input, 3 training stopped by the dynamic-range rule.
"""

import argparse
import ast
import sys
from dataclasses import replace
from pathlib import Path

from . import datasets, embedding, evaluation, model, samplers, topology, training
from ._util import derive_seed, fmt_float, sha256_file
from .errors import EmboltError, InputError, ParseError

VERSION = "0.1.0"

TRAIN_DEFAULTS = {
    "lr": 0.0025,
    "momentum": 0.5,
    "l2": 1e-5,
    "batch": 0,
    "iters": 1000,
    "seed": 0,
    "sampler": "sa",
    "beta": 1.0,
    "gamma": 0.0,
    "t_max": 15200,
    "neg_samples": 96,
    "sampler_seed": None,
    "eval_every": 0,
    "eval_samples": 150,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 2
    try:
        return args.func(args)
    except (EmboltError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


# ---------------------------------------------------------------------------
# parser

def build_parser():
    parser = argparse.ArgumentParser(
        prog="embolt",
        description="Train and probe hardware-embedded Boltzmann machines.")
    sub = parser.add_subparsers(dest="command")

    gen = sub.add_parser("gen-data", help="generate or ingest datasets")
    gsub = gen.add_subparsers(dest="kind")
    p = gsub.add_parser("bas", help="bars-and-stripes pictures")
    p.add_argument("--rows", type=int, default=7)
    p.add_argument("--cols", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_bas)
    p = gsub.add_parser("sk", help="spin-glass instances plus exact samples")
    p.add_argument("--n", type=int, default=15)
    p.add_argument("--zeta", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=150)
    p.add_argument("--instances", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_sk)
    p = gsub.add_parser("optdigits", help="ingest UCI digit scans")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--no-classes", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_optdigits)

    p = sub.add_parser("embed", help="build or inspect an embedding")
    _add_graph_args(p)
    p.add_argument("--n-logical", type=int)
    p.add_argument("--load", help="existing embedding file to validate")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("train", help="fit a model to a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--embedding")
    _add_graph_args(p)
    p.add_argument("--config", help="key = value file overridden by flags")
    p.add_argument("--lr", type=float)
    p.add_argument("--momentum", type=float)
    p.add_argument("--l2", type=float)
    p.add_argument("--batch", type=int)
    p.add_argument("--iters", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--sampler", choices=samplers.KINDS)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--t-max", type=int)
    p.add_argument("--neg-samples", type=int)
    p.add_argument("--sampler-seed", type=int)
    p.add_argument("--no-range-stop", action="store_true")
    p.add_argument("--resume", help="checkpoint to continue from")
    p.add_argument("--instance", help="spin-glass file for the eval hook")
    p.add_argument("--eval-every", type=int)
    p.add_argument("--eval-samples", type=int)
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sample", help="draw configurations from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--n", type=int, default=36)
    _add_sampler_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--embedding")
    _add_graph_args(p)
    p.add_argument("--shape", help="RxC picture shape for rendering")
    p.add_argument("--render", help="bitmap filename (written inside --out)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("reconstruct", help="repair corrupted pictures")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True, help="clean picture dataset")
    p.add_argument("--embedding")
    _add_graph_args(p)
    p.add_argument("--noise", choices=("salt-pepper", "block"), required=True)
    p.add_argument("--fraction", type=float, default=0.5)
    p.add_argument("--rows", type=int, default=5)
    p.add_argument("--cols", type=int, default=4)
    p.add_argument("--anchor", default="0,0")
    p.add_argument("--votes", type=int, default=100)
    _add_sampler_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("classify", help="vote class variables for pictures")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--embedding")
    _add_graph_args(p)
    p.add_argument("--class-vars", type=int, default=4,
                   help="number of trailing one-hot class variables")
    p.add_argument("--votes", type=int, default=100)
    _add_sampler_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("eval", help="score model samples against a generator")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--data", help="training set for the reference value")
    p.add_argument("--samples", type=int, default=150)
    _add_sampler_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--embedding")
    _add_graph_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("render", help="dataset to bitmap grid")
    p.add_argument("--data", required=True)
    p.add_argument("--cols", type=int)
    p.add_argument("--name", default="grid.pbm")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("replay", help="re-run a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="write outputs here instead")
    p.set_defaults(func=cmd_replay)
    return parser


def _add_graph_args(p):
    p.add_argument("--chimera", help="R,C,T lattice size")
    p.add_argument("--broken", help="file of broken qubit ids")
    p.add_argument("--graph", help="graph dump file")
    p.add_argument("--complete", type=int, help="all-to-all over N variables")


def _add_sampler_args(p):
    p.add_argument("--sampler", choices=samplers.KINDS, default="sa")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--t-max", type=int, default=15200)


# ---------------------------------------------------------------------------
# shared plumbing

def _resolve_graph(args):
    given = [x for x in ("chimera", "graph", "complete") if getattr(args, x, None)]
    if len(given) > 1:
        raise InputError("give at most one of --chimera/--graph/--complete")
    if getattr(args, "graph", None):
        return topology.load_graph(args.graph)
    if getattr(args, "complete", None):
        return topology.complete_graph(args.complete)
    if getattr(args, "chimera", None):
        parts = args.chimera.split(",")
        if len(parts) != 3:
            raise InputError("--chimera expects R,C,T")
        try:
            r, c, t = (int(x) for x in parts)
        except ValueError:
            raise InputError("--chimera expects integers R,C,T") from None
        broken = frozenset()
        if getattr(args, "broken", None):
            broken = frozenset(_read_ids(args.broken))
        return topology.build_chimera(topology.ChimeraSpec(r, c, t, broken))
    return None


def _read_ids(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    ids = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for tok in line.split():
            try:
                ids.append(int(tok))
            except ValueError:
                raise ParseError(f"expected qubit id, got {tok!r}",
                                 path, ln) from None
    return ids


def _load_embedding_for(args, ck):
    """Embedding named on the command line, or identity over the model graph."""
    if getattr(args, "embedding", None):
        base = _resolve_graph(args)
        if base is None:
            raise InputError("--embedding needs --chimera/--graph/--complete "
                             "to identify the hardware")
        emb = embedding.load_embedding(base, args.embedding)
        if sorted(int(q) for q in emb.qubit_order) != \
                sorted(int(q) for q in ck.model.graph.vertices):
            raise InputError("embedding chains do not cover the checkpoint's "
                             "qubits")
        return emb
    return embedding.Embedding.identity(ck.model.graph)


def _sampler_config(args, n_samples, seed):
    return samplers.SamplerConfig(
        kind=args.sampler, beta=args.beta, gamma=args.gamma,
        t_max=args.t_max, n_samples=n_samples, seed=seed)


def _parse_shape(text):
    r, sep, c = text.partition("x")
    try:
        return int(r), int(c)
    except ValueError:
        raise InputError(f"bad shape {text!r}, expected RxC") from None


def _outdir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


_MANIFEST_SKIP = {"func", "command", "kind", "verbose"}


def _command_name(args):
    name = args.command
    if getattr(args, "kind", None):
        name += f" {args.kind}"
    return name


def write_manifest(args, out_dir, inputs, outputs):
    """Record the resolved run so it can be replayed bit-exactly.

    ``arg.*`` lines hold every resolved argument as a Python literal except
    the output directory, which lives in its own ``outdir`` line so the same
    run replayed elsewhere produces identical output files.
    """
    name = _command_name(args)
    lines = [f"command = {name}",
             f"version = {VERSION}",
             f"outdir = {Path(out_dir).resolve()}"]
    for key in sorted(vars(args)):
        if key in _MANIFEST_SKIP or key == "out":
            continue
        lines.append(f"arg.{key} = {vars(args)[key]!r}")
    for label, path in sorted(inputs.items()):
        lines.append(f"input.{label} = {path}")
        lines.append(f"sha256.{label} = {sha256_file(path)}")
    for label, fname in sorted(outputs.items()):
        lines.append(f"output.{label} = {fname}")
    path = out_dir / (name.replace(" ", "-") + ".manifest")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_manifest(path):
    command = None
    outdir = None
    args = {}
    inputs = {}
    outputs = {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = (t.strip() for t in line.partition("="))
        if not sep:
            raise ParseError("expected key = value", str(path), ln)
        if key == "command":
            command = val
        elif key == "outdir":
            outdir = val
        elif key.startswith("arg."):
            try:
                args[key[4:]] = ast.literal_eval(val)
            except (SyntaxError, ValueError):
                raise ParseError(f"unreadable value for {key}",
                                 str(path), ln) from None
        elif key.startswith("input."):
            inputs[key[6:]] = val
        elif key.startswith("output."):
            outputs[key[7:]] = val
    if command is None:
        raise ParseError("manifest has no command line", str(path))
    return command, args, inputs, outputs, outdir


# ---------------------------------------------------------------------------
# commands

def cmd_gen_bas(args):
    out = _outdir(args)
    train, test = datasets.gen_bas(args.rows, args.cols, args.seed)
    datasets.save_dataset(train, out / "bas_train.txt")
    datasets.save_dataset(test, out / "bas_test.txt")
    write_manifest(args, out, {}, {"train": "bas_train.txt",
                                   "test": "bas_test.txt"})
    print(f"{train.n_rows + test.n_rows} pictures "
          f"({train.n_rows}/{test.n_rows} split)", file=sys.stderr)
    return 0


def cmd_gen_sk(args):
    out = _outdir(args)
    outputs = {}
    for i in range(args.instances):
        inst = datasets.gen_sk(args.n, args.zeta,
                               derive_seed(args.seed, 2 * i))
        ds = datasets.sk_sample(inst, args.samples,
                                derive_seed(args.seed, 2 * i + 1))
        inst_name = f"sk_{i:02d}.inst"
        data_name = f"sk_{i:02d}_train.txt"
        datasets.save_sk(inst, out / inst_name)
        datasets.save_dataset(ds, out / data_name)
        outputs[f"instance_{i:02d}"] = inst_name
        outputs[f"samples_{i:02d}"] = data_name
    write_manifest(args, out, {}, outputs)
    return 0


def cmd_gen_optdigits(args):
    out = _outdir(args)
    train, test = datasets.load_optdigits(args.train, args.test,
                                          include_classes=not args.no_classes)
    datasets.save_dataset(train, out / "optdigits_train.txt")
    datasets.save_dataset(test, out / "optdigits_test.txt")
    write_manifest(args, out, {"train": args.train, "test": args.test},
                   {"train": "optdigits_train.txt",
                    "test": "optdigits_test.txt"})
    print(f"{train.n_rows} train rows, {test.n_rows} test rows",
          file=sys.stderr)
    return 0


def cmd_embed(args):
    out = _outdir(args)
    g = _resolve_graph(args)
    if g is None:
        raise InputError("embed needs --chimera or --graph")
    inputs = {}
    if args.load:
        emb = embedding.load_embedding(g, args.load)
        inputs["embedding"] = args.load
    elif args.n_logical:
        emb = embedding.clique_embed(g, args.n_logical)
    else:
        raise InputError("embed needs --n-logical or --load")
    stats = embedding.embedding_stats(emb)
    embedding.save_embedding(emb, out / "embedding.emb")
    (out / "graph.txt").write_text(topology.dump_graph(g))
    stats_lines = [
        f"n_logical = {stats.n_logical}",
        f"n_physical = {stats.n_physical}",
        f"min_chain = {stats.min_chain}",
        f"max_chain = {stats.max_chain}",
        f"usage = {fmt_float(stats.usage)}",
        f"couplers = {stats.couplers}",
        f"logical_params = {stats.logical_params}",
        f"physical_params = {stats.physical_params}",
        f"row = {stats.row()}",
    ]
    (out / "stats.txt").write_text("\n".join(stats_lines) + "\n")
    write_manifest(args, out, inputs, {"embedding": "embedding.emb",
                                       "graph": "graph.txt",
                                       "stats": "stats.txt"})
    print(stats.row(), file=sys.stderr)
    return 0


_FLOAT_KEYS = ("lr", "momentum", "l2", "beta", "gamma")


def _coerce_setting(key, val, path, ln):
    if key == "sampler":
        if val not in samplers.KINDS:
            raise ParseError(f"unknown sampler {val!r}", path, ln)
        return val
    try:
        return float(val) if key in _FLOAT_KEYS else int(val)
    except ValueError:
        raise ParseError(f"bad value for {key}", path, ln) from None


def _train_settings(args):
    """defaults < config file < explicit flags."""
    merged = dict(TRAIN_DEFAULTS)
    if args.config:
        for ln, raw in enumerate(Path(args.config).read_text().splitlines(),
                                 start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = (t.strip() for t in line.partition("="))
            key = key.replace("-", "_")
            if not sep or key not in TRAIN_DEFAULTS:
                raise ParseError(f"unknown config key {key!r}",
                                 args.config, ln)
            merged[key] = _coerce_setting(key, val, args.config, ln)
    for key in TRAIN_DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    if merged["sampler_seed"] is None:
        merged["sampler_seed"] = merged["seed"]
    return merged


def cmd_train(args):
    out = _outdir(args)
    cfgv = _train_settings(args)
    ds = datasets.load_dataset(args.data)
    inputs = {"data": args.data}
    emb = None
    graph = None
    if args.embedding:
        base = _resolve_graph(args)
        if base is None:
            raise InputError("--embedding needs --chimera/--graph to "
                             "identify the hardware")
        emb = embedding.load_embedding(base, args.embedding)
        inputs["embedding"] = args.embedding
    else:
        graph = _resolve_graph(args)
    start = None
    if args.resume:
        start = model.load_checkpoint(args.resume)
        inputs["resume"] = args.resume

    scfg = samplers.SamplerConfig(
        kind=cfgv["sampler"], beta=cfgv["beta"], gamma=cfgv["gamma"],
        t_max=cfgv["t_max"], n_samples=cfgv["neg_samples"],
        seed=cfgv["sampler_seed"])
    tcfg = training.TrainConfig(
        learning_rate=cfgv["lr"], momentum=cfgv["momentum"], l2=cfgv["l2"],
        minibatch=cfgv["batch"], max_iters=cfgv["iters"], sampler=scfg,
        stop_on_range_exit=not args.no_range_stop, seed=cfgv["seed"],
        eval_every=cfgv["eval_every"])

    hook = None
    if args.instance:
        inst = datasets.load_sk(args.instance)
        inputs["instance"] = args.instance
        eval_emb = emb
        n_eval = cfgv["eval_samples"]

        def hook(mm, iteration):
            ecfg = replace(scfg, n_samples=n_eval,
                           seed=derive_seed(scfg.seed, 10 ** 9 + iteration))
            ss = samplers.sample(mm, ecfg)
            rows = ss.samples if eval_emb is None else \
                eval_emb.decode(ss.samples, fallback=-1)
            return evaluation.lambda_av(inst, rows)

    result = training.train(ds, tcfg, emb=emb, graph=graph, start=start,
                            eval_hook=hook, quiet=not args.verbose)
    model.save_checkpoint(result.checkpoint, out / "checkpoint.txt")
    (out / "train.log").write_text(training.format_log(result.log))
    write_manifest(args, out, inputs, {"checkpoint": "checkpoint.txt",
                                       "log": "train.log"})
    if result.stop_reason == "range_exit":
        kind, where = result.range_exit.first()
        print(f"range exit at iteration {result.range_exit.iteration}: "
              f"{kind}{where} would leave its range", file=sys.stderr)
        return 3
    print(f"stopped after {result.checkpoint.iteration} iterations",
          file=sys.stderr)
    return 0


def cmd_sample(args):
    out = _outdir(args)
    ck = model.load_checkpoint(args.checkpoint)
    cfg = _sampler_config(args, args.n, args.seed)
    ss = samplers.sample(ck.model, cfg)
    samplers.save_samples(ss, out / "samples.txt")
    inputs = {"checkpoint": args.checkpoint}
    outputs = {"samples": "samples.txt"}
    if args.render:
        emb = _load_embedding_for(args, ck)
        if args.embedding:
            inputs["embedding"] = args.embedding
        logical = emb.decode(ss.samples)
        if not args.shape:
            raise InputError("--render needs --shape RxC")
        shape = _parse_shape(args.shape)
        pixels = logical[:, :shape[0] * shape[1]]
        for i, written in enumerate(evaluation.render_pbm(
                pixels, shape, out / args.render)):
            outputs[f"render_{i}"] = Path(written).name
    write_manifest(args, out, inputs, outputs)
    return 0


def cmd_reconstruct(args):
    out = _outdir(args)
    ck = model.load_checkpoint(args.checkpoint)
    ds = datasets.load_dataset(args.data)
    emb = _load_embedding_for(args, ck)
    inputs = {"checkpoint": args.checkpoint, "data": args.data}
    if args.embedding:
        inputs["embedding"] = args.embedding
    if args.noise == "salt-pepper":
        corrupted, mask = datasets.corrupt_salt_pepper(
            ds, args.fraction, derive_seed(args.seed, 555))
    else:
        ar, _, ac = args.anchor.partition(",")
        try:
            anchor = (int(ar), int(ac))
        except ValueError:
            raise InputError("--anchor expects R,C") from None
        corrupted, mask = datasets.corrupt_block(ds, args.rows, args.cols,
                                                 anchor)
    cfg = _sampler_config(args, args.votes, args.seed)
    recon, ties = evaluation.reconstruct_set(ck.model, emb, corrupted.rows,
                                             mask, cfg, votes=args.votes)
    mean_mistakes, fraction = evaluation.mistake_rate(ds.rows, recon, mask)
    report = evaluation.EvalReport(mistakes_mean=mean_mistakes,
                                   mistake_fraction=fraction, ties=ties)
    outputs = {}
    datasets.save_dataset(corrupted, out / "corrupted.txt")
    datasets.save_mask(mask, out / "mask.txt")
    datasets.save_dataset(replace_rows(ds, recon), out / "recon.txt")
    evaluation.save_report(report, out / "report.txt")
    outputs.update({"corrupted": "corrupted.txt", "mask": "mask.txt",
                    "recon": "recon.txt", "report": "report.txt"})
    if ds.shape is not None:
        for name, pics in (("truth", ds.rows), ("corrupted", corrupted.rows),
                           ("recon", recon)):
            for written in evaluation.render_pbm(pics, ds.shape,
                                                 out / f"{name}.pbm"):
                outputs[f"image_{Path(written).name}"] = Path(written).name
    write_manifest(args, out, inputs, outputs)
    print(f"mistakes per picture {mean_mistakes:.3f} "
          f"({100 * fraction:.2f}% of masked pixels)", file=sys.stderr)
    return 0


def replace_rows(ds, rows):
    return datasets.LogicalDataset(rows, labels=ds.labels, shape=ds.shape,
                                   split=ds.split)


def cmd_classify(args):
    out = _outdir(args)
    ck = model.load_checkpoint(args.checkpoint)
    ds = datasets.load_dataset(args.data)
    emb = _load_embedding_for(args, ck)
    inputs = {"checkpoint": args.checkpoint, "data": args.data}
    if args.embedding:
        inputs["embedding"] = args.embedding
    k = args.class_vars
    class_ids = list(range(emb.n_logical - k, emb.n_logical))
    cfg = _sampler_config(args, args.votes, args.seed)
    preds, accuracy, confusion = evaluation.classify_set(
        ck.model, emb, ds, class_ids, cfg, votes=args.votes)
    report = evaluation.EvalReport(accuracy=accuracy, confusion=confusion,
                                   indeterminate=int((preds < 0).sum()))
    evaluation.save_report(report, out / "report.txt")
    lines = [str(int(p)) for p in preds]
    (out / "predictions.txt").write_text("\n".join(lines) + "\n")
    write_manifest(args, out, inputs, {"report": "report.txt",
                                       "predictions": "predictions.txt"})
    if accuracy is not None:
        print(f"accuracy {100 * accuracy:.2f}%", file=sys.stderr)
    return 0


def cmd_eval(args):
    out = _outdir(args)
    ck = model.load_checkpoint(args.checkpoint)
    inst = datasets.load_sk(args.instance)
    emb = _load_embedding_for(args, ck)
    inputs = {"checkpoint": args.checkpoint, "instance": args.instance}
    if args.embedding:
        inputs["embedding"] = args.embedding
    cfg = _sampler_config(args, args.samples, args.seed)
    ss = samplers.sample(ck.model, cfg)
    rows = emb.decode(ss.samples, fallback=-1)
    report = evaluation.EvalReport(
        lambda_av_model=evaluation.lambda_av(inst, rows))
    if args.data:
        ds = datasets.load_dataset(args.data)
        report.lambda_av_data = evaluation.lambda_av(inst, ds)
        inputs["data"] = args.data
    evaluation.save_report(report, out / "report.txt")
    write_manifest(args, out, inputs, {"report": "report.txt"})
    print(report.to_kv().strip(), file=sys.stderr)
    return 0


def cmd_render(args):
    out = _outdir(args)
    ds = datasets.load_dataset(args.data)
    if ds.shape is None:
        raise InputError("dataset has no picture shape to render")
    pixels = ds.rows[:, :ds.shape[0] * ds.shape[1]]
    written = evaluation.render_pbm(pixels, ds.shape, out / args.name,
                                    cols=args.cols)
    outputs = {f"image_{Path(w).name}": Path(w).name for w in written}
    write_manifest(args, out, {"data": args.data}, outputs)
    return 0


def cmd_replay(args):
    command, stored, _inputs, _outputs, outdir = read_manifest(args.manifest)
    if command not in _DISPATCH:
        raise InputError(f"manifest names unknown command {command!r}")
    parts = command.split()
    ns = argparse.Namespace(**stored)
    ns.command = parts[0]
    ns.kind = parts[1] if len(parts) > 1 else None
    ns.verbose = False
    ns.out = args.out if args.out else outdir
    if ns.out is None:
        raise InputError("manifest has no outdir; pass --out")
    return _DISPATCH[command](ns)


_DISPATCH = {
    "gen-data bas": cmd_gen_bas,
    "gen-data sk": cmd_gen_sk,
    "gen-data optdigits": cmd_gen_optdigits,
    "embed": cmd_embed,
    "train": cmd_train,
    "sample": cmd_sample,
    "reconstruct": cmd_reconstruct,
    "classify": cmd_classify,
    "eval": cmd_eval,
    "render": cmd_render,
}


if __name__ == "__main__":
    entry()
