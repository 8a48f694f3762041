"""Command-line front end.

Results go to stdout as tab-separated lines, diagnostics to stderr. Exit
status is 0 on success, 2 for bad input or usage and 3 for numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import _parallel
from .align import Variant, align, apply, reference_matrix
from .embedding import Embedding, intersect, load_text, save_text
from .errors import InputError, NumericalError
from .evaluation import (
    NoiseSpec,
    analogy_eval,
    gaussian_calibrate,
    load_analogy_dataset,
    load_similarity_dataset,
    mean_cosine,
    rmse,
    similarity_eval,
)
from .translation import load_lexicon, pivot_translate, train_translation, translation_eval

VARIANTS = [v.value for v in Variant]


def _num(x: float) -> str:
    return format(float(x), ".12g")


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("values must be positive integers")
    return values


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _safe_cosine(a, b) -> float:
    try:
        return mean_cosine(a, b)
    except InputError:
        return math.nan


def _emit(lines: Sequence[str]) -> None:
    sys.stdout.write("".join(line + "\n" for line in lines))


def cmd_align(args) -> int:
    target = load_text(args.target)
    source = load_text(args.source)
    pair = intersect(target, source)
    fit = pair.head(args.vocab_limit) if args.vocab_limit else pair
    transform = align(fit, args.variant, allow_reflection=not args.so3)
    save_text(apply(transform, source), args.out, with_header=args.header)
    if args.transform_out:
        transform.save(args.transform_out)
    moved = transform.transform(pair.source.matrix)
    ref = reference_matrix(pair, args.variant)
    _emit([
        f"shared\t{pair.n}",
        f"fitted_on\t{fit.n}",
        f"scale\t{_num(transform.scale)}",
        f"rmse_before\t{_num(rmse(pair))}",
        f"rmse_after\t{_num(rmse(ref, moved))}",
        f"cosine_before\t{_num(_safe_cosine(*pair))}",
        f"cosine_after\t{_num(_safe_cosine(ref, moved))}",
    ])
    return 0


def cmd_calibrate(args) -> int:
    specs = [NoiseSpec(s, f, args.seed) for s in args.sigma for f in args.fraction]
    emb = load_text(args.emb)
    lines = ["sigma\tfraction\trmse"]
    for spec in specs:
        report = gaussian_calibrate(emb, spec, args.variant)
        lines.append(f"{_num(spec.sigma)}\t{_num(spec.fraction)}\t{_num(report.score)}")
    _emit(lines)
    return 0


def cmd_eval(args) -> int:
    target = load_text(args.target)
    source = None
    if args.cross:
        if not args.source:
            raise InputError("--cross needs --source")
        source = load_text(args.source)
    if args.mode == "sim":
        ds = load_similarity_dataset(args.dataset, lower=args.lower)
        report = similarity_eval(target, source, ds, "cross" if args.cross else "within_target")
    else:
        ds = load_analogy_dataset(args.dataset, lower=args.lower)
        report = analogy_eval(target, source, ds, k=args.k)
    sys.stdout.write(report.to_json() if args.json else report.to_text())
    return 0


def cmd_translate(args) -> int:
    source = load_text(args.source)
    target = load_text(args.target)
    seed = load_lexicon(args.seed_lexicon)
    test = load_lexicon(args.test_lexicon)
    space = "union" if args.space == "union" else "target_only"
    ks = args.k
    rows = [("unaligned", translation_eval(source, target, test, ks, space))]
    if args.pivot:
        if not args.seed_lexicon2:
            raise InputError("--pivot needs --seed-lexicon2")
        pivot = load_text(args.pivot)
        seed2 = load_lexicon(args.seed_lexicon2)
        report = pivot_translate(source, target, pivot, seed, seed2, test, ks, args.variant, space,
                                 allow_reflection=not args.so3)
        rows.append(("pivot", report))
    else:
        transform = train_translation(source, target, seed, args.variant,
                                      allow_reflection=not args.so3)
        rows.append(("aligned", translation_eval(apply(transform, source), target, test, ks, space)))
    lines = ["setting\t" + "\t".join(f"P@{k}" for k in ks) + "\tevaluated\tskipped"]
    for name, report in rows:
        cells = [_num(report.score[k]) for k in ks]
        lines.append("\t".join([name, *cells, str(report.evaluated), str(report.skipped)]))
    _emit(lines)
    return 0


def cmd_ensemble(args) -> int:
    target = load_text(args.target)
    source = load_text(args.source)
    pair = intersect(target, source)
    transform = align(pair, args.variant, allow_reflection=not args.so3)
    moved = transform.transform(pair.source.matrix)
    ref = reference_matrix(pair, args.variant)
    save_text(Embedding(pair.tokens, 0.5 * (ref + moved)), args.out, with_header=args.header)
    _emit([f"shared\t{pair.n}", f"rmse_after\t{_num(rmse(ref, moved))}"])
    return 0


def cmd_info(args) -> int:
    emb = load_text(args.emb)
    norms = np.linalg.norm(emb.matrix, axis=1)
    _emit([
        f"n\t{emb.n}",
        f"d\t{emb.dim}",
        f"norm_min\t{_num(norms.min())}",
        f"norm_mean\t{_num(norms.mean())}",
        f"norm_median\t{_num(np.median(norms))}",
        f"norm_max\t{_num(norms.max())}",
    ])
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--threads", type=_positive_int, default=None,
                        help=f"worker threads (default ${_parallel.ENV_VAR} or all cores)")

    parser = argparse.ArgumentParser(prog="orient", description="Closed-form embedding alignment.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", parents=[common], help="align a source embedding onto a target")
    p.add_argument("--target", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--variant", choices=VARIANTS, default="r")
    p.add_argument("--so3", action="store_true", help="forbid reflections")
    p.add_argument("--out", required=True, help="aligned source embedding")
    p.add_argument("--transform-out", help="write the learned transform as JSON")
    p.add_argument("--vocab-limit", type=_positive_int, help="fit on the first K shared words only")
    p.add_argument("--header", action="store_true", help="write an 'n d' header line")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("calibrate", parents=[common], help="RMSE after aligning Gaussian-noised copies")
    p.add_argument("--emb", required=True)
    p.add_argument("--sigma", type=_float_list, required=True, help="comma-separated noise levels")
    p.add_argument("--fraction", type=_float_list, default=[1.0],
                   help="comma-separated fractions of noised rows")
    p.add_argument("--variant", choices=VARIANTS, default="r")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("eval", parents=[common], help="similarity or analogy test")
    p.add_argument("--mode", choices=["sim", "analogy"], required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--source")
    p.add_argument("--dataset", required=True)
    p.add_argument("--cross", action="store_true", help="second word / query side from --source")
    p.add_argument("--k", type=_positive_int, default=1, help="analogy top-k (default 1)")
    p.add_argument("--lower", action="store_true", help="lowercase dataset tokens")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("translate", parents=[common], help="seed-lexicon translation, P@k")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--seed-lexicon", required=True)
    p.add_argument("--test-lexicon", required=True)
    p.add_argument("--k", type=_int_list, default=[1, 5, 10])
    p.add_argument("--pivot", help="pivot-language embedding")
    p.add_argument("--seed-lexicon2", help="target-to-pivot seed lexicon (with --pivot)")
    p.add_argument("--space", choices=["union", "target"], default="union")
    p.add_argument("--variant", choices=VARIANTS, default="wrst")
    p.add_argument("--so3", action="store_true")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("ensemble", parents=[common], help="align, then average corresponding rows")
    p.add_argument("--target", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--variant", choices=VARIANTS, default="wrst")
    p.add_argument("--so3", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--header", action="store_true")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("info", parents=[common], help="size and norm statistics")
    p.add_argument("--emb", required=True)
    p.set_defaults(func=cmd_info)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    previous = _parallel._num_threads
    _parallel.set_num_threads(args.threads)
    try:
        return args.func(args)
    except (InputError, OSError, UnicodeDecodeError) as exc:
        print(f"orient {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"orient {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 3
    finally:
        _parallel.set_num_threads(previous)


if __name__ == "__main__":
    sys.exit(main())
