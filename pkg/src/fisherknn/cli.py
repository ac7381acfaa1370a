"""Command-line front end.

Exit status: 0 on success (or an identified probe), 2 when a probe is
rejected as an impostor, 1 on any error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from fisherknn.errors import RecognitionError
from fisherknn.ingestion import load_gallery, load_pgm
from fisherknn.pipeline import (
    DEFAULT_K,
    RecognizerModel,
    ThresholdPolicy,
    evaluate,
    identify,
    leave_one_out_accuracy,
    load_model,
    save_model,
    train,
)
from fisherknn.synthetic import write_synthetic_gallery

EXIT_OK, EXIT_ERROR, EXIT_REJECTED = 0, 1, 2


def num(x: float) -> str:
    # locale-independent, fixed precision
    return f"{x:.6f}"


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _dim(text: str):
    return "auto" if text == "auto" else _positive_int(text)


def _threshold(text: str) -> ThresholdPolicy:
    try:
        return ThresholdPolicy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _threshold_text(model: RecognizerModel) -> str:
    return "none" if model.threshold is None else num(model.threshold)


def cmd_train(args) -> int:
    gallery = load_gallery(args.data_dir)
    model = train(gallery, args.pca_dim, args.fisher_dim, args.k, args.threshold)
    save_model(model, args.out_path)
    fields = [
        ("p", len(gallery)),
        ("C", len(model.class_names)),
        ("d", model.pca.d),
        ("f", model.fisher.f),
        ("k", model.k),
        ("threshold", _threshold_text(model)),
        ("loo_accuracy", num(leave_one_out_accuracy(model))),
    ]
    if not args.machine:
        print(f"model written to {args.out_path}")
    for key, value in fields:
        print(f"{key}={value}" if args.machine else f"{key}: {value}")
    return EXIT_OK


def cmd_identify(args) -> int:
    model = load_model(args.model_path)
    probe = load_pgm(args.image_path)
    verdict, report = identify(model, probe)
    if verdict.rejected:
        print(f"REJECTED min={num(verdict.min_distance)} threshold={num(verdict.threshold_used)}")
    else:
        votes = ",".join(f"{name}:{n}" for name, n in verdict.votes.items())
        print(f"IDENTIFIED {verdict.label} min={num(verdict.min_distance)} votes={votes}")
    if args.report == "full":
        print(f"column_sum={num(report.column_sum)}")
        print(f"sqrt_sum={num(report.sqrt_sum)}")
        print(f"mean={num(report.mean)}")
        print(f"min={num(report.min)}")
        print(f"min_index={report.min_index}")
        if not args.machine:
            for i, (dist, label) in enumerate(zip(report.distances, model.labels)):
                print(f"  {i:4d}  {label:<16s} {num(dist)}")
    return EXIT_REJECTED if verdict.rejected else EXIT_OK


def cmd_eval(args) -> int:
    model = load_model(args.model_path)
    gallery = load_gallery(args.data_dir, min_classes=1, min_per_class=1)
    summary = evaluate(model, gallery)
    if args.machine:
        for name, s in summary.per_class.items():
            print(f"{name},{s.total},{s.correct},{s.rejected}")
        print(f"TOTAL,{summary.total},{summary.correct},{summary.rejected}")
        return EXIT_OK
    for name, s in summary.per_class.items():
        acc = s.correct / s.total if s.total else 0.0
        print(f"{name:<16s} accuracy {acc:.3f} ({s.correct}/{s.total}) rejected {s.rejected}")
    print(
        f"TOTAL accuracy {summary.accuracy:.3f} ({summary.correct}/{summary.total}) "
        f"rejected {summary.rejected} ({summary.rejection_rate:.3f})"
    )
    if summary.mean_genuine_min_distance is not None:
        print(f"mean genuine min distance {num(summary.mean_genuine_min_distance)}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    model = load_model(args.model_path)
    lines = [
        ("format_version", model.format_version),
        ("N", model.pca.n_pixels),
        ("width", model.width),
        ("height", model.height),
        ("d", model.pca.d),
        ("f", model.fisher.f),
        ("p", model.exemplars.shape[1]),
        ("C", len(model.class_names)),
        ("k", model.k),
        ("threshold", _threshold_text(model)),
        ("classes", ",".join(model.class_names)),
        ("pca_eigenvalues", ",".join(num(v) for v in model.pca.eigenvalues[:5])),
        ("fisher_eigenvalues", ",".join(num(v) for v in model.fisher.eigenvalues)),
    ]
    for key, value in lines:
        print(f"{key}={value}" if args.machine else f"{key}: {value}")
    return EXIT_OK


def cmd_gen_synthetic(args) -> int:
    gallery = write_synthetic_gallery(
        args.out_dir,
        classes=args.classes,
        per_class=args.per_class,
        width=args.width,
        height=args.height,
        seed=args.seed,
        prefix=args.prefix,
    )
    print(f"wrote {len(gallery)} images in {len(gallery.class_names)} classes to {args.out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--machine", action="store_true", help="machine-readable output")
    common.add_argument("-v", "--verbose", action="store_true", help="log tie-breaking events")

    parser = argparse.ArgumentParser(prog="fisherknn", description="PCA + LDA + kNN image identification")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="train a model from a class-per-directory gallery")
    p.add_argument("data_dir")
    p.add_argument("out_path")
    p.add_argument("--pca-dim", type=_dim, default="auto")
    p.add_argument("--fisher-dim", type=_dim, default="auto")
    p.add_argument("-k", "--k", type=_positive_int, default=DEFAULT_K)
    p.add_argument("--threshold", type=_threshold, default=ThresholdPolicy.none(),
                   help="none, auto[:margin] or fixed:<value>")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("identify", parents=[common], help="identify one PGM probe")
    p.add_argument("model_path")
    p.add_argument("image_path")
    p.add_argument("--report", choices=("none", "full"), default="none")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("eval", parents=[common], help="accuracy of a model on a labeled gallery")
    p.add_argument("model_path")
    p.add_argument("data_dir")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inspect", parents=[common], help="print model dimensions and spectra")
    p.add_argument("model_path")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("gen-synthetic", parents=[common], help="write a seeded synthetic gallery")
    p.add_argument("out_dir")
    p.add_argument("--classes", type=_positive_int, default=5)
    p.add_argument("--per-class", type=_positive_int, default=4)
    p.add_argument("--width", type=_positive_int, default=16)
    p.add_argument("--height", type=_positive_int, default=16)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--prefix", default="client")
    p.set_defaults(func=cmd_gen_synthetic)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (RecognitionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
