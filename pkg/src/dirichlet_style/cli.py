"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 numerical failure.
"""

import argparse
import os
import sys
import time
import zipfile

from . import imageio, losses, pipeline, wct
from .config import TrainConfig

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3
PROGRESS_EVERY = 100


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; we reserve 2 for I/O
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _add_training_flags(p):
    d = TrainConfig()
    p.add_argument("--content", required=True, metavar="PATH")
    p.add_argument("--style", required=True, metavar="PATH")
    p.add_argument("--alpha", type=float, default=d.alpha, help="sparsity weight (default %(default)s)")
    p.add_argument("--lambda", dest="lam", type=float, default=d.lam,
                   help="mutual-information weight (default %(default)s)")
    p.add_argument("--mu", type=float, default=d.mu, help="decoder weight decay (default %(default)s)")
    p.add_argument("--lr", type=float, default=d.learning_rate, help="Adam step size (default %(default)s)")
    p.add_argument("--max-iters", type=int, default=d.max_iters)
    p.add_argument("--patience", type=int, default=d.patience)
    p.add_argument("--train-size", type=int, default=d.train_max_side,
                   help="max side of the downsampled training images (default %(default)s)")
    p.add_argument("--eps-wct", type=float, default=d.eps_wct)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--renormalize-wct", action="store_true",
                   help="clamp transferred abundances to >= 0 and renormalize rows")
    p.add_argument("--loss-csv", metavar="PATH", help="write the per-iteration loss trace here")


def build_parser():
    parser = _Parser(prog="dirichlet-style", description="One-shot photorealistic color style transfer.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stylize", help="train on a content/style pair and write the stylized image")
    _add_training_flags(p)
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--save-checkpoint", metavar="PATH")
    p.add_argument("--load-checkpoint", metavar="PATH", help="skip training and use this checkpoint")

    p = sub.add_parser("train", help="train on a content/style pair and save the checkpoint")
    _add_training_flags(p)
    p.add_argument("--save-checkpoint", required=True, metavar="PATH")

    p = sub.add_parser("abundance", help="export the abundance maps of an image as grayscale PNGs")
    p.add_argument("--checkpoint", required=True, metavar="PATH")
    p.add_argument("--image", required=True, metavar="PATH")
    p.add_argument("--out-dir", required=True, metavar="DIR")
    return parser


def _config(args):
    try:
        return TrainConfig(
            alpha=args.alpha,
            lam=args.lam,
            mu=args.mu,
            learning_rate=args.lr,
            max_iters=args.max_iters,
            patience=args.patience,
            train_max_side=args.train_size,
            eps_wct=args.eps_wct,
            seed=args.seed,
            renormalize_wct=args.renormalize_wct,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _load_checkpoint(path):
    try:
        return pipeline.load_checkpoint(path)
    except pipeline.CompatibilityError:
        raise
    except (KeyError, ValueError, zipfile.BadZipFile) as exc:
        raise OSError(f"cannot read checkpoint {path}: {exc}") from exc


def _log(msg):
    print(msg, file=sys.stderr, flush=True)


def _train(args, content, style):
    cfg = _config(args)
    csv = open(args.loss_csv, "w", encoding="utf-8") if args.loss_csv else None
    start = time.perf_counter()

    def on_step(step, bd):
        if csv is not None:
            csv.write(bd.csv_row(step) + "\n")
        if step % PROGRESS_EVERY == 0:
            _log(f"iter {step:5d}  recon {bd.recon_l21:.6g}  sparse {bd.sparse_h:.6g}  "
                 f"mi {bd.mi:.6g}  decay {bd.weight_decay:.6g}  total {bd.total:.6g}")

    try:
        if csv is not None:
            csv.write(losses.CSV_HEADER + "\n")
        ckpt = pipeline.train(content, style, cfg, on_step=on_step)
    finally:
        if csv is not None:
            csv.close()
    bd = ckpt.breakdown
    _log(f"trained {ckpt.iterations} iterations in {time.perf_counter() - start:.1f}s; "
         f"best recon {bd.recon_l21:.6g}")
    if args.save_checkpoint:
        pipeline.save_checkpoint(ckpt, args.save_checkpoint)
        _log(f"checkpoint written to {args.save_checkpoint}")
    return ckpt


def _cmd_train(args):
    _train(args, imageio.load_image(args.content), imageio.load_image(args.style))


def _cmd_stylize(args):
    content = imageio.load_image(args.content)
    style = imageio.load_image(args.style)
    if args.load_checkpoint:
        cfg = _config(args)
        ckpt = _load_checkpoint(args.load_checkpoint)
        if args.save_checkpoint:
            pipeline.save_checkpoint(ckpt, args.save_checkpoint)
    else:
        ckpt = _train(args, content, style)
        cfg = ckpt.config
    start = time.perf_counter()
    out = pipeline.stylize(ckpt, content, style, eps=cfg.eps_wct, renormalize=cfg.renormalize_wct)
    imageio.save_image(out, args.out)
    _log(f"stylized {content.shape[1]}x{content.shape[0]} in {time.perf_counter() - start:.1f}s -> {args.out}")


def _cmd_abundance(args):
    ckpt = _load_checkpoint(args.checkpoint)
    img = imageio.load_image(args.image)
    os.makedirs(args.out_dir, exist_ok=True)
    maps = pipeline.export_abundance(ckpt, img)
    width = max(2, len(str(len(maps) - 1)))
    for i, m in enumerate(maps):
        imageio.save_gray(m, os.path.join(args.out_dir, f"abundance_{i:0{width}d}.png"))
    _log(f"wrote {len(maps)} abundance maps to {args.out_dir}")


COMMANDS = {"stylize": _cmd_stylize, "train": _cmd_train, "abundance": _cmd_abundance}


def run(argv=None):
    """Parse ``argv`` and execute; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        _log(str(exc))
        return EXIT_USAGE
    except (losses.TrainingError, wct.ConvergenceError, wct.DegenerateInputError, FloatingPointError) as exc:
        _log(f"numerical failure: {exc}")
        return EXIT_NUMERIC
    except pipeline.CompatibilityError as exc:
        _log(f"incompatible checkpoint: {exc}")
        return EXIT_IO
    except OSError as exc:
        _log(f"I/O error: {exc}")
        return EXIT_IO
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
