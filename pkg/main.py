#!/usr/bin/env python3
"""
Additive U-Net CLI - train, evaluate and inspect denoising networks.

Usage:
    python main.py <command> [OPTIONS]

Environment Variables:
    ADDUNET_OUTPUT_ROOT: Root directory for run outputs (default: runs)
    ADDUNET_LANG: Console language, en or cn (default: en)
    ADDUNET_SEED: Default training seed when --seed is not given

Exit codes:
    0 success, 1 usage or configuration error, 2 data error, 3 numeric failure.
    Errors print a single line ``error[<kind>]: <message>`` on stderr.
"""

import argparse
import os
import sys

from additive_unet.data import KODAK_NAMES
from additive_unet.errors import KitError, UsageError
from additive_unet.harness import (
    EvalConfig,
    RunConfig,
    SynthSpec,
    cmd_denoise,
    cmd_eval,
    cmd_fetch_dataset,
    cmd_selfcheck,
    cmd_spectra,
    cmd_sweep_alpha,
    cmd_table,
    cmd_train,
    list_presets,
    load_preset,
    output_root,
    with_overrides,
)
from additive_unet.harness.presets import PRESETS
from additive_unet.model import Variant


class KitArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors through the CLI's error line."""

    def error(self, message: str):
        raise UsageError(message)


def _kernel_schedule(text: str) -> list[int]:
    try:
        return [int(k) for k in text.replace(",", "-").split("-") if k]
    except ValueError:
        raise argparse.ArgumentTypeError(f"kernel schedule must look like 3-3-3, got {text!r}")


def _add_config_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, help="JSON run configuration")
    parser.add_argument("--preset", type=str, choices=sorted(PRESETS), help="Shipped configuration")


def _add_eval_source(parser: argparse.ArgumentParser) -> None:
    _add_config_source(parser)
    parser.add_argument("--dataset-dir", type=str, help="Directory of PNG/PGM evaluation images")
    parser.add_argument(
        "--synth", type=int, metavar="COUNT", help="Evaluate on COUNT synthetic 64x64 images instead"
    )
    parser.add_argument("--synth-seed", type=int, default=1, help="Seed of the synthetic set (default: 1)")
    parser.add_argument("--sigmas", type=float, nargs="+", help="Noise levels on the 0-255 scale")
    parser.add_argument("--eval-seed", type=int, help="Seed of the evaluation noise")


def _base_config(args) -> RunConfig | None:
    if args.config and args.preset:
        raise UsageError("use either --config or --preset, not both")
    if args.config:
        return RunConfig.from_json(args.config)
    if args.preset:
        return load_preset(args.preset)
    return None


def _eval_config(args) -> EvalConfig:
    base = _base_config(args)
    config = base.eval if base is not None else EvalConfig()
    if args.dataset_dir:
        config.dataset_dir = args.dataset_dir
    if args.synth:
        config.dataset_dir = args.dataset_dir
        config.synth = SynthSpec(count=args.synth, seed=args.synth_seed)
    if args.sigmas:
        config = EvalConfig(
            dataset_dir=config.dataset_dir,
            synth=config.synth,
            sigma_list=args.sigmas,
            seed=config.seed,
            write_images=config.write_images,
            include_noisy=config.include_noisy,
        )
    if args.eval_seed is not None:
        config.seed = args.eval_seed
    return config


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = KitArgumentParser(
        prog="addunet",
        description="Additive U-Net - denoising networks with learnable additive skips",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Memorize one patch (sanity check of the training loop)
    python main.py train --preset preset-overfit

    # Desk-scale training at sigma 25, then evaluate with the noisy baseline
    python main.py train --preset preset-smoke --sigma 25
    python main.py eval runs/preset-smoke/checkpoint.bin --synth 8 --sigmas 15 25 50 --include-noisy

    # Sweep the deepest skip gate
    python main.py sweep-alpha runs/preset-smoke/checkpoint.bin --synth 8

    # Filter spectra of the encoder blocks
    python main.py spectra runs/preset-smoke/checkpoint.bin --pad-to 64 --top-k 6

    # Results table from several runs
    python main.py table runs/*/manifest.json --out table.csv
        """,
    )
    parser.add_argument(
        "--lang",
        type=str,
        choices=["cn", "en"],
        default=os.getenv("ADDUNET_LANG", "en"),
        help="Console language (default: en, env: ADDUNET_LANG)",
    )
    parser.add_argument("--quiet", "-q", action="store_true", help="Suppress progress output")
    sub = parser.add_subparsers(dest="command", parser_class=KitArgumentParser)

    # train
    p = sub.add_parser("train", help="Train one model at one noise level")
    _add_config_source(p)
    p.add_argument("--resume", type=str, help="Checkpoint to continue training from")
    p.add_argument("--name", type=str, help="Run name (output directory under the output root)")
    p.add_argument("--output-dir", type=str, help="Explicit output directory")
    p.add_argument("--variant", type=str, choices=[v.value for v in Variant], help="Model family")
    p.add_argument("--depth", type=int, help="Encoder depth L (layers for dncnn)")
    p.add_argument("--channels", type=int, help="Feature width C")
    p.add_argument("--kernels", type=_kernel_schedule, help="Kernel schedule, e.g. 9-7-5-3-1")
    p.add_argument("--model-seed", type=int, help="Weight initialization seed")
    p.add_argument("--steps", type=int, help="Optimizer steps (overrides epochs)")
    p.add_argument("--epochs", type=int, help="Passes over the patch list")
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--sigma", type=float, help="Training noise level on the 0-255 scale")
    p.add_argument("--patch-size", type=int)
    p.add_argument("--realizations", type=int, help="Noise draws per patch (K)")
    p.add_argument(
        "--seed",
        type=int,
        default=int(os.environ["ADDUNET_SEED"]) if os.getenv("ADDUNET_SEED") else None,
        help="Training seed (env: ADDUNET_SEED)",
    )
    p.add_argument("--dataset-dir", type=str, help="Directory of PNG/PGM training images")
    p.add_argument("--eval-dir", type=str, help="Evaluation images for the final score")
    p.add_argument("--checkpoint-every", type=int)
    p.add_argument("--log-every", type=int)

    # eval
    p = sub.add_parser("eval", help="Score checkpoints on clean/noisy image pairs")
    p.add_argument("checkpoints", nargs="+", help="Checkpoint files")
    _add_eval_source(p)
    p.add_argument("--output-dir", type=str, help="Output directory (default: <root>/eval)")
    p.add_argument("--write-images", action="store_true", help="Save denoised images")
    p.add_argument("--include-noisy", action="store_true", help="Add noisy-input baseline rows")

    # denoise
    p = sub.add_parser("denoise", help="Denoise images for visual comparison")
    p.add_argument("checkpoint")
    p.add_argument("inputs", nargs="+", help="Image files or directories")
    p.add_argument("--output-dir", type=str, help="Output directory (default: <root>/denoised)")
    p.add_argument("--sigma", type=float, default=0.0, help="Corrupt inputs first at this level")
    p.add_argument("--seed", type=int, default=0)

    # sweep-alpha
    p = sub.add_parser("sweep-alpha", help="PSNR/SSIM as one skip gate is varied")
    p.add_argument("checkpoint")
    _add_eval_source(p)
    p.add_argument("--gate", type=int, default=0, help="Gate index, 0 = deepest skip")
    p.add_argument("--low", type=float, help="Lowest alpha (default: 0)")
    p.add_argument("--high", type=float, help="Highest alpha (default: twice the learned value)")
    p.add_argument("--steps", type=int, default=21, help="Number of alpha values")
    p.add_argument("--sigma", type=float, help="Noise level (default: the checkpoint's training sigma)")
    p.add_argument("--output-dir", type=str, help="Output directory (default: next to the checkpoint)")

    # spectra
    p = sub.add_parser("spectra", help="Frequency profiles of convolution filters")
    p.add_argument("checkpoint")
    p.add_argument("--layers", nargs="+", help="stem, enc.<i>, dec.<j>, head or layer.<i> (default: encoder)")
    p.add_argument("--pad-to", type=int, default=64)
    p.add_argument("--top-k", type=int, default=6)
    p.add_argument("--per-channel", action="store_true", help="Keep every (out, in) filter slice")
    p.add_argument("--conv", choices=["first", "second"], default="first")
    p.add_argument("--output-dir", type=str, help="Output directory (default: <checkpoint dir>/spectra)")

    # table
    p = sub.add_parser("table", help="Results table from run manifests")
    p.add_argument("manifests", nargs="+", help="manifest.json / eval_manifest.json files or run directories")
    p.add_argument("--out", type=str, help="Output CSV (default: <root>/table.csv)")

    # fetch-dataset
    p = sub.add_parser("fetch-dataset", help="Download the Kodak images from a mirror")
    p.add_argument("base_url")
    p.add_argument("--dest", type=str, default=os.path.join("data", "kodak"))
    p.add_argument("--names", nargs="+", help=f"File names (default: {KODAK_NAMES[0]} .. {KODAK_NAMES[-1]})")

    # selfcheck
    p = sub.add_parser("selfcheck", help="Finite-difference gradient suite")
    p.add_argument("--probes", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ops-only", action="store_true", help="Skip the whole-model checks")

    sub.add_parser("list-presets", help="List shipped configurations")

    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("a command is required (see --help)")
    return args


def run_train(args) -> None:
    base = _base_config(args)
    if base is None:
        raise UsageError("train needs --config or --preset")
    overrides = {
        "name": args.name,
        "output_dir": args.output_dir,
        "model.variant": args.variant,
        "model.depth": args.depth,
        "model.channels": args.channels,
        "model.kernel_schedule": args.kernels,
        "model.seed": args.model_seed,
        "train.steps": args.steps,
        "train.epochs": args.epochs,
        "train.batch_size": args.batch_size,
        "train.lr": args.lr,
        "train.sigma_list": None if args.sigma is None else [args.sigma],
        "train.patch_size": args.patch_size,
        "train.realizations": args.realizations,
        "train.seed": args.seed,
        "train.dataset_dir": args.dataset_dir,
        "train.checkpoint_every": args.checkpoint_every,
        "train.log_every": args.log_every,
        "eval.dataset_dir": args.eval_dir,
    }
    config = with_overrides(base, overrides)
    cmd_train(config, resume=args.resume, verbose=not args.quiet, lang=args.lang)


def run_eval(args) -> None:
    output_dir = args.output_dir or os.path.join(output_root(), "eval")
    config = _eval_config(args)
    config.write_images = config.write_images or args.write_images
    config.include_noisy = config.include_noisy or args.include_noisy
    cmd_eval(args.checkpoints, config, output_dir, verbose=not args.quiet, lang=args.lang)


def run_denoise(args) -> None:
    output_dir = args.output_dir or os.path.join(output_root(), "denoised")
    cmd_denoise(
        args.checkpoint,
        args.inputs,
        output_dir,
        sigma=args.sigma,
        seed=args.seed,
        verbose=not args.quiet,
        lang=args.lang,
    )


def run_sweep(args) -> None:
    output_dir = args.output_dir or os.path.dirname(os.path.abspath(args.checkpoint))
    cmd_sweep_alpha(
        args.checkpoint,
        _eval_config(args),
        output_dir,
        gate_index=args.gate,
        low=args.low,
        high=args.high,
        steps=args.steps,
        sigma=args.sigma,
        verbose=not args.quiet,
        lang=args.lang,
    )


def run_spectra(args) -> None:
    output_dir = args.output_dir or os.path.join(os.path.dirname(os.path.abspath(args.checkpoint)), "spectra")
    cmd_spectra(
        args.checkpoint,
        output_dir,
        layers=args.layers,
        pad_to=args.pad_to,
        top_k=args.top_k,
        per_channel=args.per_channel,
        conv=args.conv,
        verbose=not args.quiet,
        lang=args.lang,
    )


def run_table(args) -> None:
    cmd_table(
        args.manifests,
        args.out or os.path.join(output_root(), "table.csv"),
        verbose=not args.quiet,
        lang=args.lang,
    )


def run_fetch(args) -> None:
    cmd_fetch_dataset(args.base_url, args.dest, names=args.names, verbose=not args.quiet, lang=args.lang)


def run_selfcheck(args) -> None:
    cmd_selfcheck(
        include_models=not args.ops_only,
        probes=args.probes,
        seed=args.seed,
        verbose=not args.quiet,
        lang=args.lang,
    )


def run_list_presets(args) -> None:
    print("Presets:")
    for name in list_presets():
        print(f"  - {name}")


COMMANDS = {
    "train": run_train,
    "eval": run_eval,
    "denoise": run_denoise,
    "sweep-alpha": run_sweep,
    "spectra": run_spectra,
    "table": run_table,
    "fetch-dataset": run_fetch,
    "selfcheck": run_selfcheck,
    "list-presets": run_list_presets,
}


def _report(kind: str, message: object) -> None:
    text = " ".join(str(message).split())
    print(f"error[{kind}]: {text}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    """Main entry point; returns the process exit code."""
    try:
        args = parse_args(argv)
        COMMANDS[args.command](args)
    except KitError as e:
        _report(e.kind, e)
        return e.exit_code
    except ValueError as e:
        _report("value", e)
        return 1
    except OSError as e:
        _report("io", e)
        return 2
    except KeyboardInterrupt:
        _report("interrupted", "stopped by user")
        return 130
    return 0


if __name__ == "__main__":
    sys.exit(main())
