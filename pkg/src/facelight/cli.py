"""Command-line front end.

Subcommands cover the pipeline stages: simulate-weights, gen-dataset, train,
attack, hlc, mdc, plus run-all chaining gen-dataset -> train -> attack ->
hlc.  Every command is deterministic under a fixed --seed and writes its
artifacts through the same library writers the in-process API uses.

Exit codes: 0 success, 1 domain/value errors, 2 usage or I/O errors.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import analysis, classifier, dataset, hlc, scene
from .config import ExperimentConfig, default_config_json, load_config
from .errors import DomainError
from .features import FeatureParams, extract_features
from .labels import accuracy


def _load_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    for attr, field in (
        ("epochs", "epochs"),
        ("batch", "batch_size"),
        ("lr", "learning_rate"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(cfg.train, field, value)
    if getattr(args, "l_size", None) is not None:
        cfg.l_size = args.l_size
    return cfg


def _hlc_params(args, cfg: ExperimentConfig) -> hlc.HlcParams:
    return hlc.HlcParams(
        args.sigma_s if args.sigma_s is not None else cfg.hlc.sigma_s,
        args.t_s if args.t_s is not None else cfg.hlc.t_s,
        args.sigma_e if args.sigma_e is not None else cfg.hlc.sigma_e,
        args.t_e if args.t_e is not None else cfg.hlc.t_e,
    )


def _add_hlc_flags(sub) -> None:
    sub.add_argument("--sigma-s", dest="sigma_s", type=float, default=None)
    sub.add_argument("--t-s", dest="t_s", type=int, default=None)
    sub.add_argument("--sigma-e", dest="sigma_e", type=float, default=None)
    sub.add_argument("--t-e", dest="t_e", type=int, default=None)


def cmd_simulate_weights(args) -> int:
    cfg = _load_config(args)
    ws = cfg.weight_sim
    xs = np.linspace(ws.x_min, ws.x_max, ws.units)
    points = [((p[0], p[1]), (p[2], p[3])) for p in ws.points]
    curves = scene.simulate_weight_curves(xs, points, ws.camera_x, cfg.optics.g, cfg.face.n_s)
    scene.write_weight_curves_csv(args.out, curves)
    for i, curve in enumerate(curves):
        print(f"point {i} g_d_peak_x {scene.peak_location(curve, 'g_d')!r}")
    return 0


def cmd_gen_dataset(args) -> int:
    cfg = _load_config(args)
    data = dataset.generate_dataset(cfg)
    dataset.write_dataset(data, args.out)
    for split in dataset.SPLITS:
        print(f"{split} frames {len(data[split])}")
    return 0


def _train_split_dir(dataset_dir: str) -> str:
    if os.path.isfile(os.path.join(dataset_dir, "manifest.csv")):
        return dataset_dir
    return os.path.join(dataset_dir, "train")


def _train_model(cfg: ExperimentConfig, dataset_dir: str):
    records = dataset.read_split(_train_split_dir(dataset_dir))
    images, labels = dataset.images_and_labels(records)
    seed = cfg.require_seed()
    params = FeatureParams.from_seed(seed)
    feats = extract_features(images, params, cfg.l_size, cfg.p_grid)
    return classifier.train_two_tier(
        feats,
        labels,
        cfg.label_layout(),
        epochs=cfg.train.epochs,
        batch_size=cfg.train.batch_size,
        lr=cfg.train.learning_rate,
        seed=seed,
        feature_params=params,
        l_size=cfg.l_size,
        p_grid=cfg.p_grid,
    )


def _write_loss_log(path, log) -> None:
    import csv

    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["head", "epoch", "batch", "loss"])
        for row in log:
            writer.writerow([row["head"], row["epoch"], row["batch"], repr(row["loss"])])


def cmd_train(args) -> int:
    cfg = _load_config(args)
    model, log = _train_model(cfg, args.dataset_dir)
    classifier.save_model(model, args.model_out)
    losses_path = args.losses or args.model_out + ".losses.csv"
    _write_loss_log(losses_path, log)
    print(f"trained heads {1 + len(model.predictors)} batches {len(log)}")
    return 0


def _predict_records(model, records):
    images, labels = dataset.images_and_labels(records)
    predicted = classifier.predict_images(model, images)
    return predicted, labels


def cmd_attack(args) -> int:
    if os.path.isfile(args.frames):
        # already-predicted sequence CSV: only correction/accuracy apply
        seq = hlc.read_label_sequence(args.frames)
        truth = None
    else:
        model = classifier.load_model(args.model)
        records = dataset.read_split(args.frames)
        predicted, truth = _predict_records(model, records)
        seq = hlc.LabelSequence(tuple(int(v) for v in predicted))
    if args.use_hlc:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        seq = hlc.correct_labels(seq, _hlc_params(args, cfg))
    if args.out:
        hlc.write_label_sequence(args.out, seq)
    if truth is not None:
        print(f"accuracy {accuracy(seq.labels, truth)!r}")
    return 0


def cmd_hlc(args) -> int:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    seq = hlc.read_label_sequence(args.sequence)
    corrected = hlc.correct_labels(seq, _hlc_params(args, cfg))
    hlc.write_label_sequence(args.out, corrected)
    if args.truth:
        truth = hlc.read_label_sequence(args.truth)
        print(f"accuracy {accuracy(corrected.labels, truth.labels)!r}")
    return 0


def cmd_mdc(args) -> int:
    cfg = _load_config(args)
    fractions = cfg.mdc.fractions
    if args.fractions:
        fractions = [float(eval_fraction(tok)) for tok in args.fractions.split(",")]
    result = analysis.mdc_search(
        cfg.build_scene(),
        fractions,
        seed=cfg.require_seed(),
        noise_sigma=cfg.noise.pixel_sigma,
        radiance_scale=cfg.screen.radiance_scale,
    )
    analysis.write_mdc_csv(args.out, result)
    print(f"mdc_boundary {result.boundary if result.boundary is not None else 'none'}")
    return 0


def eval_fraction(token: str) -> float:
    """Parse '1/16' or '0.0625' into a float."""
    token = token.strip()
    if "/" in token:
        num, den = token.split("/", 1)
        return float(num) / float(den)
    return float(token)


def cmd_run_all(args) -> int:
    cfg = _load_config(args)
    os.makedirs(args.out, exist_ok=True)
    data_dir = os.path.join(args.out, "dataset")
    dataset.write_dataset(dataset.generate_dataset(cfg), data_dir)

    model, log = _train_model(cfg, data_dir)
    classifier.save_model(model, os.path.join(args.out, "model.json"))
    _write_loss_log(os.path.join(args.out, "losses.csv"), log)

    records = dataset.read_split(os.path.join(data_dir, "test"))
    predicted, truth = _predict_records(model, records)
    raw = hlc.LabelSequence(tuple(int(v) for v in predicted), cfg.delta)
    hlc.write_label_sequence(os.path.join(args.out, "predicted.csv"), raw)
    corrected = hlc.correct_labels(raw, cfg.hlc)
    hlc.write_label_sequence(os.path.join(args.out, "corrected.csv"), corrected)
    print(f"pre_hlc_accuracy {accuracy(raw.labels, truth)!r}")
    print(f"post_hlc_accuracy {accuracy(corrected.labels, truth)!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facelight",
        description="Screen-to-face illumination simulator and content-inference pipeline.",
        epilog="Default configuration (JSON; override any subset via --config):\n"
        + default_config_json(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate-weights", help="per-unit importance-weight curves")
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate_weights)

    p = sub.add_parser("gen-dataset", help="render a synthetic labeled dataset")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("train", help="train the two-tier classifier")
    p.add_argument("dataset_dir")
    p.add_argument("model_out")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--losses", default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--l-size", dest="l_size", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("attack", help="predict a label sequence from frames")
    p.add_argument("model")
    p.add_argument("frames")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--hlc", dest="use_hlc", action="store_true")
    _add_hlc_flags(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("hlc", help="correct a predicted label sequence")
    p.add_argument("sequence")
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--truth", default=None)
    _add_hlc_flags(p)
    p.set_defaults(func=cmd_hlc)

    p = sub.add_parser("mdc", help="minimally differentiable content search")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--fractions", default=None, help="comma list, e.g. 1/16,1/4,1")
    p.set_defaults(func=cmd_mdc)

    p = sub.add_parser("run-all", help="gen-dataset, train, attack and hlc in one go")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--l-size", dest="l_size", type=int, default=None)
    p.set_defaults(func=cmd_run_all)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
