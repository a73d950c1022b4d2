"""Command-line front end.

Subcommands:

* ``synth``    - generate a synthetic capture file (``.efr``) plus ground truth
* ``decode``   - decode a capture to CSV samples, a drop report and ``sensor.dat``
* ``analyze``  - decode a capture and run the spectral/artifact analysis
* ``exp1``     - full eyes-open vs eyes-closed experiment
* ``exp2``     - same with a background-conversation distractor block
* ``classify`` - train and cross-validate the classifiers on a feature CSV

All subcommands accept ``--config`` (INI key=value sections), ``--seed``
and ``--out``. Exit code is 0 on success; failures print one
``error: <message>`` line on stderr and exit 2.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .classify import evaluate, features_from_csv, linear_trainer, mlp_trainer
from .events import ArtifactKind, events_to_csv
from .framecodec import (
    assemble_stream,
    decode_frame,
    encode_frame,
    frames_from_recording,
    mask_frame,
    read_efr,
    unmask_frame,
    write_efr,
)
from .harness import (
    DEFAULT_KEY,
    analyze_condition,
    experiment_config_from_file,
    export_sensor_log,
    load_config_file,
    parse_key,
    profile_from_config,
    run_experiment_one,
    run_experiment_two,
)
from .layout import default_montage
from .synth import Condition, SubjectProfile, generate_recording, inject_artifact


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="INI config file")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", type=Path, help="output directory")


def _out_dir(args) -> Path:
    out = args.out if args.out is not None else Path("epocsim-out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_synth(args) -> int:
    out = _out_dir(args)
    condition = Condition.EYES_CLOSED
    duration = 10.0
    artifacts = "none"
    key = DEFAULT_KEY
    if args.config:
        cp = load_config_file(args.config)
        profile = profile_from_config(cp)
        if cp.has_section("synth"):
            sec = cp["synth"]
            condition = Condition(sec.get("condition", condition.value))
            duration = sec.getfloat("duration_s", duration)
            artifacts = sec.get("artifacts", artifacts)
            if "key" in sec:
                key = parse_key(sec["key"])
    else:
        profile = SubjectProfile()
    if args.seed is not None:
        profile = dataclasses.replace(profile, seed=args.seed)

    rec, truth = generate_recording(profile, condition, duration)
    if artifacts == "demo":
        rec, _ = inject_artifact(rec, ArtifactKind.OCULAR, 0.1 * duration,
                                 seed=profile.seed, ground_truth=truth)
        rec, _ = inject_artifact(rec, ArtifactKind.MUSCLE, 0.4 * duration,
                                 seed=profile.seed, ground_truth=truth)
        rec, _ = inject_artifact(rec, ArtifactKind.DISCONNECTION, 0.7 * duration,
                                 seed=profile.seed, ground_truth=truth)
    elif artifacts != "none":
        raise ValueError(f"[synth] artifacts must be 'none' or 'demo', got {artifacts!r}")

    frames = frames_from_recording(rec, start_counter=0)
    wire = [mask_frame(encode_frame(f), key) for f in frames]
    capture = out / f"capture_{condition.value}.efr"
    write_efr(capture, wire)
    export_sensor_log(rec, out / "sensor.dat")
    with open(out / "ground_truth_events.csv", "w") as fh:
        fh.write(events_to_csv(rec.annotations))
    print(f"wrote {capture} ({len(wire)} frames)")
    return 0


def _cmd_decode(args) -> int:
    out = _out_dir(args)
    key = parse_key(args.key) if args.key else DEFAULT_KEY
    wire = read_efr(args.infile)
    decoded = [decode_frame(unmask_frame(raw, key)) for raw in wire]
    rec, drop = assemble_stream(decoded, args.lsb)
    with open(out / "decoded.csv", "w") as fh:
        fh.write(",".join(rec.labels) + "\n")
        for n in range(rec.n_samples):
            fh.write(",".join(f"{v:.12g}" for v in rec.data[:, n]) + "\n")
    with open(out / "drop_report.csv", "w") as fh:
        fh.write("expected_frames,received_frames,repaired,gaps\n")
        gaps = "|".join(f"{p}:{m}" for p, m in drop.gaps)
        fh.write(f"{drop.expected_frames},{drop.received_frames},{drop.repaired},{gaps}\n")
    export_sensor_log(rec, out / "sensor.dat")
    print(
        f"decoded {drop.received_frames} frames, repaired {drop.repaired}, "
        f"{rec.n_samples} samples"
    )
    return 0


def _cmd_analyze(args) -> int:
    out = _out_dir(args)
    cfg = experiment_config_from_file(args.config, seed=args.seed, out_dir=out)
    if args.key:
        cfg.key = parse_key(args.key)
    cfg.inputs = {Condition.EYES_CLOSED: args.infile}

    manifest: list[str] = []
    result, _rec = analyze_condition(
        Condition.EYES_CLOSED, cfg, default_montage(), out, manifest
    )
    o2 = result.recording.labels.index("O2")
    print(
        f"O2 alpha power {result.alpha_power[o2]:.6g} uV^2, "
        f"{len(result.artifact_events)} artifact events"
    )
    return 0


def _cmd_experiment(args, runner) -> int:
    cfg = experiment_config_from_file(args.config, seed=args.seed, out_dir=args.out)
    report = runner(cfg)
    for model, res in report.accuracies.items():
        print(f"{model}: {res.accuracy:.4f}")
    if report.distractor_quiet_ratio is not None:
        print(f"distractor/quiet alpha ratio: {report.distractor_quiet_ratio:.4f}")
    print(f"report written to {report.out_dir}")
    return 0


def _cmd_classify(args) -> int:
    out = _out_dir(args)
    with open(args.features) as fh:
        feature_set = features_from_csv(fh.read())
    seed = args.seed if args.seed is not None else 7
    trainers = {
        "svm": linear_trainer("svm"),
        "logreg": linear_trainer("logreg"),
        "mlp": mlp_trainer(seed=seed),
    }
    with open(out / "accuracy.csv", "w") as fh:
        fh.write("model,accuracy,tn,fp,fn,tp,fold_accuracies\n")
        for name, trainer in trainers.items():
            res = evaluate(trainer, feature_set, split=("kfold", 5), seed=seed)
            folds = "|".join(f"{a:.6g}" for a in res.fold_accuracies)
            tn, fp, fn, tp = res.confusion
            fh.write(f"{name},{res.accuracy:.12g},{tn},{fp},{fn},{tp},{folds}\n")
            print(f"{name}: {res.accuracy:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epocsim",
        description="Hardware-free EEG headset pipeline: synth, codec, analysis, classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic capture")
    _add_common(p)

    p = sub.add_parser("decode", help="decode a capture file")
    _add_common(p)
    p.add_argument("--in", dest="infile", type=Path, required=True, help=".efr capture")
    p.add_argument("--key", help="mask key (32 hex digits or 16 chars)")
    p.add_argument("--lsb", type=float, default=1.95, help="microvolts per count")

    p = sub.add_parser("analyze", help="decode and analyze a capture")
    _add_common(p)
    p.add_argument("--in", dest="infile", type=Path, required=True, help=".efr capture")
    p.add_argument("--key", help="mask key (32 hex digits or 16 chars)")

    p = sub.add_parser("exp1", help="eyes-open vs eyes-closed experiment")
    _add_common(p)

    p = sub.add_parser("exp2", help="experiment with a distractor block")
    _add_common(p)

    p = sub.add_parser("classify", help="train classifiers on a feature CSV")
    _add_common(p)
    p.add_argument("--features", type=Path, required=True, help="feature CSV file")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    np.seterr(over="ignore")  # classifier saturation is handled, not fatal
    try:
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "decode":
            return _cmd_decode(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "exp1":
            return _cmd_experiment(args, run_experiment_one)
        if args.command == "exp2":
            return _cmd_experiment(args, run_experiment_two)
        if args.command == "classify":
            return _cmd_classify(args)
        raise ValueError(f"unknown command {args.command!r}")
    except Exception as exc:  # surfaced as a single machine-readable line
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
