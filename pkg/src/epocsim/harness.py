"""End-to-end experiment runs: synthesize (or load captures), push the
signal through the full acquisition round trip, analyze, classify, report.

Experiment one records an eyes-open and an eyes-closed block and contrasts
them; experiment two adds a background-conversation distractor during the
closed-eyes block and reports how much alpha power survives relative to
the quiet closed-eyes block.

Every recording passes through encode -> mask -> unmask -> decode ->
reassemble before analysis, so the report reflects what a real capture
would produce; quantization to 14-bit counts is the only lossy step.
All outputs are plain CSV/PGM/text and byte-stable for a fixed config and
seed (the manifest is the only file carrying a timestamp).
"""

from __future__ import annotations

import configparser
import dataclasses
import datetime
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .channels import CHANNEL_NAMES, LSB_MICROVOLTS
from .classify import (
    EvalResult,
    LabeledFeatureSet,
    concat_feature_sets,
    evaluate,
    extract_features,
    features_to_csv,
    linear_trainer,
    mlp_trainer,
    train_linear,
)
from .events import ArtifactEvent, events_to_csv
from .framecodec import (
    DropReport,
    assemble_stream,
    decode_frame,
    encode_frame,
    frames_from_recording,
    mask_frame,
    read_efr,
    unmask_frame,
    write_efr,
)
from .artifacts import detect_disconnection, detect_muscle, detect_ocular
from .layout import Montage, default_montage
from .preprocess import FilterSpec, apply_filter, remove_baseline
from .recording import EegRecording
from .spectral import (
    ALPHA_BAND,
    amplitude_spectrum,
    band_power,
    find_alpha_peak,
    topomap,
    welch_psd,
    write_psd_csv,
    write_spectrum_csv,
    write_topomap_csv,
    write_topomap_pgm,
)
from .synth import Condition, SubjectProfile, generate_recording, inject_mains

DEFAULT_KEY = b"epocsim-mask-key"

EXPERIMENT_ONE_CONDITIONS = (Condition.EYES_OPEN, Condition.EYES_CLOSED)
EXPERIMENT_TWO_CONDITIONS = (
    Condition.EYES_OPEN,
    Condition.EYES_CLOSED,
    Condition.EYES_CLOSED_DISTRACTOR,
)


@dataclass
class ExperimentConfig:
    profile: SubjectProfile = SubjectProfile()
    periods_per_condition: int = 100
    period_len_s: float = 1.0
    seed: int = 7
    out_dir: Path = Path("epocsim-run")
    lsb_uv: float = LSB_MICROVOLTS
    highpass_hz: float = 1.0   # 0 disables the drift high-pass
    notch_hz: float = 0.0      # 0 disables the mains notch
    mains_amp_uv: float = 0.0  # injected interference amplitude
    mains_hz: float = 50.0
    grid_n: int = 32
    key: bytes = DEFAULT_KEY
    inputs: dict[Condition, Path] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.periods_per_condition < 2:
            raise ValueError(
                f"periods_per_condition must be >= 2, got {self.periods_per_condition}"
            )
        self.out_dir = Path(self.out_dir)

    @property
    def condition_duration_s(self) -> float:
        return self.periods_per_condition * self.period_len_s


@dataclass
class ConditionResult:
    condition: Condition
    recording: EegRecording
    drop_report: DropReport
    alpha_power: np.ndarray  # (14,) integrated 8-12 Hz density per channel
    alpha_peaks: dict[str, Optional[tuple[float, float]]]
    artifact_events: list[ArtifactEvent]


@dataclass
class ExperimentReport:
    conditions: dict[str, ConditionResult]
    accuracies: dict[str, EvalResult]
    feature_set: LabeledFeatureSet
    distractor_quiet_ratio: Optional[float]
    manifest: list[str]
    out_dir: Path


# --- config files -----------------------------------------------------------


def load_config_file(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = cp.read(path)
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")
    return cp


def profile_from_config(cp: configparser.ConfigParser) -> SubjectProfile:
    """Build a SubjectProfile from the [profile] section (defaults apply)."""
    if not cp.has_section("profile"):
        return SubjectProfile()
    sec = cp["profile"]
    kwargs = {}
    for f in dataclasses.fields(SubjectProfile):
        if f.name in sec:
            cast = int if f.name == "seed" else float
            kwargs[f.name] = cast(sec[f.name])
    return SubjectProfile(**kwargs)


def experiment_config_from_file(
    path=None,
    seed: Optional[int] = None,
    out_dir=None,
) -> ExperimentConfig:
    """Assemble an ExperimentConfig from an INI file plus CLI overrides."""
    kwargs = {}
    if path is not None:
        cp = load_config_file(path)
        kwargs["profile"] = profile_from_config(cp)
        if cp.has_section("experiment"):
            sec = cp["experiment"]
            for name, cast in [
                ("periods_per_condition", int),
                ("seed", int),
                ("lsb_uv", float),
                ("highpass_hz", float),
                ("notch_hz", float),
                ("mains_amp_uv", float),
                ("mains_hz", float),
                ("grid_n", int),
            ]:
                if name in sec:
                    kwargs[name] = cast(sec[name])
            if "out" in sec:
                kwargs["out_dir"] = Path(sec["out"])
            if "key" in sec:
                kwargs["key"] = parse_key(sec["key"])
        if cp.has_section("inputs"):
            kwargs["inputs"] = {
                Condition(name): Path(value) for name, value in cp["inputs"].items()
            }
    cfg = ExperimentConfig(**kwargs)
    if seed is not None:
        cfg.seed = seed
    if out_dir is not None:
        cfg.out_dir = Path(out_dir)
    return cfg


def parse_key(text: str) -> bytes:
    """16-octet mask key from 32 hex digits or a 16-character string."""
    text = text.strip()
    if len(text) == 32:
        try:
            return bytes.fromhex(text)
        except ValueError:
            pass
    key = text.encode()
    if len(key) != 16:
        raise ValueError(f"mask key must be 16 octets (or 32 hex digits), got {len(key)}")
    return key


# --- sensor log ---------------------------------------------------------------


def export_sensor_log(recording: EegRecording, path) -> None:
    """Write the gyro trace: one ``yaw<TAB>pitch`` line per frame."""
    if recording.gyro is None:
        raise ValueError("recording carries no gyro trace")
    with open(path, "w") as fh:
        for gx, gy in recording.gyro:
            fh.write(f"{int(gx)}\t{int(gy)}\n")


def read_sensor_log(path) -> np.ndarray:
    """Inverse of export_sensor_log; returns an (n, 2) int array."""
    pairs = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                gx, gy = line.split("\t")
                pairs.append((int(gx), int(gy)))
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


# --- the pipeline --------------------------------------------------------------


def acquisition_round_trip(
    recording: EegRecording, lsb_uv: float, key: bytes
) -> tuple[list[bytes], EegRecording, DropReport]:
    """encode -> mask -> unmask -> decode -> reassemble.

    Returns the masked wire frames (capture content) and the reassembled,
    quantized recording.
    """
    frames = frames_from_recording(recording, lsb_uv)
    wire = [mask_frame(encode_frame(f), key) for f in frames]
    decoded = [decode_frame(unmask_frame(raw, key)) for raw in wire]
    rebuilt, report = assemble_stream(decoded, lsb_uv)
    return wire, rebuilt, report


def preprocess_recording(recording: EegRecording, cfg: ExperimentConfig) -> EegRecording:
    rec = remove_baseline(recording)
    if cfg.highpass_hz > 0:
        rec = apply_filter(rec, FilterSpec.high_pass(cfg.highpass_hz))
    if cfg.notch_hz > 0:
        rec = apply_filter(rec, FilterSpec.notch(cfg.notch_hz))
    return rec


def analyze_condition(
    condition: Condition,
    cfg: ExperimentConfig,
    montage: Montage,
    out: Path,
    manifest: list[str],
) -> tuple[ConditionResult, EegRecording]:
    name = condition.value
    if condition in cfg.inputs:
        wire = read_efr(cfg.inputs[condition])
        decoded = [decode_frame(unmask_frame(raw, cfg.key)) for raw in wire]
        raw_rec, drop = assemble_stream(decoded, cfg.lsb_uv)
    else:
        profile = dataclasses.replace(cfg.profile, seed=cfg.seed)
        synth_rec, _truth = generate_recording(profile, condition, cfg.condition_duration_s)
        if cfg.mains_amp_uv > 0:
            synth_rec = inject_mains(synth_rec, cfg.mains_hz, cfg.mains_amp_uv)
        wire, raw_rec, drop = acquisition_round_trip(synth_rec, cfg.lsb_uv, cfg.key)
        write_efr(out / f"capture_{name}.efr", wire)
        manifest.append(f"capture_{name}.efr")

    export_sensor_log(raw_rec, out / f"sensor_{name}.dat")
    manifest.append(f"sensor_{name}.dat")

    rec = preprocess_recording(raw_rec, cfg)

    for label in ("O2", "F3"):
        spec = amplitude_spectrum(rec.channel(label), rec.rate)
        fname = f"spectrum_{name}_{label}.csv"
        write_spectrum_csv(spec, out / fname)
        manifest.append(fname)

    alpha_power = np.empty(len(rec.labels))
    peaks: dict[str, Optional[tuple[float, float]]] = {}
    for row, label in enumerate(rec.labels):
        psd = welch_psd(rec.data[row], rec.rate)
        alpha_power[row] = band_power(psd, *ALPHA_BAND)
        if label in ("O1", "O2", "F3"):
            peaks[label] = find_alpha_peak(psd)
            if label == "O2":
                fname = f"psd_{name}_O2.csv"
                write_psd_csv(psd, out / fname)
                manifest.append(fname)

    topo = topomap(alpha_power, montage, cfg.grid_n, band=ALPHA_BAND)
    write_topomap_csv(topo, out / f"topomap_{name}.csv")
    write_topomap_pgm(topo, out / f"topomap_{name}.pgm")
    manifest += [f"topomap_{name}.csv", f"topomap_{name}.pgm"]

    events = (
        detect_disconnection(rec)
        + detect_ocular(rec)
        + detect_muscle(rec)
    )
    with open(out / f"events_{name}.csv", "w") as fh:
        fh.write(events_to_csv(events))
    manifest.append(f"events_{name}.csv")

    result = ConditionResult(
        condition=condition,
        recording=rec,
        drop_report=drop,
        alpha_power=alpha_power,
        alpha_peaks=peaks,
        artifact_events=events,
    )
    return result, rec


def _run_experiment(
    cfg: ExperimentConfig,
    conditions: tuple[Condition, ...],
    closed_label_condition: Condition,
) -> ExperimentReport:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    montage = default_montage()
    manifest: list[str] = []

    results: dict[str, ConditionResult] = {}
    recordings: dict[Condition, EegRecording] = {}
    for condition in conditions:
        result, rec = analyze_condition(condition, cfg, montage, out, manifest)
        results[condition.value] = result
        recordings[condition] = rec

    open_features = extract_features(recordings[Condition.EYES_OPEN], 0)
    closed_features = extract_features(recordings[closed_label_condition], 1)
    feature_set = concat_feature_sets([open_features, closed_features])
    with open(out / "features.csv", "w") as fh:
        fh.write(features_to_csv(feature_set))
    manifest.append("features.csv")

    trainers = {
        "svm": linear_trainer("svm"),
        "logreg": linear_trainer("logreg"),
        "mlp": mlp_trainer(seed=cfg.seed),
    }
    accuracies = {
        name: evaluate(trainer, feature_set, split=("kfold", 5), seed=cfg.seed)
        for name, trainer in trainers.items()
    }
    for kind in ("svm", "logreg"):
        model = train_linear(feature_set, kind=kind)
        with open(out / f"model_{kind}.txt", "w") as fh:
            fh.write(model.to_text())
        manifest.append(f"model_{kind}.txt")

    ratio = None
    if Condition.EYES_CLOSED_DISTRACTOR.value in results:
        o2 = CHANNEL_NAMES.index("O2")
        quiet = results[Condition.EYES_CLOSED.value].alpha_power[o2]
        distracted = results[Condition.EYES_CLOSED_DISTRACTOR.value].alpha_power[o2]
        ratio = float(distracted / quiet) if quiet > 0 else float("nan")

    report = ExperimentReport(
        conditions=results,
        accuracies=accuracies,
        feature_set=feature_set,
        distractor_quiet_ratio=ratio,
        manifest=manifest,
        out_dir=out,
    )
    _write_report_files(report, cfg)
    return report


def run_experiment_one(cfg: ExperimentConfig) -> ExperimentReport:
    """Eyes-open vs quiet eyes-closed blocks."""
    return _run_experiment(cfg, EXPERIMENT_ONE_CONDITIONS, Condition.EYES_CLOSED)


def run_experiment_two(cfg: ExperimentConfig) -> ExperimentReport:
    """Adds the distractor condition; classification contrasts open vs distracted."""
    return _run_experiment(
        cfg, EXPERIMENT_TWO_CONDITIONS, Condition.EYES_CLOSED_DISTRACTOR
    )


# --- report writing -------------------------------------------------------------


def _write_report_files(report: ExperimentReport, cfg: ExperimentConfig) -> None:
    out = report.out_dir

    with open(out / "band_power_alpha.csv", "w") as fh:
        fh.write("condition,channel,power_uv2\n")
        for name, result in report.conditions.items():
            for label, power in zip(CHANNEL_NAMES, result.alpha_power):
                fh.write(f"{name},{label},{power:.12g}\n")
    report.manifest.append("band_power_alpha.csv")

    with open(out / "alpha_peaks.csv", "w") as fh:
        fh.write("condition,channel,freq_hz,prominence\n")
        for name, result in report.conditions.items():
            for label, peak in result.alpha_peaks.items():
                if peak is None:
                    fh.write(f"{name},{label},nan,nan\n")
                else:
                    fh.write(f"{name},{label},{peak[0]:.12g},{peak[1]:.12g}\n")
    report.manifest.append("alpha_peaks.csv")

    with open(out / "accuracy.csv", "w") as fh:
        fh.write("model,accuracy,tn,fp,fn,tp,fold_accuracies\n")
        for model, res in report.accuracies.items():
            folds = "|".join(f"{a:.6g}" for a in res.fold_accuracies)
            tn, fp, fn, tp = res.confusion
            fh.write(f"{model},{res.accuracy:.12g},{tn},{fp},{fn},{tp},{folds}\n")
    report.manifest.append("accuracy.csv")

    with open(out / "drop_report.csv", "w") as fh:
        fh.write("condition,expected_frames,received_frames,repaired,gaps\n")
        for name, result in report.conditions.items():
            d = result.drop_report
            gaps = "|".join(f"{p}:{m}" for p, m in d.gaps)
            fh.write(f"{name},{d.expected_frames},{d.received_frames},{d.repaired},{gaps}\n")
    report.manifest.append("drop_report.csv")

    with open(out / "report.txt", "w") as fh:
        fh.write("experiment summary\n")
        fh.write(f"seed: {cfg.seed}\n")
        fh.write(f"periods per condition: {cfg.periods_per_condition}\n")
        o2 = CHANNEL_NAMES.index("O2")
        f3 = CHANNEL_NAMES.index("F3")
        for name, result in report.conditions.items():
            fh.write(
                f"{name}: O2 alpha {result.alpha_power[o2]:.6g} uV^2, "
                f"F3 alpha {result.alpha_power[f3]:.6g} uV^2, "
                f"{len(result.artifact_events)} artifact events, "
                f"{result.drop_report.repaired} repaired frames\n"
            )
        for model, res in report.accuracies.items():
            fh.write(f"{model} 5-fold accuracy: {res.accuracy:.4f}\n")
        if report.distractor_quiet_ratio is not None:
            fh.write(
                f"O2 alpha distractor/quiet power ratio: {report.distractor_quiet_ratio:.4f}\n"
            )
    report.manifest.append("report.txt")

    with open(out / "manifest.txt", "w") as fh:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        fh.write(f"# generated {stamp}\n")
        for name in sorted(set(report.manifest)):
            fh.write(name + "\n")
