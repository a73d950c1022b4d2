"""Occipital PSD features and the three reference classifiers.

Features: a 1 s sliding window (half-window hop) over the recording;
each window contributes the pair (log10(1 + total PSD power of O1),
same for O2). Eyes-closed windows cluster toward the upper right of that
plane, eyes-open windows spread lower.

Classifiers: a linear-kernel SVM (hinge loss) and logistic regression,
both trained by deterministic full-batch gradient descent with a
backtracking step so the training loss never increases, plus a small
multilayer perceptron (2-64-32-1, tanh hidden activations, sigmoid
output) trained by seeded mini-batch gradient descent. Features are
z-scored inside the models; the stored mean/scale travel with them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .recording import EegRecording
from .spectral import band_power, welch_psd

WINDOW_LEN = 128
HOP = WINDOW_LEN // 2


# --- windows and features -------------------------------------------------


def sliding_windows(
    recording: EegRecording, window_len: int = WINDOW_LEN, hop: int = HOP
) -> list[tuple[int, np.ndarray]]:
    """(start_index, channels x window_len view) pairs at starts 0, hop, 2*hop, ..."""
    n = recording.n_samples
    if window_len > n:
        raise ValueError(f"window of {window_len} samples exceeds recording ({n} samples)")
    if hop < 1:
        raise ValueError(f"hop must be >= 1, got {hop}")
    starts = range(0, n - window_len + 1, hop)
    return [(s, recording.data[:, s : s + window_len]) for s in starts]


@dataclass
class LabeledFeatureSet:
    features: np.ndarray  # (n, 2): log-power of O1, O2 per window
    labels: np.ndarray    # (n,) int: 0 = eyes open, 1 = eyes closed
    window_len: int = WINDOW_LEN
    hop: int = HOP

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64).reshape(-1, 2)
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError(
                f"{self.features.shape[0]} feature rows vs {self.labels.shape[0]} labels"
            )

    def __len__(self) -> int:
        return self.labels.shape[0]


def _window_log_power(x: np.ndarray, rate: float) -> float:
    psd = welch_psd(x, rate, segment_len=x.shape[0], overlap=0.0)
    return float(np.log10(1.0 + band_power(psd, 0.0, rate / 2.0)))


def extract_features(
    recording: EegRecording,
    labels: Union[int, Sequence[int]],
    window_len: int = WINDOW_LEN,
    hop: int = HOP,
) -> LabeledFeatureSet:
    """Per-window O1/O2 log-power features with condition labels.

    ``labels`` is either one label for every window or a sequence with one
    entry per window.
    """
    o1 = recording.channel("O1")
    o2 = recording.channel("O2")
    windows = sliding_windows(recording, window_len, hop)
    feats = np.empty((len(windows), 2))
    for i, (start, _) in enumerate(windows):
        feats[i, 0] = _window_log_power(o1[start : start + window_len], recording.rate)
        feats[i, 1] = _window_log_power(o2[start : start + window_len], recording.rate)
    if np.isscalar(labels):
        label_arr = np.full(len(windows), int(labels), dtype=np.int64)
    else:
        label_arr = np.asarray(labels, dtype=np.int64)
        if label_arr.shape[0] != len(windows):
            raise ValueError(f"{label_arr.shape[0]} labels for {len(windows)} windows")
    return LabeledFeatureSet(features=feats, labels=label_arr, window_len=window_len, hop=hop)


def concat_feature_sets(sets: Sequence[LabeledFeatureSet]) -> LabeledFeatureSet:
    if not sets:
        raise ValueError("nothing to concatenate")
    return LabeledFeatureSet(
        features=np.concatenate([s.features for s in sets]),
        labels=np.concatenate([s.labels for s in sets]),
        window_len=sets[0].window_len,
        hop=sets[0].hop,
    )


def features_to_csv(fs: LabeledFeatureSet) -> str:
    lines = ["psd_o1,psd_o2,label"]
    for (a, b), y in zip(fs.features, fs.labels):
        lines.append(f"{a:.12g},{b:.12g},{int(y)}")
    return "\n".join(lines) + "\n"


def features_from_csv(text: str) -> LabeledFeatureSet:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "psd_o1,psd_o2,label":
        raise ValueError("missing feature CSV header 'psd_o1,psd_o2,label'")
    rows = [ln.split(",") for ln in lines[1:]]
    feats = np.array([[float(a), float(b)] for a, b, _ in rows])
    labels = np.array([int(y) for _, _, y in rows])
    return LabeledFeatureSet(features=feats, labels=labels)


# --- standardization shared by the models ----------------------------------


def _fit_standardizer(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    return mean, std


def _check_two_classes(labels: np.ndarray) -> None:
    present = np.unique(labels)
    if not (0 in present and 1 in present):
        raise ValueError(f"training needs both classes present, got labels {present}")


# --- linear models ----------------------------------------------------------


@dataclass
class LinearModel:
    kind: str  # "svm" or "logreg"
    weights: np.ndarray  # (2,)
    bias: float
    feat_mean: np.ndarray
    feat_std: np.ndarray

    def decision(self, features: np.ndarray) -> np.ndarray:
        z = (np.asarray(features, dtype=np.float64) - self.feat_mean) / self.feat_std
        return z @ self.weights + self.bias

    def predict(self, features: np.ndarray) -> np.ndarray:
        return (self.decision(features) > 0).astype(np.int64)

    def to_text(self) -> str:
        lines = [f"kind={self.kind}"]
        for i in range(2):
            lines.append(f"w{i}={self.weights[i]!r}")
            lines.append(f"mean{i}={self.feat_mean[i]!r}")
            lines.append(f"std{i}={self.feat_std[i]!r}")
        lines.append(f"bias={self.bias!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LinearModel":
        kv = {}
        for ln in text.splitlines():
            if ln.strip():
                key, _, val = ln.partition("=")
                kv[key.strip()] = val.strip()
        return cls(
            kind=kv["kind"],
            weights=np.array([float(kv["w0"]), float(kv["w1"])]),
            bias=float(kv["bias"]),
            feat_mean=np.array([float(kv["mean0"]), float(kv["mean1"])]),
            feat_std=np.array([float(kv["std0"]), float(kv["std1"])]),
        )


def _linear_loss_grad(
    kind: str, w: np.ndarray, b: float, x: np.ndarray, y_pm: np.ndarray, l2: float
) -> tuple[float, np.ndarray, float]:
    f = x @ w + b
    margin = y_pm * f
    if kind == "svm":
        hinge = np.maximum(0.0, 1.0 - margin)
        loss = hinge.mean() + l2 * float(w @ w)
        active = (hinge > 0).astype(np.float64)
        dw = -(active * y_pm) @ x / x.shape[0] + 2.0 * l2 * w
        db = float(-(active * y_pm).mean())
    elif kind == "logreg":
        loss = float(np.logaddexp(0.0, -margin).mean()) + l2 * float(w @ w)
        s = 1.0 / (1.0 + np.exp(margin))  # sigmoid(-margin)
        dw = -(s * y_pm) @ x / x.shape[0] + 2.0 * l2 * w
        db = float(-(s * y_pm).mean())
    else:
        raise ValueError(f"kind must be 'svm' or 'logreg', got {kind!r}")
    return float(loss), dw, db


def train_linear(
    features: LabeledFeatureSet,
    kind: str = "svm",
    l2: float = 1e-3,
    lr: float = 0.5,
    max_iter: int = 300,
) -> LinearModel:
    """Full-batch gradient descent with backtracking; loss is monotone."""
    _check_two_classes(features.labels)
    mean, std = _fit_standardizer(features.features)
    x = (features.features - mean) / std
    y_pm = features.labels.astype(np.float64) * 2.0 - 1.0
    w = np.zeros(x.shape[1])
    b = 0.0
    loss, dw, db = _linear_loss_grad(kind, w, b, x, y_pm, l2)
    step = lr
    for _ in range(max_iter):
        for _ in range(40):
            w_new = w - step * dw
            b_new = b - step * db
            loss_new, dw_new, db_new = _linear_loss_grad(kind, w_new, b_new, x, y_pm, l2)
            if loss_new <= loss:
                break
            step *= 0.5
        else:
            break  # no descent step found: at a kink or a minimum
        w, b, loss, dw, db = w_new, b_new, loss_new, dw_new, db_new
        step = min(step * 1.2, lr)
    return LinearModel(kind=kind, weights=w, bias=b, feat_mean=mean, feat_std=std)


# --- multilayer perceptron --------------------------------------------------

_MLP_SIZES = (2, 64, 32, 1)

MlpParams = tuple[np.ndarray, ...]  # W1, b1, W2, b2, W3, b3


@dataclass
class MlpModel:
    params: MlpParams
    feat_mean: np.ndarray
    feat_std: np.ndarray
    final_loss: float

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        z = (np.asarray(features, dtype=np.float64) - self.feat_mean) / self.feat_std
        p, _ = _mlp_forward(self.params, z)
        return p

    def predict(self, features: np.ndarray) -> np.ndarray:
        return (self.predict_proba(features) >= 0.5).astype(np.int64)


def init_mlp_params(seed: int) -> MlpParams:
    rng = np.random.default_rng(seed)
    params = []
    for fan_in, fan_out in zip(_MLP_SIZES[:-1], _MLP_SIZES[1:]):
        params.append(rng.standard_normal((fan_in, fan_out)) / np.sqrt(fan_in))
        params.append(np.zeros(fan_out))
    return tuple(params)


def _mlp_forward(params: MlpParams, x: np.ndarray):
    w1, b1, w2, b2, w3, b3 = params
    h1 = np.tanh(x @ w1 + b1)
    h2 = np.tanh(h1 @ w2 + b2)
    logits = h2 @ w3 + b3
    p = 1.0 / (1.0 + np.exp(-logits[:, 0]))
    return p, (h1, h2)


def mlp_loss_and_grads(
    params: MlpParams, x: np.ndarray, y: np.ndarray
) -> tuple[float, MlpParams]:
    """Cross-entropy loss and its analytic gradients (backpropagation)."""
    w1, b1, w2, b2, w3, b3 = params
    n = x.shape[0]
    p, (h1, h2) = _mlp_forward(params, x)
    eps = 1e-12
    loss = float(-np.mean(y * np.log(p + eps) + (1.0 - y) * np.log(1.0 - p + eps)))
    dlogit = ((p - y) / n)[:, None]
    dw3 = h2.T @ dlogit
    db3 = dlogit.sum(axis=0)
    dh2 = dlogit @ w3.T * (1.0 - h2**2)
    dw2 = h1.T @ dh2
    db2 = dh2.sum(axis=0)
    dh1 = dh2 @ w2.T * (1.0 - h1**2)
    dw1 = x.T @ dh1
    db1 = dh1.sum(axis=0)
    return loss, (dw1, db1, dw2, db2, dw3, db3)


def train_mlp(
    features: LabeledFeatureSet,
    epochs: int = 200,
    learning_rate: float = 0.05,
    batch_size: int = 32,
    seed: int = 0,
) -> MlpModel:
    """Seeded mini-batch gradient descent; raises if the loss diverges."""
    _check_two_classes(features.labels)
    mean, std = _fit_standardizer(features.features)
    x = (features.features - mean) / std
    y = features.labels.astype(np.float64)
    params = init_mlp_params(seed)
    rng = np.random.default_rng([seed, 1])
    n = x.shape[0]
    loss, _ = mlp_loss_and_grads(params, x, y)
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            _, grads = mlp_loss_and_grads(params, x[batch], y[batch])
            params = tuple(p - learning_rate * g for p, g in zip(params, grads))
        loss, _ = mlp_loss_and_grads(params, x, y)
        if not np.isfinite(loss):
            raise ValueError(f"MLP training diverged (loss {loss})")
    return MlpModel(params=params, feat_mean=mean, feat_std=std, final_loss=loss)


# --- evaluation --------------------------------------------------------------

Trainer = Callable[[LabeledFeatureSet], object]


@dataclass
class EvalResult:
    accuracy: float
    confusion: tuple[int, int, int, int]  # tn, fp, fn, tp
    fold_accuracies: list[float]


def linear_trainer(kind: str, **hyper) -> Trainer:
    return lambda fs: train_linear(fs, kind=kind, **hyper)


def mlp_trainer(**hyper) -> Trainer:
    return lambda fs: train_mlp(fs, **hyper)


def _stratified_indices(labels: np.ndarray, rng: np.random.Generator) -> dict[int, np.ndarray]:
    return {
        int(c): rng.permutation(np.flatnonzero(labels == c))
        for c in np.unique(labels)
    }


def evaluate(
    trainer: Trainer,
    features: LabeledFeatureSet,
    split: tuple[str, float] = ("kfold", 5),
    seed: int = 0,
) -> EvalResult:
    """Held-out accuracy under a stratified split.

    ``split`` is ("holdout", fraction) or ("kfold", k). A holdout fraction
    of 0 trains and tests on the full set (resubstitution). Results are
    deterministic given the seed.
    """
    if len(features) == 0:
        raise ValueError("empty feature set")
    mode, value = split
    rng = np.random.default_rng(seed)
    per_class = _stratified_indices(features.labels, rng)

    folds: list[tuple[np.ndarray, np.ndarray]] = []
    if mode == "holdout":
        fraction = float(value)
        if not 0.0 <= fraction < 1.0:
            raise ValueError(f"holdout fraction must be in [0, 1), got {fraction}")
        test_idx = []
        train_idx = []
        for idx in per_class.values():
            n_test = int(round(fraction * idx.size))
            test_idx.append(idx[:n_test])
            train_idx.append(idx[n_test:])
        test = np.concatenate(test_idx)
        train = np.concatenate(train_idx)
        if test.size == 0:
            test = train
        folds.append((np.sort(train), np.sort(test)))
    elif mode == "kfold":
        k = int(value)
        smallest = min(idx.size for idx in per_class.values())
        if k < 2 or k > smallest:
            raise ValueError(
                f"fold count {k} invalid for smallest class of {smallest} samples"
            )
        for fold in range(k):
            test = np.concatenate([idx[fold::k] for idx in per_class.values()])
            mask = np.ones(len(features), dtype=bool)
            mask[test] = False
            folds.append((np.flatnonzero(mask), np.sort(test)))
    else:
        raise ValueError(f"split mode must be 'holdout' or 'kfold', got {mode!r}")

    tn = fp = fn = tp = 0
    fold_accs = []
    for train, test in folds:
        subset = LabeledFeatureSet(
            features=features.features[train],
            labels=features.labels[train],
            window_len=features.window_len,
            hop=features.hop,
        )
        model = trainer(subset)
        pred = np.asarray(model.predict(features.features[test]))
        truth = features.labels[test]
        tn += int(((pred == 0) & (truth == 0)).sum())
        fp += int(((pred == 1) & (truth == 0)).sum())
        fn += int(((pred == 0) & (truth == 1)).sum())
        tp += int(((pred == 1) & (truth == 1)).sum())
        fold_accs.append(float((pred == truth).mean()))
    total = tn + fp + fn + tp
    return EvalResult(
        accuracy=(tn + tp) / total,
        confusion=(tn, fp, fn, tp),
        fold_accuracies=fold_accs,
    )
