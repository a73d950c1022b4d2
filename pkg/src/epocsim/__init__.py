"""Hardware-free acquisition and analysis pipeline for a 14-channel EEG headset.

Subpackages cover the wire-frame codec with stream repair, electrode
layout, a ground-truthed signal synthesizer, preprocessing filters,
spectral analysis with scalp maps, artifact detection, PSD-feature
classification, and an experiment harness with a CLI front end.
"""

from .channels import (
    CHANNEL_NAMES,
    LSB_MICROVOLTS,
    N_CHANNELS,
    SAMPLE_RATE,
    channel_index,
)
from .events import ArtifactEvent, ArtifactKind
from .framecodec import (
    DecodedFrame,
    DropReport,
    FrameError,
    assemble_stream,
    counts_to_microvolts,
    decode_frame,
    encode_frame,
    frames_from_recording,
    mask_frame,
    microvolts_to_counts,
    read_efr,
    unmask_frame,
    write_efr,
)
from .layout import ChannelLocation, Montage, default_montage, parse_elp, project_2d
from .preprocess import FilterKind, FilterSpec, apply_filter, filter_signal, remove_baseline
from .recording import EegRecording
from .spectral import (
    PsdEstimate,
    Spectrum,
    TopoMap,
    amplitude_spectrum,
    band_power,
    find_alpha_peak,
    topomap,
    welch_psd,
)
from .synth import Condition, GroundTruth, SubjectProfile, generate_recording, inject_artifact, inject_mains
from .artifacts import detect_disconnection, detect_muscle, detect_ocular
from .classify import (
    EvalResult,
    LabeledFeatureSet,
    LinearModel,
    MlpModel,
    evaluate,
    extract_features,
    sliding_windows,
    train_linear,
    train_mlp,
)

__version__ = "0.1.0"
