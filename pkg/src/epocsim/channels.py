"""Channel naming and headset constants shared across the package.

The 14-channel montage is fixed: acquisition frames, recordings, montage
files and feature extraction all index channels in the same order,
starting at AF3 and ending at AF4.
"""

SAMPLE_RATE = 128
"""Samples per second delivered by the headset."""

N_CHANNELS = 14

CHANNEL_NAMES = (
    "AF3", "F7", "F3", "FC5", "T7", "P7", "O1",
    "O2", "P8", "T8", "FC6", "F4", "F8", "AF4",
)

LSB_MICROVOLTS = 1.95
"""Microvolts represented by one ADC count (14 usable bits, mid-scale zero)."""

ADC_MIDSCALE = 8192
ADC_MAX = 16383

OCCIPITAL_CHANNELS = frozenset({"O1", "O2", "P7", "P8"})

LEFT_CHANNELS = frozenset({"AF3", "F7", "F3", "FC5", "T7", "P7", "O1"})
RIGHT_CHANNELS = frozenset({"AF4", "F8", "F4", "FC6", "T8", "P8", "O2"})

# Frontal sites used for eye-movement detection; ocular potentials show
# opposite polarity over the two hemispheres.
OCULAR_LEFT = ("AF3", "F7", "F3")
OCULAR_RIGHT = ("AF4", "F8", "F4")


def channel_index(label: str) -> int:
    """Index of ``label`` in the fixed channel order (AF3 -> 0 ... AF4 -> 13).

    Raises ValueError for labels outside the montage.
    """
    try:
        return CHANNEL_NAMES.index(label)
    except ValueError:
        raise ValueError(f"unknown channel label {label!r}; expected one of {CHANNEL_NAMES}") from None
