"""EEG ingestion, band-pass filtration, hemisphere labeling, splitting, and synthesis.

A recording is 31 channels sampled at 250 Hz; channels referenced to A1 carry
label 0 (left hemisphere), those referenced to A2 carry label 1 (right).
The five rhythm bands are delta 1-4, theta 5-8, alpha 9-12, beta 13-30 and
gamma 31-45 Hz.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import signal as _sps

from .errors import (
    DimensionError,
    FormatError,
    NumericError,
    UnknownChannelError,
    ValidationError,
)

SAMPLE_RATE = 250.0
N_CHANNELS = 31
DEFAULT_N_SAMPLES = 15000

DATASETS = ("MonaLisa", "NeckerCube")

# 10-20 electrode pairs; the -A1/-A2 suffix is the reference and decides the label
CHANNEL_LABELS = (
    "O2-A2", "O1-A1", "P4-A2", "P3-A1", "C4-A2", "C3-A1", "F4-A2", "F3-A1",
    "Fp2-A2", "Fp1-A1", "T6-A2", "T5-A1", "T4-A2", "T3-A1", "F8-A2", "F7-A1",
    "Oz-A2", "Pz-A1", "Cz-A2", "Fz-A1", "Fpz-A2", "FT7-A1", "FC3-A1", "Fcz-A1",
    "FC4-A2", "FT8-A2", "TP7-A1", "CP3-A1", "Cpz-A1", "CP4-A2", "TP8-A2",
)


@dataclass(frozen=True)
class BandDefinition:
    name: str
    low_hz: float
    high_hz: float

    def __post_init__(self):
        if not 0.0 < self.low_hz < self.high_hz:
            raise ValidationError(f"band {self.name}: need 0 < low < high")


BANDS = {
    "delta": BandDefinition("delta", 1.0, 4.0),
    "theta": BandDefinition("theta", 5.0, 8.0),
    "alpha": BandDefinition("alpha", 9.0, 12.0),
    "beta": BandDefinition("beta", 13.0, 30.0),
    "gamma": BandDefinition("gamma", 31.0, 45.0),
}
BAND_ORDER = tuple(BANDS)


def get_band(band: str | BandDefinition) -> BandDefinition:
    if isinstance(band, BandDefinition):
        return band
    key = str(band).lower()
    if key not in BANDS:
        raise ValidationError(f"unknown band {band!r}; choose from {BAND_ORDER}")
    return BANDS[key]


def label_channel(label: str) -> int:
    """0 for a -A1 (left) reference, 1 for -A2 (right)."""
    if label.endswith("-A1"):
        return 0
    if label.endswith("-A2"):
        return 1
    raise UnknownChannelError(f"channel {label!r} has no -A1/-A2 reference suffix")


@dataclass
class RawRecording:
    """One stimulus presentation: 31 channels x n samples plus its metadata."""

    dataset: str
    participant: int
    intensity: float
    channel_labels: tuple[str, ...]
    samples: np.ndarray  # (31, n_samples) float64
    sample_rate: float = SAMPLE_RATE

    def __post_init__(self):
        if self.dataset not in DATASETS:
            raise ValidationError(f"dataset must be one of {DATASETS}, got {self.dataset!r}")
        if not 1 <= int(self.participant) <= 10:
            raise ValidationError("participant id must lie in 1..10")
        if not 0.0 < self.intensity <= 1.0:
            raise ValidationError("intensity must lie in (0, 1]")
        self.channel_labels = tuple(self.channel_labels)
        if len(self.channel_labels) != N_CHANNELS:
            raise ValidationError(f"expected {N_CHANNELS} channel labels, got {len(self.channel_labels)}")
        for label in self.channel_labels:
            label_channel(label)
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 2 or self.samples.shape[0] != N_CHANNELS:
            raise ValidationError(f"samples must be ({N_CHANNELS}, n), got {self.samples.shape}")
        if self.samples.shape[1] < 1:
            raise ValidationError("recording has no samples")
        if not np.all(np.isfinite(self.samples)):
            raise NumericError("recording contains non-finite samples")

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class ExampleMeta:
    dataset: str
    participant: int
    intensity: float
    channel: str
    band: str


@dataclass(frozen=True)
class LabeledExample:
    features: np.ndarray
    label: int
    meta: ExampleMeta


@dataclass
class SplitDataset:
    train: list[LabeledExample]
    val: list[LabeledExample]
    test: list[LabeledExample]
    seed: int

    def __iter__(self):
        yield from (self.train, self.val, self.test)


@dataclass
class FilterSpec:
    """A Butterworth band-pass realized as second-order sections.

    order is the order of the realized band-pass transfer function (even by
    construction). zero_phase applies the filter forward then backward, which
    squares the magnitude response and cancels group delay.
    """

    band: BandDefinition
    sample_rate: float
    order: int
    zero_phase: bool
    sos: np.ndarray

    @property
    def pad_len(self) -> int:
        return 3 * self.order


def design_bandpass(band: str | BandDefinition, sample_rate: float = SAMPLE_RATE,
                    order: int = 4, zero_phase: bool = True) -> FilterSpec:
    """Design a band-pass of the given (even) order; verifies pole stability."""
    band = get_band(band)
    nyquist = sample_rate / 2.0
    if band.high_hz >= nyquist:
        raise ValidationError(
            f"band {band.name} upper edge {band.high_hz} Hz >= Nyquist {nyquist} Hz")
    if order < 2 or order % 2 != 0:
        raise ValidationError("filter order must be a positive even number")
    sos = _sps.butter(order // 2, [band.low_hz, band.high_hz],
                      btype="bandpass", fs=sample_rate, output="sos")
    for section in sos:
        poles = np.roots(section[3:])
        if np.any(np.abs(poles) >= 1.0):
            raise NumericError(f"unstable filter for band {band.name} at order {order}")
    return FilterSpec(band=band, sample_rate=sample_rate, order=order,
                      zero_phase=zero_phase, sos=sos)


def apply_filter(signal: np.ndarray, spec: FilterSpec) -> np.ndarray:
    """Filter a signal (or a stack of signals along the last axis)."""
    x = np.asarray(signal, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NumericError("cannot filter a non-finite signal")
    if spec.zero_phase:
        # forward-backward pass with reflected edges, 3x filter order of padding
        return _sps.sosfiltfilt(spec.sos, x, axis=-1, padtype="odd",
                                padlen=min(spec.pad_len, x.shape[-1] - 1))
    return _sps.sosfilt(spec.sos, x, axis=-1)


def build_dataset(recordings, band: str | BandDefinition,
                  standardize: bool = False) -> list[LabeledExample]:
    """One labeled example per (recording, channel), band-filtered.

    standardize applies a per-example z-score after filtering.
    """
    band = get_band(band)
    examples: list[LabeledExample] = []
    spec_cache: dict[float, FilterSpec] = {}
    for rec in recordings:
        spec = spec_cache.get(rec.sample_rate)
        if spec is None:
            spec = design_bandpass(band, rec.sample_rate)
            spec_cache[rec.sample_rate] = spec
        filtered = apply_filter(rec.samples, spec)
        for idx, channel in enumerate(rec.channel_labels):
            try:
                label = label_channel(channel)
            except UnknownChannelError as exc:
                raise UnknownChannelError(
                    f"{exc} (dataset={rec.dataset}, participant={rec.participant})") from exc
            features = filtered[idx]
            if standardize:
                sd = features.std()
                features = (features - features.mean()) / (sd if sd > 0 else 1.0)
            examples.append(LabeledExample(
                features=np.ascontiguousarray(features),
                label=label,
                meta=ExampleMeta(rec.dataset, rec.participant, rec.intensity,
                                 channel, band.name)))
    return examples


def largest_remainder(n: int, fractions) -> list[int]:
    """Integer apportionment of n by the stated fractions; ties go to earlier entries."""
    quotas = [f * n for f in fractions]
    counts = [math.floor(q) for q in quotas]
    leftover = n - sum(counts)
    order = sorted(range(len(fractions)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def _apportion(total: int, weights: list[int], caps: list[int]) -> list[int]:
    """Largest-remainder apportionment of `total` proportional to weights, capped."""
    wsum = sum(weights)
    if wsum == 0:
        quotas = [0.0] * len(weights)
    else:
        quotas = [total * w / wsum for w in weights]
    counts = [min(math.floor(q), c) for q, c in zip(quotas, caps)]
    leftover = total - sum(counts)
    order = sorted(range(len(weights)), key=lambda i: (-(quotas[i] - counts[i]), i))
    pos = 0
    while leftover > 0:
        i = order[pos % len(order)]
        if counts[i] < caps[i]:
            counts[i] += 1
            leftover -= 1
        pos += 1
    return counts


def split_dataset(examples: list[LabeledExample], seed: int) -> SplitDataset:
    """Seeded stratified 70/15/15 split, sized globally by largest remainder."""
    n = len(examples)
    if n < 10:
        raise ValidationError(f"need at least 10 examples to split, got {n}")
    n_train, n_val, n_test = largest_remainder(n, (0.70, 0.15, 0.15))
    rng = np.random.default_rng(seed)

    labels = sorted({ex.label for ex in examples})
    groups = {lab: [ex for ex in examples if ex.label == lab] for lab in labels}
    for lab in labels:
        order = rng.permutation(len(groups[lab]))
        groups[lab] = [groups[lab][i] for i in order]

    sizes = [len(groups[lab]) for lab in labels]
    train_per = _apportion(n_train, sizes, sizes)
    remaining = [s - t for s, t in zip(sizes, train_per)]
    val_per = _apportion(n_val, remaining, remaining)

    splits: dict[str, list[LabeledExample]] = {"train": [], "val": [], "test": []}
    for lab, t_c, v_c in zip(labels, train_per, val_per):
        group = groups[lab]
        splits["train"].extend(group[:t_c])
        splits["val"].extend(group[t_c:t_c + v_c])
        splits["test"].extend(group[t_c + v_c:])
    for name in splits:
        order = rng.permutation(len(splits[name]))
        splits[name] = [splits[name][i] for i in order]
    return SplitDataset(train=splits["train"], val=splits["val"],
                        test=splits["test"], seed=seed)


@dataclass
class SyntheticConfig:
    """Generator settings: per-hemisphere band-power multipliers over pink noise.

    A sinusoid per band is added to every channel with amplitude
    sqrt(multiplier), so band power scales linearly with the multiplier.
    jitter displaces each sinusoid's frequency within its band by up to
    jitter * half-bandwidth.
    """

    seed: int = 0
    left_power: dict[str, float] = field(default_factory=dict)
    right_power: dict[str, float] = field(default_factory=dict)
    noise_amplitude: float = 1.0
    jitter: float = 0.1
    n_samples: int = DEFAULT_N_SAMPLES

    def __post_init__(self):
        for powers in (self.left_power, self.right_power):
            for name, value in powers.items():
                get_band(name)
                if value < 0:
                    raise ValidationError(f"band power multiplier for {name} must be >= 0")
        if self.noise_amplitude < 0:
            raise ValidationError("noise_amplitude must be >= 0")
        if not 0.0 <= self.jitter <= 1.0:
            raise ValidationError("jitter must lie in [0, 1]")
        if self.n_samples < 4:
            raise ValidationError("n_samples must be >= 4")

    def power(self, hemisphere: int, band: str) -> float:
        powers = self.right_power if hemisphere == 1 else self.left_power
        return powers.get(band, 1.0)


def _pink_noise(rng: np.random.Generator, n: int) -> np.ndarray:
    """Unit-variance noise with a 1/f amplitude spectrum."""
    spectrum = rng.standard_normal(n // 2 + 1) + 1j * rng.standard_normal(n // 2 + 1)
    freqs = np.fft.rfftfreq(n)
    spectrum[0] = 0.0
    spectrum[1:] /= np.sqrt(freqs[1:])
    x = np.fft.irfft(spectrum, n)
    sd = x.std()
    return x / sd if sd > 0 else x


def generate_synthetic(config: SyntheticConfig, n_participants: int = 10,
                       n_intensities: int = 10) -> list[RawRecording]:
    """Reproducible synthetic corpus: both datasets x participants x intensities."""
    if not 1 <= n_participants <= 10:
        raise ValidationError("n_participants must lie in 1..10")
    if not 1 <= n_intensities <= 10:
        raise ValidationError("n_intensities must lie in 1..10")
    rng = np.random.default_rng(config.seed)
    n = config.n_samples
    t = np.arange(n) / SAMPLE_RATE
    recordings = []
    for dataset in DATASETS:
        for participant in range(1, n_participants + 1):
            for level in range(1, n_intensities + 1):
                samples = np.empty((N_CHANNELS, n))
                for ci, channel in enumerate(CHANNEL_LABELS):
                    hemi = label_channel(channel)
                    x = config.noise_amplitude * _pink_noise(rng, n)
                    for band in BANDS.values():
                        center = 0.5 * (band.low_hz + band.high_hz)
                        half = 0.5 * (band.high_hz - band.low_hz)
                        freq = center + config.jitter * half * rng.uniform(-1.0, 1.0)
                        phase = rng.uniform(0.0, 2.0 * np.pi)
                        amp = math.sqrt(config.power(hemi, band.name))
                        x = x + amp * np.sin(2.0 * np.pi * freq * t + phase)
                    samples[ci] = x
                recordings.append(RawRecording(
                    dataset=dataset, participant=participant, intensity=level / 10.0,
                    channel_labels=CHANNEL_LABELS, samples=samples))
    return recordings


# --- corpus files: one text file per recording -------------------------------
#
# header:  # dataset=<MonaLisa|NeckerCube> participant=<int> intensity=<0.1..1.0> rate=250
# then 31 lines of  <channel label>,v1,...,vN  with full-precision decimal values.

def _recording_filename(rec: RawRecording) -> str:
    return f"{rec.dataset.lower()}_p{rec.participant:02d}_i{rec.intensity:g}.txt"


def save_recordings(recordings, path: str) -> list[str]:
    """Write one file per recording into the directory; returns the file names."""
    os.makedirs(path, exist_ok=True)
    names = []
    for rec in recordings:
        name = _recording_filename(rec)
        with open(os.path.join(path, name), "w") as fh:
            fh.write(f"# dataset={rec.dataset} participant={rec.participant} "
                     f"intensity={rec.intensity!r} rate={rec.sample_rate:g}\n")
            for label, row in zip(rec.channel_labels, rec.samples):
                fh.write(label + "," + ",".join(repr(v) for v in row) + "\n")
        names.append(name)
    return names


def _parse_header(line: str, path: str) -> dict:
    if not line.startswith("#"):
        raise FormatError(f"{path}:1: missing '#' header line")
    fields = {}
    for token in line[1:].split():
        if "=" not in token:
            raise FormatError(f"{path}:1: malformed header token {token!r}")
        key, value = token.split("=", 1)
        fields[key] = value
    for key in ("dataset", "participant", "intensity", "rate"):
        if key not in fields:
            raise FormatError(f"{path}:1: header missing {key}=")
    return fields


def load_recording(path: str) -> RawRecording:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError(f"{path}:1: empty file")
    header = _parse_header(lines[0], path)
    body = [ln for ln in lines[1:] if ln.strip()]
    if not body:
        raise FormatError(f"{path}:2: header-only file, no channel data")
    if len(body) != N_CHANNELS:
        raise FormatError(f"{path}: expected {N_CHANNELS} channel lines, found {len(body)}")
    labels = []
    rows = []
    width = None
    for offset, line in enumerate(body, start=2):
        parts = line.split(",")
        label = parts[0]
        try:
            label_channel(label)
        except UnknownChannelError as exc:
            raise FormatError(f"{path}:{offset}: {exc}") from exc
        try:
            values = np.array([float(v) for v in parts[1:]], dtype=np.float64)
        except ValueError as exc:
            raise FormatError(f"{path}:{offset}: non-numeric sample value") from exc
        if values.size == 0:
            raise FormatError(f"{path}:{offset}: channel line has no samples")
        if width is None:
            width = values.size
        elif values.size != width:
            raise FormatError(
                f"{path}:{offset}: channel has {values.size} samples, expected {width}")
        labels.append(label)
        rows.append(values)
    try:
        return RawRecording(
            dataset=header["dataset"],
            participant=int(header["participant"]),
            intensity=float(header["intensity"]),
            channel_labels=tuple(labels),
            samples=np.vstack(rows),
            sample_rate=float(header["rate"]),
        )
    except (ValidationError, ValueError) as exc:
        raise FormatError(f"{path}:1: invalid header values ({exc})") from exc


def load_recordings(path: str) -> list[RawRecording]:
    """Load every .txt recording in a directory (sorted by name), or one file."""
    if os.path.isfile(path):
        return [load_recording(path)]
    if not os.path.isdir(path):
        raise ValidationError(f"no such corpus path: {path}")
    names = sorted(n for n in os.listdir(path) if n.endswith(".txt"))
    if not names:
        raise ValidationError(f"no .txt recordings under {path}")
    return [load_recording(os.path.join(path, n)) for n in names]
