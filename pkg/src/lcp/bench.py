"""Compression benchmark: ratios, control-bit class mix, throughput."""

from __future__ import annotations

import os
import platform
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _backend, synth
from .codec import CLASSES, as_int16, decode_array, encode_array
from .container import rate_to_mhz, read_container, write_container
from .csvio import CsvConfig, csv_size, parse_csv
from .quantize import ChannelSpec, quantize_array

try:
    import zlib
except ImportError:  # pragma: no cover - CPython always ships zlib
    zlib = None

MIN_TIMED_VALUES = 1_000_000

# Reference figures measured on the LIFTED dataset; printed, never asserted.
REFERENCE = {
    "LCP ratio (LIFTED dataset)": "39.90",
    "LCA ratio (LIFTED dataset)": "45.86",
    "Gorilla ratio (LIFTED dataset)": "5.74",
    "Zip ratio (LIFTED dataset)": "9.22",
    "single-bit share": "~91%",
    "'111' share / mean size": "3.92% / 13.919 bits",
    "mean bits per value": "1.768",
    "throughput (Python 3.6, i7-7700K)": "1,837,982 values/s",
}


@dataclass
class ClassHistogram:
    counts: dict[str, int]
    bits: dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def fraction(self, name: str) -> float:
        return self.counts[name] / self.total if self.total else 0.0

    def mean_bits(self, name: str) -> float | None:
        c = self.counts[name]
        return self.bits[name] / c if c else None


def class_histogram(streams) -> ClassHistogram:
    """Sum the per-class trace of one or more :class:`~lcp.codec.EncodedStream`."""
    counts = np.zeros(len(CLASSES), dtype=np.int64)
    bits = np.zeros(len(CLASSES), dtype=np.int64)
    for s in streams:
        counts += s.class_counts
        bits += s.class_bits
    return ClassHistogram(
        dict(zip(CLASSES, counts.tolist())), dict(zip(CLASSES, bits.tolist()))
    )


@dataclass
class BenchReport:
    value_count: int
    channel_count: int
    csv_bytes: int | None
    raw16_bytes: int
    lcp_payload_bytes: int
    lcp_file_bytes: int
    codec_bits: int
    payload_bits: int
    deflate_bytes: int | None
    ratio_vs_csv: float | None
    ratio_vs_raw16: float
    deflate_ratio: float | None
    bits_per_value: float
    class_histogram: dict[str, int]
    class_mean_bits: dict[str, float | None]
    zero_fraction: float
    encode_values_per_s: float
    decode_values_per_s: float
    backend: str
    lca: bool
    obfuscate: int
    hardware: str = field(default_factory=lambda: hardware_note())

    def to_dict(self) -> dict:
        return asdict(self)


def hardware_note() -> str:
    cpu = platform.processor() or platform.machine()
    try:
        with open("/proc/cpuinfo") as fh:
            for line in fh:
                if line.startswith("model name"):
                    cpu = line.split(":", 1)[1].strip()
                    break
    except OSError:
        pass
    return f"{cpu}; {os.cpu_count()} logical CPUs; Python {platform.python_version()}"


def _throughput(channels, min_values: int = MIN_TIMED_VALUES) -> tuple[float, float]:
    # warm up, then repeat whole passes until enough values have been timed
    per_pass = sum(len(c) for c in channels)
    reps = max(1, -(-min_values // per_pass))
    encoded = [encode_array(c) for c in channels]
    for e in encoded:
        decode_array(e.data, e.count, e.nbits)

    t0 = time.perf_counter()
    for _ in range(reps):
        for c in channels:
            encode_array(c)
    enc = time.perf_counter() - t0

    t0 = time.perf_counter()
    for _ in range(reps):
        for e in encoded:
            decode_array(e.data, e.count, e.nbits)
    dec = time.perf_counter() - t0
    total = per_pass * reps
    return total / enc, total / dec


def bench_channels(specs, channels, sample_rate_mHz: int = 50_000, t0_us: int = 0,
                   csv_bytes: int | None = None, csv_raw: bytes | None = None,
                   obfuscate: int = 0, seed: int = 0,
                   min_timed_values: int = MIN_TIMED_VALUES) -> BenchReport:
    """Benchmark already-quantized channels.

    Raises ``AssertionError`` if the container does not decode to the
    input; a broken codec gets no report.
    """
    specs = list(specs)
    channels = [as_int16(c) for c in channels]
    blob = write_container(specs, channels, sample_rate_mHz, t0_us, obfuscate, seed)
    header, decoded = read_container(blob)
    for spec, a, b in zip(specs, channels, decoded):
        if not np.array_equal(a, b):
            i = int(np.argmax(a != b))
            raise AssertionError(f"roundtrip mismatch in channel {spec.name!r} at index {i}")

    encoded = [encode_array(c) for c in channels]
    hist = class_histogram(encoded)
    n_values = sum(len(c) for c in channels)
    codec_bits = sum(e.nbits for e in encoded)
    payload_bytes = sum(c.payload_len for c in header.channels)
    payload_bits = sum(c.payload_bit_count for c in header.channels)
    raw16 = 2 * n_values

    deflate_bytes = None
    if zlib is not None and csv_raw is not None:
        deflate_bytes = len(zlib.compress(csv_raw, 9))

    enc_rate, dec_rate = _throughput(channels, min_timed_values)
    return BenchReport(
        value_count=n_values,
        channel_count=len(channels),
        csv_bytes=csv_bytes,
        raw16_bytes=raw16,
        lcp_payload_bytes=payload_bytes,
        lcp_file_bytes=len(blob),
        codec_bits=codec_bits,
        payload_bits=payload_bits,
        deflate_bytes=deflate_bytes,
        ratio_vs_csv=csv_bytes / len(blob) if csv_bytes else None,
        ratio_vs_raw16=raw16 / len(blob),
        deflate_ratio=csv_bytes / deflate_bytes if csv_bytes and deflate_bytes else None,
        bits_per_value=codec_bits / n_values,
        class_histogram=hist.counts,
        class_mean_bits={k: hist.mean_bits(k) for k in CLASSES},
        zero_fraction=hist.fraction("zero"),
        encode_values_per_s=enc_rate,
        decode_values_per_s=dec_rate,
        backend=_backend.BACKEND,
        lca=any(s.lca for s in specs),
        obfuscate=obfuscate,
    )


def run_bench(csv_text: str, config: CsvConfig | None = None, lca: bool = False,
              obfuscate: int = 0, seed: int = 0, rate: float | None = None,
              t0: float | None = None, clamp: bool = False,
              min_timed_values: int = MIN_TIMED_VALUES) -> BenchReport:
    """Quantize a CSV, compress it, verify the roundtrip and measure."""
    config = config or CsvConfig()
    parsed = parse_csv(csv_text, config, rate=rate, t0=t0)
    specs = [ChannelSpec(s.name, s.decimal_places, s.lca or lca) for s in config.specs]
    channels = [quantize_array(v, s, clamp) for v, s in zip(parsed.channels, specs)]
    if parsed.rate_hz is None:
        raise ValueError("a sample rate is needed (single-row CSV without --rate)")
    raw = csv_text.encode("utf-8")
    return bench_channels(
        specs, channels, rate_to_mhz(parsed.rate_hz), parsed.t0_us,
        csv_size(raw), raw, obfuscate, seed, min_timed_values,
    )


def run_synth_bench(duration_s: float = 600.0, rate_hz: float = 50.0, seed: int = 0,
                    lca: bool = False, obfuscate: int = 0,
                    min_timed_values: int = MIN_TIMED_VALUES) -> BenchReport:
    result = synth.generate(duration_s=duration_s, rate_hz=rate_hz, seed=seed)
    text = synth.to_csv(result, seed=seed)
    return run_bench(text, lca=lca, obfuscate=obfuscate, seed=seed,
                     min_timed_values=min_timed_values)


def format_report(r: BenchReport) -> str:
    def fmt(x, spec="{:,}"):
        return "n/a" if x is None else spec.format(x)

    lines = [
        f"values            {r.value_count:,} ({r.channel_count} channels)",
        f"csv bytes         {fmt(r.csv_bytes)}",
        f"raw 16-bit bytes  {r.raw16_bytes:,}",
        f"lcp payload bytes {r.lcp_payload_bytes:,}",
        f"lcp file bytes    {r.lcp_file_bytes:,}",
        f"ratio vs csv      {fmt(r.ratio_vs_csv, '{:.2f}')}",
        f"ratio vs raw16    {r.ratio_vs_raw16:.2f}",
        f"deflate bytes     {fmt(r.deflate_bytes)} (ratio {fmt(r.deflate_ratio, '{:.2f}')})",
        f"bits per value    {r.bits_per_value:.3f}",
        "class histogram:",
    ]
    total = sum(r.class_histogram.values()) or 1
    for name in CLASSES:
        c = r.class_histogram[name]
        mb = r.class_mean_bits[name]
        label = "0" if name == "zero" else "1" + name
        lines.append(
            f"  {label:<4} {c:>12,}  {100 * c / total:6.2f}%  mean {fmt(mb, '{:.3f}')} bits"
        )
    lines += [
        f"encode            {r.encode_values_per_s:,.0f} values/s",
        f"decode            {r.decode_values_per_s:,.0f} values/s",
        f"backend           {r.backend}  (lca={r.lca}, obfuscate={r.obfuscate})",
        f"hardware          {r.hardware}",
        "reference figures (LIFTED dataset, not asserted):",
    ]
    lines += [f"  {k:<36} {v}" for k, v in REFERENCE.items()]
    return "\n".join(lines)
