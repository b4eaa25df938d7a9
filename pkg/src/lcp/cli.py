"""``lcp`` command line: compress, decompress, verify, inspect, stats, synth, bench.

Exit codes::

    0 ok            4 value out of 16-bit range   8 truncated stream
    1 verify mismatch  5 I/O error                9 corrupt stream
    2 usage error   6 bad magic
    3 CSV parse error  7 unsupported version
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, bench, synth
from .codec import encode_array
from .container import rate_to_mhz, read_container, read_header, write_container
from .csvio import CsvConfig, csv_size, emit_csv, parse_csv
from .errors import (
    BadMagic,
    CorruptStream,
    OutOfRange,
    ParseError,
    TruncatedStream,
    UnsupportedVersion,
)
from .obfuscate import MAX_JUNK
from .quantize import quantize_array

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_RANGE = 4
EXIT_IO = 5
EXIT_BAD_MAGIC = 6
EXIT_VERSION = 7
EXIT_TRUNCATED = 8
EXIT_CORRUPT = 9

# most specific first: BadMagic and UnsupportedVersion are CorruptStream subclasses
_ERROR_EXITS = [
    (ParseError, EXIT_PARSE, "parse"),
    (OutOfRange, EXIT_RANGE, "quantize"),
    (BadMagic, EXIT_BAD_MAGIC, "container"),
    (UnsupportedVersion, EXIT_VERSION, "container"),
    (TruncatedStream, EXIT_TRUNCATED, "decode"),
    (CorruptStream, EXIT_CORRUPT, "decode"),
    (OSError, EXIT_IO, "i/o"),
    (ValueError, EXIT_USAGE, "usage"),
]


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------- I/O helpers


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_bytes(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    with open(path, "wb") as fh:
        fh.write(data)


def _info(args, message: str) -> None:
    # keep stdout clean when it carries the payload
    stream = sys.stderr if getattr(args, "output", None) == "-" else sys.stdout
    print(message, file=stream)


# ---------------------------------------------------------------- option parsing


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _obfuscate_count(text: str) -> int:
    n = int(text)
    if not 0 <= n <= MAX_JUNK:
        raise argparse.ArgumentTypeError(f"--obfuscate must be in [0, {MAX_JUNK}]")
    return n


def _positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _add_csv_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("CSV layout")
    g.add_argument("--columns", default="timestamp,V,I,P,Q",
                   help="role of each CSV column in order: 'timestamp', '-' to skip, "
                        "or a channel name (default: %(default)s)")
    g.add_argument("--decimals", type=_int_list,
                   help="decimal places per channel, e.g. 2,2,0,0 (default: V/I 2, others 0)")
    g.add_argument("--rate", type=_positive_float, help="sample rate in Hz")
    g.add_argument("--t0", type=float, help="first timestamp, epoch seconds")
    g.add_argument("--no-header", action="store_true", help="CSV has no header row")
    g.add_argument("--delimiter", default=",")


def _add_codec_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("coding")
    g.add_argument("--lca", action="store_true",
                   help="round every channel to multiples of 5 before coding (lossy)")
    g.add_argument("--clamp", action="store_true",
                   help="saturate out-of-range values instead of failing")
    g.add_argument("--obfuscate", type=_obfuscate_count, default=0, metavar="N",
                   help="splice N junk values into each channel (0-255)")
    g.add_argument("--seed", type=int, help="RNG seed for the junk values")


def _config(args) -> CsvConfig:
    return CsvConfig.from_roles(
        args.columns.split(","),
        args.decimals,
        lca=args.lca,
        has_header=not args.no_header,
        delimiter=args.delimiter,
    )


def _load_quantized(args, text: str):
    config = _config(args)
    parsed = parse_csv(text, config, rate=args.rate, t0=args.t0)
    if parsed.rate_hz is None:
        raise CliError("cannot infer a sample rate from one row; pass --rate")
    if parsed.spacing_warnings:
        print(f"warning: {parsed.spacing_warnings} rows deviate more than 1% from the "
              f"declared period", file=sys.stderr)
    specs = config.specs
    channels = [quantize_array(v, s, args.clamp) for v, s in zip(parsed.channels, specs)]
    return config, parsed, specs, channels


# ---------------------------------------------------------------- subcommands


def cmd_compress(args) -> int:
    text = _read_text(args.input)
    config, parsed, specs, channels = _load_quantized(args, text)
    blob = write_container(specs, channels, rate_to_mhz(parsed.rate_hz), parsed.t0_us,
                           args.obfuscate, args.seed)
    _write_bytes(args.output, blob)
    original = csv_size(text)
    summary = {
        "rows": parsed.row_count,
        "channels": len(specs),
        "csv_bytes": original,
        "compressed_bytes": len(blob),
        "ratio": original / len(blob),
    }
    if args.json:
        _info(args, json.dumps(summary, sort_keys=True))
    else:
        _info(args, f"{original:,} -> {len(blob):,} bytes (ratio {summary['ratio']:.2f}), "
                    f"{parsed.row_count:,} rows x {len(specs)} channels")
    return EXIT_OK


def cmd_decompress(args) -> int:
    header, channels = read_container(_read_bytes(args.input))
    config = CsvConfig(delimiter=args.delimiter, has_header=not args.no_header)
    _write_text(args.output, emit_csv(header, channels, config, args.time_decimals))
    return EXIT_OK


def cmd_verify(args) -> int:
    config, parsed, specs, channels = _load_quantized(args, _read_text(args.input))
    blob = write_container(specs, channels, rate_to_mhz(parsed.rate_hz), parsed.t0_us,
                           args.obfuscate, args.seed)
    _, decoded = read_container(blob)
    for col, (spec, a, b) in enumerate(zip(specs, channels, decoded)):
        if not np.array_equal(a, b):
            row = int(np.argmax(a != b))
            print(f"MISMATCH at row {row}, channel {spec.name!r} (column {col}): "
                  f"expected {int(a[row])}, decoded {int(b[row])}")
            return EXIT_MISMATCH
    encoded = [encode_array(c) for c in channels]
    hist = bench.class_histogram(encoded)
    bits = sum(e.nbits for e in encoded)
    n = sum(e.count for e in encoded)
    if args.json:
        print(json.dumps({"status": "OK", "bits_per_value": bits / n,
                          "class_histogram": hist.counts}, sort_keys=True))
    else:
        print("OK")
        print(f"bits per value {bits / n:.3f}")
        print("classes " + ", ".join(f"{k}={v}" for k, v in hist.counts.items()))
    return EXIT_OK


def cmd_inspect(args) -> int:
    header, _ = read_header(_read_bytes(args.input))
    print(json.dumps(header.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_stats(args) -> int:
    data = _read_bytes(args.input)
    header, channels = read_container(data)
    rows = []
    for meta, values in zip(header.channels, channels):
        enc = encode_array(values)
        rows.append({
            "name": meta.name,
            "values": meta.value_count,
            "payload_bits": meta.payload_bit_count,
            "bits_per_value": enc.nbits / enc.count,
            "class_histogram": enc.histogram,
        })
    if args.json:
        print(json.dumps({"file_bytes": len(data), "header": header.to_dict(),
                          "channels": rows}, sort_keys=True))
        return EXIT_OK
    print(f"file bytes {len(data):,}, header {header.size} bytes, "
          f"rate {header.sample_rate_mHz / 1000:g} Hz, {header.value_count:,} samples")
    for r in rows:
        hist = " ".join(f"{k}={v}" for k, v in r["class_histogram"].items())
        print(f"  {r['name']:<12} {r['bits_per_value']:.3f} bits/value  {hist}")
    return EXIT_OK


def cmd_synth(args) -> int:
    result = synth.generate(duration_s=args.duration, rate_hz=args.rate, seed=args.seed)
    text = synth.to_csv(result, seed=args.seed, t0=args.t0, per_appliance=args.per_appliance)
    _write_text(args.output, text)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.input:
        report = bench.run_bench(_read_text(args.input), _config(args), lca=args.lca,
                                 obfuscate=args.obfuscate, seed=args.seed or 0,
                                 rate=args.rate, t0=args.t0, clamp=args.clamp)
    else:
        report = bench.run_synth_bench(args.duration, args.synth_rate, args.seed or 0,
                                       lca=args.lca, obfuscate=args.obfuscate)
    if args.json:
        print(json.dumps(report.to_dict(), sort_keys=True))
    else:
        print(bench.format_report(report))
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="CSV -> .bin container")
    p.add_argument("input")
    p.add_argument("output")
    _add_csv_options(p)
    _add_codec_options(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help=".bin container -> CSV")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--time-decimals", type=int, default=2, choices=range(7))
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("verify", help="in-memory compress/decompress/compare of a CSV")
    p.add_argument("input")
    _add_csv_options(p)
    _add_codec_options(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("inspect", help="dump a container header as JSON")
    p.add_argument("input")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("stats", help="per-channel bits/value and class histogram of a container")
    p.add_argument("input")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("synth", help="write synthetic household load as CSV")
    p.add_argument("output")
    p.add_argument("--duration", type=_positive_float, default=600.0, help="seconds")
    p.add_argument("--rate", type=_positive_float, default=50.0, help="Hz")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t0", type=float, default=synth.DEFAULT_T0)
    p.add_argument("--per-appliance", action="store_true",
                   help="add one P_<appliance> column per appliance")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="ratio, class mix and throughput report")
    p.add_argument("input", nargs="?", help="CSV to measure (default: synthetic data)")
    p.add_argument("--duration", type=_positive_float, default=600.0,
                   help="synthetic duration in seconds when no input is given")
    p.add_argument("--synth-rate", type=_positive_float, default=50.0)
    _add_csv_options(p)
    _add_codec_options(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"lcp: {exc}", file=sys.stderr)
        return exc.code
    except BrokenPipeError:
        return EXIT_IO
    except Exception as exc:
        for cls, code, stage in _ERROR_EXITS:
            if isinstance(exc, cls):
                print(f"lcp: {stage} error: {exc}", file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
