"""CSV ingest and emit for measurement tables.

Default layout is ``timestamp,V,I,P,Q`` with timestamps in epoch seconds
and 2/2/0/0 decimal places for the four channels.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .container import ContainerHeader, timestamps
from .errors import ParseError
from .quantize import DEFAULT_CHANNELS, ChannelSpec

RATE_TOLERANCE = 0.01


@dataclass
class CsvConfig:
    has_header: bool = True
    timestamp_col: int | None = 0
    # (column index, spec) per channel, in output order
    channels: list[tuple[int, ChannelSpec]] = field(
        default_factory=lambda: [(i + 1, s) for i, s in enumerate(DEFAULT_CHANNELS)]
    )
    delimiter: str = ","

    def __post_init__(self):
        cols = [c for c, _ in self.channels]
        if self.timestamp_col is not None:
            cols.append(self.timestamp_col)
        if len(set(cols)) != len(cols):
            raise ValueError("column indices must be distinct")
        if not self.channels:
            raise ValueError("at least one channel column is required")
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")

    @property
    def specs(self) -> list[ChannelSpec]:
        return [s for _, s in self.channels]

    @classmethod
    def from_roles(
        cls,
        roles: list[str],
        decimals: list[int] | None = None,
        lca: bool = False,
        has_header: bool = True,
        delimiter: str = ",",
    ) -> CsvConfig:
        """Build a config from a per-column role list.

        ``roles`` names every column in order: ``"timestamp"`` (or ``"t"``)
        marks the time column, ``"-"`` skips a column, anything else is a
        channel name. ``decimals`` gives one entry per channel.
        """
        ts = None
        chans = []
        for col, role in enumerate(roles):
            role = role.strip()
            if role.lower() in ("timestamp", "t", "time"):
                if ts is not None:
                    raise ValueError("only one timestamp column allowed")
                ts = col
            elif role and role != "-":
                chans.append((col, role))
        if decimals is None:
            defaults = {s.name: s.decimal_places for s in DEFAULT_CHANNELS}
            decimals = [defaults.get(name, 0) for _, name in chans]
        if len(decimals) != len(chans):
            raise ValueError(f"{len(chans)} channels but {len(decimals)} decimal settings")
        specs = [(col, ChannelSpec(name, dp, lca)) for (col, name), dp in zip(chans, decimals)]
        return cls(has_header, ts, specs, delimiter)


@dataclass
class ParsedCsv:
    t0_us: int
    rate_hz: float | None
    channels: list[np.ndarray]  # float64 per channel
    spacing_warnings: int = 0
    names: list[str] = field(default_factory=list)

    @property
    def row_count(self) -> int:
        return len(self.channels[0]) if self.channels else 0


def parse_csv(stream, config: CsvConfig | None = None, rate: float | None = None,
              t0: float | None = None) -> ParsedCsv:
    """Read a measurement CSV.

    ``stream`` is a text file object or a string. ``rate`` (Hz) and ``t0``
    (epoch seconds) override what the timestamp column says; without a
    timestamp column both are required. When a rate is declared, row
    spacing deviating by more than 1 % of the period is counted in
    ``spacing_warnings`` but does not fail the parse.
    """
    config = config or CsvConfig()
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream, delimiter=config.delimiter)
    ts_col = config.timestamp_col
    cols = [c for c, _ in config.channels]
    need = max(cols + ([ts_col] if ts_col is not None else [])) + 1

    times: list[float] = []
    data: list[list[float]] = [[] for _ in cols]
    width = None
    for row in reader:
        lineno = reader.line_num
        if config.has_header and lineno == 1:
            continue
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if width is None:
            width = len(row)
            if width < need:
                raise ParseError(f"row has {width} columns, need {need}", row=lineno)
        elif len(row) != width:
            raise ParseError(f"ragged row: {len(row)} columns, expected {width}", row=lineno)
        for k, c in enumerate(cols):
            data[k].append(_cell(row, c, lineno))
        if ts_col is not None:
            times.append(_cell(row, ts_col, lineno))
    if width is None:
        raise ParseError("no data rows")

    if ts_col is None and (rate is None or t0 is None):
        raise ParseError("without a timestamp column both rate and t0 must be given")
    start = t0 if t0 is not None else times[0]
    t0_us = round(start * 1e6)
    if t0_us < 0:
        raise ParseError("timestamps before the epoch are not supported")

    effective = rate
    warnings = 0
    if times and len(times) > 1:
        diffs = np.diff(np.asarray(times))
        if effective is None:
            med = float(np.median(diffs))
            if med <= 0:
                raise ParseError("cannot infer a sample rate from non-increasing timestamps")
            effective = 1.0 / med
        if rate is not None:
            period = 1.0 / rate
            warnings = int(np.count_nonzero(np.abs(diffs - period) > RATE_TOLERANCE * period))
    if effective is not None and effective <= 0:
        raise ValueError("sample rate must be positive")
    return ParsedCsv(
        t0_us,
        effective,
        [np.asarray(d, dtype=np.float64) for d in data],
        warnings,
        [s.name for s in config.specs],
    )


def _cell(row, col, lineno) -> float:
    text = row[col].strip()
    try:
        x = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", row=lineno, column=col) from None
    if x != x or x in (float("inf"), float("-inf")):
        raise ParseError(f"non-finite value: {text!r}", row=lineno, column=col)
    return x


def format_fixed(values, decimal_places: int) -> list[str]:
    """Render quantized integers as fixed-point strings, exactly."""
    vals = np.asarray(values).astype(np.int64)
    if decimal_places == 0:
        return [str(v) for v in vals.tolist()]
    scale = 10**decimal_places
    out = []
    for v in vals.tolist():
        q, r = divmod(abs(v), scale)
        out.append(f"{'-' if v < 0 else ''}{q}.{r:0{decimal_places}d}")
    return out


def format_seconds(t_us, decimals: int = 2) -> list[str]:
    """Microsecond timestamps as epoch seconds, rounded half up to ``decimals``."""
    unit = 10 ** (6 - decimals)
    scaled = (np.asarray(t_us, dtype=np.int64) + unit // 2) // unit
    return format_fixed(scaled, decimals)


def emit_csv(header: ContainerHeader, channels, config: CsvConfig | None = None,
             time_decimals: int = 2) -> str:
    """Render decoded channels as CSV: timestamp first, then each channel."""
    delim = config.delimiter if config else ","
    with_header = config.has_header if config else True
    cols = [format_seconds(timestamps(header, len(channels[0])), time_decimals)]
    for meta, values in zip(header.channels, channels):
        cols.append(format_fixed(values, meta.decimal_places))
    lines = []
    if with_header:
        lines.append(delim.join(["timestamp"] + [c.name for c in header.channels]))
    lines.extend(delim.join(row) for row in zip(*cols))
    return "\n".join(lines) + "\n"


def csv_size(text) -> int:
    """Byte size of a CSV, with line endings normalized to LF."""
    if isinstance(text, str):
        text = text.encode("utf-8")
    return len(bytes(text).replace(b"\r\n", b"\n"))
