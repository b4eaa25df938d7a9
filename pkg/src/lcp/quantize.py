"""Fixed-point quantization of measurements into signed 16-bit integers.

Each channel keeps a fixed number of decimal places (voltage and current
two, active and reactive power zero by default), so scaling by
``10**decimal_places`` turns every sample into a short integer. The
optional LCA pre-pass then snaps values to the nearest multiple of 5.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange

INT16_MIN = -32768
INT16_MAX = 32767
MAX_DECIMALS = 4
LCA_STEP = 5
# nearest in-range multiple of 5 for the one value whose rounding overflows
_LCA_FLOOR = -32765


@dataclass(frozen=True)
class ChannelSpec:
    name: str
    decimal_places: int = 0
    lca: bool = False

    def __post_init__(self):
        if not 0 <= self.decimal_places <= MAX_DECIMALS:
            raise ValueError(
                f"decimal_places must be in [0, {MAX_DECIMALS}], got {self.decimal_places}"
            )

    @property
    def scale(self) -> int:
        return 10**self.decimal_places


VOLTAGE = ChannelSpec("V", 2)
CURRENT = ChannelSpec("I", 2)
ACTIVE_POWER = ChannelSpec("P", 0)
REACTIVE_POWER = ChannelSpec("Q", 0)
DEFAULT_CHANNELS = (VOLTAGE, CURRENT, ACTIVE_POWER, REACTIVE_POWER)


def _scale_round(x: np.ndarray, scale: int) -> np.ndarray:
    # Snap to 6 decimals first so float noise such as 120.13 * 100 ==
    # 12012.999999999998 cannot move a value across a rounding boundary.
    scaled = np.round(np.asarray(x, dtype=np.float64) * scale, 6)
    return np.copysign(np.floor(np.abs(scaled) + 0.5), scaled)


def quantize_array(x, spec: ChannelSpec, clamp: bool = False) -> np.ndarray:
    """Vectorized :func:`quantize`; returns an ``int16`` array."""
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("measurements must be finite")
    scaled = _scale_round(arr, spec.scale)
    if clamp:
        scaled = np.clip(scaled, INT16_MIN, INT16_MAX)
    else:
        bad = (scaled < INT16_MIN) | (scaled > INT16_MAX)
        if bad.any():
            i = int(np.argmax(bad))
            raise OutOfRange(
                f"channel {spec.name!r}: value {arr.flat[i]!r} scales to "
                f"{int(scaled.flat[i])}, outside [{INT16_MIN}, {INT16_MAX}] (index {i})"
            )
    out = scaled.astype(np.int16)
    if spec.lca:
        out = lca_round_array(out)
    return out


def quantize(x: float, spec: ChannelSpec, clamp: bool = False) -> int:
    """Scale ``x`` by ``10**decimal_places`` and round half away from zero.

    Raises :class:`OutOfRange` when the result does not fit in 16 bits,
    unless ``clamp`` is set, in which case it saturates.
    """
    return int(quantize_array(np.array([x]), spec, clamp)[0])


def dequantize(v, spec: ChannelSpec):
    """Inverse scaling. Works on scalars and arrays."""
    if np.ndim(v) == 0:
        return int(v) / spec.scale
    return np.asarray(v, dtype=np.float64) / spec.scale


def lca_round(v: int) -> int:
    m = abs(v)
    r = m % LCA_STEP
    m = m - r if r <= 2 else m + LCA_STEP - r
    out = -m if v < 0 else m
    return max(out, _LCA_FLOOR)


def lca_round_array(v) -> np.ndarray:
    a = np.asarray(v).astype(np.int32)
    m = np.abs(a)
    r = m % LCA_STEP
    m = np.where(r <= 2, m - r, m + LCA_STEP - r)
    out = np.where(a < 0, -m, m)
    return np.maximum(out, _LCA_FLOOR).astype(np.int16)
