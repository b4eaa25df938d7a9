"""Synthetic appliance-level load generator.

Each appliance hops between an OFF state and its listed ON states with
exponentially distributed dwell times. Every state change is a short
linear ramp; rising edges end in a single overshoot sample (an inrush
spike). Steady samples are the rounded state power plus rounded Gaussian
noise, so with small noise most consecutive samples repeat exactly, the
way real meter data does once it is quantized.

This is a test and benchmark fixture, not a model of any specific home.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .csvio import format_fixed, format_seconds
from .quantize import INT16_MAX

DEFAULT_T0 = 1568000000.0  # 2019-09-09, epoch seconds
DEFAULT_NOISE = 0.2
LINE_NOISE = 0.3
NOMINAL_VOLTAGE = 120.0
RAW_DECIMALS = {"V": 2, "I": 3, "P": 2, "Q": 2}


@dataclass
class ApplianceProfile:
    name: str
    states: list[tuple[float, float]]  # (average power W, mean dwell s) per ON state
    off_dwell: float = 1800.0
    transient: int = 10  # samples
    overshoot: float = 0.0  # fraction of the power step
    noise: float = DEFAULT_NOISE  # std dev in quantized units (W)

    def validate(self, rate_hz: float) -> None:
        if not self.states:
            raise ValueError(f"{self.name}: at least one ON state required")
        if self.transient < 1:
            raise ValueError(f"{self.name}: transient must span at least one sample")
        for power, dwell in self.states + [(0.0, self.off_dwell)]:
            if power < 0:
                raise ValueError(f"{self.name}: negative state power {power}")
            if dwell * rate_hz < self.transient:
                raise ValueError(f"{self.name}: dwell mean shorter than the transient")
        if self.noise < 0 or self.overshoot < 0:
            raise ValueError(f"{self.name}: noise and overshoot must be non-negative")

    @property
    def peak(self) -> float:
        top = max(p for p, _ in self.states)
        return top * (1 + self.overshoot) + 6 * self.noise + 1


def default_profiles(noise: float = DEFAULT_NOISE) -> list[ApplianceProfile]:
    """Kettle, vacuum, steamer, refrigerator and washing machine at their measured state powers."""
    return [
        ApplianceProfile("kettle", [(1027.14, 150)], 1800, 10, 0.02, noise),
        ApplianceProfile("vacuum", [(1001.78, 300)], 3600, 15, 0.5, noise),
        ApplianceProfile("steamer", [(775.38, 600)], 3600, 10, 0.05, noise),
        ApplianceProfile(
            "refrigerator", [(41.94, 600), (123.71, 300), (165.04, 120)], 900, 25, 3.0, noise
        ),
        ApplianceProfile("washing_machine", [(172.29, 600), (249.95, 300)], 3600, 20, 0.3, noise),
    ]


@dataclass
class SynthResult:
    rate_hz: float
    appliances: dict[str, np.ndarray] = field(default_factory=dict)  # int32 watts
    aggregate: np.ndarray = None
    states: dict[str, np.ndarray] = field(default_factory=dict)  # state index, 0 == OFF


def _round_half_away(x):
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


def _appliance(profile: ApplianceProfile, n: int, rate_hz: float, rng) -> tuple[np.ndarray, np.ndarray]:
    powers = [0.0] + [p for p, _ in profile.states]
    dwells = [profile.off_dwell] + [d for _, d in profile.states]
    levels = _round_half_away(np.array(powers))

    state_idx = np.empty(n, dtype=np.int8)
    out = np.empty(n, dtype=np.float64)
    t = 0
    # start mid-cycle: initial state drawn in proportion to its mean dwell
    weights = np.array(dwells) / sum(dwells)
    state = int(rng.choice(len(powers), p=weights))
    prev_level = levels[state]
    while t < n:
        length = max(profile.transient, int(round(rng.exponential(dwells[state]) * rate_hz)))
        end = min(n, t + length)
        level = levels[state]
        out[t:end] = level
        state_idx[t:end] = state
        if t > 0 and level != prev_level:
            d = min(profile.transient, end - t)
            ramp = np.linspace(prev_level, level, profile.transient + 1)[1 : d + 1]
            if level > prev_level and d == profile.transient:
                ramp[-1] = level + profile.overshoot * (level - prev_level)
            out[t : t + d] = ramp
        prev_level = level
        others = [s for s in range(len(powers)) if s != state]
        state = others[rng.integers(len(others))]
        t = end

    on = state_idx > 0
    if profile.noise > 0:
        noise = rng.normal(0.0, profile.noise, size=n)
        out[on] += noise[on]
    return _round_half_away(out).astype(np.int32), state_idx


def generate(profiles=None, duration_s: float = 600.0, rate_hz: float = 50.0,
             seed: int = 0) -> SynthResult:
    """Per-appliance and aggregate active-power streams in integer watts."""
    if duration_s <= 0 or rate_hz <= 0:
        raise ValueError("duration and rate must be positive")
    profiles = default_profiles() if profiles is None else list(profiles)
    if not profiles:
        raise ValueError("at least one appliance profile is required")
    for p in profiles:
        p.validate(rate_hz)
    if sum(p.peak for p in profiles) > INT16_MAX:
        raise ValueError("profiles can exceed the 16-bit range when summed")
    n = int(round(duration_s * rate_hz))
    if n < 1:
        raise ValueError("duration too short for one sample")
    result = SynthResult(rate_hz)
    agg = np.zeros(n, dtype=np.int32)
    for p, child in zip(profiles, np.random.SeedSequence(seed).spawn(len(profiles))):
        power, states = _appliance(p, n, rate_hz, np.random.default_rng(child))
        result.appliances[p.name] = power
        result.states[p.name] = states
        agg += power
    result.aggregate = agg
    return result


def measurement_channels(result: SynthResult, seed: int = 0, voltage: float = NOMINAL_VOLTAGE,
                         voltage_noise: float = LINE_NOISE, reactive: float = 5.0,
                         reactive_noise: float = LINE_NOISE) -> dict[str, np.ndarray]:
    """V, I, P, Q columns for the aggregate circuit.

    V and Q are constant plus rounded Gaussian noise, with the noise std
    given in stored units (centivolts for V, var for Q). P is the
    aggregate and I is P / V.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5EED]))
    n = len(result.aggregate)
    v = (voltage * 100 + _round_half_away(rng.normal(0.0, voltage_noise, n))) / 100
    q = reactive + _round_half_away(rng.normal(0.0, reactive_noise, n))
    p = result.aggregate.astype(np.float64)
    i = _round_half_away(p / v * 1000) / 1000
    return {"V": v, "I": i, "P": p, "Q": q}


def to_csv(result: SynthResult, seed: int = 0, t0: float = DEFAULT_T0,
           per_appliance: bool = False) -> str:
    """Render a synthetic run as ``timestamp,V,I,P,Q[,P_<appliance>...]`` CSV.

    Values carry the raw meter precision (2, 3, 2, 2 decimals), so the file
    size is a fair stand-in for an uncompressed log.
    """
    meas = measurement_channels(result, seed)
    n = len(result.aggregate)
    t_us = round(t0 * 1e6) + np.round(np.arange(n) * (1e6 / result.rate_hz)).astype(np.int64)
    cols = [format_seconds(t_us, 2)]
    names = ["timestamp"]
    for name, values in meas.items():
        dp = RAW_DECIMALS[name]
        cols.append(format_fixed(_round_half_away(values * 10**dp).astype(np.int64), dp))
        names.append(name)
    if per_appliance:
        for name, power in result.appliances.items():
            cols.append(format_fixed(power.astype(np.int64) * 100, 2))
            names.append(f"P_{name}")
    lines = [",".join(names)]
    lines.extend(",".join(row) for row in zip(*cols))
    return "\n".join(lines) + "\n"


def repeat_fraction(values) -> float:
    """Share of samples equal to their predecessor."""
    v = np.asarray(values)
    if v.size < 2:
        return 1.0
    return float(np.count_nonzero(v[1:] == v[:-1]) / (v.size - 1))
