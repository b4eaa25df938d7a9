import numpy as np
import pytest

from lcp import _backend

KERNELS = [_backend.pycore] + ([_backend.ccore] if _backend.ccore is not None else [])

# Values from the worked example: three large jumps among small steps.
WORKED_EXAMPLE = [23, 25, 47, 48, 3074, 3075, 3076, 3076]


@pytest.fixture(params=KERNELS, ids=lambda k: k.NAME)
def core(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20191001)


def oracle_bits(values):
    """Reference encoder working on '0'/'1' strings, straight from the grammar."""
    vals = [v & 0xFFFF for v in values]
    out = [format(vals[0], "016b")]
    prev_lead = prev_trail = None
    for prev, cur in zip(vals, vals[1:]):
        x = prev ^ cur
        if x == 0:
            out.append("0")
            continue
        b = format(x, "016b")
        lead = len(b) - len(b.lstrip("0"))
        trail = len(b) - len(b.rstrip("0"))
        meaningful = b[lead : 16 - trail]
        if lead == prev_lead and trail == prev_trail:
            out.append("100" + meaningful)
        elif lead == prev_lead:
            out.append("101" + format(trail, "04b") + meaningful)
        elif trail == prev_trail:
            out.append("110" + format(lead, "04b") + meaningful)
        else:
            out.append("111" + format(lead, "04b") + format(trail, "04b") + meaningful)
        prev_lead, prev_trail = lead, trail
    return "".join(out)


def bits_of(data: bytes, nbits: int) -> str:
    return "".join(format(b, "08b") for b in data)[:nbits]


def random_sequence(rng, length, mode):
    """Value sequences covering the full 16-bit range and steady/transient mixes."""
    if mode == 0:
        return rng.integers(-32768, 32768, length, dtype=np.int16)
    if mode == 1:
        steps = rng.integers(-3, 4, length) * (rng.random(length) < 0.1)
        return (rng.integers(-30000, 30000) + np.cumsum(steps)).clip(-32768, 32767).astype(np.int16)
    if mode == 2:
        return rng.choice(np.array([-32768, 32767, 0, -1, 1], dtype=np.int16), length)
    runs = rng.integers(-32768, 32768, length // 50 + 1, dtype=np.int16)
    return np.repeat(runs, 50)[:length]
