"""Value helpers: number formatting and structural equality.

Both the script renderer and the CSV serializer need the shortest decimal
text that round-trips to the identical 64-bit float; the reactive engine
needs a deterministic deep-equality test where floats compare bitwise.
"""

from __future__ import annotations

import math
import struct
from typing import Any


def fmt_number(value: int | float) -> str:
    """Render a number as its shortest exact decimal form.

    Integral floats drop the trailing ``.0`` so transcribed scripts read
    naturally (``mu = 0`` rather than ``mu = 0.0``).  The text always parses
    back to a numerically equal value.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return str(value)
    if not math.isfinite(value):
        raise ValueError(f"cannot render non-finite number {value!r}")
    if value == int(value):
        return str(int(value))
    return repr(value)


def _float_bits(x: float) -> bytes:
    return struct.pack(">d", x)


def values_equal(a: Any, b: Any) -> bool:
    """Deep structural equality with bitwise float comparison.

    Type-strict for scalars: 1 is not 1.0 and True is not 1.  Containers
    compare element-wise.  Everything else falls back to ``==``.
    """
    if a is b:
        return True
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, float) or isinstance(b, float):
        if not (isinstance(a, float) and isinstance(b, float)):
            return False
        return _float_bits(a) == _float_bits(b)
    if isinstance(a, (list, tuple)):
        if type(a) is not type(b) or len(a) != len(b):
            return False
        return all(values_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict):
        if not isinstance(b, dict) or a.keys() != b.keys():
            return False
        return all(values_equal(v, b[k]) for k, v in a.items())
    return type(a) is type(b) and a == b
