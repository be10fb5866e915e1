"""Plain-text coherence matrix files.

Format: the first line holds the order k, followed by k lines each holding k
comma-separated complex entries written as ``a+bi`` (examples: ``1+0i``,
``-0.3-0.7i``, ``0.5``, ``0.25i``).  Whitespace around entries is ignored.
"""

from __future__ import annotations

import os
from typing import Union

import numpy as np

from .core import CoherenceMatrix


def format_complex(z: complex) -> str:
    z = complex(z)
    re = repr(z.real)
    im = repr(abs(z.imag))
    sign = "-" if z.imag < 0 else "+"
    return f"{re}{sign}{im}i"


def parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty matrix entry")
    js = s[:-1] + "j" if s.endswith("i") else s
    try:
        return complex(js)
    except ValueError:
        raise ValueError(f"invalid complex entry {text.strip()!r}") from None


def dumps_matrix(matrix: CoherenceMatrix) -> str:
    lines = [str(matrix.order)]
    for row in matrix.entries:
        lines.append(",".join(format_complex(z) for z in row))
    return "\n".join(lines) + "\n"


def save_matrix(path: Union[str, os.PathLike], matrix: CoherenceMatrix) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dumps_matrix(matrix))


def loads_matrix(text: str) -> CoherenceMatrix:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ValueError("matrix file is empty")
    try:
        order = int(lines[0])
    except ValueError:
        raise ValueError(f"first line must be the matrix order, got {lines[0]!r}") from None
    if order < 0:
        raise ValueError(f"matrix order must be >= 0, got {order}")
    if len(lines) - 1 != order:
        raise ValueError(f"expected {order} matrix rows, found {len(lines) - 1}")
    entries = np.zeros((order, order), dtype=complex)
    for i, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != order:
            raise ValueError(f"row {i + 1} has {len(parts)} entries, expected {order}")
        for j, part in enumerate(parts):
            entries[i, j] = parse_complex(part)
    return CoherenceMatrix(entries)


def load_matrix(path: Union[str, os.PathLike]) -> CoherenceMatrix:
    with open(path, "r", encoding="ascii") as fh:
        return loads_matrix(fh.read())
