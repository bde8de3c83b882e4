"""Plain-text field snapshots: a header line, then one grid row per line."""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

HEADER = re.compile(r"#\s*sylvbq field J=(\d+) t=(\S+)")


def _fmt(z):
    if isinstance(z, complex) or np.iscomplexobj(z):
        return f"{z.real:.17g}{z.imag:+.17g}i"
    return f"{z:.17g}"


def format_field(U, t) -> str:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"snapshot needs a square field, got {U.shape}")
    lines = [f"# sylvbq field J={U.shape[0] - 1} t={t:.17g}"]
    lines += [" ".join(_fmt(v) for v in row) for row in U]
    return "\n".join(lines) + "\n"


def write_field(path, U, t):
    Path(path).write_text(format_field(U, t))


def _parse_value(tok):
    if not tok.endswith("i"):
        return float(tok)
    body = tok[:-1]
    # the imaginary part starts at the last sign that is not an exponent sign
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE":
            return complex(float(body[:k]), float(body[k:]))
    raise ValueError(f"bad complex token {tok!r}")


def parse_field(text):
    """Inverse of :func:`format_field`; returns ``(J, t, U)``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty snapshot")
    m = HEADER.match(lines[0].strip())
    if m is None:
        raise ValueError(f"bad snapshot header {lines[0]!r}")
    J, t = int(m.group(1)), float(m.group(2))
    rows = [[_parse_value(tok) for tok in ln.split()] for ln in lines[1:]]
    if len(rows) != J + 1 or any(len(r) != J + 1 for r in rows):
        raise ValueError(f"snapshot body does not match J={J}")
    cplx = any(isinstance(v, complex) for r in rows for v in r)
    return J, t, np.array(rows, dtype=np.complex128 if cplx else np.float64)


def read_field(path):
    return parse_field(Path(path).read_text())
