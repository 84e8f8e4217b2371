"""Plain (ASCII, P2) portable graymap reading and writing.

Only the P2 dialect is supported: `#` comments, arbitrary whitespace,
width/height/maxval header then width·height gray values.  Parse errors
carry line/column context.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import PgmFormatError

#: maximum characters per output line, per the plain-PGM convention
_LINE_LIMIT = 70


def _tokens(text: str):
    """Yield (token, line, column) with comments stripped; 1-based positions."""
    for lineno, line in enumerate(text.split("\n"), start=1):
        hash_pos = line.find("#")
        if hash_pos != -1:
            line = line[:hash_pos]
        col = 0
        length = len(line)
        while col < length:
            if line[col].isspace():
                col += 1
                continue
            start = col
            while col < length and not line[col].isspace():
                col += 1
            yield line[start:col], lineno, start + 1


def parse_pgm_text(text: str) -> np.ndarray:
    """Parse P2 text into an (H, W) array of gray levels scaled to [0, 1]."""
    stream = _tokens(text)

    def next_token(what: str):
        try:
            return next(stream)
        except StopIteration:
            raise PgmFormatError(f"unexpected end of file while reading {what}") from None

    def next_int(what: str, minimum: int = 0) -> int:
        tok, line, col = next_token(what)
        try:
            value = int(tok)
        except ValueError:
            raise PgmFormatError(f"expected integer {what}, got {tok!r}", line, col) from None
        if value < minimum:
            raise PgmFormatError(f"{what} must be >= {minimum}, got {value}", line, col)
        return value

    magic, line, col = next_token("magic number")
    if magic != "P2":
        raise PgmFormatError(f"not a plain PGM (expected magic 'P2', got {magic!r})", line, col)
    width = next_int("width", minimum=1)
    height = next_int("height", minimum=1)
    maxval = next_int("maximum gray value", minimum=1)

    values = np.empty(width * height, dtype=float)
    for k in range(width * height):
        tok, line, col = next_token(f"pixel {k}")
        try:
            v = int(tok)
        except ValueError:
            raise PgmFormatError(f"expected integer pixel value, got {tok!r}", line, col) from None
        if not 0 <= v <= maxval:
            raise PgmFormatError(
                f"pixel value {v} outside [0, {maxval}]", line, col
            )
        values[k] = v
    extra = next(stream, None)
    if extra is not None:
        tok, line, col = extra
        raise PgmFormatError(f"trailing data after pixel raster: {tok!r}", line, col)
    return values.reshape(height, width) / maxval


def read_pgm(path: str | os.PathLike) -> np.ndarray:
    """Read a plain PGM file; returns (H, W) gray levels in [0, 1]."""
    with open(path, "r", encoding="ascii") as fh:
        return parse_pgm_text(fh.read())


def pgm_text(gray: np.ndarray, maxval: int = 65535) -> str:
    """Render an (H, W) integer array as P2 text (LF endings, 70-char lines)."""
    gray = np.asarray(gray)
    if gray.ndim != 2:
        raise ValueError("gray must be a 2-D array")
    height, width = gray.shape
    lines = ["P2", f"{width} {height}", f"{maxval}"]
    for row in gray:
        current = ""
        for v in row:
            piece = str(int(v))
            if current and len(current) + 1 + len(piece) > _LINE_LIMIT:
                lines.append(current)
                current = piece
            else:
                current = piece if not current else current + " " + piece
        lines.append(current)
    return "\n".join(lines) + "\n"


def write_pgm(path: str | os.PathLike, gray: np.ndarray, maxval: int = 65535) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(pgm_text(gray, maxval))
