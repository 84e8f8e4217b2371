"""Regenerate the bundled PGM mask fixtures under src/twinbeam/data/.

Run from the repository root:  python tools/make_masks.py
"""

import pathlib

import numpy as np

from twinbeam.pgm import write_pgm

OUT = pathlib.Path(__file__).resolve().parent.parent / "src" / "twinbeam" / "data"

CAT_FACE = [
    ".##..........##.",
    ".###........###.",
    ".####......####.",
    ".##############.",
    "################",
    "###..######..###",
    "##....####....##",
    "##.##.####.##.##",
    "##....####....##",
    "###..######..###",
    "####.##..##.####",
    "#####......#####",
    ".#####.##.#####.",
    ".######..######.",
    "..############..",
    "....########....",
]


def glyph_nt():
    """32×32 'N T' image plus the two letter supports."""
    n = np.zeros((32, 32), dtype=int)
    t = np.zeros((32, 32), dtype=int)
    rows = slice(8, 24)
    n[rows, 4:6] = 1
    n[rows, 12:14] = 1
    for k in range(16):  # diagonal stroke of the N
        col = 4 + round(k * 9 / 15)
        n[8 + k, col : col + 2] = 1
    t[8:10, 18:30] = 1
    t[10:24, 23:25] = 1
    return n, t


def from_art(art):
    return np.array([[1 if ch == "#" else 0 for ch in row] for row in art], dtype=int)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    n, t = glyph_nt()
    write_pgm(OUT / "nt_32x32.pgm", 255 * (n | t), maxval=255)
    write_pgm(OUT / "region_n_32x32.pgm", 255 * n, maxval=255)
    write_pgm(OUT / "region_t_32x32.pgm", 255 * t, maxval=255)

    t_lo = np.zeros((9, 9), dtype=int)
    t_lo[0, :] = 1  # 9-pixel bar
    t_lo[1:, 4] = 1  # 8-pixel stem: 17 lit pixels total
    write_pgm(OUT / "t_lo_9x9.pgm", 255 * t_lo, maxval=255)

    write_pgm(OUT / "cat_face_16x16.pgm", 255 * from_art(CAT_FACE), maxval=255)
    write_pgm(OUT / "uniform_16x16.pgm", np.full((16, 16), 255, dtype=int), maxval=255)
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
