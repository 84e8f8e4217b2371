"""Access to the bundled PGM mask fixtures."""

from __future__ import annotations

import importlib.resources


def bundled_mask_path(name: str) -> str:
    """Filesystem path of a bundled mask, e.g. ``nt_32x32`` or ``t_lo_9x9``.

    Bundled names: nt_32x32, region_n_32x32, region_t_32x32, t_lo_9x9,
    cat_face_16x16, uniform_16x16.
    """
    if not name.endswith(".pgm"):
        name = name + ".pgm"
    path = importlib.resources.files("twinbeam").joinpath("data", name)
    if not path.is_file():
        raise FileNotFoundError(f"no bundled mask named {name!r}")
    return str(path)
