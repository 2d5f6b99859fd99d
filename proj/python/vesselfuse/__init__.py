"""AIS/video vessel trajectory fusion engine."""

from ._core import (  # noqa: F401
    __version__,
    brute_force_assignment,
    direction_angle,
    dtw_exact,
    e_fastdtw,
    evaluate,
    fastdtw,
    forward_geodetic,
    fuse,
    id_scores,
    inverse_geodetic,
    mercator,
    mofa,
    mofp,
    mota,
    precision_recall,
    preset_names,
    simulate,
    solve_assignment,
)

__all__ = [
    "__version__",
    "brute_force_assignment",
    "direction_angle",
    "dtw_exact",
    "e_fastdtw",
    "evaluate",
    "fastdtw",
    "forward_geodetic",
    "fuse",
    "id_scores",
    "inverse_geodetic",
    "mercator",
    "mofa",
    "mofp",
    "mota",
    "precision_recall",
    "preset_names",
    "simulate",
    "solve_assignment",
]
