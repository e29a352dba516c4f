"""Label masks, binarization and outer-border extraction.

Border extraction follows the Suzuki-Abe border following procedure with
8-connected foreground and 4-connected background. Hole borders are traced
(so their pixels are marked and never restart a trace) but only outer
borders are returned.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MaskFormatError
from .netpbm import encode_pgm, read_pnm

__all__ = [
    "WATER",
    "SHIP",
    "UNKNOWN",
    "LabelMask",
    "BinaryMask",
    "Contour",
    "binarize",
    "extract_contours",
    "split_vessel_and_obstacles",
    "points_in_dilated_polygon",
    "load_label_mask",
    "save_label_mask",
    "save_binary_mask",
]

WATER, SHIP, UNKNOWN = 0, 1, 2
PGM_VALUES = {0: WATER, 128: SHIP, 255: UNKNOWN}
CLASS_TO_PGM = np.array([0, 128, 255], dtype=np.uint8)

# 8-neighbourhood as (drow, dcol); increasing index is clockwise on screen.
_DIRS = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))
_DIR_INDEX = {d: k for k, d in enumerate(_DIRS)}


@dataclass(frozen=True, eq=False)
class LabelMask:
    """Per-pixel class codes, shape ``(height, width)``."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 2:
            raise MaskFormatError("label mask must be two-dimensional")
        if labels.size and (labels.min() < 0 or labels.max() > 2):
            raise MaskFormatError("label values must be in {0, 1, 2}")
        labels = labels.astype(np.uint8)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    def __eq__(self, other):
        return isinstance(other, LabelMask) and np.array_equal(self.labels, other.labels)


@dataclass(frozen=True, eq=False)
class BinaryMask:
    solid: np.ndarray

    def __post_init__(self):
        solid = np.asarray(self.solid, dtype=bool)
        if solid.ndim != 2:
            raise MaskFormatError("binary mask must be two-dimensional")
        solid.setflags(write=False)
        object.__setattr__(self, "solid", solid)

    @property
    def width(self) -> int:
        return self.solid.shape[1]

    @property
    def height(self) -> int:
        return self.solid.shape[0]


@dataclass(frozen=True, eq=False)
class Contour:
    """Closed 8-connected pixel loop, clockwise as displayed on screen.

    ``points`` is an ``(n, 2)`` integer array of ``(x, y)`` = (column, row).
    Pixels on one-pixel-wide parts appear more than once.
    """

    id: int
    points: np.ndarray
    is_outer: bool = True

    def __len__(self) -> int:
        return len(self.points)

    def area(self) -> float:
        """Shoelace area enclosed by the pixel-centre loop."""
        p = self.points.astype(float)
        x, y = p[:, 0], p[:, 1]
        return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def binarize(mask: LabelMask) -> BinaryMask:
    return BinaryMask(mask.labels != WATER)


def _follow(f: np.ndarray, i: int, j: int, i2: int, j2: int, nbd: int) -> list:
    """Trace one border starting at (i, j) with background neighbour (i2, j2)."""
    d = _DIR_INDEX[(i2 - i, j2 - j)]
    for k in range(8):
        di, dj = _DIRS[(d + k) % 8]
        if f[i + di, j + dj] != 0:
            i1, j1 = i + di, j + dj
            break
    else:
        f[i, j] = -nbd
        return [(i, j)]

    path = []
    i2, j2 = i1, j1
    i3, j3 = i, j
    while True:
        path.append((i3, j3))
        d = _DIR_INDEX[(i2 - i3, j2 - j3)]
        east_zero_examined = False
        for k in range(1, 9):
            dd = (d - k) % 8
            di, dj = _DIRS[dd]
            if f[i3 + di, j3 + dj] != 0:
                i4, j4 = i3 + di, j3 + dj
                break
            if dd == 0:
                east_zero_examined = True
        if east_zero_examined:
            f[i3, j3] = -nbd
        elif f[i3, j3] == 1:
            f[i3, j3] = nbd
        if (i4, j4) == (i, j) and (i3, j3) == (i1, j1):
            return path
        i2, j2 = i3, j3
        i3, j3 = i4, j4


def extract_contours(mask: BinaryMask) -> list[Contour]:
    """Outer border of every 8-connected solid component, in raster discovery order."""
    h, w = mask.solid.shape
    f = np.zeros((h + 2, w + 2), dtype=np.int32)
    f[1:-1, 1:-1] = mask.solid
    # Only pixels with background on the left or right can start a border.
    nz = f != 0
    left_zero = np.zeros_like(nz)
    right_zero = np.zeros_like(nz)
    left_zero[:, 1:] = ~nz[:, :-1]
    right_zero[:, :-1] = ~nz[:, 1:]
    rows, cols = np.nonzero(nz & (left_zero | right_zero))

    contours: list[Contour] = []
    nbd = 1
    for i, j in zip(rows.tolist(), cols.tolist()):
        if f[i, j] == 1 and f[i, j - 1] == 0:
            nbd += 1
            path = _follow(f, i, j, i, j - 1, nbd)
            # Trace runs counterclockwise on screen; reverse keeping the start.
            pts = np.array([path[0]] + path[:0:-1], dtype=np.int64)
            pts = pts[:, ::-1] - 1
            contours.append(Contour(len(contours), pts, True))
        elif f[i, j] >= 1 and f[i, j + 1] == 0:
            nbd += 1
            _follow(f, i, j, i, j + 1, nbd)
    return contours


def _segment_arrays(segments):
    a = np.array([s.a for s in segments], dtype=float)
    b = np.array([s.b for s in segments], dtype=float)
    n = np.array([s.outward_normal for s in segments], dtype=float)
    return a, b, n


def points_in_dilated_polygon(points, segments, dilation: float) -> np.ndarray:
    """Membership of points in a convex image polygon grown by ``dilation`` px."""
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    a, b, n = _segment_arrays(segments)
    rel = p[:, None, :] - a[None, :, :]
    signed = np.einsum("psk,sk->ps", rel, n)
    inside = np.all(signed <= 0.0, axis=1)
    ab = b - a
    t = np.clip(np.einsum("psk,sk->ps", rel, ab) / np.einsum("sk,sk->s", ab, ab), 0.0, 1.0)
    closest = a[None, :, :] + t[..., None] * ab[None, :, :]
    dist = np.min(np.linalg.norm(p[:, None, :] - closest, axis=2), axis=1)
    return inside | (dist <= dilation)


def split_vessel_and_obstacles(
    contours,
    projected_hull,
    image_dims=None,
    threshold: float = 0.5,
    dilation: float = 3.0,
):
    """Separate the vessel's own blob(s) from obstacle blobs.

    A contour belongs to the vessel when at least ``threshold`` of its points
    fall inside the projected hull polygon dilated by ``dilation`` pixels.
    ``image_dims`` is accepted for interface symmetry; the test itself does
    not depend on the image size.

    Returns ``(vessel_ids, obstacle_contours, warnings)``.
    """
    vessel_ids: list[int] = []
    obstacles: list[Contour] = []
    for c in contours:
        inside = points_in_dilated_polygon(c.points, projected_hull, dilation)
        if inside.mean() >= threshold:
            vessel_ids.append(c.id)
        else:
            obstacles.append(c)
    warnings = []
    if not vessel_ids:
        warnings.append("vessel-not-found: no contour matches the projected hull")
    return vessel_ids, obstacles, warnings


def load_label_mask(source) -> LabelMask:
    """Read a P5 label mask with palette {0: water, 128: ship, 255: unknown}."""
    raw = read_pnm(source)
    if raw.ndim != 2:
        raise MaskFormatError("label mask must be a P5 (greyscale) image")
    bad = ~np.isin(raw, list(PGM_VALUES))
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise MaskFormatError(f"pixel ({c}, {r}) has value {raw[r, c]}; allowed are 0, 128, 255")
    lut = np.zeros(256, dtype=np.uint8)
    for value, cls in PGM_VALUES.items():
        lut[value] = cls
    return LabelMask(lut[raw])


def save_label_mask(path, mask: LabelMask) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_pgm(CLASS_TO_PGM[mask.labels]))


def save_binary_mask(path, mask: BinaryMask) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_pgm(mask.solid.astype(np.uint8) * 255))
