"""Palette-based PNG encoding of label maps, plus grayscale exports."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .labels import LabelMap


class LabelImageError(ValueError):
    """A label image could not be read or does not match its palette."""


class PaletteError(LabelImageError):
    pass


@dataclass(frozen=True)
class Palette:
    """Bijective class-id <-> RGB mapping.

    ``ignore_id``/``ignore_color`` describe the optional reserved entry for
    unlabelled pixels; it is not counted as a class.
    """

    colors: dict[int, tuple[int, int, int]]
    names: dict[int, str] = field(default_factory=dict)
    ignore_id: int | None = None
    ignore_color: tuple[int, int, int] | None = None

    def __post_init__(self):
        seen: dict[tuple[int, int, int], int] = {}
        entries = dict(self.colors)
        if self.ignore_id is not None:
            if self.ignore_color is None:
                raise PaletteError("ignore_id given without ignore_color")
            if self.ignore_id in entries:
                raise PaletteError(f"ignore id {self.ignore_id} also used by a class")
            entries[self.ignore_id] = self.ignore_color
        for cid, rgb in entries.items():
            if cid < 0 or cid > 255:
                raise PaletteError(f"class id {cid} outside 0..255")
            rgb = tuple(int(v) for v in rgb)
            if len(rgb) != 3 or not all(0 <= v <= 255 for v in rgb):
                raise PaletteError(f"bad color {rgb} for id {cid}")
            if rgb in seen:
                raise PaletteError(f"ids {seen[rgb]} and {cid} share color {rgb}")
            seen[rgb] = cid

    @property
    def num_classes(self) -> int:
        return max(self.colors) + 1 if self.colors else 0

    def name(self, class_id: int) -> str:
        return self.names.get(class_id, str(class_id))

    def _lookup(self) -> tuple[np.ndarray, np.ndarray]:
        items = sorted(self.colors.items())
        if self.ignore_id is not None:
            items.append((self.ignore_id, self.ignore_color))
        keys = np.array([_pack(np.array(rgb)) for _, rgb in items], dtype=np.int64)
        ids = np.array([cid for cid, _ in items], dtype=np.int64)
        order = np.argsort(keys)
        return keys[order], ids[order]

    @classmethod
    def from_json(cls, text: str) -> Palette:
        try:
            entries = json.loads(text)
        except json.JSONDecodeError as e:
            raise PaletteError(f"palette is not valid JSON: {e}") from None
        if not isinstance(entries, list):
            raise PaletteError("palette JSON must be an array of entries")
        colors, names = {}, {}
        ignore_id = ignore_color = None
        for e in entries:
            try:
                cid = int(e["id"])
                rgb = tuple(int(v) for v in e["rgb"])
            except (KeyError, TypeError, ValueError):
                raise PaletteError(f"malformed palette entry {e!r}") from None
            if e.get("ignore"):
                if ignore_id is not None:
                    raise PaletteError("more than one ignore entry")
                ignore_id, ignore_color = cid, rgb
            else:
                if cid in colors:
                    raise PaletteError(f"duplicate id {cid}")
                colors[cid] = rgb
            if "name" in e:
                names[cid] = str(e["name"])
        return cls(colors, names, ignore_id, ignore_color)

    @classmethod
    def load(cls, path: str | Path) -> Palette:
        return cls.from_json(Path(path).read_text())

    def to_json(self) -> str:
        entries = []
        for cid, rgb in sorted(self.colors.items()):
            entries.append({"id": cid, "name": self.name(cid), "rgb": list(rgb)})
        if self.ignore_id is not None:
            entries.append(
                {"id": self.ignore_id, "name": self.name(self.ignore_id),
                 "rgb": list(self.ignore_color), "ignore": True}
            )
        return json.dumps(entries, indent=1) + "\n"


# KITTI / Cityscapes colour convention for the classes the benchmark uses.
KITTI_PALETTE = Palette(
    colors={
        0: (128, 64, 128),   # road
        1: (244, 35, 232),   # sidewalk
        2: (70, 70, 70),     # building
        3: (107, 142, 35),   # vegetation
        4: (70, 130, 180),   # sky
        5: (220, 20, 60),    # person
        6: (0, 0, 142),      # car
    },
    names={0: "road", 1: "sidewalk", 2: "building", 3: "vegetation",
           4: "sky", 5: "person", 6: "car", 255: "unlabeled"},
    ignore_id=255,
    ignore_color=(0, 0, 0),
)


def _pack(rgb: np.ndarray) -> np.ndarray:
    rgb = rgb.astype(np.int64)
    return (rgb[..., 0] << 16) | (rgb[..., 1] << 8) | rgb[..., 2]


def read_rgb(image_bytes: bytes) -> np.ndarray:
    """Decode PNG bytes to an (H, W, 3) uint8 array."""
    try:
        img = Image.open(io.BytesIO(image_bytes))
        img.load()
    except (UnidentifiedImageError, OSError, SyntaxError) as e:
        raise LabelImageError(f"cannot decode image: {e}") from None
    if img.mode in ("RGBA", "LA") or (img.mode == "P" and "transparency" in img.info):
        img = img.convert("RGBA")
        if (np.asarray(img)[..., 3] != 255).any():
            raise LabelImageError("label images must be fully opaque")
    if img.mode not in ("RGB", "P", "RGBA"):
        raise LabelImageError(f"expected an RGB or indexed image, got mode {img.mode}")
    return np.asarray(img.convert("RGB"))


def decode_label_image(image_bytes: bytes, palette: Palette) -> LabelMap:
    rgb = read_rgb(image_bytes)
    packed = _pack(rgb)
    keys, ids = palette._lookup()
    pos = np.searchsorted(keys, packed).clip(0, len(keys) - 1)
    found = keys[pos] == packed
    if not found.all():
        y, x = np.argwhere(~found)[0]
        raise PaletteError(f"pixel (x={x}, y={y}) has color {tuple(int(v) for v in rgb[y, x])} not in palette")
    return LabelMap(ids[pos], max(palette.num_classes, 1), palette.ignore_id)


def encode_label_image(lmap: LabelMap, palette: Palette) -> bytes:
    """Lossless RGB PNG of ``lmap``; decoding it returns an equal map."""
    table = np.zeros((256, 3), dtype=np.uint8)
    known = np.zeros(256, dtype=bool)
    for cid, rgb in palette.colors.items():
        table[cid] = rgb
        known[cid] = True
    if palette.ignore_id is not None:
        table[palette.ignore_id] = palette.ignore_color
        known[palette.ignore_id] = True
    labels = lmap.labels
    if labels.max() > 255 or not known[labels].all():
        missing = sorted(set(np.unique(labels).tolist()) - {i for i in range(256) if known[i]})
        raise PaletteError(f"class ids {missing} have no palette entry")
    return png_bytes(table[labels])


def png_bytes(pixels: np.ndarray) -> bytes:
    # uint8 (H, W) -> L, uint8 (H, W, 3) -> RGB, uint16 (H, W) -> I;16
    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(pixels)).save(buf, format="PNG", compress_level=6)
    return buf.getvalue()


def grayscale_png(values: np.ndarray, bits: int = 8) -> bytes:
    """Quantise values in [0, 1] to an 8- or 16-bit grayscale PNG."""
    if bits == 8:
        return png_bytes(np.rint(np.clip(values, 0, 1) * 255).astype(np.uint8))
    if bits == 16:
        q = np.rint(np.clip(values, 0, 1) * 65535).astype(np.uint16)
        return png_bytes(q)
    raise ValueError("bits must be 8 or 16")
