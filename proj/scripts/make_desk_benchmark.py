#!/usr/bin/env python3
"""Builds data/desk: content/style pairs at 512x256 with coarse label maps.

Sources are scikit-image sample photos that are public domain or CC0
(astronaut, rocket, hubble_deep_field: NASA/SpaceX; chelsea, coffee, retina: CC0).
Label maps are deliberately coarse: luminance tertiles of a 32x16 thumbnail,
blown back up with nearest-neighbour so every region is a blocky 16 px patch.
"""
import argparse
import json
from pathlib import Path

import numpy as np
from PIL import Image
from skimage import data

WIDTH, HEIGHT = 512, 256
PAIRS = [
    ("chelsea", "coffee"),
    ("coffee", "rocket"),
    ("rocket", "astronaut"),
    ("astronaut", "chelsea"),
    ("hubble_deep_field", "rocket"),
    ("retina", "coffee"),
]


def crop_resize(rgb: np.ndarray) -> Image.Image:
    h, w = rgb.shape[:2]
    target = WIDTH / HEIGHT
    if w / h > target:
        cw, ch = int(round(h * target)), h
    else:
        cw, ch = w, int(round(w / target))
    y0, x0 = (h - ch) // 2, (w - cw) // 2
    img = Image.fromarray(rgb[y0:y0 + ch, x0:x0 + cw])
    return img.resize((WIDTH, HEIGHT), Image.LANCZOS)


def coarse_labels(img: Image.Image) -> Image.Image:
    thumb = np.asarray(img.convert("L").resize((32, 16), Image.BOX), dtype=np.float64)
    lo, hi = np.quantile(thumb, [1 / 3, 2 / 3])
    levels = np.where(thumb <= lo, 0, np.where(thumb <= hi, 128, 255)).astype(np.uint8)
    return Image.fromarray(levels).resize((WIDTH, HEIGHT), Image.NEAREST)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "desk")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    photos = {}
    for name in sorted({n for pair in PAIRS for n in pair}):
        photos[name] = crop_resize(getattr(data, name)())
        photos[name].save(args.out / f"{name}.png")
        coarse_labels(photos[name]).save(args.out / f"{name}_labels.png")

    manifest = [
        {
            "content": f"{c}.png",
            "style": f"{s}.png",
            "content_labels": f"{c}_labels.png",
            "style_labels": f"{s}_labels.png",
        }
        for c, s in PAIRS
    ]
    (args.out / "pairs.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
