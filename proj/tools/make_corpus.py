#!/usr/bin/env python3
"""Build the HDR test corpus under tests/data/corpus.

Scene-referred radiance is reconstructed from the scikit-image sample photos
by inverting the sRGB transfer curve and re-expanding the compressed
highlights and shadows, so each image spans roughly four decades. Two
procedural scenes with hard light sources complete the set. Output is
deterministic for a given scikit-image release.
"""

import argparse
import pathlib

import numpy as np
import skimage
from skimage import data, io, transform

WIDTH, HEIGHT = 320, 240


def srgb_to_linear(v):
    v = np.clip(v, 0.0, 1.0)
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def as_rgb(img):
    img = skimage.img_as_float(img)
    if img.ndim == 2:
        img = np.stack([img] * 3, axis=-1)
    return img[..., :3]


def fit(img):
    """Centre-crop to 4:3 and resize to the corpus size."""
    h, w = img.shape[:2]
    target = WIDTH / HEIGHT
    if w / h > target:
        nw = int(round(h * target))
        x0 = (w - nw) // 2
        img = img[:, x0:x0 + nw]
    else:
        nh = int(round(w / target))
        y0 = (h - nh) // 2
        img = img[y0:y0 + nh]
    return transform.resize(img, (HEIGHT, WIDTH), anti_aliasing=True)


def expand_range(rgb, highlight_gain, gamma=1.6, floor=2e-4):
    """Stretch a display-referred photo into a scene-referred radiance map."""
    lin = srgb_to_linear(rgb)
    y = 0.2126 * lin[..., 0] + 0.7152 * lin[..., 1] + 0.0722 * lin[..., 2]
    y = np.maximum(y, 1e-6)
    y_new = y ** gamma
    knee = np.clip((y - 0.6) / 0.4, 0.0, 1.0)
    y_new *= 1.0 + (highlight_gain - 1.0) * knee ** 2
    y_new = np.maximum(y_new, floor)
    return lin * (y_new / y)[..., None]


def window_scene(rng):
    """Dim interior with a bright window and a lamp."""
    yy, xx = np.mgrid[0:HEIGHT, 0:WIDTH].astype(float)
    base = 0.02 + 0.01 * (xx / WIDTH) + 0.004 * rng.standard_normal((HEIGHT, WIDTH))
    texture = 1.0 + 0.3 * np.sin(xx / 5.0) * np.sin(yy / 7.0)
    room = np.stack([base * texture * 1.1, base * texture, base * texture * 0.8], -1)
    win = (xx > 180) & (xx < 290) & (yy > 30) & (yy < 150)
    frame = win & ((np.abs(xx - 235) < 3) | (np.abs(yy - 90) < 3))
    sky = np.stack([np.full_like(xx, 40.0), np.full_like(xx, 55.0),
                    np.full_like(xx, 80.0)], -1)
    sky *= (1.0 + 0.2 * np.sin(xx / 11.0))[..., None]
    room[win & ~frame] = sky[win & ~frame]
    lamp = (xx - 70) ** 2 + (yy - 60) ** 2
    room += (8.0 * np.exp(-lamp / 60.0))[..., None] * np.array([1.0, 0.85, 0.6])
    table = (yy > 170) & (xx > 30) & (xx < 160)
    room[table] *= np.array([2.0, 1.5, 1.0])
    return np.maximum(room, 1e-4)


def sunset_scene(rng):
    """Sky gradient with a sun disc over a textured dark foreground."""
    yy, xx = np.mgrid[0:HEIGHT, 0:WIDTH].astype(float)
    t = yy / HEIGHT
    sky = np.stack([2.0 + 6.0 * t, 1.5 + 2.0 * t, 3.0 - 1.5 * t], -1)
    sun = (xx - 220) ** 2 + (yy - 80) ** 2
    sky += (500.0 * np.exp(-sun / 40.0) + 20.0 * np.exp(-sun / 900.0))[..., None] \
        * np.array([1.0, 0.8, 0.5])
    ridge = 150 + 15 * np.sin(xx / 23.0) + 8 * np.sin(xx / 7.0)
    ground = yy > ridge
    grain = 0.01 * (1.0 + 0.5 * rng.random((HEIGHT, WIDTH)))
    trees = 1.0 + 0.8 * (np.sin(xx / 3.0) * np.cos(yy / 4.0) > 0.3)
    sky[ground] = (np.stack([grain, grain * 0.9, grain * 0.7], -1) * trees[..., None])[ground]
    return np.maximum(sky, 1e-4)


def write_rgbe(path, rgb):
    h, w, _ = rgb.shape
    peak = rgb.max(axis=-1)
    mant, expo = np.frexp(peak)
    scale = np.where(peak > 1e-32, mant * 256.0 / np.maximum(peak, 1e-300), 0.0)
    out = np.zeros((h, w, 4), dtype=np.uint8)
    out[..., :3] = np.clip(np.floor(rgb * scale[..., None]), 0, 255)
    out[..., 3] = np.where(peak > 1e-32, expo + 128, 0)
    with open(path, "wb") as f:
        f.write(b"#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n")
        f.write(f"-Y {h} +X {w}\n".encode())
        f.write(out.tobytes())


def write_pfm(path, rgb):
    h, w, _ = rgb.shape
    with open(path, "wb") as f:
        f.write(f"PF\n{w} {h}\n-1.0\n".encode())
        f.write(np.ascontiguousarray(rgb[::-1], dtype="<f4").tobytes())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="tests/data/corpus")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    root = pathlib.Path(data.__file__).parent

    photos = {
        "astronaut": (data.astronaut(), 30.0),
        "coffee": (data.coffee(), 25.0),
        "chelsea": (data.chelsea(), 15.0),
        "rocket": (data.rocket(), 40.0),
        "motorcycle": (io.imread(root / "motorcycle_left.png"), 20.0),
        "camera": (data.camera(), 30.0),
        "coins": (data.coins(), 20.0),
        "hubble": (data.hubble_deep_field(), 60.0),
        "retina": (data.retina(), 50.0),
        "brick": (data.brick(), 10.0),
    }
    for name, (img, gain) in photos.items():
        write_rgbe(out / f"{name}.hdr", expand_range(fit(as_rgb(img)), gain))

    rng = np.random.default_rng(20240611)
    write_rgbe(out / "window.hdr", window_scene(rng))
    write_pfm(out / "sunset.pfm", sunset_scene(rng))


if __name__ == "__main__":
    main()
