#!/usr/bin/env python3
"""Convert the digits shipped in the npm `mnist` package into IDX files.

Usage:
    npm install mnist            # in some scratch directory
    python3 scripts/mnist_from_npm.py <scratch>/node_modules/mnist/src/digits data/mnist

The package stores each digit class as a flat JSON array of 784-float images
scaled to [0, 1] with three decimals. Pixels are mapped back to bytes with
round(v * 255). The first 80% of every class goes to the training split and the
rest to the test split; both splits are interleaved with a fixed permutation.
"""
import json
import random
import struct
import sys
from pathlib import Path


def write_idx(path, magic, dims, payload):
    with open(path, "wb") as f:
        f.write(struct.pack(">I", magic))
        for d in dims:
            f.write(struct.pack(">I", d))
        f.write(bytes(payload))


def main():
    src, dst = Path(sys.argv[1]), Path(sys.argv[2])
    dst.mkdir(parents=True, exist_ok=True)
    train, test = [], []
    for digit in range(10):
        flat = json.loads((src / f"{digit}.json").read_text())["data"]
        images = [flat[i:i + 784] for i in range(0, len(flat), 784)]
        cut = int(len(images) * 0.8)
        train += [(img, digit) for img in images[:cut]]
        test += [(img, digit) for img in images[cut:]]
    rng = random.Random(20230101)
    for name, rows in (("train", train), ("t10k", test)):
        rng.shuffle(rows)
        pixels = [min(255, max(0, round(v * 255))) for img, _ in rows for v in img]
        write_idx(dst / f"{name}-images-idx3-ubyte", 0x00000803, [len(rows), 28, 28], pixels)
        write_idx(dst / f"{name}-labels-idx1-ubyte", 0x00000801, [len(rows)], [d for _, d in rows])
        print(f"{name}: {len(rows)} samples")


if __name__ == "__main__":
    main()
