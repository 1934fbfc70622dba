#!/usr/bin/env python3
"""Build the desk-scale MNIST subset used by the `desk-mnist` preset.

Source: the `mnist` npm package (10,000 MNIST digits stored as JSON arrays of
pixel intensities in [0, 1]). Fetch it with `npm pack mnist@1.1.0` and unpack,
then run:

    python3 scripts/make_desk_mnist.py path/to/package/src/digits data/desk-mnist

Writes big-endian IDX files (magic 0x00000803 / 0x00000801) for a seeded,
class-interleaved 2000-sample train split and 500-sample test split.
"""
import json
import random
import struct
import sys
from pathlib import Path

TRAIN, TEST, SEED = 2000, 500, 7


def write_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main():
    src, out = Path(sys.argv[1]), Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    samples = []
    for digit in range(10):
        data = json.loads((src / f"{digit}.json").read_text())["data"]
        for i in range(0, len(data), 784):
            pixels = [min(255, max(0, round(v * 255))) for v in data[i : i + 784]]
            samples.append((pixels, digit))
    random.Random(SEED).shuffle(samples)
    train, test = samples[:TRAIN], samples[TRAIN : TRAIN + TEST]
    write_images(out / "train-images.idx", [s[0] for s in train])
    write_labels(out / "train-labels.idx", [s[1] for s in train])
    write_images(out / "test-images.idx", [s[0] for s in test])
    write_labels(out / "test-labels.idx", [s[1] for s in test])


if __name__ == "__main__":
    main()
