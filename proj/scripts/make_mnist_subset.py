#!/usr/bin/env python3
# Copyright 2026 The CADP Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes a stratified MNIST train/test subset as IDX file pairs.

The repository does not ship image data. By default the images come from the
5000-sample MNIST extract bundled with the `mlxtend` package; `--source-idx`
accepts the official IDX files instead (images path, labels path).

Output (in --out):
  train-images-idx3-ubyte  train-labels-idx1-ubyte
  test-images-idx3-ubyte   test-labels-idx1-ubyte
"""

import argparse
import gzip
import os
import struct
import sys

import numpy as np


def _read_idx(path):
    with open(path, "rb") as f:
        data = f.read()
    magic, = struct.unpack(">I", data[:4])
    ndim = magic & 0xFF
    dims = struct.unpack(">" + "I" * ndim, data[4:4 + 4 * ndim])
    payload = np.frombuffer(data, dtype=np.uint8, offset=4 + 4 * ndim)
    return payload.reshape(dims)


def _load_mlxtend():
    try:
        import mlxtend
    except ImportError:
        return None
    path = os.path.join(os.path.dirname(mlxtend.__file__), "data", "data",
                        "mnist_5k.csv.gz")
    if not os.path.exists(path):
        return None
    with gzip.open(path, "rt") as f:
        table = np.loadtxt(f, delimiter=",", dtype=np.int64)
    return table[:, :-1].astype(np.uint8), table[:, -1].astype(np.uint8)


def _write_images(path, images):
    n = images.shape[0]
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, n, 28, 28))
        f.write(images.astype(np.uint8).tobytes())


def _write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, labels.shape[0]))
        f.write(labels.astype(np.uint8).tobytes())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True)
    parser.add_argument("--train", type=int, default=1000)
    parser.add_argument("--test", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--source-idx", nargs=2, metavar=("IMAGES", "LABELS"))
    args = parser.parse_args()

    if args.source_idx:
        images = _read_idx(args.source_idx[0]).reshape(-1, 784)
        labels = _read_idx(args.source_idx[1])
    else:
        loaded = _load_mlxtend()
        if loaded is None:
            print("no MNIST source: install mlxtend or pass --source-idx",
                  file=sys.stderr)
            return 1
        images, labels = loaded

    classes = 10
    if args.train % classes or args.test % classes:
        print("--train and --test must be multiples of 10", file=sys.stderr)
        return 2
    rng = np.random.RandomState(args.seed)
    train_idx, test_idx = [], []
    for k in range(classes):
        idx = np.flatnonzero(labels == k)
        rng.shuffle(idx)
        need = args.train // classes + args.test // classes
        if idx.size < need:
            print(f"class {k}: only {idx.size} samples", file=sys.stderr)
            return 2
        train_idx.extend(idx[:args.train // classes])
        test_idx.extend(idx[args.train // classes:need])
    train_idx = np.array(train_idx)
    test_idx = np.array(test_idx)
    rng.shuffle(train_idx)
    rng.shuffle(test_idx)

    os.makedirs(args.out, exist_ok=True)
    _write_images(os.path.join(args.out, "train-images-idx3-ubyte"),
                  images[train_idx])
    _write_labels(os.path.join(args.out, "train-labels-idx1-ubyte"),
                  labels[train_idx])
    _write_images(os.path.join(args.out, "test-images-idx3-ubyte"),
                  images[test_idx])
    _write_labels(os.path.join(args.out, "test-labels-idx1-ubyte"),
                  labels[test_idx])
    return 0


if __name__ == "__main__":
    sys.exit(main())
