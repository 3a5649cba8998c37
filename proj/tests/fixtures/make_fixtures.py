#!/usr/bin/env python3
"""Writes the committed binary fixtures with explicit little-endian packing.

Run from this directory: python3 make_fixtures.py
"""
import struct

EMB_MAGIC = b"SDEC"
CKPT_MAGIC = b"SDCK"


def header(kind, count, dim):
    return EMB_MAGIC + struct.pack("<HBII", 1, kind, count, dim)


def vectors():
    rows = [[0.5, -1.25, 3.0], [0.0, 1024.0, -0.125]]
    out = header(0, 2, 3)
    for r in rows:
        out += struct.pack("<3f", *r)
    return out


def sequences():
    seqs = [[[1.0, 2.0], [3.0, -4.0], [0.25, 0.75]], [[-8.0, 16.0]]]
    out = header(1, 2, 2)
    for s in seqs:
        out += struct.pack("<I", len(s))
        for tok in s:
            out += struct.pack("<2f", *tok)
    return out


def checkpoint():
    # dims [2, 1]: encoder 1x2 weights + 1 bias, decoder 2x1 weights + 2 biases
    out = CKPT_MAGIC + struct.pack("<HQ", 1, 0x0123456789ABCDEF)
    out += struct.pack("<I2I", 2, 2, 1)
    out += struct.pack("<3d", 0.5, -0.25, 0.1)
    out += struct.pack("<4d", 2.0, -1.0, 0.0, 0.125)
    # cluster model: k = 2, dz = 1, alpha = 1
    out += struct.pack("<B", 1)
    out += struct.pack("<II", 2, 1)
    out += struct.pack("<d", 1.0)
    out += struct.pack("<2d", -1.5, 1.5)
    return out


def main():
    for name, data in [("vectors_v1.sdec", vectors()), ("sequences_v1.sdec", sequences()),
                       ("model_v1.ckpt", checkpoint())]:
        with open(name, "wb") as f:
            f.write(data)
    with open("labels_v1.csv", "w", newline="\n") as f:
        f.write("label\n1\n0\n")


if __name__ == "__main__":
    main()
