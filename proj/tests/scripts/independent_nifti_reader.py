#!/usr/bin/env python3
"""Minimal NIfTI-1 reader built on struct, used to check files written by vlsm.

Usage:
  independent_nifti_reader.py VLSM_BINARY CONFIG_JSON
      Runs `vlsm synth` into a temp dir, then checks the emitted masks and a
      handcrafted fixture against the config's grid.
  independent_nifti_reader.py --check-file PATH NX NY NZ SX SY SZ
      Checks one file's dims and spacing.
"""
import gzip
import json
import os
import struct
import subprocess
import sys
import tempfile

DTYPES = {2: ("B", 1), 4: ("h", 2), 16: ("f", 4)}


def read_nifti(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if path.endswith(".gz"):
        raw = gzip.decompress(raw)
    if len(raw) < 348:
        raise ValueError(f"{path}: truncated header")
    endian = "<"
    if struct.unpack("<i", raw[0:4])[0] != 348:
        endian = ">"
        if struct.unpack(">i", raw[0:4])[0] != 348:
            raise ValueError(f"{path}: sizeof_hdr is not 348")
    if raw[344:348] not in (b"n+1\x00", b"ni1\x00"):
        raise ValueError(f"{path}: bad magic {raw[344:348]!r}")
    dim = struct.unpack(endian + "8h", raw[40:56])
    datatype, bitpix = struct.unpack(endian + "2h", raw[70:74])
    pixdim = struct.unpack(endian + "8f", raw[76:108])
    vox_offset = int(struct.unpack(endian + "f", raw[108:112])[0])
    if dim[0] < 1 or dim[0] > 3:
        raise ValueError(f"{path}: expected a 3D volume, dim[0] = {dim[0]}")
    dims = [dim[i] if i <= dim[0] else 1 for i in (1, 2, 3)]
    code, size = DTYPES[datatype]
    if bitpix != 8 * size:
        raise ValueError(f"{path}: bitpix {bitpix} does not match datatype {datatype}")
    count = dims[0] * dims[1] * dims[2]
    body = raw[vox_offset:vox_offset + count * size]
    if len(body) != count * size:
        raise ValueError(f"{path}: image data truncated")
    data = struct.unpack(endian + str(count) + code, body)
    return {"dims": dims, "spacing": [pixdim[1], pixdim[2], pixdim[3]], "datatype": datatype, "data": data}


def check(path, dims, spacing):
    img = read_nifti(path)
    if img["dims"] != list(dims):
        raise AssertionError(f"{path}: dims {img['dims']} != {list(dims)}")
    for got, want in zip(img["spacing"], spacing):
        if abs(got - want) > 1e-6:
            raise AssertionError(f"{path}: spacing {img['spacing']} != {list(spacing)}")
    return img


def handcrafted_fixture(path):
    header = bytearray(352)
    struct.pack_into("<i", header, 0, 348)
    struct.pack_into("<8h", header, 40, 3, 3, 2, 2, 1, 1, 1, 1)
    struct.pack_into("<2h", header, 70, 2, 8)
    struct.pack_into("<8f", header, 76, 1.0, 0.5, 1.5, 4.0, 1.0, 1.0, 1.0, 1.0)
    struct.pack_into("<f", header, 108, 352.0)
    struct.pack_into("<f", header, 112, 1.0)
    header[344:348] = b"n+1\x00"
    voxels = bytes([1, 0, 1, 0, 0, 1, 1, 1, 0, 0, 0, 1])
    with open(path, "wb") as fh:
        fh.write(bytes(header) + voxels)
    return voxels


def main(argv):
    if len(argv) == 8 and argv[0] == "--check-file":
        check(argv[1], [int(v) for v in argv[2:5]], [float(v) for v in argv[5:8]])
        print(f"ok {argv[1]}")
        return 0
    if len(argv) != 2:
        print(__doc__, file=sys.stderr)
        return 2
    binary, config_path = argv
    with open(config_path) as fh:
        synth = json.load(fh)["synth"]
    dims, spacing = synth["dims"], synth["spacing"]
    lo, hi = synth["roi_lo"], synth["roi_hi"]
    roi_voxels = 1
    for a, b in zip(lo, hi):
        roi_voxels *= b - a + 1
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "cohort")
        subprocess.run([binary, "synth", "--config", config_path, "--out", out], check=True,
                       stdout=subprocess.DEVNULL)
        roi = check(os.path.join(out, "roi.nii"), dims, spacing)
        if sum(roi["data"]) != roi_voxels:
            raise AssertionError(f"roi has {sum(roi['data'])} voxels, expected {roi_voxels}")
        # x varies fastest: the first ROI voxel sits at roi_lo.
        first = roi["data"].index(1)
        if first != lo[0] + dims[0] * (lo[1] + dims[1] * lo[2]):
            raise AssertionError("roi voxel order does not match x-fastest layout")
        brain = check(os.path.join(out, "brain_mask.nii"), dims, spacing)
        masks = sorted(os.listdir(os.path.join(out, "masks")))
        for name in masks:
            m = check(os.path.join(out, "masks", name), dims, spacing)
            if any(v and not b for v, b in zip(m["data"], brain["data"])):
                raise AssertionError(f"{name}: lesion outside brain mask")
        voxels = handcrafted_fixture(os.path.join(tmp, "fixture.nii"))
        fixture = check(os.path.join(tmp, "fixture.nii"), [3, 2, 2], [0.5, 1.5, 4.0])
        if bytes(fixture["data"]) != voxels:
            raise AssertionError("handcrafted fixture data mismatch")
    print(f"ok: roi, brain mask and {len(masks)} lesion masks match dims {dims} spacing {spacing}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
