"""Binary PLY input/output for splat sets.

Field layout (element "vertex", all float32, binary little-endian):
x, y, z, f_dc_0..2, f_rest_0..(3*((L+1)^2-1)-1), opacity (logit),
scale_0..2 (log), rot_0..3 (quaternion w,x,y,z, unnormalized allowed).
f_rest is channel-major: all higher-order coefficients of R, then G, then B,
matching published splat assets.
"""
from __future__ import annotations

import os

import numpy as np

from ..errors import DataError, FormatError
from .types import SplatSet

_FIXED_FIELDS = ["x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2"]
_TAIL_FIELDS = ["opacity", "scale_0", "scale_1", "scale_2",
                "rot_0", "rot_1", "rot_2", "rot_3"]
_REST_COUNTS = {0: 0, 1: 9, 2: 24, 3: 45}  # 3 * ((L+1)^2 - 1)


def _expected_fields(degree: int) -> list[str]:
    rest = [f"f_rest_{i}" for i in range(_REST_COUNTS[degree])]
    return _FIXED_FIELDS + rest + _TAIL_FIELDS


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _logit(p: np.ndarray) -> np.ndarray:
    return np.log(p) - np.log1p(-p)


def _parse_header(fh) -> tuple[list[str], int, int]:
    """Returns (property names, vertex count, header byte length)."""
    magic = fh.readline()
    if magic.strip() != b"ply":
        raise FormatError("not a PLY file (missing 'ply' magic)")
    fmt = fh.readline().strip()
    if fmt != b"format binary_little_endian 1.0":
        raise FormatError("expected 'format binary_little_endian 1.0'")
    props: list[str] = []
    count = None
    while True:
        line = fh.readline()
        if not line:
            raise FormatError("unterminated PLY header")
        parts = line.strip().decode("ascii", "replace").split()
        if not parts or parts[0] == "comment":
            continue
        if parts[0] == "end_header":
            break
        if parts[0] == "element":
            if parts[1] != "vertex" or count is not None:
                raise FormatError(f"unexpected element '{parts[1]}'")
            count = int(parts[2])
        elif parts[0] == "property":
            if count is None:
                raise FormatError("property declared before element vertex")
            if parts[1] != "float":
                raise FormatError(f"property '{parts[-1]}' must be float")
            props.append(parts[2])
        else:
            raise FormatError(f"unrecognized header line '{parts[0]}'")
    if count is None:
        raise FormatError("missing element vertex")
    return props, count, fh.tell()


def load_splats(path: str | os.PathLike) -> SplatSet:
    """Load a splat set, mapping stored logits/logs back to natural ranges."""
    with open(path, "rb") as fh:
        props, count, offset = _parse_header(fh)
        fh.seek(offset)
        payload = fh.read()

    n_rest = sum(1 for p in props if p.startswith("f_rest_"))
    degree = next((d for d, c in _REST_COUNTS.items() if c == n_rest), None)
    if degree is None:
        raise FormatError(f"f_rest field count {n_rest} does not match any SH degree 0..3")
    expected = _expected_fields(degree)
    for name in expected:
        if name not in props:
            raise FormatError(f"missing required field '{name}'")
    for name in props:
        if name not in expected:
            raise FormatError(f"unexpected field '{name}'")

    dtype = np.dtype([(p, "<f4") for p in props])
    if len(payload) != count * dtype.itemsize:
        raise FormatError(f"payload holds {len(payload)} bytes, "
                          f"expected {count * dtype.itemsize}")
    records = np.frombuffer(payload, dtype=dtype, count=count)

    table = np.stack([records[p].astype(np.float64) for p in expected], axis=1) \
        if count else np.zeros((0, len(expected)))
    bad = ~np.isfinite(table)
    if bad.any():
        row = int(np.nonzero(bad.any(axis=1))[0][0])
        raise DataError(f"non-finite value in record {row}")

    cols = {p: table[:, i] for i, p in enumerate(expected)}
    dim = (degree + 1) ** 2
    sh = np.zeros((count, 3, dim))
    for ch in range(3):
        sh[:, ch, 0] = cols[f"f_dc_{ch}"]
        for j in range(dim - 1):
            sh[:, ch, 1 + j] = cols[f"f_rest_{ch * (dim - 1) + j}"]
    orientations = np.stack([cols[f"rot_{i}"] for i in range(4)], axis=1)
    norms = np.linalg.norm(orientations, axis=1)
    if count and not np.all(norms > 0):
        raise DataError(f"zero quaternion in record {int(np.nonzero(norms == 0)[0][0])}")
    if count:
        orientations = orientations / norms[:, None]

    return SplatSet(
        positions=np.stack([cols["x"], cols["y"], cols["z"]], axis=1)
        if count else np.zeros((0, 3)),
        orientations=orientations if count else np.zeros((0, 4)),
        scales=np.exp(np.stack([cols[f"scale_{i}"] for i in range(3)], axis=1))
        if count else np.zeros((0, 3)),
        opacities=_sigmoid(cols["opacity"]),
        sh_coeffs=sh,
        sh_degree=degree,
    )


def save_splats(path: str | os.PathLike, splat_set: SplatSet):
    """Write a splat set in the layout `load_splats` expects."""
    degree = splat_set.sh_degree
    fields = _expected_fields(degree)
    n = len(splat_set)
    dim = (degree + 1) ** 2

    table = np.empty((n, len(fields)), dtype=np.float64)
    cols = {name: i for i, name in enumerate(fields)}
    table[:, cols["x"]:cols["x"] + 3] = splat_set.positions
    for ch in range(3):
        table[:, cols[f"f_dc_{ch}"]] = splat_set.sh_coeffs[:, ch, 0]
        for j in range(dim - 1):
            table[:, cols[f"f_rest_{ch * (dim - 1) + j}"]] = splat_set.sh_coeffs[:, ch, 1 + j]
    table[:, cols["opacity"]] = _logit(splat_set.opacities)
    table[:, cols["scale_0"]:cols["scale_0"] + 3] = np.log(splat_set.scales)
    table[:, cols["rot_0"]:cols["rot_0"] + 4] = splat_set.orientations

    header = ["ply", "format binary_little_endian 1.0", f"element vertex {n}"]
    header += [f"property float {name}" for name in fields]
    header.append("end_header")
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(table, dtype="<f4").tobytes())
