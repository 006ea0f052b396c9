import struct

import numpy as np
import pytest

from desktwin.errors import DataError, FormatError
from desktwin.splats import load_splats, save_splats
from conftest import random_scene


def write_minimal_ply(path, opacity_logit=0.0):
    fields = ["x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2",
              "opacity", "scale_0", "scale_1", "scale_2",
              "rot_0", "rot_1", "rot_2", "rot_3"]
    header = ["ply", "format binary_little_endian 1.0", "element vertex 1"]
    header += [f"property float {f}" for f in fields]
    header.append("end_header")
    values = [1.0, 2.0, 3.0, 0.1, 0.2, 0.3,
              opacity_logit, -1.0, -1.0, -1.0,
              2.0, 0.0, 0.0, 0.0]  # unnormalized quaternion allowed
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode())
        fh.write(struct.pack("<14f", *values))


def test_minimal_dc_only_file(tmp_path):
    p = tmp_path / "one.ply"
    write_minimal_ply(p)
    s = load_splats(p)
    assert len(s) == 1 and s.sh_degree == 0
    assert np.allclose(s.positions[0], [1, 2, 3], atol=1e-6)
    assert np.allclose(s.orientations[0], [1, 0, 0, 0])  # renormalized


def test_opacity_logit_zero_maps_to_half(tmp_path):
    p = tmp_path / "one.ply"
    write_minimal_ply(p, opacity_logit=0.0)
    assert abs(load_splats(p).opacities[0] - 0.5) < 1e-9


@pytest.mark.parametrize("degree", [0, 1, 2, 3])
def test_round_trip(tmp_path, rng, degree):
    scene = random_scene(rng, 17, sh_degree=degree)
    p = tmp_path / "scene.ply"
    save_splats(p, scene)
    back = load_splats(p)
    assert back.sh_degree == degree
    assert np.allclose(back.positions, scene.positions, atol=1e-6)
    assert np.allclose(back.scales, scene.scales, atol=1e-6)
    assert np.allclose(back.opacities, scene.opacities, atol=1e-6)
    assert np.allclose(back.sh_coeffs, scene.sh_coeffs, atol=1e-6)
    # quaternions match up to the shared sign convention
    dots = np.sum(back.orientations * scene.orientations, axis=1)
    assert np.all(np.abs(np.abs(dots) - 1.0) < 1e-6)


def test_missing_field_is_named(tmp_path):
    fields = ["x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2",
              "opacity", "scale_0", "scale_1", "scale_2",
              "rot_0", "rot_1", "rot_2"]  # rot_3 missing
    header = ["ply", "format binary_little_endian 1.0", "element vertex 0"]
    header += [f"property float {f}" for f in fields]
    header.append("end_header")
    p = tmp_path / "bad.ply"
    p.write_bytes(("\n".join(header) + "\n").encode())
    with pytest.raises(FormatError, match="rot_3"):
        load_splats(p)


def test_extra_field_is_named(tmp_path):
    fields = ["x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2",
              "opacity", "scale_0", "scale_1", "scale_2",
              "rot_0", "rot_1", "rot_2", "rot_3", "nx"]
    header = ["ply", "format binary_little_endian 1.0", "element vertex 0"]
    header += [f"property float {f}" for f in fields]
    header.append("end_header")
    p = tmp_path / "bad.ply"
    p.write_bytes(("\n".join(header) + "\n").encode())
    with pytest.raises(FormatError, match="nx"):
        load_splats(p)


def test_non_finite_reports_record_index(tmp_path, rng):
    scene = random_scene(rng, 3)
    p = tmp_path / "scene.ply"
    save_splats(p, scene)
    raw = bytearray(p.read_bytes())
    header_len = raw.index(b"end_header\n") + len(b"end_header\n")
    record = (3 + 3 + 9 + 1 + 3 + 4) * 4  # degree-1 layout
    struct.pack_into("<f", raw, header_len + record + 4, float("nan"))
    p.write_bytes(bytes(raw))
    with pytest.raises(DataError, match="record 1"):
        load_splats(p)


def test_truncated_payload(tmp_path, rng):
    scene = random_scene(rng, 4)
    p = tmp_path / "scene.ply"
    save_splats(p, scene)
    raw = p.read_bytes()
    p.write_bytes(raw[:-8])
    with pytest.raises(FormatError):
        load_splats(p)
