/**
 * Orbit camera: azimuth/elevation/distance around a target, converted to the
 * render endpoint's query parameters (camera position plus camera-to-world
 * quaternion; camera axes are x right, y down, z forward).
 */

export interface OrbitState {
  azimuthDeg: number;
  elevationDeg: number;
  distance: number;
  target: [number, number, number];
  width: number;
  height: number;
  fx?: number;
}

type Vec3 = [number, number, number];

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function norm(a: Vec3): number {
  return Math.hypot(a[0], a[1], a[2]);
}

function scale(a: Vec3, s: number): Vec3 {
  return [a[0] * s, a[1] * s, a[2] * s];
}

export function orbitEye(o: OrbitState): Vec3 {
  const az = (o.azimuthDeg * Math.PI) / 180;
  const el = (o.elevationDeg * Math.PI) / 180;
  return [
    o.target[0] + o.distance * Math.cos(el) * Math.cos(az),
    o.target[1] + o.distance * Math.cos(el) * Math.sin(az),
    o.target[2] + o.distance * Math.sin(el),
  ];
}

/** Columns of the camera-to-world rotation: right, down, forward. */
export function lookAtAxes(eye: Vec3, target: Vec3):
    { right: Vec3; down: Vec3; forward: Vec3 } {
  const f = sub(target, eye);
  const fn = norm(f);
  if (fn === 0) {
    throw new Error("eye and target coincide");
  }
  const forward = scale(f, 1 / fn);
  const up: Vec3 = [0, 0, 1];
  let right = cross(forward, up);
  let rn = norm(right);
  if (rn < 1e-9) {
    right = cross(forward, [1, 0, 0]);
    rn = norm(right);
  }
  right = scale(right, 1 / rn);
  const down = cross(forward, right);
  return { right, down, forward };
}

/** Quaternion (w,x,y,z) of a rotation matrix given by its columns. */
export function quatFromColumns(right: Vec3, down: Vec3, forward: Vec3):
    [number, number, number, number] {
  // column-major: m[r][c], columns are the camera axes
  const m = [
    [right[0], down[0], forward[0]],
    [right[1], down[1], forward[1]],
    [right[2], down[2], forward[2]],
  ];
  const trace = m[0][0] + m[1][1] + m[2][2];
  let w: number, x: number, y: number, z: number;
  if (trace > 0) {
    const s = Math.sqrt(trace + 1) * 2;
    w = s / 4;
    x = (m[2][1] - m[1][2]) / s;
    y = (m[0][2] - m[2][0]) / s;
    z = (m[1][0] - m[0][1]) / s;
  } else if (m[0][0] > m[1][1] && m[0][0] > m[2][2]) {
    const s = Math.sqrt(1 + m[0][0] - m[1][1] - m[2][2]) * 2;
    w = (m[2][1] - m[1][2]) / s;
    x = s / 4;
    y = (m[0][1] + m[1][0]) / s;
    z = (m[0][2] + m[2][0]) / s;
  } else if (m[1][1] > m[2][2]) {
    const s = Math.sqrt(1 + m[1][1] - m[0][0] - m[2][2]) * 2;
    w = (m[0][2] - m[2][0]) / s;
    x = (m[0][1] + m[1][0]) / s;
    y = s / 4;
    z = (m[1][2] + m[2][1]) / s;
  } else {
    const s = Math.sqrt(1 + m[2][2] - m[0][0] - m[1][1]) * 2;
    w = (m[1][0] - m[0][1]) / s;
    x = (m[0][2] + m[2][0]) / s;
    y = (m[1][2] + m[2][1]) / s;
    z = s / 4;
  }
  const n = Math.hypot(w, x, y, z);
  return w >= 0
    ? [w / n, x / n, y / n, z / n]
    : [-w / n, -x / n, -y / n, -z / n];
}

/** Render-endpoint query parameters for the current orbit. */
export function cameraParams(o: OrbitState): Record<string, number> {
  const eye = orbitEye(o);
  const { right, down, forward } = lookAtAxes(eye, o.target);
  const [qw, qx, qy, qz] = quatFromColumns(right, down, forward);
  const params: Record<string, number> = {
    px: eye[0], py: eye[1], pz: eye[2],
    qw, qx, qy, qz,
    width: o.width, height: o.height,
  };
  if (o.fx !== undefined) {
    params.fx = o.fx;
  }
  return params;
}

/** Rotate the camera-to-world quaternion back into world-frame axes. */
export function rotateByQuat(q: [number, number, number, number],
                             v: Vec3): Vec3 {
  const [w, x, y, z] = q;
  // R(q) v, expanded
  const uv = cross([x, y, z], v);
  const uuv = cross([x, y, z], uv);
  return [
    v[0] + 2 * (w * uv[0] + uuv[0]),
    v[1] + 2 * (w * uv[1] + uuv[1]),
    v[2] + 2 * (w * uv[2] + uuv[2]),
  ];
}
