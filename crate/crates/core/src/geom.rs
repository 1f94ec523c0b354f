//! Small 3D vector and rotation helpers shared by the feature extractors.

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: Vec3) -> Vec3 {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

pub fn distance(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

/// Row-major 3x3 rotation matrix.
pub type Mat3 = [[f64; 3]; 3];

pub fn mat_apply(m: &Mat3, v: Vec3) -> Vec3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for (k, bk) in b.iter().enumerate() {
                out[i][j] += a[i][k] * bk[j];
            }
        }
    }
    out
}

/// Rodrigues formula: rotation of `angle` radians about the unit axis.
pub fn axis_angle(axis: Vec3, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    let [x, y, z] = axis;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

/// Minimal rotation taking unit(a) onto unit(b).
///
/// Antiparallel input rotates 180 degrees about a deterministic axis
/// orthogonal to `a`: the coordinate axis with the smallest |component|
/// along `a`, orthogonalized against `a`.
pub fn rotation_between(a: Vec3, b: Vec3) -> Result<Mat3> {
    if dot(a, a) == 0.0 || dot(b, b) == 0.0 {
        return Err(Error::ZeroLengthBone);
    }
    let ua = normalize(a);
    let ub = normalize(b);
    let c = cross(ua, ub);
    let cn = norm(c);
    let d = dot(ua, ub);
    if cn == 0.0 {
        if d > 0.0 {
            return Ok([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        }
        // a and b antiparallel: 180 degrees about an axis orthogonal to a.
        let k = (0..3).min_by(|&i, &j| ua[i].abs().total_cmp(&ua[j].abs())).unwrap();
        let mut e = [0.0; 3];
        e[k] = 1.0;
        let proj = dot(e, ua);
        let axis = normalize([e[0] - proj * ua[0], e[1] - proj * ua[1], e[2] - proj * ua[2]]);
        return Ok(axis_angle(axis, std::f64::consts::PI));
    }
    let axis = [c[0] / cn, c[1] / cn, c[2] / cn];
    Ok(axis_angle(axis, cn.atan2(d)))
}

/// Intrinsic XYZ (Tait-Bryan) Euler angles of a rotation matrix, radians.
///
/// Decomposes `m = Rx(alpha) * Ry(beta) * Rz(gamma)`; at the beta = ±90°
/// singularity gamma is fixed to 0.
pub fn euler_xyz(m: &Mat3) -> (f64, f64, f64) {
    let beta = m[0][2].clamp(-1.0, 1.0).asin();
    if m[0][2].abs() < 1.0 - 1e-12 {
        let alpha = (-m[1][2]).atan2(m[2][2]);
        let gamma = (-m[0][1]).atan2(m[0][0]);
        (alpha, beta, gamma)
    } else if m[0][2] > 0.0 {
        // beta = +90: only alpha + gamma is determined.
        (m[1][0].atan2(m[1][1]), beta, 0.0)
    } else {
        // beta = -90: only gamma - alpha is determined.
        ((-m[1][0]).atan2(m[1][1]), beta, 0.0)
    }
}

/// Recompose intrinsic XYZ Euler angles (radians) into a rotation matrix.
pub fn from_euler_xyz(alpha: f64, beta: f64, gamma: f64) -> Mat3 {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    let rx = [[1.0, 0.0, 0.0], [0.0, ca, -sa], [0.0, sa, ca]];
    let ry = [[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]];
    let rz = [[cg, -sg, 0.0], [sg, cg, 0.0], [0.0, 0.0, 1.0]];
    mat_mul(&mat_mul(&rx, &ry), &rz)
}
