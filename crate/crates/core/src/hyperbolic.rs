//! Plane hyperbolic trigonometry and model conversions.
//!
//! All routines use the half-argument forms of the hyperbolic laws of cosines
//! so that short sides and small angles keep full relative precision.

use crate::scalar::Scalar;

/// Angle opposite side `c` in a hyperbolic triangle with sides `a`, `b`, `c`.
///
/// Equivalent to `cos γ = (cosh a cosh b − cosh c) / (sinh a sinh b)`, evaluated
/// through `tan(γ/2)`. Returns `None` unless the strict triangle inequality holds.
pub fn angle_from_sides<T: Scalar>(a: T, b: T, c: T) -> Option<T> {
    let s = (a + b + c) / T::two();
    let num = (s - a).sinh() * (s - b).sinh();
    let den = s.sinh() * (s - c).sinh();
    if !(num > T::zero() && den > T::zero()) {
        return None;
    }
    Some(T::two() * num.sqrt().atan2(den.sqrt()))
}

/// Side opposite the angle `phi` enclosed by sides `a` and `b`.
pub fn side_from_sas<T: Scalar>(a: T, b: T, phi: T) -> T {
    let sh = ((a - b) / T::two()).sinh();
    let sp = (phi / T::two()).sin();
    let q = sh * sh + a.sinh() * b.sinh() * sp * sp;
    T::two() * q.max(T::zero()).sqrt().asinh()
}

/// Hyperbolic distance between `(p, z)` points of the upper half-space.
pub fn uhs_distance<T: Scalar>(p: [T; 2], z: T, q: [T; 2], w: T) -> T {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    let dz = z - w;
    let chord = (dx * dx + dy * dy + dz * dz).sqrt();
    T::two() * (chord / (T::two() * (z * w).sqrt())).asinh()
}

/// Point of the Poincaré disk at hyperbolic distance `d` from the origin in
/// direction `phi`.
pub fn disk_point<T: Scalar>(d: T, phi: T) -> [T; 2] {
    let r = (d / T::two()).tanh();
    [r * phi.cos(), r * phi.sin()]
}

/// Hyperbolic distance between two points of the Poincaré disk.
pub fn disk_distance<T: Scalar>(x: [T; 2], y: [T; 2]) -> T {
    let dx = x[0] - y[0];
    let dy = x[1] - y[1];
    let nx = T::one() - (x[0] * x[0] + x[1] * x[1]);
    let ny = T::one() - (y[0] * y[0] + y[1] * y[1]);
    T::two() * ((dx * dx + dy * dy).sqrt() / (nx * ny).sqrt()).asinh()
}

/// Hyperboloid (time coordinate first) image of a Poincaré disk point.
pub fn disk_to_hyperboloid<T: Scalar>(x: [T; 2]) -> [T; 3] {
    let n = x[0] * x[0] + x[1] * x[1];
    let d = T::one() - n;
    [(T::one() + n) / d, T::two() * x[0] / d, T::two() * x[1] / d]
}

/// Minkowski product `−x₀y₀ + x₁y₁ + x₂y₂`.
pub fn minkowski<T: Scalar>(x: [T; 3], y: [T; 3]) -> T {
    -x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

/// Upper half-space to Poincaré ball, sending `∞` to the north pole
/// `(0, 0, 1)` and `(0, 0, 1)` to the origin:
/// `B = (2x, 2y, |w|² − 1) / (x² + y² + (z + 1)²)`.
pub fn uhs_to_ball<T: Scalar>(p: [T; 2], z: T) -> [T; 3] {
    let d = p[0] * p[0] + p[1] * p[1] + (z + T::one()) * (z + T::one());
    let n = p[0] * p[0] + p[1] * p[1] + z * z;
    [T::two() * p[0] / d, T::two() * p[1] / d, (n - T::one()) / d]
}

/// Inverse of [`uhs_to_ball`]:
/// `w = (2b₁, 2b₂, 1 − |b|²) / (b₁² + b₂² + (1 − b₃)²)`.
pub fn ball_to_uhs<T: Scalar>(b: [T; 3]) -> ([T; 2], T) {
    let d = b[0] * b[0] + b[1] * b[1] + (T::one() - b[2]) * (T::one() - b[2]);
    let n = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    ([T::two() * b[0] / d, T::two() * b[1] / d], (T::one() - n) / d)
}

/// Poincaré ball to Klein ball: `K = 2B / (1 + |B|²)`.
pub fn ball_to_klein<T: Scalar>(b: [T; 3]) -> [T; 3] {
    let f = T::two() / (T::one() + b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    b.map(|x| f * x)
}

/// Klein ball to Poincaré ball: `B = K / (1 + √(1 − |K|²))`.
pub fn klein_to_ball<T: Scalar>(k: [T; 3]) -> [T; 3] {
    let n = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    let f = T::one() / (T::one() + (T::one() - n).max(T::zero()).sqrt());
    k.map(|x| f * x)
}

pub fn uhs_to_klein<T: Scalar>(p: [T; 2], z: T) -> [T; 3] {
    ball_to_klein(uhs_to_ball(p, z))
}

pub fn klein_to_uhs<T: Scalar>(k: [T; 3]) -> ([T; 2], T) {
    ball_to_uhs(klein_to_ball(k))
}
