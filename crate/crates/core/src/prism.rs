//! A single horoprism: the semi-ideal pyramid over a hyperbolic triangle with
//! its apex at the cusp, truncated by a horosphere.
//!
//! Embedding: upper half-space, apex at `∞`, reference horosphere `z = 1`, so
//! vertex `v` sits at height `z_v = e^{−h_v}`. Sides and corners are indexed
//! like a surface triangle: side `s` joins corner `s` to corner `s + 1`.

use thiserror::Error;

use crate::hyperbolic::angle_from_sides;
use crate::quadrature::adaptive_simpson;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum PrismError {
    #[error("height gap {gap} is not below the edge length {length}")]
    HeightGapTooLarge { length: f64, gap: f64 },
    #[error("horoprism does not exist: side {side} has length {length} but height gap {gap}")]
    SideMissing { side: usize, length: f64, gap: f64 },
    #[error("horoprism does not exist: Euclidean base sides {sides:?} violate the triangle inequality")]
    FlatBase { sides: [f64; 3] },
    #[error("projected base triangle is degenerate")]
    DegenerateBase,
}

impl PrismError {
    pub fn code(&self) -> &'static str {
        match self {
            PrismError::HeightGapTooLarge { .. } => "HeightGapTooLarge",
            PrismError::SideMissing { .. } | PrismError::FlatBase { .. } => "PrismDoesNotExist",
            PrismError::DegenerateBase => "DegenerateBase",
        }
    }
}

/// Angle at the `from` vertex between a base edge of length `l` and the
/// particle through that vertex: `cos ρ = (cosh l − e^{h_to − h_from}) / sinh l`.
///
/// Evaluated as `tan²(ρ/2) = e^{−l}(e^{l+Δ} − 1) / (e^{Δ}(e^{l−Δ} − 1))`.
pub fn semi_ideal_rho<T: Scalar>(l: T, h_from: T, h_to: T) -> Result<T, PrismError> {
    let d = h_to - h_from;
    if !(l > d.abs()) {
        return Err(PrismError::HeightGapTooLarge { length: l.as_f64(), gap: d.abs().as_f64() });
    }
    let num = (-l).exp() * (l + d).exp_m1();
    let den = d.exp() * (l - d).exp_m1();
    Ok(T::two() * num.sqrt().atan2(den.sqrt()))
}

/// Height at the point `j` of a base geodesic at distance `lambda` from `i`
/// and `mu` from `k`:
/// `e^{h_j} = (sinh μ e^{h_i} + sinh λ e^{h_k}) / sinh(λ + μ)`.
pub fn interpolate_height<T: Scalar>(lambda: T, mu: T, h_i: T, h_k: T) -> T {
    let s = (lambda + mu).sinh();
    ((mu.sinh() * h_i.exp() + lambda.sinh() * h_k.exp()) / s).ln()
}

/// Angle opposite side `c` of a spherical triangle with sides `a`, `b`, `c`.
fn spherical_angle<T: Scalar>(a: T, b: T, c: T) -> Option<T> {
    let s = (a + b + c) / T::two();
    let num = (s - a).sin() * (s - b).sin();
    let den = s.sin() * (s - c).sin();
    if !(num > T::zero() && den > T::zero()) {
        return None;
    }
    Some(T::two() * num.sqrt().atan2(den.sqrt()))
}

/// All angles and Euclidean data of one horoprism.
#[derive(Clone, Debug, PartialEq)]
pub struct Horoprism<T> {
    /// Hyperbolic side lengths, side `s` from corner `s` to `s + 1`.
    pub lengths: [T; 3],
    pub heights: [T; 3],
    /// `e^{−h}` per corner.
    pub z: [T; 3],
    /// Side lengths of the vertical projection onto the horosphere.
    pub euclid: [T; 3],
    /// Hyperbolic corner angles of the base triangle.
    pub gamma: [T; 3],
    /// `rho[s] = [ρ at corner s, ρ at corner s + 1]` along side `s`.
    pub rho: [[T; 2]; 3],
    /// Dihedral angle at the particle through each corner.
    pub omega: [T; 3],
    /// Dihedral angle along side `s` between the base and the lateral face,
    /// read off the vertex link at corner `s` and at corner `s + 1`.
    pub alpha: [[T; 2]; 3],
}

impl<T: Scalar> Horoprism<T> {
    /// Builds the prism over a triangle with the given sides and corner heights.
    pub fn new(lengths: [T; 3], heights: [T; 3]) -> Result<Self, PrismError> {
        let z = heights.map(|h| (-h).exp());
        let mut euclid = [T::zero(); 3];
        let mut rho = [[T::zero(); 2]; 3];
        for s in 0..3 {
            let (u, v) = (s, (s + 1) % 3);
            let (l, d) = (lengths[s], heights[u] - heights[v]);
            if !(l > d.abs()) {
                return Err(PrismError::SideMissing {
                    side: s,
                    length: l.as_f64(),
                    gap: d.abs().as_f64(),
                });
            }
            // E² = 2 z_u z_v (cosh l − cosh Δ)
            let q = z[u] * z[v] * ((l + d) / T::two()).sinh() * ((l - d) / T::two()).sinh();
            euclid[s] = T::two() * q.sqrt();
            rho[s] = [
                semi_ideal_rho(l, heights[u], heights[v])?,
                semi_ideal_rho(l, heights[v], heights[u])?,
            ];
        }
        if heron_product(euclid) <= T::zero() {
            return Err(PrismError::FlatBase { sides: euclid.map(|e| e.as_f64()) });
        }
        let flat = || PrismError::FlatBase { sides: euclid.map(|e| e.as_f64()) };
        let mut gamma = [T::zero(); 3];
        let mut omega = [T::zero(); 3];
        let mut alpha = [[T::zero(); 2]; 3];
        for c in 0..3 {
            let out = c; // side leaving corner c
            let inc = (c + 2) % 3; // side arriving at corner c
            gamma[c] = angle_from_sides(lengths[out], lengths[inc], lengths[(c + 1) % 3])
                .ok_or_else(flat)?;
            let (r_out, r_in) = (rho[out][0], rho[inc][1]);
            omega[c] = spherical_angle(r_out, r_in, gamma[c]).ok_or_else(flat)?;
            alpha[out][0] = spherical_angle(gamma[c], r_out, r_in).ok_or_else(flat)?;
            alpha[inc][1] = spherical_angle(gamma[c], r_in, r_out).ok_or_else(flat)?;
        }
        Ok(Horoprism { lengths, heights, z, euclid, gamma, rho, omega, alpha })
    }

    /// Dihedral angle along side `s`.
    pub fn dihedral(&self, s: usize) -> T {
        self.alpha[s][0]
    }

    /// Projected corners in the plane: corner 0 at the origin, corner 1 on
    /// the positive x-axis, counterclockwise.
    pub fn base_points(&self) -> [[T; 2]; 3] {
        let [e0, e1, e2] = self.euclid;
        let x = (e0 * e0 + e2 * e2 - e1 * e1) / (T::two() * e0);
        let y = heron_product(self.euclid).max(T::zero()).sqrt() / (T::two() * e0);
        [[T::zero(); 2], [e0, T::zero()], [x, y]]
    }

    /// Center and squared radius of the hemisphere through the three
    /// embedded vertices, in the frame of [`Self::base_points`].
    pub fn hemisphere(&self) -> Result<([T; 2], T), PrismError> {
        let p = self.base_points();
        let z = self.z;
        let det = p[1][0] * p[2][1] - p[1][1] * p[2][0];
        if !(det > T::zero()) {
            return Err(PrismError::DegenerateBase);
        }
        let w = |c: usize| p[c][0] * p[c][0] + p[c][1] * p[c][1] + z[c] * z[c] - z[0] * z[0];
        let (r1, r2) = (w(1) / T::two(), w(2) / T::two());
        let qx = (r1 * p[2][1] - r2 * p[1][1]) / det;
        let qy = (p[1][0] * r2 - p[2][0] * r1) / det;
        let r_sq = qx * qx + qy * qy + z[0] * z[0];
        Ok(([qx, qy], r_sq))
    }

    /// Volume of the full (untruncated) semi-ideal pyramid.
    ///
    /// The integrand `1 / (2(R² − |x − q|²))` over the projected triangle is
    /// integrated in polar coordinates about `q`; the radial integral is
    /// closed-form, leaving one smooth line integral per side.
    pub fn volume(&self) -> Result<T, PrismError> {
        let (q, r_sq) = self.hemisphere()?;
        let p = self.base_points();
        let z = self.z;
        let four = T::lit(4.0);
        let half = T::lit(0.5);
        let mut total = T::zero();
        for s in 0..3 {
            let (u, v) = (s, (s + 1) % 3);
            let a = [p[u][0] - q[0], p[u][1] - q[1]];
            let d = [p[v][0] - p[u][0], p[v][1] - p[u][1]];
            let cross = a[0] * d[1] - a[1] * d[0];
            let dd = d[0] * d[0] + d[1] * d[1];
            let (zu2, zv2) = (z[u] * z[u], z[v] * z[v]);
            let integrand = |t: T| {
                let x0 = a[0] + t * d[0];
                let x1 = a[1] + t * d[1];
                let x = (x0 * x0 + x1 * x1) / r_sq;
                if x < half {
                    if x < T::lit(1e-12) {
                        T::one() + x / T::two()
                    } else {
                        -(-x).ln_1p() / x
                    }
                } else {
                    // R² − r² along the side, free of cancellation
                    let f = (T::one() - t) * zu2 + t * zv2 + t * (T::one() - t) * dd;
                    (r_sq / f).ln() / x
                }
            };
            let tol = T::lit(T::QUAD_TOL);
            total += cross / (four * r_sq) * adaptive_simpson(integrand, T::zero(), T::one(), tol);
        }
        Ok(total)
    }

    /// Largest distance in the base plane from a corner to the foot of the
    /// perpendicular dropped from the apex: `arcosh(R / z_v)` maximized.
    pub fn slope(&self) -> Result<T, PrismError> {
        let (_, r_sq) = self.hemisphere()?;
        let z_min = self.z[0].min(self.z[1]).min(self.z[2]);
        Ok((r_sq.sqrt() / z_min).max(T::one()).acosh())
    }
}

/// `16·area²` of a Euclidean triangle, in Kahan's cancellation-free order.
fn heron_product<T: Scalar>(sides: [T; 3]) -> T {
    let mut s = sides;
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    let [a, b, c] = s;
    (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
}

/// Builds a prism; see [`Horoprism::new`].
pub fn build_prism<T: Scalar>(lengths: [T; 3], heights: [T; 3]) -> Result<Horoprism<T>, PrismError> {
    Horoprism::new(lengths, heights)
}

pub fn prism_volume<T: Scalar>(p: &Horoprism<T>) -> Result<T, PrismError> {
    p.volume()
}

pub fn prism_slope<T: Scalar>(p: &Horoprism<T>) -> Result<T, PrismError> {
    p.slope()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::uhs_distance;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    type V3 = [f64; 3];

    fn sub(a: V3, b: V3) -> V3 {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }
    fn dot(a: V3, b: V3) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }
    fn cross(a: V3, b: V3) -> V3 {
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    }
    fn unit(a: V3) -> V3 {
        let n = dot(a, a).sqrt();
        [a[0] / n, a[1] / n, a[2] / n]
    }

    /// Unit tangent at `x` of the geodesic from `x` to `y` in the upper half-space.
    fn geodesic_tangent(x: V3, y: V3) -> V3 {
        let e = [y[0] - x[0], y[1] - x[1]];
        let len = (e[0] * e[0] + e[1] * e[1]).sqrt();
        let dir = [e[0] / len, e[1] / len];
        // center of the circle along the ground line, measured from x
        let s0 = (len * len + y[2] * y[2] - x[2] * x[2]) / (2.0 * len);
        let t = [x[2], s0];
        let n = (t[0] * t[0] + t[1] * t[1]).sqrt();
        [dir[0] * t[0] / n, dir[1] * t[0] / n, t[1] / n]
    }

    /// Independent embedding: vertices from pairwise hyperbolic distances.
    fn embed(l: [f64; 3], h: [f64; 3]) -> [V3; 3] {
        let z = h.map(|h| (-h).exp());
        let e = |s: usize| {
            let (u, v) = (s, (s + 1) % 3);
            // cosh l = 1 + (E² + Δz²) / (2 z_u z_v)
            let e2 = (l[s].cosh() - 1.0) * 2.0 * z[u] * z[v] - (z[u] - z[v]).powi(2);
            e2.sqrt()
        };
        let (e0, e1, e2) = (e(0), e(1), e(2));
        let x = (e0 * e0 + e2 * e2 - e1 * e1) / (2.0 * e0);
        let y = (e2 * e2 - x * x).sqrt();
        [[0.0, 0.0, z[0]], [e0, 0.0, z[1]], [x, y, z[2]]]
    }

    fn oracle_angles(l: [f64; 3], h: [f64; 3]) -> ([f64; 3], [[f64; 2]; 3], [f64; 3]) {
        let p = embed(l, h);
        for s in 0..3 {
            let (u, v) = (s, (s + 1) % 3);
            let d = uhs_distance([p[u][0], p[u][1]], p[u][2], [p[v][0], p[v][1]], p[v][2]);
            assert!((d - l[s]).abs() < 1e-10);
        }
        let up = [0.0, 0.0, 1.0];
        let mut omega = [0.0; 3];
        let mut alpha = [[0.0; 2]; 3];
        let mut rho0 = [0.0; 3];
        for c in 0..3 {
            let (nx, pv) = ((c + 1) % 3, (c + 2) % 3);
            let a = sub(p[nx], p[c]);
            let b = sub(p[pv], p[c]);
            omega[c] = (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
            let d_out = geodesic_tangent(p[c], p[nx]);
            let d_in = geodesic_tangent(p[c], p[pv]);
            rho0[c] = dot(d_out, up).acos();
            // hemisphere through the three points: normal at p[c]
            let normal = unit(cross(d_out, d_in));
            for (side, end, d, other) in [(c, 0, d_out, d_in), (pv, 1, d_in, d_out)] {
                let lateral = unit(sub(up, d.map(|x| x * dot(up, d))));
                let mut base = unit(cross(normal, d));
                if dot(base, other) < 0.0 {
                    base = base.map(|x| -x);
                }
                alpha[side][end] = dot(lateral, base).clamp(-1.0, 1.0).acos();
            }
        }
        (omega, alpha, rho0)
    }

    fn random_prism(rng: &mut ChaCha8Rng) -> ([f64; 3], [f64; 3]) {
        loop {
            let l = [0; 3].map(|_| rng.random_range(0.3..1.5));
            let h = [0; 3].map(|_| rng.random_range(-0.3..0.3));
            if Horoprism::new(l, h).is_ok() {
                return (l, h);
            }
        }
    }

    #[test]
    fn isosceles_rho() {
        let r = semi_ideal_rho(1.0f64, 0.2, 0.2).unwrap();
        assert!((r.cos() - 0.5f64.tanh()).abs() < 1e-15);
        assert!((r.cos() - 0.462_117_157_260_009_8).abs() < 1e-15);
    }

    #[test]
    fn rho_near_gap_limit() {
        let r = semi_ideal_rho(1.0f64, 0.0, 1.0 - 1e-9).unwrap();
        assert!(r.cos() < -1.0 + 1e-8);
        assert!(semi_ideal_rho(1.0f64, 0.0, 1.0).is_err());
        assert_eq!(semi_ideal_rho(1.0f64, 1.5, 0.0).unwrap_err().code(), "HeightGapTooLarge");
    }

    #[test]
    fn rho_matches_half_plane_oracle() {
        let r = semi_ideal_rho(1.0f64, 0.0, 0.3).unwrap();
        // i at height 1, j at height e^{-0.3}, horizontal offset from the distance
        let (zi, zj) = (1.0f64, (-0.3f64).exp());
        let dx = ((1.0f64.cosh() - 1.0) * 2.0 * zi * zj - (zi - zj).powi(2)).sqrt();
        let t = geodesic_tangent([0.0, 0.0, zi], [dx, 0.0, zj]);
        let oracle = t[2].acos();
        assert!((r - oracle).abs() < 1e-12);
        assert!((r - 1.4057).abs() < 1e-4);
    }

    #[test]
    fn interpolation_symmetric_cases() {
        let (h, l) = (0.4f64, 0.7f64);
        assert!((interpolate_height(l, l, h, h) - (h - l.cosh().ln())).abs() < 1e-14);
        let v = interpolate_height(l, l, 0.1, -0.5);
        let e = (0.1f64.exp() + (-0.5f64).exp()) / (2.0 * l.cosh());
        assert!((v - e.ln()).abs() < 1e-14);
    }

    #[test]
    fn interpolation_matches_embedding() {
        // point at distance λ from i along the base geodesic i → k
        let (l, hi, hk) = (1.3f64, 0.25f64, -0.1f64);
        let (zi, zk) = ((-hi).exp(), (-hk).exp());
        let e = ((l.cosh() - 1.0) * 2.0 * zi * zk - (zi - zk).powi(2)).sqrt();
        let s0 = (e * e + zk * zk - zi * zi) / (2.0 * e);
        let rad = (s0 * s0 + zi * zi).sqrt();
        let at = |phi: f64| [s0 + rad * phi.cos(), 0.0, rad * phi.sin()];
        let (phi_i, phi_k) = ((zi / rad).asin(), PI - (zk / rad).asin());
        let (phi_i, phi_k) = if s0 > 0.0 { (PI - phi_i, PI - phi_k) } else { (phi_i, phi_k) };
        let dist = |x: V3, y: V3| uhs_distance([x[0], x[1]], x[2], [y[0], y[1]], y[2]);
        let pi_ = at(phi_i);
        assert!((dist(pi_, at(phi_k)) - l).abs() < 1e-10);
        let lambda = 0.45;
        let (mut lo, mut hi_) = (phi_i.min(phi_k), phi_i.max(phi_k));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi_);
            let closer = dist(pi_, at(mid)) < lambda;
            if (closer && phi_i < phi_k) || (!closer && phi_i > phi_k) {
                lo = mid
            } else {
                hi_ = mid
            }
        }
        let x = at(0.5 * (lo + hi_));
        assert!((dist(pi_, x) - lambda).abs() < 1e-10);
        let v = interpolate_height(lambda, l - lambda, hi, hk);
        assert!((v + x[2].ln()).abs() < 1e-10, "{v} vs {}", -x[2].ln());
    }

    #[test]
    fn equilateral_isosceles_prism() {
        let p = Horoprism::new([1.0f64; 3], [0.0; 3]).unwrap();
        for c in 0..3 {
            assert!((p.omega[c] - PI / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lifted_corner_matches_embedding() {
        let (l, h) = ([1.0f64; 3], [0.5, 0.0, 0.0]);
        let p = Horoprism::new(l, h).unwrap();
        let (omega, alpha, rho0) = oracle_angles(l, h);
        let pts = p.base_points();
        for c in 0..3 {
            assert!((p.omega[c] - omega[c]).abs() < 1e-10, "{:?} {:?}", p.omega, omega);
            assert!((p.rho[c][0] - rho0[c]).abs() < 1e-10);
            for e in 0..2 {
                assert!((p.alpha[c][e] - alpha[c][e]).abs() < 1e-9);
            }
            let a = [pts[(c + 1) % 3][0] - pts[c][0], pts[(c + 1) % 3][1] - pts[c][1]];
            let b = [pts[(c + 2) % 3][0] - pts[c][0], pts[(c + 2) % 3][1] - pts[c][1]];
            let eu = (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
            assert!((p.omega[c] - eu).abs() < 1e-10);
        }
        let s: f64 = p.omega.iter().sum();
        assert!((s - PI).abs() < 1e-12);
    }

    #[test]
    fn missing_prism_reported() {
        let err = Horoprism::new([1.0f64; 3], [1.2, 0.0, 0.0]).unwrap_err();
        assert_eq!(err.code(), "PrismDoesNotExist");
        match err {
            PrismError::SideMissing { side, .. } => assert_eq!(side, 0),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn random_prisms_match_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let (l, h) = random_prism(&mut rng);
            let p = Horoprism::new(l, h).unwrap();
            let (omega, alpha, _) = oracle_angles(l, h);
            for c in 0..3 {
                assert!((p.omega[c] - omega[c]).abs() < 1e-9);
                assert!((p.alpha[c][0] - p.alpha[c][1]).abs() < 1e-10);
                assert!((p.alpha[c][0] - alpha[c][0]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn gauge_shift_changes_nothing_geometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let (l, h) = random_prism(&mut rng);
            let c = rng.random_range(-2.0..2.0);
            let p = Horoprism::new(l, h).unwrap();
            let q = Horoprism::new(l, h.map(|x| x + c)).unwrap();
            for s in 0..3 {
                assert!((p.omega[s] - q.omega[s]).abs() < 1e-12);
                assert!((p.alpha[s][0] - q.alpha[s][0]).abs() < 1e-12);
                assert!((p.rho[s][1] - q.rho[s][1]).abs() < 1e-12);
                let ratio = p.euclid[s] / p.euclid[0] - q.euclid[s] / q.euclid[0];
                assert!(ratio.abs() < 1e-12);
            }
            assert!((p.slope().unwrap() - q.slope().unwrap()).abs() < 1e-10);
            let (vp, vq) = (p.volume().unwrap(), q.volume().unwrap());
            assert!((vp - vq).abs() < 1e-12 * (1.0 + vp), "{vp} vs {vq}");
        }
    }

    #[test]
    fn volume_monte_carlo() {
        let p = Horoprism::new([1.0f64; 3], [0.0; 3]).unwrap();
        let v = p.volume().unwrap();
        let (q, r_sq) = p.hemisphere().unwrap();
        let pts = p.base_points();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 400_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let (mut a, mut b) = (rng.random::<f64>(), rng.random::<f64>());
            if a + b > 1.0 {
                (a, b) = (1.0 - a, 1.0 - b);
            }
            let x = pts[1][0] * a + pts[2][0] * b;
            let y = pts[1][1] * a + pts[2][1] * b;
            let z0sq = r_sq - (x - q[0]).powi(2) - (y - q[1]).powi(2);
            acc += 1.0 / (2.0 * z0sq);
        }
        let area = 0.5 * pts[1][0] * pts[2][1];
        let mc = acc / n as f64 * area;
        assert!(v > 0.0);
        assert!(((v - mc) / v).abs() < 2e-3, "{v} vs {mc}");
    }

    #[test]
    fn volume_shrinks_with_base() {
        let mut prev = f64::INFINITY;
        for &t in &[1.0, 0.5, 0.1, 0.01, 0.001] {
            let v = Horoprism::new([t; 3], [0.0f64; 3]).unwrap().volume().unwrap();
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
        assert!(prev < 1e-5);
    }

    #[test]
    fn isosceles_slope_is_circumradius() {
        let l = 1.0f64;
        let p = Horoprism::new([l; 3], [0.0; 3]).unwrap();
        // right triangle circumcenter–vertex–midpoint: sinh(l/2) = sinh R · sin(π/3)
        let r = ((l / 2.0).sinh() / (PI / 3.0).sin()).asinh();
        assert!((p.slope().unwrap() - r).abs() < 1e-12);
        let q = Horoprism::new([l; 3], [0.5, 0.0, 0.0]).unwrap();
        assert!(q.slope().unwrap() >= p.slope().unwrap());
    }
}
