#![allow(dead_code)]

use horocusp::cusp::{make_feasible, CuspState};
use horocusp::functional::total_scalar_curvature;
use horocusp::samples::{grid_shape, perturbed_torus};
use horocusp::solver::random_feasible_state;
use horocusp::surface::ConeSurface;

pub const SIZES: [usize; 7] = [1, 2, 3, 5, 10, 25, 50];
pub const SEEDS_PER_SIZE: u64 = 8;

/// A corpus metric: an `n`-vertex torus with perturbed lattice lengths.
pub struct Metric {
    pub n: usize,
    pub seed: u64,
    pub surface: ConeSurface<f64>,
}

pub fn metric(n: usize, seed: u64) -> Metric {
    let (c, r) = grid_shape(n);
    let scale = 0.4 + 0.1 * (seed % 6) as f64;
    let surface = perturbed_torus(c, r, scale, 0.1 * scale * scale, 1000 * n as u64 + seed);
    Metric { n, seed, surface }
}

pub fn corpus() -> Vec<Metric> {
    SIZES.iter().flat_map(|&n| (0..SEEDS_PER_SIZE).map(move |s| metric(n, s))).collect()
}

/// Convex states with random heights and a strictly positive margin.
pub fn interior_states(sizes: &[usize], per_metric: u64) -> Vec<CuspState<f64>> {
    let mut out = Vec::new();
    for (k, &n) in sizes.iter().enumerate() {
        let m = metric(n, k as u64);
        for j in 0..per_metric {
            let st = random_feasible_state(&m.surface, 0.4, 77 * k as u64 + j).unwrap();
            assert!(st.feasibility_margin() > 0.0, "state is on the boundary");
            out.push(st);
        }
    }
    out
}

/// `S` at heights `h`, flipping as needed.
pub fn s_at(surface: &ConeSurface<f64>, h: &[f64]) -> f64 {
    total_scalar_curvature(&make_feasible(surface, h).unwrap().state)
}

pub fn kappa_at(surface: &ConeSurface<f64>, h: &[f64]) -> Vec<f64> {
    make_feasible(surface, h).unwrap().state.kappa().to_vec()
}

/// `h + t·(e_i − 𝟙/n)`.
pub fn bump(h: &[f64], i: usize, t: f64) -> Vec<f64> {
    let n = h.len() as f64;
    h.iter().enumerate().map(|(j, &x)| x + if i == j { t } else { 0.0 } - t / n).collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn sum_zero(h: &[f64]) -> Vec<f64> {
    let mean = h.iter().sum::<f64>() / h.len() as f64;
    h.iter().map(|x| x - mean).collect()
}

/// Klein ball to upper half-space through the Poincaré ball, written out
/// separately from the library's conversion.
pub fn klein_point_to_uhs(k: [f64; 3]) -> ([f64; 2], f64) {
    let n2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    let s = 1.0 + (1.0 - n2).sqrt();
    let b = [k[0] / s, k[1] / s, k[2] / s];
    let bb = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    let d = b[0] * b[0] + b[1] * b[1] + (1.0 - b[2]) * (1.0 - b[2]);
    ([2.0 * b[0] / d, 2.0 * b[1] / d], (1.0 - bb) / d)
}

/// Extremality oracle for points of the upper half-space facing the ideal
/// point `∞`.
///
/// A point is a vertex of the convex hull on the side away from `∞` iff some
/// hemisphere passes through it with every other point strictly outside.
/// Writing the hemisphere as `|x − q|² + z² = R²`, this asks for `q` whose
/// power `|q − p_v|² + z_v²` is smallest at `v`: a non-empty power cell. The
/// cell is the intersection of half-planes, clipped here from a large box.
pub fn extreme_in_uhs(points: &[([f64; 2], f64)]) -> Vec<bool> {
    let spread = points
        .iter()
        .fold(1.0f64, |m, (p, z)| m.max(p[0].abs()).max(p[1].abs()).max(*z));
    let big = 1e4 * spread;
    let w: Vec<f64> = points.iter().map(|(p, z)| p[0] * p[0] + p[1] * p[1] + z * z).collect();
    (0..points.len())
        .map(|v| {
            let pv = points[v].0;
            let mut order: Vec<usize> = (0..points.len()).filter(|&u| u != v).collect();
            let d2 = |u: usize| (points[u].0[0] - pv[0]).powi(2) + (points[u].0[1] - pv[1]).powi(2);
            order.sort_by(|&a, &b| d2(a).total_cmp(&d2(b)));
            let mut poly = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
            for u in order {
                let pu = points[u].0;
                let a = [2.0 * (pu[0] - pv[0]), 2.0 * (pu[1] - pv[1])];
                let b = w[u] - w[v];
                poly = clip(&poly, a, b);
                if poly.len() < 3 {
                    return false;
                }
            }
            polygon_area(&poly) > 1e-18 * spread * spread
        })
        .collect()
}

/// Keeps the part of a convex polygon with `a·x ≤ b`.
fn clip(poly: &[[f64; 2]], a: [f64; 2], b: f64) -> Vec<[f64; 2]> {
    let f = |x: [f64; 2]| a[0] * x[0] + a[1] * x[1] - b;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (x, y) = (poly[i], poly[(i + 1) % poly.len()]);
        let (fx, fy) = (f(x), f(y));
        if fx <= 0.0 {
            out.push(x);
        }
        if (fx < 0.0 && fy > 0.0) || (fx > 0.0 && fy < 0.0) {
            let t = fx / (fx - fy);
            out.push([x[0] + t * (y[0] - x[0]), x[1] + t * (y[1] - x[1])]);
        }
    }
    out
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let mut a = 0.0;
    for i in 0..poly.len() {
        let (x, y) = (poly[i], poly[(i + 1) % poly.len()]);
        a += x[0] * y[1] - x[1] * y[0];
    }
    a / 2.0
}

/// Hyperbolic distance in the upper half-space from the cosh formula.
pub fn uhs_dist(p: [f64; 2], z: f64, q: [f64; 2], w: f64) -> f64 {
    let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (z - w).powi(2);
    (1.0 + d2 / (2.0 * z * w)).acosh()
}

/// Walks from `from` to the heights `to` in short steps, flipping from the
/// previous triangulation at each one, and halving a step that fails.
pub fn continue_to(from: &CuspState<f64>, to: &[f64]) -> Option<CuspState<f64>> {
    let h0 = from.heights().to_vec();
    let mut cur = from.clone();
    let (mut t, mut dt) = (0.0f64, 1.0 / 8.0);
    while t < 1.0 {
        let next = (t + dt).min(1.0);
        let h: Vec<f64> = h0.iter().zip(to).map(|(a, b)| (1.0 - next) * a + next * b).collect();
        match make_feasible(cur.surface(), &h) {
            Ok(f) => {
                cur = f.state;
                t = next;
            }
            Err(_) if dt > 1e-9 => dt /= 2.0,
            Err(_) => return None,
        }
    }
    Some(cur)
}
