//! Ready-made cone metrics: regular and jittered lattice tori, the
//! one-orbit rectangle torus, and the punctured-square particle cusp.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;
use crate::surface::{ConeSurface, SurfaceDoc};

/// Triangulated `cols × rows` lattice torus.
///
/// Vertex `(a, b)` sits at `a·e1 + b·e2` plus a per-vertex offset; each cell is
/// split by its `(1, 1)` diagonal. `length` maps a planar edge vector to the
/// hyperbolic length assigned to that edge.
pub fn lattice_doc(
    cols: usize,
    rows: usize,
    e1: [f64; 2],
    e2: [f64; 2],
    offsets: &[[f64; 2]],
    length: impl Fn([f64; 2]) -> f64,
) -> SurfaceDoc {
    assert!(cols > 0 && rows > 0);
    assert_eq!(offsets.len(), cols * rows);
    let wrap = |a: i64, n: usize| a.rem_euclid(n as i64) as usize;
    let pos = |a: i64, b: i64| -> [f64; 2] {
        let o = offsets[wrap(a, cols) + cols * wrap(b, rows)];
        [
            a as f64 * e1[0] + b as f64 * e2[0] + o[0],
            a as f64 * e1[1] + b as f64 * e2[1] + o[1],
        ]
    };
    let mut triangles = Vec::new();
    let mut key_of = Vec::new();
    let mut index: HashMap<(usize, usize, i64, i64), usize> = HashMap::new();
    for b in 0..rows as i64 {
        for a in 0..cols as i64 {
            let cells = [[(a, b), (a + 1, b), (a + 1, b + 1)], [(a, b), (a + 1, b + 1), (a, b + 1)]];
            for cell in cells {
                let mut tri = [0; 3];
                for c in 0..3 {
                    let (p, q) = (cell[c], cell[(c + 1) % 3]);
                    let key = (wrap(p.0, cols), wrap(p.1, rows), q.0 - p.0, q.1 - p.1);
                    let id = key_of.len();
                    index.insert(key, id);
                    let (x0, x1) = (pos(p.0, p.1), pos(q.0, q.1));
                    key_of.push((key, [x1[0] - x0[0], x1[1] - x0[1]]));
                    tri[c] = id;
                }
                triangles.push(tri);
            }
        }
    }
    let mut opposite = vec![0; key_of.len()];
    let mut lengths = vec![0.0; key_of.len()];
    for (id, ((a, b, da, db), v)) in key_of.iter().enumerate() {
        let start = (wrap(*a as i64 + da, cols), wrap(*b as i64 + db, rows), -da, -db);
        opposite[id] = index[&start];
        lengths[id] = length(*v);
    }
    // glued copies must carry bit-identical lengths
    for id in 0..lengths.len() {
        let o = opposite[id];
        if o < id {
            lengths[id] = lengths[o];
        }
    }
    SurfaceDoc { triangles, opposite, length: lengths }
}

/// Jittered lattice torus with `cols·rows` vertices whose Euclidean edge
/// lengths, multiplied by `scale`, are used as hyperbolic lengths. Hyperbolic
/// angles are smaller than Euclidean ones for equal sides, so every cone angle
/// is below `2π`. The `(1, 1)` diagonals are deliberately long, so the result
/// is usually not Delaunay.
pub fn grid_torus<T: Scalar>(
    cols: usize,
    rows: usize,
    jitter: f64,
    scale: f64,
    seed: u64,
) -> ConeSurface<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets: Vec<[f64; 2]> = (0..cols * rows)
        .map(|_| [rng.random_range(-jitter..=jitter), rng.random_range(-jitter..=jitter)])
        .collect();
    let doc = lattice_doc(cols, rows, [1.0, 0.0], [0.35, 0.95], &offsets, |v| {
        scale * (v[0] * v[0] + v[1] * v[1]).sqrt()
    });
    ConeSurface::from_doc(&doc).expect("lattice torus is valid")
}

/// Lattice torus whose edge lengths are additionally scaled by independent
/// factors in `[1 − noise, 1 + noise]`, so that no lattice symmetry survives.
/// Draws are repeated until the metric is valid; keep `noise` well below the
/// curvature per vertex (about `scale²`) or valid draws become rare.
pub fn perturbed_torus<T: Scalar>(
    cols: usize,
    rows: usize,
    scale: f64,
    noise: f64,
    seed: u64,
) -> ConeSurface<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let offsets: Vec<[f64; 2]> = (0..cols * rows)
            .map(|_| [rng.random_range(-0.1..=0.1), rng.random_range(-0.1..=0.1)])
            .collect();
        let mut doc = lattice_doc(cols, rows, [1.0, 0.0], [0.35, 0.95], &offsets, |v| {
            scale * (v[0] * v[0] + v[1] * v[1]).sqrt()
        });
        for h in 0..doc.length.len() {
            let o = doc.opposite[h];
            if h < o {
                let f = 1.0 + rng.random_range(-noise..=noise);
                doc.length[h] *= f;
                doc.length[o] = doc.length[h];
            }
        }
        if let Ok(s) = ConeSurface::from_doc(&doc) {
            return s;
        }
    }
    panic!("no valid {cols}×{rows} torus with noise {noise} at scale {scale}");
}

/// Grid shape used for a torus with `n` vertices.
pub fn grid_shape(n: usize) -> (usize, usize) {
    let mut best = (1, n);
    for c in 1..=n {
        if n % c == 0 && c <= n / c {
            best = (c, n / c);
        }
    }
    best
}

/// One-vertex torus glued from two equilateral triangles of the given side.
pub fn equilateral_torus<T: Scalar>(side: f64) -> ConeSurface<T> {
    ConeSurface::from_doc(&equilateral_doc(side)).expect("equilateral torus is valid")
}

pub fn equilateral_doc(side: f64) -> SurfaceDoc {
    let e2 = [-0.5, 3f64.sqrt() / 2.0];
    lattice_doc(1, 1, [1.0, 0.0], e2, &[[0.0, 0.0]], |_| side)
}

/// Boundary metric of the convex hull of one orbit of a rectangular
/// translation group acting on the horosphere at height 1: lattice points at
/// equal height, so every edge has `sinh(ℓ/2) = |w|/2` for its lattice vector
/// `w`. The resulting cusp is a single isosceles quadrangular pyramid whose
/// diagonal edge is flat.
pub fn rectangle_orbit_torus<T: Scalar>(width: f64, height: f64) -> ConeSurface<T> {
    let doc = lattice_doc(1, 1, [width, 0.0], [0.0, height], &[[0.0, 0.0]], |v| {
        2.0 * ((v[0] * v[0] + v[1] * v[1]).sqrt() / 2.0).asinh()
    });
    ConeSurface::from_doc(&doc).expect("rectangle torus is valid")
}

/// Particle cusp glued from four copies of a pyramid around a particle.
///
/// The center vertex `0` sits at the top of the unit hemisphere at height 1,
/// the square corners (all identified to vertex `1`) on the same hemisphere at
/// distance `radial` from it, with angle `corner_angle < π/2` between adjacent
/// radial edges. The radial edges are flat and the two loop edges are the
/// only true edges, so the center is isolated in the edge graph.
///
/// Returns the surface and the heights `(0, ln cosh radial)`.
pub fn punctured_square<T: Scalar>(corner_angle: f64, radial: f64) -> (ConeSurface<T>, Vec<T>) {
    let side = (radial.cosh().powi(2) - radial.sinh().powi(2) * corner_angle.cos()).acosh();
    // triangle m = [center→w_m, w_m→w_{m+1}, w_{m+1}→center]
    let mut opposite = vec![0; 12];
    let mut length = vec![0.0; 12];
    for m in 0..4 {
        opposite[3 * m + 2] = 3 * ((m + 1) % 4);
        opposite[3 * ((m + 1) % 4)] = 3 * m + 2;
        opposite[3 * m + 1] = 3 * ((m + 2) % 4) + 1;
        length[3 * m] = radial;
        length[3 * m + 1] = side;
        length[3 * m + 2] = radial;
    }
    let doc = SurfaceDoc {
        triangles: (0..4).map(|m| [3 * m, 3 * m + 1, 3 * m + 2]).collect(),
        opposite,
        length,
    };
    let s = ConeSurface::from_doc(&doc).expect("punctured square is valid");
    let h = [0.0, radial.cosh().ln()];
    let mean = (h[0] + h[1]) / 2.0;
    (s, h.iter().map(|x| T::lit(x - mean)).collect())
}

/// Two-vertex torus containing a triangle glued to itself along one edge
/// (a degree-one vertex inside a loop). Its inner edge can never be flipped.
pub fn self_glued_torus<T: Scalar>() -> ConeSurface<T> {
    // one-vertex torus [a, b, c1'] ∪ [c2', a', b'] split along its diagonal,
    // with the digon filled by [c1, z', c2] and the monogon by [x, y, z].
    let big = 5.0;
    let doc = SurfaceDoc {
        triangles: vec![[0, 1, 2], [3, 4, 5], [6, 7, 8], [9, 10, 11]],
        opposite: vec![4, 5, 6, 8, 0, 1, 2, 11, 3, 10, 9, 7],
        length: vec![big, big, big, big, big, big, big, 1.0, big, big, big, 1.0],
    };
    ConeSurface::from_doc(&doc).expect("self-glued torus is valid")
}
