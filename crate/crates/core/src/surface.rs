//! Hyperbolic cone metrics on the torus as glued triangles.
//!
//! A [`ConeSurface`] stores a triangulation as half-edges: triangle `t` lists
//! three half-edge ids counterclockwise, `opposite` pairs each half-edge with
//! its partner in the adjacent triangle, and every half-edge carries the
//! hyperbolic length of its edge. Loops, multiple edges and triangles glued to
//! themselves are all representable, which vertex-pair keyed meshes are not.
//!
//! Vertices are the orbits of half-edge origins. Loading numbers them in order
//! of the smallest half-edge id in each orbit; flips keep those ids.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hyperbolic::{angle_from_sides, disk_point, disk_to_hyperboloid, side_from_sas};
use crate::scalar::Scalar;

/// On-disk form of a cone surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDoc {
    pub triangles: Vec<[usize; 3]>,
    pub opposite: Vec<usize>,
    pub length: Vec<f64>,
}

/// Why an edge cannot be flipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlipObstruction {
    /// Both sides of the edge belong to the same triangle.
    SameTriangle,
    /// The two adjacent triangles develop to a non-convex quadrilateral.
    NonConvex,
}

impl std::fmt::Display for FlipObstruction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FlipObstruction::SameTriangle => f.write_str("both sides lie in the same triangle"),
            FlipObstruction::NonConvex => f.write_str("the adjacent quadrilateral is not strictly convex"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SurfaceError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("length must be positive (half-edge {half_edge} has {value})")]
    NonPositiveLength { half_edge: usize, value: f64 },
    #[error("glued half-edges {a} and {b} have different lengths {length_a} and {length_b}")]
    LengthMismatch { a: usize, b: usize, length_a: f64, length_b: f64 },
    #[error("not a torus: {0}")]
    Topology(String),
    #[error("triangle {triangle} with sides {lengths:?} violates the triangle inequality")]
    TriangleInequality { triangle: usize, lengths: [f64; 3] },
    #[error("cone angle {angle} at vertex {vertex} is not below 2π")]
    ConeAngle { vertex: usize, angle: f64 },
    #[error("edge {edge} cannot be flipped: {reason}")]
    NotFlippable { edge: usize, reason: FlipObstruction },
    #[error("no Delaunay triangulation after {limit} flips")]
    IterationLimit { limit: usize },
}

impl SurfaceError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SurfaceError::Json(_) => "InvalidJson",
            SurfaceError::Schema(_) => "SchemaViolation",
            SurfaceError::NonPositiveLength { .. } => "NonPositiveLength",
            SurfaceError::LengthMismatch { .. } => "LengthMismatch",
            SurfaceError::Topology(_) => "NotATorus",
            SurfaceError::TriangleInequality { .. } => "TriangleInequality",
            SurfaceError::ConeAngle { .. } => "ConeAngleTooLarge",
            SurfaceError::NotFlippable { .. } => "NotFlippable",
            SurfaceError::IterationLimit { .. } => "IterationLimit",
        }
    }
}

/// Order in which offending edges are flipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FlipOrder {
    /// Largest violation first, ties broken by the smallest edge id.
    #[default]
    WorstFirst,
    /// Uniformly random among the offending edges, from the given seed.
    Random(u64),
}

pub(crate) struct EdgePicker {
    order: FlipOrder,
    rng: Option<ChaCha8Rng>,
}

impl EdgePicker {
    pub(crate) fn new(order: FlipOrder) -> Self {
        let rng = match order {
            FlipOrder::WorstFirst => None,
            FlipOrder::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        EdgePicker { order, rng }
    }

    /// Picks from `(edge, violation)` candidates listed in increasing edge order.
    pub(crate) fn pick(&mut self, candidates: &[(usize, f64)]) -> Option<usize> {
        if candidates.is_empty() {
            return None;
        }
        match (self.order, self.rng.as_mut()) {
            (FlipOrder::Random(_), Some(rng)) => {
                Some(candidates[rng.random_range(0..candidates.len())].0)
            }
            _ => {
                let mut best = candidates[0];
                for &c in &candidates[1..] {
                    if c.1 > best.1 {
                        best = c;
                    }
                }
                Some(best.0)
            }
        }
    }
}

/// A point of the surface given by projective weights on the corners of a
/// triangle, in hyperboloid coordinates: the point is `Σ w_c V_c` normalized,
/// where `V_c` are the corners of any isometric development of the triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint<T> {
    pub triangle: usize,
    pub weights: [T; 3],
}

/// Isometric development of the two triangles adjacent to an edge.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadDevelopment<T> {
    /// Poincaré disk positions of `i` (edge origin, at the center), `j` (edge
    /// target), `k` (apex of the triangle containing the half-edge) and `l`
    /// (apex across the edge).
    pub points: [[T; 2]; 4],
    /// Interior angles of the quadrilateral at `i` and `j`.
    pub angle_i: T,
    pub angle_j: T,
    /// Length of the other diagonal `kl`.
    pub diagonal: T,
    pub convex: bool,
}

/// A hyperbolic cone metric on the torus with a fixed triangulation.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSurface<T> {
    triangles: Vec<[usize; 3]>,
    face_of: Vec<usize>,
    slot: Vec<usize>,
    opposite: Vec<usize>,
    length: Vec<T>,
    origin: Vec<usize>,
    n_vertices: usize,
}

impl<T: Scalar> ConeSurface<T> {
    /// Parses and validates a JSON surface document.
    pub fn load(text: &str) -> Result<Self, SurfaceError> {
        let doc: SurfaceDoc =
            serde_json::from_str(text).map_err(|e| SurfaceError::Json(e.to_string()))?;
        Self::from_doc(&doc)
    }

    /// Validates a surface document: gluing, topology, triangle
    /// inequalities and cone angles.
    pub fn from_doc(doc: &SurfaceDoc) -> Result<Self, SurfaceError> {
        let f = doc.triangles.len();
        if f == 0 {
            return Err(SurfaceError::Schema("no triangles".into()));
        }
        let n = 3 * f;
        if doc.opposite.len() != n || doc.length.len() != n {
            return Err(SurfaceError::Schema(format!(
                "expected {n} entries in `opposite` and `length`, found {} and {}",
                doc.opposite.len(),
                doc.length.len()
            )));
        }
        let mut face_of = vec![usize::MAX; n];
        let mut slot = vec![0; n];
        for (t, tri) in doc.triangles.iter().enumerate() {
            for (c, &h) in tri.iter().enumerate() {
                if h >= n {
                    return Err(SurfaceError::Schema(format!("half-edge id {h} out of range")));
                }
                if face_of[h] != usize::MAX {
                    return Err(SurfaceError::Schema(format!(
                        "half-edge {h} appears in more than one triangle slot"
                    )));
                }
                face_of[h] = t;
                slot[h] = c;
            }
        }
        for (h, &o) in doc.opposite.iter().enumerate() {
            if o >= n {
                return Err(SurfaceError::Schema(format!("opposite[{h}] = {o} out of range")));
            }
            if o == h {
                return Err(SurfaceError::Schema(format!("half-edge {h} is its own opposite")));
            }
            if doc.opposite[o] != h {
                return Err(SurfaceError::Schema(format!("`opposite` is not an involution at {h}")));
            }
        }
        let mut length = Vec::with_capacity(n);
        for (h, &l) in doc.length.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(SurfaceError::NonPositiveLength { half_edge: h, value: l });
            }
            let o = doc.opposite[h];
            let lo = doc.length[o];
            if (l - lo).abs() > T::LENGTH_REL_TOL * l.max(lo) {
                return Err(SurfaceError::LengthMismatch {
                    a: h.min(o),
                    b: h.max(o),
                    length_a: doc.length[h.min(o)],
                    length_b: doc.length[h.max(o)],
                });
            }
            length.push(T::lit(doc.length[h.min(o)]));
        }

        let mut surface = ConeSurface {
            triangles: doc.triangles.clone(),
            face_of,
            slot,
            opposite: doc.opposite.clone(),
            length,
            origin: vec![usize::MAX; n],
            n_vertices: 0,
        };
        surface.label_vertices();
        surface.check_topology()?;
        surface.check_metric()?;
        Ok(surface)
    }

    fn label_vertices(&mut self) {
        let n = self.opposite.len();
        let mut count = 0;
        for start in 0..n {
            if self.origin[start] != usize::MAX {
                continue;
            }
            let mut h = start;
            loop {
                self.origin[h] = count;
                h = self.next(self.opposite[h]);
                if h == start {
                    break;
                }
            }
            count += 1;
        }
        self.n_vertices = count;
    }

    fn check_topology(&self) -> Result<(), SurfaceError> {
        let f = self.triangles.len();
        let e = self.opposite.len() / 2;
        let chi = self.n_vertices as i64 - e as i64 + f as i64;
        if chi != 0 {
            return Err(SurfaceError::Topology(format!(
                "Euler characteristic V − E + F = {} − {} + {} = {chi}",
                self.n_vertices, e, f
            )));
        }
        let mut seen = vec![false; f];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(t) = stack.pop() {
            for &h in &self.triangles[t] {
                let u = self.face_of[self.opposite[h]];
                if !seen[u] {
                    seen[u] = true;
                    reached += 1;
                    stack.push(u);
                }
            }
        }
        if reached != f {
            return Err(SurfaceError::Topology(format!(
                "surface is disconnected ({reached} of {f} triangles reachable)"
            )));
        }
        Ok(())
    }

    fn check_metric(&self) -> Result<(), SurfaceError> {
        for (t, tri) in self.triangles.iter().enumerate() {
            for &h in tri {
                if self.try_corner_angle(h).is_none() {
                    return Err(SurfaceError::TriangleInequality {
                        triangle: t,
                        lengths: tri.map(|x| self.length[x].as_f64()),
                    });
                }
            }
        }
        let limit = T::two() * T::PI() - T::angle_eps();
        for (v, &a) in self.cone_angles().iter().enumerate() {
            if a >= limit {
                return Err(SurfaceError::ConeAngle { vertex: v, angle: a.as_f64() });
            }
        }
        Ok(())
    }

    /// Document form. Loading numbers vertices in order of their first
    /// half-edge, which flips do not preserve; when needed the half-edges are
    /// renumbered so that the reloaded surface keeps these vertex ids.
    pub fn to_doc(&self) -> SurfaceDoc {
        let lengths = || self.length.iter().map(|l| l.as_f64());
        let Some(id) = self.doc_numbering() else {
            return SurfaceDoc {
                triangles: self.triangles.clone(),
                opposite: self.opposite.clone(),
                length: lengths().collect(),
            };
        };
        let n = self.opposite.len();
        let mut opposite = vec![0; n];
        let mut length = vec![0.0; n];
        for (h, l) in lengths().enumerate() {
            opposite[id[h]] = id[self.opposite[h]];
            length[id[h]] = l;
        }
        SurfaceDoc {
            triangles: self.triangles.iter().map(|t| t.map(|h| id[h])).collect(),
            opposite,
            length,
        }
    }

    /// The surface as it reloads from [`Self::to_doc`]: same vertex ids and
    /// triangles, possibly different half-edge ids.
    pub fn canonical(&self) -> Self {
        ConeSurface::from_doc(&self.to_doc()).expect("a valid surface reloads")
    }

    /// New half-edge ids giving vertex `v` the id `v` for one of its
    /// half-edges, or `None` if the current ids already load as they are.
    fn doc_numbering(&self) -> Option<Vec<usize>> {
        let n = self.opposite.len();
        let mut first = vec![usize::MAX; self.n_vertices];
        let mut in_order = true;
        let mut count = 0;
        for h in 0..n {
            let v = self.origin[h];
            if first[v] == usize::MAX {
                first[v] = h;
                in_order &= v == count;
                count += 1;
            }
        }
        if in_order {
            return None;
        }
        let mut id = vec![usize::MAX; n];
        for (v, &h) in first.iter().enumerate() {
            id[h] = v;
        }
        let mut k = self.n_vertices;
        for slot in id.iter_mut().filter(|x| **x == usize::MAX) {
            *slot = k;
            k += 1;
        }
        Some(id)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_half_edges(&self) -> usize {
        self.opposite.len()
    }

    pub fn n_edges(&self) -> usize {
        self.opposite.len() / 2
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn face_of(&self, h: usize) -> usize {
        self.face_of[h]
    }

    /// Position of `h` inside its triangle.
    pub fn slot(&self, h: usize) -> usize {
        self.slot[h]
    }

    pub fn next(&self, h: usize) -> usize {
        self.triangles[self.face_of[h]][(self.slot[h] + 1) % 3]
    }

    pub fn prev(&self, h: usize) -> usize {
        self.triangles[self.face_of[h]][(self.slot[h] + 2) % 3]
    }

    pub fn opposite(&self, h: usize) -> usize {
        self.opposite[h]
    }

    pub fn length(&self, h: usize) -> T {
        self.length[h]
    }

    pub fn origin(&self, h: usize) -> usize {
        self.origin[h]
    }

    pub fn target(&self, h: usize) -> usize {
        self.origin[self.opposite[h]]
    }

    /// Canonical id of the edge containing `h`: the smaller of the pair.
    pub fn edge_id(&self, h: usize) -> usize {
        h.min(self.opposite[h])
    }

    /// Canonical edge ids in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.opposite.len()).filter(move |&h| h < self.opposite[h])
    }

    /// Vertex ids at the corners of triangle `t`, in slot order.
    pub fn triangle_vertices(&self, t: usize) -> [usize; 3] {
        self.triangles[t].map(|h| self.origin[h])
    }

    /// Side lengths of triangle `t` in slot order.
    pub fn triangle_lengths(&self, t: usize) -> [T; 3] {
        self.triangles[t].map(|h| self.length[h])
    }

    fn try_corner_angle(&self, h: usize) -> Option<T> {
        angle_from_sides(self.length[h], self.length[self.prev(h)], self.length[self.next(h)])
    }

    /// Angle of the triangle of `h` at the origin of `h`.
    pub fn corner_angle(&self, h: usize) -> T {
        self.try_corner_angle(h).expect("validated triangle")
    }

    /// Total angle around every vertex.
    pub fn cone_angles(&self) -> Vec<T> {
        let mut a = vec![T::zero(); self.n_vertices];
        for h in 0..self.opposite.len() {
            a[self.origin[h]] += self.corner_angle(h);
        }
        a
    }

    /// Singular curvatures `2π − α_v`.
    pub fn curvatures(&self) -> Vec<T> {
        self.cone_angles().into_iter().map(|a| T::two() * T::PI() - a).collect()
    }

    /// Hyperbolic area, `Σ (π − angle sum)` over triangles.
    pub fn area(&self) -> T {
        self.triangles
            .iter()
            .map(|tri| T::PI() - tri.iter().map(|&h| self.corner_angle(h)).sum::<T>())
            .sum()
    }

    /// Develops the two triangles adjacent to the edge of `h` into the
    /// Poincaré disk.
    pub fn develop_quad(&self, h: usize) -> Result<QuadDevelopment<T>, SurfaceError> {
        let t = self.opposite[h];
        if self.face_of[h] == self.face_of[t] {
            return Err(SurfaceError::NotFlippable {
                edge: self.edge_id(h),
                reason: FlipObstruction::SameTriangle,
            });
        }
        let a1 = self.next(h);
        let a2 = self.next(a1);
        let b1 = self.next(t);
        let gi_a = self.corner_angle(h);
        let gi_b = self.corner_angle(b1);
        let gj_a = self.corner_angle(a1);
        let gj_b = self.corner_angle(t);
        let angle_i = gi_a + gi_b;
        let angle_j = gj_a + gj_b;
        let zero = T::zero();
        let points = [
            [zero, zero],
            disk_point(self.length[h], zero),
            disk_point(self.length[a2], gi_a),
            disk_point(self.length[b1], -gi_b),
        ];
        let diagonal = side_from_sas(self.length[a2], self.length[b1], angle_i);
        let convex = angle_i < T::PI() && angle_j < T::PI();
        Ok(QuadDevelopment { points, angle_i, angle_j, diagonal, convex })
    }

    /// Replaces the edge of `h` by the other diagonal of its quadrilateral.
    pub fn flip(&self, h: usize) -> Result<Self, SurfaceError> {
        let mut s = self.clone();
        s.flip_tracked(h, &mut [])?;
        Ok(s)
    }

    /// In-place flip that also re-expresses tracked points lying in the two
    /// affected triangles.
    pub fn flip_tracked(
        &mut self,
        h: usize,
        points: &mut [SurfacePoint<T>],
    ) -> Result<(), SurfaceError> {
        let quad = self.develop_quad(h)?;
        if !quad.convex {
            return Err(SurfaceError::NotFlippable {
                edge: self.edge_id(h),
                reason: FlipObstruction::NonConvex,
            });
        }
        let t = self.opposite[h];
        let (fa, fb) = (self.face_of[h], self.face_of[t]);
        let a1 = self.next(h);
        let a2 = self.next(a1);
        let b1 = self.next(t);
        let b2 = self.next(b1);
        let (i, j, k, l) = (self.origin[h], self.origin[a1], self.origin[a2], self.origin[b2]);

        // Hyperboloid position of each half-edge origin in the development.
        let [pi, pj, pk, pl] = quad.points.map(disk_to_hyperboloid);
        let pos_of = |e: usize| -> [T; 3] {
            if e == h || e == b1 {
                pi
            } else if e == a1 || e == t {
                pj
            } else if e == a2 {
                pk
            } else {
                pl
            }
        };
        let old_a = self.triangles[fa].map(pos_of);
        let old_b = self.triangles[fb].map(pos_of);

        self.triangles[fa] = [h, b2, a1];
        self.triangles[fb] = [t, a2, b1];
        for (c, &e) in self.triangles[fa].iter().enumerate() {
            self.face_of[e] = fa;
            self.slot[e] = c;
        }
        for (c, &e) in self.triangles[fb].iter().enumerate() {
            self.face_of[e] = fb;
            self.slot[e] = c;
        }
        self.origin[h] = k;
        self.origin[t] = l;
        self.length[h] = quad.diagonal;
        self.length[t] = quad.diagonal;
        debug_assert_eq!(self.origin[b1], i);
        debug_assert_eq!(self.origin[a1], j);

        let new_a = [pk, pl, pj];
        let new_b = [pl, pk, pi];
        for p in points.iter_mut() {
            let old = if p.triangle == fa {
                old_a
            } else if p.triangle == fb {
                old_b
            } else {
                continue;
            };
            let x = combine(&old, &p.weights);
            let wa = solve3(&new_a, &x);
            let wb = solve3(&new_b, &x);
            let min = |w: &[T; 3]| w[0].min(w[1]).min(w[2]);
            let (tri, w) = if min(&wa) >= min(&wb) { (fa, wa) } else { (fb, wb) };
            let w = w.map(|x| x.max(T::zero()));
            let s = w[0] + w[1] + w[2];
            *p = SurfacePoint { triangle: tri, weights: w.map(|x| x / s) };
        }
        Ok(())
    }

    /// Delaunay violation of an edge: the two angles opposite the edge minus
    /// the four angles adjacent to it. Positive means the developed opposite
    /// vertex lies inside the circumscribed generalized circle; in the
    /// Euclidean limit this is `2(γ_k + γ_l − π)`.
    pub fn delaunay_violation(&self, h: usize) -> T {
        let t = self.opposite[h];
        let a1 = self.next(h);
        let a2 = self.next(a1);
        let b1 = self.next(t);
        let b2 = self.next(b1);
        let opposite = self.corner_angle(a2) + self.corner_angle(b2);
        let adjacent = self.corner_angle(h)
            + self.corner_angle(a1)
            + self.corner_angle(t)
            + self.corner_angle(b1);
        opposite - adjacent
    }

    pub fn is_delaunay(&self) -> bool {
        self.edges().all(|e| self.delaunay_violation(e) <= T::angle_eps())
    }

    /// Intrinsic Delaunay retriangulation by worst-first flips.
    pub fn delaunay(&self) -> Result<Self, SurfaceError> {
        self.delaunay_with(FlipOrder::WorstFirst).map(|(s, _)| s)
    }

    /// Intrinsic Delaunay retriangulation with the given flip order; also
    /// returns the number of flips performed.
    pub fn delaunay_with(&self, order: FlipOrder) -> Result<(Self, usize), SurfaceError> {
        let mut s = self.clone();
        let e = s.n_edges();
        let limit = 100 * e * e;
        let mut picker = EdgePicker::new(order);
        let eps = T::angle_eps();
        let mut flips = 0;
        loop {
            let bad: Vec<(usize, f64)> = s
                .edges()
                .filter_map(|h| {
                    let v = s.delaunay_violation(h);
                    (v > eps).then(|| (h, v.as_f64()))
                })
                .collect();
            let Some(h) = picker.pick(&bad) else {
                return Ok((s, flips));
            };
            if flips >= limit {
                return Err(SurfaceError::IterationLimit { limit });
            }
            s.flip_tracked(h, &mut [])?;
            flips += 1;
        }
    }

    /// Projective weights of a point placed with barycentric-like weights on
    /// triangle `t`; weights are normalized to sum one.
    pub fn point(&self, t: usize, weights: [T; 3]) -> SurfacePoint<T> {
        let s = weights[0] + weights[1] + weights[2];
        SurfacePoint { triangle: t, weights: weights.map(|w| w / s) }
    }

    /// Hyperbolic distance between two corners `a`, `b` of triangle `t`.
    pub(crate) fn corner_distance(&self, t: usize, a: usize, b: usize) -> T {
        if a == b {
            return T::zero();
        }
        // side c joins corner c and c+1
        let side = if (a + 1) % 3 == b { a } else { b };
        self.length[self.triangles[t][side]]
    }

    /// Lengths indexed by half-edge.
    pub fn lengths(&self) -> &[T] {
        &self.length
    }
}

fn combine<T: Scalar>(v: &[[T; 3]; 3], w: &[T; 3]) -> [T; 3] {
    let mut x = [T::zero(); 3];
    for c in 0..3 {
        for d in 0..3 {
            x[d] += w[c] * v[c][d];
        }
    }
    x
}

fn det3<T: Scalar>(a: [T; 3], b: [T; 3], c: [T; 3]) -> T {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Solves `x = Σ w_c v_c` by Cramer's rule.
fn solve3<T: Scalar>(v: &[[T; 3]; 3], x: &[T; 3]) -> [T; 3] {
    let d = det3(v[0], v[1], v[2]);
    [det3(*x, v[1], v[2]) / d, det3(v[0], *x, v[2]) / d, det3(v[0], v[1], *x) / d]
}
