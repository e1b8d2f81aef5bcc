//! Developing a cusp into the upper half-space.
//!
//! The apex sits at `∞` and every base vertex `v` at height `z_v = e^{−h_v}`.
//! Projecting the base triangles vertically gives Euclidean triangles with
//! the prisms' side lengths, which glue to a flat torus with cone angles
//! `ω_v`. That torus is laid out in the plane along a tree-cotree cut; the
//! holonomy of the two cut generators is then a Euclidean motion, a pure
//! translation when every `κ_v` vanishes.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cusp::CuspState;
use crate::hyperbolic::uhs_to_klein;
use crate::json::{plain_vec, IndexedMap, Sig17};
use crate::scalar::Scalar;

/// Largest `|κ_v|` for which the holonomy is treated as a lattice of
/// translations.
pub const ZERO_CURVATURE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DevelopError {
    #[error("orbit export needs vanishing curvature, found |κ| = {max_kappa}")]
    RequiresZeroCurvature { max_kappa: f64 },
}

impl DevelopError {
    pub fn code(&self) -> &'static str {
        match self {
            DevelopError::RequiresZeroCurvature { .. } => "RequiresZeroCurvature",
        }
    }
}

/// Orientation-preserving Euclidean motion `x ↦ R_rot x + tr` of the plane,
/// extended to the upper half-space by fixing heights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Motion {
    pub rot: f64,
    pub tr: [f64; 2],
}

fn rotate(a: f64, x: [f64; 2]) -> [f64; 2] {
    let (s, c) = a.sin_cos();
    [c * x[0] - s * x[1], s * x[0] + c * x[1]]
}

fn wrap_angle(a: f64) -> f64 {
    let (s, c) = a.sin_cos();
    s.atan2(c)
}

impl Motion {
    pub const IDENTITY: Motion = Motion { rot: 0.0, tr: [0.0, 0.0] };

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let r = rotate(self.rot, x);
        [r[0] + self.tr[0], r[1] + self.tr[1]]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Motion) -> Motion {
        Motion { rot: wrap_angle(self.rot + other.rot), tr: self.apply(other.tr) }
    }

    pub fn inverse(&self) -> Motion {
        let t = rotate(-self.rot, self.tr);
        Motion { rot: wrap_angle(-self.rot), tr: [-t[0], -t[1]] }
    }

    /// The motion taking the segment `a0 a1` onto `b0 b1` (equal lengths).
    pub fn from_segments(a0: [f64; 2], a1: [f64; 2], b0: [f64; 2], b1: [f64; 2]) -> Motion {
        let da = [a1[0] - a0[0], a1[1] - a0[1]];
        let db = [b1[0] - b0[0], b1[1] - b0[1]];
        let rot = wrap_angle(db[1].atan2(db[0]) - da[1].atan2(da[0]));
        let r = rotate(rot, a0);
        Motion { rot, tr: [b0[0] - r[0], b0[1] - r[1]] }
    }

    /// Largest displacement of the unit-disk test points `0, e₁, e₂`.
    pub fn displacement(&self) -> f64 {
        [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
            .iter()
            .map(|&x| {
                let y = self.apply(x);
                (y[0] - x[0]).hypot(y[1] - x[1])
            })
            .fold(0.0, f64::max)
    }
}

/// A vertex copy in the upper half-space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DevVertex {
    pub p: [f64; 2],
    pub z: f64,
}

/// Planar layout of one fundamental domain of the cusp.
#[derive(Clone, Debug, PartialEq)]
pub struct DevelopedCusp {
    /// One copy per vertex: its first appearance in the layout.
    pub vertices: Vec<DevVertex>,
    /// Vertex ids of each triangle's corners.
    pub triangles: Vec<[usize; 3]>,
    /// Placed corner positions of each triangle.
    pub corners: Vec<[[f64; 2]; 3]>,
    /// Edges of the primal spanning tree; together with `generators` they
    /// form the cut graph.
    pub cut_tree: Vec<usize>,
    /// Edges crossed by the dual spanning tree used for the layout.
    pub dual_tree: Vec<usize>,
    /// The two half-edges left over by the tree-cotree decomposition.
    pub generators: [usize; 2],
    /// Holonomy of the dual loops through the generators.
    pub holonomy: [Motion; 2],
    /// `transitions[h]` maps the placed copy of the triangle across `h` onto
    /// its copy glued to the triangle containing `h`.
    pub transitions: Vec<Motion>,
    /// `2π` minus the placed Euclidean angle sum around each vertex.
    pub defects: Vec<f64>,
    /// Particle curvatures of the developed state.
    pub kappa: Vec<f64>,
}

/// Lays out the state; see the module docs.
pub fn develop<T: Scalar>(state: &CuspState<T>) -> DevelopedCusp {
    let s = state.surface();
    let (nv, nt, nh) = (s.n_vertices(), s.n_triangles(), s.n_half_edges());
    let z: Vec<f64> = state.heights().iter().map(|h| (-h.as_f64()).exp()).collect();

    // primal BFS tree
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for h in 0..nh {
        out[s.origin(h)].push(h);
    }
    let mut in_cut = vec![false; nh];
    let mut cut_tree = Vec::new();
    let mut seen = vec![false; nv];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &h in &out[v] {
            let w = s.target(h);
            if !seen[w] {
                seen[w] = true;
                in_cut[h] = true;
                in_cut[s.opposite(h)] = true;
                cut_tree.push(s.edge_id(h));
                queue.push_back(w);
            }
        }
    }

    // dual BFS tree avoiding the primal tree, placing triangles as it goes
    let base = |t: usize| -> [[f64; 2]; 3] { state.prism(t).base_points().map(|p| p.map(|x| x.as_f64())) };
    let mut corners: Vec<Option<[[f64; 2]; 3]>> = vec![None; nt];
    corners[0] = Some(base(0));
    let mut dual_tree = Vec::new();
    let mut crossed = vec![false; nh];
    let mut queue = VecDeque::from([0]);
    while let Some(a) = queue.pop_front() {
        let pa = corners[a].expect("queued triangles are placed");
        for (c, &h) in s.triangle(a).iter().enumerate() {
            let o = s.opposite(h);
            let b = s.face_of(o);
            if in_cut[h] || corners[b].is_some() {
                continue;
            }
            let (c_o, d_o) = (s.slot(o), (s.slot(o) + 1) % 3);
            let local = base(b);
            let m = Motion::from_segments(local[c_o], local[d_o], pa[(c + 1) % 3], pa[c]);
            corners[b] = Some(local.map(|x| m.apply(x)));
            crossed[h] = true;
            crossed[o] = true;
            dual_tree.push(s.edge_id(h));
            queue.push_back(b);
        }
    }
    let mut corners: Vec<[[f64; 2]; 3]> =
        corners.into_iter().map(|c| c.expect("dual graph minus a tree is connected")).collect();

    let gens: Vec<usize> = s.edges().filter(|&h| !in_cut[h] && !crossed[h]).collect();
    assert_eq!(gens.len(), 2, "tree-cotree leaves two generators on a torus");
    let generators = [gens[0], gens[1]];

    let transition = |corners: &[[[f64; 2]; 3]], h: usize| -> Motion {
        let o = s.opposite(h);
        let (pa, pb) = (corners[s.face_of(h)], corners[s.face_of(o)]);
        let (c, co) = (s.slot(h), s.slot(o));
        Motion::from_segments(pb[co], pb[(co + 1) % 3], pa[(c + 1) % 3], pa[c])
    };

    // vertex 0 to the origin, first holonomy along +x
    let triangles: Vec<[usize; 3]> = (0..nt).map(|t| s.triangle_vertices(t)).collect();
    let first_copy = |corners: &[[[f64; 2]; 3]]| -> Vec<[f64; 2]> {
        let mut p: Vec<Option<[f64; 2]>> = vec![None; nv];
        for (t, tri) in triangles.iter().enumerate() {
            for c in 0..3 {
                p[tri[c]].get_or_insert(corners[t][c]);
            }
        }
        p.into_iter().map(|x| x.expect("every vertex has a corner")).collect()
    };
    let c0 = first_copy(&corners)[0];
    let g1 = transition(&corners, generators[0]);
    let r = rotate(g1.rot, c0);
    let t1 = [r[0] + g1.tr[0] - c0[0], r[1] + g1.tr[1] - c0[1]];
    let phi = if t1[0] == 0.0 && t1[1] == 0.0 { 0.0 } else { t1[1].atan2(t1[0]) };
    let normal = Motion { rot: -phi, tr: [0.0, 0.0] }.compose(&Motion { rot: 0.0, tr: [-c0[0], -c0[1]] });
    for tri in corners.iter_mut() {
        *tri = tri.map(|x| normal.apply(x));
    }

    let transitions: Vec<Motion> = (0..nh).map(|h| transition(&corners, h)).collect();
    let holonomy = [transitions[generators[0]], transitions[generators[1]]];
    let vertices = first_copy(&corners)
        .into_iter()
        .zip(&z)
        .map(|(p, &z)| DevVertex { p, z })
        .collect();

    let mut angle_sum = vec![0.0; nv];
    for (t, tri) in triangles.iter().enumerate() {
        let q = corners[t];
        for c in 0..3 {
            let (a, b, o) = (q[(c + 1) % 3], q[(c + 2) % 3], q[c]);
            let u = [a[0] - o[0], a[1] - o[1]];
            let w = [b[0] - o[0], b[1] - o[1]];
            angle_sum[tri[c]] += (u[0] * w[1] - u[1] * w[0]).atan2(u[0] * w[0] + u[1] * w[1]);
        }
    }
    let defects = angle_sum.iter().map(|a| 2.0 * PI - a).collect();

    DevelopedCusp {
        vertices,
        triangles,
        corners,
        cut_tree,
        dual_tree,
        generators,
        holonomy,
        transitions,
        defects,
        kappa: state.kappa().iter().map(|k| k.as_f64()).collect(),
    }
}

/// Orbit of the fundamental vertices in the Klein ball, with triangulated
/// faces oriented away from the apex.
#[derive(Clone, Debug, PartialEq)]
pub struct KleinMesh {
    pub copies: usize,
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

impl KleinMesh {
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            out.push_str(&format!("v {:.16e} {:.16e} {:.16e}\n", v[0], v[1], v[2]));
        }
        for f in &self.faces {
            out.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
        }
        out
    }
}

impl DevelopedCusp {
    pub fn max_abs_kappa(&self) -> f64 {
        self.kappa.iter().fold(0.0, |m, k| m.max(k.abs()))
    }

    /// `g₁ g₂ g₁⁻¹ g₂⁻¹`.
    pub fn commutator(&self) -> Motion {
        let [a, b] = self.holonomy;
        a.compose(&b).compose(&a.inverse()).compose(&b.inverse())
    }

    /// Integer coordinates of `w` in the translation lattice of the holonomy.
    fn lattice_coords(&self, w: [f64; 2]) -> [i64; 2] {
        let [a, b] = [self.holonomy[0].tr, self.holonomy[1].tr];
        let det = a[0] * b[1] - a[1] * b[0];
        let x = (w[0] * b[1] - w[1] * b[0]) / det;
        let y = (a[0] * w[1] - a[1] * w[0]) / det;
        [x.round() as i64, y.round() as i64]
    }

    /// Lattice offset of every placed corner relative to its vertex copy.
    pub fn corner_offsets(&self) -> Vec<[[i64; 2]; 3]> {
        self.triangles
            .iter()
            .zip(&self.corners)
            .map(|(tri, q)| {
                [0, 1, 2].map(|c| {
                    let p = self.vertices[tri[c]].p;
                    self.lattice_coords([q[c][0] - p[0], q[c][1] - p[1]])
                })
            })
            .collect()
    }

    /// Applies `g₁^a g₂^b` for `|a|, |b| ≤ copies` to the fundamental vertices
    /// and maps the result to the Klein ball. Vertex `v` of copy `(a, b)` has
    /// index `((a + copies)(2·copies + 1) + (b + copies))·n + v`. Faces are
    /// kept when all three corners fall inside the generated block.
    pub fn to_klein(&self, copies: usize) -> Result<KleinMesh, DevelopError> {
        let max_kappa = self.max_abs_kappa();
        if !(max_kappa <= ZERO_CURVATURE_TOL) {
            return Err(DevelopError::RequiresZeroCurvature { max_kappa });
        }
        let n = self.vertices.len();
        let c = copies as i64;
        let side = 2 * c + 1;
        let [t1, t2] = [self.holonomy[0].tr, self.holonomy[1].tr];
        let mut vertices = Vec::with_capacity((side * side) as usize * n);
        for a in -c..=c {
            for b in -c..=c {
                for v in &self.vertices {
                    let p = [
                        v.p[0] + a as f64 * t1[0] + b as f64 * t2[0],
                        v.p[1] + a as f64 * t1[1] + b as f64 * t2[1],
                    ];
                    vertices.push(uhs_to_klein(p, v.z));
                }
            }
        }
        let index = |a: i64, b: i64, v: usize| -> Option<usize> {
            (a.abs() <= c && b.abs() <= c).then(|| ((a + c) * side + (b + c)) as usize * n + v)
        };
        let offsets = self.corner_offsets();
        let mut faces = Vec::new();
        for a in -c..=c {
            for b in -c..=c {
                for (tri, off) in self.triangles.iter().zip(&offsets) {
                    let idx: Option<Vec<usize>> =
                        (0..3).map(|k| index(a + off[k][0], b + off[k][1], tri[k])).collect();
                    if let Some(i) = idx {
                        faces.push([i[0], i[2], i[1]]);
                    }
                }
            }
        }
        Ok(KleinMesh { copies, vertices, faces })
    }

    pub fn to_doc(&self) -> DevelopedDoc {
        let motion = |m: &Motion| MotionDoc { rot: Sig17(m.rot), tr: m.tr.map(Sig17) };
        DevelopedDoc {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexDoc { p: v.p.map(Sig17), z: Sig17(v.z) })
                .collect(),
            holonomy: HolonomyDoc { g1: motion(&self.holonomy[0]), g2: motion(&self.holonomy[1]) },
            defects: IndexedMap(self.defects.iter().map(|&d| Sig17(d)).collect()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("document serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub p: [Sig17; 2],
    pub z: Sig17,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionDoc {
    pub rot: Sig17,
    pub tr: [Sig17; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomyDoc {
    pub g1: MotionDoc,
    pub g2: MotionDoc,
}

/// JSON form of a [`DevelopedCusp`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DevelopedDoc {
    pub vertices: Vec<VertexDoc>,
    pub holonomy: HolonomyDoc,
    pub defects: IndexedMap,
}

impl DevelopedDoc {
    pub fn defects(&self) -> Vec<f64> {
        plain_vec(&self.defects.0)
    }
}
