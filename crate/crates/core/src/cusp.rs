//! Cusps with particles over a triangulated cone metric.
//!
//! A [`CuspState`] glues one horoprism per triangle. It is convex when every
//! edge's total dihedral angle `θ_e` (the sum of the dihedral angles of the two
//! adjacent prisms) is at most `π`. [`make_feasible`] restores convexity by
//! flipping bad edges, which only raises the piecewise distance-like function
//! of the heights.

use thiserror::Error;

use crate::prism::{Horoprism, PrismError};
use crate::scalar::Scalar;
use crate::surface::{ConeSurface, EdgePicker, FlipObstruction, FlipOrder, SurfaceError, SurfacePoint};

/// Why a height vector is not realized by a convex cusp.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Infeasibility {
    #[error("prism over triangle {triangle} does not exist: {source}")]
    PrismMissing { triangle: usize, source: PrismError },
    #[error("edge {edge} is bad: θ = {theta} > π")]
    BadEdge { edge: usize, theta: f64 },
    #[error("bad edge {edge} (θ = {theta}) cannot be flipped: {reason}")]
    StuckBadEdge { edge: usize, theta: f64, reason: FlipObstruction },
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CuspError {
    #[error("infeasible heights: {0}")]
    Infeasible(#[from] Infeasibility),
    #[error("no convex triangulation after {limit} flips")]
    IterationLimit { limit: usize },
    #[error("expected {expected} heights, found {found}")]
    HeightCount { expected: usize, found: usize },
}

impl CuspError {
    pub fn code(&self) -> &'static str {
        match self {
            CuspError::Infeasible(Infeasibility::PrismMissing { .. }) => "PrismMissing",
            CuspError::Infeasible(Infeasibility::BadEdge { .. }) => "BadEdge",
            CuspError::Infeasible(Infeasibility::StuckBadEdge { .. }) => "StuckBadEdge",
            CuspError::IterationLimit { .. } => "IterationLimit",
            CuspError::HeightCount { .. } => "HeightCount",
        }
    }
}

/// A triangulation of the fixed metric together with heights and all derived
/// angles. Heights are kept in the sum-zero gauge.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspState<T> {
    surface: ConeSurface<T>,
    heights: Vec<T>,
    prisms: Vec<Horoprism<T>>,
    theta: Vec<T>,
    omega: Vec<T>,
    kappa: Vec<T>,
}

/// Shifts `h` to the sum-zero gauge.
pub fn normalize_gauge<T: Scalar>(h: &[T]) -> Vec<T> {
    if h.is_empty() {
        return Vec::new();
    }
    let mean = h.iter().copied().sum::<T>() / T::lit(h.len() as f64);
    h.iter().map(|&x| x - mean).collect()
}

impl<T: Scalar> CuspState<T> {
    /// Builds every prism and angle without checking convexity.
    fn assemble(surface: ConeSurface<T>, heights: &[T]) -> Result<Self, CuspError> {
        if heights.len() != surface.n_vertices() {
            return Err(CuspError::HeightCount {
                expected: surface.n_vertices(),
                found: heights.len(),
            });
        }
        let heights = normalize_gauge(heights);
        let prisms = (0..surface.n_triangles())
            .map(|t| prism_over(&surface, &heights, t))
            .collect::<Result<Vec<_>, _>>()?;
        let mut s = CuspState {
            theta: vec![T::zero(); surface.n_half_edges()],
            omega: vec![T::zero(); surface.n_vertices()],
            kappa: vec![T::zero(); surface.n_vertices()],
            surface,
            heights,
            prisms,
        };
        for h in 0..s.surface.n_half_edges() {
            s.update_theta(h);
        }
        s.update_curvature();
        Ok(s)
    }

    fn update_theta(&mut self, h: usize) {
        let o = self.surface.opposite(h);
        let a = self.prisms[self.surface.face_of(h)].dihedral(self.surface.slot(h));
        let b = self.prisms[self.surface.face_of(o)].dihedral(self.surface.slot(o));
        self.theta[h] = a + b;
    }

    fn update_curvature(&mut self) {
        let mut omega = vec![T::zero(); self.surface.n_vertices()];
        for (t, p) in self.prisms.iter().enumerate() {
            for (c, v) in self.surface.triangle_vertices(t).into_iter().enumerate() {
                omega[v] += p.omega[c];
            }
        }
        self.kappa = omega.iter().map(|&w| T::two() * T::PI() - w).collect();
        self.omega = omega;
    }

    pub fn surface(&self) -> &ConeSurface<T> {
        &self.surface
    }

    /// Heights in the sum-zero gauge, indexed by vertex.
    pub fn heights(&self) -> &[T] {
        &self.heights
    }

    pub fn prisms(&self) -> &[Horoprism<T>] {
        &self.prisms
    }

    pub fn prism(&self, t: usize) -> &Horoprism<T> {
        &self.prisms[t]
    }

    /// Total dihedral angle at the edge of half-edge `h`.
    pub fn theta(&self, h: usize) -> T {
        self.theta[h]
    }

    /// Total particle angle `ω_v` at each vertex.
    pub fn omega(&self) -> &[T] {
        &self.omega
    }

    /// Particle curvatures `κ_v = 2π − ω_v`.
    pub fn kappa(&self) -> &[T] {
        &self.kappa
    }

    /// `θ_e > π + ε`.
    pub fn is_bad(&self, h: usize) -> bool {
        self.theta[h] > T::PI() + T::angle_eps()
    }

    /// `|θ_e − π| ≤ ε`: the edge lies inside a flat face.
    pub fn is_flat(&self, h: usize) -> bool {
        (self.theta[h] - T::PI()).abs() <= T::angle_eps()
    }

    /// Bad edges as `(edge, θ − π)` in increasing edge order.
    fn bad_edges(&self) -> Vec<(usize, f64)> {
        self.surface
            .edges()
            .filter(|&e| self.is_bad(e))
            .map(|e| (e, (self.theta[e] - T::PI()).as_f64()))
            .collect()
    }

    /// Canonical edge ids with `θ ≤ π − ε`.
    pub fn true_edges(&self) -> Vec<usize> {
        self.surface.edges().filter(|&e| self.theta[e] < T::PI() - T::angle_eps()).collect()
    }

    /// Canonical edge ids with `|θ − π| ≤ ε`.
    pub fn flat_edges(&self) -> Vec<usize> {
        self.surface.edges().filter(|&e| self.is_flat(e)).collect()
    }

    /// Distance to the boundary of the feasible set of this triangulation:
    /// the least of `π − θ_e` and `ℓ_e − |h_i − h_j|` over all edges.
    pub fn feasibility_margin(&self) -> T {
        let mut m = T::infinity();
        for e in self.surface.edges() {
            m = m.min(T::PI() - self.theta[e]);
            let gap = self.heights[self.surface.origin(e)] - self.heights[self.surface.target(e)];
            m = m.min(self.surface.length(e) - gap.abs());
        }
        m.max(T::zero())
    }

    /// Value of the piecewise distance-like function at a surface point.
    pub fn pd_value(&self, p: &SurfacePoint<T>) -> T {
        pd_value(&self.surface, &self.heights, p)
    }
}

fn prism_over<T: Scalar>(
    surface: &ConeSurface<T>,
    heights: &[T],
    t: usize,
) -> Result<Horoprism<T>, Infeasibility> {
    let h = surface.triangle_vertices(t).map(|v| heights[v]);
    Horoprism::new(surface.triangle_lengths(t), h)
        .map_err(|source| Infeasibility::PrismMissing { triangle: t, source })
}

/// Builds a convex cusp state; fails on the first missing prism or the worst
/// bad edge.
pub fn build_state<T: Scalar>(
    surface: &ConeSurface<T>,
    heights: &[T],
) -> Result<CuspState<T>, CuspError> {
    let s = CuspState::assemble(surface.clone(), heights)?;
    let bad = s.bad_edges();
    if let Some(&(edge, _)) = bad.iter().max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0))) {
        return Err(Infeasibility::BadEdge { edge, theta: s.theta[edge].as_f64() }.into());
    }
    Ok(s)
}

/// Result of the flip algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct Feasible<T> {
    pub state: CuspState<T>,
    pub flips: usize,
}

/// Flips bad edges (worst first) until the cusp over `surface` is convex.
pub fn make_feasible<T: Scalar>(
    surface: &ConeSurface<T>,
    heights: &[T],
) -> Result<Feasible<T>, CuspError> {
    make_feasible_tracked(surface, heights, FlipOrder::WorstFirst, &mut [], |_, _| {})
}

/// [`make_feasible`] with a chosen flip order. Tracked points are carried
/// through every flip and `observe` sees the state after each one.
pub fn make_feasible_tracked<T: Scalar>(
    surface: &ConeSurface<T>,
    heights: &[T],
    order: FlipOrder,
    points: &mut [SurfacePoint<T>],
    mut observe: impl FnMut(&CuspState<T>, &[SurfacePoint<T>]),
) -> Result<Feasible<T>, CuspError> {
    let mut s = CuspState::assemble(surface.clone(), heights)?;
    let e = s.surface.n_edges();
    let limit = 100 * e * e;
    let mut picker = EdgePicker::new(order);
    let mut flips = 0;
    loop {
        let bad = s.bad_edges();
        if bad.is_empty() {
            break;
        }
        let mut stuck = None;
        let flippable: Vec<(usize, f64)> = bad
            .iter()
            .copied()
            .filter(|&(edge, _)| match s.surface.develop_quad(edge) {
                Ok(q) if q.convex => true,
                Ok(_) => {
                    stuck.get_or_insert((edge, FlipObstruction::NonConvex));
                    false
                }
                Err(_) => {
                    stuck.get_or_insert((edge, FlipObstruction::SameTriangle));
                    false
                }
            })
            .collect();
        let Some(edge) = picker.pick(&flippable) else {
            let (edge, reason) = stuck.expect("a bad edge exists");
            let theta = s.theta[edge].as_f64();
            return Err(Infeasibility::StuckBadEdge { edge, theta, reason }.into());
        };
        if flips >= limit {
            return Err(CuspError::IterationLimit { limit });
        }
        s.surface.flip_tracked(edge, points).map_err(|err| match err {
            SurfaceError::NotFlippable { edge, reason } => {
                let theta = s.theta[edge].as_f64();
                CuspError::from(Infeasibility::StuckBadEdge { edge, theta, reason })
            }
            other => unreachable!("flip of a convex quadrilateral failed: {other}"),
        })?;
        flips += 1;
        let faces = [s.surface.face_of(edge), s.surface.face_of(s.surface.opposite(edge))];
        for t in faces {
            s.prisms[t] = prism_over(&s.surface, &s.heights, t)?;
        }
        for t in faces {
            for h in s.surface.triangle(t) {
                s.update_theta(h);
                s.update_theta(s.surface.opposite(h));
            }
        }
        s.update_curvature();
        observe(&s, points);
    }
    Ok(Feasible { state: s, flips })
}

/// Piecewise distance-like function of `heights` at a surface point:
/// `e^{h̃} = Σ w_c e^{h_c} / √(Σ_{a,b} w_a w_b cosh ℓ_ab)`.
pub fn pd_value<T: Scalar>(surface: &ConeSurface<T>, heights: &[T], p: &SurfacePoint<T>) -> T {
    let v = surface.triangle_vertices(p.triangle);
    let w = p.weights;
    let mut norm = T::zero();
    for a in 0..3 {
        for b in 0..3 {
            norm += w[a] * w[b] * surface.corner_distance(p.triangle, a, b).cosh();
        }
    }
    let num: T = (0..3).map(|c| w[c] * heights[v[c]].exp()).sum();
    (num / norm.sqrt()).ln()
}
