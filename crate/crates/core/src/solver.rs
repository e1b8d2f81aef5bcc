//! Newton ascent on the total scalar curvature.
//!
//! [`solve_particles`] maximizes the concave function `F(h) = S(h) − κ*·h`
//! over the heights, whose gradient is `κ − κ*`. Every trial point is made
//! convex by the flip algorithm; a trial that cannot be made convex, or does
//! not increase `F` enough, halves the step.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cusp::{build_state, make_feasible, make_feasible_tracked, normalize_gauge, CuspError, CuspState};
use crate::functional::{
    gauge_basis, gauge_eigenvalues, hessian, nullspace_analysis, scalar_curvature_with_volume,
    volume, NullspaceReport,
};
use crate::scalar::Scalar;
use crate::surface::{ConeSurface, FlipOrder, SurfaceError};

/// Starting heights.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Start<T> {
    /// `h = 0` over the Delaunay triangulation.
    #[default]
    Zero,
    /// Given heights over the input triangulation, made convex by flips.
    Heights(Vec<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions<T> {
    /// Stop when `‖κ − κ*‖_∞ ≤ tol_kappa`.
    pub tol_kappa: f64,
    pub max_iter: usize,
    /// Armijo sufficient-increase factor.
    pub armijo: f64,
    /// Step reduction factor of the line search.
    pub backtrack: f64,
    /// Initial Levenberg shift relative to `‖H‖`.
    pub levenberg: f64,
    /// Step reductions per iteration before giving up.
    pub max_halvings: usize,
    pub flip_order: FlipOrder,
    pub start: Start<T>,
}

impl<T> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions {
            tol_kappa: 1e-10,
            max_iter: 200,
            armijo: 1e-4,
            backtrack: 0.5,
            levenberg: 1e-8,
            max_halvings: 60,
            flip_order: FlipOrder::WorstFirst,
            start: Start::Zero,
        }
    }
}

/// One accepted Newton step.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub iteration: usize,
    /// `‖κ − κ*‖_∞` before the step.
    pub residual: f64,
    /// `S − κ*·h` before the step.
    pub objective: f64,
    /// Accepted step length (1 is the full Newton step).
    pub step: f64,
    pub halvings: usize,
    pub flips: usize,
    /// Levenberg shift used, relative to `‖H‖`.
    pub regularization: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport<T> {
    pub state: CuspState<T>,
    pub target: Vec<f64>,
    pub iterations: usize,
    /// `‖κ − κ*‖_∞`.
    pub residual: f64,
    pub scalar_curvature: f64,
    pub volume: f64,
    /// Flips performed, including those of the start.
    pub flips: usize,
    pub boundary_stall: bool,
    /// `θ` per canonical edge, in increasing edge order.
    pub theta: Vec<(usize, f64)>,
    pub flat_edges: Vec<usize>,
    pub trace: Vec<TraceStep>,
}

impl<T: Scalar> SolveReport<T> {
    /// Rebuilds the final state from its triangulation and heights and checks
    /// the residual, convexity and prism existence from scratch.
    pub fn certify(&self, tol: f64) -> Result<(), String> {
        let st = build_state(self.state.surface(), self.state.heights())
            .map_err(|e| format!("final state does not rebuild: {e}"))?;
        let r = residual(st.kappa(), &self.target);
        if r > tol {
            return Err(format!("residual {r} above {tol}"));
        }
        let pi = std::f64::consts::PI;
        for e in st.surface().edges() {
            let t = st.theta(e).as_f64();
            if t > pi + T::ANGLE_EPS {
                return Err(format!("edge {e} has θ = {t}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SolveError<T> {
    #[error("target curvatures sum to {sum}, not zero")]
    TargetSumNonzero { sum: f64 },
    #[error("expected {expected} target curvatures, found {found}")]
    TargetLength { expected: usize, found: usize },
    #[error("no convergence in {} iterations (residual {})", .0.iterations, .0.residual)]
    MaxIterExceeded(Box<SolveReport<T>>),
    #[error("no feasible ascent step at residual {}", .0.residual)]
    BoundaryStall(Box<SolveReport<T>>),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("start is infeasible: {0}")]
    Start(#[from] CuspError),
}

impl<T> SolveError<T> {
    pub fn code(&self) -> &'static str {
        match self {
            SolveError::TargetSumNonzero { .. } => "TargetSumNonzero",
            SolveError::TargetLength { .. } => "TargetLength",
            SolveError::MaxIterExceeded(_) => "MaxIterExceeded",
            SolveError::BoundaryStall(_) => "BoundaryStall",
            SolveError::Surface(e) => e.code(),
            SolveError::Start(e) => e.code(),
        }
    }

    /// Best state reached, for failures that have one.
    pub fn report(&self) -> Option<&SolveReport<T>> {
        match self {
            SolveError::MaxIterExceeded(r) | SolveError::BoundaryStall(r) => Some(r),
            _ => None,
        }
    }
}

fn residual<T: Scalar>(kappa: &[T], target: &[f64]) -> f64 {
    kappa.iter().zip(target).map(|(k, t)| (k.as_f64() - t).abs()).fold(0.0, f64::max)
}

fn objective<T: Scalar>(state: &CuspState<T>, target: &[f64]) -> (f64, f64) {
    let vol = volume(state);
    let s = scalar_curvature_with_volume(state, vol).as_f64();
    let kh: f64 = state.heights().iter().zip(target).map(|(h, t)| h.as_f64() * t).sum();
    (s - kh, vol.as_f64())
}

/// Finds the convex cusp with vanishing particle curvatures.
pub fn solve_cusp<T: Scalar>(
    surface: &ConeSurface<T>,
    opts: &SolveOptions<T>,
) -> Result<SolveReport<T>, SolveError<T>> {
    solve_particles(surface, &vec![0.0; surface.n_vertices()], opts)
}

/// Finds the convex cusp with particles of curvatures `target`.
pub fn solve_particles<T: Scalar>(
    surface: &ConeSurface<T>,
    target: &[f64],
    opts: &SolveOptions<T>,
) -> Result<SolveReport<T>, SolveError<T>> {
    let n = surface.n_vertices();
    if target.len() != n {
        return Err(SolveError::TargetLength { expected: n, found: target.len() });
    }
    let sum: f64 = target.iter().sum();
    let scale: f64 = target.iter().map(|k| k.abs()).sum::<f64>().max(1.0);
    if sum.abs() > 1e-12 * scale {
        return Err(SolveError::TargetSumNonzero { sum });
    }
    let mean = sum / n as f64;
    let target: Vec<f64> = target.iter().map(|k| k - mean).collect();

    let (mut state, mut flips) = match &opts.start {
        Start::Zero => {
            let d = surface.delaunay()?;
            let f = make_feasible(&d, &vec![T::zero(); n])?;
            (f.state, f.flips)
        }
        Start::Heights(h) => {
            let f = make_feasible_tracked(surface, h, opts.flip_order, &mut [], |_, _| {})?;
            (f.state, f.flips)
        }
    };
    let q = gauge_basis(n);
    let mut lev = opts.levenberg;
    let mut trace = Vec::new();
    let mut iter = 0;
    let (mut f0, mut vol) = objective(&state, &target);
    loop {
        let g: Vec<f64> = state.kappa().iter().zip(&target).map(|(k, t)| k.as_f64() - t).collect();
        let res = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let report = |state: CuspState<T>, stall: bool, trace: Vec<TraceStep>, f: f64, vol: f64| {
            let theta = state.surface().edges().map(|e| (e, state.theta(e).as_f64())).collect();
            let flat_edges = state.flat_edges();
            let hk: f64 = state.heights().iter().zip(&target).map(|(h, t)| h.as_f64() * t).sum();
            SolveReport {
                state,
                target: target.clone(),
                iterations: iter,
                residual: res,
                scalar_curvature: f + hk,
                volume: vol,
                flips,
                boundary_stall: stall,
                theta,
                flat_edges,
                trace,
            }
        };
        if res <= opts.tol_kappa {
            return Ok(report(state, false, trace, f0, vol));
        }
        if iter >= opts.max_iter {
            return Err(SolveError::MaxIterExceeded(Box::new(report(state, false, trace, f0, vol))));
        }

        let h_dense = hessian(&state).to_dense();
        let norm = h_dense.norm();
        let b = -(q.transpose() * &h_dense * &q);
        let rhs = q.transpose() * DVector::from_vec(g.clone());
        let near_singular = gauge_eigenvalues(&h_dense).last().is_some_and(|&l| l > -1e-10 * norm);
        let mut shift = if near_singular { lev } else { 0.0 };
        let y = loop {
            let m = &b + DMatrix::identity(n - 1, n - 1) * (shift * norm.max(f64::MIN_POSITIVE));
            if let Some(c) = Cholesky::new(m) {
                break c.solve(&rhs);
            }
            shift = (shift * 10.0).max(opts.levenberg);
        };
        let delta = &q * y;
        let slope: f64 = delta.iter().zip(&g).map(|(d, g)| d * g).sum();
        let h0: Vec<f64> = state.heights().iter().map(|h| h.as_f64()).collect();

        let mut t = 1.0;
        let mut accepted = None;
        for halvings in 0..=opts.max_halvings {
            let trial: Vec<T> = h0.iter().zip(delta.iter()).map(|(h, d)| T::lit(h + t * d)).collect();
            let found = make_feasible_tracked(state.surface(), &trial, opts.flip_order, &mut [], |_, _| {});
            if let Ok(f) = found {
                let (f1, v1) = objective(&f.state, &target);
                let armijo = f1 >= f0 + opts.armijo * t * slope;
                // below the quadrature noise only the residual can rank trials
                let noise = 1e-10 * (1.0 + f0.abs());
                let quiet = t * slope <= noise && residual(f.state.kappa(), &target) < res;
                if armijo || quiet {
                    accepted = Some((f, f1, v1, halvings));
                    break;
                }
            }
            t *= opts.backtrack;
        }
        let Some((f, f1, v1, halvings)) = accepted else {
            return Err(SolveError::BoundaryStall(Box::new(report(state, true, trace, f0, vol))));
        };
        if near_singular {
            lev = if halvings == 0 { (lev / 10.0).max(opts.levenberg) } else { lev * 10.0 };
        }
        trace.push(TraceStep {
            iteration: iter,
            residual: res,
            objective: f0,
            step: t,
            halvings,
            flips: f.flips,
            regularization: shift,
        });
        flips += f.flips;
        state = f.state;
        f0 = f1;
        vol = v1;
        iter += 1;
    }
}

/// Nullspace of the Hessian and the resulting rigidity verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct RigidityReport {
    pub nullspace: NullspaceReport,
    /// Smallest `|λ|` among gauge-subspace eigenvalues not counted as zero.
    pub smallest_nonzero: Option<f64>,
    /// Infinitesimally rigid: deficiency zero.
    pub rigid: bool,
}

pub fn rigidity_report<T: Scalar>(state: &CuspState<T>) -> RigidityReport {
    let nullspace = nullspace_analysis(state);
    let cut = 1e-8 * nullspace.norm;
    let smallest_nonzero = nullspace
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .filter(|&l| l > cut)
        .min_by(f64::total_cmp);
    RigidityReport { rigid: nullspace.deficiency == 0, smallest_nonzero, nullspace }
}

/// A convex state with random heights of size up to `amplitude`: starts at
/// the isosceles Delaunay cusp and halves the way towards random heights
/// until the flip algorithm succeeds with a positive margin.
pub fn random_feasible_state<T: Scalar>(
    surface: &ConeSurface<T>,
    amplitude: f64,
    seed: u64,
) -> Result<CuspState<T>, SolveError<T>> {
    let n = surface.n_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let goal: Vec<f64> = (0..n).map(|_| rng.random_range(-amplitude..=amplitude)).collect();
    let goal = normalize_gauge(&goal);
    let base = surface.delaunay()?;
    let mut t = 1.0;
    for _ in 0..60 {
        let h: Vec<T> = goal.iter().map(|g| T::lit(t * g)).collect();
        if let Ok(f) = make_feasible(&base, &h) {
            if n == 1 || f.state.feasibility_margin() > T::zero() {
                return Ok(f.state);
            }
        }
        t *= 0.5;
    }
    Ok(make_feasible(&base, &vec![T::zero(); n])?.state)
}
