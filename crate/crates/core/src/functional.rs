//! Total scalar curvature `S = −2 Vol + Σ h_v κ_v + Σ ℓ_e (π − θ_e)`, its
//! gradient `κ` and its Hessian in the heights.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::cusp::CuspState;
use crate::scalar::Scalar;

/// Gradient of `S`: the particle curvatures.
pub fn curvature_vector<T: Scalar>(state: &CuspState<T>) -> Vec<T> {
    state.kappa().to_vec()
}

/// Sum of the (untruncated) semi-ideal pyramid volumes.
pub fn volume<T: Scalar>(state: &CuspState<T>) -> T {
    state
        .prisms()
        .iter()
        .map(|p| p.volume().expect("an existing prism has a non-degenerate base"))
        .sum()
}

/// Total scalar curvature. Independent of the gauge since `Σ κ = 0`.
pub fn total_scalar_curvature<T: Scalar>(state: &CuspState<T>) -> T {
    scalar_curvature_with_volume(state, volume(state))
}

pub(crate) fn scalar_curvature_with_volume<T: Scalar>(state: &CuspState<T>, vol: T) -> T {
    let s = state.surface();
    let hk: T = state.heights().iter().zip(state.kappa()).map(|(&h, &k)| h * k).sum();
    let edges: T = s.edges().map(|e| s.length(e) * (T::PI() - state.theta(e))).sum();
    -T::two() * vol + hk + edges
}

/// Symmetric sparse matrix `∂²S/∂h_i∂h_j` with zero row sums.
#[derive(Clone, Debug, PartialEq)]
pub struct HessianMatrix<T> {
    n: usize,
    diag: Vec<T>,
    /// Off-diagonal entries `(i, j, value)`, sorted by `(i, j)`.
    off: Vec<(usize, usize, T)>,
}

impl<T: Scalar> HessianMatrix<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diag
    }

    pub fn off_diagonal(&self) -> &[(usize, usize, T)] {
        &self.off
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i == j {
            return self.diag[i];
        }
        match self.off.binary_search_by(|&(a, b, _)| (a, b).cmp(&(i, j))) {
            Ok(k) => self.off[k].2,
            Err(_) => T::zero(),
        }
    }

    /// Diagonal plus the off-diagonal entries of row `i`, added in the order
    /// used to build the diagonal.
    pub fn row_sum(&self, i: usize) -> T {
        let s: T = self.off.iter().filter(|e| e.0 == i).map(|e| e.2).sum();
        self.diag[i] + s
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, d) in self.diag.iter().enumerate() {
            m[(i, i)] = d.as_f64();
        }
        for &(i, j, v) in &self.off {
            m[(i, j)] = v.as_f64();
        }
        m
    }

    /// Coordinate list: a `n nnz` header, then `i j value` lines.
    pub fn to_coo(&self) -> String {
        let mut entries: Vec<(usize, usize, f64)> =
            self.diag.iter().enumerate().map(|(i, d)| (i, i, d.as_f64())).collect();
        entries.extend(self.off.iter().map(|&(i, j, v)| (i, j, v.as_f64())));
        entries.sort_by_key(|e| (e.0, e.1));
        let mut out = format!("{} {}\n", self.n, entries.len());
        for (i, j, v) in entries {
            out.push_str(&format!("{i} {j} {v:.16e}\n"));
        }
        out
    }
}

/// Analytic Hessian of `S`.
///
/// For each non-loop edge between `i` and `j` with dihedral angles `α`, `α′`:
/// `∂κ_i/∂h_j = e^{h_j−h_i}(cot α + cot α′) / (sinh ℓ sin² ρ_ij)`, with
/// `cot α + cot α′ = sin θ / (sin α sin α′)`. The entry for `(j, i)` is
/// evaluated from the `j` end. Flat edges contribute exactly zero. Diagonal
/// entries are negative row sums, which also accounts for loops.
pub fn hessian<T: Scalar>(state: &CuspState<T>) -> HessianMatrix<T> {
    let s = state.surface();
    let h = state.heights();
    let n = s.n_vertices();
    let mut off: BTreeMap<(usize, usize), T> = BTreeMap::new();
    for e in s.edges() {
        let (i, j) = (s.origin(e), s.target(e));
        if i == j || state.is_flat(e) {
            continue;
        }
        let o = s.opposite(e);
        let (pa, sa) = (state.prism(s.face_of(e)), s.slot(e));
        let pb = state.prism(s.face_of(o));
        let (a, b) = (pa.dihedral(sa), pb.dihedral(s.slot(o)));
        let cot_sum = (a + b).sin() / (a.sin() * b.sin());
        let base = cot_sum / s.length(e).sinh();
        let [rho_i, rho_j] = pa.rho[sa];
        let hij = (h[j] - h[i]).exp() * base / (rho_i.sin() * rho_i.sin());
        let hji = (h[i] - h[j]).exp() * base / (rho_j.sin() * rho_j.sin());
        *off.entry((i, j)).or_insert(T::zero()) += hij;
        *off.entry((j, i)).or_insert(T::zero()) += hji;
    }
    let off: Vec<(usize, usize, T)> = off.into_iter().map(|((i, j), v)| (i, j, v)).collect();
    let mut diag = vec![T::zero(); n];
    for (i, d) in diag.iter_mut().enumerate() {
        let row: T = off.iter().filter(|e| e.0 == i).map(|e| e.2).sum();
        *d = -row;
    }
    HessianMatrix { n, diag, off }
}

/// Orthonormal basis of the sum-zero subspace (Helmert columns).
pub fn gauge_basis(n: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(n, n.saturating_sub(1));
    for k in 1..n {
        let c = 1.0 / ((k * (k + 1)) as f64).sqrt();
        for r in 0..k {
            q[(r, k - 1)] = c;
        }
        q[(k, k - 1)] = -(k as f64) * c;
    }
    q
}

/// Eigenvalues (ascending) of the Hessian restricted to the sum-zero subspace.
pub fn gauge_eigenvalues(h: &DMatrix<f64>) -> Vec<f64> {
    let q = gauge_basis(h.nrows());
    if q.ncols() == 0 {
        return Vec::new();
    }
    let b = q.transpose() * h * &q;
    let mut ev: Vec<f64> = SymmetricEigen::new(b).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Kernel of the Hessian on the sum-zero subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct NullspaceReport {
    /// Connected components of the graph of true edges, each sorted, ordered
    /// by smallest vertex.
    pub components: Vec<Vec<usize>>,
    /// `components − 1`.
    pub deficiency: usize,
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues with `|λ| ≤ 1e-8 ‖H‖_F`.
    pub near_zero: usize,
    pub norm: f64,
}

pub fn nullspace_analysis<T: Scalar>(state: &CuspState<T>) -> NullspaceReport {
    let s = state.surface();
    let n = s.n_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in state.true_edges() {
        let (a, b) = (find(&mut parent, s.origin(e)), find(&mut parent, s.target(e)));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let components: Vec<Vec<usize>> = groups.into_values().collect();
    let dense = hessian(state).to_dense();
    let norm = dense.norm();
    let eigenvalues = gauge_eigenvalues(&dense);
    let near_zero = eigenvalues.iter().filter(|l| l.abs() <= 1e-8 * norm).count();
    NullspaceReport { deficiency: components.len() - 1, components, eigenvalues, near_zero, norm }
}
