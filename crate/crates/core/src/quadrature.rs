//! Adaptive Simpson quadrature on an interval.

use crate::scalar::Scalar;

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, tol: T) -> T {
    let m = (a + b) / T::two();
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    refine(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson<T: Scalar>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<T: Scalar>(
    f: &impl Fn(T) -> T,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
) -> T {
    let m = (a + b) / T::two();
    let (lm, rm) = ((a + m) / T::two(), (m + b) / T::two());
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * tol {
        return left + right + delta / T::lit(15.0);
    }
    let half = tol / T::two();
    refine(f, a, m, fa, flm, fm, left, half, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, half, depth - 1)
}
