//! Bracketing root refinement.
//!
//! Bisection only. The discriminant is smooth but extremely steep near
//! permittivity poles, and the impedance determinant can have large dynamic
//! range across a gap, so we trade iteration count for unconditional
//! robustness everywhere a root is refined.

use crate::real::Real;

/// Refine a sign change of `f` inside `[a, b]` down to a relative interval
/// width of `rel_tol * max(1, |x|)`.
///
/// `fa` and `fb` must already have opposite (or zero) signs; panics otherwise
/// since callers are expected to have established the bracket.
pub fn bisect<R: Real, F: FnMut(R) -> R>(mut f: F, a: R, b: R, fa: R, fb: R, rel_tol: R) -> R {
    if fa == R::zero() {
        return a;
    }
    if fb == R::zero() {
        return b;
    }
    assert!(
        (fa > R::zero()) != (fb > R::zero()),
        "bisect called without a sign change"
    );
    let (mut lo, mut hi, mut flo) = (a, b, fa);
    // 2^-120 < 1e-36: enough for any rel_tol >= machine epsilon.
    for _ in 0..120 {
        let mid = (lo + hi) * R::lit(0.5);
        let width = hi - lo;
        if width <= rel_tol * R::one().max(mid.abs()) || mid <= lo || mid >= hi {
            return mid;
        }
        let fm = f(mid);
        if fm == R::zero() {
            return mid;
        }
        if (fm > R::zero()) == (flo > R::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * R::lit(0.5)
}

/// Scan `f` on `n` uniform points over `[a, b]` and return every bracket
/// `(x_i, x_{i+1}, f_i, f_{i+1})` across which the sign changes.
pub fn sign_change_brackets<R: Real, F: FnMut(R) -> R>(
    mut f: F,
    a: R,
    b: R,
    n: usize,
) -> Vec<(R, R, R, R)> {
    assert!(n >= 2);
    let h = (b - a) / R::from_usize_(n - 1);
    let mut out = Vec::new();
    let mut x_prev = a;
    let mut f_prev = f(a);
    for i in 1..n {
        let x = if i == n - 1 { b } else { a + h * R::from_usize_(i) };
        let fx = f(x);
        if f_prev == R::zero() || (fx > R::zero()) != (f_prev > R::zero()) {
            out.push((x_prev, x, f_prev, fx));
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}
