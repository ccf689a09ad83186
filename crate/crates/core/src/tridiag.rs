/// Thomas algorithm for `lower[k] x[k-1] + diag[k] x[k] + upper[k] x[k+1] = rhs[k]`.
///
/// `lower[0]` and `upper[n-1]` are ignored. The solution overwrites `rhs`;
/// `scratch` must hold at least `n` values. Returns `false` when a pivot
/// vanishes or the result is not finite.
pub fn solve_in_place(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &mut [f64],
    scratch: &mut [f64],
) -> bool {
    let n = rhs.len();
    debug_assert!(lower.len() >= n && diag.len() >= n && upper.len() >= n && scratch.len() >= n);
    if n == 0 {
        return true;
    }
    let mut pivot = diag[0];
    if pivot == 0.0 {
        return false;
    }
    rhs[0] /= pivot;
    for k in 1..n {
        scratch[k] = upper[k - 1] / pivot;
        pivot = diag[k] - lower[k] * scratch[k];
        if pivot == 0.0 {
            return false;
        }
        rhs[k] = (rhs[k] - lower[k] * rhs[k - 1]) / pivot;
    }
    for k in (0..n - 1).rev() {
        rhs[k] -= scratch[k + 1] * rhs[k + 1];
    }
    rhs.iter().all(|v| v.is_finite())
}

/// Allocating convenience wrapper around [`solve_in_place`].
pub fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let mut x = rhs.to_vec();
    let mut scratch = vec![0.0; rhs.len()];
    solve_in_place(lower, diag, upper, &mut x, &mut scratch).then_some(x)
}
