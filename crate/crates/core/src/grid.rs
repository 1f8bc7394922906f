//! Sampling grids for frequency and time axes.

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(
        lo > 0.0 && hi >= lo && n >= 2,
        "bad log grid [{lo}, {hi}] x {n}"
    );
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + step * i as f64).exp(),
        })
        .collect()
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi >= lo && n >= 2, "bad linear grid [{lo}, {hi}] x {n}");
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

/// Default frequency grid: `2000` log-spaced points on `[1e-6, 1e3]`.
pub fn default_frequency_grid() -> Vec<f64> {
    log_space(1e-6, 1e3, 2000)
}

/// Inserts the geometric midpoint between every pair of neighbours, so the
/// result contains the input grid.
pub fn refine_log(grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * grid.len());
    for w in grid.windows(2) {
        out.push(w[0]);
        out.push((w[0] * w[1]).sqrt());
    }
    out.extend(grid.last());
    out
}
