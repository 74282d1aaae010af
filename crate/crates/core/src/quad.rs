//! One-dimensional quadrature helpers.

/// Composite Simpson rule over equally spaced samples `ys` with spacing `h`.
/// `ys.len()` must be odd and at least 3.
pub fn simpson(ys: &[f64], h: f64) -> f64 {
    debug_assert!(ys.len() >= 3 && ys.len() % 2 == 1);
    let n = ys.len() - 1;
    let mut acc = ys[0] + ys[n];
    for (i, y) in ys.iter().enumerate().take(n).skip(1) {
        acc += if i % 2 == 1 { 4.0 * y } else { 2.0 * y };
    }
    acc * h / 3.0
}

/// Simpson weights (including the h/3 factor) for `len` equally spaced nodes.
pub fn simpson_weights(len: usize, h: f64) -> Vec<f64> {
    assert!(len >= 3 && len % 2 == 1, "simpson needs an odd node count >= 3");
    (0..len)
        .map(|i| {
            let w = if i == 0 || i == len - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// Trapezoid rule over equally spaced samples.
pub fn trapezoid(ys: &[f64], h: f64) -> f64 {
    match ys.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (ys[0] + ys[n - 1]) + ys[1..n - 1].iter().sum::<f64>()),
    }
}

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
