//! Small quadrature kernels shared across the crate.

use once_cell::sync::Lazy;

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence. Accurate to machine precision for n <= 1024.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

static GL32: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| gauss_legendre(32));

/// 32-node Gauss-Legendre integral of `f` over [a, b].
pub fn integrate_gl32<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = &*GL32;
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Integrates `f` over [a, b] by splitting into segments no wider than
/// `max_seg` and applying GL32 on each. Suited to integrands that are smooth
/// but sharply peaked on a known scale.
pub fn integrate_segmented<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, max_seg: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let nseg = ((b - a) / max_seg).ceil().max(1.0) as usize;
    let h = (b - a) / nseg as f64;
    let mut acc = 0.0;
    for i in 0..nseg {
        acc += integrate_gl32(&f, a + i as f64 * h, a + (i + 1) as f64 * h);
    }
    acc
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(&f, a, fa, b, fb);
    recurse(&f, a, fa, b, fb, whole, m, fm, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        // GL32 is exact for degree <= 63
        let val = integrate_gl32(|x| x.powi(10) - 3.0 * x.powi(3) + 1.0, -1.0, 2.0);
        let exact = (2f64.powi(11) - (-1f64).powi(11)) / 11.0 - 3.0 * (16.0 - 1.0) / 4.0 + 3.0;
        assert!((val - exact).abs() < 1e-12);
    }

    #[test]
    fn adaptive_simpson_handles_peaked_gaussian() {
        let s = 1e-3;
        let val = integrate_adaptive(|x| (-x * x / (2.0 * s * s)).exp(), -1.0, 1.0, 1e-12);
        let exact = s * (2.0 * std::f64::consts::PI).sqrt();
        assert!((val - exact).abs() < 1e-12, "got {val}, want {exact}");
    }

    #[test]
    fn segmented_matches_adaptive_on_truncated_gaussian() {
        let s = 0.01;
        let f = |x: f64| (-x * x / (2.0 * s * s)).exp();
        let a = integrate_segmented(f, -0.5, 0.5, s);
        let b = integrate_adaptive(f, -0.5, 0.5, 1e-13);
        assert!((a - b).abs() < 1e-12);
    }
}
