//! Quadrature building blocks: Gauss-Legendre rules and adaptive Simpson.

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_deriv(n, x);
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

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
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

/// ∫_a^b f via an n-point Gauss-Legendre rule.
pub fn integrate_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(&weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome {
    pub value: f64,
    pub residual: f64,
    pub converged: bool,
}

/// Adaptive Simpson with absolute tolerance; reports the residual bound
/// instead of erroring on non-convergence.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: usize) -> QuadOutcome {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
        residual: &mut f64,
        ok: &mut bool,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || (b - a) < 1e-300 {
            return left + right + delta / 15.0;
        }
        if depth == 0 {
            *ok = false;
            *residual += delta.abs() / 15.0;
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, residual, ok)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, residual, ok)
    }

    if a == b {
        return QuadOutcome { value: 0.0, residual: 0.0, converged: true };
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, a, b);
    let mut residual = 0.0;
    let mut ok = true;
    let value = recurse(f, a, b, fa, fm, fb, whole, tol, max_depth, &mut residual, &mut ok);
    QuadOutcome { value, residual, converged: ok }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        // 5-point rule is exact through degree 9
        let v = integrate_gl(|x| x.powi(8), -1.0, 1.0, 5);
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
        let v = integrate_gl(|x| 3.0 * x * x, 0.0, 2.0, 3);
        assert!((v - 8.0).abs() < 1e-13);
    }

    #[test]
    fn gl_80_on_smooth_function() {
        let v = integrate_gl(|x| (-x * x / 2.0).exp(), -8.0, 8.0, 80);
        assert!((v - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn simpson_matches_known_integral() {
        let r = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 40);
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn simpson_handles_sharp_peak() {
        // integrand concentrated near the right endpoint
        let h = 1e-3;
        let r = adaptive_simpson(&|s: f64| ((s - h) * 1e6).exp().min(1.0), 0.0, h, 1e-14, 48);
        assert!(r.converged);
        assert!((r.value - 1e-6).abs() < 1e-9);
    }
}
