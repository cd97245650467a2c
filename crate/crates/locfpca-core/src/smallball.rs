//! Small-ball probability machinery: the two analytic forms and their
//! auxiliary-function pairings, the empirical estimator, the shifted-ball
//! ratio, the exponential-regime ingredient sums, and Monte-Carlo desk
//! checks of both decay regimes.
//!
//! The analytic displays are stated on the squared-radius scale (their
//! derivation tilts Σλ_kξ_k², and the calibration μ(θ)=ε identifies ε with
//! that squared norm). `analytic_f` evaluates the displays as printed;
//! `norm_scale_ln_f` evaluates them at ε², which is what
//! P(‖X‖ < ε) actually follows — the Monte-Carlo checks report both.

use crate::error::{Error, Result};
use crate::exec::{map_collect, ExecMode};
use crate::gamma::{AuxiliaryFunction, LogScaleFn};
use crate::hilbert::BasisCoeffs;
use crate::model::{CoordinateFamily, EigenProfile, ProcessModel, ShiftProfile};
use crate::rng;

/// Analytic small-ball form F(ε).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmallBallForm {
    /// F(ε) = exp(−C/ε^{1/α}), the arithmetic-decay regime.
    Arithmetic { alpha: f64, c: f64 },
    /// F(ε) = sqrt(α/(−π ln ε)) · exp(−(ln ε)²/(4α)), the exponential-decay
    /// regime; needs ε < 1.
    Exponential { alpha: f64 },
}

impl SmallBallForm {
    pub fn arithmetic(alpha: f64, c: f64) -> Result<Self> {
        if alpha <= 0.0 || c <= 0.0 {
            return Err(Error::invalid("alpha/c", "must be positive"));
        }
        Ok(SmallBallForm::Arithmetic { alpha, c })
    }

    pub fn exponential(alpha: f64) -> Result<Self> {
        if alpha <= 0.0 {
            return Err(Error::invalid("alpha", "must be positive"));
        }
        Ok(SmallBallForm::Exponential { alpha })
    }

    /// Upper end of the domain. The arithmetic form stays below 1
    /// everywhere; the exponential form crosses 1 before ε = 1 (its
    /// prefactor diverges as ε → 1), so its domain ends at that root.
    pub fn eps_max(&self) -> f64 {
        match *self {
            SmallBallForm::Arithmetic { .. } => f64::INFINITY,
            SmallBallForm::Exponential { alpha } => {
                let ln_f = |eps: f64| {
                    let l = eps.ln();
                    0.5 * (alpha / (-std::f64::consts::PI * l)).ln() - l * l / (4.0 * alpha)
                };
                let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
                if ln_f(lo) >= 0.0 {
                    return lo;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if ln_f(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    }

    pub fn ln_f(&self, eps: f64) -> Result<f64> {
        if eps <= 0.0 || eps >= self.eps_max() {
            return Err(Error::Domain(format!("eps={eps} outside (0, {})", self.eps_max())));
        }
        Ok(match *self {
            SmallBallForm::Arithmetic { alpha, c } => -c / eps.powf(1.0 / alpha),
            SmallBallForm::Exponential { alpha } => {
                let l = eps.ln();
                0.5 * (alpha / (-std::f64::consts::PI * l)).ln() - l * l / (4.0 * alpha)
            }
        })
    }

    /// The display as printed.
    pub fn analytic_f(&self, eps: f64) -> Result<f64> {
        Ok(self.ln_f(eps)?.exp())
    }

    /// ln F evaluated at ε²: the norm-scale calibration of the display.
    pub fn norm_scale_ln_f(&self, eps: f64) -> Result<f64> {
        self.ln_f(eps * eps)
    }

    /// Auxiliary-function pairing of the two forms.
    pub fn auxiliary(&self) -> AuxiliaryFunction {
        match *self {
            SmallBallForm::Arithmetic { alpha, c } => AuxiliaryFunction::Power { alpha, c },
            SmallBallForm::Exponential { alpha } => AuxiliaryFunction::LogLinear { alpha },
        }
    }
}

impl LogScaleFn for SmallBallForm {
    fn ln_value(&self, s: f64) -> f64 {
        self.ln_f(s).unwrap_or(f64::NAN)
    }
    fn domain_max(&self) -> f64 {
        self.eps_max()
    }
}

/// The exponential form read on the radius scale (F at ε²); this is the
/// function whose auxiliary is the log-linear kind, so the class-Γ checks
/// pair it with `SmallBallForm::auxiliary`.
#[derive(Debug, Clone, Copy)]
pub struct NormScaleForm(pub SmallBallForm);

impl LogScaleFn for NormScaleForm {
    fn ln_value(&self, s: f64) -> f64 {
        self.0.norm_scale_ln_f(s).unwrap_or(f64::NAN)
    }
    fn domain_max(&self) -> f64 {
        self.0.eps_max().sqrt()
    }
}

/// Empirical small-ball probability F̂(ε) = #{‖X_i − x₀‖ < ε}/n with its
/// binomial standard error.
pub fn empirical_f(sample: &[BasisCoeffs], x0: &BasisCoeffs, eps: f64) -> Result<(f64, f64)> {
    if sample.is_empty() {
        return Err(Error::SampleTooSmall { need: 1 });
    }
    if eps <= 0.0 {
        return Err(Error::invalid("eps", "must be positive"));
    }
    let n = sample.len() as f64;
    let mut hits = 0usize;
    for x in sample {
        if x.sub(x0)?.norm() < eps {
            hits += 1;
        }
    }
    let p = hits as f64 / n;
    Ok((p, (p * (1.0 - p) / n).sqrt()))
}

#[derive(Debug, Clone, Copy)]
pub struct ShiftedRatioPoint {
    pub eps: f64,
    pub centered: f64,
    pub shifted: f64,
    /// F̂_{x₀}(ε) / F̂_0(ε)
    pub ratio: f64,
    pub pooled_se: f64,
    /// false when either count has fewer than 50 hits
    pub reliable: bool,
}

/// Shifted-ball ratio on a sample drawn at the centered model. The sequence
/// stability over ε is the C(x₀) diagnostic; the statement is asymptotic so
/// no convergence verdict is attached.
pub fn shifted_ratio(sample: &[BasisCoeffs], x0: &BasisCoeffs, eps_grid: &[f64]) -> Result<Vec<ShiftedRatioPoint>> {
    const MIN_HITS: f64 = 50.0;
    let origin = BasisCoeffs::zero(x0.dim());
    let n = sample.len() as f64;
    let mut out = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let (p0, se0) = empirical_f(sample, &origin, eps)?;
        let (ps, ses) = empirical_f(sample, x0, eps)?;
        let ratio = if p0 > 0.0 { ps / p0 } else { f64::NAN };
        // first-order error propagation on the ratio
        let pooled_se = if p0 > 0.0 && ps > 0.0 {
            ratio * ((se0 / p0).powi(2) + (ses / ps).powi(2)).sqrt()
        } else {
            f64::NAN
        };
        out.push(ShiftedRatioPoint {
            eps,
            centered: p0,
            shifted: ps,
            ratio,
            pooled_se,
            reliable: p0 * n >= MIN_HITS && ps * n >= MIN_HITS,
        });
    }
    Ok(out)
}

/// Ingredient sums of the exponential-regime derivation and their
/// closed-form equivalents.
#[derive(Debug, Clone, Copy)]
pub struct JulietIngredients {
    pub mu_sum: f64,
    pub psi_sum: f64,
    pub i_sum: f64,
    /// ln(1 + 2θe^{−α}) / (2αθ)
    pub mu_closed: f64,
    /// ln(θ) / (2αθ), the final-form equivalent
    pub mu_asymptotic: f64,
    /// sqrt((1/2α)[ln(1+2θe^{−α}) − 2θe^{−α}/(1+2θe^{−α})])
    pub psi_closed: f64,
    /// (ln θ)² / (4α)
    pub i_closed: f64,
    /// (ln(2θe^{−α}))² / (4α), the pre-limit form
    pub i_closed_pre: f64,
}

/// Truncated sums μ(θ) = Σ 1/(e^{αi}+2θ), ψ(θ), I(θ) for i = 1..k_max.
/// Requires the tail bound e^{−α k_max}/(2θ) < 1e−15.
pub fn juliet_ingredients(alpha: f64, theta: f64, k_max: usize) -> Result<JulietIngredients> {
    if alpha <= 0.0 || theta <= 0.0 {
        return Err(Error::invalid("alpha/theta", "must be positive"));
    }
    let bound = (-alpha * k_max as f64).exp() / (2.0 * theta);
    const REQUIRED: f64 = 1e-15;
    if bound >= REQUIRED {
        let k_needed = ((2.0 * theta * REQUIRED).recip().ln() / alpha).ceil() as usize;
        return Err(Error::TailTooHeavy { bound, required: REQUIRED, k_needed });
    }
    let mut mu = 0.0;
    let mut psi_sq = 0.0;
    let mut log_sum = 0.0;
    for i in 1..=k_max {
        let e = (alpha * i as f64).exp();
        mu += 1.0 / (e + 2.0 * theta);
        psi_sq += (theta / (e + 2.0 * theta)).powi(2);
        log_sum += (2.0 * theta / e).ln_1p();
    }
    let psi = (2.0 * psi_sq).sqrt();
    let i_sum = 0.5 * log_sum - theta * mu;

    let q = 2.0 * theta * (-alpha).exp();
    let mu_closed = q.ln_1p() / (2.0 * alpha * theta);
    let mu_asymptotic = theta.ln() / (2.0 * alpha * theta);
    let psi_closed = ((q.ln_1p() - q / (1.0 + q)) / (2.0 * alpha)).sqrt();
    let i_closed = theta.ln().powi(2) / (4.0 * alpha);
    let i_closed_pre = q.ln().powi(2) / (4.0 * alpha);
    Ok(JulietIngredients {
        mu_sum: mu,
        psi_sum: psi,
        i_sum,
        mu_closed,
        mu_asymptotic,
        psi_closed,
        i_closed,
        i_closed_pre,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Pb2Point {
    pub eps: f64,
    pub hits: u64,
    pub p_hat: f64,
    pub std_error: f64,
    pub ln_p: f64,
    /// ln of the printed display at ε
    pub ln_f_printed: f64,
    /// ln of the display at ε² (norm calibration)
    pub ln_f_norm: f64,
    /// |ln P̂ / ln F_norm − 1|
    pub log_ratio_dev: f64,
    pub starved: bool,
}

#[derive(Debug, Clone)]
pub struct Pb2Report {
    pub points: Vec<Pb2Point>,
    pub tail_mass: f64,
}

/// Monte-Carlo check of the exponential-decay display: gaussian
/// coordinates with λ_k = e^{−αk} truncated at d, P̂(‖X‖ < ε) against the
/// analytic form on both scales.
pub fn pb2_desk_check(
    alpha: f64,
    eps_grid: &[f64],
    n: usize,
    seed: u64,
    d: usize,
    mode: ExecMode,
) -> Result<Pb2Report> {
    if n == 0 {
        return Err(Error::SampleTooSmall { need: 1 });
    }
    let form = SmallBallForm::exponential(alpha)?;
    let eps_min = eps_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    // truncation bias precondition: tail eigenvalue mass below 1e-4 eps²
    let tail_mass = (-alpha * (d as f64 + 1.0)).exp() / (1.0 - (-alpha).exp());
    if tail_mass >= 1e-4 * eps_min * eps_min {
        let k_needed = (((1e-4 * eps_min * eps_min) * (1.0 - (-alpha).exp())).recip().ln() / alpha).ceil() as usize;
        return Err(Error::TailTooHeavy { bound: tail_mass, required: 1e-4 * eps_min * eps_min, k_needed });
    }
    let model = ProcessModel::new(d, EigenProfile::exponential(alpha)?, CoordinateFamily::Gaussian, &ShiftProfile::Zero)?;

    // count hits per epsilon in deterministic chunks
    const CHUNK: usize = 8192;
    let chunks = n.div_ceil(CHUNK);
    let counts: Vec<Vec<u64>> = map_collect(mode, chunks, |c| {
        let lo = c * CHUNK;
        let hi = ((c + 1) * CHUNK).min(n);
        let mut cnt = vec![0u64; eps_grid.len()];
        for i in lo..hi {
            let x = model.sample_one(seed, rng::domain::SAMPLE, 0, i as u64);
            let r = x.norm();
            for (k, &e) in eps_grid.iter().enumerate() {
                if r < e {
                    cnt[k] += 1;
                }
            }
        }
        cnt
    });
    let mut totals = vec![0u64; eps_grid.len()];
    for c in counts {
        for (t, v) in totals.iter_mut().zip(c) {
            *t += v;
        }
    }

    let mut points = Vec::with_capacity(eps_grid.len());
    for (k, &eps) in eps_grid.iter().enumerate() {
        let hits = totals[k];
        let p_hat = hits as f64 / n as f64;
        let ln_p = if hits > 0 { p_hat.ln() } else { f64::NAN };
        let ln_f_printed = form.ln_f(eps)?;
        let ln_f_norm = form.norm_scale_ln_f(eps)?;
        points.push(Pb2Point {
            eps,
            hits,
            p_hat,
            std_error: (p_hat * (1.0 - p_hat) / n as f64).sqrt(),
            ln_p,
            ln_f_printed,
            ln_f_norm,
            log_ratio_dev: (ln_p / ln_f_norm - 1.0).abs(),
            starved: hits == 0,
        });
    }
    Ok(Pb2Report { points, tail_mass })
}

#[derive(Debug, Clone)]
pub struct Pb1Report {
    pub eps: Vec<f64>,
    pub f_hat: Vec<f64>,
    pub hits: Vec<u64>,
    /// slope of ln(−ln F̂) against ln(ε²); the arithmetic display predicts −1/α
    pub slope_sq_scale: f64,
    /// slope against ln ε (= twice the above)
    pub slope_raw_scale: f64,
}

/// Shape check of the arithmetic-decay display: the regression of
/// ln(−ln F̂) on the log abscissa. The exact constant C(α) is out of reach;
/// only the slope is meaningful.
pub fn pb1_shape_check(
    model: &ProcessModel,
    eps_grid: &[f64],
    n: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<Pb1Report> {
    if eps_grid.len() < 2 {
        return Err(Error::invalid("eps_grid", "need at least 2 points"));
    }
    const CHUNK: usize = 8192;
    let chunks = n.div_ceil(CHUNK);
    let counts: Vec<Vec<u64>> = map_collect(mode, chunks, |c| {
        let lo = c * CHUNK;
        let hi = ((c + 1) * CHUNK).min(n);
        let mut cnt = vec![0u64; eps_grid.len()];
        for i in lo..hi {
            let x = model.sample_one(seed, rng::domain::SAMPLE, 0, i as u64);
            let r = x.norm();
            for (k, &e) in eps_grid.iter().enumerate() {
                if r < e {
                    cnt[k] += 1;
                }
            }
        }
        cnt
    });
    let mut totals = vec![0u64; eps_grid.len()];
    for c in counts {
        for (t, v) in totals.iter_mut().zip(c) {
            *t += v;
        }
    }
    let f_hat: Vec<f64> = totals.iter().map(|&h| h as f64 / n as f64).collect();
    if f_hat.iter().any(|&p| p <= 0.0 || p >= 1.0) {
        return Err(Error::Domain("PB1 shape needs 0 < F̂ < 1 at every eps".into()));
    }
    let ys: Vec<f64> = f_hat.iter().map(|&p| (-p.ln()).ln()).collect();
    let slope = |xs: &[f64]| -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        sxy / sxx
    };
    let x_sq: Vec<f64> = eps_grid.iter().map(|&e| (e * e).ln()).collect();
    let x_raw: Vec<f64> = eps_grid.iter().map(|&e| e.ln()).collect();
    Ok(Pb1Report {
        eps: eps_grid.to_vec(),
        f_hat,
        hits: totals,
        slope_sq_scale: slope(&x_sq),
        slope_raw_scale: slope(&x_raw),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::ExecMode;

    #[test]
    fn analytic_f_pinned_values() {
        let a = SmallBallForm::arithmetic(1.0, 1.0).unwrap();
        assert!((a.analytic_f(0.1).unwrap() - (-10.0f64).exp()).abs() < 1e-18);
        let e = SmallBallForm::exponential(1.0).unwrap();
        let v = e.analytic_f((-1.0f64).exp()).unwrap();
        let want = (1.0 / std::f64::consts::PI).sqrt() * (-0.25f64).exp();
        assert!((v - want).abs() < 1e-15);
        assert!(e.analytic_f(1.0).is_err());
        assert!(a.analytic_f(-0.5).is_err());
    }

    #[test]
    fn analytic_f_monotone_increasing() {
        for form in [
            SmallBallForm::arithmetic(1.0, 1.0).unwrap(),
            SmallBallForm::arithmetic(0.5, 2.0).unwrap(),
            SmallBallForm::exponential(1.0).unwrap(),
        ] {
            let top = form.eps_max().min(1.0) * 0.99;
            let mut prev = f64::NEG_INFINITY;
            for k in 1..=100 {
                let eps = top * k as f64 / 100.0;
                // log scale: F underflows at small eps for steep forms
                let v = form.ln_f(eps).unwrap();
                assert!(v > prev, "{form:?} not increasing at {eps}");
                assert!(v < 0.0, "{form:?} reaches 1 inside its domain at {eps}");
                prev = v;
            }
        }
    }

    #[test]
    fn empirical_f_edge_cases() {
        let x0 = BasisCoeffs::new(vec![1.0, 2.0]).unwrap();
        let sample = vec![x0.clone(), x0.clone(), x0.clone()];
        let (p, se) = empirical_f(&sample, &x0, 0.5).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(se, 0.0);
        let far = BasisCoeffs::zero(2);
        let (p, _) = empirical_f(&sample, &far, 1e-3).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn empirical_f_monotone_in_eps() {
        let m = ProcessModel::new(
            3,
            EigenProfile::arithmetic(1.0).unwrap(),
            CoordinateFamily::Gaussian,
            &ShiftProfile::Zero,
        )
        .unwrap();
        let sample = m.sample(2000, 31, ExecMode::default());
        let x0 = BasisCoeffs::zero(3);
        let mut prev = 0.0;
        for eps in [0.2, 0.4, 0.8, 1.6] {
            let (p, _) = empirical_f(&sample, &x0, eps).unwrap();
            assert!(p >= prev);
            prev = p;
        }
    }

    #[test]
    fn shifted_ratio_at_origin_is_one() {
        let m = ProcessModel::new(
            2,
            EigenProfile::arithmetic(1.0).unwrap(),
            CoordinateFamily::Gaussian,
            &ShiftProfile::Zero,
        )
        .unwrap();
        let sample = m.sample(4000, 11, ExecMode::default());
        let pts = shifted_ratio(&sample, &BasisCoeffs::zero(2), &[0.8, 0.5]).unwrap();
        for p in pts {
            assert!((p.ratio - 1.0).abs() < 1e-14);
            assert!(p.reliable);
        }
    }

    #[test]
    fn juliet_theta_to_zero_geometric_limit() {
        // deviation from the geometric series is 2θ e^{-2}/(1-e^{-2}) = O(θ)
        let j = juliet_ingredients(1.0, 1e-10, 120).unwrap();
        let geo = (-1.0f64).exp() / (1.0 - (-1.0f64).exp());
        assert!((j.mu_sum - geo).abs() < 1e-10);
    }

    #[test]
    fn juliet_requires_enough_terms() {
        let e = juliet_ingredients(1.0, 1e6, 10);
        match e {
            Err(Error::TailTooHeavy { k_needed, .. }) => assert!(k_needed > 10),
            other => panic!("expected tail error, got {other:?}"),
        }
    }

    #[test]
    fn juliet_closed_form_ratios() {
        // frozen from direct summation: dev vs the intermediate form is
        // 0.0562 at θ=1e4 and 0.0370 at 1e6; vs the final form 0.0210/0.0140
        let j4 = juliet_ingredients(1.0, 1e4, 60).unwrap();
        let d4 = (j4.mu_sum / j4.mu_closed - 1.0).abs();
        assert!((d4 - 0.0562).abs() < 0.002, "got {d4}");
        let a4 = (j4.mu_sum / j4.mu_asymptotic - 1.0).abs();
        assert!((a4 - 0.0210).abs() < 0.002, "got {a4}");

        let j6 = juliet_ingredients(1.0, 1e6, 80).unwrap();
        let i_dev = (j6.i_sum / j6.i_closed - 1.0).abs();
        assert!((i_dev - 0.1018).abs() < 0.002, "got {i_dev}");
        let i_dev_pre = (j6.i_sum / j6.i_closed_pre - 1.0).abs();
        assert!((i_dev_pre - 0.0606).abs() < 0.002, "got {i_dev_pre}");
    }

    #[test]
    fn juliet_sums_stable_beyond_tail_cap() {
        let a = juliet_ingredients(1.0, 1e3, 50).unwrap();
        let b = juliet_ingredients(1.0, 1e3, 200).unwrap();
        assert!((a.mu_sum - b.mu_sum).abs() < 1e-14);
        assert!((a.i_sum - b.i_sum).abs() < 1e-12);
    }

    #[test]
    fn pb2_rejects_thin_truncation() {
        assert!(matches!(
            pb2_desk_check(1.0, &[0.05], 100, 1, 5, ExecMode::default()),
            Err(Error::TailTooHeavy { .. })
        ));
    }

    #[test]
    fn pb2_seed_replication_consistency() {
        let a = pb2_desk_check(1.0, &[0.4, 0.3], 40_000, 1, 30, ExecMode::default()).unwrap();
        let b = pb2_desk_check(1.0, &[0.4, 0.3], 40_000, 2, 30, ExecMode::default()).unwrap();
        for (pa, pb) in a.points.iter().zip(&b.points) {
            let pooled = (pa.std_error.powi(2) + pb.std_error.powi(2)).sqrt();
            assert!((pa.p_hat - pb.p_hat).abs() < 4.0 * pooled);
        }
        // strict monotonicity in eps (nested events, well-separated counts)
        assert!(a.points[0].p_hat > a.points[1].p_hat);
    }
}
