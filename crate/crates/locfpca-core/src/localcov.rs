//! Local covariance estimators and their asymptotic checks: the empirical
//! operators, the theoretical operator by tensor quadrature or Monte Carlo,
//! the radial sequences v(h) and w(h), the cell predictions, the sup-norm
//! ratio bound, the variance identity of the empirical operator, and the
//! eigenelement rates.

use crate::error::{Error, Result};
use crate::exec::{map_collect, ExecMode};
use crate::hilbert::{BasisCoeffs, SymOperator};
use crate::kernel::Kernel;
use crate::model::{ProcessModel, RField};
use crate::oracles::{norm_density, NormDensity};
use crate::quad::gauss_legendre;
use crate::rng;
use crate::spectral;

/// Largest dimension served by tensor-product quadrature (80^d nodes).
pub const QUAD_DIM_MAX: usize = 4;

/// (1/n) Σ (X_k − X̄) ⊗ (X_k − X̄)
pub fn empirical_cov(sample: &[BasisCoeffs]) -> Result<SymOperator> {
    if sample.len() < 2 {
        return Err(Error::SampleTooSmall { need: 2 });
    }
    let d = sample[0].dim();
    let n = sample.len() as f64;
    let mut mean = vec![0.0; d];
    for x in sample {
        if x.dim() != d {
            return Err(Error::DimMismatch(d, x.dim()));
        }
        for (m, c) in mean.iter_mut().zip(x.coeffs()) {
            *m += c / n;
        }
    }
    let mean = BasisCoeffs::new(mean)?;
    let mut op = SymOperator::zero(d);
    for x in sample {
        op.add_scaled_tensor(1.0 / n, &x.sub(&mean)?)?;
    }
    Ok(op)
}

#[derive(Debug, Clone)]
pub struct LocalCovEstimate {
    pub op: SymOperator,
    /// Number of samples with positive kernel weight.
    pub contributing: usize,
    /// Set when no sample fell inside the bandwidth.
    pub empty: bool,
}

/// Γ_{K,n} = (1/n) Σ K(‖X_k − x₀‖/h) (X_k − x₀) ⊗ (X_k − x₀)
pub fn empirical_local_cov(
    sample: &[BasisCoeffs],
    x0: &BasisCoeffs,
    kernel: &Kernel,
    h: f64,
) -> Result<LocalCovEstimate> {
    if h <= 0.0 {
        return Err(Error::invalid("h", "bandwidth must be positive"));
    }
    if sample.is_empty() {
        return Err(Error::SampleTooSmall { need: 1 });
    }
    let n = sample.len() as f64;
    let mut op = SymOperator::zero(x0.dim());
    let mut contributing = 0usize;
    for x in sample {
        let y = x.sub(x0)?;
        let w = kernel.at(y.norm() / h);
        if w > 0.0 {
            contributing += 1;
            op.add_scaled_tensor(w / n, &y)?;
        }
    }
    Ok(LocalCovEstimate { op, contributing, empty: contributing == 0 })
}

#[derive(Debug, Clone)]
pub enum CovMethod {
    Quadrature { nodes_per_axis: usize },
    Mc { budget: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct TheoreticalCov {
    pub op: SymOperator,
    /// Per-entry Monte-Carlo standard errors (None for quadrature).
    pub std_errors: Option<Vec<f64>>,
    pub method_tag: &'static str,
}

/// Γ_K = E[K(‖X−x₀‖/h) (X−x₀) ⊗ (X−x₀)].
///
/// Quadrature integrates the product density over the bounding cube of the
/// bandwidth ball intersected with coordinate supports (d ≤ 4); Monte Carlo
/// runs counter-based substreams decorrelated from empirical samples.
pub fn theoretical_local_cov(
    model: &ProcessModel,
    kernel: &Kernel,
    h: f64,
    method: &CovMethod,
    mode: ExecMode,
) -> Result<TheoreticalCov> {
    if h <= 0.0 {
        return Err(Error::invalid("h", "bandwidth must be positive"));
    }
    let d = model.dim();
    match *method {
        CovMethod::Quadrature { nodes_per_axis } => {
            if d > QUAD_DIM_MAX {
                return Err(Error::QuadratureDim { max: QUAD_DIM_MAX, got: d });
            }
            let (nodes, weights) = gauss_legendre(nodes_per_axis);
            let x0 = model.shift().coeffs().coeffs();
            // per-axis nodes in the shifted variable y = x - x0
            let mut axis_y = Vec::with_capacity(d);
            let mut axis_wg = Vec::with_capacity(d);
            for k in 0..d {
                let lam = model.lambdas()[k];
                let (lo, hi) = match model.family() {
                    crate::model::CoordinateFamily::Cubic => {
                        let half = 3.0 * lam.sqrt();
                        ((-half - x0[k]).max(-h), (half - x0[k]).min(h))
                    }
                    _ => (-h, h),
                };
                if lo >= hi {
                    // the ball misses this coordinate's support entirely
                    return Ok(TheoreticalCov {
                        op: SymOperator::zero(d),
                        std_errors: None,
                        method_tag: "quadrature",
                    });
                }
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                let ys: Vec<f64> = nodes.iter().map(|x| mid + half * x).collect();
                let wg: Vec<f64> = ys
                    .iter()
                    .zip(&weights)
                    .map(|(&y, w)| {
                        w * half * model.family().density(lam, y + x0[k], 0).unwrap_or(0.0)
                    })
                    .collect();
                axis_y.push(ys);
                axis_wg.push(wg);
            }
            // odometer over the remaining axes, parallel over the first
            let nn = nodes_per_axis;
            let total_rest = nn.pow((d - 1) as u32);
            let partials: Vec<Vec<f64>> = map_collect(mode, nn, |i0| {
                let mut acc = vec![0.0; d * d];
                let mut y = vec![0.0; d];
                y[0] = axis_y[0][i0];
                let w0 = axis_wg[0][i0];
                for rest in 0..total_rest {
                    let mut idx = rest;
                    let mut w = w0;
                    for k in 1..d {
                        let ik = idx % nn;
                        idx /= nn;
                        y[k] = axis_y[k][ik];
                        w *= axis_wg[k][ik];
                    }
                    let r2: f64 = y.iter().map(|v| v * v).sum();
                    let kv = kernel.at(r2.sqrt() / h);
                    if kv != 0.0 {
                        let wk = w * kv;
                        for a in 0..d {
                            let ya = y[a];
                            for b in a..d {
                                acc[a * d + b] += wk * ya * y[b];
                            }
                        }
                    }
                }
                acc
            });
            let mut entries = vec![0.0; d * d];
            for p in partials {
                for (e, v) in entries.iter_mut().zip(p) {
                    *e += v;
                }
            }
            for a in 0..d {
                for b in 0..a {
                    entries[a * d + b] = entries[b * d + a];
                }
            }
            Ok(TheoreticalCov {
                op: SymOperator::from_entries(d, entries)?,
                std_errors: None,
                method_tag: "quadrature",
            })
        }
        CovMethod::Mc { budget, seed } => {
            if budget < 100_000 {
                return Err(Error::SampleTooSmall { need: 100_000 });
            }
            let x0 = model.shift().coeffs();
            const CHUNK: usize = 4096;
            let chunks = budget.div_ceil(CHUNK);
            // per chunk: sums and squared sums per entry
            let partial: Vec<(Vec<f64>, Vec<f64>)> = map_collect(mode, chunks, |c| {
                let lo = c * CHUNK;
                let hi = ((c + 1) * CHUNK).min(budget);
                let mut s = vec![0.0; d * d];
                let mut s2 = vec![0.0; d * d];
                for i in lo..hi {
                    let x = model.sample_one(seed, rng::domain::MC_ORACLE, 0, i as u64);
                    let y = x.sub(x0).expect("dims");
                    let kv = kernel.at(y.norm() / h);
                    for a in 0..d {
                        for b in 0..d {
                            let z = kv * y.coeffs()[a] * y.coeffs()[b];
                            s[a * d + b] += z;
                            s2[a * d + b] += z * z;
                        }
                    }
                }
                (s, s2)
            });
            let mut sum = vec![0.0; d * d];
            let mut sumsq = vec![0.0; d * d];
            for (s, s2) in partial {
                for k in 0..d * d {
                    sum[k] += s[k];
                    sumsq[k] += s2[k];
                }
            }
            let n = budget as f64;
            let entries: Vec<f64> = sum.iter().map(|s| s / n).collect();
            let se: Vec<f64> = sumsq
                .iter()
                .zip(&entries)
                .map(|(s2, m)| ((s2 / n - m * m).max(0.0) / n).sqrt())
                .collect();
            // enforce exact symmetry (accumulation is already symmetric up
            // to rounding; mirror the upper triangle)
            let mut sym = entries.clone();
            for a in 0..d {
                for b in 0..a {
                    sym[a * d + b] = sym[b * d + a];
                }
            }
            Ok(TheoreticalCov {
                op: SymOperator::from_entries(d, sym)?,
                std_errors: Some(se),
                method_tag: "mc",
            })
        }
    }
}

/// E[K^m(‖X−x₀‖/h) ‖X−x₀‖^p] through the norm-density radial integral.
pub fn ball_moment(density: &NormDensity, kernel: &Kernel, h: f64, m: u32, p: u32) -> f64 {
    density.integral_against(h, |t| kernel.at(t / h).powi(m as i32) * t.powi(p as i32))
}

/// The sequences v(h) = E[K ‖·‖ ρ(‖·‖)] and w(h) = E[K ‖·‖² ρ²(‖·‖)].
pub fn v_w_sequences(
    density: &NormDensity,
    kernel: &Kernel,
    h: f64,
    rho: &crate::gamma::AuxiliaryFunction,
) -> Result<(f64, f64)> {
    // validate rho on (0, h]
    rho.evaluate(h)?;
    let v = density.integral_against(h, |t| {
        kernel.at(t / h) * t * rho.evaluate(t).unwrap_or(0.0)
    });
    let w = density.integral_against(h, |t| {
        let r = rho.evaluate(t).unwrap_or(0.0);
        kernel.at(t / h) * t * t * r * r
    });
    Ok((v, w))
}

/// Monte-Carlo counterpart of `v_w_sequences`, for cross-method checks.
pub fn v_w_mc(
    model: &ProcessModel,
    kernel: &Kernel,
    h: f64,
    rho: &crate::gamma::AuxiliaryFunction,
    budget: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<((f64, f64), (f64, f64))> {
    let x0 = model.shift().coeffs();
    const CHUNK: usize = 4096;
    let chunks = budget.div_ceil(CHUNK);
    let parts: Vec<[f64; 4]> = map_collect(mode, chunks, |c| {
        let lo = c * CHUNK;
        let hi = ((c + 1) * CHUNK).min(budget);
        let mut acc = [0.0; 4];
        for i in lo..hi {
            let x = model.sample_one(seed, rng::domain::MC_ORACLE, 1, i as u64);
            let r = x.sub(x0).expect("dims").norm();
            let kv = kernel.at(r / h);
            if kv != 0.0 {
                let rho_r = rho.evaluate(r).unwrap_or(0.0);
                let zv = kv * r * rho_r;
                let zw = kv * (r * rho_r).powi(2);
                acc[0] += zv;
                acc[1] += zv * zv;
                acc[2] += zw;
                acc[3] += zw * zw;
            }
        }
        acc
    });
    let mut t = [0.0; 4];
    for p in parts {
        for k in 0..4 {
            t[k] += p[k];
        }
    }
    let n = budget as f64;
    let v = t[0] / n;
    let w = t[2] / n;
    let se_v = ((t[1] / n - v * v).max(0.0) / n).sqrt();
    let se_w = ((t[3] / n - w * w).max(0.0) / n).sqrt();
    Ok(((v, se_v), (w, se_w)))
}

/// Cell prediction v δ_ij + w R_ij.
pub fn lco_cell_prediction(v: f64, w: f64, field: &RField, i: usize, j: usize) -> f64 {
    if i == j {
        v + w * field.diag()[i]
    } else {
        w * field.entry(i, j)
    }
}

/// ‖Γ_K − v I‖_∞ / v
pub fn kt_ratio(gamma_k: &SymOperator, v: f64) -> Result<f64> {
    if v <= 0.0 {
        return Err(Error::invalid("v", "must be positive"));
    }
    let dev = gamma_k.sub(&SymOperator::identity(gamma_k.dim()).scale(v))?;
    Ok(dev.sup_norm()? / v)
}

#[derive(Debug, Clone, Copy)]
pub struct NaiveBound {
    /// ‖Γ_K‖_∞
    pub lhs: f64,
    /// E[K(‖X−x₀‖/h) ‖X−x₀‖²]
    pub rhs: f64,
    pub holds: bool,
}

/// First-attempt sup-norm bound of the local covariance operator.
pub fn naive_bound_check(gamma_k: &SymOperator, density: &NormDensity, kernel: &Kernel, h: f64) -> Result<NaiveBound> {
    let lhs = gamma_k.sup_norm()?;
    let rhs = ball_moment(density, kernel, h, 1, 2);
    Ok(NaiveBound { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-6) })
}

#[derive(Debug, Clone)]
pub struct CompayPoint {
    pub h: f64,
    pub v: f64,
    pub f_h: f64,
    /// v(h) / E[K ‖·‖²] (→ 0)
    pub r1: f64,
    /// v(h) / (K(1) h ρ(h) F(h)) (→ 1 when ρ is regularly varying)
    pub r2: f64,
    /// proof envelope: r1 ≤ ρ(h) E[K‖·‖] / E[K‖·‖²]
    pub envelope: f64,
    pub skipped: bool,
}

/// Decay and equivalence checks for v(h).
pub fn compay_check(
    density: &NormDensity,
    kernel: &Kernel,
    rho: &crate::gamma::AuxiliaryFunction,
    h_grid: &[f64],
) -> Result<Vec<CompayPoint>> {
    let mut out = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let f_h = density.cdf(h);
        if f_h < 1e-12 {
            out.push(CompayPoint { h, v: 0.0, f_h, r1: f64::NAN, r2: f64::NAN, envelope: f64::NAN, skipped: true });
            continue;
        }
        let (v, _) = v_w_sequences(density, kernel, h, rho)?;
        let ek1 = ball_moment(density, kernel, h, 1, 1);
        let ek2 = ball_moment(density, kernel, h, 1, 2);
        let rho_h = rho.evaluate(h)?;
        out.push(CompayPoint {
            h,
            v,
            f_h,
            r1: v / ek2,
            r2: v / (kernel.at_one() * h * rho_h * f_h),
            envelope: rho_h * ek1 / ek2,
            skipped: false,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct CovopReport {
    /// (a): Monte-Carlo estimate of E‖Γ_{K,n} − Γ_K‖²_HS over replicates.
    pub mc_hs_mse: f64,
    pub mc_hs_se: f64,
    /// Same replicates in sup norm (≤ the HS value).
    pub mc_sup_mse: f64,
    /// (b): exact identity (E[K²‖·‖⁴] − ‖Γ_K‖²_HS)/n by quadrature.
    pub identity: f64,
    /// (c): K²(1) h⁴ F(h) / n.
    pub asymptote: f64,
    pub f_h: f64,
    pub reps: usize,
    pub n: usize,
}

/// Mean-square error of the empirical local covariance operator against
/// the exact single-sample variance identity and its small-h asymptote.
pub fn covop_mse(
    model: &ProcessModel,
    kernel: &Kernel,
    h: f64,
    n: usize,
    reps: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<CovopReport> {
    if reps < 2 {
        return Err(Error::SampleTooSmall { need: 2 });
    }
    let gamma_k = theoretical_local_cov(model, kernel, h, &CovMethod::Quadrature { nodes_per_axis: 80 }, mode)?.op;
    let density = norm_density(model, &[], mode)?;
    let x0 = model.shift().coeffs().clone();
    let per_rep: Vec<(f64, f64)> = map_collect(mode, reps, |r| {
        let sample = model.sample_replicate(n, seed, r as u64, ExecMode::Sequential);
        let est = empirical_local_cov(&sample, &x0, kernel, h).expect("valid inputs");
        let delta = est.op.sub(&gamma_k).expect("dims");
        let hs2 = delta.hs_norm().powi(2);
        let sup2 = delta.sup_norm().map(|s| s * s).unwrap_or(hs2);
        (hs2, sup2)
    });
    let m = reps as f64;
    let mc_hs_mse = per_rep.iter().map(|p| p.0).sum::<f64>() / m;
    let var = per_rep.iter().map(|p| (p.0 - mc_hs_mse).powi(2)).sum::<f64>() / (m - 1.0);
    let mc_sup_mse = per_rep.iter().map(|p| p.1).sum::<f64>() / m;
    let ek2r4 = ball_moment(&density, kernel, h, 2, 4);
    let f_h = density.cdf(h);
    Ok(CovopReport {
        mc_hs_mse,
        mc_hs_se: (var / m).sqrt(),
        mc_sup_mse,
        identity: (ek2r4 - gamma_k.hs_norm().powi(2)) / n as f64,
        asymptote: kernel.at_one().powi(2) * h.powi(4) * f_h / n as f64,
        f_h,
        reps,
        n,
    })
}

#[derive(Debug, Clone)]
pub struct EigenRatePoint {
    pub p: usize,
    /// Gap of λ_p(Γ_K) to its nearest neighbor.
    pub gap: f64,
    pub skipped: bool,
    pub lambda_mse: f64,
    pub proj_mse: f64,
    /// MSE · n / (K²(1) h⁴ F(h))
    pub lambda_ratio: f64,
    pub proj_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct EigenRatesReport {
    pub points: Vec<EigenRatePoint>,
    pub weyl_violations: usize,
    pub max_weyl_slack: f64,
    /// Mean of ‖Γ_{K,n} − Γ_K‖²_∞ over replicates.
    pub mean_delta_sup_sq: f64,
    pub mean_delta_hs_sq: f64,
    pub rate_unit: f64,
    pub f_h: f64,
}

/// Eigenvalue and eigenprojector rates of the empirical local covariance
/// operator. Eigenvalues are compared in characteristic-number order;
/// projectors are skipped when the population gap is below four times the
/// predicted perturbation size.
pub fn eigen_rates(
    model: &ProcessModel,
    kernel: &Kernel,
    h: f64,
    n: usize,
    reps: usize,
    seed: u64,
    p_max: usize,
    mode: ExecMode,
) -> Result<EigenRatesReport> {
    let d = model.dim();
    if p_max >= d {
        return Err(Error::invalid("p_max", "must be below the truncation dimension"));
    }
    let gamma_k = theoretical_local_cov(model, kernel, h, &CovMethod::Quadrature { nodes_per_axis: 80 }, mode)?.op;
    let density = norm_density(model, &[], mode)?;
    let f_h = density.cdf(h);
    let rate_unit = kernel.at_one().powi(2) * h.powi(4) * f_h / n as f64;
    let identity = (ball_moment(&density, kernel, h, 2, 4) - gamma_k.hs_norm().powi(2)) / n as f64;
    let noise_scale = identity.max(0.0).sqrt();

    let eig = spectral::eig_sym(&gamma_k)?;
    let lambda = eig.eigenvalues().to_vec();
    let mut gaps = vec![f64::INFINITY; p_max + 1];
    for (p, g) in gaps.iter_mut().enumerate() {
        for q in 0..d {
            if q != p {
                *g = g.min((lambda[p] - lambda[q]).abs());
            }
        }
    }
    let skip: Vec<bool> = gaps.iter().map(|&g| g < 4.0 * noise_scale).collect();
    let projectors: Vec<Option<SymOperator>> = (0..=p_max)
        .map(|p| if skip[p] { None } else { spectral::eigenprojector(&eig, p).ok() })
        .collect();

    let x0 = model.shift().coeffs().clone();
    struct RepOut {
        lambda_sq: Vec<f64>,
        proj_sq: Vec<f64>,
        delta_sup_sq: f64,
        delta_hs_sq: f64,
        weyl_violation: bool,
        weyl_slack: f64,
    }
    let per_rep: Vec<RepOut> = map_collect(mode, reps, |r| {
        let sample = model.sample_replicate(n, seed, r as u64, ExecMode::Sequential);
        let est = empirical_local_cov(&sample, &x0, kernel, h).expect("valid inputs");
        let delta = est.op.sub(&gamma_k).expect("dims");
        let delta_sup = delta.sup_norm().expect("symmetric");
        let eig_n = spectral::eig_sym(&est.op).expect("symmetric");
        let s_n = eig_n.char_numbers();
        let s = eig.char_numbers();
        let mut weyl_violation = false;
        let mut weyl_slack = f64::NEG_INFINITY;
        for p in 0..d {
            let diff = (s_n[p] - s[p]).abs();
            weyl_slack = weyl_slack.max(diff - delta_sup);
            if diff > delta_sup + 1e-10 {
                weyl_violation = true;
            }
        }
        let mut lambda_sq = vec![0.0; p_max + 1];
        let mut proj_sq = vec![0.0; p_max + 1];
        for p in 0..=p_max {
            lambda_sq[p] = (eig_n.eigenvalues()[p] - lambda[p]).powi(2);
            if let Some(pi_p) = &projectors[p] {
                let pi_n = SymOperator::tensor_self(&eig_n.eigenvectors()[p]);
                proj_sq[p] = pi_n
                    .sub(pi_p)
                    .expect("dims")
                    .sup_norm()
                    .expect("symmetric")
                    .powi(2);
            }
        }
        RepOut {
            lambda_sq,
            proj_sq,
            delta_sup_sq: delta_sup * delta_sup,
            delta_hs_sq: delta.hs_norm().powi(2),
            weyl_violation,
            weyl_slack,
        }
    });

    let m = reps as f64;
    let mut points = Vec::with_capacity(p_max + 1);
    for p in 0..=p_max {
        let lambda_mse = per_rep.iter().map(|r| r.lambda_sq[p]).sum::<f64>() / m;
        let proj_mse = per_rep.iter().map(|r| r.proj_sq[p]).sum::<f64>() / m;
        points.push(EigenRatePoint {
            p,
            gap: gaps[p],
            skipped: skip[p],
            lambda_mse,
            proj_mse,
            lambda_ratio: lambda_mse / rate_unit,
            proj_ratio: if skip[p] { f64::NAN } else { proj_mse / rate_unit },
        });
    }
    Ok(EigenRatesReport {
        points,
        weyl_violations: per_rep.iter().filter(|r| r.weyl_violation).count(),
        max_weyl_slack: per_rep.iter().map(|r| r.weyl_slack).fold(f64::NEG_INFINITY, f64::max),
        mean_delta_sup_sq: per_rep.iter().map(|r| r.delta_sup_sq).sum::<f64>() / m,
        mean_delta_hs_sq: per_rep.iter().map(|r| r.delta_hs_sq).sum::<f64>() / m,
        rate_unit,
        f_h,
    })
}

#[derive(Debug, Clone)]
pub struct GorillazPoint {
    pub h: f64,
    /// ‖T(h) − hI‖_∞ for the h^{3/2} variant
    pub dev_from_h_identity: f64,
    pub sqrt_h: f64,
    pub bound_holds: bool,
    /// ‖T(h)/h‖_∞ · √h (expected near 1 once min λ ≪ h)
    pub scaled_sup: f64,
    /// ‖T(h)/h‖_∞ for the h² variant (≤ 2)
    pub variant2_sup: f64,
    pub variant2_holds: bool,
}

/// Diagonal counterexample: T(h) = diag(hλ_i/(λ_i+h) + h^{3/2}/(λ_i+h)),
/// bounded in deviation from hI by √h while ‖T/h‖_∞ blows up like h^{-1/2};
/// replacing h^{3/2} by h² keeps ‖T/h‖_∞ ≤ 2 (it is exactly 1).
pub fn gorillaz_fixture(lambda: &[f64], h_grid: &[f64]) -> Result<Vec<GorillazPoint>> {
    if lambda.is_empty() {
        return Err(Error::invalid("lambda", "need at least one eigenvalue"));
    }
    for w in lambda.windows(2) {
        if w[1] >= w[0] || w[1] <= 0.0 {
            return Err(Error::invalid("lambda", "must be strictly decreasing and positive"));
        }
    }
    let mut out = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let mut dev = 0.0f64;
        let mut sup1 = 0.0f64;
        let mut sup2 = 0.0f64;
        for &l in lambda {
            let a1 = h * l / (l + h) + h.powf(1.5) / (l + h);
            let a2 = h * l / (l + h) + h * h / (l + h);
            dev = dev.max((a1 - h).abs());
            sup1 = sup1.max(a1 / h);
            sup2 = sup2.max(a2 / h);
        }
        let sqrt_h = h.sqrt();
        out.push(GorillazPoint {
            h,
            dev_from_h_identity: dev,
            sqrt_h,
            bound_holds: dev <= sqrt_h * (1.0 + 1e-10),
            scaled_sup: sup1 * sqrt_h,
            variant2_sup: sup2,
            variant2_holds: sup2 <= 2.0,
        });
    }
    Ok(out)
}
