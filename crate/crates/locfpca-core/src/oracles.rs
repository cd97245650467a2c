//! Brute-force density and moment oracles, independent of the operator
//! estimators they check: the norm density by recursive polar convolution,
//! the joint densities of (⟨X,e_i⟩, ‖X‖) and (⟨X,e_i⟩, ⟨X,e_j⟩, ‖X‖), and
//! the radial-integral right-hand sides of the cell-by-cell expansions.
//!
//! All densities refer to the shifted element X − x₀: coordinate j has
//! density g_j(y) = f_j(y + ⟨x₀,e_j⟩; λ_j).

use crate::error::{Error, Result};
use crate::exec::{map_collect, ExecMode};
use crate::gamma::{gamma_function, AuxiliaryFunction, LogScaleFn};
use crate::kernel::Kernel;
use crate::model::{CoordinateFamily, ProcessModel};
use crate::quad::{adaptive_simpson, gauss_legendre, QuadOutcome};
use crate::rng;
use std::f64::consts::PI;

const DEFAULT_GRID: usize = 6000;
const DEFAULT_PHI_NODES: usize = 160;

#[derive(Debug, Clone, PartialEq)]
pub enum DensityMethod {
    /// Recursive polar convolution over the product of coordinate densities.
    RecursiveQuadrature { kept_coordinates: usize },
    /// Kernel-density estimate on sampled radii (normal reference bandwidth).
    MonteCarloKde { n: usize, bandwidth: f64, seed: u64 },
}

/// Density of sqrt(Σ_{k∉excluded} ⟨X−x₀,e_k⟩²) tabulated on a uniform grid.
#[derive(Debug, Clone)]
pub struct NormDensity {
    r: Vec<f64>,
    f: Vec<f64>,
    pub method: DensityMethod,
    pub excluded: Vec<usize>,
    /// Total variance of coordinates skipped as numerically negligible.
    pub skipped_variance: f64,
}

impl NormDensity {
    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }

    pub fn interpolate(&self, v: f64) -> f64 {
        if v < 0.0 || v > self.r_max() {
            return 0.0;
        }
        let step = self.r[1] - self.r[0];
        let k = ((v / step) as usize).min(self.r.len() - 2);
        let t = (v - self.r[k]) / step;
        self.f[k] * (1.0 - t) + self.f[k + 1] * t
    }

    /// Total mass by trapezoid over the grid (should be 1).
    pub fn mass(&self) -> f64 {
        let step = self.r[1] - self.r[0];
        let mut s = 0.5 * (self.f[0] + self.f[self.f.len() - 1]);
        for v in &self.f[1..self.f.len() - 1] {
            s += v;
        }
        s * step
    }

    /// ∫₀^h g(t) f(t) dt by Gauss-Legendre on the interpolated density.
    pub fn integral_against(&self, h: f64, g: impl Fn(f64) -> f64) -> f64 {
        let hi = h.min(self.r_max());
        if hi <= 0.0 {
            return 0.0;
        }
        let (nodes, weights) = gauss_legendre(200);
        let half = 0.5 * hi;
        nodes
            .iter()
            .zip(&weights)
            .map(|(x, w)| {
                let t = half * (1.0 + x);
                w * g(t) * self.interpolate(t)
            })
            .sum::<f64>()
            * half
    }

    /// F(h) = P(radius < h).
    pub fn cdf(&self, h: f64) -> f64 {
        self.integral_against(h, |_| 1.0)
    }
}

/// Integration segments covering the support of a shifted coordinate
/// density, split at its kinks.
fn coordinate_segments(family: CoordinateFamily, lambda: f64, shift: f64) -> Vec<(f64, f64)> {
    let (lo, hi) = match family {
        CoordinateFamily::Gaussian => (-shift - 9.0 * lambda.sqrt(), -shift + 9.0 * lambda.sqrt()),
        CoordinateFamily::Laplace => (-shift - 45.0 * lambda, -shift + 45.0 * lambda),
        CoordinateFamily::Cubic => {
            let half = 3.0 * lambda.sqrt();
            (-shift - half, -shift + half)
        }
    };
    let kink = -shift;
    if matches!(family, CoordinateFamily::Gaussian) || kink <= lo || kink >= hi {
        vec![(lo, hi)]
    } else {
        vec![(lo, kink), (kink, hi)]
    }
}

struct Coord {
    lambda: f64,
    shift: f64,
    family: CoordinateFamily,
    segments: Vec<(f64, f64)>,
    reach: f64,
}

impl Coord {
    fn g(&self, y: f64) -> f64 {
        self.family.density(self.lambda, y + self.shift, 0).unwrap_or(0.0)
    }
}

/// Norm density of the shifted element with the listed coordinates removed,
/// by recursive polar convolution (any effective dimension). Coordinates
/// whose whole support falls below the grid resolution are skipped and
/// accounted in `skipped_variance`.
pub fn norm_density(model: &ProcessModel, excluded: &[usize], mode: ExecMode) -> Result<NormDensity> {
    norm_density_with(model, excluded, DEFAULT_GRID, DEFAULT_PHI_NODES, mode)
}

pub fn norm_density_with(
    model: &ProcessModel,
    excluded: &[usize],
    grid_points: usize,
    phi_nodes: usize,
    mode: ExecMode,
) -> Result<NormDensity> {
    let x0 = model.shift().coeffs().coeffs();
    let mut coords: Vec<Coord> = Vec::new();
    for k in 0..model.dim() {
        if excluded.contains(&k) {
            continue;
        }
        let lambda = model.lambdas()[k];
        let shift = x0[k];
        let segments = coordinate_segments(model.family(), lambda, shift);
        let reach = segments
            .iter()
            .map(|&(a, b)| a.abs().max(b.abs()))
            .fold(0.0f64, f64::max);
        coords.push(Coord { lambda, shift, family: model.family(), segments, reach });
    }
    if coords.is_empty() {
        return Err(Error::invalid("excluded", "effective dimension is zero"));
    }

    // grid long enough to hold the sum of coordinate reaches (clipped by a
    // concentration bound so wide truncations do not dilute the grid)
    let sum_sq: f64 = coords.iter().map(|c| c.reach * c.reach).sum();
    let mean_sq: f64 = coords
        .iter()
        .map(|c| c.family.variance(c.lambda) + c.shift * c.shift)
        .sum();
    let r_max = (sum_sq.sqrt()).min(8.0 * mean_sq.sqrt().max(1e-6) + coords.iter().map(|c| c.reach).fold(0.0f64, f64::max));
    let step = r_max / (grid_points - 1) as f64;

    // order by decreasing scale; drop coordinates below grid resolution
    coords.sort_by(|a, b| b.reach.partial_cmp(&a.reach).unwrap());
    let mut skipped_variance = 0.0;
    let kept: Vec<&Coord> = coords
        .iter()
        .filter(|c| {
            let resolvable = c.reach > 0.25 * step;
            if !resolvable {
                skipped_variance += c.family.variance(c.lambda) + c.shift * c.shift;
            }
            resolvable
        })
        .collect();
    if kept.is_empty() {
        return Err(Error::invalid("grid_points", "grid cannot resolve any coordinate"));
    }

    let r: Vec<f64> = (0..grid_points).map(|i| i as f64 * step).collect();

    // base level: folded density of the widest coordinate
    let first = kept[0];
    let mut f: Vec<f64> = r.iter().map(|&v| first.g(v) + first.g(-v)).collect();

    let (phi_raw, phi_w) = gauss_legendre(phi_nodes);
    let phi: Vec<f64> = phi_raw.iter().map(|x| (x + 1.0) * (PI / 4.0)).collect();
    let wphi: Vec<f64> = phi_w.iter().map(|w| w * (PI / 4.0)).collect();
    let (gl_nodes, gl_w) = gauss_legendre(phi_nodes);

    for c in kept.iter().skip(1) {
        let interp = |v: f64, fv: &Vec<f64>| -> f64 {
            if v < 0.0 || v > r_max {
                return 0.0;
            }
            let k = ((v / step) as usize).min(grid_points - 2);
            let t = (v - r[k]) / step;
            fv[k] * (1.0 - t) + fv[k + 1] * t
        };
        let y_cut = 2.0 * c.reach;
        let fv = &f;
        let fnew: Vec<f64> = map_collect(mode, grid_points, |idx| {
            let v = r[idx];
            if v == 0.0 {
                return 0.0;
            }
            if v <= y_cut {
                // small radius: polar form resolves the angular scale
                let mut s = 0.0;
                for (p, w) in phi.iter().zip(&wphi) {
                    let ys = v * p.sin();
                    s += w * (c.g(ys) + c.g(-ys)) * interp(v * p.cos(), fv);
                }
                v * s
            } else {
                // large radius: integrate over the coordinate's own support,
                // one Gauss-Legendre panel per smooth segment
                let mut s = 0.0;
                for &(a, b) in &c.segments {
                    let half = 0.5 * (b - a);
                    let mid = 0.5 * (a + b);
                    for (x, w) in gl_nodes.iter().zip(&gl_w) {
                        let y = mid + half * x;
                        if y.abs() >= v {
                            continue;
                        }
                        let rest = (v * v - y * y).sqrt();
                        s += w * half * c.g(y) * interp(rest, fv) * (v / rest);
                    }
                }
                s
            }
        });
        f = fnew;
    }

    Ok(NormDensity {
        r,
        f,
        method: DensityMethod::RecursiveQuadrature { kept_coordinates: kept.len() },
        excluded: excluded.to_vec(),
        skipped_variance,
    })
}

/// Kernel-density alternative on sampled radii (tagged, opt-in).
pub fn norm_density_mc_kde(
    model: &ProcessModel,
    excluded: &[usize],
    n: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<NormDensity> {
    if n < 100 {
        return Err(Error::SampleTooSmall { need: 100 });
    }
    let x0 = model.shift().coeffs().coeffs();
    let radii: Vec<f64> = map_collect(mode, n, |i| {
        let x = model.sample_one(seed, rng::domain::KDE, 0, i as u64);
        let mut s = 0.0;
        for k in 0..model.dim() {
            if !excluded.contains(&k) {
                let y = x.coeffs()[k] - x0[k];
                s += y * y;
            }
        }
        s.sqrt()
    });
    let mean = radii.iter().sum::<f64>() / n as f64;
    let var = radii.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64;
    let bandwidth = 1.06 * var.sqrt() * (n as f64).powf(-0.2);
    let r_max = radii.iter().cloned().fold(0.0f64, f64::max) + 5.0 * bandwidth;
    let grid_points = DEFAULT_GRID;
    let step = r_max / (grid_points - 1) as f64;
    let r: Vec<f64> = (0..grid_points).map(|i| i as f64 * step).collect();
    let norm = 1.0 / (n as f64 * bandwidth * (2.0 * PI).sqrt());
    let f: Vec<f64> = map_collect(mode, grid_points, |idx| {
        let v = r[idx];
        let mut s = 0.0;
        for &x in &radii {
            // reflect at zero to reduce the boundary deficit
            let z1 = (v - x) / bandwidth;
            let z2 = (v + x) / bandwidth;
            s += (-0.5 * z1 * z1).exp() + (-0.5 * z2 * z2).exp();
        }
        s * norm
    });
    Ok(NormDensity {
        r,
        f,
        method: DensityMethod::MonteCarloKde { n, bandwidth, seed },
        excluded: excluded.to_vec(),
        skipped_variance: 0.0,
    })
}

/// Joint densities of coordinates with the norm, built on the rest-density.
pub struct JointDensity {
    g_i: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    g_j: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
    pub rest: NormDensity,
}

impl JointDensity {
    /// Density of (⟨X−x₀,e_i⟩, ‖X−x₀‖).
    pub fn pair(model: &ProcessModel, i: usize, mode: ExecMode) -> Result<Self> {
        if i >= model.dim() {
            return Err(Error::invalid("i", "coordinate out of range"));
        }
        let rest = norm_density(model, &[i], mode)?;
        Ok(JointDensity { g_i: shifted_density(model, i), g_j: None, rest })
    }

    /// Density of (⟨X−x₀,e_i⟩, ⟨X−x₀,e_j⟩, ‖X−x₀‖).
    pub fn triple(model: &ProcessModel, i: usize, j: usize, mode: ExecMode) -> Result<Self> {
        if i >= model.dim() || j >= model.dim() || i == j {
            return Err(Error::invalid("i/j", "need two distinct coordinates in range"));
        }
        let rest = norm_density(model, &[i, j], mode)?;
        Ok(JointDensity { g_i: shifted_density(model, i), g_j: Some(shifted_density(model, j)), rest })
    }

    /// f(u, v) = v/√(v²−u²) g_i(u) f_{≠i}(√(v²−u²)) on v > |u|, else 0.
    pub fn d1(&self, u: f64, v: f64) -> f64 {
        if v <= u.abs() {
            return 0.0;
        }
        let rest = (v * v - u * u).sqrt();
        v / rest * (self.g_i)(u) * self.rest.interpolate(rest)
    }

    /// f(t, u, v) = v/√(v²−u²−t²) g_i(t) g_j(u) f_{≠ij}(√(·)) inside the cone.
    pub fn d3(&self, t: f64, u: f64, v: f64) -> f64 {
        let g_j = self.g_j.as_ref().expect("triple-built density");
        let s = v * v - u * u - t * t;
        if s <= 0.0 {
            return 0.0;
        }
        let rest = s.sqrt();
        v / rest * (self.g_i)(t) * g_j(u) * self.rest.interpolate(rest)
    }

    /// Marginal norm density at v reconstructed by integrating the pair
    /// density over u (the d1bis identity), with the angular substitution.
    pub fn marginal_norm(&self, v: f64, nodes: usize) -> f64 {
        let (xs, ws) = gauss_legendre(nodes);
        // u = v sin(phi), both signs
        let mut s = 0.0;
        for (x, w) in xs.iter().zip(&ws) {
            let phi = (x + 1.0) * (PI / 4.0);
            let u = v * phi.sin();
            let rest = v * phi.cos();
            s += w * (PI / 4.0) * ((self.g_i)(u) + (self.g_i)(-u)) * self.rest.interpolate(rest);
        }
        v * s
    }

    /// E[⟨X−x₀,e_i⟩² | ‖X−x₀‖ = v]
    pub fn conditional_second_moment(&self, v: f64, nodes: usize) -> f64 {
        let (xs, ws) = gauss_legendre(nodes);
        let mut num = 0.0;
        let mut den = 0.0;
        for (x, w) in xs.iter().zip(&ws) {
            let phi = (x + 1.0) * (PI / 4.0);
            let u = v * phi.sin();
            let rest = v * phi.cos();
            let g = (self.g_i)(u) + (self.g_i)(-u);
            let val = w * g * self.rest.interpolate(rest);
            num += val * u * u;
            den += val;
        }
        if den > 0.0 {
            num / den
        } else {
            f64::NAN
        }
    }
}

fn shifted_density(model: &ProcessModel, k: usize) -> Box<dyn Fn(f64) -> f64 + Send + Sync> {
    let family = model.family();
    let lambda = model.lambdas()[k];
    let shift = model.shift().coeffs().coeffs()[k];
    Box::new(move |y: f64| family.density(lambda, y + shift, 0).unwrap_or(0.0))
}

#[derive(Debug, Clone)]
pub struct PrelPoint {
    pub s: f64,
    pub lhs_over_f: f64,
    pub rhs_over_f: f64,
    pub ratio: f64,
    pub quadrature: QuadOutcome,
}

/// Radial-slice integral against the class-Γ prediction
/// ∫₀¹ t^p/√(1−t²) f(s√(1−t²)) dt ~ 2^{(p−1)/2} Γ((p+1)/2) f(s) (ρ(s)/s)^{(p+1)/2}.
/// Both sides are scaled by f(s); the endpoint singularity is removed by
/// t = sin φ.
pub fn prel_check<F: LogScaleFn>(
    f: &F,
    rho: &AuxiliaryFunction,
    p: u32,
    s_grid: &[f64],
) -> Result<Vec<PrelPoint>> {
    let mut out = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let ln_fs = f.ln_value(s);
        let integrand = |phi: f64| -> f64 {
            let c = phi.cos();
            if c <= 0.0 {
                return 0.0;
            }
            let e = f.ln_value(s * c) - ln_fs;
            if e < -745.0 {
                return 0.0;
            }
            phi.sin().powi(p as i32) * e.exp()
        };
        let quad = adaptive_simpson(&integrand, 0.0, PI / 2.0, 1e-12, 44);
        let rhs = 2f64.powf((p as f64 - 1.0) / 2.0)
            * gamma_function((p as f64 + 1.0) / 2.0)?
            * (rho.evaluate(s)? / s).powf((p as f64 + 1.0) / 2.0);
        out.push(PrelPoint {
            s,
            lhs_over_f: quad.value,
            rhs_over_f: rhs,
            ratio: quad.value / rhs,
            quadrature: quad,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct LoundgePoint {
    pub v: f64,
    pub norm_density: f64,
    /// Γ(1/2) √(2vρ(v)) g_i(0) f_{≠i}(v)
    pub first_form: f64,
    pub ratio_first: f64,
    /// 2π g_i(0) g_j(0) v ρ(v) f_{≠ij}(v), when j is given
    pub second_form: Option<f64>,
    pub ratio_second: Option<f64>,
}

/// Compare the norm density against the two slice expansions. The argument
/// convention is the shifted one: g_i(0) is the density of ⟨X−x₀,e_i⟩ at 0.
/// The statements are asymptotic; ratios are reported, trends decided by
/// callers.
pub fn loundge_check(
    model: &ProcessModel,
    i: usize,
    j: Option<usize>,
    v_grid: &[f64],
    rho: &AuxiliaryFunction,
    mode: ExecMode,
) -> Result<Vec<LoundgePoint>> {
    let full = norm_density(model, &[], mode)?;
    let not_i = norm_density(model, &[i], mode)?;
    let gi0 = (shifted_density(model, i))(0.0);
    let second = match j {
        Some(j) => {
            let not_ij = norm_density(model, &[i, j], mode)?;
            let gj0 = (shifted_density(model, j))(0.0);
            Some((not_ij, gj0))
        }
        None => None,
    };
    let sqrt_pi = gamma_function(0.5)?;
    let mut out = Vec::with_capacity(v_grid.len());
    for &v in v_grid {
        let rho_v = rho.evaluate(v)?;
        let lhs = full.interpolate(v);
        let first = sqrt_pi * (2.0 * v * rho_v).sqrt() * gi0 * not_i.interpolate(v);
        let (second_form, ratio_second) = match &second {
            Some((not_ij, gj0)) => {
                let rhs = 2.0 * PI * gi0 * gj0 * v * rho_v * not_ij.interpolate(v);
                (Some(rhs), Some(lhs / rhs))
            }
            None => (None, None),
        };
        out.push(LoundgePoint {
            v,
            norm_density: lhs,
            first_form: first,
            ratio_first: lhs / first,
            second_form,
            ratio_second,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct T1T2Point {
    pub h: f64,
    pub lhs_ii: f64,
    pub rhs_ii: f64,
    pub ratio_ii: f64,
    pub lhs_ij: f64,
    pub rhs_ij: f64,
    /// NaN when both sides vanish (symmetric zero-shift case)
    pub ratio_ij: f64,
}

#[derive(Debug, Clone)]
pub struct T1T2Report {
    pub points: Vec<T1T2Point>,
    /// (v, E[⟨X−x₀,e_i⟩²|‖X−x₀‖=v] / (v ρ(v))) on the diagnostic grid
    pub conditional_diag: Vec<(f64, f64)>,
}

/// Diagonal and off-diagonal cell expansions: tensor-quadrature left sides
/// against the radial-integral right sides built on the norm density.
pub fn t1_t2_check(
    model: &ProcessModel,
    kernel: &Kernel,
    h_grid: &[f64],
    i: usize,
    j: usize,
    rho: &AuxiliaryFunction,
    cond_grid: &[f64],
    mode: ExecMode,
) -> Result<T1T2Report> {
    if i == j || i >= model.dim() || j >= model.dim() {
        return Err(Error::invalid("i/j", "need distinct coordinates in range"));
    }
    let field = crate::model::r_field(model)?;
    let fnorm = norm_density(model, &[], mode)?;
    let mut points = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let gamma_k = crate::localcov::theoretical_local_cov(
            model,
            kernel,
            h,
            &crate::localcov::CovMethod::Quadrature { nodes_per_axis: 80 },
            mode,
        )?;
        let lhs_ii = gamma_k.op.entry(i, i);
        let lhs_ij = gamma_k.op.entry(i, j);
        let int1 = fnorm.integral_against(h, |t| t * rho.evaluate(t).unwrap_or(0.0) * kernel.at(t / h));
        let int2 = fnorm.integral_against(h, |t| {
            let r = rho.evaluate(t).unwrap_or(0.0);
            t * t * r * r * kernel.at(t / h)
        });
        let rhs_ii = int1 + field.diag()[i] * int2;
        let rhs_ij = field.tau()[i] * field.tau()[j] * int2;
        let ratio_ij = if rhs_ij == 0.0 && lhs_ij.abs() < 1e-12 {
            f64::NAN
        } else {
            lhs_ij / rhs_ij
        };
        points.push(T1T2Point {
            h,
            lhs_ii,
            rhs_ii,
            ratio_ii: lhs_ii / rhs_ii,
            lhs_ij,
            rhs_ij,
            ratio_ij,
        });
    }
    let joint = JointDensity::pair(model, i, mode)?;
    let conditional_diag = cond_grid
        .iter()
        .map(|&v| {
            let m = joint.conditional_second_moment(v, 240);
            Ok((v, m / (v * rho.evaluate(v)?)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(T1T2Report { points, conditional_diag })
}

#[derive(Debug, Clone)]
pub struct FreeMomentPoint {
    pub h: f64,
    /// E[K^m(‖X−x₀‖/h) ‖X−x₀‖^p]
    pub lhs: f64,
    /// K^m(1) h^p F(h)
    pub rhs: f64,
    pub ratio: f64,
    pub f_h: f64,
    pub underflow: bool,
}

/// Truncated-moment equivalent E[K^m(‖·‖/h)‖·‖^p] ~ K^m(1) h^p F(h),
/// through the norm-density integral.
pub fn free_moment_check(
    model: &ProcessModel,
    kernel: &Kernel,
    m: u32,
    p: u32,
    h_grid: &[f64],
    mode: ExecMode,
) -> Result<Vec<FreeMomentPoint>> {
    if m < 1 {
        return Err(Error::invalid("m", "must be >= 1"));
    }
    let fnorm = norm_density(model, &[], mode)?;
    let mut out = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let lhs = fnorm.integral_against(h, |t| kernel.at(t / h).powi(m as i32) * t.powi(p as i32));
        let f_h = fnorm.cdf(h);
        let rhs = kernel.at_one().powi(m as i32) * h.powi(p as i32) * f_h;
        let underflow = f_h < 1e-12;
        out.push(FreeMomentPoint {
            h,
            lhs,
            rhs,
            ratio: if underflow { f64::NAN } else { lhs / rhs },
            f_h,
            underflow,
        });
    }
    Ok(out)
}
