//! Symmetric eigendecomposition by cyclic Jacobi sweeps, eigenprojectors,
//! and the characteristic-number distance.

use crate::error::{Error, Result};
use crate::hilbert::{BasisCoeffs, SymOperator};

const JACOBI_THRESHOLD: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Gap tolerance for projector extraction, relative to the trace norm.
pub const GAP_TOL_REL: f64 = 1e-9;

/// Eigenvalues sorted by absolute value descending (characteristic-number
/// order), ties broken by original index; eigenvectors orthonormal.
#[derive(Debug, Clone)]
pub struct EigDecomp {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<BasisCoeffs>,
    dim: usize,
}

impl EigDecomp {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Signed eigenvalues in characteristic-number order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[BasisCoeffs] {
        &self.eigenvectors
    }

    /// Characteristic numbers s_p: absolute eigenvalues, descending.
    pub fn char_numbers(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l.abs()).collect()
    }

    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).sum()
    }

    /// Σ s_p v_p ⊗ v_p
    pub fn reconstruct(&self) -> SymOperator {
        let mut m = SymOperator::zero(self.dim);
        for (l, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m.add_scaled_tensor(*l, v).expect("dims match");
        }
        m
    }
}

/// Cyclic Jacobi with fixed sweep order; deterministic for identical input.
pub fn eig_sym(t: &SymOperator) -> Result<EigDecomp> {
    let n = t.dim();
    let mut a: Vec<f64> = t.entries().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let fro = t.hs_norm().max(1.0);
    let tol = JACOBI_THRESHOLD * fro;

    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        s.sqrt()
    };

    let mut resid = off(&a);
    let mut converged = resid <= tol;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= tol / (n as f64 * n as f64) {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t_rot = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t_rot * t_rot).sqrt();
                let s = t_rot * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        resid = off(&a);
        converged = resid <= tol;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps, residual: resid });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .abs()
            .partial_cmp(&a[i * n + i].abs())
            .unwrap()
            .then(i.cmp(&j))
    });

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for &k in &order {
        eigenvalues.push(a[k * n + k]);
        let mut col: Vec<f64> = (0..n).map(|r| v[r * n + k]).collect();
        // deterministic sign: largest-magnitude component positive
        let lead = col
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.abs().partial_cmp(&y.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        if col[lead] < 0.0 {
            for c in col.iter_mut() {
                *c = -*c;
            }
        }
        eigenvectors.push(BasisCoeffs::new(col)?);
    }
    Ok(EigDecomp { eigenvalues, eigenvectors, dim: n })
}

/// Rank-one orthogonal projector onto the p-th eigenvector (characteristic
/// order). Rejects eigenvalues without a clear gap; the projector onto a
/// single vector is ill-defined inside a numerically degenerate cluster.
pub fn eigenprojector(e: &EigDecomp, p: usize) -> Result<SymOperator> {
    if p >= e.dim() {
        return Err(Error::invalid("p", format!("index {} out of range {}", p, e.dim())));
    }
    let tol = GAP_TOL_REL * e.trace_norm();
    let lp = e.eigenvalues[p];
    for (q, lq) in e.eigenvalues.iter().enumerate() {
        if q != p {
            let gap = (lp - lq).abs();
            if gap <= tol {
                return Err(Error::DegenerateEigenvalue { index: p, gap, tol });
            }
        }
    }
    Ok(SymOperator::tensor_self(&e.eigenvectors[p]))
}

/// sup_p |s_p(T) − s_p(U)| over characteristic numbers; bounded by
/// ‖T − U‖_∞ (Weyl).
pub fn char_number_distance(t: &SymOperator, u: &SymOperator) -> Result<f64> {
    if t.dim() != u.dim() {
        return Err(Error::DimMismatch(t.dim(), u.dim()));
    }
    let st = eig_sym(t)?.char_numbers();
    let su = eig_sym(u)?.char_numbers();
    Ok(st
        .iter()
        .zip(&su)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::operator_norms;
    use rand::Rng;

    fn random_sym(dim: usize, rng: &mut impl Rng) -> SymOperator {
        SymOperator::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn diagonal_matrix() {
        let e = eig_sym(&SymOperator::diag(&[3.0, 1.0, 0.0])).unwrap();
        assert_eq!(e.eigenvalues(), &[3.0, 1.0, 0.0]);
        assert_eq!(e.eigenvectors()[0].coeffs(), &[1.0, 0.0, 0.0]);
        assert_eq!(e.eigenvectors()[1].coeffs(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let t = SymOperator::from_entries(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = eig_sym(&t).unwrap();
        assert!((e.eigenvalues()[0] - 3.0).abs() < 1e-12);
        assert!((e.eigenvalues()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let mut rng = crate::rng::stream(11, 0, 0, 0);
        for _ in 0..20 {
            let t = random_sym(8, &mut rng);
            let e = eig_sym(&t).unwrap();
            let r = e.reconstruct();
            let resid = t.sub(&r).unwrap().hs_norm();
            assert!(resid <= 1e-8, "residual {resid}");
            for p in 0..8 {
                for q in 0..8 {
                    let g = crate::hilbert::inner(&e.eigenvectors()[p], &e.eigenvectors()[q]).unwrap();
                    let want = if p == q { 1.0 } else { 0.0 };
                    assert!((g - want).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn eigenvalues_invariant_under_permutation() {
        let mut rng = crate::rng::stream(12, 0, 0, 0);
        let t = random_sym(6, &mut rng);
        // permute coordinates (reverse order)
        let d = 6;
        let p = SymOperator::from_fn(d, |i, j| t.entry(d - 1 - i, d - 1 - j));
        let a = eig_sym(&t).unwrap();
        let b = eig_sym(&p).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn projector_properties() {
        let e = eig_sym(&SymOperator::diag(&[3.0, 1.0])).unwrap();
        let p0 = eigenprojector(&e, 0).unwrap();
        assert_eq!(p0.entry(0, 0), 1.0);
        assert_eq!(p0.entry(1, 1), 0.0);

        let mut rng = crate::rng::stream(13, 0, 0, 0);
        let t = random_sym(5, &mut rng);
        let e = eig_sym(&t).unwrap();
        if let Ok(p) = eigenprojector(&e, 0) {
            // idempotent, trace one, unit sup norm
            let p2 = SymOperator::from_fn(5, |i, j| {
                (0..5).map(|k| p.entry(i, k) * p.entry(k, j)).sum()
            });
            assert!(p2.sub(&p).unwrap().hs_norm() < 1e-8);
            assert!((p.trace() - 1.0).abs() < 1e-10);
            assert!((operator_norms(&p).unwrap().sup_norm - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn projectors_mutually_orthogonal() {
        let mut rng = crate::rng::stream(14, 0, 0, 0);
        let t = random_sym(5, &mut rng);
        let e = eig_sym(&t).unwrap();
        let ps: Vec<_> = (0..5).filter_map(|p| eigenprojector(&e, p).ok()).collect();
        for (a, pa) in ps.iter().enumerate() {
            for (b, pb) in ps.iter().enumerate() {
                if a != b {
                    let prod = SymOperator::from_fn(5, |i, j| {
                        (0..5).map(|k| pa.entry(i, k) * pb.entry(k, j)).sum()
                    });
                    assert!(prod.hs_norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn degenerate_gap_rejected() {
        let e = eig_sym(&SymOperator::diag(&[2.0, 2.0, 1.0])).unwrap();
        assert!(matches!(
            eigenprojector(&e, 0),
            Err(Error::DegenerateEigenvalue { .. })
        ));
        assert!(eigenprojector(&e, 2).is_ok());
    }

    #[test]
    fn char_distance_examples() {
        let t = SymOperator::diag(&[2.0, 1.0]);
        let u = SymOperator::diag(&[1.0, 1.0]);
        assert_eq!(char_number_distance(&t, &t).unwrap(), 0.0);
        let d = char_number_distance(&t, &u).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
        let sup = operator_norms(&t.sub(&u).unwrap()).unwrap().sup_norm;
        assert!(d <= sup + 1e-10);
    }

    #[test]
    fn weyl_bound_on_mixed_signs() {
        // characteristic numbers, not signed eigenvalues: this pair would
        // violate the bound under abs-sorted signed comparison
        let t = SymOperator::diag(&[1.0, -0.9]);
        let u = SymOperator::diag(&[0.9, -1.0]);
        let d = char_number_distance(&t, &u).unwrap();
        let sup = operator_norms(&t.sub(&u).unwrap()).unwrap().sup_norm;
        assert!(d <= sup + 1e-10, "d={d} sup={sup}");
    }
}
