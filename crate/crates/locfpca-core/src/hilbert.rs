//! Finite-truncation representation of the Hilbert space: coefficient
//! vectors in the basis (e_k), rank-one and dense operators, and the three
//! operator norms (sup, Hilbert-Schmidt, trace).

use crate::error::{Error, Result};
use crate::spectral;

/// Relative tolerance for accepting a matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Coordinates of an element of H in the basis (e_k), truncated to `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisCoeffs {
    coeffs: Vec<f64>,
}

impl BasisCoeffs {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("coeffs", "truncation dimension must be >= 1"));
        }
        Ok(BasisCoeffs { coeffs })
    }

    pub fn zero(dim: usize) -> Self {
        BasisCoeffs { coeffs: vec![0.0; dim] }
    }

    /// k-th basis vector e_k (0-indexed).
    pub fn basis_vector(dim: usize, k: usize) -> Self {
        let mut c = vec![0.0; dim];
        c[k] = 1.0;
        BasisCoeffs { coeffs: c }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn sub(&self, other: &BasisCoeffs) -> Result<BasisCoeffs> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch(self.dim(), other.dim()));
        }
        Ok(BasisCoeffs {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, s: f64) -> BasisCoeffs {
        BasisCoeffs { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }
}

/// Inner product on the truncated span.
pub fn inner(u: &BasisCoeffs, v: &BasisCoeffs) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimMismatch(u.dim(), v.dim()));
    }
    Ok(u.coeffs.iter().zip(&v.coeffs).map(|(a, b)| a * b).sum())
}

/// General dense operator on the truncated span (row index = output
/// coordinate). Not necessarily symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    entries: Vec<f64>, // row-major
}

impl Matrix {
    pub fn zero(dim: usize) -> Self {
        Matrix { dim, entries: vec![0.0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.entries[row * self.dim + col] = v;
    }

    pub fn apply(&self, t: &BasisCoeffs) -> Result<BasisCoeffs> {
        if t.dim() != self.dim {
            return Err(Error::DimMismatch(self.dim, t.dim()));
        }
        let mut out = vec![0.0; self.dim];
        for (row, o) in out.iter_mut().enumerate() {
            *o = (0..self.dim).map(|col| self.entry(row, col) * t.coeffs()[col]).sum();
        }
        BasisCoeffs::new(out)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    /// Validate symmetry and convert.
    pub fn into_symmetric(self) -> Result<SymOperator> {
        SymOperator::from_entries(self.dim, self.entries)
    }
}

/// Tensor product (u ⊗ v): t ↦ ⟨u,t⟩ v, as a dense matrix with entry
/// (row j, col i) = u_i v_j.
pub fn tensor_product(u: &BasisCoeffs, v: &BasisCoeffs) -> Result<Matrix> {
    if u.dim() != v.dim() {
        return Err(Error::DimMismatch(u.dim(), v.dim()));
    }
    let d = u.dim();
    let mut m = Matrix::zero(d);
    for j in 0..d {
        for i in 0..d {
            m.set(j, i, u.coeffs()[i] * v.coeffs()[j]);
        }
    }
    Ok(m)
}

/// Dense symmetric operator; symmetry is validated at construction so
/// assembly bugs surface instead of being averaged away.
#[derive(Debug, Clone, PartialEq)]
pub struct SymOperator {
    dim: usize,
    entries: Vec<f64>, // row-major, kept exactly symmetric
}

impl SymOperator {
    pub fn from_entries(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::invalid("entries", format!("expected {} entries", dim * dim)));
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let a = entries[i * dim + j];
                let b = entries[j * dim + i];
                let dev = (a - b).abs();
                if dev > SYMMETRY_TOL * 1f64.max(a.abs()) {
                    return Err(Error::NotSymmetric { i, j, dev });
                }
            }
        }
        Ok(SymOperator { dim, entries })
    }

    /// Build from the upper triangle of `f`, mirroring exactly.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                entries[i * dim + j] = v;
                entries[j * dim + i] = v;
            }
        }
        SymOperator { dim, entries }
    }

    pub fn zero(dim: usize) -> Self {
        SymOperator { dim, entries: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diag(&vec![1.0; dim])
    }

    pub fn diag(values: &[f64]) -> Self {
        let dim = values.len();
        let mut entries = vec![0.0; dim * dim];
        for (i, v) in values.iter().enumerate() {
            entries[i * dim + i] = *v;
        }
        SymOperator { dim, entries }
    }

    /// Symmetric rank-one tensor y ⊗ y.
    pub fn tensor_self(y: &BasisCoeffs) -> Self {
        Self::from_fn(y.dim(), |i, j| y.coeffs()[i] * y.coeffs()[j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// self += w * (y ⊗ y)
    pub fn add_scaled_tensor(&mut self, w: f64, y: &BasisCoeffs) -> Result<()> {
        if y.dim() != self.dim {
            return Err(Error::DimMismatch(self.dim, y.dim()));
        }
        for i in 0..self.dim {
            let yi = y.coeffs()[i];
            for j in 0..self.dim {
                self.entries[i * self.dim + j] += w * yi * y.coeffs()[j];
            }
        }
        Ok(())
    }

    pub fn scale(&self, s: f64) -> SymOperator {
        SymOperator { dim: self.dim, entries: self.entries.iter().map(|e| e * s).collect() }
    }

    pub fn sub(&self, other: &SymOperator) -> Result<SymOperator> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        Ok(SymOperator {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &SymOperator) -> Result<SymOperator> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        Ok(SymOperator {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn apply(&self, t: &BasisCoeffs) -> Result<BasisCoeffs> {
        if t.dim() != self.dim {
            return Err(Error::DimMismatch(self.dim, t.dim()));
        }
        let mut out = vec![0.0; self.dim];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..self.dim).map(|j| self.entry(i, j) * t.coeffs()[j]).sum();
        }
        BasisCoeffs::new(out)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    /// Hilbert-Schmidt norm straight from the entries.
    pub fn hs_norm(&self) -> f64 {
        self.entries.iter().map(|e| e * e).sum::<f64>().sqrt()
    }

    /// Sup (operator) norm: largest absolute eigenvalue.
    pub fn sup_norm(&self) -> Result<f64> {
        let eig = spectral::eig_sym(self)?;
        Ok(eig.char_numbers().first().copied().unwrap_or(0.0))
    }
}

/// The three norms of the operator-space chain ‖·‖_∞ ≤ ‖·‖₂ ≤ ‖·‖₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorNorms {
    pub sup_norm: f64,
    pub hs_norm: f64,
    pub trace_norm: f64,
}

pub fn operator_norms(t: &SymOperator) -> Result<OperatorNorms> {
    let eig = spectral::eig_sym(t)?;
    let sup = eig.char_numbers().first().copied().unwrap_or(0.0);
    let trace_norm = eig.eigenvalues().iter().map(|l| l.abs()).sum();
    Ok(OperatorNorms { sup_norm: sup, hs_norm: t.hs_norm(), trace_norm })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bc(v: &[f64]) -> BasisCoeffs {
        BasisCoeffs::new(v.to_vec()).unwrap()
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&bc(&[1.0, 0.0]), &bc(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(inner(&bc(&[1.0, 2.0]), &bc(&[3.0, -1.0])).unwrap(), 1.0);
        assert_eq!(inner(&bc(&[3.0, 4.0]), &bc(&[3.0, 4.0])).unwrap(), 25.0);
        assert!(inner(&bc(&[1.0]), &bc(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn tensor_product_definition() {
        // (e1 ⊗ e2) e1 = <e1,e1> e2 = e2
        let u = BasisCoeffs::basis_vector(2, 0);
        let v = BasisCoeffs::basis_vector(2, 1);
        let m = tensor_product(&u, &v).unwrap();
        let out = m.apply(&BasisCoeffs::basis_vector(2, 0)).unwrap();
        assert_eq!(out.coeffs(), &[0.0, 1.0]);

        // u=(1,2), v=(3,0), t=(1,1): <u,t>=3, result 3v=(9,0)
        let m = tensor_product(&bc(&[1.0, 2.0]), &bc(&[3.0, 0.0])).unwrap();
        let out = m.apply(&bc(&[1.0, 1.0])).unwrap();
        assert_eq!(out.coeffs(), &[9.0, 0.0]);
    }

    #[test]
    fn unit_tensor_is_rank_one_projector() {
        let u = bc(&[0.6, 0.8]);
        let m = tensor_product(&u, &u).unwrap();
        assert!((m.trace() - 1.0).abs() < 1e-15);
        let p = m.into_symmetric().unwrap();
        let norms = operator_norms(&p).unwrap();
        assert!((norms.sup_norm - 1.0).abs() < 1e-12);
        assert!((norms.hs_norm - 1.0).abs() < 1e-12);
        assert!((norms.trace_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_rejected() {
        let e = SymOperator::from_entries(2, vec![1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(e, Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn identity_norms() {
        let norms = operator_norms(&SymOperator::identity(4)).unwrap();
        assert!((norms.sup_norm - 1.0).abs() < 1e-12);
        assert!((norms.hs_norm - 2.0).abs() < 1e-12);
        assert!((norms.trace_norm - 4.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_self_applies_as_inner_times_u() {
        let u = bc(&[1.5, -0.5, 2.0]);
        let t = bc(&[0.3, 1.0, -1.0]);
        let p = SymOperator::tensor_self(&u);
        let lhs = p.apply(&t).unwrap();
        let c = inner(&u, &t).unwrap();
        for k in 0..3 {
            assert!((lhs.coeffs()[k] - c * u.coeffs()[k]).abs() < 1e-14);
        }
    }
}
