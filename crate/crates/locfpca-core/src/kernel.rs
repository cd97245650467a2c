//! Kernels on [0,1] satisfying the local-covariance assumptions: bounded,
//! unit mass, K(1) > 0, bounded derivative.

use crate::error::{Error, Result};
use crate::quad::integrate_gl;

#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    /// K ≡ 1 on [0,1]; the default (makes every moment a single radial integral).
    Uniform,
    /// K(s) = (β+1) s^β on [0,1], β ≥ 1; mass loads toward the sphere.
    Rising { beta: f64 },
    /// Piecewise-linear table on [0,1]; validated to unit mass.
    Table { points: Vec<(f64, f64)> },
}

impl Kernel {
    pub fn uniform() -> Self {
        Kernel::Uniform
    }

    pub fn rising(beta: f64) -> Result<Self> {
        if beta < 1.0 {
            return Err(Error::invalid("beta", "rising kernel needs beta >= 1"));
        }
        Ok(Kernel::Rising { beta })
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 || points.first().map(|p| p.0) != Some(0.0) || points.last().map(|p| p.0) != Some(1.0) {
            return Err(Error::invalid("points", "table must span [0,1]"));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::invalid("points", "abscissae must increase"));
            }
        }
        let k = Kernel::Table { points };
        k.validate()?;
        Ok(k)
    }

    /// Check the assumptions: K ≥ 0, ∫₀¹K = 1 (to 1e−10), K(1) > 0.
    pub fn validate(&self) -> Result<()> {
        if self.at(1.0) <= 0.0 {
            return Err(Error::invalid("kernel", "K(1) must be positive"));
        }
        let mass = integrate_gl(|s| self.at(s), 0.0, 1.0, 160);
        if (mass - 1.0).abs() > 1e-10 {
            return Err(Error::invalid("kernel", format!("mass {mass} != 1")));
        }
        Ok(())
    }

    /// K(s); zero outside [0,1].
    pub fn at(&self, s: f64) -> f64 {
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        match self {
            Kernel::Uniform => 1.0,
            Kernel::Rising { beta } => (beta + 1.0) * s.powf(*beta),
            Kernel::Table { points } => {
                let k = points.partition_point(|&(x, _)| x <= s).min(points.len() - 1);
                if k == 0 {
                    return points[0].1;
                }
                let (x0, y0) = points[k - 1];
                let (x1, y1) = points[k];
                y0 + (y1 - y0) * (s - x0) / (x1 - x0)
            }
        }
    }

    /// K′(s) inside (0,1); table kinds use the segment slope.
    pub fn deriv(&self, s: f64) -> f64 {
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        match self {
            Kernel::Uniform => 0.0,
            Kernel::Rising { beta } => (beta + 1.0) * beta * s.powf(beta - 1.0),
            Kernel::Table { points } => {
                let k = points.partition_point(|&(x, _)| x <= s).min(points.len() - 1).max(1);
                let (x0, y0) = points[k - 1];
                let (x1, y1) = points[k];
                (y1 - y0) / (x1 - x0)
            }
        }
    }

    pub fn at_one(&self) -> f64 {
        self.at(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_and_rising_satisfy_assumptions() {
        Kernel::uniform().validate().unwrap();
        let r = Kernel::rising(2.0).unwrap();
        r.validate().unwrap();
        assert!((r.at(1.0) - 3.0).abs() < 1e-15);
        assert_eq!(r.at(1.5), 0.0);
        assert!(Kernel::rising(0.5).is_err());
    }

    #[test]
    fn table_kernel_mass_checked() {
        // triangle with mass 1: K(s) = 2s
        let t = Kernel::table(vec![(0.0, 0.0), (1.0, 2.0)]).unwrap();
        assert!((t.at(0.5) - 1.0).abs() < 1e-15);
        // unnormalized table rejected
        assert!(Kernel::table(vec![(0.0, 1.0), (1.0, 2.0)]).is_err());
    }
}
