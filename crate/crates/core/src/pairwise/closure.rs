//! Triple approximations `[ABC]_mn` in terms of pairs and singles.

use crate::error::{Error, Result};
use crate::netgen::{WeightClasses, WeightMode};

#[derive(Debug, Clone, PartialEq)]
pub enum Closure {
    /// `[ABC]_mn = (k-1)/k * [AB]_m [BC]_n / [B]` for every class pair.
    Classic { mean_degree: f64 },
    /// Same-class triples use `(k_i-1)/k_i`, cross-class triples use factor 1.
    Modified { class_degrees: Vec<f64> },
}

impl Closure {
    pub fn classic(mean_degree: f64) -> Result<Self> {
        if !(mean_degree.is_finite() && mean_degree > 0.0) {
            return Err(Error::invalid("mean_degree", format!("must be positive, got {mean_degree}")));
        }
        Ok(Closure::Classic { mean_degree })
    }

    pub fn modified(class_degrees: Vec<f64>) -> Result<Self> {
        if class_degrees.is_empty() {
            return Err(Error::invalid("class_degrees", "no classes given"));
        }
        if let Some(k) = class_degrees.iter().find(|&&k| !(k.is_finite() && k >= 1.0)) {
            return Err(Error::invalid("class_degrees", format!("class degree {k} is below 1")));
        }
        Ok(Closure::Modified { class_degrees })
    }

    /// Classic for randomly weighted networks, modified for fixed allotments.
    pub fn default_for(wc: &WeightClasses) -> Result<Self> {
        match wc.mode() {
            WeightMode::Random => Self::classic(wc.degree() as f64),
            WeightMode::Fixed => Self::modified(wc.class_degrees()),
        }
    }

    /// Number of classes the closure is tied to, if any.
    pub fn class_count(&self) -> Option<usize> {
        match self {
            Closure::Classic { .. } => None,
            Closure::Modified { class_degrees } => Some(class_degrees.len()),
        }
    }

    /// Multiplier in front of `[AB]_m [BC]_n / [B]`.
    pub fn factor(&self, m: usize, n: usize) -> f64 {
        match self {
            Closure::Classic { mean_degree: k } => (k - 1.0) / k,
            Closure::Modified { class_degrees } if m == n => {
                let k = class_degrees[m];
                (k - 1.0) / k
            }
            Closure::Modified { .. } => 1.0,
        }
    }

    /// Triple estimate with negative transients treated as zero. An empty
    /// centre compartment yields zero.
    pub fn triple(&self, ab_m: f64, bc_n: f64, b: f64, m: usize, n: usize) -> f64 {
        if b <= 0.0 {
            return 0.0;
        }
        self.factor(m, n) * ab_m.max(0.0) * bc_n.max(0.0) / b
    }
}

/// Checked triple evaluation for callers outside the integrator.
pub fn closure_eval(closure: &Closure, ab_m: f64, bc_n: f64, b: f64, m: usize, n: usize) -> Result<f64> {
    if ab_m < 0.0 || bc_n < 0.0 || b < 0.0 {
        return Err(Error::invalid("closure", "pair and single counts must be non-negative"));
    }
    if let Some(count) = closure.class_count() {
        if m >= count || n >= count {
            return Err(Error::invalid("closure", format!("class index outside 0..{count}")));
        }
    }
    Ok(closure.triple(ab_m, bc_n, b, m, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_centre_gives_zero() {
        let c = Closure::classic(5.0).unwrap();
        assert_eq!(closure_eval(&c, 10.0, 20.0, 0.0, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn classic_value() {
        let c = Closure::classic(5.0).unwrap();
        assert!((closure_eval(&c, 10.0, 20.0, 50.0, 0, 1).unwrap() - 3.2).abs() < 1e-14);
    }

    #[test]
    fn modified_values() {
        let c = Closure::modified(vec![2.0, 8.0]).unwrap();
        assert!((closure_eval(&c, 10.0, 20.0, 50.0, 0, 0).unwrap() - 2.0).abs() < 1e-14);
        assert!((closure_eval(&c, 10.0, 20.0, 50.0, 0, 1).unwrap() - 4.0).abs() < 1e-14);
        assert!((closure_eval(&c, 10.0, 20.0, 50.0, 1, 1).unwrap() - 3.5).abs() < 1e-14);
    }

    #[test]
    fn single_class_modified_matches_classic() {
        let classic = Closure::classic(6.0).unwrap();
        let modified = Closure::modified(vec![6.0]).unwrap();
        for (ab, bc, b) in [(1.0, 2.0, 3.0), (40.0, 7.5, 900.0), (0.0, 1.0, 1.0)] {
            assert_eq!(classic.triple(ab, bc, b, 0, 0), modified.triple(ab, bc, b, 0, 0));
        }
    }

    #[test]
    fn invalid_inputs() {
        let c = Closure::classic(5.0).unwrap();
        assert!(closure_eval(&c, -1.0, 1.0, 1.0, 0, 0).is_err());
        assert!(Closure::modified(vec![2.0, 0.5]).is_err());
        assert!(Closure::classic(0.0).is_err());
        let m = Closure::modified(vec![2.0, 3.0]).unwrap();
        assert!(closure_eval(&m, 1.0, 1.0, 1.0, 0, 2).is_err());
    }

    #[test]
    fn negative_transients_clamped() {
        let c = Closure::classic(5.0).unwrap();
        assert_eq!(c.triple(-1e-10, 5.0, 10.0, 0, 0), 0.0);
    }
}
