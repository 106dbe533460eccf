//! Discrete-time simple quantum walks on `Z` and `Z^2`, the free Dirac
//! equation in momentum space with an isotropic ultraviolet cutoff, and the
//! closed-form pseudovelocity limit laws that connect the two.
//!
//! Units are dimensionless by default (`m = c = hbar = 1`); every formula
//! carries the constants explicitly through [`PhysParams`].

// `!(x > 0.0)` also rejects NaN; index loops mirror the formulas
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dirac;
pub mod error;
pub mod laws;
pub mod linalg;
pub mod quadrature;
pub mod walk;

pub use error::{Error, Result};
pub use linalg::{check_unitary, gamma, pauli, Mat2, Mat4, PhysParams, Qubit2, Qubit4, C64};
pub use quadrature::{Domain, IntegrationResult, IntegrationSpec, Method};

/// Exponent tuple `(alpha_1, ..., alpha_d)` selecting a joint moment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(exps: &[u32]) -> Self {
        MultiIndex(exps.to_vec())
    }

    pub fn zeros(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// `prod_j x_j^{alpha_j}`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&a, &xj)| xj.powi(a as i32)).product()
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: self.dim() });
        }
        Ok(())
    }

    /// All multi-indices of dimension `d` with total degree at most `max_total`.
    pub fn all_up_to(d: usize, max_total: u32) -> Vec<MultiIndex> {
        let mut out = vec![];
        let mut cur = vec![0u32; d];
        fn rec(j: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if j == cur.len() {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for a in 0..=left {
                cur[j] = a;
                rec(j + 1, left - a, cur, out);
            }
            cur[j] = 0;
        }
        rec(0, max_total, &mut cur, &mut out);
        out
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}
