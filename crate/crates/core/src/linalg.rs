//! Small dense complex matrices, the Pauli and gamma matrices, physical
//! constants and normalized initial qubits.
//!
//! Only 2x2 and 4x4 matrices are ever needed, so everything is a fixed-size
//! array with value semantics.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense `N x N` complex matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<const N: usize>(pub [[C64; N]; N]);

pub type Mat2 = Mat<2>;
pub type Mat4 = Mat<4>;

impl<const N: usize> Mat<N> {
    pub fn zeros() -> Self {
        Mat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for k in 0..N {
            m.0[k][k] = ONE;
        }
        m
    }

    pub fn diag(d: [C64; N]) -> Self {
        let mut m = Self::zeros();
        for k in 0..N {
            m.0[k][k] = d[k];
        }
        m
    }

    pub fn from_rows(rows: [[C64; N]; N]) -> Self {
        Mat(rows)
    }

    pub fn row(&self, j: usize) -> [C64; N] {
        self.0[j]
    }

    /// Hermitian conjugate.
    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                m.0[r][c] = self.0[c][r].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn mul_vec(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.0[r].iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|k| self.0[k][k]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.dagger()) <= tol
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::identity();
        let mut base = *self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<const N: usize> Index<(usize, usize)> for Mat<N> {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.0[r][c]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Mat<N> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.0[r][c]
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Mat<N>;
    fn mul(self, rhs: Mat<N>) -> Mat<N> {
        let mut m = Mat::zeros();
        for r in 0..N {
            for c in 0..N {
                m.0[r][c] = (0..N).map(|k| self.0[r][k] * rhs.0[k][c]).sum();
            }
        }
        m
    }
}

impl<const N: usize> Add for Mat<N> {
    type Output = Mat<N>;
    fn add(self, rhs: Mat<N>) -> Mat<N> {
        let mut m = self;
        for r in 0..N {
            for c in 0..N {
                m.0[r][c] += rhs.0[r][c];
            }
        }
        m
    }
}

impl<const N: usize> Sub for Mat<N> {
    type Output = Mat<N>;
    fn sub(self, rhs: Mat<N>) -> Mat<N> {
        self + rhs.scale(-ONE)
    }
}

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner<const N: usize>(a: &[C64; N], b: &[C64; N]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr<const N: usize>(v: &[C64; N]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Pauli matrix `sigma_k`, `k = 1, 2, 3`.
pub fn pauli(k: usize) -> Result<Mat2> {
    let m = match k {
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => return Err(Error::IndexOutOfRange { index: k, lo: 1, hi: 3 }),
    };
    Ok(Mat(m))
}

fn block4(tl: &Mat2, tr: &Mat2, bl: &Mat2, br: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for r in 0..2 {
        for c in 0..2 {
            m.0[r][c] = tl.0[r][c];
            m.0[r][c + 2] = tr.0[r][c];
            m.0[r + 2][c] = bl.0[r][c];
            m.0[r + 2][c + 2] = br.0[r][c];
        }
    }
    m
}

/// Gamma matrix `gamma_nu`, `nu = 1..=5`.
///
/// `gamma_k = [[0, -i sigma_k], [i sigma_k, 0]]` for `k = 1, 2, 3`,
/// `gamma_4 = diag(I, -I)` and `gamma_5 = gamma_1 gamma_2 gamma_3 gamma_4`.
pub fn gamma(nu: usize) -> Result<Mat4> {
    let zero = Mat2::zeros();
    let id = Mat2::identity();
    match nu {
        1..=3 => {
            let s = pauli(nu)?;
            Ok(block4(&zero, &s.scale(-I), &s.scale(I), &zero))
        }
        4 => Ok(block4(&id, &zero, &zero, &id.scale(-ONE))),
        5 => Ok(gamma(1)? * gamma(2)? * gamma(3)? * gamma(4)?),
        _ => Err(Error::IndexOutOfRange { index: nu, lo: 1, hi: 5 }),
    }
}

/// True iff every entry of `M^dagger M - I` is at most `tol` in modulus.
pub fn check_unitary<const N: usize>(m: &Mat<N>, tol: f64) -> bool {
    (m.dagger() * *m).max_abs_diff(&Mat::identity()) <= tol
}

/// Rest mass, speed of light and reduced Planck constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysParams {
    pub mass: f64,
    pub c: f64,
    pub hbar: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams { mass: 1.0, c: 1.0, hbar: 1.0 }
    }
}

impl PhysParams {
    pub fn new(mass: f64, c: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("m", mass), ("c", c), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(PhysParams { mass, c, hbar })
    }

    /// Rest energy `m c^2`.
    pub fn rest_energy(&self) -> f64 {
        self.mass * self.c * self.c
    }

    /// Compton momentum `m c`, the scale of the dimensionless cutoff ratio.
    pub fn mc(&self) -> f64 {
        self.mass * self.c
    }
}

/// Normalized initial internal state with `N` complex amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Qubit<const N: usize>([C64; N]);

pub type Qubit2 = Qubit<2>;
pub type Qubit4 = Qubit<4>;

/// Accepted deviation of `sum |q_j|^2` from one.
pub const QUBIT_NORM_TOL: f64 = 1e-9;

impl<const N: usize> Qubit<N> {
    pub fn new(amps: [C64; N]) -> Result<Self> {
        let n = norm_sqr(&amps);
        if !n.is_finite() || (n - 1.0).abs() > QUBIT_NORM_TOL {
            return Err(Error::QubitNotNormalized { norm_sqr: n });
        }
        Ok(Qubit(amps))
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        let arr: [C64; N] = amps
            .try_into()
            .map_err(|_| Error::QubitLength { expected: N, got: amps.len() })?;
        Self::new(arr)
    }

    /// Rescale arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: [C64; N]) -> Result<Self> {
        let n = norm_sqr(&amps).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::QubitNotNormalized { norm_sqr: n * n });
        }
        Ok(Qubit(amps.map(|z| z / n)))
    }

    pub fn basis(k: usize) -> Result<Self> {
        if k >= N {
            return Err(Error::IndexOutOfRange { index: k, lo: 0, hi: N - 1 });
        }
        let mut a = [ZERO; N];
        a[k] = ONE;
        Ok(Qubit(a))
    }

    pub fn amplitudes(&self) -> &[C64; N] {
        &self.0
    }

    /// Multiply by a global phase `e^{i theta}`.
    pub fn with_phase(&self, theta: f64) -> Self {
        let ph = C64::from_polar(1.0, theta);
        Qubit(self.0.map(|z| z * ph))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anticomm(a: &Mat4, b: &Mat4) -> Mat4 {
        *a * *b + *b * *a
    }

    #[test]
    fn pauli_three_is_diag() {
        assert_eq!(pauli(3).unwrap(), Mat2::diag([ONE, -ONE]));
    }

    #[test]
    fn pauli_involution_and_product() {
        let s1 = pauli(1).unwrap();
        let s2 = pauli(2).unwrap();
        let s3 = pauli(3).unwrap();
        assert_eq!(s1 * s1, Mat2::identity());
        assert_eq!(s1 * s2, s3.scale(I));
        assert!(pauli(0).is_err());
        assert!(pauli(4).is_err());
    }

    #[test]
    fn gamma_four_block_diag() {
        assert_eq!(gamma(4).unwrap(), Mat4::diag([ONE, ONE, -ONE, -ONE]));
        assert!(gamma(6).is_err());
        assert!(gamma(0).is_err());
    }

    #[test]
    fn gamma_anticommutators_exact() {
        for mu in 1..=4 {
            for nu in 1..=4 {
                let ac = anticomm(&gamma(mu).unwrap(), &gamma(nu).unwrap());
                let want = if mu == nu { Mat4::identity().scale(C64::from(2.0)) } else { Mat4::zeros() };
                assert_eq!(ac, want, "mu={mu} nu={nu}");
            }
        }
    }

    #[test]
    fn gamma_five_explicit() {
        // hand product: gamma_1 gamma_2 = diag(i s3, i s3); times gamma_3 gives
        // [[0, I], [-I, 0]]; times gamma_4 gives [[0, -I], [-I, 0]]
        let m1 = -ONE;
        let want = Mat4::from_rows([
            [ZERO, ZERO, m1, ZERO],
            [ZERO, ZERO, ZERO, m1],
            [m1, ZERO, ZERO, ZERO],
            [ZERO, m1, ZERO, ZERO],
        ]);
        let g5 = gamma(5).unwrap();
        assert_eq!(g5, want);
        assert_eq!(g5 * g5, Mat4::identity());
        for k in 1..=4 {
            assert_eq!(anticomm(&g5, &gamma(k).unwrap()), Mat4::zeros());
        }
    }

    #[test]
    fn unitarity_checks() {
        assert!(check_unitary(&Mat2::identity(), 1e-12));
        assert!(check_unitary(&pauli(1).unwrap(), 1e-12));
        assert!(!check_unitary(&Mat2::diag([ONE, C64::from(2.0)]), 1e-12));
        for k in 1..=3 {
            assert!(check_unitary(&pauli(k).unwrap(), 1e-15));
        }
        for nu in 1..=5 {
            assert!(check_unitary(&gamma(nu).unwrap(), 1e-15));
        }
    }

    #[test]
    fn qubit_validation() {
        assert!(Qubit4::new([ONE, ZERO, ZERO, ZERO]).is_ok());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(Qubit2::new([C64::from(h), I * h]).is_ok());
        assert!(matches!(
            Qubit4::new([ONE, ONE, ZERO, ZERO]),
            Err(Error::QubitNotNormalized { .. })
        ));
        assert!(matches!(Qubit4::from_slice(&[ONE]), Err(Error::QubitLength { .. })));
        let q = Qubit4::normalized([ONE, ONE, ZERO, ZERO]).unwrap();
        assert!((norm_sqr(q.amplitudes()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_power_matches_repeated_product() {
        let m = pauli(1).unwrap().scale(C64::from_polar(1.0, 0.3));
        let mut acc = Mat2::identity();
        for _ in 0..7 {
            acc = acc * m;
        }
        assert!(m.powi(7).max_abs_diff(&acc) < 1e-14);
    }

    #[test]
    fn phys_params_positive() {
        assert!(PhysParams::new(1.0, 2.0, 3.0).is_ok());
        assert!(PhysParams::new(0.0, 1.0, 1.0).is_err());
        assert!(PhysParams::new(1.0, f64::NAN, 1.0).is_err());
    }
}
