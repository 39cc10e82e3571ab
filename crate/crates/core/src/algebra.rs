//! Dense complex linear algebra for small operators.
//!
//! Everything here works on row-major `d x d` matrices with `d <= MAX_DIM`.
//! The module also owns the two-port coupler map shared by both couplers of
//! a feedback network.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// Largest supported state dimension.
pub const MAX_DIM: usize = 64;

/// Tolerance on `alpha^2 + beta^2 = 1` accepted by [`SplitterParams::new`].
pub const SPLITTER_NORM_TOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(())
}

fn check_finite(entries: &[Complex64]) -> Result<()> {
    match entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(idx) => Err(Error::NonFinite(idx)),
        None => Ok(()),
    }
}

fn expect_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn gaussian_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// A complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    entries: Vec<Complex64>,
}

impl StateVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        check_dim(entries.len())?;
        check_finite(&entries)?;
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); dim])
    }

    /// The computational basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = Self::zeros(dim)?;
        v.entries[index] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    /// A seeded complex-Gaussian vector normalized to unit length.
    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        check_dim(dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(&mut rng)).collect();
        let v = Self { entries };
        let n = v.norm();
        Ok(v.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    /// `a * x + b * y`.
    pub fn combine(a: Complex64, x: &Self, b: Complex64, y: &Self) -> Result<Self> {
        expect_dim(x.dim(), y.dim())?;
        Ok(Self {
            entries: x
                .entries
                .iter()
                .zip(&y.entries)
                .map(|(xi, yi)| a * xi + b * yi)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::combine(Complex64::new(1.0, 0.0), self, Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::combine(Complex64::new(1.0, 0.0), self, Complex64::new(-1.0, 0.0), other)
    }

    /// Max-norm of `self - other`.
    ///
    /// Panics if the dimensions differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        check_finite(&self.entries).is_ok()
    }
}

/// Result of [`Operator::invert`]: the inverse and the 1-norm condition
/// estimate `||A||_1 * ||A^-1||_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub inverse: Operator,
    pub condition: f64,
}

/// Thresholds used to declare a matrix singular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    pub min_pivot: f64,
    pub max_condition: f64,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self {
            min_pivot: 1e-300,
            max_condition: 1e12,
        }
    }
}

/// A square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<Complex64>,
}

impl Operator {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        expect_dim(dim * dim, data.len())?;
        check_finite(&data)?;
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        for row in &rows {
            expect_dim(dim, row.len())?;
        }
        Self::new(dim, rows.into_iter().flatten().collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(dim, vec![Complex64::new(0.0, 0.0); dim * dim])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::scalar(dim, Complex64::new(1.0, 0.0))
    }

    /// `c * I`.
    pub fn scalar(dim: usize, c: Complex64) -> Result<Self> {
        let mut op = Self::zeros(dim)?;
        for k in 0..dim {
            op.data[k * dim + k] = c;
        }
        check_finite(&op.data)?;
        Ok(op)
    }

    /// `e^{i phase} * I`.
    pub fn phase(dim: usize, phase: f64) -> Result<Self> {
        Self::scalar(dim, Complex64::from_polar(1.0, phase))
    }

    pub fn diagonal(diag: &[Complex64]) -> Result<Self> {
        let dim = diag.len();
        let mut op = Self::zeros(dim)?;
        for (k, &z) in diag.iter().enumerate() {
            op.data[k * dim + k] = z;
        }
        check_finite(&op.data)?;
        Ok(op)
    }

    /// Haar-distributed unitary from the QR factorization of a seeded
    /// complex-Gaussian matrix, with the diagonal of R made real positive.
    pub fn random_unitary(dim: usize, seed: u64) -> Result<Self> {
        check_dim(dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // columns[j][i] is entry (i, j)
        let mut columns: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| (0..dim).map(|_| gaussian_complex(&mut rng)).collect())
            .collect();

        for j in 0..dim {
            let (done, rest) = columns.split_at_mut(j);
            let col = &mut rest[0];
            // Modified Gram-Schmidt, applied twice to hold orthogonality at
            // machine precision.
            for _ in 0..2 {
                for q in done.iter() {
                    let proj: Complex64 = q.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
                    for (c, a) in col.iter_mut().zip(q) {
                        *c -= proj * a;
                    }
                }
            }
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for c in col.iter_mut() {
                *c /= norm;
            }
        }

        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (j, col) in columns.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                data[i * dim + j] = z;
            }
        }
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.dim)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        Self { dim: d, data }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// `a * x + b * y` for operators.
    pub fn combine(a: Complex64, x: &Self, b: Complex64, y: &Self) -> Result<Self> {
        expect_dim(x.dim, y.dim)?;
        Ok(Self {
            dim: x.dim,
            data: x
                .data
                .iter()
                .zip(&y.data)
                .map(|(xi, yi)| a * xi + b * yi)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::combine(Complex64::new(1.0, 0.0), self, Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::combine(Complex64::new(1.0, 0.0), self, Complex64::new(-1.0, 0.0), other)
    }

    pub fn mat_mul(&self, other: &Self) -> Result<Self> {
        expect_dim(self.dim, other.dim)?;
        let d = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * d..(k + 1) * d];
                for (out, b) in data[i * d..(i + 1) * d].iter_mut().zip(row) {
                    *out += a * b;
                }
            }
        }
        Ok(Self { dim: d, data })
    }

    pub fn mat_vec(&self, v: &StateVector) -> Result<StateVector> {
        expect_dim(self.dim, v.dim())?;
        Ok(StateVector {
            entries: self
                .rows()
                .map(|row| row.iter().zip(v.entries()).map(|(a, x)| a * x).sum())
                .collect(),
        })
    }

    /// Max-norm of `self - other`.
    ///
    /// Panics if the dimensions differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let d = self.dim;
        (0..d)
            .map(|j| (0..d).map(|i| self.data[i * d + j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `||A^H A - I||_max <= tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let gram = self
            .adjoint()
            .mat_mul(self)
            .expect("adjoint shares the dimension");
        let id = Self::identity(self.dim).expect("dimension already validated");
        gram.max_abs_diff(&id) <= tol
    }

    pub fn invert(&self) -> Result<Inversion> {
        self.invert_with(&InversionOptions::default())
    }

    /// LU decomposition with partial pivoting, followed by forward and back
    /// substitution against each unit vector.
    pub fn invert_with(&self, opts: &InversionOptions) -> Result<Inversion> {
        let d = self.dim;
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..d).collect();

        for k in 0..d {
            let (pivot_row, pivot_abs) = (k..d)
                .map(|r| (r, lu[r * d + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs.is_nan() || pivot_abs < opts.min_pivot {
                return Err(Error::SingularMatrix {
                    condition: f64::INFINITY,
                });
            }
            if pivot_row != k {
                for c in 0..d {
                    lu.swap(k * d + c, pivot_row * d + c);
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu[k * d + k];
            for r in (k + 1)..d {
                let factor = lu[r * d + k] / pivot;
                lu[r * d + k] = factor;
                for c in (k + 1)..d {
                    let upper = lu[k * d + c];
                    lu[r * d + c] -= factor * upper;
                }
            }
        }

        let mut inv = vec![Complex64::new(0.0, 0.0); d * d];
        let mut col = vec![Complex64::new(0.0, 0.0); d];
        for j in 0..d {
            // P A = L U, so solve L U x = P e_j.
            for (i, slot) in col.iter_mut().enumerate() {
                *slot = if perm[i] == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
            for i in 0..d {
                let mut acc = col[i];
                for k in 0..i {
                    acc -= lu[i * d + k] * col[k];
                }
                col[i] = acc;
            }
            for i in (0..d).rev() {
                let mut acc = col[i];
                for k in (i + 1)..d {
                    acc -= lu[i * d + k] * col[k];
                }
                col[i] = acc / lu[i * d + i];
            }
            for i in 0..d {
                inv[i * d + j] = col[i];
            }
        }

        if check_finite(&inv).is_err() {
            return Err(Error::SingularMatrix {
                condition: f64::INFINITY,
            });
        }
        let inverse = Self { dim: d, data: inv };
        let condition = self.norm_one() * inverse.norm_one();
        if condition.is_nan() || condition > opts.max_condition {
            return Err(Error::SingularMatrix { condition });
        }
        Ok(Inversion { inverse, condition })
    }

    /// Power-iteration estimate of the largest eigenvalue magnitude.
    ///
    /// The estimate is the geometric mean of the per-step growth factors over
    /// the second half of the iteration budget, which also settles when
    /// several eigenvalues share the top modulus.
    pub fn spectral_radius(&self, iterations: usize, seed: u64) -> f64 {
        let iterations = iterations.max(2);
        let mut v = StateVector::random(self.dim, seed).expect("dimension already validated");
        let burn_in = iterations / 2;
        let mut log_growth = 0.0;
        let mut counted = 0usize;
        for step in 0..iterations {
            let w = self.mat_vec(&v).expect("dimension already validated");
            let growth = w.norm();
            if growth == 0.0 {
                return 0.0;
            }
            if !growth.is_finite() {
                return f64::INFINITY;
            }
            if step >= burn_in {
                log_growth += growth.ln();
                counted += 1;
            }
            v = w.scaled(Complex64::new(1.0 / growth, 0.0));
        }
        (log_growth / counted as f64).exp()
    }
}

/// Real transmission/reflection pair of a coupler, `alpha^2 + beta^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitterParams {
    alpha: f64,
    beta: f64,
}

impl SplitterParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidSplitter(format!("{name}={v} outside [0, 1]")));
            }
        }
        let defect = (alpha * alpha + beta * beta - 1.0).abs();
        if defect > SPLITTER_NORM_TOL {
            return Err(Error::InvalidSplitter(format!(
                "alpha^2 + beta^2 deviates from 1 by {defect:e}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidSplitter(format!("alpha={alpha} outside [0, 1]")));
        }
        Ok(Self {
            alpha,
            beta: (1.0 - alpha * alpha).sqrt(),
        })
    }

    pub fn from_beta(beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidSplitter(format!("beta={beta} outside [0, 1]")));
        }
        Ok(Self {
            alpha: (1.0 - beta * beta).sqrt(),
            beta,
        })
    }

    /// Parametrize by the reflected intensity `gamma = beta^2`.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidSplitter(format!("gamma={gamma} outside [0, 1]")));
        }
        Ok(Self {
            alpha: (1.0 - gamma).sqrt(),
            beta: gamma.sqrt(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The 2x2 matrix `[[alpha, -i beta], [-i beta, alpha]]`.
    pub fn coupler_matrix(&self) -> Operator {
        let t = Complex64::new(self.alpha, 0.0);
        let r = -I * self.beta;
        Operator {
            dim: 2,
            data: vec![t, r, r, t],
        }
    }
}

/// The coupler map `(x, y) -> (alpha x - i beta y, alpha y - i beta x)`.
///
/// At the early coupler `(x, y) = (psi, psi4)` gives `(psi1, psi2)`; at the
/// late coupler `(x, y) = (psi1', psi2')` gives `(psi3', psi4')`.
pub fn couple(
    params: &SplitterParams,
    x: &StateVector,
    y: &StateVector,
) -> Result<(StateVector, StateVector)> {
    let t = Complex64::new(params.alpha, 0.0);
    let r = -I * params.beta;
    let first = StateVector::combine(t, x, r, y)?;
    let second = StateVector::combine(t, y, r, x)?;
    Ok((first, second))
}
