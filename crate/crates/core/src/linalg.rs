//! Dense complex/real helpers shared by the circuit and precoder modules.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type RMatrix = DMatrix<f64>;

/// Condition numbers above this are reported as superdirective ill-conditioning.
pub const ILL_CONDITIONED: f64 = 1e12;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| c(x, 0.0))
}

/// Induced 1-norm.
pub fn norm1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `a x = b` by partial-pivot LU.
///
/// The 1-norm condition number is estimated from the explicit inverse (the
/// systems solved here are M x M with M the number of users), and a warning
/// is logged above [`ILL_CONDITIONED`].
pub fn solve(a: &CMatrix, b: &CMatrix, context: &'static str) -> Result<CMatrix> {
    if !a.is_square() || a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{context}: system {}x{} with right-hand side {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let lu = a.clone().lu();
    let Some(inv) = lu.try_inverse() else {
        return Err(Error::Singular {
            context,
            condition: f64::INFINITY,
        });
    };
    let condition = norm1(a) * norm1(&inv);
    if !condition.is_finite() {
        return Err(Error::Singular { context, condition });
    }
    if condition > ILL_CONDITIONED {
        log::warn!("superdirective regime ill-conditioning: {context} condition estimate {condition:e}");
    }
    lu.solve(b).ok_or(Error::Singular { context, condition })
}

/// `a * b` as an unevaluated sum `hi + lo`.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `a + b` as an unevaluated sum `hi + lo`.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `xᵀ A x` accumulated with error-free transformations, as accurate as a
/// plain evaluation in twice the working precision.
///
/// Superdirective current patterns make `xᵀ A x` tiny next to
/// `‖A‖ ‖x‖²`; a plain evaluation then loses most of its digits, and the
/// loss changes under rescaling of `x`.
fn compensated_form(a: &RMatrix, x: &[f64]) -> f64 {
    let (mut hi, mut lo) = (0.0, 0.0);
    for (col, &xj) in a.column_iter().zip(x) {
        if xj == 0.0 {
            continue;
        }
        let (mut t, mut t_lo) = (0.0, 0.0);
        for (&aij, &xi) in col.iter().zip(x) {
            let (p, p_err) = two_prod(aij, xi);
            let (q, q_err) = two_sum(t, p);
            t = q;
            t_lo += p_err + q_err;
        }
        let (p, p_err) = two_prod(t, xj);
        let (q, q_err) = two_sum(hi, p);
        hi = q;
        lo += p_err + q_err + t_lo * xj;
    }
    hi + lo
}

/// Real part of `jᴴ A j` for real `A`.
pub fn real_quadratic_form(a: &RMatrix, j: &CVector) -> f64 {
    let re: Vec<f64> = j.iter().map(|z| z.re).collect();
    let im: Vec<f64> = j.iter().map(|z| z.im).collect();
    let (p, e) = two_sum(compensated_form(a, &re), compensated_form(a, &im));
    p + e
}

/// `Tr{Bᴴ A B}` for real `A`.
pub fn trace_quadratic(a: &RMatrix, b: &CMatrix) -> f64 {
    b.column_iter()
        .map(|col| real_quadratic_form(a, &col.into_owned()))
        .sum()
}

/// Squared Frobenius norm, `Tr{Bᴴ B}`.
pub fn frobenius_sq(b: &CMatrix) -> f64 {
    b.iter().map(|z| z.norm_sqr()).sum()
}

/// Real matrix times complex matrix without promoting the real factor.
pub fn real_times_complex(a: &RMatrix, b: &CMatrix) -> CMatrix {
    let re = a * b.map(|z| z.re);
    let im = a * b.map(|z| z.im);
    CMatrix::from_fn(re.nrows(), re.ncols(), |i, j| c(re[(i, j)], im[(i, j)]))
}

/// Complex matrix times real matrix.
pub fn complex_times_real(a: &CMatrix, b: &RMatrix) -> CMatrix {
    let re = a.map(|z| z.re) * b;
    let im = a.map(|z| z.im) * b;
    CMatrix::from_fn(re.nrows(), re.ncols(), |i, j| c(re[(i, j)], im[(i, j)]))
}

/// Eigendecomposition of a real symmetric matrix with eigenvalues sorted
/// in ascending order.
#[derive(Debug, Clone)]
pub struct SymmetricSpectrum {
    pub values: DVector<f64>,
    pub vectors: RMatrix,
}

impl SymmetricSpectrum {
    pub fn new(a: &RMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "symmetric eigendecomposition of a {}x{} matrix",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { iteration: 0 });
        }
        let eig = a.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..a.nrows()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
        let mut vectors = RMatrix::zeros(a.nrows(), a.ncols());
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Ok(Self { values, vectors })
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// max/min eigenvalue ratio; infinite when the smallest is not positive.
    pub fn condition(&self) -> f64 {
        let lo = self.min();
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            self.max() / lo
        }
    }
}
