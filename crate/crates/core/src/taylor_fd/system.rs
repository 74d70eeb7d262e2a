//! Small dense linear systems solved by Gaussian elimination with partial pivoting.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative determinant threshold below which a system counts as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// Square system `A·x = b` built from Taylor expansions.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorSystem<T> {
    dim: usize,
    // row-major
    matrix: Vec<T>,
    rhs: Vec<T>,
    // magnitude of each row before cancellation, if known
    row_scales: Option<Vec<T>>,
}

impl<T: Scalar> TaylorSystem<T> {
    pub fn new(rows: &[Vec<T>], rhs: &[T]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::misuse("empty Taylor system"));
        }
        if rhs.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::misuse(format!(
                "Taylor system must be square with matching right-hand side (dim {dim})"
            )));
        }
        if rows.iter().flatten().chain(rhs).any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite entry in Taylor system"));
        }
        Ok(Self {
            dim,
            matrix: rows.iter().flatten().copied().collect(),
            rhs: rhs.to_vec(),
            row_scales: None,
        })
    }

    /// Measures conditioning against `scales` instead of the row norms. Rows
    /// assembled from cancelling terms should pass the size of those terms,
    /// so that a row reduced to rounding noise is seen as degenerate.
    pub fn with_row_scales(mut self, scales: Vec<T>) -> Result<Self> {
        if scales.len() != self.dim || scales.iter().any(|s| !(s.is_finite() && *s >= T::zero())) {
            return Err(Error::misuse("row scales must be finite, non-negative and one per row"));
        }
        self.row_scales = Some(scales);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        self.matrix[i * self.dim + j]
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    fn row_norm(&self, i: usize) -> T {
        let norm = (0..self.dim)
            .map(|j| self.entry(i, j).powi(2))
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        match &self.row_scales {
            Some(s) => norm.max(s[i]),
            None => norm,
        }
    }

    /// `|det A| / ∏ ‖row_i‖`, a scale-free measure in `[0, 1]` (Hadamard). With
/// row scales set, each row norm is raised to at least its scale.
    pub fn conditioning(&self) -> T {
        let norms = (0..self.dim).fold(T::one(), |acc, i| acc * self.row_norm(i));
        if norms == T::zero() {
            return T::zero();
        }
        let (_, det) = eliminate(self.dim, self.matrix.clone(), self.rhs.clone());
        det.abs() / norms
    }

    /// Solves the system, rejecting it when `conditioning() ≤ 1e-10`.
    pub fn solve(&self, context: &'static str) -> Result<Vec<T>> {
        let norms = (0..self.dim).fold(T::one(), |acc, i| acc * self.row_norm(i));
        let (x, det) = eliminate(self.dim, self.matrix.clone(), self.rhs.clone());
        let conditioning = if norms == T::zero() { T::zero() } else { det.abs() / norms };
        if !(conditioning > T::of(DEGENERACY_THRESHOLD)) {
            return Err(Error::DegenerateStencil {
                context,
                conditioning: conditioning.as_f64(),
            });
        }
        Ok(x)
    }

    /// Infinity norm of `A·x − b`.
    pub fn residual(&self, x: &[T]) -> T {
        (0..self.dim)
            .map(|i| {
                let ax = (0..self.dim).fold(T::zero(), |acc, j| acc + self.entry(i, j) * x[j]);
                (ax - self.rhs[i]).abs()
            })
            .fold(T::zero(), T::max)
    }

    /// Infinity norm of `A`.
    pub fn matrix_norm(&self) -> T {
        (0..self.dim)
            .map(|i| (0..self.dim).fold(T::zero(), |acc, j| acc + self.entry(i, j).abs()))
            .fold(T::zero(), T::max)
    }
}

/// Forward elimination with row pivoting and back substitution. Returns the
/// solution (garbage when singular) and the determinant.
fn eliminate<T: Scalar>(n: usize, mut a: Vec<T>, mut b: Vec<T>) -> (Vec<T>, T) {
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i * n + col]
                    .abs()
                    .partial_cmp(&a[j * n + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if pivot != col {
            for j in 0..n {
                a.swap(pivot * n + j, col * n + j);
            }
            b.swap(pivot, col);
            det = -det;
        }
        let p = a[col * n + col];
        det = det * p;
        if p == T::zero() {
            return (vec![T::nan(); n], T::zero());
        }
        for i in col + 1..n {
            let f = a[i * n + col] / p;
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                a[i * n + j] = a[i * n + j] - f * a[col * n + j];
            }
            b[i] = b[i] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s = (i + 1..n).fold(b[i], |acc, j| acc - a[i * n + j] * x[j]);
        x[i] = s / a[i * n + i];
    }
    (x, det)
}
