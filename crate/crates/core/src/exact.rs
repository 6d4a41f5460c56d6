//! Exact integer and rational matrix arithmetic.
//!
//! Everything here works over arbitrary-precision integers, so nothing can
//! overflow silently. Determinants use Bareiss fraction-free elimination, and
//! inverses come from fraction-free Gauss-Jordan on `[M | I]`. The block
//! inverse of a bridged matrix `[[A, H], [Hᵀ, B]]` is assembled from
//! `A⁻¹`, `B⁻¹` and the Schur complement `S = A - H B⁻¹ Hᵀ`.
//!
//! Raw matrix indexing is 0-based. Vertex-level APIs elsewhere in the crate
//! use 1-based labels.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("rows have unequal lengths")]
    Ragged,
    #[error("matrix is singular")]
    Singular,
    #[error("I - PR is singular, block formula does not apply")]
    NotApplicable,
    #[error("coupling matrix must be 0/1 with at most one 1 per row and column")]
    InvalidCoupling,
}

pub type Result<T, E = ExactError> = std::result::Result<T, E>;

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Arbitrary-precision integer matrix.
pub type IntMatrix = Matrix<BigInt>;
/// Exact rational matrix; entries are always reduced with positive denominator.
pub type RatMatrix = Matrix<BigRational>;

impl<T: Clone + Num> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ExactError::Ragged);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn multiply(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(ExactError::DimensionMismatch {
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(ExactError::DimensionMismatch {
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    /// Rows and columns picked by the given 0-based index lists, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        for &i in rows {
            if i >= self.rows {
                return Err(ExactError::IndexOutOfRange { index: i, dim: self.rows });
            }
        }
        for &j in cols {
            if j >= self.cols {
                return Err(ExactError::IndexOutOfRange { index: j, dim: self.cols });
            }
        }
        Ok(Self::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])].clone()
        }))
    }

    /// Principal submatrix on a 0-based index list.
    pub fn principal(&self, idx: &[usize]) -> Result<Self> {
        self.submatrix(idx, idx)
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn block(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(ExactError::DimensionMismatch {
                left: a.shape(),
                right: d.shape(),
            });
        }
        let (n, m) = (a.rows, a.cols);
        Ok(Self::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| {
            match (i < n, j < m) {
                (true, true) => a[(i, j)].clone(),
                (true, false) => b[(i, j - m)].clone(),
                (false, true) => c[(i - n, j)].clone(),
                (false, false) => d[(i - n, j - m)].clone(),
            }
        }))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    /// Builds an integer matrix from small row-major values.
    pub fn from_i64(rows: usize, cols: usize, values: &[i64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(ExactError::Ragged);
        }
        Ok(Matrix {
            rows,
            cols,
            data: values.iter().map(|&v| BigInt::from(v)).collect(),
        })
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| BigRational::from_integer(x.clone()))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.data.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Entry as `i64`, if it fits.
    pub fn get_i64(&self, i: usize, j: usize) -> Option<i64> {
        use num_traits::ToPrimitive;
        self[(i, j)].to_i64()
    }
}

impl RatMatrix {
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn to_integer(&self) -> Option<IntMatrix> {
        self.is_integral().then(|| self.map(|x| x.to_integer()))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.data.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

fn require_square<T>(m: &Matrix<T>) -> Result<usize> {
    if m.rows != m.cols {
        return Err(ExactError::NotSquare { rows: m.rows, cols: m.cols });
    }
    Ok(m.rows)
}

/// Exact determinant by Bareiss fraction-free elimination.
pub fn det(m: &IntMatrix) -> Result<BigInt> {
    let n = require_square(m)?;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(BigInt::zero());
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    Ok(if negate { -prev } else { prev })
}

/// Exact inverse together with the determinant it was computed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactInverse {
    pub matrix: RatMatrix,
    pub det: BigInt,
}

impl ExactInverse {
    /// True iff every entry has denominator 1 (equivalently `det = ±1`).
    pub fn is_integral(&self) -> bool {
        self.matrix.is_integral()
    }

    pub fn integral(&self) -> Option<IntMatrix> {
        self.matrix.to_integer()
    }
}

/// Exact inverse via fraction-free Gauss-Jordan on `[M | I]`.
///
/// After the sweep the left block is `p·I` and the right block is `p·M⁻¹`,
/// where `p = ±det(M)`; dividing gives the inverse in lowest terms.
pub fn inverse_exact(m: &IntMatrix) -> Result<ExactInverse> {
    let n = require_square(m)?;
    let w = 2 * n;
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(ExactError::Singular)?;
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        let pivot_row = a[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let factor = row[k].clone();
            for j in 0..w {
                if j == k {
                    continue;
                }
                let v = &pivot_row[k] * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = pivot_row[k].clone();
    }
    let det = if negate { -prev.clone() } else { prev.clone() };
    let matrix = Matrix::from_fn(n, n, |i, j| BigRational::new(a[i][n + j].clone(), prev.clone()));
    Ok(ExactInverse { matrix, det })
}

/// Bridged pairs `(row, col)` encoded by a 0/1 coupling matrix, 0-based, in row order.
pub fn coupling_pairs(h: &IntMatrix) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    let mut col_used = vec![false; h.cols()];
    for i in 0..h.rows() {
        let mut found = None;
        for j in 0..h.cols() {
            let v = &h[(i, j)];
            if v.is_zero() {
                continue;
            }
            if !v.is_one() || found.is_some() || col_used[j] {
                return Err(ExactError::InvalidCoupling);
            }
            found = Some(j);
            col_used[j] = true;
        }
        if let Some(j) = found {
            pairs.push((i, j));
        }
    }
    Ok(pairs)
}

/// The matrices `P = Fᵀ A⁻¹ F` and `R = Eᵀ B⁻¹ E` for a list of bridged pairs
/// (0-based `a` in the first graph, `b` in the second).
pub fn bridge_blocks(
    ainv: &IntMatrix,
    binv: &IntMatrix,
    pairs: &[(usize, usize)],
) -> Result<(IntMatrix, IntMatrix)> {
    let a_idx: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let b_idx: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    Ok((ainv.principal(&a_idx)?, binv.principal(&b_idx)?))
}

/// Inverse of `C = [[A, H], [Hᵀ, B]]` from `A⁻¹`, `B⁻¹` and the coupling `H`.
///
/// With `P = Fᵀ A⁻¹ F`, `R = Eᵀ B⁻¹ E` and `H = F Eᵀ`:
///
/// ```text
/// S⁻¹ = A⁻¹ + A⁻¹ F R (I - P R)⁻¹ Fᵀ A⁻¹
/// C⁻¹ = [[ S⁻¹,           -S⁻¹ H B⁻¹             ],
///        [ -B⁻¹ Hᵀ S⁻¹,   B⁻¹ + B⁻¹ Hᵀ S⁻¹ H B⁻¹ ]]
/// ```
///
/// Fails with [`ExactError::NotApplicable`] when `I - P R` is singular.
pub fn schur_block_inverse(ainv: &IntMatrix, binv: &IntMatrix, h: &IntMatrix) -> Result<RatMatrix> {
    let n = require_square(ainv)?;
    let m = require_square(binv)?;
    if h.shape() != (n, m) {
        return Err(ExactError::DimensionMismatch {
            left: (n, m),
            right: h.shape(),
        });
    }
    let pairs = coupling_pairs(h)?;
    let k = pairs.len();
    let (p, r) = bridge_blocks(ainv, binv, &pairs)?;

    let i_minus_pr = IntMatrix::identity(k).sub(&p.multiply(&r)?)?;
    let mid_inv = match inverse_exact(&i_minus_pr) {
        Ok(inv) => inv.matrix,
        Err(ExactError::Singular) => return Err(ExactError::NotApplicable),
        Err(e) => return Err(e),
    };

    let f = selector(n, pairs.iter().map(|p| p.0));
    let ainv_q = ainv.to_rational();
    let binv_q = binv.to_rational();
    let h_q = h.to_rational();

    // A⁻¹ F is just the bridged columns of A⁻¹.
    let ainv_f = ainv_q.multiply(&f)?;
    let correction = ainv_f
        .multiply(&r.to_rational())?
        .multiply(&mid_inv)?
        .multiply(&ainv_f.transpose())?;
    let s_inv = ainv_q.add(&correction)?;

    let s_inv_h_binv = s_inv.multiply(&h_q)?.multiply(&binv_q)?;
    let top_right = s_inv_h_binv.scale(&-BigRational::one());
    let bottom_left = top_right.transpose();
    let bottom_right = binv_q.add(&binv_q.multiply(&h_q.transpose())?.multiply(&s_inv_h_binv)?)?;

    RatMatrix::block(&s_inv, &top_right, &bottom_left, &bottom_right)
}

/// `dim × k` matrix whose columns are the unit vectors at the given 0-based positions.
pub fn selector(dim: usize, positions: impl IntoIterator<Item = usize>) -> RatMatrix {
    let pos: Vec<usize> = positions.into_iter().collect();
    RatMatrix::from_fn(dim, pos.len(), |i, j| {
        if pos[j] == i {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    })
}

/// Largest absolute entry, handy for diagnostics.
pub fn max_abs(m: &IntMatrix) -> BigInt {
    m.iter().map(|x| x.abs()).max().unwrap_or_default()
}

/// Serde helper: big integers as decimal strings.
pub fn serialize_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(n: usize, v: &[i64]) -> IntMatrix {
        IntMatrix::from_i64(n, n, v).unwrap()
    }

    /// Cofactor expansion along the first row.
    fn cofactor_det(m: &IntMatrix) -> BigInt {
        let n = m.rows();
        if n == 0 {
            return BigInt::one();
        }
        let mut total = BigInt::zero();
        for j in 0..n {
            if m[(0, j)].is_zero() {
                continue;
            }
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = cofactor_det(&m.submatrix(&rows, &cols).unwrap());
            let term = &m[(0, j)] * minor;
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    #[test]
    fn det_small_cases() {
        assert_eq!(det(&im(2, &[0, 1, 1, 0])).unwrap(), BigInt::from(-1));
        assert_eq!(det(&IntMatrix::zeros(3, 3)).unwrap(), BigInt::zero());
        assert_eq!(det(&IntMatrix::identity(5)).unwrap(), BigInt::one());
        assert_eq!(det(&IntMatrix::zeros(0, 0)).unwrap(), BigInt::one());
        assert!(matches!(
            det(&IntMatrix::zeros(2, 3)),
            Err(ExactError::NotSquare { .. })
        ));
    }

    #[test]
    fn det_needs_pivoting() {
        // zero in the leading position
        let m = im(3, &[0, 2, 1, 3, 0, 4, 1, 1, 0]);
        assert_eq!(det(&m).unwrap(), cofactor_det(&m));
    }

    #[test]
    fn det_does_not_overflow() {
        let n = 30;
        let m = IntMatrix::from_fn(n, n, |i, j| {
            if i == j {
                BigInt::from(1_000_000_007i64)
            } else {
                BigInt::zero()
            }
        });
        let expected = num_traits::pow(BigInt::from(1_000_000_007i64), n);
        assert_eq!(det(&m).unwrap(), expected);
    }

    #[test]
    fn inverse_of_identity_and_singular() {
        let inv = inverse_exact(&IntMatrix::identity(4)).unwrap();
        assert_eq!(inv.integral().unwrap(), IntMatrix::identity(4));
        assert_eq!(inverse_exact(&IntMatrix::zeros(3, 3)), Err(ExactError::Singular));
    }

    #[test]
    fn inverse_non_integral() {
        let m = im(2, &[2, 1, 1, 2]);
        let inv = inverse_exact(&m).unwrap();
        assert_eq!(inv.det, BigInt::from(3));
        assert!(!inv.is_integral());
        assert_eq!(inv.matrix[(0, 0)], BigRational::new(2.into(), 3.into()));
        assert_eq!(inv.matrix[(0, 1)], BigRational::new((-1).into(), 3.into()));
        let prod = m.to_rational().multiply(&inv.matrix).unwrap();
        assert_eq!(prod, RatMatrix::identity(2));
    }

    #[test]
    fn submatrix_keeps_order() {
        let m = im(3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let s = m.submatrix(&[2, 0], &[1, 2]).unwrap();
        assert_eq!(s, IntMatrix::from_i64(2, 2, &[8, 9, 2, 3]).unwrap());
        assert!(matches!(
            m.submatrix(&[3], &[0]),
            Err(ExactError::IndexOutOfRange { index: 3, dim: 3 })
        ));
    }

    #[test]
    fn multiply_checks_dimensions() {
        let a = IntMatrix::zeros(2, 3);
        assert!(matches!(a.multiply(&a), Err(ExactError::DimensionMismatch { .. })));
        let m = im(2, &[1, 2, 3, 4]);
        assert_eq!(IntMatrix::identity(2).multiply(&m).unwrap(), m);
    }

    #[test]
    fn coupling_rejects_non_matchings() {
        let h = IntMatrix::from_i64(2, 2, &[1, 1, 0, 0]).unwrap();
        assert_eq!(coupling_pairs(&h), Err(ExactError::InvalidCoupling));
        let h = IntMatrix::from_i64(2, 2, &[1, 0, 1, 0]).unwrap();
        assert_eq!(coupling_pairs(&h), Err(ExactError::InvalidCoupling));
        let h = IntMatrix::from_i64(2, 2, &[2, 0, 0, 0]).unwrap();
        assert_eq!(coupling_pairs(&h), Err(ExactError::InvalidCoupling));
    }

    #[test]
    fn schur_without_bridges_is_block_diagonal() {
        let ainv = im(2, &[0, 1, 1, 0]);
        let binv = im(2, &[0, 1, 1, -1]);
        let c_inv = schur_block_inverse(&ainv, &binv, &IntMatrix::zeros(2, 2)).unwrap();
        let expected = IntMatrix::block(&ainv, &IntMatrix::zeros(2, 2), &IntMatrix::zeros(2, 2), &binv)
            .unwrap()
            .to_rational();
        assert_eq!(c_inv, expected);
    }

    #[test]
    fn schur_not_applicable_when_i_minus_pr_singular() {
        // A = B = [1]: P = R = 1 so I - PR = 0.
        let one = im(1, &[1]);
        let h = im(1, &[1]);
        assert_eq!(schur_block_inverse(&one, &one, &h), Err(ExactError::NotApplicable));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_matrix(max_n: usize) -> impl Strategy<Value = IntMatrix> {
            (1..=max_n).prop_flat_map(|n| {
                proptest::collection::vec(-3i64..=3, n * n)
                    .prop_map(move |v| IntMatrix::from_i64(n, n, &v).unwrap())
            })
        }

        proptest! {
            #[test]
            fn bareiss_matches_cofactor(m in small_matrix(5)) {
                prop_assert_eq!(det(&m).unwrap(), cofactor_det(&m));
            }

            #[test]
            fn inverse_times_matrix_is_identity(m in small_matrix(5)) {
                match inverse_exact(&m) {
                    Ok(inv) => {
                        prop_assert_eq!(&inv.det, &det(&m).unwrap());
                        let n = m.rows();
                        prop_assert_eq!(m.to_rational().multiply(&inv.matrix).unwrap(), RatMatrix::identity(n));
                        prop_assert_eq!(inv.matrix.multiply(&m.to_rational()).unwrap(), RatMatrix::identity(n));
                        let unimodular = inv.det == BigInt::one() || inv.det == -BigInt::one();
                        prop_assert_eq!(unimodular, inv.is_integral());
                    }
                    Err(e) => {
                        prop_assert_eq!(e, ExactError::Singular);
                        prop_assert!(det(&m).unwrap().is_zero());
                    }
                }
            }
        }
    }
}
