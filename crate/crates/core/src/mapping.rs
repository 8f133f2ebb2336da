//! Vector sequences and the invertible matrix mapping `E` acting on them.
//!
//! A sequence `{psi_k}` of `N` vectors in `C^d` is stored as a `d x N` matrix
//! whose columns are the members. The mapping acts entrywise,
//! `(E psi)_n = sum_k E[n, k] psi_k`, which in column form is `P * E^T`
//! (plain transpose: the entries of `E` are scalars, not operators).

use std::sync::Arc;

use crate::error::{check_dim, FrameError, Result};
use crate::hilbert::{r, singular_values, CMatrix, COperator, CScalar, CVector};

/// An ordered family of `N >= 1` vectors sharing one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSequence {
    columns: CMatrix,
}

impl VectorSequence {
    pub fn new(items: &[CVector]) -> Result<Self> {
        let first = items.first().ok_or(FrameError::Empty("vector sequence"))?;
        let dim = first.dim();
        for item in items {
            check_dim("vector sequence member", dim, item.dim())?;
        }
        Ok(Self {
            columns: CMatrix::from_fn(dim, items.len(), |i, k| items[k].entries()[i]),
        })
    }

    pub fn from_real(items: &[Vec<f64>]) -> Result<Self> {
        let vs = items
            .iter()
            .map(|v| CVector::from_real(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&vs)
    }

    /// Column `k` of `columns` is member `k`.
    pub fn from_columns(columns: CMatrix) -> Result<Self> {
        if columns.nrows() == 0 || columns.ncols() == 0 {
            return Err(FrameError::Empty("vector sequence"));
        }
        Ok(Self { columns })
    }

    pub fn zeros(count: usize, dim: usize) -> Self {
        Self {
            columns: CMatrix::zeros(dim, count),
        }
    }

    pub fn count(&self) -> usize {
        self.columns.ncols()
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn columns(&self) -> &CMatrix {
        &self.columns
    }

    pub fn item(&self, k: usize) -> CVector {
        CVector::from_dvector(self.columns.column(k).into_owned())
    }

    pub fn items(&self) -> Vec<CVector> {
        (0..self.count()).map(|k| self.item(k)).collect()
    }

    /// Applies `w` to every member.
    pub fn map_operator(&self, w: &COperator) -> Result<VectorSequence> {
        check_dim("entrywise operator", w.dim(), self.dim())?;
        Ok(Self {
            columns: w.matrix() * &self.columns,
        })
    }

    pub fn scale(&self, s: CScalar) -> VectorSequence {
        Self {
            columns: &self.columns * s,
        }
    }

    pub fn add(&self, other: &VectorSequence) -> Result<VectorSequence> {
        self.check_same_shape(other)?;
        Ok(Self {
            columns: &self.columns + &other.columns,
        })
    }

    pub fn sub(&self, other: &VectorSequence) -> Result<VectorSequence> {
        self.check_same_shape(other)?;
        Ok(Self {
            columns: &self.columns - &other.columns,
        })
    }

    /// Largest member-wise distance `max_k ||self_k - other_k||`.
    pub fn max_deviation(&self, other: &VectorSequence) -> Result<f64> {
        self.check_same_shape(other)?;
        let diff = &self.columns - &other.columns;
        Ok(diff.column_iter().map(|col| col.norm()).fold(0.0, f64::max))
    }

    /// `sqrt(sum_k ||item_k||^2)`, the direct-sum norm.
    pub fn norm(&self) -> f64 {
        self.columns.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.columns
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_same_shape(&self, other: &VectorSequence) -> Result<()> {
        check_dim("sequence dimension", self.dim(), other.dim())?;
        check_dim("sequence length", self.count(), other.count())
    }
}

#[derive(Debug)]
struct MappingData {
    entries: CMatrix,
    inverse: CMatrix,
}

/// An invertible `N x N` matrix mapping with its inverse cached at build time.
///
/// Cloning is cheap; the entries are shared.
#[derive(Clone, Debug)]
pub struct MatrixMapping {
    data: Arc<MappingData>,
}

impl PartialEq for MatrixMapping {
    fn eq(&self, other: &Self) -> bool {
        self.data.entries == other.data.entries
    }
}

impl MatrixMapping {
    /// Builds from row-major rows; fails unless the grid is square and its
    /// smallest singular value exceeds `tol`.
    pub fn from_rows(rows: &[Vec<CScalar>], tol: f64) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(FrameError::Empty("matrix mapping"));
        }
        for row in rows {
            if row.len() != n {
                return Err(FrameError::NonSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        Self::from_matrix(CMatrix::from_fn(n, n, |i, j| rows[i][j]), tol)
    }

    pub fn from_matrix(entries: CMatrix, tol: f64) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(FrameError::NonSquare { rows, cols });
        }
        if rows == 0 {
            return Err(FrameError::Empty("matrix mapping"));
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(FrameError::NonFinite("matrix mapping"));
        }
        let sigma_min = singular_values(&entries).last().copied().unwrap_or(0.0);
        if sigma_min.is_nan() || sigma_min <= tol {
            return Err(FrameError::Singular { sigma_min, tol });
        }
        let inverse = entries
            .clone()
            .try_inverse()
            .ok_or(FrameError::Singular { sigma_min, tol })?;
        let residual = (&entries * &inverse - CMatrix::identity(rows, rows)).norm();
        if residual > 1e-10 * rows as f64 {
            return Err(FrameError::Singular { sigma_min, tol });
        }
        Ok(Self {
            data: Arc::new(MappingData { entries, inverse }),
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(FrameError::InvalidSize("mapping size must be >= 1".into()));
        }
        Ok(Self {
            data: Arc::new(MappingData {
                entries: CMatrix::identity(n, n),
                inverse: CMatrix::identity(n, n),
            }),
        })
    }

    /// The lower-bidiagonal backward difference: `1` on the diagonal, `-1` on
    /// the first subdiagonal. Its inverse is the cumulative sum.
    pub fn backward_difference(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(FrameError::InvalidSize("mapping size must be >= 1".into()));
        }
        let entries = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                r(1.0)
            } else if i == j + 1 {
                r(-1.0)
            } else {
                r(0.0)
            }
        });
        let inverse = CMatrix::from_fn(n, n, |i, j| if j <= i { r(1.0) } else { r(0.0) });
        Ok(Self {
            data: Arc::new(MappingData { entries, inverse }),
        })
    }

    /// Banded mapping from `(offset, values)` diagonals. Offset `0` is the main
    /// diagonal, negative offsets lie below it; diagonal `o` holds
    /// `n - |o|` values. Unlisted diagonals are zero.
    pub fn banded(n: usize, diagonals: &[(i64, Vec<CScalar>)], tol: f64) -> Result<Self> {
        if n == 0 {
            return Err(FrameError::InvalidSize("mapping size must be >= 1".into()));
        }
        let mut entries = CMatrix::zeros(n, n);
        for (offset, values) in diagonals {
            let shift = offset.unsigned_abs() as usize;
            if shift >= n {
                return Err(FrameError::InvalidSize(format!(
                    "diagonal offset {offset} out of range for size {n}"
                )));
            }
            check_dim("banded diagonal length", n - shift, values.len())?;
            for (t, &v) in values.iter().enumerate() {
                let (i, j) = if *offset >= 0 {
                    (t, t + shift)
                } else {
                    (t + shift, t)
                };
                entries[(i, j)] = v;
            }
        }
        Self::from_matrix(entries, tol)
    }

    pub fn n(&self) -> usize {
        self.data.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.data.entries
    }

    pub fn inverse(&self) -> &CMatrix {
        &self.data.inverse
    }

    /// `(E seq)_n = sum_k E[n, k] seq_k`.
    pub fn apply(&self, seq: &VectorSequence) -> Result<VectorSequence> {
        check_dim("mapping application", self.n(), seq.count())?;
        VectorSequence::from_columns(seq.columns() * self.data.entries.transpose())
    }

    pub fn apply_inverse(&self, seq: &VectorSequence) -> Result<VectorSequence> {
        check_dim("inverse mapping application", self.n(), seq.count())?;
        VectorSequence::from_columns(seq.columns() * self.data.inverse.transpose())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::DEFAULT_TOL;

    fn seq(items: &[Vec<f64>]) -> VectorSequence {
        VectorSequence::from_real(items).unwrap()
    }

    #[test]
    fn backward_difference_entries() {
        let e = MatrixMapping::backward_difference(4).unwrap();
        let expected = [
            [1.0, 0.0, 0.0, 0.0],
            [-1.0, 1.0, 0.0, 0.0],
            [0.0, -1.0, 1.0, 0.0],
            [0.0, 0.0, -1.0, 1.0],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(e.entries()[(i, j)], r(x));
                assert_eq!(e.inverse()[(i, j)], r(if j <= i { 1.0 } else { 0.0 }));
            }
        }
        let one = MatrixMapping::backward_difference(1).unwrap();
        assert_eq!(one.entries()[(0, 0)], r(1.0));
        assert!(MatrixMapping::backward_difference(0).is_err());
    }

    #[test]
    fn dense_build_matches_closed_form_inverse() {
        let rows: Vec<Vec<CScalar>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        if i == j {
                            r(1.0)
                        } else if i == j + 1 {
                            r(-1.0)
                        } else {
                            r(0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        let e = MatrixMapping::from_rows(&rows, DEFAULT_TOL).unwrap();
        let closed = MatrixMapping::backward_difference(4).unwrap();
        assert!((e.inverse() - closed.inverse()).norm() < 1e-14);
    }

    #[test]
    fn dense_build_errors() {
        let zero_row = vec![vec![r(1.0), r(0.0)], vec![r(0.0), r(0.0)]];
        assert!(matches!(
            MatrixMapping::from_rows(&zero_row, DEFAULT_TOL),
            Err(FrameError::Singular { .. })
        ));
        let ragged = vec![vec![r(1.0), r(0.0)], vec![r(0.0)]];
        assert!(matches!(
            MatrixMapping::from_rows(&ragged, DEFAULT_TOL),
            Err(FrameError::NonSquare { .. })
        ));
        assert!(matches!(
            MatrixMapping::from_matrix(CMatrix::zeros(3, 2), DEFAULT_TOL),
            Err(FrameError::NonSquare { .. })
        ));
    }

    #[test]
    fn identity_mapping_is_identity() {
        let e = MatrixMapping::identity(3).unwrap();
        let psi = seq(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        assert_eq!(e.apply(&psi).unwrap(), psi);
        assert_eq!(e.apply_inverse(&psi).unwrap(), psi);
    }

    #[test]
    fn apply_to_example_families() {
        let e = MatrixMapping::backward_difference(4).unwrap();
        let psi = seq(&[
            vec![1.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![2.0, 1.0, 0.0],
            vec![2.0, 1.0, 1.0],
        ]);
        let images = e.apply(&psi).unwrap();
        let expected = seq(&[
            vec![1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        assert!(images.max_deviation(&expected).unwrap() < 1e-15);

        let psi_tilde = seq(&[
            vec![1.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![2.0, 2.0, 0.0],
            vec![2.0, 2.0, 2.0],
        ]);
        let expected = seq(&[
            vec![1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ]);
        assert!(
            e.apply(&psi_tilde)
                .unwrap()
                .max_deviation(&expected)
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn apply_inverse_examples() {
        let e = MatrixMapping::backward_difference(4).unwrap();
        let images = seq(&[
            vec![1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let expected = seq(&[
            vec![1.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![2.0, 1.0, 0.0],
            vec![2.0, 1.0, 1.0],
        ]);
        assert!(
            e.apply_inverse(&images)
                .unwrap()
                .max_deviation(&expected)
                .unwrap()
                < 1e-15
        );

        let offset = seq(&[
            vec![1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ]);
        let expected = seq(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ]);
        assert!(
            e.apply_inverse(&offset)
                .unwrap()
                .max_deviation(&expected)
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let e = MatrixMapping::backward_difference(3).unwrap();
        let psi = VectorSequence::zeros(4, 2);
        assert!(matches!(
            e.apply(&psi),
            Err(FrameError::DimensionMismatch { .. })
        ));
        assert!(e.apply_inverse(&psi).is_err());
    }

    #[test]
    fn banded_matches_backward_difference() {
        let n = 5;
        let diagonals = vec![(0, vec![r(1.0); n]), (-1, vec![r(-1.0); n - 1])];
        let banded = MatrixMapping::banded(n, &diagonals, DEFAULT_TOL).unwrap();
        let closed = MatrixMapping::backward_difference(n).unwrap();
        assert_eq!(banded, closed);
        assert!((banded.inverse() - closed.inverse()).norm() < 1e-13);

        assert!(MatrixMapping::banded(3, &[(0, vec![r(1.0); 2])], DEFAULT_TOL).is_err());
        assert!(MatrixMapping::banded(3, &[(3, vec![])], DEFAULT_TOL).is_err());
        // Upper band only: strictly upper triangular is singular.
        assert!(MatrixMapping::banded(3, &[(1, vec![r(1.0); 2])], DEFAULT_TOL).is_err());
    }

    #[test]
    fn sequence_validation() {
        assert!(VectorSequence::new(&[]).is_err());
        let a = CVector::zeros(2);
        let b = CVector::zeros(3);
        assert!(matches!(
            VectorSequence::new(&[a, b]),
            Err(FrameError::DimensionMismatch { .. })
        ));
    }
}
