//! Orthonormal 4-frames in ℝⁿ and small helpers on the 2-form space.
//!
//! Frames are stored as 4×n matrices whose rows are the frame vectors.
//! The set of such matrices with `F Fᵀ = I₄` is the feasible set for the
//! four-frame minimizations in [`crate::cones`]; re-orthonormalization by
//! modified Gram–Schmidt serves as the retraction after a descent step.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{CurvError, Result};
use crate::tensor::{pair_count, pair_index};

/// Gram-matrix tolerance for accepting a matrix as an orthonormal frame.
pub const FRAME_TOL: f64 = 1e-10;

/// An orthonormal 4-frame `{e₁, e₂, e₃, e₄}` in ℝⁿ (rows of a 4×n matrix).
#[derive(Clone, Debug, PartialEq)]
pub struct Frame4 {
    mat: DMatrix<f64>,
}

impl Frame4 {
    /// Wraps a 4×n matrix after checking orthonormality of its rows.
    pub fn from_matrix(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != 4 || mat.ncols() < 4 {
            return Err(CurvError::Parameter(format!(
                "frame must be a 4xn matrix with n >= 4, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let frame = Frame4 { mat };
        let residual = frame.gram_residual();
        if !(residual <= FRAME_TOL) {
            return Err(CurvError::Parameter(format!(
                "frame rows are not orthonormal (Gram residual {residual:.3e})"
            )));
        }
        Ok(frame)
    }

    /// Coordinate frame with rows `e_{axes[0]}, …, e_{axes[3]}`.
    pub fn coordinate(n: usize, axes: [usize; 4]) -> Result<Self> {
        if n < 4 {
            return Err(CurvError::Dimension { min: 4, got: n });
        }
        for (idx, &a) in axes.iter().enumerate() {
            if a >= n {
                return Err(CurvError::Parameter(format!("axis {a} out of range")));
            }
            for &b in &axes[..idx] {
                if a == b {
                    return Err(CurvError::Parameter("frame axes must be distinct".into()));
                }
            }
        }
        let mut mat = DMatrix::zeros(4, n);
        for (row, &a) in axes.iter().enumerate() {
            mat[(row, a)] = 1.0;
        }
        Ok(Frame4 { mat })
    }

    /// Random frame: Gaussian 4×n rows orthonormalized by Gram–Schmidt.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Result<Self> {
        if n < 4 {
            return Err(CurvError::Dimension { min: 4, got: n });
        }
        for _ in 0..64 {
            let raw = DMatrix::from_fn(4, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            if let Some(mat) = orthonormalize_rows(&raw) {
                return Ok(Frame4 { mat });
            }
        }
        Err(CurvError::Estimation(
            "failed to draw a non-degenerate random frame".into(),
        ))
    }

    pub fn dim(&self) -> usize {
        self.mat.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Frame vector `idx` (0-based) as an owned column vector.
    pub fn vector(&self, idx: usize) -> DVector<f64> {
        self.mat.row(idx).transpose()
    }

    /// `‖F Fᵀ − I₄‖` in Frobenius norm.
    pub fn gram_residual(&self) -> f64 {
        let gram = &self.mat * self.mat.transpose();
        (gram - DMatrix::identity(4, 4)).norm()
    }

    /// Applies an orthogonal matrix to every frame vector.
    pub fn rotate(&self, o: &DMatrix<f64>) -> Result<Frame4> {
        if o.nrows() != self.dim() || o.ncols() != self.dim() {
            return Err(CurvError::DimensionMismatch(o.nrows(), self.dim()));
        }
        Frame4::from_matrix(&self.mat * o.transpose())
    }

    pub(crate) fn from_matrix_trusted(mat: DMatrix<f64>) -> Self {
        Frame4 { mat }
    }
}

/// Modified Gram–Schmidt on the rows, with a second pass for stability.
/// Returns `None` when the rows are numerically dependent.
pub fn orthonormalize_rows(mat: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut m = mat.clone();
    for pass in 0..2 {
        for i in 0..m.nrows() {
            for j in 0..i {
                let proj = m.row(i).dot(&m.row(j));
                let row_j = m.row(j).clone_owned();
                let mut row_i = m.row_mut(i);
                row_i -= row_j * proj;
            }
            let norm = m.row(i).norm();
            if pass == 0 && norm < 1e-8 {
                return None;
            }
            if norm == 0.0 {
                return None;
            }
            m.row_mut(i) /= norm;
        }
    }
    Some(m)
}

/// Haar-ish random orthogonal matrix (Gram–Schmidt of a Gaussian matrix).
pub fn haar_rotation<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    loop {
        let raw = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        if let Some(q) = orthonormalize_rows(&raw) {
            return q;
        }
    }
}

/// Wedge of two vectors, in pair-basis coordinates:
/// `(u ∧ v)_{(ij)} = u_i v_j − u_j v_i` for i < j.
pub fn wedge(u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let n = u.len();
    let mut out = DVector::zeros(pair_count(n));
    let mut idx = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            out[idx] = u[i] * v[j] - u[j] * v[i];
            idx += 1;
        }
    }
    out
}

/// Multiplies by the antisymmetric matrix with upper triangle `eta`:
/// `(Ĥ v)_i = Σ_{j>i} η_{(ij)} v_j − Σ_{j<i} η_{(ji)} v_j`.
pub fn hat_mul(n: usize, eta: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(n);
    for i in 0..n {
        let mut s = 0.0;
        for j in (i + 1)..n {
            s += eta[pair_index(n, i, j)] * v[j];
        }
        for j in 0..i {
            s -= eta[pair_index(n, j, i)] * v[j];
        }
        out[i] = s;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_frames_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [4, 5, 7] {
            for _ in 0..10 {
                let f = Frame4::random(n, &mut rng).unwrap();
                assert!(f.gram_residual() <= FRAME_TOL);
            }
        }
    }

    #[test]
    fn coordinate_frame_and_errors() {
        let f = Frame4::coordinate(5, [0, 2, 3, 4]).unwrap();
        assert_eq!(f.vector(1)[2], 1.0);
        assert!(Frame4::coordinate(5, [0, 0, 1, 2]).is_err());
        assert!(Frame4::coordinate(3, [0, 1, 2, 2]).is_err());
    }

    #[test]
    fn rotation_preserves_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = Frame4::random(5, &mut rng).unwrap();
        let o = haar_rotation(5, &mut rng);
        let rf = f.rotate(&o).unwrap();
        assert!(rf.gram_residual() <= FRAME_TOL);
    }

    #[test]
    fn wedge_matches_gram_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Frame4::random(6, &mut rng).unwrap();
        let w = wedge(&f.vector(0), &f.vector(1));
        // |u ∧ v|² = |u|²|v|² − ⟨u,v⟩² = 1 for orthonormal u, v.
        assert!((w.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn hat_mul_is_adjoint_of_wedge() {
        // ⟨η, u ∧ v⟩ = uᵀ Ĥ v.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 5;
        let u = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let eta = DVector::from_fn(pair_count(n), |_, _| {
            rng.sample::<f64, _>(StandardNormal)
        });
        let lhs = eta.dot(&wedge(&u, &v));
        let rhs = u.dot(&hat_mul(n, &eta, &v));
        assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }
}
