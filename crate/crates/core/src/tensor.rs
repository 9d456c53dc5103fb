//! Algebraic curvature tensors on ℝⁿ.
//!
//! A curvature tensor `R` is stored as a symmetric operator on the
//! N = n(n-1)/2 dimensional space of 2-forms, in the basis
//! `e_i ∧ e_j` (i < j, lexicographic). The operator picture makes the
//! antisymmetries and the pair symmetry structural; the first Bianchi
//! identity is enforced by projecting out the fully antisymmetric part,
//! which in these coordinates is spanned by one direction per 4-subset
//! of axes. Every constructor returns a tensor satisfying all three
//! symmetries; linear combinations preserve them exactly.
//!
//! Conventions: the identity tensor `I_{ijkl} = δ_{ik}δ_{jl} − δ_{il}δ_{jk}`
//! is the identity operator on 2-forms and corresponds to the unit round
//! sphere (all sectional curvatures `+1`). Norms of tensors are Frobenius
//! norms over all four indices, i.e. `‖R‖ = 2‖M‖_F` for the operator
//! matrix `M`.

use nalgebra::DMatrix;

use crate::error::{CurvError, Result};

/// Relative tolerance for construction-level symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Number of 2-form basis elements in dimension `n`.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Position of `e_i ∧ e_j` (i < j) in the lexicographic pair basis.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// All index pairs (i, j) with i < j < n, in basis order.
pub fn pair_list(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j));
        }
    }
    out
}

/// A symmetric bilinear form on ℝⁿ (Ricci tensors, the identity form, …).
#[derive(Clone, Debug, PartialEq)]
pub struct Sym2 {
    dim: usize,
    mat: DMatrix<f64>,
}

impl Sym2 {
    /// Builds a symmetric form from an n×n matrix, symmetrizing the input.
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(CurvError::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        if mat.iter().any(|x| !x.is_finite()) {
            return Err(CurvError::NonFinite("Sym2::new"));
        }
        let dim = mat.nrows();
        let sym = (&mat + mat.transpose()) * 0.5;
        Ok(Sym2 { dim, mat: sym })
    }

    pub fn identity(n: usize) -> Self {
        Sym2 {
            dim: n,
            mat: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Sym2 {
            dim: n,
            mat: DMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn norm_sq(&self) -> f64 {
        self.mat.norm_squared()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eigs: Vec<f64> = self
            .mat
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        eigs
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn scale(&self, c: f64) -> Sym2 {
        Sym2 {
            dim: self.dim,
            mat: &self.mat * c,
        }
    }

    pub fn add(&self, other: &Sym2) -> Result<Sym2> {
        if self.dim != other.dim {
            return Err(CurvError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(Sym2 {
            dim: self.dim,
            mat: &self.mat + &other.mat,
        })
    }
}

/// An algebraic curvature tensor, stored as a symmetric operator on 2-forms.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvTensor {
    dim: usize,
    op: DMatrix<f64>,
}

impl CurvTensor {
    fn check_dim(n: usize) -> Result<()> {
        if n < 3 {
            return Err(CurvError::Dimension { min: 3, got: n });
        }
        Ok(())
    }

    /// The zero tensor.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::check_dim(n)?;
        let m = pair_count(n);
        Ok(CurvTensor {
            dim: n,
            op: DMatrix::zeros(m, m),
        })
    }

    /// The curvature tensor of the unit round sphere:
    /// `I_{ijkl} = δ_{ik}δ_{jl} − δ_{il}δ_{jk}`, i.e. the identity operator
    /// on 2-forms.
    pub fn identity(n: usize) -> Result<Self> {
        Self::check_dim(n)?;
        let m = pair_count(n);
        Ok(CurvTensor {
            dim: n,
            op: DMatrix::identity(m, m),
        })
    }

    /// Canonicalizes a raw component table of n⁴ entries (index order
    /// `raw[((i·n+j)·n+k)·n+l]`) onto the space of algebraic curvature
    /// tensors: orthogonal projection onto the pair-symmetry class followed
    /// by the first-Bianchi projection. Idempotent on valid inputs.
    pub fn from_components(n: usize, raw: &[f64]) -> Result<Self> {
        Self::check_dim(n)?;
        if raw.len() != n * n * n * n {
            return Err(CurvError::Parameter(format!(
                "component table must have n^4 = {} entries, got {}",
                n * n * n * n,
                raw.len()
            )));
        }
        if raw.iter().any(|x| !x.is_finite()) {
            return Err(CurvError::NonFinite("CurvTensor::from_components"));
        }
        let m = pair_count(n);
        let pairs = pair_list(n);
        let at = |i: usize, j: usize, k: usize, l: usize| raw[((i * n + j) * n + k) * n + l];
        let mut op = DMatrix::zeros(m, m);
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for (q, &(k, l)) in pairs.iter().enumerate() {
                // Average over the symmetry group generated by the two
                // antisymmetries and the pair exchange.
                let v = (at(i, j, k, l) - at(j, i, k, l) - at(i, j, l, k) + at(j, i, l, k)
                    + at(k, l, i, j)
                    - at(l, k, i, j)
                    - at(k, l, j, i)
                    + at(l, k, j, i))
                    / 8.0;
                op[(p, q)] = v;
            }
        }
        bianchi_project(&mut op, n);
        Ok(CurvTensor { dim: n, op })
    }

    /// Builds a tensor from an operator matrix on the 2-form basis,
    /// symmetrizing and Bianchi-projecting the input.
    pub fn from_operator(n: usize, op: DMatrix<f64>) -> Result<Self> {
        Self::check_dim(n)?;
        let m = pair_count(n);
        if op.nrows() != m || op.ncols() != m {
            return Err(CurvError::Parameter(format!(
                "operator must be {m}x{m} for dimension {n}, got {}x{}",
                op.nrows(),
                op.ncols()
            )));
        }
        if op.iter().any(|x| !x.is_finite()) {
            return Err(CurvError::NonFinite("CurvTensor::from_operator"));
        }
        let mut sym = (&op + op.transpose()) * 0.5;
        bianchi_project(&mut sym, n);
        Ok(CurvTensor { dim: n, op: sym })
    }

    /// Internal constructor for linear combinations of valid tensors,
    /// which stay in the symmetry class exactly.
    pub(crate) fn from_operator_trusted(dim: usize, op: DMatrix<f64>) -> Self {
        CurvTensor { dim, op }
    }

    /// The curvature tensor of S^p(r1) × S^q(r2): sectional curvature
    /// 1/r1² on planes inside the first factor, 1/r2² inside the second,
    /// zero on mixed planes.
    pub fn sphere_product(p: usize, q: usize, r1: f64, r2: f64) -> Result<Self> {
        if p < 1 || q < 1 {
            return Err(CurvError::Parameter(format!(
                "sphere product factors must have dimension >= 1, got ({p}, {q})"
            )));
        }
        if p + q < 4 {
            return Err(CurvError::Parameter(format!(
                "sphere product needs total dimension >= 4, got {}",
                p + q
            )));
        }
        if !(r1 > 0.0 && r1.is_finite() && r2 > 0.0 && r2.is_finite()) {
            return Err(CurvError::Parameter(format!(
                "sphere product radii must be positive, got ({r1}, {r2})"
            )));
        }
        let n = p + q;
        let mut g1 = DMatrix::zeros(n, n);
        let mut g2 = DMatrix::zeros(n, n);
        for i in 0..p {
            g1[(i, i)] = 1.0;
        }
        for i in p..n {
            g2[(i, i)] = 1.0;
        }
        let g1 = Sym2::new(g1)?;
        let g2 = Sym2::new(g2)?;
        let t1 = kulkarni_nomizu(&g1, &g1)?;
        let t2 = kulkarni_nomizu(&g2, &g2)?;
        Ok(&t1.scale(0.5 / (r1 * r1)) + &t2.scale(0.5 / (r2 * r2)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the 2-form space the operator acts on.
    pub fn pair_dim(&self) -> usize {
        pair_count(self.dim)
    }

    pub fn op(&self) -> &DMatrix<f64> {
        &self.op
    }

    /// Four-index component accessor (0-based indices).
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.dim;
        debug_assert!(i < n && j < n && k < n && l < n);
        if i == j || k == l {
            return 0.0;
        }
        let (a, b, s1) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let (c, d, s2) = if k < l { (k, l, 1.0) } else { (l, k, -1.0) };
        s1 * s2 * self.op[(pair_index(n, a, b), pair_index(n, c, d))]
    }

    /// Full component table, n⁴ entries in `((i·n+j)·n+k)·n+l` order.
    pub fn components(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        if k == l {
                            continue;
                        }
                        out[((i * n + j) * n + k) * n + l] = self.get(i, j, k, l);
                    }
                }
            }
        }
        out
    }

    /// Frobenius norm over all four indices.
    pub fn norm(&self) -> f64 {
        2.0 * self.op.norm()
    }

    /// Scalar curvature, the double contraction of the tensor.
    pub fn scal(&self) -> f64 {
        2.0 * self.op.trace()
    }

    /// Ricci contraction: `ric_{jl} = Σ_i R_{ijil}`.
    pub fn ricci(&self) -> Sym2 {
        let n = self.dim;
        let mut mat = DMatrix::zeros(n, n);
        for j in 0..n {
            for l in j..n {
                let mut s = 0.0;
                for i in 0..n {
                    s += self.get(i, j, i, l);
                }
                mat[(j, l)] = s;
                mat[(l, j)] = s;
            }
        }
        Sym2 { dim: n, mat }
    }

    /// Returns (scal, Ric, traceless Ricci).
    pub fn contractions(&self) -> (f64, Sym2, Sym2) {
        let ric = self.ricci();
        let scal = ric.trace();
        let n = self.dim as f64;
        let ric0 = Sym2 {
            dim: self.dim,
            mat: ric.mat() - DMatrix::identity(self.dim, self.dim) * (scal / n),
        };
        (scal, ric, ric0)
    }

    /// Squared Frobenius norm of the Ricci tensor.
    pub fn ricci_norm_sq(&self) -> f64 {
        self.ricci().norm_sq()
    }

    pub fn scale(&self, c: f64) -> CurvTensor {
        CurvTensor {
            dim: self.dim,
            op: &self.op * c,
        }
    }

    /// Frobenius distance over four indices.
    pub fn dist(&self, other: &CurvTensor) -> f64 {
        2.0 * (&self.op - &other.op).norm()
    }

    /// Largest first-Bianchi cyclic residual over all 4-subsets of axes.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for l in (k + 1)..n {
                        let c = self.get(i, j, k, l) + self.get(i, k, l, j) + self.get(i, l, j, k);
                        worst = worst.max(c.abs());
                    }
                }
            }
        }
        worst
    }

    /// Asymmetry of the stored operator matrix (always 0 by construction;
    /// kept for drift checks after external mutation).
    pub fn operator_asymmetry(&self) -> f64 {
        (&self.op - self.op.transpose()).norm()
    }

    /// Re-applies the symmetry and Bianchi projections in place.
    pub fn canonicalize(&mut self) {
        let sym = (&self.op + self.op.transpose()) * 0.5;
        self.op = sym;
        bianchi_project(&mut self.op, self.dim);
    }

    /// The quadratic reaction term of the curvature evolution:
    /// `Q(R)_{ijkl} = Σ_{pq} R_{ijpq} R_{klpq}
    ///  + 2 Σ_{pq} (R_{ipkq} R_{jplq} − R_{iplq} R_{jpkq})`.
    pub fn q_quadratic(&self) -> CurvTensor {
        let n = self.dim;
        let comps = self.components();
        let at = |i: usize, j: usize, k: usize, l: usize| comps[((i * n + j) * n + k) * n + l];
        // First sum: 2 M² in operator form.
        let mut op = &self.op * &self.op * 2.0;
        // Second sum, filled on the pair basis using output symmetry.
        let pairs = pair_list(n);
        for (pi, &(i, j)) in pairs.iter().enumerate() {
            for (qi, &(k, l)) in pairs.iter().enumerate() {
                if qi < pi {
                    continue;
                }
                let mut s = 0.0;
                for p in 0..n {
                    for q in 0..n {
                        s += at(i, p, k, q) * at(j, p, l, q) - at(i, p, l, q) * at(j, p, k, q);
                    }
                }
                op[(pi, qi)] += 2.0 * s;
                if qi != pi {
                    op[(qi, pi)] += 2.0 * s;
                }
            }
        }
        let mut out = CurvTensor { dim: n, op };
        // The formula preserves the symmetry class analytically; projection
        // only removes floating-point drift.
        out.canonicalize();
        out
    }

    /// Pulls the tensor back by an orthogonal matrix acting on all four
    /// indices: `(O·R)(x,y,z,w) = R(Ox, Oy, Oz, Ow)`.
    pub fn rotate(&self, o: &DMatrix<f64>) -> Result<CurvTensor> {
        let n = self.dim;
        if o.nrows() != n || o.ncols() != n {
            return Err(CurvError::DimensionMismatch(o.nrows(), n));
        }
        let pairs = pair_list(n);
        let m = pairs.len();
        let mut l2 = DMatrix::zeros(m, m);
        for (col, &(i, j)) in pairs.iter().enumerate() {
            for (row, &(a, b)) in pairs.iter().enumerate() {
                l2[(row, col)] = o[(a, i)] * o[(b, j)] - o[(b, i)] * o[(a, j)];
            }
        }
        let op = l2.transpose() * &self.op * &l2;
        CurvTensor::from_operator(n, op)
    }
}

impl std::ops::Add for &CurvTensor {
    type Output = CurvTensor;
    fn add(self, rhs: &CurvTensor) -> CurvTensor {
        assert_eq!(self.dim, rhs.dim, "curvature tensor dimension mismatch");
        CurvTensor {
            dim: self.dim,
            op: &self.op + &rhs.op,
        }
    }
}

impl std::ops::Sub for &CurvTensor {
    type Output = CurvTensor;
    fn sub(self, rhs: &CurvTensor) -> CurvTensor {
        assert_eq!(self.dim, rhs.dim, "curvature tensor dimension mismatch");
        CurvTensor {
            dim: self.dim,
            op: &self.op - &rhs.op,
        }
    }
}

/// Removes the fully antisymmetric (Bianchi-violating) part of a symmetric
/// operator on 2-forms. One orthogonal direction per 4-subset of axes.
fn bianchi_project(op: &mut DMatrix<f64>, n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                for l in (k + 1)..n {
                    let p_ij_kl = (pair_index(n, i, j), pair_index(n, k, l));
                    let p_ik_jl = (pair_index(n, i, k), pair_index(n, j, l));
                    let p_il_jk = (pair_index(n, i, l), pair_index(n, j, k));
                    let c = (op[p_ij_kl] - op[p_ik_jl] + op[p_il_jk]) / 3.0;
                    op[p_ij_kl] -= c;
                    op[(p_ij_kl.1, p_ij_kl.0)] -= c;
                    op[p_ik_jl] += c;
                    op[(p_ik_jl.1, p_ik_jl.0)] += c;
                    op[p_il_jk] -= c;
                    op[(p_il_jk.1, p_il_jk.0)] -= c;
                }
            }
        }
    }
}

/// Kulkarni–Nomizu product of two symmetric forms:
/// `(h ⊘ k)_{ijkl} = h_{ik}k_{jl} + h_{jl}k_{ik} − h_{il}k_{jk} − h_{jk}k_{il}`.
pub fn kulkarni_nomizu(h: &Sym2, k: &Sym2) -> Result<CurvTensor> {
    if h.dim() != k.dim() {
        return Err(CurvError::DimensionMismatch(h.dim(), k.dim()));
    }
    let n = h.dim();
    CurvTensor::check_dim(n)?;
    let pairs = pair_list(n);
    let m = pairs.len();
    let mut op = DMatrix::zeros(m, m);
    for (p, &(i, j)) in pairs.iter().enumerate() {
        for (q, &(c, d)) in pairs.iter().enumerate() {
            op[(p, q)] = h.get(i, c) * k.get(j, d) + h.get(j, d) * k.get(i, c)
                - h.get(i, d) * k.get(j, c)
                - h.get(j, c) * k.get(i, d);
        }
    }
    // Analytically symmetric and Bianchi-valid; project to kill rounding.
    let mut out = CurvTensor { dim: n, op };
    out.canonicalize();
    Ok(out)
}

/// Largest admissible `b` in the curvature-operator transform for
/// dimension `n`.
pub fn lab_b_upper(n: usize) -> f64 {
    let nf = n as f64;
    ((2.0 * nf * (nf - 2.0) + 4.0).sqrt() - 2.0) / (nf * (nf - 2.0))
}

/// The companion coefficient `a` determined by `2a = 2b + (n−2)b²`.
pub fn lab_a_from_b(n: usize, b: f64) -> f64 {
    b + 0.5 * (n as f64 - 2.0) * b * b
}

fn lab_check_b(n: usize, b: f64) -> Result<()> {
    let upper = lab_b_upper(n);
    if !(b > 0.0 && b.is_finite() && b <= upper * (1.0 + 1e-14)) {
        return Err(CurvError::Parameter(format!(
            "transform parameter b must lie in (0, {upper:.12}] for n = {n}, got {b}"
        )));
    }
    Ok(())
}

/// The linear transform
/// `ℓ_{a,b}(R) = R + b·Ric(R) ⊘ id + (a−b)/n · scal(R) · id ⊘ id`
/// with `a` determined by `2a = 2b + (n−2)b²`.
pub fn l_ab(r: &CurvTensor, b: f64) -> Result<CurvTensor> {
    let n = r.dim();
    lab_check_b(n, b)?;
    let a = lab_a_from_b(n, b);
    let (scal, ric, _) = r.contractions();
    let id = Sym2::identity(n);
    let ric_term = kulkarni_nomizu(&ric, &id)?;
    let id_term = kulkarni_nomizu(&id, &id)?;
    Ok(&(r + &ric_term.scale(b)) + &id_term.scale((a - b) / n as f64 * scal))
}

/// Inverse of [`l_ab`], computed through the irreducible decomposition:
/// the Weyl part is fixed, the traceless-Ricci part is scaled by
/// `1 + (n−2)b`, and the scalar part by `1 + 2(n−1)a`.
pub fn l_ab_inverse(y: &CurvTensor, b: f64) -> Result<CurvTensor> {
    let n = y.dim();
    lab_check_b(n, b)?;
    let a = lab_a_from_b(n, b);
    let nf = n as f64;
    let (scal, _, ric0) = y.contractions();
    let id = Sym2::identity(n);
    let scalar_part = CurvTensor::identity(n)?.scale(scal / (nf * (nf - 1.0)));
    let ric_part = kulkarni_nomizu(&ric0, &id)?.scale(1.0 / (nf - 2.0));
    let weyl = &(y - &scalar_part) - &ric_part;
    let ric_scale = 1.0 / (1.0 + (nf - 2.0) * b);
    let scalar_scale = 1.0 / (1.0 + 2.0 * (nf - 1.0) * a);
    Ok(&(&weyl + &ric_part.scale(ric_scale)) + &scalar_part.scale(scalar_scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(n: usize, seed: u64) -> CurvTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..n * n * n * n)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        CurvTensor::from_components(n, &raw).unwrap()
    }

    fn random_sym2(n: usize, seed: u64) -> Sym2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mat = DMatrix::from_fn(n, n, |_, _| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        Sym2::new(mat).unwrap()
    }

    #[test]
    fn identity_components() {
        let i4 = CurvTensor::identity(4).unwrap();
        assert_eq!(i4.get(0, 1, 0, 1), 1.0);
        assert_eq!(i4.get(0, 1, 1, 0), -1.0);
        assert_eq!(i4.get(0, 1, 0, 2), 0.0);
    }

    #[test]
    fn identity_contractions() {
        for n in 3..=8 {
            let id = CurvTensor::identity(n).unwrap();
            let (scal, ric, ric0) = id.contractions();
            let nf = n as f64;
            assert_relative_eq!(scal, nf * (nf - 1.0), max_relative = 1e-14);
            for j in 0..n {
                for l in 0..n {
                    let expect = if j == l { nf - 1.0 } else { 0.0 };
                    assert_relative_eq!(ric.get(j, l), expect, epsilon = 1e-14);
                }
            }
            assert!(ric0.norm() <= 1e-13);
        }
    }

    #[test]
    fn dimension_errors() {
        assert!(CurvTensor::identity(2).is_err());
        assert!(CurvTensor::from_components(2, &[0.0; 16]).is_err());
        let mut raw = vec![0.0; 81];
        raw[0] = f64::NAN;
        assert!(CurvTensor::from_components(3, &raw).is_err());
    }

    #[test]
    fn projection_is_idempotent_and_valid() {
        for n in [3, 4, 5] {
            let r = random_tensor(n, 17 + n as u64);
            let norm = r.norm().max(1.0);
            assert!(r.bianchi_residual() <= SYMMETRY_TOL * norm);
            let reproj = CurvTensor::from_components(n, &r.components()).unwrap();
            assert!(r.dist(&reproj) <= SYMMETRY_TOL * norm);
        }
    }

    #[test]
    fn four_index_symmetries_via_components() {
        let r = random_tensor(4, 3);
        let n = 4;
        let c = r.components();
        let at = |i: usize, j: usize, k: usize, l: usize| c[((i * n + j) * n + k) * n + l];
        let norm = r.norm();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        assert!((at(i, j, k, l) + at(j, i, k, l)).abs() <= SYMMETRY_TOL * norm);
                        assert!((at(i, j, k, l) + at(i, j, l, k)).abs() <= SYMMETRY_TOL * norm);
                        assert!((at(i, j, k, l) - at(k, l, i, j)).abs() <= SYMMETRY_TOL * norm);
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_product_contractions() {
        let r = CurvTensor::sphere_product(2, 2, 1.0, 1.0).unwrap();
        let (scal, ric, _) = r.contractions();
        assert_relative_eq!(scal, 4.0, max_relative = 1e-12);
        for ev in ric.eigenvalues() {
            assert_relative_eq!(ev, 1.0, max_relative = 1e-12);
        }
        let flat = CurvTensor::sphere_product(3, 1, 1.0, 1.0).unwrap();
        assert_relative_eq!(flat.scal(), 6.0, max_relative = 1e-12);
        assert!(flat.bianchi_residual() <= 1e-12 * flat.norm().max(1.0));
    }

    #[test]
    fn sphere_product_errors() {
        assert!(CurvTensor::sphere_product(2, 1, 1.0, 1.0).is_err());
        assert!(CurvTensor::sphere_product(2, 2, 0.0, 1.0).is_err());
        assert!(CurvTensor::sphere_product(0, 4, 1.0, 1.0).is_err());
    }

    #[test]
    fn kulkarni_nomizu_of_identities() {
        for n in [3, 4, 6] {
            let id = Sym2::identity(n);
            let kn = kulkarni_nomizu(&id, &id).unwrap();
            let two_i = CurvTensor::identity(n).unwrap().scale(2.0);
            assert!(kn.dist(&two_i) <= 1e-13);
        }
    }

    #[test]
    fn kulkarni_nomizu_trace() {
        let n = 5;
        let h = random_sym2(n, 11);
        let id = Sym2::identity(n);
        let kn = kulkarni_nomizu(&id, &h).unwrap();
        assert_relative_eq!(
            kn.scal(),
            2.0 * (n as f64 - 1.0) * h.trace(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn q_of_identity_matches_closed_form() {
        for n in 3..=6 {
            let id = CurvTensor::identity(n).unwrap();
            let q = id.q_quadratic();
            let expect = id.scale(2.0 * (n as f64 - 1.0));
            assert!(q.dist(&expect) <= 1e-12 * expect.norm());
        }
    }

    #[test]
    fn q_trace_identity_and_homogeneity() {
        for seed in 0..20 {
            let r = random_tensor(4, 100 + seed);
            let q = r.q_quadratic();
            assert_relative_eq!(
                q.scal(),
                2.0 * r.ricci_norm_sq(),
                max_relative = 1e-10,
                epsilon = 1e-12
            );
            let q2 = r.scale(2.0).q_quadratic();
            assert!(q2.dist(&q.scale(4.0)) <= 1e-10 * q.norm().max(1.0));
        }
        let zero = CurvTensor::zeros(4).unwrap();
        assert_eq!(zero.q_quadratic().norm(), 0.0);
    }

    #[test]
    fn lab_bounds_and_identity_action() {
        assert_relative_eq!(lab_b_upper(4), (20f64.sqrt() - 2.0) / 8.0, epsilon = 1e-15);
        assert_relative_eq!(lab_b_upper(4), 0.3090169943749474, epsilon = 1e-12);
        for n in [4usize, 5] {
            let b = 0.5 * lab_b_upper(n);
            let a = lab_a_from_b(n, b);
            let id = CurvTensor::identity(n).unwrap();
            let li = l_ab(&id, b).unwrap();
            let expect = id.scale(1.0 + 2.0 * (n as f64 - 1.0) * a);
            assert!(li.dist(&expect) <= 1e-12 * expect.norm());
        }
        let r = random_tensor(4, 5);
        assert!(l_ab(&r, 0.0).is_err());
        assert!(l_ab(&r, 0.4).is_err());
        assert!(l_ab(&r, lab_b_upper(4)).is_ok());
    }

    #[test]
    fn lab_roundtrip_and_linearity() {
        let n = 4;
        let b = 0.1;
        let r1 = random_tensor(n, 21);
        let r2 = random_tensor(n, 22);
        let back = l_ab_inverse(&l_ab(&r1, b).unwrap(), b).unwrap();
        assert!(back.dist(&r1) <= 1e-10 * r1.norm());
        let sum = l_ab(&(&r1 + &r2), b).unwrap();
        let parts = &l_ab(&r1, b).unwrap() + &l_ab(&r2, b).unwrap();
        assert!(sum.dist(&parts) <= 1e-11 * sum.norm().max(1.0));
    }

    #[test]
    fn lab_decomposition_scalars() {
        let n = 5;
        let nf = n as f64;
        let b = 0.12;
        let a = lab_a_from_b(n, b);
        let id = Sym2::identity(n);

        // Scalar part.
        let i5 = CurvTensor::identity(n).unwrap();
        let li = l_ab(&i5, b).unwrap();
        assert!(li.dist(&i5.scale(1.0 + 2.0 * (nf - 1.0) * a)) <= 1e-11 * li.norm());

        // Traceless-Ricci part: h ⊘ id for traceless h.
        let mut h = random_sym2(n, 40);
        let tr = h.trace() / nf;
        h = Sym2::new(h.mat() - DMatrix::identity(n, n) * tr).unwrap();
        let rp = kulkarni_nomizu(&h, &id).unwrap();
        let lrp = l_ab(&rp, b).unwrap();
        assert!(lrp.dist(&rp.scale(1.0 + (nf - 2.0) * b)) <= 1e-10 * rp.norm());

        // Weyl part: remainder of a random tensor after removing the
        // scalar and Ricci pieces; must be fixed by the transform.
        let r = random_tensor(n, 41);
        let (scal, _, ric0) = r.contractions();
        let scalar_part = CurvTensor::identity(n).unwrap().scale(scal / (nf * (nf - 1.0)));
        let ric_part = kulkarni_nomizu(&ric0, &id).unwrap().scale(1.0 / (nf - 2.0));
        let weyl = &(&r - &scalar_part) - &ric_part;
        assert!(weyl.ricci().norm() <= 1e-10 * r.norm());
        let lw = l_ab(&weyl, b).unwrap();
        assert!(lw.dist(&weyl) <= 1e-10 * weyl.norm().max(1.0));
    }

    #[test]
    fn rotation_equivariance_spot() {
        let n = 4;
        let r = random_tensor(n, 77);
        let o = crate::frame::haar_rotation(n, &mut ChaCha8Rng::seed_from_u64(8));
        let ro = r.rotate(&o).unwrap();
        assert_relative_eq!(ro.scal(), r.scal(), max_relative = 1e-10);
        assert_relative_eq!(ro.norm(), r.norm(), max_relative = 1e-10);
        let q_ro = ro.q_quadratic();
        let ro_q = r.q_quadratic().rotate(&o).unwrap();
        assert!(q_ro.dist(&ro_q) <= 1e-9 * q_ro.norm().max(1.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_projection_valid_and_idempotent(seed in 0u64..10_000) {
            let r = random_tensor(4, seed);
            let norm = r.norm().max(1.0);
            prop_assert!(r.bianchi_residual() <= SYMMETRY_TOL * norm);
            let again = CurvTensor::from_components(4, &r.components()).unwrap();
            prop_assert!(r.dist(&again) <= SYMMETRY_TOL * norm);
        }

        #[test]
        fn prop_kn_symmetric(seed in 0u64..10_000) {
            let h = random_sym2(4, seed);
            let k = random_sym2(4, seed.wrapping_add(1));
            let hk = kulkarni_nomizu(&h, &k).unwrap();
            let kh = kulkarni_nomizu(&k, &h).unwrap();
            prop_assert!(hk.dist(&kh) <= 1e-12 * hk.norm().max(1.0));
        }

        #[test]
        fn prop_ric0_traceless(seed in 0u64..10_000) {
            let r = random_tensor(5, seed);
            let (_, _, ric0) = r.contractions();
            prop_assert!(ric0.trace().abs() <= 1e-12 * r.norm().max(1.0));
        }
    }
}
