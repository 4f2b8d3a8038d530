//! Dense complex linear algebra on top of `nalgebra`.
//!
//! Every finite-dimensional operator in the crate is a [`CMatrix`]. Tensor
//! products follow the `kron` convention: in `kron(A, B)` the index of `A` is
//! the slow one.

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

const DEFAULT_SIZE_LIMIT: usize = 4096;
static SIZE_LIMIT: AtomicUsize = AtomicUsize::new(DEFAULT_SIZE_LIMIT);

/// Relative tolerance for the Hermitian precondition.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Sets the soft limit on dense matrix dimensions. A matrix is admitted when
/// `rows * cols <= limit^2`, so tall kernels with few columns are allowed.
pub fn set_size_limit(limit: usize) {
    SIZE_LIMIT.store(limit.max(1), Ordering::Relaxed);
}

pub fn size_limit() -> usize {
    SIZE_LIMIT.load(Ordering::Relaxed)
}

pub fn check_size(rows: usize, cols: usize) -> Result<()> {
    let limit = size_limit();
    let fits = rows
        .checked_mul(cols)
        .map(|e| e <= limit.saturating_mul(limit))
        .unwrap_or(false);
    if fits {
        Ok(())
    } else {
        Err(Error::SizeLimit { rows, cols, limit })
    }
}

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// 1x1 matrix holding `z`.
pub fn scalar(z: C64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}

/// Builds a matrix from real row-major rows.
pub fn from_real_rows(rows: &[&[f64]]) -> CMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    CMatrix::from_fn(r, c, |i, j| real(rows[i][j]))
}

/// Diagonal matrix with real entries.
pub fn diag(values: &[f64]) -> CMatrix {
    let mut m = zeros(values.len(), values.len());
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = real(v);
    }
    m
}

/// Matrix unit `E_{ij}` (zero-based) of size `n`.
pub fn unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = zeros(n, n);
    m[(i, j)] = real(1.0);
    m
}

/// Matrix product through real gemm on the real and imaginary parts; the
/// generic complex product is far slower for anything beyond small sizes.
pub fn mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "inner dimensions differ");
    if a.nrows() * a.ncols() * b.ncols() < 32 * 32 * 32 {
        return a * b;
    }
    let (ar, ai) = (a.map(|z| z.re), a.map(|z| z.im));
    let (br, bi) = (b.map(|z| z.re), b.map(|z| z.im));
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    re.zip_map(&im, C64::new)
}

/// `a^* b`.
pub fn ad_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    mul(&a.adjoint(), b)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let rows = a.nrows() * b.nrows();
    let cols = a.ncols() * b.ncols();
    check_size(rows, cols)?;
    Ok(a.kronecker(b))
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute entry.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest singular value.
pub fn operator_norm(a: &CMatrix) -> f64 {
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return 0.0;
    }
    let small = r.min(c);
    let large = r.max(c);
    if large > 4 * small && small <= 256 {
        // Gram matrix on the short side; the top eigenvalue keeps full relative accuracy.
        let g = if r > c { a.adjoint() * a } else { a * a.adjoint() };
        let g = (&g + g.adjoint()).scale(0.5);
        let eig = g.symmetric_eigenvalues();
        return eig.iter().copied().fold(0.0, f64::max).max(0.0).sqrt();
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn hermitian_defect(a: &CMatrix) -> f64 {
    frobenius(&(a - a.adjoint()))
}

pub fn require_hermitian(a: &CMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Shape(format!("expected square matrix, got {:?}", a.shape())));
    }
    let defect = hermitian_defect(a);
    if defect > HERMITIAN_TOL * (1.0 + frobenius(a)) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    /// `U f(Lambda) U^*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let s = f(lam);
            scaled.column_mut(j).scale_mut(s);
        }
        let out = scaled * u.adjoint();
        hermitian_part(&out)
    }
}

pub fn hermitian_eig(a: &CMatrix) -> Result<HermitianEig> {
    require_hermitian(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(HermitianEig { eigenvalues: vec![], eigenvectors: zeros(0, 0) });
    }
    let eig = hermitian_part(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEig { eigenvalues, eigenvectors })
}

/// Smallest eigenvalue of `(A + A^*)/2`; `A` must be Hermitian within tolerance.
pub fn min_eig_hermitian(a: &CMatrix) -> Result<f64> {
    require_hermitian(a)?;
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    let eig = hermitian_part(a).symmetric_eigenvalues();
    Ok(eig.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Frobenius-nearest matrix with spectrum bounded below by `floor`.
pub fn psd_project(a: &CMatrix, floor: f64) -> Result<CMatrix> {
    let eig = hermitian_eig(a)?;
    if eig.eigenvalues.first().is_none_or(|&l| l >= floor) {
        return Ok(hermitian_part(a));
    }
    Ok(eig.reconstruct_with(|l| l.max(floor)))
}

/// Square root of a positive semidefinite matrix; eigenvalues in `[-1e-12, 0)`
/// are clamped to zero, anything more negative is an error.
pub fn psd_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eig(a)?;
    let scale = 1.0f64.max(eig.eigenvalues.last().copied().unwrap_or(0.0).abs());
    if let Some(&l) = eig.eigenvalues.first() {
        if l < -1e-12 * scale {
            return Err(Error::Hypothesis(format!(
                "square root of a matrix with eigenvalue {l:.3e}"
            )));
        }
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// Inverse square root of a positive definite matrix.
pub fn pd_inv_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eig(a)?;
    let top = eig.eigenvalues.last().copied().unwrap_or(1.0).abs().max(f64::MIN_POSITIVE);
    if eig.eigenvalues.first().is_some_and(|&l| l <= 1e-14 * top) {
        return Err(Error::Singular);
    }
    Ok(eig.reconstruct_with(|l| 1.0 / l.sqrt()))
}

/// Solves `A X = B` by partial-pivot LU.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() || a.nrows() != b.nrows() {
        return Err(Error::Shape(format!(
            "solve: A is {:?}, B is {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let lu = a.clone().lu();
    let u = lu.u();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..u.nrows() {
        let d = u[(i, i)].norm();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if a.nrows() > 0 && (hi == 0.0 || lo <= 1e-12 * hi) {
        return Err(Error::Singular);
    }
    let x = lu.solve(b).ok_or(Error::Singular)?;
    let resid = frobenius(&(a * &x - b));
    if resid > 1e-9 * frobenius(b).max(f64::MIN_POSITIVE) && resid > 0.0 {
        return Err(Error::Singular);
    }
    Ok(x)
}

/// Block `(i, j)` of size `p x q` of a block matrix.
pub fn block(a: &CMatrix, i: usize, j: usize, p: usize, q: usize) -> CMatrix {
    a.view((i * p, j * q), (p, q)).into_owned()
}

/// JSON helpers: a complex number is `[re, im]`, a matrix is row-major nested arrays.
pub mod json {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Input("ragged matrix rows".into()));
        }
        if rows.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite matrix entry".into()));
        }
        Ok(CMatrix::from_fn(r, c, |i, j| c64(rows[i][j][0], rows[i][j][1])))
    }

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(D::Error::custom)
    }

    /// For `Vec<CMatrix>` fields.
    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            ms: &[CMatrix],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            ms.iter().map(to_rows).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<CMatrix>, D::Error> {
            let all = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
            all.iter().map(|r| from_rows(r).map_err(D::Error::custom)).collect()
        }
    }

    /// For `BTreeMap<Word, CMatrix>` fields.
    pub mod map {
        use super::*;
        use crate::freeword::Word;
        use std::collections::BTreeMap;

        pub fn serialize<S: Serializer>(
            ms: &BTreeMap<Word, CMatrix>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            ms.iter()
                .map(|(w, m)| (w.to_string(), to_rows(m)))
                .collect::<BTreeMap<_, _>>()
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<BTreeMap<Word, CMatrix>, D::Error> {
            let raw = BTreeMap::<String, Vec<Vec<[f64; 2]>>>::deserialize(d)?;
            raw.into_iter()
                .map(|(k, v)| {
                    let w: Word = k.parse().map_err(D::Error::custom)?;
                    let m = from_rows(&v).map_err(D::Error::custom)?;
                    Ok((w, m))
                })
                .collect()
        }
    }
}
