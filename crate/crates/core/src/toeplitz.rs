//! Multi-Toeplitz matrices `T_m = sum b_a^* (x) S_a^* + b_0 (x) I + sum b_a (x) S_a`
//! on `C^p (x) P^(m)`, their orbit decomposition and the affine projection
//! used by the extension solver.
//!
//! Block `(gamma, beta)` of `T_m` is `b_sigma` when `gamma = sigma beta`,
//! `b_sigma^*` when `beta = sigma gamma`, `b_0` on the diagonal and zero otherwise.

use std::collections::BTreeMap;

use crate::cmatrix::{self, kron, zeros, CMatrix};
use crate::error::{Error, Result};
use crate::freeword::{GradedBasis, Word};
use crate::series::{eval_at_creation, FreeSeries};
use crate::transforms::{get_block, put_block};

#[derive(Clone, Debug)]
pub struct MultiToeplitzMatrix {
    n: usize,
    m: usize,
    p: usize,
    entries: CMatrix,
}

impl MultiToeplitzMatrix {
    pub(crate) fn from_entries(n: usize, m: usize, p: usize, entries: CMatrix) -> Self {
        MultiToeplitzMatrix { n, m, p, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn block_size(&self) -> usize {
        self.p
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn basis(&self) -> GradedBasis {
        GradedBasis::enumerate(self.n, self.m).expect("validated at construction")
    }

    pub fn orbits(&self) -> OrbitStructure {
        OrbitStructure::new(self.n, self.m, 0).expect("validated at construction")
    }

    pub fn min_eig(&self) -> Result<f64> {
        min_eig(self)
    }
}

fn validate(n: usize, m: usize, coeffs: &BTreeMap<Word, CMatrix>) -> Result<usize> {
    let b0 = coeffs.get(&Word::empty()).ok_or_else(|| Error::Input("missing b_0".into()))?;
    if !b0.is_square() {
        return Err(Error::Shape("b_0 must be square".into()));
    }
    cmatrix::require_hermitian(b0)?;
    let p = b0.nrows();
    for (w, c) in coeffs {
        w.check(n)?;
        if w.len() > m {
            return Err(Error::Degree { degree: w.len(), max: m });
        }
        if c.shape() != (p, p) {
            return Err(Error::Shape(format!("coefficient {w:?} has shape {:?}, expected {p}x{p}", c.shape())));
        }
    }
    Ok(p)
}

/// `T_m` assembled from compressed creation operators.
pub fn assemble_t(n: usize, m: usize, coeffs: &BTreeMap<Word, CMatrix>) -> Result<MultiToeplitzMatrix> {
    let p = validate(n, m, coeffs)?;
    let mut upper = coeffs.clone();
    let b0 = upper.remove(&Word::empty()).expect("validated");
    let y = eval_at_creation(&FreeSeries::from_coeffs(n, m, (p, p), upper)?, m)?;
    let dim = crate::freeword::basis_size(n, m);
    let entries = kron(&b0, &cmatrix::identity(dim))? + &y + y.adjoint();
    Ok(MultiToeplitzMatrix { n, m, p, entries })
}

/// `T_m` assembled entrywise from right divisibility.
pub fn assemble_kernel(n: usize, m: usize, coeffs: &BTreeMap<Word, CMatrix>) -> Result<MultiToeplitzMatrix> {
    let p = validate(n, m, coeffs)?;
    let basis = GradedBasis::enumerate(n, m)?;
    let dim = basis.len();
    cmatrix::check_size(dim * p, dim * p)?;
    let mut entries = zeros(dim * p, dim * p);
    let zero = zeros(p, p);
    for (gi, gamma) in basis.words().iter().enumerate() {
        for (bi, beta) in basis.words().iter().enumerate() {
            let block = if gi == bi {
                coeffs[&Word::empty()].clone()
            } else if let Some(s) = gamma.right_quotient(beta) {
                coeffs.get(&s).cloned().unwrap_or_else(|| zero.clone())
            } else if let Some(s) = beta.right_quotient(gamma) {
                coeffs.get(&s).map(|c| c.adjoint()).unwrap_or_else(|| zero.clone())
            } else {
                continue;
            };
            put_block(&mut entries, dim, gi, bi, &block);
        }
    }
    Ok(MultiToeplitzMatrix { n, m, p, entries })
}

pub fn min_eig(t: &MultiToeplitzMatrix) -> Result<f64> {
    cmatrix::min_eig_hermitian(&t.entries)
}

/// Partition of index pairs of `P^(m)` by quotient word. Pair `(gamma, beta)`
/// with `gamma = sigma beta` belongs to the lower class of `sigma`; its
/// transpose to the adjoint-paired upper class; pairs outside every class are zero.
#[derive(Clone, Debug)]
pub struct OrbitStructure {
    n: usize,
    m: usize,
    m_fixed: usize,
    basis: GradedBasis,
    /// `lower[s]` lists `(gamma, beta)` with `gamma = w_s beta`, `s` a graded index;
    /// `lower[0]` is the diagonal.
    lower: Vec<Vec<(usize, usize)>>,
}

impl OrbitStructure {
    pub fn new(n: usize, m: usize, m_fixed: usize) -> Result<Self> {
        let basis = GradedBasis::enumerate(n, m)?;
        let dim = basis.len();
        let mut lower = vec![Vec::new(); dim];
        for beta in 0..dim {
            for (s, class) in lower.iter_mut().enumerate() {
                if let Some(gamma) = basis.concat_index(s, beta) {
                    class.push((gamma, beta));
                }
            }
        }
        Ok(OrbitStructure { n, m, m_fixed, basis, lower })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn m_fixed(&self) -> usize {
        self.m_fixed
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    /// Pairs in the lower class of the word with graded index `s`.
    pub fn class(&self, s: usize) -> &[(usize, usize)] {
        &self.lower[s]
    }

    /// Words whose classes are prescribed (`|sigma| <= m_fixed`).
    pub fn prescribed_words(&self) -> impl Iterator<Item = &Word> {
        self.basis.words().iter().take(self.basis.dim_upto(self.m_fixed))
    }

    /// Number of index pairs in the zero class.
    pub fn zero_class_size(&self) -> usize {
        let dim = self.basis.len();
        let covered: usize = self.lower.iter().skip(1).map(|c| 2 * c.len()).sum::<usize>() + dim;
        dim * dim - covered
    }

    /// Frobenius-nearest multi-Toeplitz coefficients of `h`: the average of the
    /// lower class blocks and adjoints of the upper class blocks; the diagonal
    /// average is made Hermitian.
    pub fn orbit_averages(&self, h: &CMatrix) -> Result<BTreeMap<Word, CMatrix>> {
        let dim = self.basis.len();
        if !h.is_square() || !h.nrows().is_multiple_of(dim) {
            return Err(Error::Shape(format!("{:?} does not act on C^p (x) P^({})", h.shape(), self.m)));
        }
        let p = h.nrows() / dim;
        let mut out = BTreeMap::new();
        for (s, class) in self.lower.iter().enumerate() {
            let mut acc = zeros(p, p);
            for &(g, b) in class {
                acc += get_block(h, dim, p, g, b);
                acc += get_block(h, dim, p, b, g).adjoint();
            }
            out.insert(self.basis.word_at(s).clone(), acc.scale(0.5 / class.len() as f64));
        }
        Ok(out)
    }

    /// Assembles `T` from a full coefficient family (missing words are zero).
    pub fn assemble(&self, coeffs: &BTreeMap<Word, CMatrix>, p: usize) -> CMatrix {
        let dim = self.basis.len();
        let mut out = zeros(dim * p, dim * p);
        for (s, class) in self.lower.iter().enumerate() {
            let Some(c) = coeffs.get(self.basis.word_at(s)) else { continue };
            let ca = c.adjoint();
            for &(g, b) in class {
                put_block(&mut out, dim, g, b, c);
                if s > 0 {
                    put_block(&mut out, dim, b, g, &ca);
                }
            }
        }
        out
    }
}

/// Orthogonal projection onto multi-Toeplitz matrices whose coefficients of
/// length `<= m_fixed` equal `prescribed`.
pub fn project_affine(
    h: &CMatrix,
    structure: &OrbitStructure,
    prescribed: &BTreeMap<Word, CMatrix>,
) -> Result<CMatrix> {
    let mut coeffs = structure.orbit_averages(h)?;
    let p = h.nrows() / structure.basis.len();
    for w in structure.prescribed_words() {
        let c = prescribed.get(w).cloned().unwrap_or_else(|| zeros(p, p));
        if c.shape() != (p, p) {
            return Err(Error::Shape(format!("prescribed coefficient {w:?} has shape {:?}", c.shape())));
        }
        coeffs.insert(w.clone(), c);
    }
    Ok(structure.assemble(&coeffs, p))
}
