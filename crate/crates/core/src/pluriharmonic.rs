//! Free pluriharmonic functions
//! `u(X) = sum B_alpha (x) X_alpha^* + A_0 (x) I + sum A_alpha (x) X_alpha`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cmatrix::{self, identity, kron, zeros, CMatrix, C64};
use crate::error::{Error, Result};
use crate::fock::{self, FockTrunc, OperatorTuple};
use crate::freeword::{GradedBasis, Word};
use crate::series::{self, eval_at_creation, evaluation_scope, radius_estimate, Evaluation, FreeSeries};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PluriJson", into = "PluriJson")]
pub struct PluriharmonicFn {
    /// `A_alpha`, including `A_0` at the empty word.
    analytic: FreeSeries,
    /// `B_alpha^*` for `|alpha| >= 1`, stored as a series so both halves share
    /// the evaluation code.
    coanalytic_adj: FreeSeries,
}

#[derive(Serialize, Deserialize)]
struct PluriJson {
    n: usize,
    cutoff: usize,
    shape: [usize; 2],
    #[serde(with = "cmatrix::json::map")]
    analytic: BTreeMap<Word, CMatrix>,
    #[serde(with = "cmatrix::json::map")]
    coanalytic: BTreeMap<Word, CMatrix>,
}

impl TryFrom<PluriJson> for PluriharmonicFn {
    type Error = Error;

    fn try_from(j: PluriJson) -> Result<Self> {
        if j.shape[0] != j.shape[1] {
            return Err(Error::Shape("pluriharmonic coefficients must be square".into()));
        }
        PluriharmonicFn::new(j.n, j.cutoff, j.shape[0], j.analytic, j.coanalytic)
    }
}

impl From<PluriharmonicFn> for PluriJson {
    fn from(h: PluriharmonicFn) -> Self {
        let (p, q) = h.analytic.shape();
        PluriJson {
            n: h.n(),
            cutoff: h.cutoff(),
            shape: [p, q],
            analytic: h.analytic.coeffs().clone(),
            coanalytic: h.coanalytic(),
        }
    }
}

impl PluriharmonicFn {
    pub fn new(
        n: usize,
        cutoff: usize,
        p: usize,
        analytic: BTreeMap<Word, CMatrix>,
        coanalytic: BTreeMap<Word, CMatrix>,
    ) -> Result<Self> {
        let analytic = FreeSeries::from_coeffs(n, cutoff, (p, p), analytic)?;
        let mut adj = BTreeMap::new();
        for (w, b) in coanalytic {
            if w.is_empty() {
                return Err(Error::InvalidWord("co-analytic part has no constant term".into()));
            }
            adj.insert(w, b.adjoint());
        }
        let coanalytic_adj = FreeSeries::from_coeffs(n, cutoff, (p, p), adj)?;
        Ok(PluriharmonicFn { analytic, coanalytic_adj })
    }

    /// The constant function `c`.
    pub fn constant(n: usize, cutoff: usize, c: CMatrix) -> Result<Self> {
        let p = c.nrows();
        let mut a = BTreeMap::new();
        a.insert(Word::empty(), c);
        Self::new(n, cutoff, p, a, BTreeMap::new())
    }

    pub fn n(&self) -> usize {
        self.analytic.n()
    }

    pub fn cutoff(&self) -> usize {
        self.analytic.cutoff()
    }

    pub fn dim(&self) -> usize {
        self.analytic.shape().0
    }

    pub fn a0(&self) -> CMatrix {
        self.analytic.constant()
    }

    pub fn analytic(&self) -> &FreeSeries {
        &self.analytic
    }

    /// `B_alpha` keyed by word.
    pub fn coanalytic(&self) -> BTreeMap<Word, CMatrix> {
        self.coanalytic_adj.coeffs().iter().map(|(w, c)| (w.clone(), c.adjoint())).collect()
    }

    pub fn analytic_coeff(&self, w: &Word) -> CMatrix {
        self.analytic.coeff(w)
    }

    pub fn coanalytic_coeff(&self, w: &Word) -> CMatrix {
        self.coanalytic_adj.coeff(w).adjoint()
    }

    /// `max(||A_0 - A_0^*||, max_alpha ||B_alpha - A_alpha^*||)` entrywise.
    pub fn selfadjoint_defect(&self) -> f64 {
        let mut worst = cmatrix::hermitian_defect(&self.a0());
        let words: std::collections::BTreeSet<&Word> = self
            .analytic
            .coeffs()
            .keys()
            .chain(self.coanalytic_adj.coeffs().keys())
            .filter(|w| !w.is_empty())
            .collect();
        for w in words {
            worst = worst.max(cmatrix::max_abs(&(self.analytic.coeff(w) - self.coanalytic_adj.coeff(w))));
        }
        worst
    }

    pub fn is_selfadjoint(&self) -> bool {
        self.selfadjoint_defect() <= cmatrix::HERMITIAN_TOL * (1.0 + self.coefficient_scale())
    }

    fn coefficient_scale(&self) -> f64 {
        self.analytic.coeffs().values().chain(self.coanalytic_adj.coeffs().values()).map(cmatrix::max_abs).fold(0.0, f64::max)
    }

    fn require_selfadjoint(&self) -> Result<()> {
        if self.is_selfadjoint() {
            Ok(())
        } else {
            Err(Error::NotSelfadjoint(self.selfadjoint_defect()))
        }
    }

    /// `A_alpha -> r^{|alpha|} A_alpha`, `B_alpha -> r^{|alpha|} B_alpha`.
    pub fn radial(&self, r: f64) -> Self {
        PluriharmonicFn { analytic: self.analytic.radial(r), coanalytic_adj: self.coanalytic_adj.radial(r) }
    }

    pub fn add(&self, other: &PluriharmonicFn) -> Result<Self> {
        Ok(PluriharmonicFn {
            analytic: self.analytic.add(&other.analytic)?,
            coanalytic_adj: self.coanalytic_adj.add(&other.coanalytic_adj)?,
        })
    }

    pub fn scale(&self, t: f64) -> Self {
        let t = C64::new(t, 0.0);
        PluriharmonicFn { analytic: self.analytic.scale(t), coanalytic_adj: self.coanalytic_adj.scale(t) }
    }
}

/// `Re f = (f + f^*)/2`.
pub fn real_part(f: &FreeSeries) -> Result<PluriharmonicFn> {
    let (p, q) = f.shape();
    if p != q {
        return Err(Error::Shape(format!("real part needs square coefficients, got {:?}", f.shape())));
    }
    let mut analytic = BTreeMap::new();
    let mut coanalytic = BTreeMap::new();
    for (w, c) in f.coeffs() {
        if w.is_empty() {
            analytic.insert(w.clone(), cmatrix::hermitian_part(c));
        } else {
            analytic.insert(w.clone(), c.scale(0.5));
            coanalytic.insert(w.clone(), c.adjoint().scale(0.5));
        }
    }
    PluriharmonicFn::new(f.n(), f.cutoff(), p, analytic, coanalytic)
}

/// `u(X)` truncated at the cutoff; nilpotent arguments are exact.
pub fn eval(h: &PluriharmonicFn, x: &OperatorTuple) -> Result<Evaluation> {
    if x.n() != h.n() {
        return Err(Error::Shape(format!("function in {} variables, tuple of {}", h.n(), x.n())));
    }
    let radius = radius_estimate(&h.analytic, h.cutoff()).min(radius_estimate(&h.coanalytic_adj, h.cutoff()));
    let (jsr, tail_estimate) = evaluation_scope(x, h.cutoff(), radius)?;
    let basis = GradedBasis::enumerate(h.n(), h.cutoff())?;
    let words = x.word_products(h.cutoff());
    let shape = h.analytic.shape();
    let a = series::sum_kron_words(h.analytic.coeffs(), &basis, &words, shape, x.dim())?;
    let b = series::sum_kron_words(h.coanalytic_adj.coeffs(), &basis, &words, shape, x.dim())?;
    Ok(Evaluation { value: a + b.adjoint(), tail_estimate, jsr })
}

/// `u(r S^(m))` on `C^p (x) P^(m)`.
pub fn radial_boundary(h: &PluriharmonicFn, r: f64, m: usize) -> Result<CMatrix> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Input(format!("radius {r} outside [0, 1]")));
    }
    let hr = h.radial(r);
    let a = eval_at_creation(&hr.analytic, m)?;
    let b = eval_at_creation(&hr.coanalytic_adj, m)?;
    Ok(a + b.adjoint())
}

/// `sum R_{reverse(alpha)} (x) X_alpha^* + I + sum R_{reverse(alpha)}^* (x) X_alpha`
/// over `1 <= |alpha| <= N`, dense.
pub fn pluriharmonic_poisson_kernel(ft: &FockTrunc, x: &OperatorTuple) -> Result<CMatrix> {
    if x.n() != ft.n() {
        return Err(Error::Shape("tuple and Fock space disagree on n".into()));
    }
    require_in_ball(x)?;
    let size = ft.dim() * x.dim();
    cmatrix::check_size(size, size)?;
    let words = x.word_products(ft.depth());
    let mut half = zeros(size, size);
    for (idx, w) in ft.basis().words().iter().enumerate().skip(1) {
        half += kron(&ft.right_word(w)?, &words[idx].adjoint())?;
    }
    Ok(identity(size) + &half + half.adjoint())
}

/// Compression of the pluriharmonic Poisson kernel to `span{e_w : |w| <= k} (x) C^p`,
/// assembled from word products without forming the full kernel.
pub fn pluriharmonic_kernel_compressed(ft: &FockTrunc, x: &OperatorTuple, k: usize) -> Result<CMatrix> {
    if k > ft.depth() {
        return Err(Error::Degree { degree: k, max: ft.depth() });
    }
    if x.n() != ft.n() {
        return Err(Error::Shape("tuple and Fock space disagree on n".into()));
    }
    require_in_ball(x)?;
    let basis = ft.basis();
    let words = x.word_products(k);
    let d = basis.dim_upto(k);
    let p = x.dim();
    cmatrix::check_size(d * p, d * p)?;
    let mut out = zeros(d * p, d * p);
    for col in 0..d {
        out.view_mut((col * p, col * p), (p, p)).copy_from(&identity(p));
        for sigma in 1..d {
            // e_w -> e_{w sigma}: block (w sigma, w) = X_sigma^*
            let Some(row) = basis.concat_index(col, sigma) else { continue };
            if row >= d {
                continue;
            }
            let xs = &words[sigma];
            out.view_mut((row * p, col * p), (p, p)).copy_from(&xs.adjoint());
            out.view_mut((col * p, row * p), (p, p)).copy_from(xs);
        }
    }
    Ok(out)
}

fn require_in_ball(x: &OperatorTuple) -> Result<()> {
    if x.row_norm() < 1.0 - fock::STRICT_BALL_MARGIN {
        return Ok(());
    }
    let jsr = series::jsr_estimate(x, x.dim().max(1));
    if jsr.nilpotent_order.is_some() {
        Ok(())
    } else {
        Err(Error::Divergence(format!("row norm {} and not nilpotent", x.row_norm())))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PositivityReport {
    pub m_max: usize,
    /// Minimum eigenvalue of `u(S^(m))` for `m = 0..=m_max`.
    pub min_eigs: Vec<f64>,
    pub tol: f64,
    pub positive: bool,
}

/// `u(S^(m)) >= -tol` for every `m <= m_max`.
pub fn check_positive(h: &PluriharmonicFn, m_max: usize, tol: f64) -> Result<PositivityReport> {
    h.require_selfadjoint()?;
    let mut min_eigs = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let u = cmatrix::hermitian_part(&radial_boundary(h, 1.0, m)?);
        min_eigs.push(cmatrix::min_eig_hermitian(&u)?);
    }
    let positive = min_eigs.iter().all(|&l| l >= -tol);
    Ok(PositivityReport { m_max, min_eigs, tol, positive })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientBoundReport {
    pub a0_norm: f64,
    /// `||sum_{|alpha|=k} A_alpha^* A_alpha||^{1/2}` for `k = 1..=cutoff`.
    pub per_degree: Vec<f64>,
    pub tol: f64,
    pub holds: bool,
}

pub fn coefficient_bound_check(h: &PluriharmonicFn, tol: f64) -> Result<CoefficientBoundReport> {
    h.require_selfadjoint()?;
    let p = h.dim();
    let mut grams = vec![zeros(p, p); h.cutoff() + 1];
    for (w, a) in h.analytic.coeffs() {
        grams[w.len()] += a.adjoint() * a;
    }
    let a0_norm = cmatrix::operator_norm(&h.a0());
    let per_degree: Vec<f64> = grams.iter().skip(1).map(|g| cmatrix::operator_norm(g).sqrt()).collect();
    let holds = per_degree.iter().all(|&v| v <= a0_norm + tol);
    Ok(CoefficientBoundReport { a0_norm, per_degree, tol, holds })
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnackReport {
    pub r: f64,
    pub bound: f64,
    pub values: Vec<f64>,
    pub tol: f64,
    pub holds: bool,
}

/// `||u(X)|| <= ||u(0)|| (1 + r)/(1 - r)` on nilpotent samples with `||X|| <= r`.
/// Positivity of `h` is verified first up to `m_max`.
pub fn harnack_check(
    h: &PluriharmonicFn,
    samples: &[OperatorTuple],
    r: f64,
    m_max: usize,
    tol: f64,
) -> Result<HarnackReport> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Hypothesis(format!("radius {r} outside [0, 1)")));
    }
    let pos = check_positive(h, m_max, tol)?;
    if !pos.positive {
        return Err(Error::Hypothesis("function is not positive".into()));
    }
    let bound = cmatrix::operator_norm(&h.a0()) * (1.0 + r) / (1.0 - r);
    let mut values = Vec::with_capacity(samples.len());
    for x in samples {
        if x.row_norm() > r + 1e-12 {
            return Err(Error::Hypothesis(format!("sample norm {} exceeds r = {r}", x.row_norm())));
        }
        let e = eval(h, x)?;
        if e.tail_estimate != 0.0 {
            return Err(Error::Hypothesis("samples must be nilpotent".into()));
        }
        values.push(cmatrix::operator_norm(&e.value));
    }
    let holds = values.iter().all(|&v| v <= bound + tol);
    Ok(HarnackReport { r, bound, values, tol, holds })
}

#[derive(Clone, Debug, Serialize)]
pub struct MeanValueReport {
    pub value_norm: f64,
    pub discrepancy: f64,
    pub holds: bool,
}

/// Compares `u(X)` with the Poisson transform of `u(r S^(N))` at `X / r`.
pub fn mean_value_check(h: &PluriharmonicFn, x: &OperatorTuple, r: f64, depth: usize) -> Result<MeanValueReport> {
    if !(0.0..1.0).contains(&r) || x.row_norm() >= r {
        return Err(Error::Hypothesis(format!("need ||X|| = {} < r = {r} < 1", x.row_norm())));
    }
    let jsr = series::jsr_estimate(x, x.dim().max(1));
    let Some(nu) = jsr.nilpotent_order else {
        return Err(Error::ExactnessZone("argument is not nilpotent".into()));
    };
    if depth < nu + h.cutoff() {
        return Err(Error::ExactnessZone(format!(
            "truncation {depth} below nilpotent order {nu} + cutoff {}",
            h.cutoff()
        )));
    }
    let ft = FockTrunc::new(h.n(), depth)?;
    let lhs = eval(h, x)?.value;
    let boundary = radial_boundary(h, r, depth)?;
    let rhs = fock::poisson_transform(&ft, &boundary, &x.scaled(1.0 / r))?;
    let value_norm = cmatrix::operator_norm(&lhs);
    let discrepancy = cmatrix::operator_norm(&(&lhs - rhs));
    Ok(MeanValueReport { value_norm, discrepancy, holds: discrepancy <= 1e-9 * (1.0 + value_norm) })
}

/// Multi-Toeplitz relations `R_i^* A R_j = delta_ij A` on the degree `<= N - margin` zone.
pub fn is_multi_toeplitz(a: &CMatrix, ft: &FockTrunc, margin: usize, tol: f64) -> Result<bool> {
    if margin == 0 || margin > ft.depth() {
        return Err(Error::Degree { degree: margin, max: ft.depth() });
    }
    let dim = ft.dim();
    if !a.is_square() || !a.nrows().is_multiple_of(dim) {
        return Err(Error::Shape(format!("{:?} does not act on C^p (x) P^({})", a.shape(), ft.depth())));
    }
    let p = a.nrows() / dim;
    let q = kron(&identity(p), &ft.degree_projection(ft.depth() - margin)?)?;
    for i in 1..=ft.n() {
        let ri = kron(&identity(p), ft.right_creation(i)?)?;
        for j in 1..=ft.n() {
            let rj = kron(&identity(p), ft.right_creation(j)?)?;
            let mut d = ri.adjoint() * a * rj;
            if i == j {
                d -= a;
            }
            if cmatrix::operator_norm(&(&q * d * &q)) > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxMinReport {
    pub nonconstant: bool,
    pub samples: usize,
    /// Samples where `u(X) <= u(0) (x) I` fails by more than `tol`.
    pub exceeding: usize,
    pub consistent: bool,
}

/// Sampled necessary condition of the maximum principle: a nonconstant
/// positive `h` cannot satisfy `u(X) <= u(0)` at every sample. Statistical only.
pub fn max_principle_spot_check(h: &PluriharmonicFn, samples: &[OperatorTuple], tol: f64) -> Result<MaxMinReport> {
    let nonconstant = h
        .analytic
        .coeffs()
        .iter()
        .chain(h.coanalytic_adj.coeffs())
        .any(|(w, c)| !w.is_empty() && cmatrix::max_abs(c) > tol);
    let mut exceeding = 0;
    for x in samples {
        let u = eval(h, x)?.value;
        let base = kron(&h.a0(), &identity(x.dim()))?;
        let gap = cmatrix::hermitian_part(&(base - u));
        if cmatrix::min_eig_hermitian(&gap)? < -tol {
            exceeding += 1;
        }
    }
    let consistent = !nonconstant || exceeding > 0;
    Ok(MaxMinReport { nonconstant, samples: samples.len(), exceeding, consistent })
}
