//! Caratheodory interpolation: feasibility of prescribed coefficients
//! `{b_alpha}_{|alpha| <= m}`, extension to higher degree by Dykstra's
//! alternating projections, the Cayley reductions to and from the
//! Caratheodory-Fejer problem, and independent verification of solutions.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cmatrix::{self, identity, zeros, CMatrix};
use crate::error::{Error, Result};
use crate::fock::{FockTrunc, OperatorTuple};
use crate::freeword::{GradedBasis, Word};
use crate::pluriharmonic::{coefficient_bound_check, real_part};
use crate::series::{self, eval_at_creation, extract_coeffs, truncated_cayley, Direction, FreeSeries};
use crate::testing;
use crate::toeplitz::{assemble_t, project_affine, OrbitStructure};
use crate::transforms::{put_block, MomentFunctional};

/// Prescribed data `b_alpha`, `|alpha| <= m`, with `b_0` Hermitian positive semidefinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemJson", into = "ProblemJson")]
pub struct CaratheodoryProblem {
    n: usize,
    m: usize,
    p: usize,
    coeffs: BTreeMap<Word, CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct ProblemJson {
    n: usize,
    m: usize,
    block_size: usize,
    #[serde(with = "cmatrix::json::map")]
    coefficients: BTreeMap<Word, CMatrix>,
}

impl TryFrom<ProblemJson> for CaratheodoryProblem {
    type Error = Error;

    fn try_from(j: ProblemJson) -> Result<Self> {
        let prob = CaratheodoryProblem::new(j.n, j.m, j.coefficients)?;
        if prob.p != j.block_size {
            return Err(Error::Input(format!("block_size {} but b_0 is {}x{}", j.block_size, prob.p, prob.p)));
        }
        Ok(prob)
    }
}

impl From<CaratheodoryProblem> for ProblemJson {
    fn from(p: CaratheodoryProblem) -> Self {
        ProblemJson { n: p.n, m: p.m, block_size: p.p, coefficients: p.coeffs }
    }
}

fn check_coeff_words(n: usize, m: usize, p: usize, coeffs: &BTreeMap<Word, CMatrix>) -> Result<()> {
    if !(1..=crate::freeword::MAX_GENERATORS).contains(&n) {
        return Err(Error::GeneratorCount(n));
    }
    for (w, c) in coeffs {
        w.check(n)?;
        if w.len() > m {
            return Err(Error::Degree { degree: w.len(), max: m });
        }
        if c.shape() != (p, p) {
            return Err(Error::Shape(format!("coefficient {w:?} has shape {:?}, expected {p}x{p}", c.shape())));
        }
    }
    Ok(())
}

impl CaratheodoryProblem {
    pub fn new(n: usize, m: usize, coeffs: BTreeMap<Word, CMatrix>) -> Result<Self> {
        let b0 = coeffs.get(&Word::empty()).ok_or_else(|| Error::Input("missing b_0".into()))?;
        cmatrix::require_hermitian(b0)?;
        let p = b0.nrows();
        check_coeff_words(n, m, p, &coeffs)?;
        let low = cmatrix::min_eig_hermitian(b0)?;
        if low < -1e-12 {
            return Err(Error::Input(format!("b_0 is not positive semidefinite (min eigenvalue {low:.3e})")));
        }
        Ok(CaratheodoryProblem { n, m, p, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn block_size(&self) -> usize {
        self.p
    }

    pub fn coeffs(&self) -> &BTreeMap<Word, CMatrix> {
        &self.coeffs
    }

    pub fn coeff(&self, w: &Word) -> CMatrix {
        self.coeffs.get(w).cloned().unwrap_or_else(|| zeros(self.p, self.p))
    }

    pub fn b0(&self) -> &CMatrix {
        &self.coeffs[&Word::empty()]
    }

    /// `g = b_0/2 + sum b_alpha Z_alpha`.
    pub fn symbol(&self) -> Result<FreeSeries> {
        symbol_of(self.n, self.m, self.p, &self.coeffs)
    }
}

fn symbol_of(n: usize, cutoff: usize, p: usize, coeffs: &BTreeMap<Word, CMatrix>) -> Result<FreeSeries> {
    let mut g = FreeSeries::from_coeffs(n, cutoff, (p, p), coeffs.clone())?;
    let half = g.constant().scale(0.5);
    g.set(Word::empty(), half)?;
    Ok(g)
}

/// Caratheodory-Fejer data `A_alpha`, `|alpha| <= m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemJson", into = "ProblemJson")]
pub struct CFProblem {
    n: usize,
    m: usize,
    p: usize,
    coeffs: BTreeMap<Word, CMatrix>,
}

impl TryFrom<ProblemJson> for CFProblem {
    type Error = Error;

    fn try_from(j: ProblemJson) -> Result<Self> {
        CFProblem::new(j.n, j.m, j.block_size, j.coefficients)
    }
}

impl From<CFProblem> for ProblemJson {
    fn from(p: CFProblem) -> Self {
        ProblemJson { n: p.n, m: p.m, block_size: p.p, coefficients: p.coeffs }
    }
}

impl CFProblem {
    pub fn new(n: usize, m: usize, p: usize, coeffs: BTreeMap<Word, CMatrix>) -> Result<Self> {
        check_coeff_words(n, m, p, &coeffs)?;
        Ok(CFProblem { n, m, p, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn block_size(&self) -> usize {
        self.p
    }

    pub fn coeffs(&self) -> &BTreeMap<Word, CMatrix> {
        &self.coeffs
    }

    pub fn coeff(&self, w: &Word) -> CMatrix {
        self.coeffs.get(w).cloned().unwrap_or_else(|| zeros(self.p, self.p))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub min_eig: f64,
    pub matrix_dim: usize,
    pub tol: f64,
}

/// Feasible iff `T_m >= -tol`.
pub fn check_feasibility(prob: &CaratheodoryProblem, tol: f64) -> Result<FeasibilityReport> {
    let t = assemble_t(prob.n, prob.m, &prob.coeffs)?;
    let min_eig = t.min_eig()?;
    Ok(FeasibilityReport { feasible: min_eig >= -tol, min_eig, matrix_dim: t.entries().nrows(), tol })
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    /// Minimum eigenvalue of a freshly assembled `T_M`.
    pub min_eig_tm: f64,
    pub iterations: usize,
    /// Frobenius distance of the final multi-Toeplitz iterate to the PSD cone.
    pub proj_residual: f64,
    pub prescribed_error: f64,
    pub slack: f64,
    /// Steps where the distance between consecutive affine iterates grew.
    pub monotone_violations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionResult {
    pub target_degree: usize,
    #[serde(serialize_with = "cmatrix::json::map::serialize")]
    pub coeffs: BTreeMap<Word, CMatrix>,
    pub certificate: Certificate,
}

impl ExtensionResult {
    pub fn coeff(&self, w: &Word) -> Option<&CMatrix> {
        self.coeffs.get(w)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ExtendOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// PSD floor used during the iteration; default `max(tol, 1e-9 ||b_0||)`.
    pub slack: Option<f64>,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        ExtendOptions { tol: 1e-9, max_iter: 5000, slack: None }
    }
}

/// Distance of a Hermitian matrix to the PSD cone, and its minimum eigenvalue.
fn psd_gap(a: &CMatrix) -> Result<(f64, f64)> {
    let eig = cmatrix::hermitian_eig(a)?;
    let gap = eig.eigenvalues.iter().filter(|&&l| l < 0.0).map(|l| l * l).sum::<f64>().sqrt();
    Ok((gap, eig.eigenvalues.first().copied().unwrap_or(0.0)))
}

/// Extends the data to degree `target` with `T_target >= 0` by Dykstra's
/// algorithm between the PSD cone (floor `slack`) and the multi-Toeplitz
/// affine set with the prescribed coefficients fixed.
pub fn extend(prob: &CaratheodoryProblem, target: usize, opts: &ExtendOptions) -> Result<ExtensionResult> {
    if target <= prob.m {
        return Err(Error::Input(format!("target degree {target} must exceed m = {}", prob.m)));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Input("tolerance must be positive".into()));
    }
    let feas = check_feasibility(prob, opts.tol)?;
    if !feas.feasible {
        return Err(Error::Infeasible(feas.min_eig));
    }
    let b0_norm = cmatrix::operator_norm(prob.b0());
    let slack = opts.slack.unwrap_or_else(|| opts.tol.max(1e-9 * b0_norm));
    let structure = OrbitStructure::new(prob.n, target, prob.m)?;
    let p = prob.p;

    let mut x = structure.assemble(&prob.coeffs, p);
    let mut corr = zeros(x.nrows(), x.ncols());
    let (mut residual, _) = psd_gap(&x)?;
    let mut iterations = 0;
    let mut prev_step = f64::INFINITY;
    let mut monotone_violations = 0;
    while residual > opts.tol {
        if iterations == opts.max_iter {
            return Err(Error::NoConvergence { iterations, residual });
        }
        iterations += 1;
        let shifted = &x + &corr;
        let y = cmatrix::psd_project(&shifted, slack)?;
        corr = shifted - &y;
        let next = project_affine(&y, &structure, &prob.coeffs)?;
        let step = cmatrix::frobenius(&(&next - &x));
        if step > prev_step * (1.0 + 1e-9) + 1e-15 {
            monotone_violations += 1;
        }
        prev_step = step;
        x = next;
        residual = psd_gap(&x)?.0;
    }

    let mut coeffs = structure.orbit_averages(&x)?;
    for w in structure.prescribed_words() {
        coeffs.insert(w.clone(), prob.coeff(w));
    }
    let prescribed_error = structure
        .prescribed_words()
        .map(|w| cmatrix::max_abs(&(&coeffs[w] - prob.coeff(w))))
        .fold(0.0, f64::max);
    let min_eig_tm = assemble_t(prob.n, target, &coeffs)?.min_eig()?;
    if min_eig_tm < -opts.tol {
        return Err(Error::NoConvergence { iterations, residual: -min_eig_tm });
    }
    Ok(ExtensionResult {
        target_degree: target,
        coeffs,
        certificate: Certificate {
            min_eig_tm,
            iterations,
            proj_residual: residual,
            prescribed_error,
            slack,
            monotone_violations,
        },
    })
}

/// Output of [`cayley_route`].
#[derive(Clone, Debug)]
pub struct CayleyRoute {
    pub cf: CFProblem,
    /// `||X||` for `X = Y (I + Y)^{-1}`; at most one for feasible data.
    pub contraction_norm: f64,
    /// Regularization added to `b_0`, zero when `b_0` is invertible.
    pub reg_eps: f64,
}

/// Normalizes by `b_0^{-1/2}`, forms `Y = sum c_alpha (x) S_alpha^(m)` and
/// returns the coefficients of the inverse Cayley transform `Y (I + Y)^{-1}`.
/// `reg_eps` (default `1e-10 (1 + ||b_0||)`) is used only when `b_0` is
/// numerically singular.
pub fn cayley_route(prob: &CaratheodoryProblem, reg_eps: Option<f64>) -> Result<CayleyRoute> {
    let feas = check_feasibility(prob, 1e-9)?;
    if !feas.feasible {
        return Err(Error::Infeasible(feas.min_eig));
    }
    let b0 = prob.b0();
    let b0_norm = cmatrix::operator_norm(b0);
    let singular = cmatrix::min_eig_hermitian(b0)? <= 1e-10 * (1.0 + b0_norm);
    let eps = if singular { reg_eps.unwrap_or(1e-10 * (1.0 + b0_norm)) } else { 0.0 };
    let norm = cmatrix::pd_inv_sqrt(&(b0 + identity(prob.p).scale(eps)))?;
    let mut normalized = BTreeMap::new();
    for (w, c) in &prob.coeffs {
        if !w.is_empty() {
            normalized.insert(w.clone(), &norm * c * &norm);
        }
    }
    let ft = FockTrunc::new(prob.n, prob.m)?;
    let y = eval_at_creation(&FreeSeries::from_coeffs(prob.n, prob.m, (prob.p, prob.p), normalized)?, prob.m)?;
    let x = truncated_cayley(&y, &ft, Direction::Inverse)?;
    let contraction_norm = cmatrix::operator_norm(&x);
    let coeffs = extract_coeffs(&x, &ft)?.analytic.into_iter().filter(|(w, _)| !w.is_empty()).collect();
    Ok(CayleyRoute { cf: CFProblem::new(prob.n, prob.m, prob.p, coeffs)?, contraction_norm, reg_eps: eps })
}

#[derive(Clone, Debug, Serialize)]
pub struct CFReport {
    pub norm: f64,
    pub contractive: bool,
    /// The assembled matrix agrees with the word-reversal conjugate of `sum A_alpha (x) S_alpha^(m)`.
    pub consistent: bool,
    pub tol: f64,
}

/// `A_m` with block `(gamma, beta) = A_{reverse(gamma \_l beta)}`, i.e. `sum A_s (x) R_s^(m)`.
pub fn cf_matrix(prob: &CFProblem) -> Result<CMatrix> {
    let basis = GradedBasis::enumerate(prob.n, prob.m)?;
    let dim = basis.len();
    let p = prob.p;
    cmatrix::check_size(dim * p, dim * p)?;
    let mut a = zeros(dim * p, dim * p);
    for (s, c) in &prob.coeffs {
        let Some(si) = basis.index_of(&s.reverse()) else { continue };
        for beta in 0..dim {
            if let Some(gamma) = basis.concat_index(beta, si) {
                put_block(&mut a, dim, gamma, beta, c);
            }
        }
    }
    Ok(a)
}

pub fn cf_check(prob: &CFProblem, tol: f64) -> Result<CFReport> {
    let a = cf_matrix(prob)?;
    let basis = GradedBasis::enumerate(prob.n, prob.m)?;
    let dim = basis.len();
    let s_form = eval_at_creation(&FreeSeries::from_coeffs(prob.n, prob.m, (prob.p, prob.p), prob.coeffs.clone())?, prob.m)?;
    let flip: Vec<usize> = basis.words().iter().map(|w| basis.index_of(&w.reverse()).expect("closed under reversal")).collect();
    let mut consistent = true;
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            let (s, gi) = (r / dim, r % dim);
            let (t, bi) = (c / dim, c % dim);
            if (a[(r, c)] - s_form[(s * dim + flip[gi], t * dim + flip[bi])]).norm() > 1e-14 {
                consistent = false;
            }
        }
    }
    let norm = cmatrix::operator_norm(&a);
    Ok(CFReport { norm, contractive: norm <= 1.0 + tol, consistent, tol })
}

/// Forms `B = sum A_alpha (x) S_{g_1 alpha}^(m+1)` and returns the Caratheodory
/// data `b_0 = I`, `b_sigma` = coefficients of `B (I - B)^{-1}`.
pub fn cf_to_caratheodory(prob: &CFProblem, tol: f64) -> Result<CaratheodoryProblem> {
    let rep = cf_check(prob, tol)?;
    if !rep.contractive {
        return Err(Error::Hypothesis(format!("CF norm {} exceeds 1", rep.norm)));
    }
    let depth = prob.m + 1;
    let mut shifted = BTreeMap::new();
    for (w, c) in &prob.coeffs {
        shifted.insert(w.prepend(1), c.clone());
    }
    let ft = FockTrunc::new(prob.n, depth)?;
    let b = eval_at_creation(&FreeSeries::from_coeffs(prob.n, depth, (prob.p, prob.p), shifted)?, depth)?;
    let y = truncated_cayley(&b, &ft, Direction::Forward)?;
    let mut coeffs: BTreeMap<Word, CMatrix> = extract_coeffs(&y, &ft)?.analytic.into_iter().filter(|(w, _)| !w.is_empty()).collect();
    coeffs.insert(Word::empty(), identity(prob.p));
    CaratheodoryProblem::new(prob.n, depth, coeffs)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub prescribed_error: f64,
    pub min_eig_tm: f64,
    /// Minimum over samples of the smallest eigenvalue of `Re g(X)`.
    pub min_re_g: f64,
    pub coefficient_bound: bool,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Independent checks of an extension: prescribed data, fresh `T_M`,
/// `Re g(X) >= -tol` on random nilpotent contractions, and the coefficient bound.
pub fn verify_solution(
    prob: &CaratheodoryProblem,
    ext: &ExtensionResult,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let big_m = ext.target_degree;
    let mut failures = Vec::new();

    let mut prescribed_error: f64 = 0.0;
    for w in GradedBasis::enumerate(prob.n, prob.m)?.words() {
        let got = ext.coeffs.get(w).cloned().unwrap_or_else(|| zeros(prob.p, prob.p));
        prescribed_error = prescribed_error.max(cmatrix::max_abs(&(got - prob.coeff(w))));
    }
    if prescribed_error != 0.0 {
        failures.push(format!("prescribed coefficients differ by {prescribed_error:.3e}"));
    }

    let min_eig_tm = assemble_t(prob.n, big_m, &ext.coeffs)?.min_eig()?;
    if min_eig_tm < -tol {
        failures.push(format!("T_M has eigenvalue {min_eig_tm:.6e}"));
    }

    let g = symbol_of(prob.n, big_m, prob.p, &ext.coeffs)?;
    let mut rng = testing::rng(seed);
    let mut min_re_g = f64::INFINITY;
    for _ in 0..samples {
        let norm = rng.random_range(0.3..0.999);
        let x: OperatorTuple = testing::random_nilpotent_tuple(&mut rng, prob.n, big_m + 1, norm);
        let v = series::eval_at(&g, &x)?.value;
        min_re_g = min_re_g.min(cmatrix::min_eig_hermitian(&cmatrix::hermitian_part(&v))?);
    }
    if min_re_g < -tol {
        failures.push(format!("Re g(X) has eigenvalue {min_re_g:.6e}"));
    }

    let coefficient_bound = coefficient_bound_check(&real_part(&g)?, tol)?.holds;
    if !coefficient_bound {
        failures.push("coefficient bound violated".into());
    }
    Ok(VerificationReport {
        prescribed_error,
        min_eig_tm,
        min_re_g,
        coefficient_bound,
        passed: failures.is_empty(),
        failures,
    })
}

/// Scalar data as moments: `nu(I) = b_0`, `nu(R_{~alpha}) = conj(b_alpha)`,
/// `nu(R_{~alpha}^*) = b_alpha`; its Poisson transform is `2 Re g`.
pub fn moment_problem_view(prob: &CaratheodoryProblem) -> Result<MomentFunctional> {
    if prob.p != 1 {
        return Err(Error::Unsupported("moment view is defined for scalar data only".into()));
    }
    let mut forward = BTreeMap::new();
    let mut backward = BTreeMap::new();
    for (w, c) in &prob.coeffs {
        if w.is_empty() {
            continue;
        }
        forward.insert(w.reverse(), c.adjoint());
        backward.insert(w.reverse(), c.clone());
    }
    MomentFunctional::new(prob.n, prob.m, prob.b0().clone(), forward, backward)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::{c64, max_abs, real, scalar};
    use crate::testing::{random_matrix, rng};
    use crate::transforms::poisson_transform_of;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn scalar_problem(n: usize, m: usize, data: &[(&str, f64)]) -> CaratheodoryProblem {
        let coeffs = data.iter().map(|(k, v)| (w(k), scalar(real(*v)))).collect();
        CaratheodoryProblem::new(n, m, coeffs).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        let r = check_feasibility(&scalar_problem(1, 1, &[("", 2.0), ("1", 1.0)]), 1e-9).unwrap();
        assert!(r.feasible && (r.min_eig - 1.0).abs() < 1e-12);
        let r = check_feasibility(&scalar_problem(1, 1, &[("", 2.0), ("1", 3.0)]), 1e-9).unwrap();
        assert!(!r.feasible && (r.min_eig + 1.0).abs() < 1e-12);
        let r = check_feasibility(&scalar_problem(2, 1, &[("", 1.0), ("1", 0.5), ("2", 0.5)]), 1e-9).unwrap();
        assert!(r.feasible && (r.min_eig - (1.0 - 0.5 * 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(r.matrix_dim, 3);
    }

    #[test]
    fn malformed_problems_are_rejected() {
        let bad = |n, m, data: &[(&str, f64)]| {
            CaratheodoryProblem::new(n, m, data.iter().map(|(k, v)| (w(k), scalar(real(*v)))).collect())
        };
        assert!(bad(2, 1, &[("", 1.0), ("3", 0.1)]).is_err());
        assert!(bad(2, 1, &[("1", 0.1)]).is_err());
        assert!(bad(2, 1, &[("", -1.0)]).is_err());
        assert!(bad(2, 1, &[("", 1.0), ("12", 0.1)]).is_err());
        let text = r#"{"n":2,"m":1,"block_size":1,"coefficients":{"":[[[1,0]]],"3":[[[0.1,0]]]}}"#;
        assert!(serde_json::from_str::<CaratheodoryProblem>(text).is_err());
    }

    #[test]
    fn extension_of_trivial_data_is_zero() {
        let prob = CaratheodoryProblem::new(2, 1, [(Word::empty(), identity(2))].into()).unwrap();
        let ext = extend(&prob, 3, &ExtendOptions::default()).unwrap();
        assert_eq!(ext.certificate.iterations, 0);
        assert!(ext.coeffs.iter().filter(|(w, _)| !w.is_empty()).all(|(_, c)| max_abs(c) == 0.0));
        assert!((ext.certificate.min_eig_tm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_extension() {
        let prob = scalar_problem(1, 1, &[("", 1.0), ("1", 0.5)]);
        let ext = extend(&prob, 3, &ExtendOptions::default()).unwrap();
        assert!(ext.certificate.min_eig_tm >= -1e-8);
        assert_eq!(ext.certificate.prescribed_error, 0.0);
        assert_eq!(ext.coeffs[&w("1")], scalar(real(0.5)));
        let rep = verify_solution(&prob, &ext, 20, 7, 1e-8).unwrap();
        assert!(rep.passed, "{:?}", rep.failures);

        // the geometric choice is itself a certificate of nonemptiness
        let geo = scalar_problem(1, 3, &[("", 1.0), ("1", 0.5), ("11", 0.25), ("111", 0.125)]);
        assert!(check_feasibility(&geo, 0.0).unwrap().feasible);
    }

    #[test]
    fn extension_errors() {
        let infeasible = scalar_problem(1, 1, &[("", 2.0), ("1", 3.0)]);
        assert!(matches!(extend(&infeasible, 3, &ExtendOptions::default()), Err(Error::Infeasible(_))));
        let prob = scalar_problem(2, 1, &[("", 1.0), ("1", 0.6), ("2", 0.6)]);
        let opts = ExtendOptions { max_iter: 1, ..Default::default() };
        assert!(matches!(extend(&prob, 3, &opts), Err(Error::NoConvergence { .. })));
        assert!(extend(&prob, 1, &ExtendOptions::default()).is_err());
    }

    #[test]
    fn near_boundary_extension_converges() {
        let prob = scalar_problem(2, 1, &[("", 1.0), ("1", 0.6), ("2", 0.6)]);
        let ext = extend(&prob, 3, &ExtendOptions::default()).unwrap();
        assert!(ext.certificate.min_eig_tm >= -1e-9);
        assert_eq!(ext.certificate.monotone_violations, 0);
        assert!(verify_solution(&prob, &ext, 20, 3, 1e-8).unwrap().passed);
    }

    #[test]
    fn corrupted_extension_is_flagged() {
        let prob = scalar_problem(1, 1, &[("", 1.0), ("1", 0.5)]);
        let mut coeffs = BTreeMap::new();
        for k in 0..=3 {
            coeffs.insert(Word::from_letters(std::iter::repeat_n(1, k)).unwrap(), scalar(real(0.5f64.powi(k as i32))));
        }
        let good = ExtensionResult {
            target_degree: 3,
            coeffs: coeffs.clone(),
            certificate: Certificate {
                min_eig_tm: 0.0,
                iterations: 0,
                proj_residual: 0.0,
                prescribed_error: 0.0,
                slack: 0.0,
                monotone_violations: 0,
            },
        };
        assert!(verify_solution(&prob, &good, 20, 1, 1e-9).unwrap().passed);
        let mut bad = good.clone();
        bad.coeffs.insert(w("111"), scalar(real(-1.0)));
        let rep = verify_solution(&prob, &bad, 20, 1, 1e-9).unwrap();
        assert!(!rep.passed);
        assert!(rep.min_eig_tm < 0.0);
    }

    #[test]
    fn cayley_route_examples() {
        let trivial = CaratheodoryProblem::new(2, 2, [(Word::empty(), identity(2))].into()).unwrap();
        let r = cayley_route(&trivial, None).unwrap();
        assert!(r.cf.coeffs().values().all(|c| max_abs(c) == 0.0));

        let prob = scalar_problem(2, 1, &[("", 4.0), ("1", 0.5), ("2", -0.5)]);
        let r = cayley_route(&prob, None).unwrap();
        assert!((r.cf.coeff(&w("1"))[(0, 0)].re - 0.125).abs() < 1e-15);
        assert!((r.cf.coeff(&w("2"))[(0, 0)].re + 0.125).abs() < 1e-15);

        // n = 1, m = 2: compare with an explicit matrix inverse
        let prob = scalar_problem(1, 2, &[("", 1.0), ("1", 0.5)]);
        let r = cayley_route(&prob, None).unwrap();
        let y = crate::cmatrix::from_real_rows(&[&[0.0, 0.0, 0.0], &[0.5, 0.0, 0.0], &[0.0, 0.5, 0.0]]);
        let x = &y * cmatrix::solve(&(identity(3) + &y), &identity(3)).unwrap();
        assert!((r.cf.coeff(&w("1"))[(0, 0)] - x[(1, 0)]).norm() < 1e-14);
        assert!((r.cf.coeff(&w("11"))[(0, 0)] - x[(2, 0)]).norm() < 1e-14);
        assert!(r.contraction_norm <= 1.0 + 1e-9);

        assert!(matches!(cayley_route(&scalar_problem(1, 1, &[("", 2.0), ("1", 3.0)]), None), Err(Error::Infeasible(_))));
    }

    #[test]
    fn cayley_route_of_singular_b0_is_regularized() {
        let mut b0 = identity(2);
        b0[(1, 1)] = real(0.0);
        let prob = CaratheodoryProblem::new(1, 1, [(Word::empty(), b0)].into()).unwrap();
        let r = cayley_route(&prob, None).unwrap();
        assert!(r.reg_eps > 0.0);
    }

    #[test]
    fn cf_check_examples() {
        let zero = CFProblem::new(2, 2, 1, BTreeMap::new()).unwrap();
        assert_eq!(cf_check(&zero, 1e-9).unwrap().norm, 0.0);

        let c = c64(0.3, 0.4);
        let single = CFProblem::new(2, 1, 1, [(w("1"), scalar(c))].into()).unwrap();
        let rep = cf_check(&single, 1e-9).unwrap();
        assert!((rep.norm - 0.5).abs() < 1e-14 && rep.consistent);

        let geo = CFProblem::new(
            1,
            2,
            1,
            [(Word::empty(), scalar(real(1.0))), (w("1"), scalar(real(0.5))), (w("11"), scalar(real(0.25)))].into(),
        )
        .unwrap();
        let lower = crate::cmatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.5, 1.0, 0.0], &[0.25, 0.5, 1.0]]);
        let rep = cf_check(&geo, 1e-9).unwrap();
        assert!((rep.norm - cmatrix::operator_norm(&lower)).abs() < 1e-12);
        assert_eq!(cf_matrix(&geo).unwrap(), lower);
    }

    #[test]
    fn cf_matrix_differs_from_literal_pattern_but_is_consistent() {
        let mut g = rng(60);
        let coeffs: BTreeMap<Word, CMatrix> =
            GradedBasis::enumerate(2, 2).unwrap().words().iter().map(|w| (w.clone(), random_matrix(&mut g, 2, 2))).collect();
        let prob = CFProblem::new(2, 2, 2, coeffs).unwrap();
        let rep = cf_check(&prob, 1e-9).unwrap();
        assert!(rep.consistent);
        let s_form = eval_at_creation(&FreeSeries::from_coeffs(2, 2, (2, 2), prob.coeffs().clone()).unwrap(), 2).unwrap();
        assert!((rep.norm - cmatrix::operator_norm(&s_form)).abs() < 1e-10);
    }

    #[test]
    fn cf_to_caratheodory_examples() {
        let zero = CFProblem::new(2, 1, 1, BTreeMap::new()).unwrap();
        let prob = cf_to_caratheodory(&zero, 1e-9).unwrap();
        assert_eq!(*prob.b0(), identity(1));
        assert!(prob.coeffs().iter().filter(|(w, _)| !w.is_empty()).all(|(_, c)| max_abs(c) == 0.0));

        let a = scalar(c64(0.3, -0.6));
        let single = CFProblem::new(1, 0, 1, [(Word::empty(), a.clone())].into()).unwrap();
        let prob = cf_to_caratheodory(&single, 1e-9).unwrap();
        assert_eq!(prob.coeff(&w("1")), a);

        let big = CFProblem::new(1, 0, 1, [(Word::empty(), scalar(real(1.5)))].into()).unwrap();
        assert!(cf_to_caratheodory(&big, 1e-9).is_err());
    }

    #[test]
    fn reduction_round_trip() {
        let mut g = rng(61);
        for trial in 0..10 {
            let (n, m) = (1 + trial % 2, trial % 3);
            let coeffs: BTreeMap<Word, CMatrix> =
                GradedBasis::enumerate(n, m).unwrap().words().iter().map(|w| (w.clone(), random_matrix(&mut g, 2, 2))).collect();
            let raw = CFProblem::new(n, m, 2, coeffs).unwrap();
            let norm = cf_check(&raw, 0.0).unwrap().norm;
            let scaled: BTreeMap<Word, CMatrix> = raw.coeffs().iter().map(|(w, c)| (w.clone(), c.scale(0.9 / norm))).collect();
            let cf = CFProblem::new(n, m, 2, scaled).unwrap();
            let cara = cf_to_caratheodory(&cf, 1e-9).unwrap();
            assert!(check_feasibility(&cara, 1e-12).unwrap().feasible);
            let back = cayley_route(&cara, None).unwrap();
            assert!(back.contraction_norm <= 1.0 + 1e-9);
            for word in GradedBasis::enumerate(n, m + 1).unwrap().words().iter().skip(1) {
                let expect = match word.left_quotient(&w("1")) {
                    Some(rest) => cf.coeff(&rest),
                    None if *word == w("1") => cf.coeff(&Word::empty()),
                    None => zeros(2, 2),
                };
                assert!(max_abs(&(back.cf.coeff(word) - expect)) < 1e-10);
            }
        }
    }

    #[test]
    fn moment_view_examples() {
        let prob = CaratheodoryProblem::new(1, 1, [(Word::empty(), scalar(real(1.0))), (w("1"), scalar(c64(0.0, 1.0)))].into())
            .unwrap();
        let nu = moment_problem_view(&prob).unwrap();
        assert_eq!(nu.forward(&w("1"))[(0, 0)], c64(0.0, -1.0));

        let zero = scalar_problem(2, 2, &[("", 1.0)]);
        let nu = moment_problem_view(&zero).unwrap();
        assert_eq!(*nu.unit(), scalar(real(1.0)));
        assert_eq!(max_abs(&nu.forward(&w("12"))), 0.0);

        let mut g = rng(62);
        let coeffs: BTreeMap<Word, CMatrix> = GradedBasis::enumerate(2, 2)
            .unwrap()
            .words()
            .iter()
            .map(|w| (w.clone(), if w.is_empty() { scalar(real(3.0)) } else { random_matrix(&mut g, 1, 1) }))
            .collect();
        let prob = CaratheodoryProblem::new(2, 2, coeffs).unwrap();
        let nu = moment_problem_view(&prob).unwrap();
        let symbol = prob.symbol().unwrap();
        for _ in 0..5 {
            let x = testing::random_nilpotent_tuple(&mut g, 2, 3, 0.7);
            let lhs = poisson_transform_of(&nu, &x).unwrap();
            let rhs = cmatrix::hermitian_part(&series::eval_at(&symbol, &x).unwrap().value).scale(2.0);
            assert!(max_abs(&(lhs - rhs)) < 1e-12);
        }
        let block = CaratheodoryProblem::new(1, 0, [(Word::empty(), identity(2))].into()).unwrap();
        assert!(matches!(moment_problem_view(&block), Err(Error::Unsupported(_))));
    }

    #[test]
    fn classical_criterion_agrees() {
        let mut g = rng(63);
        for _ in 0..100 {
            let m = g.random_range(1..=5);
            let mut coeffs = BTreeMap::new();
            coeffs.insert(Word::empty(), scalar(real(g.random_range(0.0..2.0))));
            for k in 1..=m {
                coeffs.insert(Word::from_letters(std::iter::repeat_n(1, k)).unwrap(), scalar(testing::random_complex(&mut g) * 0.5));
            }
            let prob = CaratheodoryProblem::new(1, m, coeffs.clone()).unwrap();
            let t = CMatrix::from_fn(m + 1, m + 1, |i, j| {
                if i >= j {
                    coeffs[&Word::from_letters(std::iter::repeat_n(1, i - j)).unwrap()][(0, 0)]
                } else {
                    coeffs[&Word::from_letters(std::iter::repeat_n(1, j - i)).unwrap()][(0, 0)].conj()
                }
            });
            let classical = cmatrix::min_eig_hermitian(&t).unwrap() >= -1e-9;
            assert_eq!(check_feasibility(&prob, 1e-9).unwrap().feasible, classical);
        }
    }
}
