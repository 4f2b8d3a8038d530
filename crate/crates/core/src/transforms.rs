//! Moment functionals on the operator system spanned by `R_alpha`, `R_alpha^*`
//! and their Poisson, Herglotz and Fantappie transforms.
//!
//! Moments are keyed by the word `alpha` of the product `R_alpha = R_{i_1} ... R_{i_k}`;
//! note `R_alpha e_beta = e_{beta reverse(alpha)}`.

use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cmatrix::{self, c64, identity, kron, scalar, zeros, CMatrix, C64};
use crate::error::{Error, Result};
use crate::fock::{FockTrunc, OperatorTuple, VectorState};
use crate::freeword::{GradedBasis, Word};
use crate::pluriharmonic::{self, real_part, PluriharmonicFn};
use crate::series::{self, eval_at_creation, FreeSeries};
use crate::toeplitz::MultiToeplitzMatrix;

/// Vector-state data realizing a scalar functional on `P^(N)`.
#[derive(Clone, Debug)]
pub struct Realization {
    pub n: usize,
    pub depth: usize,
    pub states: Vec<VectorState>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "MomentJson", into = "MomentJson")]
pub struct MomentFunctional {
    n: usize,
    cutoff: usize,
    unit: CMatrix,
    forward: BTreeMap<Word, CMatrix>,
    backward: BTreeMap<Word, CMatrix>,
    realization: Option<Realization>,
}

#[derive(Serialize, Deserialize)]
struct MomentJson {
    n: usize,
    cutoff: usize,
    #[serde(with = "cmatrix::json")]
    unit: CMatrix,
    #[serde(with = "cmatrix::json::map")]
    forward: BTreeMap<Word, CMatrix>,
    #[serde(with = "cmatrix::json::map")]
    backward: BTreeMap<Word, CMatrix>,
}

impl TryFrom<MomentJson> for MomentFunctional {
    type Error = Error;

    fn try_from(j: MomentJson) -> Result<Self> {
        MomentFunctional::new(j.n, j.cutoff, j.unit, j.forward, j.backward)
    }
}

impl From<MomentFunctional> for MomentJson {
    fn from(m: MomentFunctional) -> Self {
        MomentJson { n: m.n, cutoff: m.cutoff, unit: m.unit, forward: m.forward, backward: m.backward }
    }
}

impl MomentFunctional {
    pub fn new(
        n: usize,
        cutoff: usize,
        unit: CMatrix,
        forward: BTreeMap<Word, CMatrix>,
        backward: BTreeMap<Word, CMatrix>,
    ) -> Result<Self> {
        if !(1..=crate::freeword::MAX_GENERATORS).contains(&n) {
            return Err(Error::GeneratorCount(n));
        }
        if !unit.is_square() {
            return Err(Error::Shape("unit moment must be square".into()));
        }
        for (w, c) in forward.iter().chain(&backward) {
            w.check(n)?;
            if w.is_empty() {
                return Err(Error::InvalidWord("the unit moment is stored separately".into()));
            }
            if w.len() > cutoff {
                return Err(Error::Degree { degree: w.len(), max: cutoff });
            }
            if c.shape() != unit.shape() {
                return Err(Error::Shape(format!("moment at {w:?} has shape {:?}", c.shape())));
            }
        }
        Ok(MomentFunctional { n, cutoff, unit, forward, backward, realization: None })
    }

    /// `A -> <A e_0, e_0>`, scalar.
    pub fn tau(n: usize, cutoff: usize) -> Self {
        MomentFunctional {
            n,
            cutoff,
            unit: identity(1),
            forward: BTreeMap::new(),
            backward: BTreeMap::new(),
            realization: None,
        }
    }

    /// `mu(A) = sum_k w_k <A xi_k, eta_k>` on `P^(N)`, with moments up to `cutoff`.
    /// Every vector must have degree `<= N - cutoff`.
    pub fn from_vector_states(ft: &FockTrunc, states: Vec<VectorState>, cutoff: usize) -> Result<Self> {
        if cutoff > ft.depth() {
            return Err(Error::ExactnessZone(format!("cutoff {cutoff} above truncation {}", ft.depth())));
        }
        let limit = ft.basis().dim_upto(ft.depth() - cutoff);
        for st in &states {
            if st.xi.len() != ft.dim() || st.eta.len() != ft.dim() {
                return Err(Error::Shape(format!("state vectors must have length {}", ft.dim())));
            }
            for v in [&st.xi, &st.eta] {
                if v.iter().skip(limit).any(|z| z.norm() > 0.0) {
                    return Err(Error::ExactnessZone(format!(
                        "state vector has degree above {}",
                        ft.depth() - cutoff
                    )));
                }
            }
        }
        let basis = ft.basis();
        let pair = |st: &VectorState, w: &Word, adjoint: bool| -> C64 {
            // <R_w xi, eta> with R_w e_b = e_{b reverse(w)}
            let shift = w.reverse();
            let Some(si) = basis.index_of(&shift) else { return c64(0.0, 0.0) };
            let mut acc = c64(0.0, 0.0);
            for b in 0..limit {
                let Some(t) = basis.concat_index(b, si) else { continue };
                if adjoint {
                    // <R_w^* xi, eta> = <xi, R_w eta>
                    acc += st.xi[t] * st.eta[b].conj();
                } else {
                    acc += st.xi[b] * st.eta[t].conj();
                }
            }
            acc * st.weight
        };
        let mut forward = BTreeMap::new();
        let mut backward = BTreeMap::new();
        let mut unit = c64(0.0, 0.0);
        for st in &states {
            unit += st.xi.dotc(&st.eta).conj() * st.weight;
        }
        for w in GradedBasis::enumerate(ft.n(), cutoff)?.words().iter().skip(1) {
            let f: C64 = states.iter().map(|st| pair(st, w, false)).sum();
            let b: C64 = states.iter().map(|st| pair(st, w, true)).sum();
            forward.insert(w.clone(), scalar(f));
            backward.insert(w.clone(), scalar(b));
        }
        let mut mu = Self::new(ft.n(), cutoff, scalar(unit), forward, backward)?;
        mu.realization = Some(Realization { n: ft.n(), depth: ft.depth(), states });
        Ok(mu)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.unit.nrows()
    }

    pub fn unit(&self) -> &CMatrix {
        &self.unit
    }

    /// `mu(R_alpha)`, zero when absent.
    pub fn forward(&self, w: &Word) -> CMatrix {
        self.forward.get(w).cloned().unwrap_or_else(|| zeros(self.dim(), self.dim()))
    }

    /// `mu(R_alpha^*)`, zero when absent.
    pub fn backward(&self, w: &Word) -> CMatrix {
        self.backward.get(w).cloned().unwrap_or_else(|| zeros(self.dim(), self.dim()))
    }

    pub fn realization(&self) -> Option<&Realization> {
        self.realization.as_ref()
    }

    pub fn is_selfadjoint(&self) -> bool {
        let scale = 1.0 + cmatrix::max_abs(&self.unit);
        let tol = cmatrix::HERMITIAN_TOL * scale;
        if cmatrix::hermitian_defect(&self.unit) > tol {
            return false;
        }
        self.forward
            .keys()
            .chain(self.backward.keys())
            .all(|w| cmatrix::max_abs(&(self.backward(w) - self.forward(w).adjoint())) <= tol)
    }

    /// `mu_t(R_alpha) = t^{|alpha|} mu(R_alpha)`.
    pub fn scaled(&self, t: f64) -> Self {
        let sc = |m: &BTreeMap<Word, CMatrix>| {
            m.iter().map(|(w, c)| (w.clone(), c.scale(t.powi(w.len() as i32)))).collect()
        };
        MomentFunctional {
            n: self.n,
            cutoff: self.cutoff,
            unit: self.unit.clone(),
            forward: sc(&self.forward),
            backward: sc(&self.backward),
            realization: None,
        }
    }

    /// `P mu` as a pluriharmonic function: `B_alpha = mu(R_{reverse alpha})`,
    /// `A_alpha = mu(R_{reverse alpha}^*)`, `A_0 = mu(I)`.
    pub fn poisson_function(&self) -> Result<PluriharmonicFn> {
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        a.insert(Word::empty(), self.unit.clone());
        for (w, c) in &self.backward {
            a.insert(w.reverse(), c.clone());
        }
        for (w, c) in &self.forward {
            b.insert(w.reverse(), c.clone());
        }
        PluriharmonicFn::new(self.n, self.cutoff, self.dim(), a, b)
    }

    /// `mu(I) + 2 sum mu(R_{reverse alpha}^*) Z_alpha`.
    pub fn herglotz_series(&self) -> Result<FreeSeries> {
        self.analytic_series(2.0)
    }

    /// `mu(I) + sum mu(R_{reverse alpha}^*) Z_alpha`.
    pub fn fantappie_series(&self) -> Result<FreeSeries> {
        self.analytic_series(1.0)
    }

    fn analytic_series(&self, factor: f64) -> Result<FreeSeries> {
        let mut a = BTreeMap::new();
        a.insert(Word::empty(), self.unit.clone());
        for (w, c) in &self.backward {
            a.insert(w.reverse(), c.scale(factor));
        }
        FreeSeries::from_coeffs(self.n, self.cutoff, (self.dim(), self.dim()), a)
    }
}

fn check_tuple(mu: &MomentFunctional, x: &OperatorTuple) -> Result<()> {
    if mu.n() != x.n() {
        return Err(Error::Shape(format!("functional over {} generators, tuple of {}", mu.n(), x.n())));
    }
    Ok(())
}

/// `(P mu)(X) = sum mu(R_{~alpha}) (x) X_alpha^* + mu(I) (x) I + sum mu(R_{~alpha}^*) (x) X_alpha`.
pub fn poisson_transform_of(mu: &MomentFunctional, x: &OperatorTuple) -> Result<CMatrix> {
    check_tuple(mu, x)?;
    Ok(pluriharmonic::eval(&mu.poisson_function()?, x)?.value)
}

/// `(H mu)(X) = mu(I) (x) I + 2 sum mu(R_{~alpha}^*) (x) X_alpha`.
pub fn herglotz_transform(mu: &MomentFunctional, x: &OperatorTuple) -> Result<CMatrix> {
    check_tuple(mu, x)?;
    Ok(series::eval_at(&mu.herglotz_series()?, x)?.value)
}

/// `(F mu)(X) = mu(I) (x) I + sum mu(R_{~alpha}^*) (x) X_alpha`.
pub fn fantappie_transform(mu: &MomentFunctional, x: &OperatorTuple) -> Result<CMatrix> {
    check_tuple(mu, x)?;
    Ok(series::eval_at(&mu.fantappie_series()?, x)?.value)
}

/// `(W^* (x) I)[2 (I - sum V_i^* (x) X_i)^{-1} - I](W (x) I) + i Im (x) I`.
/// `isometric_on`, when given, is the projection on which `V_i^* V_j = delta_ij I`
/// is required.
pub fn herglotz_from_isometries(
    v: &OperatorTuple,
    w: &CMatrix,
    x: &OperatorTuple,
    im_part: &CMatrix,
    isometric_on: Option<&CMatrix>,
) -> Result<CMatrix> {
    if v.n() != x.n() {
        return Err(Error::Shape("isometries and argument disagree on n".into()));
    }
    if w.nrows() != v.dim() || im_part.shape() != (w.ncols(), w.ncols()) {
        return Err(Error::Shape("embedding or imaginary part has the wrong shape".into()));
    }
    let k = v.dim();
    let q = isometric_on.cloned().unwrap_or_else(|| identity(k));
    for i in 1..=v.n() {
        for j in 1..=v.n() {
            let mut d = &q * v.get(i).adjoint() * v.get(j) * &q;
            if i == j {
                d -= &q;
            }
            let err = cmatrix::max_abs(&d);
            if err > 1e-10 {
                return Err(Error::Hypothesis(format!("V_{i}^* V_{j} deviates by {err:.3e}")));
            }
        }
    }
    let d = x.dim();
    let mut m = identity(k * d);
    for i in 1..=v.n() {
        m -= kron(&v.get(i).adjoint(), x.get(i))?;
    }
    let res = cmatrix::solve(&m, &identity(k * d))?.scale(2.0) - identity(k * d);
    let wi = kron(w, &identity(d))?;
    let im = kron(im_part, &identity(d))? * c64(0.0, 1.0);
    Ok(wi.adjoint() * res * wi + im)
}

/// `[K_f(alpha, beta)]` over `|alpha|, |beta| <= cutoff`:
/// `K(a, a) = A_0 + A_0^*`, `K(a, b) = A_{reverse(a \_l b)}` when `a >_l b`,
/// `K(a, b) = A^*_{reverse(b \_l a)}` when `b >_l a`, zero otherwise.
pub fn kernel_from_series(f: &FreeSeries) -> Result<MultiToeplitzMatrix> {
    let (p, q) = f.shape();
    if p != q {
        return Err(Error::Shape("kernel needs square coefficients".into()));
    }
    let basis = GradedBasis::enumerate(f.n(), f.cutoff())?;
    let dim = basis.len();
    cmatrix::check_size(dim * p, dim * p)?;
    let mut k = zeros(dim * p, dim * p);
    let a0 = f.constant();
    let diag = &a0 + a0.adjoint();
    for (ci, b) in basis.words().iter().enumerate() {
        put_block(&mut k, dim, ci, ci, &diag);
        for (ri, a) in basis.words().iter().enumerate() {
            if let Some(s) = a.left_quotient(b) {
                let c = f.coeff(&s.reverse());
                put_block(&mut k, dim, ri, ci, &c);
                put_block(&mut k, dim, ci, ri, &c.adjoint());
            }
        }
    }
    Ok(MultiToeplitzMatrix::from_entries(f.n(), f.cutoff(), p, k))
}

/// Writes block `(r, c)` of an operator on `C^p (x) P`, coefficient index first.
pub(crate) fn put_block(m: &mut CMatrix, dim: usize, r: usize, c: usize, b: &CMatrix) {
    for s in 0..b.nrows() {
        for t in 0..b.ncols() {
            m[(s * dim + r, t * dim + c)] = b[(s, t)];
        }
    }
}

/// Reads block `(r, c)` of an operator on `C^p (x) P`.
pub(crate) fn get_block(m: &CMatrix, dim: usize, p: usize, r: usize, c: usize) -> CMatrix {
    CMatrix::from_fn(p, p, |s, t| m[(s * dim + r, t * dim + c)])
}

/// `A_r` on `C^p (x) P^(m)` built from compressed right creations.
pub fn radial_operator(f: &FreeSeries, r: f64, m: usize) -> Result<CMatrix> {
    let ft = FockTrunc::new(f.n(), m)?;
    let p = f.shape().0;
    let size = p * ft.dim();
    cmatrix::check_size(size, size)?;
    let mut half = zeros(size, size);
    for (w, c) in f.coeffs() {
        if w.is_empty() || w.len() > m {
            continue;
        }
        // R_w in product notation is right translation by reverse(w)
        let rw = ft.right_word(&w.reverse())?;
        half += kron(&c.scale(0.5 * r.powi(w.len() as i32)), &rw)?;
    }
    Ok(kron(&cmatrix::hermitian_part(&f.constant()), &identity(ft.dim()))? + &half + half.adjoint())
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    /// Minimum eigenvalue of `A_r` over the grid and `m <= m_max`.
    pub radial_min_eig: f64,
    pub kernel_min_eig: f64,
    /// Minimum eigenvalue of `Re f(S^(m))` over `m <= m_max`.
    pub boundary_min_eig: f64,
    pub radial_positive: bool,
    pub kernel_positive: bool,
    pub boundary_positive: bool,
    pub agree: bool,
}

/// Evaluates the three positivity predicates and reports whether they agree.
pub fn positivity_equivalence_check(
    f: &FreeSeries,
    m_max: usize,
    r_grid: &[f64],
    tol: f64,
) -> Result<EquivalenceReport> {
    let mut radial_min_eig = f64::INFINITY;
    for &r in r_grid {
        for m in 0..=m_max {
            radial_min_eig = radial_min_eig.min(cmatrix::min_eig_hermitian(&radial_operator(f, r, m)?)?);
        }
    }
    let kernel_min_eig = kernel_from_series(f)?.min_eig()?;
    let h = real_part(f)?;
    let mut boundary_min_eig = f64::INFINITY;
    for m in 0..=m_max {
        let u = cmatrix::hermitian_part(&pluriharmonic::radial_boundary(&h, 1.0, m)?);
        boundary_min_eig = boundary_min_eig.min(cmatrix::min_eig_hermitian(&u)?);
    }
    let radial_positive = radial_min_eig >= -tol;
    let kernel_positive = kernel_min_eig >= -tol;
    let boundary_positive = boundary_min_eig >= -tol;
    Ok(EquivalenceReport {
        radial_min_eig,
        kernel_min_eig,
        boundary_min_eig,
        radial_positive,
        kernel_positive,
        boundary_positive,
        agree: radial_positive == kernel_positive && kernel_positive == boundary_positive,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FejerReport {
    pub m: usize,
    /// `(sum_{|alpha|=k} |mu(R_alpha)|^2)^{1/2}` for `k = 1..m-1`.
    pub lhs: Vec<f64>,
    pub bounds: Vec<f64>,
    pub holds: bool,
}

/// `(sum_{|alpha|=k} |mu(R_alpha)|^2)^{1/2} <= mu(I) cos(pi / (floor((m-1)/k) + 2))`.
pub fn fejer_check(mu: &MomentFunctional, m: usize, tol: f64) -> Result<FejerReport> {
    if mu.dim() != 1 {
        return Err(Error::Hypothesis("scalar functional required".into()));
    }
    if m < 1 || mu.cutoff() + 1 < m {
        return Err(Error::Hypothesis(format!("moments stored to {} but m = {m}", mu.cutoff())));
    }
    if !mu.is_selfadjoint() {
        return Err(Error::Hypothesis("functional is not selfadjoint".into()));
    }
    let unit = mu.unit()[(0, 0)].re;
    let mut sums = vec![0.0; mu.cutoff() + 1];
    for (w, c) in &mu.forward {
        sums[w.len()] += c[(0, 0)].norm_sqr();
    }
    let scale = 1e-12 * (1.0 + unit.abs());
    if sums.iter().skip(m).any(|&s| s.sqrt() > scale) {
        return Err(Error::Hypothesis(format!("moments of length >= {m} do not vanish")));
    }
    let mut lhs = Vec::new();
    let mut bounds = Vec::new();
    for (k, s) in sums.iter().enumerate().take(m).skip(1) {
        lhs.push(s.sqrt());
        let denom = ((m - 1) / k) as f64 + 2.0;
        bounds.push(unit * (std::f64::consts::PI / denom).cos());
    }
    let holds = lhs.iter().zip(&bounds).all(|(l, b)| *l <= b + tol);
    Ok(FejerReport { m, lhs, bounds, holds })
}

/// `nu_{h,r}`: forward(~alpha) = r^{|alpha|} B_alpha, backward(~alpha) = r^{|alpha|} A_alpha.
pub fn radial_functional(h: &PluriharmonicFn, r: f64) -> Result<MomentFunctional> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Input(format!("radius {r} outside [0, 1)")));
    }
    let mut forward = BTreeMap::new();
    let mut backward = BTreeMap::new();
    for (w, a) in h.analytic().coeffs() {
        if !w.is_empty() {
            backward.insert(w.reverse(), a.scale(r.powi(w.len() as i32)));
        }
    }
    for (w, b) in h.coanalytic() {
        forward.insert(w.reverse(), b.scale(r.powi(w.len() as i32)));
    }
    MomentFunctional::new(h.n(), h.cutoff(), h.a0(), forward, backward)
}

/// Convenience: scalar vector state `(weight, xi, xi)`.
pub fn diagonal_state(weight: f64, xi: DVector<C64>) -> VectorState {
    VectorState { weight, eta: xi.clone(), xi }
}

/// `Re f(S^(m))`.
pub fn boundary_real_part(f: &FreeSeries, m: usize) -> Result<CMatrix> {
    let a = eval_at_creation(f, m)?;
    Ok(cmatrix::hermitian_part(&a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::{max_abs, real, unit};
    use crate::fock::basis_vector;
    use crate::testing::{random_nilpotent_tuple, random_series, random_unit_vector, rng};
    use crate::toeplitz::assemble_t;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn half_state(ft: &FockTrunc) -> VectorState {
        let h = 0.5f64.sqrt();
        let xi = (basis_vector(ft, &Word::empty()).unwrap() + basis_vector(ft, &w("1")).unwrap()) * c64(h, 0.0);
        diagonal_state(1.0, xi)
    }

    #[test]
    fn vector_state_examples() {
        let ft = FockTrunc::new(2, 3).unwrap();
        let tau = MomentFunctional::from_vector_states(
            &ft,
            vec![diagonal_state(1.0, basis_vector(&ft, &Word::empty()).unwrap())],
            3,
        )
        .unwrap();
        assert_eq!(tau.unit()[(0, 0)], real(1.0));
        assert!(tau.forward.values().chain(tau.backward.values()).all(|c| max_abs(c) == 0.0));

        let ft = FockTrunc::new(1, 3).unwrap();
        let mu = MomentFunctional::from_vector_states(&ft, vec![half_state(&ft)], 2).unwrap();
        assert!((mu.unit()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((mu.forward(&w("1"))[(0, 0)].re - 0.5).abs() < 1e-15);
        assert_eq!(mu.forward(&w("11"))[(0, 0)], real(0.0));
        assert!(mu.is_selfadjoint());

        let zero = MomentFunctional::from_vector_states(&ft, vec![VectorState { weight: 0.0, ..half_state(&ft) }], 2)
            .unwrap();
        assert_eq!(max_abs(zero.unit()), 0.0);

        let deep = diagonal_state(1.0, basis_vector(&ft, &w("11")).unwrap());
        assert!(matches!(MomentFunctional::from_vector_states(&ft, vec![deep], 2), Err(Error::ExactnessZone(_))));
    }

    #[test]
    fn moments_match_dense_inner_products() {
        let mut g = rng(40);
        let ft = FockTrunc::new(2, 4).unwrap();
        let support = ft.basis().dim_upto(2);
        let xi = random_unit_vector(&mut g, ft.dim(), support);
        let eta = random_unit_vector(&mut g, ft.dim(), support);
        let st = VectorState { weight: 0.7, xi: xi.clone(), eta: eta.clone() };
        let mu = MomentFunctional::from_vector_states(&ft, vec![st], 2).unwrap();
        for word in GradedBasis::enumerate(2, 2).unwrap().words().iter().skip(1) {
            let rw = ft.right_word(&word.reverse()).unwrap();
            let f = eta.dotc(&(&rw * &xi)) * 0.7;
            let b = eta.dotc(&(rw.adjoint() * &xi)) * 0.7;
            assert!((mu.forward(word)[(0, 0)] - f).norm() < 1e-15);
            assert!((mu.backward(word)[(0, 0)] - b).norm() < 1e-15);
        }
    }

    #[test]
    fn transform_examples() {
        let mut g = rng(41);
        let ft = FockTrunc::new(2, 4).unwrap();
        let states: Vec<_> = (0..3)
            .map(|_| diagonal_state(0.5, random_unit_vector(&mut g, ft.dim(), ft.basis().dim_upto(2))))
            .collect();
        let mu = MomentFunctional::from_vector_states(&ft, states, 2).unwrap();
        let zero = OperatorTuple::zero(2, 3);
        let base = kron(mu.unit(), &identity(3)).unwrap();
        for t in [poisson_transform_of, herglotz_transform, fantappie_transform] {
            assert!(max_abs(&(t(&mu, &zero).unwrap() - &base)) < 1e-15);
        }
        let tau = MomentFunctional::tau(2, 3);
        let x = random_nilpotent_tuple(&mut g, 2, 3, 0.9);
        assert!(max_abs(&(poisson_transform_of(&tau, &x).unwrap() - identity(3))) < 1e-15);
        assert!(max_abs(&(fantappie_transform(&tau, &x).unwrap() - identity(3))) < 1e-15);

        let p = poisson_transform_of(&mu, &x).unwrap();
        assert!(cmatrix::min_eig_hermitian(&p).unwrap() >= -1e-10);
        let h = herglotz_transform(&mu, &x).unwrap();
        assert!(max_abs(&(cmatrix::hermitian_part(&h) - &p)) < 1e-10);
        let f = fantappie_transform(&mu, &x).unwrap();
        assert!(max_abs(&(f.scale(2.0) - kron(mu.unit(), &identity(3)).unwrap() - h)) < 1e-12);
    }

    #[test]
    fn herglotz_scalar_example() {
        let ft = FockTrunc::new(1, 3).unwrap();
        let mu = MomentFunctional::from_vector_states(&ft, vec![half_state(&ft)], 2).unwrap();
        let x = OperatorTuple::new(vec![unit(2, 0, 1).scale(0.4)]).unwrap();
        let h = herglotz_transform(&mu, &x).unwrap();
        assert!(max_abs(&(h - identity(2) - x.get(1))) < 1e-15);
    }

    #[test]
    fn berezin_transform_examples() {
        let ft = FockTrunc::new(2, 3).unwrap();
        let tau = MomentFunctional::from_vector_states(
            &ft,
            vec![diagonal_state(1.0, basis_vector(&ft, &Word::empty()).unwrap())],
            0,
        )
        .unwrap();
        let mut g = rng(42);
        let f = crate::testing::random_matrix(&mut g, ft.dim(), ft.dim());
        let x = random_nilpotent_tuple(&mut g, 2, 2, 0.8);
        let b = crate::fock::berezin_transform(&ft, &tau, &f, &x).unwrap();
        let p = crate::fock::poisson_transform(&ft, &f, &x).unwrap();
        assert!(max_abs(&(b - p)) < 1e-12);

        let id = crate::fock::berezin_transform(&ft, &tau, &identity(ft.dim()), &OperatorTuple::zero(2, 2)).unwrap();
        assert!(max_abs(&(id - identity(2))) < 1e-15);

        let xi = random_unit_vector(&mut g, ft.dim(), ft.dim());
        let mu = MomentFunctional::from_vector_states(&ft, vec![diagonal_state(1.0, xi)], 0).unwrap();
        let v = crate::fock::berezin_transform(&ft, &mu, &identity(ft.dim()), &x).unwrap();
        assert!(cmatrix::hermitian_defect(&v) < 1e-12);
        assert!(cmatrix::min_eig_hermitian(&v).unwrap() >= -1e-12);

        assert!(matches!(
            crate::fock::berezin_transform(&ft, &MomentFunctional::tau(2, 3), &f, &x),
            Err(Error::NoRealization)
        ));
    }

    #[test]
    fn herglotz_from_isometries_examples() {
        let mut g = rng(43);
        let ft = FockTrunc::new(2, 4).unwrap();
        let v = OperatorTuple::new((1..=2).map(|i| ft.right_creation(i).unwrap().clone()).collect()).unwrap();
        let q = ft.degree_projection(3).unwrap();
        let e0 = CMatrix::from_fn(ft.dim(), 1, |i, _| real(if i == 0 { 1.0 } else { 0.0 }));
        let im = scalar(real(0.25));
        let zero = herglotz_from_isometries(&v, &e0, &OperatorTuple::zero(2, 2), &im, Some(&q)).unwrap();
        assert!(max_abs(&(zero - identity(2) * c64(1.0, 0.25))) < 1e-15);

        // a vector state xi of degree <= 2 realizes H mu through V = R, W = xi
        let xi = random_unit_vector(&mut g, ft.dim(), ft.basis().dim_upto(2));
        let mu = MomentFunctional::from_vector_states(&ft, vec![diagonal_state(1.0, xi.clone())], 2).unwrap();
        let wcol = CMatrix::from_fn(ft.dim(), 1, |i, _| xi[i]);
        for _ in 0..5 {
            let x = random_nilpotent_tuple(&mut g, 2, 3, 0.95);
            let got = herglotz_from_isometries(&v, &wcol, &x, &zeros(1, 1), Some(&q)).unwrap();
            let expect = herglotz_transform(&mu, &x).unwrap();
            assert!(max_abs(&(&got - expect)) < 1e-12);
            assert!(cmatrix::min_eig_hermitian(&cmatrix::hermitian_part(&got)).unwrap() >= -1e-9);
        }
        let not_iso = OperatorTuple::new(vec![identity(2).scale(0.5), zeros(2, 2)]).unwrap();
        let e = CMatrix::from_fn(2, 1, |i, _| real(if i == 0 { 1.0 } else { 0.0 }));
        assert!(herglotz_from_isometries(&not_iso, &e, &OperatorTuple::zero(2, 1), &zeros(1, 1), None).is_err());
    }

    #[test]
    fn kernel_examples() {
        let c = FreeSeries::from_coeffs(2, 2, (1, 1), [(Word::empty(), scalar(c64(0.5, 0.3)))].into()).unwrap();
        let k = kernel_from_series(&c).unwrap();
        assert!(max_abs(&(k.entries() - identity(7))) < 1e-15);

        // n = 1: classical Hermitian Toeplitz matrix
        let f = random_series(&mut rng(44), 1, 3, 1, 1.0, false);
        let k = kernel_from_series(&f).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j {
                    let a0 = f.constant()[(0, 0)];
                    a0 + a0.conj()
                } else if i > j {
                    f.coeff(&Word::from_letters(std::iter::repeat_n(1, i - j)).unwrap())[(0, 0)]
                } else {
                    f.coeff(&Word::from_letters(std::iter::repeat_n(1, j - i)).unwrap())[(0, 0)].conj()
                };
                assert!((k.entries()[(i, j)] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn kernel_is_reversal_conjugate_of_t_matrix() {
        let mut g = rng(45);
        for n in 1..=3 {
            for m in 0..=3 {
                let f = random_series(&mut g, n, m, 1, 1.0, false);
                let k = kernel_from_series(&f).unwrap();
                let mut b: BTreeMap<Word, CMatrix> = f.coeffs().clone();
                let a0 = f.constant();
                b.insert(Word::empty(), &a0 + a0.adjoint());
                let t = assemble_t(n, m, &b).unwrap();
                let basis = GradedBasis::enumerate(n, m).unwrap();
                let perm: Vec<usize> = basis.words().iter().map(|x| basis.index_of(&x.reverse()).unwrap()).collect();
                for i in 0..basis.len() {
                    for j in 0..basis.len() {
                        assert!((k.entries()[(perm[i], perm[j])] - t.entries()[(i, j)]).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn equivalence_examples() {
        let half = FreeSeries::from_coeffs(1, 1, (1, 1), [(Word::empty(), scalar(real(0.5)))].into()).unwrap();
        let rep = positivity_equivalence_check(&half, 3, &[0.5, 0.9], 1e-12).unwrap();
        assert!(rep.agree && rep.kernel_positive);

        let mut hk = half.clone();
        hk.set(w("1"), scalar(real(0.5))).unwrap();
        let rep = positivity_equivalence_check(&hk, 3, &[0.5, 0.9, 0.99], 1e-12).unwrap();
        assert!(rep.agree && rep.radial_positive && rep.kernel_positive && rep.boundary_positive);

        let z = FreeSeries::monomial(1, 1, "1", scalar(real(1.0))).unwrap();
        let rep = positivity_equivalence_check(&z, 1, &[0.5, 0.9], 1e-12).unwrap();
        assert!(rep.agree && !rep.radial_positive && !rep.kernel_positive && !rep.boundary_positive);
    }

    #[test]
    fn radial_operator_is_flip_of_boundary() {
        let f = random_series(&mut rng(46), 2, 2, 2, 1.0, false);
        let a1 = radial_operator(&f, 1.0, 3).unwrap();
        let re = boundary_real_part(&f, 3).unwrap();
        let l1 = cmatrix::hermitian_eig(&a1).unwrap().eigenvalues;
        let l2 = cmatrix::hermitian_eig(&re).unwrap().eigenvalues;
        for (x, y) in l1.iter().zip(&l2) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn fejer_examples() {
        let ft = FockTrunc::new(1, 3).unwrap();
        let mu = MomentFunctional::from_vector_states(&ft, vec![half_state(&ft)], 2).unwrap();
        let rep = fejer_check(&mu, 2, 1e-12).unwrap();
        assert!((rep.bounds[0] - 0.5).abs() < 1e-15);
        assert!((rep.lhs[0] - 0.5).abs() < 1e-15);
        assert!(rep.holds);

        let tau = MomentFunctional::tau(2, 3);
        let rep = fejer_check(&tau, 4, 0.0).unwrap();
        assert!(rep.lhs.iter().all(|&l| l == 0.0) && rep.holds);

        // moments of length 2 present but m = 2 requires them to vanish
        let ft4 = FockTrunc::new(1, 4).unwrap();
        let xi = random_unit_vector(&mut rng(47), ft4.dim(), 3);
        let mu = MomentFunctional::from_vector_states(&ft4, vec![diagonal_state(1.0, xi)], 2).unwrap();
        assert!(matches!(fejer_check(&mu, 2, 1e-12), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn radial_functional_examples() {
        let mut g = rng(48);
        let h = real_part(&random_series(&mut g, 2, 3, 2, 1.0, false)).unwrap();
        let r0 = radial_functional(&h, 0.0).unwrap();
        assert!(r0.forward.values().chain(r0.backward.values()).all(|c| max_abs(c) == 0.0));

        let (r1, r2) = (0.3, 0.8);
        let a = radial_functional(&h, r1).unwrap().scaled(r2 / r1);
        let b = radial_functional(&h, r2).unwrap();
        for word in GradedBasis::enumerate(2, 3).unwrap().words().iter().skip(1) {
            assert!(max_abs(&(a.forward(word) - b.forward(word))) < 1e-14);
            assert!(max_abs(&(a.backward(word) - b.backward(word))) < 1e-14);
        }

        let x = random_nilpotent_tuple(&mut g, 2, 3, 0.9);
        let lhs = poisson_transform_of(&b, &x).unwrap();
        let rhs = pluriharmonic::eval(&h, &x.scaled(r2)).unwrap().value;
        assert!(max_abs(&(lhs - rhs)) < 1e-10);
    }

    #[test]
    fn json_round_trip() {
        let ft = FockTrunc::new(1, 3).unwrap();
        let mu = MomentFunctional::from_vector_states(&ft, vec![half_state(&ft)], 2).unwrap();
        let back: MomentFunctional = serde_json::from_str(&serde_json::to_string(&mu).unwrap()).unwrap();
        assert_eq!(back.forward, mu.forward);
        assert!(back.realization().is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn poisson_of_positive_state_is_positive(seed in any::<u64>(), n in 1usize..=2) {
            let mut g = rng(seed);
            let ft = FockTrunc::new(n, 4).unwrap();
            let states: Vec<_> = (0..2)
                .map(|_| diagonal_state(1.0, random_unit_vector(&mut g, ft.dim(), ft.basis().dim_upto(2))))
                .collect();
            let mu = MomentFunctional::from_vector_states(&ft, states, 2).unwrap();
            let h = mu.poisson_function().unwrap();
            prop_assert!(pluriharmonic::check_positive(&h, 3, 1e-10).unwrap().positive);
        }

        #[test]
        fn poisson_transform_is_linear(seed in any::<u64>()) {
            let mut g = rng(seed);
            let ft = FockTrunc::new(2, 3).unwrap();
            let sup = ft.basis().dim_upto(1);
            let s1 = diagonal_state(0.4, random_unit_vector(&mut g, ft.dim(), sup));
            let s2 = diagonal_state(1.3, random_unit_vector(&mut g, ft.dim(), sup));
            let m1 = MomentFunctional::from_vector_states(&ft, vec![s1.clone()], 2).unwrap();
            let m2 = MomentFunctional::from_vector_states(&ft, vec![s2.clone()], 2).unwrap();
            let m12 = MomentFunctional::from_vector_states(&ft, vec![s1, s2], 2).unwrap();
            let x = random_nilpotent_tuple(&mut g, 2, 3, 0.9);
            let sum = poisson_transform_of(&m1, &x).unwrap() + poisson_transform_of(&m2, &x).unwrap();
            prop_assert!(max_abs(&(sum - poisson_transform_of(&m12, &x).unwrap())) < 1e-13);
        }
    }
}
