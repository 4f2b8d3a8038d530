//! Degree-truncated free power series `sum A_alpha Z_alpha` with matrix
//! coefficients, their Cayley transforms, and evaluation at operator tuples
//! and at compressed creation operators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cmatrix::{self, identity, kron, zeros, CMatrix, C64};
use crate::error::{Error, Result};
use crate::fock::{FockTrunc, OperatorTuple};
use crate::freeword::{basis_size, GradedBasis, Word};

/// Tolerance of the multi-analytic test in [`truncated_cayley`].
pub const MULTI_ANALYTIC_TOL: f64 = 1e-10;
/// Evaluation outside nilpotency requires `jsr < EVAL_MARGIN * radius`.
pub const EVAL_MARGIN: f64 = 0.9;
/// `||M_nu|| <= NILPOTENT_REL * ||X||^{2 nu}` counts as `M_nu = 0`.
pub const NILPOTENT_REL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesJson", into = "SeriesJson")]
pub struct FreeSeries {
    n: usize,
    cutoff: usize,
    shape: (usize, usize),
    coeffs: BTreeMap<Word, CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    n: usize,
    cutoff: usize,
    shape: [usize; 2],
    #[serde(with = "cmatrix::json::map")]
    coefficients: BTreeMap<Word, CMatrix>,
}

impl TryFrom<SeriesJson> for FreeSeries {
    type Error = Error;

    fn try_from(j: SeriesJson) -> Result<Self> {
        FreeSeries::from_coeffs(j.n, j.cutoff, (j.shape[0], j.shape[1]), j.coefficients)
    }
}

impl From<FreeSeries> for SeriesJson {
    fn from(f: FreeSeries) -> Self {
        SeriesJson { n: f.n, cutoff: f.cutoff, shape: [f.shape.0, f.shape.1], coefficients: f.coeffs }
    }
}

/// Direction of a Cayley transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `f -> (1 - f)^{-1} f`
    Forward,
    /// `g -> g (1 + g)^{-1}`
    Inverse,
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "inverse" => Ok(Direction::Inverse),
            other => Err(Error::Input(format!("unknown direction {other:?}"))),
        }
    }
}

impl FreeSeries {
    pub fn zero(n: usize, cutoff: usize, shape: (usize, usize)) -> Self {
        FreeSeries { n, cutoff, shape, coeffs: BTreeMap::new() }
    }

    /// The unit series `I_p`.
    pub fn one(n: usize, cutoff: usize, p: usize) -> Self {
        let mut f = Self::zero(n, cutoff, (p, p));
        f.coeffs.insert(Word::empty(), identity(p));
        f
    }

    pub fn from_coeffs(
        n: usize,
        cutoff: usize,
        shape: (usize, usize),
        coeffs: BTreeMap<Word, CMatrix>,
    ) -> Result<Self> {
        if !(1..=crate::freeword::MAX_GENERATORS).contains(&n) {
            return Err(Error::GeneratorCount(n));
        }
        let mut f = Self::zero(n, cutoff, shape);
        for (w, c) in coeffs {
            f.set(w, c)?;
        }
        Ok(f)
    }

    /// Single monomial `c Z_w`.
    pub fn monomial(n: usize, cutoff: usize, w: &str, c: CMatrix) -> Result<Self> {
        let word: Word = w.parse()?;
        let mut f = Self::zero(n, cutoff, (c.nrows(), c.ncols()));
        f.set(word, c)?;
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn coeffs(&self) -> &BTreeMap<Word, CMatrix> {
        &self.coeffs
    }

    pub fn get(&self, w: &Word) -> Option<&CMatrix> {
        self.coeffs.get(w)
    }

    /// Coefficient of `w`, zero when absent.
    pub fn coeff(&self, w: &Word) -> CMatrix {
        self.coeffs.get(w).cloned().unwrap_or_else(|| zeros(self.shape.0, self.shape.1))
    }

    /// Stores `c` as the coefficient of `w`; words beyond the cutoff are rejected.
    pub fn set(&mut self, w: Word, c: CMatrix) -> Result<()> {
        w.check(self.n)?;
        if w.len() > self.cutoff {
            return Err(Error::Degree { degree: w.len(), max: self.cutoff });
        }
        if c.shape() != self.shape {
            return Err(Error::Shape(format!(
                "coefficient of {w:?} is {:?}, series shape is {:?}",
                c.shape(),
                self.shape
            )));
        }
        self.coeffs.insert(w, c);
        Ok(())
    }

    fn add_to(&mut self, w: Word, c: CMatrix) {
        match self.coeffs.get_mut(&w) {
            Some(e) => *e += c,
            None => {
                self.coeffs.insert(w, c);
            }
        }
    }

    pub fn constant(&self) -> CMatrix {
        self.coeff(&Word::empty())
    }

    pub fn has_zero_constant(&self) -> bool {
        self.coeffs.get(&Word::empty()).is_none_or(|c| cmatrix::max_abs(c) == 0.0)
    }

    /// Drops coefficients of length above `cutoff` and lowers the cutoff.
    pub fn truncate(&self, cutoff: usize) -> Self {
        let cutoff = cutoff.min(self.cutoff);
        FreeSeries {
            n: self.n,
            cutoff,
            shape: self.shape,
            coeffs: self.coeffs.iter().filter(|(w, _)| w.len() <= cutoff).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    pub fn scale(&self, t: C64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= t;
        }
        out
    }

    /// `A_alpha -> r^{|alpha|} A_alpha`.
    pub fn radial(&self, r: f64) -> Self {
        let mut out = self.clone();
        for (w, c) in out.coeffs.iter_mut() {
            *c *= C64::new(r.powi(w.len() as i32), 0.0);
        }
        out
    }

    fn check_compatible(&self, other: &FreeSeries) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Shape(format!("series over {} and {} generators", self.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &FreeSeries) -> Result<Self> {
        self.check_compatible(other)?;
        if self.shape != other.shape {
            return Err(Error::Shape(format!("adding {:?} and {:?} series", self.shape, other.shape)));
        }
        let mut out = self.truncate(other.cutoff);
        for (w, c) in &other.coeffs {
            if w.len() <= out.cutoff {
                out.add_to(w.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FreeSeries) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Cauchy product; the cutoff of the result is the smaller cutoff.
    pub fn multiply(&self, other: &FreeSeries) -> Result<Self> {
        self.check_compatible(other)?;
        if self.shape.1 != other.shape.0 {
            return Err(Error::Shape(format!(
                "cannot multiply {:?} by {:?} coefficients",
                self.shape, other.shape
            )));
        }
        let cutoff = self.cutoff.min(other.cutoff);
        let mut out = Self::zero(self.n, cutoff, (self.shape.0, other.shape.1));
        let pairs = self.coeffs.len().saturating_mul(other.coeffs.len());
        let splits = basis_size(self.n, cutoff).saturating_mul(cutoff + 1);
        if pairs <= splits {
            for (b, fb) in &self.coeffs {
                for (c, gc) in &other.coeffs {
                    if b.len() + c.len() <= cutoff {
                        out.add_to(b.concat(c), fb * gc);
                    }
                }
            }
            return Ok(out);
        }
        for w in GradedBasis::enumerate(self.n, cutoff)?.words() {
            let letters: Vec<usize> = w.letters().collect();
            for k in 0..=letters.len() {
                let head = Word::from_letters(letters[..k].iter().copied())?;
                let Some(fb) = self.coeffs.get(&head) else { continue };
                let tail = Word::from_letters(letters[k..].iter().copied())?;
                if let Some(gc) = other.coeffs.get(&tail) {
                    out.add_to(w.clone(), fb * gc);
                }
            }
        }
        Ok(out)
    }

    fn require_square_zero_constant(&self) -> Result<()> {
        if self.shape.0 != self.shape.1 {
            return Err(Error::Shape(format!("series coefficients are {:?}, need square", self.shape)));
        }
        if !self.has_zero_constant() {
            return Err(Error::NonzeroConstant);
        }
        Ok(())
    }

    /// `(1 - f)^{-1} = 1 + f + ... + f^cutoff`.
    pub fn neumann_inverse(&self) -> Result<Self> {
        self.require_square_zero_constant()?;
        let one = Self::one(self.n, self.cutoff, self.shape.0);
        let mut sum = one.clone();
        let mut power = one;
        for _ in 0..self.cutoff {
            power = power.multiply(self)?;
            if power.coeffs.is_empty() {
                break;
            }
            sum = sum.add(&power)?;
        }
        Ok(sum)
    }

    /// `(1 - f)^{-1} f`.
    pub fn cayley_forward(&self) -> Result<Self> {
        self.neumann_inverse()?.multiply(self)
    }

    /// `g (1 + g)^{-1}`.
    pub fn cayley_inverse(&self) -> Result<Self> {
        let neg = self.scale(C64::new(-1.0, 0.0));
        self.multiply(&neg.neumann_inverse()?)
    }

    pub fn cayley(&self, direction: Direction) -> Result<Self> {
        match direction {
            Direction::Forward => self.cayley_forward(),
            Direction::Inverse => self.cayley_inverse(),
        }
    }

    /// Largest coefficientwise max-abs difference, counting absent words as zero.
    pub fn max_coeff_diff(&self, other: &FreeSeries) -> f64 {
        let mut worst: f64 = 0.0;
        for (w, c) in &self.coeffs {
            worst = worst.max(cmatrix::max_abs(&(c - other.coeff(w))));
        }
        for (w, c) in &other.coeffs {
            if !self.coeffs.contains_key(w) {
                worst = worst.max(cmatrix::max_abs(c));
            }
        }
        worst
    }
}

/// Sum `sum_alpha kron(c_alpha, W_alpha)` where `W_alpha` is looked up in
/// graded order from `words` (index via `basis`).
pub(crate) fn sum_kron_words(
    coeffs: &BTreeMap<Word, CMatrix>,
    basis: &GradedBasis,
    words: &[CMatrix],
    shape: (usize, usize),
    dim: usize,
) -> Result<CMatrix> {
    cmatrix::check_size(shape.0 * dim, shape.1 * dim)?;
    let mut out = zeros(shape.0 * dim, shape.1 * dim);
    for (w, c) in coeffs {
        if let Some(idx) = basis.index_of(w) {
            out += kron(c, &words[idx])?;
        }
    }
    Ok(out)
}

/// A value computed from a series together with a truncation estimate.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: CMatrix,
    /// Zero when the series terminates on the argument.
    pub tail_estimate: f64,
    pub jsr: JsrEstimate,
}

/// Scope test shared by all series-type evaluations: nilpotent arguments are
/// exact, otherwise `jsr < 0.9 * radius` is required.
pub(crate) fn evaluation_scope(
    x: &OperatorTuple,
    cutoff: usize,
    radius: f64,
) -> Result<(JsrEstimate, f64)> {
    let kmax = (cutoff + 1).max(x.dim()).max(1);
    let jsr = jsr_estimate(x, kmax);
    if let Some(nu) = jsr.nilpotent_order {
        if nu <= cutoff + 1 {
            return Ok((jsr, 0.0));
        }
    }
    if radius.is_infinite() {
        return Ok((jsr, 0.0));
    }
    if jsr.value >= EVAL_MARGIN * radius {
        return Err(Error::Divergence(format!(
            "joint spectral radius estimate {:.6} not below {} x radius estimate {:.6}",
            jsr.value, EVAL_MARGIN, radius
        )));
    }
    let q = jsr.value / radius;
    Ok((jsr, q.powi(cutoff as i32 + 1) / (1.0 - q)))
}

/// `sum_{|alpha| <= cutoff} kron(A_alpha, X_alpha)`.
pub fn eval_at(f: &FreeSeries, x: &OperatorTuple) -> Result<Evaluation> {
    if x.n() != f.n() {
        return Err(Error::Shape(format!("series in {} variables, tuple of {}", f.n(), x.n())));
    }
    let radius = radius_estimate(f, f.cutoff());
    let (jsr, tail_estimate) = evaluation_scope(x, f.cutoff(), radius)?;
    let basis = GradedBasis::enumerate(f.n(), f.cutoff())?;
    let words = x.word_products(f.cutoff());
    let value = sum_kron_words(f.coeffs(), &basis, &words, f.shape(), x.dim())?;
    Ok(Evaluation { value, tail_estimate, jsr })
}

/// `f(S^(m)) = sum_{|alpha| <= m} kron(A_alpha, S_alpha^(m))` on `C^p (x) P^(m)`.
pub fn eval_at_creation(f: &FreeSeries, m: usize) -> Result<CMatrix> {
    let basis = GradedBasis::enumerate(f.n(), m)?;
    let dim = basis.len();
    let (p, q) = f.shape();
    cmatrix::check_size(p * dim, q * dim)?;
    let mut out = zeros(p * dim, q * dim);
    for (w, c) in f.coeffs() {
        let Some(wi) = basis.index_of(w) else { continue };
        for b in 0..dim {
            let Some(row) = basis.concat_index(wi, b) else { continue };
            for s in 0..p {
                for t in 0..q {
                    out[(s * dim + row, t * dim + b)] += c[(s, t)];
                }
            }
        }
    }
    Ok(out)
}

/// `||f(S^(m))||`, a lower bound for the supremum norm that is nondecreasing in `m`.
pub fn hinf_norm_lower(f: &FreeSeries, m: usize) -> Result<f64> {
    Ok(cmatrix::operator_norm(&eval_at_creation(f, m)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JsrEstimate {
    pub kmax: usize,
    pub value: f64,
    pub nilpotent_order: Option<usize>,
}

/// Iterates `M_k = sum_i X_i M_{k-1} X_i^*` and reports `||M_kmax||^{1/(2 kmax)}`.
pub fn jsr_estimate(x: &OperatorTuple, kmax: usize) -> JsrEstimate {
    let kmax = kmax.max(1);
    let scale = x.row_norm();
    if scale == 0.0 {
        return JsrEstimate { kmax, value: 0.0, nilpotent_order: Some(1) };
    }
    let mut m = identity(x.dim());
    for k in 1..=kmax {
        let mut next = zeros(x.dim(), x.dim());
        for xi in x.matrices() {
            next += xi * &m * xi.adjoint();
        }
        m = next;
        let norm = cmatrix::operator_norm(&m);
        if norm <= NILPOTENT_REL * scale.powi(2 * k as i32) {
            return JsrEstimate { kmax, value: 0.0, nilpotent_order: Some(k) };
        }
        if k == kmax {
            return JsrEstimate { kmax, value: norm.powf(1.0 / (2.0 * k as f64)), nilpotent_order: None };
        }
    }
    unreachable!("loop returns at k == kmax")
}

/// `1 / max_{1<=k<=kmax} ||sum_{|alpha|=k} A_alpha^* A_alpha||^{1/(2k)}`; infinite
/// when all those coefficients vanish.
pub fn radius_estimate(f: &FreeSeries, kmax: usize) -> f64 {
    let kmax = kmax.min(f.cutoff());
    let q = f.shape().1;
    let mut grams = vec![zeros(q, q); kmax + 1];
    for (w, c) in f.coeffs() {
        let k = w.len();
        if (1..=kmax).contains(&k) {
            grams[k] += c.adjoint() * c;
        }
    }
    let mut worst: f64 = 0.0;
    for (k, g) in grams.iter().enumerate().skip(1) {
        let a = cmatrix::operator_norm(g);
        if a > 0.0 {
            worst = worst.max(a.powf(1.0 / (2.0 * k as f64)));
        }
    }
    if worst == 0.0 {
        f64::INFINITY
    } else {
        1.0 / worst
    }
}

/// Analytic and co-analytic coefficients read off an operator on `C^p (x) P^(N)`.
#[derive(Clone, Debug)]
pub struct ExtractedCoeffs {
    /// `<A(x (x) 1), y (x) e_alpha>`, all `|alpha| <= N`.
    pub analytic: BTreeMap<Word, CMatrix>,
    /// `<A(x (x) e_alpha), y (x) 1>`, `|alpha| >= 1`.
    pub coanalytic: BTreeMap<Word, CMatrix>,
}

pub fn extract_coeffs(a: &CMatrix, ft: &FockTrunc) -> Result<ExtractedCoeffs> {
    let dim = ft.dim();
    if !a.nrows().is_multiple_of(dim) || !a.ncols().is_multiple_of(dim) {
        return Err(Error::Shape(format!("{:?} does not act on C^p (x) P^({})", a.shape(), ft.depth())));
    }
    let (p, q) = (a.nrows() / dim, a.ncols() / dim);
    let read = |row: usize, col: usize, rows: usize, cols: usize| {
        CMatrix::from_fn(rows, cols, |s, t| a[(s * dim + row, t * dim + col)])
    };
    let mut analytic = BTreeMap::new();
    let mut coanalytic = BTreeMap::new();
    for (idx, w) in ft.basis().words().iter().enumerate() {
        analytic.insert(w.clone(), read(idx, 0, p, q));
        if idx > 0 {
            coanalytic.insert(w.clone(), read(0, idx, p, q));
        }
    }
    Ok(ExtractedCoeffs { analytic, coanalytic })
}

/// The analytic coefficients of `a` as a series of cutoff `N`.
pub fn series_from_operator(a: &CMatrix, ft: &FockTrunc) -> Result<FreeSeries> {
    let dim = ft.dim();
    let ex = extract_coeffs(a, ft)?;
    FreeSeries::from_coeffs(ft.n(), ft.depth(), (a.nrows() / dim, a.ncols() / dim), ex.analytic)
}

/// Checks that `y` is of the form `sum_{1<=|alpha|<=m} A_alpha (x) S_alpha^(m)`.
/// `max |Y (I (x) R_i) - (I (x) R_i) Y|` without forming the shift.
fn right_commutator(y: &CMatrix, basis: &GradedBasis, p: usize, i: usize) -> f64 {
    let dim = basis.len();
    let mut target = vec![None; dim];
    let mut source = vec![None; dim];
    for b in 0..dim {
        if let Some(g) = basis.append_index(b, i) {
            target[b] = Some(g);
            source[g] = Some(b);
        }
    }
    let zero = C64::new(0.0, 0.0);
    let mut worst: f64 = 0.0;
    for c in 0..p * dim {
        let (t, cw) = (c / dim, c % dim);
        for r in 0..p * dim {
            let (s, rw) = (r / dim, r % dim);
            let yr = target[cw].map_or(zero, |g| y[(r, t * dim + g)]);
            let ry = source[rw].map_or(zero, |b| y[(s * dim + b, c)]);
            worst = worst.max((yr - ry).norm());
        }
    }
    worst
}

pub fn check_multi_analytic(y: &CMatrix, ft: &FockTrunc) -> Result<()> {
    let dim = ft.dim();
    if !y.is_square() || !y.nrows().is_multiple_of(dim) {
        return Err(Error::Shape(format!("{:?} does not act on C^p (x) P^({})", y.shape(), ft.depth())));
    }
    let p = y.nrows() / dim;
    let tol = MULTI_ANALYTIC_TOL * (1.0 + cmatrix::max_abs(y));
    for i in 1..=ft.n() {
        let comm = right_commutator(y, ft.basis(), p, i);
        if comm > tol {
            return Err(Error::NotMultiAnalytic(format!("commutator with R_{i} is {comm:.3e}")));
        }
    }
    let f = series_from_operator(y, ft)?;
    if cmatrix::max_abs(&f.constant()) > tol {
        return Err(Error::NotMultiAnalytic("constant block is nonzero".into()));
    }
    let rebuilt = eval_at_creation(&f, ft.depth())?;
    let defect = cmatrix::max_abs(&(&rebuilt - y));
    if defect > tol {
        return Err(Error::NotMultiAnalytic(format!("not determined by its first column ({defect:.3e})")));
    }
    Ok(())
}

/// `Y (I - Y)^{-1}` or `Y (I + Y)^{-1}` for multi-analytic `Y` with zero
/// constant term, as the finite sums `Y +- Y^2 + ... +- Y^m`.
pub fn truncated_cayley(y: &CMatrix, ft: &FockTrunc, direction: Direction) -> Result<CMatrix> {
    check_multi_analytic(y, ft)?;
    let sign: f64 = match direction {
        Direction::Forward => 1.0,
        Direction::Inverse => -1.0,
    };
    let mut sum = y.clone();
    let mut power = y.clone();
    for k in 2..=ft.depth() {
        power = cmatrix::mul(&power, y);
        sum += power.scale(sign.powi(k as i32 - 1));
    }
    Ok(sum)
}
