//! The truncated Fock space `P^(N)` spanned by `e_alpha`, `|alpha| <= N`, its
//! compressed creation operators, and the kernels attached to an operator
//! tuple `X`: the reconstruction operator `R_X`, the Berezin kernel
//! `B_X = (I (x) Delta_X)(I - R_X)^{-1}` and the Poisson kernel `K_X`.
//!
//! Layout conventions:
//! * operators of the form `Fock (x) H` (kernels, `R_X`) put the Fock index first;
//! * multipliers `sum A_alpha (x) S_alpha` put the coefficient index first.
//!
//! Dense matrices are subject to [`cmatrix::size_limit`]. [`FockColumns`]
//! stores block columns level by level and handles truncations whose dense
//! form would be too large.

use std::sync::OnceLock;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cmatrix::{self, c64, identity, kron, psd_sqrt, real, zeros, CMatrix, C64};
use crate::error::{Error, Result};
use crate::freeword::{GradedBasis, Word};
use crate::transforms::MomentFunctional;

/// Row norms at or above this count as the boundary of the unit ball.
pub const STRICT_BALL_MARGIN: f64 = 1e-12;

#[derive(Debug)]
pub struct FockTrunc {
    basis: GradedBasis,
    left: OnceLock<Vec<CMatrix>>,
    right: OnceLock<Vec<CMatrix>>,
}

impl Clone for FockTrunc {
    fn clone(&self) -> Self {
        FockTrunc { basis: self.basis.clone(), left: OnceLock::new(), right: OnceLock::new() }
    }
}

impl FockTrunc {
    pub fn new(n: usize, depth: usize) -> Result<Self> {
        Ok(FockTrunc {
            basis: GradedBasis::enumerate(n, depth)?,
            left: OnceLock::new(),
            right: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    /// Truncation degree `N`.
    pub fn depth(&self) -> usize {
        self.basis.max_deg()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    fn check_generator(&self, i: usize) -> Result<()> {
        if (1..=self.n()).contains(&i) {
            Ok(())
        } else {
            Err(Error::GeneratorIndex { index: i, n: self.n() })
        }
    }

    fn build_shift(&self, i: usize, left: bool) -> CMatrix {
        let b = &self.basis;
        let mut m = zeros(b.len(), b.len());
        for a in 0..b.len() {
            let target = if left { b.prepend_index(a, i) } else { b.append_index(a, i) };
            if let Some(t) = target {
                m[(t, a)] = real(1.0);
            }
        }
        m
    }

    /// `S_i^(N)`: `e_alpha -> e_{g_i alpha}`, zero on the top degree.
    pub fn left_creation(&self, i: usize) -> Result<&CMatrix> {
        self.check_generator(i)?;
        cmatrix::check_size(self.dim(), self.dim())?;
        let all = self
            .left
            .get_or_init(|| (1..=self.n()).map(|j| self.build_shift(j, true)).collect());
        Ok(&all[i - 1])
    }

    /// `R_i^(N)`: `e_alpha -> e_{alpha g_i}`, zero on the top degree.
    pub fn right_creation(&self, i: usize) -> Result<&CMatrix> {
        self.check_generator(i)?;
        cmatrix::check_size(self.dim(), self.dim())?;
        let all = self
            .right
            .get_or_init(|| (1..=self.n()).map(|j| self.build_shift(j, false)).collect());
        Ok(&all[i - 1])
    }

    /// `S_w^(N)`: `e_beta -> e_{w beta}`.
    pub fn left_word(&self, w: &Word) -> Result<CMatrix> {
        self.word_shift(w, true)
    }

    /// Right translation by `w`: `e_beta -> e_{beta w}`. In product notation
    /// this is `R_{reverse(w)}`.
    pub fn right_word(&self, w: &Word) -> Result<CMatrix> {
        self.word_shift(w, false)
    }

    fn word_shift(&self, w: &Word, left: bool) -> Result<CMatrix> {
        w.check(self.n())?;
        cmatrix::check_size(self.dim(), self.dim())?;
        let b = &self.basis;
        let mut m = zeros(b.len(), b.len());
        let Some(wi) = b.index_of(w) else {
            return Ok(m);
        };
        for a in 0..b.len() {
            let t = if left { b.concat_index(wi, a) } else { b.concat_index(a, wi) };
            if let Some(t) = t {
                m[(t, a)] = real(1.0);
            }
        }
        Ok(m)
    }

    /// Orthogonal projection onto `span{e_alpha : |alpha| <= k}`.
    pub fn degree_projection(&self, k: usize) -> Result<CMatrix> {
        if k > self.depth() {
            return Err(Error::Degree { degree: k, max: self.depth() });
        }
        cmatrix::check_size(self.dim(), self.dim())?;
        let mut m = zeros(self.dim(), self.dim());
        for a in 0..self.basis.dim_upto(k) {
            m[(a, a)] = real(1.0);
        }
        Ok(m)
    }
}

/// An `n`-tuple of `p x p` matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "TupleJson", into = "TupleJson")]
pub struct OperatorTuple {
    matrices: Vec<CMatrix>,
    dim: usize,
    row_norm: f64,
}

#[derive(Serialize, Deserialize)]
struct TupleJson {
    n: usize,
    dim: usize,
    #[serde(with = "cmatrix::json::vec")]
    matrices: Vec<CMatrix>,
}

impl TryFrom<TupleJson> for OperatorTuple {
    type Error = Error;

    fn try_from(j: TupleJson) -> Result<Self> {
        if j.matrices.len() != j.n {
            return Err(Error::Input(format!(
                "tuple declares n = {} but has {} matrices",
                j.n,
                j.matrices.len()
            )));
        }
        let t = OperatorTuple::new(j.matrices)?;
        if t.dim != j.dim {
            return Err(Error::Input(format!("tuple declares dim {} but matrices are {}", j.dim, t.dim)));
        }
        Ok(t)
    }
}

impl From<OperatorTuple> for TupleJson {
    fn from(t: OperatorTuple) -> Self {
        TupleJson { n: t.n(), dim: t.dim, matrices: t.matrices }
    }
}

impl OperatorTuple {
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.is_empty() || matrices.len() > crate::freeword::MAX_GENERATORS {
            return Err(Error::GeneratorCount(matrices.len()));
        }
        let dim = matrices[0].nrows();
        if matrices.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::Shape("tuple matrices must be square of equal size".into()));
        }
        let mut gram = zeros(dim, dim);
        for m in &matrices {
            gram += m * m.adjoint();
        }
        let row_norm = cmatrix::operator_norm(&gram).sqrt();
        Ok(OperatorTuple { matrices, dim, row_norm })
    }

    pub fn zero(n: usize, dim: usize) -> Self {
        OperatorTuple { matrices: vec![zeros(dim, dim); n], dim, row_norm: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.matrices.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `||[X_1 ... X_n]||`.
    pub fn row_norm(&self) -> f64 {
        self.row_norm
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    /// `X_i`, one-based.
    pub fn get(&self, i: usize) -> &CMatrix {
        &self.matrices[i - 1]
    }

    pub fn scaled(&self, t: f64) -> Self {
        OperatorTuple {
            matrices: self.matrices.iter().map(|m| m.scale(t)).collect(),
            dim: self.dim,
            row_norm: self.row_norm * t.abs(),
        }
    }

    /// `X_w = X_{i_1} ... X_{i_k}`.
    pub fn word(&self, w: &Word) -> CMatrix {
        let mut out = identity(self.dim);
        for l in w.letters() {
            out *= &self.matrices[l - 1];
        }
        out
    }

    /// `X_alpha` for every word of length `<= depth`, in graded order.
    pub fn word_products(&self, depth: usize) -> Vec<CMatrix> {
        let n = self.n();
        let total = crate::freeword::basis_size(n, depth);
        let mut out = Vec::with_capacity(total);
        out.push(identity(self.dim));
        let mut idx = 0;
        while out.len() < total {
            let parent = out[idx].clone();
            for m in &self.matrices {
                out.push(&parent * m);
            }
            idx += 1;
        }
        out
    }

    fn check_against(&self, ft: &FockTrunc) -> Result<()> {
        if self.n() != ft.n() {
            return Err(Error::Shape(format!(
                "tuple has {} matrices, Fock space has {} generators",
                self.n(),
                ft.n()
            )));
        }
        Ok(())
    }

    fn require_strict(&self) -> Result<()> {
        if self.row_norm >= 1.0 - STRICT_BALL_MARGIN {
            Err(Error::NotStrictContraction(self.row_norm))
        } else {
            Ok(())
        }
    }
}

/// `Delta_X = (I - sum X_i X_i^*)^{1/2}`.
pub fn defect(x: &OperatorTuple) -> Result<CMatrix> {
    x.require_strict()?;
    let mut d = identity(x.dim());
    for m in x.matrices() {
        d -= m * m.adjoint();
    }
    psd_sqrt(&d)
}

/// `R_X = sum_i R_i^(N) (x) X_i^*`.
pub fn reconstruction_operator(ft: &FockTrunc, x: &OperatorTuple) -> Result<CMatrix> {
    x.check_against(ft)?;
    let size = ft.dim() * x.dim();
    cmatrix::check_size(size, size)?;
    let mut out = zeros(size, size);
    for i in 1..=ft.n() {
        out += kron(ft.right_creation(i)?, &x.get(i).adjoint())?;
    }
    Ok(out)
}

/// `B_X = (I (x) Delta_X)(I - R_X)^{-1}`, the resolvent obtained by LU.
pub fn berezin_kernel(ft: &FockTrunc, x: &OperatorTuple) -> Result<CMatrix> {
    let delta = defect(x)?;
    let r = reconstruction_operator(ft, x)?;
    let size = r.nrows();
    let resolvent = cmatrix::solve(&(identity(size) - &r), &identity(size))?;
    Ok(kron(&identity(ft.dim()), &delta)? * resolvent)
}

/// `K_X`: the `(dim p) x p` matrix whose block at `e_alpha` is `Delta_X X_alpha^*`.
pub fn poisson_kernel(ft: &FockTrunc, x: &OperatorTuple) -> Result<CMatrix> {
    x.check_against(ft)?;
    let delta = defect(x)?;
    let p = x.dim();
    cmatrix::check_size(ft.dim() * p, p)?;
    let words = x.word_products(ft.depth());
    let mut k = zeros(ft.dim() * p, p);
    for (a, xa) in words.iter().enumerate() {
        k.view_mut((a * p, 0), (p, p)).copy_from(&(&delta * xa.adjoint()));
    }
    Ok(k)
}

/// `(I_q (x) K_X)^* (F (x) I_p) (I_q (x) K_X)` for `F` acting on `C^q (x) P^(N)`.
pub fn poisson_transform(ft: &FockTrunc, f: &CMatrix, x: &OperatorTuple) -> Result<CMatrix> {
    let dim = ft.dim();
    if !f.is_square() || !f.nrows().is_multiple_of(dim) || f.nrows() == 0 {
        return Err(Error::Shape(format!(
            "symbol of shape {:?} does not act on C^q (x) P^({})",
            f.shape(),
            ft.depth()
        )));
    }
    let k = poisson_kernel(ft, x)?;
    Ok(sandwich_blocks(f, &k, f.nrows() / dim, dim, x.dim()))
}

/// `sum_{a,b} F[(s,a),(t,b)] K_a^* K_b` assembled into a `(q p) x (q p)` matrix.
fn sandwich_blocks(f: &CMatrix, k: &CMatrix, q: usize, dim: usize, p: usize) -> CMatrix {
    let mut out = zeros(q * p, q * p);
    let mut acc = zeros(dim * p, p);
    for s in 0..q {
        for t in 0..q {
            acc.fill(C64::new(0.0, 0.0));
            let mut any = false;
            for a in 0..dim {
                for b in 0..dim {
                    let fab = f[(s * dim + a, t * dim + b)];
                    if fab.re == 0.0 && fab.im == 0.0 {
                        continue;
                    }
                    any = true;
                    let kb = k.view((b * p, 0), (p, p)).into_owned();
                    let mut dst = acc.view_mut((a * p, 0), (p, p));
                    dst += kb * fab;
                }
            }
            if any {
                let block = k.adjoint() * &acc;
                out.view_mut((s * p, t * p), (p, p)).copy_from(&block);
            }
        }
    }
    out
}

/// A weighted pair of vectors in `P^(N)`; the functional it induces is
/// `A -> weight <A xi, eta>`.
#[derive(Clone, Debug)]
pub struct VectorState {
    pub weight: f64,
    pub xi: DVector<C64>,
    pub eta: DVector<C64>,
}

/// `mu~[B_X^* (F (x) I) B_X]` for a functional with a vector-state realization.
pub fn berezin_transform(
    ft: &FockTrunc,
    mu: &MomentFunctional,
    f: &CMatrix,
    x: &OperatorTuple,
) -> Result<CMatrix> {
    x.check_against(ft)?;
    let states = mu.realization().ok_or(Error::NoRealization)?;
    if states.depth != ft.depth() || states.n != ft.n() {
        return Err(Error::Shape("realization lives on a different truncation".into()));
    }
    if f.shape() != (ft.dim(), ft.dim()) {
        return Err(Error::Shape(format!("symbol must be {0}x{0}", ft.dim())));
    }
    let delta = defect(x)?;
    let p = x.dim();
    let mut out = zeros(p, p);
    for st in &states.states {
        if st.weight == 0.0 {
            continue;
        }
        let bxi = FockColumns::from_vector(ft, &st.xi, p)
            .resolvent(x)
            .with_defect(&delta)
            .to_dense();
        let beta = FockColumns::from_vector(ft, &st.eta, p)
            .resolvent(x)
            .with_defect(&delta)
            .to_dense();
        let mut fb = zeros(ft.dim() * p, p);
        for a in 0..ft.dim() {
            for b in 0..ft.dim() {
                let fab = f[(a, b)];
                if fab != C64::new(0.0, 0.0) {
                    let src = bxi.view((b * p, 0), (p, p)).into_owned();
                    let mut dst = fb.view_mut((a * p, 0), (p, p));
                    dst += src * fab;
                }
            }
        }
        out += (beta.adjoint() * fb).scale(st.weight);
    }
    Ok(out)
}

/// Block columns in `P^(N) (x) C^p`, stored per degree: `levels[k]` has
/// `n^k * p` rows ordered by (word position, component). A level with no
/// rows is identically zero and is only allocated once written.
#[derive(Clone, Debug)]
pub struct FockColumns {
    n: usize,
    p: usize,
    cols: usize,
    levels: Vec<CMatrix>,
}

impl FockColumns {
    pub fn zeros(n: usize, depth: usize, p: usize, cols: usize) -> Self {
        FockColumns { n, p, cols, levels: vec![zeros(0, cols); depth + 1] }
    }

    fn level_rows(&self, k: usize) -> usize {
        self.n.pow(k as u32) * self.p
    }

    fn level_mut(&mut self, k: usize) -> &mut CMatrix {
        if self.levels[k].nrows() == 0 {
            self.levels[k] = zeros(self.level_rows(k), self.cols);
        }
        &mut self.levels[k]
    }

    /// Columns `e_beta (x) e_s` for every `|beta| <= k`, ordered `(beta, s)`.
    pub fn unit_columns(ft: &FockTrunc, p: usize, k: usize) -> Self {
        let cols = ft.basis().dim_upto(k) * p;
        let mut out = Self::zeros(ft.n(), ft.depth(), p, cols);
        for a in 0..ft.basis().dim_upto(k) {
            let deg = ft.basis().degree_of(a);
            let pos = a - ft.basis().level(deg).start;
            let level = out.level_mut(deg);
            for s in 0..p {
                level[(pos * p + s, a * p + s)] = real(1.0);
            }
        }
        out
    }

    /// `xi (x) I_p` as `p` columns.
    pub fn from_vector(ft: &FockTrunc, xi: &DVector<C64>, p: usize) -> Self {
        let mut out = Self::zeros(ft.n(), ft.depth(), p, p);
        for (a, &z) in xi.iter().enumerate() {
            if z == C64::new(0.0, 0.0) {
                continue;
            }
            let deg = ft.basis().degree_of(a);
            let pos = a - ft.basis().level(deg).start;
            let level = out.level_mut(deg);
            for s in 0..p {
                level[(pos * p + s, s)] = z;
            }
        }
        out
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn is_zero(&self) -> bool {
        self.levels.iter().all(|l| l.iter().all(|z| z.re == 0.0 && z.im == 0.0))
    }

    /// `R_X v` with `R_X = sum R_i (x) X_i^*`.
    pub fn apply_reconstruction(&self, x: &OperatorTuple) -> Self {
        let (n, p) = (self.n, self.p);
        let depth = self.levels.len() - 1;
        let mut out = Self::zeros(n, depth, p, self.cols);
        let adj: Vec<CMatrix> = x.matrices().iter().map(|m| m.adjoint()).collect();
        for k in 0..depth {
            let src = &self.levels[k];
            if src.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            let count = n.pow(k as u32);
            let dst = out.level_mut(k + 1);
            for pos in 0..count {
                let block = src.rows(pos * p, p);
                for (i, xi) in adj.iter().enumerate() {
                    let t = pos * n + i;
                    dst.rows_mut(t * p, p).copy_from(&(xi * block));
                }
            }
        }
        out
    }

    /// `(I - R_X)^{-1} v = sum_j R_X^j v`; exact because the truncated `R_X` is nilpotent.
    pub fn resolvent(&self, x: &OperatorTuple) -> Self {
        let mut acc = self.clone();
        let mut term = self.clone();
        for _ in 0..self.levels.len() {
            term = term.apply_reconstruction(x);
            if term.is_zero() {
                break;
            }
            for (k, t) in term.levels.iter().enumerate() {
                if t.nrows() > 0 {
                    *acc.level_mut(k) += t;
                }
            }
        }
        acc
    }

    /// `(I (x) D) v`.
    pub fn with_defect(mut self, d: &CMatrix) -> Self {
        let p = self.p;
        for level in &mut self.levels {
            for pos in 0..level.nrows() / p {
                let block = d * level.rows(pos * p, p);
                level.rows_mut(pos * p, p).copy_from(&block);
            }
        }
        self
    }

    /// `self^* other`.
    pub fn gram(&self, other: &FockColumns) -> CMatrix {
        let mut g = zeros(self.cols, other.cols);
        for (a, b) in self.levels.iter().zip(&other.levels) {
            if a.nrows() > 0 && b.nrows() > 0 {
                g += cmatrix::ad_mul(a, b);
            }
        }
        g
    }

    pub fn to_dense(&self) -> CMatrix {
        let rows: usize = (0..self.levels.len()).map(|k| self.level_rows(k)).sum();
        let mut out = zeros(rows, self.cols);
        let mut r = 0;
        for (k, l) in self.levels.iter().enumerate() {
            if l.nrows() > 0 {
                out.rows_mut(r, l.nrows()).copy_from(l);
            }
            r += self.level_rows(k);
        }
        out
    }
}

/// `Q_k B_X^* B_X Q_k`, computed column-wise without forming `B_X`.
pub fn berezin_gram_compressed(ft: &FockTrunc, x: &OperatorTuple, k: usize) -> Result<CMatrix> {
    x.check_against(ft)?;
    if k > ft.depth() {
        return Err(Error::Degree { degree: k, max: ft.depth() });
    }
    let delta = defect(x)?;
    let cols = FockColumns::unit_columns(ft, x.dim(), k).resolvent(x).with_defect(&delta);
    Ok(cols.gram(&cols))
}

/// `K_X^* K_X` accumulated level by level; works beyond the dense size limit.
pub fn poisson_kernel_gram(ft: &FockTrunc, x: &OperatorTuple) -> Result<CMatrix> {
    x.check_against(ft)?;
    let delta = defect(x)?;
    let cols = FockColumns::unit_columns(ft, x.dim(), 0).resolvent(x).with_defect(&delta);
    Ok(cols.gram(&cols))
}

/// Geometric tail `r^{N+1} / sqrt(1 - r^2)` of the Poisson kernel beyond degree `N`.
pub fn tail_bound(r: f64, depth: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::NotStrictContraction(r));
    }
    Ok(r.powi(depth as i32 + 1) / (1.0 - r * r).sqrt())
}

/// Minimal isometric dilation of a row contraction, truncated to `P^(N)` in
/// the defect part: `V_i = [[T_i, 0], [Delta_i, S_i^(N) (x) I]]` on
/// `C^p (+) (P^(N) (x) C^{np})`.
#[derive(Clone, Debug)]
pub struct IsometricDilation {
    pub tuple: OperatorTuple,
    /// `p`, the dimension of the dilated space.
    pub base_dim: usize,
    pub fock_dim: usize,
    /// `n p`; the full defect space is kept.
    pub defect_dim: usize,
    /// Numerical rank of `D_T` (relative threshold `1e-10`), reported only.
    pub defect_rank: usize,
    depth: usize,
    n: usize,
}

impl IsometricDilation {
    /// Projection onto `C^p (+) (P^(N-1) (x) C^{np})`, where the dilation is isometric.
    pub fn safe_projection(&self) -> CMatrix {
        let size = self.tuple.dim();
        let mut q = zeros(size, size);
        let keep = if self.depth == 0 {
            0
        } else {
            crate::freeword::basis_size(self.n, self.depth - 1)
        };
        for i in 0..self.base_dim + keep * self.defect_dim {
            q[(i, i)] = real(1.0);
        }
        q
    }

    /// Embedding of `C^p` as the first summand.
    pub fn embedding(&self) -> CMatrix {
        let mut e = zeros(self.tuple.dim(), self.base_dim);
        for i in 0..self.base_dim {
            e[(i, i)] = real(1.0);
        }
        e
    }
}

pub fn isometric_dilation(t: &OperatorTuple, depth: usize) -> Result<IsometricDilation> {
    if t.row_norm() > 1.0 + 1e-12 {
        return Err(Error::NotContraction(t.row_norm()));
    }
    let (n, p) = (t.n(), t.dim());
    let np = n * p;
    // D_T = ([delta_ij I - T_i^* T_j])^{1/2} on C^{np}
    let mut gram = identity(np);
    for i in 0..n {
        for j in 0..n {
            let b = t.matrices()[i].adjoint() * &t.matrices()[j];
            let mut dst = gram.view_mut((i * p, j * p), (p, p));
            dst -= b;
        }
    }
    let eig = cmatrix::hermitian_eig(&gram)?;
    let top = eig.eigenvalues.last().copied().unwrap_or(0.0).abs().max(1.0);
    let defect_rank = eig.eigenvalues.iter().filter(|&&l| l > 1e-10 * top).count();
    let d = eig.reconstruct_with(|l| l.max(0.0).sqrt());

    let ft = FockTrunc::new(n, depth)?;
    let fock_dim = ft.dim();
    let size = p + fock_dim * np;
    cmatrix::check_size(size, size)?;
    let mut mats = Vec::with_capacity(n);
    for i in 1..=n {
        let mut v = zeros(size, size);
        v.view_mut((0, 0), (p, p)).copy_from(t.get(i));
        // Delta_i h = e_0 (x) D_T (0, .., h, .., 0): column block i of D_T in the degree-0 slot
        v.view_mut((p, 0), (np, p)).copy_from(&d.view((0, (i - 1) * p), (np, p)));
        let shift = kron(ft.left_creation(i)?, &identity(np))?;
        v.view_mut((p, p), (fock_dim * np, fock_dim * np)).copy_from(&shift);
        mats.push(v);
    }
    Ok(IsometricDilation {
        tuple: OperatorTuple::new(mats)?,
        base_dim: p,
        fock_dim,
        defect_dim: np,
        defect_rank,
        depth,
        n,
    })
}

/// Complex unit vector helper used by vector-state constructions.
pub fn basis_vector(ft: &FockTrunc, w: &Word) -> Result<DVector<C64>> {
    let idx = ft
        .basis()
        .index_of(w)
        .ok_or_else(|| Error::InvalidWord(format!("{w} not in P^({})", ft.depth())))?;
    let mut v = DVector::from_element(ft.dim(), c64(0.0, 0.0));
    v[idx] = real(1.0);
    Ok(v)
}
