//! Seeded random generators shared by tests, the acceptance suites and the
//! CLI self-test.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cmatrix::{c64, zeros, CMatrix, C64};
use crate::fock::OperatorTuple;
use crate::freeword::GradedBasis;
use crate::series::FreeSeries;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real and imaginary parts uniform in `[-1, 1)`.
pub fn random_complex(g: &mut TestRng) -> C64 {
    c64(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0))
}

pub fn random_matrix(g: &mut TestRng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| random_complex(g))
}

pub fn random_hermitian(g: &mut TestRng, n: usize) -> CMatrix {
    let a = random_matrix(g, n, n);
    (&a + a.adjoint()).scale(0.5)
}

/// Random strictly upper triangular tuple on `C^dim`, scaled to row norm `norm`.
/// Jointly nilpotent of order at most `dim`.
pub fn random_nilpotent_tuple(g: &mut TestRng, n: usize, dim: usize, norm: f64) -> OperatorTuple {
    let mats: Vec<CMatrix> = (0..n)
        .map(|_| {
            let mut m = zeros(dim, dim);
            for i in 0..dim {
                for j in i + 1..dim {
                    m[(i, j)] = random_complex(g);
                }
            }
            m
        })
        .collect();
    rescale(mats, dim, n, norm)
}

/// Random dense tuple scaled to row norm `r`.
pub fn random_tuple_with_norm(g: &mut TestRng, n: usize, dim: usize, r: f64) -> OperatorTuple {
    let mats = (0..n).map(|_| random_matrix(g, dim, dim)).collect();
    rescale(mats, dim, n, r)
}

fn rescale(mats: Vec<CMatrix>, dim: usize, n: usize, norm: f64) -> OperatorTuple {
    let t = OperatorTuple::new(mats).expect("valid tuple");
    if t.row_norm() == 0.0 {
        return OperatorTuple::zero(n, dim);
    }
    t.scaled(norm / t.row_norm())
}

/// Random series with every coefficient of length `<= cutoff` filled; the
/// constant term is dropped when `zero_constant`.
pub fn random_series(
    g: &mut TestRng,
    n: usize,
    cutoff: usize,
    p: usize,
    scale: f64,
    zero_constant: bool,
) -> FreeSeries {
    let basis = GradedBasis::enumerate(n, cutoff).expect("valid basis");
    let mut f = FreeSeries::zero(n, cutoff, (p, p));
    for w in basis.words() {
        if zero_constant && w.is_empty() {
            continue;
        }
        f.set(w.clone(), random_matrix(g, p, p).scale(scale)).expect("valid word");
    }
    f
}

/// Random unit vector supported on words of length `<= max_deg` inside a space of dimension `dim`.
pub fn random_unit_vector(g: &mut TestRng, dim: usize, support: usize) -> DVector<C64> {
    let mut v = DVector::from_element(dim, c64(0.0, 0.0));
    for i in 0..support.min(dim) {
        v[i] = random_complex(g);
    }
    let norm = v.norm();
    if norm > 0.0 {
        v /= c64(norm, 0.0);
    }
    v
}
