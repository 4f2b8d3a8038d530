//! Acceptance suites shared by the `acceptance` test target and `ncball selftest`.
//!
//! Every suite is deterministic given the seed and reports one verdict with a
//! short numeric summary. The runtime budget is part of the verdict.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::caratheodory::{
    cayley_route, cf_check, cf_to_caratheodory, check_feasibility, extend, verify_solution, CFProblem,
    CaratheodoryProblem, ExtendOptions,
};
use crate::cmatrix::{self, identity, max_abs, operator_norm, real, scalar, zeros, CMatrix};
use crate::error::Result;
use crate::fock::{self, FockTrunc, OperatorTuple, VectorState};
use crate::freeword::{GradedBasis, Word};
use crate::pluriharmonic::{self, check_positive, coefficient_bound_check, harnack_check, mean_value_check, real_part};
use crate::series::{self, eval_at_creation, truncated_cayley, Direction, FreeSeries};
use crate::testing::{self, random_matrix, random_nilpotent_tuple, random_series, random_tuple_with_norm, random_unit_vector, TestRng};
use crate::transforms::{diagonal_state, fejer_check, positivity_equivalence_check, radial_operator, MomentFunctional};

pub const DEFAULT_SEED: u64 = 20240917;

#[derive(Clone, Copy, Debug)]
pub struct Context {
    pub seed: u64,
    /// Deliberately corrupts one ingredient so that the run must fail.
    pub canary: bool,
}

impl Context {
    pub fn new(seed: u64) -> Self {
        Context { seed, canary: false }
    }

    fn rng(&self, suite: usize) -> TestRng {
        testing::rng(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(suite as u64))
    }
}

pub struct Suite {
    pub id: usize,
    pub name: &'static str,
    pub budget: Duration,
    run: fn(&Context) -> Result<Verdict>,
}

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: String) -> Self {
        Verdict { passed, detail }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:02} {:<28} {:>8.3}s / {:>4}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub const SUITES: &[Suite] = &[
    Suite { id: 1, name: "creation-algebra", budget: secs(1), run: creation_algebra },
    Suite { id: 2, name: "cayley-bijection", budget: secs(10), run: cayley_bijection },
    Suite { id: 3, name: "cayley-composition-oracle", budget: secs(5), run: cayley_composition_oracle },
    Suite { id: 4, name: "poisson-kernel-factorization", budget: secs(20), run: poisson_kernel_factorization },
    Suite { id: 5, name: "poisson-transform-identities", budget: secs(10), run: poisson_transform_identities },
    Suite { id: 6, name: "mean-value-property", budget: secs(10), run: mean_value_property },
    Suite { id: 7, name: "harnack-coefficient-bounds", budget: secs(20), run: harnack_and_coefficients },
    Suite { id: 8, name: "fejer-sharpness", budget: secs(5), run: fejer_sharpness },
    Suite { id: 9, name: "feasibility-classical-oracle", budget: secs(5), run: feasibility_oracle },
    Suite { id: 10, name: "extension-solver", budget: secs(120), run: extension_solver },
    Suite { id: 11, name: "reduction-round-trip", budget: secs(10), run: reduction_round_trip },
    Suite { id: 12, name: "positivity-equivalences", budget: secs(30), run: positivity_equivalences },
];

pub fn run_suite(suite: &Suite, ctx: &Context) -> Outcome {
    let start = Instant::now();
    let verdict = (suite.run)(ctx).unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
    let elapsed = start.elapsed();
    let in_time = elapsed <= suite.budget;
    let detail = if in_time { verdict.detail } else { format!("{} (over budget)", verdict.detail) };
    Outcome {
        id: suite.id,
        name: suite.name,
        passed: verdict.passed && in_time,
        detail,
        elapsed,
        budget: suite.budget,
    }
}

pub fn run_all(ctx: &Context) -> Vec<Outcome> {
    SUITES.iter().map(|s| run_suite(s, ctx)).collect()
}

fn w(s: &str) -> Word {
    s.parse().expect("valid word literal")
}

fn power_word(i: usize, k: usize) -> Word {
    Word::from_letters(std::iter::repeat_n(i, k)).expect("valid letter")
}

/// Positive scalar functional `sum_j weight_j <. xi_j, xi_j>` with each `xi_j`
/// supported on words of length `<= support_degree`.
fn random_state_mixture(
    g: &mut TestRng,
    ft: &FockTrunc,
    support_degree: usize,
    count: usize,
    cutoff: usize,
) -> Result<MomentFunctional> {
    let support = ft.basis().dim_upto(support_degree);
    let states: Vec<VectorState> = (0..count)
        .map(|_| diagonal_state(g.random_range(0.2..1.0), random_unit_vector(g, ft.dim(), support)))
        .collect();
    MomentFunctional::from_vector_states(ft, states, cutoff)
}

fn creation_algebra(ctx: &Context) -> Result<Verdict> {
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        for depth in 1..=4 {
            let ft = FockTrunc::new(n, depth)?;
            let q = ft.degree_projection(depth - 1)?;
            for i in 1..=n {
                let mut si = ft.left_creation(i)?.clone();
                if ctx.canary && n == 1 && depth == 1 {
                    si[(1, 0)] += real(1e-6);
                }
                for j in 1..=n {
                    let sj = ft.left_creation(j)?;
                    let rj = ft.right_creation(j)?;
                    let expect = if i == j { q.clone() } else { zeros(ft.dim(), ft.dim()) };
                    worst = worst.max(max_abs(&(si.adjoint() * sj - expect)));
                    worst = worst.max(max_abs(&(&si * rj - rj * &si)));
                }
            }
        }
    }
    Ok(Verdict::new(worst <= 1e-13, format!("max entry error {worst:.2e}")))
}

fn cayley_bijection(ctx: &Context) -> Result<Verdict> {
    let mut g = ctx.rng(2);
    let mut formal: f64 = 0.0;
    for _ in 0..200 {
        let n = g.random_range(1..=3);
        let cutoff = g.random_range(1..=6);
        let p = g.random_range(1..=2);
        let f = random_series(&mut g, n, cutoff, p, 0.5, true);
        formal = formal.max(f.cayley_forward()?.cayley_inverse()?.max_coeff_diff(&f));
        formal = formal.max(f.cayley_inverse()?.cayley_forward()?.max_coeff_diff(&f));
    }
    let mut truncated: f64 = 0.0;
    let mut intertwining: f64 = 0.0;
    for _ in 0..40 {
        let n = g.random_range(1..=3);
        let m = g.random_range(1..=4);
        let p = g.random_range(1..=2);
        let ft = FockTrunc::new(n, m)?;
        let f = random_series(&mut g, n, m, p, 0.5, true);
        let y = eval_at_creation(&f, m)?;
        let x = truncated_cayley(&y, &ft, Direction::Forward)?;
        truncated = truncated.max(max_abs(&(truncated_cayley(&x, &ft, Direction::Inverse)? - &y)));
        let x = truncated_cayley(&y, &ft, Direction::Inverse)?;
        truncated = truncated.max(max_abs(&(truncated_cayley(&x, &ft, Direction::Forward)? - &y)));

        let norm = operator_norm(&y);
        let f = if norm > 0.0 { f.scale(real(g.random_range(0.5..1.0) / norm)) } else { f };
        let y = eval_at_creation(&f, m)?;
        for dir in [Direction::Forward, Direction::Inverse] {
            let lhs = truncated_cayley(&y, &ft, dir)?;
            let rhs = eval_at_creation(&f.cayley(dir)?, m)?;
            intertwining = intertwining.max(max_abs(&(lhs - rhs)));
        }
    }
    let passed = formal <= 1e-10 && truncated <= 1e-12 && intertwining <= 1e-10;
    Ok(Verdict::new(
        passed,
        format!("formal {formal:.2e}, truncated {truncated:.2e}, intertwining {intertwining:.2e}"),
    ))
}

/// Sum over all factorizations `w = gamma_1 ... gamma_j` into nonempty words
/// of `A_{gamma_1} ... A_{gamma_j}`.
fn composition_sum(f: &FreeSeries, word: &Word) -> CMatrix {
    let letters: Vec<usize> = word.letters().collect();
    let k = letters.len();
    let p = f.shape().0;
    let mut sum = zeros(p, p);
    if k == 0 {
        return sum;
    }
    for cuts in 0u32..(1 << (k - 1)) {
        let mut prod = identity(p);
        let mut start = 0;
        for pos in 0..k {
            if pos == k - 1 || cuts & (1 << pos) != 0 {
                let piece = Word::from_letters(letters[start..=pos].iter().copied()).expect("valid letters");
                prod *= f.coeff(&piece);
                start = pos + 1;
            }
        }
        sum += prod;
    }
    sum
}

fn cayley_composition_oracle(ctx: &Context) -> Result<Verdict> {
    let mut g = ctx.rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = g.random_range(1..=3);
        let degree = g.random_range(1..=5);
        let p = g.random_range(1..=2);
        let f = random_series(&mut g, n, degree, p, 0.5, true);
        let c = f.cayley_forward()?;
        for word in GradedBasis::enumerate(n, degree)?.words().iter().skip(1) {
            worst = worst.max(max_abs(&(c.coeff(word) - composition_sum(&f, word))));
        }
    }
    Ok(Verdict::new(worst <= 1e-12, format!("max coefficient error {worst:.2e}")))
}

fn poisson_kernel_factorization(ctx: &Context) -> Result<Verdict> {
    const DEPTH: usize = 8;
    // cap on the compression degree; keeps the structured columns small when nu is small
    const MAX_COMPRESSION: usize = 2;
    let mut g = ctx.rng(4);
    let mut isometry: f64 = 0.0;
    let mut factor: f64 = 0.0;
    for _ in 0..100 {
        let n = g.random_range(1..=3);
        let dim = g.random_range(1..=6);
        let ft = FockTrunc::new(n, DEPTH)?;
        let norm = g.random_range(0.3..0.95);
        let x = random_nilpotent_tuple(&mut g, n, dim, norm);
        let nu = series::jsr_estimate(&x, dim).nilpotent_order.unwrap_or(dim);
        isometry = isometry.max(max_abs(&(fock::poisson_kernel_gram(&ft, &x)? - identity(dim))));
        let k = (DEPTH - nu).min(MAX_COMPRESSION);
        let p = pluriharmonic::pluriharmonic_kernel_compressed(&ft, &x, k)?;
        let bb = fock::berezin_gram_compressed(&ft, &x, k)?;
        factor = factor.max(max_abs(&(p - bb)));
    }
    let mut radial_ok = true;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..25 {
        let n = g.random_range(1..=2);
        let dim = g.random_range(1..=3);
        let r = g.random_range(0.2..0.6);
        let ft = FockTrunc::new(n, DEPTH)?;
        let x = random_tuple_with_norm(&mut g, n, dim, r);
        let bound = 5.0 * fock::tail_bound(r, DEPTH)?;
        let iso = operator_norm(&(fock::poisson_kernel_gram(&ft, &x)? - identity(dim)));
        let k = DEPTH / 2;
        let p = pluriharmonic::pluriharmonic_kernel_compressed(&ft, &x, k)?;
        let fac = operator_norm(&(p - fock::berezin_gram_compressed(&ft, &x, k)?));
        worst_ratio = worst_ratio.max(iso.max(fac) / bound);
        radial_ok &= iso <= bound && fac <= bound;
    }
    let passed = isometry <= 1e-11 && factor <= 1e-11 && radial_ok;
    Ok(Verdict::new(
        passed,
        format!("K*K-I {isometry:.2e}, P-B*B {factor:.2e}, norm-r discrepancy/bound {worst_ratio:.2e}"),
    ))
}

fn poisson_transform_identities(ctx: &Context) -> Result<Verdict> {
    let mut g = ctx.rng(5);
    let mut at_zero: f64 = 0.0;
    for _ in 0..10 {
        let n = g.random_range(1..=3);
        let depth = g.random_range(1..=3);
        let ft = FockTrunc::new(n, depth)?;
        let f = random_matrix(&mut g, ft.dim(), ft.dim());
        let p = g.random_range(1..=3);
        let got = fock::poisson_transform(&ft, &f, &OperatorTuple::zero(n, p))?;
        at_zero = at_zero.max(max_abs(&(got - identity(p) * f[(0, 0)])));
    }
    let mut words_err: f64 = 0.0;
    for _ in 0..6 {
        let n = g.random_range(1..=2);
        let dim = g.random_range(1..=3);
        let ft = FockTrunc::new(n, 3 + dim)?;
        let norm = g.random_range(0.3..0.95);
        let x = random_nilpotent_tuple(&mut g, n, dim, norm);
        let basis = GradedBasis::enumerate(n, 3)?;
        let lefts: Vec<CMatrix> = basis.words().iter().map(|a| ft.left_word(a)).collect::<Result<_>>()?;
        for (a, sa) in basis.words().iter().zip(&lefts) {
            for (b, sb) in basis.words().iter().zip(&lefts) {
                let got = fock::poisson_transform(&ft, &(sa * sb.adjoint()), &x)?;
                words_err = words_err.max(max_abs(&(got - x.word(a) * x.word(b).adjoint())));
            }
        }
    }
    let passed = at_zero <= 1e-11 && words_err <= 1e-11;
    Ok(Verdict::new(passed, format!("P_0 {at_zero:.2e}, S_a S_b* {words_err:.2e}")))
}

fn mean_value_property(ctx: &Context) -> Result<Verdict> {
    let mut g = ctx.rng(6);
    let r = 0.9;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = g.random_range(1..=2);
        let cutoff = g.random_range(1..=3);
        let q = g.random_range(1..=2);
        let dim = g.random_range(2..=3);
        let h = real_part(&random_series(&mut g, n, cutoff, q, 1.0, false))?;
        let norm = g.random_range(0.1..0.85);
        let x = random_nilpotent_tuple(&mut g, n, dim, norm);
        let nu = series::jsr_estimate(&x, dim).nilpotent_order.unwrap_or(dim);
        let rep = mean_value_check(&h, &x, r, nu + cutoff)?;
        worst = worst.max(rep.discrepancy);
    }
    Ok(Verdict::new(worst <= 1e-9, format!("max discrepancy {worst:.2e}")))
}

fn harnack_and_coefficients(ctx: &Context) -> Result<Verdict> {
    let mut g = ctx.rng(7);
    let mut min_eig = f64::INFINITY;
    let mut positive = true;
    let mut harnack = true;
    let mut coefficients = true;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..50 {
        let n = g.random_range(1..=2);
        let degree = g.random_range(1..=2);
        let ft = FockTrunc::new(n, 2 * degree)?;
        let count = g.random_range(1..=3);
        let mu = random_state_mixture(&mut g, &ft, degree, count, degree)?;
        let h = mu.poisson_function()?;
        let pos = check_positive(&h, 4, 1e-10)?;
        positive &= pos.positive;
        min_eig = min_eig.min(pos.min_eigs.iter().copied().fold(f64::INFINITY, f64::min));
        for r in [0.25, 0.5] {
            let samples: Vec<OperatorTuple> = (0..5)
                .map(|_| {
                    let dim = g.random_range(2..=4);
                    let norm = r * g.random_range(0.5..1.0);
                    random_nilpotent_tuple(&mut g, n, dim, norm)
                })
                .collect();
            let rep = harnack_check(&h, &samples, r, 4, 1e-10)?;
            harnack &= rep.holds;
            worst_ratio = rep.values.iter().fold(worst_ratio, |acc, v| acc.max(v / rep.bound));
        }
        coefficients &= coefficient_bound_check(&h, 1e-9)?.holds;
    }
    Ok(Verdict::new(
        positive && harnack && coefficients,
        format!("min eig {min_eig:.2e}, max value/Harnack bound {worst_ratio:.3}, coefficient bound {coefficients}"),
    ))
}

fn fejer_sharpness(ctx: &Context) -> Result<Verdict> {
    let ft = FockTrunc::new(1, 2)?;
    let xi = (fock::basis_vector(&ft, &Word::empty())? + fock::basis_vector(&ft, &w("1"))?) * real(0.5f64.sqrt());
    let mu = MomentFunctional::from_vector_states(&ft, vec![diagonal_state(1.0, xi)], 1)?;
    let rep = fejer_check(&mu, 2, 0.0)?;
    let sharp = (rep.lhs[0] - mu.unit()[(0, 0)].re / 2.0).abs();

    let mut g = ctx.rng(8);
    let mut holds = true;
    let mut slack = f64::INFINITY;
    for _ in 0..50 {
        let n = g.random_range(1..=2);
        let m = g.random_range(2..=4);
        let ft = FockTrunc::new(n, 2 * (m - 1))?;
        let xi = random_unit_vector(&mut g, ft.dim(), ft.basis().dim_upto(m - 1));
        let mu = MomentFunctional::from_vector_states(&ft, vec![diagonal_state(1.0, xi)], m - 1)?;
        let rep = fejer_check(&mu, m, 1e-10)?;
        holds &= rep.holds;
        slack = rep.lhs.iter().zip(&rep.bounds).fold(slack, |acc, (l, b)| acc.min(b - l));
    }
    Ok(Verdict::new(
        sharp <= 1e-15 && holds,
        format!("sharp case error {sharp:.2e}, min slack {slack:.2e}"),
    ))
}

fn feasibility_oracle(ctx: &Context) -> Result<Verdict> {
    let mut g = ctx.rng(9);
    let mut mismatches = 0;
    let mut feasible_count = 0;
    for _ in 0..500 {
        let m = g.random_range(1..=5);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(Word::empty(), scalar(real(g.random_range(0.0..2.0))));
        for k in 1..=m {
            coeffs.insert(power_word(1, k), scalar(testing::random_complex(&mut g) * g.random_range(0.0..0.7)));
        }
        let t = CMatrix::from_fn(m + 1, m + 1, |i, j| {
            if i >= j {
                coeffs[&power_word(1, i - j)][(0, 0)]
            } else {
                coeffs[&power_word(1, j - i)][(0, 0)].conj()
            }
        });
        let classical = cmatrix::min_eig_hermitian(&t)? >= -1e-9;
        let verdict = check_feasibility(&CaratheodoryProblem::new(1, m, coeffs)?, 1e-9)?.feasible;
        feasible_count += usize::from(verdict);
        mismatches += usize::from(verdict != classical);
    }

    let fixture = |n: usize, data: &[(&str, f64)]| -> Result<(bool, f64)> {
        let coeffs = data.iter().map(|(k, v)| (w(k), scalar(real(*v)))).collect();
        let rep = check_feasibility(&CaratheodoryProblem::new(n, 1, coeffs)?, 1e-9)?;
        Ok((rep.feasible, rep.min_eig))
    };
    let a = fixture(1, &[("", 2.0), ("1", 1.0)])?;
    let b = fixture(1, &[("", 2.0), ("1", 3.0)])?;
    let c = fixture(2, &[("", 1.0), ("1", 0.5), ("2", 0.5)])?;
    let fixtures = a.0
        && (a.1 - 1.0).abs() <= 1e-10
        && !b.0
        && (b.1 + 1.0).abs() <= 1e-10
        && c.0
        && (c.1 - (1.0 - 0.5 * 2f64.sqrt())).abs() <= 1e-10;
    Ok(Verdict::new(
        mismatches == 0 && fixtures,
        format!("{mismatches} mismatches in 500 ({feasible_count} feasible), fixtures {fixtures}"),
    ))
}

fn extension_solver(ctx: &Context) -> Result<Verdict> {
    let mut g = ctx.rng(10);
    let mut failures = Vec::new();
    let mut max_iter = 0;
    let mut iterated = 0;
    let mut min_eig = f64::INFINITY;
    let mut min_re_g = f64::INFINITY;
    for trial in 0..30 {
        let n = g.random_range(1..=2);
        let m = g.random_range(1..=2);
        let big_m = m + 2;
        let ft = FockTrunc::new(n, big_m + m)?;
        let mu = random_state_mixture(&mut g, &ft, big_m, 1, m)?;
        let mut coeffs = BTreeMap::new();
        for word in GradedBasis::enumerate(n, m)?.words() {
            let c = if word.is_empty() { mu.unit().clone() } else { mu.backward(&word.reverse()) };
            coeffs.insert(word.clone(), c.scale(2.0));
        }
        let prob = CaratheodoryProblem::new(n, m, coeffs)?;
        let opts = ExtendOptions { tol: 1e-9, max_iter: 5000, slack: None };
        let ext = extend(&prob, big_m, &opts)?;
        let cert = &ext.certificate;
        max_iter = max_iter.max(cert.iterations);
        iterated += usize::from(cert.iterations > 0);
        min_eig = min_eig.min(cert.min_eig_tm);
        let rep = verify_solution(&prob, &ext, 20, ctx.seed.wrapping_add(trial), 1e-8)?;
        min_re_g = min_re_g.min(rep.min_re_g);
        if cert.prescribed_error != 0.0 || cert.min_eig_tm < -1e-8 || !rep.passed || cert.iterations > 5000 {
            failures.push(format!("#{trial}: {:?}", rep.failures));
        }
    }
    Ok(Verdict::new(
        failures.is_empty(),
        format!(
            "min eig T_M {min_eig:.2e}, min Re g {min_re_g:.2e}, {iterated}/30 iterated, max iterations {max_iter}{}",
            if failures.is_empty() { String::new() } else { format!(", failures {}", failures.join("; ")) }
        ),
    ))
}

fn reduction_round_trip(ctx: &Context) -> Result<Verdict> {
    let mut g = ctx.rng(11);
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let n = g.random_range(1..=2);
        let m = g.random_range(0..=2);
        let p = g.random_range(1..=2);
        let coeffs: BTreeMap<Word, CMatrix> = GradedBasis::enumerate(n, m)?
            .words()
            .iter()
            .map(|word| (word.clone(), random_matrix(&mut g, p, p)))
            .collect();
        let raw = CFProblem::new(n, m, p, coeffs)?;
        let target = g.random_range(0.1..0.9) / cf_check(&raw, 0.0)?.norm;
        let cf = CFProblem::new(n, m, p, raw.coeffs().iter().map(|(k, c)| (k.clone(), c.scale(target))).collect())?;
        let back = cayley_route(&cf_to_caratheodory(&cf, 1e-9)?, None)?;
        for word in GradedBasis::enumerate(n, m + 1)?.words().iter().skip(1) {
            let expect = if word.letters().next() == Some(1) {
                cf.coeff(&Word::from_letters(word.letters().skip(1))?)
            } else {
                zeros(p, p)
            };
            worst = worst.max(max_abs(&(back.cf.coeff(word) - expect)));
        }
    }
    Ok(Verdict::new(worst <= 1e-10, format!("max coefficient error {worst:.2e}")))
}

fn positivity_equivalences(ctx: &Context) -> Result<Verdict> {
    let mut g = ctx.rng(12);
    let grid = [0.5, 0.9, 0.99];
    let tol = 1e-8;
    let mut positive_agree = 0;
    let mut indefinite_agree = 0;
    for _ in 0..50 {
        let n = g.random_range(1..=2);
        let degree = g.random_range(1..=2);
        let ft = FockTrunc::new(n, 2 * degree)?;
        let count = g.random_range(1..=3);
        let mu = random_state_mixture(&mut g, &ft, degree, count, degree)?;
        let rep = positivity_equivalence_check(&mu.herglotz_series()?, degree, &grid, tol)?;
        positive_agree += usize::from(rep.radial_positive && rep.kernel_positive && rep.boundary_positive);
    }
    for _ in 0..50 {
        let n = g.random_range(1..=2);
        let cutoff = g.random_range(1..=2);
        let p = g.random_range(1..=2);
        let mut f = random_series(&mut g, n, cutoff, p, 0.5, false);
        let low = cmatrix::min_eig_hermitian(&radial_operator(&f, 0.99, cutoff)?)?;
        let shifted = f.constant() + identity(p).scale(-0.1 - low);
        f.set(Word::empty(), shifted)?;
        let rep = positivity_equivalence_check(&f, cutoff, &grid, tol)?;
        indefinite_agree += usize::from(rep.agree && !rep.radial_positive);
    }
    Ok(Verdict::new(
        positive_agree == 50 && indefinite_agree == 50,
        format!("positive agree {positive_agree}/50, indefinite agree {indefinite_agree}/50"),
    ))
}
