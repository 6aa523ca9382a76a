//! Inequality checks, growth sweeps and the numerical experiments.
//!
//! Every check produces [`CheckReport`] rows. A row compares a computed
//! quantity with a bound in a recorded [`Direction`]; rows whose
//! computation exceeds an enumeration guard are marked skipped instead of
//! failing. All rows are pure functions of their inputs and seed.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::constructions::{
    delete_zero_rows, hilbert, kp_tensor, paper_tensor, permuted_hilbert, pn_form, rademacher_l1, tree_branch, Branch,
    Constants,
};
use crate::linalg::{spectral_norm, DenseMatrix, DenseTensor3};
use crate::norms::{opnorm_inf_2, trilinear_norm_ascent, trilinear_norm_exact, Guard};
use crate::projective::{dual_lower_bound, projective_norm_exact, CutPlaneOptions};
use crate::{Error, Result};

/// Tolerance used by the spectral suite.
pub const SPECTRAL_TOL: f64 = 1e-12;
/// Largest `n` for which the `∞→2` norm of `p_n` is enumerated.
pub const REMARK31_ENUM_MAX: usize = 24;
/// Largest `n` accepted by [`check_lemma_32`].
pub const LEMMA32_MAX: usize = 20;
/// Largest `n` for exact projective norms inside the suites.
pub const MAIN2_EXACT_MAX: usize = 3;
pub const KP_EXACT_MAX: usize = 6;
pub const TREE_MAX: usize = 3;
pub const BLOCKS_MAX: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Pass iff `computed ≤ bound`.
    Upper,
    /// Pass iff `computed ≥ bound`.
    Lower,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Upper => "upper",
            Self::Lower => "lower",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "true",
            Self::Fail => "false",
            Self::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub suite: &'static str,
    pub quantity: &'static str,
    pub n: usize,
    pub computed: f64,
    pub bound: f64,
    pub direction: Direction,
    pub status: Status,
    pub runtime: Duration,
    pub witness: Option<String>,
}

impl CheckReport {
    /// Builds a row and sets its status from `direction`. NaN never passes.
    pub fn new(
        suite: &'static str,
        quantity: &'static str,
        n: usize,
        computed: f64,
        bound: f64,
        direction: Direction,
    ) -> Self {
        let pass = match direction {
            Direction::Upper => computed <= bound,
            Direction::Lower => computed >= bound,
        };
        Self {
            suite,
            quantity,
            n,
            computed,
            bound,
            direction,
            status: if pass { Status::Pass } else { Status::Fail },
            runtime: Duration::ZERO,
            witness: None,
        }
    }

    pub fn skipped(
        suite: &'static str,
        quantity: &'static str,
        n: usize,
        bound: f64,
        direction: Direction,
        why: String,
    ) -> Self {
        Self {
            suite,
            quantity,
            n,
            computed: f64::NAN,
            bound,
            direction,
            status: Status::Skipped,
            runtime: Duration::ZERO,
            witness: Some(why),
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.runtime = start.elapsed();
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

/// `H_k = Σ_{l ≤ k} 1/l`.
pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|l| 1.0 / l as f64).sum()
}

/// `Σ_{k=1}^{n-1} H_k`, by direct summation.
pub fn harmonic_cumsum(n: usize) -> f64 {
    let mut h = 0.0;
    let mut s = 0.0;
    for k in 1..n {
        h += 1.0 / k as f64;
        s += h;
    }
    s
}

/// The closed form `n H_{n-1} - (n - 1)` of [`harmonic_cumsum`].
pub fn harmonic_cumsum_closed(n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    n as f64 * harmonic(n - 1) - (n - 1) as f64
}

/// `Σ_{k<n} H_k / (τ √n)`: a lower bound for `‖paper_tensor(n)‖_π` from the
/// dual witness `P_n` and the analytic bound `‖P_n‖ ≤ τ √n`.
pub fn main2_lower_bound(n: usize, constants: &Constants) -> f64 {
    harmonic_cumsum(n) / (constants.tau() * (n as f64).sqrt())
}

/// `Σ_{k<n} H_k / (τ n)`: a lower bound for `‖kp_tensor(n)‖_π` from the dual
/// witness `p_n` and `‖p_n‖_{∞→1} ≤ n ‖p_n‖_{2→2} ≤ τ n`.
pub fn kp_lower_bound(n: usize, constants: &Constants) -> f64 {
    harmonic_cumsum(n) / (constants.tau() * n as f64)
}

/// `Δ √n ln n`.
pub fn main2_target(n: usize, constants: &Constants) -> f64 {
    let x = n as f64;
    constants.delta() * x.sqrt() * x.ln()
}

/// `Δ ln n`.
pub fn kp_target(n: usize, constants: &Constants) -> f64 {
    constants.delta() * (n as f64).ln()
}

/// Which `n` a [`growth_sweep`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stride {
    /// `n_min, n_min + step, …` and `n_max`.
    Every(usize),
    /// `n_min, 2 n_min, 4 n_min, …` and `n_max`.
    Doubling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    pub harmonic_cumsum: f64,
    pub main2_lower: f64,
    pub main2_target: f64,
    pub kp_lower: f64,
    pub kp_target: f64,
}

impl GrowthRow {
    /// `harmonic_cumsum ≥ ½ n ln n` and both lower bounds above their targets.
    pub fn holds(&self) -> bool {
        let x = self.n as f64;
        self.harmonic_cumsum >= 0.5 * x * x.ln()
            && self.main2_lower >= self.main2_target
            && self.kp_lower >= self.kp_target
    }
}

/// Iterator behind [`growth_sweep`]. The cumulative harmonic sum is carried
/// forward, so a sweep to `n_max` costs `O(n_max)` and agrees bit for bit
/// with [`harmonic_cumsum`].
#[derive(Debug, Clone)]
pub struct GrowthSweep {
    constants: Constants,
    n: usize,
    h: f64,
    s: f64,
    n_min: usize,
    n_max: usize,
    next_report: usize,
    stride: Stride,
}

impl Iterator for GrowthSweep {
    type Item = GrowthRow;

    fn next(&mut self) -> Option<GrowthRow> {
        while self.n < self.n_max {
            // Advance from n to n + 1: H_n and Σ_{k≤n} H_k.
            self.h += 1.0 / self.n as f64;
            self.s += self.h;
            self.n += 1;
            if self.n == self.next_report || self.n == self.n_max {
                if self.n == self.next_report {
                    self.next_report = match self.stride {
                        Stride::Every(step) => self.n + step,
                        Stride::Doubling => self.n * 2,
                    };
                }
                if self.n < self.n_min {
                    continue;
                }
                let (x, tau) = (self.n as f64, self.constants.tau());
                return Some(GrowthRow {
                    n: self.n,
                    harmonic_cumsum: self.s,
                    main2_lower: self.s / (tau * x.sqrt()),
                    main2_target: main2_target(self.n, &self.constants),
                    kp_lower: self.s / (tau * x),
                    kp_target: kp_target(self.n, &self.constants),
                });
            }
        }
        None
    }
}

/// Table of the scalar growth chain for `n` in `[n_min, n_max]`.
pub fn growth_sweep(n_min: usize, n_max: usize, stride: Stride, constants: &Constants) -> Result<GrowthSweep> {
    if n_min < 2 || n_max < n_min {
        return Err(Error::InvalidArgument(format!("growth sweep needs 2 <= n_min <= n_max, got {n_min}..{n_max}")));
    }
    if stride == Stride::Every(0) {
        return Err(Error::InvalidArgument("growth sweep stride must be positive".into()));
    }
    Ok(GrowthSweep { constants: *constants, n: 1, h: 0.0, s: 0.0, n_min, n_max, next_report: n_min, stride })
}

/// Spectral and `∞→2` checks for `h_n` and its row reversal `p_n`:
/// (a) both spectral estimates agree, (b) `‖h_n‖₂ ≤ τ`, (c) `‖p_n‖_{∞→2} ≤ τ √n`.
pub fn check_remark_31(n: usize, constants: &Constants, guard: Guard) -> Result<Vec<CheckReport>> {
    const SUITE: &str = "remark31";
    let start = Instant::now();
    let h = hilbert(n)?;
    let p = permuted_hilbert(n)?;
    let sh = spectral_norm(&h, SPECTRAL_TOL)?;
    let sp = spectral_norm(&p, SPECTRAL_TOL)?;
    let a = CheckReport::new(SUITE, "spectral_agreement", n, (sh.upper - sp.upper).abs(), 1e-9, Direction::Upper)
        .timed(start);
    let b = CheckReport::new(SUITE, "spectral_h", n, sh.upper, constants.tau(), Direction::Upper)
        .with_witness(format!("iterations={}", sh.iterations))
        .timed(start);

    let start = Instant::now();
    let bound = constants.tau() * (n as f64).sqrt();
    let c = if n > REMARK31_ENUM_MAX {
        CheckReport::skipped(SUITE, "inf2_p", n, bound, Direction::Upper, format!("n > {REMARK31_ENUM_MAX}"))
    } else {
        match opnorm_inf_2(&p, guard) {
            Ok(w) => CheckReport::new(SUITE, "inf2_p", n, w.value, bound, Direction::Upper).with_witness(w.describe()),
            Err(Error::TooLarge { bits, limit }) => {
                CheckReport::skipped(SUITE, "inf2_p", n, bound, Direction::Upper, format!("guard {bits}>{limit}"))
            }
            Err(e) => return Err(e),
        }
    };
    Ok(vec![a, b, c.timed(start)])
}

fn lemma32_rng(seed: u64, n: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// `‖Σ a_i g_i^n‖₁ - ‖a‖₂` maximized over `trials` standard normal `a` plus
/// the equality case `a = 5 e_1`; passes when the excess is at most `1e-12`.
pub fn check_lemma_32(n: usize, trials: usize, seed: u64) -> Result<CheckReport> {
    if n > LEMMA32_MAX {
        return Err(Error::InvalidArgument(format!("check_lemma_32 needs n <= {LEMMA32_MAX}, got {n}")));
    }
    let start = Instant::now();
    let g = rademacher_l1(n)?;
    let dim = 1usize << n;
    let mut rng = lemma32_rng(seed, n);
    let mut coefficients: Vec<Vec<f64>> = Vec::with_capacity(trials + 1);
    let mut single = vec![0.0; n];
    single[0] = 5.0;
    coefficients.push(single);
    for _ in 0..trials {
        coefficients.push((0..n).map(|_| rng.sample(StandardNormal)).collect());
    }

    let excess = |a: &Vec<f64>| {
        let mut sum = vec![0.0; dim];
        for (ai, gi) in a.iter().zip(&g.vectors) {
            for (s, v) in sum.iter_mut().zip(gi.as_slice()) {
                *s += ai * v;
            }
        }
        let l1: f64 = sum.iter().map(|v| v.abs()).sum();
        let l2 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        l1 - l2
    };
    let (worst, trial) = coefficients.par_iter().enumerate().map(|(t, a)| (excess(a), t)).reduce(
        || (f64::NEG_INFINITY, usize::MAX),
        |x, y| match x.0.total_cmp(&y.0) {
            std::cmp::Ordering::Greater => x,
            std::cmp::Ordering::Less => y,
            std::cmp::Ordering::Equal => {
                if x.1 <= y.1 {
                    x
                } else {
                    y
                }
            }
        },
    );
    Ok(CheckReport::new("lemma32", "l1_minus_l2", n, worst, 1e-12, Direction::Upper)
        .with_witness(format!("trial={trial}"))
        .timed(start))
}

/// Exact trilinear norm of `pn_form(n)` against `τ √n`.
pub fn check_lemma_33(n: usize, constants: &Constants, guard: Guard) -> Result<CheckReport> {
    const SUITE: &str = "lemma33";
    let start = Instant::now();
    let bound = constants.tau() * (n as f64).sqrt();
    if guard.check(2 * n).is_err() {
        return Ok(CheckReport::skipped(
            SUITE,
            "trilinear_pn",
            n,
            bound,
            Direction::Upper,
            format!("guard {}>{}", 2 * n, guard.bits()),
        ));
    }
    let w = trilinear_norm_exact(&pn_form(n)?, guard)?;
    Ok(CheckReport::new(SUITE, "trilinear_pn", n, w.value, bound, Direction::Upper)
        .with_witness(w.describe())
        .timed(start))
}

/// The certified chain `main2_lower_bound ≤ dual_lower_bound ≤ ‖T_n‖_π`
/// for `T_n = paper_tensor(n)`, plus the relative width of the exact bracket.
pub fn check_main2_sandwich(n: usize, constants: &Constants, opts: &CutPlaneOptions) -> Result<Vec<CheckReport>> {
    const SUITE: &str = "main2";
    let start = Instant::now();
    let t = paper_tensor(n)?;
    let analytic = constants.tau() * (n as f64).sqrt();
    let dual = dual_lower_bound(&t, &pn_form(n)?, Some(analytic), opts.guard)?;
    let analytic_lb = main2_lower_bound(n, constants);
    let first = CheckReport::new(SUITE, "dual_vs_analytic", n, dual, analytic_lb, Direction::Lower).timed(start);

    let start = Instant::now();
    let br = projective_norm_exact(&t, opts)?;
    let witness = format!("cuts={};status={:?}", br.cut_violations.len(), br.status);
    let second = CheckReport::new(SUITE, "pi_lower_vs_dual", n, br.lower, dual, Direction::Lower)
        .with_witness(witness.clone())
        .timed(start);
    let mut third = CheckReport::new(SUITE, "pi_relative_width", n, br.relative_width(), 1e-6, Direction::Upper)
        .with_witness(format!("lower={:.16e};upper={:.16e}", br.lower, br.upper));
    if !br.converged() || br.lower > br.upper {
        third.status = Status::Fail;
    }
    Ok(vec![first, second, third])
}

/// `‖kp_tensor(n)‖_π` (exact lower end) against [`kp_lower_bound`].
pub fn check_kp_exact(n: usize, constants: &Constants, opts: &CutPlaneOptions) -> Result<Vec<CheckReport>> {
    const SUITE: &str = "kp";
    let start = Instant::now();
    let br = projective_norm_exact(&kp_tensor(n)?, opts)?;
    let first =
        CheckReport::new(SUITE, "pi_lower_vs_kp_bound", n, br.lower, kp_lower_bound(n, constants), Direction::Lower)
            .with_witness(format!("upper={:.16e}", br.upper))
            .timed(start);
    let mut second = CheckReport::new(SUITE, "pi_relative_width", n, br.relative_width(), 1e-6, Direction::Upper);
    if !br.converged() {
        second.status = Status::Fail;
    }
    Ok(vec![first, second])
}

/// Scalar rows of the growth chain: sampled rows plus two rows covering every
/// `n ∈ [2, n_max]` (the smallest ratio to the target and where it occurs).
pub fn growth_checks(suite: &'static str, n_max: usize, constants: &Constants) -> Result<Vec<CheckReport>> {
    if n_max < 2 {
        return Ok(Vec::new());
    }
    let start = Instant::now();
    let mut rows = Vec::new();
    for r in growth_sweep(2, n_max, Stride::Doubling, constants)? {
        rows.push(if suite == "main2" {
            CheckReport::new(suite, "main2_lower_bound", r.n, r.main2_lower, r.main2_target, Direction::Lower)
        } else {
            CheckReport::new(suite, "kp_lower_bound", r.n, r.kp_lower, r.kp_target, Direction::Lower)
        });
    }

    let mut harmonic_min = (f64::INFINITY, 0);
    let mut bound_min = (f64::INFINITY, 0);
    for r in growth_sweep(2, n_max, Stride::Every(1), constants)? {
        let x = r.n as f64;
        let hr = r.harmonic_cumsum / (0.5 * x * x.ln());
        if hr < harmonic_min.0 {
            harmonic_min = (hr, r.n);
        }
        let br = if suite == "main2" { r.main2_lower / r.main2_target } else { r.kp_lower / r.kp_target };
        if br < bound_min.0 {
            bound_min = (br, r.n);
        }
    }
    rows.push(
        CheckReport::new(suite, "harmonic_ratio_all_n", n_max, harmonic_min.0, 1.0, Direction::Lower)
            .with_witness(format!("argmin={}", harmonic_min.1)),
    );
    rows.push(
        CheckReport::new(suite, "bound_ratio_all_n", n_max, bound_min.0, 1.0, Direction::Lower)
            .with_witness(format!("argmin={}", bound_min.1))
            .timed(start),
    );
    Ok(rows)
}

/// The default branch set for `n`: `(1..n)`, `(2, 5, 8, …)` and `(3, 7, 11, …)`.
pub fn default_branches(n: usize) -> Result<Vec<Branch>> {
    Ok(vec![
        Branch::identity(n)?,
        Branch::new((0..n).map(|i| 2 + 3 * i).collect())?,
        Branch::new((0..n).map(|i| 3 + 4 * i).collect())?,
    ])
}

/// Exact π-norms of the tree branches agree with each other and with
/// `paper_tensor(n)`, and every branch reduces to `paper_tensor(n)` once its
/// zero rows are deleted.
pub fn check_tree_symmetry(n: usize, branches: &[Branch], opts: &CutPlaneOptions) -> Result<Vec<CheckReport>> {
    const SUITE: &str = "tree";
    let start = Instant::now();
    let reference = paper_tensor(n)?;
    let names: Vec<String> = branches.iter().map(Branch::to_string).collect();
    let witness = names.join(" ");

    let mut mismatch: f64 = 0.0;
    let mut tensors = Vec::with_capacity(branches.len());
    for b in branches {
        let t = tree_branch(n, b)?;
        let reduced = delete_zero_rows(&t);
        if reduced.dims() == reference.dims() {
            for (x, y) in reduced.data().iter().zip(reference.data()) {
                mismatch = mismatch.max((x - y).abs());
            }
        } else {
            mismatch = f64::INFINITY;
        }
        tensors.push(t);
    }
    let reduction =
        CheckReport::new(SUITE, "zero_row_reduction", n, mismatch, 0.0, Direction::Upper).with_witness(witness.clone());

    let mut values = Vec::with_capacity(tensors.len() + 1);
    for t in std::iter::once(&reference).chain(&tensors) {
        match projective_norm_exact(t, opts) {
            Ok(br) if br.converged() => values.push(br.upper),
            Ok(br) => {
                let mut r = CheckReport::new(SUITE, "branch_spread", n, f64::NAN, 1e-6, Direction::Upper);
                r.witness = Some(format!("status={:?}", br.status));
                return Ok(vec![reduction, r.timed(start)]);
            }
            Err(Error::TooLarge { bits, limit }) => {
                let why = format!("guard {bits}>{limit}");
                return Ok(vec![
                    reduction,
                    CheckReport::skipped(SUITE, "branch_spread", n, 1e-6, Direction::Upper, why),
                ]);
            }
            Err(e) => return Err(e),
        }
    }
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if hi == 0.0 { 0.0 } else { (hi - lo) / hi };
    let spread = CheckReport::new(SUITE, "branch_spread", n, spread, 1e-6, Direction::Upper)
        .with_witness(format!("norm={hi:.16e};{witness}"))
        .timed(start);
    Ok(vec![reduction, spread])
}

/// 1-based block `E_k = {(i, j) : max(i, j) = k}` as zero-based flat indices of an `n × n` matrix.
fn hook_block(n: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..k).map(|j| (k - 1) * n + j).collect();
    idx.extend((0..k - 1).map(|i| i * n + (k - 1)));
    idx.sort_unstable();
    idx
}

/// Maximum over seeded trials of `‖Σ_k u_k‖_π / √n`, each `u_k` a uniform
/// random sign pattern on the hook block `E_k` scaled to π-norm one.
///
/// No constant is certified, so the row passes whenever the ratio is finite.
pub fn block_ratio_experiment(n: usize, trials: usize, seed: u64, opts: &CutPlaneOptions) -> Result<CheckReport> {
    const SUITE: &str = "blocks";
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
    let mut worst = (f64::NEG_INFINITY, 0usize);
    for trial in 0..trials {
        let mut total = vec![0.0; n * n];
        for k in 1..=n {
            let mut block = vec![0.0; n * n];
            for e in hook_block(n, k) {
                block[e] = if rng.random::<bool>() { 1.0 } else { -1.0 };
            }
            let u = DenseMatrix::new(n, n, block)?;
            let norm = match projective_norm_exact(&u, opts) {
                Ok(br) => br.upper,
                Err(Error::TooLarge { bits, limit }) => {
                    let why = format!("guard {bits}>{limit}");
                    return Ok(CheckReport::skipped(SUITE, "max_ratio", n, f64::INFINITY, Direction::Upper, why));
                }
                Err(e) => return Err(e),
            };
            for (t, v) in total.iter_mut().zip(u.data()) {
                *t += v / norm;
            }
        }
        let ratio = projective_norm_exact(&DenseMatrix::new(n, n, total)?, opts)?.upper / (n as f64).sqrt();
        if ratio > worst.0 {
            worst = (ratio, trial);
        }
    }
    let mut r = CheckReport::new(SUITE, "max_ratio", n, worst.0, f64::INFINITY, Direction::Upper);
    if !worst.0.is_finite() {
        r.status = Status::Fail;
    }
    Ok(r.with_witness(format!("trials={trials};argmax={}", worst.1)).timed(start))
}

/// Seeded random tensor with dims in `1..=max` per axis and integer entries
/// in `-4..=4` scaled by `1/4`.
pub fn random_small_tensor(rng: &mut impl Rng, max: [usize; 3]) -> DenseTensor3 {
    let dims = [rng.random_range(1..=max[0]), rng.random_range(1..=max[1]), rng.random_range(1..=max[2])];
    let data: Vec<f64> =
        (0..dims.iter().product::<usize>()).map(|_| rng.random_range(-4i32..=4) as f64 / 4.0).collect();
    DenseTensor3::new(dims, data).expect("finite entries")
}

/// On seeded random 3-tensors: the ascent heuristic matches exact
/// enumeration, and the exact π-norm bracket sits between `max |entry|` and
/// the entrywise `ℓ1` norm. Three rows, each the worst case over all trials.
pub fn check_oracle_equivalence(
    trials: usize,
    restarts: usize,
    seed: u64,
    opts: &CutPlaneOptions,
) -> Result<Vec<CheckReport>> {
    const SUITE: &str = "oracle";
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tensors: Vec<DenseTensor3> = (0..trials).map(|_| random_small_tensor(&mut rng, [4, 4, 6])).collect();
    let per: Vec<(f64, f64, f64)> = tensors
        .par_iter()
        .enumerate()
        .map(|(t, x)| -> Result<(f64, f64, f64)> {
            let exact = trilinear_norm_exact(x, opts.guard)?.value;
            let ascent = trilinear_norm_ascent(x, restarts, seed.wrapping_add(t as u64))?.value;
            let br = projective_norm_exact(x, opts)?;
            Ok(((exact - ascent).abs(), br.upper - x.sum_abs(), x.max_abs() - br.lower))
        })
        .collect::<Result<_>>()?;
    let worst = |f: fn(&(f64, f64, f64)) -> f64| {
        per.iter().enumerate().fold((f64::NEG_INFINITY, 0), |acc, (i, p)| if f(p) > acc.0 { (f(p), i) } else { acc })
    };
    let gap = worst(|p| p.0);
    let over = worst(|p| p.1);
    let under = worst(|p| p.2);
    Ok(vec![
        CheckReport::new(SUITE, "ascent_vs_exact", trials, gap.0, 1e-9, Direction::Upper)
            .with_witness(format!("argmax={}", gap.1)),
        CheckReport::new(SUITE, "pi_upper_minus_l1", trials, over.0, 1e-9, Direction::Upper)
            .with_witness(format!("argmax={}", over.1)),
        CheckReport::new(SUITE, "max_entry_minus_pi_lower", trials, under.0, 1e-9, Direction::Upper)
            .with_witness(format!("argmax={}", under.1))
            .timed(start),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Remark31,
    Lemma32,
    Lemma33,
    Main2,
    Kp,
    Tree,
    Blocks,
    All,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Remark31, Suite::Lemma32, Suite::Lemma33, Suite::Main2, Suite::Kp, Suite::Tree, Suite::Blocks];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Remark31 => "remark31",
            Self::Lemma32 => "lemma32",
            Self::Lemma33 => "lemma33",
            Self::Main2 => "main2",
            Self::Kp => "kp",
            Self::Tree => "tree",
            Self::Blocks => "blocks",
            Self::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .chain([Suite::All])
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub n_max: usize,
    pub seed: u64,
    /// Random trials per `n` for the lemma32 and blocks suites.
    pub trials: usize,
    pub constants: Constants,
    pub cut: CutPlaneOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { n_max: 8, seed: 7, trials: 1000, constants: Constants::default(), cut: CutPlaneOptions::default() }
    }
}

fn flatten(rows: Vec<Result<Vec<CheckReport>>>) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for r in rows {
        out.extend(r?);
    }
    Ok(out)
}

/// Runs one suite (or all, in [`Suite::ALL`] order) for `n = 1..=n_max`,
/// clipped to each suite's own size limit.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    if cfg.n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let c = &cfg.constants;
    let guard = cfg.cut.guard;
    match suite {
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::ALL {
                out.extend(run_suite(s, cfg)?);
            }
            Ok(out)
        }
        Suite::Remark31 => flatten((1..=cfg.n_max).into_par_iter().map(|n| check_remark_31(n, c, guard)).collect()),
        Suite::Lemma32 => (1..=cfg.n_max.min(LEMMA32_MAX)).map(|n| check_lemma_32(n, cfg.trials, cfg.seed)).collect(),
        Suite::Lemma33 => (1..=cfg.n_max).map(|n| check_lemma_33(n, c, guard)).collect(),
        Suite::Main2 => {
            let mut out =
                flatten((1..=cfg.n_max.min(MAIN2_EXACT_MAX)).map(|n| check_main2_sandwich(n, c, &cfg.cut)).collect())?;
            out.extend(growth_checks("main2", cfg.n_max, c)?);
            Ok(out)
        }
        Suite::Kp => {
            let mut out = flatten((1..=cfg.n_max.min(KP_EXACT_MAX)).map(|n| check_kp_exact(n, c, &cfg.cut)).collect())?;
            out.extend(growth_checks("kp", cfg.n_max, c)?);
            Ok(out)
        }
        Suite::Tree => flatten(
            (1..=cfg.n_max.min(TREE_MAX)).map(|n| check_tree_symmetry(n, &default_branches(n)?, &cfg.cut)).collect(),
        ),
        Suite::Blocks => {
            (1..=cfg.n_max.min(BLOCKS_MAX)).map(|n| block_ratio_experiment(n, cfg.trials, cfg.seed, &cfg.cut)).collect()
        }
    }
}
