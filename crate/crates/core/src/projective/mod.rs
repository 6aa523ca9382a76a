//! Projective tensor norms of small tensors over sup-norm factors.
//!
//! `‖T‖_π` is the value of the LP `max ⟨φ, T⟩` over functionals `φ` whose
//! multilinear norm on sign vectors is at most 1. The cutting-plane loop
//! starts from the box `|φ_e| ≤ 1` (every coordinate functional is an
//! average of sign evaluations, so the box contains the feasible set),
//! solves the LP, asks the exact sign-cube norm of [`crate::norms`] for the
//! most violated sign tuple, and adds it as the cut `⟨x⊗y⊗z, φ⟩ ≤ 1`.
//!
//! Both ends of the returned [`NormBracket`] are certified: the lower end by
//! the normalized functional `φ / N(φ)`, the upper end by the rank-one
//! decomposition read from the LP dual weights.

mod lp;

use std::collections::HashSet;

pub use lp::{lp_maximize, Constraint, DualSimplex, LinearProgram, LpSolution, Sense, OPTIMALITY_TOL, PIVOT_TOL};

use crate::linalg::{DenseMatrix, DenseTensor3, DenseVector, SignVector};
use crate::norms::{opnorm_inf_1, trilinear_norm_exact, Guard, SignWitness};
use crate::{Error, Result};

/// A tensor whose projective norm can be computed by the cutting-plane loop.
pub trait ProjectiveTarget {
    /// Factor dimensions, two or three of them.
    fn shape(&self) -> Vec<usize>;

    /// Entries in row-major order.
    fn entries(&self) -> &[f64];
}

/// Exact sign-cube norm of a bilinear (two dims) or trilinear (three dims) functional.
pub fn sign_cube_norm(shape: &[usize], functional: &[f64], guard: Guard) -> Result<SignWitness> {
    match *shape {
        [r, c] => opnorm_inf_1(&DenseMatrix::new(r, c, functional.to_vec())?, guard),
        [a, b, c] => trilinear_norm_exact(&DenseTensor3::new([a, b, c], functional.to_vec())?, guard),
        _ => Err(Error::InvalidArgument(format!("projective norms need 2 or 3 factors, got {}", shape.len()))),
    }
}

impl ProjectiveTarget for DenseMatrix {
    fn shape(&self) -> Vec<usize> {
        vec![self.rows(), self.cols()]
    }

    fn entries(&self) -> &[f64] {
        self.data()
    }
}

impl ProjectiveTarget for DenseTensor3 {
    fn shape(&self) -> Vec<usize> {
        self.dims().to_vec()
    }

    fn entries(&self) -> &[f64] {
        self.data()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutPlaneOptions {
    pub guard: Guard,
    /// Maximum number of cuts before giving up with [`CutStatus::CutLimit`].
    pub max_cuts: usize,
    /// Stop once the dual norm of the LP solution is at most `1 + termination_tol`.
    pub termination_tol: f64,
}

impl Default for CutPlaneOptions {
    fn default() -> Self {
        Self { guard: Guard::default(), max_cuts: 10_000, termination_tol: 1e-7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutStatus {
    Converged,
    CutLimit,
    /// The oracle returned a cut already in the LP (floating-point stall).
    Stalled,
}

/// A functional of the target's shape with its exact dual norm.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFunctional {
    pub shape: Vec<usize>,
    pub entries: Vec<f64>,
    pub dual_norm: f64,
    /// Sign tuple attaining `dual_norm`.
    pub norming: Option<SignWitness>,
}

impl DualFunctional {
    pub fn pairing(&self, target: &[f64]) -> f64 {
        crate::linalg::dot(&self.entries, target)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub factors: Vec<DenseVector>,
}

/// `Σ coefficient · (⊗ factors)` with every factor of sup-norm at most 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Decomposition {
    pub terms: Vec<Term>,
}

impl Decomposition {
    /// `Σ |coefficient| · Π ‖factor‖_∞`, an upper bound for the π-norm of the sum.
    pub fn cost(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs() * t.factors.iter().map(|f| f.norm_sup()).product::<f64>()).sum()
    }

    /// Row-major entries of the represented tensor.
    pub fn reconstruct(&self, shape: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; shape.iter().product()];
        for term in &self.terms {
            debug_assert_eq!(term.factors.len(), shape.len());
            let mut acc = vec![term.coefficient];
            for f in &term.factors {
                acc = acc.iter().flat_map(|a| f.as_slice().iter().map(move |b| a * b)).collect();
            }
            for (o, a) in out.iter_mut().zip(acc) {
                *o += a;
            }
        }
        out
    }
}

/// Certified interval for a projective norm.
#[derive(Debug, Clone, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: DualFunctional,
    pub upper_witness: Decomposition,
    pub status: CutStatus,
    /// `N(φ) - 1` at the moment each cut was added.
    pub cut_violations: Vec<f64>,
    pub pivots: usize,
}

impl NormBracket {
    pub fn relative_width(&self) -> f64 {
        if self.upper == 0.0 {
            0.0
        } else {
            (self.upper - self.lower) / self.upper
        }
    }

    pub fn converged(&self) -> bool {
        self.status == CutStatus::Converged
    }
}

/// Zero-based multi-index of flat position `flat` in `shape`.
fn multi_index(shape: &[usize], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for (a, d) in shape.iter().enumerate().rev() {
        idx[a] = flat % d;
        flat /= d;
    }
    idx
}

fn witness_factors(w: &SignWitness) -> Vec<SignVector> {
    [&w.x, &w.y, &w.z].into_iter().filter_map(|s| s.clone()).collect()
}

fn outer_of_signs(factors: &[SignVector]) -> Vec<f64> {
    let mut acc = vec![1.0];
    for f in factors {
        let v = f.to_vec();
        acc = acc.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
    }
    acc
}

/// Indices of the slices along each axis that are not identically zero.
fn support(shape: &[usize], entries: &[f64]) -> Vec<Vec<usize>> {
    let mut used: Vec<Vec<bool>> = shape.iter().map(|&d| vec![false; d]).collect();
    for (flat, v) in entries.iter().enumerate() {
        if *v != 0.0 {
            for (a, i) in multi_index(shape, flat).into_iter().enumerate() {
                used[a][i] = true;
            }
        }
    }
    used.into_iter().map(|u| u.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()).collect()
}

/// Flat index in `shape` of the point whose axis-`a` coordinate is `support[a][idx[a]]`.
fn embed_index(shape: &[usize], support: &[Vec<usize>], idx: &[usize]) -> usize {
    idx.iter().zip(support).zip(shape).fold(0, |acc, ((&i, s), &d)| acc * d + s[i])
}

fn embed_vector(v: &[f64], keep: &[usize], dim: usize, fill: f64) -> Vec<f64> {
    let mut out = vec![fill; dim];
    for (&i, &x) in keep.iter().zip(v) {
        out[i] = x;
    }
    out
}

/// Lifts a bracket computed on the support back to the full shape.
fn lift(b: NormBracket, shape: &[usize], support: &[Vec<usize>]) -> NormBracket {
    let small = &b.lower_witness.shape;
    let mut entries = vec![0.0; shape.iter().product()];
    for (flat, &v) in b.lower_witness.entries.iter().enumerate() {
        entries[embed_index(shape, support, &multi_index(small, flat))] = v;
    }
    let lift_sign = |s: &Option<SignVector>, a: usize| {
        s.as_ref().map(|s| SignVector::from_signs_of(&embed_vector(&s.to_vec(), &support[a], shape[a], 1.0)))
    };
    let norming = b.lower_witness.norming.as_ref().map(|w| SignWitness {
        x: lift_sign(&w.x, 0),
        y: lift_sign(&w.y, 1),
        z: lift_sign(&w.z, 2),
        value: w.value,
    });
    let terms = b
        .upper_witness
        .terms
        .into_iter()
        .map(|t| Term {
            coefficient: t.coefficient,
            factors: t
                .factors
                .iter()
                .enumerate()
                .map(|(a, f)| DenseVector::from_vec_unchecked(embed_vector(f.as_slice(), &support[a], shape[a], 0.0)))
                .collect(),
        })
        .collect();
    NormBracket {
        lower_witness: DualFunctional { shape: shape.to_vec(), entries, dual_norm: b.lower_witness.dual_norm, norming },
        upper_witness: Decomposition { terms },
        ..b
    }
}

/// Exact `‖T‖_π` of a matrix or 3-tensor by cutting planes.
///
/// All-zero slices are deleted before solving; restriction to and extension
/// from a coordinate subspace of `ℓ∞` both have norm one, so the value is
/// unchanged, and the witnesses are lifted back to the full shape.
pub fn projective_norm_exact<T: ProjectiveTarget + ?Sized>(target: &T, opts: &CutPlaneOptions) -> Result<NormBracket> {
    let shape = target.shape();
    let entries = target.entries();
    if !(2..=3).contains(&shape.len()) {
        return Err(Error::InvalidArgument(format!("projective norms need 2 or 3 factors, got {}", shape.len())));
    }
    let support = support(&shape, entries);
    if support.iter().any(Vec::is_empty) || support.iter().zip(&shape).all(|(s, &d)| s.len() == d) {
        return solve_on_support(shape, entries, opts);
    }
    let small: Vec<usize> = support.iter().map(Vec::len).collect();
    let reduced: Vec<f64> =
        (0..small.iter().product()).map(|f| entries[embed_index(&shape, &support, &multi_index(&small, f))]).collect();
    Ok(lift(solve_on_support(small, &reduced, opts)?, &shape, &support))
}

fn solve_on_support(shape: Vec<usize>, entries: &[f64], opts: &CutPlaneOptions) -> Result<NormBracket> {
    let n = entries.len();

    if entries.iter().all(|v| *v == 0.0) {
        return Ok(NormBracket {
            lower: 0.0,
            upper: 0.0,
            lower_witness: DualFunctional { shape, entries: vec![0.0; n], dual_norm: 0.0, norming: None },
            upper_witness: Decomposition::default(),
            status: CutStatus::Converged,
            cut_violations: Vec::new(),
            pivots: 0,
        });
    }

    let mut simplex = DualSimplex::new(entries, &vec![-1.0; n], &vec![1.0; n])?;
    let mut cut_factors: Vec<Vec<SignVector>> = Vec::new();
    let mut seen: HashSet<Vec<SignVector>> = HashSet::new();
    let mut violations = Vec::new();

    let (solution, norming, status) = loop {
        let sol = simplex.solve()?;
        let w = sign_cube_norm(&shape, &sol.solution, opts.guard)?;
        if w.value <= 1.0 + opts.termination_tol {
            break (sol, w, CutStatus::Converged);
        }
        if cut_factors.len() >= opts.max_cuts {
            break (sol, w, CutStatus::CutLimit);
        }
        let factors = witness_factors(&w);
        if !seen.insert(factors.clone()) {
            break (sol, w, CutStatus::Stalled);
        }
        simplex.add_constraint(&outer_of_signs(&factors), Sense::AtMost, 1.0)?;
        violations.push(w.value - 1.0);
        cut_factors.push(factors);
    };

    let mut terms = Vec::new();
    for (r, &lambda) in solution.constraint_weights.iter().enumerate() {
        if lambda > 0.0 {
            terms
                .push(Term { coefficient: lambda, factors: cut_factors[r].iter().map(SignVector::to_dense).collect() });
        }
    }
    for (e, &mu) in solution.box_weights.iter().enumerate() {
        if mu != 0.0 {
            let idx = multi_index(&shape, e);
            let factors = idx.iter().zip(&shape).map(|(&i, &d)| DenseVector::unit(d, i)).collect();
            terms.push(Term { coefficient: mu, factors });
        }
    }
    let decomposition = Decomposition { terms };
    let upper = decomposition.cost();

    let dual_norm = norming.value;
    let pairing = crate::linalg::dot(&solution.solution, entries).abs();
    let mut lower = if dual_norm > 0.0 { pairing / dual_norm } else { 0.0 };
    if lower > upper {
        // Both ends are exact up to rounding here; keep the interval ordered.
        debug_assert!(lower - upper <= 1e-9 * upper, "lower {lower} exceeds upper {upper}");
        lower = upper;
    }

    Ok(NormBracket {
        lower,
        upper,
        lower_witness: DualFunctional { shape, entries: solution.solution, dual_norm, norming: Some(norming) },
        upper_witness: decomposition,
        status,
        cut_violations: violations,
        pivots: solution.pivots,
    })
}

/// Upper bound from the triangle inequality over slices.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceBound {
    pub upper: f64,
    pub axis: usize,
    pub decomposition: Decomposition,
}

/// `min_axis Σ_s ‖slice_s‖_π`, each slice tensored with the unit vector `e_s`.
pub fn projective_upper_slices(t: &DenseTensor3, opts: &CutPlaneOptions) -> Result<SliceBound> {
    let dims = t.dims();
    let mut best: Option<SliceBound> = None;
    for axis in 0..3 {
        let mut total = 0.0;
        let mut terms = Vec::new();
        for s in 0..dims[axis] {
            let slice = t.slice(axis, s);
            if slice.is_zero() {
                continue;
            }
            let b = projective_norm_exact(&slice, opts)?;
            total += b.upper;
            for term in b.upper_witness.terms {
                let mut factors = term.factors;
                factors.insert(axis, DenseVector::unit(dims[axis], s));
                terms.push(Term { coefficient: term.coefficient, factors });
            }
        }
        if best.as_ref().is_none_or(|b| total < b.upper) {
            best = Some(SliceBound { upper: total, axis, decomposition: Decomposition { terms } });
        }
    }
    Ok(best.expect("three axes"))
}

/// `|⟨φ, T⟩| / N(φ)`, a certified lower bound for `‖T‖_π`.
///
/// `N(φ)` is the exact trilinear norm when enumeration fits in `guard`,
/// otherwise `analytic_norm`, which must be an upper bound for the true norm.
pub fn dual_lower_bound(t: &DenseTensor3, phi: &DenseTensor3, analytic_norm: Option<f64>, guard: Guard) -> Result<f64> {
    if t.dims() != phi.dims() {
        let (a, b) = (t.dims(), phi.dims());
        let axis = (0..3).find(|&i| a[i] != b[i]).expect("dims differ");
        return Err(Error::DimensionMismatch { context: "dual_lower_bound", expected: a[axis], got: b[axis] });
    }
    let norm = match trilinear_norm_exact(phi, guard) {
        Ok(w) => w.value,
        Err(Error::TooLarge { limit, .. }) => match analytic_norm {
            Some(v) if v > 0.0 && v.is_finite() => v,
            Some(v) => return Err(Error::InvalidArgument(format!("analytic dual norm must be positive, got {v}"))),
            None => return Err(Error::MissingDualNorm { limit }),
        },
        Err(e) => return Err(e),
    };
    let pairing = crate::linalg::dot(t.data(), phi.data()).abs();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(pairing / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{paper_tensor, pn_form};

    fn opts() -> CutPlaneOptions {
        CutPlaneOptions::default()
    }

    fn check_bracket<T: ProjectiveTarget>(t: &T, b: &NormBracket) {
        let recon = b.upper_witness.reconstruct(&t.shape());
        for (r, e) in recon.iter().zip(t.entries()) {
            assert!((r - e).abs() <= 1e-9, "reconstruction {r} vs {e}");
        }
        assert!((b.upper - b.upper_witness.cost()).abs() <= 1e-9);
        let p = b.lower_witness.pairing(t.entries()).abs() / b.lower_witness.dual_norm;
        assert!((b.lower - p).abs() <= 1e-9 * b.upper.max(1.0));
        assert!(b.lower <= b.upper);
        assert!(b.lower_witness.entries.iter().all(|v| v.abs() <= 1.0 + 1e-9));
        assert!(b.cut_violations.iter().all(|v| *v > 1e-9));
    }

    #[test]
    fn rank_one_tensor_has_norm_one() {
        let a = DenseVector::new(vec![1.0, -0.5]).unwrap();
        let b = DenseVector::new(vec![0.25, 1.0, 0.0]).unwrap();
        let c = DenseVector::new(vec![-1.0, 1.0]).unwrap();
        let t = DenseTensor3::outer(&a, &b, &c);
        let br = projective_norm_exact(&t, &opts()).unwrap();
        assert!(br.converged());
        assert!((br.lower - 1.0).abs() < 1e-7 && (br.upper - 1.0).abs() < 1e-7);
        check_bracket(&t, &br);
    }

    #[test]
    fn identity_matrix() {
        let i2 = DenseMatrix::identity(2);
        let br = projective_norm_exact(&i2, &opts()).unwrap();
        assert!((br.lower - 1.0).abs() < 1e-7 && (br.upper - 1.0).abs() < 1e-7, "{br:?}");
        check_bracket(&i2, &br);
        // The textbook witnesses: φ = I/2 has ∞→1 norm 1 and pairing 1.
        let half = DenseMatrix::from_fn(2, 2, |i, j| if i == j { 0.5 } else { 0.0 });
        assert_eq!(opnorm_inf_1(&half, Guard::default()).unwrap().value, 1.0);
    }

    #[test]
    fn zero_slices_are_deleted_and_witnesses_lifted() {
        let m = DenseMatrix::from_fn(4, 3, |i, j| match (i, j) {
            (1, 0) => 1.0,
            (3, 2) => 1.0,
            _ => 0.0,
        });
        let br = projective_norm_exact(&m, &opts()).unwrap();
        assert!((br.upper - 1.0).abs() < 1e-7 && (br.lower - 1.0).abs() < 1e-7);
        assert_eq!(br.lower_witness.shape, vec![4, 3]);
        check_bracket(&m, &br);
        let recomputed = sign_cube_norm(&[4, 3], &br.lower_witness.entries, Guard::default()).unwrap();
        assert!((recomputed.value - br.lower_witness.dual_norm).abs() < 1e-12);
        let norming = br.lower_witness.norming.as_ref().unwrap();
        assert_eq!(norming.x.as_ref().unwrap().dim(), 4);

        let t = crate::constructions::tree_branch(2, &crate::constructions::Branch::new(vec![2, 5]).unwrap()).unwrap();
        let br = projective_norm_exact(&t, &opts()).unwrap();
        assert!((br.upper - 2.0).abs() < 1e-7);
        check_bracket(&t, &br);
    }

    #[test]
    fn paper_tensor_one_is_rank_one() {
        let t = paper_tensor(1).unwrap();
        let br = projective_norm_exact(&t, &opts()).unwrap();
        assert!((br.upper - 1.0).abs() < 1e-7);
    }

    #[test]
    fn zero_tensor() {
        let t = DenseTensor3::zeros([2, 2, 2]);
        let br = projective_norm_exact(&t, &opts()).unwrap();
        assert_eq!((br.lower, br.upper), (0.0, 0.0));
        assert_eq!(projective_upper_slices(&t, &opts()).unwrap().upper, 0.0);
    }

    #[test]
    fn slices_bound_rank_one_and_paper_tensor() {
        let a = DenseVector::new(vec![1.0, 1.0]).unwrap();
        let t = DenseTensor3::outer(&a, &a, &a);
        let s = projective_upper_slices(&t, &opts()).unwrap();
        // Every axis has two slices of norm 1 here, so the bound is 2; the
        // exact value is 1.
        assert!((s.upper - 2.0).abs() < 1e-7);
        let e = DenseVector::unit(2, 0);
        let t = DenseTensor3::outer(&e, &a, &a);
        let s = projective_upper_slices(&t, &opts()).unwrap();
        assert!((s.upper - 1.0).abs() < 1e-7);
        assert_eq!(s.axis, 0);

        let t = paper_tensor(2).unwrap();
        let s = projective_upper_slices(&t, &opts()).unwrap();
        let exact = projective_norm_exact(&t, &opts()).unwrap();
        assert!(s.upper >= exact.lower - 1e-9);
        let recon = s.decomposition.reconstruct(&t.shape());
        assert!(recon.iter().zip(t.data()).all(|(r, e)| (r - e).abs() < 1e-9));
        assert!((s.decomposition.cost() - s.upper).abs() < 1e-9);
    }

    #[test]
    fn dual_lower_bound_examples() {
        let mut t = DenseTensor3::zeros([2, 2, 2]);
        t.data_mut()[3] = 1.0;
        assert_eq!(dual_lower_bound(&t, &t, None, Guard::default()).unwrap(), 1.0);

        let lb = dual_lower_bound(&paper_tensor(2).unwrap(), &pn_form(2).unwrap(), None, Guard::default()).unwrap();
        assert!((lb - 1.0).abs() < 1e-15);

        // Enumeration disabled by a tiny guard: the analytic bound is used.
        let small = Guard::new(2).unwrap();
        let tau = std::f64::consts::PI;
        let lb =
            dual_lower_bound(&paper_tensor(3).unwrap(), &pn_form(3).unwrap(), Some(tau * 3f64.sqrt()), small).unwrap();
        assert!((lb - 2.5 / (tau * 3f64.sqrt())).abs() < 1e-15);
        assert_eq!(
            dual_lower_bound(&paper_tensor(3).unwrap(), &pn_form(3).unwrap(), None, small),
            Err(Error::MissingDualNorm { limit: 2 })
        );
        assert!(dual_lower_bound(&paper_tensor(2).unwrap(), &pn_form(3).unwrap(), None, small).is_err());
    }

    #[test]
    fn multi_index_is_row_major() {
        assert_eq!(multi_index(&[2, 3, 4], 23), vec![1, 2, 3]);
        assert_eq!(multi_index(&[2, 3], 4), vec![1, 1]);
    }
}
