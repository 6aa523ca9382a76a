//! Norms over sign cubes.
//!
//! The `∞→1` norm of a matrix, the `∞→2` norm, and the norm of a trilinear
//! form on `ℓ_∞ × ℓ_∞ × ℓ_∞` are all attained at sign vectors. The exact
//! routines enumerate the sign cube in Gray-code order, updating the running
//! contraction by one row per flip, and eliminate the last factor in closed
//! form (`max_z ⟨w, z⟩ = ‖w‖₁`).
//!
//! Enumeration fixes the first enumerated coordinate to `+1` (the value is
//! invariant under global negation). The cube is split into chunks of fixed
//! size, independent of the thread count, and each chunk recomputes its state
//! from scratch. Among equal maxima the numerically smallest packed pattern
//! (bit set means `-1`) wins, so witnesses are reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::{dot, trilinear_eval_slices, DenseMatrix, DenseTensor3, SignVector};
use crate::{Error, Result};

/// Limit on the number of enumerated sign bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Guard(u32);

impl Guard {
    pub const DEFAULT_BITS: u32 = 26;
    const HARD_LIMIT: u32 = 62;

    pub fn new(bits: u32) -> Result<Self> {
        if bits == 0 || bits > Self::HARD_LIMIT {
            return Err(Error::InvalidArgument(format!("guard bits must be in 1..={}, got {bits}", Self::HARD_LIMIT)));
        }
        Ok(Self(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn check(self, bits: usize) -> Result<()> {
        if bits > self.0 as usize {
            return Err(Error::TooLarge { bits: bits.min(u32::MAX as usize) as u32, limit: self.0 });
        }
        Ok(())
    }
}

impl Default for Guard {
    fn default() -> Self {
        Self(Self::DEFAULT_BITS)
    }
}

/// Maximizing sign vectors and the attained value.
#[derive(Debug, Clone, PartialEq)]
pub struct SignWitness {
    pub x: Option<SignVector>,
    pub y: Option<SignVector>,
    pub z: Option<SignVector>,
    pub value: f64,
}

impl SignWitness {
    /// Compact `x=…;y=…;z=…` rendering, omitting absent factors.
    pub fn describe(&self) -> String {
        [("x", &self.x), ("y", &self.y), ("z", &self.z)]
            .iter()
            .filter_map(|(name, s)| s.as_ref().map(|s| format!("{name}={s}")))
            .collect::<Vec<_>>()
            .join(";")
    }
}

const CHUNK_BITS: u32 = 10;

#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    key: (u64, u64),
}

impl Best {
    const NONE: Best = Best { value: f64::NEG_INFINITY, key: (u64::MAX, u64::MAX) };

    fn offer(&mut self, value: f64, key: (u64, u64)) {
        if value > self.value || (value == self.value && key < self.key) {
            *self = Best { value, key };
        }
    }

    fn merge(mut self, other: Best) -> Best {
        self.offer(other.value, other.key);
        self
    }
}

#[inline]
fn gray(g: u64) -> u64 {
    g ^ (g >> 1)
}

/// Splits the Gray sequence on `free_bits` bits into fixed chunks and reduces
/// the per-chunk maxima. `visit(start, end)` scans Gray indices `start..end`.
fn cube_search(free_bits: u32, visit: impl Fn(u64, u64) -> Best + Sync) -> Best {
    let chunk_bits = CHUNK_BITS.min(free_bits);
    let chunks = 1u64 << (free_bits - chunk_bits);
    let chunk = 1u64 << chunk_bits;
    (0..chunks).into_par_iter().map(|c| visit(c * chunk, (c + 1) * chunk)).reduce(|| Best::NONE, Best::merge)
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Signs of `rows × width` row-major `data` accumulated with the signs of `pattern`.
fn signed_row_sum(data: &[f64], width: usize, pattern: u64, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for (r, row) in data.chunks_exact(width).enumerate() {
        let s = if pattern >> r & 1 == 1 { -1.0 } else { 1.0 };
        axpy(s, row, out);
    }
}

/// Maximizes `score(Σ_r x_r row_r)` over sign vectors `x` with `x_0 = +1`,
/// where rows are `width`-long slices of `data`.
fn best_signed_row_sum(data: &[f64], width: usize, score: impl Fn(&[f64]) -> f64 + Sync) -> Best {
    let rows = data.len() / width;
    cube_search(rows as u32 - 1, |start, end| {
        let mut best = Best::NONE;
        let mut state = vec![0.0; width];
        let mut pattern = gray(start) << 1;
        signed_row_sum(data, width, pattern, &mut state);
        best.offer(score(&state), (pattern, 0));
        for g in start + 1..end {
            let r = g.trailing_zeros() as usize + 1;
            let s = if pattern >> r & 1 == 1 { -1.0 } else { 1.0 };
            axpy(-2.0 * s, &data[r * width..(r + 1) * width], &mut state);
            pattern ^= 1 << r;
            best.offer(score(&state), (pattern, 0));
        }
        best
    })
}

/// Which factor of a matrix to enumerate in [`opnorm_inf_1_by`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Rows,
    Cols,
}

/// `max_{x,y ∈ {±1}} |xᵀ M y|`, enumerating the smaller side.
pub fn opnorm_inf_1(m: &DenseMatrix, guard: Guard) -> Result<SignWitness> {
    let side = if m.rows() <= m.cols() { Side::Rows } else { Side::Cols };
    opnorm_inf_1_by(m, side, guard)
}

/// [`opnorm_inf_1`] with an explicit choice of enumerated side; the other
/// side is set to the sign of the contraction.
pub fn opnorm_inf_1_by(m: &DenseMatrix, side: Side, guard: Guard) -> Result<SignWitness> {
    guard.check(m.rows().min(m.cols()))?;
    let (x, y) = match side {
        Side::Rows => {
            guard.check(m.rows())?;
            let best = best_signed_row_sum(m.data(), m.cols(), l1);
            let x = SignVector::from_pattern(m.rows(), best.key.0);
            let y = SignVector::from_signs_of(&m.matvec_transpose(&x.to_vec()));
            (x, y)
        }
        Side::Cols => {
            guard.check(m.cols())?;
            let t = m.transpose();
            let best = best_signed_row_sum(t.data(), t.cols(), l1);
            let y = SignVector::from_pattern(m.cols(), best.key.0);
            let x = SignVector::from_signs_of(&m.matvec(&y.to_vec()));
            (x, y)
        }
    };
    let value = dot(&x.to_vec(), &m.matvec(&y.to_vec()));
    Ok(SignWitness { x: Some(x), y: Some(y), z: None, value })
}

/// `max_{x ∈ {±1}^cols} ‖M x‖₂`.
pub fn opnorm_inf_2(m: &DenseMatrix, guard: Guard) -> Result<SignWitness> {
    guard.check(m.cols())?;
    let t = m.transpose();
    let best = best_signed_row_sum(t.data(), t.cols(), |u| u.iter().map(|v| v * v).sum());
    let x = SignVector::from_pattern(m.cols(), best.key.0);
    let value = m.matvec(&x.to_vec()).iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(SignWitness { x: Some(x), y: None, z: None, value })
}

/// Axis roles for trilinear enumeration: `outer` (first coordinate fixed),
/// `inner` (fully enumerated) and `elim` (maximized in closed form).
#[derive(Debug, Clone, Copy)]
struct Roles {
    outer: usize,
    inner: usize,
    elim: usize,
}

fn roles(dims: [usize; 3]) -> Roles {
    // Largest dimension is eliminated; among ties the last axis.
    let elim = (0..3).rev().max_by_key(|&a| (dims[a], a)).expect("three axes");
    let rest: Vec<usize> = (0..3).filter(|&a| a != elim).collect();
    let (p, q) = (rest[0], rest[1]);
    let (outer, inner) = if dims[q] > dims[p] { (q, p) } else { (p, q) };
    Roles { outer, inner, elim }
}

/// Copy of `t` laid out as `[outer][inner][elim]`.
fn rearrange(t: &DenseTensor3, r: Roles) -> Vec<f64> {
    let dims = t.dims();
    let mut out = Vec::with_capacity(t.data().len());
    let mut idx = [0usize; 3];
    for o in 0..dims[r.outer] {
        idx[r.outer] = o;
        for i in 0..dims[r.inner] {
            idx[r.inner] = i;
            for e in 0..dims[r.elim] {
                idx[r.elim] = e;
                out.push(t.get(idx[0], idx[1], idx[2]));
            }
        }
    }
    out
}

/// Exact `max |T(x, y, z)|` over sign vectors.
///
/// Cost is `2^(d_outer - 1 + d_inner) · d_elim` flops, where the two smaller
/// dimensions are enumerated; the guard applies to their sum.
pub fn trilinear_norm_exact(t: &DenseTensor3, guard: Guard) -> Result<SignWitness> {
    let dims = t.dims();
    let r = roles(dims);
    let (d_o, d_i, d_e) = (dims[r.outer], dims[r.inner], dims[r.elim]);
    guard.check(d_o + d_i)?;
    let data = rearrange(t, r);
    let slab = d_i * d_e;

    let best = cube_search(d_o as u32 - 1, |start, end| {
        let mut best = Best::NONE;
        let mut a = vec![0.0; slab];
        let mut w = vec![0.0; d_e];
        let mut outer = gray(start) << 1;
        signed_row_sum(&data, slab, outer, &mut a);
        let mut g = start;
        loop {
            // Inner Gray walk over all 2^d_i patterns of y.
            let mut inner = 0u64;
            signed_row_sum(&a, d_e, 0, &mut w);
            best.offer(l1(&w), (outer, inner));
            for h in 1..(1u64 << d_i) {
                let j = h.trailing_zeros() as usize;
                let s = if inner >> j & 1 == 1 { -1.0 } else { 1.0 };
                axpy(-2.0 * s, &a[j * d_e..(j + 1) * d_e], &mut w);
                inner ^= 1 << j;
                best.offer(l1(&w), (outer, inner));
            }
            g += 1;
            if g == end {
                break;
            }
            let o = g.trailing_zeros() as usize + 1;
            let s = if outer >> o & 1 == 1 { -1.0 } else { 1.0 };
            axpy(-2.0 * s, &data[o * slab..(o + 1) * slab], &mut a);
            outer ^= 1 << o;
        }
        best
    });

    let mut factors: [Vec<f64>; 3] = [vec![], vec![], vec![]];
    factors[r.outer] = SignVector::from_pattern(d_o, best.key.0).to_vec();
    factors[r.inner] = SignVector::from_pattern(d_i, best.key.1).to_vec();
    factors[r.elim] = vec![0.0; d_e];
    let contraction = contract_axis(t, &factors, r.elim);
    factors[r.elim] = SignVector::from_signs_of(&contraction).to_vec();
    Ok(witness_from(t, factors))
}

/// `T` contracted with `factors` on every axis except `axis`.
fn contract_axis(t: &DenseTensor3, factors: &[Vec<f64>; 3], axis: usize) -> Vec<f64> {
    let dims = t.dims();
    let mut out = vec![0.0; dims[axis]];
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            let fibre = t.fibre(i, j);
            match axis {
                0 => out[i] += factors[1][j] * dot(fibre, &factors[2]),
                1 => out[j] += factors[0][i] * dot(fibre, &factors[2]),
                _ => axpy(factors[0][i] * factors[1][j], fibre, &mut out),
            }
        }
    }
    out
}

fn witness_from(t: &DenseTensor3, factors: [Vec<f64>; 3]) -> SignWitness {
    let value = trilinear_eval_slices(t, &factors[0], &factors[1], &factors[2]);
    let [x, y, z] = factors.map(|f| SignVector::from_signs_of(&f));
    SignWitness { x: Some(x), y: Some(y), z: Some(z), value }
}

/// First single-coordinate flip of `x` or `y` whose best `z` strictly beats
/// `value`; applies it and returns true.
fn flip_improves(t: &DenseTensor3, f: &mut [Vec<f64>; 3], value: &mut f64) -> bool {
    let threshold = *value + 1e-12 * value.abs();
    for axis in [0, 1] {
        for i in 0..f[axis].len() {
            f[axis][i] = -f[axis][i];
            let c = contract_axis(t, f, 2);
            let v = l1(&c);
            if v > threshold {
                f[2] = SignVector::from_signs_of(&c).to_vec();
                *value = trilinear_eval_slices(t, &f[0], &f[1], &f[2]);
                return true;
            }
            f[axis][i] = -f[axis][i];
        }
    }
    false
}

/// Alternating sign ascent: with two factors fixed the third is set to the
/// sign of the contraction, cycling until no factor update improves the
/// value, then escaping through single sign flips of `x` or `y`. Best over `restarts` seeded random starts; always a lower bound on
/// [`trilinear_norm_exact`].
pub fn trilinear_norm_ascent(t: &DenseTensor3, restarts: usize, seed: u64) -> Result<SignWitness> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("ascent needs at least one restart".into()));
    }
    let dims = t.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, [Vec<f64>; 3])> = None;
    for _ in 0..restarts {
        let mut f: [Vec<f64>; 3] =
            [0, 1, 2].map(|a| (0..dims[a]).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect());
        f[2] = vec![0.0; dims[2]];
        let mut value = f64::NEG_INFINITY;
        // Monotone in value; the cap only guards against float ping-pong.
        for _ in 0..1000 {
            for axis in [2, 0, 1] {
                let c = contract_axis(t, &f, axis);
                f[axis] = SignVector::from_signs_of(&c).to_vec();
            }
            let v = trilinear_eval_slices(t, &f[0], &f[1], &f[2]);
            if v > value {
                value = v;
                continue;
            }
            // Alternation is stuck: try single flips of x or y with z re-optimized.
            if !flip_improves(t, &mut f, &mut value) {
                break;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, f));
        }
    }
    let (_, factors) = best.expect("at least one restart");
    Ok(witness_from(t, factors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{permuted_hilbert, pn_form};
    use crate::linalg::DenseVector;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    /// Brute force over every pair of sign vectors.
    fn brute_inf_1(a: &DenseMatrix) -> f64 {
        let mut best: f64 = 0.0;
        for px in 0..1u64 << a.rows() {
            let x = SignVector::from_pattern(a.rows(), px).to_dense();
            for py in 0..1u64 << a.cols() {
                let y = SignVector::from_pattern(a.cols(), py).to_dense();
                best = best.max(a.bilinear(&x, &y).unwrap().abs());
            }
        }
        best
    }

    fn brute_trilinear(t: &DenseTensor3) -> f64 {
        let [a, b, c] = t.dims();
        let mut best: f64 = 0.0;
        for px in 0..1u64 << a {
            for py in 0..1u64 << b {
                for pz in 0..1u64 << c {
                    let v = trilinear_eval_slices(
                        t,
                        &SignVector::from_pattern(a, px).to_vec(),
                        &SignVector::from_pattern(b, py).to_vec(),
                        &SignVector::from_pattern(c, pz).to_vec(),
                    );
                    best = best.max(v.abs());
                }
            }
        }
        best
    }

    #[test]
    fn inf_1_examples() {
        let w = opnorm_inf_1(&m(&[&[1.0, 1.0], &[1.0, 1.0]]), Guard::default()).unwrap();
        assert_eq!(w.value, 4.0);
        assert_eq!(w.x.as_ref().unwrap().to_string(), "++");
        assert_eq!(w.y.as_ref().unwrap().to_string(), "++");

        let w = opnorm_inf_1(&m(&[&[1.0, 0.0], &[0.0, -1.0]]), Guard::default()).unwrap();
        assert_eq!(w.value, 2.0);

        let p3 = permuted_hilbert(3).unwrap();
        assert_eq!(brute_inf_1(&p3), 4.0);
        assert_eq!(opnorm_inf_1(&p3, Guard::default()).unwrap().value, 4.0);
    }

    #[test]
    fn inf_1_both_sides_agree() {
        let a = DenseMatrix::from_fn(5, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let r = opnorm_inf_1_by(&a, Side::Rows, Guard::default()).unwrap().value;
        let c = opnorm_inf_1_by(&a, Side::Cols, Guard::default()).unwrap().value;
        assert_eq!(r, c);
        assert_eq!(r, brute_inf_1(&a));
    }

    #[test]
    fn inf_1_guard() {
        let a = DenseMatrix::zeros(40, 40);
        let err = opnorm_inf_1(&a, Guard::default()).unwrap_err();
        assert_eq!(err, Error::TooLarge { bits: 40, limit: 26 });
    }

    #[test]
    fn inf_2_examples() {
        let w = opnorm_inf_2(&DenseMatrix::identity(2), Guard::default()).unwrap();
        assert_eq!(w.value, 2f64.sqrt());
        assert_eq!(w.x.unwrap().to_string(), "++");
        assert_eq!(opnorm_inf_2(&DenseMatrix::zeros(2, 3), Guard::default()).unwrap().value, 0.0);
        let w = opnorm_inf_2(&permuted_hilbert(2).unwrap(), Guard::default()).unwrap();
        assert_eq!(w.value, 2f64.sqrt());
        assert!(opnorm_inf_2(&DenseMatrix::zeros(1, 27), Guard::default()).is_err());
    }

    #[test]
    fn trilinear_examples() {
        let e = DenseVector::unit(2, 0);
        let rank_one = DenseTensor3::outer(&e, &e, &e);
        assert_eq!(trilinear_norm_exact(&rank_one, Guard::default()).unwrap().value, 1.0);

        let mut single = DenseTensor3::zeros([2, 3, 2]);
        let idx = single.flat_index(1, 2, 0);
        single.data_mut()[idx] = -2.5;
        assert_eq!(trilinear_norm_exact(&single, Guard::default()).unwrap().value, 2.5);

        let w = trilinear_norm_exact(&pn_form(2).unwrap(), Guard::default()).unwrap();
        assert!((w.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trilinear_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let dims = [rng.random_range(1..4), rng.random_range(1..4), rng.random_range(1..5)];
            let t = DenseTensor3::from_fn(dims, |_, _, _| rng.random_range(-3..=3) as f64);
            let w = trilinear_norm_exact(&t, Guard::default()).unwrap();
            assert_eq!(w.value, brute_trilinear(&t), "dims {dims:?}");
        }
    }

    #[test]
    fn trilinear_largest_axis_anywhere() {
        // The eliminated axis need not be the last one.
        let t = DenseTensor3::from_fn([6, 2, 3], |i, j, k| ((i + 2 * j + 3 * k) % 4) as f64 - 1.5);
        let w = trilinear_norm_exact(&t, Guard::default()).unwrap();
        assert_eq!(w.value, brute_trilinear(&t));
        let x = w.x.unwrap().to_dense();
        let y = w.y.unwrap().to_dense();
        let z = w.z.unwrap().to_dense();
        assert_eq!(crate::linalg::trilinear_eval(&t, &x, &y, &z).unwrap(), w.value);
    }

    #[test]
    fn trilinear_guard() {
        let t = DenseTensor3::zeros([14, 14, 20]);
        assert_eq!(trilinear_norm_exact(&t, Guard::default()).unwrap_err(), Error::TooLarge { bits: 28, limit: 26 });
    }

    #[test]
    fn ascent_examples() {
        let e = DenseVector::new(vec![1.0, -0.5]).unwrap();
        let rank_one = DenseTensor3::outer(&e, &e, &e);
        for seed in 0..5 {
            // Sign-cube norm of a rank-one form is the product of l1 norms.
            assert_eq!(trilinear_norm_ascent(&rank_one, 1, seed).unwrap().value, 3.375);
        }
        assert_eq!(trilinear_norm_ascent(&DenseTensor3::zeros([2, 2, 2]), 3, 0).unwrap().value, 0.0);
        let phi = pn_form(3).unwrap();
        let exact = trilinear_norm_exact(&phi, Guard::default()).unwrap().value;
        let ascent = trilinear_norm_ascent(&phi, 50, 42).unwrap().value;
        assert!((exact - ascent).abs() <= 1e-12 * exact);
        assert!(trilinear_norm_ascent(&phi, 0, 1).is_err());
    }

    #[test]
    fn tie_break_prefers_smallest_pattern() {
        // Every sign pattern attains the maximum of the identity's ∞→2 norm.
        let w = opnorm_inf_2(&DenseMatrix::identity(4), Guard::default()).unwrap();
        assert_eq!(w.x.unwrap().to_string(), "++++");
    }

    #[test]
    fn guard_bounds() {
        assert!(Guard::new(0).is_err());
        assert!(Guard::new(63).is_err());
        assert_eq!(Guard::new(10).unwrap().bits(), 10);
    }
}
