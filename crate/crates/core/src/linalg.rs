//! Dense real linear algebra kernels.
//!
//! Storage is zero-based and row-major throughout. A [`DenseTensor3`] with
//! dims `(a, b, c)` stores entry `(i, j, k)` at flat index `(i * b + j) * c + k`.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use crate::{Error, Result};

fn check_finite(data: &[f64]) -> Result<()> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn check_positive(context: &'static str, dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidArgument(format!("{context}: dimension must be positive")));
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A finite real vector of positive dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    entries: Vec<f64>,
}

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_positive("vector", entries.len())?;
        check_finite(&entries)?;
        Ok(Self { entries })
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty() && entries.iter().all(|v| v.is_finite()));
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_vec_unchecked(vec![0.0; dim.max(1)])
    }

    pub fn ones(dim: usize) -> Self {
        Self::from_vec_unchecked(vec![1.0; dim.max(1)])
    }

    /// The coordinate vector `e_index` (zero-based).
    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = 1.0;
        v
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self::from_vec_unchecked((0..dim.max(1)).map(f).collect())
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    pub fn dot(&self, other: &DenseVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { context: "dot", expected: self.dim(), got: other.dim() });
        }
        Ok(dot(&self.entries, &other.entries))
    }

    pub fn norm_l1(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn norm_sup(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self::from_vec_unchecked(self.entries.iter().map(|v| alpha * v).collect())
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// A vector with every coordinate exactly `+1` or `-1`, packed one bit per
/// coordinate (bit set means `-1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVector {
    dim: usize,
    words: Vec<u64>,
}

impl SignVector {
    pub fn all_positive(dim: usize) -> Self {
        let dim = dim.max(1);
        Self { dim, words: vec![0; dim.div_ceil(64)] }
    }

    /// Builds a sign vector from the low `dim` bits of `pattern` (`dim <= 64`).
    pub fn from_pattern(dim: usize, pattern: u64) -> Self {
        assert!(dim <= 64, "from_pattern supports at most 64 coordinates");
        let mut s = Self::all_positive(dim);
        let mask = if dim == 64 { u64::MAX } else { (1u64 << dim) - 1 };
        s.words[0] = pattern & mask;
        s
    }

    /// Sign pattern of `values`, with `sign(0) = +1`.
    pub fn from_signs_of(values: &[f64]) -> Self {
        let mut s = Self::all_positive(values.len());
        for (i, v) in values.iter().enumerate() {
            if *v < 0.0 {
                s.flip(i);
            }
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_negative(&self, i: usize) -> bool {
        assert!(i < self.dim);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn sign(&self, i: usize) -> f64 {
        if self.is_negative(i) {
            -1.0
        } else {
            1.0
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.dim);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn negated(&self) -> Self {
        let mut s = self.clone();
        for i in 0..self.dim {
            s.flip(i);
        }
        s
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.dim).map(|i| self.sign(i))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.iter().collect()
    }

    pub fn to_dense(&self) -> DenseVector {
        DenseVector::from_vec_unchecked(self.to_vec())
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            f.write_str(if self.is_negative(i) { "-" } else { "+" })?;
        }
        Ok(())
    }
}

impl FromStr for SignVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        check_positive("sign vector", s.len())?;
        let mut v = Self::all_positive(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '+' => {}
                '-' => v.flip(i),
                other => return Err(Error::InvalidArgument(format!("bad sign character {other:?}"))),
            }
        }
        Ok(v)
    }
}

/// A finite real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_positive("matrix rows", rows)?;
        check_positive("matrix cols", cols)?;
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { context: "matrix data", expected: rows * cols, got: data.len() });
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let (rows, cols) = (rows.max(1), cols.max(1));
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { context: "matrix row", expected: cols, got: bad.len() });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `M x` for `x` of length `cols`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Mᵀ y` for `y` of length `rows`.
    pub fn matvec_transpose(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate() {
            if *yi != 0.0 {
                for (o, m) in out.iter_mut().zip(self.row(i)) {
                    *o += yi * m;
                }
            }
        }
        out
    }

    /// `xᵀ M y`.
    pub fn bilinear(&self, x: &DenseVector, y: &DenseVector) -> Result<f64> {
        if x.dim() != self.rows {
            return Err(Error::DimensionMismatch { context: "bilinear x", expected: self.rows, got: x.dim() });
        }
        if y.dim() != self.cols {
            return Err(Error::DimensionMismatch { context: "bilinear y", expected: self.cols, got: y.dim() });
        }
        Ok(dot(x.as_slice(), &self.matvec(y.as_slice())))
    }

    /// Row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.rows];
        if perm.len() != self.rows {
            return Err(Error::DimensionMismatch { context: "row permutation", expected: self.rows, got: perm.len() });
        }
        for &p in perm {
            if p >= self.rows || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(perm[i], j)))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sum_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }
}

/// A finite real 3-tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor3 {
    dims: [usize; 3],
    data: Vec<f64>,
}

impl DenseTensor3 {
    pub fn new(dims: [usize; 3], data: Vec<f64>) -> Result<Self> {
        for d in dims {
            check_positive("tensor", d)?;
        }
        let expected = dims.iter().product();
        if data.len() != expected {
            return Err(Error::DimensionMismatch { context: "tensor data", expected, got: data.len() });
        }
        check_finite(&data)?;
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: [usize; 3]) -> Self {
        let dims = dims.map(|d| d.max(1));
        Self { dims, data: vec![0.0; dims.iter().product()] }
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(dims);
        let [a, b, c] = t.dims;
        for i in 0..a {
            for j in 0..b {
                for k in 0..c {
                    t.data[(i * b + j) * c + k] = f(i, j, k);
                }
            }
        }
        debug_assert!(t.data.iter().all(|v| v.is_finite()));
        t
    }

    /// The rank-one tensor `x ⊗ y ⊗ z`.
    pub fn outer(x: &DenseVector, y: &DenseVector, z: &DenseVector) -> Self {
        Self::from_fn([x.dim(), y.dim(), z.dim()], |i, j, k| x[i] * y[j] * z[k])
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn flat_index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.flat_index(i, j, k)]
    }

    /// The fibre `T(i, j, ·)`.
    pub fn fibre(&self, i: usize, j: usize) -> &[f64] {
        let start = self.flat_index(i, j, 0);
        &self.data[start..start + self.dims[2]]
    }

    /// The matrix obtained by fixing index `index` along `axis`; the
    /// remaining two axes keep their relative order.
    pub fn slice(&self, axis: usize, index: usize) -> DenseMatrix {
        let [a, b, c] = self.dims;
        match axis {
            0 => DenseMatrix::from_fn(b, c, |j, k| self.get(index, j, k)),
            1 => DenseMatrix::from_fn(a, c, |i, k| self.get(i, index, k)),
            2 => DenseMatrix::from_fn(a, b, |i, j| self.get(i, j, index)),
            _ => panic!("axis out of range: {axis}"),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sum_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }
}

fn check_dims(t: &DenseTensor3, x: &DenseVector, y: &DenseVector, z: &DenseVector) -> Result<()> {
    for (context, want, got) in
        [("trilinear x", t.dims[0], x.dim()), ("trilinear y", t.dims[1], y.dim()), ("trilinear z", t.dims[2], z.dim())]
    {
        if want != got {
            return Err(Error::DimensionMismatch { context, expected: want, got });
        }
    }
    Ok(())
}

pub(crate) fn trilinear_eval_slices(t: &DenseTensor3, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let [a, b, _] = t.dims;
    let mut total = 0.0;
    for i in 0..a {
        if x[i] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..b {
            if y[j] != 0.0 {
                row += y[j] * dot(t.fibre(i, j), z);
            }
        }
        total += x[i] * row;
    }
    total
}

/// `Σ_{i,j,k} T(i,j,k) x_i y_j z_k`.
pub fn trilinear_eval(t: &DenseTensor3, x: &DenseVector, y: &DenseVector, z: &DenseVector) -> Result<f64> {
    check_dims(t, x, y, z)?;
    Ok(trilinear_eval_slices(t, x.as_slice(), y.as_slice(), z.as_slice()))
}

/// `M(i, j) = Σ_k T(i, j, k) z_k`.
pub fn contract_third(t: &DenseTensor3, z: &DenseVector) -> Result<DenseMatrix> {
    if z.dim() != t.dims[2] {
        return Err(Error::DimensionMismatch { context: "contract_third", expected: t.dims[2], got: z.dim() });
    }
    let [a, b, _] = t.dims;
    Ok(DenseMatrix::from_fn(a, b, |i, j| dot(t.fibre(i, j), z.as_slice())))
}

pub const SPECTRAL_ITERATION_CAP: usize = 1_000_000;

/// Result of [`spectral_norm`]: `lower` is certified by `witness`, `upper`
/// is the converged estimate inflated by `(1 + tol)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBracket {
    pub lower: f64,
    pub upper: f64,
    /// Unit vector with `‖M witness‖₂ = lower`.
    pub witness: DenseVector,
    pub iterations: usize,
    pub converged: bool,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest singular value of `m` by power iteration on `MᵀM`.
///
/// Iteration stops once the relative change of `‖Mv‖₂` drops below `tol / 10`
/// or after [`SPECTRAL_ITERATION_CAP`] steps, in which case `converged` is false.
pub fn spectral_norm(m: &DenseMatrix, tol: f64) -> Result<SpectralBracket> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("spectral tolerance must be positive, got {tol}")));
    }
    let n = m.cols();
    if m.is_zero() {
        return Ok(SpectralBracket {
            lower: 0.0,
            upper: 0.0,
            witness: DenseVector::unit(n, 0),
            iterations: 0,
            converged: true,
        });
    }

    // Deterministic, generic start: golden-ratio offsets avoid symmetric nullspaces.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract()).collect();
    let mut w = m.matvec(&v);
    if norm2(&w) == 0.0 {
        let best = (0..n)
            .max_by(|&a, &b| {
                let ca: f64 = (0..m.rows()).map(|i| m.get(i, a).powi(2)).sum();
                let cb: f64 = (0..m.rows()).map(|i| m.get(i, b).powi(2)).sum();
                ca.total_cmp(&cb).then(b.cmp(&a))
            })
            .unwrap_or(0);
        v = vec![0.0; n];
        v[best] = 1.0;
        w = m.matvec(&v);
    }
    let vn = norm2(&v);
    v.iter_mut().for_each(|x| *x /= vn);
    w.iter_mut().for_each(|x| *x /= vn);

    let mut sigma = norm2(&w);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < SPECTRAL_ITERATION_CAP {
        iterations += 1;
        let u = m.matvec_transpose(&w);
        let un = norm2(&u);
        if un == 0.0 {
            converged = true;
            break;
        }
        let next_v: Vec<f64> = u.iter().map(|x| x / un).collect();
        let next_w = m.matvec(&next_v);
        let next_sigma = norm2(&next_w);
        let change = (next_sigma - sigma).abs();
        if next_sigma >= sigma {
            v = next_v;
            w = next_w;
            sigma = next_sigma;
        }
        if change <= 0.1 * tol * sigma {
            converged = true;
            break;
        }
    }

    let lower = norm2(&m.matvec(&v));
    Ok(SpectralBracket {
        lower,
        upper: lower.max(sigma) * (1.0 + tol),
        witness: DenseVector::from_vec_unchecked(v),
        iterations,
        converged,
    })
}
