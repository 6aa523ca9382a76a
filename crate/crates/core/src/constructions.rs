//! Explicit objects: Hilbert matrices, the Haar and Rademacher systems,
//! summing-basis tensors, the functional `P_n` as a trilinear form, and
//! branches of the weakly null tree.
//!
//! Formulas are stated 1-based and translated to zero-based storage here.
//! Logarithms elsewhere in the crate are natural.

use std::f64::consts::PI;
use std::fmt;

use crate::linalg::{DenseMatrix, DenseTensor3, DenseVector};
use crate::{Error, Result};

/// Largest `n` for which the `2^n × 2^n` Haar system is materialized.
pub const MAX_HAAR_ORDER: usize = 12;
/// Largest `n` for Rademacher systems (vectors of length `2^n`).
pub const MAX_RADEMACHER_ORDER: usize = 24;
/// Largest `n` for the `n × n × 2^n` tensors.
pub const MAX_TENSOR_ORDER: usize = 16;

fn check_order(what: &str, n: usize, max: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(format!("{what}: n must be at least 1")));
    }
    if n > max {
        return Err(Error::InvalidArgument(format!("{what}: n = {n} exceeds the materialization limit {max}")));
    }
    Ok(())
}

/// Hilbert-inequality constant `τ` and the growth constant `Δ = 1/(2τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    tau: f64,
    delta: f64,
}

impl Default for Constants {
    /// `τ = π`, the sharp constant in Hilbert's inequality.
    fn default() -> Self {
        Self { tau: PI, delta: 0.5 / PI }
    }
}

impl Constants {
    pub fn with_tau(tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau must be positive and finite, got {tau}")));
        }
        Ok(Self { tau, delta: 0.5 / tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// `h_n(i, j) = 1/(n+1-i-j)` off the anti-diagonal `i + j = n + 1`, zero on it.
pub fn hilbert(n: usize) -> Result<DenseMatrix> {
    check_order("hilbert", n, usize::MAX)?;
    let n1 = n as f64 + 1.0;
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        let d = n1 - (i + 1) as f64 - (j + 1) as f64;
        if d == 0.0 {
            0.0
        } else {
            1.0 / d
        }
    }))
}

/// `p_n(i, j) = 1/(i-j)` off the diagonal, zero on it. Row `i` of `p_n` is
/// row `n+1-i` of `h_n`.
pub fn permuted_hilbert(n: usize) -> Result<DenseMatrix> {
    check_order("permuted_hilbert", n, usize::MAX)?;
    Ok(DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 / (i as f64 - j as f64) }))
}

/// The summing-basis vector `s_i = e_1 + … + e_i` in dimension `dim`.
pub fn summing_vector(i: usize, dim: usize) -> Result<DenseVector> {
    if i == 0 || i > dim {
        return Err(Error::InvalidArgument(format!("summing_vector needs 1 <= i <= dim, got i = {i}, dim = {dim}")));
    }
    Ok(DenseVector::from_fn(dim, |k| if k < i { 1.0 } else { 0.0 }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Haar,
    RademacherSup,
    RademacherL1,
}

impl FamilyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Haar => "haar",
            Self::RademacherSup => "rademacher_sup",
            Self::RademacherL1 => "rademacher_l1",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A family of vectors of length `2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFamily {
    pub kind: FamilyKind,
    pub n: usize,
    pub vectors: Vec<DenseVector>,
}

/// Support of the 1-based Haar vector `y_{2^k + l}` in dimension `2^n`:
/// `+1` on `[start, start + half)`, `-1` on `[start + half, start + 2 half)`.
fn haar_blocks(n: usize, k: usize, l: usize) -> (usize, usize) {
    let half = 1usize << (n - k - 1);
    ((2 * l - 2) * half, half)
}

fn add_haar(target: &mut [f64], n: usize, k: usize, l: usize) {
    let (start, half) = haar_blocks(n, k, l);
    target[start..start + half].iter_mut().for_each(|v| *v += 1.0);
    target[start + half..start + 2 * half].iter_mut().for_each(|v| *v -= 1.0);
}

/// The Haar system `y_1, …, y_{2^n}` with respect to the unit basis of a
/// `2^n`-dimensional space: `y_1` is constant and `y_{2^k+l}` is `+1`/`-1`
/// on two adjacent dyadic blocks of length `2^{n-k-1}`.
pub fn haar_system(n: usize) -> Result<BasisFamily> {
    check_order("haar_system", n, MAX_HAAR_ORDER)?;
    let dim = 1usize << n;
    let mut vectors = Vec::with_capacity(dim);
    vectors.push(DenseVector::ones(dim));
    for k in 0..n {
        for l in 1..=(1usize << k) {
            let mut y = vec![0.0; dim];
            add_haar(&mut y, n, k, l);
            vectors.push(DenseVector::from_vec_unchecked(y));
        }
    }
    Ok(BasisFamily { kind: FamilyKind::Haar, n, vectors })
}

/// `f_k^n = Σ_{l=1}^{2^{k-1}} y_{2^{k-1}+l}`, for `k = 1..=n`; every entry is `±1`.
pub fn rademacher_sup(n: usize) -> Result<BasisFamily> {
    check_order("rademacher_sup", n, MAX_RADEMACHER_ORDER)?;
    let dim = 1usize << n;
    let vectors = (1..=n)
        .map(|k| {
            let mut f = vec![0.0; dim];
            for l in 1..=(1usize << (k - 1)) {
                add_haar(&mut f, n, k - 1, l);
            }
            DenseVector::from_vec_unchecked(f)
        })
        .collect();
    Ok(BasisFamily { kind: FamilyKind::RademacherSup, n, vectors })
}

/// `g_i^n = 2^{-n} f_i^n`, the `ℓ_1`-normalized system with `⟨g_i^n, f_j^n⟩ = δ_ij`.
pub fn rademacher_l1(n: usize) -> Result<BasisFamily> {
    let sup = rademacher_sup(n)?;
    let scale = 1.0 / (1u64 << n) as f64;
    Ok(BasisFamily {
        kind: FamilyKind::RademacherL1,
        n,
        vectors: sup.vectors.iter().map(|f| f.scaled(scale)).collect(),
    })
}

/// `K_n = Σ_{i=1}^n e_i ⊗ s_i`, the lower-triangular all-ones matrix.
pub fn kp_tensor(n: usize) -> Result<DenseMatrix> {
    check_order("kp_tensor", n, usize::MAX)?;
    Ok(DenseMatrix::from_fn(n, n, |i, j| if j <= i { 1.0 } else { 0.0 }))
}

/// `T_n = Σ_{i=1}^n e_i ⊗ s_i ⊗ f_i^n`, dims `(n, n, 2^n)`.
pub fn paper_tensor(n: usize) -> Result<DenseTensor3> {
    check_order("paper_tensor", n, MAX_TENSOR_ORDER)?;
    let f = rademacher_sup(n)?;
    Ok(DenseTensor3::from_fn([n, n, 1 << n], |i, j, k| if j <= i { f.vectors[i][k] } else { 0.0 }))
}

/// `Φ_n(i, j, k) = p_n(i, j) g_i^n[k]`: the trilinear form of the operator
/// `P_n(e_i ⊗ e_j) = p_n(i, j) g_i^n`.
pub fn pn_form(n: usize) -> Result<DenseTensor3> {
    check_order("pn_form", n, MAX_TENSOR_ORDER)?;
    let p = permuted_hilbert(n)?;
    let g = rademacher_l1(n)?;
    Ok(DenseTensor3::from_fn([n, n, 1 << n], |i, j, k| p.get(i, j) * g.vectors[i][k]))
}

/// A node `(m_1 < … < m_n)` of the index tree, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Branch {
    indices: Vec<usize>,
}

impl Branch {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("branch must be non-empty".into()));
        }
        if indices[0] == 0 {
            return Err(Error::InvalidArgument("branch indices are 1-based".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!("branch indices must be strictly increasing: {indices:?}")));
        }
        Ok(Self { indices })
    }

    /// `(1, 2, …, n)`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::new((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn last(&self) -> usize {
        *self.indices.last().expect("non-empty")
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(" "))
    }
}

/// `Σ_{i=1}^n e_{m_i} ⊗ s_i ⊗ f_i^n`, dims `(m_n, n, 2^n)`.
pub fn tree_branch(n: usize, branch: &Branch) -> Result<DenseTensor3> {
    check_order("tree_branch", n, MAX_TENSOR_ORDER)?;
    if branch.len() != n {
        return Err(Error::DimensionMismatch { context: "tree_branch length", expected: n, got: branch.len() });
    }
    let f = rademacher_sup(n)?;
    let mut t = DenseTensor3::zeros([branch.last(), n, 1 << n]);
    for (i, &m) in branch.indices().iter().enumerate() {
        for j in 0..=i {
            let start = t.flat_index(m - 1, j, 0);
            t.data_mut()[start..start + (1 << n)].copy_from_slice(f.vectors[i].as_slice());
        }
    }
    Ok(t)
}

/// Drops every all-zero slice along axis 0.
pub fn delete_zero_rows(t: &DenseTensor3) -> DenseTensor3 {
    let [a, b, c] = t.dims();
    let keep: Vec<usize> = (0..a).filter(|&i| (0..b).any(|j| t.fibre(i, j).iter().any(|v| *v != 0.0))).collect();
    if keep.is_empty() {
        return DenseTensor3::zeros([1, b, c]);
    }
    DenseTensor3::from_fn([keep.len(), b, c], |i, j, k| t.get(keep[i], j, k))
}
