#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;

use pinorm::bounds::{harmonic_cumsum, harmonic_cumsum_closed};
use pinorm::constructions::{hilbert, permuted_hilbert, pn_form, rademacher_l1};
use pinorm::linalg::{
    contract_third, spectral_norm, trilinear_eval, DenseMatrix, DenseTensor3, DenseVector, SignVector,
};
use pinorm::norms::{opnorm_inf_1, opnorm_inf_2, trilinear_norm_exact, Guard};
use pinorm::projective::{projective_norm_exact, CutPlaneOptions};

fn small_int_tensor() -> impl Strategy<Value = DenseTensor3> {
    (1usize..=3, 1usize..=3, 1usize..=4).prop_flat_map(|(a, b, c)| {
        prop::collection::vec(-3i32..=3, a * b * c)
            .prop_map(move |v| DenseTensor3::new([a, b, c], v.into_iter().map(f64::from).collect()).unwrap())
    })
}

fn small_matrix() -> impl Strategy<Value = DenseMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        prop::collection::vec(-1.0f64..1.0, r * c).prop_map(move |v| DenseMatrix::new(r, c, v).unwrap())
    })
}

fn vector(dim: usize) -> impl Strategy<Value = DenseVector> {
    prop::collection::vec(-2.0f64..2.0, dim).prop_map(|v| DenseVector::new(v).unwrap())
}

fn brute_inf_1(m: &DenseMatrix) -> f64 {
    let mut best: f64 = 0.0;
    for px in 0..1u64 << m.rows() {
        let x = SignVector::from_pattern(m.rows(), px).to_dense();
        for py in 0..1u64 << m.cols() {
            let y = SignVector::from_pattern(m.cols(), py).to_dense();
            best = best.max(m.bilinear(&x, &y).unwrap().abs());
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trilinear_eval_is_linear_in_each_factor(
        t in small_int_tensor(),
        alpha in -2.0f64..2.0,
        seed in any::<u64>(),
    ) {
        let [a, b, c] = t.dims();
        let pick = |d: usize, s: u64| DenseVector::from_fn(d, |i| ((s >> (i % 60)) & 7) as f64 - 3.5);
        let (x, x2, y, z) = (pick(a, seed), pick(a, seed.rotate_left(13)), pick(b, seed.rotate_left(29)), pick(c, seed.rotate_left(41)));
        let sum = DenseVector::from_fn(a, |i| alpha * x[i] + x2[i]);
        let lhs = trilinear_eval(&t, &sum, &y, &z).unwrap();
        let rhs = alpha * trilinear_eval(&t, &x, &y, &z).unwrap() + trilinear_eval(&t, &x2, &y, &z).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn contraction_matches_evaluation(t in small_int_tensor(), s in any::<u64>()) {
        let [a, b, c] = t.dims();
        let x = SignVector::from_pattern(a, s).to_dense();
        let y = SignVector::from_pattern(b, s >> 8).to_dense();
        let z = DenseVector::from_fn(c, |k| (k as f64 + 1.0) * if s >> (16 + k) & 1 == 1 { -0.5 } else { 0.25 });
        let m = contract_third(&t, &z).unwrap();
        let lhs = m.bilinear(&x, &y).unwrap();
        prop_assert!((lhs - trilinear_eval(&t, &x, &y, &z).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn inf_1_matches_brute_force(m in small_matrix()) {
        let w = opnorm_inf_1(&m, Guard::default()).unwrap();
        prop_assert!((w.value - brute_inf_1(&m)).abs() <= 1e-12);
        let x = w.x.unwrap().to_dense();
        let y = w.y.unwrap().to_dense();
        prop_assert!((m.bilinear(&x, &y).unwrap().abs() - w.value).abs() <= 1e-12);
    }

    #[test]
    fn sign_flip_of_a_slice_keeps_trilinear_norm(t in small_int_tensor(), axis in 0usize..3, idx in 0usize..4) {
        let dims = t.dims();
        let idx = idx % dims[axis];
        let flipped = DenseTensor3::from_fn(dims, |i, j, k| {
            let hit = [i, j, k][axis] == idx;
            if hit { -t.get(i, j, k) } else { t.get(i, j, k) }
        });
        let a = trilinear_norm_exact(&t, Guard::default()).unwrap().value;
        let b = trilinear_norm_exact(&flipped, Guard::default()).unwrap().value;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn row_permutation_keeps_spectral_norm(m in small_matrix(), rot in 0usize..4) {
        let perm: Vec<usize> = (0..m.rows()).map(|i| (i + rot) % m.rows()).collect();
        let p = m.permute_rows(&perm).unwrap();
        let a = spectral_norm(&m, 1e-10).unwrap();
        let b = spectral_norm(&p, 1e-10).unwrap();
        prop_assert!(a.lower <= b.upper + 1e-9 && b.lower <= a.upper + 1e-9);
        prop_assert!(opnorm_inf_2(&m, Guard::default()).unwrap().value <= a.upper * (m.cols() as f64).sqrt() + 1e-9);
    }

    #[test]
    fn projective_norm_sits_between_injective_and_l1(m in small_matrix()) {
        let b = projective_norm_exact(&m, &CutPlaneOptions::default()).unwrap();
        prop_assert!(b.converged());
        prop_assert!(b.lower >= m.max_abs() - 1e-9);
        prop_assert!(b.upper <= m.sum_abs() + 1e-9);
        prop_assert!(b.upper - b.lower <= 1e-6 * b.upper.max(1e-12));
        let recon = b.upper_witness.reconstruct(&[m.rows(), m.cols()]);
        for (r, e) in recon.iter().zip(m.data()) {
            prop_assert!((r - e).abs() <= 1e-9);
        }
    }

    #[test]
    fn projective_norm_of_rank_one(x in vector(2), y in vector(3), z in vector(2)) {
        let t = DenseTensor3::outer(&x, &y, &z);
        let want = x.norm_sup() * y.norm_sup() * z.norm_sup();
        let b = projective_norm_exact(&t, &CutPlaneOptions::default()).unwrap();
        prop_assert!((b.upper - want).abs() <= 1e-6 * want.max(1e-9), "{} vs {want}", b.upper);
        prop_assert!(b.lower <= b.upper);
    }

    #[test]
    fn pn_form_contracts_to_rademacher_sum(n in 1usize..=5, sx in any::<u64>(), sy in any::<u64>()) {
        let phi = pn_form(n).unwrap();
        let p = permuted_hilbert(n).unwrap();
        let g = rademacher_l1(n).unwrap();
        let x = SignVector::from_pattern(n, sx).to_vec();
        let y = SignVector::from_pattern(n, sy).to_vec();
        let py = p.matvec(&y);
        let c: Vec<f64> = (0..n).map(|i| x[i] * py[i]).collect();
        let dim = 1usize << n;
        let direct: f64 = (0..dim).map(|k| (0..n).map(|i| c[i] * g.vectors[i][k]).sum::<f64>().abs()).sum();
        let contracted: f64 = (0..dim)
            .map(|k| {
                let mut v = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        v += x[i] * y[j] * phi.get(i, j, k);
                    }
                }
                v.abs()
            })
            .sum();
        prop_assert!((direct - contracted).abs() <= 1e-12);
        prop_assert!(contracted <= c.iter().map(|v| v.abs()).sum::<f64>() + 1e-12);
        prop_assert!(contracted <= c.iter().map(|v| v * v).sum::<f64>().sqrt() + 1e-12);
    }

    #[test]
    fn permuted_hilbert_reverses_rows(n in 1usize..40) {
        let h = hilbert(n).unwrap();
        let p = permuted_hilbert(n).unwrap();
        for i in 0..n {
            prop_assert_eq!(p.row(i), h.row(n - 1 - i));
        }
    }

    #[test]
    fn harmonic_closed_form(n in 1usize..200_000) {
        let a = harmonic_cumsum(n);
        let b = harmonic_cumsum_closed(n);
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        if n >= 2 {
            let x = n as f64;
            prop_assert!(a >= 0.5 * x * x.ln());
        }
    }
}
