use cpsd_core::constructions::{
    build_c1, build_c2, main_theorem_matrix, quantum_correlation_from_rep, tensor_op_rep,
};
use cpsd_core::linalg::{complex_to_real_embed, gram, is_psd};
use cpsd_core::types::{CSystem, PsdFactorization};
use cpsd_core::verify::{
    bounds_from_rank, check_gram, compress_factorization, tsirelson_weights,
};
use cpsd_core::{DenseMatrix, Field, Tolerances};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex_square(d: usize, vals: &[f64]) -> DenseMatrix {
    DenseMatrix::from_fn_complex(d, d, |i, j| {
        Complex64::new(vals[2 * (i * d + j)], vals[2 * (i * d + j) + 1])
    })
}

/// `G G^*`, real when `field` is real.
fn psd_from(d: usize, vals: &[f64], field: Field) -> DenseMatrix {
    let g = match field {
        Field::Real => DenseMatrix::from_fn(d, d, |i, j| vals[i * d + j]),
        Field::Complex => complex_square(d, vals),
    };
    let x = &g * &g.adjoint();
    match field {
        Field::Real => x.real_part(),
        Field::Complex => x.hermitian_part().unwrap().into_complex_field(),
    }
}

fn hermitian_from(d: usize, vals: &[f64]) -> DenseMatrix {
    let g = complex_square(d, vals);
    (&g + &g.adjoint()).scale(0.5).into_complex_field()
}

/// `Re sum_kl conj(a_kl) b_kl`, written out entry by entry.
fn inner_oracle(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Real), Just(Field::Complex)]
}

fn family() -> impl Strategy<Value = (Field, usize, Vec<Vec<f64>>)> {
    (field_strategy(), 1usize..5, 1usize..6).prop_flat_map(|(field, d, n)| {
        (
            Just(field),
            Just(d),
            prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2 * d * d), n),
        )
    })
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (n > 1e-3).then(|| v.iter().map(|x| x / n).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gram_round_trip((field, d, raw) in family()) {
        let factors: Vec<DenseMatrix> = raw.iter().map(|v| psd_from(d, v, field)).collect();
        let n = factors.len();
        let oracle = DenseMatrix::from_fn(n, n, |i, j| inner_oracle(&factors[i], &factors[j]));
        let g = gram(&factors).unwrap();
        prop_assert!(g.matrix.max_abs_diff(&oracle).unwrap() <= 1e-12 * (1.0 + oracle.max_abs()));
        prop_assert!(g.max_imag <= 1e-12 * (1.0 + oracle.max_abs()));
        let f = PsdFactorization::from_factors(field, factors).unwrap();
        let report = check_gram(&oracle, &f, 1e-10).unwrap();
        prop_assert!(report.passed, "{}", report);
    }

    #[test]
    fn compress_preserves_gram_and_is_idempotent(
        field in field_strategy(),
        d in 2usize..6,
        k in 1usize..3,
        basis in prop::collection::vec(-1.0f64..1.0, 2 * 36),
        raw in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2 * 9), 1..5),
    ) {
        let k = k.min(d - 1);
        // Factors U A_i U^* supported on a k-dimensional subspace of C^d.
        let u = match field {
            Field::Real => DenseMatrix::from_fn(d, k, |i, j| basis[i * 6 + j]),
            Field::Complex => DenseMatrix::from_fn_complex(d, k, |i, j| {
                Complex64::new(basis[2 * (i * 6 + j)], basis[2 * (i * 6 + j) + 1])
            }),
        };
        let factors: Vec<DenseMatrix> = raw
            .iter()
            .map(|v| {
                let a = psd_from(k, v, field);
                let x = &(&u * &a) * &u.adjoint();
                match field {
                    Field::Real => x.real_part(),
                    Field::Complex => x.hermitian_part().unwrap().into_complex_field(),
                }
            })
            .collect();
        let f = PsdFactorization::from_factors(field, factors).unwrap();
        let scale = 1.0 + f.target.max_abs();
        let c = compress_factorization(&f, 1e-10).unwrap();
        prop_assert!(c.d <= k);
        let gc = gram(&c.factors).unwrap().matrix;
        prop_assert!(gc.max_abs_diff(&f.target).unwrap() < 1e-12 * scale);
        let cc = compress_factorization(&c, 1e-10).unwrap();
        prop_assert_eq!(cc.d, c.d);
        let gcc = gram(&cc.factors).unwrap().matrix;
        prop_assert!(gcc.max_abs_diff(&gc).unwrap() < 1e-12 * scale);
        let tol = Tolerances::default();
        for x in &c.factors {
            prop_assert!(is_psd(x, &tol).unwrap());
        }
    }

    #[test]
    fn embedding_preserves_inner_products(
        d in 1usize..5,
        a in prop::collection::vec(-2.0f64..2.0, 32),
        b in prop::collection::vec(-2.0f64..2.0, 32),
    ) {
        let (a, b) = (hermitian_from(d, &a), hermitian_from(d, &b));
        let tol = Tolerances::default();
        let (ea, eb) = (complex_to_real_embed(&a, &tol).unwrap(), complex_to_real_embed(&b, &tol).unwrap());
        prop_assert!((inner_oracle(&ea, &eb) - inner_oracle(&a, &b)).abs() < 1e-12);
        prop_assert!((inner_oracle(&ea, &ea) - inner_oracle(&a, &a)).abs() < 1e-12);
    }

    #[test]
    fn generated_correlations_do_not_signal(
        r in 1usize..5,
        xs in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 1..4),
        ys in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 1..4),
    ) {
        let xs: Option<Vec<Vec<f64>>> = xs.iter().map(|v| unit(&v[..r])).collect();
        let ys: Option<Vec<Vec<f64>>> = ys.iter().map(|v| unit(&v[..r])).collect();
        let (Some(mut xs), Some(ys)) = (xs, ys) else { return Ok(()) };
        // Pad with the standard basis so the vectors span R^r.
        for i in 0..r {
            let mut e = vec![0.0; r];
            e[i] = 1.0;
            xs.push(e);
        }
        let sys = CSystem::new(r, xs, ys).unwrap();
        let rep = tensor_op_rep(&sys).unwrap();
        let p = quantum_correlation_from_rep(&rep);
        prop_assert!(p.signaling() < 1e-10);
        prop_assert!(p.normalization_error() < 1e-10);
        prop_assert!(rep.correlation().max_abs_diff(&sys.correlation()).unwrap() < 1e-10);
    }

    #[test]
    fn rank_bounds_are_ordered(rank in 0usize..5000) {
        let (real, complex) = bounds_from_rank(rank);
        prop_assert!(complex <= real && real <= 2 * complex);
        prop_assert!(real * (real + 1) / 2 >= rank && complex * complex >= rank);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tsirelson_weights_are_rotation_invariant(
        r in 2usize..6,
        angles in prop::collection::vec(-3.0f64..3.0, 10),
        second in any::<bool>(),
    ) {
        let (_, sys) = if second { build_c2(r).unwrap() } else { build_c1(r).unwrap() };
        let dim = sys.r;
        // Product of Givens rotations.
        let mut q = DenseMatrix::identity(dim).real_part();
        for (k, a) in angles.iter().enumerate() {
            let (i, j) = (k % dim, (k + 1 + k / dim) % dim);
            if i == j {
                continue;
            }
            let mut g = DenseMatrix::identity(dim).real_part();
            g.set_re(i, i, a.cos());
            g.set_re(j, j, a.cos());
            g.set_re(i, j, -a.sin());
            g.set_re(j, i, a.sin());
            q = &q * &g;
        }
        let rot = |v: &Vec<f64>| (0..dim).map(|i| (0..dim).map(|j| q.re(i, j) * v[j]).sum()).collect();
        let rotated = CSystem::new(dim, sys.xs.iter().map(rot).collect(), sys.ys.iter().map(rot).collect()).unwrap();
        let w0 = tsirelson_weights(&sys, 1e-10);
        let w1 = tsirelson_weights(&rotated, 1e-10);
        prop_assert!((w0.residual - w1.residual).abs() < 1e-8);
        for (a, b) in w0.lambdas.iter().chain(&w0.mus).zip(w1.lambdas.iter().chain(&w1.mus)) {
            prop_assert!((a - b).abs() < 1e-6, "{} vs {}", a, b);
        }
    }
}

#[test]
fn main_theorem_correlations_do_not_signal() {
    for k in 1..=3 {
        let (_, _, cert) = main_theorem_matrix(k).unwrap();
        let (_, sys) = build_c1(2 * k).unwrap();
        let p = quantum_correlation_from_rep(&tensor_op_rep(&sys).unwrap());
        assert!(p.signaling() < 1e-10);
        assert!(cert.c.max_abs_diff(&sys.correlation()).unwrap() < 1e-12);
    }
}
