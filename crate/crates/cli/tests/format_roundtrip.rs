use cpsd_cli::format::{parse_complex, parse_factors, parse_matrix, render_complex, render_factors, render_matrix};
use cpsd_core::types::PsdFactorization;
use cpsd_core::{DenseMatrix, Field};
use num_complex::Complex64;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
        Just(5e-324),
        Just(f64::MAX),
    ]
}

fn same_bits(a: &DenseMatrix, b: &DenseMatrix) -> bool {
    a.dims() == b.dims()
        && a.field() == b.field()
        && a.entries()
            .iter()
            .zip(b.entries())
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
}

proptest! {
    #[test]
    fn real_matrix_round_trip(rows in 0usize..5, cols in 0usize..5, seed in prop::collection::vec(finite(), 25)) {
        let m = DenseMatrix::from_real(rows, cols, &seed[..rows * cols]);
        let back = parse_matrix(&render_matrix(&m)).unwrap();
        prop_assert!(same_bits(&m, &back));
    }

    #[test]
    fn complex_matrix_round_trip(n in 1usize..4, re in prop::collection::vec(finite(), 9), im in prop::collection::vec(finite(), 9)) {
        let data: Vec<Complex64> = re.iter().zip(&im).take(n * n).map(|(a, b)| Complex64::new(*a, *b)).collect();
        let m = DenseMatrix::from_complex(n, n, data).into_complex_field();
        let back = parse_matrix(&render_matrix(&m)).unwrap();
        prop_assert!(same_bits(&m, &back));
    }

    #[test]
    fn complex_token_round_trip(re in finite(), im in finite()) {
        let z = Complex64::new(re, im);
        let s = render_complex(z);
        prop_assert!(!s.contains(' '));
        let back = parse_complex(&s).unwrap();
        prop_assert_eq!(back.re.to_bits(), re.to_bits());
        prop_assert_eq!(back.im.to_bits(), im.to_bits());
    }

    #[test]
    fn factor_bundle_round_trip(count in 1usize..4, d in 1usize..4, vals in prop::collection::vec(-10.0f64..10.0, 48)) {
        let factors: Vec<DenseMatrix> = (0..count)
            .map(|k| DenseMatrix::from_fn_complex(d, d, |i, j| Complex64::new(vals[k * 16 + i * 4 + j], vals[(k * 16 + j * 4 + i + 7) % 48])))
            .collect();
        let f = PsdFactorization::from_factors(Field::Complex, factors).unwrap();
        let back = parse_factors(&render_factors(&f)).unwrap();
        prop_assert_eq!(back.d, d);
        prop_assert_eq!(back.field, Field::Complex);
        for (a, b) in f.factors.iter().zip(&back.factors) {
            prop_assert!(same_bits(&a.clone().into_complex_field(), b));
        }
    }
}
