use std::f64::consts::PI;

use illposed_core::funcspace::{besov_norm, lp_norm, w1r_norm};
use illposed_core::spectral::{
    biot_savart, curl, divergence, frac_laplacian, laplacian, random_band_limited, read_field_from,
    write_field_to, Field2D, GridSpec,
};
use proptest::prelude::*;

fn grid() -> GridSpec {
    GridSpec::new(PI, 32).unwrap()
}

fn field(seed: u64) -> Field2D {
    random_band_limited(grid(), 6, seed).unwrap()
}

fn max_diff(a: &Field2D, b: &Field2D) -> f64 {
    a.physical()
        .iter()
        .zip(b.physical())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![1.0..8.0, Just(f64::INFINITY)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lp_norm_is_homogeneous(seed in any::<u64>(), c in -50.0..50.0f64, p in exponent()) {
        let f = field(seed);
        let lhs = lp_norm(&f.scale(c), p).unwrap();
        let rhs = c.abs() * lp_norm(&f, p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn lp_norm_triangle(a in any::<u64>(), b in any::<u64>(), p in exponent()) {
        let (f, g) = (field(a), field(b));
        let sum = lp_norm(&(&f + &g), p).unwrap();
        prop_assert!(sum <= (1.0 + 1e-12) * (lp_norm(&f, p).unwrap() + lp_norm(&g, p).unwrap()));
    }

    #[test]
    fn w1r_and_besov_triangle(a in any::<u64>(), b in any::<u64>(), r in 1.5..6.0f64) {
        let (f, g) = (field(a), field(b));
        let w = w1r_norm(&(&f + &g), r).unwrap();
        prop_assert!(w <= (1.0 + 1e-12) * (w1r_norm(&f, r).unwrap() + w1r_norm(&g, r).unwrap()));
        let bs = besov_norm(&(&f + &g), 1.0, r, 1.0).unwrap();
        let sum = besov_norm(&f, 1.0, r, 1.0).unwrap() + besov_norm(&g, 1.0, r, 1.0).unwrap();
        prop_assert!(bs <= (1.0 + 1e-12) * sum);
    }

    #[test]
    fn biot_savart_is_divergence_free(seed in any::<u64>()) {
        let w = field(seed);
        let u = biot_savart(&w).unwrap();
        let scale = w.max_abs();
        prop_assert!(divergence(&u).max_abs() <= 1e-12 * scale);
        prop_assert!(max_diff(&curl(&u), &w) <= 1e-12 * scale);
    }

    #[test]
    fn fractional_powers_compose(seed in any::<u64>(), s in 0.0..2.0f64, t in 0.0..2.0f64) {
        let f = field(seed);
        let two_steps = frac_laplacian(&frac_laplacian(&f, s).unwrap(), t).unwrap();
        let one_step = frac_laplacian(&f, s + t).unwrap();
        prop_assert!(max_diff(&two_steps, &one_step) <= 1e-10 * one_step.max_abs().max(1.0));
    }

    #[test]
    fn ilf2_round_trip_is_exact(seed in any::<u64>()) {
        let f = field(seed);
        let mut buf = Vec::new();
        write_field_to(&mut buf, &f).unwrap();
        let g = read_field_from(buf.as_slice()).unwrap();
        prop_assert_eq!(f.physical(), g.physical());
        prop_assert_eq!(f.grid(), g.grid());
    }
}

#[test]
fn order_two_matches_minus_laplacian() {
    let f = field(7);
    let a = frac_laplacian(&f, 2.0).unwrap();
    let b = -&laplacian(&f);
    assert!(max_diff(&a, &b) < 1e-10 * b.max_abs());
}

#[test]
fn truncated_ilf2_is_rejected() {
    let mut buf = Vec::new();
    write_field_to(&mut buf, &field(1)).unwrap();
    buf.truncate(buf.len() - 3);
    assert!(read_field_from(buf.as_slice()).is_err());
    let mut bad = Vec::new();
    write_field_to(&mut bad, &field(1)).unwrap();
    bad[0] = b'X';
    assert!(read_field_from(bad.as_slice()).is_err());
}
