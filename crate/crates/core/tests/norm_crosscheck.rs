use std::f64::consts::PI;

use illposed_core::funcspace::{
    besov_norm, holder_norm_with, lp_norm, HolderEstimate, HolderOptions, BESOV_L2_EQUIVALENCE,
};
use illposed_core::spectral::{random_band_limited, Field2D, GridSpec};

/// `max_{0<u≤π} 2 sin(u/2) / u^σ` by golden-section search; the Hölder
/// seminorm of `sin(m x)` is `m^σ` times this.
fn sine_quotient(sigma: f64) -> f64 {
    let f = |u: f64| 2.0 * (u / 2.0).sin() / u.powf(sigma);
    let (mut a, mut b) = (1e-6, PI);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

fn holder(f: &Field2D, sigma: f64) -> HolderEstimate {
    let opts = HolderOptions {
        window: 48,
        global_pairs: 4096,
        ..HolderOptions::default()
    };
    holder_norm_with(f, sigma, 0, opts).unwrap()
}

#[test]
fn holder_seminorm_of_sines() {
    let grid = GridSpec::new(PI, 128).unwrap();
    for sigma in [0.25, 0.5, 0.75] {
        let c = sine_quotient(sigma);
        for m in [2.0, 4.0, 8.0] {
            let f = Field2D::from_fn(grid, |x, y| (m * x).sin() * y.cos());
            let est = holder(&f, sigma);
            let exact = c * f64::powf(m, sigma);
            assert!(
                (est.seminorm / exact - 1.0).abs() < 0.02,
                "sigma {sigma} m {m}: {} vs {exact}",
                est.seminorm
            );
            assert!(est.seminorm <= exact * (1.0 + 1e-12));
        }
    }
}

#[test]
fn holder_and_besov_agree_up_to_constants() {
    let grid = GridSpec::new(PI, 128).unwrap();
    let ratios: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&m| {
            let f = Field2D::from_fn(grid, |x, y| (m * x).sin() * y.cos());
            holder(&f, 0.5).value / besov_norm(&f, 0.5, f64::INFINITY, f64::INFINITY).unwrap()
        })
        .collect();
    for r in &ratios {
        assert!((0.25..=4.0).contains(r), "{ratios:?}");
    }
}

#[test]
fn besov_zero_two_two_brackets_l2() {
    let grid = GridSpec::new(PI, 64).unwrap();
    let (lo, hi) = BESOV_L2_EQUIVALENCE;
    for seed in 0..8 {
        let f = random_band_limited(grid, 20, seed).unwrap();
        let b = besov_norm(&f, 0.0, 2.0, 2.0).unwrap();
        let l2 = lp_norm(&f, 2.0).unwrap();
        assert!(
            b >= lo * l2 * (1.0 - 1e-12) && b <= hi * l2 * (1.0 + 1e-12),
            "{b} vs {l2}"
        );
    }
}
