use illposed_core::lagrangian::{
    advect, det, flow_distance, max_jacobian, volume_defect, AdvectConfig, FlowTrajectory,
    FnSampler, Sample,
};

fn hyperbolic(_t: f64, x: [f64; 2]) -> Sample {
    ([-x[0], x[1]], [[-1.0, 0.0], [0.0, 1.0]])
}

fn rotation(_t: f64, x: [f64; 2]) -> Sample {
    ([-x[1], x[0]], [[0.0, -1.0], [1.0, 0.0]])
}

/// Cellular flow from the stream function `(1 + a sin t) sin x₁ sin x₂`.
fn cellular(a: f64) -> impl Fn(f64, [f64; 2]) -> Sample + Sync {
    move |t, x| {
        let amp = 1.0 + a * t.sin();
        let (s1, c1, s2, c2) = (x[0].sin(), x[0].cos(), x[1].sin(), x[1].cos());
        // u = (-∂₂ψ, ∂₁ψ)
        let u = [-amp * s1 * c2, amp * c1 * s2];
        let du = [
            [-amp * c1 * c2, amp * s1 * s2],
            [-amp * s1 * s2, amp * c1 * c2],
        ];
        (u, du)
    }
}

fn seeds() -> Vec<[f64; 2]> {
    vec![[0.3, 0.7], [1.1, -0.4], [-2.0, 0.5], [0.0, 0.0]]
}

fn end(flow: &FlowTrajectory) -> &illposed_core::lagrangian::FlowState {
    flow.states.last().unwrap()
}

#[test]
fn hyperbolic_flow_matches_exponentials() {
    let s = FnSampler::new((0.0, 1.0), hyperbolic);
    let flow = advect(
        &s,
        &seeds(),
        &AdvectConfig {
            dt: 0.01,
            t_end: 1.0,
            cadence: 10,
        },
    )
    .unwrap();
    let e = std::f64::consts::E;
    for (seed, (x, j)) in seeds()
        .iter()
        .zip(end(&flow).positions.iter().zip(&end(&flow).jacobians))
    {
        assert!((x[0] - seed[0] / e).abs() < 1e-9);
        assert!((x[1] - seed[1] * e).abs() < 1e-9);
        assert!((j[0][0] - 1.0 / e).abs() < 1e-9 && (j[1][1] - e).abs() < 1e-9);
        assert_eq!(j[0][1], 0.0);
    }
    let m = max_jacobian(&flow).unwrap();
    assert_eq!(m.entry, (1, 1));
    assert!((m.value - e).abs() < 1e-9);
    assert_eq!(flow.states.len(), 11);
}

#[test]
fn rotation_is_rigid() {
    let s = FnSampler::new((0.0, 2.0), rotation);
    let flow = advect(
        &s,
        &seeds(),
        &AdvectConfig {
            dt: 0.01,
            t_end: 2.0,
            cadence: 50,
        },
    )
    .unwrap();
    let (c, sn) = (2f64.cos(), 2f64.sin());
    for (seed, x) in seeds().iter().zip(&end(&flow).positions) {
        assert!((x[0] - (c * seed[0] - sn * seed[1])).abs() < 1e-9);
        assert!((x[1] - (sn * seed[0] + c * seed[1])).abs() < 1e-9);
    }
    assert!(volume_defect(&flow) < 1e-9);
}

#[test]
fn rk4_converges_at_fourth_order() {
    let f = cellular(0.5);
    let s = FnSampler::new((0.0, 2.0), &f);
    let run = |dt: f64| {
        advect(
            &s,
            &seeds(),
            &AdvectConfig {
                dt,
                t_end: 2.0,
                cadence: 1_000_000,
            },
        )
        .unwrap()
    };
    let reference = run(1e-4);
    let errors: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&dt| {
            let flow = run(dt);
            end(&flow)
                .positions
                .iter()
                .zip(&end(&reference).positions)
                .map(|(a, b)| (a[0] - b[0]).hypot(a[1] - b[1]))
                .fold(0.0, f64::max)
        })
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(
            (order - 4.0).abs() < 0.3,
            "observed order {order}, errors {errors:?}"
        );
    }
}

#[test]
fn incompressible_flow_keeps_unit_determinant() {
    let f = cellular(0.5);
    let s = FnSampler::new((0.0, 3.0), &f);
    let flow = advect(
        &s,
        &seeds(),
        &AdvectConfig {
            dt: 0.01,
            t_end: 3.0,
            cadence: 10,
        },
    )
    .unwrap();
    assert!(volume_defect(&flow) < 1e-6);
    assert!(end(&flow)
        .jacobians
        .iter()
        .all(|j| (det(j) - 1.0).abs() < 1e-6));
}

#[test]
fn distance_grows_at_most_exponentially() {
    // Perturbing the velocity by d·v gives flow_distance ≤ C·d on a fixed
    // horizon; the ratio settles as d is halved.
    let base = cellular(0.0);
    let cfg = AdvectConfig {
        dt: 0.01,
        t_end: 1.0,
        cadence: 10,
    };
    let base = &base;
    let reference = advect(&FnSampler::new((0.0, 1.0), base), &seeds(), &cfg).unwrap();
    let ratios: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&d: &f64| {
            let g = move |t: f64, x: [f64; 2]| {
                let (u, du) = base(t, x);
                let (v, dv) = rotation(t, x);
                let mix = |a: f64, b: f64| a + d * b;
                (
                    [mix(u[0], v[0]), mix(u[1], v[1])],
                    [
                        [mix(du[0][0], dv[0][0]), mix(du[0][1], dv[0][1])],
                        [mix(du[1][0], dv[1][0]), mix(du[1][1], dv[1][1])],
                    ],
                )
            };
            let flow = advect(&FnSampler::new((0.0, 1.0), g), &seeds(), &cfg).unwrap();
            flow_distance(&reference, &flow).unwrap() / d
        })
        .collect();
    assert!(ratios.iter().all(|r| r.is_finite() && *r > 0.0));
    let spread = (ratios[1] - ratios[2]).abs() / ratios[2];
    assert!(spread < 0.05, "ratios {ratios:?}");
}

#[test]
fn leaving_the_span_is_an_error() {
    let s = FnSampler::new((0.0, 1.0), hyperbolic);
    assert!(advect(
        &s,
        &seeds(),
        &AdvectConfig {
            dt: 0.01,
            t_end: 2.0,
            cadence: 1
        }
    )
    .is_err());
    assert!(advect(
        &s,
        &seeds(),
        &AdvectConfig {
            dt: 0.01,
            t_end: 1.0,
            cadence: 0
        }
    )
    .is_err());
}
