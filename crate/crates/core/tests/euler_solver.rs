use std::f64::consts::PI;

use illposed_core::euler2d::{histogram_distance, solve, value_histogram, DiagnosticSpec, SolverConfig};
use illposed_core::spectral::{curl, read_field, Field2D, GridSpec};

fn odd_odd(grid: GridSpec) -> Field2D {
    Field2D::from_fn(grid, |x, y| {
        x.sin() * y.sin() + 0.6 * (2.0 * x).sin() * (3.0 * y).sin()
            - 0.4 * (3.0 * x).sin() * y.sin()
    })
}

fn spec() -> DiagnosticSpec {
    DiagnosticSpec {
        r: 2.5,
        refined_sup: true,
        check_symmetry: true,
        keep_states: true,
    }
}

fn max_diff(a: &Field2D, b: &Field2D) -> f64 {
    a.physical()
        .iter()
        .zip(b.physical())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn invariants_hold_at_small_resolution() {
    let grid = GridSpec::new(PI, 64).unwrap();
    let cfg = SolverConfig {
        dt: 0.01,
        t_end: 1.0,
        dealias: true,
        cadence: 10,
    };
    let traj = solve(&odd_odd(grid), &cfg, &spec()).unwrap();
    let (energy, enstrophy) = traj.conservation_drift();
    assert!(energy < 1e-6, "energy drift {energy:e}");
    assert!(enstrophy < 1e-6, "enstrophy drift {enstrophy:e}");
    assert!(traj.tracks_symmetry());
    for row in traj.rows() {
        assert!(row.symmetry_defect < 1e-13);
        assert!(row.mean.abs() < 1e-14);
    }
    let sup0 = traj.first().omega_sup;
    assert!((traj.last().omega_sup / sup0 - 1.0).abs() < 1e-3);
    assert_eq!(traj.rows().len(), 11);
}

#[test]
fn laplacian_eigenfunction_is_steady() {
    let grid = GridSpec::new(PI, 32).unwrap();
    let w = Field2D::from_fn(grid, |x, y| {
        (2.0 * x).sin() * y.sin() + (x).sin() * (2.0 * y).sin()
    });
    let cfg = SolverConfig {
        dt: 0.05,
        t_end: 2.0,
        dealias: true,
        cadence: 40,
    };
    let traj = solve(&w, &cfg, &spec()).unwrap();
    let last = traj.states().last().unwrap();
    assert!(max_diff(last.omega(), &w) < 1e-12);
}

#[test]
fn reversed_run_returns_to_start() {
    // u ↦ -u, t ↦ -t maps solutions to solutions, so starting from -ω(T)
    // and running for T gives back -ω(0).
    let grid = GridSpec::new(PI, 64).unwrap();
    let w0 = odd_odd(grid);
    let cfg = SolverConfig {
        dt: 0.005,
        t_end: 0.5,
        dealias: true,
        cadence: 100,
    };
    let fwd = solve(&w0, &cfg, &spec()).unwrap();
    let end = fwd.states().last().unwrap().omega().scale(-1.0);
    let back = solve(&end, &cfg, &spec()).unwrap();
    let ret = back.states().last().unwrap().omega().scale(-1.0);
    assert!(
        max_diff(&ret, &w0) < 1e-8 * w0.max_abs(),
        "{:e}",
        max_diff(&ret, &w0)
    );
}

#[test]
fn runs_are_deterministic() {
    let grid = GridSpec::new(PI, 64).unwrap();
    let cfg = SolverConfig {
        dt: 0.01,
        t_end: 0.2,
        dealias: true,
        cadence: 5,
    };
    let a = solve(&odd_odd(grid), &cfg, &spec()).unwrap();
    let b = solve(&odd_odd(grid), &cfg, &spec()).unwrap();
    assert_eq!(a.rows(), b.rows());
    assert_eq!(
        a.states().last().unwrap().omega().physical(),
        b.states().last().unwrap().omega().physical()
    );
}

#[test]
fn snapshots_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = GridSpec::new(PI, 32).unwrap();
    let cfg = SolverConfig {
        dt: 0.01,
        t_end: 0.1,
        dealias: true,
        cadence: 5,
    };
    let traj = solve(&odd_odd(grid), &cfg, &spec()).unwrap();
    let paths = traj.write_snapshots(dir.path(), &[0.0, 0.1], 1e-9).unwrap();
    assert_eq!(paths.len(), 2);
    let last = read_field(&paths[1]).unwrap();
    assert_eq!(
        last.physical(),
        traj.states().last().unwrap().omega().physical()
    );
}

#[test]
fn oversized_step_is_refused() {
    let grid = GridSpec::new(PI, 64).unwrap();
    let cfg = SolverConfig {
        dt: 10.0,
        t_end: 20.0,
        dealias: true,
        cadence: 1,
    };
    assert!(solve(&odd_odd(grid), &cfg, &spec()).is_err());
}

#[test]
fn velocity_stays_consistent_with_vorticity() {
    let grid = GridSpec::new(PI, 64).unwrap();
    let cfg = SolverConfig {
        dt: 0.01,
        t_end: 0.5,
        dealias: true,
        cadence: 10,
    };
    let traj = solve(&odd_odd(grid), &cfg, &spec()).unwrap();
    for s in traj.states() {
        let w = s.omega();
        assert!(max_diff(&curl(s.velocity()), w) < 1e-8 * w.max_abs());
        assert!(w.mean().abs() < 1e-10);
    }
}

#[test]
fn value_distribution_is_transported() {
    // The node histogram carries an O(h) sampling error, so the distance
    // between initial and final histograms shrinks with the grid.
    let cfg = SolverConfig {
        dt: 0.01,
        t_end: 0.5,
        dealias: true,
        cadence: 50,
    };
    let distance = |n: usize| {
        let grid = GridSpec::new(PI, n).unwrap();
        let w0 = odd_odd(grid);
        let traj = solve(&w0, &cfg, &spec()).unwrap();
        let top = w0.max_abs() * 1.01;
        let h0 = value_histogram(&w0, 64, -top, top);
        let h1 = value_histogram(traj.states().last().unwrap().omega(), 64, -top, top);
        histogram_distance(&h0, &h1)
    };
    let (coarse, fine) = (distance(128), distance(256));
    assert!(fine < 0.6 * coarse, "{coarse:e} then {fine:e}");
    assert!(fine < 2e-2, "{fine:e}");
}

#[test]
fn doubling_resolution_barely_moves_the_norm() {
    let cfg = SolverConfig {
        dt: 0.01,
        t_end: 1.0,
        dealias: true,
        cadence: 100,
    };
    let last = |n: usize| {
        let grid = GridSpec::new(PI, n).unwrap();
        solve(&odd_odd(grid), &cfg, &spec()).unwrap().last().omega_w1r
    };
    let (coarse, fine) = (last(64), last(128));
    assert!((coarse / fine - 1.0).abs() < 0.01, "{coarse} vs {fine}");
}
