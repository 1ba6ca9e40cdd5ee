//! The acceptance suite: one test per criterion, each printing a single
//! `criterion NN ...: pass|FAIL` line before asserting.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use illposed_cli::{run_experiment, ExperimentConfig, ExperimentId, Manifest, Overrides, Params, ShearPreset};
use illposed_core::euler2d::{solve, DiagnosticSpec, SolverConfig};
use illposed_core::spectral::{random_band_limited, Field2D, GridSpec};

struct Suite {
    _dir: tempfile::TempDir,
    root: PathBuf,
    manifests: BTreeMap<ExperimentId, Manifest>,
}

impl Suite {
    fn manifest(&self, id: ExperimentId) -> &Manifest {
        &self.manifests[&id]
    }
}

fn config(id: ExperimentId, out: &Path) -> ExperimentConfig {
    let mut params = Params::default();
    if id == ExperimentId::ShearGap {
        params.preset = Some(ShearPreset::Both);
    }
    ExperimentConfig::resolve(id, None, Overrides { output: Some(out.to_path_buf()), params, ..Default::default() })
        .unwrap()
}

fn run_suite(out: &Path) -> BTreeMap<ExperimentId, Manifest> {
    ExperimentId::ALL
        .iter()
        .map(|&id| (id, run_experiment(&config(id, out)).unwrap().manifest))
        .collect()
}

fn suite() -> &'static Suite {
    static SUITE: OnceLock<Suite> = OnceLock::new();
    SUITE.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        let manifests = run_suite(&root);
        Suite { _dir: dir, root, manifests }
    })
}

/// Prints the criterion line and fails the test when `failed` is non-empty.
fn verdict(id: u32, title: &str, failed: Vec<String>, detail: String) {
    let status = if failed.is_empty() { "pass" } else { "FAIL" };
    println!("criterion {id:02} {title}: {status} ({detail})");
    assert!(failed.is_empty(), "criterion {id:02} failed: {}", failed.join("; "));
}

/// Names of the listed assertions that are missing or failed.
fn failing(m: &Manifest, names: &[String]) -> Vec<String> {
    names
        .iter()
        .filter(|n| m.assertion(n).is_none_or(|a| !a.passed))
        .map(|n| match m.assertion(n) {
            Some(a) => format!("{n} = {:e} (expected {})", a.measured, a.prediction),
            None => format!("{n} missing"),
        })
        .collect()
}

fn measured(m: &Manifest, name: &str) -> f64 {
    m.assertion(name).map_or(f64::NAN, |a| a.measured)
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const PRESETS: [&str; 2] = ["constant", "bump"];

#[test]
fn criterion_01_shear_flow_gap() {
    let s = suite();
    let m = s.manifest(ExperimentId::ShearGap);
    let names: Vec<String> = PRESETS
        .iter()
        .flat_map(|p| {
            ["initial distance equals epsilon", "solution gap", "grid convergence defect", "witness quotient"]
                .map(|a| format!("{p}: {a}"))
        })
        .collect();
    let mut failed = failing(m, &names);
    for p in PRESETS {
        let rows = csv_rows(&s.root.join(format!("shear-gap/shear_gap_{p}.csv")));
        if rows.len() != 9 {
            failed.push(format!("{p}: expected 9 (sigma, epsilon) rows, found {}", rows.len()));
        }
    }
    // Both presets ran in one invocation; the budget applies to each.
    let total = m.timings["total"];
    if total >= 2.0 * 10.0 {
        failed.push(format!("runtime {total:.1} s"));
    }
    let gap = measured(m, "constant: solution gap").min(measured(m, "bump: solution gap"));
    verdict(1, "shear-flow gap", failed, format!("smallest gap {gap:.6}, {total:.1} s for both presets"));
}

#[test]
fn criterion_02_exact_solution_residual() {
    let m = suite().manifest(ExperimentId::ShearGap);
    let names: Vec<String> = PRESETS.iter().map(|p| format!("{p}: Euler residual")).collect();
    let worst = names.iter().map(|n| measured(m, n)).fold(0.0, f64::max);
    let mut failed = failing(m, &names);
    if !(worst < 1e-10) {
        failed.push(format!("residual {worst:e}"));
    }
    verdict(2, "exact-solution residual", failed, format!("largest residual {worst:e}"));
}

#[test]
fn criterion_03_perturbation_scaling() {
    let m = suite().manifest(ExperimentId::NormScaling);
    let names = [
        "slope of perturbation W^{1,r} norm",
        "slope of fractional velocity gradient",
        "slope of velocity",
    ]
    .map(String::from);
    let mut failed = failing(m, &names);
    let total = m.timings["total"];
    if total >= 60.0 {
        failed.push(format!("runtime {total:.1} s"));
    }
    let slopes: Vec<String> = names.iter().map(|n| format!("{:.4}", measured(m, n))).collect();
    verdict(3, "perturbation norm scaling", failed, format!("slopes {}, {total:.1} s", slopes.join(" / ")));
}

/// Frozen two-sided equivalence constant of the modulation-norm comparison.
const LEMFI_C: f64 = 2.0;

#[test]
fn criterion_04_modulation_equivalence() {
    let s = suite();
    let m = s.manifest(ExperimentId::LemfiEquivalence);
    let mut failed = failing(m, &["equivalence ratio lower".into(), "equivalence ratio upper".into()]);
    let (lo, hi) = (measured(m, "equivalence ratio lower"), measured(m, "equivalence ratio upper"));
    if !(lo >= 1.0 / LEMFI_C && hi <= LEMFI_C) {
        failed.push(format!("ratios [{lo}, {hi}] leave [1/{LEMFI_C}, {LEMFI_C}]"));
    }
    let rows = csv_rows(&s.root.join("lemfi-equivalence/lemfi_equivalence.csv"));
    if rows.len() != 12 {
        failed.push(format!("expected 4 n x 3 alpha rows, found {}", rows.len()));
    }
    verdict(4, "modulation-norm equivalence", failed, format!("ratios in [{lo:.4}, {hi:.4}], C = {LEMFI_C}"));
}

#[test]
fn criterion_05_perturbation_decay() {
    let m = suite().manifest(ExperimentId::LemfiEquivalence);
    let failed = failing(m, &["perturbation velocity decay".into(), "perturbed vorticity bound".into()]);
    let bound = measured(m, "perturbed vorticity bound");
    verdict(5, "perturbation decay", failed, format!("largest perturbed W^(1,r) norm {bound:.4}"));
}

#[test]
fn criterion_06_initial_vorticity_bound() {
    let s = suite();
    let m = s.manifest(ExperimentId::NormScaling);
    let mut failed = failing(m, &["initial vorticity bound".into()]);
    let rows = csv_rows(&s.root.join("norm-scaling/omega0_bound.csv"));
    let mut seen: Vec<(String, String, String)> = rows.iter().map(|r| (r[0].clone(), r[1].clone(), r[2].clone())).collect();
    seen.sort();
    seen.dedup();
    if seen.len() != 27 {
        failed.push(format!("expected 27 (M, N, r) combinations, found {}", seen.len()));
    }
    let worst = measured(m, "initial vorticity bound");
    verdict(6, "initial vorticity bound", failed, format!("largest M^2 W^(1,r) norm {worst:.4}"));
}

#[test]
fn criterion_07_covering_audit() {
    let s = suite();
    let m = s.manifest(ExperimentId::CoveringAudit);
    let mut names: Vec<String> = m.assertions.iter().filter(|a| a.name.starts_with("alpha ")).map(|a| a.name.clone()).collect();
    if names.len() != 4 * 7 {
        names.push(format!("expected 28 covering invariants, found {}", names.len()));
    }
    names.extend(["besov ratio lower", "besov ratio upper", "embedding constant"].map(String::from));
    let failed = failing(m, &names);
    let detail = format!(
        "Besov ratios [{:.4}, {:.4}], embedding constant {:.4}",
        measured(m, "besov ratio lower"),
        measured(m, "besov ratio upper"),
        measured(m, "embedding constant")
    );
    verdict(7, "covering and partition audit", failed, detail);
}

/// Random field with exact odd-odd symmetry on the grid.
fn odd_odd_field(grid: GridSpec, seed: u64) -> Field2D {
    let f = random_band_limited(grid, 24, seed).unwrap();
    let n = grid.n();
    let v = f.physical();
    let refl = |i: usize| (n - i) % n;
    let samples = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let (ri, rj) = (refl(i), refl(j));
            0.25 * (v[i * n + j] - v[ri * n + j] - v[i * n + rj] + v[ri * n + rj])
        })
        .collect();
    Field2D::from_physical(grid, samples).unwrap()
}

#[test]
fn criterion_08_solver_conservation() {
    let grid = GridSpec::new(std::f64::consts::PI, 512).unwrap();
    let w0 = odd_odd_field(grid, 8);
    let cfg = SolverConfig { dt: 0.01, t_end: 1.0, dealias: true, cadence: 10 };
    let spec = DiagnosticSpec { r: 2.5, refined_sup: true, check_symmetry: true, keep_states: false };
    let start = Instant::now();
    let traj = solve(&w0, &cfg, &spec).unwrap();
    let (energy, enstrophy) = traj.conservation_drift();
    let sup0 = traj.first().omega_sup;
    let sup = traj.rows().iter().map(|r| (r.omega_sup / sup0 - 1.0).abs()).fold(0.0, f64::max);
    let sym = traj.rows().iter().map(|r| r.symmetry_defect).fold(0.0, f64::max);
    let mut failed = Vec::new();
    if cfg.steps() != 100 {
        failed.push(format!("{} steps", cfg.steps()));
    }
    for (what, v, bound) in [("energy", energy, 1e-6), ("enstrophy", enstrophy, 1e-6), ("sup", sup, 1e-4), ("symmetry", sym, 1e-12)] {
        if !(v < bound) {
            failed.push(format!("{what} drift {v:e}"));
        }
    }
    let detail = format!(
        "energy {energy:.1e}, enstrophy {enstrophy:.1e}, sup {sup:.1e}, symmetry {sym:.1e}, {:.1} s",
        start.elapsed().as_secs_f64()
    );
    verdict(8, "solver conservation", failed, detail);
}

#[test]
fn criterion_09_flow_properties() {
    let s = suite();
    let m = s.manifest(ExperimentId::FlowJacobian);
    let names = [
        "hyperbolic jacobian",
        "rk4 order",
        "gronwall constant stability",
        "jacobian growth in scales",
        "volume preservation (vortex flow)",
        "volume preservation (solver flow)",
    ]
    .map(String::from);
    let failed = failing(m, &names);
    let detail = format!(
        "order {:.3}, det defect {:.1e}, hyperbolic error {:.1e}",
        measured(m, "rk4 order"),
        measured(m, "volume preservation (solver flow)").max(measured(m, "volume preservation (vortex flow)")),
        measured(m, "hyperbolic jacobian")
    );
    verdict(9, "flow properties", failed, detail);
}

fn csv_files(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    for exp in std::fs::read_dir(root).unwrap() {
        let exp = exp.unwrap().path();
        for f in std::fs::read_dir(&exp).unwrap() {
            let f = f.unwrap().path();
            if f.extension().is_some_and(|e| e == "csv") {
                out.insert(f.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&f).unwrap());
            }
        }
    }
    out
}

#[test]
fn criterion_10_determinism() {
    let s = suite();
    let again = tempfile::tempdir().unwrap();
    run_suite(again.path());
    let (a, b) = (csv_files(&s.root), csv_files(again.path()));
    let mut failed = Vec::new();
    if a.keys().ne(b.keys()) {
        failed.push("different CSV file sets".to_string());
    }
    failed.extend(a.iter().filter(|(k, v)| b.get(*k) != Some(v)).map(|(k, _)| format!("{} differs", k.display())));
    verdict(10, "determinism", failed, format!("{} CSV files compared", a.len()));
}
