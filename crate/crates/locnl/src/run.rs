//! Subcommand dispatch.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use locnl_core::elliptic::{coercivity_constant, ConstraintSolver};
use locnl_core::epsilon::convergence_study;
use locnl_core::evolution::{integrate, interface_jump_trace, schur_generator, step_count, Stepper};
use locnl_core::kernel::validate_hypothesis;
use locnl_core::linalg::weighted_sum;
use locnl_core::spectral::lambda1;
use locnl_core::{assemble_system, DVector, DiscreteSystem, ModelKind, State};

use crate::config::{InitialData, RunConfig};
use crate::error::{CliError, ConfigError};
use crate::output;

/// Relative mass drift tolerated by `simulate` before it reports a violated invariant.
pub const MASS_DRIFT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Simulate,
    Eigen,
    EpsilonStudy,
    DemoJump,
    Validate,
}

/// Human-readable report lines and the files written.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

pub fn run(cmd: Subcommand, cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome, CliError> {
    match cmd {
        Subcommand::Simulate => simulate(cfg, out_dir),
        Subcommand::Eigen => eigen(cfg, out_dir),
        Subcommand::EpsilonStudy => epsilon_study(cfg, out_dir),
        Subcommand::DemoJump => demo_jump(cfg, out_dir),
        Subcommand::Validate => validate(cfg),
    }
}

/// Assembles the discrete system described by a configuration.
pub fn build_system(cfg: &RunConfig) -> Result<DiscreteSystem, CliError> {
    let partition = cfg.build_partition()?;
    let j = cfg.kernels.j.build("kernels.J")?;
    let g = cfg.kernels.g.build("kernels.G")?;
    Ok(assemble_system(partition, j, g, cfg.resolution.n_a, cfg.resolution.n_b)?)
}

fn sample(data: &InitialData, grid: &locnl_core::Grid, path: &str) -> Result<DVector<f64>, CliError> {
    data.sample(grid)
        .map_err(|message| ConfigError::Invalid { path: path.into(), message }.into())
}

fn evolving_initial(cfg: &RunConfig, sys: &DiscreteSystem) -> Result<DVector<f64>, CliError> {
    let missing = |path: &str| ConfigError::Invalid { path: path.into(), message: "missing".into() };
    match cfg.model_kind() {
        ModelKind::ParabolicElliptic => {
            sample(cfg.initial.u0.as_ref().ok_or_else(|| missing("initial.u0"))?, &sys.grid_a, "initial.u0")
        }
        ModelKind::EllipticParabolic => {
            sample(cfg.initial.v0.as_ref().ok_or_else(|| missing("initial.v0"))?, &sys.grid_b, "initial.v0")
        }
    }
}

fn create(out_dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
    fs::create_dir_all(out_dir).map_err(|source| CliError::Io { path: out_dir.display().to_string(), source })?;
    let path = out_dir.join(name);
    let file = File::create(&path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    Ok((path, BufWriter::new(file)))
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |e| CliError::Io { path: path.display().to_string(), source: std::io::Error::other(e) }
}

/// Largest `|m_k - m_0|` relative to the initial mass scale `Σ|x_i| w_i`.
pub fn relative_mass_drift(masses: &[f64], scale: f64) -> f64 {
    let m0 = masses[0];
    let scale = scale.max(m0.abs()).max(f64::MIN_POSITIVE);
    masses.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max) / scale
}

fn simulate(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome, CliError> {
    let sys = build_system(cfg)?;
    let model = cfg.model_kind();
    let init = evolving_initial(cfg, &sys)?;
    let traj = integrate(&sys, model, &init, cfg.time.t_end, cfg.time.dt, cfg.scheme())?;

    let mut outcome = RunOutcome::default();
    let stride = cfg.outputs.snapshot_stride;
    let (path, w) = create(out_dir, &cfg.outputs.trajectory_path)?;
    output::write_trajectory(w, &sys, &traj, stride).map_err(csv_err(&path))?;
    outcome.files.push(path);
    let (path, w) = create(out_dir, &cfg.outputs.diagnostics_path)?;
    output::write_diagnostics(w, &traj, stride).map_err(csv_err(&path))?;
    outcome.files.push(path);

    let w = model.evolving_weights(&sys);
    let scale = weighted_sum(&init.abs(), w);
    let masses: Vec<f64> = traj
        .diagnostics
        .iter()
        .map(|d| match model {
            ModelKind::ParabolicElliptic => d.mass_a,
            ModelKind::EllipticParabolic => d.mass_b,
        })
        .collect();
    let drift = relative_mass_drift(&masses, scale);
    let last = traj.diagnostics.last().expect("non-empty");
    outcome.lines.push(format!("model            {}", output::model_name(model)));
    outcome.lines.push(format!("steps            {}", traj.snapshots.len() - 1));
    outcome.lines.push(format!("final time       {}", last.t));
    outcome.lines.push(format!("mass drift (rel) {drift:e}"));
    outcome.lines.push(format!("final L2u, L2v   {}, {}", last.l2_u, last.l2_v));
    if drift > MASS_DRIFT_TOL {
        return Err(CliError::Invariant(format!("relative mass drift {drift:e} exceeds {MASS_DRIFT_TOL:e}")));
    }
    Ok(outcome)
}

fn eigen(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome, CliError> {
    let sys = build_system(cfg)?;
    let model = cfg.model_kind();
    let r = lambda1(&sys, model)?;
    let grid = match model {
        ModelKind::ParabolicElliptic => &sys.grid_a,
        ModelKind::EllipticParabolic => &sys.grid_b,
    };
    let mut outcome = RunOutcome::default();
    let (path, w) = create(out_dir, "eigenvector.csv")?;
    output::write_eigenvector(w, grid, model, &r.eigenvector).map_err(csv_err(&path))?;
    outcome.files.push(path);
    outcome.lines.push(format!("model                     {}", output::model_name(model)));
    outcome.lines.push(format!("lambda1                   {}", r.lambda1));
    outcome.lines.push(format!("constant-mode eigenvalue  {:e}", r.constant_mode_eigenvalue));
    outcome.lines.push(format!("eigen residual            {:e}", r.residual));
    Ok(outcome)
}

fn epsilon_study(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome, CliError> {
    let sys = build_system(cfg)?;
    let model = cfg.model_kind();
    // a missing datum is taken layer-free, i.e. elliptic-solved from the other one
    let (u0, v0) = match (&cfg.initial.u0, &cfg.initial.v0) {
        (Some(u), Some(v)) => (sample(u, &sys.grid_a, "initial.u0")?, sample(v, &sys.grid_b, "initial.v0")?),
        (Some(u), None) => {
            let u0 = sample(u, &sys.grid_a, "initial.u0")?;
            let v0 = ConstraintSolver::balance(&sys)?.solve(&u0);
            (u0, v0)
        }
        (None, Some(v)) => {
            let v0 = sample(v, &sys.grid_b, "initial.v0")?;
            let u0 = ConstraintSolver::local(&sys)?.solve(&v0);
            (u0, v0)
        }
        (None, None) => {
            return Err(ConfigError::Invalid { path: "initial".into(), message: "no initial data".into() }.into())
        }
    };
    let (ladder, t_layer) = match &cfg.epsilon {
        Some(e) => (e.ladder.clone(), e.t_layer),
        None => (vec![1e-1, 1e-2, 1e-3], None),
    };
    let study = convergence_study(&sys, model, &ladder, &u0, &v0, cfg.time.t_end, cfg.time.dt, t_layer)?;

    let mut outcome = RunOutcome::default();
    let (path, w) = create(out_dir, "epsilon_study.csv")?;
    output::write_epsilon_study(w, &study).map_err(csv_err(&path))?;
    outcome.files.push(path);
    let (path, mut w) = create(out_dir, "epsilon_summary.json")?;
    use std::io::Write;
    writeln!(w, "{}", output::epsilon_summary_json(&study))
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    outcome.files.push(path);
    for k in 0..ladder.len() {
        outcome.lines.push(format!(
            "eps {:<8} error_u {:e}  error_v_tail {:e}  layer {:e}",
            ladder[k], study.errors_u[k], study.errors_v_tail[k], study.errors_layer[k]
        ));
    }
    outcome.lines.push(format!("observed order {:.3}", study.observed_order));
    Ok(outcome)
}

fn demo_jump(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome, CliError> {
    let sys = build_system(cfg)?;
    let data = cfg
        .initial
        .u0
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid { path: "initial.u0".into(), message: "demo-jump evolves u".into() })?;
    let u0 = sample(data, &sys.grid_a, "initial.u0")?;
    let report = interface_jump_trace(&sys, &u0, cfg.time.t_end, cfg.time.dt)?;
    let mut outcome = RunOutcome::default();
    let (path, w) = create(out_dir, "jump.csv")?;
    output::write_jump(w, &report).map_err(csv_err(&path))?;
    outcome.files.push(path);
    for k in [0, 1, report.times.len() - 1] {
        outcome.lines.push(format!(
            "t = {:<8} u = {:.6}  v = {:.6}  jump = {:.6e}",
            report.times[k], report.u_interface[k], report.v_interface[k], report.jump[k]
        ));
    }
    Ok(outcome)
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn validate(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let partition = cfg.build_partition()?;
    let j = cfg.kernels.j.build("kernels.J")?;
    let g = cfg.kernels.g.build("kernels.G")?;
    let model = cfg.model_kind();
    let mut checks = Vec::new();

    let hyp = validate_hypothesis(&j, &partition);
    checks.push(check(
        "support condition on J",
        hyp.passed,
        format!("dist(A,B) = {}, radius = {}, J(0) = {}", hyp.dist, hyp.radius, hyp.value_at_origin),
    ));
    let sys = DiscreteSystem::assemble_unchecked(partition, j, g, cfg.resolution.n_a, cfg.resolution.n_b)?;

    for (name, grid, len) in [
        ("quadrature weights on A", &sys.grid_a, partition.a().length()),
        ("quadrature weights on B", &sys.grid_b, partition.b().length()),
    ] {
        let s: f64 = grid.weights().iter().sum();
        checks.push(check(name, (s - len).abs() <= 1e-13 * len.max(1.0), format!("sum = {s}")));
    }

    let n_a = sys.n_a();
    let lap_scale = 1.0 / (sys.grid_a.h() * sys.grid_a.h());
    let row_max = (0..n_a).map(|i| sys.lap.row(i).sum().abs()).fold(0.0, f64::max);
    let symmetric = sys.lap == sys.lap.transpose();
    checks.push(check(
        "Neumann Laplacian",
        row_max <= 1e-13 * lap_scale && symmetric,
        format!("max |row sum| = {row_max:e}, symmetric = {symmetric}"),
    ));

    let (wa, wb) = (sys.grid_a.weights(), sys.grid_b.weights());
    let mut g_asym: f64 = 0.0;
    for i in 0..sys.n_b() {
        for k in 0..sys.n_b() {
            g_asym = g_asym.max((sys.gbb[(i, k)] / wb[k] - sys.gbb[(k, i)] / wb[i]).abs());
        }
    }
    let mut j_asym: f64 = 0.0;
    for i in 0..n_a {
        for k in 0..sys.n_b() {
            j_asym = j_asym.max((sys.jab[(i, k)] / wb[k] - sys.jba[(k, i)] / wa[i]).abs());
        }
    }
    checks.push(check(
        "kernel matrices weighted-symmetric",
        g_asym <= 1e-13 && j_asym <= 1e-13,
        format!("G: {g_asym:e}, J: {j_asym:e}"),
    ));

    let deg = |m: &locnl_core::DMatrix<f64>, v: &DVector<f64>| {
        (0..m.nrows()).map(|i| (m.row(i).sum() - v[i]).abs()).fold(0.0, f64::max)
    };
    let deg_err = deg(&sys.jba, &sys.a_vec).max(deg(&sys.jab, &sys.b_vec)).max(deg(&sys.gbb, &sys.g_vec));
    checks.push(check("degree identities", deg_err <= 1e-13, format!("max error = {deg_err:e}")));

    match coercivity_constant(&sys) {
        Ok(c) => checks.push(check("coercivity", c.holds(), format!("C_c = {:e}", c.constant))),
        Err(e) => checks.push(check("coercivity", false, e.to_string())),
    }

    match schur_generator(&sys, model) {
        Ok(s) => {
            let ones = DVector::from_element(s.nrows(), 1.0);
            let r = (&s * ones).amax();
            checks.push(check("constants are stationary", r <= 1e-10 * s.amax().max(1.0), format!("|S 1| = {r:e}")));
        }
        Err(e) => checks.push(check("constants are stationary", false, e.to_string())),
    }

    match lambda1(&sys, model) {
        Ok(r) => checks.push(check(
            "spectral gap",
            r.lambda1 > 0.0 && r.constant_mode_eigenvalue.abs() <= 1e-10,
            format!("lambda1 = {}, constant mode = {:e}", r.lambda1, r.constant_mode_eigenvalue),
        )),
        Err(e) => checks.push(check("spectral gap", false, e.to_string())),
    }

    checks.push(mass_check(cfg, &sys, model));

    let mut outcome = RunOutcome::default();
    for c in &checks {
        outcome.lines.push(format!("[{}] {:<36} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(outcome)
    } else {
        for line in &outcome.lines {
            eprintln!("{line}");
        }
        Err(CliError::Invariant(format!("failed checks: {}", failed.join(", "))))
    }
}

fn mass_check(cfg: &RunConfig, sys: &DiscreteSystem, model: ModelKind) -> Check {
    const STEPS: usize = 100;
    let name = "mass conservation (100 steps)";
    let init = match evolving_initial(cfg, sys) {
        Ok(x) => x,
        Err(e) => return check(name, false, e.to_string()),
    };
    let dt = cfg.time.dt.min(cfg.time.t_end / step_count(cfg.time.t_end, cfg.time.dt).unwrap_or(1) as f64);
    let stepper = match Stepper::new(sys, model, dt, cfg.scheme()) {
        Ok(s) => s,
        Err(e) => return check(name, false, e.to_string()),
    };
    let w = model.evolving_weights(sys);
    let mut state = match model {
        ModelKind::ParabolicElliptic => State { t: 0.0, u: init.clone(), v: DVector::zeros(sys.n_b()) },
        ModelKind::EllipticParabolic => State { t: 0.0, u: DVector::zeros(sys.n_a()), v: init.clone() },
    };
    let mut masses = vec![weighted_sum(&init, w)];
    for _ in 0..STEPS {
        state = stepper.step(&state);
        masses.push(weighted_sum(state.evolving(model), w));
    }
    let drift = relative_mass_drift(&masses, weighted_sum(&init.abs(), w));
    check(name, drift <= 1e-11, format!("relative drift = {drift:e}"))
}
