//! CSV and JSON emitters.

use std::io::Write;

use locnl_core::epsilon::EpsilonStudy;
use locnl_core::evolution::JumpReport;
use locnl_core::{DVector, DiscreteSystem, Grid, ModelKind, Trajectory};
use serde::Serialize;

pub type CsvResult = Result<(), csv::Error>;

fn num(x: f64) -> String {
    format!("{x}")
}

/// Indices of recorded snapshots kept with `stride`; the last one is always kept.
pub fn strided(len: usize, stride: usize) -> impl Iterator<Item = usize> {
    let stride = stride.max(1);
    (0..len).filter(move |&k| k % stride == 0 || k + 1 == len)
}

/// `t,cell_index,domain,x,value`, one row per cell per kept snapshot.
pub fn write_trajectory<W: Write>(out: W, sys: &DiscreteSystem, traj: &Trajectory, stride: usize) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "cell_index", "domain", "x", "value"])?;
    for k in strided(traj.snapshots.len(), stride) {
        let s = &traj.snapshots[k];
        let t = num(s.t);
        for (domain, grid, values) in [("A", &sys.grid_a, &s.u), ("B", &sys.grid_b, &s.v)] {
            for (i, (x, v)) in grid.centers().iter().zip(values.iter()).enumerate() {
                w.write_record([t.as_str(), &i.to_string(), domain, &num(*x), &num(*v)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `t,massA,massB,L2u,L2v,dissipation,Ev,F`.
pub fn write_diagnostics<W: Write>(out: W, traj: &Trajectory, stride: usize) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "massA", "massB", "L2u", "L2v", "dissipation", "Ev", "F"])?;
    for k in strided(traj.diagnostics.len(), stride) {
        let d = &traj.diagnostics[k];
        w.write_record(
            [d.t, d.mass_a, d.mass_b, d.l2_u, d.l2_v, d.dissipation, d.energy_ev, d.energy_f].map(num),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// `cell_index,domain,x,value`.
pub fn write_eigenvector<W: Write>(out: W, grid: &Grid, model: ModelKind, vector: &DVector<f64>) -> CsvResult {
    let domain = match model {
        ModelKind::ParabolicElliptic => "A",
        ModelKind::EllipticParabolic => "B",
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["cell_index", "domain", "x", "value"])?;
    for (i, (x, v)) in grid.centers().iter().zip(vector.iter()).enumerate() {
        w.write_record([&i.to_string(), domain, &num(*x), &num(*v)])?;
    }
    w.flush()?;
    Ok(())
}

/// `eps,error_u,error_v_tail`.
pub fn write_epsilon_study<W: Write>(out: W, study: &EpsilonStudy) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eps", "error_u", "error_v_tail"])?;
    for k in 0..study.eps_ladder.len() {
        w.write_record([study.eps_ladder[k], study.errors_u[k], study.errors_v_tail[k]].map(num))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct EpsilonSummary<'a> {
    pub model: &'static str,
    pub eps_ladder: &'a [f64],
    pub errors_u: &'a [f64],
    pub errors_v_tail: &'a [f64],
    pub errors_layer: &'a [f64],
    pub t_layer: f64,
    pub observed_order: f64,
}

pub fn model_name(model: ModelKind) -> &'static str {
    match model {
        ModelKind::ParabolicElliptic => "parabolic_elliptic",
        ModelKind::EllipticParabolic => "elliptic_parabolic",
    }
}

pub fn epsilon_summary_json(study: &EpsilonStudy) -> String {
    let summary = EpsilonSummary {
        model: model_name(study.model),
        eps_ladder: &study.eps_ladder,
        errors_u: &study.errors_u,
        errors_v_tail: &study.errors_v_tail,
        errors_layer: &study.errors_layer,
        t_layer: study.t_layer,
        observed_order: study.observed_order,
    };
    serde_json::to_string_pretty(&summary).expect("summary serializes")
}

/// `t,u_interface,v_interface,jump`.
pub fn write_jump<W: Write>(out: W, report: &JumpReport) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "u_interface", "v_interface", "jump"])?;
    for k in 0..report.times.len() {
        w.write_record([report.times[k], report.u_interface[k], report.v_interface[k], report.jump[k]].map(num))?;
    }
    w.flush()?;
    Ok(())
}
