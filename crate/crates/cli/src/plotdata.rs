use crate::certify::CertifyReport;
use crate::error::CliError;
use crate::output::{csv_string, write_file};
use crate::PlotArgs;
use lzlab_core::engine::{classification_sweep, classify, CoefficientQuad, FieldTag};
use lzlab_core::real::{
    build_re1_pair, eval_cf, log_ratio, third_difference_residual, CFModel, RealError, RealGrid,
};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct ModulusRow {
    y: f64,
    mod_mu: f64,
    mod_nu: f64,
    exp_cos_minus_1: f64,
}

#[derive(Serialize)]
struct CascadeRow {
    h: f64,
    residual: f64,
}

#[derive(Serialize)]
struct SweepRow {
    id: &'static str,
    quad: &'static str,
    field: &'static str,
    iid: bool,
    verdict: String,
}

#[derive(Serialize)]
struct RunRow {
    trial: u32,
    factor: usize,
    planted: usize,
    recovered: String,
    status: String,
}

pub fn run(args: &PlotArgs) -> Result<(), CliError> {
    let csv = match args.source.as_str() {
        "re1-modulus" => re1_modulus(args.grid)?,
        "cascade-residual" => cascade(args.grid)?,
        "classification-sweep" => sweep()?,
        other if Path::new(other).join("report.json").is_file() => prior_run(Path::new(other))?,
        other => return Err(CliError::input(format!("unknown plot source {other:?}"))),
    };
    match &args.out {
        Some(path) => write_file(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn re1_modulus(grid: RealGrid) -> Result<String, CliError> {
    let (mu, nu) = build_re1_pair();
    let rows: Vec<ModulusRow> = grid
        .points()
        .into_iter()
        .map(|y| ModulusRow {
            y,
            mod_mu: eval_cf(&mu, y).norm(),
            mod_nu: eval_cf(&nu, y).norm(),
            exp_cos_minus_1: (y.cos() - 1.0).exp(),
        })
        .collect();
    csv_string(&rows)
}

/// `Δ_h³ ψ` for the log-ratio of two Gaussians, at every `h = k·step` that fits.
fn cascade(grid: RealGrid) -> Result<String, CliError> {
    let den = CFModel::gaussian(0.0, 1.0)?;
    let num = CFModel::gaussian(2.0, 1.5)?;
    let psi = log_ratio(&num, &den, grid)?;
    let mut rows = Vec::new();
    for k in 1.. {
        let h = k as f64 * grid.step();
        match third_difference_residual(&psi, h) {
            Ok(residual) => rows.push(CascadeRow { h, residual }),
            Err(RealError::GridTooNarrow { .. }) => break,
            Err(e) => return Err(e.into()),
        }
        if k >= 200 {
            break;
        }
    }
    csv_string(&rows)
}

fn sweep() -> Result<String, CliError> {
    let rows: Vec<SweepRow> = classification_sweep()
        .iter()
        .map(|r| {
            let field: FieldTag = r.field.parse()?;
            let v = classify(&CoefficientQuad::parse(field, r.quad)?, r.iid)?;
            Ok(SweepRow {
                id: r.id,
                quad: r.quad,
                field: r.field,
                iid: r.iid,
                verdict: v.label(),
            })
        })
        .collect::<Result<_, CliError>>()?;
    csv_string(&rows)
}

fn prior_run(dir: &Path) -> Result<String, CliError> {
    let path = dir.join("report.json");
    let text = std::fs::read_to_string(&path)?;
    let report: CertifyReport = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{} is not a certify report: {e}", path.display())))?;
    let rows: Vec<RunRow> = report
        .rows
        .iter()
        .flat_map(|r| {
            (0..4).map(move |j| RunRow {
                trial: r.trial,
                factor: j + 1,
                planted: r.planted[j],
                recovered: r.recovered[j].map_or_else(|| "n/a".into(), |v| v.to_string()),
                status: r.status.clone(),
            })
        })
        .collect();
    csv_string(&rows)
}
