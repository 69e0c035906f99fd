use crate::error::CliError;
use crate::output::{create_dir, csv_string, json_string, sig, table, write_file};
use crate::{CertifyArgs, Format};
use lzlab_core::cyclic::{is_prime, reduce_quad, CyclicModulus, DistZm};
use lzlab_core::engine::{
    certify_shifts_zm_with, random_nonvanishing_dist, CertCase, Certification, CertifyOptions,
    EngineError,
};
use lzlab_core::Quad;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Floor on `|μ̂|` for the generated distributions.
const GENERATOR_FLOOR: f64 = 1e-3;

#[derive(Debug, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: u32,
    pub planted: [usize; 4],
    /// Recovered shifts; `None` for ξ2, ξ3 on equal-ratio quads.
    pub recovered: [Option<usize>; 4],
    pub status: String,
    pub max_residual: f64,
}

#[derive(Serialize)]
struct CsvRow {
    trial: u32,
    planted_1: usize,
    planted_2: usize,
    planted_3: usize,
    planted_4: usize,
    recovered_1: String,
    recovered_2: String,
    recovered_3: String,
    recovered_4: String,
    status: String,
    max_residual: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CertifyReport {
    pub command: String,
    pub modulus: u64,
    pub quad: [u64; 4],
    pub case: CertCase,
    pub seed: u64,
    pub trials: u32,
    pub tolerance: f64,
    pub recovered: u32,
    pub rows: Vec<TrialRow>,
    /// Full certifier output for every trial that did not recover.
    #[serde(skip_deserializing)]
    pub failures: Vec<Certification>,
}

pub fn parse_int_quad(text: &str, p: u64) -> Result<Quad<u64>, CliError> {
    let ints: Vec<i64> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| CliError::input(format!("quad entry {t:?} is not an integer")))
        })
        .collect::<Result<_, _>>()?;
    let [a2, a3, b2, b3]: [i64; 4] = ints.try_into().map_err(|_| {
        CliError::input(format!("quad {text:?}: need four comma-separated entries"))
    })?;
    let r = |x: i64| x.rem_euclid(p as i64) as u64;
    Ok(Quad::new(r(a2), r(a3), r(b2), r(b3)))
}

fn modulus(p: u64) -> Result<CyclicModulus, CliError> {
    if p < 2 {
        return Err(CliError::input(format!("modulus {p} must be at least 2")));
    }
    if p.is_multiple_of(2) {
        return Err(EngineError::EvenModulus(p).into());
    }
    if !is_prime(p) {
        return Err(CliError::input(format!("modulus {p} is not prime")));
    }
    Ok(CyclicModulus::new(p)?)
}

pub fn run(args: &CertifyArgs, tolerance: f64) -> Result<(), CliError> {
    let m = modulus(args.p)?;
    let quad = parse_int_quad(&args.quad, args.p)?;
    let q = reduce_quad(&quad, m)?;
    let equal_ratio = m.mul(q.a2, q.b3) == m.mul(q.a3, q.b2);
    let opts = CertifyOptions {
        tolerance,
        seed: args.seed,
        ..CertifyOptions::default()
    };
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for trial in 1..=args.trials {
        let mus: [DistZm<f64>; 4] =
            std::array::from_fn(|_| random_nonvanishing_dist(m, GENERATOR_FLOOR, &mut rng));
        let (x2, x3) = (rng.gen_range(0..m.order()), rng.gen_range(0..m.order()));
        // α1, α4 absorb the interior shifts, so the joint law of (L1, L2) is unchanged
        let x1 = m.neg(m.add(m.mul(q.a2, x2), m.mul(q.a3, x3)));
        let x4 = m.neg(m.add(m.mul(q.b2, x2), m.mul(q.b3, x3)));
        let planted = [x1, x2, x3, x4];
        let nus: [DistZm<f64>; 4] = std::array::from_fn(|j| mus[j].shifted(planted[j]));
        let row = match certify_shifts_zm_with(&mus, &nus, &quad, &opts) {
            Ok(cert) => {
                let mut recovered = cert.shifts();
                if equal_ratio {
                    recovered[1] = None;
                    recovered[2] = None;
                }
                let ok = (0..4).all(|j| recovered[j].is_none_or(|r| r == planted[j]))
                    && recovered[0].is_some()
                    && recovered[3].is_some();
                let status = match (&cert, ok) {
                    (_, true) => "recovered".to_string(),
                    (Certification::Witness(w), false) => format!("witness: {}", w.identity),
                    (Certification::Certified(_), false) => "wrong shifts".to_string(),
                };
                let max_residual = cert
                    .transcript()
                    .iter()
                    .map(|e| e.max_residual)
                    .filter(|r| r.is_finite())
                    .fold(0.0, f64::max);
                if !ok {
                    failures.push(cert);
                }
                TrialRow {
                    trial,
                    planted,
                    recovered,
                    status,
                    max_residual,
                }
            }
            Err(e) => TrialRow {
                trial,
                planted,
                recovered: [None; 4],
                status: format!("error: {e}"),
                max_residual: f64::NAN,
            },
        };
        rows.push(row);
    }
    let elapsed = start.elapsed();
    let recovered = rows.iter().filter(|r| r.status == "recovered").count() as u32;
    let report = CertifyReport {
        command: "certify".into(),
        modulus: m.get(),
        quad: [quad.a2, quad.a3, quad.b2, quad.b3],
        case: if equal_ratio {
            CertCase::EqualRatio
        } else {
            CertCase::DetNonzero
        },
        seed: args.seed,
        trials: args.trials,
        tolerance,
        recovered,
        rows,
        failures,
    };
    let csv = csv_string(&csv_rows(&report.rows))?;
    if let Some(dir) = &args.out {
        create_dir(dir)?;
        write_file(&dir.join("report.json"), &json_string(&report)?)?;
        write_file(&dir.join("rows.csv"), &csv)?;
    }
    let text = match args.format {
        Format::Json => json_string(&report)?,
        Format::Csv => csv,
        Format::Human => human(&report, equal_ratio, elapsed.as_secs_f64()),
    };
    print!("{text}");
    if recovered < args.trials {
        return Err(CliError::property(format!(
            "{recovered}/{} trials recovered",
            args.trials
        )));
    }
    Ok(())
}

fn cell(x: Option<usize>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| v.to_string())
}

fn csv_rows(rows: &[TrialRow]) -> Vec<CsvRow> {
    rows.iter()
        .map(|r| CsvRow {
            trial: r.trial,
            planted_1: r.planted[0],
            planted_2: r.planted[1],
            planted_3: r.planted[2],
            planted_4: r.planted[3],
            recovered_1: cell(r.recovered[0]),
            recovered_2: cell(r.recovered[1]),
            recovered_3: cell(r.recovered[2]),
            recovered_4: cell(r.recovered[3]),
            status: r.status.clone(),
            max_residual: r.max_residual,
        })
        .collect()
}

fn human(report: &CertifyReport, equal_ratio: bool, seconds: f64) -> String {
    let [a2, a3, b2, b3] = report.quad;
    let mut s = format!(
        "certify on Z({}) with quad ({a2}, {a3}, {b2}, {b3}), seed {}, {} trials\n",
        report.modulus, report.seed, report.trials
    );
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.trial.to_string(),
                format!(
                    "({}, {}, {}, {})",
                    r.planted[0], r.planted[1], r.planted[2], r.planted[3]
                ),
                format!(
                    "({}, {}, {}, {})",
                    cell(r.recovered[0]),
                    cell(r.recovered[1]),
                    cell(r.recovered[2]),
                    cell(r.recovered[3])
                ),
                r.status.clone(),
                sig(r.max_residual),
            ]
        })
        .collect();
    s += &table(
        &[
            "trial",
            "planted α",
            "recovered α",
            "status",
            "max residual",
        ],
        &rows,
    );
    if equal_ratio {
        s += &format!(
            "{}/{} recoveries of ξ1, ξ4 (a2·b3 = a3·b2: ξ2, ξ3 are n/a)\n",
            report.recovered, report.trials
        );
    } else {
        s += &format!("{}/{} exact recoveries\n", report.recovered, report.trials);
    }
    s += &format!("wall time {} s\n", sig(seconds));
    s
}
