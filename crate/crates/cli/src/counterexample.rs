use crate::certify::parse_int_quad;
use crate::error::CliError;
use crate::output::{create_dir, csv_string, json_string, sig, write_file};
use crate::{CounterexampleArgs, Format, Kind};
use lzlab_core::cyclic::{char_fn, is_prime, shift_equivalent, CyclicModulus, DistZm};
use lzlab_core::engine::{
    build_counterexample_pr1_level, build_counterexample_pr2, product_identity_violation,
    random_nonvanishing_dist, verify_joint_equality, EngineError,
};
use lzlab_core::numfmt::{format_rational, parse_rational};
use lzlab_core::real::{
    build_re1_pair, cauchy_modulus_check, eval_cf, log_ratio, min_shift_distance,
    real_joint_deviation, CFModel, RealGrid,
};
use lzlab_core::Quad;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::Path;

pub fn run(args: &CounterexampleArgs, tolerance: f64) -> Result<(), CliError> {
    match args.kind {
        Kind::Re1 => re1(args, tolerance),
        Kind::Pr1 => pr1(args, tolerance),
        Kind::Pr2 => pr2(args, tolerance),
    }
}

fn odd_prime(p: Option<u64>) -> Result<u64, CliError> {
    let p = p.ok_or_else(|| CliError::input("--p is required"))?;
    if p == 2 || !is_prime(p) {
        return Err(EngineError::NotOddPrime(p).into());
    }
    Ok(p)
}

/// `--eps`, or the midpoint `1/(2(p−1))` of the admissible interval.
fn epsilon(text: Option<&str>, p: u64) -> Result<BigRational, CliError> {
    match text {
        Some(t) => parse_rational(t).map_err(|e| CliError::input(e.to_string())),
        None => Ok(BigRational::new(BigInt::from(1), BigInt::from(2 * (p - 1)))),
    }
}

/// Writes the primary CSV and the summary; `--format csv` sends the CSV to stdout.
fn finish<S: Serialize>(
    args: &CounterexampleArgs,
    summary: &S,
    csv_name: &str,
    csv: &str,
    human: String,
    extra: &[(&str, String)],
) -> Result<(), CliError> {
    let json = json_string(summary)?;
    if let Some(dir) = &args.out {
        create_dir(dir)?;
        write_file(&dir.join("summary.json"), &json)?;
        write_file(&dir.join(csv_name), csv)?;
        for (name, body) in extra {
            write_file(&Path::new(dir).join(name), body)?;
        }
    }
    let text = match args.format {
        Format::Json => json,
        Format::Csv => csv.to_string(),
        Format::Human => human,
    };
    print!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct CfRow {
    y: usize,
    re_mu: f64,
    im_mu: f64,
    re_nu: f64,
    im_nu: f64,
    re_f: f64,
    im_f: f64,
}

fn cf_rows(mu: &DistZm<BigRational>, nu: &DistZm<BigRational>, f: &[Complex64]) -> Vec<CfRow> {
    let (cm, cn) = (char_fn(mu), char_fn(nu));
    (0..f.len())
        .map(|y| CfRow {
            y,
            re_mu: cm.at(y).re,
            im_mu: cm.at(y).im,
            re_nu: cn.at(y).re,
            im_nu: cn.at(y).im,
            re_f: f[y].re,
            im_f: f[y].im,
        })
        .collect()
}

#[derive(Serialize)]
struct Pr2Summary {
    kind: &'static str,
    p: u64,
    eps: String,
    quad: [u64; 4],
    seed: u64,
    mu: DistZm<BigRational>,
    nu: DistZm<BigRational>,
    alpha_sum: String,
    joint_equal: bool,
    joint_deviation: f64,
    shift_equivalent: Option<usize>,
}

fn pr2(args: &CounterexampleArgs, tolerance: f64) -> Result<(), CliError> {
    let p = odd_prime(args.p)?;
    let eps = epsilon(args.eps.as_deref(), p)?;
    let (mu, nu) = build_counterexample_pr2(p, &eps)?;
    let quad = parse_int_quad(&args.quad, p)?;
    let m = CyclicModulus::new(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let o1 = random_nonvanishing_dist(m, 1e-3, &mut rng);
    let o4 = random_nonvanishing_dist(m, 1e-3, &mut rng);
    let mus = [o1.clone(), mu.to_f64(), mu.to_f64(), o4.clone()];
    let nus = [o1, nu.to_f64(), nu.to_f64(), o4];
    let (_, dev) = verify_joint_equality(&mus, &nus, &quad)?;
    let shift = shift_equivalent(&mu, &nu)?;
    // Σ_h |α(h)| = 1 + (p − 1)·ε
    let alpha_sum =
        BigRational::from_integer(1.into()) + &eps * BigRational::from_integer((p - 1).into());
    let f = char_fn(&nu).ratio(&char_fn(&mu))?;
    let summary = Pr2Summary {
        kind: "pr2",
        p,
        eps: format_rational(&eps),
        quad: [quad.a2, quad.a3, quad.b2, quad.b3],
        seed: args.seed,
        mu: mu.clone(),
        nu: nu.clone(),
        alpha_sum: format_rational(&alpha_sum),
        joint_equal: dev <= tolerance,
        joint_deviation: dev,
        shift_equivalent: shift,
    };
    let probs = |d: &DistZm<BigRational>| {
        d.probs()
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(", ")
    };
    let joint = if dev <= tolerance {
        "joint equal"
    } else {
        "joint differ"
    };
    let shift_text = match shift {
        None => "not shift-equivalent".to_string(),
        Some(a) => format!("shift-equivalent with α = {a}"),
    };
    let human = format!(
        "{joint} (dev {}), {shift_text}\n  μ = ({})\n  ν = ({})\n  Σ|α(h)| = {}\n  quad {}\n",
        sig(dev),
        probs(&mu),
        probs(&nu),
        format_rational(&alpha_sum),
        quad,
    );
    let extra = [
        ("mu.json", json_string(&mu)?),
        ("nu.json", json_string(&nu)?),
    ];
    finish(
        args,
        &summary,
        "cf.csv",
        &csv_string(&cf_rows(&mu, &nu, &f))?,
        human,
        &extra,
    )?;
    if dev > tolerance || shift.is_some() {
        return Err(CliError::property(format!("{joint}, {shift_text}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct Pr1Summary {
    kind: &'static str,
    p: u64,
    n: u32,
    order: u64,
    eps: String,
    a2: u64,
    a3: u64,
    val_a2: u32,
    val_a3: u32,
    identity_holds: bool,
    first_failure: Option<usize>,
    failure_residual: Option<f64>,
    shift_equivalent: Option<usize>,
}

fn valuation(x: u64, p: u64, order: u64) -> u32 {
    if x == 0 {
        return order.ilog(p);
    }
    let mut v = 0;
    let mut x = x;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

fn pr1(args: &CounterexampleArgs, tolerance: f64) -> Result<(), CliError> {
    let p = odd_prime(args.p)?;
    let eps = epsilon(args.eps.as_deref(), p)?;
    let level = build_counterexample_pr1_level(p, args.n, &eps)?;
    let order = level.f.len() as u64;
    let (a2, a3) = (
        args.a2.rem_euclid(order as i64) as u64,
        args.a3.rem_euclid(order as i64) as u64,
    );
    for (name, c) in [("a2", a2), ("a3", a3)] {
        if c == 0 {
            return Err(EngineError::ZeroCoefficient(name).into());
        }
    }
    let failure = product_identity_violation(&level.f, a2, a3, tolerance);
    let shift = shift_equivalent(&level.mu, &level.nu)?;
    let summary = Pr1Summary {
        kind: "pr1",
        p,
        n: args.n,
        order,
        eps: format_rational(&eps),
        a2,
        a3,
        val_a2: valuation(a2, p, order),
        val_a3: valuation(a3, p, order),
        identity_holds: failure.is_none(),
        first_failure: failure.map(|f| f.0),
        failure_residual: failure.map(|f| f.1),
        shift_equivalent: shift,
    };
    let mut human = match failure {
        None => format!("f(a2·)f(a3·) ≡ 1 on Z({order})\n"),
        Some((y, r)) => format!(
            "f(a2·)f(a3·) ≠ 1 on Z({order}): fails at y = {y} (residual {})\n",
            sig(r)
        ),
    };
    human += &format!(
        "  a2 = {a2} (valuation {}), a3 = {a3} (valuation {}), ε = {}\n",
        summary.val_a2,
        summary.val_a3,
        format_rational(&eps)
    );
    human += match shift {
        None => "  ν is not a shift of μ\n",
        Some(_) => "  ν is a shift of μ\n",
    };
    let extra = [
        ("mu.json", json_string(&level.mu)?),
        ("nu.json", json_string(&level.nu)?),
    ];
    finish(
        args,
        &summary,
        "cf.csv",
        &csv_string(&cf_rows(&level.mu, &level.nu, &level.f))?,
        human,
        &extra,
    )
}

#[derive(Serialize)]
struct Re1Row {
    y: f64,
    mod_mu: f64,
    mod_nu: f64,
    exp_cos_minus_1: f64,
    ratio_phase: f64,
}

#[derive(Serialize)]
struct Re1Summary {
    kind: &'static str,
    grid: String,
    mu: CFModel,
    nu: CFModel,
    modulus_error: f64,
    joint_quad: [f64; 4],
    joint_deviation: f64,
    unit_ratio_error: f64,
    cauchy_even_residual: f64,
    cauchy_multiplicative_residual: f64,
    min_shift_distance: f64,
    argmin_alpha: f64,
}

fn re1(args: &CounterexampleArgs, tolerance: f64) -> Result<(), CliError> {
    let grid: RealGrid = args.grid;
    let (mu, nu) = build_re1_pair();
    let ratio = log_ratio(&nu, &mu, grid)?;
    let rows: Vec<Re1Row> = ratio
        .samples()
        .map(|(y, psi)| Re1Row {
            y,
            mod_mu: eval_cf(&mu, y).norm(),
            mod_nu: eval_cf(&nu, y).norm(),
            exp_cos_minus_1: (y.cos() - 1.0).exp(),
            ratio_phase: psi.im,
        })
        .collect();
    let modulus_error = rows
        .iter()
        .map(|r| {
            (r.mod_mu - r.exp_cos_minus_1)
                .abs()
                .max((r.mod_nu - r.exp_cos_minus_1).abs())
        })
        .fold(0.0, f64::max);
    let unit_ratio_error = ratio
        .exp_values()
        .iter()
        .map(|z| (z.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    let outer1 = CFModel::gaussian(0.0, 1.0)?;
    let outer4 = CFModel::gaussian(0.0, 1.0)?;
    let quad = Quad::new(1.0, -1.0, 1.0, -1.0);
    let (dev, _) = real_joint_deviation(
        &[outer1.clone(), mu.clone(), mu.clone(), outer4.clone()],
        &[outer1, nu.clone(), nu.clone(), outer4],
        &quad,
        &grid,
    );
    // l(y) = |f(a2·y)|² is even and multiplicative, hence ≡ 1
    let f = |y: f64| eval_cf(&nu, y) / eval_cf(&mu, y);
    let cauchy = cauchy_modulus_check(f, quad.a2, &grid);
    let radius = grid.radius();
    let alphas = (0..4001).map(|i| -20.0 + 0.01 * i as f64);
    let (dist, alpha) = min_shift_distance(&ratio, alphas);
    let summary = Re1Summary {
        kind: "re1",
        grid: grid.to_string(),
        mu: mu.clone(),
        nu: nu.clone(),
        modulus_error,
        joint_quad: [1.0, -1.0, 1.0, -1.0],
        joint_deviation: dev,
        unit_ratio_error,
        cauchy_even_residual: cauchy.even_residual,
        cauchy_multiplicative_residual: cauchy.multiplicative_residual,
        min_shift_distance: dist,
        argmin_alpha: alpha,
    };
    let human = format!(
        "joint equal for quad (1, -1, 1, -1) (dev {}), not shift-equivalent (min distance {} over α ∈ [-20, 20])\n  \
         grid {grid} (radius {radius})\n  max ||μ̂| − exp(cos y − 1)| = {}\n  max ||f| − 1| = {}\n",
        sig(dev),
        sig(dist),
        sig(modulus_error),
        sig(unit_ratio_error),
    );
    let mut trace = Vec::new();
    ratio.write_csv(&mut trace)?;
    let extra = [("psi.csv", String::from_utf8(trace).expect("ASCII CSV"))];
    finish(
        args,
        &summary,
        "re1.csv",
        &csv_string(&rows)?,
        human,
        &extra,
    )?;
    if dev > tolerance || dist < 0.5 || !cauchy.holds(1e-9) {
        return Err(CliError::property("mirrored Poisson pair failed a check"));
    }
    Ok(())
}
