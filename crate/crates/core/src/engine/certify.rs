use super::EngineError;
use crate::cyclic::{
    char_fn, is_polynomial_of_degree, joint_cf, polynomial_violation, reduce_quad, CharTable,
    CyclicModulus, DistZm, Mass, DEFAULT_NONVANISHING_FLOOR,
};
use crate::Quad;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    /// Tolerance for joint-CF agreement and every verified identity.
    pub tolerance: f64,
    /// Minimum `|μ̂|`, `|ν̂|` accepted as nonvanishing.
    pub floor: f64,
    /// Scans with at most this many tuples run exhaustively.
    pub exhaustive_limit: u64,
    /// Tuples drawn for larger scans.
    pub samples: u64,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            tolerance: crate::DEFAULT_TOLERANCE,
            floor: DEFAULT_NONVANISHING_FLOOR,
            exhaustive_limit: 200_000,
            samples: 100_000,
            seed: 0,
        }
    }
}

/// One verified identity: its name, which factor it concerns, how many
/// argument tuples were evaluated and the largest residual seen.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscriptEntry {
    pub identity: &'static str,
    pub factor: Option<usize>,
    pub tuples: u64,
    pub exhaustive: bool,
    pub max_residual: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertCase {
    /// `a2·b3 ≠ a3·b2`.
    DetNonzero,
    /// `a2·b3 = a3·b2`.
    EqualRatio,
}

/// `ν_j = μ_j ∗ E_{α_j}` for all four factors, re-verified on masses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftCertificate {
    pub modulus: u64,
    pub case: CertCase,
    pub shifts: [usize; 4],
    pub transcript: Vec<TranscriptEntry>,
}

/// The first identity that failed, with the arguments that break it.
///
/// `shifts[0]` and `shifts[3]` are filled whenever `f1`, `f4` matched
/// characters, which the equal-ratio path guarantees.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleWitness {
    pub modulus: u64,
    pub case: CertCase,
    pub identity: &'static str,
    pub factor: Option<usize>,
    pub arguments: Vec<usize>,
    pub residual: f64,
    pub shifts: [Option<usize>; 4],
    pub transcript: Vec<TranscriptEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Certification {
    Certified(ShiftCertificate),
    Witness(CounterexampleWitness),
}

impl Certification {
    pub fn shifts(&self) -> [Option<usize>; 4] {
        match self {
            Certification::Certified(c) => c.shifts.map(Some),
            Certification::Witness(w) => w.shifts,
        }
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        match self {
            Certification::Certified(c) => &c.transcript,
            Certification::Witness(w) => &w.transcript,
        }
    }
}

/// Exhaustive comparison of the two joint CFs; `true` iff the largest
/// deviation is at most `1e-10`.
pub fn verify_joint_equality<T: Mass>(
    mus: &[DistZm<T>; 4],
    nus: &[DistZm<T>; 4],
    quad: &Quad<u64>,
) -> Result<(bool, f64), EngineError> {
    let dev = joint_deviation(mus, nus, quad)?.0;
    Ok((dev <= crate::DEFAULT_TOLERANCE, dev))
}

fn joint_deviation<T: Mass>(
    mus: &[DistZm<T>; 4],
    nus: &[DistZm<T>; 4],
    quad: &Quad<u64>,
) -> Result<(f64, (usize, usize)), EngineError> {
    let m = mus[0].modulus();
    if let Some(d) = nus.iter().find(|d| d.modulus() != m) {
        return Err(crate::cyclic::CyclicError::ModulusMismatch(m.get(), d.modulus().get()).into());
    }
    Ok(joint_cf(mus, quad)?.max_deviation(&joint_cf(nus, quad)?))
}

/// Index `x` with `f(y) = exp(2πi·x·y/m)` for every `y`, read off at `y = 1`
/// and then checked everywhere. On failure returns the worst `y` and its residual.
pub fn match_character(f: &[Complex64], tol: f64) -> Result<usize, (usize, f64)> {
    let m = f.len();
    let idx = ((f[1 % m].arg() * m as f64 / TAU).round() as i64).rem_euclid(m as i64) as usize;
    let (y, r) = (0..m)
        .map(|y| {
            let root = Complex64::from_polar(1.0, TAU * ((idx * y) % m) as f64 / m as f64);
            (y, (f[y] - root).norm())
        })
        .fold(
            (0, 0.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    if r <= tol {
        Ok(idx)
    } else {
        Err((y, r))
    }
}

/// `g(y) = f2(a2·y)·f3(a3·y)` and what it implies for `f1`, `f4`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualRatioReduction {
    pub g: Vec<Complex64>,
    /// Character index of `g`.
    pub index: usize,
    /// `c = b2/a2 = b3/a3`.
    pub ratio: usize,
    /// `max |g(u+v) − g(u)·g(v)|`.
    pub multiplicative_residual: f64,
    /// `max ||g(y)| − 1|`.
    pub unit_residual: f64,
    /// `f1` must be the character `−a`.
    pub implied_alpha1: usize,
    /// `f4` must be the character `−c·a`.
    pub implied_alpha4: usize,
}

pub fn case_equal_ratio_reduction(
    f2: &[Complex64],
    f3: &[Complex64],
    quad: &Quad<u64>,
    tol: f64,
) -> Result<EqualRatioReduction, EngineError> {
    let m = CyclicModulus::new(f2.len() as u64)?;
    if f3.len() != f2.len() {
        return Err(crate::cyclic::CyclicError::LengthMismatch {
            expected: f2.len(),
            got: f3.len(),
        }
        .into());
    }
    let q = reduce_quad(quad, m)?;
    let a2_inv = m.inv(q.a2).ok_or(EngineError::NonUnitCoefficient {
        name: "a2",
        value: q.a2,
        modulus: m.get(),
    })?;
    let c = m.mul(q.b2, a2_inv);
    if m.mul(c, q.a3) != q.b3 {
        return Err(EngineError::NotEqualRatio);
    }
    let n = m.order();
    let g: Vec<Complex64> = (0..n)
        .map(|y| f2[m.mul(q.a2, y)] * f3[m.mul(q.a3, y)])
        .collect();
    let mut worst = (0.0, (0, 0));
    for u in 0..n {
        for v in 0..n {
            let r = (g[m.add(u, v)] - g[u] * g[v]).norm();
            if r > worst.0 {
                worst = (r, (u, v));
            }
        }
    }
    if worst.0 > tol {
        return Err(EngineError::NotMultiplicative {
            u: worst.1 .0,
            v: worst.1 .1,
            residual: worst.0,
        });
    }
    let unit_residual = g.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let index = match match_character(&g, tol) {
        Ok(i) => i,
        Err((y, residual)) => {
            return Err(EngineError::NotMultiplicative {
                u: y,
                v: 0,
                residual,
            })
        }
    };
    Ok(EqualRatioReduction {
        g,
        index,
        ratio: c,
        multiplicative_residual: worst.0,
        unit_residual,
        implied_alpha1: m.neg(index),
        implied_alpha4: m.neg(m.mul(c, index)),
    })
}

/// Failure of a scanned identity.
struct Violation {
    identity: &'static str,
    factor: Option<usize>,
    arguments: Vec<usize>,
    residual: f64,
}

struct Certifier {
    m: CyclicModulus,
    opts: CertifyOptions,
    rng: ChaCha8Rng,
    transcript: Vec<TranscriptEntry>,
}

impl Certifier {
    fn n(&self) -> usize {
        self.m.order()
    }

    /// Evaluates `residual` over `arity`-tuples in Z(m), exhaustively when
    /// small and on seeded samples otherwise. Records the scan and returns
    /// the worst violating tuple if the largest residual exceeds `threshold`.
    fn scan(
        &mut self,
        identity: &'static str,
        factor: Option<usize>,
        arity: u32,
        threshold: f64,
        residual: impl Fn(&[usize]) -> f64,
    ) -> Result<(), Violation> {
        let n = self.n();
        let total = (n as u64).checked_pow(arity).unwrap_or(u64::MAX);
        let exhaustive = total <= self.opts.exhaustive_limit;
        let count = if exhaustive { total } else { self.opts.samples };
        let mut args = vec![0usize; arity as usize];
        let mut worst = (0.0f64, args.clone());
        for t in 0..count {
            if exhaustive {
                let mut rest = t as usize;
                for a in args.iter_mut() {
                    *a = rest % n;
                    rest /= n;
                }
            } else {
                for a in args.iter_mut() {
                    *a = self.rng.gen_range(0..n);
                }
            }
            let r = residual(&args);
            if r > worst.0 || r.is_nan() {
                worst = (if r.is_nan() { f64::INFINITY } else { r }, args.clone());
            }
        }
        let passed = worst.0 <= threshold;
        self.transcript.push(TranscriptEntry {
            identity,
            factor,
            tuples: count,
            exhaustive,
            max_residual: worst.0,
            passed,
            detail: None,
        });
        if passed {
            Ok(())
        } else {
            Err(Violation {
                identity,
                factor,
                arguments: worst.1,
                residual: worst.0,
            })
        }
    }

    fn note(
        &mut self,
        identity: &'static str,
        factor: Option<usize>,
        max_residual: f64,
        passed: bool,
        detail: String,
    ) {
        self.transcript.push(TranscriptEntry {
            identity,
            factor,
            tuples: self.n() as u64,
            exhaustive: true,
            max_residual,
            passed,
            detail: Some(detail),
        });
    }

    /// Character index of `f`, recorded in the transcript.
    fn character(
        &mut self,
        identity: &'static str,
        factor: usize,
        f: &[Complex64],
    ) -> Result<usize, Violation> {
        match match_character(f, self.opts.tolerance) {
            Ok(idx) => {
                let r = residual_to_character(f, idx);
                self.note(identity, Some(factor), r, true, format!("index {idx}"));
                Ok(idx)
            }
            Err((y, r)) => {
                self.note(
                    identity,
                    Some(factor),
                    r,
                    false,
                    format!("fails at y = {y}"),
                );
                Err(Violation {
                    identity,
                    factor: Some(factor),
                    arguments: vec![y],
                    residual: r,
                })
            }
        }
    }

    /// Modulus stage for `θ_t` in `θ_t(u+B_t·v) + θ_o(u+B_o·v) = C(u) + D(v)`.
    fn modulus_stage(
        &mut self,
        t: usize,
        theta: &[f64],
        bt: usize,
        bo: usize,
        c: &[f64],
        d: &[f64],
    ) -> Result<(), Violation> {
        let m = self.m;
        let tol = self.opts.tolerance
            * [theta, c, d]
                .iter()
                .flat_map(|v| v.iter())
                .map(|x| x.abs())
                .fold(1.0, f64::max);
        let shift = m.sub(bt, bo);
        let w = move |u: usize, v: usize| m.add(u, m.mul(bt, v));
        // Δ_{(Bt−Bo)g} θt(u+Bt·v) = Δ_{−Bo·g} C(u) + Δ_g D(v)
        self.scan("modulus_first_difference", Some(t), 3, tol, |a| {
            let (g, u, v) = (a[0], a[1], a[2]);
            let lhs = theta[m.add(w(u, v), m.mul(shift, g))] - theta[w(u, v)];
            let rhs = c[m.sub(u, m.mul(bo, g))] - c[u] + d[m.add(v, g)] - d[v];
            (lhs - rhs).abs()
        })?;
        // Δ_h Δ_{(Bt−Bo)g} θt(u+Bt·v) = Δ_h Δ_{−Bo·g} C(u)
        self.scan("modulus_second_difference", Some(t), 4, tol, |a| {
            let (g, h, u, v) = (a[0], a[1], a[2], a[3]);
            let l = |u: usize| theta[m.add(w(u, v), m.mul(shift, g))] - theta[w(u, v)];
            let r = |u: usize| c[m.sub(u, m.mul(bo, g))] - c[u];
            ((l(m.add(u, h)) - l(u)) - (r(m.add(u, h)) - r(u))).abs()
        })?;
        // Δ_{Bt·k} Δ_h Δ_{(Bt−Bo)g} θt(u+Bt·v) = 0
        self.scan("modulus_third_difference", Some(t), 5, tol, |a| {
            let (g, h, k, u, v) = (a[0], a[1], a[2], a[3], a[4]);
            let q = |x: usize| {
                let s = m.mul(shift, g);
                theta[m.add(m.add(x, s), h)] - theta[m.add(x, h)] - theta[m.add(x, s)] + theta[x]
            };
            let x = w(u, v);
            (q(m.add(x, m.mul(bt, k))) - q(x)).abs()
        })?;
        let table: Vec<Complex64> = theta.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        if let Some(v) = polynomial_violation(&table, 2, self.opts.tolerance) {
            self.note(
                "modulus_polynomial",
                Some(t),
                v.value.norm(),
                false,
                format!("Δ_h³ ≠ 0 at h = {}", v.h),
            );
            return Err(Violation {
                identity: "modulus_polynomial",
                factor: Some(t),
                arguments: vec![v.h, v.y],
                residual: v.value.norm(),
            });
        }
        assert!(is_polynomial_of_degree(&table, 2));
        self.note(
            "modulus_polynomial",
            Some(t),
            0.0,
            true,
            "degree ≤ 2, hence constant".into(),
        );
        self.scan("modulus_vanishes", Some(t), 1, tol, |a| theta[a[0]].abs())
    }

    /// Phase stage for `F_t` once `|F_2| = |F_3| = 1`.
    fn phase_stage(
        &mut self,
        t: usize,
        f: &[Complex64],
        bt: usize,
        bo: usize,
        s: &[Complex64],
        tt: &[Complex64],
    ) -> Result<usize, Violation> {
        let m = self.m;
        let tol = self.opts.tolerance;
        let shift = m.sub(bt, bo);
        let w = move |u: usize, v: usize| m.add(u, m.mul(bt, v));
        // F_t(w + (Bt−Bo)g)/F_t(w) = S(u−Bo·g)·T(v+g) / (S(u)·T(v))
        self.scan("phase_first_ratio", Some(t), 3, tol, |a| {
            let (g, u, v) = (a[0], a[1], a[2]);
            let x = w(u, v);
            let lhs = f[m.add(x, m.mul(shift, g))] / f[x];
            let rhs = s[m.sub(u, m.mul(bo, g))] * tt[m.add(v, g)] / (s[u] * tt[v]);
            (lhs - rhs).norm()
        })?;
        let ratio2 = move |x: usize, g: usize, h: usize| {
            let d = m.mul(shift, g);
            f[m.add(m.add(x, d), h)] * f[x] / (f[m.add(x, h)] * f[m.add(x, d)])
        };
        self.scan("phase_second_ratio", Some(t), 4, tol, |a| {
            let (g, h, u, v) = (a[0], a[1], a[2], a[3]);
            let sg = m.sub(u, m.mul(bo, g));
            let rhs = s[m.add(sg, h)] * s[u] / (s[m.add(u, h)] * s[sg]);
            (ratio2(w(u, v), g, h) - rhs).norm()
        })?;
        self.scan("phase_third_ratio", Some(t), 5, tol, |a| {
            let (g, h, k, u, v) = (a[0], a[1], a[2], a[3], a[4]);
            let x = w(u, v);
            (ratio2(m.add(x, m.mul(bt, k)), g, h) / ratio2(x, g, h) - 1.0).norm()
        })?;
        // F²(h)·F(Bt·k)·F(−Bt·k) / (F(h+Bt·k)·F(h−Bt·k)) = 1
        self.scan("phase_square_symmetry", Some(t), 2, tol, |a| {
            let (h, k) = (a[0], m.mul(bt, a[1]));
            (f[h] * f[h] * f[k] * f[m.neg(k)] / (f[m.add(h, k)] * f[m.sub(h, k)]) - 1.0).norm()
        })?;
        self.scan("phase_hermitian_unit", Some(t), 1, tol, |a| {
            (f[a[0]] * f[m.neg(a[0])] - 1.0).norm()
        })?;
        self.scan("phase_square_midpoint", Some(t), 2, tol, |a| {
            let (u, v) = (a[0], a[1]);
            (f[u] * f[u] - f[m.add(u, v)] * f[m.sub(u, v)]).norm()
        })?;
        self.scan("phase_square_character", Some(t), 2, tol, |a| {
            let (u, v) = (a[0], a[1]);
            let uv = m.add(u, v);
            (f[uv] * f[uv] - f[u] * f[u] * f[v] * f[v]).norm()
        })?;
        self.scan("phase_doubling", Some(t), 1, tol, |a| {
            let y = a[0];
            (f[y] * f[y] - f[m.add(y, y)]).norm()
        })?;
        self.character("normalized_character", t, f)
    }
}

fn residual_to_character(f: &[Complex64], idx: usize) -> f64 {
    let m = f.len();
    (0..m)
        .map(|y| {
            (f[y] - Complex64::from_polar(1.0, TAU * ((idx * y) % m) as f64 / m as f64)).norm()
        })
        .fold(0.0, f64::max)
}

/// Recovers the shifts `α_j` with `ν_j = μ_j ∗ E_{α_j}` from equal joint laws.
pub fn certify_shifts_zm<T: Mass>(
    mus: &[DistZm<T>; 4],
    nus: &[DistZm<T>; 4],
    quad: &Quad<u64>,
) -> Result<Certification, EngineError> {
    certify_shifts_zm_with(mus, nus, quad, &CertifyOptions::default())
}

pub fn certify_shifts_zm_with<T: Mass>(
    mus: &[DistZm<T>; 4],
    nus: &[DistZm<T>; 4],
    quad: &Quad<u64>,
    opts: &CertifyOptions,
) -> Result<Certification, EngineError> {
    let m = mus[0].modulus();
    if !m.is_odd() {
        return Err(EngineError::EvenModulus(m.get()));
    }
    let q = reduce_quad(quad, m)?;
    for (name, value) in [("a2", q.a2), ("a3", q.a3)] {
        if m.inv(value).is_none() {
            return Err(EngineError::NonUnitCoefficient {
                name,
                value,
                modulus: m.get(),
            });
        }
    }
    let mu_cf: Vec<CharTable> = mus.iter().map(char_fn).collect();
    let nu_cf: Vec<CharTable> = nus.iter().map(char_fn).collect();
    for (prefix, tables) in [("mu", &mu_cf), ("nu", &nu_cf)] {
        for (j, table) in tables.iter().enumerate() {
            if let Some((y, z)) = table
                .values()
                .iter()
                .enumerate()
                .find(|(_, z)| z.norm() <= opts.floor)
            {
                return Err(EngineError::VanishingCF {
                    which: format!("{prefix}{}", j + 1),
                    y,
                    value: z.norm(),
                });
            }
        }
    }
    let (deviation, (u, v)) = joint_deviation(mus, nus, quad)?;
    if deviation > opts.tolerance {
        return Err(EngineError::JointMismatch { deviation, u, v });
    }
    let f: Vec<Vec<Complex64>> = nu_cf
        .iter()
        .zip(&mu_cf)
        .map(|(n, d)| n.ratio(d))
        .collect::<Result<_, _>>()?;
    let mut cert = Certifier {
        m,
        opts: *opts,
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
        transcript: Vec::new(),
    };
    cert.note(
        "joint_cf_equality",
        None,
        deviation,
        true,
        format!("{} pairs", m.order() * m.order()),
    );

    let det_zero = m.mul(q.a2, q.b3) == m.mul(q.a3, q.b2);
    let case = if det_zero {
        CertCase::EqualRatio
    } else {
        CertCase::DetNonzero
    };
    let outcome = if det_zero {
        equal_ratio_path(&mut cert, &f, quad)
    } else {
        det_nonzero_path(&mut cert, &f, &q)
    };
    let shifts = match outcome {
        Ok(shifts) => shifts,
        Err(Failure::Engine(e)) => return Err(e),
        Err(Failure::Violation(v, partial)) => {
            return Ok(Certification::Witness(CounterexampleWitness {
                modulus: m.get(),
                case,
                identity: v.identity,
                factor: v.factor,
                arguments: v.arguments,
                residual: v.residual,
                shifts: partial,
                transcript: cert.transcript,
            }))
        }
    };
    for j in 0..4 {
        let ok = nus[j].close_to(&mus[j].shifted(shifts[j]), opts.tolerance);
        let max_residual = mass_gap(&nus[j], &mus[j].shifted(shifts[j]));
        cert.note(
            "mass_shift",
            Some(j + 1),
            max_residual,
            ok,
            format!("α = {}", shifts[j]),
        );
        if !ok {
            return Ok(Certification::Witness(CounterexampleWitness {
                modulus: m.get(),
                case,
                identity: "mass_shift",
                factor: Some(j + 1),
                arguments: vec![shifts[j]],
                residual: max_residual,
                shifts: shifts.map(Some),
                transcript: cert.transcript,
            }));
        }
    }
    Ok(Certification::Certified(ShiftCertificate {
        modulus: m.get(),
        case,
        shifts,
        transcript: cert.transcript,
    }))
}

fn mass_gap<T: Mass>(a: &DistZm<T>, b: &DistZm<T>) -> f64 {
    a.probs()
        .iter()
        .zip(b.probs())
        .map(|(x, y)| (x.to_f64() - y.to_f64()).abs())
        .fold(0.0, f64::max)
}

enum Failure {
    Engine(EngineError),
    /// The violation and whichever shifts were matched before it.
    Violation(Box<Violation>, [Option<usize>; 4]),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::Engine(e)
    }
}

fn det_nonzero_path(
    cert: &mut Certifier,
    f: &[Vec<Complex64>],
    q: &Quad<usize>,
) -> Result<[usize; 4], Failure> {
    let m = cert.m;
    let a2_inv = m.inv(q.a2).expect("checked unit");
    let a3_inv = m.inv(q.a3).expect("checked unit");
    let b2 = m.mul(q.b2, a2_inv);
    let b3 = m.mul(q.b3, a3_inv);
    if m.inv(m.sub(b2, b3)).is_none() {
        return Err(EngineError::NonUnitCoefficient {
            name: "a2·b3 − a3·b2",
            value: m.sub(m.mul(q.a2, q.b3), m.mul(q.a3, q.b2)),
            modulus: m.get(),
        }
        .into());
    }
    // F2(y) = f2(a2·y), F3(y) = f3(a3·y) turn the equation into
    // f1(u)·F2(u + B2·v)·F3(u + B3·v)·f4(v) = 1
    let big_f2: Vec<Complex64> = (0..m.order()).map(|y| f[1][m.mul(q.a2, y)]).collect();
    let big_f3: Vec<Complex64> = (0..m.order()).map(|y| f[2][m.mul(q.a3, y)]).collect();
    let partial = |cert: &mut Certifier| -> [Option<usize>; 4] {
        let x1 = match_character(&f[0], cert.opts.tolerance).ok();
        let x4 = match_character(&f[3], cert.opts.tolerance).ok();
        [x1, None, None, x4]
    };
    let fail = |cert: &mut Certifier, v: Violation| Failure::Violation(Box::new(v), partial(cert));

    let theta: Vec<Vec<f64>> = [&f[0], &big_f2, &big_f3, &f[3]]
        .iter()
        .map(|t| t.iter().map(|z| z.norm().ln()).collect())
        .collect();
    let c: Vec<f64> = theta[0].iter().map(|x| -x).collect();
    let d: Vec<f64> = theta[3].iter().map(|x| -x).collect();
    let tol = cert.opts.tolerance;
    let w2 = |u: usize, v: usize| m.add(u, m.mul(b2, v));
    let w3 = |u: usize, v: usize| m.add(u, m.mul(b3, v));
    if let Err(v) = cert.scan("modulus_equation", None, 2, tol * 8.0, |a| {
        let (u, v) = (a[0], a[1]);
        (theta[0][u] + theta[1][w2(u, v)] + theta[2][w3(u, v)] + theta[3][v]).abs()
    }) {
        return Err(fail(cert, v));
    }
    if let Err(v) = cert.modulus_stage(2, &theta[1], b2, b3, &c, &d) {
        return Err(fail(cert, v));
    }
    if let Err(v) = cert.modulus_stage(3, &theta[2], b3, b2, &c, &d) {
        return Err(fail(cert, v));
    }

    let s: Vec<Complex64> = f[0].iter().map(|z| z.inv()).collect();
    let t: Vec<Complex64> = f[3].iter().map(|z| z.inv()).collect();
    if let Err(v) = cert.scan("phase_factorization", None, 2, tol, |a| {
        let (u, v) = (a[0], a[1]);
        (big_f2[w2(u, v)] * big_f3[w3(u, v)] - s[u] * t[v]).norm()
    }) {
        return Err(fail(cert, v));
    }
    let idx2 = cert
        .phase_stage(2, &big_f2, b2, b3, &s, &t)
        .map_err(|v| fail(cert, v))?;
    let idx3 = cert
        .phase_stage(3, &big_f3, b3, b2, &s, &t)
        .map_err(|v| fail(cert, v))?;
    // F_t(y) = (idx, y) means f_t(z) = (idx·a_t⁻¹, z)
    let x2 = m.mul(idx2, a2_inv);
    let x3 = m.mul(idx3, a3_inv);
    let x1 = cert
        .character("character", 1, &f[0])
        .map_err(|v| fail(cert, v))?;
    let y2 = cert
        .character("character", 2, &f[1])
        .map_err(|v| fail(cert, v))?;
    let y3 = cert
        .character("character", 3, &f[2])
        .map_err(|v| fail(cert, v))?;
    let x4 = cert
        .character("character", 4, &f[3])
        .map_err(|v| fail(cert, v))?;
    assert_eq!(
        (x2, x3),
        (y2, y3),
        "normalized and direct character indices agree"
    );
    Ok([x1, x2, x3, x4])
}

fn equal_ratio_path(
    cert: &mut Certifier,
    f: &[Vec<Complex64>],
    quad: &Quad<u64>,
) -> Result<[usize; 4], Failure> {
    let tol = cert.opts.tolerance;
    let red = case_equal_ratio_reduction(&f[1], &f[2], quad, tol)?;
    cert.note(
        "reduced_multiplicative",
        None,
        red.multiplicative_residual.max(red.unit_residual),
        true,
        format!("g index {}, c = {}", red.index, red.ratio),
    );
    let x1 = cert
        .character("character", 1, &f[0])
        .map_err(|v| Failure::Violation(Box::new(v), [None; 4]))?;
    let x4 = cert
        .character("character", 4, &f[3])
        .map_err(|v| Failure::Violation(Box::new(v), [Some(x1), None, None, None]))?;
    let partial = [Some(x1), None, None, Some(x4)];
    if (x1, x4) != (red.implied_alpha1, red.implied_alpha4) {
        cert.note(
            "implied_outer_characters",
            None,
            0.0,
            false,
            format!("expected ({}, {})", red.implied_alpha1, red.implied_alpha4),
        );
        return Err(Failure::Violation(
            Box::new(Violation {
                identity: "implied_outer_characters",
                factor: None,
                arguments: vec![x1, x4],
                residual: f64::INFINITY,
            }),
            partial,
        ));
    }
    let x2 = cert
        .character("character", 2, &f[1])
        .map_err(|v| Failure::Violation(Box::new(v), partial))?;
    let x3 = cert
        .character("character", 3, &f[2])
        .map_err(|v| Failure::Violation(Box::new(v), partial))?;
    Ok([x1, x2, x3, x4])
}

/// A random distribution on Z(m) whose CF stays above `floor` in modulus.
pub fn random_nonvanishing_dist<R: Rng + ?Sized>(
    modulus: CyclicModulus,
    floor: f64,
    rng: &mut R,
) -> DistZm<f64> {
    loop {
        let weights: Vec<f64> = (0..modulus.order()).map(|_| rng.gen::<f64>()).collect();
        let d = DistZm::from_weights(modulus, &weights).expect("positive weights");
        if char_fn(&d).min_modulus() > floor {
            return d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::build_counterexample_pr2;
    use num_rational::BigRational;

    fn z(m: u64) -> CyclicModulus {
        CyclicModulus::new(m).unwrap()
    }

    fn random_four(m: u64, seed: u64) -> [DistZm<f64>; 4] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        std::array::from_fn(|_| random_nonvanishing_dist(z(m), 1e-3, &mut rng))
    }

    fn quad(a2: u64, a3: u64, b2: u64, b3: u64) -> Quad<u64> {
        Quad::new(a2, a3, b2, b3)
    }

    /// Shifts keeping the joint law fixed: α1 = −(a2α2 + a3α3), α4 = −(b2α2 + b3α3).
    fn compatible(m: u64, q: &Quad<u64>, a2: usize, a3: usize) -> [usize; 4] {
        let m = z(m);
        let (qa2, qa3, qb2, qb3) = (q.a2 as usize, q.a3 as usize, q.b2 as usize, q.b3 as usize);
        let x1 = m.neg(m.add(m.mul(qa2, a2), m.mul(qa3, a3)));
        let x4 = m.neg(m.add(m.mul(qb2, a2), m.mul(qb3, a3)));
        [x1, a2, a3, x4]
    }

    #[test]
    fn identical_laws_certify_zero_shifts() {
        let mus = random_four(5, 1);
        let c = certify_shifts_zm(&mus, &mus, &quad(1, 2, 2, 1)).unwrap();
        assert_eq!(c.shifts(), [Some(0); 4]);
        assert!(c.transcript().iter().all(|e| e.passed));
    }

    #[test]
    fn round_trip_recovers_planted_shifts() {
        let q = quad(1, 2, 2, 1);
        let mus = random_four(5, 7);
        let shifts = compatible(5, &q, 2, 3);
        let nus: [DistZm<f64>; 4] = std::array::from_fn(|j| mus[j].shifted(shifts[j]));
        match certify_shifts_zm(&mus, &nus, &q).unwrap() {
            Certification::Certified(c) => {
                assert_eq!(c.shifts, shifts);
                assert_eq!(c.case, CertCase::DetNonzero);
                let third = c
                    .transcript
                    .iter()
                    .find(|e| e.identity == "modulus_third_difference")
                    .unwrap();
                assert!(third.exhaustive && third.tuples == 3125);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn incompatible_shifts_change_the_joint_law() {
        let q = quad(1, 2, 2, 1);
        let mus = random_four(5, 3);
        let nus: [DistZm<f64>; 4] = std::array::from_fn(|j| mus[j].shifted(j + 1));
        assert!(matches!(
            certify_shifts_zm(&mus, &nus, &q),
            Err(EngineError::JointMismatch { .. })
        ));
    }

    #[test]
    fn pr2_pair_yields_witness_with_outer_shifts() {
        let (mu, nu) = build_counterexample_pr2(3, &BigRational::new(3.into(), 10.into())).unwrap();
        let outer = random_four(3, 11).map(|d| d.to_f64());
        let (mu, nu) = (mu.to_f64(), nu.to_f64());
        let mus = [outer[0].clone(), mu.clone(), mu, outer[3].clone()];
        let nus = [outer[0].clone(), nu.clone(), nu, outer[3].clone()];
        let q = quad(1, 2, 1, 2);
        assert!(verify_joint_equality(&mus, &nus, &q).unwrap().0);
        match certify_shifts_zm(&mus, &nus, &q).unwrap() {
            Certification::Witness(w) => {
                assert_eq!(w.identity, "character");
                assert_eq!(w.factor, Some(2));
                assert_eq!(w.shifts, [Some(0), None, None, Some(0)]);
            }
            other => panic!("{other:?}"),
        }
        // (1, 2, 2, 1) has determinant −3, which vanishes mod 3 but not mod 5
        assert!(
            verify_joint_equality(&mus, &nus, &quad(1, 2, 2, 1))
                .unwrap()
                .0
        );
        let (mu, nu) = build_counterexample_pr2(5, &BigRational::new(1.into(), 10.into())).unwrap();
        let outer = random_four(5, 12);
        let (mu, nu) = (mu.to_f64(), nu.to_f64());
        let mus = [outer[0].clone(), mu.clone(), mu, outer[3].clone()];
        let nus = [outer[0].clone(), nu.clone(), nu, outer[3].clone()];
        assert!(
            verify_joint_equality(&mus, &nus, &quad(1, 2, 2, 4))
                .unwrap()
                .0
        );
        assert!(
            !verify_joint_equality(&mus, &nus, &quad(1, 2, 2, 1))
                .unwrap()
                .0
        );
    }

    #[test]
    fn equal_ratio_with_shifted_factors_certifies() {
        let q = quad(1, 2, 3, 6);
        let mus = random_four(7, 5);
        let shifts = compatible(7, &q, 4, 1);
        let nus: [DistZm<f64>; 4] = std::array::from_fn(|j| mus[j].shifted(shifts[j]));
        let c = certify_shifts_zm(&mus, &nus, &q).unwrap();
        assert_eq!(c.shifts(), shifts.map(Some));
    }

    #[test]
    fn reduction_examples() {
        let one = vec![Complex64::new(1.0, 0.0); 5];
        let r = case_equal_ratio_reduction(&one, &one, &quad(1, 2, 2, 4), 1e-10).unwrap();
        assert_eq!(r.index, 0);
        let ch = |x: usize| crate::cyclic::character(z(5), x).values().to_vec();
        let r = case_equal_ratio_reduction(&ch(3), &ch(4), &quad(1, 2, 2, 4), 1e-10).unwrap();
        assert_eq!(r.index, (3 + 2 * 4) % 5);
        let f: Vec<Complex64> = (0..3)
            .map(|y| Complex64::new(if y == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        let r = case_equal_ratio_reduction(&f, &f, &quad(1, 2, 1, 2), 1e-10).unwrap();
        assert_eq!(r.index, 0);
        assert!(r.g.iter().all(|z| (z - 1.0).norm() < 1e-15));
        assert_eq!(
            case_equal_ratio_reduction(&one, &one, &quad(1, 2, 2, 1), 1e-10),
            Err(EngineError::NotEqualRatio)
        );
    }

    #[test]
    fn input_errors() {
        let mus = random_four(5, 2);
        assert!(matches!(
            certify_shifts_zm(&mus, &mus, &quad(1, 5, 2, 1)),
            Err(EngineError::Cyclic(
                crate::cyclic::CyclicError::ZeroCoefficient { name: "a3", .. }
            ))
        ));
        let even = random_four(4, 2);
        assert_eq!(
            certify_shifts_zm(&even, &even, &quad(1, 1, 1, 3)),
            Err(EngineError::EvenModulus(4))
        );
        let flat = DistZm::<f64>::uniform(z(5));
        let mut vanishing = mus.clone();
        vanishing[2] = flat;
        assert!(matches!(
            certify_shifts_zm(&vanishing, &mus, &quad(1, 2, 2, 1)),
            Err(EngineError::VanishingCF { .. })
        ));
    }

    #[test]
    fn sampled_scans_on_larger_moduli() {
        let q = quad(1, 2, 2, 1);
        let mus = random_four(13, 9);
        let shifts = compatible(13, &q, 5, 8);
        let nus: [DistZm<f64>; 4] = std::array::from_fn(|j| mus[j].shifted(shifts[j]));
        let opts = CertifyOptions {
            samples: 20_000,
            ..CertifyOptions::default()
        };
        let c = certify_shifts_zm_with(&mus, &nus, &q, &opts).unwrap();
        assert_eq!(c.shifts(), shifts.map(Some));
        let third = c
            .transcript()
            .iter()
            .find(|e| e.identity == "modulus_third_difference")
            .unwrap();
        assert!(!third.exhaustive);
        assert_eq!(third.tuples, 20_000);
    }
}
