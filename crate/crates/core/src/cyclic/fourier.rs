use super::dist::{DistZm, Mass};
use super::{CyclicError, CyclicModulus};
use crate::Quad;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Default floor below which a characteristic function counts as vanishing.
pub const DEFAULT_NONVANISHING_FLOOR: f64 = 1e-9;

const TABLE_TOL: f64 = 1e-12;

/// Characteristic function of a distribution on Z(m): `values[y] = μ̂(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharTable {
    modulus: CyclicModulus,
    values: Vec<Complex64>,
}

impl CharTable {
    /// Checks `μ̂(0) = 1`, `|μ̂| ≤ 1` and `μ̂(m−y) = conj μ̂(y)` within `1e-12`.
    pub fn new(modulus: CyclicModulus, values: Vec<Complex64>) -> Result<Self, CyclicError> {
        let m = modulus.order();
        if values.len() != m {
            return Err(CyclicError::LengthMismatch {
                expected: m,
                got: values.len(),
            });
        }
        if (values[0] - 1.0).norm() > TABLE_TOL {
            return Err(CyclicError::Malformed(format!(
                "value at 0 is {}",
                values[0]
            )));
        }
        for y in 0..m {
            if values[y].norm() > 1.0 + TABLE_TOL {
                return Err(CyclicError::Malformed(format!(
                    "|value| = {} > 1 at {y}",
                    values[y].norm()
                )));
            }
            if (values[modulus.neg(y)] - values[y].conj()).norm() > TABLE_TOL {
                return Err(CyclicError::Malformed(format!("not Hermitian at {y}")));
            }
        }
        Ok(CharTable { modulus, values })
    }

    pub fn modulus(&self) -> CyclicModulus {
        self.modulus
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, y: usize) -> Complex64 {
        self.values[y % self.values.len()]
    }

    pub fn min_modulus(&self) -> f64 {
        self.values
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Pointwise ratio `self / den`, the function `f = ν̂/μ̂`.
    pub fn ratio(&self, den: &CharTable) -> Result<Vec<Complex64>, CyclicError> {
        if self.modulus != den.modulus {
            return Err(CyclicError::ModulusMismatch(
                self.modulus.get(),
                den.modulus.get(),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(&den.values)
            .map(|(a, b)| a / b)
            .collect())
    }

    pub fn max_deviation(&self, other: &CharTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct CharTableJson {
    m: u64,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for CharTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CharTableJson {
            m: self.modulus.get(),
            re: self.values.iter().map(|z| z.re).collect(),
            im: self.values.iter().map(|z| z.im).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CharTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = CharTableJson::deserialize(deserializer)?;
        if raw.re.len() != raw.im.len() {
            return Err(D::Error::custom("re and im lengths differ"));
        }
        let modulus = CyclicModulus::new(raw.m).map_err(D::Error::custom)?;
        let values = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        CharTable::new(modulus, values).map_err(D::Error::custom)
    }
}

/// `values[y] = Σ_x probs[x]·exp(2πi·x·y/m)`.
pub fn char_fn<T: Mass>(dist: &DistZm<T>) -> CharTable {
    let m = dist.modulus();
    let roots = m.roots_of_unity();
    let probs: Vec<f64> = dist.probs().iter().map(Mass::to_f64).collect();
    let values = (0..m.order())
        .map(|y| {
            probs
                .iter()
                .enumerate()
                .map(|(x, &p)| roots[m.mul(x, y)] * p)
                .sum()
        })
        .collect();
    CharTable { modulus: m, values }
}

/// The character `y ↦ exp(2πi·x·y/m)`, i.e. the transform of `E_x`.
pub fn character(modulus: CyclicModulus, x: usize) -> CharTable {
    let roots = modulus.roots_of_unity();
    CharTable {
        modulus,
        values: (0..modulus.order())
            .map(|y| roots[modulus.mul(x, y)])
            .collect(),
    }
}

/// Finite Fourier inversion, rejecting masses below `-1e-10`.
pub fn inverse_char_fn(table: &CharTable) -> Result<DistZm<f64>, CyclicError> {
    inverse_char_fn_with_tol(table, crate::DEFAULT_TOLERANCE)
}

pub fn inverse_char_fn_with_tol(table: &CharTable, tol: f64) -> Result<DistZm<f64>, CyclicError> {
    let m = table.modulus;
    let roots = m.roots_of_unity();
    let scale = 1.0 / m.get() as f64;
    let mut probs = Vec::with_capacity(m.order());
    for x in 0..m.order() {
        let z: Complex64 = (0..m.order())
            .map(|y| table.values[y] * roots[m.mul(x, y)].conj())
            .sum::<Complex64>()
            * scale;
        if z.im.abs() > tol {
            return Err(CyclicError::NotADistribution(format!(
                "recovered mass at {x} has imaginary part {}",
                z.im
            )));
        }
        probs.push(z.re);
    }
    DistZm::from_recovered(m, probs, tol)
}

/// `true` iff `min_y |values[y]| > floor`.
pub fn nonvanishing(table: &CharTable, floor: f64) -> bool {
    table.min_modulus() > floor
}

/// Joint characteristic function of `(L1, L2)` on Z(m)², row `u`, column `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointCF {
    modulus: CyclicModulus,
    values: Vec<Complex64>,
}

impl JointCF {
    pub fn modulus(&self) -> CyclicModulus {
        self.modulus
    }

    pub fn at(&self, u: usize, v: usize) -> Complex64 {
        let m = self.modulus.order();
        self.values[(u % m) * m + v % m]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Largest `|Ψ(u,v) − Φ(u,v)|` with its argmax.
    pub fn max_deviation(&self, other: &JointCF) -> (f64, (usize, usize)) {
        let m = self.modulus.order();
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| ((a - b).norm(), (i / m, i % m)))
            .fold(
                (0.0, (0, 0)),
                |best, cur| if cur.0 > best.0 { cur } else { best },
            )
    }
}

/// `Ψ(u,v) = μ̂1(u)·μ̂2(a2u+b2v)·μ̂3(a3u+b3v)·μ̂4(v)`, indices mod m.
pub fn joint_cf<T: Mass>(mus: &[DistZm<T>; 4], quad: &Quad<u64>) -> Result<JointCF, CyclicError> {
    let m = mus[0].modulus();
    for mu in &mus[1..] {
        if mu.modulus() != m {
            return Err(CyclicError::ModulusMismatch(m.get(), mu.modulus().get()));
        }
    }
    let c = reduce_quad(quad, m)?;
    let tables: Vec<CharTable> = mus.iter().map(char_fn).collect();
    let n = m.order();
    let mut values = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in 0..n {
            let w2 = m.add(m.mul(c.a2, u), m.mul(c.b2, v));
            let w3 = m.add(m.mul(c.a3, u), m.mul(c.b3, v));
            values.push(
                tables[0].values[u]
                    * tables[1].values[w2]
                    * tables[2].values[w3]
                    * tables[3].values[v],
            );
        }
    }
    Ok(JointCF { modulus: m, values })
}

/// Reduces the coefficients mod m, rejecting any that vanish.
pub fn reduce_quad(quad: &Quad<u64>, m: CyclicModulus) -> Result<Quad<usize>, CyclicError> {
    let names = ["a2", "a3", "b2", "b3"];
    let reduced = quad.map(|&c| (c % m.get()) as usize);
    for (name, c) in names.iter().zip(reduced.iter()) {
        if *c == 0 {
            return Err(CyclicError::ZeroCoefficient {
                name,
                modulus: m.get(),
            });
        }
    }
    Ok(reduced)
}
