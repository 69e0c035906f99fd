use super::EngineError;
use crate::cyclic::is_prime;
use crate::numfmt::{parse_rational, rational_from_f64};
use crate::padic::{classify_qp_quad, PAdicError, PAdicQuadClass, PAdicScalar};
use crate::Quad;
use num_rational::BigRational;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// The scalar field carrying the random variables and the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldTag {
    Reals,
    RationalsDiscrete,
    Qp(u64),
    PrimeField(u64),
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Reals => write!(f, "R"),
            FieldTag::RationalsDiscrete => write!(f, "Q"),
            FieldTag::Qp(p) => write!(f, "Qp:{p}"),
            FieldTag::PrimeField(p) => write!(f, "Zp:{p}"),
        }
    }
}

impl FromStr for FieldTag {
    type Err = EngineError;

    /// `R`, `Q`, `Qp:<p>` or `Zp:<p>` (the prime field Z(p)).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let prime = |t: &str| -> Result<u64, EngineError> {
            let p: u64 = t
                .trim()
                .parse()
                .map_err(|_| EngineError::Parse(format!("prime {t:?}")))?;
            if is_prime(p) {
                Ok(p)
            } else {
                Err(EngineError::NotPrime(p))
            }
        };
        match s {
            "R" => Ok(FieldTag::Reals),
            "Q" => Ok(FieldTag::RationalsDiscrete),
            _ => match s.split_once(':') {
                Some(("Qp", p)) => Ok(FieldTag::Qp(prime(p)?)),
                Some(("Zp", p)) => Ok(FieldTag::PrimeField(prime(p)?)),
                _ => Err(EngineError::Parse(format!("field {s:?}"))),
            },
        }
    }
}

impl Serialize for FieldTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A coefficient quadruple together with the field it lives in.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientQuad {
    /// Real coefficients, held exactly so the case walls are decided exactly.
    Reals(Quad<BigRational>),
    RationalsDiscrete(Quad<BigRational>),
    Qp(Quad<PAdicScalar>),
    PrimeField {
        p: u64,
        quad: Quad<u64>,
    },
}

const NAMES: [&str; 4] = ["a2", "a3", "b2", "b3"];

impl CoefficientQuad {
    pub fn field(&self) -> FieldTag {
        match self {
            CoefficientQuad::Reals(_) => FieldTag::Reals,
            CoefficientQuad::RationalsDiscrete(_) => FieldTag::RationalsDiscrete,
            CoefficientQuad::Qp(q) => FieldTag::Qp(q.a2.p()),
            CoefficientQuad::PrimeField { p, .. } => FieldTag::PrimeField(*p),
        }
    }

    /// Real quadruple from machine floats, converted without rounding.
    pub fn reals_from_f64(quad: &Quad<f64>) -> Result<Self, EngineError> {
        let exact: Vec<BigRational> = quad
            .iter()
            .map(|&x| rational_from_f64(x).ok_or_else(|| EngineError::Parse(x.to_string())))
            .collect::<Result<_, _>>()?;
        let [a2, a3, b2, b3]: [BigRational; 4] = exact.try_into().expect("four entries");
        CoefficientQuad::Reals(Quad::new(a2, a3, b2, b3)).validated()
    }

    pub fn prime_field(p: u64, quad: [i64; 4]) -> Result<Self, EngineError> {
        if !is_prime(p) {
            return Err(EngineError::NotPrime(p));
        }
        let r = quad.map(|c| c.rem_euclid(p as i64) as u64);
        CoefficientQuad::PrimeField {
            p,
            quad: Quad::new(r[0], r[1], r[2], r[3]),
        }
        .validated()
    }

    /// Parses `"a2,a3,b2,b3"` for the given field: decimals or fractions for
    /// `R`/`Q`, `p^v*(digits)` or rationals for `Qp`, integers for `Zp`.
    pub fn parse(field: FieldTag, text: &str) -> Result<Self, EngineError> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let parts: [&str; 4] = parts.try_into().map_err(|_| {
            EngineError::Parse(format!("quad {text:?}: need four comma-separated entries"))
        })?;
        let rationals = || -> Result<Quad<BigRational>, EngineError> {
            let r: Vec<BigRational> = parts
                .iter()
                .map(|s| {
                    parse_rational(s)
                        .map_err(|_| EngineError::Parse(format!("{s:?} as a rational")))
                })
                .collect::<Result<_, _>>()?;
            let [a2, a3, b2, b3]: [BigRational; 4] = r.try_into().expect("four entries");
            Ok(Quad::new(a2, a3, b2, b3))
        };
        let quad = match field {
            FieldTag::Reals => CoefficientQuad::Reals(rationals()?),
            FieldTag::RationalsDiscrete => CoefficientQuad::RationalsDiscrete(rationals()?),
            FieldTag::Qp(p) => {
                let s: Vec<PAdicScalar> = parts
                    .iter()
                    .map(|t| PAdicScalar::parse(t, p))
                    .collect::<Result<_, _>>()?;
                let [a2, a3, b2, b3]: [PAdicScalar; 4] = s.try_into().expect("four entries");
                CoefficientQuad::Qp(Quad::new(a2, a3, b2, b3))
            }
            FieldTag::PrimeField(p) => {
                let ints: Vec<i64> = parts
                    .iter()
                    .map(|t| {
                        t.parse()
                            .map_err(|_| EngineError::Parse(format!("integer {t:?}")))
                    })
                    .collect::<Result<_, _>>()?;
                return CoefficientQuad::prime_field(p, [ints[0], ints[1], ints[2], ints[3]]);
            }
        };
        quad.validated()
    }

    pub fn validated(self) -> Result<Self, EngineError> {
        self.validate()?;
        Ok(self)
    }

    /// All four coefficients must be nonzero.
    pub fn validate(&self) -> Result<(), EngineError> {
        let zero_at: Option<usize> = match self {
            CoefficientQuad::Reals(q) | CoefficientQuad::RationalsDiscrete(q) => {
                q.iter().position(Zero::is_zero)
            }
            CoefficientQuad::Qp(q) => {
                if let Some(c) = q.iter().find(|c| c.p() != q.a2.p()) {
                    return Err(PAdicError::PrimeMismatch(q.a2.p(), c.p()).into());
                }
                q.iter().position(PAdicScalar::is_zero)
            }
            CoefficientQuad::PrimeField { p, quad } => quad.iter().position(|c| c % p == 0),
        };
        match zero_at {
            Some(i) => Err(EngineError::ZeroCoefficient(NAMES[i])),
            None => Ok(()),
        }
    }
}

impl fmt::Display for CoefficientQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientQuad::Reals(q) | CoefficientQuad::RationalsDiscrete(q) => write!(f, "{q}"),
            CoefficientQuad::Qp(q) => write!(f, "{q}"),
            CoefficientQuad::PrimeField { quad, .. } => write!(f, "{quad}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseLabel {
    I,
    II,
    III,
}

/// Counterexample construction witnessing non-identifiability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Recipe {
    /// Mirrored Poisson pair on the integers.
    Re1,
    /// ± construction on the p-adic integers.
    Pr1,
    /// ± construction on Z(p).
    Pr2,
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Recipe::Re1 => "re1",
            Recipe::Pr1 => "pr1",
            Recipe::Pr2 => "pr2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    FullUpToShift(CaseLabel),
    PartialXi1Xi4,
    NonIdentifiable(Recipe),
    OutsideTheory,
}

impl Outcome {
    pub fn tag(&self) -> &'static str {
        match self {
            Outcome::FullUpToShift(_) => "FullUpToShift",
            Outcome::PartialXi1Xi4 => "PartialXi1Xi4",
            Outcome::NonIdentifiable(_) => "NonIdentifiable",
            Outcome::OutsideTheory => "OutsideTheory",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub field: FieldTag,
    pub outcome: Outcome,
    /// The distributions of ξ1 and ξ4 are determined up to shift.
    pub partial_xi1_xi4: bool,
    /// The applicable result needs ξ2 and ξ3 identically distributed.
    pub requires_iid_23: bool,
    /// Theorem, proposition or remark backing the verdict; empty for
    /// [`Outcome::OutsideTheory`].
    pub citation: &'static str,
}

impl Verdict {
    fn new(field: FieldTag, outcome: Outcome, citation: &'static str) -> Self {
        Verdict {
            field,
            outcome,
            partial_xi1_xi4: matches!(outcome, Outcome::FullUpToShift(_) | Outcome::PartialXi1Xi4),
            requires_iid_23: false,
            citation,
        }
    }

    fn iid(mut self) -> Self {
        self.requires_iid_23 = true;
        self
    }

    fn partial(mut self, partial: bool) -> Self {
        self.partial_xi1_xi4 = partial;
        self
    }

    pub fn case(&self) -> Option<CaseLabel> {
        match self.outcome {
            Outcome::FullUpToShift(c) => Some(c),
            _ => None,
        }
    }

    pub fn recipe(&self) -> Option<Recipe> {
        match self.outcome {
            Outcome::NonIdentifiable(r) => Some(r),
            _ => None,
        }
    }

    /// One-line human summary such as `FullUpToShift (Theorem 2.2, case I)`.
    pub fn label(&self) -> String {
        match (self.outcome, self.partial_xi1_xi4) {
            (Outcome::FullUpToShift(_), _) => format!("FullUpToShift ({})", self.citation),
            (Outcome::PartialXi1Xi4, _) => format!("Partial ξ1,ξ4 ({})", self.citation),
            (Outcome::NonIdentifiable(_), true) => {
                format!("Partial ξ1,ξ4 + counterexample ({})", self.citation)
            }
            (Outcome::NonIdentifiable(_), false) => format!("NonIdentifiable ({})", self.citation),
            (Outcome::OutsideTheory, _) if self.requires_iid_23 => {
                "OutsideTheory (needs ξ2, ξ3 identically distributed)".to_string()
            }
            (Outcome::OutsideTheory, _) => "OutsideTheory (no case applies)".to_string(),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Verdict", 8)?;
        s.serialize_field("field", &self.field)?;
        s.serialize_field("outcome", self.outcome.tag())?;
        s.serialize_field("case", &self.case())?;
        s.serialize_field("counterexample", &self.recipe())?;
        s.serialize_field("partial_xi1_xi4", &self.partial_xi1_xi4)?;
        s.serialize_field("requires_iid", &self.requires_iid_23)?;
        s.serialize_field("citation", self.citation)?;
        s.serialize_field("label", &self.label())?;
        s.end()
    }
}

/// Theorem tables for R and the discrete Q share the equal-ratio branch.
fn classify_rational(field: FieldTag, q: &Quad<BigRational>, iid: bool) -> Verdict {
    let reals = field == FieldTag::Reals;
    let det = &q.a2 * &q.b3 - &q.a3 * &q.b2;
    let cite = |case: CaseLabel| match (reals, case) {
        (true, CaseLabel::I) => "Theorem 2.2, case I",
        (true, CaseLabel::II) => "Theorem 2.2, case II",
        (true, CaseLabel::III) => "Theorem 2.2, case III",
        (false, CaseLabel::I) => "Theorem 4.3, case I",
        (false, CaseLabel::II) => "Theorem 4.3, case II",
        (false, CaseLabel::III) => "Theorem 4.3, case III",
    };
    let full = |case| Verdict::new(field, Outcome::FullUpToShift(case), cite(case));
    let needs_iid = || Verdict::new(field, Outcome::OutsideTheory, "").iid();
    if !det.is_zero() {
        if !reals {
            return full(CaseLabel::I);
        }
        if &q.a2 * &q.b2 == -(&q.a3 * &q.b3) {
            return Verdict::new(field, Outcome::OutsideTheory, "");
        }
        return if iid {
            full(CaseLabel::I).iid()
        } else {
            needs_iid()
        };
    }
    if q.a2 == -q.a3.clone() {
        let citation = if reals { "Remark 2.3" } else { "Remark 4.4" };
        return Verdict::new(field, Outcome::NonIdentifiable(Recipe::Re1), citation)
            .iid()
            .partial(iid);
    }
    let case = if q.a2 == q.a3 {
        CaseLabel::III
    } else {
        CaseLabel::II
    };
    if iid {
        full(case).iid()
    } else {
        needs_iid()
    }
}

/// Applies the theorem table of the quadruple's field.
pub fn classify(quad: &CoefficientQuad, iid_23: bool) -> Result<Verdict, EngineError> {
    quad.validate()?;
    let field = quad.field();
    Ok(match quad {
        CoefficientQuad::Reals(q) | CoefficientQuad::RationalsDiscrete(q) => {
            classify_rational(field, q, iid_23)
        }
        CoefficientQuad::Qp(q) => match classify_qp_quad(&q.a2, &q.a3, &q.b2, &q.b3)? {
            PAdicQuadClass::DetNonzero => Verdict::new(
                field,
                Outcome::FullUpToShift(CaseLabel::I),
                "Theorem 3.2, case I",
            ),
            PAdicQuadClass::EqualRatioDistinctNorms if iid_23 => Verdict::new(
                field,
                Outcome::FullUpToShift(CaseLabel::II),
                "Theorem 3.2, case II",
            )
            .iid(),
            PAdicQuadClass::EqualRatioDistinctNorms => {
                Verdict::new(field, Outcome::PartialXi1Xi4, "Corollary 3.3").iid()
            }
            PAdicQuadClass::EqualRatioEqualNorms => {
                Verdict::new(field, Outcome::NonIdentifiable(Recipe::Pr1), "Prop 3.4").partial(true)
            }
        },
        CoefficientQuad::PrimeField { p, quad: q } => {
            if *p == 2 {
                Verdict::new(field, Outcome::OutsideTheory, "")
            } else if (q.a2 * q.b3 % p) != (q.a3 * q.b2 % p) {
                Verdict::new(
                    field,
                    Outcome::FullUpToShift(CaseLabel::I),
                    "Theorem 4.1, statement 1",
                )
            } else {
                Verdict::new(field, Outcome::NonIdentifiable(Recipe::Pr2), "Prop 4.2").partial(true)
            }
        }
    })
}

/// One input row of the reference classification sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepRow {
    pub id: &'static str,
    pub field: &'static str,
    pub quad: &'static str,
    pub iid: bool,
}

/// Twelve quadruples, one or more per theorem case and counterexample regime.
pub fn classification_sweep() -> [SweepRow; 12] {
    let row = |id, field, quad, iid| SweepRow {
        id,
        field,
        quad,
        iid,
    };
    [
        row("R-I", "R", "1,2,2,1", true),
        row("R-II", "R", "1,2,1,2", true),
        row("R-III", "R", "1,1,2,2", true),
        row("R-IV", "R", "1,-1,1,-1", true),
        row("Qp-I", "Qp:3", "1,2,1,1", false),
        row("Qp-II", "Qp:3", "1,3,1,3", true),
        row("Qp-equal-norms", "Qp:3", "1,2,1,2", true),
        row("Zp-det", "Zp:5", "1,2,2,1", false),
        row("Zp-equal-ratio", "Zp:5", "1,2,2,4", false),
        row("Q-I", "Q", "1,1,1,-1", false),
        row("Q-II", "Q", "2,1,2,1", true),
        row("Q-III", "Q", "3,3,1,1", true),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(field: &str, quad: &str, iid: bool) -> Verdict {
        let field: FieldTag = field.parse().unwrap();
        classify(&CoefficientQuad::parse(field, quad).unwrap(), iid).unwrap()
    }

    #[test]
    fn reals_examples() {
        let v = verdict("R", "1,2,2,1", true);
        assert_eq!(v.outcome, Outcome::FullUpToShift(CaseLabel::I));
        assert_eq!(v.label(), "FullUpToShift (Theorem 2.2, case I)");
        let v = verdict("R", "1,-1,1,-1", true);
        assert_eq!(v.outcome, Outcome::NonIdentifiable(Recipe::Re1));
        assert!(v.partial_xi1_xi4);
        assert!(!verdict("R", "1,-1,1,-1", false).partial_xi1_xi4);
    }

    #[test]
    fn reals_wall_and_missing_iid() {
        // a2b3 − a3b2 = −2, a2b2 = 1 = −a3b3
        let v = verdict("R", "1,1,1,-1", true);
        assert_eq!(v.outcome, Outcome::OutsideTheory);
        assert!(!v.requires_iid_23);
        let v = verdict("R", "1,2,2,1", false);
        assert_eq!(v.outcome, Outcome::OutsideTheory);
        assert!(v.requires_iid_23);
        let v = verdict("Q", "1,1,1,-1", false);
        assert_eq!(v.outcome, Outcome::FullUpToShift(CaseLabel::I));
        assert!(!v.requires_iid_23);
    }

    #[test]
    fn exact_walls_are_not_blurred_by_decimals() {
        // 0.1·0.3 = 0.03 = 0.3·0.1 exactly, though not in binary floating point
        assert_eq!(
            verdict("R", "0.1,0.3,0.1,0.3", true).case(),
            Some(CaseLabel::II)
        );
        assert_eq!(
            verdict("R", "0.1,0.1,0.7,0.7", true).case(),
            Some(CaseLabel::III)
        );
    }

    #[test]
    fn padic_examples() {
        let v = verdict("Qp:3", "1,3,1,3", true);
        assert_eq!(v.label(), "FullUpToShift (Theorem 3.2, case II)");
        let v = verdict("Qp:3", "1,3,1,3", false);
        assert_eq!(v.outcome, Outcome::PartialXi1Xi4);
        assert!(v.requires_iid_23);
        let v = verdict("Qp:5", "1,2,2,4", true);
        assert_eq!(v.outcome, Outcome::NonIdentifiable(Recipe::Pr1));
        let v = verdict("Qp:3", "3^0*(1 2),1,1,1", false);
        assert_eq!(v.case(), Some(CaseLabel::I));
    }

    #[test]
    fn prime_field_examples() {
        let v = verdict("Zp:5", "1,2,2,4", false);
        assert_eq!(v.outcome, Outcome::NonIdentifiable(Recipe::Pr2));
        assert_eq!(v.label(), "Partial ξ1,ξ4 + counterexample (Prop 4.2)");
        assert_eq!(verdict("Zp:5", "1,2,2,1", false).case(), Some(CaseLabel::I));
        assert_eq!(
            verdict("Zp:2", "1,1,1,1", false).outcome,
            Outcome::OutsideTheory
        );
        assert_eq!(
            verdict("Zp:5", "-1,3,4,-2", false).outcome,
            Outcome::NonIdentifiable(Recipe::Pr2)
        );
    }

    #[test]
    fn zero_coefficients_are_rejected() {
        let f = |field: &str, quad: &str| {
            CoefficientQuad::parse(field.parse().unwrap(), quad).unwrap_err()
        };
        assert_eq!(f("R", "1,0,1,1"), EngineError::ZeroCoefficient("a3"));
        assert_eq!(f("Zp:5", "1,2,10,1"), EngineError::ZeroCoefficient("b2"));
        assert_eq!(f("Qp:3", "1,1,1,0"), EngineError::ZeroCoefficient("b3"));
    }

    #[test]
    fn field_tags_round_trip() {
        for s in ["R", "Q", "Qp:3", "Zp:7"] {
            assert_eq!(s.parse::<FieldTag>().unwrap().to_string(), s);
        }
        assert_eq!("Zp:9".parse::<FieldTag>(), Err(EngineError::NotPrime(9)));
        assert!("C".parse::<FieldTag>().is_err());
    }

    #[test]
    fn json_fields() {
        let v = verdict("Zp:5", "1,2,2,4", false);
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["outcome"], "NonIdentifiable");
        assert_eq!(j["counterexample"], "pr2");
        assert_eq!(j["case"], serde_json::Value::Null);
        assert_eq!(j["requires_iid"], false);
        assert_eq!(j["field"], "Zp:5");
    }
}
