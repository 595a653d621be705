//! Benchmark problems: the ZEJD family (augmented ROC space), the ZED family
//! (three-class ROC space) and a synthetic rule-subset classifier problem.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::ObjectiveVector;
use crate::rocch::RocSpace;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("decision variable {index} = {value} is outside [0, 1]")]
    OutOfDomain { index: usize, value: f64 },
    #[error("expected {expected} decision variables, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("mask has {actual} bits but the rule model has {expected} rules")]
    MaskLength { expected: usize, actual: usize },
    #[error("{problem} expects a {expected} genotype")]
    WrongGenotype { problem: String, expected: &'static str },
    #[error("unknown problem `{0}`")]
    Unknown(String),
    #[error("benchmark variant must be 1, 2 or 3, got {0}")]
    Variant(u8),
    #[error("a rule model needs at least one rule")]
    NoRules,
    #[error("rule rates must lie strictly between 0 and 1")]
    RuleRate,
    #[error("{0} has no analytic true front")]
    NoTrueFront(String),
}

// ZEJD2 / ZED2 dent: threshold a and slope lambda.
const ZEJD_DENT_A: f64 = 0.3;
const ZED_DENT_A: f64 = 0.4;
const DENT_LAMBDA: f64 = 0.5;

// ZEJD3 / ZED3 Gaussian bump: amplitude, width and centre.
const BUMP_A: f64 = 0.15;
const ZEJD_BUMP_GAMMA: f64 = 400.0;
const ZEJD_BUMP_CENTRE: f64 = 0.173;
const ZED_BUMP_GAMMA: f64 = 100.0;
const ZED_BUMP_CENTRE: f64 = 0.5;

const RULE_W: (f64, f64) = (0.05, 0.6);
const RULE_V: (f64, f64) = (0.001, 0.05);

fn bump(x: f64, y: f64, gamma: f64, centre: f64) -> f64 {
    BUMP_A * (-gamma * ((x - centre).powi(2) + (y - centre).powi(2))).exp()
}

fn check_unit(x: &[f64]) -> Result<[f64; 3], ProblemError> {
    if x.len() != 3 {
        return Err(ProblemError::Dimension { expected: 3, actual: x.len() });
    }
    for (index, &value) in x.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(ProblemError::OutOfDomain { index, value });
        }
    }
    Ok([x[0], x[1], x[2]])
}

fn check_variant(variant: u8) -> Result<(), ProblemError> {
    if (1..=3).contains(&variant) {
        Ok(())
    } else {
        Err(ProblemError::Variant(variant))
    }
}

/// Spherical terms shared by both families: (cos t1, sin t1 cos t2, sin t1 sin t2) (1 - x3).
fn spherical(x: [f64; 3]) -> [f64; 3] {
    let (s1, c1) = (x[0] * FRAC_PI_2).sin_cos();
    let (s2, c2) = (x[1] * FRAC_PI_2).sin_cos();
    let r = 1.0 - x[2];
    [c1 * r, s1 * c2 * r, s1 * s2 * r]
}

/// Unclamped ZEJD (f1, f2, g).
fn zejd_raw(x: [f64; 3]) -> [f64; 3] {
    spherical(x).map(|t| 1.0 - SQRT_2 * t)
}

fn zejd_dent_depth(variant: u8, raw: [f64; 3]) -> f64 {
    let [f1, f2, g] = raw;
    match variant {
        2 => (ZEJD_DENT_A - f1).min(ZEJD_DENT_A - f2).min(ZEJD_DENT_A - g),
        3 => bump(f1, f2, ZEJD_BUMP_GAMMA, ZEJD_BUMP_CENTRE) - bump(0.0, 0.0, ZEJD_BUMP_GAMMA, ZEJD_BUMP_CENTRE),
        _ => f64::NEG_INFINITY,
    }
}

fn zed_dent_depth(variant: u8, raw: [f64; 3]) -> f64 {
    let [f1, f2, g] = raw;
    match variant {
        2 => (f1 - ZED_DENT_A).min(f2 - ZED_DENT_A).min(g - ZED_DENT_A),
        3 => bump(f1, f2, ZED_BUMP_GAMMA, ZED_BUMP_CENTRE) - bump(0.0, 0.0, ZED_BUMP_GAMMA, ZED_BUMP_CENTRE),
        _ => f64::NEG_INFINITY,
    }
}

/// ZEJD1-3, minimized in augmented ROC space. Each objective is clamped to
/// [0, 1] after the branch tests, which use the raw values.
pub fn eval_zejd(variant: u8, x: &[f64]) -> Result<ObjectiveVector, ProblemError> {
    check_variant(variant)?;
    let [f1, f2, g] = zejd_raw(check_unit(x)?);
    let a = ZEJD_DENT_A;
    let f3 = match variant {
        1 => g,
        2 if f1 < a && f2 < a && g < a => a + DENT_LAMBDA * (g - a),
        2 => g,
        _ => {
            let k = g + bump(f1, f2, ZEJD_BUMP_GAMMA, ZEJD_BUMP_CENTRE)
                - bump(0.0, 0.0, ZEJD_BUMP_GAMMA, ZEJD_BUMP_CENTRE);
            if k > 0.0 {
                k
            } else {
                0.0
            }
        }
    };
    Ok(ObjectiveVector::new(f1, f2, f3).clamp_unit())
}

/// ZED1-3, maximized in three-class ROC space.
pub fn eval_zed(variant: u8, x: &[f64]) -> Result<ObjectiveVector, ProblemError> {
    check_variant(variant)?;
    let [f1, f2, g] = spherical(check_unit(x)?);
    let a = ZED_DENT_A;
    let f3 = match variant {
        1 => g,
        2 if f1 > a && f2 > a && g > a => a + DENT_LAMBDA * (g - a),
        2 => g,
        _ => {
            let k = g - bump(f1, f2, ZED_BUMP_GAMMA, ZED_BUMP_CENTRE) + bump(0.0, 0.0, ZED_BUMP_GAMMA, ZED_BUMP_CENTRE);
            if k > 0.0 {
                k
            } else {
                0.0
            }
        }
    };
    Ok(ObjectiveVector::new(f1, f2, f3))
}

/// Synthetic rule set: rule `i` catches spam with probability `w[i]` and
/// wrongly flags ham with probability `v[i]`, independently of other rules.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleModel {
    seed: Option<u64>,
    w: Vec<f64>,
    v: Vec<f64>,
}

impl RuleModel {
    /// Draws `w_i ~ U[0.05, 0.6]` and `v_i ~ U[0.001, 0.05]` from a ChaCha8 stream.
    pub fn generate(rules: usize, seed: u64) -> Result<Self, ProblemError> {
        if rules == 0 {
            return Err(ProblemError::NoRules);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = Vec::with_capacity(rules);
        let mut v = Vec::with_capacity(rules);
        for _ in 0..rules {
            w.push(rng.gen_range(RULE_W.0..=RULE_W.1));
            v.push(rng.gen_range(RULE_V.0..=RULE_V.1));
        }
        Ok(Self { seed: Some(seed), w, v })
    }

    pub fn from_rates(w: Vec<f64>, v: Vec<f64>) -> Result<Self, ProblemError> {
        if w.is_empty() {
            return Err(ProblemError::NoRules);
        }
        if w.len() != v.len() {
            return Err(ProblemError::MaskLength { expected: w.len(), actual: v.len() });
        }
        if w.iter().chain(&v).any(|r| !(*r > 0.0 && *r < 1.0)) {
            return Err(ProblemError::RuleRate);
        }
        Ok(Self { seed: None, w, v })
    }

    pub fn rule_count(&self) -> usize {
        self.w.len()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn spam_rates(&self) -> &[f64] {
        &self.w
    }

    pub fn ham_rates(&self) -> &[f64] {
        &self.v
    }
}

/// `(fpr, fnr, ccr)` of the filter that uses the rules selected by `mask`.
pub fn eval_rule_subset(model: &RuleModel, mask: &[bool]) -> Result<ObjectiveVector, ProblemError> {
    if mask.len() != model.rule_count() {
        return Err(ProblemError::MaskLength {
            expected: model.rule_count(),
            actual: mask.len(),
        });
    }
    let mut miss = 1.0;
    let mut pass = 1.0;
    let mut used = 0usize;
    for (i, _) in mask.iter().enumerate().filter(|(_, &on)| on) {
        miss *= 1.0 - model.w[i];
        pass *= 1.0 - model.v[i];
        used += 1;
    }
    Ok(ObjectiveVector::new(1.0 - pass, miss, used as f64 / mask.len() as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Genotype {
    Real(Vec<f64>),
    Bits(Vec<bool>),
}

impl Genotype {
    pub fn len(&self) -> usize {
        match self {
            Genotype::Real(x) => x.len(),
            Genotype::Bits(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GenotypeKind {
    Real { dimension: usize, lower: f64, upper: f64 },
    Bits { length: usize },
}

impl GenotypeKind {
    /// Per-variable mutation probability `1/n`.
    pub fn default_mutation_probability(&self) -> f64 {
        match *self {
            GenotypeKind::Real { dimension, .. } => 1.0 / dimension as f64,
            GenotypeKind::Bits { length } => 1.0 / length as f64,
        }
    }

    /// A genotype drawn uniformly from the domain.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Genotype {
        match *self {
            GenotypeKind::Real { dimension, lower, upper } => {
                Genotype::Real((0..dimension).map(|_| rng.gen_range(lower..=upper)).collect())
            }
            GenotypeKind::Bits { length } => Genotype::Bits((0..length).map(|_| rng.gen_bool(0.5)).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Zejd(u8),
    Zed(u8),
    Rules(RuleModel),
}

/// A named optimization problem with its genotype domain and ROC space.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    kind: Kind,
    space: RocSpace,
}

impl Problem {
    pub fn zejd(variant: u8) -> Result<Self, ProblemError> {
        check_variant(variant)?;
        Ok(Self {
            kind: Kind::Zejd(variant),
            space: RocSpace::augmented(),
        })
    }

    pub fn zed(variant: u8) -> Result<Self, ProblemError> {
        check_variant(variant)?;
        Ok(Self {
            kind: Kind::Zed(variant),
            space: RocSpace::three_class(),
        })
    }

    pub fn rules(model: RuleModel) -> Self {
        Self {
            kind: Kind::Rules(model),
            space: RocSpace::augmented(),
        }
    }

    /// The six ZEJD/ZED benchmarks in table order.
    pub fn benchmarks() -> Vec<Problem> {
        (1..=3)
            .map(|v| Problem::zejd(v).expect("valid variant"))
            .chain((1..=3).map(|v| Problem::zed(v).expect("valid variant")))
            .collect()
    }

    pub fn roc_space(&self) -> &RocSpace {
        &self.space
    }

    pub fn genotype_kind(&self) -> GenotypeKind {
        match &self.kind {
            Kind::Zejd(_) | Kind::Zed(_) => GenotypeKind::Real {
                dimension: 3,
                lower: 0.0,
                upper: 1.0,
            },
            Kind::Rules(m) => GenotypeKind::Bits { length: m.rule_count() },
        }
    }

    /// ZEJD/ZED functions have an analytic true front at `x3 = 0`.
    pub fn is_benchmark(&self) -> bool {
        !matches!(self.kind, Kind::Rules(_))
    }

    /// Whether the front has a concave dent that hull selection should skip.
    pub fn has_dent(&self) -> bool {
        matches!(self.kind, Kind::Zejd(2 | 3) | Kind::Zed(2 | 3))
    }

    pub fn evaluate(&self, genotype: &Genotype) -> Result<ObjectiveVector, ProblemError> {
        match (&self.kind, genotype) {
            (Kind::Zejd(v), Genotype::Real(x)) => eval_zejd(*v, x),
            (Kind::Zed(v), Genotype::Real(x)) => eval_zed(*v, x),
            (Kind::Rules(m), Genotype::Bits(mask)) => eval_rule_subset(m, mask),
            (Kind::Rules(_), _) => Err(self.wrong_genotype("bit-mask")),
            _ => Err(self.wrong_genotype("real-vector")),
        }
    }

    /// Whether `genotype` evaluates strictly inside the dent, at least
    /// `margin` away from its boundary in the branch quantities (raw `f1`,
    /// `f2`, `g` for the threshold dents, bump height for the Gaussian ones).
    pub fn in_dent(&self, genotype: &Genotype, margin: f64) -> Result<bool, ProblemError> {
        let x = match genotype {
            Genotype::Real(x) => x,
            Genotype::Bits(_) => return Ok(false),
        };
        let depth = match self.kind {
            Kind::Zejd(v) => zejd_dent_depth(v, zejd_raw(check_unit(x)?)),
            Kind::Zed(v) => zed_dent_depth(v, spherical(check_unit(x)?)),
            Kind::Rules(_) => return Ok(false),
        };
        Ok(depth > margin)
    }

    fn wrong_genotype(&self, expected: &'static str) -> ProblemError {
        ProblemError::WrongGenotype {
            problem: self.to_string(),
            expected,
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Zejd(v) => write!(f, "zejd{v}"),
            Kind::Zed(v) => write!(f, "zed{v}"),
            Kind::Rules(m) => match m.seed {
                Some(seed) => write!(f, "rules({},{seed})", m.rule_count()),
                None => write!(f, "rules({})", m.rule_count()),
            },
        }
    }
}

impl FromStr for Problem {
    type Err = ProblemError;

    /// Accepts `zejd1`-`zejd3`, `zed1`-`zed3` and `rules(n,seed)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let name: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        let unknown = || ProblemError::Unknown(s.to_string());
        if let Some(args) = name.strip_prefix("rules(").and_then(|r| r.strip_suffix(')')) {
            let (n, seed) = args.split_once(',').ok_or_else(unknown)?;
            let n: usize = n.parse().map_err(|_| unknown())?;
            let seed: u64 = seed.parse().map_err(|_| unknown())?;
            return Ok(Problem::rules(RuleModel::generate(n, seed)?));
        }
        let (family, variant) = if let Some(v) = name.strip_prefix("zejd") {
            ("zejd", v)
        } else if let Some(v) = name.strip_prefix("zed") {
            ("zed", v)
        } else {
            return Err(unknown());
        };
        let variant: u8 = variant.parse().map_err(|_| unknown())?;
        if !(1..=3).contains(&variant) {
            return Err(unknown());
        }
        match family {
            "zejd" => Problem::zejd(variant),
            _ => Problem::zed(variant),
        }
    }
}

/// `count` objective vectors on the `x3 = 0` surface, with `(x1, x2)` drawn
/// uniformly from a ChaCha8 stream seeded with `seed`.
pub fn sample_true_front(problem: &Problem, count: usize, seed: u64) -> Result<Vec<ObjectiveVector>, ProblemError> {
    if !problem.is_benchmark() {
        return Err(ProblemError::NoTrueFront(problem.to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let x = vec![rng.gen::<f64>(), rng.gen::<f64>(), 0.0];
            problem.evaluate(&Genotype::Real(x))
        })
        .collect()
}
