//! Real-coded and binary variation operators.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::EvolveError;
use crate::problems::{Genotype, GenotypeKind};

// parents closer than this are treated as identical by SBX
const SBX_EPS: f64 = 1e-14;

/// Variation parameters shared by all algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    pub eta_c: f64,
    pub eta_m: f64,
}

impl OperatorParams {
    /// `p_c = 0.9`, `p_m = 1/n`, `eta_c = eta_m = 20`.
    pub fn for_genotype(kind: &GenotypeKind) -> Self {
        Self {
            crossover_probability: 0.9,
            mutation_probability: kind.default_mutation_probability(),
            eta_c: 20.0,
            eta_m: 20.0,
        }
    }

    pub fn validate(&self) -> Result<(), EvolveError> {
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        if !unit(self.crossover_probability) || !unit(self.mutation_probability) {
            return Err(EvolveError::Config("operator probabilities must lie in [0, 1]".into()));
        }
        if !(self.eta_c > 0.0 && self.eta_m > 0.0 && self.eta_c.is_finite() && self.eta_m.is_finite()) {
            return Err(EvolveError::Config("distribution indices must be positive".into()));
        }
        Ok(())
    }
}

fn sbx_beta_q(rand: f64, beta: f64, eta: f64) -> f64 {
    let alpha = 2.0 - beta.powf(-(eta + 1.0));
    if rand <= 1.0 / alpha {
        (rand * alpha).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 - rand * alpha)).powf(1.0 / (eta + 1.0))
    }
}

/// Bounded simulated binary crossover; with probability `p_c` each variable
/// is recombined with probability 1/2.
pub fn sbx_crossover<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    bounds: (f64, f64),
    params: &OperatorParams,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.gen::<f64>() > params.crossover_probability {
        return (c1, c2);
    }
    let (lo, hi) = bounds;
    let eta = params.eta_c;
    for i in 0..p1.len().min(p2.len()) {
        if rng.gen::<f64>() > 0.5 || (p1[i] - p2[i]).abs() <= SBX_EPS {
            continue;
        }
        let (y1, y2) = if p1[i] < p2[i] { (p1[i], p2[i]) } else { (p2[i], p1[i]) };
        let u = rng.gen::<f64>();
        let bq = sbx_beta_q(u, 1.0 + 2.0 * (y1 - lo) / (y2 - y1), eta);
        let a = (0.5 * ((y1 + y2) - bq * (y2 - y1))).clamp(lo, hi);
        let bq = sbx_beta_q(u, 1.0 + 2.0 * (hi - y2) / (y2 - y1), eta);
        let b = (0.5 * ((y1 + y2) + bq * (y2 - y1))).clamp(lo, hi);
        if rng.gen::<f64>() <= 0.5 {
            c1[i] = b;
            c2[i] = a;
        } else {
            c1[i] = a;
            c2[i] = b;
        }
    }
    (c1, c2)
}

/// Bounded polynomial mutation applied to each variable with probability `p_m`.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    x: &[f64],
    bounds: (f64, f64),
    params: &OperatorParams,
    rng: &mut R,
) -> Vec<f64> {
    let (lo, hi) = bounds;
    let eta = params.eta_m;
    let pow = 1.0 / (eta + 1.0);
    x.iter()
        .map(|&y| {
            if rng.gen::<f64>() >= params.mutation_probability || hi <= lo {
                return y;
            }
            let d1 = (y - lo) / (hi - lo);
            let d2 = (hi - y) / (hi - lo);
            let r = rng.gen::<f64>();
            let dq = if r <= 0.5 {
                let v = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - d1).powf(eta + 1.0);
                v.powf(pow) - 1.0
            } else {
                let v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * (1.0 - d2).powf(eta + 1.0);
                1.0 - v.powf(pow)
            };
            (y + dq * (hi - lo)).clamp(lo, hi)
        })
        .collect()
}

/// Children `m1[..k] ++ m2[k..]` and `m2[..k] ++ m1[k..]`.
pub fn single_point_crossover(m1: &[bool], m2: &[bool], k: usize) -> (Vec<bool>, Vec<bool>) {
    let k = k.min(m1.len()).min(m2.len());
    let c1 = m1[..k].iter().chain(&m2[k..]).copied().collect();
    let c2 = m2[..k].iter().chain(&m1[k..]).copied().collect();
    (c1, c2)
}

/// Single-point crossover with probability `p_c`, then independent bit flips
/// with probability `p_m`.
pub fn bit_variation<R: Rng + ?Sized>(
    m1: &[bool],
    m2: &[bool],
    params: &OperatorParams,
    rng: &mut R,
) -> (Vec<bool>, Vec<bool>) {
    let n = m1.len();
    let (mut c1, mut c2) = if n > 1 && rng.gen::<f64>() < params.crossover_probability {
        single_point_crossover(m1, m2, rng.gen_range(1..n))
    } else {
        (m1.to_vec(), m2.to_vec())
    };
    for bit in c1.iter_mut().chain(c2.iter_mut()) {
        if rng.gen::<f64>() < params.mutation_probability {
            *bit = !*bit;
        }
    }
    (c1, c2)
}

/// Two mutated children of `a` and `b`.
pub(crate) fn offspring<R: Rng + ?Sized>(
    kind: &GenotypeKind,
    a: &Genotype,
    b: &Genotype,
    params: &OperatorParams,
    rng: &mut R,
) -> (Genotype, Genotype) {
    match (kind, a, b) {
        (GenotypeKind::Real { lower, upper, .. }, Genotype::Real(x), Genotype::Real(y)) => {
            let bounds = (*lower, *upper);
            let (c1, c2) = sbx_crossover(x, y, bounds, params, rng);
            let c1 = polynomial_mutation(&c1, bounds, params, rng);
            let c2 = polynomial_mutation(&c2, bounds, params, rng);
            (Genotype::Real(c1), Genotype::Real(c2))
        }
        (_, Genotype::Bits(x), Genotype::Bits(y)) => {
            let (c1, c2) = bit_variation(x, y, params, rng);
            (Genotype::Bits(c1), Genotype::Bits(c2))
        }
        _ => panic!("parent genotypes do not match the problem"),
    }
}
