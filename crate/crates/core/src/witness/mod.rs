//! Cubic modular witness functions.
//!
//! A witness function modulo `q` is a real, even function on `ℤ_q`
//!
//! ```text
//! g(y) = b0 + Σ_{r ∈ C^(q)} h(r)·e(r·y/q),   h(r) = h(q − r),
//! ```
//!
//! with `g(0) = 1` and `g(y) ≥ 0` for every `y`. Coefficients are stored once per
//! `±`-class `{r, q − r}` under the representative `min(r, q − r)`; the stored
//! value is the per-frequency coefficient `h(r)`, so a paired class contributes
//! `2·h(r)·cos(2πry/q)` and a self-paired class `h(q/2)·(−1)^y`.

mod construct;
mod family;

pub use construct::{
    build_gauss, build_optimal, build_optimal_with_solution, build_power_of_three,
    build_squarefree, build_trivial, constant, descend, lift_prime_power, product,
};
pub use family::{build_family, FamilyBuilder};

use serde::{Deserialize, Serialize};

use crate::arith::cubic_residues;
use crate::error::{Error, Result};
use crate::fourier::synthesize;

/// Default absolute tolerance for nonnegativity and normalization.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Trivial,
    Gauss,
    Optimal,
    Lift,
    Descent,
    Product,
    Family,
}

impl Construction {
    pub fn as_str(self) -> &'static str {
        match self {
            Construction::Trivial => "trivial",
            Construction::Gauss => "gauss",
            Construction::Optimal => "optimal",
            Construction::Lift => "lift",
            Construction::Descent => "descent",
            Construction::Product => "product",
            Construction::Family => "family",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub rep: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessFunction {
    q: u64,
    b0: f64,
    coeffs: Vec<Coefficient>,
    construction: Construction,
}

impl WitnessFunction {
    /// Builds a witness from class coefficients. Representatives must be
    /// canonical (`0 < rep ≤ q − rep`) and strictly increasing.
    pub fn new(
        q: u64,
        b0: f64,
        coeffs: Vec<Coefficient>,
        construction: Construction,
    ) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidModulus(q, 1));
        }
        for c in &coeffs {
            if c.rep == 0 || c.rep > q - c.rep {
                return Err(Error::Inapplicable(format!(
                    "representative {} is not canonical modulo {q}",
                    c.rep
                )));
            }
        }
        if coeffs.windows(2).any(|w| w[0].rep >= w[1].rep) {
            return Err(Error::Inapplicable(
                "representatives must be strictly increasing".into(),
            ));
        }
        Ok(WitnessFunction {
            q,
            b0,
            coeffs,
            construction,
        })
    }

    /// Reads coefficients off a symmetric spectrum of length `q`; index 0 is `b0`.
    pub(crate) fn from_spectrum(spectrum: &[f64], construction: Construction) -> Self {
        let q = spectrum.len() as u64;
        let coeffs = (1..=q / 2)
            .filter(|&r| spectrum[r as usize] != 0.0)
            .map(|r| Coefficient {
                rep: r,
                value: spectrum[r as usize],
            })
            .collect();
        WitnessFunction {
            q,
            b0: spectrum[0],
            coeffs,
            construction,
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn coeffs(&self) -> &[Coefficient] {
        &self.coeffs
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn with_construction(mut self, construction: Construction) -> Self {
        self.construction = construction;
        self
    }

    fn multiplicity(&self, rep: u64) -> f64 {
        if 2 * rep == self.q {
            1.0
        } else {
            2.0
        }
    }

    /// Full per-frequency spectrum, `spectrum[0] = b0`.
    pub fn spectrum(&self) -> Vec<f64> {
        let q = self.q as usize;
        let mut s = vec![0.0; q];
        s[0] = self.b0;
        for c in &self.coeffs {
            s[c.rep as usize] = c.value;
            s[q - c.rep as usize] = c.value;
        }
        s
    }

    /// `g(y)` as a direct cosine sum.
    pub fn evaluate(&self, y: u64) -> Result<f64> {
        if y >= self.q {
            return Err(Error::OutOfRange {
                value: y,
                modulus: self.q,
            });
        }
        let q = self.q as u128;
        let sum: f64 = self
            .coeffs
            .iter()
            .map(|c| {
                let k = (c.rep as u128 * y as u128 % q) as u64;
                let k = k.min(self.q - k);
                let angle = std::f64::consts::TAU * k as f64 / self.q as f64;
                self.multiplicity(c.rep) * c.value * angle.cos()
            })
            .sum();
        Ok(self.b0 + sum)
    }

    /// `g(y)` for every `y ∈ [0, q)`.
    pub fn values(&self) -> Vec<f64> {
        synthesize(&self.spectrum())
    }

    /// `g(0)` computed exactly as the coefficient sum.
    pub fn value_at_zero(&self) -> f64 {
        self.b0
            + self
                .coeffs
                .iter()
                .map(|c| self.multiplicity(c.rep) * c.value)
                .sum::<f64>()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("witness serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: WitnessFunction =
            serde_json::from_str(s).map_err(|e| Error::Inapplicable(e.to_string()))?;
        WitnessFunction::new(raw.q, raw.b0, raw.coeffs, raw.construction)
    }

    /// Shifts and rescales to `(g + δ)/(1 + δ)` so that every evaluated value is
    /// nonnegative. Returns the witness unchanged when it already is.
    pub fn certify(&self) -> Certified {
        let mut min = self.values().into_iter().fold(f64::INFINITY, f64::min);
        if min >= 0.0 {
            return Certified {
                witness: self.clone(),
                shift: 0.0,
                cost: 0.0,
            };
        }
        let scale = self.b0.abs()
            + self
                .coeffs
                .iter()
                .map(|c| self.multiplicity(c.rep) * c.value.abs())
                .sum::<f64>();
        let mut slack = 16.0 * f64::EPSILON * scale.max(1.0);
        loop {
            let shift = -min + slack;
            let norm = 1.0 + shift;
            let witness = WitnessFunction {
                q: self.q,
                b0: (self.b0 + shift) / norm,
                coeffs: self
                    .coeffs
                    .iter()
                    .map(|c| Coefficient {
                        rep: c.rep,
                        value: c.value / norm,
                    })
                    .collect(),
                construction: self.construction,
            };
            let new_min = witness.values().into_iter().fold(f64::INFINITY, f64::min);
            if new_min >= 0.0 {
                return Certified {
                    cost: witness.b0 - self.b0,
                    witness,
                    shift,
                };
            }
            min = min.min(new_min * norm - shift);
            slack *= 2.0;
        }
    }
}

/// Output of [`WitnessFunction::certify`].
#[derive(Debug, Clone)]
pub struct Certified {
    pub witness: WitnessFunction,
    pub shift: f64,
    /// Increase of the constant term.
    pub cost: f64,
}

/// Outcome of checking the witness conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub q: u64,
    pub min_value: f64,
    pub argmin: u64,
    pub normalization_residual: f64,
    /// Representatives carrying a coefficient outside `C^(q)`.
    pub support_violations: Vec<u64>,
    pub tol: f64,
    pub pass: bool,
}

pub fn verify_witness(w: &WitnessFunction, tol: f64) -> WitnessReport {
    let values = w.values();
    let (argmin, min_value) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (y, v)| if v < acc.1 { (y, v) } else { acc });
    let residues = cubic_residues(w.q).expect("q positive");
    let support_violations: Vec<u64> = w
        .coeffs
        .iter()
        .filter(|c| !residues.contains(c.rep))
        .map(|c| c.rep)
        .collect();
    let normalization_residual = (w.value_at_zero() - 1.0).abs();
    let pass = min_value >= -tol && normalization_residual <= tol && support_violations.is_empty();
    WitnessReport {
        q: w.q,
        min_value,
        argmin: argmin as u64,
        normalization_residual,
        support_violations,
        tol,
        pass,
    }
}

/// Largest `|g_small(y) − g_big(y·q/q')|` over `y ∈ [0, q')`.
pub fn self_compatibility_gap(small: &WitnessFunction, big: &WitnessFunction) -> Result<f64> {
    if !big.q.is_multiple_of(small.q) {
        return Err(Error::NotDivisor(small.q, big.q));
    }
    let k = (big.q / small.q) as usize;
    let vs = small.values();
    let vb = big.values();
    Ok(vs
        .iter()
        .enumerate()
        .map(|(y, v)| (v - vb[y * k]).abs())
        .fold(0.0, f64::max))
}

pub fn check_self_compatibility(small: &WitnessFunction, big: &WitnessFunction) -> Result<bool> {
    Ok(self_compatibility_gap(small, big)? <= DEFAULT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bad_witness_13() -> WitnessFunction {
        // b0 = 0.1 below λ(13); the rest of the mass spread evenly over C^(13)
        let v = 0.9 / 4.0;
        WitnessFunction::new(
            13,
            0.1,
            vec![Coefficient { rep: 1, value: v }, Coefficient { rep: 5, value: v }],
            Construction::Optimal,
        )
        .unwrap()
    }

    #[test]
    fn rejects_noncanonical_reps() {
        let c = |rep| vec![Coefficient { rep, value: 0.1 }];
        assert!(WitnessFunction::new(13, 0.5, c(12), Construction::Optimal).is_err());
        assert!(WitnessFunction::new(13, 0.5, c(0), Construction::Optimal).is_err());
        assert!(WitnessFunction::new(0, 0.5, vec![], Construction::Optimal).is_err());
        let unsorted = vec![
            Coefficient { rep: 5, value: 0.1 },
            Coefficient { rep: 1, value: 0.1 },
        ];
        assert!(WitnessFunction::new(13, 0.5, unsorted, Construction::Optimal).is_err());
    }

    #[test]
    fn evaluate_range_checked() {
        let w = bad_witness_13();
        assert_eq!(
            w.evaluate(13),
            Err(Error::OutOfRange {
                value: 13,
                modulus: 13
            })
        );
    }

    #[test]
    fn direct_and_fft_evaluation_agree() {
        let w = bad_witness_13();
        let fast = w.values();
        for y in 0..13 {
            assert!((w.evaluate(y).unwrap() - fast[y as usize]).abs() < 1e-14);
        }
    }

    #[test]
    fn bad_witness_fails_verification() {
        let report = verify_witness(&bad_witness_13(), DEFAULT_TOL);
        assert!(!report.pass);
        assert!(report.min_value < -0.1);
        assert!(report.normalization_residual < 1e-15);
    }

    #[test]
    fn support_violation_reported() {
        // 2 is not a cubic residue mod 13
        let w = WitnessFunction::new(
            13,
            0.5,
            vec![Coefficient { rep: 2, value: 0.25 }],
            Construction::Optimal,
        )
        .unwrap();
        let report = verify_witness(&w, DEFAULT_TOL);
        assert_eq!(report.support_violations, vec![2]);
        assert!(!report.pass);
    }

    #[test]
    fn json_field_order() {
        let w = WitnessFunction::new(
            7,
            0.5,
            vec![Coefficient { rep: 1, value: 0.25 }],
            Construction::Gauss,
        )
        .unwrap();
        assert_eq!(
            w.to_json(),
            r#"{"q":7,"b0":0.5,"coeffs":[{"rep":1,"value":0.25}],"construction":"gauss"}"#
        );
    }

    #[test]
    fn from_json_validates() {
        let bad = r#"{"q":7,"b0":0.5,"coeffs":[{"rep":6,"value":0.25}],"construction":"gauss"}"#;
        assert!(WitnessFunction::from_json(bad).is_err());
        assert!(WitnessFunction::from_json("{}").is_err());
    }

    #[test]
    fn certify_shifts_negative_witness() {
        let w = bad_witness_13();
        let min = verify_witness(&w, DEFAULT_TOL).min_value;
        let c = w.certify();
        assert!(c.witness.values().iter().all(|&v| v >= 0.0));
        assert!((c.shift + min).abs() < 1e-12);
        assert!((c.witness.value_at_zero() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn self_compatibility_requires_divisor() {
        let w = bad_witness_13();
        let c = constant();
        assert!(check_self_compatibility(&w, &c).is_err());
        assert!(check_self_compatibility(&c, &w).is_ok());
    }
}
