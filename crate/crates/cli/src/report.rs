//! The end-to-end verification run behind `witnesslab verify`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use witnesslab_core::arith::{factorize, is_prime};
use witnesslab_core::extremal::{default_budget, delta_backtrack, delta_exact};
use witnesslab_core::lambda_lp::{
    epsilon_constant, gauss_min_bound, lambda, lambda13_closed_form, lambda_reduced,
};
use witnesslab_core::witness::{
    build_family, build_gauss, build_optimal, build_squarefree, build_trivial,
    self_compatibility_gap, FamilyBuilder, WitnessFunction,
};
use witnesslab_core::Result;

/// Seed of the divisor-pair sample in the self-compatibility claim.
pub const PAIR_SEED: u64 = 0x5EED_2197;
pub const PAIR_COUNT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|measured − bound| ≤ tolerance`.
    Equal,
    /// `measured ≤ bound + tolerance`.
    AtMost,
    /// `measured ≥ bound − tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub claim_id: String,
    pub description: String,
    pub measured: f64,
    pub relation: Relation,
    pub bound: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Claim {
    pub fn new(
        id: &str,
        description: impl Into<String>,
        measured: f64,
        relation: Relation,
        bound: f64,
        tolerance: f64,
    ) -> Self {
        let pass = match relation {
            Relation::Equal => (measured - bound).abs() <= tolerance,
            Relation::AtMost => measured <= bound + tolerance,
            Relation::AtLeast => measured >= bound - tolerance,
        };
        Self {
            claim_id: id.to_string(),
            description: description.into(),
            measured,
            relation,
            bound,
            tolerance,
            pass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub qmax: u64,
    pub claims: Vec<Claim>,
    pub summary: Summary,
    pub pass: bool,
}

impl VerificationReport {
    pub fn from_claims(qmax: u64, claims: Vec<Claim>) -> Self {
        let passed = claims.iter().filter(|c| c.pass).count();
        let summary = Summary {
            total: claims.len(),
            passed,
            failed: claims.len() - passed,
        };
        Self {
            qmax,
            pass: summary.failed == 0,
            claims,
            summary,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn primes_upto(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

fn min_value(w: &WitnessFunction) -> f64 {
    min_of(w.values())
}

/// Runs every claim whose range meets `[2, qmax]`, each sweep capped at its own
/// limit.
pub fn verify(qmax: u64) -> Result<VerificationReport> {
    let mut claims = Vec::new();
    let eps = epsilon_constant();

    let g2 = build_family(2)?.values();
    claims.push(Claim::new(
        "q2-witness",
        "family witness mod 2 takes the values (1, 0)",
        (g2[0] - 1.0).abs().max(g2[1].abs()),
        Relation::Equal,
        0.0,
        1e-12,
    ));

    if qmax >= 13 {
        claims.push(Claim::new(
            "lambda-13",
            "LP value at q = 13 equals 1 − 2/(2 + cos(π/13) + sin(3π/26))",
            lambda(13)?,
            Relation::Equal,
            lambda13_closed_form(),
            1e-6,
        ));
    }

    claims.push(Claim::new(
        "epsilon",
        "ε = −log λ(13) / (3 log 13)",
        eps,
        Relation::Equal,
        0.119540,
        1e-5,
    ));
    if qmax >= 2197 {
        claims.push(Claim::new(
            "epsilon-extremal-2197",
            "family constant term at 2197 equals 2197^(−ε)",
            build_family(2197)?.b0(),
            Relation::Equal,
            2197f64.powf(-eps),
            1e-9,
        ));
    }

    let trivial_primes: Vec<u64> = primes_upto(qmax.min(500))
        .into_iter()
        .filter(|&p| p % 3 != 1)
        .collect();
    if !trivial_primes.is_empty() {
        let devs = trivial_primes
            .par_iter()
            .map(|&p| Ok((lambda(p)? - 1.0 / p as f64).abs()))
            .collect::<Result<Vec<f64>>>()?;
        claims.push(Claim::new(
            "lambda-trivial-primes",
            format!("λ(p) = 1/p for p = 3 and primes p ≡ 2 (mod 3), p ≤ {}", qmax.min(500)),
            max_of(devs),
            Relation::Equal,
            0.0,
            1e-9,
        ));
    }

    recursion_claims(qmax, &mut claims)?;

    for (q1, q2) in [(5u64, 7u64), (7, 13)] {
        if qmax >= q1 * q2 {
            let q = q1 * q2;
            claims.push(Claim::new(
                &format!("multiplicative-{q}"),
                format!("λ({q}) = λ({q1})·λ({q2})"),
                lambda(q)?,
                Relation::Equal,
                lambda(q1)? * lambda(q2)?,
                1e-6,
            ));
        }
    }

    let sf_max = qmax.min(10_000);
    let ratios = (2..=sf_max)
        .into_par_iter()
        .filter_map(|q| {
            let f = factorize(q).ok()?;
            f.is_squarefree().then_some((q, f))
        })
        .map(|(q, f)| {
            let m = f.factors.iter().filter(|(p, _)| p % 3 == 1).count() as i32;
            Ok(build_squarefree(q)?.b0() / (2f64.powi(m) / (q as f64).sqrt()))
        })
        .collect::<Result<Vec<f64>>>()?;
    claims.push(Claim::new(
        "squarefree-bound",
        format!("squarefree q ≤ {sf_max}: b0 ≤ 2^m/√q (ratio shown)"),
        max_of(ratios),
        Relation::AtMost,
        1.0,
        1e-12,
    ));

    witness_claims(qmax, eps, &mut claims)?;
    delta_claims(qmax, &mut claims)?;
    gauss_claims(qmax, &mut claims)?;

    Ok(VerificationReport::from_claims(qmax, claims))
}

fn recursion_claims(qmax: u64, claims: &mut Vec<Claim>) -> Result<()> {
    let cap = qmax.min(2500);
    let mut powers = Vec::new();
    for p in [2u64, 5, 7, 13] {
        let mut m = 2u32;
        while p.pow(m) <= cap {
            powers.push((p, m));
            m += 1;
        }
    }
    if !powers.is_empty() {
        let devs = powers
            .par_iter()
            .map(|&(p, m)| {
                let expected = lambda(p)?.powi(m.div_ceil(3) as i32);
                Ok((lambda(p.pow(m))? - expected).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        claims.push(Claim::new(
            "recursion-prime-powers",
            format!("LP on p^m equals λ(p)^⌊(m+2)/3⌋, p ∈ {{2,5,7,13}}, p^m ≤ {cap}"),
            max_of(devs),
            Relation::Equal,
            0.0,
            1e-6,
        ));
    }
    let exps: Vec<u32> = (1..=3).filter(|&m| 27u64.pow(m) <= qmax).collect();
    if !exps.is_empty() {
        let l27 = lambda(27)?;
        let mut fb = FamilyBuilder::new();
        let mut devs = Vec::new();
        for m in exps {
            devs.push((l27.powi(m as i32) - fb.build(27u64.pow(m))?.b0()).abs());
        }
        claims.push(Claim::new(
            "recursion-3-adic",
            "LP(27)^m equals the family constant term at 3^(3m)",
            max_of(devs),
            Relation::Equal,
            0.0,
            1e-9,
        ));
    }
    Ok(())
}

fn witness_claims(qmax: u64, eps: f64, claims: &mut Vec<Claim>) -> Result<()> {
    let cap = qmax.min(3000);
    let mut fb = FamilyBuilder::new();
    let family: Vec<WitnessFunction> = (1..=cap).map(|q| fb.build(q)).collect::<Result<_>>()?;
    claims.push(Claim::new(
        "family-epsilon-bound",
        format!("family b0 ≤ q^(−ε) for q ≤ {cap} (ratio shown)"),
        max_of(family.iter().map(|w| w.b0() / (w.q() as f64).powf(-eps))),
        Relation::AtMost,
        1.0,
        1e-9,
    ));

    let others = (2..=cap)
        .into_par_iter()
        .map(|q| {
            let mut ws = vec![build_optimal(q)?];
            if factorize(q)?.is_squarefree() {
                ws.push(build_squarefree(q)?);
            }
            if is_prime(q) {
                ws.push(if q % 3 == 1 { build_gauss(q)? } else { build_trivial(q)? });
            }
            Ok(ws)
        })
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<&WitnessFunction> = family.iter().chain(others.iter().flatten()).collect();
    claims.push(Claim::new(
        "nonnegativity",
        format!("every constructed witness for q ≤ {cap} is ≥ −1e−9"),
        min_of(all.par_iter().map(|w| min_value(w)).collect::<Vec<_>>()),
        Relation::AtLeast,
        0.0,
        1e-9,
    ));
    claims.push(Claim::new(
        "certified-nonnegativity",
        "certification repair leaves every witness ≥ 0",
        min_of(all.par_iter().map(|w| min_value(&w.certify().witness)).collect::<Vec<_>>()),
        Relation::AtLeast,
        0.0,
        0.0,
    ));

    let cap = qmax.min(2000);
    let mut rng = ChaCha8Rng::seed_from_u64(PAIR_SEED);
    let mut gap = 0f64;
    for _ in 0..PAIR_COUNT {
        let q = rng.gen_range(1..=cap);
        let divisors: Vec<u64> = (1..=q).filter(|d| q % d == 0).collect();
        let d = *divisors.choose(&mut rng).expect("1 divides q");
        gap = gap.max(self_compatibility_gap(&fb.build(d)?, &fb.build(q)?)?);
    }
    claims.push(Claim::new(
        "self-compatibility",
        format!("{PAIR_COUNT} random pairs q′ | q ≤ {cap}: max |g^(q′)(y) − g^(q)(yq/q′)|"),
        gap,
        Relation::AtMost,
        0.0,
        1e-9,
    ));
    Ok(())
}

fn delta_claims(qmax: u64, claims: &mut Vec<Claim>) -> Result<()> {
    let budget = default_budget();
    let cap = qmax.min(60);
    let mismatches = (1..=cap)
        .into_par_iter()
        .map(|q| Ok(delta_exact(q, budget)?.size != delta_backtrack(q)?))
        .collect::<Result<Vec<bool>>>()?;
    claims.push(Claim::new(
        "delta-oracle",
        format!("exact search agrees with backtracking for q ≤ {cap} (mismatches shown)"),
        mismatches.iter().filter(|&&m| m).count() as f64,
        Relation::Equal,
        0.0,
        0.0,
    ));
    for (q, size) in [(7u64, 3usize), (13, 4)] {
        if qmax >= q {
            claims.push(Claim::new(
                &format!("delta-{q}"),
                format!("largest avoider mod {q} has {size} elements"),
                delta_exact(q, budget)?.size as f64,
                Relation::Equal,
                size as f64,
                0.0,
            ));
        }
    }
    let primes: Vec<u64> = primes_upto(qmax.min(500))
        .into_iter()
        .filter(|&p| p % 3 == 2)
        .collect();
    if !primes.is_empty() {
        let sizes = primes
            .par_iter()
            .map(|&p| Ok(delta_exact(p, budget)?.size as f64))
            .collect::<Result<Vec<f64>>>()?;
        claims.push(Claim::new(
            "delta-trivial-primes",
            "largest avoider mod p ≡ 2 (mod 3) is a singleton (max size shown)",
            max_of(sizes),
            Relation::Equal,
            1.0,
            0.0,
        ));
    }

    let cap = qmax.min(200);
    let rows = (1..=cap)
        .into_par_iter()
        .map(|q| {
            let d = delta_exact(q, budget)?.size as f64;
            let lp = if q == 1 { 1.0 } else { lambda_reduced(q)? };
            let fam = build_family(q)?.b0();
            Ok((d - lp * q as f64, d - fam * q as f64))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    claims.push(Claim::new(
        "bridge-lp",
        format!("|B| − λ·q ≤ 0 for q ≤ {cap} (max shown)"),
        max_of(rows.iter().map(|r| r.0)),
        Relation::AtMost,
        0.0,
        1e-9,
    ));
    claims.push(Claim::new(
        "bridge-family",
        format!("|B| − b0·q ≤ 0 with the family witness for q ≤ {cap} (max shown)"),
        max_of(rows.iter().map(|r| r.1)),
        Relation::AtMost,
        0.0,
        1e-9,
    ));
    Ok(())
}

fn gauss_claims(qmax: u64, claims: &mut Vec<Claim>) -> Result<()> {
    let primes: Vec<u64> = primes_upto(qmax.min(10_000))
        .into_iter()
        .filter(|&s| s % 3 == 1)
        .collect();
    if primes.is_empty() {
        return Ok(());
    }
    let slack = primes
        .par_iter()
        .map(|&s| {
            let f = gauss_min_bound(s)?;
            Ok(f.min_sum - f.bound)
        })
        .collect::<Result<Vec<f64>>>()?;
    claims.push(Claim::new(
        "gauss-floor",
        format!("Σ_j e(j³y/s) ≥ −1 − 2√s for primes s ≡ 1 (mod 3) ≤ {} (min slack shown)", qmax.min(10_000)),
        min_of(slack),
        Relation::AtLeast,
        0.0,
        1e-9,
    ));
    let mid: Vec<u64> = primes.into_iter().filter(|&s| (31..=1000).contains(&s)).collect();
    if !mid.is_empty() {
        let ratios = mid
            .par_iter()
            .map(|&s| Ok(lambda(s)? / (s as f64).powf(-0.36)))
            .collect::<Result<Vec<f64>>>()?;
        claims.push(Claim::new(
            "lambda-0.36",
            format!("λ(s) ≤ s^(−0.36) for primes 31 ≤ s ≤ {}, s ≡ 1 (mod 3) (ratio shown)", qmax.min(1000)),
            max_of(ratios),
            Relation::AtMost,
            1.0,
            1e-12,
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Claim::new("a", "", 1.0, Relation::Equal, 1.0 + 1e-10, 1e-9).pass);
        assert!(!Claim::new("a", "", 2.0, Relation::AtMost, 1.0, 0.5).pass);
        assert!(Claim::new("a", "", 0.0, Relation::AtLeast, 1e-10, 1e-9).pass);
    }

    #[test]
    fn small_run_passes() {
        let r = verify(2).unwrap();
        assert!(r.pass, "{r:#?}");
        assert!(r.claims.iter().any(|c| c.claim_id == "q2-witness"));
        assert!(r.claims.iter().all(|c| c.claim_id != "lambda-13"));
        assert_eq!(r.summary.total, r.claims.len());
    }
}
