use std::collections::HashMap;

use super::construct::{
    build_optimal, build_trivial, constant, lift_prime_power, power_of_three_from_base, product,
};
use super::{Construction, WitnessFunction};
use crate::arith::factorize;
use crate::error::Result;

/// Builds the self-compatible family, caching prime-power components.
///
/// Per prime power: trivial witness and lifting for `p ≡ 2 (mod 3)`, optimal
/// witness and lifting for `p ≡ 1 (mod 3)`, 27-block lifting with descent for
/// `p = 3`. Components are combined by direct product in ascending prime order.
#[derive(Debug, Default)]
pub struct FamilyBuilder {
    bases: HashMap<u64, WitnessFunction>,
    /// Lifting chains `p ↦ [g^(p), g^(p²), …]`.
    chains: HashMap<u64, Vec<WitnessFunction>>,
}

impl FamilyBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn base(&mut self, p: u64) -> Result<WitnessFunction> {
        if let Some(w) = self.bases.get(&p) {
            return Ok(w.clone());
        }
        let w = match p {
            3 => build_optimal(27)?,
            _ if p % 3 == 1 => build_optimal(p)?,
            _ => build_trivial(p)?,
        };
        self.bases.insert(p, w.clone());
        Ok(w)
    }

    /// Family member modulo `p^e`.
    pub fn prime_power(&mut self, p: u64, e: u32) -> Result<WitnessFunction> {
        let base = self.base(p)?;
        if p == 3 {
            return Ok(power_of_three_from_base(&base, e));
        }
        let chain = self.chains.entry(p).or_insert_with(|| vec![base.clone()]);
        while chain.len() < e as usize {
            let m = chain.len() as u32 + 1;
            let next = lift_prime_power(chain.last().expect("nonempty"), &base, p, m)?;
            chain.push(next);
        }
        Ok(chain[e as usize - 1].clone())
    }

    pub fn build(&mut self, q: u64) -> Result<WitnessFunction> {
        let f = factorize(q)?;
        let mut w = constant();
        for &(p, e) in &f.factors {
            let part = self.prime_power(p, e)?;
            w = product(&w, &part)?;
        }
        Ok(w.with_construction(Construction::Family))
    }
}

/// The family member modulo `q`.
pub fn build_family(q: u64) -> Result<WitnessFunction> {
    FamilyBuilder::new().build(q)
}
