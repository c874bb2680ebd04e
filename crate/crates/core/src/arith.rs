//! Modular arithmetic substrate: factorization, CRT, cubic residue sets and
//! their `±`-class and cubic-unit orbit structure.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn cube_mod(j: u64, m: u64) -> u64 {
    mul_mod(mul_mod(j, j, m), j, m)
}

/// Inverse of `a` modulo `m`, if it exists. `m = 1` yields `Some(0)`.
pub fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128 % m as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization `q = Π p^e`, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub q: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    /// The prime-power components `p^e`, in ascending prime order.
    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, e)| p.pow(e))
    }
}

pub fn factorize(q: u64) -> Result<Factorization> {
    if q == 0 {
        return Err(Error::InvalidModulus(q, 1));
    }
    let mut factors = Vec::new();
    let mut n = q;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        factors.push((n, 1));
    }
    Ok(Factorization { q, factors })
}

/// Unique `z mod q1·q2` with `z ≡ r1 (mod q1)` and `z ≡ r2 (mod q2)`.
pub fn crt_compose(q1: u64, q2: u64, r1: u64, r2: u64) -> Result<u64> {
    if q1 == 0 || q2 == 0 {
        return Err(Error::InvalidModulus(0, 1));
    }
    if q1.gcd(&q2) != 1 {
        return Err(Error::NotCoprime(q1, q2));
    }
    let q = q1 * q2;
    // inverse of q2 mod q1 and of q1 mod q2, reduced to [0, modulus)
    let inv2 = inverse_mod(q2 % q1, q1).expect("coprime");
    let inv1 = inverse_mod(q1 % q2, q2).expect("coprime");
    let a = mul_mod(mul_mod(r1 % q1, inv2, q), q2, q);
    let b = mul_mod(mul_mod(r2 % q2, inv1, q), q1, q);
    Ok((a + b) % q)
}

/// The nonzero cubic residues `C^(q)` of `ℤ_q`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSet {
    q: u64,
    residues: Vec<u64>,
}

impl ResidueSet {
    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn contains(&self, r: u64) -> bool {
        self.residues.binary_search(&(r % self.q)).is_ok()
    }

    /// Membership in `C₀^(q) = C^(q) ∪ {0}`.
    pub fn contains_with_zero(&self, r: u64) -> bool {
        r.is_multiple_of(self.q) || self.contains(r)
    }

    /// Sorted elements of `C₀^(q)`.
    pub fn with_zero(&self) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.residues.len() + 1);
        v.push(0);
        v.extend_from_slice(&self.residues);
        v
    }

    /// Membership mask over `[0, q)` for `C^(q)`.
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.q as usize];
        for &r in &self.residues {
            m[r as usize] = true;
        }
        m
    }
}

pub fn cubic_residues(q: u64) -> Result<ResidueSet> {
    if q == 0 {
        return Err(Error::InvalidModulus(q, 1));
    }
    let mut seen = vec![false; q as usize];
    for j in 1..q {
        seen[cube_mod(j, q) as usize] = true;
    }
    if q > 1 {
        seen[0] = false;
    }
    let residues = (1..q).filter(|&r| seen[r as usize]).collect();
    Ok(ResidueSet { q, residues })
}

/// A `±`-class `{r, q − r}` inside `C^(q)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PmClass {
    pub rep: u64,
    pub members: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    pub q: u64,
    pub classes: Vec<PmClass>,
    /// Groups of class indices forming orbits under multiplication by cubic units.
    pub orbits: Option<Vec<Vec<usize>>>,
}

impl ClassPartition {
    /// Index of the class containing `r`, if `r ∈ C^(q)`.
    pub fn class_of(&self, r: u64) -> Option<usize> {
        let r = r % self.q;
        let rep = r.min(self.q - r);
        self.classes.binary_search_by_key(&rep, |c| c.rep).ok()
    }

    pub fn is_transitive(&self) -> bool {
        matches!(&self.orbits, Some(o) if o.len() == 1)
    }
}

pub fn plus_minus_classes(set: &ResidueSet) -> ClassPartition {
    let q = set.q;
    let classes = set
        .residues
        .iter()
        .filter(|&&r| r <= q - r)
        .map(|&r| {
            let members = if 2 * r == q { vec![r] } else { vec![r, q - r] };
            PmClass { rep: r, members }
        })
        .collect();
    ClassPartition {
        q,
        classes,
        orbits: None,
    }
}

/// The multiplicative group `{u³ mod q : gcd(u, q) = 1}`, sorted.
pub fn cubic_units(q: u64) -> Vec<u64> {
    if q == 1 {
        return vec![0];
    }
    let mut seen = vec![false; q as usize];
    for u in (1..q).filter(|u| u.gcd(&q) == 1) {
        seen[cube_mod(u, q) as usize] = true;
    }
    (0..q).filter(|&r| seen[r as usize]).collect()
}

pub fn cubic_unit_orbits(q: u64) -> Result<ClassPartition> {
    if q < 2 {
        return Err(Error::InvalidModulus(q, 2));
    }
    let mut partition = plus_minus_classes(&cubic_residues(q)?);
    let units = cubic_units(q);
    let mut orbit_of = vec![usize::MAX; partition.classes.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..partition.classes.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let r = partition.classes[start].rep;
        let mut members: Vec<usize> = units
            .iter()
            .map(|&u| {
                partition
                    .class_of(mul_mod(r, u, q))
                    .expect("cubic units preserve C^(q)")
            })
            .collect();
        members.sort_unstable();
        members.dedup();
        for &c in &members {
            orbit_of[c] = orbits.len();
        }
        orbits.push(members);
    }
    partition.orbits = Some(orbits);
    Ok(partition)
}

/// One row of the block decomposition `z = t + l·N` of `ℤ_{N·B}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureRow {
    pub z: u64,
    pub t: u64,
    pub l: u64,
    /// Predicted membership of `z` in `C₀` of the full modulus.
    pub predicted: bool,
}

/// Block description of the cubic residues modulo a prime power.
///
/// For `p ≠ 3` the modulus is `p^m` with lower modulus `N = p^(m−1)` and block
/// size `p`. For `p = 3` the modulus is `3^(3m)` with `N = 3^(3(m−1))` and block
/// size 27.
#[derive(Debug, Clone)]
pub struct ResidueStructure {
    pub p: u64,
    pub m: u32,
    pub modulus: u64,
    pub lower_modulus: u64,
    pub block: u64,
    pub rows: Vec<StructureRow>,
}

impl ResidueStructure {
    /// Residues whose predicted membership disagrees with direct enumeration.
    pub fn mismatches(&self) -> Vec<u64> {
        let actual = cubic_residues(self.modulus).expect("modulus positive");
        self.rows
            .iter()
            .filter(|row| row.predicted != actual.contains_with_zero(row.z))
            .map(|row| row.z)
            .collect()
    }
}

pub fn residue_structure(p: u64, m: u32) -> Result<ResidueStructure> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m < 2 {
        return Err(Error::InvalidModulus(m as u64, 2));
    }
    let (lower_modulus, block) = if p == 3 {
        (27u64.pow(m - 1), 27)
    } else {
        (p.pow(m - 1), p)
    };
    let modulus = lower_modulus * block;
    let lower = cubic_residues(lower_modulus)?;
    let base = cubic_residues(block)?;
    let top_block_is_cubic = p == 3 || (m - 1).is_multiple_of(3);
    let mut rows = Vec::with_capacity(modulus as usize);
    for l in 0..block {
        for t in 0..lower_modulus {
            let predicted = if t != 0 {
                lower.contains(t)
            } else if top_block_is_cubic {
                base.contains_with_zero(l)
            } else {
                l == 0
            };
            rows.push(StructureRow {
                z: t + l * lower_modulus,
                t,
                l,
                predicted,
            });
        }
    }
    rows.sort_by_key(|r| r.z);
    Ok(ResidueStructure {
        p,
        m,
        modulus,
        lower_modulus,
        block,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().factors.is_empty());
        assert_eq!(factorize(91).unwrap().factors, vec![(7, 1), (13, 1)]);
        assert_eq!(factorize(2197).unwrap().factors, vec![(13, 3)]);
        assert_eq!(factorize(0), Err(Error::InvalidModulus(0, 1)));
    }

    #[test]
    fn factorization_multiplies_back() {
        for q in 1..5000u64 {
            let f = factorize(q).unwrap();
            let prod: u64 = f.prime_powers().product();
            assert_eq!(prod, q);
            assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.factors.iter().all(|&(p, _)| is_prime(p)));
        }
    }

    #[test]
    fn residue_examples() {
        assert_eq!(cubic_residues(7).unwrap().residues(), &[1, 6]);
        assert_eq!(cubic_residues(13).unwrap().residues(), &[1, 5, 8, 12]);
        assert_eq!(cubic_residues(5).unwrap().residues(), &[1, 2, 3, 4]);
        assert_eq!(
            cubic_residues(27).unwrap().residues(),
            &[1, 8, 10, 17, 19, 26]
        );
        assert!(cubic_residues(1).unwrap().is_empty());
    }

    #[test]
    fn prime_residue_counts() {
        for p in (2..400).filter(|&p| is_prime(p)) {
            let c = cubic_residues(p).unwrap();
            if p % 3 == 1 {
                assert_eq!(c.len() as u64, (p - 1) / 3, "p = {p}");
            } else {
                assert_eq!(c.len() as u64, p - 1, "p = {p}");
            }
        }
    }

    #[test]
    fn residues_symmetric_up_to_3000() {
        for q in 2..=3000u64 {
            let c = cubic_residues(q).unwrap();
            for &r in c.residues() {
                assert!(c.contains(q - r), "q = {q}, r = {r}");
            }
        }
    }

    #[test]
    fn class_examples() {
        let p13 = plus_minus_classes(&cubic_residues(13).unwrap());
        assert_eq!(
            p13.classes,
            vec![
                PmClass { rep: 1, members: vec![1, 12] },
                PmClass { rep: 5, members: vec![5, 8] },
            ]
        );
        let p2 = plus_minus_classes(&cubic_residues(2).unwrap());
        assert_eq!(p2.classes, vec![PmClass { rep: 1, members: vec![1] }]);
        let p27 = plus_minus_classes(&cubic_residues(27).unwrap());
        let reps: Vec<_> = p27.classes.iter().map(|c| c.rep).collect();
        assert_eq!(reps, vec![1, 8, 10]);
        assert_eq!(p27.class_of(19), Some(1));
        assert_eq!(p27.class_of(2), None);
    }

    #[test]
    fn orbit_examples() {
        let o13 = cubic_unit_orbits(13).unwrap();
        assert_eq!(o13.orbits, Some(vec![vec![0, 1]]));
        let o27 = cubic_unit_orbits(27).unwrap();
        assert_eq!(o27.orbits, Some(vec![vec![0, 1, 2]]));
        // all of C^(49) consists of units and is itself the cubic unit group
        let o49 = cubic_unit_orbits(49).unwrap();
        assert_eq!(o49.classes.len(), 7);
        assert_eq!(o49.orbits.as_ref().unwrap().len(), 1);
        assert!(cubic_unit_orbits(1).is_err());
    }

    #[test]
    fn prime_orbits_transitive() {
        for p in (2..500).filter(|&p| is_prime(p)) {
            assert!(cubic_unit_orbits(p).unwrap().is_transitive(), "p = {p}");
        }
    }

    #[test]
    fn cubic_units_preserve_residues() {
        for q in 2..=3000u64 {
            let c = cubic_residues(q).unwrap();
            let units = cubic_units(q);
            // a generator set suffices; check against a handful of units
            for &u in units.iter().take(6) {
                for &r in c.residues() {
                    assert!(c.contains(mul_mod(r, u, q)), "q={q} u={u} r={r}");
                }
            }
        }
    }

    #[test]
    fn orbits_partition_classes() {
        for q in [12u64, 36, 63, 91, 98, 243, 360, 1000] {
            let part = cubic_unit_orbits(q).unwrap();
            let mut all: Vec<usize> = part.orbits.clone().unwrap().concat();
            all.sort_unstable();
            assert_eq!(all, (0..part.classes.len()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn structure_examples() {
        let s = residue_structure(7, 2).unwrap();
        assert!(s.mismatches().is_empty());
        let c49 = cubic_residues(49).unwrap();
        assert_eq!(c49.len(), 14);
        for &r in c49.residues() {
            assert!(r % 7 == 1 || r % 7 == 6);
        }

        let s = residue_structure(2, 4).unwrap();
        assert!(s.mismatches().is_empty());
        let row8 = s.rows.iter().find(|r| r.z == 8).unwrap();
        assert!(row8.predicted);
        assert!(cubic_residues(16).unwrap().contains(8));

        let s = residue_structure(2, 2).unwrap();
        let t0: Vec<_> = s.rows.iter().filter(|r| r.t == 0).map(|r| r.predicted).collect();
        assert_eq!(t0, vec![true, false]);
        assert_eq!(cubic_residues(4).unwrap().residues(), &[1, 3]);
        assert_eq!(residue_structure(4, 2).unwrap_err(), Error::NotPrime(4));
    }

    #[test]
    fn structure_agrees_with_enumeration() {
        for p in (2..=500u64).filter(|&p| is_prime(p) && p != 3) {
            let mut m = 2;
            while p.pow(m) <= 20000 {
                let s = residue_structure(p, m).unwrap();
                assert!(s.mismatches().is_empty(), "p={p} m={m}");
                m += 1;
            }
        }
        for m in 2..=3 {
            assert!(residue_structure(3, m).unwrap().mismatches().is_empty());
        }
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_compose(5, 7, 0, 0), Ok(0));
        assert_eq!(crt_compose(5, 7, 1, 6), Ok(6));
        assert_eq!(crt_compose(7, 13, 1, 1), Ok(1));
        assert_eq!(crt_compose(6, 4, 1, 1), Err(Error::NotCoprime(6, 4)));
        assert_eq!(crt_compose(1, 7, 0, 3), Ok(3));
    }

    #[test]
    fn residues_are_direct_product() {
        for q1 in 2..=100u64 {
            for q2 in 2..=100u64 {
                if q1.gcd(&q2) != 1 {
                    continue;
                }
                let c1 = cubic_residues(q1).unwrap().with_zero();
                let c2 = cubic_residues(q2).unwrap().with_zero();
                let mut composed: Vec<u64> = c1
                    .iter()
                    .flat_map(|&a| c2.iter().map(move |&b| crt_compose(q1, q2, a, b).unwrap()))
                    .collect();
                composed.sort_unstable();
                assert_eq!(composed, cubic_residues(q1 * q2).unwrap().with_zero());
            }
        }
    }
}
