//! Extremal avoider sets: the largest `B ⊆ ℤ_q` with `(B − B) ∩ C^(q) = ∅`.
//!
//! `B` is an independent set of the circulant Cayley graph with connection set
//! `C^(q)`. Exact search is a bitset branch-and-bound for a maximum clique in
//! the compatibility graph, bounded by greedy coloring, with `0 ∈ B` fixed by
//! translation invariance and root branches pruned by multiplier symmetries.
//! Prime-power components whose residues are periodic are first collapsed to a
//! smaller circulant with the same maximum avoiders.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::arith::{crt_compose, cubic_residues, factorize, is_prime, mul_mod, ResidueSet};
use crate::error::{Error, Result};
use crate::lambda_lp::lambda;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Slack in `|B| ≤ b0·q`.
pub const BRIDGE_TOL: f64 = 1e-9;

/// Node budget from `WITNESSLAB_BUDGET`, falling back to [`DEFAULT_BUDGET`].
pub fn default_budget() -> u64 {
    std::env::var("WITNESSLAB_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Circulant graph on `ℤ_q` with `x ~ y` iff `x − y ∈ C^(q)`.
#[derive(Debug, Clone)]
pub struct CayleyGraph {
    connection: ResidueSet,
    mask: Vec<bool>,
}

impl CayleyGraph {
    pub fn new(q: u64) -> Result<Self> {
        let connection = cubic_residues(q)?;
        let mask = connection.mask();
        Ok(Self { connection, mask })
    }

    pub fn q(&self) -> u64 {
        self.connection.modulus()
    }

    pub fn connection(&self) -> &ResidueSet {
        &self.connection
    }

    pub fn degree(&self) -> usize {
        self.connection.len()
    }

    pub fn adjacent(&self, x: u64, y: u64) -> bool {
        let q = self.q();
        self.mask[((x % q + q - y % q) % q) as usize]
    }

    pub fn neighbors(&self, x: u64) -> Vec<u64> {
        let q = self.q();
        let mut v: Vec<u64> = self.connection.residues().iter().map(|&c| (x + c) % q).collect();
        v.sort_unstable();
        v
    }

    /// No two elements of `set` are adjacent.
    pub fn is_independent(&self, set: &[u64]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &a)| set[i + 1..].iter().all(|&b| !self.adjacent(a, b)))
    }

    /// Every pair of distinct elements of `set` is adjacent.
    pub fn is_clique(&self, set: &[u64]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &a)| set[i + 1..].iter().all(|&b| self.adjacent(a, b)))
    }
}

/// `true` iff `set` is a set of distinct residues whose differences avoid `C^(q)`.
pub fn is_avoider(q: u64, set: &[u64]) -> Result<bool> {
    let g = CayleyGraph::new(q)?;
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != set.len() || sorted.iter().any(|&x| x >= q) {
        return Ok(false);
    }
    Ok(g.is_independent(set))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaResult {
    pub q: u64,
    pub size: usize,
    #[serde(rename = "set")]
    pub witness_set: Vec<u64>,
    pub exact: bool,
    #[serde(rename = "nodes")]
    pub nodes_explored: u64,
}

impl DeltaResult {
    /// Validates the avoider property before building the result.
    pub fn new(q: u64, mut set: Vec<u64>, exact: bool, nodes_explored: u64) -> Result<Self> {
        set.sort_unstable();
        if !is_avoider(q, &set)? {
            return Err(Error::Verification {
                q,
                reason: format!("{set:?} has a difference in C^({q})"),
            });
        }
        Ok(Self {
            q,
            size: set.len(),
            witness_set: set,
            exact,
            nodes_explored,
        })
    }

    /// `|B|/q`.
    pub fn density(&self) -> f64 {
        self.size as f64 / self.q as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

/// Maximum clique over local vertices `0..n` with `compat[v]` the neighbours of
/// `v`. Vertices are pre-ordered by the caller.
struct CliqueSearch<'a> {
    compat: &'a [FixedBitSet],
    /// Multiplier orbit of each vertex, pruned together at the root.
    orbits: &'a [Vec<usize>],
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl<'a> CliqueSearch<'a> {
    fn new(compat: &'a [FixedBitSet], orbits: &'a [Vec<usize>], budget: u64) -> Self {
        let mut s = Self {
            compat,
            orbits,
            best: Vec::new(),
            current: Vec::new(),
            nodes: 0,
            budget,
            aborted: false,
        };
        s.best = s.greedy();
        s
    }

    fn greedy(&self) -> Vec<usize> {
        let mut chosen: Vec<usize> = Vec::new();
        for v in 0..self.compat.len() {
            if chosen.iter().all(|&u| self.compat[u].contains(v)) {
                chosen.push(v);
            }
        }
        chosen
    }

    /// Greedy coloring in vertex order; color classes are pairwise non-adjacent.
    fn color(&self, p: &FixedBitSet) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(p.count_ones(..));
        let mut colors = Vec::with_capacity(order.capacity());
        let mut uncolored = p.clone();
        let mut k = 0;
        while !uncolored.is_clear() {
            k += 1;
            let mut open = uncolored.clone();
            while let Some(v) = open.ones().next() {
                uncolored.set(v, false);
                open.set(v, false);
                open.difference_with(&self.compat[v]);
                order.push(v);
                colors.push(k);
            }
        }
        (order, colors)
    }

    fn expand(&mut self, mut p: FixedBitSet) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        let (order, colors) = self.color(&p);
        for i in (0..order.len()).rev() {
            if self.current.len() + colors[i] <= self.best.len() {
                return;
            }
            let v = order[i];
            if !p.contains(v) {
                continue;
            }
            self.current.push(v);
            let mut next = p.clone();
            next.intersect_with(&self.compat[v]);
            if next.is_clear() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            if self.aborted {
                return;
            }
            p.set(v, false);
            if self.current.is_empty() {
                for &w in &self.orbits[v] {
                    p.set(w, false);
                }
            }
        }
    }

    fn run(mut self) -> (Vec<usize>, u64, bool) {
        let n = self.compat.len();
        if n > 0 {
            let mut all = FixedBitSet::with_capacity(n);
            all.insert_range(..);
            self.expand(all);
        }
        (self.best, self.nodes, !self.aborted)
    }
}

/// Units `u` of `ℤ_q` with `u·S = S` for the connection set `S` given by `mask`.
fn multipliers(q: u64, mask: &[bool]) -> Vec<u64> {
    let support: Vec<u64> = (0..q).filter(|&d| mask[d as usize]).collect();
    (1..q.max(2))
        .filter(|&u| num_integer::gcd(u, q) == 1)
        .filter(|&u| support.iter().all(|&c| mask[mul_mod(u, c, q) as usize]))
        .collect()
}

/// Largest `S ⊆ vertices` with `related(a, b)` for all distinct pairs, plus 0.
/// Vertices are ordered by descending residual degree, ties by label.
///
/// `vertices` and `related` must be invariant under multiplication by each of
/// `units`, which fix 0: once every set through `{0, v}` is explored, the sets
/// through `{0, u·v}` are images of those.
fn max_set_through_zero(
    q: u64,
    units: &[u64],
    vertices: Vec<u64>,
    related: impl Fn(u64, u64) -> bool,
    budget: u64,
) -> (Vec<u64>, u64, bool) {
    let n = vertices.len();
    let mut degree = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if related(vertices[i], vertices[j]) {
                degree[i] += 1;
                degree[j] += 1;
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| degree[b].cmp(&degree[a]).then(vertices[a].cmp(&vertices[b])));
    let ordered: Vec<u64> = idx.iter().map(|&i| vertices[i]).collect();
    let mut compat = vec![FixedBitSet::with_capacity(n); n];
    for i in 0..n {
        for j in i + 1..n {
            if related(ordered[i], ordered[j]) {
                compat[i].insert(j);
                compat[j].insert(i);
            }
        }
    }
    let mut local = vec![usize::MAX; q as usize];
    for (i, &v) in ordered.iter().enumerate() {
        local[v as usize] = i;
    }
    let orbits: Vec<Vec<usize>> = ordered
        .iter()
        .map(|&v| {
            units
                .iter()
                .map(|&u| local[mul_mod(u, v, q) as usize])
                .filter(|&w| w != usize::MAX)
                .collect()
        })
        .collect();
    let (best, nodes, exact) = CliqueSearch::new(&compat, &orbits, budget).run();
    let mut set: Vec<u64> = std::iter::once(0).chain(best.iter().map(|&i| ordered[i])).collect();
    set.sort_unstable();
    (set, nodes, exact)
}

/// Circulant quotient carrying the same avoider problem.
///
/// If the residues `C^(p^k)` of a prime-power component are periodic modulo
/// `p^j` and contain no multiple of `p^j`, that component is a blow-up of its
/// image mod `p^j` by independent sets of size `p^(k−j)`. Blow-ups commute
/// with the direct product over the components, so maximum avoiders mod `q`
/// are exactly the preimages of maximum avoiders of the quotient.
struct Quotient {
    modulus: u64,
    /// Connection set of the quotient circulant, `0` excluded.
    mask: Vec<bool>,
}

fn reduce(q: u64) -> Result<Quotient> {
    let mut parts: Vec<(u64, Vec<bool>)> = Vec::new();
    for (p, k) in factorize(q)?.factors {
        let pk = p.pow(k);
        let c = cubic_residues(pk)?.mask();
        let mut step = p;
        let period = loop {
            let periodic = (0..pk).all(|d| c[d as usize] == c[((d + step) % pk) as usize]);
            let avoids = (0..pk).step_by(step as usize).all(|d| !c[d as usize]);
            if periodic && avoids {
                break step;
            }
            step *= p;
        };
        let mut image = vec![false; period as usize];
        image[0] = true;
        for d in 1..pk {
            if c[d as usize] {
                image[(d % period) as usize] = true;
            }
        }
        parts.push((period, image));
    }
    let modulus = parts.iter().map(|(m, _)| m).product::<u64>();
    let mask = (0..modulus)
        .map(|d| d != 0 && parts.iter().all(|(m, img)| img[(d % m) as usize]))
        .collect();
    Ok(Quotient { modulus, mask })
}

/// `δ(C₀^(q))·q` by exhaustive search, within `node_budget` nodes.
pub fn delta_exact(q: u64, node_budget: u64) -> Result<DeltaResult> {
    let quotient = reduce(q)?;
    let (m, mask) = (quotient.modulus, &quotient.mask);
    let adjacent = |a: u64, b: u64| mask[((a + m - b) % m) as usize];
    let candidates: Vec<u64> = (1..m).filter(|&y| !mask[y as usize]).collect();
    let units = multipliers(m, mask);
    let (base, nodes, exact) =
        max_set_through_zero(m, &units, candidates, |a, b| !adjacent(a, b), node_budget);
    let set: Vec<u64> = (0..q / m)
        .flat_map(|t| base.iter().map(move |&b| b + t * m))
        .collect();
    let g = CayleyGraph::new(q)?;
    DeltaResult::new(q, canonical_image(q, &set, &multipliers(q, &g.mask)), exact, nodes)
}

/// Lexicographically least sorted image of `set` under `x ↦ u·(x − b)` with
/// `b ∈ set` and `u` among `units`; translations only for large inputs.
fn canonical_image(q: u64, set: &[u64], units: &[u64]) -> Vec<u64> {
    const WORK_CAP: usize = 20_000_000;
    let units = if set.len() * set.len() * units.len() > WORK_CAP { &[1][..] } else { units };
    let mut best: Option<Vec<u64>> = None;
    for &b in set {
        for &u in units {
            let mut image: Vec<u64> = set.iter().map(|&x| mul_mod(u, (x + q - b) % q, q)).collect();
            image.sort_unstable();
            if best.as_ref().is_none_or(|cur| image < *cur) {
                best = Some(image);
            }
        }
    }
    best.unwrap_or_default()
}

/// `δ(C₀^(q))·q` by plain backtracking over 64-bit vertex masks, `q ≤ 64`.
///
/// Reference enumeration with no bound beyond the remaining-candidate count.
pub fn delta_backtrack(q: u64) -> Result<usize> {
    if q == 0 || q > 64 {
        return Err(Error::Inapplicable(format!("backtracking needs 1 ≤ q ≤ 64, got {q}")));
    }
    let g = CayleyGraph::new(q)?;
    let n = q as usize;
    let compat: Vec<u64> = (0..n)
        .map(|v| {
            (0..n)
                .filter(|&u| u != v && !g.adjacent(u as u64, v as u64))
                .fold(0u64, |m, u| m | 1 << u)
        })
        .collect();
    fn go(compat: &[u64], candidates: u64, size: usize, best: &mut usize) {
        if candidates == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + candidates.count_ones() as usize <= *best {
            return;
        }
        let v = candidates.trailing_zeros() as usize;
        let rest = candidates & !(1 << v);
        go(compat, rest & compat[v], size + 1, best);
        go(compat, rest, size, best);
    }
    let mut best = 1;
    go(&compat, compat[0], 1, &mut best);
    Ok(best)
}

/// Insertion order for [`delta_greedy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GreedyOrder {
    /// `0, 1, …, q − 1`.
    Natural,
    /// `0, k, 2k, …` for a unit `k`.
    Stride(u64),
    /// An explicit permutation of `ℤ_q`.
    Custom(Vec<u64>),
}

/// Maximal avoider by greedy insertion; never certified maximum.
pub fn delta_greedy(q: u64, order: &GreedyOrder) -> Result<DeltaResult> {
    let g = CayleyGraph::new(q)?;
    let seq: Vec<u64> = match order {
        GreedyOrder::Natural => (0..q).collect(),
        GreedyOrder::Stride(k) => {
            if num_integer::gcd(*k, q) != 1 {
                return Err(Error::NotCoprime(*k, q));
            }
            (0..q).map(|i| (i as u128 * *k as u128 % q as u128) as u64).collect()
        }
        GreedyOrder::Custom(v) => {
            let mut seen = vec![false; q as usize];
            for &x in v {
                if x >= q {
                    return Err(Error::OutOfRange { value: x, modulus: q });
                }
                if std::mem::replace(&mut seen[x as usize], true) {
                    return Err(Error::Inapplicable(format!("{x} repeated in order")));
                }
            }
            if v.len() as u64 != q {
                return Err(Error::Inapplicable(format!("order has {} of {q} elements", v.len())));
            }
            v.clone()
        }
    };
    let mut chosen: Vec<u64> = Vec::new();
    for y in seq {
        if chosen.iter().all(|&b| !g.adjacent(b, y)) {
            chosen.push(y);
        }
    }
    DeltaResult::new(q, chosen, false, 0)
}

/// CRT image of `B1 × B2`, an avoider modulo `q1·q2`.
pub fn product_avoider(b1: &DeltaResult, b2: &DeltaResult) -> Result<DeltaResult> {
    let (q1, q2) = (b1.q, b2.q);
    if num_integer::gcd(q1, q2) != 1 {
        return Err(Error::NotCoprime(q1, q2));
    }
    let mut set = Vec::with_capacity(b1.size * b2.size);
    for &x in &b1.witness_set {
        for &y in &b2.witness_set {
            set.push(crt_compose(q1, q2, x, y)?);
        }
    }
    DeltaResult::new(q1 * q2, set, false, 0)
}

/// A set `B′` with `B′ − B′ ⊆ C₀^(q)` and the avoider `t·B′` it induces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainedDifference {
    pub q: u64,
    pub inner: Vec<u64>,
    /// Smallest cubic non-residue.
    pub multiplier: u64,
    pub avoider: DeltaResult,
    /// `⌊log₄ q⌋`.
    pub target: u64,
    pub meets_target: bool,
}

/// Clique search for `B′ ∋ 0` in the Cayley graph, then `B = t·B′`.
pub fn contained_difference_search(q: u64, budget: u64) -> Result<ContainedDifference> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if q % 3 != 1 {
        return Err(Error::Inapplicable(format!("{q} is not ≡ 1 mod 3")));
    }
    let g = CayleyGraph::new(q)?;
    let candidates = g.connection().residues().to_vec();
    let units = multipliers(q, &g.mask);
    let (inner, nodes, exact) =
        max_set_through_zero(q, &units, candidates, |a, b| g.adjacent(a, b), budget);
    debug_assert!(g.is_clique(&inner));
    let t = (2..q)
        .find(|&t| !g.connection().contains(t))
        .expect("cubic residues are a proper subgroup");
    let image = inner.iter().map(|&b| b * t % q).collect();
    let avoider = DeltaResult::new(q, image, exact, nodes)?;
    let target = log4_floor(q);
    Ok(ContainedDifference {
        q,
        inner,
        multiplier: t,
        meets_target: avoider.size as u64 >= target,
        avoider,
        target,
    })
}

fn log4_floor(q: u64) -> u64 {
    let mut k = 0;
    let mut v = q;
    while v >= 4 {
        v /= 4;
        k += 1;
    }
    k
}

/// `|B| ≤ b0·q` for the exact `δ` and a witness constant term `b0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeCheck {
    pub q: u64,
    pub delta_size: usize,
    pub b0: f64,
    pub bound: f64,
    /// Search completed; otherwise `delta_size` is only a lower bound.
    pub exact: bool,
    pub ok: bool,
}

/// Bridge check against the LP value `λ(C₀^(q))`.
pub fn check_delta_le_lambda(q: u64) -> Result<BridgeCheck> {
    check_delta_le_b0(q, lambda(q)?)
}

/// Bridge check against the constant term of any witness modulo `q`.
pub fn check_delta_le_b0(q: u64, b0: f64) -> Result<BridgeCheck> {
    let d = delta_exact(q, default_budget())?;
    let bound = b0 * q as f64;
    Ok(BridgeCheck {
        q,
        delta_size: d.size,
        b0,
        bound,
        exact: d.exact,
        ok: d.size as f64 <= bound + BRIDGE_TOL,
    })
}
