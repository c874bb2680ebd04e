//! The minimal constant term `λ(C₀^(q))` as a linear program over `±`-class
//! coefficients, with the closed forms that short-cut it.
//!
//! The LP is
//!
//! ```text
//! minimize b0  subject to  b0 + Σ_c x_c·T_c(0) = 1,
//!                          b0 + Σ_c x_c·T_c(y) ≥ 0   (y = 1, …, q−1),
//! ```
//!
//! with `T_c(y) = Σ_{r ∈ c} cos(2πry/q)` and all variables free. It is solved
//! through its dual, which has one equality per variable and a nonnegative
//! weight per constraint row; the simplex multipliers of the dual are the
//! witness coefficients.

pub mod simplex;

use serde::{Deserialize, Serialize};

use crate::arith::{cubic_residues, cubic_unit_orbits, cubic_units, is_prime, mul_mod, plus_minus_classes};
use crate::error::{Error, Result};
use crate::fourier::{cos_table, synthesize};
use crate::witness::{Coefficient, Construction, WitnessFunction};
use simplex::{StandardLp, SimplexResult};

/// Threshold below which `g(y)` counts as a binding constraint.
pub const BINDING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub y: u64,
    /// `(1, T_1(y), …, T_k(y))`.
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub q: u64,
    /// `±`-class representatives of `C^(q)`, ascending.
    pub class_reps: Vec<u64>,
    /// For each LP variable after `b0`, the indices of the classes it covers.
    pub columns: Vec<Vec<usize>>,
    pub rows: Vec<LpRow>,
    /// Whether columns are cubic-unit orbits and rows are orbit representatives.
    pub reduced: bool,
}

impl LpProblem {
    pub fn variable_count(&self) -> usize {
        self.columns.len() + 1
    }

    pub fn constraint_count(&self) -> usize {
        self.rows.len()
    }
}

fn row_for(y: u64, q: u64, columns: &[Vec<u64>], cos: &[f64]) -> LpRow {
    let mut coeffs = Vec::with_capacity(columns.len() + 1);
    coeffs.push(1.0);
    for col in columns {
        coeffs.push(col.iter().map(|&r| cos[mul_mod(r, y, q) as usize]).sum());
    }
    LpRow { y, coeffs }
}

/// One variable per `±`-class, one row per `y ∈ [0, q)`.
pub fn build_lp(q: u64) -> Result<LpProblem> {
    if q < 2 {
        return Err(Error::InvalidModulus(q, 2));
    }
    let partition = plus_minus_classes(&cubic_residues(q)?);
    let members: Vec<Vec<u64>> = partition.classes.iter().map(|c| c.members.clone()).collect();
    let cos = cos_table(q);
    let rows = (0..q).map(|y| row_for(y, q, &members, &cos)).collect();
    Ok(LpProblem {
        q,
        class_reps: partition.classes.iter().map(|c| c.rep).collect(),
        columns: (0..members.len()).map(|i| vec![i]).collect(),
        rows,
        reduced: false,
    })
}

/// The same LP restricted to coefficients constant on cubic-unit orbits, with
/// one row per orbit of `y` under the cubic units. The problem is invariant
/// under `y ↦ uy`, so averaging any optimum over the group shows both have the
/// same value.
pub fn build_lp_reduced(q: u64) -> Result<LpProblem> {
    if q < 2 {
        return Err(Error::InvalidModulus(q, 2));
    }
    let partition = cubic_unit_orbits(q)?;
    let orbits = partition.orbits.clone().expect("orbits populated");
    let members: Vec<Vec<u64>> = orbits
        .iter()
        .map(|o| {
            o.iter()
                .flat_map(|&c| partition.classes[c].members.iter().copied())
                .collect()
        })
        .collect();
    let units = cubic_units(q);
    let mut seen = vec![false; q as usize];
    let mut row_ys = Vec::new();
    for y in 0..q {
        if seen[y as usize] {
            continue;
        }
        row_ys.push(y);
        for &u in &units {
            seen[mul_mod(u, y, q) as usize] = true;
        }
    }
    let cos = cos_table(q);
    let rows = row_ys.iter().map(|&y| row_for(y, q, &members, &cos)).collect();
    Ok(LpProblem {
        q,
        class_reps: partition.classes.iter().map(|c| c.rep).collect(),
        columns: orbits,
        rows,
        reduced: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub binding_ys: Vec<u64>,
    /// Weight per used constraint row; zero weights included.
    pub dual: Vec<f64>,
    pub duality_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub q: u64,
    pub lambda: f64,
    /// Per-class coefficient, keyed by representative.
    pub coefficients: Vec<Coefficient>,
    pub binding_ys: Vec<u64>,
    /// `max(−min_y g(y), |g(0) − 1|, 0)` of the reconstructed witness.
    pub max_violation: f64,
    /// Rows `y` used by the solver, paired with their nonnegative dual weights.
    pub dual_multipliers: Vec<(u64, f64)>,
    /// Dual objective: the multiplier of the normalization row.
    pub dual_objective: f64,
    /// `‖μ·a₀ + Σ w_y·a_y − e₀‖∞`.
    pub dual_residual: f64,
    pub duality_gap: f64,
    pub reduced: bool,
    pub pivots: usize,
}

impl LpSolution {
    pub fn to_witness(&self) -> WitnessFunction {
        WitnessFunction::new(self.q, self.lambda, self.coefficients.clone(), Construction::Optimal)
            .expect("class representatives are canonical")
    }

    pub fn certificate(&self) -> Certificate {
        Certificate {
            binding_ys: self.binding_ys.clone(),
            dual: self.dual_multipliers.iter().map(|&(_, w)| w).collect(),
            duality_gap: self.duality_gap,
        }
    }

    /// Witness JSON with an added `certificate` object.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct WithCertificate<'a> {
            q: u64,
            b0: f64,
            coeffs: &'a [Coefficient],
            construction: Construction,
            certificate: Certificate,
        }
        serde_json::to_string(&WithCertificate {
            q: self.q,
            b0: self.lambda,
            coeffs: &self.coefficients,
            construction: Construction::Optimal,
            certificate: self.certificate(),
        })
        .expect("solution serializes")
    }
}

pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    let q = problem.q;
    let nvar = problem.variable_count();
    let normalization = problem
        .rows
        .iter()
        .find(|r| r.y == 0)
        .ok_or_else(|| Error::Solver("missing y = 0 row".into()))?;

    let used: Vec<&LpRow> = if problem.reduced {
        problem.rows.iter().filter(|r| r.y != 0).collect()
    } else {
        for row in &problem.rows {
            let mirror = &problem.rows[((q - row.y) % q) as usize];
            if mirror.coeffs != row.coeffs {
                return Err(Error::Solver(format!(
                    "rows {} and {} differ",
                    row.y, mirror.y
                )));
            }
        }
        problem.rows.iter().filter(|r| r.y != 0 && 2 * r.y <= q).collect()
    };

    // dual: max μ  s.t.  μ·a₀ + Σ_y w_y·a_y = e₀,  w ≥ 0
    let ncols = used.len() + 2;
    let mut a = vec![vec![0.0; ncols]; nvar];
    for (k, row) in used.iter().enumerate() {
        for i in 0..nvar {
            a[i][k] = row.coeffs[i];
        }
    }
    for i in 0..nvar {
        a[i][ncols - 2] = normalization.coeffs[i];
        a[i][ncols - 1] = -normalization.coeffs[i];
    }
    let mut b = vec![0.0; nvar];
    b[0] = 1.0;
    let mut c = vec![0.0; ncols];
    c[ncols - 2] = -1.0;
    c[ncols - 1] = 1.0;
    let lp = StandardLp { a, b, c };
    let SimplexResult {
        x: weights,
        duals,
        pivots,
        ..
    } = simplex::solve(&lp).map_err(|e| Error::Solver(e.to_string()))?;

    let primal: Vec<f64> = duals.iter().map(|p| -p).collect();
    let mu = weights[ncols - 2] - weights[ncols - 1];

    let mut dual_residual = 0.0f64;
    for i in 0..nvar {
        let mut s = mu * normalization.coeffs[i];
        for (k, row) in used.iter().enumerate() {
            s += weights[k] * row.coeffs[i];
        }
        let target = if i == 0 { 1.0 } else { 0.0 };
        dual_residual = dual_residual.max((s - target).abs());
    }

    let mut per_class = vec![0.0; problem.class_reps.len()];
    for (k, col) in problem.columns.iter().enumerate() {
        for &c in col {
            per_class[c] = primal[k + 1];
        }
    }
    let coefficients: Vec<Coefficient> = problem
        .class_reps
        .iter()
        .zip(&per_class)
        .map(|(&rep, &value)| Coefficient { rep, value })
        .collect();
    let lambda = primal[0];
    let witness = WitnessFunction::new(q, lambda, coefficients.clone(), Construction::Optimal)?;
    let values = witness.values();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let binding_ys = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= BINDING_TOL)
        .map(|(y, _)| y as u64)
        .collect();
    let max_violation = (-min).max((witness.value_at_zero() - 1.0).abs()).max(0.0);

    Ok(LpSolution {
        q,
        lambda,
        coefficients,
        binding_ys,
        max_violation,
        dual_multipliers: used.iter().zip(&weights).map(|(r, &w)| (r.y, w)).collect(),
        dual_objective: mu,
        dual_residual,
        duality_gap: (lambda - mu).abs(),
        reduced: problem.reduced,
        pivots,
    })
}

/// `λ(C₀^(q))` from the full LP; `λ = 1` for `q = 1`.
pub fn lambda(q: u64) -> Result<f64> {
    match q {
        0 => Err(Error::InvalidModulus(0, 1)),
        1 => Ok(1.0),
        _ => Ok(solve_lp(&build_lp(q)?)?.lambda),
    }
}

/// `λ(C₀^(q))` from the orbit-reduced LP, which has the same optimum.
pub fn lambda_reduced(q: u64) -> Result<f64> {
    match q {
        0 => Err(Error::InvalidModulus(0, 1)),
        1 => Ok(1.0),
        _ => Ok(solve_lp(&build_lp_reduced(q)?)?.lambda),
    }
}

/// `S(y) = Σ_{r ∈ C^(q)} e(ry/q)` and its minimum over `y ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigProfile {
    pub q: u64,
    pub values: Vec<f64>,
    pub min_value: f64,
    pub argmin: u64,
}

pub fn trig_profile(q: u64) -> Result<TrigProfile> {
    if q < 2 {
        return Err(Error::InvalidModulus(q, 2));
    }
    let residues = cubic_residues(q)?;
    let cos = cos_table(q);
    let values: Vec<f64> = (0..q)
        .map(|y| {
            residues
                .residues()
                .iter()
                .map(|&r| cos[mul_mod(r, y, q) as usize])
                .sum()
        })
        .collect();
    let (argmin, min_value) = values
        .iter()
        .copied()
        .enumerate()
        .skip(1)
        .fold((0, f64::INFINITY), |acc, (y, v)| if v < acc.1 { (y, v) } else { acc });
    Ok(TrigProfile {
        q,
        values,
        min_value,
        argmin: argmin as u64,
    })
}

/// `λ = −m/(|C^(q)| − m)` with `m = min_{y≥1} S(y)`; valid when the cubic units
/// act transitively on `C^(q)`, which forces equal optimal coefficients.
pub fn lambda_single_class(q: u64) -> Result<f64> {
    if !cubic_unit_orbits(q)?.is_transitive() {
        return Err(Error::Inapplicable(format!(
            "cubic units do not act transitively on C^({q})"
        )));
    }
    let profile = trig_profile(q)?;
    let size = profile.values[0];
    let m = profile.min_value;
    Ok(-m / (size - m))
}

/// `λ(C₀^(p^m)) = λ(C₀^(p))^⌊(m+2)/3⌋` for `p ≠ 3`.
///
/// For `p = 3` the value is `λ(C₀^(27))^⌈m/3⌉`, the constant term of the 3-adic
/// family. It equals `λ(C₀^(3^m))` for `m ≢ 1 (mod 3)` and is an upper bound
/// otherwise.
pub fn lambda_prime_power(p: u64, m: u32) -> Result<f64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 {
        return Ok(1.0);
    }
    if p == 3 {
        return Ok(lambda_single_class(27)?.powi(m.div_ceil(3) as i32));
    }
    Ok(lambda_single_class(p)?.powi(m.div_ceil(3) as i32))
}

/// `ε = −log(1 − 2/(2 + cos(π/13) + sin(3π/26))) / (3·log 13)`.
pub fn epsilon_constant() -> f64 {
    -lambda13_closed_form().ln() / (3.0 * 13f64.ln())
}

/// `λ(C₀^(13)) = 1 − 2/(2 + cos(π/13) + sin(3π/26))`.
pub fn lambda13_closed_form() -> f64 {
    use std::f64::consts::PI;
    1.0 - 2.0 / (2.0 + (PI / 13.0).cos() + (3.0 * PI / 26.0).sin())
}

/// Minimum of the cubic exponential sum `Σ_{j=1}^{s−1} e(j³y/s)` against the
/// floor `−1 − 2√s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussFloor {
    pub s: u64,
    pub min_sum: f64,
    pub argmin: u64,
    pub bound: f64,
    pub ok: bool,
}

pub fn gauss_min_bound(s: u64) -> Result<GaussFloor> {
    if !is_prime(s) {
        return Err(Error::NotPrime(s));
    }
    if s % 3 != 1 {
        return Err(Error::Inapplicable(format!("{s} is not ≡ 1 mod 3")));
    }
    let mut counts = vec![0.0; s as usize];
    for j in 1..s {
        counts[crate::arith::cube_mod(j, s) as usize] += 1.0;
    }
    let sums = synthesize(&counts);
    let (argmin, min_sum) = sums
        .iter()
        .copied()
        .enumerate()
        .skip(1)
        .fold((0, f64::INFINITY), |acc, (y, v)| if v < acc.1 { (y, v) } else { acc });
    let bound = -1.0 - 2.0 * (s as f64).sqrt();
    Ok(GaussFloor {
        s,
        min_sum,
        argmin: argmin as u64,
        bound,
        ok: min_sum >= bound,
    })
}
