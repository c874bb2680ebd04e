use num_integer::Integer;

use super::{verify_witness, Construction, WitnessFunction, DEFAULT_TOL};
use crate::arith::{crt_compose, cube_mod, factorize, is_prime};
use crate::error::{Error, Result};
use crate::lambda_lp::{build_lp_reduced, solve_lp, LpSolution};

/// The witness modulo 1: the constant function 1.
pub fn constant() -> WitnessFunction {
    WitnessFunction::from_spectrum(&[1.0], Construction::Trivial)
}

/// Counts `#{j ∈ [from, p) : j³ ≡ r}` for every `r`.
fn cube_counts(p: u64, from: u64) -> Vec<f64> {
    let mut counts = vec![0.0; p as usize];
    for j in from..p {
        counts[cube_mod(j, p) as usize] += 1.0;
    }
    counts
}

/// `g(y) = (1/p)·Σ_{j=0}^{p−1} e(j³y/p)`, the indicator of `y = 0`.
pub fn build_trivial(p: u64) -> Result<WitnessFunction> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p % 3 == 1 {
        return Err(Error::Inapplicable(format!(
            "cubing is not a bijection modulo {p} (p ≡ 1 mod 3)"
        )));
    }
    let spectrum: Vec<f64> = cube_counts(p, 0).into_iter().map(|c| c / p as f64).collect();
    Ok(WitnessFunction::from_spectrum(&spectrum, Construction::Trivial))
}

/// The Gauss-sum normalized witness
/// `g(y) = (2√s+1)/(2√s+s) + (1/(2√s+s))·Σ_{j=1}^{s−1} e(j³y/s)`.
pub fn build_gauss(s: u64) -> Result<WitnessFunction> {
    if !is_prime(s) {
        return Err(Error::NotPrime(s));
    }
    if s % 3 != 1 {
        return Err(Error::Inapplicable(format!("{s} is not ≡ 1 mod 3")));
    }
    let root = (s as f64).sqrt();
    let denom = 2.0 * root + s as f64;
    let mut spectrum: Vec<f64> = cube_counts(s, 1).into_iter().map(|c| c / denom).collect();
    spectrum[0] = (2.0 * root + 1.0) / denom;
    Ok(WitnessFunction::from_spectrum(&spectrum, Construction::Gauss))
}

/// Optimal witness: coefficients constant on cubic-unit orbits, constant term
/// `λ(C₀^(q))`.
pub fn build_optimal(q: u64) -> Result<WitnessFunction> {
    Ok(build_optimal_with_solution(q)?.0)
}

pub fn build_optimal_with_solution(q: u64) -> Result<(WitnessFunction, LpSolution)> {
    let solution = solve_lp(&build_lp_reduced(q)?)?;
    let w = solution.to_witness();
    let report = verify_witness(&w, DEFAULT_TOL);
    if !report.pass {
        return Err(Error::Verification {
            q,
            reason: format!(
                "min {:e}, normalization residual {:e}",
                report.min_value, report.normalization_residual
            ),
        });
    }
    Ok((w, solution))
}

/// Block lift from `ℤ_N` to `ℤ_{N·B}`: frequencies `t ∈ C^(N)` spread evenly over
/// `t + l·N`, plus `b0_lower` times the base witness embedded at frequencies
/// `j·N` when `with_base`, otherwise plus the constant `b0_lower`.
fn block_lift(lower: &WitnessFunction, base: &WitnessFunction, with_base: bool) -> WitnessFunction {
    let n = lower.q() as usize;
    let b = base.q() as usize;
    let mut spectrum = vec![0.0; n * b];
    let low = lower.spectrum();
    for (t, &h) in low.iter().enumerate().skip(1) {
        if h == 0.0 {
            continue;
        }
        for l in 0..b {
            spectrum[t + l * n] = h / b as f64;
        }
    }
    if with_base {
        for (j, &h) in base.spectrum().iter().enumerate() {
            spectrum[j * n] += lower.b0() * h;
        }
    } else {
        spectrum[0] += lower.b0();
    }
    WitnessFunction::from_spectrum(&spectrum, Construction::Lift)
}

/// Witness modulo `p^m` from witnesses modulo `p^(m−1)` and `p`, `p ≠ 3`.
///
/// The result restricts to `w_lower` on the subgroup `pℤ_{p^m}`, and equals
/// `b0_lower·g^(p)(j)` (when `3 | m−1`) or `b0_lower` (otherwise) at `py + j`.
pub fn lift_prime_power(
    w_lower: &WitnessFunction,
    w_base: &WitnessFunction,
    p: u64,
    m: u32,
) -> Result<WitnessFunction> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 3 {
        return Err(Error::Inapplicable(
            "powers of 3 lift in blocks of 27; use build_power_of_three".into(),
        ));
    }
    if m < 2 {
        return Err(Error::InvalidModulus(m as u64, 2));
    }
    if w_base.q() != p {
        return Err(Error::Inapplicable(format!(
            "base witness is modulo {}, expected {p}",
            w_base.q()
        )));
    }
    if w_lower.q() != p.pow(m - 1) {
        return Err(Error::Inapplicable(format!(
            "lower witness is modulo {}, expected {}",
            w_lower.q(),
            p.pow(m - 1)
        )));
    }
    Ok(block_lift(w_lower, w_base, (m - 1).is_multiple_of(3)))
}

/// `g'(y) = g(y·q/d)` as a witness modulo `d`, for `d | q`.
pub fn descend(w: &WitnessFunction, d: u64) -> Result<WitnessFunction> {
    if d == 0 || !w.q().is_multiple_of(d) {
        return Err(Error::NotDivisor(d, w.q()));
    }
    let mut spectrum = vec![0.0; d as usize];
    for (r, &h) in w.spectrum().iter().enumerate() {
        spectrum[r % d as usize] += h;
    }
    Ok(WitnessFunction::from_spectrum(&spectrum, Construction::Descent))
}

/// Witness modulo `3^alpha`: 27-block lifting on `3^(3m)`, and
/// `g(y) = g^(3^(3m))(3y)` resp. `g^(3^(3m))(9y)` on `3^(3m−1)` resp. `3^(3m−2)`.
pub fn build_power_of_three(alpha: u32) -> Result<WitnessFunction> {
    if alpha == 0 {
        return Err(Error::InvalidModulus(0, 1));
    }
    let base = build_optimal(27)?;
    Ok(power_of_three_from_base(&base, alpha))
}

pub(super) fn power_of_three_from_base(base: &WitnessFunction, alpha: u32) -> WitnessFunction {
    let blocks = alpha.div_ceil(3);
    let mut top = base.clone().with_construction(Construction::Lift);
    for _ in 1..blocks {
        top = block_lift(&top, base, true);
    }
    match alpha % 3 {
        0 => top,
        r => {
            let d = 3u64.pow(alpha);
            debug_assert_eq!(top.q() / d, 3u64.pow(3 - r));
            descend(&top, d).expect("3^alpha divides 3^(3m)")
        }
    }
}

/// Direct product under the CRT bijection `ℤ_{q1} × ℤ_{q2} ≅ ℤ_{q1·q2}`:
/// `h(CRT(r1, r2)) = h1(r1)·h2(r2)`.
pub fn product(w1: &WitnessFunction, w2: &WitnessFunction) -> Result<WitnessFunction> {
    let (q1, q2) = (w1.q(), w2.q());
    if q1.gcd(&q2) != 1 {
        return Err(Error::NotCoprime(q1, q2));
    }
    let s1 = w1.spectrum();
    let s2 = w2.spectrum();
    let mut spectrum = vec![0.0; (q1 * q2) as usize];
    for (r1, &h1) in s1.iter().enumerate().filter(|(_, h)| **h != 0.0) {
        for (r2, &h2) in s2.iter().enumerate().filter(|(_, h)| **h != 0.0) {
            let r = crt_compose(q1, q2, r1 as u64, r2 as u64)?;
            spectrum[r as usize] = h1 * h2;
        }
    }
    Ok(WitnessFunction::from_spectrum(&spectrum, Construction::Product))
}

/// Squarefree construction: trivial witnesses on primes `≡ 2 mod 3` and on 3,
/// Gauss witnesses on primes `≡ 1 mod 3`, combined by direct product.
pub fn build_squarefree(q: u64) -> Result<WitnessFunction> {
    let f = factorize(q)?;
    if !f.is_squarefree() {
        return Err(Error::Inapplicable(format!("{q} is not squarefree")));
    }
    let mut w = constant();
    for &(p, _) in &f.factors {
        let part = if p % 3 == 1 {
            build_gauss(p)?
        } else {
            build_trivial(p)?
        };
        w = product(&w, &part)?;
    }
    Ok(w.with_construction(Construction::Product))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::check_self_compatibility;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn trivial_examples() {
        let w = build_trivial(5).unwrap();
        assert!(close(w.b0(), 0.2, 1e-15));
        let v = w.values();
        assert!(close(v[0], 1.0, 1e-12));
        assert!(v[1..].iter().all(|x| x.abs() < 1e-12));
        assert!(close(w.evaluate(3).unwrap(), 0.0, 1e-12));

        let w = build_trivial(2).unwrap();
        assert_eq!(w.b0(), 0.5);
        assert!(close(w.evaluate(0).unwrap(), 1.0, 1e-15));
        assert!(close(w.evaluate(1).unwrap(), 0.0, 1e-15));

        let w = build_trivial(3).unwrap();
        assert!(close(w.b0(), 1.0 / 3.0, 1e-15));
        assert!(close(w.evaluate(1).unwrap(), 0.0, 1e-12));
        assert!(close(w.evaluate(2).unwrap(), 0.0, 1e-12));

        assert!(matches!(build_trivial(7), Err(Error::Inapplicable(_))));
        assert_eq!(build_trivial(9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn gauss_examples() {
        let w = build_gauss(7).unwrap();
        let r7 = 7f64.sqrt();
        assert!(close(w.b0(), (2.0 * r7 + 1.0) / (2.0 * r7 + 7.0), 1e-15));
        assert!(close(w.b0(), 0.511858, 1e-6));
        assert!(close(w.evaluate(0).unwrap(), 1.0, 1e-14));
        let r13 = 13f64.sqrt();
        let g13 = build_gauss(13).unwrap().b0();
        assert!(close(g13, (2.0 * r13 + 1.0) / (2.0 * r13 + 13.0), 1e-15));
        assert!(close(g13, 0.406271, 1e-5));
        assert!(build_gauss(31).unwrap().b0() <= 31f64.powf(-0.36));
        assert!(matches!(build_gauss(5), Err(Error::Inapplicable(_))));
        let report = verify_witness(&build_gauss(13).unwrap(), DEFAULT_TOL);
        assert!(report.pass && report.min_value >= -1e-12);
    }

    #[test]
    fn gauss_bound_sweep() {
        for s in (7..=10_000u64).filter(|&s| s % 3 == 1 && is_prime(s)) {
            let b0 = build_gauss(s).unwrap().b0();
            assert!(b0 <= 2.0 / (s as f64).sqrt(), "s = {s}");
        }
    }

    #[test]
    fn optimal_examples() {
        let w = build_optimal(13).unwrap();
        let c = (std::f64::consts::PI / 13.0).cos();
        let s = (3.0 * std::f64::consts::PI / 26.0).sin();
        assert!(close(w.b0(), 1.0 - 2.0 / (2.0 + c + s), 1e-12));
        let c7 = (std::f64::consts::PI / 7.0).cos();
        assert!(close(build_optimal(7).unwrap().b0(), c7 / (1.0 + c7), 1e-12));
        assert!(close(build_optimal(5).unwrap().b0(), 0.2, 1e-12));
        assert!(build_optimal(1).is_err());
    }

    #[test]
    fn lift_examples() {
        let w7 = build_optimal(7).unwrap();
        let w49 = lift_prime_power(&w7, &w7, 7, 2).unwrap();
        assert!(close(w49.b0(), w7.b0(), 1e-15));
        let v49 = w49.values();
        for (y, v) in w7.values().iter().enumerate() {
            assert!(close(v49[7 * y], *v, 1e-12));
        }

        let w2 = build_trivial(2).unwrap();
        let w4 = lift_prime_power(&w2, &w2, 2, 2).unwrap();
        let expect = [1.0, 0.5, 0.0, 0.5];
        for (y, e) in expect.iter().enumerate() {
            assert!(close(w4.evaluate(y as u64).unwrap(), *e, 1e-15));
        }
        let w8 = lift_prime_power(&w4, &w2, 2, 3).unwrap();
        let w16 = lift_prime_power(&w8, &w2, 2, 4).unwrap();
        assert!(close(w16.b0(), 0.25, 1e-15));
        assert!(verify_witness(&w16, DEFAULT_TOL).pass);

        assert!(lift_prime_power(&w4, &w2, 2, 2).is_err());
        assert!(lift_prime_power(&w2, &w2, 3, 2).is_err());
    }

    #[test]
    fn lift_off_lattice_values() {
        for p in [2u64, 5, 7, 13] {
            let base = if p % 3 == 1 {
                build_optimal(p).unwrap()
            } else {
                build_trivial(p).unwrap()
            };
            let vb = base.values();
            let mut lower = base.clone();
            let mut m = 2;
            while p.pow(m) <= 20_000 {
                let lifted = lift_prime_power(&lower, &base, p, m).unwrap();
                let v = lifted.values();
                let vl = lower.values();
                for z in 0..lifted.q() as usize {
                    let (y, j) = (z / p as usize, z % p as usize);
                    let expect = if j == 0 {
                        vl[y]
                    } else if (m - 1) % 3 == 0 {
                        lower.b0() * vb[j]
                    } else {
                        lower.b0()
                    };
                    assert!(close(v[z], expect, 1e-12), "p={p} m={m} z={z}");
                }
                lower = lifted;
                m += 1;
            }
        }
    }

    #[test]
    fn power_of_three_examples() {
        let w27 = build_optimal(27).unwrap();
        let l27 = w27.b0();
        assert!(close(build_power_of_three(3).unwrap().b0(), l27, 1e-15));
        assert!(close(build_power_of_three(6).unwrap().b0(), l27 * l27, 1e-15));
        let w3 = build_power_of_three(1).unwrap();
        assert!(close(w3.b0(), l27, 1e-15));
        let eps = crate::lambda_lp::epsilon_constant();
        assert!(w3.b0() <= 3f64.powf(-eps));
        let v27 = w27.values();
        for y in 0..3 {
            assert!(close(w3.evaluate(y).unwrap(), v27[9 * y as usize], 1e-12));
        }
        for alpha in 1..=7 {
            let w = build_power_of_three(alpha).unwrap();
            assert_eq!(w.q(), 3u64.pow(alpha));
            assert!(verify_witness(&w, DEFAULT_TOL).pass, "alpha = {alpha}");
        }
        let w9 = build_power_of_three(2).unwrap();
        assert!(check_self_compatibility(&w9, &w27).unwrap());
        assert!(build_power_of_three(0).is_err());
    }

    #[test]
    fn product_examples() {
        let t5 = build_trivial(5).unwrap();
        let o7 = build_optimal(7).unwrap();
        let p35 = product(&t5, &o7).unwrap();
        assert_eq!(p35.q(), 35);
        assert!(close(p35.b0(), 0.2 * o7.b0(), 1e-15));
        assert!(verify_witness(&p35, DEFAULT_TOL).pass);
        assert!(check_self_compatibility(&t5, &p35).unwrap());
        assert!(check_self_compatibility(&o7, &p35).unwrap());

        let g = product(&build_gauss(7).unwrap(), &build_gauss(13).unwrap()).unwrap();
        let (r7, r13) = (7f64.sqrt(), 13f64.sqrt());
        let expected = (2.0 * r7 + 1.0) / (2.0 * r7 + 7.0) * (2.0 * r13 + 1.0) / (2.0 * r13 + 13.0);
        assert!(close(g.b0(), expected, 1e-15));
        assert!(close(g.b0(), 0.207944, 1e-5));
        assert!(g.b0() <= 4.0 / 91f64.sqrt());

        let same = product(&o7, &constant()).unwrap();
        assert_eq!(same.spectrum(), o7.spectrum());
        assert_eq!(product(&o7, &o7), Err(Error::NotCoprime(7, 7)));
    }

    #[test]
    fn product_matches_crt_evaluation() {
        let w1 = build_optimal(7).unwrap();
        let w2 = build_gauss(13).unwrap();
        let w = product(&w1, &w2).unwrap();
        // q2* = 13⁻¹ mod 7 = 6, q1* = 7⁻¹ mod 13 = 2
        let (v, v1, v2) = (w.values(), w1.values(), w2.values());
        for y in 0..91usize {
            let expect = v1[(6 * y) % 7] * v2[(2 * y) % 13];
            assert!(close(v[y], expect, 1e-12));
        }
    }

    #[test]
    fn squarefree_construction() {
        let w = build_squarefree(2 * 3 * 7 * 13).unwrap();
        let expect = 0.5 / 3.0 * build_gauss(7).unwrap().b0() * build_gauss(13).unwrap().b0();
        assert!(close(w.b0(), expect, 1e-15));
        assert!(verify_witness(&w, DEFAULT_TOL).pass);
        assert!(build_squarefree(12).is_err());
    }

    #[test]
    fn descend_requires_divisor() {
        let w = build_optimal(7).unwrap();
        assert_eq!(descend(&w, 3), Err(Error::NotDivisor(3, 7)));
        let one = descend(&w, 1).unwrap();
        assert!(close(one.b0(), 1.0, 1e-12));
    }
}
