use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use witnesslab_core::extremal::{delta_exact, BRIDGE_TOL};
use witnesslab_core::lambda_lp::{epsilon_constant, lambda_reduced};
use witnesslab_core::witness::build_family;
use witnesslab_core::Result;

/// One row per modulus; field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub q: u64,
    pub lambda_lp: f64,
    pub family_b0: f64,
    pub q_pow_neg_eps: f64,
    pub delta: usize,
    pub delta_exact: bool,
    /// `delta ≤ λ·q` within [`BRIDGE_TOL`].
    pub bound_ok: bool,
}

pub fn table_row(q: u64, budget: u64) -> Result<TableRow> {
    let lambda_lp = lambda_reduced(q)?;
    let d = delta_exact(q, budget)?;
    Ok(TableRow {
        q,
        lambda_lp,
        family_b0: build_family(q)?.b0(),
        q_pow_neg_eps: (q as f64).powf(-epsilon_constant()),
        delta: d.size,
        delta_exact: d.exact,
        bound_ok: d.size as f64 <= lambda_lp * q as f64 + BRIDGE_TOL,
    })
}

/// Rows for `q = 2..=qmax`, computed in parallel, returned in `q` order.
pub fn build_table(qmax: u64, budget: u64) -> Result<Vec<TableRow>> {
    (2..=qmax).into_par_iter().map(|q| table_row(q, budget)).collect()
}

pub fn to_csv(rows: &[TableRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn to_json(rows: &[TableRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_rows() {
        let rows = build_table(7, 1_000_000).unwrap();
        assert_eq!(rows.iter().map(|r| r.q).collect::<Vec<_>>(), vec![2, 3, 4, 5, 6, 7]);
        let csv = to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("q,lambda_lp,family_b0,q_pow_neg_eps,delta,delta_exact,bound_ok"));
        let r7 = &rows[5];
        assert!((r7.lambda_lp - 0.473952458).abs() < 1e-8);
        assert!((r7.family_b0 - r7.lambda_lp).abs() < 1e-12);
        assert_eq!((r7.delta, r7.delta_exact, r7.bound_ok), (3, true, true));
        let r5 = &rows[3];
        assert!((r5.lambda_lp - 0.2).abs() < 1e-12 && r5.delta == 1);
        assert!((r5.q_pow_neg_eps - 0.825).abs() < 1e-3);
    }

    #[test]
    fn json_round_trip() {
        let rows = build_table(4, 1_000).unwrap();
        let back: Vec<TableRow> = serde_json::from_str(&to_json(&rows)).unwrap();
        assert_eq!(back, rows);
    }
}
