//! Parallel parameter scans: energy-momentum curves and the `(n, t)` region map.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::format_number;
use crate::error::{Error, Result};
use crate::model::MassTriple;

use super::general::general_equilibrium_pair;
use super::isosceles::{isosceles_equilibrium, region_classification, stability_polynomials, IsoscelesParams, RegionLabel};
use super::report::{Classification, EquilibriumReport};

pub const SCAN_HEADER: &str = "param,mu1,mu2,h,b,neg_inv_h,class,eig1,eig2,eig3,eig4,eig5,eig6,eig7,eig8";
pub const REGION_HEADER: &str = "n,t,P1,P2,region,minimum";

/// `count` points from `lo` to `hi` inclusive, equally spaced in `log`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("grid must contain at least one point".into()));
    }
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("log grid needs 0 < lo <= hi, got [{lo}, {hi}]")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|k| match k {
            0 => lo,
            k if k == count - 1 => hi,
            k => (a + (b - a) * k as f64 / (count - 1) as f64).exp(),
        })
        .collect())
}

/// `count` points from `lo` to `hi` inclusive, equally spaced.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("grid must contain at least one point".into()));
    }
    if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("grid needs lo <= hi, got [{lo}, {hi}]")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanValues {
    pub mu1: f64,
    pub mu2: f64,
    pub h: f64,
    pub b: f64,
    pub neg_inv_h: f64,
    pub class: Classification,
    pub eigenvalues: [f64; 8],
}

impl From<&EquilibriumReport> for ScanValues {
    fn from(r: &EquilibriumReport) -> Self {
        Self {
            mu1: r.mu1,
            mu2: r.mu2,
            h: r.h,
            b: r.b,
            neg_inv_h: r.neg_inv_h,
            class: r.classification,
            eigenvalues: r.eigenvalues,
        }
    }
}

/// One grid point; exactly one of `values` and `error` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub param: f64,
    pub values: Option<ScanValues>,
    pub error: Option<String>,
}

impl ScanRow {
    fn from_result(param: f64, r: Result<EquilibriumReport>) -> Self {
        match r {
            Ok(rep) => Self { param, values: Some((&rep).into()), error: None },
            Err(e) => Self { param, values: None, error: Some(e.to_string()) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    /// `(param, values)` of the points that solved.
    pub fn solved(&self) -> impl Iterator<Item = (f64, &ScanValues)> {
        self.rows.iter().filter_map(|r| r.values.as_ref().map(|v| (r.param, v)))
    }

    pub fn failures(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }

    /// CSV with [`SCAN_HEADER`]; failed points carry `nan` and class `error`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SCAN_HEADER);
        out.push('\n');
        for row in &self.rows {
            let mut fields = vec![format_number(row.param)];
            match &row.values {
                Some(v) => {
                    fields.extend([v.mu1, v.mu2, v.h, v.b, v.neg_inv_h].map(format_number));
                    fields.push(v.class.to_string());
                    fields.extend(v.eigenvalues.iter().map(|&e| format_number(e)));
                }
                None => {
                    fields.extend(std::iter::repeat_n("nan".to_string(), 5));
                    fields.push("error".into());
                    fields.extend(std::iter::repeat_n("nan".to_string(), 8));
                }
            }
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// Isosceles family for mass ratio `n` over the shape grid `ts`.
pub fn isosceles_scan(n: f64, ts: &[f64]) -> Result<ScanTable> {
    if ts.is_empty() {
        return Err(Error::InvalidParameter("empty t grid".into()));
    }
    let rows = ts
        .par_iter()
        .map(|&t| ScanRow::from_result(t, IsoscelesParams::new(n, t).and_then(|p| isosceles_equilibrium(&p))))
        .collect();
    Ok(ScanTable { rows })
}

/// General-mass family with bodies `pair` as the binary over the grid `us`.
pub fn general_scan(masses: &MassTriple, pair: (usize, usize), us: &[f64]) -> Result<ScanTable> {
    if us.is_empty() {
        return Err(Error::InvalidParameter("empty u grid".into()));
    }
    masses.with_binary(pair.0, pair.1)?;
    let rows = us.par_iter().map(|&u| ScanRow::from_result(u, general_equilibrium_pair(masses, u, pair))).collect();
    Ok(ScanTable { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub n: f64,
    pub t: f64,
    pub p1: f64,
    pub p2: f64,
    pub region: RegionLabel,
    pub minimum: bool,
}

/// Region labels over the tensor grid `ns x ts` (row-major in `n`).
pub fn region_map(ns: &[f64], ts: &[f64]) -> Result<Vec<RegionRow>> {
    if ns.is_empty() || ts.is_empty() {
        return Err(Error::InvalidParameter("empty (n, t) grid".into()));
    }
    if let Some(t) = ts.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(Error::InvalidParameter(format!("t must lie in (0, 1), got {t}")));
    }
    if let Some(n) = ns.iter().find(|n| !(**n > 0.0)) {
        return Err(Error::InvalidParameter(format!("n must be positive, got {n}")));
    }
    let cells: Vec<(f64, f64)> = ns.iter().flat_map(|&n| ts.iter().map(move |&t| (n, t))).collect();
    Ok(cells
        .into_par_iter()
        .map(|(n, t)| {
            let (p1, p2) = stability_polynomials(n, t);
            let region = region_classification(n, t);
            RegionRow { n, t, p1, p2, region, minimum: region.is_minimum() }
        })
        .collect())
}

pub fn region_map_csv(rows: &[RegionRow]) -> String {
    let mut out = String::from(REGION_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_number(r.n),
            format_number(r.t),
            format_number(r.p1),
            format_number(r.p2),
            r.region,
            r.minimum
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = log_grid(1e-3, 1e-1, 3).unwrap();
        assert_eq!(g[0], 1e-3);
        assert!((g[1] - 1e-2).abs() < 1e-15);
        assert_eq!(g[2], 1e-1);
        assert!(log_grid(1e-3, 1.0, 0).is_err());
        assert!(log_grid(0.0, 1.0, 3).is_err());
        assert_eq!(linear_grid(0.0, 1.0, 5).unwrap()[2], 0.5);
    }

    #[test]
    fn isosceles_scan_bounded_b() {
        let ts = log_grid(1e-3, 0.99, 200).unwrap();
        let table = isosceles_scan(1.0, &ts).unwrap();
        assert_eq!(table.rows.len(), 200);
        for (_, v) in table.solved() {
            assert!(v.b <= 0.25 + 1e-15);
        }
        let csv = table.to_csv();
        assert!(csv.starts_with(SCAN_HEADER));
        assert_eq!(csv.lines().count(), 201);
    }

    #[test]
    fn empty_grids_rejected() {
        assert!(isosceles_scan(1.0, &[]).is_err());
        assert!(region_map(&[], &[0.1]).is_err());
        assert!(general_scan(&MassTriple::equal(), (2, 3), &[]).is_err());
    }

    #[test]
    fn failed_points_are_recorded() {
        let table = isosceles_scan(1.0, &[0.1, 1.5]).unwrap();
        assert!(table.rows[0].values.is_some());
        assert!(table.rows[1].error.is_some());
        assert!(table.to_csv().lines().nth(2).unwrap().contains(",error,"));
    }
}
