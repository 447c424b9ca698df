//! Ordinary least squares over dummy-coded categorical factors.

use std::cmp::Ordering;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::StatsError;

pub const INTERCEPT: &str = "(Intercept)";

/// Row-major design matrix with named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    pub columns: Vec<String>,
    pub rows: usize,
    pub data: Vec<f64>,
}

impl DesignMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.columns.len();
        &self.data[i * k..(i + 1) * k]
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.columns.len(), &self.data)
    }
}

/// Numeric order when both levels parse as numbers, text order otherwise.
fn level_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y),
        _ => a.cmp(b),
    }
}

/// Intercept column plus one 0/1 indicator per non-baseline level, factor by
/// factor, levels in ascending order. Columns are named `factor=level`.
pub fn dummy_code(
    factors: &[&str],
    rows: &[Vec<String>],
    baselines: &[&str],
) -> Result<DesignMatrix, StatsError> {
    assert_eq!(factors.len(), baselines.len(), "one baseline per factor");
    for (row_idx, row) in rows.iter().enumerate() {
        if row.len() != factors.len() {
            return Err(StatsError::RowArity {
                row: row_idx,
                got: row.len(),
                expected: factors.len(),
            });
        }
    }

    let mut columns = vec![INTERCEPT.to_string()];
    let mut indicators: Vec<(usize, String)> = Vec::new();
    for (f, (&factor, &baseline)) in factors.iter().zip(baselines).enumerate() {
        let mut levels: Vec<&str> = rows.iter().map(|r| r[f].as_str()).collect();
        levels.sort_by(|a, b| level_order(a, b));
        levels.dedup();
        if !levels.contains(&baseline) {
            return Err(StatsError::UnknownLevel {
                factor: factor.to_string(),
                level: baseline.to_string(),
            });
        }
        for level in levels.into_iter().filter(|&l| l != baseline) {
            columns.push(format!("{factor}={level}"));
            indicators.push((f, level.to_string()));
        }
    }

    let mut data = Vec::with_capacity(rows.len() * columns.len());
    for row in rows {
        data.push(1.0);
        data.extend(
            indicators
                .iter()
                .map(|(f, level)| if row[*f] == *level { 1.0 } else { 0.0 }),
        );
    }
    Ok(DesignMatrix {
        columns,
        rows: rows.len(),
        data,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Predictor {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub predictors: Vec<Predictor>,
    pub n_obs: usize,
    pub df_residual: usize,
    pub rss: f64,
    pub residual_std_error: f64,
    pub r_squared: f64,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl OlsFit {
    pub fn predictor(&self, name: &str) -> Option<&Predictor> {
        self.predictors.iter().find(|p| p.name == name)
    }

    /// `predictor,estimate,std_error,t_value,p_value` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("predictor,estimate,std_error,t_value,p_value\n");
        for p in &self.predictors {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                p.name, p.estimate, p.std_error, p.t_value, p.p_value
            );
        }
        out
    }
}

/// Least-squares fit through a Householder QR factorization of the design.
pub fn ols_fit(design: &DesignMatrix, y: &[f64]) -> Result<OlsFit, StatsError> {
    let (n, k) = (design.rows, design.columns.len());
    if y.len() != n {
        return Err(StatsError::LengthMismatch { left: n, right: y.len() });
    }
    if n <= k {
        return Err(StatsError::Underdetermined { rows: n, cols: k });
    }
    let x = design.to_nalgebra();
    let qr = x.clone().qr();
    let r = qr.r();
    let max_diag = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = max_diag * (n.max(k) as f64) * f64::EPSILON * 16.0;
    if r.diagonal().iter().any(|v| v.abs() <= tol) {
        return Err(StatsError::RankDeficient);
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or(StatsError::RankDeficient)?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(StatsError::RankDeficient)?;

    let residuals: Vec<f64> = (&yv - &x * &beta).iter().copied().collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let df = n - k;
    let sigma2 = rss / df as f64;
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    let t_dist = StudentsT::new(0.0, 1.0, df as f64).expect("positive degrees of freedom");

    let predictors = design
        .columns
        .iter()
        .enumerate()
        .map(|(j, name)| {
            // diag((XᵀX)⁻¹) = squared row norms of R⁻¹
            let var = sigma2 * r_inv.row(j).norm_squared();
            let std_error = var.sqrt();
            let estimate = beta[j];
            let t_value = estimate / std_error;
            let p_value = if t_value.is_nan() {
                f64::NAN
            } else {
                (2.0 * t_dist.sf(t_value.abs())).min(1.0)
            };
            Predictor {
                name: name.clone(),
                estimate,
                std_error,
                t_value,
                p_value,
            }
        })
        .collect();

    Ok(OlsFit {
        predictors,
        n_obs: n,
        df_residual: df,
        rss,
        residual_std_error: sigma2.sqrt(),
        r_squared: if tss > 0.0 { 1.0 - rss / tss } else { f64::NAN },
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(levels: &[&[&str]]) -> Vec<Vec<String>> {
        levels
            .iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    #[test]
    fn single_factor_coding() {
        let d = dummy_code(&["f"], &rows(&[&["A"], &["B"], &["A"]]), &["A"]).unwrap();
        assert_eq!(d.columns, vec![INTERCEPT, "f=B"]);
        assert_eq!(d.data, vec![1.0, 0.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn full_grid_has_twelve_columns() {
        let mut grid = Vec::new();
        for h in 1..=5 {
            for s in 1..=3 {
                for u in 0..=3 {
                    for p in 1..=3 {
                        grid.push(vec![h.to_string(), s.to_string(), u.to_string(), p.to_string()]);
                    }
                }
            }
        }
        let d = dummy_code(&["h", "s", "u", "p"], &grid, &["1", "1", "0", "1"]).unwrap();
        assert_eq!(d.columns.len(), 12);
        assert_eq!(
            d.columns,
            vec![
                INTERCEPT, "h=2", "h=3", "h=4", "h=5", "s=2", "s=3", "u=1", "u=2", "u=3", "p=2",
                "p=3"
            ]
        );
        // first row is the all-baseline cell
        assert_eq!(d.row(0)[0], 1.0);
        assert!(d.row(0)[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn numeric_levels_sort_numerically() {
        let d = dummy_code(&["k"], &rows(&[&["10"], &["2"], &["1"]]), &["1"]).unwrap();
        assert_eq!(d.columns, vec![INTERCEPT, "k=2", "k=10"]);
    }

    #[test]
    fn coding_errors() {
        assert_eq!(
            dummy_code(&["f"], &rows(&[&["A"], &["B"]]), &["C"]).unwrap_err(),
            StatsError::UnknownLevel {
                factor: "f".into(),
                level: "C".into()
            }
        );
        assert!(matches!(
            dummy_code(&["f", "g"], &rows(&[&["A"]]), &["A", "B"]),
            Err(StatsError::RowArity { .. })
        ));
    }

    #[test]
    fn exact_fit_has_zero_rss() {
        let d = dummy_code(
            &["f"],
            &rows(&[&["A"], &["B"], &["C"], &["A"], &["B"], &["C"]]),
            &["A"],
        )
        .unwrap();
        let y = [1.0, 3.0, 0.5, 1.0, 3.0, 0.5];
        let fit = ols_fit(&d, &y).unwrap();
        let est: Vec<f64> = fit.predictors.iter().map(|p| p.estimate).collect();
        for (got, want) in est.iter().zip([1.0, 2.0, -0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(fit.rss < 1e-24);
    }

    #[test]
    fn matches_hand_computed_simple_regression() {
        // y = 1 + 2x with residuals (+1, -2, +1): slope unchanged, s² = 6
        let design = DesignMatrix {
            columns: vec![INTERCEPT.into(), "x".into()],
            rows: 3,
            data: vec![1.0, 0.0, 1.0, 1.0, 1.0, 2.0],
        };
        let fit = ols_fit(&design, &[2.0, 1.0, 6.0]).unwrap();
        let slope = fit.predictor("x").unwrap();
        assert!((slope.estimate - 2.0).abs() < 1e-12);
        // Var(slope) = s² / Σ(x − x̄)² = 6 / 2
        assert!((slope.std_error - 3f64.sqrt()).abs() < 1e-12);
        assert!((slope.t_value - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        // two-sided t with 1 df: p = 1 − (2/π)·atan(|t|)
        let p = 1.0 - 2.0 / std::f64::consts::PI * (2.0 / 3f64.sqrt()).atan();
        assert!((slope.p_value - p).abs() < 1e-9, "{} vs {p}", slope.p_value);
        assert_eq!(fit.df_residual, 1);
    }

    #[test]
    fn fit_errors() {
        let d = DesignMatrix {
            columns: vec![INTERCEPT.into(), "dup".into()],
            rows: 4,
            data: vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        };
        assert_eq!(ols_fit(&d, &[1.0, 2.0, 3.0, 4.0]).unwrap_err(), StatsError::RankDeficient);
        let square = DesignMatrix {
            columns: vec![INTERCEPT.into()],
            rows: 1,
            data: vec![1.0],
        };
        assert!(matches!(
            ols_fit(&square, &[1.0]),
            Err(StatsError::Underdetermined { .. })
        ));
    }

    #[test]
    fn csv_shape() {
        let d = dummy_code(&["f"], &rows(&[&["A"], &["B"], &["A"], &["B"]]), &["A"]).unwrap();
        let fit = ols_fit(&d, &[1.0, 2.0, 1.5, 2.5]).unwrap();
        let csv = fit.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "predictor,estimate,std_error,t_value,p_value");
        let cells: Vec<Vec<&str>> = lines[1..].iter().map(|l| l.split(',').collect()).collect();
        assert_eq!(cells[0][0], "(Intercept)");
        assert!((cells[0][1].parse::<f64>().unwrap() - 1.25).abs() < 1e-12);
        assert_eq!(cells[1][0], "f=B");
        assert!((cells[1][1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
        assert!(cells.iter().all(|c| c.len() == 5));
    }
}
