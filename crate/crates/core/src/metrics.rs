//! Ensemble aggregation and model-quality measures.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sir::Trajectory;

/// Ensemble-mean compartment fractions, one entry per time point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanCurves {
    pub s_frac: Vec<f64>,
    pub i_frac: Vec<f64>,
    pub r_frac: Vec<f64>,
    /// Runs averaged; 0 for exact expectations.
    pub n_runs: usize,
    pub population: usize,
}

impl MeanCurves {
    pub fn len(&self) -> usize {
        self.s_frac.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_frac.is_empty()
    }

    fn compartments(&self) -> [&[f64]; 3] {
        [&self.s_frac, &self.i_frac, &self.r_frac]
    }
}

/// Mean of each compartment count over runs (summed in run order), divided by
/// the population.
pub fn mean_curves(trajectories: &[Trajectory], population: usize) -> Result<MeanCurves> {
    let first = trajectories.first().ok_or_else(|| Error::domain("no trajectories to average"))?;
    let points = first.len();
    if population == 0 {
        return Err(Error::domain("population must be positive"));
    }
    let mut sums = [alloc::vec![0u64; points], alloc::vec![0u64; points], alloc::vec![0u64; points]];
    for (r, t) in trajectories.iter().enumerate() {
        if t.len() != points || t.i_counts.len() != points || t.r_counts.len() != points {
            return Err(Error::domain(format!("trajectory {r} has a different length")));
        }
        for p in 0..points {
            if (t.s_counts[p] + t.i_counts[p] + t.r_counts[p]) as usize != population {
                return Err(Error::domain(format!("trajectory {r} does not conserve the population")));
            }
            sums[0][p] += t.s_counts[p] as u64;
            sums[1][p] += t.i_counts[p] as u64;
            sums[2][p] += t.r_counts[p] as u64;
        }
    }
    let runs = trajectories.len() as f64;
    let pop = population as f64;
    let frac = |v: &[u64]| v.iter().map(|&x| x as f64 / runs / pop).collect::<Vec<f64>>();
    Ok(MeanCurves {
        s_frac: frac(&sums[0]),
        i_frac: frac(&sums[1]),
        r_frac: frac(&sums[2]),
        n_runs: trajectories.len(),
        population,
    })
}

/// Numerical integration rule over unit time steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    #[default]
    Trapezoid,
    /// Left Riemann sum over `t = 0..T-1`.
    LeftRectangle,
}

fn integrate_abs_diff(a: &[f64], b: &[f64], rule: Quadrature) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| libm::fabs(x - y)).collect();
    match rule {
        Quadrature::Trapezoid => d.windows(2).map(|w| 0.5 * (w[0] + w[1])).sum(),
        Quadrature::LeftRectangle => d[..d.len().saturating_sub(1)].iter().sum(),
    }
}

/// Sum over S, I and R of the integrated absolute difference between two
/// mean curves (unit time step).
pub fn area_between(a: &MeanCurves, b: &MeanCurves, rule: Quadrature) -> Result<f64> {
    if a.len() != b.len() || a.compartments().iter().chain(b.compartments().iter()).any(|c| c.len() != a.len()) {
        return Err(Error::domain(format!("curve lengths differ: {} vs {}", a.len(), b.len())));
    }
    if a.population != b.population {
        return Err(Error::domain(format!(
            "populations differ: {} vs {}",
            a.population, b.population
        )));
    }
    Ok(a
        .compartments()
        .iter()
        .zip(b.compartments().iter())
        .map(|(x, y)| integrate_abs_diff(x, y, rule))
        .sum())
}

/// One line of the quality-measure table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityRow {
    pub dataset: String,
    pub model_name: String,
    pub area: f64,
    /// May be `+inf`.
    pub neg_log_likelihood_per_pair: f64,
    pub parameter_count: usize,
}

/// Per-model averages over datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualitySummary {
    pub model_name: String,
    pub datasets: usize,
    pub area: f64,
    pub neg_log_likelihood_per_pair: f64,
    pub parameter_count: f64,
    pub best_area: bool,
    pub best_nll: bool,
    pub best_parameters: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityTable {
    pub rows: Vec<QualityRow>,
    /// One entry per model, in first-appearance order; minima are marked.
    pub summary: Vec<QualitySummary>,
}

/// Group rows by model, average across datasets and mark the minimum of each
/// measure (all tied minima are marked).
pub fn quality_table(rows: &[QualityRow]) -> QualityTable {
    let mut names: Vec<&str> = Vec::new();
    for r in rows {
        if !names.contains(&r.model_name.as_str()) {
            names.push(&r.model_name);
        }
    }
    let mut summary: Vec<QualitySummary> = names
        .iter()
        .map(|&name| {
            let group: Vec<&QualityRow> = rows.iter().filter(|r| r.model_name == name).collect();
            let k = group.len() as f64;
            QualitySummary {
                model_name: name.into(),
                datasets: group.len(),
                area: group.iter().map(|r| r.area).sum::<f64>() / k,
                neg_log_likelihood_per_pair: group.iter().map(|r| r.neg_log_likelihood_per_pair).sum::<f64>() / k,
                parameter_count: group.iter().map(|r| r.parameter_count as f64).sum::<f64>() / k,
                best_area: false,
                best_nll: false,
                best_parameters: false,
            }
        })
        .collect();

    let min_of = |f: &dyn Fn(&QualitySummary) -> f64, s: &[QualitySummary]| {
        s.iter().map(f).fold(f64::INFINITY, f64::min)
    };
    let (ma, mn, mp) = (
        min_of(&|s| s.area, &summary),
        min_of(&|s| s.neg_log_likelihood_per_pair, &summary),
        min_of(&|s| s.parameter_count, &summary),
    );
    for s in &mut summary {
        s.best_area = s.area == ma;
        s.best_nll = s.neg_log_likelihood_per_pair == mn;
        s.best_parameters = s.parameter_count == mp;
    }
    QualityTable { rows: rows.to_vec(), summary }
}

fn fmt_measure(x: f64, decimals: usize, best: bool) -> String {
    let body = if x.is_finite() { format!("{x:.decimals$}") } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    if best { format!("*{body}") } else { body }
}

impl QualityTable {
    /// Aligned plain-text rendering, models as columns; `*` marks the best
    /// (lowest) value of each measure.
    pub fn render_text(&self) -> String {
        let datasets = {
            let mut d: Vec<&str> = Vec::new();
            for r in &self.rows {
                if !d.contains(&r.dataset.as_str()) {
                    d.push(&r.dataset);
                }
            }
            d.len()
        };
        let mut header = alloc::vec![String::from("Quality measure (lower is better)")];
        header.extend(self.summary.iter().map(|s| s.model_name.clone()));
        let mut lines: Vec<Vec<String>> = alloc::vec![header];
        let mut push = |label: &str, f: &dyn Fn(&QualitySummary) -> String| {
            let mut l = alloc::vec![String::from(label)];
            l.extend(self.summary.iter().map(f));
            lines.push(l);
        };
        push("Area between SIR curves", &|s| fmt_measure(s.area, 4, s.best_area));
        push("Negative log-likelihood per node pair", &|s| {
            fmt_measure(s.neg_log_likelihood_per_pair, 4, s.best_nll)
        });
        push("Number of parameters", &|s| {
            let d = if datasets > 1 { 1 } else { 0 };
            fmt_measure(s.parameter_count, d, s.best_parameters)
        });

        let cols = lines[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| lines.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        if datasets > 1 {
            out.push_str(&format!("averaged over {datasets} datasets\n"));
        }
        for (n, l) in lines.iter().enumerate() {
            let mut row = String::new();
            for (c, cell) in l.iter().enumerate() {
                let pad = widths[c] - cell.chars().count();
                if c == 0 {
                    row.push_str(cell);
                    row.extend(core::iter::repeat_n(' ', pad));
                } else {
                    row.push_str("  ");
                    row.extend(core::iter::repeat_n(' ', pad));
                    row.push_str(cell);
                }
            }
            out.push_str(row.trim_end());
            out.push('\n');
            if n == 0 {
                let total: usize = widths.iter().sum::<usize>() + 2 * (cols - 1);
                out.extend(core::iter::repeat_n('-', total));
                out.push('\n');
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn curves(s: Vec<f64>, i: Vec<f64>, r: Vec<f64>) -> MeanCurves {
        MeanCurves { s_frac: s, i_frac: i, r_frac: r, n_runs: 1, population: 10 }
    }

    fn traj(s: &[u32], i: &[u32], r: &[u32]) -> Trajectory {
        Trajectory { s_counts: s.to_vec(), i_counts: i.to_vec(), r_counts: r.to_vec() }
    }

    #[test]
    fn mean_of_two_runs() {
        let a = traj(&[3, 3], &[1, 0], &[0, 1]);
        let b = traj(&[3, 1], &[1, 2], &[0, 1]);
        let m = mean_curves(&[a.clone(), b], 4).unwrap();
        assert_eq!(m.i_frac, vec![0.25, 0.25]);
        let single = mean_curves(&[a], 4).unwrap();
        assert_eq!(single.s_frac, vec![0.75, 0.75]);
        assert_eq!(single.r_frac, vec![0.0, 0.25]);
    }

    #[test]
    fn constant_susceptible_is_exact() {
        let runs: Vec<Trajectory> = (0..5000).map(|_| traj(&[6; 31], &[1; 31], &[0; 31])).collect();
        let m = mean_curves(&runs, 7).unwrap();
        assert!(m.s_frac.iter().all(|&s| s == 6.0 / 7.0));
    }

    #[test]
    fn mean_errors() {
        assert!(mean_curves(&[], 3).is_err());
        let a = traj(&[2, 2], &[1, 1], &[0, 0]);
        let b = traj(&[2], &[1], &[0]);
        assert!(mean_curves(&[a.clone(), b], 3).is_err());
        assert!(mean_curves(&[a], 4).is_err());
    }

    #[test]
    fn area_examples() {
        let base = curves(vec![0.9; 31], vec![0.1; 31], vec![0.0; 31]);
        assert_eq!(area_between(&base, &base, Quadrature::Trapezoid).unwrap(), 0.0);

        let shifted = curves(vec![0.8; 31], vec![0.2; 31], vec![0.0; 31]);
        let a = area_between(&base, &shifted, Quadrature::Trapezoid).unwrap();
        assert!((a - 6.0).abs() < 1e-12);

        let x = curves(vec![1.0, 0.8], vec![0.0, 0.2], vec![0.0, 0.0]);
        let y = curves(vec![1.0, 1.0], vec![0.0, 0.0], vec![0.0, 0.0]);
        assert!((area_between(&x, &y, Quadrature::Trapezoid).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(area_between(&x, &y, Quadrature::LeftRectangle).unwrap(), 0.0);
        assert!((area_between(&y, &x, Quadrature::LeftRectangle).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn area_length_mismatch() {
        let x = curves(vec![1.0, 0.8], vec![0.0, 0.2], vec![0.0, 0.0]);
        let y = curves(vec![1.0], vec![0.0], vec![0.0]);
        assert!(area_between(&x, &y, Quadrature::Trapezoid).is_err());
        let mut z = x.clone();
        z.population = 11;
        assert!(area_between(&x, &z, Quadrature::Trapezoid).is_err());
    }

    fn row(model: &str, area: f64, nll: f64, params: usize) -> QualityRow {
        QualityRow { dataset: "d".into(), model_name: model.into(), area, neg_log_likelihood_per_pair: nll, parameter_count: params }
    }

    #[test]
    fn minima_marked() {
        let rows = vec![
            row("E-R", 1.82, 0.597, 1),
            row("Degree", 0.73, 0.496, 319),
            row("SBM", 1.43, 0.504, 328),
            row("DC-SBM", 0.71, 0.385, 647),
        ];
        let t = quality_table(&rows);
        let best_area: Vec<&str> = t.summary.iter().filter(|s| s.best_area).map(|s| s.model_name.as_str()).collect();
        let best_nll: Vec<&str> = t.summary.iter().filter(|s| s.best_nll).map(|s| s.model_name.as_str()).collect();
        let best_p: Vec<&str> = t.summary.iter().filter(|s| s.best_parameters).map(|s| s.model_name.as_str()).collect();
        assert_eq!((best_area, best_nll, best_p), (vec!["DC-SBM"], vec!["DC-SBM"], vec!["E-R"]));
        let text = t.render_text();
        assert!(text.contains("*0.7100") && text.contains("*0.3850") && text.contains("*1"));
    }

    #[test]
    fn single_row_is_best_everywhere() {
        let t = quality_table(&[row("E-R", 0.5, f64::INFINITY, 1)]);
        let s = &t.summary[0];
        assert!(s.best_area && s.best_nll && s.best_parameters);
        assert!(t.render_text().contains("*inf"));
    }

    #[test]
    fn cross_dataset_average() {
        let mut a = row("E-R", 1.0, 0.5, 1);
        let mut b = row("E-R", 3.0, 0.7, 1);
        a.dataset = "x".into();
        b.dataset = "y".into();
        let t = quality_table(&[a, b]);
        assert_eq!(t.summary.len(), 1);
        assert_eq!(t.summary[0].area, 2.0);
        assert!(t.render_text().starts_with("averaged over 2 datasets"));
    }
}
