use serde::{Deserialize, Serialize};

use super::sweep::{ConfigSummary, Quartiles};
use super::ExperimentError;
use crate::stats::{dummy_code, ols_fit, OlsFit};

/// One of the four generation parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    Holistic,
    Synonyms,
    Ungrounded,
    Paraphrases,
}

impl Factor {
    pub const ALL: [Factor; 4] = [
        Factor::Holistic,
        Factor::Synonyms,
        Factor::Ungrounded,
        Factor::Paraphrases,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Factor::Holistic => "h",
            Factor::Synonyms => "s",
            Factor::Ungrounded => "u",
            Factor::Paraphrases => "p",
        }
    }

    fn position(&self) -> usize {
        *self as usize
    }
}

/// Regresses per-run correlation on dummy-coded `h`, `s`, `u`, `p`, with the
/// lowest level of each factor as baseline. Baselines and failed runs are
/// left out.
pub fn fit_factor_model(summaries: &[ConfigSummary]) -> Result<OlsFit, ExperimentError> {
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for summary in summaries {
        let Some(levels) = summary.key.levels() else {
            continue;
        };
        for result in summary.results() {
            rows.push(levels.iter().map(usize::to_string).collect::<Vec<_>>());
            y.push(result.r);
        }
    }
    if rows.is_empty() {
        return Err(ExperimentError::NoData);
    }
    let baselines: Vec<String> = (0..4)
        .map(|f| {
            rows.iter()
                .map(|r| r[f].parse::<usize>().expect("numeric level"))
                .min()
                .expect("rows non-empty")
                .to_string()
        })
        .collect();
    let names: Vec<&str> = Factor::ALL.iter().map(Factor::name).collect();
    let baseline_refs: Vec<&str> = baselines.iter().map(String::as_str).collect();
    let design = dummy_code(&names, &rows, &baseline_refs)?;
    Ok(ols_fit(&design, &y)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalQuartiles {
    pub level: usize,
    /// Number of significant cells at this level.
    pub cells: usize,
    pub quartiles: Quartiles,
}

/// Quartiles of per-cell mean correlation at each level of `factor`, over
/// significant grid cells only. Levels without a significant cell are omitted.
pub fn marginal_quartiles(summaries: &[ConfigSummary], factor: Factor) -> Vec<MarginalQuartiles> {
    let mut by_level: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
    for s in summaries.iter().filter(|s| s.significant) {
        if let (Some(levels), Some(r)) = (s.key.levels(), s.mean_r) {
            by_level.entry(levels[factor.position()]).or_default().push(r);
        }
    }
    by_level
        .into_iter()
        .map(|(level, rs)| MarginalQuartiles {
            level,
            cells: rs.len(),
            quartiles: Quartiles::of(&rs).expect("non-empty"),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::sweep::{aggregate_runs, ConfigKey, RunRecord};
    use crate::seed::rng_from_seed;
    use crate::stats::MantelResult;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn normal(rng: &mut impl Rng, sd: f64) -> f64 {
        sd * rng.sample::<f64, _>(StandardNormal)
    }

    fn synthetic(effect: impl Fn([usize; 4]) -> f64, sd: f64, runs: usize, seed: u64) -> Vec<ConfigSummary> {
        let mut rng = rng_from_seed(seed);
        crate::experiments::SweepGrid::default()
            .keys()
            .into_iter()
            .map(|key| {
                let levels = key.levels().unwrap();
                let records = (0..runs)
                    .map(|run| RunRecord {
                        run,
                        seed: 0,
                        n_items: 32,
                        result: Some(MantelResult {
                            r: effect(levels) + normal(&mut rng, sd),
                            p_value: 0.01,
                            z_score: 3.0,
                            permutations: 99,
                            n: 32,
                        }),
                        error: None,
                    })
                    .collect();
                aggregate_runs(key, records, 0.05)
            })
            .collect()
    }

    const PLANTED: [(&str, f64); 12] = [
        ("(Intercept)", 0.4),
        ("h=2", -0.02),
        ("h=3", -0.06),
        ("h=4", -0.11),
        ("h=5", -0.2),
        ("s=2", -0.1),
        ("s=3", -0.14),
        ("u=1", -0.1),
        ("u=2", -0.13),
        ("u=3", -0.15),
        ("p=2", 0.03),
        ("p=3", 0.04),
    ];

    fn planted_effect([h, s, u, p]: [usize; 4]) -> f64 {
        let lookup = |name: String| PLANTED.iter().find(|(n, _)| *n == name).map_or(0.0, |e| e.1);
        0.4 + lookup(format!("h={h}")) + lookup(format!("s={s}")) + lookup(format!("u={u}"))
            + lookup(format!("p={p}"))
    }

    #[test]
    fn recovers_planted_coefficients() {
        // 180 cells x 50 runs = 9000 rows, noise sd 0.01
        let summaries = synthetic(planted_effect, 0.01, 50, 11);
        let fit = fit_factor_model(&summaries).unwrap();
        assert_eq!(fit.n_obs, 9000);
        assert_eq!(fit.predictors.len(), 12);
        for (name, value) in PLANTED {
            let p = fit.predictor(name).unwrap();
            assert!(
                (p.estimate - value).abs() < 3.0 * p.std_error,
                "{name}: {} vs {value} (se {})",
                p.estimate,
                p.std_error
            );
        }
        assert!(fit.residuals.iter().sum::<f64>().abs() < 1e-8);
    }

    #[test]
    fn null_effects_rarely_reach_t_four() {
        let mut clean = 0;
        for trial in 0..20 {
            let summaries = synthetic(|_| 0.3, 0.05, 5, 100 + trial);
            let fit = fit_factor_model(&summaries).unwrap();
            if fit.predictors[1..].iter().all(|p| p.t_value.abs() <= 4.0) {
                clean += 1;
            }
        }
        assert!(clean >= 19, "{clean}/20");
    }

    #[test]
    fn baselines_and_failures_are_excluded() {
        let mut summaries = synthetic(planted_effect, 0.01, 3, 2);
        summaries.push(aggregate_runs(
            ConfigKey::Baseline(crate::langgen::BaselineKind::FixedLength),
            vec![],
            0.05,
        ));
        assert_eq!(fit_factor_model(&summaries).unwrap().n_obs, 540);
        assert!(matches!(fit_factor_model(&[]), Err(ExperimentError::NoData)));
    }

    #[test]
    fn marginals_use_significant_cells() {
        let mut summaries = synthetic(planted_effect, 0.0, 1, 0);
        for s in summaries.iter_mut().filter(|s| s.key.levels().unwrap()[0] == 5) {
            s.significant = false;
        }
        let by_h = marginal_quartiles(&summaries, Factor::Holistic);
        assert_eq!(by_h.iter().map(|m| m.level).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert!(by_h.iter().all(|m| m.cells == 36));
        assert!(by_h.windows(2).all(|w| w[1].quartiles.q2 < w[0].quartiles.q2));
    }
}
