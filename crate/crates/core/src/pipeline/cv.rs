use super::detector::{train_detectors, Detector};
use super::{Recording, TrainMode};
use crate::config::PipelineConfig;
use crate::dataset::Scenario;
use crate::dsp::{build_long_term, LongTermGroup};
use crate::error::{Error, Result};
use crate::evaluation::{partition, Comparison, EvalReport, EvalSummary, FoldOutcome, ObservationTag};
use crate::par;

/// One long-term group of one prepared recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObservationRef {
    pub rec: usize,
    pub group: LongTermGroup,
}

/// Every long-term group of every recording, in recording order.
pub fn observations(recs: &[Recording]) -> Vec<ObservationRef> {
    recs.iter()
        .enumerate()
        .flat_map(|(rec, r)| {
            build_long_term(r.frames.rows())
                .into_iter()
                .map(move |group| ObservationRef { rec, group })
        })
        .collect()
}

fn tags(recs: &[Recording], obs: &[ObservationRef]) -> Vec<ObservationTag> {
    obs.iter()
        .map(|o| ObservationTag {
            stream: o.rec,
            patient_id: recs[o.rec].patient_id.clone(),
            scenario: recs[o.rec].scenario,
            frames: o.group.frames(),
        })
        .collect()
}

/// Labels and scores of `test` under the detectors of one mode.
fn score_mode(
    recs: &[Recording],
    test: &[ObservationRef],
    detectors: &[Detector],
    mode: TrainMode,
) -> Result<Vec<(bool, f64)>> {
    if mode != TrainMode::PerPart {
        return detectors[0].score_observations(recs, test);
    }
    let mut out = vec![(false, 0.0); test.len()];
    for (d, s) in detectors.iter().zip(Scenario::ALL) {
        let idx: Vec<usize> = (0..test.len()).filter(|&i| recs[test[i].rec].scenario == s).collect();
        let sub: Vec<ObservationRef> = idx.iter().map(|&i| test[i]).collect();
        for (i, v) in idx.into_iter().zip(d.score_observations(recs, &sub)?) {
            out[i] = v;
        }
    }
    Ok(out)
}

/// Cross-validates each training mode over the configured partition.
///
/// Every mode sees the same folds. Reports cover all observations and each
/// scenario separately; McNemar tests compare every pair of modes on the
/// pooled test predictions. `recs` must already be prepared with the
/// configured normalisation.
pub fn cross_validate(recs: &[Recording], features: &[String], config: &PipelineConfig) -> Result<EvalSummary> {
    let modes = &config.evaluation.modes;
    if modes.is_empty() {
        return Err(Error::InvalidArgument("no training modes to evaluate".into()));
    }
    let obs = observations(recs);
    let plan = partition(
        config.evaluation.scheme,
        &tags(recs, &obs),
        config.evaluation.guard_groups,
    )?;
    let fold_results = par::map(&plan.folds, |fold| -> Result<Vec<Vec<(bool, f64)>>> {
        let train: Vec<ObservationRef> = fold.train.iter().map(|&i| obs[i]).collect();
        let test: Vec<ObservationRef> = fold.test.iter().map(|&i| obs[i]).collect();
        modes
            .iter()
            .map(|&mode| {
                let detectors = train_detectors(recs, &train, mode, features, config)
                    .map_err(|e| Error::InvalidArgument(format!("{} ({mode}): {e}", fold.name)))?;
                score_mode(recs, &test, &detectors, mode)
            })
            .collect()
    });
    let fold_results = fold_results.into_iter().collect::<Result<Vec<_>>>()?;
    let truth = |i: usize| -> bool {
        let o = &obs[i];
        let l = &recs[o.rec].labels[o.group.frames()];
        2 * l.iter().filter(|&&v| v).count() > l.len()
    };
    let mut reports = Vec::new();
    let subsets: [Option<Scenario>; 4] = [
        None,
        Some(Scenario::Part1),
        Some(Scenario::Part2),
        Some(Scenario::Part3),
    ];
    for (m, mode) in modes.iter().enumerate() {
        for subset in subsets {
            let outcomes: Vec<FoldOutcome> = plan
                .folds
                .iter()
                .zip(&fold_results)
                .map(|(fold, res)| {
                    let keep: Vec<usize> = (0..fold.test.len())
                        .filter(|&k| subset.is_none_or(|s| recs[obs[fold.test[k]].rec].scenario == s))
                        .collect();
                    FoldOutcome {
                        name: fold.name.clone(),
                        n_train: fold.train.len(),
                        test: keep.iter().map(|&k| fold.test[k]).collect(),
                        labels: keep.iter().map(|&k| truth(fold.test[k])).collect(),
                        predictions: keep.iter().map(|&k| res[m][k].0).collect(),
                        scores: keep.iter().map(|&k| res[m][k].1).collect(),
                    }
                })
                .collect();
            if outcomes.iter().all(|o| o.test.is_empty()) {
                continue;
            }
            let name = match subset {
                None => mode.to_string(),
                Some(s) => format!("{mode}-{s}"),
            };
            reports.push(EvalReport::from_folds(name, &outcomes)?);
        }
    }
    let labels: Vec<bool> = plan
        .folds
        .iter()
        .flat_map(|f| f.test.iter().map(|&i| truth(i)))
        .collect();
    let pooled = |m: usize| -> Vec<bool> { fold_results.iter().flat_map(|r| r[m].iter().map(|v| v.0)).collect() };
    let mut comparisons = Vec::new();
    for a in 0..modes.len() {
        for b in a + 1..modes.len() {
            comparisons.push(Comparison::new(
                modes[a].as_str(),
                modes[b].as_str(),
                &pooled(a),
                &pooled(b),
                &labels,
            )?);
        }
    }
    Ok(EvalSummary {
        scheme: plan.scheme,
        n_folds: plan.folds.len(),
        reports,
        comparisons,
    })
}
