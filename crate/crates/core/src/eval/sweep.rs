use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{zero_shot_protocol, EvalError, ZeroShotConfig, ZeroShotMethod};
use crate::corpus::GoldLexicon;
use crate::xgraph::CrossModalGraph;
use crate::TrainConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub deltas: Vec<f64>,
    pub layers: Vec<usize>,
    pub lambdas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub layers: usize,
    pub lambda_align: f64,
    pub mean: f64,
    pub std: f64,
    pub trials: usize,
}

/// Zero-shot accuracy of the aligned model for every grid cell, in
/// `delta`, then `layers`, then `lambda` order. Every cell reuses the trial
/// seeds of `base`, so cells differ only in their hyperparameters.
pub fn hyperparameter_sweep(
    graph: &CrossModalGraph,
    gold: &GoldLexicon,
    base: &ZeroShotConfig,
    grid: &SweepGrid,
) -> Result<Vec<SweepRow>, EvalError> {
    let mut rows = Vec::new();
    for &delta in &grid.deltas {
        for &layers in &grid.layers {
            for &lambda_align in &grid.lambdas {
                let config = ZeroShotConfig {
                    methods: vec![ZeroShotMethod::Ours],
                    train: TrainConfig {
                        delta,
                        layers,
                        lambda_align,
                        ..base.train.clone()
                    },
                    ..base.clone()
                };
                let report = zero_shot_protocol(graph, gold, &config)?;
                let ours = &report.methods[ZeroShotMethod::Ours.name()];
                log::info!(
                    "sweep delta={delta} layers={layers} lambda={lambda_align}: {:.2} ± {:.2}",
                    ours.mean,
                    ours.std
                );
                rows.push(SweepRow {
                    delta,
                    layers,
                    lambda_align,
                    mean: ours.mean,
                    std: ours.std,
                    trials: ours.trials,
                });
            }
        }
    }
    Ok(rows)
}

/// CSV `delta,layers,lambda_align,mean,std,trials`.
pub fn write_sweep_csv<W: Write + ?Sized>(out: &mut W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(out, "delta,layers,lambda_align,mean,std,trials")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.delta, r.layers, r.lambda_align, r.mean, r.std, r.trials
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Episode;

    #[test]
    fn single_cell_matches_protocol() {
        let mut g = CrossModalGraph::new(4, 4);
        let mut gold = GoldLexicon::new();
        for o in 0..4u32 {
            gold.insert(o, [o]).unwrap();
            g.ingest_episode(&Episode::new(vec![o, (o + 1) % 4], vec![o, (o + 1) % 4]), 2)
                .unwrap();
        }
        let base = ZeroShotConfig {
            z: 3,
            trials: 2,
            train: TrainConfig {
                dim: 4,
                hidden: 4,
                steps: 10,
                ..TrainConfig::default()
            },
            ..ZeroShotConfig::default()
        };
        let grid = SweepGrid {
            deltas: vec![0.3],
            layers: vec![2],
            lambdas: vec![1.6],
        };
        let rows = hyperparameter_sweep(&g, &gold, &base, &grid).unwrap();
        let direct = zero_shot_protocol(
            &g,
            &gold,
            &ZeroShotConfig {
                methods: vec![ZeroShotMethod::Ours],
                train: TrainConfig {
                    layers: 2,
                    ..base.train.clone()
                },
                ..base.clone()
            },
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mean, direct.methods["ours"].mean);

        let mut csv = Vec::new();
        write_sweep_csv(&mut csv, &rows).unwrap();
        assert!(String::from_utf8(csv)
            .unwrap()
            .starts_with("delta,layers,lambda_align,mean,std,trials\n0.3,2,1.6,"));
    }
}
