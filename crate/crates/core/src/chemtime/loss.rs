use serde::{Deserialize, Serialize};

use super::embedding::{EmbeddingTable, TargetSequence};
use crate::error::{Error, Result};

/// Default margin of the ranking hinge loss.
pub const DEFAULT_RANK_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossKind {
    Squared,
    Cosine,
    HingeRank { margin: f64 },
}

impl Default for LossKind {
    fn default() -> Self {
        LossKind::Squared
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squared" | "mse" => Ok(LossKind::Squared),
            "cosine" => Ok(LossKind::Cosine),
            "hinge_rank" | "hinge-rank" => Ok(LossKind::HingeRank {
                margin: DEFAULT_RANK_MARGIN,
            }),
            other => Err(Error::arg(format!("unknown loss kind `{other}`"))),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Loss at one step and its gradient with respect to `e`.
///
/// `label` is the table index of `y`; the ranking loss compares against
/// every other table entry.
pub fn step_loss_grad(kind: LossKind, e: &[f64], y: &[f64], label: usize, table: &EmbeddingTable) -> (f64, Vec<f64>) {
    match kind {
        LossKind::Squared => {
            let grad: Vec<f64> = e.iter().zip(y).map(|(a, b)| 2.0 * (a - b)).collect();
            let loss = e.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            (loss, grad)
        }
        LossKind::Cosine => {
            let ne = dot(e, e).sqrt();
            let ny = dot(y, y).sqrt();
            if ne == 0.0 || ny == 0.0 {
                return (0.0, vec![0.0; e.len()]);
            }
            let cos = dot(e, y) / (ne * ny);
            let grad = e
                .iter()
                .zip(y)
                .map(|(ei, yi)| -(yi / (ne * ny) - cos * ei / (ne * ne)))
                .collect();
            (1.0 - cos, grad)
        }
        LossKind::HingeRank { margin } => {
            let ey = dot(e, y);
            let mut loss = 0.0;
            let mut grad = vec![0.0; e.len()];
            for (j, v) in table.entries.values().enumerate() {
                if j == label {
                    continue;
                }
                let term = margin - ey + dot(e, v);
                if term > 0.0 {
                    loss += term;
                    for ((g, vj), yj) in grad.iter_mut().zip(v).zip(y) {
                        *g += vj - yj;
                    }
                }
            }
            (loss, grad)
        }
    }
}

/// Summed loss of an embedding trajectory against its targets.
pub fn sequence_loss(
    points: &[Vec<f64>],
    targets: &TargetSequence,
    kind: LossKind,
    table: &EmbeddingTable,
) -> Result<f64> {
    if points.len() != targets.len() {
        return Err(Error::arg(format!(
            "trajectory has {} steps, targets {}",
            points.len(),
            targets.len()
        )));
    }
    Ok(points
        .iter()
        .zip(&targets.targets)
        .zip(&targets.labels)
        .map(|((e, y), &l)| step_loss_grad(kind, e, y, l, table).0)
        .sum())
}
