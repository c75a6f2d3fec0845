//! Trains the embedder against a user-supplied latent table under each of
//! the three sequence losses and compares holdout F1 with the plain
//! nearest-target rule and the margin boost.
//!
//!     cargo run --release --example embedding_table -- [table.json]

use std::collections::BTreeMap;

use chemtime::chemtime::{fit_boost, train, Boost, EmbeddingTable, HyperParams, LossKind, NONE_KEY};
use chemtime::simgen::{generate_dataset, SimConfig};
use chemtime::f1_score;

fn main() -> chemtime::Result<()> {
    let (train_set, test) = generate_dataset(&SimConfig::preset(1, 0))?;
    let table = match std::env::args().nth(1) {
        Some(path) => EmbeddingTable::load(path)?,
        None => {
            // a hand-made 3-d layout: the carrier gas at the origin
            let mut entries = BTreeMap::new();
            entries.insert(NONE_KEY.to_string(), vec![0.0, 0.0, 0.0]);
            entries.insert("A".to_string(), vec![1.0, 0.0, 0.0]);
            entries.insert("B".to_string(), vec![0.0, 1.0, 0.0]);
            entries.insert("C".to_string(), vec![0.0, 0.0, 1.0]);
            entries.insert("D".to_string(), vec![0.6, 0.6, 0.6]);
            EmbeddingTable::new(3, entries)?
        }
    };

    let labels = test.labels();
    for kind in ["squared", "cosine", "hinge_rank"] {
        let hp = HyperParams {
            loss_kind: kind.parse::<LossKind>()?,
            epochs: 30,
            ..Default::default()
        };
        let model = train(&train_set, &table, &hp)?;
        let margin = fit_boost(&model, &train_set)?;
        for (rule, boost) in [("nearest", Boost::NearestTarget), ("margin", Boost::Margin(margin))] {
            let m = model.clone().with_boost(boost);
            let preds = test
                .samples
                .iter()
                .map(|s| m.predict(s, s.len()).map(|p| p.label))
                .collect::<chemtime::Result<Vec<_>>>()?;
            println!("{kind:<11} {rule:<8} F1 {:.3}", f1_score(&preds, &labels)?);
        }
    }
    Ok(())
}
