//! Trains the recurrent embedder with a margin boost on the default
//! simulated preset and reports holdout F1 at the full window and at a few
//! shorter prefixes.
//!
//!     cargo run --release --example train_chemtime -- [seed]

use std::time::Instant;

use chemtime::chemtime::{fit_boost, train, Boost, EmbeddingTable, HyperParams};
use chemtime::simgen::{generate_dataset, SimConfig};
use chemtime::{f1_score, seconds_to_steps};

fn main() -> chemtime::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let cfg = SimConfig::preset(0, seed);
    let (train_set, test_set) = generate_dataset(&cfg)?;
    let table = EmbeddingTable::unit_circle(&train_set.analyte_names);

    let start = Instant::now();
    let hp = HyperParams {
        seed,
        ..Default::default()
    };
    let model = train(&train_set, &table, &hp)?;
    let margin = fit_boost(&model, &train_set)?;
    let model = model.with_boost(Boost::Margin(margin));
    println!("trained in {:.1}s", start.elapsed().as_secs_f64());
    println!(
        "loss: first epoch {:.4}, last epoch {:.4}",
        model.training_loss.first().unwrap_or(&f64::NAN),
        model.training_loss.last().unwrap_or(&f64::NAN)
    );

    let labels = test_set.labels();
    for secs in [5.0, 3.0, 2.0, 1.5, 1.25] {
        let len = seconds_to_steps(secs, cfg.sample_rate_hz)?;
        let preds = test_set
            .samples
            .iter()
            .map(|s| model.predict(s, len).map(|p| p.label))
            .collect::<chemtime::Result<Vec<_>>>()?;
        println!("window {secs:.2}s ({len} steps): F1 {:.3}", f1_score(&preds, &labels)?);
    }
    Ok(())
}
