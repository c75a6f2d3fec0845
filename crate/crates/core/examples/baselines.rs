//! Fits every competitor family on one simulated preset and reports holdout
//! F1 with training and inference times, including both ways of lifting a
//! univariate classifier to multichannel input.
//!
//!     cargo run --release --example baselines -- [preset]

use chemtime::eval::evaluate;
use chemtime::simgen::{generate_dataset, SimConfig};
use chemtime::ModelSpec;

fn main() -> chemtime::Result<()> {
    let preset = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let (train, test) = generate_dataset(&SimConfig::preset(preset, 0))?;
    let roster = ModelSpec::default_roster(0).into_iter().skip(1).chain([
        ModelSpec::Oracle,
        ModelSpec::CoinFlip { seed: 0 },
    ]);
    println!("{:<16} {:>6} {:>10} {:>10}", "model", "F1", "train s", "infer s");
    for spec in roster {
        let o = evaluate(&spec, &train, &test)?;
        println!("{:<16} {:>6.3} {:>10.4} {:>10.4}", spec.to_string(), o.f1, o.train_seconds, o.infer_seconds);
    }
    Ok(())
}
