//! Shrinking-window survival contest on one simulated preset, in the plain
//! and the inference-biased variants.
//!
//!     cargo run --release --example survival -- [epochs] [noise_sigma] [hidden]

use chemtime::chemtime::HyperParams;
use chemtime::eval::{make_splits, survival, BenchmarkData, SurvivalConfig, SurvivalMode, DEFAULT_SPLITS};
use chemtime::simgen::{generate_dataset, SimConfig};
use chemtime::{Learner, ModelSpec};

fn main() -> chemtime::Result<()> {
    let epochs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let mut cfg = SimConfig::preset(0, 0);
    if let Some(noise) = std::env::args().nth(2).and_then(|s| s.parse().ok()) {
        cfg.array_spec.noise_sigma = noise;
    }
    let (train, test) = generate_dataset(&cfg)?;
    let splits = make_splits(&train, DEFAULT_SPLITS, 0)?;
    let data = BenchmarkData {
        name: cfg.name.clone(),
        train,
        test,
        splits,
    };

    let mut roster = ModelSpec::default_roster(0);
    roster[0] = ModelSpec::chemtime(HyperParams {
        hidden: std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(16),
        epochs,
        ..Default::default()
    });
    let learners: Vec<&dyn Learner> = roster.iter().map(|m| m as &dyn Learner).collect();

    for mode in [SurvivalMode::Plain, SurvivalMode::InferenceBiased] {
        let table = survival(&learners, &data, &SurvivalConfig { mode, ..Default::default() })?;
        println!("{mode:?}");
        for l in &learners {
            let name = l.name();
            println!(
                "  {name:<16} survived to {:>6}  eliminated at {:>6}",
                table.survived_to(&name).map_or("-".into(), |w| format!("{w:.2}s")),
                table.eliminated_at(&name).map_or("-".into(), |w| format!("{w:.2}s")),
            );
        }
    }
    Ok(())
}
