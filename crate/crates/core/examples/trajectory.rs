//! Follows the decision distance of a trained embedder step by step, picks
//! the earliest reliable window on a validation split and checks from which
//! prefix the classifier stops changing its mind.
//!
//!     cargo run --release --example trajectory

use chemtime::chemtime::{calibrate_early_window, fit_boost, train, Boost, EmbeddingTable, HyperParams};
use chemtime::eval::{make_splits, minimal_serial_prefix, serial_prefix};
use chemtime::simgen::{generate_dataset, SimConfig};
use chemtime::f1_score;

fn main() -> chemtime::Result<()> {
    let cfg = SimConfig::preset(0, 0);
    let (full_train, test) = generate_dataset(&cfg)?;
    let split = &make_splits(&full_train, 4, 0)?[0];
    let fit_set = full_train.subset(&split.train_ids)?;
    let validation = full_train.subset(&split.withheld_ids)?;

    let table = EmbeddingTable::unit_circle(&fit_set.analyte_names);
    let model = train(&fit_set, &table, &HyperParams::default())?;
    let model = {
        let margin = fit_boost(&model, &fit_set)?;
        model.with_boost(Boost::Margin(margin))
    };

    let sample = &test.samples[0];
    let truth = test.label_of(sample);
    let traj = model.forward(sample)?;
    let distances = traj.distances.as_deref().unwrap_or_default();
    println!("sample {} ({truth:?}), onset step {}", sample.id, sample.onset_index);
    for t in (0..traj.len()).step_by(10).chain([traj.len() - 1]) {
        let e = &traj.points[t];
        println!("  step {t:>3}  e = ({:+.3}, {:+.3})  distance {:+.3}", e[0], e[1], distances[t]);
    }

    let window = calibrate_early_window(&model, &validation, 0.8)?;
    let preds = test
        .samples
        .iter()
        .map(|s| model.predict(s, window).map(|p| p.label))
        .collect::<chemtime::Result<Vec<_>>>()?;
    println!(
        "calibrated window: {window} steps ({:.2} s), holdout F1 there {:.3}",
        window as f64 / cfg.sample_rate_hz,
        f1_score(&preds, &test.labels())?
    );

    let l0 = minimal_serial_prefix(&model, &test)?;
    println!("serial from {l0} steps ({:.2} s)", l0 as f64 / cfg.sample_rate_hz);
    assert!(serial_prefix(&model, &test, l0)?);
    Ok(())
}
