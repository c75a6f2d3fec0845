//! Draws a simulated sensor-array corpus, writes it to disk and prints a
//! summary of one exposure per analyte.
//!
//!     cargo run --example simulate -- [preset] [seed] [out_dir]

use chemtime::simgen::{generate_dataset, SimConfig};
use chemtime::Dataset;

fn main() -> chemtime::Result<()> {
    let mut args = std::env::args().skip(1);
    let preset = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let out_dir = args.next().unwrap_or_else(|| std::env::temp_dir().display().to_string());

    let cfg = SimConfig::preset(preset, seed);
    let (train, test) = generate_dataset(&cfg)?;
    println!(
        "{}: {} train / {} test, {} channels, {} steps at {} Hz, onset step {}",
        cfg.name,
        train.len(),
        test.len(),
        train.n_channels(),
        train.min_len(),
        cfg.sample_rate_hz,
        train.samples[0].onset_index
    );

    for (a, name) in train.analyte_names.iter().enumerate() {
        let Some(s) = train.samples.iter().find(|s| s.concentrations[a] > 0.0) else {
            continue;
        };
        let shift: Vec<String> = s
            .channels
            .iter()
            .map(|row| format!("{:+7.0}", row[row.len() - 1] - row[0]))
            .collect();
        println!("{name} at {:5.1}%  end-start per channel: {}", s.concentrations[a], shift.join(" "));
    }

    let path = std::path::Path::new(&out_dir).join(format!("{}-train.json", cfg.name));
    train.save(&path)?;
    let back = Dataset::load(&path)?;
    assert_eq!(back, train);
    println!("wrote {}", path.display());
    Ok(())
}
