//! Split benchmark over several simulated presets, followed by average
//! ranks and the inference-time frontier.
//!
//!     cargo run --release --example benchmark -- [presets] [jobs]

use chemtime::chemtime::HyperParams;
use chemtime::eval::{average_ranks, frontier_from_records, make_splits, run_benchmark, write_records, BenchmarkData};
use chemtime::simgen::{generate_dataset, SimConfig};
use chemtime::{Learner, ModelSpec};

fn main() -> chemtime::Result<()> {
    let mut args = std::env::args().skip(1);
    let presets: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let jobs = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let data = (0..presets)
        .map(|p| {
            let cfg = SimConfig::preset(p, 0);
            let (train, test) = generate_dataset(&cfg)?;
            let splits = make_splits(&train, 4, 0)?;
            Ok(BenchmarkData {
                name: cfg.name,
                train,
                test,
                splits,
            })
        })
        .collect::<chemtime::Result<Vec<_>>>()?;

    let mut roster = ModelSpec::default_roster(0);
    roster[0] = ModelSpec::chemtime(HyperParams {
        epochs: 20,
        ..Default::default()
    });
    let learners: Vec<&dyn Learner> = roster.iter().map(|m| m as &dyn Learner).collect();
    let records = run_benchmark(&learners, &data, jobs)?;
    write_records(&records, std::io::stdout())?;

    println!("\naverage rank");
    let mut ranks: Vec<_> = average_ranks(&records)?.into_iter().collect();
    ranks.sort_by(|a, b| a.1.total_cmp(&b.1));
    for (m, r) in ranks {
        println!("  {m:<16} {r:.3}");
    }

    println!("\nmean inference seconds vs F1");
    for p in frontier_from_records(&records) {
        let mark = if p.on_frontier { "*" } else { " " };
        println!("  {mark} {:<16} {:>10.5} {:.3}", p.model, p.infer_seconds, p.f1);
    }
    Ok(())
}
