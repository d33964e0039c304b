//! Two robots, five plants, no network: Rob and Bot split the watering by
//! talking to each other, then each waters the plants it claimed.
//!
//! Prints the full conversation transcript, then the split of work.
//!
//! ```bash
//! cargo run -p robotalk --example water_plants
//! cargo run -p robotalk --example water_plants -- 42     # pick a seed
//! ```

use robotalk::sim::{run_scenario, RunOutcome, Scenario};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7);

    let scenario = Scenario::water_plants(seed);
    let report = run_scenario(&scenario).expect("builtin scenario is valid");

    println!("everything said, and what became of it:");
    print!("{}", report.transcript_text());
    println!();

    match report.outcome {
        RunOutcome::Completed => println!("all plants watered after {} ticks", report.ticks),
        RunOutcome::TickLimitExceeded => println!("ran out of time at {} ticks", report.ticks),
    }
    for (robot, count) in report.completed_counts() {
        let repo = &report.repos[&robot];
        let names: Vec<String> = repo
            .tasks()
            .filter(|t| matches!(&t.status, robotalk::TaskStatus::Completed(by) if *by == robot))
            .map(|t| t.name.clone())
            .collect();
        println!("{robot} watered {count}: {}", names.join(", "));
    }
}
