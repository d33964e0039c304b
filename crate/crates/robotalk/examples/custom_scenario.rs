//! Build a scenario from a JSON config instead of code: a lossy channel,
//! robots placed near the knee, and a scenario-specific lexicon extension.
//!
//! The same config format drives `robotalk simulate --config <file>`.
//!
//! ```bash
//! cargo run -p robotalk --example custom_scenario
//! ```

use robotalk::sim::{run_scenario, RunOutcome, Scenario};

const CONFIG: &str = r#"{
  "seed": 12,
  "mode": "volunteering",
  "noise_db": 20,
  "tick_limit": 2000,
  "agents": [
    { "id": "Rob", "groups": ["team plant"], "mode": "volunteer",
      "pose": { "x": 0.0, "y": 0.0 } },
    { "id": "Bot", "groups": ["team plant"], "mode": "volunteer",
      "pose": { "x": 130.0, "y": 0.0 } }
  ],
  "tasks": [
    { "id": 1, "name": "water the indigo plant", "target": { "x": 60.0,  "y": 40.0 } },
    { "id": 2, "name": "water the yellow plant", "target": { "x": 90.0,  "y": -30.0 } },
    { "id": 3, "name": "water the orange plant", "target": { "x": 140.0, "y": 50.0 } }
  ],
  "channel": { "confusion_prob_at_plateau": 0.05 },
  "lexicon": { "robot": ["row but"] }
}"#;

fn main() {
    let scenario = Scenario::from_json(CONFIG).expect("config is valid");
    let report = run_scenario(&scenario).expect("scenario runs");

    // At 130 cm the link is already shaky: expect losses and garbles.
    print!("{}", report.transcript_text());
    println!();
    match report.outcome {
        RunOutcome::Completed => println!("finished in {} ticks", report.ticks),
        RunOutcome::TickLimitExceeded => {
            println!("tick limit ({}) reached; partial run", report.ticks)
        }
    }
    for (robot, count) in report.completed_counts() {
        println!("{robot}: {count} tasks completed");
    }
    if !report.violations.is_empty() {
        println!("protocol notes:");
        for (tick, violation) in &report.violations {
            println!("  [{tick}] {}: {}", violation.robot, violation.detail);
        }
    }
}
