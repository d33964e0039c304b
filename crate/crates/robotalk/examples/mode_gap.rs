//! Coordinating vs volunteering, side by side.
//!
//! In a coordinating exchange the commanded robot executes where it stands,
//! so every utterance crosses the initial separation. A volunteering robot
//! drives away from its teammate to do the work, so its completion report
//! has farther to travel — and the volunteering curve starts dropping well
//! before the pivotal distance.
//!
//! ```bash
//! cargo run --release -p robotalk --example mode_gap
//! ```

use robotalk::sim::{mode_experiment, ModeParams, ScenarioMode};

fn main() {
    let run = |mode| {
        mode_experiment(&ModeParams {
            mode,
            min_distance_cm: 10.0,
            max_distance_cm: 160.0,
            step_cm: 10.0,
            trials_per_distance: 100,
            seed: 7,
            jobs: 4,
            ..ModeParams::default()
        })
        .expect("parameters are valid")
    };
    let coordinating = run(ScenarioMode::Coordinating);
    let volunteering = run(ScenarioMode::Volunteering);

    println!("distance_cm  coordinating  volunteering");
    for (c, v) in coordinating.iter().zip(&volunteering) {
        let bar = |rate: f64| "#".repeat((rate * 20.0).round() as usize);
        println!(
            "{:>11}  {:>12.2}  {:>12.2}   {:<20} {}",
            c.distance_cm,
            c.rate(),
            v.rate(),
            bar(c.rate()),
            bar(v.rate()),
        );
    }
    println!("\n(left bars: coordinating, right: volunteering, 100 trials/point)");
}
