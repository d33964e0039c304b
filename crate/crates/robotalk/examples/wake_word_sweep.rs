//! Wake-word detection rate vs distance: the sweep whose sharp drop marks
//! the pivotal distance (120 cm at 20 dB with the default channel).
//!
//! Prints the CSV to stdout; pipe it into a file to plot.
//!
//! ```bash
//! cargo run -p robotalk --example wake_word_sweep > wake_word.csv
//! ```

use robotalk::sim::{wake_word_experiment, write_trials_csv, WakeWordParams};

fn main() {
    let params = WakeWordParams {
        trials_per_distance: 100,
        seed: 7,
        ..WakeWordParams::default()
    };
    let results = wake_word_experiment(&params).expect("default parameters are valid");

    let comment = format!(
        "wake-word sweep seed={} noise_db={} trials_per_distance={} wake_word=\"{}\"",
        params.seed, params.noise_db, params.trials_per_distance, params.wake_word
    );
    write_trials_csv(std::io::stdout().lock(), &comment, &results).expect("stdout");

    let knee = results
        .windows(2)
        .find(|w| w[0].rate() >= 0.5 && w[1].rate() < 0.5)
        .map(|w| w[1].distance_cm);
    if let Some(d) = knee {
        eprintln!("detection rate first falls below 50% at {d} cm");
    }
}
