//! How much range the alternative-phrase lexicon buys.
//!
//! Command recognition is measured on delivered utterances; without the
//! lexicon, a mis-transcribed keyword ("indigo" heard as "in the go") sinks
//! the command, and mis-transcriptions get more likely as the signal
//! weakens. Registering the known wrong phrases as alternatives repairs
//! them, extending the distance over which commands are understood.
//!
//! ```bash
//! cargo run --release -p robotalk --example lexicon_rescue
//! ```

use robotalk::sim::{lexicon_ablation, recognition_rate, AblationParams};

fn main() {
    let params = AblationParams {
        seed: 7,
        ..AblationParams::default()
    };

    println!("command recognition on delivered utterances:");
    println!("distance_cm  without_lexicon  with_lexicon");
    for distance in [10.0, 80.0, 140.0, 160.0, 180.0, 200.0] {
        let without = recognition_rate(&params, distance, false).unwrap();
        let with = recognition_rate(&params, distance, true).unwrap();
        println!("{distance:>11}  {without:>15.3}  {with:>12.3}");
    }
    println!();

    let target = params.p_target;
    let without = lexicon_ablation(&params, false).unwrap();
    let with = lexicon_ablation(&params, true).unwrap();
    println!(
        "max distance sustaining {:.0}% recognition:",
        target * 100.0
    );
    println!("  without lexicon: {without:>6.1} cm");
    println!("  with lexicon:    {with:>6.1} cm");
}
