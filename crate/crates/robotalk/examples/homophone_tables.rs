//! The speech-side error model: homophone pronunciation collapse, keyword
//! mis-transcription sampling, and recovery through the alternative-phrase
//! lexicon.
//!
//! ```bash
//! cargo run -p robotalk --example homophone_tables
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robotalk::phonetics::{AlternativeLexicon, ConfusionTable, PronunciationTable, Utterance};

fn main() {
    let pronunciations = PronunciationTable::builtin();
    let confusions = ConfusionTable::builtin();
    let lexicon = AlternativeLexicon::builtin();

    println!("homophones collapse to one used pronunciation:");
    for word in ["read", "wind", "close", "dove"] {
        let entry = pronunciations.get(word).unwrap();
        println!(
            "  {word:9} possible [{}]  ->  used {}",
            entry.possible.join(", "),
            entry.used
        );
    }
    println!("  (and {} more rows)\n", pronunciations.len() - 4);

    println!("an utterance carries its pronunciation keys:");
    let utterance = Utterance::speak("read the wind close to the dove", pronunciations);
    for (word, key) in utterance.words().iter().zip(utterance.pronunciation_keys()) {
        println!("  {word:6} -> {key}");
    }
    println!();

    println!("keyword confusions, sampled with the observed frequencies:");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for keyword in ["indigo", "yellow", "orange"] {
        let samples: Vec<String> = (0..6)
            .map(|_| confusions.sample_transcription(keyword, true, &mut rng))
            .collect();
        println!("  {keyword:7} -> {}", samples.join(" | "));
    }
    println!();

    println!("the lexicon maps known wrong phrases back to their keyword:");
    for phrase in ["in the go", "you know", "a range", "indigo", "purple"] {
        match lexicon.recover_keyword(phrase) {
            Some(keyword) => println!("  {phrase:12} -> {keyword}"),
            None => println!("  {phrase:12} -> (no match)"),
        }
    }
    println!();

    let garbled = "hey robot hi rob i am bot water the in the go plant";
    println!("whole-utterance repair:");
    println!("  heard:     {garbled}");
    println!("  recovered: {}", lexicon.recover_text(garbled));
}
