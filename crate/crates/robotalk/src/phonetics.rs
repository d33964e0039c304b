//! Text-to-speech pronunciation collapse and speech-to-text mis-transcription.
//!
//! Two data tables drive this module, both shipped under `data/`:
//!
//! * `pronunciations.txt` — words with several pronunciations collapse to a
//!   single "used" pronunciation on the speech path, one record per line:
//!   `word|pronunciation|...|used`.
//! * `confusions.txt` — protocol keywords and the wrong phrases a transcriber
//!   produced for them, with observed counts: `keyword|wrong phrase|count`.
//!
//! The [`AlternativeLexicon`] inverts the confusion table: once a wrong
//! phrase is registered as an alternative of its keyword, a garbled utterance
//! can be repaired before it is parsed.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use rand::Rng;
use thiserror::Error;

const PRONUNCIATIONS_DATA: &str = include_str!("../data/pronunciations.txt");
const CONFUSIONS_DATA: &str = include_str!("../data/confusions.txt");

/// The reference table rows, kept in code so the shipped data files can be
/// validated against them row for row.
pub mod reference {
    /// Homophones: word, possible pronunciations, used pronunciation.
    pub const PRONUNCIATIONS: [(&str, &[&str], &str); 14] = [
        ("read", &["r-ehd", "r-eed"], "r-eed"),
        ("bass", &["b-ass", "b-ase"], "b-ase"),
        ("row", &["r-oh", "r-ow"], "r-oh"),
        ("bow", &["b-ow", "b-oh"], "b-oh"),
        ("tear", &["t-e-rh", "t-ee-r"], "t-e-rh"),
        ("live", &["l-iv", "l-eye-ve"], "l-eye-ve"),
        ("wind", &["w-in-d", "w-eye-nd"], "w-in-d"),
        ("wound", &["w-oo-nd", "w-ow-nd"], "w-oo-nd"),
        ("close", &["cl-oh-s", "cl-oh-ze"], "cl-oh-s"),
        ("excuse", &["eh-cs-oos", "eh-cs-use"], "eh-cs-oos"),
        ("polish", &["p-oh-l-i-sh", "p-o-l-i-sh"], "p-o-l-i-sh"),
        ("lead", &["l-ed", "l-eed"], "l-eed"),
        ("dove", &["d-oh-ve", "d-uh-ve"], "d-uh-ve"),
        ("graduate", &["g-rad-u-ate", "g-rad-u-at"], "g-rad-u-at"),
    ];

    /// Observed mis-transcriptions: keyword, wrong phrase, count.
    pub const CONFUSIONS: [(&str, &str, u32); 6] = [
        ("Indigo", "in the go", 3),
        ("Indigo", "him to go", 4),
        ("Indigo", "do it again", 3),
        ("Indigo", "you to know", 1),
        ("Yellow", "you know", 2),
        ("Orange", "a range", 1),
    ];
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PhoneticsError {
    #[error("bad table row at line {line}: {reason}")]
    BadRow { line: usize, reason: String },
    #[error("phrase {phrase:?} is already an alternative of {existing:?}, cannot also map to {conflicting:?}")]
    AmbiguousAlternative {
        phrase: String,
        existing: String,
        conflicting: String,
    },
}

/// One word's pronunciations: everything it could sound like, and the one
/// the speech engine actually uses regardless of meaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PronunciationEntry {
    pub possible: Vec<String>,
    pub used: String,
}

/// Word → pronunciation table. Immutable after construction.
#[derive(Debug, Clone, Default)]
pub struct PronunciationTable {
    entries: BTreeMap<String, PronunciationEntry>,
}

impl PronunciationTable {
    /// Parse `word|pronunciation|...|used` records, one per line.
    pub fn parse(text: &str) -> Result<Self, PhoneticsError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('|').map(str::trim).collect();
            if fields.len() < 3 {
                return Err(PhoneticsError::BadRow {
                    line: i + 1,
                    reason: "expected word|pronunciation|...|used".into(),
                });
            }
            let word = fields[0].to_ascii_lowercase();
            let used = fields[fields.len() - 1].to_string();
            let possible: Vec<String> = fields[1..fields.len() - 1]
                .iter()
                .map(|s| s.to_string())
                .collect();
            if !possible.contains(&used) {
                return Err(PhoneticsError::BadRow {
                    line: i + 1,
                    reason: format!("used pronunciation {used:?} not among the possible ones"),
                });
            }
            entries.insert(word, PronunciationEntry { possible, used });
        }
        Ok(PronunciationTable { entries })
    }

    /// The table shipped with the crate.
    pub fn builtin() -> &'static PronunciationTable {
        static TABLE: OnceLock<PronunciationTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            PronunciationTable::parse(PRONUNCIATIONS_DATA).expect("builtin pronunciation table")
        })
    }

    /// The pronunciation the speech engine emits for `word`: the table's
    /// used pronunciation when the word is listed, otherwise the lowercased
    /// word itself.
    pub fn pronounce(&self, word: &str) -> String {
        let key = word.to_ascii_lowercase();
        match self.entries.get(&key) {
            Some(entry) => entry.used.clone(),
            None => key,
        }
    }

    pub fn get(&self, word: &str) -> Option<&PronunciationEntry> {
        self.entries.get(&word.to_ascii_lowercase())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &PronunciationEntry)> {
        self.entries.iter()
    }
}

/// Keyword → observed wrong phrases with counts. Immutable after construction.
#[derive(Debug, Clone, Default)]
pub struct ConfusionTable {
    entries: BTreeMap<String, Vec<(String, u32)>>,
}

impl ConfusionTable {
    /// Parse `keyword|wrong phrase|count` records, one per line.
    pub fn parse(text: &str) -> Result<Self, PhoneticsError> {
        let mut entries: BTreeMap<String, Vec<(String, u32)>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('|').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(PhoneticsError::BadRow {
                    line: i + 1,
                    reason: "expected keyword|wrong phrase|count".into(),
                });
            }
            let keyword = fields[0].to_ascii_lowercase();
            let phrase = fields[1].to_ascii_lowercase();
            let count: u32 = fields[2].parse().map_err(|_| PhoneticsError::BadRow {
                line: i + 1,
                reason: format!("count {:?} is not a positive integer", fields[2]),
            })?;
            if count == 0 {
                return Err(PhoneticsError::BadRow {
                    line: i + 1,
                    reason: "count must be positive".into(),
                });
            }
            if phrase == keyword {
                return Err(PhoneticsError::BadRow {
                    line: i + 1,
                    reason: format!("keyword {keyword:?} listed as its own wrong phrase"),
                });
            }
            entries.entry(keyword).or_default().push((phrase, count));
        }
        Ok(ConfusionTable { entries })
    }

    /// The table shipped with the crate.
    pub fn builtin() -> &'static ConfusionTable {
        static TABLE: OnceLock<ConfusionTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            ConfusionTable::parse(CONFUSIONS_DATA).expect("builtin confusion table")
        })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(&word.to_ascii_lowercase())
    }

    pub fn wrong_phrases(&self, keyword: &str) -> Option<&[(String, u32)]> {
        self.entries
            .get(&keyword.to_ascii_lowercase())
            .map(Vec::as_slice)
    }

    pub fn keywords(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }

    /// Transcribe one word. Without a confusion event, or for a word that is
    /// not a listed keyword, the word passes through unchanged. Otherwise a
    /// wrong phrase is drawn with probability proportional to its count.
    pub fn sample_transcription<R: Rng + ?Sized>(
        &self,
        word: &str,
        confusion_event: bool,
        rng: &mut R,
    ) -> String {
        if !confusion_event {
            return word.to_string();
        }
        let Some(phrases) = self.entries.get(&word.to_ascii_lowercase()) else {
            return word.to_string();
        };
        let total: u32 = phrases.iter().map(|(_, c)| c).sum();
        let mut draw = rng.random_range(0..total);
        for (phrase, count) in phrases {
            if draw < *count {
                return phrase.clone();
            }
            draw -= count;
        }
        unreachable!("draw bounded by the total weight")
    }
}

/// Canonical keyword → the alternative phrases that should be read back as
/// that keyword. Alternatives are pairwise disjoint across keywords: a
/// phrase that could mean two different keywords is a construction error.
#[derive(Debug, Clone, Default)]
pub struct AlternativeLexicon {
    // token sequence of the alternative → canonical keyword
    by_phrase: BTreeMap<Vec<String>, String>,
    max_phrase_len: usize,
}

impl AlternativeLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build the default lexicon from a confusion table: every observed
    /// wrong phrase becomes an alternative of its keyword.
    pub fn from_confusions(table: &ConfusionTable) -> Result<Self, PhoneticsError> {
        let mut lexicon = AlternativeLexicon::new();
        for keyword in table.keywords() {
            for (phrase, _) in table.wrong_phrases(keyword).unwrap_or(&[]) {
                lexicon.add_alternative(keyword, phrase)?;
            }
        }
        Ok(lexicon)
    }

    /// The lexicon derived from the builtin confusion table.
    pub fn builtin() -> &'static AlternativeLexicon {
        static LEXICON: OnceLock<AlternativeLexicon> = OnceLock::new();
        LEXICON.get_or_init(|| {
            AlternativeLexicon::from_confusions(ConfusionTable::builtin()).expect("builtin lexicon")
        })
    }

    /// Register `phrase` as an alternative of `keyword`.
    pub fn add_alternative(&mut self, keyword: &str, phrase: &str) -> Result<(), PhoneticsError> {
        let keyword = keyword.to_ascii_lowercase();
        let tokens: Vec<String> = phrase
            .split_whitespace()
            .map(|t| t.to_ascii_lowercase())
            .collect();
        if tokens.is_empty() {
            return Err(PhoneticsError::BadRow {
                line: 0,
                reason: "empty alternative phrase".into(),
            });
        }
        if let Some(existing) = self.by_phrase.get(&tokens) {
            if *existing != keyword {
                return Err(PhoneticsError::AmbiguousAlternative {
                    phrase: tokens.join(" "),
                    existing: existing.clone(),
                    conflicting: keyword,
                });
            }
            return Ok(());
        }
        self.max_phrase_len = self.max_phrase_len.max(tokens.len());
        self.by_phrase.insert(tokens, keyword);
        Ok(())
    }

    pub fn keywords(&self) -> BTreeSet<&str> {
        self.by_phrase.values().map(String::as_str).collect()
    }

    /// Map a phrase back to its canonical keyword: the keyword itself and
    /// every registered alternative recover; anything else is no match.
    pub fn recover_keyword(&self, phrase: &str) -> Option<&str> {
        let tokens: Vec<String> = phrase
            .split_whitespace()
            .map(|t| t.to_ascii_lowercase())
            .collect();
        if tokens.len() == 1 {
            let word = tokens[0].as_str();
            if self.by_phrase.values().any(|k| k == word) {
                // A canonical keyword maps to itself.
                return self
                    .by_phrase
                    .values()
                    .find(|k| k.as_str() == word)
                    .map(String::as_str);
            }
        }
        self.by_phrase.get(&tokens).map(String::as_str)
    }

    /// Repair a whole utterance: scan left to right and replace every
    /// registered alternative (longest match first) with its keyword.
    /// Untouched words keep their original spelling.
    pub fn recover_text(&self, text: &str) -> String {
        let words: Vec<&str> = text.split_whitespace().collect();
        let lower: Vec<String> = words.iter().map(|w| w.to_ascii_lowercase()).collect();
        let mut out: Vec<String> = Vec::with_capacity(words.len());
        let mut i = 0;
        while i < words.len() {
            let mut replaced = false;
            let longest = self.max_phrase_len.min(words.len() - i);
            for len in (1..=longest).rev() {
                let window = lower[i..i + len].to_vec();
                if let Some(keyword) = self.by_phrase.get(&window) {
                    out.push(keyword.clone());
                    i += len;
                    replaced = true;
                    break;
                }
            }
            if !replaced {
                out.push(words[i].to_string());
                i += 1;
            }
        }
        out.join(" ")
    }
}

/// The spoken surface form of a text: its words plus the pronunciation key
/// the speech engine would emit for each word.
#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    words: Vec<String>,
    keys: Vec<String>,
}

impl Utterance {
    /// Speak `text` through the given pronunciation table.
    pub fn speak(text: &str, table: &PronunciationTable) -> Utterance {
        let words: Vec<String> = text.split_whitespace().map(str::to_string).collect();
        let keys = words
            .iter()
            .map(|w| table.pronounce(w.trim_matches(|c: char| !c.is_ascii_alphanumeric())));
        Utterance {
            keys: keys.collect(),
            words,
        }
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn pronunciation_keys(&self) -> &[String] {
        &self.keys
    }

    /// The utterance as plain text.
    pub fn text(&self) -> String {
        self.words.join(" ")
    }
}
