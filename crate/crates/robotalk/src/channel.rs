//! The simulated acoustic link between two robots.
//!
//! Delivery success is flat near the speaker and falls off sharply once the
//! separation passes the pivotal distance for the ambient noise level. The
//! curve is a logistic in distance,
//!
//! ```text
//! p(d) = plateau_success * logistic((pivotal + knee_offset - d) / knee_steepness)
//! ```
//!
//! so `p(pivotal + knee_offset)` is exactly half the plateau and the decay
//! width is set by `knee_steepness`. At 20 dB ambient noise the default
//! pivotal distance is 120 cm.
//!
//! Delivered utterances can still be mis-transcribed: each protocol keyword
//! independently suffers a confusion event whose probability starts at
//! `confusion_prob_at_plateau` and grows as delivery gets weaker, because a
//! fainter signal is also a harder one to transcribe.

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::phonetics::{ConfusionTable, Utterance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChannelError {
    #[error("no pivotal distance configured for {0} dB ambient noise")]
    UnknownNoiseLevel(i32),
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Distance- and noise-dependent delivery and transcription fidelity.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    /// Success probability on the plateau, before the knee.
    pub plateau_success: f64,
    /// The logistic midpoint sits this far past the pivotal distance.
    pub knee_offset_cm: f64,
    /// Width of the decay around the midpoint.
    pub knee_steepness_cm: f64,
    /// Per-keyword confusion probability while delivery is at the plateau.
    pub confusion_prob_at_plateau: f64,
    /// Ambient noise level (dB) → pivotal distance (cm).
    pub(crate) noise_table: BTreeMap<i32, f64>,
}

impl Default for ChannelModel {
    fn default() -> Self {
        ChannelModel {
            plateau_success: 0.95,
            knee_offset_cm: 20.0,
            knee_steepness_cm: 10.0,
            confusion_prob_at_plateau: 0.02,
            noise_table: BTreeMap::from([(20, 120.0)]),
        }
    }
}

impl ChannelModel {
    /// A channel that always delivers and never garbles.
    pub fn ideal() -> Self {
        ChannelModel {
            plateau_success: 1.0,
            knee_offset_cm: 0.0,
            knee_steepness_cm: 10.0,
            confusion_prob_at_plateau: 0.0,
            noise_table: BTreeMap::from([(20, 1e12)]),
        }
    }

    /// Set or replace the pivotal distance for one noise level.
    pub fn set_pivotal_distance(&mut self, noise_db: i32, distance_cm: f64) {
        self.noise_table.insert(noise_db, distance_cm);
    }

    pub fn pivotal_distance(&self, noise_db: i32) -> Result<f64, ChannelError> {
        self.noise_table
            .get(&noise_db)
            .copied()
            .ok_or(ChannelError::UnknownNoiseLevel(noise_db))
    }

    pub fn noise_levels(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.noise_table.iter().map(|(k, v)| (*k, *v))
    }

    /// Probability that an utterance spoken `distance_cm` away is delivered.
    /// Monotone non-increasing in distance for a fixed noise level.
    pub fn success_probability(
        &self,
        distance_cm: f64,
        noise_db: i32,
    ) -> Result<f64, ChannelError> {
        debug_assert!(distance_cm >= 0.0, "distance must be non-negative");
        let pivot = self.pivotal_distance(noise_db)?;
        let x = (pivot + self.knee_offset_cm - distance_cm) / self.knee_steepness_cm;
        Ok(self.plateau_success * logistic(x))
    }

    /// Per-keyword confusion probability at this distance: the plateau value
    /// scaled up as delivery degrades, clamped to a probability.
    pub fn confusion_probability(
        &self,
        distance_cm: f64,
        noise_db: i32,
    ) -> Result<f64, ChannelError> {
        if self.confusion_prob_at_plateau <= 0.0 {
            // Avoid 0/0 when both the base probability and p(d) underflow.
            self.pivotal_distance(noise_db)?;
            return Ok(0.0);
        }
        let p = self.success_probability(distance_cm, noise_db)?;
        let scaled = self.confusion_prob_at_plateau * (self.plateau_success / p);
        Ok(scaled.clamp(0.0, 1.0))
    }

    /// Send one utterance across the link.
    ///
    /// One draw decides delivery. On delivery, each word matching a confusion
    /// keyword independently suffers a confusion event and is replaced by a
    /// sampled wrong phrase. Lost utterances consume no further randomness
    /// and carry no garbling.
    pub fn transmit<R: Rng + ?Sized>(
        &self,
        utterance: &Utterance,
        distance_cm: f64,
        noise_db: i32,
        confusions: &ConfusionTable,
        rng: &mut R,
    ) -> Result<TransmissionOutcome, ChannelError> {
        let p = self.success_probability(distance_cm, noise_db)?;
        if !rng.random_bool(p.clamp(0.0, 1.0)) {
            return Ok(TransmissionOutcome {
                delivered: false,
                received_text: None,
                garbled_keywords: Vec::new(),
            });
        }
        let confusion_p = self.confusion_probability(distance_cm, noise_db)?;
        let mut received: Vec<String> = Vec::with_capacity(utterance.words().len());
        let mut garbled = Vec::new();
        for word in utterance.words() {
            // Punctuation is written, not spoken: "indigo," is still a keyword.
            let bare = word.trim_matches(|c: char| !c.is_ascii_alphanumeric());
            if confusions.contains(bare) && confusion_p > 0.0 && rng.random_bool(confusion_p) {
                let heard = confusions.sample_transcription(bare, true, rng);
                garbled.push((bare.to_string(), heard.clone()));
                received.push(heard);
            } else {
                received.push(word.clone());
            }
        }
        Ok(TransmissionOutcome {
            delivered: true,
            received_text: Some(received.join(" ")),
            garbled_keywords: garbled,
        })
    }
}

/// What came out of the far end of the link.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionOutcome {
    pub delivered: bool,
    /// The text as heard; present exactly when delivered.
    pub received_text: Option<String>,
    /// Keyword substitutions applied in transit: (original, received).
    pub garbled_keywords: Vec<(String, String)>,
}

impl TransmissionOutcome {
    pub fn is_garbled(&self) -> bool {
        !self.garbled_keywords.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phonetics::PronunciationTable;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn plateau_at_contact_distance() {
        let model = ChannelModel::default();
        let p = model.success_probability(0.0, 20).unwrap();
        assert!((p - 0.95).abs() < 1e-6, "p(0) = {p}");
    }

    #[test]
    fn exact_half_plateau_at_knee_midpoint() {
        // Independent evaluation: logistic(0) is exactly one half, so the
        // success probability at pivotal + offset is exactly p_max / 2.
        let model = ChannelModel::default();
        let p = model.success_probability(140.0, 20).unwrap();
        assert!((p - 0.475).abs() < 1e-9, "p(140) = {p}");
    }

    #[test]
    fn monotone_in_distance() {
        let model = ChannelModel::default();
        let p110 = model.success_probability(110.0, 20).unwrap();
        let p200 = model.success_probability(200.0, 20).unwrap();
        assert!(p110 > p200);
    }

    #[test]
    fn unknown_noise_level_is_an_error() {
        let model = ChannelModel::default();
        assert_eq!(
            model.success_probability(10.0, 35).unwrap_err(),
            ChannelError::UnknownNoiseLevel(35)
        );
    }

    #[test]
    fn wake_word_nearly_always_delivered_close_up() {
        let model = ChannelModel::default();
        let wake = Utterance::speak("hey robot", PronunciationTable::builtin());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let delivered = (0..20)
            .filter(|_| {
                model
                    .transmit(&wake, 10.0, 20, ConfusionTable::builtin(), &mut rng)
                    .unwrap()
                    .delivered
            })
            .count();
        assert!(delivered >= 18, "delivered {delivered}/20");
    }

    #[test]
    fn ten_metres_is_out_of_range() {
        // p(1000 cm) = 0.95 * logistic(-86), far below any plausible draw.
        let model = ChannelModel::default();
        let p = model.success_probability(1000.0, 20).unwrap();
        assert!(p < 1e-30);
        let u = Utterance::speak("hello out there", PronunciationTable::builtin());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let outcome = model
                .transmit(&u, 1000.0, 20, ConfusionTable::builtin(), &mut rng)
                .unwrap();
            assert!(!outcome.delivered);
            assert!(outcome.garbled_keywords.is_empty());
            assert!(outcome.received_text.is_none());
        }
    }

    #[test]
    fn forced_confusion_garbles_keywords() {
        let mut model = ChannelModel::ideal();
        model.confusion_prob_at_plateau = 1.0;
        let u = Utterance::speak("water the indigo", PronunciationTable::builtin());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let outcome = model
            .transmit(&u, 10.0, 20, ConfusionTable::builtin(), &mut rng)
            .unwrap();
        assert!(outcome.delivered);
        assert_eq!(outcome.garbled_keywords.len(), 1);
        let (original, heard) = &outcome.garbled_keywords[0];
        assert_eq!(original, "indigo");
        let received = outcome.received_text.unwrap();
        assert_eq!(received, format!("water the {heard}"));
        assert_ne!(received, "water the indigo");
    }

    #[test]
    fn empirical_delivery_rate_matches_model() {
        let model = ChannelModel::default();
        let u = Utterance::speak("hey robot", PronunciationTable::builtin());
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for (d, expected) in [(60.0, 0.949_681), (140.0, 0.475), (170.0, 0.045_06)] {
            let n = 10_000u32;
            let delivered = (0..n)
                .filter(|_| {
                    model
                        .transmit(&u, d, 20, ConfusionTable::builtin(), &mut rng)
                        .unwrap()
                        .delivered
                })
                .count() as f64;
            let rate = delivered / f64::from(n);
            assert!(
                (rate - expected).abs() < 0.02,
                "d={d}: {rate} vs {expected}"
            );
        }
    }

    #[test]
    fn confusion_probability_scales_and_clamps() {
        let model = ChannelModel::default();
        let near = model.confusion_probability(0.0, 20).unwrap();
        assert!((near - 0.02).abs() < 1e-6);
        let mid = model.confusion_probability(140.0, 20).unwrap();
        assert!(
            (mid - 0.04).abs() < 1e-9,
            "doubles at half plateau, got {mid}"
        );
        let far = model.confusion_probability(400.0, 20).unwrap();
        assert_eq!(far, 1.0);
        let ideal = ChannelModel::ideal();
        assert_eq!(ideal.confusion_probability(5000.0, 20).unwrap(), 0.0);
    }

    #[test]
    fn ideal_channel_always_delivers() {
        let model = ChannelModel::ideal();
        assert_eq!(model.success_probability(10_000.0, 20).unwrap(), 1.0);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn success_is_monotone_non_increasing(
                d1 in 0.0..2000.0f64,
                d2 in 0.0..2000.0f64,
            ) {
                let model = ChannelModel::default();
                let (near, far) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
                let p_near = model.success_probability(near, 20).unwrap();
                let p_far = model.success_probability(far, 20).unwrap();
                prop_assert!(p_near >= p_far);
            }

            #[test]
            fn probabilities_stay_in_range(d in 0.0..1e6f64) {
                let model = ChannelModel::default();
                let p = model.success_probability(d, 20).unwrap();
                prop_assert!((0.0..=1.0).contains(&p));
                let c = model.confusion_probability(d, 20).unwrap();
                prop_assert!((0.0..=1.0).contains(&c));
            }
        }
    }
}
