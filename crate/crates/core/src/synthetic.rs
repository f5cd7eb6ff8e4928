//! Seeded generator for a small labeled comment corpus: two cue-word
//! distributions mixed with shared filler, with a tunable overlap.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CorpusError, Dataset};

const ABUSIVE: &[&str] = &[
    "idiot",
    "stupid",
    "scam",
    "hate",
    "trash",
    "loser",
    "ugly",
    "fake",
    "dumb",
    "pathetic",
    "liar",
    "moron",
    "garbage",
    "disgusting",
    "worthless",
    "clown",
    "fraud",
    "cheat",
    "creep",
    "jerk",
    "freak",
    "coward",
    "thief",
    "rubbish",
    "nonsense",
    "toxic",
    "troll",
    "insult",
    "shameful",
    "filthy",
];

const CIVIL: &[&str] = &[
    "thanks",
    "great",
    "helpful",
    "agree",
    "interesting",
    "informative",
    "appreciate",
    "wonderful",
    "insightful",
    "excellent",
    "enjoyed",
    "useful",
    "welcome",
    "kind",
    "support",
    "lovely",
    "brilliant",
    "nice",
    "clear",
    "respect",
    "inspiring",
    "congrats",
    "learned",
    "awesome",
    "polite",
    "friendly",
    "recommend",
    "valuable",
    "beautiful",
    "fair",
];

const FILLER: &[&str] = &[
    "post",
    "blog",
    "people",
    "time",
    "today",
    "comment",
    "read",
    "think",
    "really",
    "world",
    "news",
    "story",
    "week",
    "year",
    "point",
    "question",
    "video",
    "link",
    "page",
    "government",
    "school",
    "music",
    "game",
    "phone",
    "city",
    "team",
    "money",
    "work",
    "life",
    "friend",
    "family",
    "book",
    "movie",
    "food",
    "market",
    "local",
    "online",
    "system",
    "issue",
    "history",
];

const GLUE: &[&str] = &["the", "and", "is", "this", "you", "are", "of", "to", "it", "that"];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub n_docs: usize,
    /// Share of documents in class 0.
    pub class0_fraction: f64,
    /// Probability that a cue word is drawn from the other class's list.
    pub overlap: f64,
    /// Probability that a token is a cue word rather than filler.
    pub cue_rate: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub labels: [String; 2],
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_docs: 600,
            class0_fraction: 0.57,
            overlap: 0.2,
            cue_rate: 0.3,
            min_len: 6,
            max_len: 22,
            labels: ["IllegalMessages".to_string(), "legalMessages".to_string()],
            seed: 1,
        }
    }
}

/// Index into a list of `n`, skewed toward the front.
fn skewed(rng: &mut ChaCha8Rng, n: usize) -> usize {
    let u: f64 = rng.gen();
    ((u * u) * n as f64) as usize
}

fn document(rng: &mut ChaCha8Rng, class: usize, spec: &SyntheticSpec) -> String {
    let len = rng.gen_range(spec.min_len..=spec.max_len);
    let lists = [ABUSIVE, CIVIL];
    let mut words: Vec<String> = Vec::with_capacity(len);
    for _ in 0..len {
        let r: f64 = rng.gen();
        let word = if r < spec.cue_rate {
            let source = if rng.gen::<f64>() < spec.overlap { 1 - class } else { class };
            lists[source][skewed(rng, lists[source].len())]
        } else if r < spec.cue_rate + (1.0 - spec.cue_rate) * 0.3 {
            GLUE[rng.gen_range(0..GLUE.len())]
        } else {
            FILLER[skewed(rng, FILLER.len())]
        };
        words.push(word.to_string());
    }
    if rng.gen::<f64>() < 0.5 {
        let first = &mut words[0];
        *first = first[..1].to_uppercase() + &first[1..];
    }
    let mut text = words.join(" ");
    text.push(match rng.gen_range(0..3) {
        0 => '.',
        1 => '!',
        _ => '?',
    });
    text
}

/// Generate the corpus. Class sizes are fixed by `class0_fraction`; row order
/// is shuffled.
pub fn generate(spec: &SyntheticSpec) -> Result<Dataset, CorpusError> {
    if !(0.0..=1.0).contains(&spec.class0_fraction) || !(0.0..=1.0).contains(&spec.overlap) {
        return Err(CorpusError::InvalidFraction(spec.class0_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n0 = (spec.n_docs as f64 * spec.class0_fraction).round() as usize;
    let mut classes: Vec<usize> = (0..spec.n_docs).map(|i| usize::from(i >= n0)).collect();
    classes.shuffle(&mut rng);
    let rows: Vec<(String, usize)> = classes.iter().map(|&c| (document(&mut rng, c, spec), c)).collect();
    Dataset::from_pairs([spec.labels[0].as_str(), spec.labels[1].as_str()], rows)
}
