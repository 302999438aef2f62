//! Seeded generator of registry-shaped snapshots for fixtures and tests.
//!
//! Families grow by attaching each new model to an earlier one. Children copy
//! their parent's traits and occasionally mutate them; license and task
//! mutations move forward along fixed hidden orders most of the time, so the
//! drift and ordering machinery has a known answer to find.

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::{ModelRecord, RelationKind, BACKFILL_DATE};

/// Hidden license drift order used by the generator.
pub const LICENSE_ORDER: [&str; 6] = ["llama2", "openrail", "cc-by-4.0", "apache-2.0", "mit", "cc-by-nc-4.0"];
pub const TASK_ORDER: [&str; 5] = ["fill-mask", "text-classification", "text-generation", "text2text-generation", "image-text-to-text"];
pub const LANGUAGES: [&str; 8] = ["en", "zh", "fr", "de", "es", "ja", "ko", "ru"];
const LIBRARIES: [&str; 4] = ["transformers", "peft", "gguf", "diffusers"];
const WORDS: [&str; 24] = [
    "llama", "mistral", "qwen", "gemma", "phi", "falcon", "bert", "roberta", "t5", "bloom", "pythia", "opt", "vision", "speech", "code",
    "math", "chat", "instruct", "reward", "medical", "legal", "finance", "poetry", "agent",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub models: usize,
    pub seed: u64,
    /// Probability a new model starts its own family.
    pub root_probability: f64,
    pub mutation_probability: f64,
    /// Probability a mutation follows the hidden order.
    pub forward_probability: f64,
    pub card_probability: f64,
    /// Probability a root declares a parent that is not in the snapshot.
    pub external_parent_probability: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            models: 500,
            seed: 0,
            root_probability: 0.15,
            mutation_probability: 0.15,
            forward_probability: 0.9,
            card_probability: 0.7,
            external_parent_probability: 0.1,
        }
    }
}

struct Traits {
    license: usize,
    task: usize,
    languages: Vec<usize>,
    library: usize,
    family: usize,
}

fn step<R: Rng>(rng: &mut R, at: usize, len: usize, forward: f64) -> usize {
    let ahead = rng.random_bool(forward);
    match (ahead, at) {
        (true, a) if a + 1 < len => rng.random_range(a + 1..len),
        (false, a) if a > 0 => rng.random_range(0..a),
        (_, a) if a + 1 < len => a + 1,
        (_, a) => a - 1,
    }
}

/// Records sorted by generation order; ids are `org<family>/model-<index>`.
pub fn synthetic_snapshot(cfg: &SyntheticConfig) -> Vec<ModelRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let origin: DateTime<Utc> = Utc.with_ymd_and_hms(2021, 6, 1, 0, 0, 0).unwrap();
    let backfill = BACKFILL_DATE.and_hms_opt(0, 0, 0).unwrap().and_utc();
    let mut traits: Vec<Traits> = Vec::with_capacity(cfg.models);
    let mut created: Vec<DateTime<Utc>> = Vec::with_capacity(cfg.models);
    let mut ids: Vec<String> = Vec::with_capacity(cfg.models);
    let mut out = Vec::with_capacity(cfg.models);
    let mut families = 0usize;

    for i in 0..cfg.models {
        let root = i == 0 || rng.random_bool(cfg.root_probability);
        let parent = (!root).then(|| {
            // bias towards recent models so trees grow deep as well as wide
            let lo = i.saturating_sub(40);
            if rng.random_bool(0.5) {
                rng.random_range(lo..i)
            } else {
                rng.random_range(0..i)
            }
        });
        let t = match parent {
            None => {
                families += 1;
                let mut langs: Vec<usize> = (0..LANGUAGES.len()).collect();
                langs.shuffle(&mut rng);
                langs.truncate(rng.random_range(1..=2));
                langs.sort_unstable();
                Traits {
                    license: rng.random_range(0..LICENSE_ORDER.len() - 2),
                    task: rng.random_range(0..TASK_ORDER.len() - 2),
                    languages: langs,
                    library: 0,
                    family: families - 1,
                }
            }
            Some(p) => {
                let pt = &traits[p];
                let mut t =
                    Traits { license: pt.license, task: pt.task, languages: pt.languages.clone(), library: pt.library, family: pt.family };
                if rng.random_bool(cfg.mutation_probability) {
                    t.license = step(&mut rng, t.license, LICENSE_ORDER.len(), cfg.forward_probability);
                }
                if rng.random_bool(cfg.mutation_probability) {
                    t.task = step(&mut rng, t.task, TASK_ORDER.len(), cfg.forward_probability);
                }
                if rng.random_bool(cfg.mutation_probability) {
                    if t.languages.len() > 1 && rng.random_bool(0.4) {
                        t.languages.remove(rng.random_range(0..t.languages.len()));
                    } else {
                        let add = rng.random_range(0..LANGUAGES.len());
                        if !t.languages.contains(&add) {
                            t.languages.push(add);
                            t.languages.sort_unstable();
                        }
                    }
                }
                t
            }
        };
        let kind = if parent.is_none() {
            None
        } else {
            Some(match rng.random_range(0..100) {
                0..60 => RelationKind::Finetune,
                60..80 => RelationKind::Quantized,
                80..95 => RelationKind::Adapter,
                _ => RelationKind::Merge,
            })
        };
        let library = match kind {
            Some(RelationKind::Quantized) => 2,
            Some(RelationKind::Adapter) => 1,
            _ => t.library,
        };
        let at = match parent {
            None if rng.random_bool(0.1) => backfill,
            None => origin + Duration::days(rng.random_range(0..900)),
            Some(p) => created[p] + Duration::hours(rng.random_range(1..24 * 120)),
        };
        let id = format!("org{}/model-{i:04}", t.family);

        let mut b = ModelRecord::builder(id.clone(), at)
            .downloads(rng.random_range(0..100_000))
            .likes(rng.random_range(0..500))
            .pipeline_tag(TASK_ORDER[t.task])
            .library_name(LIBRARIES[library])
            .tag(format!("license:{}", LICENSE_ORDER[t.license]))
            .tags(t.languages.iter().map(|&l| LANGUAGES[l]));
        if rng.random_bool(0.3) {
            b = b.tag("safetensors");
        }
        if rng.random_bool(0.4) {
            b = b.tag("endpoints_compatible");
        }
        if rng.random_bool(0.1) {
            b = b.tag(format!("arxiv:{}.{:05}", 2100 + rng.random_range(0..300), rng.random_range(0..99_999)));
        }
        match (parent, kind) {
            (Some(p), Some(k)) => {
                b = b.tag(format!("base_model:{}:{}", k, ids[p]));
                if k == RelationKind::Merge && p > 0 {
                    let other = rng.random_range(0..p);
                    b = b.tag(format!("base_model:merge:{}", ids[other]));
                }
            }
            _ if rng.random_bool(cfg.external_parent_probability) => {
                b = b.tag(format!("base_model:finetune:upstream/base-{}", rng.random_range(0..5)));
            }
            _ => {}
        }
        if rng.random_bool(cfg.card_probability) {
            b = b.card(card_text(&mut rng, &t, kind));
        }
        out.push(b.build());
        traits.push(t);
        created.push(at);
        ids.push(id);
    }
    out
}

fn card_text<R: Rng>(rng: &mut R, t: &Traits, kind: Option<RelationKind>) -> String {
    let vocab: Vec<&str> = (0..4).map(|k| WORDS[(t.family * 5 + k * 7) % WORDS.len()]).collect();
    let mut body: Vec<&str> = (0..rng.random_range(10..80)).map(|_| *vocab.choose(rng).unwrap()).collect();
    body.push(TASK_ORDER[t.task]);
    let mut text = format!("# Model\n\n{}\n", body.join(" "));
    let auto = match kind {
        Some(RelationKind::Quantized) => 0.6,
        Some(RelationKind::Adapter) => 0.4,
        Some(_) => 0.2,
        None => 0.05,
    };
    if rng.random_bool(auto) {
        text.push_str("\nThis model card has been automatically generated.\n");
    }
    text
}
