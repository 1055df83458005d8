//! Shared helpers for the integration suites: corpus loading, a seeded
//! scene family, and a brute-force reference oracle kept deliberately
//! separate from the search implementations it checks.

use std::path::PathBuf;

use refex::hearer::{user_knows, Knowledge};
use refex::io::parse_scene;
use refex::kb::{GenerationTask, Pair, Scene, ValueSym};

pub fn scenes_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

pub fn load_scene(name: &str) -> Scene {
    let path = scenes_dir().join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    parse_scene(&text).unwrap_or_else(|d| panic!("parsing {name}: {d:?}"))
}

fn knows(task: &GenerationTask<'_>, entity: &refex::kb::EntityId, pair: &Pair) -> Knowledge {
    user_knows(task.scene(), entity, pair).expect("corpus scenes are well-formed")
}

/// C1 and C2 from first principles: every pair known true of the referent,
/// every distractor known false under at least one pair.
fn covers(task: &GenerationTask<'_>, pairs: &[&Pair]) -> bool {
    pairs
        .iter()
        .all(|p| knows(task, task.referent(), p) == Knowledge::True)
        && task
            .contrast()
            .iter()
            .all(|c| pairs.iter().any(|p| knows(task, c, p) == Knowledge::False))
}

/// Independent derivation of the per-attribute candidate pairs: for each
/// preferred attribute the referent possesses, the hearer-known value on its
/// root path ruling out the most distractors, earliest (most general) on
/// ties.
pub fn oracle_pool(task: &GenerationTask<'_>) -> Vec<Pair> {
    let referent = task.referent_entity();
    let mut pool = Vec::new();
    for attribute in task.scene().preferred_attributes() {
        let Some(recorded) = referent.value(attribute) else {
            continue;
        };
        let taxonomy = task.scene().taxonomy(attribute).expect("well-formed scene");
        let path = taxonomy
            .path_from_root(recorded)
            .expect("recorded value in taxonomy");
        let mut best: Option<(ValueSym, usize)> = None;
        for value in path {
            let pair = Pair {
                attribute: attribute.clone(),
                value: value.clone(),
            };
            if knows(task, task.referent(), &pair) != Knowledge::True {
                continue;
            }
            let eliminated = task
                .contrast()
                .iter()
                .filter(|c| knows(task, c, &pair) == Knowledge::False)
                .count();
            if best.as_ref().is_none_or(|(_, b)| eliminated > *b) {
                best = Some((value, eliminated));
            }
        }
        if let Some((value, _)) = best {
            pool.push(Pair {
                attribute: attribute.clone(),
                value,
            });
        }
    }
    pool
}

/// The minimum size of any distinguishing subset of the candidate pool,
/// found by checking every one of the 2^n subsets; `None` when no subset
/// works.
pub fn oracle_minimum(task: &GenerationTask<'_>) -> Option<usize> {
    let pool = oracle_pool(task);
    assert!(pool.len() <= 20, "oracle is exponential; keep pools small");
    let mut best: Option<usize> = None;
    for mask in 0u32..(1u32 << pool.len()) {
        let size = mask.count_ones() as usize;
        if best.is_some_and(|b| size >= b) {
            continue;
        }
        let chosen: Vec<&Pair> = pool
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| p)
            .collect();
        if covers(task, &chosen) {
            best = Some(size);
        }
    }
    best
}
