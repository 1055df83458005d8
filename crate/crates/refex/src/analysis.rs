//! Cost analysis and the deterministic benchmark harness.
//!
//! The interesting costs here are counted operations, not wall-clock time:
//! a benchmark run records how many hearer queries, distinguishing checks,
//! and candidate descriptions each algorithm needed, which is reproducible
//! across machines. Wall time is carried along for curiosity but nothing
//! asserts on it, and the CSV export can suppress it so report bytes stay
//! identical run to run.
//!
//! Two seeded scene families feed the harness:
//!
//! * [`generate_random_scene`] — attribute values drawn uniformly from
//!   generated taxonomy forests; anything can happen, including outright
//!   unsolvable tasks;
//! * [`planted_cover_scene`] — three designated attributes jointly (and only
//!   jointly) separate the referent from the distractors, so the minimal
//!   description size is pinned at three while the attribute count grows.
//!   That keeps the description length fixed across a sweep, which is what
//!   makes the cost-growth comparison between the algorithms meaningful.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algorithms::{full_brevity_bounded, Algorithm, GenerationResult, RunCounters};
use crate::hearer::HearerModel;
use crate::kb::{AttrName, Entity, GenerationTask, Scene, Taxonomy, ValueSym};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("n_l ({n_l}) may not exceed n_a ({n_a})")]
    Domain { n_a: u64, n_l: u64 },
}

/// How many candidate descriptions a shortest-first exhaustive search must
/// check before exhausting all descriptions of up to `n_l` of the `n_a`
/// available attributes: the sum of binomial coefficients C(n_a, i) for
/// i = 1..=n_l. Exact integer arithmetic; `n_a` up to 64 stays well inside
/// u128.
pub fn full_brevity_search_space(n_a: u64, n_l: u64) -> Result<u128, AnalysisError> {
    if n_l > n_a {
        return Err(AnalysisError::Domain { n_a, n_l });
    }
    let mut total: u128 = 0;
    let mut binom: u128 = 1; // C(n_a, 0)
    for i in 1..=n_l {
        // C(n, i) = C(n, i-1) * (n - i + 1) / i, exact at each step
        binom = binom * (n_a - i + 1) as u128 / i as u128;
        total += binom;
    }
    Ok(total)
}

/// The cost parameters of one generation run: attributes available,
/// distractors present, attributes mentioned in the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityParams {
    pub n_a: u64,
    pub n_d: u64,
    pub n_l: u64,
}

/// Shape of the scenes produced by [`generate_random_scene`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SceneParams {
    /// Entities in the scene (≥ 1).
    pub n_entities: u32,
    /// Attributes per entity, counting the mandatory `type` (≥ 1).
    pub n_attributes: u32,
    /// Levels in each attribute's taxonomy (1 = flat values).
    pub taxonomy_depth: u32,
    /// Roots per taxonomy and children per internal node (≥ 1).
    pub branching: u32,
}

fn forest(attribute: &AttrName, depth: u32, branching: u32) -> (Taxonomy, Vec<ValueSym>) {
    let mut tax = Taxonomy::new(attribute.clone());
    let mut values = Vec::new();
    let mut frontier: Vec<ValueSym> = Vec::new();
    let mut counter = 0u32;
    let mut name = || {
        let v = ValueSym::new(format!("{attribute}_{counter}"));
        counter += 1;
        v
    };
    for _ in 0..branching {
        let v = tax.add_root(name()).expect("fresh value");
        values.push(v.clone());
        frontier.push(v);
    }
    for _ in 1..depth {
        let mut next = Vec::new();
        for parent in &frontier {
            for _ in 0..branching {
                let v = tax.add_child(parent, name()).expect("fresh value");
                values.push(v.clone());
                next.push(v);
            }
        }
        frontier = next;
    }
    (tax, values)
}

/// A reproducible random scene: `type` plus `n_attributes - 1` further
/// attributes, each with a `branching`-ary forest of the given depth, values
/// drawn uniformly per entity, preferred order = generation order, and a
/// perceptual hearer. Roots are independently marked basic-level with
/// probability one half, so basic-level seeding gets exercised.
pub fn generate_random_scene(params: &SceneParams, seed: u64) -> Scene {
    assert!(params.n_entities >= 1 && params.n_attributes >= 1);
    assert!(params.taxonomy_depth >= 1 && params.branching >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attributes = vec![AttrName::type_attr()];
    for i in 1..params.n_attributes {
        attributes.push(AttrName::new(format!("a{i}")));
    }
    let mut taxonomies = Vec::new();
    let mut value_tables: Vec<Vec<ValueSym>> = Vec::new();
    for attribute in &attributes {
        let (mut tax, values) = forest(attribute, params.taxonomy_depth, params.branching);
        for root in values
            .iter()
            .take(params.branching as usize)
            .cloned()
            .collect::<Vec<_>>()
        {
            if rng.random_bool(0.5) {
                tax.mark_basic(&root).expect("root exists");
            }
        }
        taxonomies.push(tax);
        value_tables.push(values);
    }
    let entities = (0..params.n_entities)
        .map(|i| {
            let mut e = Entity::new(format!("e{i}"));
            for (attribute, values) in attributes.iter().zip(&value_tables) {
                let v = values[rng.random_range(0..values.len())].clone();
                e = e.with(attribute.clone(), v);
            }
            e
        })
        .collect();
    Scene::new(entities, taxonomies, attributes, HearerModel::perceptual())
}

/// A scene whose minimal distinguishing description has exactly three pairs,
/// however many attributes it carries.
///
/// Three planted attributes (at seeded random positions) partition the
/// distractors: each planted attribute gives its share of distractors a
/// value the referent does not have, and covers nothing else. Every other
/// attribute, `type` included, is constant across the scene and rules
/// nothing out. The planted triple is therefore the unique minimal cover.
///
/// Requires `n_attributes >= 4` (type + three planted) and
/// `n_distractors >= 3`.
pub fn planted_cover_scene(n_attributes: u32, n_distractors: u32, seed: u64) -> Scene {
    assert!(n_attributes >= 4, "need type plus three planted attributes");
    assert!(
        n_distractors >= 3,
        "each planted attribute needs a distractor to cover"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attributes = vec![AttrName::type_attr()];
    for i in 1..n_attributes {
        attributes.push(AttrName::new(format!("a{i}")));
    }
    // pick three distinct planted slots among the non-type attributes
    let mut planted: Vec<usize> = Vec::new();
    while planted.len() < 3 {
        let slot = rng.random_range(1..n_attributes as usize);
        if !planted.contains(&slot) {
            planted.push(slot);
        }
    }
    planted.sort_unstable();

    let mut taxonomies = Vec::new();
    for (slot, attribute) in attributes.iter().enumerate() {
        let mut tax = Taxonomy::new(attribute.clone());
        tax.add_root(ValueSym::new(format!("{attribute}_same")))
            .expect("fresh value");
        if planted.contains(&slot) {
            tax.add_root(ValueSym::new(format!("{attribute}_other")))
                .expect("fresh value");
        }
        taxonomies.push(tax);
    }

    let mut entities = Vec::new();
    for i in 0..=n_distractors {
        let mut e = Entity::new(format!("e{i}"));
        for (slot, attribute) in attributes.iter().enumerate() {
            // distractor j belongs to planted group (j-1) mod 3 and differs
            // from the referent exactly on that group's attribute
            let differs =
                i > 0 && planted.iter().position(|s| *s == slot) == Some(((i - 1) % 3) as usize);
            let suffix = if differs { "other" } else { "same" };
            e = e.with(
                attribute.clone(),
                ValueSym::new(format!("{attribute}_{suffix}")),
            );
        }
        entities.push(e);
    }
    Scene::new(entities, taxonomies, attributes, HearerModel::perceptual())
}

/// Which generator a sweep draws scenes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneFamily {
    /// [`generate_random_scene`] with the given taxonomy shape.
    Uniform { taxonomy_depth: u32, branching: u32 },
    /// [`planted_cover_scene`]: minimal description size pinned at three.
    PlantedCover,
}

/// One benchmark sweep: for every `n_a` value, `trials` seeded scenes with
/// `n_distractors` distractors each, every listed algorithm run on each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchSweep {
    pub na_values: Vec<u32>,
    pub n_distractors: u32,
    pub algorithms: Vec<Algorithm>,
    pub trials: u32,
    pub seed: u64,
    pub family: SceneFamily,
    /// Cap full-brevity searches at this description size (they report
    /// failure beyond it). `None` searches the whole pool.
    pub full_brevity_cap: Option<usize>,
}

/// One (algorithm, scene, referent) measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub params: ComplexityParams,
    pub counters: RunCounters,
    pub wall_micros: u128,
    pub succeeded: bool,
}

/// All rows of a sweep, in deterministic sweep order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub seed: u64,
}

pub const CSV_HEADER: &str =
    "algorithm,n_a,n_d,n_l,user_knows_calls,distinguishing_checks,candidates_enumerated,wall_ms,outcome";

impl BenchReport {
    /// CSV export. With `include_wall` false the wall_ms column is written
    /// as `0.000`, making the bytes a pure function of seed and sweep.
    pub fn to_csv(&self, include_wall: bool) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let wall = if include_wall {
                format!("{:.3}", row.wall_micros as f64 / 1000.0)
            } else {
                "0.000".to_owned()
            };
            let outcome = if row.succeeded { "success" } else { "failure" };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                row.algorithm,
                row.params.n_a,
                row.params.n_d,
                row.params.n_l,
                row.counters.user_knows_calls,
                row.counters.distinguishing_checks,
                row.counters.candidates_enumerated,
                wall,
                outcome
            ));
        }
        out
    }
}

// splitmix64: decorrelates the per-trial seeds derived from the sweep seed
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn trial_seed(base: u64, n_a: u32, trial: u32) -> u64 {
    mix(base ^ mix((n_a as u64) << 32 | trial as u64))
}

/// Runs the sweep. Rows appear in deterministic order (`n_a` outer, trial
/// middle, algorithm inner); per-row generation failures are recorded in the
/// row and never abort the sweep. For the uniform family the referent
/// rotates round-robin over the scene's entities as trials advance; the
/// planted family always describes its designated referent, since the
/// planted cover only exists for that entity.
pub fn run_benchmark(sweep: &BenchSweep) -> BenchReport {
    let mut rows = Vec::new();
    for &n_a in &sweep.na_values {
        for trial in 0..sweep.trials {
            let seed = trial_seed(sweep.seed, n_a, trial);
            let scene = match sweep.family {
                SceneFamily::Uniform {
                    taxonomy_depth,
                    branching,
                } => generate_random_scene(
                    &SceneParams {
                        n_entities: sweep.n_distractors + 1,
                        n_attributes: n_a,
                        taxonomy_depth,
                        branching,
                    },
                    seed,
                ),
                SceneFamily::PlantedCover => planted_cover_scene(n_a, sweep.n_distractors, seed),
            };
            let ids: Vec<_> = scene.entity_ids().cloned().collect();
            let referent = match sweep.family {
                SceneFamily::PlantedCover => ids[0].clone(),
                SceneFamily::Uniform { .. } => ids[trial as usize % ids.len()].clone(),
            };
            let task = GenerationTask::against_rest(&scene, referent)
                .expect("generated scenes contain their referents");
            let available = scene
                .preferred_attributes()
                .iter()
                .filter(|a| task.referent_entity().has(a))
                .count() as u64;
            for &algorithm in &sweep.algorithms {
                let start = Instant::now();
                let result: GenerationResult = match (algorithm, sweep.full_brevity_cap) {
                    (Algorithm::FullBrevity, Some(cap)) => full_brevity_bounded(&task, Some(cap)),
                    _ => algorithm.run(&task),
                };
                let wall_micros = start.elapsed().as_micros();
                let n_l = result.description().map_or(0, |d| d.len() as u64);
                rows.push(BenchRow {
                    algorithm,
                    params: ComplexityParams {
                        n_a: available,
                        n_d: sweep.n_distractors as u64,
                        n_l,
                    },
                    counters: result.counters,
                    wall_micros,
                    succeeded: !result.is_failure(),
                });
            }
        }
    }
    BenchReport {
        rows,
        seed: sweep.seed,
    }
}
