//! The four generation algorithms, the distinguishing-description predicate,
//! and the `RulesOut` primitive they all share.
//!
//! A description *distinguishes* the referent when it is accurate of the
//! referent (C1) and rules out every distractor (C2); the hearer-mode check
//! additionally demands that the hearer can verify both (C3), which the
//! algorithms operationalize by only ever selecting values the hearer knows
//! to be true and by counting a distractor as ruled out only when the hearer
//! knows the pair to be false of it. A distractor the hearer is merely
//! *unsure* about is not ruled out.
//!
//! All four strategies draw per-attribute candidate values the same way (one
//! pair per preferred attribute the referent possesses: the user-known value
//! on the referent's specialization path that rules out the most distractors,
//! ties going to the least specific value), so their costs and output sizes
//! are directly comparable. The algorithms never mutate the scene; working
//! copies of the contrast set and candidate pool are per-run, as are the
//! instrumentation counters.
//!
//! Algorithms assume a scene that passes [`crate::kb::check_scene`]; feeding
//! them malformed scenes may panic.

use std::collections::BTreeSet;

use crate::hearer::{basic_level_value, more_specific_value, user_knows, HearerError, Knowledge};
use crate::kb::{AttrName, Description, EntityId, GenerationTask, Pair, ValueSym};

/// Instrumentation record for one generation run. Counts only ever increase
/// while a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunCounters {
    /// Hearer-model queries issued.
    pub user_knows_calls: u64,
    /// Full distinguishing-description checks performed.
    pub distinguishing_checks: u64,
    /// Candidate descriptions enumerated (full-brevity subset search, and
    /// mutation candidates tried by local brevity).
    pub candidates_enumerated: u64,
    /// Attribute–value pairs examined while building pools, scanning for the
    /// best property, or sweeping the preferred list.
    pub pairs_considered: u64,
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Description(Description),
    /// No distinguishing description exists over the candidate pool.
    Failure,
}

/// A description (or failure) plus the counters accumulated producing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationResult {
    pub outcome: Outcome,
    pub counters: RunCounters,
}

impl GenerationResult {
    fn success(description: Description, counters: RunCounters) -> Self {
        GenerationResult {
            outcome: Outcome::Description(description),
            counters,
        }
    }

    fn failure(counters: RunCounters) -> Self {
        GenerationResult {
            outcome: Outcome::Failure,
            counters,
        }
    }

    pub fn description(&self) -> Option<&Description> {
        match &self.outcome {
            Outcome::Description(d) => Some(d),
            Outcome::Failure => None,
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self.outcome, Outcome::Failure)
    }
}

/// Which reading of the distinguishing conditions to check: raw scene truth,
/// or truth as the hearer can verify it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    System,
    Hearer,
}

/// Strategy selector, for dispatch from benchmarks and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    FullBrevity,
    GreedyHeuristic,
    LocalBrevity,
    Incremental,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::FullBrevity,
        Algorithm::GreedyHeuristic,
        Algorithm::LocalBrevity,
        Algorithm::Incremental,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::FullBrevity => "full-brevity",
            Algorithm::GreedyHeuristic => "greedy",
            Algorithm::LocalBrevity => "local-brevity",
            Algorithm::Incremental => "incremental",
        }
    }

    pub fn run(&self, task: &GenerationTask<'_>) -> GenerationResult {
        match self {
            Algorithm::FullBrevity => full_brevity(task),
            Algorithm::GreedyHeuristic => greedy_heuristic(task),
            Algorithm::LocalBrevity => local_brevity(task, None),
            Algorithm::Incremental => incremental(task),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full-brevity" => Ok(Algorithm::FullBrevity),
            "greedy" => Ok(Algorithm::GreedyHeuristic),
            "local-brevity" => Ok(Algorithm::LocalBrevity),
            "incremental" => Ok(Algorithm::Incremental),
            other => Err(format!(
                "unknown algorithm `{other}` (expected full-brevity, greedy, local-brevity or incremental)"
            )),
        }
    }
}

fn know(
    task: &GenerationTask<'_>,
    counters: &mut RunCounters,
    entity: &EntityId,
    pair: &Pair,
) -> Knowledge {
    counters.user_knows_calls += 1;
    user_knows(task.scene(), entity, pair).expect("well-formed task over a validated scene")
}

fn rules_out_impl(
    task: &GenerationTask<'_>,
    counters: &mut RunCounters,
    remaining: &BTreeSet<EntityId>,
    attribute: &AttrName,
    value: Option<&ValueSym>,
) -> BTreeSet<EntityId> {
    let Some(value) = value else {
        return BTreeSet::new(); // the no-value sentinel rules nothing out
    };
    let pair = Pair {
        attribute: attribute.clone(),
        value: value.clone(),
    };
    remaining
        .iter()
        .filter(|x| know(task, counters, x, &pair) == Knowledge::False)
        .cloned()
        .collect()
}

/// The distractors among `remaining` that ⟨`attribute`, `value`⟩ eliminates:
/// those the hearer knows the pair to be false of. `None` stands for the
/// `no-value` sentinel and rules out nothing; distractors the hearer is
/// unsure about are never ruled out.
pub fn rules_out(
    task: &GenerationTask<'_>,
    remaining: &BTreeSet<EntityId>,
    attribute: &AttrName,
    value: Option<&ValueSym>,
) -> BTreeSet<EntityId> {
    let mut scratch = RunCounters::default();
    rules_out_impl(task, &mut scratch, remaining, attribute, value)
}

fn is_distinguishing_impl(
    task: &GenerationTask<'_>,
    counters: &mut RunCounters,
    description: &Description,
    mode: CheckMode,
) -> bool {
    counters.distinguishing_checks += 1;
    let referent = task.referent();
    match mode {
        CheckMode::System => {
            let accurate = description
                .pairs()
                .iter()
                .all(|p| crate::kb::applies(task.scene(), referent, p));
            accurate
                && task.contrast().iter().all(|c| {
                    description
                        .pairs()
                        .iter()
                        .any(|p| !crate::kb::applies(task.scene(), c, p))
                })
        }
        CheckMode::Hearer => {
            let accurate = description
                .pairs()
                .iter()
                .all(|p| know(task, counters, referent, p) == Knowledge::True);
            if !accurate {
                return false;
            }
            let mut covered: BTreeSet<EntityId> = BTreeSet::new();
            for p in description.pairs() {
                covered.extend(rules_out_impl(
                    task,
                    counters,
                    task.contrast(),
                    &p.attribute,
                    Some(&p.value),
                ));
            }
            covered == *task.contrast()
        }
    }
}

/// Is `description` a distinguishing description for the task? System mode
/// checks accuracy and coverage against scene truth; hearer mode demands the
/// hearer can verify both.
pub fn is_distinguishing(
    task: &GenerationTask<'_>,
    description: &Description,
    mode: CheckMode,
) -> bool {
    let mut scratch = RunCounters::default();
    is_distinguishing_impl(task, &mut scratch, description, mode)
}

fn candidate_pool_impl(task: &GenerationTask<'_>, counters: &mut RunCounters) -> Vec<Pair> {
    let referent = task.referent_entity();
    let mut pool = Vec::new();
    for attribute in task.scene().preferred_attributes() {
        let Some(recorded) = referent.value(attribute) else {
            continue;
        };
        let taxonomy = task
            .scene()
            .taxonomy(attribute)
            .expect("validated scene has a taxonomy for every used attribute");
        let path = taxonomy
            .path_from_root(recorded)
            .expect("recorded value is in the taxonomy");
        let mut best: Option<(ValueSym, usize)> = None;
        // root-first walk: on tied discriminatory power the least specific
        // user-known value wins
        for value in path {
            counters.pairs_considered += 1;
            let pair = Pair {
                attribute: attribute.clone(),
                value: value.clone(),
            };
            if know(task, counters, task.referent(), &pair) != Knowledge::True {
                continue;
            }
            let gain =
                rules_out_impl(task, counters, task.contrast(), attribute, Some(&value)).len();
            if best.as_ref().is_none_or(|(_, g)| gain > *g) {
                best = Some((value, gain));
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

/// The per-attribute candidate pairs shared by full brevity, the greedy
/// heuristic, and local brevity: for each preferred attribute the referent
/// possesses, the user-known value on the referent's path with the most
/// discriminatory power (ties to the least specific). Attributes with no
/// user-known value contribute nothing.
pub fn candidate_pool(task: &GenerationTask<'_>) -> Vec<Pair> {
    let mut scratch = RunCounters::default();
    candidate_pool_impl(task, &mut scratch)
}

/// Advances `indices` to the next k-combination of `0..n` in lexicographic
/// order; false when exhausted.
fn next_combination(indices: &mut [usize], n: usize) -> bool {
    let k = indices.len();
    let mut i = k;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if indices[i] != i + n - k {
            break;
        }
    }
    indices[i] += 1;
    for j in i + 1..k {
        indices[j] = indices[j - 1] + 1;
    }
    true
}

/// Exhaustive shortest-first search: checks every one-pair description, then
/// every two-pair description, and so on, returning the first distinguishing
/// subset. Within one size, subsets are enumerated in lexicographic order
/// over preferred-attribute positions, so the minimal description returned
/// is deterministic. Returns failure when the whole pool cannot do it.
pub fn full_brevity(task: &GenerationTask<'_>) -> GenerationResult {
    full_brevity_bounded(task, None)
}

/// [`full_brevity`] with an optional cap on description size, for bounding
/// benchmark sweeps. `None` searches up to the full pool.
pub fn full_brevity_bounded(
    task: &GenerationTask<'_>,
    max_size: Option<usize>,
) -> GenerationResult {
    let mut counters = RunCounters::default();
    let pool = candidate_pool_impl(task, &mut counters);
    if task.contrast().is_empty() {
        // nothing to rule out: the empty description is already minimal
        return GenerationResult::success(Description::empty(), counters);
    }
    let limit = max_size.unwrap_or(pool.len()).min(pool.len());
    for size in 1..=limit {
        let mut indices: Vec<usize> = (0..size).collect();
        loop {
            counters.candidates_enumerated += 1;
            let candidate: Description = indices.iter().map(|&i| pool[i].clone()).collect();
            if is_distinguishing_impl(task, &mut counters, &candidate, CheckMode::Hearer) {
                return GenerationResult::success(candidate, counters);
            }
            if !next_combination(&mut indices, pool.len()) {
                break;
            }
        }
    }
    GenerationResult::failure(counters)
}

fn greedy_with(task: &GenerationTask<'_>, counters: &mut RunCounters) -> Option<Description> {
    let mut pool = candidate_pool_impl(task, counters);
    let mut remaining = task.contrast().clone();
    let mut selected: Vec<Pair> = Vec::new();
    loop {
        if remaining.is_empty() {
            return Some(Description::from_pairs(selected));
        }
        if pool.is_empty() {
            return None;
        }
        // Choose the pair leaving the smallest remaining set; the scan order
        // is preferred-attribute order, so ties resolve to the earlier
        // attribute.
        let mut best: Option<(usize, BTreeSet<EntityId>)> = None;
        for (i, pair) in pool.iter().enumerate() {
            counters.pairs_considered += 1;
            let ruled = rules_out_impl(
                task,
                counters,
                &remaining,
                &pair.attribute,
                Some(&pair.value),
            );
            if best.as_ref().is_none_or(|(_, b)| ruled.len() > b.len()) {
                best = Some((i, ruled));
            }
        }
        let (index, ruled) = best.expect("pool is non-empty");
        let chosen = pool.remove(index);
        remaining.retain(|x| !ruled.contains(x));
        selected.push(chosen);
    }
}

/// Greedy set cover: repeatedly select the candidate pair that rules out the
/// most remaining distractors until none remain (success) or the pool is
/// exhausted (failure). Fast, but may keep pairs that later selections make
/// redundant.
pub fn greedy_heuristic(task: &GenerationTask<'_>) -> GenerationResult {
    let mut counters = RunCounters::default();
    match greedy_with(task, &mut counters) {
        Some(d) => GenerationResult::success(d, counters),
        None => GenerationResult::failure(counters),
    }
}

/// Iterative improvement under three preference rules, applied until none
/// fires:
///
/// 1. remove any single pair that leaves the description distinguishing;
/// 2. replace two or more pairs by a single candidate-pool pair (strictly
///    shortening) when the result is distinguishing;
/// 3. replace a value by a strictly more general user-known value, keeping
///    the description distinguishing — the lexical preference step that
///    pulls values back toward the basic level.
///
/// `initial` must be a hearer-distinguishing description when supplied;
/// otherwise the greedy heuristic provides the starting point, and failure
/// is possible only if greedy itself fails.
pub fn local_brevity(task: &GenerationTask<'_>, initial: Option<&Description>) -> GenerationResult {
    let mut counters = RunCounters::default();
    let mut desc = match initial {
        Some(d) => {
            assert!(
                is_distinguishing_impl(task, &mut counters, d, CheckMode::Hearer),
                "local_brevity initial description must be hearer-distinguishing"
            );
            d.clone()
        }
        None => match greedy_with(task, &mut counters) {
            Some(d) => d,
            None => return GenerationResult::failure(counters),
        },
    };
    let pool = candidate_pool_impl(task, &mut counters);
    loop {
        if let Some(next) = drop_one_pair(task, &mut counters, &desc) {
            desc = next;
            continue;
        }
        if let Some(next) = collapse_pairs(task, &mut counters, &desc, &pool) {
            desc = next;
            continue;
        }
        if let Some(next) = generalize_value(task, &mut counters, &desc) {
            desc = next;
            continue;
        }
        break;
    }
    GenerationResult::success(desc, counters)
}

fn drop_one_pair(
    task: &GenerationTask<'_>,
    counters: &mut RunCounters,
    desc: &Description,
) -> Option<Description> {
    for skip in 0..desc.len() {
        let candidate: Description = desc
            .pairs()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, p)| p.clone())
            .collect();
        counters.candidates_enumerated += 1;
        if is_distinguishing_impl(task, counters, &candidate, CheckMode::Hearer) {
            return Some(candidate);
        }
    }
    None
}

fn collapse_pairs(
    task: &GenerationTask<'_>,
    counters: &mut RunCounters,
    desc: &Description,
    pool: &[Pair],
) -> Option<Description> {
    for removed in 2..=desc.len() {
        let mut indices: Vec<usize> = (0..removed).collect();
        loop {
            let kept: Vec<&Pair> = desc
                .pairs()
                .iter()
                .enumerate()
                .filter(|(i, _)| !indices.contains(i))
                .map(|(_, p)| p)
                .collect();
            for replacement in pool {
                if kept.iter().any(|p| p.attribute == replacement.attribute) {
                    continue;
                }
                // the replacement takes the slot of the first removed pair
                let mut pairs: Vec<Pair> = Vec::with_capacity(kept.len() + 1);
                for (i, p) in desc.pairs().iter().enumerate() {
                    if i == indices[0] {
                        pairs.push(replacement.clone());
                    } else if !indices.contains(&i) {
                        pairs.push(p.clone());
                    }
                }
                let candidate = Description::from_pairs(pairs);
                counters.candidates_enumerated += 1;
                if is_distinguishing_impl(task, counters, &candidate, CheckMode::Hearer) {
                    return Some(candidate);
                }
            }
            if !next_combination(&mut indices, desc.len()) {
                break;
            }
        }
    }
    None
}

fn generalize_value(
    task: &GenerationTask<'_>,
    counters: &mut RunCounters,
    desc: &Description,
) -> Option<Description> {
    let scene = task.scene();
    for (i, pair) in desc.pairs().iter().enumerate() {
        let taxonomy = scene.taxonomy(&pair.attribute).expect("validated scene");
        // nearest ancestor first, so generalization proceeds one level at a
        // time and settles at the most general value that still works
        let mut cur = pair.value.clone();
        while let Some(parent) = taxonomy.parent(&cur) {
            let swapped = Pair {
                attribute: pair.attribute.clone(),
                value: parent.clone(),
            };
            if know(task, counters, task.referent(), &swapped) == Knowledge::True {
                let pairs: Vec<Pair> = desc
                    .pairs()
                    .iter()
                    .enumerate()
                    .map(|(j, p)| if j == i { swapped.clone() } else { p.clone() })
                    .collect();
                let candidate = Description::from_pairs(pairs);
                counters.candidates_enumerated += 1;
                if is_distinguishing_impl(task, counters, &candidate, CheckMode::Hearer) {
                    return Some(candidate);
                }
            }
            cur = parent.clone();
        }
    }
    None
}

fn find_best_value_impl(
    task: &GenerationTask<'_>,
    counters: &mut RunCounters,
    remaining: &BTreeSet<EntityId>,
    attribute: &AttrName,
    initial_value: &ValueSym,
) -> Option<ValueSym> {
    let referent = task.referent();
    let seed_pair = Pair {
        attribute: attribute.clone(),
        value: initial_value.clone(),
    };
    let mut best = if know(task, counters, referent, &seed_pair) == Knowledge::True {
        Some(initial_value.clone())
    } else {
        None // no-value: the hearer cannot verify the initial value
    };
    let mut best_gain = match &best {
        Some(v) => rules_out_impl(task, counters, remaining, attribute, Some(v)).len(),
        None => 0,
    };
    // Walk the specialization chain toward the referent's recorded value.
    // Starting from no-value restarts the walk at the path root, which is
    // how an unknown initial value can still be recovered from.
    let mut cursor = best.clone();
    loop {
        let next = match more_specific_value(task.scene(), referent, attribute, cursor.as_ref()) {
            Ok(step) => step,
            // an off-path initial value has no specialization chain
            Err(HearerError::InvalidSpecialization { .. }) => None,
            Err(e) => panic!("well-formed task over a validated scene: {e}"),
        };
        let Some(value) = next else {
            break;
        };
        let pair = Pair {
            attribute: attribute.clone(),
            value: value.clone(),
        };
        if know(task, counters, referent, &pair) == Knowledge::True {
            let gain = rules_out_impl(task, counters, remaining, attribute, Some(&value)).len();
            // strictly more discriminatory power, or stay less specific
            if gain > best_gain {
                best = Some(value.clone());
                best_gain = gain;
            }
        }
        cursor = Some(value);
    }
    best
}

/// The value of `attribute` to use against `remaining`: the `initial_value`
/// if the hearer knows it (else the `no-value` sentinel, `None`), then
/// successively more specific values along the referent's path, adopting one
/// only when it rules out strictly more of `remaining` — on ties the less
/// specific value stands.
pub fn find_best_value(
    task: &GenerationTask<'_>,
    remaining: &BTreeSet<EntityId>,
    attribute: &AttrName,
    initial_value: &ValueSym,
) -> Option<ValueSym> {
    let mut scratch = RunCounters::default();
    find_best_value_impl(task, &mut scratch, remaining, attribute, initial_value)
}

/// One pass over the preferred attributes, no backtracking: each attribute's
/// best value is added exactly when it rules out at least one distractor
/// still standing, and the pass returns as soon as none remain. A type pair
/// is always part of the output — if the loop never added one, the basic
/// level value of `type` is appended. Pairs made redundant by later
/// selections stay in.
pub fn incremental(task: &GenerationTask<'_>) -> GenerationResult {
    let mut counters = RunCounters::default();
    let referent_entity = task.referent_entity();
    let mut remaining = task.contrast().clone();
    let mut selected: Vec<Pair> = Vec::new();
    for attribute in task.scene().preferred_attributes() {
        if !referent_entity.has(attribute) {
            continue; // the referent cannot be described by this attribute
        }
        counters.pairs_considered += 1;
        let initial = basic_level_value(task.scene(), task.referent(), attribute)
            .expect("attribute present on referent");
        let value = find_best_value_impl(task, &mut counters, &remaining, attribute, &initial);
        let ruled = rules_out_impl(task, &mut counters, &remaining, attribute, value.as_ref());
        if !ruled.is_empty() {
            let value = value.expect("a pair that rules out distractors has a value");
            selected.push(Pair {
                attribute: attribute.clone(),
                value,
            });
            remaining.retain(|x| !ruled.contains(x));
        }
        if remaining.is_empty() {
            if !selected.iter().any(|p| p.attribute.is_type()) {
                let head = basic_level_value(task.scene(), task.referent(), &AttrName::type_attr())
                    .expect("every entity carries a type");
                selected.push(Pair {
                    attribute: AttrName::type_attr(),
                    value: head,
                });
            }
            return GenerationResult::success(Description::from_pairs(selected), counters);
        }
    }
    GenerationResult::failure(counters)
}

/// Guarantees a head noun: if `description` has no type pair, the referent's
/// basic-level type is appended. Applied to full-brevity, greedy, and
/// local-brevity output before serialization (the incremental pass does the
/// equivalent internally).
pub fn ensure_head_noun(task: &GenerationTask<'_>, description: &Description) -> Description {
    if description.has_attribute(&AttrName::type_attr()) {
        return description.clone();
    }
    let head = basic_level_value(task.scene(), task.referent(), &AttrName::type_attr())
        .expect("every entity carries a type");
    let mut pairs = description.pairs().to_vec();
    pairs.push(Pair {
        attribute: AttrName::type_attr(),
        value: head,
    });
    Description::from_pairs(pairs)
}
