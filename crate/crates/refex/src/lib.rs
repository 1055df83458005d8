//! Referring-expression generation over attribute–value knowledge models.
//!
//! Given a scene of entities described by attribute–value pairs (with
//! per-attribute subsumption taxonomies and a model of what the hearer can
//! perceive), this crate computes the semantic content of a definite noun
//! phrase that picks out one intended referent from a set of distractors:
//! a *distinguishing description*.
//!
//! Four content-determination strategies are provided, trading description
//! minimality against computational cost:
//!
//! * [`algorithms::full_brevity`] — exhaustive shortest-first subset search
//!   (guaranteed-minimal output, exponential worst case);
//! * [`algorithms::greedy_heuristic`] — greedy set cover, always picking the
//!   pair that rules out the most remaining distractors;
//! * [`algorithms::local_brevity`] — iterative improvement of an initial
//!   description under remove / replace / generalize preference rules;
//! * [`algorithms::incremental`] — a single pass over a fixed
//!   preferred-attribute list with no backtracking.
//!
//! Every run is instrumented ([`algorithms::RunCounters`]) so the relative
//! costs of the strategies can be measured; [`analysis`] wraps that in a
//! deterministic benchmark harness with seeded scene generators. [`io`]
//! parses the line-oriented scene format and serializes descriptions as
//! `attribute=value` pair lists, SPL-style terms, or a naive surface string.
//!
//! ```
//! use refex::algorithms::{ensure_head_noun, incremental};
//! use refex::io::{parse_scene, realize_surface};
//! use refex::kb::GenerationTask;
//!
//! let scene = parse_scene(concat!(
//!     "taxonomy type\n  dog\n  cat\n",
//!     "entity Rex\n  type dog\n  colour black\n",
//!     "entity Tom\n  type cat\n  colour black\n",
//!     "preferred type colour\n",
//! ))
//! .expect("well-formed scene");
//! let task = GenerationTask::against_rest(&scene, "Rex".into())?;
//! let result = incremental(&task);
//! let description = ensure_head_noun(&task, result.description().expect("Rex is describable"));
//! assert_eq!(realize_surface(&description).unwrap(), "the dog");
//! # Ok::<(), refex::kb::TaskError>(())
//! ```

pub mod algorithms;
pub mod analysis;
pub mod hearer;
pub mod io;
pub mod kb;
