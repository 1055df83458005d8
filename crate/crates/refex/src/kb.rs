//! The knowledge model: entities characterised by attribute–value pairs,
//! per-attribute subsumption taxonomies, and the scene that bundles them
//! together with a preferred-attribute order and a hearer model.
//!
//! Taxonomies are forests, not DAGs: every value has at most one parent, so
//! the specialization path from a root down to an entity's recorded value is
//! unique. Unstructured attributes (`size = small` with no hierarchy) are
//! modelled as single-node taxonomies, for which subsumption degenerates to
//! equality. Entities store only the most specific value they are known to
//! have for each attribute; everything more general is implied through
//! subsumption rather than stored.
//!
//! All types here are immutable once a [`Scene`] is assembled and can be
//! shared freely across threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::hearer::HearerModel;

/// The reserved attribute realized as the head noun. Every entity has it.
pub const TYPE_ATTRIBUTE: &str = "type";

/// An attribute identifier, e.g. `type`, `colour`, `size`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttrName(String);

impl AttrName {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(!name.is_empty(), "attribute names are non-empty tokens");
        AttrName(name)
    }

    /// The reserved `type` attribute.
    pub fn type_attr() -> Self {
        AttrName(TYPE_ATTRIBUTE.to_owned())
    }

    pub fn is_type(&self) -> bool {
        self.0 == TYPE_ATTRIBUTE
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AttrName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AttrName {
    fn from(s: &str) -> Self {
        AttrName::new(s)
    }
}

impl From<String> for AttrName {
    fn from(s: String) -> Self {
        AttrName::new(s)
    }
}

/// A value symbol, unique within one attribute's taxonomy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueSym(String);

impl ValueSym {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(!name.is_empty(), "value names are non-empty tokens");
        ValueSym(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ValueSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ValueSym {
    fn from(s: &str) -> Self {
        ValueSym::new(s)
    }
}

impl From<String> for ValueSym {
    fn from(s: String) -> Self {
        ValueSym::new(s)
    }
}

/// An entity identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(String);

impl EntityId {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(!name.is_empty(), "entity ids are non-empty tokens");
        EntityId(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        EntityId::new(s)
    }
}

impl From<String> for EntityId {
    fn from(s: String) -> Self {
        EntityId::new(s)
    }
}

/// An ⟨attribute, value⟩ pair. The `no-value` sentinel used transiently by
/// the generation algorithms is represented as `Option<ValueSym>` at the few
/// call sites that need it; a `Pair` always carries a concrete value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    pub attribute: AttrName,
    pub value: ValueSym,
}

impl Pair {
    pub fn new(attribute: impl Into<AttrName>, value: impl Into<ValueSym>) -> Self {
        Pair {
            attribute: attribute.into(),
            value: value.into(),
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.attribute, self.value)
    }
}

/// Errors from taxonomy construction and lookup.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("unknown value `{value}` in taxonomy of `{attribute}`")]
    UnknownValue {
        attribute: AttrName,
        value: ValueSym,
    },
    #[error("value `{value}` already exists in taxonomy of `{attribute}`")]
    DuplicateValue {
        attribute: AttrName,
        value: ValueSym,
    },
}

/// A subsumption forest over the values of one attribute.
///
/// `parent` links always point toward a root; roots have no entry. The
/// `basic` set marks basic-level values — the level speakers prefer
/// lexically (`dog` rather than `chihuahua`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    attribute: AttrName,
    nodes: BTreeSet<ValueSym>,
    parent: BTreeMap<ValueSym, ValueSym>,
    basic: BTreeSet<ValueSym>,
}

impl Taxonomy {
    pub fn new(attribute: impl Into<AttrName>) -> Self {
        Taxonomy {
            attribute: attribute.into(),
            nodes: BTreeSet::new(),
            parent: BTreeMap::new(),
            basic: BTreeSet::new(),
        }
    }

    /// Assembles a taxonomy from raw parts without validating forest shape.
    /// [`check_scene`] reports cycles and dangling parents afterwards.
    pub fn from_parts(
        attribute: impl Into<AttrName>,
        nodes: BTreeSet<ValueSym>,
        parent: BTreeMap<ValueSym, ValueSym>,
        basic: BTreeSet<ValueSym>,
    ) -> Self {
        Taxonomy {
            attribute: attribute.into(),
            nodes,
            parent,
            basic,
        }
    }

    pub fn attribute(&self) -> &AttrName {
        &self.attribute
    }

    pub fn add_root(&mut self, value: impl Into<ValueSym>) -> Result<ValueSym, KbError> {
        let value = value.into();
        if !self.nodes.insert(value.clone()) {
            return Err(KbError::DuplicateValue {
                attribute: self.attribute.clone(),
                value,
            });
        }
        Ok(value)
    }

    pub fn add_child(
        &mut self,
        parent: &ValueSym,
        child: impl Into<ValueSym>,
    ) -> Result<ValueSym, KbError> {
        let child = child.into();
        if !self.nodes.contains(parent) {
            return Err(KbError::UnknownValue {
                attribute: self.attribute.clone(),
                value: parent.clone(),
            });
        }
        if !self.nodes.insert(child.clone()) {
            return Err(KbError::DuplicateValue {
                attribute: self.attribute.clone(),
                value: child,
            });
        }
        self.parent.insert(child.clone(), parent.clone());
        Ok(child)
    }

    pub fn mark_basic(&mut self, value: &ValueSym) -> Result<(), KbError> {
        if !self.nodes.contains(value) {
            return Err(KbError::UnknownValue {
                attribute: self.attribute.clone(),
                value: value.clone(),
            });
        }
        self.basic.insert(value.clone());
        Ok(())
    }

    pub fn contains(&self, value: &ValueSym) -> bool {
        self.nodes.contains(value)
    }

    pub fn parent(&self, value: &ValueSym) -> Option<&ValueSym> {
        self.parent.get(value)
    }

    pub fn is_basic(&self, value: &ValueSym) -> bool {
        self.basic.contains(value)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &ValueSym> {
        self.nodes.iter()
    }

    pub fn basic_values(&self) -> impl Iterator<Item = &ValueSym> {
        self.basic.iter()
    }

    /// Children of `value`, in symbol order.
    pub fn children(&self, value: &ValueSym) -> Vec<&ValueSym> {
        self.parent
            .iter()
            .filter(|(_, p)| *p == value)
            .map(|(c, _)| c)
            .collect()
    }

    /// Root values (no parent), in symbol order.
    pub fn roots(&self) -> Vec<&ValueSym> {
        self.nodes
            .iter()
            .filter(|v| !self.parent.contains_key(*v))
            .collect()
    }

    /// The path from `value`'s root down to `value`, inclusive. Walks are
    /// step-bounded so a malformed cyclic taxonomy cannot hang callers.
    pub fn path_from_root(&self, value: &ValueSym) -> Result<Vec<ValueSym>, KbError> {
        if !self.nodes.contains(value) {
            return Err(KbError::UnknownValue {
                attribute: self.attribute.clone(),
                value: value.clone(),
            });
        }
        let mut path = vec![value.clone()];
        let mut cur = value;
        for _ in 0..self.nodes.len() {
            match self.parent.get(cur) {
                Some(p) => {
                    path.push(p.clone());
                    cur = p;
                }
                None => break,
            }
        }
        path.reverse();
        Ok(path)
    }
}

/// Reflexive-transitive subsumption: does `ancestor` sit on `descendant`'s
/// parent chain (or equal it)?
pub fn subsumes(
    taxonomy: &Taxonomy,
    ancestor: &ValueSym,
    descendant: &ValueSym,
) -> Result<bool, KbError> {
    for v in [ancestor, descendant] {
        if !taxonomy.contains(v) {
            return Err(KbError::UnknownValue {
                attribute: taxonomy.attribute.clone(),
                value: v.clone(),
            });
        }
    }
    if ancestor == descendant {
        return Ok(true);
    }
    let mut cur = descendant;
    for _ in 0..taxonomy.nodes.len() {
        match taxonomy.parent.get(cur) {
            Some(p) if p == ancestor => return Ok(true),
            Some(p) => cur = p,
            None => return Ok(false),
        }
    }
    Ok(false) // cycle guard tripped; check_scene reports the cycle itself
}

/// An entity with its most specific known value per attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    id: EntityId,
    properties: BTreeMap<AttrName, ValueSym>,
}

impl Entity {
    pub fn new(id: impl Into<EntityId>) -> Self {
        Entity {
            id: id.into(),
            properties: BTreeMap::new(),
        }
    }

    pub fn with(mut self, attribute: impl Into<AttrName>, value: impl Into<ValueSym>) -> Self {
        self.properties.insert(attribute.into(), value.into());
        self
    }

    pub fn id(&self) -> &EntityId {
        &self.id
    }

    pub fn value(&self, attribute: &AttrName) -> Option<&ValueSym> {
        self.properties.get(attribute)
    }

    pub fn has(&self, attribute: &AttrName) -> bool {
        self.properties.contains_key(attribute)
    }

    pub fn properties(&self) -> impl Iterator<Item = (&AttrName, &ValueSym)> {
        self.properties.iter()
    }
}

/// A complete scene: entities, taxonomies, the preferred-attribute order
/// shared by all generation runs, and the hearer model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scene {
    entities: BTreeMap<EntityId, Entity>,
    taxonomies: BTreeMap<AttrName, Taxonomy>,
    preferred: Vec<AttrName>,
    hearer: HearerModel,
}

impl Scene {
    pub fn new(
        entities: Vec<Entity>,
        taxonomies: Vec<Taxonomy>,
        preferred: Vec<AttrName>,
        hearer: HearerModel,
    ) -> Self {
        Scene {
            entities: entities.into_iter().map(|e| (e.id.clone(), e)).collect(),
            taxonomies: taxonomies
                .into_iter()
                .map(|t| (t.attribute.clone(), t))
                .collect(),
            preferred,
            hearer,
        }
    }

    pub fn entity(&self, id: &EntityId) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    pub fn entity_ids(&self) -> impl Iterator<Item = &EntityId> {
        self.entities.keys()
    }

    pub fn taxonomy(&self, attribute: &AttrName) -> Option<&Taxonomy> {
        self.taxonomies.get(attribute)
    }

    pub fn taxonomies(&self) -> impl Iterator<Item = &Taxonomy> {
        self.taxonomies.values()
    }

    pub fn preferred_attributes(&self) -> &[AttrName] {
        &self.preferred
    }

    pub fn hearer(&self) -> &HearerModel {
        &self.hearer
    }

    /// A copy of this scene with a different preferred-attribute order.
    pub fn with_preferred(&self, preferred: Vec<AttrName>) -> Self {
        Scene {
            preferred,
            ..self.clone()
        }
    }

    /// A copy of this scene with a different hearer model.
    pub fn with_hearer(&self, hearer: HearerModel) -> Self {
        Scene {
            hearer,
            ..self.clone()
        }
    }
}

/// Accuracy of a pair against an entity: the entity has a value for the
/// pair's attribute and the pair's value subsumes it. Total — unknown
/// entities and attributes simply yield `false`.
pub fn applies(scene: &Scene, entity_id: &EntityId, pair: &Pair) -> bool {
    let Some(entity) = scene.entity(entity_id) else {
        return false;
    };
    let Some(actual) = entity.value(&pair.attribute) else {
        return false;
    };
    let Some(taxonomy) = scene.taxonomy(&pair.attribute) else {
        return false;
    };
    subsumes(taxonomy, &pair.value, actual).unwrap_or(false)
}

/// How bad a [`Violation`] is. Warnings (an explicit hearer override that
/// contradicts what actually holds in the scene) never fail validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A scene invariant violation, rendered as `code(args)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoEntities,
    MissingType {
        entity: EntityId,
    },
    MissingTaxonomy {
        attribute: AttrName,
    },
    UnknownValue {
        entity: EntityId,
        attribute: AttrName,
        value: ValueSym,
    },
    CyclicTaxonomy {
        attribute: AttrName,
    },
    DanglingParent {
        attribute: AttrName,
        value: ValueSym,
    },
    NestedBasic {
        attribute: AttrName,
        outer: ValueSym,
        inner: ValueSym,
    },
    EmptyPreferred,
    DuplicatePreferred {
        attribute: AttrName,
    },
    TypeNotPreferred,
    UnknownDepthLimit {
        attribute: AttrName,
        value: ValueSym,
    },
    OverrideContradictsScene {
        entity: EntityId,
        attribute: AttrName,
        value: ValueSym,
    },
}

impl Violation {
    pub fn severity(&self) -> Severity {
        match self {
            Violation::OverrideContradictsScene { .. } => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoEntities => write!(f, "no-entities"),
            Violation::MissingType { entity } => write!(f, "missing-type({entity})"),
            Violation::MissingTaxonomy { attribute } => {
                write!(f, "missing-taxonomy({attribute})")
            }
            Violation::UnknownValue {
                entity,
                attribute,
                value,
            } => {
                write!(f, "unknown-value({entity}, {attribute}, {value})")
            }
            Violation::CyclicTaxonomy { attribute } => write!(f, "cyclic-taxonomy({attribute})"),
            Violation::DanglingParent { attribute, value } => {
                write!(f, "dangling-parent({attribute}, {value})")
            }
            Violation::NestedBasic {
                attribute,
                outer,
                inner,
            } => {
                write!(f, "nested-basic({attribute}, {outer}, {inner})")
            }
            Violation::EmptyPreferred => write!(f, "empty-preferred"),
            Violation::DuplicatePreferred { attribute } => {
                write!(f, "duplicate-preferred({attribute})")
            }
            Violation::TypeNotPreferred => write!(f, "type-not-preferred"),
            Violation::UnknownDepthLimit { attribute, value } => {
                write!(f, "unknown-depth-limit({attribute}, {value})")
            }
            Violation::OverrideContradictsScene {
                entity,
                attribute,
                value,
            } => {
                write!(
                    f,
                    "override-contradicts-scene({entity}, {attribute}, {value})"
                )
            }
        }
    }
}

/// Validates every scene invariant and returns all violations found; the
/// empty list means the scene is well-formed. Warnings are included — filter
/// by [`Violation::severity`] when only hard errors matter.
pub fn check_scene(scene: &Scene) -> Vec<Violation> {
    let mut out = Vec::new();

    if scene.entities.is_empty() {
        out.push(Violation::NoEntities);
    }

    for taxonomy in scene.taxonomies.values() {
        check_taxonomy(taxonomy, &mut out);
    }

    let type_attr = AttrName::type_attr();
    for entity in scene.entities.values() {
        if !entity.has(&type_attr) {
            out.push(Violation::MissingType {
                entity: entity.id.clone(),
            });
        }
        for (attribute, value) in entity.properties() {
            match scene.taxonomy(attribute) {
                None => out.push(Violation::MissingTaxonomy {
                    attribute: attribute.clone(),
                }),
                Some(tax) if !tax.contains(value) => out.push(Violation::UnknownValue {
                    entity: entity.id.clone(),
                    attribute: attribute.clone(),
                    value: value.clone(),
                }),
                Some(_) => {}
            }
        }
    }

    if scene.preferred.is_empty() {
        out.push(Violation::EmptyPreferred);
    } else {
        let mut seen = BTreeSet::new();
        for attr in &scene.preferred {
            if !seen.insert(attr) {
                out.push(Violation::DuplicatePreferred {
                    attribute: attr.clone(),
                });
            }
        }
        if !scene.preferred.iter().any(|a| a.is_type()) {
            out.push(Violation::TypeNotPreferred);
        }
    }

    check_hearer(scene, &mut out);
    out
}

fn check_taxonomy(taxonomy: &Taxonomy, out: &mut Vec<Violation>) {
    let mut cyclic = false;
    let mut dangling: BTreeSet<&ValueSym> = BTreeSet::new();
    for node in taxonomy.nodes() {
        let mut cur = node;
        let mut steps = 0usize;
        while let Some(p) = taxonomy.parent(cur) {
            if !taxonomy.contains(p) {
                dangling.insert(p);
                break;
            }
            cur = p;
            steps += 1;
            if steps > taxonomy.nodes.len() {
                cyclic = true;
                break;
            }
        }
        if cyclic {
            break;
        }
    }
    if cyclic {
        out.push(Violation::CyclicTaxonomy {
            attribute: taxonomy.attribute.clone(),
        });
        return; // path walks below would not terminate meaningfully
    }
    for value in dangling {
        out.push(Violation::DanglingParent {
            attribute: taxonomy.attribute.clone(),
            value: value.clone(),
        });
    }

    // No basic-level value may sit above another on one root-to-leaf path.
    for inner in taxonomy.basic_values() {
        let mut cur = inner;
        while let Some(p) = taxonomy.parent(cur) {
            if !taxonomy.contains(p) {
                break;
            }
            if taxonomy.is_basic(p) {
                out.push(Violation::NestedBasic {
                    attribute: taxonomy.attribute.clone(),
                    outer: p.clone(),
                    inner: inner.clone(),
                });
            }
            cur = p;
        }
    }
}

fn check_hearer(scene: &Scene, out: &mut Vec<Violation>) {
    let hearer = scene.hearer();
    for (attribute, values) in hearer.depth_limits() {
        match scene.taxonomy(attribute) {
            None => out.push(Violation::MissingTaxonomy {
                attribute: attribute.clone(),
            }),
            Some(tax) => {
                for value in values {
                    if !tax.contains(value) {
                        out.push(Violation::UnknownDepthLimit {
                            attribute: attribute.clone(),
                            value: value.clone(),
                        });
                    }
                }
            }
        }
    }
    // Explicit overrides are allowed to disagree with the scene, but a
    // `true` claim for an inaccurate pair (or vice versa) is worth a lint.
    for ((entity, attribute, value), claimed) in hearer.known_facts() {
        let pair = Pair {
            attribute: attribute.clone(),
            value: value.clone(),
        };
        if applies(scene, entity, &pair) != *claimed {
            out.push(Violation::OverrideContradictsScene {
                entity: entity.clone(),
                attribute: attribute.clone(),
                value: value.clone(),
            });
        }
    }
}

/// Errors raised when assembling a [`GenerationTask`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("unknown entity `{0}`")]
    UnknownEntity(EntityId),
    #[error("referent `{0}` may not be a member of its own contrast set")]
    ReferentInContrast(EntityId),
}

/// One generation problem: the intended referent and the contrast set of
/// distractors it must be distinguished from, over a shared scene.
#[derive(Debug, Clone)]
pub struct GenerationTask<'a> {
    scene: &'a Scene,
    referent: EntityId,
    contrast: BTreeSet<EntityId>,
}

impl<'a> GenerationTask<'a> {
    pub fn new(
        scene: &'a Scene,
        referent: EntityId,
        contrast: BTreeSet<EntityId>,
    ) -> Result<Self, TaskError> {
        if scene.entity(&referent).is_none() {
            return Err(TaskError::UnknownEntity(referent));
        }
        for id in &contrast {
            if scene.entity(id).is_none() {
                return Err(TaskError::UnknownEntity(id.clone()));
            }
        }
        if contrast.contains(&referent) {
            return Err(TaskError::ReferentInContrast(referent));
        }
        Ok(GenerationTask {
            scene,
            referent,
            contrast,
        })
    }

    /// Contrast set defaulted to every other entity in the scene.
    pub fn against_rest(scene: &'a Scene, referent: EntityId) -> Result<Self, TaskError> {
        let contrast = scene
            .entity_ids()
            .filter(|id| **id != referent)
            .cloned()
            .collect::<BTreeSet<_>>();
        GenerationTask::new(scene, referent, contrast)
    }

    pub fn scene(&self) -> &'a Scene {
        self.scene
    }

    pub fn referent(&self) -> &EntityId {
        &self.referent
    }

    pub fn contrast(&self) -> &BTreeSet<EntityId> {
        &self.contrast
    }

    pub fn referent_entity(&self) -> &'a Entity {
        self.scene
            .entity(&self.referent)
            .expect("validated at construction")
    }
}

/// The semantic content of a referring expression: an ordered list of pairs,
/// at most one per attribute, in the order the algorithm selected them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Description {
    pairs: Vec<Pair>,
}

impl Description {
    pub fn empty() -> Self {
        Description { pairs: Vec::new() }
    }

    /// Panics if two pairs share an attribute; descriptions carry at most
    /// one value per attribute.
    pub fn from_pairs(pairs: Vec<Pair>) -> Self {
        let mut seen = BTreeSet::new();
        for p in &pairs {
            assert!(
                seen.insert(&p.attribute),
                "duplicate attribute `{}` in description",
                p.attribute
            );
        }
        Description { pairs }
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn value_of(&self, attribute: &AttrName) -> Option<&ValueSym> {
        self.pairs
            .iter()
            .find(|p| p.attribute == *attribute)
            .map(|p| &p.value)
    }

    pub fn has_attribute(&self, attribute: &AttrName) -> bool {
        self.pairs.iter().any(|p| p.attribute == *attribute)
    }

    /// The type pair's value, if a type pair is present.
    pub fn head_value(&self) -> Option<&ValueSym> {
        self.pairs
            .iter()
            .find(|p| p.attribute.is_type())
            .map(|p| &p.value)
    }
}

impl fmt::Display for Description {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<Pair> for Description {
    fn from_iter<T: IntoIterator<Item = Pair>>(iter: T) -> Self {
        Description::from_pairs(iter.into_iter().collect())
    }
}
