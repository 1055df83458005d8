//! The hearer model and its three interface functions: [`user_knows`],
//! [`basic_level_value`], and [`more_specific_value`].
//!
//! A description is only useful if the hearer can verify it, so every
//! generation algorithm consults the hearer model rather than raw scene
//! truth. Three modes cover the behaviours a host system needs:
//!
//! * **perceptual** — the hearer can visually verify any pair, so knowledge
//!   collapses to two-valued accuracy;
//! * **depth-limited** — per attribute, the hearer can only tell values in a
//!   given set apart (a hearer who distinguishes `dog` from `cat` but no
//!   breeds); pairs below that frontier come back `Unknown`;
//! * **explicit** — only individually listed facts are known, everything
//!   else is `Unknown`. Useful for fixtures and stubbing user models.
//!
//! Explicitly listed facts override the mode rule in all three modes.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::kb::{applies, AttrName, EntityId, KbError, Pair, Scene, ValueSym};

/// Tri-state hearer knowledge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Knowledge {
    True,
    False,
    Unknown,
}

impl From<bool> for Knowledge {
    fn from(b: bool) -> Self {
        if b {
            Knowledge::True
        } else {
            Knowledge::False
        }
    }
}

/// Which base rule [`user_knows`] applies when no explicit fact matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HearerMode {
    #[default]
    Perceptual,
    DepthLimited,
    Explicit,
}

/// The hearer: a mode, per-attribute distinguishable-value sets for
/// depth-limited hearers, explicit fact overrides, and optional per-user
/// basic-level overrides (keyed by entity, with `None` as the wildcard).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HearerModel {
    mode: HearerMode,
    depth_limits: BTreeMap<AttrName, BTreeSet<ValueSym>>,
    known_facts: BTreeMap<(EntityId, AttrName, ValueSym), bool>,
    basic_overrides: BTreeMap<(Option<EntityId>, AttrName), ValueSym>,
}

impl HearerModel {
    pub fn perceptual() -> Self {
        HearerModel {
            mode: HearerMode::Perceptual,
            ..Default::default()
        }
    }

    pub fn depth_limited() -> Self {
        HearerModel {
            mode: HearerMode::DepthLimited,
            ..Default::default()
        }
    }

    pub fn explicit() -> Self {
        HearerModel {
            mode: HearerMode::Explicit,
            ..Default::default()
        }
    }

    pub fn mode(&self) -> HearerMode {
        self.mode
    }

    /// Declares which values of `attribute` a depth-limited hearer can tell
    /// apart. Attributes with no entry fall back to perceptual behaviour.
    pub fn with_limit(
        mut self,
        attribute: impl Into<AttrName>,
        values: impl IntoIterator<Item = ValueSym>,
    ) -> Self {
        self.depth_limits
            .entry(attribute.into())
            .or_default()
            .extend(values);
        self
    }

    /// Records an explicit fact: the hearer knows `pair` to hold (or not)
    /// of `entity`, whatever the scene says.
    pub fn with_fact(mut self, entity: impl Into<EntityId>, pair: Pair, holds: bool) -> Self {
        self.known_facts
            .insert((entity.into(), pair.attribute, pair.value), holds);
        self
    }

    /// Overrides the basic-level value of `attribute`, either for one entity
    /// or (with `entity = None`) for all of them.
    pub fn with_basic_override(
        mut self,
        entity: Option<EntityId>,
        attribute: impl Into<AttrName>,
        value: impl Into<ValueSym>,
    ) -> Self {
        self.basic_overrides
            .insert((entity, attribute.into()), value.into());
        self
    }

    pub fn depth_limits(&self) -> impl Iterator<Item = (&AttrName, &BTreeSet<ValueSym>)> {
        self.depth_limits.iter()
    }

    pub fn known_facts(&self) -> impl Iterator<Item = (&(EntityId, AttrName, ValueSym), &bool)> {
        self.known_facts.iter()
    }

    pub fn basic_overrides(
        &self,
    ) -> impl Iterator<Item = (&(Option<EntityId>, AttrName), &ValueSym)> {
        self.basic_overrides.iter()
    }

    fn limit_for(&self, attribute: &AttrName) -> Option<&BTreeSet<ValueSym>> {
        self.depth_limits.get(attribute)
    }

    fn fact(&self, entity: &EntityId, pair: &Pair) -> Option<bool> {
        if self.known_facts.is_empty() {
            return None; // skip the keying clones on the common path
        }
        self.known_facts
            .get(&(entity.clone(), pair.attribute.clone(), pair.value.clone()))
            .copied()
    }

    fn basic_override(&self, entity: &EntityId, attribute: &AttrName) -> Option<&ValueSym> {
        if self.basic_overrides.is_empty() {
            return None;
        }
        self.basic_overrides
            .get(&(Some(entity.clone()), attribute.clone()))
            .or_else(|| self.basic_overrides.get(&(None, attribute.clone())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HearerError {
    #[error("invalid reference: entity `{entity}` has no attribute `{attribute}`")]
    InvalidReference {
        entity: EntityId,
        attribute: AttrName,
    },
    #[error("invalid reference: unknown entity `{0}`")]
    UnknownEntity(EntityId),
    #[error("invalid specialization: `{value}` is not an ancestor of `{entity}`'s value for `{attribute}`")]
    InvalidSpecialization {
        entity: EntityId,
        attribute: AttrName,
        value: ValueSym,
    },
    #[error(transparent)]
    Kb(#[from] KbError),
}

/// Does the hearer know (or can she easily verify) that `pair` holds of the
/// entity? Explicit facts win; otherwise the mode rule decides.
pub fn user_knows(
    scene: &Scene,
    entity_id: &EntityId,
    pair: &Pair,
) -> Result<Knowledge, HearerError> {
    if scene.entity(entity_id).is_none() {
        return Err(HearerError::UnknownEntity(entity_id.clone()));
    }
    if scene.taxonomy(&pair.attribute).is_none() {
        return Err(HearerError::InvalidReference {
            entity: entity_id.clone(),
            attribute: pair.attribute.clone(),
        });
    }
    let model = scene.hearer();
    if let Some(holds) = model.fact(entity_id, pair) {
        return Ok(holds.into());
    }
    match model.mode() {
        HearerMode::Perceptual => Ok(applies(scene, entity_id, pair).into()),
        HearerMode::DepthLimited => match model.limit_for(&pair.attribute) {
            Some(distinguishable) if !distinguishable.contains(&pair.value) => {
                Ok(Knowledge::Unknown)
            }
            _ => Ok(applies(scene, entity_id, pair).into()),
        },
        HearerMode::Explicit => Ok(Knowledge::Unknown),
    }
}

/// The basic-level value of an attribute of an entity: a per-user override
/// if one is registered, else the basic-marked ancestor (inclusive) of the
/// entity's recorded value, else the recorded value itself.
pub fn basic_level_value(
    scene: &Scene,
    entity_id: &EntityId,
    attribute: &AttrName,
) -> Result<ValueSym, HearerError> {
    let entity = scene
        .entity(entity_id)
        .ok_or_else(|| HearerError::UnknownEntity(entity_id.clone()))?;
    let recorded = entity
        .value(attribute)
        .ok_or_else(|| HearerError::InvalidReference {
            entity: entity_id.clone(),
            attribute: attribute.clone(),
        })?;
    if let Some(over) = scene.hearer().basic_override(entity_id, attribute) {
        return Ok(over.clone());
    }
    if let Some(taxonomy) = scene.taxonomy(attribute) {
        let path = taxonomy.path_from_root(recorded)?;
        if let Some(basic) = path.iter().find(|v| taxonomy.is_basic(v)) {
            return Ok(basic.clone());
        }
    }
    Ok(recorded.clone())
}

/// One specialization step toward the entity's recorded value for
/// `attribute`.
///
/// * from the `no-value` sentinel (`value = None`), returns the root of the
///   entity's value path — the most general ancestor of its recorded value;
/// * from a value on that path, returns the unique child on the path;
/// * from the recorded value itself, returns `None`: no further step exists.
///
/// A `value` that is not on the recorded value's root path cannot be
/// specialized toward it and is an error.
pub fn more_specific_value(
    scene: &Scene,
    entity_id: &EntityId,
    attribute: &AttrName,
    value: Option<&ValueSym>,
) -> Result<Option<ValueSym>, HearerError> {
    let entity = scene
        .entity(entity_id)
        .ok_or_else(|| HearerError::UnknownEntity(entity_id.clone()))?;
    let recorded = entity
        .value(attribute)
        .ok_or_else(|| HearerError::InvalidReference {
            entity: entity_id.clone(),
            attribute: attribute.clone(),
        })?;
    let taxonomy = scene
        .taxonomy(attribute)
        .ok_or_else(|| HearerError::InvalidReference {
            entity: entity_id.clone(),
            attribute: attribute.clone(),
        })?;
    let path = taxonomy.path_from_root(recorded)?;
    match value {
        None => Ok(Some(path[0].clone())),
        Some(v) if v == recorded => Ok(None),
        Some(v) => match path.iter().position(|p| p == v) {
            Some(pos) => Ok(Some(path[pos + 1].clone())),
            None => Err(HearerError::InvalidSpecialization {
                entity: entity_id.clone(),
                attribute: attribute.clone(),
                value: v.clone(),
            }),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{Entity, Scene, Taxonomy};

    /// Breed-blind hearer: distinguishes dog from cat, no finer.
    fn breed_blind() -> HearerModel {
        HearerModel::depth_limited().with_limit("type", ["dog".into(), "cat".into()])
    }

    fn breeds_scene(hearer: HearerModel) -> Scene {
        let mut ty = Taxonomy::new("type");
        let object = ty.add_root("object").unwrap();
        let animal = ty.add_child(&object, "animal").unwrap();
        let dog = ty.add_child(&animal, "dog").unwrap();
        ty.add_child(&dog, "chihuahua").unwrap();
        let cat = ty.add_child(&animal, "cat").unwrap();
        ty.add_child(&cat, "siamese-cat").unwrap();
        ty.mark_basic(&dog).unwrap();
        ty.mark_basic(&cat).unwrap();
        let mut colour = Taxonomy::new("colour");
        colour.add_root("black").unwrap();
        colour.add_root("white").unwrap();
        Scene::new(
            vec![
                Entity::new("x")
                    .with("type", "chihuahua")
                    .with("colour", "black"),
                Entity::new("Garfield")
                    .with("type", "siamese-cat")
                    .with("colour", "black"),
            ],
            vec![ty, colour],
            vec!["type".into(), "colour".into()],
            hearer,
        )
    }

    #[test]
    fn user_knows_is_tri_state_for_a_breed_blind_hearer() {
        let scene = breeds_scene(breed_blind());
        let x: EntityId = "x".into();
        assert_eq!(
            user_knows(&scene, &x, &Pair::new("type", "dog")),
            Ok(Knowledge::True)
        );
        assert_eq!(
            user_knows(&scene, &x, &Pair::new("type", "cat")),
            Ok(Knowledge::False)
        );
        assert_eq!(
            user_knows(&scene, &x, &Pair::new("type", "chihuahua")),
            Ok(Knowledge::Unknown)
        );
        // attributes without a declared limit behave perceptually
        assert_eq!(
            user_knows(&scene, &x, &Pair::new("colour", "black")),
            Ok(Knowledge::True)
        );
    }

    #[test]
    fn user_knows_perceptual_is_two_valued() {
        let scene = breeds_scene(HearerModel::perceptual());
        let x: EntityId = "x".into();
        assert_eq!(
            user_knows(&scene, &x, &Pair::new("type", "chihuahua")),
            Ok(Knowledge::True)
        );
        assert_eq!(
            user_knows(&scene, &x, &Pair::new("type", "cat")),
            Ok(Knowledge::False)
        );
    }

    #[test]
    fn explicit_facts_override_the_mode_rule() {
        let hearer = HearerModel::perceptual().with_fact("x", Pair::new("colour", "black"), false);
        let scene = breeds_scene(hearer);
        assert_eq!(
            user_knows(&scene, &"x".into(), &Pair::new("colour", "black")),
            Ok(Knowledge::False)
        );
    }

    #[test]
    fn explicit_mode_defaults_to_unknown() {
        let hearer = HearerModel::explicit().with_fact("x", Pair::new("type", "dog"), true);
        let scene = breeds_scene(hearer);
        let x: EntityId = "x".into();
        assert_eq!(
            user_knows(&scene, &x, &Pair::new("type", "dog")),
            Ok(Knowledge::True)
        );
        assert_eq!(
            user_knows(&scene, &x, &Pair::new("colour", "black")),
            Ok(Knowledge::Unknown)
        );
    }

    #[test]
    fn user_knows_rejects_unknown_references() {
        let scene = breeds_scene(HearerModel::perceptual());
        assert!(user_knows(&scene, &"nobody".into(), &Pair::new("type", "dog")).is_err());
        assert!(user_knows(&scene, &"x".into(), &Pair::new("weight", "heavy")).is_err());
    }

    #[test]
    fn basic_level_prefers_the_marked_ancestor() {
        let scene = breeds_scene(HearerModel::perceptual());
        assert_eq!(
            basic_level_value(&scene, &"Garfield".into(), &"type".into()),
            Ok("cat".into())
        );
        assert_eq!(
            basic_level_value(&scene, &"x".into(), &"type".into()),
            Ok("dog".into())
        );
        // no basic mark anywhere on the colour path: fall back to recorded
        assert_eq!(
            basic_level_value(&scene, &"x".into(), &"colour".into()),
            Ok("black".into())
        );
    }

    #[test]
    fn basic_level_override_wins() {
        let hearer = HearerModel::perceptual().with_basic_override(None, "type", "animal");
        let scene = breeds_scene(hearer);
        assert_eq!(
            basic_level_value(&scene, &"x".into(), &"type".into()),
            Ok("animal".into())
        );
    }

    #[test]
    fn basic_level_errors_on_absent_attribute() {
        let scene = breeds_scene(HearerModel::perceptual());
        assert!(matches!(
            basic_level_value(&scene, &"x".into(), &"weight".into()),
            Err(HearerError::InvalidReference { .. })
        ));
    }

    #[test]
    fn more_specific_value_steps_along_the_recorded_path() {
        let scene = breeds_scene(HearerModel::perceptual());
        let x: EntityId = "x".into();
        let ty: AttrName = "type".into();
        assert_eq!(
            more_specific_value(&scene, &x, &ty, Some(&"dog".into())),
            Ok(Some("chihuahua".into()))
        );
        assert_eq!(
            more_specific_value(&scene, &x, &ty, Some(&"chihuahua".into())),
            Ok(None)
        );
        // the no-value sentinel restarts specialization at the path root
        assert_eq!(
            more_specific_value(&scene, &x, &ty, None),
            Ok(Some("object".into()))
        );
    }

    #[test]
    fn more_specific_value_rejects_off_path_values() {
        let scene = breeds_scene(HearerModel::perceptual());
        assert!(matches!(
            more_specific_value(&scene, &"x".into(), &"type".into(), Some(&"cat".into())),
            Err(HearerError::InvalidSpecialization { .. })
        ));
    }

    #[test]
    fn iterating_specialization_reaches_the_recorded_value() {
        let scene = breeds_scene(HearerModel::perceptual());
        let x: EntityId = "x".into();
        let ty: AttrName = "type".into();
        let mut steps = Vec::new();
        let mut cur: Option<ValueSym> = None;
        while let Some(next) = more_specific_value(&scene, &x, &ty, cur.as_ref()).unwrap() {
            steps.push(next.clone());
            cur = Some(next);
        }
        let expect: Vec<ValueSym> = ["object", "animal", "dog", "chihuahua"]
            .into_iter()
            .map(ValueSym::new)
            .collect();
        assert_eq!(steps, expect);
    }
}
