//! Scene-file parsing and the three description serializations: the
//! `attribute=value` pair list, an SPL-style term, and a naive surface
//! string.
//!
//! # Scene format
//!
//! Line-oriented, two spaces of indentation per level, `#` starts a comment:
//!
//! ```text
//! taxonomy type
//!   object
//!     animal
//!       dog*
//!         chihuahua
//!       cat*
//!         siamese-cat
//! taxonomy colour
//!   black
//!   white
//! entity Object1
//!   type chihuahua
//!   size small
//!   colour black
//! preferred type colour size
//! hearer depth-limited
//!   type: dog cat
//! ```
//!
//! A `*` suffix marks a basic-level value. Attributes used by entities
//! without a declared taxonomy get single-node taxonomies automatically, one
//! root per distinct value (declared taxonomies, in contrast, reject values
//! they do not contain). The `hearer` block is optional and defaults to
//! `perceptual`; a `depth-limited` block lists the values the hearer can
//! tell apart per attribute (`type: dog cat`), an `explicit` block lists
//! known facts (`Object1 type dog true`), and any mode accepts basic-level
//! overrides (`basic * type dog`, `basic Object1 type dog`).
//!
//! Parsing is strict about indentation: tabs are rejected by name, levels
//! may not jump. Semantic problems are delegated to
//! [`check_scene`](crate::kb::check_scene) and reported with the source line
//! they arose from.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::hearer::{HearerMode, HearerModel};
use crate::kb::{
    check_scene, AttrName, Description, Entity, EntityId, Scene, Severity, Taxonomy, ValueSym,
    Violation,
};

/// A parse or validation message anchored to the source text. Lines and
/// columns are 1-based; zero means "whole file" / "whole line".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            column,
            message: message.into(),
        }
    }

    fn on_line(line: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            column: 0,
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        Diagnostic {
            line: 0,
            column: 0,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (0, _) => write!(f, "{}", self.message),
            (l, 0) => write!(f, "line {l}: {}", self.message),
            (l, c) => write!(f, "line {l}, column {c}: {}", self.message),
        }
    }
}

/// Errors from the description serializers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("description has no type pair; apply ensure_head_noun before serializing")]
    MissingTypePair,
}

#[derive(Debug)]
enum Block {
    None,
    Taxonomy {
        attribute: AttrName,
        stack: Vec<(usize, ValueSym)>,
    },
    Entity {
        id: EntityId,
    },
    Hearer {
        mode: HearerMode,
    },
}

#[derive(Default)]
struct Anchors {
    entity: BTreeMap<EntityId, usize>,
    property: BTreeMap<(EntityId, AttrName), usize>,
    taxonomy: BTreeMap<AttrName, usize>,
    value: BTreeMap<(AttrName, ValueSym), usize>,
    limit: BTreeMap<AttrName, usize>,
    preferred: usize,
    hearer: usize,
}

impl Anchors {
    fn for_violation(&self, v: &Violation) -> usize {
        match v {
            Violation::NoEntities => 0,
            Violation::MissingType { entity } => self.entity.get(entity).copied().unwrap_or(0),
            Violation::MissingTaxonomy { attribute } => self
                .limit
                .get(attribute)
                .or_else(|| {
                    self.property
                        .iter()
                        .find(|((_, a), _)| a == attribute)
                        .map(|(_, l)| l)
                })
                .copied()
                .unwrap_or(0),
            Violation::UnknownValue {
                entity, attribute, ..
            } => self
                .property
                .get(&(entity.clone(), attribute.clone()))
                .copied()
                .unwrap_or(0),
            Violation::CyclicTaxonomy { attribute }
            | Violation::DanglingParent { attribute, .. } => {
                self.taxonomy.get(attribute).copied().unwrap_or(0)
            }
            Violation::NestedBasic {
                attribute, inner, ..
            } => self
                .value
                .get(&(attribute.clone(), inner.clone()))
                .copied()
                .unwrap_or(0),
            Violation::EmptyPreferred | Violation::TypeNotPreferred => self.preferred,
            Violation::DuplicatePreferred { .. } => self.preferred,
            Violation::UnknownDepthLimit { attribute, .. } => {
                self.limit.get(attribute).copied().unwrap_or(self.hearer)
            }
            Violation::OverrideContradictsScene { .. } => self.hearer,
        }
    }
}

struct Parser {
    errors: Vec<Diagnostic>,
    block: Block,
    taxonomies: BTreeMap<AttrName, Taxonomy>,
    entities: Vec<Entity>,
    entity_ids: BTreeSet<EntityId>,
    preferred: Vec<AttrName>,
    hearer: HearerModel,
    saw_hearer: bool,
    anchors: Anchors,
}

impl Parser {
    fn new() -> Self {
        Parser {
            errors: Vec::new(),
            block: Block::None,
            taxonomies: BTreeMap::new(),
            entities: Vec::new(),
            entity_ids: BTreeSet::new(),
            preferred: Vec::new(),
            hearer: HearerModel::perceptual(),
            saw_hearer: false,
            anchors: Anchors::default(),
        }
    }

    fn error(&mut self, d: Diagnostic) {
        self.errors.push(d);
    }

    fn line(&mut self, no: usize, raw: &str) {
        let text = raw.strip_suffix('\r').unwrap_or(raw);
        let trimmed = text.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            return;
        }
        let indent_len = text.len() - trimmed.len();
        let indent = &text[..indent_len];
        if let Some(pos) = indent.find('\t') {
            self.error(Diagnostic::at(
                no,
                pos + 1,
                "tab character in indentation; indent with 2 spaces per level",
            ));
            return;
        }
        if !indent_len.is_multiple_of(2) {
            self.error(Diagnostic::at(
                no,
                indent_len,
                "indentation must be a multiple of 2 spaces",
            ));
            return;
        }
        let depth = indent_len / 2;
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if depth == 0 {
            self.directive(no, &tokens);
        } else {
            self.continuation(no, depth, indent_len, &tokens);
        }
    }

    fn directive(&mut self, no: usize, tokens: &[&str]) {
        self.block = Block::None;
        match tokens[0] {
            "taxonomy" => {
                if tokens.len() != 2 {
                    self.error(Diagnostic::on_line(no, "expected `taxonomy <attribute>`"));
                    return;
                }
                let attribute = AttrName::new(tokens[1]);
                if self.taxonomies.contains_key(&attribute) {
                    self.error(Diagnostic::on_line(
                        no,
                        format!("taxonomy `{attribute}` is already declared"),
                    ));
                    return;
                }
                self.anchors.taxonomy.insert(attribute.clone(), no);
                self.taxonomies
                    .insert(attribute.clone(), Taxonomy::new(attribute.clone()));
                self.block = Block::Taxonomy {
                    attribute,
                    stack: Vec::new(),
                };
            }
            "entity" => {
                if tokens.len() != 2 {
                    self.error(Diagnostic::on_line(no, "expected `entity <id>`"));
                    return;
                }
                let id = EntityId::new(tokens[1]);
                if !self.entity_ids.insert(id.clone()) {
                    self.error(Diagnostic::on_line(
                        no,
                        format!("entity `{id}` is already declared"),
                    ));
                    return;
                }
                self.anchors.entity.insert(id.clone(), no);
                self.entities.push(Entity::new(id.clone()));
                self.block = Block::Entity { id };
            }
            "preferred" => {
                if tokens.len() < 2 {
                    self.error(Diagnostic::on_line(
                        no,
                        "expected `preferred <attribute>...`",
                    ));
                    return;
                }
                if self.anchors.preferred != 0 {
                    self.error(Diagnostic::on_line(no, "duplicate `preferred` directive"));
                    return;
                }
                self.anchors.preferred = no;
                self.preferred = tokens[1..].iter().map(|t| AttrName::new(*t)).collect();
            }
            "hearer" => {
                if tokens.len() != 2 {
                    self.error(Diagnostic::on_line(
                        no,
                        "expected `hearer perceptual|depth-limited|explicit`",
                    ));
                    return;
                }
                if self.saw_hearer {
                    self.error(Diagnostic::on_line(no, "duplicate `hearer` directive"));
                    return;
                }
                let mode = match tokens[1] {
                    "perceptual" => HearerMode::Perceptual,
                    "depth-limited" => HearerMode::DepthLimited,
                    "explicit" => HearerMode::Explicit,
                    other => {
                        self.error(Diagnostic::on_line(
                            no,
                            format!(
                                "unknown hearer mode `{other}` (expected perceptual, depth-limited or explicit)"
                            ),
                        ));
                        return;
                    }
                };
                self.saw_hearer = true;
                self.anchors.hearer = no;
                self.hearer = match mode {
                    HearerMode::Perceptual => HearerModel::perceptual(),
                    HearerMode::DepthLimited => HearerModel::depth_limited(),
                    HearerMode::Explicit => HearerModel::explicit(),
                };
                self.block = Block::Hearer { mode };
            }
            other => {
                self.error(Diagnostic::on_line(
                    no,
                    format!("unknown directive `{other}` (expected taxonomy, entity, preferred or hearer)"),
                ));
            }
        }
    }

    fn continuation(&mut self, no: usize, depth: usize, col: usize, tokens: &[&str]) {
        match &mut self.block {
            Block::None => {
                self.error(Diagnostic::at(
                    no,
                    col + 1,
                    "indented line outside any block",
                ));
            }
            Block::Taxonomy { attribute, stack } => {
                if tokens.len() != 1 {
                    self.error(Diagnostic::on_line(
                        no,
                        "expected one value per taxonomy line",
                    ));
                    return;
                }
                let (name, basic) = match tokens[0].strip_suffix('*') {
                    Some(stripped) => (stripped, true),
                    None => (tokens[0], false),
                };
                if name.is_empty() {
                    self.error(Diagnostic::on_line(no, "empty value name"));
                    return;
                }
                while stack.last().is_some_and(|(d, _)| *d >= depth) {
                    stack.pop();
                }
                let parent = match stack.last() {
                    Some((d, v)) if *d == depth - 1 => Some(v.clone()),
                    None if depth == 1 => None,
                    _ => {
                        self.errors.push(Diagnostic::at(
                            no,
                            col + 1,
                            format!(
                                "indentation jumps to level {depth} with no parent at level {}",
                                depth - 1
                            ),
                        ));
                        return;
                    }
                };
                let attribute = attribute.clone();
                let tax = self
                    .taxonomies
                    .get_mut(&attribute)
                    .expect("block implies declared");
                let value = ValueSym::new(name);
                let added = match &parent {
                    None => tax.add_root(value.clone()),
                    Some(p) => tax.add_child(p, value.clone()),
                };
                if added.is_err() {
                    self.errors.push(Diagnostic::on_line(
                        no,
                        format!("value `{value}` is already in the `{attribute}` taxonomy"),
                    ));
                    return;
                }
                if basic {
                    tax.mark_basic(&value).expect("just added");
                }
                self.anchors.value.insert((attribute, value.clone()), no);
                stack.push((depth, value));
            }
            Block::Entity { id } => {
                if depth != 1 || tokens.len() != 2 {
                    self.error(Diagnostic::on_line(no, "expected `<attribute> <value>`"));
                    return;
                }
                let id = id.clone();
                let attribute = AttrName::new(tokens[0]);
                let value = ValueSym::new(tokens[1]);
                let entity = self
                    .entities
                    .last_mut()
                    .expect("block implies an open entity");
                if entity.has(&attribute) {
                    self.errors.push(Diagnostic::on_line(
                        no,
                        format!("entity `{id}` already has a value for `{attribute}`"),
                    ));
                    return;
                }
                *entity = entity.clone().with(attribute.clone(), value);
                self.anchors.property.insert((id, attribute), no);
            }
            Block::Hearer { mode } => {
                if depth != 1 {
                    self.error(Diagnostic::on_line(
                        no,
                        "hearer entries are indented one level",
                    ));
                    return;
                }
                let mode = *mode;
                self.hearer_entry(no, mode, tokens);
            }
        }
    }

    fn hearer_entry(&mut self, no: usize, mode: HearerMode, tokens: &[&str]) {
        if tokens[0] == "basic" {
            // basic <entity|*> <attribute> <value>
            if tokens.len() != 4 {
                self.error(Diagnostic::on_line(
                    no,
                    "expected `basic <entity|*> <attribute> <value>`",
                ));
                return;
            }
            let entity = if tokens[1] == "*" {
                None
            } else {
                Some(EntityId::new(tokens[1]))
            };
            self.hearer =
                std::mem::take(&mut self.hearer).with_basic_override(entity, tokens[2], tokens[3]);
            return;
        }
        match mode {
            HearerMode::DepthLimited => {
                let Some(attr) = tokens[0].strip_suffix(':') else {
                    self.error(Diagnostic::on_line(
                        no,
                        "expected `<attribute>: <value>...` in a depth-limited hearer block",
                    ));
                    return;
                };
                if attr.is_empty() {
                    self.error(Diagnostic::on_line(no, "empty attribute name"));
                    return;
                }
                let attribute = AttrName::new(attr);
                if self.anchors.limit.contains_key(&attribute) {
                    self.error(Diagnostic::on_line(
                        no,
                        format!("duplicate depth limit for `{attribute}`"),
                    ));
                    return;
                }
                self.anchors.limit.insert(attribute.clone(), no);
                let values: Vec<ValueSym> = tokens[1..].iter().map(|t| ValueSym::new(*t)).collect();
                self.hearer = std::mem::take(&mut self.hearer).with_limit(attribute, values);
            }
            HearerMode::Explicit => {
                // <entity> <attribute> <value> true|false
                let holds = match tokens.last() {
                    Some(&"true") => true,
                    Some(&"false") => false,
                    _ => {
                        self.error(Diagnostic::on_line(
                            no,
                            "expected `<entity> <attribute> <value> true|false` in an explicit hearer block",
                        ));
                        return;
                    }
                };
                if tokens.len() != 4 {
                    self.error(Diagnostic::on_line(
                        no,
                        "expected `<entity> <attribute> <value> true|false` in an explicit hearer block",
                    ));
                    return;
                }
                self.hearer = std::mem::take(&mut self.hearer).with_fact(
                    tokens[0],
                    crate::kb::Pair::new(tokens[1], tokens[2]),
                    holds,
                );
            }
            HearerMode::Perceptual => {
                self.error(Diagnostic::on_line(
                    no,
                    "a perceptual hearer block only accepts `basic` overrides",
                ));
            }
        }
    }

    fn finish(mut self) -> Result<(Scene, Vec<Diagnostic>), Vec<Diagnostic>> {
        // Attributes used by entities but never declared get single-node
        // taxonomies, one root per distinct value.
        for entity in &self.entities {
            for (attribute, value) in entity.properties() {
                if !self.taxonomies.contains_key(attribute) {
                    self.taxonomies
                        .insert(attribute.clone(), Taxonomy::new(attribute.clone()));
                }
                let declared = self.anchors.taxonomy.contains_key(attribute);
                if !declared {
                    let tax = self.taxonomies.get_mut(attribute).expect("just inserted");
                    if !tax.contains(value) {
                        tax.add_root(value.clone()).expect("fresh value");
                    }
                }
            }
        }
        let scene = Scene::new(
            self.entities,
            self.taxonomies.into_values().collect(),
            self.preferred,
            self.hearer,
        );
        if !self.errors.is_empty() {
            return Err(self.errors);
        }
        let mut errors = Vec::new();
        let mut warnings = Vec::new();
        for violation in check_scene(&scene) {
            let line = self.anchors.for_violation(&violation);
            let d = if line == 0 {
                Diagnostic::global(violation.to_string())
            } else {
                Diagnostic::on_line(line, violation.to_string())
            };
            match violation.severity() {
                Severity::Error => errors.push(d),
                Severity::Warning => warnings.push(d),
            }
        }
        if errors.is_empty() {
            Ok((scene, warnings))
        } else {
            Err(errors)
        }
    }
}

/// Parses the scene format, runs [`check_scene`], and returns the scene or
/// every diagnostic found (1-based line numbers). Warnings do not fail the
/// parse and are dropped here; use [`SceneDocument::parse`] to keep them.
pub fn parse_scene(text: &str) -> Result<Scene, Vec<Diagnostic>> {
    SceneDocument::parse(text).map(|doc| doc.scene)
}

/// A parsed scene together with its source text and any non-fatal warnings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SceneDocument {
    source: String,
    scene: Scene,
    warnings: Vec<Diagnostic>,
}

impl SceneDocument {
    pub fn parse(text: &str) -> Result<Self, Vec<Diagnostic>> {
        let mut parser = Parser::new();
        for (i, raw) in text.lines().enumerate() {
            parser.line(i + 1, raw);
        }
        let (scene, warnings) = parser.finish()?;
        Ok(SceneDocument {
            source: text.to_owned(),
            scene,
            warnings,
        })
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn warnings(&self) -> &[Diagnostic] {
        &self.warnings
    }

    /// The canonical text rendering of the parsed scene.
    pub fn canonical(&self) -> String {
        serialize_scene(&self.scene)
    }
}

/// Writes a scene back out in canonical form: taxonomies first (attributes
/// and siblings in symbol order), then entities, `preferred`, and the hearer
/// block. Parsing the output reproduces the same scene.
pub fn serialize_scene(scene: &Scene) -> String {
    let mut out = String::new();
    for tax in scene.taxonomies() {
        out.push_str(&format!("taxonomy {}\n", tax.attribute()));
        let mut stack: Vec<(usize, ValueSym)> = tax
            .roots()
            .into_iter()
            .rev()
            .map(|v| (1, v.clone()))
            .collect();
        while let Some((depth, value)) = stack.pop() {
            let mark = if tax.is_basic(&value) { "*" } else { "" };
            out.push_str(&format!("{}{value}{mark}\n", "  ".repeat(depth)));
            for child in tax.children(&value).into_iter().rev() {
                stack.push((depth + 1, child.clone()));
            }
        }
    }
    for entity in scene.entities() {
        out.push_str(&format!("entity {}\n", entity.id()));
        for (attribute, value) in entity.properties() {
            out.push_str(&format!("  {attribute} {value}\n"));
        }
    }
    if !scene.preferred_attributes().is_empty() {
        let names: Vec<&str> = scene
            .preferred_attributes()
            .iter()
            .map(AttrName::as_str)
            .collect();
        out.push_str(&format!("preferred {}\n", names.join(" ")));
    }
    let hearer = scene.hearer();
    let mode = match hearer.mode() {
        HearerMode::Perceptual => "perceptual",
        HearerMode::DepthLimited => "depth-limited",
        HearerMode::Explicit => "explicit",
    };
    out.push_str(&format!("hearer {mode}\n"));
    for (attribute, values) in hearer.depth_limits() {
        let names: Vec<&str> = values.iter().map(ValueSym::as_str).collect();
        if names.is_empty() {
            out.push_str(&format!("  {attribute}:\n"));
        } else {
            out.push_str(&format!("  {attribute}: {}\n", names.join(" ")));
        }
    }
    for ((entity, attribute, value), holds) in hearer.known_facts() {
        out.push_str(&format!("  {entity} {attribute} {value} {holds}\n"));
    }
    for ((entity, attribute), value) in hearer.basic_overrides() {
        let who = entity.as_ref().map_or("*", EntityId::as_str);
        out.push_str(&format!("  basic {who} {attribute} {value}\n"));
    }
    out
}

/// One pair per line as `attribute=value`, in selection order. Canonical and
/// diff-stable; the empty description renders as the empty string.
pub fn serialize_pairs(description: &Description) -> String {
    description
        .pairs()
        .iter()
        .map(|p| format!("{}={}", p.attribute, p.value))
        .collect::<Vec<_>>()
        .join("\n")
}

/// An SPL-style term: a head (from the type pair) plus one relation per
/// remaining pair, with variables drawn from the sequence X, Y, Z, X1, Y1, …
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplTerm {
    pub variable: String,
    pub head: String,
    pub relations: Vec<SplRelation>,
}

/// One `:relations` entry of an [`SplTerm`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplRelation {
    pub variable: String,
    pub head: String,
    pub domain: String,
    pub range_variable: String,
    pub range_head: String,
}

fn spl_variable(index: usize) -> String {
    let letter = ["X", "Y", "Z"][index % 3];
    if index < 3 {
        letter.to_owned()
    } else {
        format!("{letter}{}", index / 3)
    }
}

fn capitalize(symbol: &str) -> String {
    let mut chars = symbol.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Builds the term structure for a description. The type pair supplies the
/// head; every other pair becomes one relation whose head is the capitalized
/// attribute and whose range is the capitalized value.
pub fn spl_term(description: &Description) -> Result<SplTerm, IoError> {
    let head = description.head_value().ok_or(IoError::MissingTypePair)?;
    let mut vars = 0..;
    let variable = spl_variable(vars.next().unwrap());
    let relations = description
        .pairs()
        .iter()
        .filter(|p| !p.attribute.is_type())
        .map(|p| SplRelation {
            variable: spl_variable(vars.next().unwrap()),
            head: capitalize(p.attribute.as_str()),
            domain: variable.clone(),
            range_variable: spl_variable(vars.next().unwrap()),
            range_head: capitalize(p.value.as_str()),
        })
        .collect();
    Ok(SplTerm {
        variable,
        head: capitalize(head.as_str()),
        relations,
    })
}

/// Renders the SPL term with 4-space continuation indents:
///
/// ```text
/// (X / Dog
///     :determiner definite
///     :relations ((Y / Colour
///                     :domain X
///                     :range (Z / Black))))
/// ```
///
/// The description must contain a type pair ([`ensure_head_noun`] first —
/// see [`crate::algorithms::ensure_head_noun`]).
pub fn serialize_spl(description: &Description) -> Result<String, IoError> {
    let term = spl_term(description)?;
    let mut out = format!(
        "({} / {}\n    :determiner definite",
        term.variable, term.head
    );
    if term.relations.is_empty() {
        out.push(')');
        return Ok(out);
    }
    out.push_str("\n    :relations (");
    let item_indent = " ".repeat(16);
    let field_indent = " ".repeat(20);
    for (i, rel) in term.relations.iter().enumerate() {
        if i > 0 {
            out.push('\n');
            out.push_str(&item_indent);
        }
        out.push_str(&format!("({} / {}", rel.variable, rel.head));
        out.push_str(&format!("\n{field_indent}:domain {}", rel.domain));
        out.push_str(&format!(
            "\n{field_indent}:range ({} / {})",
            rel.range_variable, rel.range_head
        ));
        out.push(')');
    }
    out.push_str("))");
    Ok(out)
}

/// The naive surface string: `the`, then the non-type values in reverse
/// selection order, then the type value — the first-selected modifier ends
/// up nearest the noun. Lowercase, single spaces.
pub fn realize_surface(description: &Description) -> Result<String, IoError> {
    let head = description.head_value().ok_or(IoError::MissingTypePair)?;
    let mut words = vec!["the".to_owned()];
    words.extend(
        description
            .pairs()
            .iter()
            .filter(|p| !p.attribute.is_type())
            .rev()
            .map(|p| p.value.as_str().to_lowercase()),
    );
    words.push(head.as_str().to_lowercase());
    Ok(words.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::Pair;

    /// The scene document exactly as the format documentation shows it:
    /// `size` has no declared taxonomy and must be auto-created.
    const DOC: &str = "taxonomy type\n  object\n    animal\n      dog*\n        chihuahua\n      cat*\n        siamese-cat\ntaxonomy colour\n  black\n  white\nentity Object1\n  type chihuahua\n  size small\n  colour black\npreferred type colour size\nhearer depth-limited\n  type: dog cat\n";

    #[test]
    fn parses_the_reference_document() {
        let scene = parse_scene(DOC).expect("document parses");
        let ty = scene.taxonomy(&"type".into()).unwrap();
        assert!(ty.is_basic(&"dog".into()));
        assert!(ty.is_basic(&"cat".into()));
        assert_eq!(ty.parent(&"chihuahua".into()), Some(&"dog".into()));
        assert_eq!(ty.parent(&"dog".into()), Some(&"animal".into()));
        // auto-created single-node taxonomy for the undeclared attribute
        let size = scene.taxonomy(&"size".into()).unwrap();
        assert!(size.contains(&"small".into()));
        assert_eq!(size.parent(&"small".into()), None);
        assert_eq!(
            scene.preferred_attributes(),
            &[AttrName::from("type"), "colour".into(), "size".into()]
        );
        assert_eq!(scene.hearer().mode(), HearerMode::DepthLimited);
        let entity = scene.entity(&"Object1".into()).unwrap();
        assert_eq!(entity.value(&"type".into()), Some(&"chihuahua".into()));
    }

    #[test]
    fn empty_file_reports_no_entities() {
        let errs = parse_scene("").unwrap_err();
        assert!(
            errs.iter().any(|d| d.message.contains("no-entities")),
            "{errs:?}"
        );
    }

    #[test]
    fn tabs_are_rejected_by_name() {
        let errs = parse_scene("taxonomy type\n\tdog\n").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.contains("tab"), "{}", errs[0]);
        assert_eq!((errs[0].line, errs[0].column), (2, 1));
    }

    #[test]
    fn unknown_directives_name_the_expected_tokens() {
        let errs = parse_scene("entities Object1\n").unwrap_err();
        assert!(errs[0]
            .message
            .contains("expected taxonomy, entity, preferred or hearer"));
    }

    #[test]
    fn indentation_jumps_are_rejected() {
        let errs = parse_scene("taxonomy type\n      dog\n").unwrap_err();
        assert!(errs[0].message.contains("indentation jumps"), "{}", errs[0]);
    }

    #[test]
    fn semantic_violations_carry_source_lines() {
        let text =
            "taxonomy colour\n  black\nentity Object1\n  colour blue\npreferred type colour\n";
        let errs = parse_scene(text).unwrap_err();
        // unknown value anchored to the property line, missing type to the
        // entity line
        assert!(errs
            .iter()
            .any(|d| d.line == 4 && d.message == "unknown-value(Object1, colour, blue)"));
        assert!(errs
            .iter()
            .any(|d| d.line == 3 && d.message == "missing-type(Object1)"));
    }

    #[test]
    fn declared_taxonomies_do_not_auto_absorb_unknown_values() {
        let text = "taxonomy colour\n  black\nentity Object1\n  type dog\n  colour mauve\npreferred type\n";
        let errs = parse_scene(text).unwrap_err();
        assert!(errs
            .iter()
            .any(|d| d.message.contains("unknown-value(Object1, colour, mauve)")));
    }

    #[test]
    fn explicit_hearer_blocks_parse_facts() {
        let text = "entity a\n  type dog\nentity b\n  type dog\npreferred type\nhearer explicit\n  a type dog true\n  b type dog false\n  basic * type dog\n";
        let doc = SceneDocument::parse(text).expect("parses");
        assert_eq!(doc.scene().hearer().known_facts().count(), 2);
        assert_eq!(doc.scene().hearer().basic_overrides().count(), 1);
        // the `b type dog false` fact contradicts the scene: that is a
        // warning, not an error
        assert_eq!(doc.warnings().len(), 1);
        assert!(doc.warnings()[0]
            .message
            .contains("override-contradicts-scene"));
    }

    #[test]
    fn scene_round_trips_through_canonical_form() {
        let doc = SceneDocument::parse(DOC).expect("parses");
        let reparsed = parse_scene(&doc.canonical()).expect("canonical form parses");
        assert_eq!(&reparsed, doc.scene());
    }

    fn black_dog() -> Description {
        Description::from_pairs(vec![Pair::new("type", "dog"), Pair::new("colour", "black")])
    }

    #[test]
    fn pair_lines_are_selection_ordered() {
        assert_eq!(serialize_pairs(&black_dog()), "type=dog\ncolour=black");
        assert_eq!(serialize_pairs(&Description::empty()), "");
    }

    #[test]
    fn spl_term_matches_the_reference_layout() {
        let rendered = serialize_spl(&black_dog()).unwrap();
        assert_eq!(
            rendered,
            "(X / Dog\n    :determiner definite\n    :relations ((Y / Colour\n                    :domain X\n                    :range (Z / Black))))"
        );
    }

    #[test]
    fn spl_term_without_relations_closes_on_the_determiner_line() {
        let cup = Description::from_pairs(vec![Pair::new("type", "cup")]);
        assert_eq!(
            serialize_spl(&cup).unwrap(),
            "(X / Cup\n    :determiner definite)"
        );
    }

    #[test]
    fn spl_requires_a_type_pair() {
        let bare = Description::from_pairs(vec![Pair::new("colour", "black")]);
        assert_eq!(serialize_spl(&bare), Err(IoError::MissingTypePair));
        assert_eq!(realize_surface(&bare), Err(IoError::MissingTypePair));
    }

    #[test]
    fn spl_variables_cycle_with_numeric_suffixes() {
        let desc = Description::from_pairs(vec![
            Pair::new("type", "cup"),
            Pair::new("colour", "red"),
            Pair::new("size", "large"),
        ]);
        let term = spl_term(&desc).unwrap();
        assert_eq!(term.variable, "X");
        assert_eq!(term.relations[0].variable, "Y");
        assert_eq!(term.relations[0].range_variable, "Z");
        assert_eq!(term.relations[1].variable, "X1");
        assert_eq!(term.relations[1].range_variable, "Y1");
        assert_eq!(term.relations[1].head, "Size");
        assert_eq!(term.relations[1].range_head, "Large");
    }

    #[test]
    fn surface_reverses_modifier_order_around_the_head() {
        assert_eq!(realize_surface(&black_dog()).unwrap(), "the black dog");
        // greedy cups selection order: plastic, red, large, then the head
        let cups = Description::from_pairs(vec![
            Pair::new("material", "plastic"),
            Pair::new("colour", "red"),
            Pair::new("size", "large"),
            Pair::new("type", "cup"),
        ]);
        assert_eq!(realize_surface(&cups).unwrap(), "the large red plastic cup");
        let cup = Description::from_pairs(vec![Pair::new("type", "cup")]);
        assert_eq!(realize_surface(&cup).unwrap(), "the cup");
    }

    #[test]
    fn surface_mentions_each_value_exactly_once() {
        let cups = Description::from_pairs(vec![
            Pair::new("material", "plastic"),
            Pair::new("colour", "red"),
            Pair::new("type", "cup"),
        ]);
        let text = realize_surface(&cups).unwrap();
        for value in ["plastic", "red", "cup"] {
            assert_eq!(text.matches(value).count(), 1);
        }
    }

    /// Minimal S-expression reader: enough to re-parse serialized SPL terms
    /// structurally, independent of their layout.
    mod sexp {
        #[derive(Debug, PartialEq)]
        pub enum Sexp {
            Atom(String),
            List(Vec<Sexp>),
        }

        pub fn parse(text: &str) -> Sexp {
            let tokens: Vec<String> = text
                .replace('(', " ( ")
                .replace(')', " ) ")
                .split_whitespace()
                .map(str::to_owned)
                .collect();
            let (sexp, rest) = parse_tokens(&tokens);
            assert!(rest.is_empty(), "trailing tokens: {rest:?}");
            sexp
        }

        fn parse_tokens(tokens: &[String]) -> (Sexp, &[String]) {
            match tokens.split_first() {
                Some((t, rest)) if t == "(" => {
                    let mut items = Vec::new();
                    let mut rest = rest;
                    while rest.first().map(String::as_str) != Some(")") {
                        let (item, r) = parse_tokens(rest);
                        items.push(item);
                        rest = r;
                    }
                    (Sexp::List(items), &rest[1..])
                }
                Some((t, rest)) => (Sexp::Atom(t.clone()), rest),
                None => panic!("unexpected end of input"),
            }
        }
    }

    /// Re-extracts an SplTerm from rendered text via the S-expression
    /// reader, checking the layout is structurally faithful.
    #[test]
    fn rendered_spl_reparses_into_the_same_term() {
        use sexp::Sexp;

        fn atom(s: &Sexp) -> &str {
            match s {
                Sexp::Atom(a) => a,
                other => panic!("expected atom, got {other:?}"),
            }
        }

        fn term_of(s: &Sexp) -> SplTerm {
            let Sexp::List(items) = s else {
                panic!("expected list")
            };
            assert_eq!(atom(&items[1]), "/");
            assert_eq!(atom(&items[3]), ":determiner");
            assert_eq!(atom(&items[4]), "definite");
            let mut relations = Vec::new();
            if items.len() > 5 {
                assert_eq!(atom(&items[5]), ":relations");
                let Sexp::List(rels) = &items[6] else {
                    panic!("expected relations list")
                };
                for rel in rels {
                    let Sexp::List(r) = rel else {
                        panic!("expected relation list")
                    };
                    assert_eq!(atom(&r[3]), ":domain");
                    assert_eq!(atom(&r[5]), ":range");
                    let Sexp::List(range) = &r[6] else {
                        panic!("expected range term")
                    };
                    relations.push(SplRelation {
                        variable: atom(&r[0]).to_owned(),
                        head: atom(&r[2]).to_owned(),
                        domain: atom(&r[4]).to_owned(),
                        range_variable: atom(&range[0]).to_owned(),
                        range_head: atom(&range[2]).to_owned(),
                    });
                }
            }
            SplTerm {
                variable: atom(&items[0]).to_owned(),
                head: atom(&items[2]).to_owned(),
                relations,
            }
        }

        for desc in [
            black_dog(),
            Description::from_pairs(vec![Pair::new("type", "cup")]),
            Description::from_pairs(vec![
                Pair::new("material", "plastic"),
                Pair::new("colour", "red"),
                Pair::new("size", "large"),
                Pair::new("type", "cup"),
            ]),
        ] {
            let term = spl_term(&desc).unwrap();
            let rendered = serialize_spl(&desc).unwrap();
            assert_eq!(term_of(&sexp::parse(&rendered)), term);
        }
    }
}
