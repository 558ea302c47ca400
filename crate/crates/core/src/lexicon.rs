//! Group lexicons and counterfactual substitution tables.
//!
//! A [`GroupLexicon`] names each group and lists the terms that signal it
//! ("she", "mother", "elizabeth" for a female group). A [`CdsMapping`] pairs
//! every gendered term with its opposite-group counterpart and is used to
//! build counterfactual collections.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const TARGET_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub id: String,
    pub terms: BTreeSet<String>,
}

/// Named groups with their representative terms and the target share of
/// each group in a fair ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupLexicon {
    groups: Vec<Group>,
    target: Vec<f64>,
    term_to_group: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct LexiconFile {
    groups: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<BTreeMap<String, f64>>,
}

impl GroupLexicon {
    /// Builds and validates a lexicon. Without `target` every group gets
    /// an equal share.
    pub fn new(groups: Vec<(String, Vec<String>)>, target: Option<&BTreeMap<String, f64>>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(Error::Validation(format!(
                "a lexicon needs at least two groups, found {}",
                groups.len()
            )));
        }
        let mut seen_ids = BTreeSet::new();
        let mut term_to_group: HashMap<String, usize> = HashMap::new();
        let mut out = Vec::with_capacity(groups.len());
        for (idx, (id, raw_terms)) in groups.into_iter().enumerate() {
            if id.is_empty() {
                return Err(Error::Validation("empty group id".into()));
            }
            if !seen_ids.insert(id.clone()) {
                return Err(Error::Validation(format!("duplicate group id {id:?}")));
            }
            let mut terms = BTreeSet::new();
            for raw in raw_terms {
                let term = raw.trim().to_lowercase();
                if term.is_empty() {
                    return Err(Error::Validation(format!("empty term in group {id:?}")));
                }
                if !term.chars().all(char::is_alphanumeric) {
                    return Err(Error::Validation(format!(
                        "term {term:?} in group {id:?} is not a single token"
                    )));
                }
                if let Some(&other) = term_to_group.get(&term) {
                    if other != idx {
                        return Err(Error::OverlappingTerm {
                            term,
                            first: out_id(&out, other),
                            second: id,
                        });
                    }
                }
                term_to_group.insert(term.clone(), idx);
                terms.insert(term);
            }
            out.push(Group { id, terms });
        }

        let target = match target {
            None => vec![1.0 / out.len() as f64; out.len()],
            Some(map) => resolve_target(&out, map)?,
        };

        Ok(GroupLexicon {
            groups: out,
            target,
            term_to_group,
        })
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn group_ids(&self) -> Vec<String> {
        self.groups.iter().map(|g| g.id.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Target share per group, aligned with [`groups`](Self::groups).
    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn target_map(&self) -> BTreeMap<String, f64> {
        self.groups
            .iter()
            .zip(&self.target)
            .map(|(g, &t)| (g.id.clone(), t))
            .collect()
    }

    /// Replaces the target distribution, validating it first.
    pub fn with_target(mut self, target: &BTreeMap<String, f64>) -> Result<Self> {
        self.target = resolve_target(&self.groups, target)?;
        Ok(self)
    }

    /// Index of the group owning a lowercase term.
    pub fn group_of(&self, term: &str) -> Option<usize> {
        self.term_to_group.get(term).copied()
    }

    /// All representative terms across groups.
    pub fn all_terms(&self) -> impl Iterator<Item = &str> {
        self.groups.iter().flat_map(|g| g.terms.iter().map(String::as_str))
    }

    /// SHA-256 over the ordered group ids and their sorted terms. The target
    /// is excluded: it does not influence stored document statistics.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for g in &self.groups {
            hasher.update(g.id.as_bytes());
            hasher.update(b"\t");
            for (i, t) in g.terms.iter().enumerate() {
                if i > 0 {
                    hasher.update(b",");
                }
                hasher.update(t.as_bytes());
            }
            hasher.update(b"\n");
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn from_json_str(text: &str, path: &Path, target: Option<&BTreeMap<String, f64>>) -> Result<Self> {
        let file: LexiconFile = serde_json::from_str(text)
            .map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
        let mut groups = Vec::with_capacity(file.groups.len());
        for (id, value) in file.groups {
            let terms: Vec<String> = serde_json::from_value(value).map_err(|e| {
                Error::Validation(format!("group {id:?} must be a list of strings: {e}"))
            })?;
            groups.push((id, terms));
        }
        let target = target.or(file.target.as_ref());
        GroupLexicon::new(groups, target)
    }

    pub fn to_json(&self) -> String {
        let mut groups = serde_json::Map::new();
        for g in &self.groups {
            groups.insert(
                g.id.clone(),
                serde_json::Value::from(g.terms.iter().cloned().collect::<Vec<_>>()),
            );
        }
        let file = LexiconFile {
            groups,
            target: Some(self.target_map()),
        };
        serde_json::to_string_pretty(&file).expect("lexicon serializes")
    }
}

fn out_id(groups: &[Group], idx: usize) -> String {
    groups[idx].id.clone()
}

fn resolve_target(groups: &[Group], map: &BTreeMap<String, f64>) -> Result<Vec<f64>> {
    for key in map.keys() {
        if !groups.iter().any(|g| &g.id == key) {
            return Err(Error::Validation(format!("target names unknown group {key:?}")));
        }
    }
    let mut target = Vec::with_capacity(groups.len());
    for g in groups {
        let t = *map
            .get(&g.id)
            .ok_or_else(|| Error::Validation(format!("target missing group {:?}", g.id)))?;
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Validation(format!(
                "target for {:?} must lie in (0, 1), got {t}",
                g.id
            )));
        }
        target.push(t);
    }
    let sum: f64 = target.iter().sum();
    if (sum - 1.0).abs() > TARGET_TOLERANCE {
        return Err(Error::Validation(format!("target sums to {sum}, expected 1")));
    }
    Ok(target)
}

/// Loads a lexicon from its JSON file. `target` overrides any target in the
/// file; with neither, the target is uniform.
pub fn load_lexicon(path: impl AsRef<Path>, target: Option<&BTreeMap<String, f64>>) -> Result<GroupLexicon> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    GroupLexicon::from_json_str(&text, path, target)
}

/// Part-of-speech tag used to resolve ambiguous substitutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PosTag {
    /// Possessive determiner ("her book").
    Poss,
    /// Pronoun ("saw her", "is hers").
    Pron,
}

impl FromStr for PosTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "POSS" => Ok(PosTag::Poss),
            "PRON" => Ok(PosTag::Pron),
            other => Err(Error::Validation(format!("unknown POS tag {other:?}"))),
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PosTag::Poss => "POSS",
            PosTag::Pron => "PRON",
        })
    }
}

/// Replacements for a term whose counterpart depends on its part of speech.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosRule {
    pub possessive: String,
    pub personal: String,
}

impl PosRule {
    pub fn resolve(&self, tag: PosTag) -> &str {
        match tag {
            PosTag::Poss => &self.possessive,
            PosTag::Pron => &self.personal,
        }
    }
}

/// Bidirectional term and name substitution table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CdsMapping {
    term_pairs: HashMap<String, String>,
    name_pairs: HashMap<String, String>,
    pos_sensitive: HashMap<String, PosRule>,
}

impl CdsMapping {
    /// Parses the tab-separated mapping format:
    /// `term<TAB>counterpart[<TAB>tag]` where tag is `POSS`, `PRON`, or
    /// `NAME`. Lines starting with `#` and blank lines are skipped.
    pub fn from_tsv_str(text: &str, path: &Path) -> Result<Self> {
        let mut term_pairs = HashMap::new();
        let mut name_pairs = HashMap::new();
        let mut tagged: HashMap<String, (Option<String>, Option<String>)> = HashMap::new();

        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() < 2 || cols.len() > 3 {
                return Err(Error::parse(path, lineno, "expected term<TAB>counterpart[<TAB>tag]"));
            }
            let term = cols[0].trim().to_lowercase();
            let counterpart = cols[1].trim().to_lowercase();
            for t in [&term, &counterpart] {
                if t.is_empty() || !t.chars().all(char::is_alphanumeric) {
                    return Err(Error::parse(path, lineno, format!("{t:?} is not a single token")));
                }
            }
            let tag = cols.get(2).map(|s| s.trim()).filter(|s| !s.is_empty());
            let dup = || Error::parse(path, lineno, format!("duplicate key {term:?}"));
            let already = term_pairs.contains_key(&term) || name_pairs.contains_key(&term);
            match tag {
                None => {
                    if already || tagged.contains_key(&term) {
                        return Err(dup());
                    }
                    term_pairs.insert(term, counterpart);
                }
                Some("NAME") => {
                    if already || tagged.contains_key(&term) {
                        return Err(dup());
                    }
                    name_pairs.insert(term, counterpart);
                }
                Some(tag) => {
                    let tag: PosTag = tag
                        .parse()
                        .map_err(|_| Error::parse(path, lineno, format!("unknown tag {tag:?}")))?;
                    if already {
                        return Err(dup());
                    }
                    let slot = tagged.entry(term.clone()).or_default();
                    let cell = match tag {
                        PosTag::Poss => &mut slot.0,
                        PosTag::Pron => &mut slot.1,
                    };
                    if cell.is_some() {
                        return Err(dup());
                    }
                    *cell = Some(counterpart);
                }
            }
        }

        let mut pos_sensitive = HashMap::new();
        for (term, (poss, pron)) in tagged {
            match (poss, pron) {
                (Some(possessive), Some(personal)) => {
                    pos_sensitive.insert(term, PosRule { possessive, personal });
                }
                _ => {
                    return Err(Error::Validation(format!(
                        "POS-sensitive term {term:?} needs both POSS and PRON counterparts"
                    )))
                }
            }
        }

        let mapping = CdsMapping {
            term_pairs,
            name_pairs,
            pos_sensitive,
        };
        mapping.check_involution()?;
        Ok(mapping)
    }

    fn check_involution(&self) -> Result<()> {
        let mut keys: Vec<&String> = self.term_pairs.keys().chain(self.name_pairs.keys()).collect();
        keys.sort();
        for x in keys {
            let y = self
                .term_pairs
                .get(x)
                .or_else(|| self.name_pairs.get(x))
                .expect("key present");
            let back_ok = if let Some(rule) = self.pos_sensitive.get(y) {
                &rule.possessive == x || &rule.personal == x
            } else {
                self.term_pairs.get(y).or_else(|| self.name_pairs.get(y)) == Some(x)
            };
            if !back_ok {
                return Err(Error::Validation(format!(
                    "mapping is not an involution: {x:?} -> {y:?} does not map back"
                )));
            }
        }
        let mut sensitive: Vec<&String> = self.pos_sensitive.keys().collect();
        sensitive.sort();
        for x in sensitive {
            let rule = &self.pos_sensitive[x];
            for y in [&rule.possessive, &rule.personal] {
                let back = self
                    .term_pairs
                    .get(y)
                    .or_else(|| self.name_pairs.get(y))
                    .map(|s| s == x)
                    .or_else(|| {
                        self.pos_sensitive
                            .get(y)
                            .map(|r| &r.possessive == x || &r.personal == x)
                    });
                if back != Some(true) {
                    return Err(Error::Validation(format!(
                        "mapping is not an involution: {x:?} -> {y:?} does not map back"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_pos_sensitive(&self, term: &str) -> bool {
        self.pos_sensitive.contains_key(term)
    }

    pub fn pos_rule(&self, term: &str) -> Option<&PosRule> {
        self.pos_sensitive.get(term)
    }

    /// Counterpart of a lowercase token. POS-sensitive tokens require a tag
    /// and return `None` without one.
    pub fn counterpart(&self, term: &str, tag: Option<PosTag>) -> Option<&str> {
        if let Some(c) = self.term_pairs.get(term).or_else(|| self.name_pairs.get(term)) {
            return Some(c);
        }
        match (self.pos_sensitive.get(term), tag) {
            (Some(rule), Some(tag)) => Some(rule.resolve(tag)),
            _ => None,
        }
    }

    pub fn is_mapped(&self, term: &str) -> bool {
        self.term_pairs.contains_key(term)
            || self.name_pairs.contains_key(term)
            || self.pos_sensitive.contains_key(term)
    }

    /// Number of distinct source keys.
    pub fn len(&self) -> usize {
        self.term_pairs.len() + self.name_pairs.len() + self.pos_sensitive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn term_pairs(&self) -> &HashMap<String, String> {
        &self.term_pairs
    }

    pub fn name_pairs(&self) -> &HashMap<String, String> {
        &self.name_pairs
    }

    /// Mapped terms (keys and counterparts) that no lexicon group lists.
    pub fn uncovered_terms(&self, lexicon: &GroupLexicon) -> Vec<String> {
        let mut all: BTreeSet<&str> = BTreeSet::new();
        for (k, v) in self.term_pairs.iter().chain(&self.name_pairs) {
            all.insert(k);
            all.insert(v);
        }
        for (k, rule) in &self.pos_sensitive {
            all.insert(k);
            all.insert(&rule.possessive);
            all.insert(&rule.personal);
        }
        all.into_iter()
            .filter(|t| lexicon.group_of(t).is_none())
            .map(str::to_owned)
            .collect()
    }
}

pub fn load_cds_mapping(path: impl AsRef<Path>) -> Result<CdsMapping> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    CdsMapping::from_tsv_str(&text, path)
}
