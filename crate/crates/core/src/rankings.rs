//! TREC run files and relevance judgments.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::io;

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub doc_id: String,
    /// 1-based position after re-sorting by score.
    pub rank: usize,
    pub score: f64,
}

/// One query's ranking, ordered by descending score with ties broken by
/// ascending document id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub query_id: String,
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    /// Sorts `(doc_id, score)` pairs and assigns ranks 1..n. Duplicate
    /// document ids are rejected.
    pub fn from_scored(query_id: impl Into<String>, mut docs: Vec<(String, f64)>) -> Result<Self> {
        let query_id = query_id.into();
        let mut seen = HashSet::with_capacity(docs.len());
        for (d, s) in &docs {
            if !seen.insert(d.as_str()) {
                return Err(Error::Validation(format!("duplicate document {d:?} for query {query_id:?}")));
            }
            if s.is_nan() {
                return Err(Error::Validation(format!("NaN score for {d:?} in query {query_id:?}")));
            }
        }
        docs.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let entries = docs
            .into_iter()
            .enumerate()
            .map(|(i, (doc_id, score))| RankedEntry {
                doc_id,
                rank: i + 1,
                score,
            })
            .collect();
        Ok(RankedList { query_id, entries })
    }

    /// A list in the given order, with descending synthetic scores.
    pub fn from_ids<S: Into<String>>(query_id: impl Into<String>, ids: impl IntoIterator<Item = S>) -> Result<Self> {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let n = ids.len() as f64;
        let scored = ids.into_iter().enumerate().map(|(i, d)| (d, n - i as f64)).collect();
        RankedList::from_scored(query_id, scored)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn doc_ids(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.doc_id.as_str()).collect()
    }
}

/// First `min(k, n)` entries of `list`.
pub fn truncate(list: &RankedList, k: usize) -> RankedList {
    RankedList {
        query_id: list.query_id.clone(),
        entries: list.entries.iter().take(k).cloned().collect(),
    }
}

/// Query id to ranked list, iterated in query id order.
pub type Run = BTreeMap<String, RankedList>;

/// Parses a run from text in the six-column TREC format
/// `qid Q0 docid rank score tag`. The rank column is ignored.
pub fn parse_run_str(text: &str, source: &Path) -> Result<Run> {
    parse_run_lines(text.lines().enumerate().map(|(i, l)| Ok((i + 1, l.to_owned()))), source)
}

pub fn parse_run(path: impl AsRef<Path>) -> Result<Run> {
    let path = path.as_ref();
    parse_run_lines(io::numbered_lines(path)?, path)
}

fn parse_run_lines(lines: impl Iterator<Item = Result<(usize, String)>>, source: &Path) -> Result<Run> {
    let mut per_query: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for item in lines {
        let (lineno, line) = item?;
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.is_empty() {
            continue;
        }
        if cols.len() < 6 {
            return Err(Error::parse(source, lineno, format!("expected 6 columns, found {}", cols.len())));
        }
        let (qid, docid) = (cols[0], cols[2]);
        cols[3]
            .parse::<i64>()
            .map_err(|_| Error::parse(source, lineno, format!("non-numeric rank {:?}", cols[3])))?;
        let score: f64 = cols[4]
            .parse()
            .ok()
            .filter(|s: &f64| !s.is_nan())
            .ok_or_else(|| Error::parse(source, lineno, format!("non-numeric score {:?}", cols[4])))?;
        if !seen.insert((qid.to_owned(), docid.to_owned())) {
            return Err(Error::parse(source, lineno, format!("duplicate ({qid}, {docid})")));
        }
        per_query
            .entry(qid.to_owned())
            .or_default()
            .push((docid.to_owned(), score));
    }
    per_query
        .into_iter()
        .map(|(qid, docs)| RankedList::from_scored(qid.clone(), docs).map(|l| (qid, l)))
        .collect()
}

/// Serializes a run back to TREC format with recomputed ranks.
pub fn format_run(run: &Run, tag: &str) -> String {
    let mut out = String::new();
    for list in run.values() {
        for e in &list.entries {
            let _ = writeln!(out, "{} Q0 {} {} {} {}", list.query_id, e.doc_id, e.rank, e.score, tag);
        }
    }
    out
}

/// Relevance grades by query and document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Qrels {
    grades: HashMap<String, HashMap<String, u32>>,
}

impl Qrels {
    pub fn insert(&mut self, query_id: &str, doc_id: &str, grade: u32) -> Option<u32> {
        self.grades
            .entry(query_id.to_owned())
            .or_default()
            .insert(doc_id.to_owned(), grade)
    }

    pub fn grade(&self, query_id: &str, doc_id: &str) -> Option<u32> {
        self.grades.get(query_id)?.get(doc_id).copied()
    }

    pub fn query(&self, query_id: &str) -> Option<&HashMap<String, u32>> {
        self.grades.get(query_id)
    }

    pub fn contains_query(&self, query_id: &str) -> bool {
        self.grades.contains_key(query_id)
    }

    pub fn num_queries(&self) -> usize {
        self.grades.len()
    }
}

/// Parses qrels text in the TREC format `qid 0 docid grade`. Repeated
/// pairs keep the last grade and log a warning.
pub fn parse_qrels_str(text: &str, source: &Path) -> Result<Qrels> {
    parse_qrels_lines(text.lines().enumerate().map(|(i, l)| Ok((i + 1, l.to_owned()))), source)
}

pub fn parse_qrels(path: impl AsRef<Path>) -> Result<Qrels> {
    let path = path.as_ref();
    parse_qrels_lines(io::numbered_lines(path)?, path)
}

fn parse_qrels_lines(lines: impl Iterator<Item = Result<(usize, String)>>, source: &Path) -> Result<Qrels> {
    let mut qrels = Qrels::default();
    for item in lines {
        let (lineno, line) = item?;
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.is_empty() {
            continue;
        }
        if cols.len() != 4 {
            return Err(Error::parse(source, lineno, format!("expected 4 columns, found {}", cols.len())));
        }
        let grade: u32 = cols[3]
            .parse()
            .map_err(|_| Error::parse(source, lineno, format!("invalid grade {:?}", cols[3])))?;
        if let Some(prev) = qrels.insert(cols[0], cols[2], grade) {
            warn!(
                "{}:{lineno}: repeated judgment for ({}, {}); replacing grade {prev} with {grade}",
                source.display(),
                cols[0],
                cols[2]
            );
        }
    }
    Ok(qrels)
}
