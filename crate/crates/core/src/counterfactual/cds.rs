//! Counterfactual data substitution: swap every gendered term or name for
//! its opposite-group counterpart.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io;
use crate::lexicon::{CdsMapping, PosTag};

const CHUNK_LINES: usize = 1 << 14;

/// Function words that rule out a possessive reading of the token before
/// them ("gave her the book", "told her to go").
const NON_NOMINAL: &[&str] = &[
    "a", "about", "after", "again", "all", "am", "an", "and", "are", "as", "at", "away", "back", "be",
    "because", "been", "before", "being", "but", "by", "can", "could", "did", "do", "does", "down",
    "for", "from", "had", "has", "have", "he", "her", "here", "him", "his", "how", "i", "if", "in",
    "into", "is", "it", "its", "just", "may", "me", "might", "more", "must", "my", "no", "not", "now",
    "of", "off", "on", "once", "or", "out", "over", "she", "should", "since", "so", "than", "that",
    "the", "their", "them", "then", "there", "these", "they", "this", "those", "through", "to", "too",
    "until", "up", "us", "very", "was", "we", "were", "what", "when", "where", "which", "while",
    "who", "whom", "why", "will", "with", "would", "yet", "you", "your",
];

/// Token-level POS tags keyed by document id, then by 0-based token index.
pub type PosAnnotations = HashMap<String, HashMap<usize, PosTag>>;

/// Reads `doc_id<TAB>token_index<TAB>tag` lines (tags `POSS`, `PRON`).
pub fn load_pos_annotations(path: impl AsRef<Path>) -> Result<PosAnnotations> {
    let path = path.as_ref();
    let mut out: PosAnnotations = HashMap::new();
    for item in io::numbered_lines(path)? {
        let (lineno, line) = item?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::parse(path, lineno, "expected doc_id<TAB>token_index<TAB>tag"));
        }
        let idx: usize = cols[1]
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad token index {:?}", cols[1])))?;
        let tag: PosTag = cols[2]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad tag {:?}", cols[2])))?;
        out.entry(cols[0].to_owned()).or_default().insert(idx, tag);
    }
    Ok(out)
}

struct Span {
    start: usize,
    end: usize,
    lower: String,
}

fn token_spans(text: &str) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        match (ch.is_alphanumeric(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                spans.push(Span {
                    start: s,
                    end: i,
                    lower: text[s..i].to_lowercase(),
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        spans.push(Span {
            start: s,
            end: text.len(),
            lower: text[s..].to_lowercase(),
        });
    }
    spans
}

/// Possessive when the next token follows in the same clause (only
/// whitespace between) and is not a function word; pronoun otherwise.
fn guess_tag(text: &str, spans: &[Span], i: usize) -> PosTag {
    match spans.get(i + 1) {
        Some(next)
            if text[spans[i].end..next.start].chars().all(char::is_whitespace)
                && !NON_NOMINAL.contains(&next.lower.as_str()) =>
        {
            PosTag::Poss
        }
        _ => PosTag::Pron,
    }
}

fn match_case(source: &str, replacement: &str) -> String {
    let letters: Vec<char> = source.chars().filter(|c| c.is_alphabetic()).collect();
    let all_upper = letters.len() > 1 && letters.iter().all(|c| c.is_uppercase());
    if all_upper {
        return replacement.to_uppercase();
    }
    if source.chars().next().is_some_and(char::is_uppercase) {
        let mut chars = replacement.chars();
        return match chars.next() {
            Some(first) => first.to_uppercase().chain(chars).collect(),
            None => String::new(),
        };
    }
    replacement.to_owned()
}

/// Substitutes mapped tokens in `text` and records `(source, replacement)`
/// pairs in `log` (lowercase).
fn transform_logged(
    text: &str,
    mapping: &CdsMapping,
    tags: Option<&HashMap<usize, PosTag>>,
    log: &mut Vec<(String, String)>,
) -> String {
    let spans = token_spans(text);
    let mut out = String::with_capacity(text.len() + 8);
    let mut cursor = 0;
    for (i, span) in spans.iter().enumerate() {
        if !mapping.is_mapped(&span.lower) {
            continue;
        }
        let tag = mapping.is_pos_sensitive(&span.lower).then(|| {
            tags.and_then(|t| t.get(&i).copied())
                .unwrap_or_else(|| guess_tag(text, &spans, i))
        });
        let Some(replacement) = mapping.counterpart(&span.lower, tag) else {
            continue;
        };
        out.push_str(&text[cursor..span.start]);
        out.push_str(&match_case(&text[span.start..span.end], replacement));
        cursor = span.end;
        log.push((span.lower.clone(), replacement.to_owned()));
    }
    out.push_str(&text[cursor..]);
    out
}

/// Replaces every mapped term and name in `text` by its counterpart.
/// POS-sensitive tokens use `pos` (indexed by 0-based token position) when
/// given, else a next-word heuristic. Capitalized and all-caps tokens keep
/// their casing pattern.
pub fn cds_transform(text: &str, mapping: &CdsMapping, pos: Option<&HashMap<usize, PosTag>>) -> String {
    transform_logged(text, mapping, pos, &mut Vec::new())
}

/// Summary of a collection transform. Serializes as a JSON object mapping
/// `source->replacement` to its count.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TransformReport {
    pub substitutions: BTreeMap<String, u64>,
}

impl TransformReport {
    pub fn total(&self) -> u64 {
        self.substitutions.values().sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Streams a Collection TSV from `reader` to `writer`, substituting every
/// document. Document ids and order are unchanged.
pub fn cds_stream(
    reader: impl BufRead,
    mut writer: impl Write,
    mapping: &CdsMapping,
    pos: Option<&PosAnnotations>,
    source: &Path,
) -> Result<TransformReport> {
    let mut report = TransformReport::default();
    let mut chunk: Vec<(usize, String)> = Vec::with_capacity(CHUNK_LINES);

    let mut flush = |chunk: &mut Vec<(usize, String)>, writer: &mut dyn Write| -> Result<()> {
        let done: Vec<(String, Vec<(String, String)>)> = chunk
            .par_iter()
            .map(|(lineno, line)| {
                let (id, text) = line
                    .split_once('\t')
                    .ok_or_else(|| Error::parse(source, *lineno, "expected doc_id<TAB>text"))?;
                let mut log = Vec::new();
                let tags = pos.and_then(|p| p.get(id));
                let swapped = transform_logged(text, mapping, tags, &mut log);
                Ok((format!("{id}\t{swapped}\n"), log))
            })
            .collect::<Result<_>>()?;
        for (line, log) in done {
            writer.write_all(line.as_bytes()).map_err(|e| Error::io(source, e))?;
            for (from, to) in log {
                *report.substitutions.entry(format!("{from}->{to}")).or_default() += 1;
            }
        }
        chunk.clear();
        Ok(())
    };

    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        let line = line.strip_suffix('\r').map(str::to_owned).unwrap_or(line);
        if line.is_empty() {
            continue;
        }
        chunk.push((i + 1, line));
        if chunk.len() == CHUNK_LINES {
            flush(&mut chunk, &mut writer)?;
        }
    }
    flush(&mut chunk, &mut writer)?;
    writer.flush().map_err(|e| Error::io(source, e))?;
    Ok(report)
}

/// Writes the counterfactual version of `collection` to `out`.
pub fn cds_collection(
    collection: impl AsRef<Path>,
    mapping: &CdsMapping,
    pos: Option<&PosAnnotations>,
    out: impl AsRef<Path>,
) -> Result<TransformReport> {
    let collection = collection.as_ref();
    let out = out.as_ref();
    let reader = io::open_lines(collection)?;
    let writer = io::create(out)?;
    cds_stream(reader, writer, mapping, pos, collection)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mapping() -> CdsMapping {
        CdsMapping::from_tsv_str(
            "he\tshe\nshe\the\nson\tdaughter\ndaughter\tson\nhim\ther\nhers\this\n\
             her\this\tPOSS\nher\thim\tPRON\nhis\ther\tPOSS\nhis\thers\tPRON\n\
             elizabeth\tjohn\tNAME\njohn\telizabeth\tNAME\n",
            Path::new("m.tsv"),
        )
        .unwrap()
    }

    #[test]
    fn simple_swaps() {
        let m = mapping();
        assert_eq!(cds_transform("he plays", &m, None), "she plays");
        assert_eq!(cds_transform("my son", &m, None), "my daughter");
        assert_eq!(cds_transform("John met Elizabeth.", &m, None), "Elizabeth met John.");
    }

    #[test]
    fn annotated_her() {
        let m = mapping();
        let tags: HashMap<usize, PosTag> = [(0, PosTag::Poss)].into_iter().collect();
        assert_eq!(cds_transform("her book is hers", &m, Some(&tags)), "his book is his");
        let tags: HashMap<usize, PosTag> = [(2, PosTag::Pron)].into_iter().collect();
        assert_eq!(cds_transform("I saw her today", &m, Some(&tags)), "I saw him today");
    }

    #[test]
    fn her_heuristic() {
        let m = mapping();
        assert_eq!(cds_transform("her book is hers", &m, None), "his book is his");
        assert_eq!(cds_transform("I saw her.", &m, None), "I saw him.");
        assert_eq!(cds_transform("they gave her the ball", &m, None), "they gave him the ball");
        assert_eq!(cds_transform("call her", &m, None), "call him");
        assert_eq!(cds_transform("the car is his", &m, None), "the car is hers");
    }

    #[test]
    fn casing_preserved() {
        let m = mapping();
        assert_eq!(cds_transform("He said SHE left", &m, None), "She said HE left");
        assert_eq!(cds_transform("Hers, not his.", &m, None), "His, not hers.");
    }

    #[test]
    fn unmapped_text_untouched() {
        let m = mapping();
        let text = "  the weather -- is fine!\ttoday ";
        assert_eq!(cds_transform(text, &m, None), text);
        assert_eq!(cds_transform("shed heat", &m, None), "shed heat");
    }

    #[test]
    fn collection_report() {
        let m = mapping();
        let mut out = Vec::new();
        let r = cds_stream("d1\the runs\n".as_bytes(), &mut out, &m, None, Path::new("c")).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "d1\tshe runs\n");
        assert_eq!(r.substitutions, [("he->she".to_string(), 1)].into_iter().collect());
        assert_eq!(r.to_json().replace([' ', '\n'], ""), r#"{"he->she":1}"#);

        let mut out = Vec::new();
        let r = cds_stream("d1\tthe ball\nd2\tgoal\n".as_bytes(), &mut out, &m, None, Path::new("c")).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "d1\tthe ball\nd2\tgoal\n");
        assert_eq!(r.total(), 0);
    }

    #[test]
    fn collection_twice_is_identity() {
        let m = mapping();
        let input = "d1\tHe told his son about John\nd2\tthe daughter and she\n";
        let mut once = Vec::new();
        cds_stream(input.as_bytes(), &mut once, &m, None, Path::new("c")).unwrap();
        let mut twice = Vec::new();
        cds_stream(once.as_slice(), &mut twice, &m, None, Path::new("c")).unwrap();
        assert_eq!(String::from_utf8(twice).unwrap(), input);
    }

    #[test]
    fn missing_tab_is_an_error() {
        let m = mapping();
        let err = cds_stream("no tab here\n".as_bytes(), Vec::new(), &m, None, Path::new("c")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
