//! Tokenization and the per-document statistics index.
//!
//! Every fairness metric here depends on a document only through its token
//! length and the summed term frequency of each group's terms, so the index
//! keeps exactly those numbers and nothing else.
//!
//! # Index file layout (format version 1)
//!
//! UTF-8 text, one record per line, tab separated:
//!
//! ```text
//! texfair-index   1
//! tokenizer       lower-alnum-v1
//! lexicon         <sha256 hex of the lexicon>
//! groups          <group id>  <group id> ...
//! docs            <document count>
//! <doc id>        <length>    <magnitude per group, in header order>
//! ...
//! crc32           <8 hex digits, CRC-32 of every preceding byte>
//! ```
//!
//! Documents are written sorted by id, so identical collections always
//! produce byte-identical files.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io;
use crate::lexicon::GroupLexicon;

pub const TOKENIZER_ID: &str = "lower-alnum-v1";
pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "texfair-index";
const CHUNK_LINES: usize = 1 << 14;

/// Calls `f` with each lowercase token of `text`. Tokens are maximal runs
/// of alphanumeric characters; `buf` is scratch space reused across calls.
pub fn for_each_token(text: &str, buf: &mut String, mut f: impl FnMut(&str)) {
    buf.clear();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            if ch.is_ascii() {
                buf.push(ch.to_ascii_lowercase());
            } else {
                buf.extend(ch.to_lowercase());
            }
        } else if !buf.is_empty() {
            f(buf);
            buf.clear();
        }
    }
    if !buf.is_empty() {
        f(buf);
        buf.clear();
    }
}

/// Lowercases `text` and splits it on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut buf = String::new();
    for_each_token(text, &mut buf, |t| out.push(t.to_owned()));
    out
}

/// Token length and per-group term-frequency mass of one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocStats {
    pub doc_id: String,
    pub length: u32,
    /// Aligned with the owning index's group order.
    pub magnitudes: Vec<u32>,
}

impl DocStats {
    pub fn new(doc_id: impl Into<String>, length: u32, magnitudes: Vec<u32>) -> Self {
        DocStats {
            doc_id: doc_id.into(),
            length,
            magnitudes,
        }
    }

    pub fn from_text(doc_id: impl Into<String>, text: &str, lexicon: &GroupLexicon) -> Self {
        let mut buf = String::new();
        compute_stats(doc_id.into(), text, lexicon, &mut buf)
    }

    pub fn total_magnitude(&self) -> u64 {
        self.magnitudes.iter().map(|&m| m as u64).sum()
    }

    /// True when the document mentions at least one group term.
    pub fn is_representative(&self) -> bool {
        self.magnitudes.iter().any(|&m| m > 0)
    }
}

fn compute_stats(doc_id: String, text: &str, lexicon: &GroupLexicon, buf: &mut String) -> DocStats {
    let mut magnitudes = vec![0u32; lexicon.len()];
    let mut length = 0u32;
    for_each_token(text, buf, |tok| {
        length += 1;
        if let Some(g) = lexicon.group_of(tok) {
            magnitudes[g] += 1;
        }
    });
    DocStats {
        doc_id,
        length,
        magnitudes,
    }
}

/// Statistics for every document of a collection, keyed by document id.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusIndex {
    groups: Vec<String>,
    lexicon_fingerprint: String,
    tokenizer_id: String,
    docs: Vec<DocStats>,
    lookup: HashMap<String, usize>,
}

impl CorpusIndex {
    /// Assembles an index from precomputed statistics. Documents are sorted
    /// by id; duplicate ids are rejected.
    pub fn from_stats(groups: Vec<String>, lexicon_fingerprint: String, mut docs: Vec<DocStats>) -> Result<Self> {
        for d in &docs {
            if d.magnitudes.len() != groups.len() {
                return Err(Error::Validation(format!(
                    "document {:?} has {} magnitudes for {} groups",
                    d.doc_id,
                    d.magnitudes.len(),
                    groups.len()
                )));
            }
        }
        docs.par_sort_unstable_by(|a, b| a.doc_id.cmp(&b.doc_id));
        if let Some(w) = docs.windows(2).find(|w| w[0].doc_id == w[1].doc_id) {
            return Err(Error::DuplicateDoc(w[0].doc_id.clone()));
        }
        let lookup = docs
            .iter()
            .enumerate()
            .map(|(i, d)| (d.doc_id.clone(), i))
            .collect();
        Ok(CorpusIndex {
            groups,
            lexicon_fingerprint,
            tokenizer_id: TOKENIZER_ID.to_owned(),
            docs,
            lookup,
        })
    }

    /// Tokenizes in-memory `(doc_id, text)` pairs.
    pub fn from_documents<'a, I>(docs: I, lexicon: &GroupLexicon) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut buf = String::new();
        let stats = docs
            .into_iter()
            .map(|(id, text)| compute_stats(id.to_owned(), text, lexicon, &mut buf))
            .collect();
        CorpusIndex::from_stats(lexicon.group_ids(), lexicon.fingerprint(), stats)
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    pub fn lexicon_fingerprint(&self) -> &str {
        &self.lexicon_fingerprint
    }

    pub fn tokenizer_id(&self) -> &str {
        &self.tokenizer_id
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Documents in ascending id order.
    pub fn docs(&self) -> &[DocStats] {
        &self.docs
    }

    pub fn get(&self, doc_id: &str) -> Option<&DocStats> {
        self.lookup.get(doc_id).map(|&i| &self.docs[i])
    }

    /// Looks up every id, reporting all missing ones at once.
    pub fn resolve<'a, S: AsRef<str>>(&'a self, ids: &[S]) -> Result<Vec<&'a DocStats>> {
        let mut found = Vec::with_capacity(ids.len());
        let mut missing = Vec::new();
        for id in ids {
            match self.get(id.as_ref()) {
                Some(d) => found.push(d),
                None => missing.push(id.as_ref().to_owned()),
            }
        }
        if missing.is_empty() {
            Ok(found)
        } else {
            Err(Error::MissingDocs(missing))
        }
    }

    /// Fails unless `lexicon` is the one this index was built with.
    pub fn check_lexicon(&self, lexicon: &GroupLexicon) -> Result<()> {
        let fp = lexicon.fingerprint();
        if fp != self.lexicon_fingerprint {
            return Err(Error::Fingerprint {
                index: self.lexicon_fingerprint.clone(),
                lexicon: fp,
            });
        }
        Ok(())
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        let mut body = Vec::with_capacity(64 + self.docs.len() * 24);
        writeln!(body, "{MAGIC}\t{FORMAT_VERSION}")?;
        writeln!(body, "tokenizer\t{}", self.tokenizer_id)?;
        writeln!(body, "lexicon\t{}", self.lexicon_fingerprint)?;
        writeln!(body, "groups\t{}", self.groups.join("\t"))?;
        writeln!(body, "docs\t{}", self.docs.len())?;
        for d in &self.docs {
            write!(body, "{}\t{}", d.doc_id, d.length)?;
            for m in &d.magnitudes {
                write!(body, "\t{m}")?;
            }
            body.push(b'\n');
        }
        let crc = crc32fast::hash(&body);
        w.write_all(&body)?;
        writeln!(w, "crc32\t{crc:08x}")?;
        w.flush()
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|_| Error::Checksum("index is not valid UTF-8".into()))?;

        let first = text.lines().next().unwrap_or("");
        let mut head = first.split('\t');
        if head.next() != Some(MAGIC) {
            return Err(Error::Checksum("missing index header".into()));
        }
        let found: u32 = head
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Checksum("unreadable format version".into()))?;
        if found != FORMAT_VERSION {
            return Err(Error::Version {
                found,
                expected: FORMAT_VERSION,
            });
        }

        let trimmed = text.strip_suffix('\n').ok_or_else(|| Error::Checksum("missing trailer".into()))?;
        let trailer_start = trimmed.rfind('\n').map(|i| i + 1).unwrap_or(0);
        let trailer = &trimmed[trailer_start..];
        let stored = trailer
            .strip_prefix("crc32\t")
            .and_then(|h| u32::from_str_radix(h, 16).ok())
            .ok_or_else(|| Error::Checksum("missing trailer".into()))?;
        let body = &text[..trailer_start];
        let actual = crc32fast::hash(body.as_bytes());
        if actual != stored {
            return Err(Error::Checksum(format!("stored {stored:08x}, computed {actual:08x}")));
        }

        let mut lines = body.lines().skip(1);
        let mut field = |name: &str| -> Result<&str> {
            lines
                .next()
                .and_then(|l| l.strip_prefix(name))
                .and_then(|l| l.strip_prefix('\t'))
                .ok_or_else(|| Error::Checksum(format!("missing {name} header")))
        };
        let tokenizer_id = field("tokenizer")?.to_owned();
        let lexicon_fingerprint = field("lexicon")?.to_owned();
        let groups: Vec<String> = field("groups")?.split('\t').map(str::to_owned).collect();
        let count: usize = field("docs")?
            .parse()
            .map_err(|_| Error::Checksum("bad document count".into()))?;
        if tokenizer_id != TOKENIZER_ID {
            return Err(Error::Validation(format!(
                "index uses tokenizer {tokenizer_id:?}, this build uses {TOKENIZER_ID:?}"
            )));
        }

        let mut docs = Vec::with_capacity(count);
        for line in lines {
            let mut cols = line.split('\t');
            let bad = || Error::Checksum(format!("malformed record {line:?}"));
            let doc_id = cols.next().ok_or_else(bad)?.to_owned();
            let length = cols.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
            let magnitudes = cols
                .map(|c| c.parse::<u32>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            docs.push(DocStats {
                doc_id,
                length,
                magnitudes,
            });
        }
        if docs.len() != count {
            return Err(Error::Checksum(format!("expected {count} documents, found {}", docs.len())));
        }
        let mut index = CorpusIndex::from_stats(groups, lexicon_fingerprint, docs)?;
        index.tokenizer_id = tokenizer_id;
        Ok(index)
    }
}

/// Builds an index from a reader over Collection TSV (`doc_id<TAB>text`).
/// Lines are read in chunks and tokenized in parallel.
pub fn build_index_from_reader(reader: impl BufRead, lexicon: &GroupLexicon, source: &Path) -> Result<CorpusIndex> {
    let mut stats: Vec<DocStats> = Vec::new();
    let mut chunk: Vec<(usize, String)> = Vec::with_capacity(CHUNK_LINES);
    let mut flush = |chunk: &mut Vec<(usize, String)>| -> Result<()> {
        let parsed: Vec<DocStats> = chunk
            .par_iter()
            .map_init(String::new, |buf, (lineno, line)| {
                let (id, text) = line
                    .split_once('\t')
                    .ok_or_else(|| Error::parse(source, *lineno, "expected doc_id<TAB>text"))?;
                if id.is_empty() {
                    return Err(Error::parse(source, *lineno, "empty document id"));
                }
                Ok(compute_stats(id.to_owned(), text, lexicon, buf))
            })
            .collect::<Result<_>>()?;
        stats.extend(parsed);
        chunk.clear();
        Ok(())
    };

    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        let line = match line.strip_suffix('\r') {
            Some(l) => l.to_owned(),
            None => line,
        };
        if line.is_empty() {
            continue;
        }
        chunk.push((i + 1, line));
        if chunk.len() == CHUNK_LINES {
            flush(&mut chunk)?;
        }
    }
    flush(&mut chunk)?;
    CorpusIndex::from_stats(lexicon.group_ids(), lexicon.fingerprint(), stats)
}

pub fn build_index(collection: impl AsRef<Path>, lexicon: &GroupLexicon) -> Result<CorpusIndex> {
    let path = collection.as_ref();
    let reader = io::open_lines(path)?;
    build_index_from_reader(reader, lexicon, path)
}

pub fn save_index(index: &CorpusIndex, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let w = io::create(path)?;
    index.write_to(w).map_err(|e| Error::io(path, e))
}

pub fn load_index(path: impl AsRef<Path>) -> Result<CorpusIndex> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    CorpusIndex::parse(&bytes)
}
