//! Small file helpers shared by the parsers.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use crate::error::{Error, Result};

/// Opens `path` for buffered line reading, transparently decompressing
/// files whose name ends in `.gz`.
pub fn open_lines(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let gz = path
        .extension()
        .map(|ext| ext.eq_ignore_ascii_case("gz"))
        .unwrap_or(false);
    if gz {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::with_capacity(1 << 16, file)))
    }
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(BufWriter::new(file))
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(contents.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Iterates `(line_number, line)` pairs, 1-based, surfacing read errors.
pub fn numbered_lines(
    path: &Path,
) -> Result<impl Iterator<Item = Result<(usize, String)>> + Send> {
    let owned = path.to_path_buf();
    let reader = open_lines(path)?;
    Ok(reader
        .lines()
        .enumerate()
        .map(move |(i, line)| line.map(|l| (i + 1, l)).map_err(|e| Error::io(&owned, e))))
}
