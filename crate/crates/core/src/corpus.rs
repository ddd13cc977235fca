//! Built-in directive sequences, optionally overridden from a directory
//! named by `SADIC_CORPUS_DIR`.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::language::DirectiveSequence;

pub const CORPUS_ENV: &str = "SADIC_CORPUS_DIR";

const BUILTIN: [(&str, &str); 4] = [
    ("fibonacci", include_str!("../corpus/fibonacci.dseq")),
    ("thue-morse", include_str!("../corpus/thue-morse.dseq")),
    ("chacon", include_str!("../corpus/chacon.dseq")),
    ("tribonacci", include_str!("../corpus/tribonacci.dseq")),
];

/// Corpus identifiers in a fixed order.
pub fn names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(name, _)| *name).collect()
}

/// Source text of a corpus entry.
pub fn text(name: &str) -> Result<String> {
    if let Some(dir) = std::env::var_os(CORPUS_ENV) {
        let path = PathBuf::from(dir).join(format!("{name}.dseq"));
        if path.exists() {
            return std::fs::read_to_string(&path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())));
        }
    }
    BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .ok_or_else(|| Error::UnknownCorpus(name.to_string()))
}

pub fn load(name: &str) -> Result<DirectiveSequence> {
    let d = DirectiveSequence::parse(&text(name)?)?;
    Ok(match d.name() {
        Some(_) => d,
        None => d.with_name(name),
    })
}
