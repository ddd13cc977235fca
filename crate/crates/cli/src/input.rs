use std::fmt;
use std::path::Path;

use sadic::factors::LocalCode;
use sadic::{corpus, Alphabet, DirectiveSequence, Morphism, Word};

/// Library errors keep their own message; everything else is a usage error.
#[derive(Debug)]
pub enum CliError {
    Library(sadic::Error),
    Usage(String),
}

impl CliError {
    pub fn is_hypothesis(&self) -> bool {
        matches!(self, CliError::Library(e) if e.is_hypothesis_violation())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<sadic::Error> for CliError {
    fn from(e: sadic::Error) -> Self {
        CliError::Library(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| sadic::Error::Io(format!("{}: {e}", path.display())).into())
}

/// A morphism file, or inline rules such as `a->ab,b->a`.
pub fn morphism(arg: &str) -> CliResult<Morphism> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(Morphism::parse(&read(path)?)?);
    }
    if arg.contains("->") {
        return Ok(Morphism::parse_inline(arg)?);
    }
    Err(sadic::Error::Io(format!("{arg}: no such file")).into())
}

/// A directive-sequence file or a corpus identifier.
pub fn sequence(arg: &str) -> CliResult<DirectiveSequence> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(DirectiveSequence::parse(&read(path)?)?);
    }
    Ok(corpus::load(arg)?)
}

pub fn code(arg: &str, domain: &Alphabet) -> CliResult<LocalCode> {
    Ok(LocalCode::parse(&read(Path::new(arg))?, domain)?)
}

pub fn word(alphabet: &Alphabet, text: &str) -> CliResult<Word> {
    Ok(alphabet.parse_word(text)?)
}

pub fn letter(alphabet: &Alphabet, name: &str) -> CliResult<usize> {
    Ok(alphabet.lookup(name)?)
}
