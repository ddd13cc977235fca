//! Alphabets, morphisms of free semigroups, their metrics and classifications,
//! the three elementary morphisms and the peel decompositions built on them.
//!
//! Letters are indices into an [`Alphabet`]; a [`Word`] is a vector of such
//! indices. Names only matter at the boundary (parsing, printing, comparing
//! alphabets of different morphisms).

use std::collections::BTreeSet;
use std::fmt;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::words;

pub type Letter = usize;
pub type Word = Vec<Letter>;

/// An ordered finite set of distinct letter tokens.
#[derive(Clone, Debug, Eq)]
pub struct Alphabet {
    letters: Vec<String>,
    label: Option<String>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters
    }
}

impl std::hash::Hash for Alphabet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.letters.hash(state);
    }
}

fn valid_token(token: &str) -> bool {
    !token.is_empty()
        && token != "->"
        && !token.ends_with(':')
        && !token.contains(|c: char| c.is_whitespace() || c == '#' || c == ',')
}

impl Alphabet {
    pub fn new<S: Into<String>>(letters: impl IntoIterator<Item = S>) -> Result<Self> {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        if letters.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut seen = BTreeSet::new();
        for l in &letters {
            if !valid_token(l) {
                return Err(Error::InvalidLetter(l.clone()));
            }
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLetter(l.clone()));
            }
        }
        Ok(Alphabet {
            letters,
            label: None,
        })
    }

    /// One letter per character of `chars`.
    pub fn from_chars(chars: &str) -> Result<Self> {
        Self::new(chars.chars().map(String::from))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn name(&self, letter: Letter) -> &str {
        &self.letters[letter]
    }

    pub fn index(&self, name: &str) -> Option<Letter> {
        self.letters.iter().position(|l| l == name)
    }

    pub fn lookup(&self, name: &str) -> Result<Letter> {
        self.index(name)
            .ok_or_else(|| Error::ForeignLetter(name.to_string()))
    }

    /// Same letters, possibly in another order.
    pub fn same_letters(&self, other: &Alphabet) -> bool {
        self.len() == other.len() && self.letters.iter().all(|l| other.index(l).is_some())
    }

    /// The name `base~k` with the smallest `k >= 1` not already present.
    pub fn fresh_name(&self, base: &str) -> String {
        let root = base.split('~').next().unwrap_or(base);
        (1..)
            .map(|k| format!("{root}~{k}"))
            .find(|candidate| self.index(candidate).is_none())
            .expect("unbounded search")
    }

    pub fn with_letter(&self, name: impl Into<String>) -> Result<Alphabet> {
        let mut letters = self.letters.clone();
        letters.push(name.into());
        let mut out = Alphabet::new(letters)?;
        out.label = self.label.clone();
        Ok(out)
    }

    /// The sub-alphabet made of `keep`, in this alphabet's order.
    pub fn restrict(&self, keep: &BTreeSet<Letter>) -> Result<Alphabet> {
        let mut out = Alphabet::new(
            (0..self.len())
                .filter(|l| keep.contains(l))
                .map(|l| self.letters[l].clone()),
        )?;
        out.label = self.label.clone();
        Ok(out)
    }

    pub fn without(&self, drop: Letter) -> Result<Alphabet> {
        let keep = (0..self.len()).filter(|&l| l != drop).collect();
        self.restrict(&keep)
    }

    fn single_char(&self) -> bool {
        self.letters.iter().all(|l| l.chars().count() == 1)
    }

    /// Printable form of `word`: concatenated when every letter is a single
    /// character, space separated otherwise.
    pub fn spell(&self, word: &[Letter]) -> String {
        let sep = if self.single_char() { "" } else { " " };
        word.iter()
            .map(|&l| self.letters[l].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Reads a word: whitespace-separated tokens, or one letter per character
    /// when the text has no whitespace and is not itself a letter.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::EmptyWord);
        }
        if text.contains(char::is_whitespace) || self.index(text).is_some() {
            text.split_whitespace().map(|t| self.lookup(t)).collect()
        } else {
            text.chars().map(|c| self.lookup(&c.to_string())).collect()
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letters.join(" "))
    }
}

/// Metrics of a morphism: shortest, longest and total image length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Metrics {
    pub min_len: usize,
    pub max_len: usize,
    pub total_len: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Classification {
    pub r_proper: bool,
    pub proper: bool,
    pub letter_onto: bool,
    pub positive: bool,
}

/// The three peel cases, naming letters by index in the morphism's source.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Peel {
    /// Images of `a` and `b` coincide.
    Equal { a: Letter, b: Letter },
    /// The image of `a` is a strict prefix of the image of `b`.
    Prefix { a: Letter, b: Letter },
    /// The image of `a` is split after `s_len` letters.
    Interior { a: Letter, s_len: usize },
}

/// A morphism of free semigroups with nonempty images.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    source: Alphabet,
    target: Alphabet,
    images: Vec<Word>,
}

impl Morphism {
    pub fn new(source: Alphabet, target: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != source.len() {
            let missing = source
                .letters()
                .get(images.len())
                .cloned()
                .unwrap_or_default();
            return Err(Error::MissingImage(missing));
        }
        for (a, img) in images.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::EmptyImage(source.name(a).to_string()));
            }
            if let Some(&bad) = img.iter().find(|&&l| l >= target.len()) {
                return Err(Error::ForeignLetter(format!("#{bad}")));
            }
        }
        Ok(Morphism {
            source,
            target,
            images,
        })
    }

    /// Builds a morphism from `(letter, image)` pairs where every character
    /// is a letter. The target alphabet lists source letters first (in source
    /// order) when they occur in images, then other letters by first use.
    pub fn from_chars(rules: &[(&str, &str)]) -> Result<Self> {
        let rules: Vec<(String, Vec<String>)> = rules
            .iter()
            .map(|(a, img)| (a.to_string(), img.chars().map(String::from).collect()))
            .collect();
        Self::from_named_rules(&rules, None, None)
    }

    pub(crate) fn from_named_rules(
        rules: &[(String, Vec<String>)],
        source: Option<Alphabet>,
        target: Option<Alphabet>,
    ) -> Result<Self> {
        let source = match source {
            Some(s) => s,
            None => Alphabet::new(rules.iter().map(|(a, _)| a.clone()))?,
        };
        let target = match target {
            Some(t) => t,
            None => {
                let used: BTreeSet<&str> = rules
                    .iter()
                    .flat_map(|(_, img)| img.iter().map(String::as_str))
                    .collect();
                let mut names: Vec<String> = source
                    .letters()
                    .iter()
                    .filter(|l| used.contains(l.as_str()))
                    .cloned()
                    .collect();
                for (_, img) in rules {
                    for t in img {
                        if !names.contains(t) {
                            names.push(t.clone());
                        }
                    }
                }
                Alphabet::new(names)?
            }
        };
        let mut images: Vec<Option<Word>> = vec![None; source.len()];
        for (a, img) in rules {
            let idx = source.lookup(a)?;
            if images[idx].is_some() {
                return Err(Error::DuplicateLetter(a.clone()));
            }
            let word = img
                .iter()
                .map(|t| target.lookup(t))
                .collect::<Result<Word>>()?;
            images[idx] = Some(word);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(a, img)| img.ok_or_else(|| Error::MissingImage(source.name(a).to_string())))
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(source, target, images)
    }

    pub fn identity(alphabet: &Alphabet) -> Self {
        Morphism {
            source: alphabet.clone(),
            target: alphabet.clone(),
            images: (0..alphabet.len()).map(|a| vec![a]).collect(),
        }
    }

    pub fn source(&self) -> &Alphabet {
        &self.source
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn image(&self, a: Letter) -> &[Letter] {
        &self.images[a]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn len(&self, a: Letter) -> usize {
        self.images[a].len()
    }

    /// Concatenation of the images of the letters of `w`.
    pub fn apply(&self, w: &[Letter]) -> Word {
        let mut out = Vec::with_capacity(w.iter().map(|&a| self.images[a].len()).sum());
        for &a in w {
            out.extend_from_slice(&self.images[a]);
        }
        out
    }

    /// Reads `text` over the source alphabet and applies the morphism.
    pub fn apply_text(&self, text: &str) -> Result<Word> {
        Ok(self.apply(&self.source.parse_word(text)?))
    }

    /// `outer ∘ inner`: apply `inner` first.
    pub fn compose(outer: &Morphism, inner: &Morphism) -> Result<Morphism> {
        if !inner.target.same_letters(&outer.source) {
            return Err(Error::AlphabetMismatch {
                expected: outer.source.to_string(),
                found: inner.target.to_string(),
            });
        }
        let remap: Vec<Letter> = inner
            .target
            .letters()
            .iter()
            .map(|l| outer.source.index(l).expect("checked"))
            .collect();
        let images = inner
            .images
            .iter()
            .map(|img| {
                let mut out = Vec::new();
                for &c in img {
                    out.extend_from_slice(&outer.images[remap[c]]);
                }
                out
            })
            .collect();
        Ok(Morphism {
            source: inner.source.clone(),
            target: outer.target.clone(),
            images,
        })
    }

    /// Composes a chain `ms[0] ∘ ms[1] ∘ … ∘ ms[k-1]`.
    pub fn compose_chain(ms: &[Morphism]) -> Result<Morphism> {
        let (last, rest) = ms
            .split_last()
            .ok_or_else(|| Error::Internal("empty composition chain".into()))?;
        rest.iter()
            .rev()
            .try_fold(last.clone(), |acc, m| Morphism::compose(m, &acc))
    }

    pub fn metrics(&self) -> Metrics {
        let lens = self.images.iter().map(Vec::len);
        Metrics {
            min_len: lens.clone().min().unwrap_or(0),
            max_len: lens.clone().max().unwrap_or(0),
            total_len: lens.sum(),
        }
    }

    /// Shortest image length.
    pub fn min_len(&self) -> usize {
        self.metrics().min_len
    }

    /// Longest image length.
    pub fn max_len(&self) -> usize {
        self.metrics().max_len
    }

    /// Sum of image lengths.
    pub fn total_len(&self) -> usize {
        self.metrics().total_len
    }

    pub fn common_prefix_len(&self) -> usize {
        words::common_prefix_len(&self.images)
    }

    pub fn common_suffix_len(&self) -> usize {
        words::common_suffix_len(&self.images)
    }

    /// Largest `r` for which the morphism is `r`-proper.
    pub fn properness_radius(&self) -> usize {
        self.common_prefix_len().min(self.common_suffix_len())
    }

    pub fn is_r_proper(&self, r: usize) -> bool {
        r == 0 || self.properness_radius() >= r
    }

    pub fn is_proper(&self) -> bool {
        self.is_r_proper(1)
    }

    pub fn is_letter_onto(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        for img in &self.images {
            for &c in img {
                seen[c] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_positive(&self) -> bool {
        self.images.iter().all(|img| {
            let mut seen = vec![false; self.target.len()];
            for &c in img {
                seen[c] = true;
            }
            seen.into_iter().all(|s| s)
        })
    }

    pub fn classify(&self, r: usize) -> Classification {
        Classification {
            r_proper: self.is_r_proper(r),
            proper: self.is_proper(),
            letter_onto: self.is_letter_onto(),
            positive: self.is_positive(),
        }
    }

    /// Target letters occurring in some image.
    pub fn used_letters(&self) -> BTreeSet<Letter> {
        self.images.iter().flatten().copied().collect()
    }

    /// Restricts the source alphabet to `keep`.
    pub fn restrict_source(&self, keep: &BTreeSet<Letter>) -> Result<Morphism> {
        let source = self.source.restrict(keep)?;
        let images = (0..self.source.len())
            .filter(|a| keep.contains(a))
            .map(|a| self.images[a].clone())
            .collect();
        Morphism::new(source, self.target.clone(), images)
    }

    /// Shrinks the target alphabet to `keep`, which must contain every used
    /// letter.
    pub fn restrict_target(&self, keep: &BTreeSet<Letter>) -> Result<Morphism> {
        if let Some(&c) = self.used_letters().difference(keep).next() {
            return Err(Error::ForeignLetter(self.target.name(c).to_string()));
        }
        let target = self.target.restrict(keep)?;
        let mut remap = vec![usize::MAX; self.target.len()];
        for (new, old) in keep.iter().enumerate() {
            remap[*old] = new;
        }
        let images = self
            .images
            .iter()
            .map(|img| img.iter().map(|&c| remap[c]).collect())
            .collect();
        Morphism::new(self.source.clone(), target, images)
    }

    /// Same morphism with the target restricted to used letters, which makes
    /// it letter-onto.
    pub fn onto_used(&self) -> Result<Morphism> {
        self.restrict_target(&self.used_letters())
    }

    /// Reverses every image. Reversal turns prefix statements into suffix
    /// statements and commutes with composition.
    pub fn reversed(&self) -> Morphism {
        Morphism {
            source: self.source.clone(),
            target: self.target.clone(),
            images: self
                .images
                .iter()
                .map(|img| img.iter().rev().copied().collect())
                .collect(),
        }
    }

    /// Relabels the target alphabet to `target`, which must hold the same
    /// letters in some order.
    pub fn with_target_order(&self, target: &Alphabet) -> Result<Morphism> {
        if !self.target.same_letters(target) {
            return Err(Error::AlphabetMismatch {
                expected: target.to_string(),
                found: self.target.to_string(),
            });
        }
        let remap: Vec<Letter> = self
            .target
            .letters()
            .iter()
            .map(|l| target.index(l).expect("checked"))
            .collect();
        Ok(Morphism {
            source: self.source.clone(),
            target: target.clone(),
            images: self
                .images
                .iter()
                .map(|img| img.iter().map(|&c| remap[c]).collect())
                .collect(),
        })
    }

    /// Lists the source letters in the order of `source`, which must hold
    /// the same letters.
    pub fn with_source_order(&self, source: &Alphabet) -> Result<Morphism> {
        if !self.source.same_letters(source) {
            return Err(Error::AlphabetMismatch {
                expected: source.to_string(),
                found: self.source.to_string(),
            });
        }
        let images = source
            .letters()
            .iter()
            .map(|l| self.images[self.source.index(l).expect("checked")].clone())
            .collect();
        Ok(Morphism {
            source: source.clone(),
            target: self.target.clone(),
            images,
        })
    }

    /// Letterwise equality up to the order in which alphabets list letters.
    pub fn same_as(&self, other: &Morphism) -> bool {
        if !self.source.same_letters(&other.source) || !self.target.same_letters(&other.target) {
            return false;
        }
        (0..self.source.len()).all(|a| {
            let b = other.source.index(self.source.name(a)).expect("same letters");
            let lhs = self.images[a].iter().map(|&c| self.target.name(c));
            let rhs = other.images[b].iter().map(|&c| other.target.name(c));
            lhs.eq(rhs)
        })
    }

    /// Erase `b` onto `a`: `b ↦ a`, other letters fixed, target drops `b`.
    pub fn erase(alphabet: &Alphabet, a: Letter, b: Letter) -> Result<Morphism> {
        distinct(alphabet, a, b, "erase")?;
        let target = alphabet.without(b)?;
        let shift = |c: Letter| if c > b { c - 1 } else { c };
        let images = (0..alphabet.len())
            .map(|c| if c == b { vec![shift(a)] } else { vec![shift(c)] })
            .collect();
        Morphism::new(alphabet.clone(), target, images)
    }

    /// Cut `b` after `a`: `b ↦ ab`, other letters fixed.
    pub fn cut(alphabet: &Alphabet, a: Letter, b: Letter) -> Result<Morphism> {
        distinct(alphabet, a, b, "cut")?;
        let images = (0..alphabet.len())
            .map(|c| if c == b { vec![a, b] } else { vec![c] })
            .collect();
        Morphism::new(alphabet.clone(), alphabet.clone(), images)
    }

    /// Split `a` with a fresh letter placed last in the target: `a ↦ ã a`.
    /// Returns the morphism and the fresh letter.
    pub fn split(alphabet: &Alphabet, a: Letter) -> Result<(Morphism, Letter)> {
        if a >= alphabet.len() {
            return Err(Error::ForeignLetter(format!("#{a}")));
        }
        let fresh_name = alphabet.fresh_name(alphabet.name(a));
        Self::split_with(alphabet, a, &fresh_name)
    }

    /// Split `a` with the given fresh letter name.
    pub fn split_with(alphabet: &Alphabet, a: Letter, fresh: &str) -> Result<(Morphism, Letter)> {
        if alphabet.index(fresh).is_some() {
            return Err(Error::hypothesis(
                "split",
                format!("letter `{fresh}` is not fresh"),
            ));
        }
        let target = alphabet.with_letter(fresh)?;
        let fresh = alphabet.len();
        let images = (0..alphabet.len())
            .map(|c| if c == a { vec![fresh, a] } else { vec![c] })
            .collect();
        Ok((Morphism::new(alphabet.clone(), target, images)?, fresh))
    }

    /// Writes `self = σ' ∘ e` with `e` elementary. Returns `(σ', e)`.
    pub fn peel(&self, case: Peel) -> Result<(Morphism, Morphism)> {
        let n = self.source.len();
        let (sigma, e) = match case {
            Peel::Equal { a, b } => {
                check_letters(n, &[a, b])?;
                if a == b || self.images[a] != self.images[b] {
                    return Err(Error::hypothesis(
                        "peel",
                        "equal case needs distinct letters with equal images",
                    ));
                }
                let e = Morphism::erase(&self.source, a, b)?;
                let keep = (0..n).filter(|&c| c != b).collect();
                (self.restrict_source(&keep)?, e)
            }
            Peel::Prefix { a, b } => {
                check_letters(n, &[a, b])?;
                let (ia, ib) = (&self.images[a], &self.images[b]);
                if a == b || ia.len() >= ib.len() || !ib.starts_with(ia) {
                    return Err(Error::hypothesis(
                        "peel",
                        "prefix case needs the image of a to be a strict prefix of the image of b",
                    ));
                }
                let mut images = self.images.clone();
                images[b] = ib[ia.len()..].to_vec();
                let e = Morphism::cut(&self.source, a, b)?;
                (
                    Morphism::new(self.source.clone(), self.target.clone(), images)?,
                    e,
                )
            }
            Peel::Interior { a, s_len } => {
                check_letters(n, &[a])?;
                let img = &self.images[a];
                if s_len == 0 || s_len >= img.len() {
                    return Err(Error::hypothesis(
                        "peel",
                        format!(
                            "interior split needs 1 <= s_len < {}, got {s_len}",
                            img.len()
                        ),
                    ));
                }
                let (e, fresh) = Morphism::split(&self.source, a)?;
                let mut images = self.images.clone();
                images[a] = img[s_len..].to_vec();
                images.push(img[..s_len].to_vec());
                debug_assert_eq!(images.len(), fresh + 1);
                (
                    Morphism::new(e.target.clone(), self.target.clone(), images)?,
                    e,
                )
            }
        };
        debug_assert_eq!(Morphism::compose(&sigma, &e).as_ref(), Ok(self));
        Ok((sigma, e))
    }

    /// Canonical text form, with explicit alphabet headers.
    pub fn to_text(&self) -> String {
        let mut out = format!("source: {}\ntarget: {}\n", self.source, self.target);
        for (a, img) in self.images.iter().enumerate() {
            let rhs: Vec<&str> = img.iter().map(|&c| self.target.name(c)).collect();
            out.push_str(&format!("{} -> {}\n", self.source.name(a), rhs.join(" ")));
        }
        out
    }

    /// Parses the text format: `letter -> letter letter ...` rules, `#`
    /// comments, optional `source:` and `target:` headers.
    pub fn parse(text: &str) -> Result<Morphism> {
        let mut rules = Vec::new();
        let mut source = None;
        let mut target = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: &str| Error::Parse {
                line: i + 1,
                message: message.to_string(),
            };
            if let Some(rest) = line.strip_prefix("source:") {
                source = Some(Alphabet::new(rest.split_whitespace()).map_err(|e| perr(&e.to_string()))?);
            } else if let Some(rest) = line.strip_prefix("target:") {
                target = Some(Alphabet::new(rest.split_whitespace()).map_err(|e| perr(&e.to_string()))?);
            } else if let Some((lhs, rhs)) = line.split_once("->") {
                let lhs = lhs.trim();
                if !valid_token(lhs) {
                    return Err(perr("rule needs a single letter on the left"));
                }
                let img: Vec<String> = rhs.split_whitespace().map(String::from).collect();
                if img.is_empty() {
                    return Err(perr("empty image"));
                }
                rules.push((lhs.to_string(), img));
            } else {
                return Err(perr("expected `letter -> image` or a header"));
            }
        }
        if rules.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no rules".into(),
            });
        }
        Morphism::from_named_rules(&rules, source, target)
    }

    /// Compact one-line form `a->ab,b->a` with one character per letter.
    pub fn parse_inline(text: &str) -> Result<Morphism> {
        let mut rules = Vec::new();
        for part in text.split(',') {
            let (lhs, rhs) = part.split_once("->").ok_or_else(|| Error::Parse {
                line: 1,
                message: format!("bad inline rule `{part}`"),
            })?;
            let rhs = rhs.trim();
            let img: Vec<String> = if rhs.contains(char::is_whitespace) {
                rhs.split_whitespace().map(String::from).collect()
            } else {
                rhs.chars().map(String::from).collect()
            };
            rules.push((lhs.trim().to_string(), img));
        }
        Morphism::from_named_rules(&rules, None, None)
    }

    /// Images spelled over the target alphabet, in source order.
    pub fn rule_strings(&self) -> Vec<String> {
        self.images
            .iter()
            .enumerate()
            .map(|(a, img)| {
                let rhs: Vec<&str> = img.iter().map(|&c| self.target.name(c)).collect();
                format!("{} -> {}", self.source.name(a), rhs.join(" "))
            })
            .collect()
    }
}

fn check_letters(n: usize, letters: &[Letter]) -> Result<()> {
    match letters.iter().find(|&&l| l >= n) {
        Some(l) => Err(Error::ForeignLetter(format!("#{l}"))),
        None => Ok(()),
    }
}

fn distinct(alphabet: &Alphabet, a: Letter, b: Letter, op: &'static str) -> Result<()> {
    check_letters(alphabet.len(), &[a, b])?;
    if a == b {
        return Err(Error::hypothesis(op, "letters must be distinct"));
    }
    Ok(())
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl Serialize for Morphism {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Morphism", 3)?;
        st.serialize_field("rules", &self.rule_strings())?;
        st.serialize_field("source", self.source.letters())?;
        st.serialize_field("target", self.target.letters())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fib() -> Morphism {
        Morphism::from_chars(&[("a", "ab"), ("b", "a")]).unwrap()
    }

    #[test]
    fn apply_fibonacci() {
        let f = fib();
        assert_eq!(f.source().spell(&f.apply_text("ab").unwrap()), "aba");
        assert_eq!(f.source().spell(&f.apply_text("aba").unwrap()), "abaab");
        assert!(matches!(f.apply_text("abc"), Err(Error::ForeignLetter(l)) if l == "c"));
    }

    #[test]
    fn compose_fibonacci() {
        let f = fib();
        let f2 = Morphism::compose(&f, &f).unwrap();
        assert_eq!(f2, Morphism::from_chars(&[("a", "aba"), ("b", "ab")]).unwrap());
        let id = Morphism::identity(f.source());
        assert_eq!(Morphism::compose(&f, &id).unwrap(), f);
        assert_eq!(Morphism::compose(&id, &f).unwrap(), f);
        let other = Morphism::from_chars(&[("x", "y")]).unwrap();
        assert!(matches!(
            Morphism::compose(&f, &other),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn metrics_examples() {
        let f = fib();
        let m = |min_len, max_len, total_len| Metrics {
            min_len,
            max_len,
            total_len,
        };
        assert_eq!(f.metrics(), m(1, 2, 3));
        assert_eq!(Morphism::compose(&f, &f).unwrap().metrics(), m(2, 3, 5));
        assert_eq!(Morphism::identity(f.source()).metrics(), m(1, 1, 2));
    }

    #[test]
    fn classify_examples() {
        let f = fib();
        let c = |r_proper, proper, letter_onto, positive| Classification {
            r_proper,
            proper,
            letter_onto,
            positive,
        };
        assert_eq!(f.classify(1), c(false, false, true, false));
        let f2 = Morphism::compose(&f, &f).unwrap();
        assert_eq!(f2.classify(1), c(false, false, true, true));
        let constant = Morphism::from_chars(&[("a", "xyx"), ("b", "xyx")]).unwrap();
        assert!(constant.classify(3).r_proper);
        assert!(f.classify(0).r_proper);
    }

    #[test]
    fn elementary_maps() {
        let abc = Alphabet::from_chars("abc").unwrap();
        let e = Morphism::erase(&abc, 0, 1).unwrap();
        assert_eq!(e.target().letters(), ["a", "c"]);
        assert_eq!(e.rule_strings(), ["a -> a", "b -> a", "c -> c"]);
        let c = Morphism::cut(&abc, 0, 1).unwrap();
        assert_eq!(c.rule_strings(), ["a -> a", "b -> a b", "c -> c"]);
        let (s, fresh) = Morphism::split(&abc, 0).unwrap();
        assert_eq!(s.target().name(fresh), "a~1");
        assert_eq!(s.rule_strings(), ["a -> a~1 a", "b -> b", "c -> c"]);
        for m in [&e, &c, &s] {
            assert!(m.is_letter_onto());
        }
        assert!(Morphism::erase(&abc, 1, 1).is_err());
        assert!(Morphism::split_with(&abc, 0, "b").is_err());
    }

    #[test]
    fn fresh_names_skip_used() {
        let a = Alphabet::new(["a", "a~1", "b"]).unwrap();
        assert_eq!(a.fresh_name("a"), "a~2");
        assert_eq!(a.fresh_name("a~1"), "a~2");
        assert_eq!(a.fresh_name("b"), "b~1");
    }

    #[test]
    fn peel_examples() {
        let s = Morphism::from_chars(&[("a", "ab"), ("b", "abb")]).unwrap();
        let (sp, e) = s.peel(Peel::Prefix { a: 0, b: 1 }).unwrap();
        assert_eq!(sp.rule_strings(), ["a -> a b", "b -> b"]);
        assert_eq!(e, Morphism::cut(s.source(), 0, 1).unwrap());
        assert_eq!(Morphism::compose(&sp, &e).unwrap(), s);

        let s = Morphism::from_chars(&[("a", "x"), ("b", "x")]).unwrap();
        let (sp, e) = s.peel(Peel::Equal { a: 0, b: 1 }).unwrap();
        assert_eq!(sp.rule_strings(), ["a -> x"]);
        assert_eq!(Morphism::compose(&sp, &e).unwrap(), s);

        let s = Morphism::from_chars(&[("a", "abc")]).unwrap();
        let (sp, e) = s.peel(Peel::Interior { a: 0, s_len: 1 }).unwrap();
        assert_eq!(sp.rule_strings(), ["a -> b c", "a~1 -> a"]);
        assert_eq!(Morphism::compose(&sp, &e).unwrap(), s);

        assert!(s.peel(Peel::Interior { a: 0, s_len: 3 }).is_err());
        assert!(fib().peel(Peel::Equal { a: 0, b: 1 }).is_err());
        assert!(fib().peel(Peel::Prefix { a: 0, b: 1 }).is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "# fibonacci\na -> a b\nb -> a\n";
        let m = Morphism::parse(text).unwrap();
        assert_eq!(m, fib());
        let canon = m.to_text();
        assert_eq!(canon, "source: a b\ntarget: a b\na -> a b\nb -> a\n");
        let again = Morphism::parse(&canon).unwrap();
        assert_eq!(again, m);
        assert_eq!(again.to_text(), canon);

        let declared = "source: x y\ntarget: b a c\nx -> a b\ny -> c\n";
        let m = Morphism::parse(declared).unwrap();
        assert_eq!(m.target().letters(), ["b", "a", "c"]);
        assert_eq!(m.to_text(), "source: x y\ntarget: b a c\nx -> a b\ny -> c\n");
        assert!(Morphism::parse("a -> \n").is_err());
        assert!(Morphism::parse("source: a b\na -> a\n").is_err());
        assert_eq!(Morphism::parse_inline("a->ab,b->a").unwrap(), fib());
    }
}
