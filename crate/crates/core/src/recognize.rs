//! Centered factorizations read through finite windows, and exact
//! recognizability checks relative to a language table.
//!
//! A point `y = T^k σ(x)` with `0 <= k < |σ(x₀)|` is seen through the window
//! `y[-r..=r]`; its symbol is `(k, x₀)`. The morphism is recognizable with
//! constant `r` on the table when every window determines its symbol.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::fingerprint::{self, Prefixes};
use crate::language::LanguageTable;
use crate::morphism::{Letter, Morphism, Word};

/// Default cap for the minimal-radius search.
pub const DEFAULT_RADIUS_CAP: usize = 64;

/// One centered reading of a window.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub struct Interpretation {
    pub window: Word,
    /// Position of the window center inside the image of `letter`.
    pub offset: usize,
    pub letter: Letter,
    /// Starts of images inside the window, relative to its center.
    pub local_cuts: Vec<isize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    RecognizableAtR,
    Violated,
    UnknownAtCap,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct RecognizabilityReport {
    pub radius: usize,
    pub verdict: Verdict,
    pub witness: Option<(Interpretation, Interpretation)>,
    /// Distinct windows examined.
    pub table_size: usize,
}

/// Length of the table words needed so every window of radius `r` sits
/// inside the image of one of them.
pub fn covering_length(sigma: &Morphism, r: usize) -> usize {
    (2 * r + 1).div_ceil(sigma.min_len()) + 2
}

/// Symbols `(offset, letter)` seen under each window of radius `r`.
pub type InterpretationTable = HashMap<Word, BTreeSet<(usize, Letter)>>;

fn check_table(sigma: &Morphism, lx: &LanguageTable, r: usize) -> Result<usize> {
    if lx.alphabet != *sigma.source() {
        return Err(Error::AlphabetMismatch {
            expected: sigma.source().to_string(),
            found: lx.alphabet.to_string(),
        });
    }
    let m = covering_length(sigma, r);
    lx.require(m)?;
    Ok(m)
}

/// Visits every window of radius `r` lying inside `σ(v)` for a table word
/// `v` of covering length, with its symbol and the cut list of `σ(v)`.
fn for_each_window<F>(sigma: &Morphism, lx: &LanguageTable, r: usize, mut f: F) -> Result<()>
where
    F: FnMut(&[Letter], usize, Letter, &[usize], usize),
{
    let m = check_table(sigma, lx, r)?;
    for v in lx.of_len(m) {
        let image = sigma.apply(v);
        let mut starts = Vec::with_capacity(v.len() + 1);
        let mut at = 0;
        for &a in v {
            starts.push(at);
            at += sigma.len(a);
        }
        starts.push(at);
        let mut j = 0;
        for p in r..image.len().saturating_sub(r) {
            while starts[j + 1] <= p {
                j += 1;
            }
            f(&image[p - r..=p + r], p - starts[j], v[j], &starts, p);
        }
    }
    Ok(())
}

/// Table of all centered symbols seen under each radius-`r` window.
pub fn centered_interpretations(
    sigma: &Morphism,
    lx: &LanguageTable,
    r: usize,
) -> Result<InterpretationTable> {
    let mut table: InterpretationTable = HashMap::new();
    for_each_window(sigma, lx, r, |window, offset, letter, _, _| {
        match table.get_mut(window) {
            Some(set) => {
                set.insert((offset, letter));
            }
            None => {
                table.insert(window.to_vec(), BTreeSet::from([(offset, letter)]));
            }
        }
    })?;
    Ok(table)
}

fn local_cuts(starts: &[usize], p: usize, r: usize) -> Vec<isize> {
    starts
        .iter()
        .filter(|&&s| s + r >= p && s <= p + r)
        .map(|&s| s as isize - p as isize)
        .collect()
}

/// Every centered interpretation of `window`, with its local cuts. Empty when
/// the window never occurs in an image of the table.
pub fn parse_window(window: &[Letter], sigma: &Morphism, lx: &LanguageTable) -> Result<Vec<Interpretation>> {
    if window.len().is_multiple_of(2) {
        return Err(Error::hypothesis("parse_window", "window length must be odd"));
    }
    let r = window.len() / 2;
    let mut found = BTreeSet::new();
    for_each_window(sigma, lx, r, |w, offset, letter, starts, p| {
        if w == window {
            found.insert(Interpretation {
                window: w.to_vec(),
                offset,
                letter,
                local_cuts: local_cuts(starts, p, r),
            });
        }
    })?;
    Ok(found.into_iter().collect())
}

struct Entry {
    symbols: BTreeSet<(usize, Letter)>,
    image: usize,
    start: usize,
}

/// Symbols seen under each radius-`r` window, keyed by window fingerprints so
/// that long windows are never copied. Lookups compare the stored window
/// literally.
pub struct WindowIndex {
    radius: usize,
    images: Vec<Word>,
    entries: HashMap<u128, Entry>,
}

impl WindowIndex {
    pub fn build(sigma: &Morphism, lx: &LanguageTable, r: usize) -> Result<Self> {
        let m = check_table(sigma, lx, r)?;
        let width = 2 * r + 1;
        let mut images = Vec::new();
        let mut entries: HashMap<u128, Entry> = HashMap::new();
        for v in lx.of_len(m) {
            let image = sigma.apply(v);
            let prefixes = Prefixes::new(&image);
            let mut j = 0;
            let mut start_of_j = 0;
            for p in r..image.len().saturating_sub(r) {
                while start_of_j + sigma.len(v[j]) <= p {
                    start_of_j += sigma.len(v[j]);
                    j += 1;
                }
                let symbol = (p - start_of_j, v[j]);
                entries
                    .entry(prefixes.get(p - r, width))
                    .or_insert_with(|| Entry {
                        symbols: BTreeSet::new(),
                        image: images.len(),
                        start: p - r,
                    })
                    .symbols
                    .insert(symbol);
            }
            images.push(image);
        }
        Ok(WindowIndex {
            radius: r,
            images,
            entries,
        })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Number of distinct windows.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn stored(&self, e: &Entry) -> &[Letter] {
        &self.images[e.image][e.start..e.start + 2 * self.radius + 1]
    }

    /// Symbols seen under `window`, `None` if it never occurs.
    pub fn symbols(&self, window: &[Letter]) -> Option<&BTreeSet<(usize, Letter)>> {
        if window.len() != 2 * self.radius + 1 {
            return None;
        }
        let e = self.entries.get(&fingerprint::of(window))?;
        (self.stored(e) == window).then_some(&e.symbols)
    }

    /// Windows carrying more than one symbol.
    pub fn ambiguous(&self) -> impl Iterator<Item = &[Letter]> {
        self.entries
            .values()
            .filter(|e| e.symbols.len() > 1)
            .map(|e| self.stored(e))
    }
}

/// Exact recognizability of `σ` with constant `r` relative to `lx`.
pub fn recognizability_check(sigma: &Morphism, lx: &LanguageTable, r: usize) -> Result<RecognizabilityReport> {
    let index = WindowIndex::build(sigma, lx, r)?;
    let witness = match index.ambiguous().min() {
        None => None,
        Some(window) => {
            let parses = parse_window(window, sigma, lx)?;
            let first = parses
                .first()
                .cloned()
                .ok_or_else(|| Error::Internal("fingerprint collision".into()))?;
            let second = parses
                .iter()
                .find(|i| (i.offset, i.letter) != (first.offset, first.letter))
                .cloned()
                .ok_or_else(|| Error::Internal("fingerprint collision".into()))?;
            Some((first, second))
        }
    };
    Ok(RecognizabilityReport {
        radius: r,
        verdict: if witness.is_some() {
            Verdict::Violated
        } else {
            Verdict::RecognizableAtR
        },
        witness,
        table_size: index.len(),
    })
}

/// Smallest `r <= cap` at which `σ` is recognizable on `lx`. Stops with
/// [`Verdict::UnknownAtCap`] at the cap or when `lx` is too short for the
/// next radius.
pub fn minimal_constant(sigma: &Morphism, lx: &LanguageTable, cap: usize) -> Result<RecognizabilityReport> {
    let mut last = None;
    for r in 0..=cap {
        if covering_length(sigma, r) > lx.max_len {
            break;
        }
        let report = recognizability_check(sigma, lx, r)?;
        if report.verdict == Verdict::RecognizableAtR {
            return Ok(report);
        }
        last = Some(report);
    }
    let mut out = last.ok_or(Error::LanguageTooShallow {
        needed: covering_length(sigma, 0),
        have: lx.max_len,
    })?;
    out.verdict = Verdict::UnknownAtCap;
    Ok(out)
}

/// Upper bound on the recognizability constant of `τσ` from constants of
/// `σ` and `τ`.
pub fn composition_bound(r_sigma: usize, r_tau: usize, tau: &Morphism) -> usize {
    r_tau + tau.max_len() * (r_sigma + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{stable_language, DirectiveSequence};
    use crate::morphism::Alphabet;

    fn full_table(alphabet: &Alphabet, max_len: usize) -> LanguageTable {
        let mut words = BTreeSet::new();
        let mut layer: Vec<Word> = vec![vec![]];
        for _ in 0..max_len {
            layer = layer
                .iter()
                .flat_map(|w| {
                    (0..alphabet.len()).map(move |a| {
                        let mut w = w.clone();
                        w.push(a);
                        w
                    })
                })
                .collect();
            words.extend(layer.iter().cloned());
        }
        LanguageTable {
            level: 0,
            max_len,
            depth: 0,
            alphabet: alphabet.clone(),
            words,
            stabilized: true,
            monotone: true,
        }
    }

    fn fib() -> (Morphism, LanguageTable) {
        let s = Morphism::from_chars(&[("a", "ab"), ("b", "a")]).unwrap();
        let d = DirectiveSequence::stationary(s.clone()).unwrap();
        (s, stable_language(&d, 0, 12).unwrap())
    }

    #[test]
    fn equal_images_are_ambiguous() {
        let s = Morphism::from_chars(&[("a", "x"), ("b", "x")]).unwrap();
        let lx = full_table(s.source(), 6);
        let t = centered_interpretations(&s, &lx, 0).unwrap();
        assert_eq!(t[&vec![0]], BTreeSet::from([(0, 0), (0, 1)]));
        let report = recognizability_check(&s, &lx, 1).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        let (i, j) = report.witness.unwrap();
        assert_eq!(i.window, j.window);
        assert_ne!((i.offset, i.letter), (j.offset, j.letter));
        assert!(parse_window(&[0, 0, 0], &s, &lx).unwrap().len() >= 2);
    }

    #[test]
    fn fibonacci_radius_zero() {
        let (s, lx) = fib();
        let t = centered_interpretations(&s, &lx, 0).unwrap();
        assert_eq!(t[&vec![1]], BTreeSet::from([(1, 0)]));
        assert_eq!(t[&vec![0]].len(), 2);
        let report = minimal_constant(&s, &lx, 8).unwrap();
        assert_eq!(report.verdict, Verdict::RecognizableAtR);
        let parses = parse_window(&s.source().parse_word("aab").unwrap(), &s, &lx).unwrap();
        assert_eq!(parses.len(), 1);
        assert_eq!(parses[0].local_cuts, [-1, 0]);
        assert_eq!((parses[0].offset, parses[0].letter), (0, 0));
        assert!(parse_window(&[2, 2, 2], &s, &lx).unwrap().is_empty());
    }

    #[test]
    fn table_too_short() {
        let (s, _) = fib();
        let d = DirectiveSequence::stationary(s.clone()).unwrap();
        let lx = stable_language(&d, 0, 3).unwrap();
        assert!(matches!(
            recognizability_check(&s, &lx, 4),
            Err(Error::LanguageTooShallow { .. })
        ));
        assert_eq!(minimal_constant(&s, &lx, 64).unwrap().verdict, Verdict::UnknownAtCap);
    }
}
