//! Return-word codings of a subshift, alignment of one morphism through a
//! recognizable one, and recognizable towers assembled from both.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fingerprint::{self, Prefixes};
use crate::language::{contract, properize, stable_language, trim_letter_onto, ContractionRule, DirectiveSequence, LanguageTable};
use crate::morphism::{Alphabet, Letter, Morphism, Word};
use crate::recognize::{recognizability_check, Verdict, WindowIndex};
use crate::words;

/// Generator words are never grown past this many letters in total.
pub const GENERATOR_BUDGET: usize = 1 << 27;
/// Contraction stops once a composed image exceeds this many letters.
pub const CONTRACTION_BUDGET: usize = 1 << 20;

/// A union of cylinders `[u.v]`: positions preceded by `u` and followed by
/// `v` for some variant `(u, v)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Marker {
    pub variants: Vec<(Word, Word)>,
}

impl Marker {
    pub fn new(mut variants: Vec<(Word, Word)>) -> Result<Self> {
        if variants.is_empty() {
            return Err(Error::hypothesis("marker", "no variants"));
        }
        if variants.iter().any(|(u, v)| u.is_empty() && v.is_empty()) {
            return Err(Error::hypothesis("marker", "a variant is empty on both sides"));
        }
        variants.sort();
        variants.dedup();
        Ok(Marker { variants })
    }

    /// Parses `u.v` with either side possibly empty.
    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let (u, v) = text.trim().split_once('.').ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("marker `{text}` has no `.`"),
        })?;
        let side = |s: &str| {
            if s.is_empty() {
                Ok(Vec::new())
            } else {
                alphabet.parse_word(s)
            }
        };
        Marker::new(vec![(side(u)?, side(v)?)])
    }

    pub fn radius(&self) -> usize {
        self.variants.iter().map(|(u, v)| u.len().max(v.len())).max().unwrap_or(0)
    }

    fn left_reach(&self) -> usize {
        self.variants.iter().map(|(u, _)| u.len()).max().unwrap_or(0)
    }

    fn right_reach(&self) -> usize {
        self.variants.iter().map(|(_, v)| v.len()).max().unwrap_or(0)
    }

    /// Largest `ℓ` with every variant inside one `[u.v]`, `|u| = |v| = ℓ`.
    pub fn proper_len(&self) -> usize {
        let lefts: Vec<&Word> = self.variants.iter().map(|(u, _)| u).collect();
        let rights: Vec<&Word> = self.variants.iter().map(|(_, v)| v).collect();
        words::common_suffix_len(&lefts).min(words::common_prefix_len(&rights))
    }

    pub fn spell(&self, alphabet: &Alphabet) -> Vec<String> {
        self.variants
            .iter()
            .map(|(u, v)| format!("{}.{}", alphabet.spell(u), alphabet.spell(v)))
            .collect()
    }
}

/// Long words of a subshift's language standing in for its orbits, stored
/// as seeds and a morphism and expanded one at a time.
#[derive(Clone, Debug)]
pub struct Generator {
    map: Morphism,
    seeds: Vec<Word>,
    /// Horizon or lifted word length that produced the words.
    pub size: usize,
}

impl Generator {
    /// `σ_{[level, level+horizon)}(a)` for every letter `a`.
    pub fn expansions(d: &DirectiveSequence, level: usize, horizon: usize) -> Result<Self> {
        let map = d.compose_range(level, level + horizon)?;
        let seeds = (0..map.source().len()).map(|a| vec![a]).collect();
        Ok(Generator {
            map,
            seeds,
            size: horizon,
        })
    }

    /// `σ_{[level, from)}(w)` for every word `w` of length `len` in the
    /// stable language of level `from`.
    pub fn lifted(d: &DirectiveSequence, level: usize, from: usize, len: usize) -> Result<Self> {
        let table = stable_language(d, from, len)?;
        Ok(Generator {
            map: d.compose_range(level, from)?,
            seeds: table.of_len(len).into_iter().cloned().collect(),
            size: len,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.map.target()
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn word(&self, i: usize) -> Word {
        self.map.apply(&self.seeds[i])
    }

    pub fn total_len(&self) -> usize {
        self.seeds
            .iter()
            .map(|s| s.iter().map(|&a| self.map.len(a)).sum::<usize>())
            .sum()
    }
}

/// Where generator words come from, indexed by an increasing size.
#[derive(Clone, Copy, Debug)]
pub enum Source<'a> {
    Expansions { seq: &'a DirectiveSequence, level: usize },
    Lifted { seq: &'a DirectiveSequence, level: usize, from: usize },
}

impl Source<'_> {
    fn first(&self) -> usize {
        match self {
            Source::Expansions { .. } => 1,
            Source::Lifted { .. } => 5,
        }
    }

    /// First size whose coded words can reach length `len`.
    fn first_for(&self, len: usize) -> usize {
        match self {
            Source::Expansions { .. } => self.first(),
            Source::Lifted { .. } => self.first().max(len + 4),
        }
    }

    fn last(&self) -> usize {
        match *self {
            Source::Expansions { seq, level } => seq.depth().saturating_sub(level),
            Source::Lifted { .. } => 64,
        }
    }

    fn level(&self) -> usize {
        match *self {
            Source::Expansions { level, .. } | Source::Lifted { level, .. } => level,
        }
    }

    fn at(&self, size: usize) -> Result<Generator> {
        match *self {
            Source::Expansions { seq, level } => Generator::expansions(seq, level, size),
            Source::Lifted { seq, level, from } => Generator::lifted(seq, level, from, size),
        }
    }
}

/// Marker variants indexed by the fingerprint of `uv`.
type ByFingerprint = HashMap<u128, Vec<usize>>;

struct MarkerScan<'m> {
    marker: &'m Marker,
    left_reach: usize,
    right_reach: usize,
    /// Common suffix of the left sides and common prefix of the right sides,
    /// which every marker time must show.
    anchor: (usize, usize, u128),
    /// Fingerprints of `uv`, grouped by `(|u|, |v|)`.
    groups: Vec<((usize, usize), ByFingerprint)>,
}

impl<'m> MarkerScan<'m> {
    fn new(marker: &'m Marker) -> Self {
        let mut by_shape: HashMap<(usize, usize), ByFingerprint> = HashMap::new();
        for (i, (u, v)) in marker.variants.iter().enumerate() {
            let uv: Word = u.iter().chain(v).copied().collect();
            by_shape
                .entry((u.len(), v.len()))
                .or_default()
                .entry(fingerprint::of(&uv))
                .or_default()
                .push(i);
        }
        let mut groups: Vec<_> = by_shape.into_iter().collect();
        groups.sort_by_key(|(shape, _)| *shape);
        let lefts: Vec<&Word> = marker.variants.iter().map(|(u, _)| u).collect();
        let rights: Vec<&Word> = marker.variants.iter().map(|(_, v)| v).collect();
        let (cl, cr) = (words::common_suffix_len(&lefts), words::common_prefix_len(&rights));
        let (u0, v0) = &marker.variants[0];
        let anchor: Word = u0[u0.len() - cl..].iter().chain(&v0[..cr]).copied().collect();
        MarkerScan {
            marker,
            left_reach: marker.left_reach(),
            right_reach: marker.right_reach(),
            anchor: (cl, cr, fingerprint::of(&anchor)),
            groups,
        }
    }

    /// Marker times of `word` whose every variant window fits inside it.
    fn times(&self, word: &[Letter], prefixes: &Prefixes) -> Vec<usize> {
        let (lu, lv) = (self.left_reach, self.right_reach);
        if word.len() < lu + lv {
            return Vec::new();
        }
        let (cl, cr, anchor) = self.anchor;
        (lu..=word.len() - lv)
            .filter(|&k| {
                (cl + cr == 0 || prefixes.get(k - cl, cl + cr) == anchor)
                    && self.groups.iter().any(|&((a, b), ref table)| {
                        table.get(&prefixes.get(k - a, a + b)).is_some_and(|ids| {
                            ids.iter().any(|&i| {
                                let (u, v) = &self.marker.variants[i];
                                word[k - a..k] == u[..] && word[k..k + b] == v[..]
                            })
                        })
                    })
            })
            .collect()
    }
}

/// Return words indexed in first-occurrence order.
#[derive(Default)]
struct Codebook {
    words: Vec<Word>,
    index: HashMap<u128, usize>,
}

impl Codebook {
    fn get(&self, w: &[Letter]) -> Option<usize> {
        let i = *self.index.get(&fingerprint::of(w))?;
        (self.words[i] == w).then_some(i)
    }

    fn insert(&mut self, w: &[Letter]) -> (usize, bool) {
        match self.get(w) {
            Some(i) => (i, false),
            None => {
                self.index.insert(fingerprint::of(w), self.words.len());
                self.words.push(w.to_vec());
                (self.words.len() - 1, true)
            }
        }
    }
}

/// One pass over a generator.
struct Scan {
    coded: Vec<Word>,
    new_words: usize,
    min_gap: usize,
    max_gap: usize,
    occurrences: usize,
    /// `(length, least period)` of each generator word.
    periods: Vec<(usize, usize)>,
    /// Concatenated return words reproduce each scanned segment.
    decoded: bool,
    /// Cut positions of the coded words equal the marker times.
    cuts_agree: bool,
}

fn scan(generator: &Generator, marker: &MarkerScan<'_>, book: &mut Codebook) -> Result<Scan> {
    let mut out = Scan {
        coded: Vec::with_capacity(generator.len()),
        new_words: 0,
        min_gap: usize::MAX,
        max_gap: 0,
        occurrences: 0,
        periods: Vec::with_capacity(generator.len()),
        decoded: true,
        cuts_agree: true,
    };
    let reach = marker.left_reach + marker.right_reach;
    for i in 0..generator.len() {
        let g = generator.word(i);
        let prefixes = Prefixes::new(&g);
        let t = marker.times(&g, &prefixes);
        if t.is_empty() && g.len() > reach {
            return Err(Error::MarkerNotSyndetic {
                horizon: generator.size,
            });
        }
        let mut z = Vec::with_capacity(t.len().saturating_sub(1));
        for w in t.windows(2) {
            let gap = w[1] - w[0];
            out.min_gap = out.min_gap.min(gap);
            out.max_gap = out.max_gap.max(gap);
            let (c, fresh) = book.insert(&g[w[0]..w[1]]);
            out.new_words += fresh as usize;
            z.push(c);
        }
        if let Some(&start) = t.first() {
            let mut at = start;
            for (j, &c) in z.iter().enumerate() {
                let w = &book.words[c];
                out.decoded &= g[at..at + w.len()] == w[..];
                at += w.len();
                out.cuts_agree &= at == t[j + 1];
            }
        }
        out.occurrences += t.len();
        out.periods.push((g.len(), words::least_period(&g)?));
        out.coded.push(z);
    }
    if out.occurrences < 3 || book.words.is_empty() {
        return Err(Error::MarkerNotSyndetic {
            horizon: generator.size,
        });
    }
    Ok(out)
}

/// Words read between consecutive marker times along generator words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReturnWords {
    pub words: Vec<Word>,
    pub max_gap: usize,
    pub min_gap: usize,
    pub occurrences: usize,
    pub horizon: usize,
    /// Same set of return words at `horizon - 1`.
    pub stabilized: bool,
}

/// Return words to `marker` on the expansions `σ_{[level, level+horizon)}(a)`.
pub fn return_words(d: &DirectiveSequence, level: usize, marker: &Marker, horizon: usize) -> Result<ReturnWords> {
    let marker_scan = MarkerScan::new(marker);
    let mut book = Codebook::default();
    let here = scan(&Generator::expansions(d, level, horizon)?, &marker_scan, &mut book)?;
    let stabilized = horizon > 1 && {
        let mut before = Codebook::default();
        Generator::expansions(d, level, horizon - 1)
            .and_then(|g| scan(&g, &marker_scan, &mut before))
            .map(|_| before.words.iter().collect::<BTreeSet<_>>() == book.words.iter().collect::<BTreeSet<_>>())
            .unwrap_or(false)
    };
    Ok(ReturnWords {
        words: book.words,
        max_gap: here.max_gap,
        min_gap: here.min_gap,
        occurrences: here.occurrences,
        horizon,
        stabilized,
    })
}

/// A named pass/fail check with what was measured.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Certificate {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Certificate {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

/// A recognizable coding `τ: C⁺ → B⁺` of a subshift by its return words.
#[derive(Clone, Debug, Serialize)]
pub struct ReturnCoding {
    pub tau: Morphism,
    /// Language of the coded subshift, long enough for `constant`.
    #[serde(skip)]
    pub language: LanguageTable,
    pub marker_radius: usize,
    pub max_gap: usize,
    pub min_gap: usize,
    /// Least period among language words of length `proper_len`.
    pub separation: usize,
    pub proper_len: usize,
    /// `marker_radius + max_gap`.
    pub bound: usize,
    /// Radius at which recognizability was verified, at most `bound`.
    pub constant: usize,
    pub generator_size: usize,
    pub certificates: Vec<Certificate>,
}

fn factors_up_to(coded: &[Word], max_len: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for w in coded {
        for len in 1..=max_len.min(w.len()) {
            for f in w.windows(len) {
                if !out.contains(f) {
                    out.insert(f.to_vec());
                }
            }
        }
    }
    out
}

/// Least period among the distinct factors of length `len`.
fn factor_period(generator: &Generator, len: usize) -> Result<Option<usize>> {
    let mut seen = HashSet::new();
    let mut best: Option<usize> = None;
    for i in 0..generator.len() {
        let g = generator.word(i);
        if g.len() < len {
            continue;
        }
        let p = Prefixes::new(&g);
        for s in 0..=g.len() - len {
            if seen.insert(p.get(s, len)) {
                let q = words::least_period(&g[s..s + len])?;
                best = Some(best.map_or(q, |b| b.min(q)));
            }
        }
    }
    Ok(best)
}

/// Largest radius whose covering length is at most `len`.
fn radius_for(tau: &Morphism, len: usize) -> Option<usize> {
    let span = (len.checked_sub(2)?) * tau.min_len();
    span.checked_sub(1).map(|s| s / 2)
}

/// Scans of growing generators sharing one codebook.
struct Coder<'a, 'm> {
    source: Source<'a>,
    marker: MarkerScan<'m>,
    book: Codebook,
    scans: std::collections::BTreeMap<usize, Scan>,
}

impl<'a, 'm> Coder<'a, 'm> {
    fn new(source: Source<'a>, marker: &'m Marker) -> Self {
        Coder {
            source,
            marker: MarkerScan::new(marker),
            book: Codebook::default(),
            scans: Default::default(),
        }
    }

    fn scan_at(&mut self, size: usize) -> Result<&Scan> {
        if !self.scans.contains_key(&size) {
            if size > self.source.last() {
                return Err(Error::NotStabilized {
                    level: self.source.level(),
                    max_len: 0,
                    depth: size,
                });
            }
            let generator = self.source.at(size)?;
            if generator.total_len() > GENERATOR_BUDGET {
                return Err(Error::NotStabilized {
                    level: self.source.level(),
                    max_len: 0,
                    depth: size,
                });
            }
            let s = scan(&generator, &self.marker, &mut self.book)?;
            self.scans.insert(size, s);
        }
        Ok(&self.scans[&size])
    }

    /// Smallest size from which consecutive scans find no new return word
    /// and some generator word of length above `2d` has been seen.
    fn stable_size(&mut self, from: usize) -> Result<usize> {
        let mut size = from.max(self.source.first());
        let last = self.source.last();
        let mut streak = 0;
        loop {
            match self.scan_at(size) {
                Err(Error::MarkerNotSyndetic { .. }) if size < last => {
                    streak = 0;
                    size += 1;
                    continue;
                }
                Err(e) => return Err(e),
                Ok(s) => {
                    streak = if s.new_words == 0 { streak + 1 } else { 0 };
                }
            }
            let d = self.max_gap();
            let long_enough = self.scans[&size].periods.iter().any(|&(len, _)| len > 2 * d);
            if streak >= 1 && long_enough {
                return Ok(size);
            }
            size += 1;
        }
    }

    fn max_gap(&self) -> usize {
        self.book.words.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn min_gap(&self) -> usize {
        self.book.words.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Coded language up to `len`, equal on two consecutive sizes, or the
    /// size at which the codebook grew.
    fn language(&mut self, len: usize, from: usize, codes: &Alphabet) -> Result<std::result::Result<(LanguageTable, usize), usize>> {
        let known = self.book.words.len();
        let mut size = from.max(self.source.first_for(len));
        loop {
            let before = factors_up_to(&self.scan_at(size)?.coded, len);
            let long = self.scans[&size].coded.iter().any(|z| z.len() > len);
            let here = factors_up_to(&self.scan_at(size + 1)?.coded, len);
            if self.book.words.len() != known {
                return Ok(Err(size + 1));
            }
            if long && before == here {
                let table = LanguageTable {
                    level: self.source.level(),
                    max_len: len,
                    depth: size + 1,
                    alphabet: codes.clone(),
                    words: here,
                    stabilized: true,
                    monotone: true,
                };
                return Ok(Ok((table, size + 1)));
            }
            size += 1;
        }
    }
}

fn code_alphabet(count: usize) -> Result<Alphabet> {
    Alphabet::new((1..=count).map(|i| i.to_string()))
}

/// Codes the subshift generated by `source` by its return words to
/// `marker`, growing the generator until the return words and the coded
/// language stabilize, then checks the four certificates.
///
/// Recognizability is verified at the first radius that passes as the coded
/// table grows; that radius never exceeds `marker_radius + max_gap`.
pub fn build_return_coding(source: Source<'_>, marker: &Marker) -> Result<ReturnCoding> {
    let mut coder = Coder::new(source, marker);
    let mut from = source.first();
    loop {
        let stable = coder.stable_size(from)?;
        match code_at(&mut coder, source, marker, stable)? {
            Ok(coding) => return Ok(coding),
            Err(grown) => from = grown + 1,
        }
    }
}

fn code_at(coder: &mut Coder<'_, '_>, source: Source<'_>, marker: &Marker, stable: usize) -> Result<std::result::Result<ReturnCoding, usize>> {
    let d = coder.max_gap();
    let period = coder.scans[&stable]
        .periods
        .iter()
        .filter(|&&(len, _)| len > 2 * d)
        .map(|&(_, p)| p)
        .min()
        .unwrap_or(0);
    if period <= d {
        return Err(Error::Separation { period, gap: d });
    }
    let ell = marker.proper_len();
    let separation = if ell == 0 {
        1
    } else {
        factor_period(&source.at(stable)?, ell)?.unwrap_or(1)
    };

    let codes = code_alphabet(coder.book.words.len())?;
    let tau = Morphism::new(codes.clone(), source.at(stable)?.alphabet().clone(), coder.book.words.clone())?;
    let r = marker.radius();
    let bound = r + d;
    let mut len = 3;
    let (constant, language, report, size) = loop {
        let radius = radius_for(&tau, len).unwrap_or(0).min(bound);
        let (table, size) = match coder.language(len, stable, &codes)? {
            Ok(found) => found,
            Err(grown) => return Ok(Err(grown)),
        };
        let report = recognizability_check(&tau, &table, radius)?;
        if report.verdict == Verdict::RecognizableAtR || radius == bound {
            break (radius, table, report, size);
        }
        len += 1;
    };

    let used: Vec<&Scan> = coder.scans.values().collect();
    let min_gap = coder.min_gap();
    let occurrences: usize = used.iter().map(|s| s.occurrences).sum();
    let mut certificates = vec![Certificate::new(
        "language_reproduction",
        used.iter().all(|s| s.decoded),
        format!("{} scans decode to their generator segments", used.len()),
    )];
    certificates.push(Certificate::new(
        "recognizability",
        report.verdict == Verdict::RecognizableAtR,
        format!("radius {constant} (bound {bound}), {} windows", report.table_size),
    ));
    let radius = separation.min(ell);
    let lengths_ok = tau.max_len() <= d && tau.min_len() >= separation && min_gap >= separation && tau.is_r_proper(radius);
    certificates.push(Certificate::new(
        "lengths",
        lengths_ok,
        format!(
            "|tau| = {}, d = {d}, <tau> = {}, rho = {separation}, {radius}-proper: {}",
            tau.max_len(),
            tau.min_len(),
            tau.is_r_proper(radius)
        ),
    ));
    certificates.push(Certificate::new(
        "cuts",
        used.iter().all(|s| s.cuts_agree),
        format!("{occurrences} marker times agree with cuts"),
    ));
    fail_first(&certificates)?;
    Ok(Ok(ReturnCoding {
        tau,
        language,
        marker_radius: r,
        max_gap: d,
        min_gap,
        separation,
        proper_len: ell,
        bound,
        constant,
        generator_size: size,
        certificates,
    }))
}

/// Coded language of an existing coding up to `len`.
pub fn coded_language(source: Source<'_>, marker: &Marker, coding: &ReturnCoding, len: usize) -> Result<LanguageTable> {
    let mut coder = Coder::new(source, marker);
    for w in coding.tau.images() {
        coder.book.insert(w);
    }
    let codes = coding.tau.source().clone();
    match coder.language(len, source.first(), &codes)? {
        Ok((table, _)) => Ok(table),
        Err(size) => Err(Error::NotStabilized {
            level: source.level(),
            max_len: len,
            depth: size,
        }),
    }
}

fn certificate_name(name: &str) -> &'static str {
    match name {
        "language_reproduction" => "language_reproduction",
        "recognizability" => "recognizability",
        "lengths" => "lengths",
        "cuts" => "cuts",
        _ => "tower",
    }
}

fn fail_first(certificates: &[Certificate]) -> Result<()> {
    match certificates.iter().find(|c| !c.passed) {
        None => Ok(()),
        Some(c) => Err(Error::Certificate {
            name: certificate_name(&c.name),
            detail: c.detail.clone(),
        }),
    }
}

/// The morphism `ν` with `σ₁ = σ₀ν`, read off by parsing each padded image
/// `v.σ₁(a)u` with the radius-`reco_r` windows of `σ₀` on `lx0`.
pub fn align_through(sigma0: &Morphism, lx0: &LanguageTable, reco_r: usize, sigma1: &Morphism) -> Result<Morphism> {
    if !sigma0.target().same_letters(sigma1.target()) {
        return Err(Error::AlphabetMismatch {
            expected: sigma0.target().to_string(),
            found: sigma1.target().to_string(),
        });
    }
    let sigma1 = sigma1.with_target_order(sigma0.target())?;
    if !sigma1.is_r_proper(reco_r) {
        return Err(Error::hypothesis(
            "align_through",
            format!("second morphism is not {reco_r}-proper"),
        ));
    }
    let index = WindowIndex::build(sigma0, lx0, reco_r)?;
    let first = sigma1.image(0);
    let head = &first[..reco_r];
    let tail = &first[first.len() - reco_r..];
    let width = 2 * reco_r + 1;
    let mut images = Vec::with_capacity(sigma1.source().len());
    for a in 0..sigma1.source().len() {
        let fail = |detail: String| Error::CutContainment {
            letter: sigma1.source().name(a).to_string(),
            detail,
        };
        let image = sigma1.image(a);
        let padded: Word = tail.iter().chain(image).chain(head).copied().collect();
        let mut letters = Vec::new();
        let mut p = 0;
        while p < image.len() {
            let symbols = index
                .symbols(&padded[p..p + width])
                .ok_or_else(|| fail(format!("window at {p} does not occur")))?;
            if symbols.len() > 1 {
                return Err(fail(format!("window at {p} has {} readings", symbols.len())));
            }
            let &(offset, c) = symbols.iter().next().expect("nonempty");
            if offset != 0 {
                return Err(fail(format!("position {p} is not a cut")));
            }
            letters.push(c);
            p += sigma0.len(c);
        }
        if p != image.len() {
            return Err(fail(format!("last block overruns the image by {}", p - image.len())));
        }
        images.push(letters);
    }
    let nu = Morphism::new(sigma1.source().clone(), sigma0.source().clone(), images)?;
    if !Morphism::compose(sigma0, &nu)?.same_as(&sigma1) {
        return Err(Error::Certificate {
            name: "align_recomposition",
            detail: "σ₀ν differs from σ₁".into(),
        });
    }
    if !nu.is_proper() {
        return Err(Error::Certificate {
            name: "align_proper",
            detail: nu.rule_strings().join(", "),
        });
    }
    if !nu.is_letter_onto() {
        return Err(Error::Certificate {
            name: "align_letter_onto",
            detail: nu.rule_strings().join(", "),
        });
    }
    Ok(nu)
}

/// One level `n` of a recognizable tower.
#[derive(Clone, Debug, Serialize)]
pub struct TowerLevel {
    pub n: usize,
    /// Return coding `ν_n` onto the base alphabet.
    pub nu: Morphism,
    /// `τ_n` with `ν_n τ_n = ν_{n+1}`, absent on the top level.
    pub tau: Option<Morphism>,
    /// `φ_n` with `σ_{[0,n+1)} = ν_n φ_n`.
    pub phi: Morphism,
    pub constant: usize,
    pub tau_constant: Option<usize>,
    pub return_words: usize,
    pub marker_variants: usize,
    pub language_len: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tower {
    #[serde(skip)]
    pub sequence: DirectiveSequence,
    /// Cut points of the contraction.
    pub cuts: Vec<usize>,
    pub properized: bool,
    pub levels: Vec<TowerLevel>,
    /// Whether each contracted level is positive.
    pub positive: Vec<bool>,
    pub certificates: Vec<Certificate>,
}

impl Tower {
    pub fn all_passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed)
    }

    /// Writes `nu_n.mor`, `tau_n.mor`, `phi_n.mor` and `certificates.json`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Io(e.to_string());
        std::fs::create_dir_all(dir).map_err(io)?;
        for level in &self.levels {
            let n = level.n;
            std::fs::write(dir.join(format!("nu_{n}.mor")), level.nu.to_text()).map_err(io)?;
            std::fs::write(dir.join(format!("phi_{n}.mor")), level.phi.to_text()).map_err(io)?;
            if let Some(tau) = &level.tau {
                std::fs::write(dir.join(format!("tau_{n}.mor")), tau.to_text()).map_err(io)?;
            }
        }
        let value = serde_json::to_value(self).map_err(|e| Error::Internal(e.to_string()))?;
        let text = serde_json::to_string_pretty(&value).map_err(|e| Error::Internal(e.to_string()))?;
        std::fs::write(dir.join("certificates.json"), text + "\n").map_err(io)
    }
}

fn min_image_period(s: &Morphism) -> usize {
    s.images()
        .iter()
        .filter_map(|w| words::least_period(w).ok())
        .min()
        .unwrap_or(0)
}

/// Greedy cut points `0, 1, c_2, …` such that `S_n = σ_{[0,c_n)}` has image
/// periods and properness radius at least `3|S_{n-1}|` for `n` in `2..=top`.
fn growth_cuts(seq: &DirectiveSequence, top: usize) -> Result<Vec<usize>> {
    let mut cuts = vec![0, 1];
    let mut prev = seq.compose_range(0, 1)?;
    for n in 2..=top {
        let bound = 3 * prev.max_len();
        let (c, s) = extend_until(seq, &prev, cuts[n - 1], n, bound, true)?;
        cuts.push(c);
        prev = s;
    }
    Ok(cuts)
}

/// Composes further levels onto `prefix = σ_{[0,start)}` until its properness
/// radius, and its image periods when `periods` is set, reach `bound`.
fn extend_until(
    seq: &DirectiveSequence,
    prefix: &Morphism,
    start: usize,
    n: usize,
    bound: usize,
    periods: bool,
) -> Result<(usize, Morphism)> {
    let mut c = start;
    let mut s = prefix.clone();
    loop {
        s = Morphism::compose(&s, seq.level(c)?)?;
        c += 1;
        let period = if periods { min_image_period(&s) } else { usize::MAX };
        let radius = s.properness_radius();
        if period >= bound && radius >= bound {
            return Ok((c, s));
        }
        if c >= seq.depth() || s.max_len() > CONTRACTION_BUDGET {
            let period = if periods { period.to_string() } else { "unchecked".into() };
            return Err(Error::ContractionBudget {
                detail: format!("level {n} after {c} steps: period {period}, properness radius {radius}, need {bound}"),
            });
        }
    }
}

/// First radius at which `sigma` is recognizable on a coded table grown
/// one length at a time, up to `max_len`.
fn certify_radius(
    sigma: &Morphism,
    mut table: impl FnMut(usize) -> Result<LanguageTable>,
    max_len: usize,
) -> Result<Option<(usize, usize)>> {
    for len in 3..=max_len {
        let Some(radius) = radius_for(sigma, len) else { continue };
        let lx = table(len)?;
        let report = recognizability_check(sigma, &lx, radius)?;
        if report.verdict == Verdict::RecognizableAtR {
            return Ok(Some((radius, report.table_size)));
        }
    }
    Ok(None)
}

/// Longest coded table tried when certifying a connecting map.
const CONNECTING_TABLE_CAP: usize = 24;

/// Contracts `d` and codes it into a proper, letter-onto, recognizable tower
/// `ν_n` (`n = 2..=m_levels+1`) with connecting maps `τ_n` and factor maps
/// `φ_n`, checking every identity letterwise.
pub fn recognizable_tower(d: &DirectiveSequence, m_levels: usize) -> Result<Tower> {
    if m_levels == 0 {
        return Err(Error::hypothesis("recognizable_tower", "need at least one level"));
    }
    let trimmed = trim_letter_onto(d, d.depth())?;
    let properized = !trimmed.listed().iter().all(Morphism::is_proper);
    let seq = if properized {
        properize(&trimmed, ContractionRule::SharedAnchor)?.sequence
    } else {
        trimmed
    };
    let top = m_levels + 1;
    let mut cuts = growth_cuts(&seq, top)?;
    let mut prefixes = cuts
        .iter()
        .map(|&c| seq.compose_range(0, c))
        .collect::<Result<Vec<_>>>()?;

    let mut markers = Vec::new();
    let mut codings = Vec::new();
    for n in 2..=top {
        let s = &prefixes[n];
        let pairs = stable_language(&seq, cuts[n], 4)?;
        let marker = Marker::new(
            pairs
                .of_len(4)
                .into_iter()
                .map(|w| (s.apply(&w[..2]), s.apply(&w[2..])))
                .collect(),
        )?;
        let source = Source::Lifted {
            seq: &seq,
            level: 0,
            from: cuts[n],
        };
        codings.push(build_return_coding(source, &marker)?);
        markers.push(marker);
    }
    let top_constant = codings.last().expect("one level").constant;
    let (c, s) = extend_until(&seq, &prefixes[top], cuts[top], top + 1, top_constant, false)?;
    cuts.push(c);
    prefixes.push(s);

    let mut certificates = Vec::new();
    let mut levels = Vec::new();
    for (i, n) in (2..=top).enumerate() {
        let here = &codings[i];
        let phi = align_through(&here.tau, &here.language, here.constant, &prefixes[n + 1])?;
        let mut tau = None;
        let mut tau_constant = None;
        if let Some(next) = codings.get(i + 1) {
            let t = align_through(&here.tau, &here.language, here.constant, &next.tau)?;
            let source = Source::Lifted {
                seq: &seq,
                level: 0,
                from: cuts[n + 1],
            };
            let found = certify_radius(
                &t,
                |len| {
                    if len <= next.language.max_len {
                        Ok(next.language.clone())
                    } else {
                        coded_language(source, &markers[i + 1], next, len)
                    }
                },
                CONNECTING_TABLE_CAP,
            )?;
            let Some((radius, windows)) = found else {
                return Err(Error::Certificate {
                    name: "tower_recognizability",
                    detail: format!("level {n}: τ not recognizable on coded tables up to length {CONNECTING_TABLE_CAP}"),
                });
            };
            certificates.push(Certificate::new(
                &format!("tau_{n}_recognizable"),
                true,
                format!("radius {radius}, {windows} windows"),
            ));
            tau_constant = Some(radius);
            tau = Some(t);
        }
        for c in &here.certificates {
            certificates.push(Certificate::new(&format!("nu_{n}_{}", c.name), c.passed, c.detail.clone()));
        }
        levels.push(TowerLevel {
            n,
            nu: here.tau.clone(),
            tau,
            phi,
            constant: here.constant,
            tau_constant,
            return_words: here.tau.source().len(),
            marker_variants: markers[i].variants.len(),
            language_len: here.language.max_len,
        });
    }

    for (i, level) in levels.iter().enumerate() {
        let n = level.n;
        let check = |name: String, ok: bool, certificates: &mut Vec<Certificate>| -> Result<()> {
            certificates.push(Certificate::new(&name, ok, if ok { "letterwise" } else { "differs" }));
            if ok {
                Ok(())
            } else {
                Err(Error::Commutation { level: n, identity: name })
            }
        };
        let composed = Morphism::compose(&level.nu, &level.phi)?;
        check(format!("sigma_0_{}_eq_nu_phi", n + 1), composed.same_as(&prefixes[n + 1]), &mut certificates)?;
        if let (Some(tau), Some(next)) = (&level.tau, levels.get(i + 1)) {
            check(
                format!("nu_{n}_tau_{n}_eq_nu_{}", n + 1),
                Morphism::compose(&level.nu, tau)?.same_as(&next.nu),
                &mut certificates,
            )?;
            let step = seq.compose_range(cuts[n + 1], cuts[n + 2])?;
            let left = Morphism::compose(&level.phi, &step)?;
            let right = Morphism::compose(tau, &next.phi)?;
            check(format!("phi_{n}_square"), left.same_as(&right), &mut certificates)?;
            check(
                format!("tau_{n}_proper_letter_onto"),
                tau.is_proper() && tau.is_letter_onto(),
                &mut certificates,
            )?;
        }
    }

    let sequence = contract(&seq, &cuts)?;
    let positive = sequence.listed().iter().map(Morphism::is_positive).collect();
    Ok(Tower {
        sequence,
        cuts,
        properized,
        levels,
        positive,
        certificates,
    })
}

/// `i_σ(a) = a^{|σ(a)|}` on the source alphabet of `σ`.
pub fn inflate(sigma: &Morphism) -> Morphism {
    let images = (0..sigma.source().len()).map(|a| vec![a; sigma.len(a)]).collect();
    Morphism::new(sigma.source().clone(), sigma.source().clone(), images).expect("nonempty images over the source alphabet")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn marker(d: &DirectiveSequence, text: &str) -> Marker {
        Marker::parse(d.alphabet(0).unwrap(), text).unwrap()
    }

    #[test]
    fn fibonacci_return_words() {
        let d = corpus::load("fibonacci").unwrap();
        let rw = return_words(&d, 0, &marker(&d, ".a"), 8).unwrap();
        let spelled: BTreeSet<String> = rw.words.iter().map(|w| d.alphabet(0).unwrap().spell(w)).collect();
        assert_eq!(spelled, BTreeSet::from(["a".to_string(), "ab".to_string()]));
        assert!(rw.stabilized);
        assert_eq!((rw.min_gap, rw.max_gap), (1, 2));
    }

    #[test]
    fn fibonacci_coding_certificates() {
        let d = corpus::load("fibonacci").unwrap();
        let m = marker(&d, ".a");
        let c = build_return_coding(Source::Expansions { seq: &d, level: 0 }, &m).unwrap();
        assert_eq!(c.tau.source().len(), 2);
        assert_eq!(c.certificates.len(), 4);
        assert!(c.certificates.iter().all(|c| c.passed));
        assert_eq!(c.constant, 1);
    }

    #[test]
    fn periodic_fails_separation() {
        let s = Morphism::from_chars(&[("a", "aa")]).unwrap();
        let d = DirectiveSequence::stationary(s).unwrap();
        let m = marker(&d, ".a");
        let err = build_return_coding(Source::Expansions { seq: &d, level: 0 }, &m).unwrap_err();
        assert!(matches!(err, Error::Separation { .. }), "{err}");
    }

    #[test]
    fn align_recovers_known_factor() {
        let d = corpus::load("fibonacci").unwrap();
        let seq = properize(&d, ContractionRule::SharedAnchor).unwrap().sequence;
        let outer = seq.compose_range(0, 2).unwrap();
        let inner = seq.compose_range(2, 5).unwrap();
        let whole = Morphism::compose(&outer, &inner).unwrap();
        let lx = stable_language(&seq, 2, 16).unwrap();
        let report = crate::recognize::minimal_constant(&outer, &lx, 64).unwrap();
        assert_eq!(report.verdict, Verdict::RecognizableAtR);
        let nu = align_through(&outer, &lx, report.radius, &whole).unwrap();
        assert!(nu.same_as(&inner));
    }

    #[test]
    fn align_rejects_improper_target() {
        let d = corpus::load("fibonacci").unwrap();
        let s = d.level(0).unwrap();
        let lx = stable_language(&d, 0, 12).unwrap();
        let s2 = Morphism::compose(s, s).unwrap();
        assert!(align_through(s, &lx, 1, &s2).is_err());
    }

    #[test]
    fn fibonacci_tower() {
        let d = corpus::load("fibonacci").unwrap();
        let t = recognizable_tower(&d, 2).unwrap();
        assert!(t.properized);
        assert_eq!(t.cuts, vec![0, 1, 3, 5, 7]);
        assert!(t.all_passed());
        let sizes: Vec<usize> = t.levels.iter().map(|l| l.nu.source().len()).collect();
        assert_eq!(sizes, vec![2, 2]);
        let dir = std::env::temp_dir().join(format!("sadic-tower-{}", std::process::id()));
        t.write_dir(&dir).unwrap();
        assert!(dir.join("certificates.json").exists());
        assert!(dir.join("nu_2.mor").exists());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn inflation_preserves_lengths() {
        let s = Morphism::from_chars(&[("a", "ab"), ("b", "a")]).unwrap();
        let i = inflate(&s);
        assert_eq!(i.rule_strings(), ["a -> a a", "b -> b"]);
    }
}
