//! Directive sequences and finite-depth approximations of their level
//! languages.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::morphism::{Alphabet, Letter, Morphism, Word};
use crate::words;

/// Materialization cap for sequences with a repeat rule.
pub const DEFAULT_DEPTH_CAP: usize = 32;

/// How levels continue past the listed ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Repeat {
    None,
    /// The last listed level repeats forever.
    Stationary,
    /// The last `k` listed levels repeat cyclically.
    Cycle(usize),
}

impl fmt::Display for Repeat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Repeat::None => write!(f, "none"),
            Repeat::Stationary => write!(f, "stationary"),
            Repeat::Cycle(k) => write!(f, "cycle {k}"),
        }
    }
}

/// `σ_n: A_{n+1} → A_n` for `n = 0, 1, …`, listed explicitly up to some
/// point and continued by a [`Repeat`] rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectiveSequence {
    levels: Vec<Morphism>,
    repeat: Repeat,
    cap: usize,
    name: Option<String>,
}

impl DirectiveSequence {
    /// Checks that consecutive alphabets agree and reorders each target
    /// alphabet to match the next level's source.
    pub fn new(levels: Vec<Morphism>, repeat: Repeat) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "directive sequence has no levels".into(),
            });
        }
        let len = levels.len();
        let wrap = match repeat {
            Repeat::None => None,
            Repeat::Stationary => Some(len - 1),
            Repeat::Cycle(k) if k >= 1 && k <= len => Some(len - k),
            Repeat::Cycle(k) => {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("cycle length {k} outside 1..={len}"),
                })
            }
        };
        let mismatch = |expected: &Alphabet, found: &Alphabet| Error::AlphabetMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        };
        let mut out = levels;
        for n in 1..len {
            let source = out[n - 1].source().clone();
            out[n] = out[n]
                .with_target_order(&source)
                .map_err(|_| mismatch(&source, out[n].target()))?;
        }
        if let Some(m) = wrap {
            let target = out[m].target().clone();
            out[len - 1] = out[len - 1]
                .with_source_order(&target)
                .map_err(|_| mismatch(&target, out[len - 1].source()))?;
        }
        Ok(DirectiveSequence {
            levels: out,
            repeat,
            cap: DEFAULT_DEPTH_CAP,
            name: None,
        })
    }

    pub fn stationary(sigma: Morphism) -> Result<Self> {
        Self::new(vec![sigma], Repeat::Stationary)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap.max(1);
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn repeat(&self) -> Repeat {
        self.repeat
    }

    pub fn listed(&self) -> &[Morphism] {
        &self.levels
    }

    /// Number of levels that may be materialized.
    pub fn depth(&self) -> usize {
        match self.repeat {
            Repeat::None => self.levels.len(),
            _ => self.cap.max(self.levels.len()),
        }
    }

    /// `σ_n`.
    pub fn level(&self, n: usize) -> Result<&Morphism> {
        if n >= self.depth() {
            return Err(Error::InsufficientLevels {
                requested: n + 1,
                available: self.depth(),
            });
        }
        let len = self.levels.len();
        let idx = if n < len {
            n
        } else {
            match self.repeat {
                Repeat::None => unreachable!("bounded by depth"),
                Repeat::Stationary => len - 1,
                Repeat::Cycle(k) => len - k + (n - len) % k,
            }
        };
        Ok(&self.levels[idx])
    }

    /// `A_n`, for `n <= depth`.
    pub fn alphabet(&self, n: usize) -> Result<&Alphabet> {
        if n == self.depth() {
            return Ok(self.level(n - 1)?.source());
        }
        Ok(self.level(n)?.target())
    }

    /// `σ_{[n,m)} = σ_n ∘ … ∘ σ_{m-1}`, the identity on `A_n` when `n = m`.
    pub fn compose_range(&self, n: usize, m: usize) -> Result<Morphism> {
        if n > m {
            return Err(Error::Internal(format!("empty range {n}..{m}")));
        }
        if m > self.depth() {
            return Err(Error::InsufficientLevels {
                requested: m,
                available: self.depth(),
            });
        }
        let mut acc = Morphism::identity(self.alphabet(m)?);
        for k in (n..m).rev() {
            acc = Morphism::compose(self.level(k)?, &acc)?;
        }
        Ok(acc)
    }

    /// Minimum of `#A_n` over materialized levels `n >= 1` up to `depth`.
    pub fn prefix_alphabet_rank(&self, depth: usize) -> Result<usize> {
        let depth = depth.min(self.depth());
        (1..=depth.max(1))
            .map(|n| self.alphabet(n).map(Alphabet::len))
            .try_fold(usize::MAX, |acc, len| Ok(acc.min(len?)))
    }

    /// Parses sections in the morphism format separated by `---` lines, with
    /// optional `name:` and `repeat:` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections = vec![String::new()];
        let mut repeat = Repeat::None;
        let mut name = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line == "---" {
                sections.push(String::new());
            } else if let Some(rest) = line.strip_prefix("repeat:") {
                repeat = parse_repeat(rest.trim()).ok_or_else(|| Error::Parse {
                    line: i + 1,
                    message: format!("unknown repeat rule `{}`", rest.trim()),
                })?;
            } else if let Some(rest) = line.strip_prefix("name:") {
                name = Some(rest.trim().to_string());
            } else {
                let current = sections.last_mut().expect("nonempty");
                // keep line numbers stable for error messages
                current.push_str(raw);
                current.push('\n');
            }
        }
        let levels = sections
            .iter()
            .filter(|s| s.lines().any(|l| !l.split('#').next().unwrap_or("").trim().is_empty()))
            .map(|s| Morphism::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Self::new(levels, repeat)?;
        out.name = name;
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            out.push_str(&format!("name: {name}\n"));
        }
        let sections: Vec<String> = self.levels.iter().map(Morphism::to_text).collect();
        out.push_str(&sections.join("---\n"));
        if self.repeat != Repeat::None {
            out.push_str(&format!("repeat: {}\n", self.repeat));
        }
        out
    }
}

fn parse_repeat(text: &str) -> Option<Repeat> {
    let mut parts = text.split_whitespace();
    let out = match parts.next()? {
        "none" => Repeat::None,
        "stationary" => Repeat::Stationary,
        "cycle" => Repeat::Cycle(parts.next()?.parse().ok()?),
        _ => return None,
    };
    parts.next().is_none().then_some(out)
}

/// Factors of length at most `max_len` of `σ_{[level,depth)}(a)` over all
/// letters `a` of `A_depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageTable {
    pub level: usize,
    pub max_len: usize,
    pub depth: usize,
    pub alphabet: Alphabet,
    pub words: BTreeSet<Word>,
    /// The table at depth `depth - 1` is identical.
    pub stabilized: bool,
    /// The table at depth `depth - 1` is contained in this one.
    pub monotone: bool,
}

impl LanguageTable {
    pub fn contains(&self, w: &[Letter]) -> bool {
        self.words.contains(w)
    }

    /// Words of length exactly `len`, in lexicographic order.
    pub fn of_len(&self, len: usize) -> Vec<&Word> {
        self.words.iter().filter(|w| w.len() == len).collect()
    }

    /// Words ordered by length, then lexicographically.
    pub fn sorted(&self) -> Vec<&Word> {
        let mut out: Vec<&Word> = self.words.iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    pub fn spelled(&self) -> Vec<String> {
        self.sorted()
            .into_iter()
            .map(|w| self.alphabet.spell(w))
            .collect()
    }

    /// Errors unless the table is stabilized and holds words of `len`.
    pub fn require(&self, len: usize) -> Result<()> {
        if len > self.max_len {
            return Err(Error::LanguageTooShallow {
                needed: len,
                have: self.max_len,
            });
        }
        if !self.stabilized {
            return Err(Error::NotStabilized {
                level: self.level,
                max_len: self.max_len,
                depth: self.depth,
            });
        }
        Ok(())
    }
}

fn factors_up_to(w: &[Letter], max_len: usize, out: &mut BTreeSet<Word>) {
    for len in 1..=max_len.min(w.len()) {
        for win in w.windows(len) {
            if !out.contains(win) {
                out.insert(win.to_vec());
            }
        }
    }
}

/// Every factor of length `<= max_len` of `σ_k(x)` lies in `σ_k(w)` for some
/// factor `w` of `x` of length `<= max_len`, so tables are pushed down one
/// level at a time.
fn raw_language(d: &DirectiveSequence, level: usize, max_len: usize, depth: usize) -> Result<BTreeSet<Word>> {
    let mut current: BTreeSet<Word> = (0..d.alphabet(depth)?.len()).map(|a| vec![a]).collect();
    for k in (level..depth).rev() {
        let sigma = d.level(k)?;
        let mut next = BTreeSet::new();
        for w in &current {
            factors_up_to(&sigma.apply(w), max_len, &mut next);
        }
        current = next;
    }
    Ok(current)
}

/// Language table of level `level` at depth `depth`, holding words of length
/// at most `max_len`.
pub fn level_language(
    d: &DirectiveSequence,
    level: usize,
    max_len: usize,
    depth: usize,
) -> Result<LanguageTable> {
    if depth > d.depth() {
        return Err(Error::InsufficientLevels {
            requested: depth,
            available: d.depth(),
        });
    }
    if level >= depth || max_len == 0 {
        return Err(Error::hypothesis(
            "level_language",
            format!("need level < depth and max_len >= 1, got level {level}, depth {depth}, max_len {max_len}"),
        ));
    }
    let words = raw_language(d, level, max_len, depth)?;
    let (stabilized, monotone) = if depth > level + 1 {
        let before = raw_language(d, level, max_len, depth - 1)?;
        (before == words, before.is_subset(&words))
    } else {
        (false, true)
    };
    Ok(LanguageTable {
        level,
        max_len,
        depth,
        alphabet: d.alphabet(level)?.clone(),
        words,
        stabilized,
        monotone,
    })
}

/// Smallest depth up to the sequence's depth at which the table of `level`
/// stops changing between consecutive depths.
pub fn stable_language(d: &DirectiveSequence, level: usize, max_len: usize) -> Result<LanguageTable> {
    let mut prev: Option<BTreeSet<Word>> = None;
    for depth in level + 1..=d.depth() {
        let words = raw_language(d, level, max_len, depth)?;
        if let Some(before) = prev.take() {
            if before == words {
                return Ok(LanguageTable {
                    level,
                    max_len,
                    depth,
                    alphabet: d.alphabet(level)?.clone(),
                    words,
                    stabilized: true,
                    monotone: true,
                });
            }
        }
        prev = Some(words);
    }
    Err(Error::NotStabilized {
        level,
        max_len,
        depth: d.depth(),
    })
}

fn image_lengths(sigma: &Morphism, below: &[u128]) -> Vec<u128> {
    sigma
        .images()
        .iter()
        .map(|img| img.iter().fold(0u128, |acc, &c| acc.saturating_add(below[c])))
        .collect()
}

/// `⟨σ_{[0,n)}⟩` for `n` in `0..count`.
pub fn growth_profile(d: &DirectiveSequence, count: usize) -> Result<Vec<u128>> {
    let mut out = Vec::with_capacity(count);
    let mut lens: Vec<u128> = vec![1; d.alphabet(0)?.len()];
    for n in 0..count {
        out.push(lens.iter().copied().min().unwrap_or(0));
        if n + 1 < count {
            lens = image_lengths(d.level(n)?, &lens);
        }
    }
    Ok(out)
}

/// Least period of `σ_{[0,n)}(a)` minimized over `a ∈ A_n`, for `n` in
/// `0..count`.
pub fn min_period_profile(d: &DirectiveSequence, count: usize) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        let sigma = d.compose_range(0, n)?;
        let p = sigma
            .images()
            .iter()
            .map(|img| words::least_period(img))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .unwrap_or(0);
        out.push(p);
    }
    Ok(out)
}

/// Regroups levels into blocks `σ_{[c_k, c_{k+1})}`.
pub fn contract(d: &DirectiveSequence, cuts: &[usize]) -> Result<DirectiveSequence> {
    if cuts.len() < 2 || cuts[0] != 0 || cuts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::hypothesis(
            "contract",
            "cut points must start at 0 and strictly increase",
        ));
    }
    let blocks = cuts
        .windows(2)
        .map(|w| d.compose_range(w[0], w[1]))
        .collect::<Result<Vec<_>>>()?;
    let listed = d.listed().len();
    let period = match d.repeat() {
        Repeat::None => None,
        Repeat::Stationary => Some(1),
        Repeat::Cycle(k) => Some(k),
    };
    let last = cuts[cuts.len() - 2];
    let step = cuts[cuts.len() - 1] - last;
    let repeat = match period {
        Some(k) if step.is_multiple_of(k) && last + k >= listed => Repeat::Stationary,
        _ => Repeat::None,
    };
    let mut out = DirectiveSequence::new(blocks, repeat)?.with_cap(d.depth().max(cuts.len()));
    out.name = d.name.clone();
    Ok(out)
}

/// Restricts each alphabet `A_n` to the letters of `σ_{[n,depth)}(A_depth)`,
/// which makes every level letter-onto.
pub fn trim_letter_onto(d: &DirectiveSequence, depth: usize) -> Result<DirectiveSequence> {
    if depth == 0 || depth > d.depth() {
        return Err(Error::InsufficientLevels {
            requested: depth,
            available: d.depth(),
        });
    }
    let mut keep: Vec<BTreeSet<Letter>> = vec![BTreeSet::new(); depth + 1];
    keep[depth] = (0..d.alphabet(depth)?.len()).collect();
    for n in (0..depth).rev() {
        let sigma = d.level(n)?;
        keep[n] = keep[n + 1]
            .iter()
            .flat_map(|&a| sigma.image(a).iter().copied())
            .collect();
    }
    let untouched = (0..=depth).all(|n| d.alphabet(n).map(|a| a.len() == keep[n].len()).unwrap_or(false));
    if untouched {
        return Ok(d.clone());
    }
    let mut levels = Vec::with_capacity(depth);
    for n in 0..depth {
        let sigma = d.level(n)?;
        if keep[n + 1].is_empty() || keep[n].is_empty() {
            return Err(Error::hypothesis("trim_letter_onto", format!("alphabet {n} would be empty")));
        }
        levels.push(sigma.restrict_source(&keep[n + 1])?.restrict_target(&keep[n])?);
    }
    let mut out = DirectiveSequence::new(levels, Repeat::None)?;
    out.name = d.name.clone();
    Ok(out)
}

/// When a contraction block is long enough for properization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ContractionRule {
    /// Every length-3 word of the level language occurs twice in every image.
    #[default]
    EveryWordTwice,
    /// Some length-3 word of the level language occurs in every image.
    SharedAnchor,
}

/// A proper sequence over pair alphabets generating a sublanguage of the
/// input's, with the contraction and anchors used to build it.
#[derive(Clone, Debug)]
pub struct Properized {
    pub sequence: DirectiveSequence,
    pub cuts: Vec<usize>,
    /// The length-3 anchor word chosen at each block start.
    pub anchors: Vec<Word>,
}

fn pair_name(alphabet: &Alphabet, a: Letter, b: Letter) -> String {
    format!("[{};{}]", alphabet.name(a), alphabet.name(b))
}

fn count_occurrences(pattern: &[Letter], text: &[Letter], at_least: usize) -> bool {
    text.windows(pattern.len())
        .filter(|w| *w == pattern)
        .take(at_least)
        .count()
        >= at_least
}

struct LevelInfo {
    letters: BTreeSet<Letter>,
    pairs: Vec<Word>,
    triples: Vec<Word>,
}

fn level_info(d: &DirectiveSequence, level: usize) -> Result<LevelInfo> {
    let table = stable_language(d, level, 3)?;
    Ok(LevelInfo {
        letters: table.of_len(1).into_iter().map(|w| w[0]).collect(),
        pairs: table.of_len(2).into_iter().cloned().collect(),
        triples: table.of_len(3).into_iter().cloned().collect(),
    })
}

/// Contracts `d` and recodes it over pair alphabets so that every level is
/// proper with images of length at least 2.
///
/// Block `[c, e)` is accepted once `σ_{[c,e)}` meets `rule` for every letter
/// of level `e`'s language. Each image is split at the first occurrence of
/// the anchor `a₀b₀c₀`, after `a₀`, into `u(a) v(a)`, and the pair `[a;b]`
/// maps to the pairs read along `v(a) u(b) b₀`.
pub fn properize(d: &DirectiveSequence, rule: ContractionRule) -> Result<Properized> {
    let depth = d.depth();
    let mut cuts = vec![0usize];
    let mut infos = vec![level_info(d, 0)?];
    let mut anchors: Vec<Word> = Vec::new();
    let stationary_from = match d.repeat() {
        Repeat::Stationary => Some(d.listed().len() - 1),
        _ => None,
    };
    let mut repeating = false;
    loop {
        let start = *cuts.last().expect("nonempty");
        let first = infos.last().expect("nonempty");
        let mut found = None;
        for end in start + 1..depth {
            let Ok(info) = level_info(d, end) else { break };
            let block = d.compose_range(start, end)?;
            if let Some(anchor) = pick_anchor(&block, &info.letters, &first.triples, rule) {
                found = Some((end, info, anchor));
                break;
            }
        }
        let Some((end, info, anchor)) = found else { break };
        // a stationary tail repeats the previous block verbatim
        if let (Some(s), Some(&prev)) = (stationary_from, cuts.iter().rev().nth(1)) {
            if prev >= s && end - start == start - prev {
                repeating = true;
                break;
            }
        }
        cuts.push(end);
        infos.push(info);
        anchors.push(anchor);
    }
    if anchors.is_empty() || (stationary_from.is_some() && !repeating) {
        return Err(Error::InsufficientDepthProperize {
            detail: format!(
                "no admissible contraction within depth {depth} (cuts so far {cuts:?})"
            ),
        });
    }

    let alphabets: Vec<Alphabet> = cuts
        .iter()
        .zip(&infos)
        .map(|(&c, info)| {
            let a = d.alphabet(c)?;
            Alphabet::new(info.pairs.iter().map(|p| pair_name(a, p[0], p[1])))
        })
        .collect::<Result<_>>()?;
    let mut levels = Vec::with_capacity(anchors.len());
    for k in 0..anchors.len() {
        let block = d.compose_range(cuts[k], cuts[k + 1])?;
        let anchor = &anchors[k];
        let mut split: BTreeMap<Letter, usize> = BTreeMap::new();
        for &a in &infos[k + 1].letters {
            let at = words::occurrences(anchor, block.image(a))
                .first()
                .copied()
                .ok_or_else(|| Error::Internal("anchor vanished".into()))?;
            split.insert(a, at + 1);
        }
        let lower = &infos[k].pairs;
        let mut images = Vec::new();
        for pair in &infos[k + 1].pairs {
            let (a, b) = (pair[0], pair[1]);
            let mut path: Word = block.image(a)[split[&a]..].to_vec();
            path.extend_from_slice(&block.image(b)[..split[&b]]);
            path.push(anchor[1]);
            let img = path
                .windows(2)
                .map(|w| {
                    lower
                        .binary_search_by(|p| p.as_slice().cmp(w))
                        .map_err(|_| Error::LanguageTooShallow { needed: 2, have: 2 })
                })
                .collect::<Result<Word>>()?;
            images.push(img);
        }
        levels.push(Morphism::new(alphabets[k + 1].clone(), alphabets[k].clone(), images)?);
    }
    if repeating {
        levels.push(levels.last().expect("nonempty").clone());
    }
    // η keeps first components
    let base = d.alphabet(0)?;
    let eta = Morphism::new(
        alphabets[0].clone(),
        base.clone(),
        infos[0].pairs.iter().map(|p| vec![p[0]]).collect(),
    )?;
    levels[0] = Morphism::compose(&eta, &levels[0])?;

    for (k, level) in levels.iter().enumerate() {
        if !level.is_proper() || level.min_len() < 2 {
            return Err(Error::Certificate {
                name: "properize",
                detail: format!("level {k} is not proper with images of length >= 2"),
            });
        }
        let a = d.alphabet(cuts[(k + 1).min(cuts.len() - 1)])?.len();
        if level.source().len() > a * a {
            return Err(Error::Certificate {
                name: "properize",
                detail: format!("pair alphabet {} exceeds #A²", k + 1),
            });
        }
    }
    let repeat = if repeating { Repeat::Stationary } else { Repeat::None };
    let mut sequence = DirectiveSequence::new(levels, repeat)?.with_cap(d.depth());
    sequence.name = d.name.as_ref().map(|n| format!("{n}-proper"));
    Ok(Properized {
        sequence,
        cuts,
        anchors,
    })
}

fn pick_anchor(
    block: &Morphism,
    letters: &BTreeSet<Letter>,
    triples: &[Word],
    rule: ContractionRule,
) -> Option<Word> {
    match rule {
        ContractionRule::EveryWordTwice => {
            let ok = letters
                .iter()
                .all(|&a| triples.iter().all(|w| count_occurrences(w, block.image(a), 2)));
            if ok { triples.first().cloned() } else { None }
        }
        ContractionRule::SharedAnchor => triples
            .iter()
            .find(|w| letters.iter().all(|&a| words::is_factor(w, block.image(a))))
            .cloned(),
    }
}
