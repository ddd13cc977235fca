//! Factor maps given by sliding block codes, and the finite-scale structure
//! they transport: proper morphisms for the factor, towers for the factor
//! subshift, covering symbols of factorizations and asymptotic candidates.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coding::{recognizable_tower, Certificate, Tower};
use crate::decompose::{push_rank_through, PushThrough};
use crate::error::{Error, Result};
use crate::language::{contract, properize, stable_language, trim_letter_onto, ContractionRule, DirectiveSequence, LanguageTable};
use crate::morphism::{Alphabet, Letter, Morphism, Word};

/// Levels searched for a contraction making the first morphism proper enough.
const CONTRACTION_SEARCH: usize = 24;

/// A sliding block code of radius `r`: a map from `(2r+1)`-words over the
/// domain alphabet to letters of the codomain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalCode {
    radius: usize,
    domain: Alphabet,
    codomain: Alphabet,
    table: BTreeMap<Word, Letter>,
}

impl LocalCode {
    pub fn new(radius: usize, domain: Alphabet, codomain: Alphabet, table: BTreeMap<Word, Letter>) -> Result<Self> {
        for (w, &c) in &table {
            if w.len() != 2 * radius + 1 {
                return Err(Error::hypothesis(
                    "local_code",
                    format!("window `{}` has length {}, expected {}", domain.spell(w), w.len(), 2 * radius + 1),
                ));
            }
            if w.iter().any(|&a| a >= domain.len()) || c >= codomain.len() {
                return Err(Error::Internal("local code letter out of range".into()));
            }
        }
        Ok(LocalCode {
            radius,
            domain,
            codomain,
            table,
        })
    }

    /// The radius-0 code sending each letter to itself.
    pub fn identity(alphabet: &Alphabet) -> Self {
        Self::relabel(alphabet, alphabet.clone()).expect("same size")
    }

    /// The radius-0 code sending the `i`-th letter of `domain` to the `i`-th
    /// letter of `codomain`.
    pub fn relabel(domain: &Alphabet, codomain: Alphabet) -> Result<Self> {
        if domain.len() != codomain.len() {
            return Err(Error::AlphabetMismatch {
                expected: domain.to_string(),
                found: codomain.to_string(),
            });
        }
        let table = (0..domain.len()).map(|a| (vec![a], a)).collect();
        Self::new(0, domain.clone(), codomain, table)
    }

    /// Parses `radius: r` followed by `w -> c` lines. Windows are read one
    /// character per letter unless they contain whitespace. Codomain letters
    /// are numbered in order of first appearance.
    pub fn parse(text: &str, domain: &Alphabet) -> Result<Self> {
        let mut radius = None;
        let mut names: Vec<String> = Vec::new();
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| Error::Parse { line: i + 1, message };
            if let Some(rest) = line.strip_prefix("radius:") {
                radius = Some(rest.trim().parse::<usize>().map_err(|e| perr(format!("bad radius: {e}")))?);
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| perr("expected `radius: r` or `window -> letter`".into()))?;
            let lhs = lhs.trim();
            let tokens: Vec<String> = if lhs.contains(char::is_whitespace) {
                lhs.split_whitespace().map(String::from).collect()
            } else {
                lhs.chars().map(String::from).collect()
            };
            let window = tokens
                .iter()
                .map(|t| domain.lookup(t))
                .collect::<Result<Word>>()
                .map_err(|e| perr(e.to_string()))?;
            let target = rhs.trim();
            if target.is_empty() || target.contains(char::is_whitespace) {
                return Err(perr("code value must be a single letter".into()));
            }
            let c = match names.iter().position(|n| n == target) {
                Some(c) => c,
                None => {
                    names.push(target.to_string());
                    names.len() - 1
                }
            };
            rows.push((i + 1, window, c));
        }
        let radius = radius.ok_or(Error::Parse {
            line: 0,
            message: "missing `radius:` header".into(),
        })?;
        if names.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no code entries".into(),
            });
        }
        let codomain = Alphabet::new(names)?;
        let mut table = BTreeMap::new();
        for (line, window, c) in rows {
            if window.len() != 2 * radius + 1 {
                return Err(Error::Parse {
                    line,
                    message: format!("window has {} letters, radius {radius} needs {}", window.len(), 2 * radius + 1),
                });
            }
            if table.insert(window, c).is_some_and(|old| old != c) {
                return Err(Error::Parse {
                    line,
                    message: "window coded twice".into(),
                });
            }
        }
        Self::new(radius, domain.clone(), codomain, table)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("radius: {}\n", self.radius);
        for (w, &c) in &self.table {
            let names: Vec<&str> = w.iter().map(|&a| self.domain.name(a)).collect();
            out.push_str(&format!("{} -> {}\n", names.join(" "), self.codomain.name(c)));
        }
        out
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn domain(&self) -> &Alphabet {
        &self.domain
    }

    pub fn codomain(&self) -> &Alphabet {
        &self.codomain
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, window: &[Letter]) -> Result<Letter> {
        self.table
            .get(window)
            .copied()
            .ok_or_else(|| Error::MissingCodeEntry(self.domain.spell(window)))
    }

    /// The code read along `w`, one letter per full window, so the output is
    /// `2r` letters shorter than `w`.
    pub fn apply(&self, w: &[Letter]) -> Result<Word> {
        w.windows(2 * self.radius + 1).map(|win| self.get(win)).collect()
    }

    /// The same code over `domain`, which must have the same letter names.
    pub fn with_domain(&self, domain: &Alphabet) -> Result<Self> {
        if !self.domain.same_letters(domain) {
            return Err(Error::AlphabetMismatch {
                expected: domain.to_string(),
                found: self.domain.to_string(),
            });
        }
        let table = self
            .table
            .iter()
            .map(|(w, &c)| Ok((w.iter().map(|&a| domain.lookup(self.domain.name(a))).collect::<Result<Word>>()?, c)))
            .collect::<Result<_>>()?;
        Self::new(self.radius, domain.clone(), self.codomain.clone(), table)
    }
}

/// The morphism `τ` with `τ(a) = ψ(v σ(a) u)`, where `u` and `v` are the
/// common prefix and suffix of length `r` of the images of `σ`.
///
/// The result is checked on every word `w` of `lx1`: reading the code along
/// `σ(w)` gives `τ(w)` with `r` letters cropped on each side.
pub fn sliding_block_to_morphism(sigma: &Morphism, code: &LocalCode, lx1: &LanguageTable) -> Result<Morphism> {
    const OP: &str = "sliding_block_to_morphism";
    let r = code.radius();
    if !sigma.is_r_proper(r) {
        return Err(Error::hypothesis(
            OP,
            format!("morphism is {}-proper, code radius is {r}", sigma.properness_radius()),
        ));
    }
    let code = code.with_domain(sigma.target())?;
    let prefix = &sigma.image(0)[..r];
    let last = sigma.image(0);
    let suffix = &last[last.len() - r..];
    let images = sigma
        .images()
        .iter()
        .map(|img| {
            let padded: Word = suffix.iter().chain(img).chain(prefix).copied().collect();
            code.apply(&padded)
        })
        .collect::<Result<Vec<_>>>()?;
    let tau = Morphism::new(sigma.source().clone(), code.codomain().clone(), images)?;

    if !lx1.alphabet.same_letters(sigma.source()) {
        return Err(Error::AlphabetMismatch {
            expected: sigma.source().to_string(),
            found: lx1.alphabet.to_string(),
        });
    }
    for w in &lx1.words {
        let w = crate::decompose::respell(w, &lx1.alphabet, sigma.source())?;
        let read = code.apply(&sigma.apply(&w))?;
        let direct = tau.apply(&w);
        if read[..] != direct[r..direct.len() - r] {
            return Err(Error::Certificate {
                name: "commuting_square",
                detail: format!("word `{}`", sigma.source().spell(&w)),
            });
        }
    }
    Ok(tau)
}

/// A tower for the factor of a directive sequence by a local code, with the
/// rank-reduced sequence pushed through it.
#[derive(Clone, Debug, Serialize)]
pub struct Transported {
    pub code_radius: usize,
    pub properized: bool,
    /// Cut points contracting the input so its first morphism suits the code.
    pub contraction: Vec<usize>,
    /// The morphism `τ` replacing the first level.
    pub first: Morphism,
    pub tower: Tower,
    pub pushed: PushThrough,
    /// Whether the rank reduction ran; otherwise `pushed` is the tower itself.
    pub rank_reduced: bool,
    /// Largest alphabet of the input's levels from 1 on.
    pub rank_bound: usize,
    /// Source alphabet sizes of the resulting sequence.
    pub alphabet_sizes: Vec<usize>,
    pub certificates: Vec<Certificate>,
}

impl Transported {
    pub fn all_passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed) && self.tower.all_passed()
    }
}

/// First level of `d` from which the prefix `σ_{[0,c)}` is `r`-proper.
fn proper_prefix(d: &DirectiveSequence, r: usize) -> Result<usize> {
    let limit = CONTRACTION_SEARCH.min(d.depth());
    (1..=limit)
        .find(|&c| d.compose_range(0, c).is_ok_and(|s| s.is_r_proper(r)))
        .ok_or_else(|| Error::ContractionBudget {
            detail: format!("no prefix of length at most {limit} is {r}-proper"),
        })
}

/// The sequence `(τ, σ_1, σ_2, …)` generating the factor of `d` by `code`.
#[derive(Clone, Debug)]
pub struct Transport {
    pub properized: bool,
    pub contraction: Vec<usize>,
    pub first: Morphism,
    pub sequence: DirectiveSequence,
    /// The input after properization and contraction.
    pub contracted: DirectiveSequence,
}

/// Contracts `d` until its first morphism suits `code`, and replaces that
/// morphism by the one the code induces. With `proper`, non-proper input is
/// properized first and the new first morphism must come out proper.
pub fn transported_sequence(d: &DirectiveSequence, code: &LocalCode, proper: bool) -> Result<Transport> {
    let properized = proper && !d.listed().iter().all(Morphism::is_proper);
    let seq = if properized {
        properize(d, ContractionRule::SharedAnchor)?.sequence
    } else {
        d.clone()
    };
    // One more than the code radius, so that τ is proper.
    let need = if proper { code.radius() + 1 } else { code.radius() };
    let c = proper_prefix(&seq, need)?;
    let mut cuts = vec![0, c];
    cuts.extend(c + 1..=(c + 1).max(seq.listed().len()));
    let contracted = contract(&seq, &cuts)?;
    let lx1 = stable_language(&contracted, 1, 2 * code.radius() + 3)?;
    let first = sliding_block_to_morphism(contracted.level(0)?, code, &lx1)?;
    if proper && !first.is_proper() {
        return Err(Error::hypothesis("transported_sequence", "transported first morphism is not proper"));
    }
    let mut levels = vec![first.clone()];
    levels.extend(contracted.listed()[1..].iter().cloned());
    let sequence = DirectiveSequence::new(levels, contracted.repeat())?.with_cap(contracted.depth());
    Ok(Transport {
        properized,
        contraction: cuts,
        first,
        sequence,
        contracted,
    })
}

/// The sequence `(τ, σ_1, σ_2, …)` for the factor of `d` by `code`, its
/// recognizable tower, and the tower pushed back onto `d`'s alphabets.
pub fn transported_structure(d: &DirectiveSequence, code: &LocalCode, m_levels: usize) -> Result<Transported> {
    let trimmed = trim_letter_onto(d, d.depth())?;
    let rank_bound = (1..trimmed.depth().min(CONTRACTION_SEARCH))
        .map(|n| trimmed.alphabet(n).map(Alphabet::len))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let transported = transported_sequence(&trimmed, code, true)?;
    let Transport {
        properized,
        contraction: cuts,
        first,
        sequence: tilde,
        contracted,
    } = transported;

    let tower = recognizable_tower(&tilde, m_levels).map_err(|e| attribute("tower", e))?;
    if tower.properized || tower.levels.len() < 2 {
        return Err(Error::hypothesis("transported_structure", "tower does not sit on the transported sequence"));
    }
    let steps = &tower.sequence;
    let mut tau = vec![tower.levels[0].nu.clone()];
    tau.extend(tower.levels.iter().filter_map(|l| l.tau.clone()));
    let top = tau.len();
    let mut phi = vec![steps.compose_range(0, 3)?];
    phi.extend(tower.levels.iter().take(top).map(|l| l.phi.clone()));
    let mut sigma = vec![phi[0].clone()];
    for k in 1..top {
        sigma.push(steps.level(k + 2)?.clone());
    }
    let (pushed, rank_reduced) = match push_rank_through(&sigma, &tau, &phi) {
        Ok(p) => (p, true),
        // Keep the tower, with every q the identity; the rank certificate
        // then reports whether its alphabets are small enough.
        Err(Error::Hypothesis { .. }) => (
            PushThrough {
                nu: tau.clone(),
                psi: phi.clone(),
                direct_first: false,
            },
            false,
        ),
        Err(e) => return Err(attribute("push_rank_through", e)),
    };

    let alphabet_sizes: Vec<usize> = pushed.nu.iter().map(|m| m.source().len()).collect();
    let mut certificates = vec![Certificate::new(
        "alphabet_rank",
        alphabet_sizes.iter().all(|&s| s <= rank_bound),
        format!("alphabets {alphabet_sizes:?}, bound {rank_bound}"),
    )];
    certificates.push(Certificate::new(
        "recognizable",
        tower.all_passed(),
        format!("{} tower certificates", tower.certificates.len()),
    ));
    let original = contract(&contracted, &tower.cuts)?.compose_range(0, 3)?;
    let first_factor = &pushed.psi[0];
    let lengths_agree = original.source().len() == first_factor.source().len()
        && (0..original.source().len()).all(|a| {
            first_factor
                .source()
                .index(original.source().name(a))
                .is_some_and(|b| original.len(a) == first_factor.len(b))
        });
    certificates.push(Certificate::new(
        "first_coordinate_lengths",
        lengths_agree,
        format!(
            "|sigma_0| = {:?}, |phi_0| = {:?}",
            original.images().iter().map(Vec::len).collect::<Vec<_>>(),
            first_factor.images().iter().map(Vec::len).collect::<Vec<_>>()
        ),
    ));
    Ok(Transported {
        code_radius: code.radius(),
        properized,
        contraction: cuts,
        first,
        tower,
        pushed,
        rank_reduced,
        rank_bound,
        alphabet_sizes,
        certificates,
    })
}

fn attribute(stage: &'static str, e: Error) -> Error {
    match e {
        Error::Hypothesis { detail, .. } => Error::Hypothesis {
            operation: stage,
            detail,
        },
        other => other,
    }
}

/// Covering symbols over all factorizations of a word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberProfile {
    pub window_len: usize,
    /// Distinct covering symbols at each position.
    pub per_position_counts: Vec<usize>,
    pub min_count: usize,
    pub argmin: usize,
    pub factorizations: u128,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    pos: usize,
    context: Word,
}

/// Counts, at each position of `y`, the distinct symbols `(c, a)` covering
/// it over all factorizations of `y` by `prefix` whose letter sequence has
/// every factor in `lxn`.
///
/// A factorization starts inside the image of its first letter and may
/// overrun the end of `y` with its last one.
pub fn covering_symbol_profile(prefix: &Morphism, y: &[Letter], lxn: &LanguageTable) -> Result<FiberProfile> {
    if y.is_empty() {
        return Err(Error::EmptyWord);
    }
    if !lxn.alphabet.same_letters(prefix.source()) {
        return Err(Error::AlphabetMismatch {
            expected: prefix.source().to_string(),
            found: lxn.alphabet.to_string(),
        });
    }
    let prefix = prefix.with_source_order(&lxn.alphabet)?;
    let depth = lxn.max_len.max(1);
    let n = y.len();
    let fits = |a: Letter, at: isize| -> bool {
        let img = prefix.image(a);
        img.iter().enumerate().all(|(i, &c)| {
            let p = at + i as isize;
            p < 0 || p >= n as isize || y[p as usize] == c
        })
    };
    let extend = |context: &[Letter], a: Letter| -> Option<Word> {
        let mut w = context.to_vec();
        w.push(a);
        if !lxn.contains(&w) {
            return None;
        }
        if w.len() >= depth {
            w.remove(0);
        }
        Some(w)
    };

    // Edges are (state, letter, start); `None` as target marks a finished parse.
    let mut edges: Vec<(Option<State>, Letter, isize, Option<State>)> = Vec::new();
    let mut frontier: Vec<State> = Vec::new();
    let mut seen: HashSet<State> = HashSet::new();
    for a in 0..prefix.source().len() {
        for offset in 0..prefix.len(a) {
            let start = -(offset as isize);
            if !fits(a, start) {
                continue;
            }
            let Some(context) = extend(&[], a) else { continue };
            let end = prefix.len(a) - offset;
            let next = (end < n).then_some(State { pos: end, context });
            if let Some(s) = &next {
                if seen.insert(s.clone()) {
                    frontier.push(s.clone());
                }
            }
            edges.push((None, a, start, next));
        }
    }
    while let Some(state) = frontier.pop() {
        for a in 0..prefix.source().len() {
            if !fits(a, state.pos as isize) {
                continue;
            }
            let Some(context) = extend(&state.context, a) else { continue };
            let end = state.pos + prefix.len(a);
            let next = (end < n).then_some(State { pos: end, context });
            if let Some(s) = &next {
                if seen.insert(s.clone()) {
                    frontier.push(s.clone());
                }
            }
            edges.push((Some(state.clone()), a, state.pos as isize, next));
        }
    }

    // Number of completions from each state, in order of decreasing position.
    let mut states: Vec<State> = seen.into_iter().collect();
    states.sort_by(|x, y| y.pos.cmp(&x.pos).then_with(|| x.context.cmp(&y.context)));
    let mut outgoing: HashMap<Option<State>, Vec<usize>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        outgoing.entry(e.0.clone()).or_default().push(i);
    }
    let mut completions: HashMap<State, u128> = HashMap::new();
    let count_edge = |e: &(Option<State>, Letter, isize, Option<State>), completions: &HashMap<State, u128>| match &e.3 {
        None => 1u128,
        Some(s) => completions.get(s).copied().unwrap_or(0),
    };
    for s in &states {
        let total = outgoing
            .get(&Some(s.clone()))
            .map(|ids| ids.iter().map(|&i| count_edge(&edges[i], &completions)).fold(0u128, u128::saturating_add))
            .unwrap_or(0);
        completions.insert(s.clone(), total);
    }
    let factorizations = outgoing
        .get(&None)
        .map(|ids| ids.iter().map(|&i| count_edge(&edges[i], &completions)).fold(0u128, u128::saturating_add))
        .unwrap_or(0);
    if factorizations == 0 {
        return Err(Error::NotInGeneratedLanguage);
    }

    // Every source state is reachable, so an edge lies on a complete parse
    // exactly when its target completes.
    let mut symbols: Vec<BTreeSet<(isize, Letter)>> = vec![BTreeSet::new(); n];
    for e in &edges {
        if count_edge(e, &completions) == 0 {
            continue;
        }
        let (a, start) = (e.1, e.2);
        let from = start.max(0) as usize;
        let to = ((start + prefix.len(a) as isize) as usize).min(n);
        for slot in &mut symbols[from..to] {
            slot.insert((start, a));
        }
    }
    let per_position_counts: Vec<usize> = symbols.iter().map(BTreeSet::len).collect();
    let (argmin, &min_count) = per_position_counts
        .iter()
        .enumerate()
        .min_by_key(|&(i, c)| (*c, i))
        .expect("nonempty word");
    Ok(FiberProfile {
        window_len: n,
        per_position_counts,
        min_count,
        argmin,
        factorizations,
    })
}

/// `count` factors of length `len` drawn from `σ_{[level, level+k)}(a)`
/// for the first `k` whose images are long enough, at seeded positions.
pub fn sample_words(d: &DirectiveSequence, level: usize, len: usize, count: usize, seed: u64) -> Result<Vec<Word>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k = 1;
    let image = loop {
        let map = d.compose_range(level, level + k)?;
        let longest = (0..map.source().len()).max_by_key(|&a| map.len(a)).expect("nonempty alphabet");
        // Interior samples avoid the image boundary.
        if map.len(longest) >= 4 * len {
            break map.image(longest).to_vec();
        }
        k += 1;
    };
    Ok((0..count)
        .map(|_| {
            let start = rng.gen_range(len..image.len() - 2 * len);
            image[start..start + len].to_vec()
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::Parse {
                line: 0,
                message: format!("side must be `left` or `right`, got `{other}`"),
            }),
        }
    }
}

/// Pairs of `(m+1)`-words agreeing on `m` letters, with the count bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidates {
    pub m: usize,
    pub side: Side,
    pub pairs: Vec<(Word, Word)>,
    /// Shared `m`-words with more than one extension.
    pub specials: usize,
    pub bound: usize,
}

/// For `Right`, pairs of `(m+1)`-words of `lx` equal after their first
/// letter; for `Left`, equal before their last letter.
pub fn asymptotic_candidates(lx: &LanguageTable, m: usize, side: Side) -> Result<Candidates> {
    lx.require(m + 1)?;
    let mut groups: BTreeMap<&[Letter], Vec<&Word>> = BTreeMap::new();
    for w in lx.of_len(m + 1) {
        let shared = match side {
            Side::Right => &w[1..],
            Side::Left => &w[..m],
        };
        groups.entry(shared).or_default().push(w);
    }
    let mut pairs = Vec::new();
    let mut specials = 0;
    for words in groups.values() {
        if words.len() > 1 {
            specials += 1;
        }
        for (i, x) in words.iter().enumerate() {
            for y in &words[i + 1..] {
                pairs.push(((*x).clone(), (*y).clone()));
            }
        }
    }
    let k = lx.alphabet.len();
    Ok(Candidates {
        m,
        side,
        pairs,
        specials,
        bound: 2 * specials * k * k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn relabel_fibonacci() {
        let d = corpus::load("fibonacci").unwrap();
        let s = d.level(0).unwrap();
        let code = LocalCode::parse("radius: 0\na -> 0\nb -> 1\n", s.target()).unwrap();
        let lx = stable_language(&d, 1, 6).unwrap();
        let tau = sliding_block_to_morphism(s, &code, &lx).unwrap();
        assert_eq!(tau.rule_strings(), ["a -> 0 1", "b -> 0"]);
    }

    #[test]
    fn radius_needs_properness() {
        let d = corpus::load("fibonacci").unwrap();
        let s = d.level(0).unwrap();
        let code = LocalCode::parse("radius: 1\naba -> x\n", s.target()).unwrap();
        let lx = stable_language(&d, 1, 4).unwrap();
        let err = sliding_block_to_morphism(s, &code, &lx).unwrap_err();
        assert!(matches!(err, Error::Hypothesis { .. }), "{err}");
    }

    #[test]
    fn missing_window_is_named() {
        let s = Morphism::from_chars(&[("a", "abba"), ("b", "aba")]).unwrap();
        let code = LocalCode::parse("radius: 1\naab -> x\n", s.target()).unwrap();
        let d = DirectiveSequence::stationary(s.clone()).unwrap();
        let lx = stable_language(&d, 1, 3).unwrap();
        let err = sliding_block_to_morphism(&s, &code, &lx).unwrap_err();
        assert!(matches!(err, Error::MissingCodeEntry(_)), "{err}");
    }

    #[test]
    fn parse_round_trip() {
        let a = Alphabet::from_chars("ab").unwrap();
        let code = LocalCode::parse("radius: 1\naba -> x\nbab -> y\naab -> x\n", &a).unwrap();
        assert_eq!(LocalCode::parse(&code.to_text(), &a).unwrap(), code);
        assert!(LocalCode::parse("aba -> x\n", &a).is_err());
        assert!(LocalCode::parse("radius: 1\nab -> x\n", &a).is_err());
    }

    #[test]
    fn fibonacci_transport() {
        let d = corpus::load("fibonacci").unwrap();
        let code = LocalCode::relabel(d.alphabet(0).unwrap(), Alphabet::new(["0", "1"]).unwrap()).unwrap();
        let t = transported_structure(&d, &code, 2).unwrap();
        assert!(t.all_passed());
        assert!(t.alphabet_sizes.iter().all(|&k| k <= 2));
    }

    #[test]
    fn fibonacci_candidates() {
        let d = corpus::load("fibonacci").unwrap();
        let lx = stable_language(&d, 0, 5).unwrap();
        for side in [Side::Left, Side::Right] {
            let c = asymptotic_candidates(&lx, 4, side).unwrap();
            assert_eq!(c.pairs.len(), 1);
            assert!(c.pairs.len() <= c.bound);
        }
    }

    #[test]
    fn single_letter_has_no_candidates() {
        let d = DirectiveSequence::stationary(Morphism::from_chars(&[("a", "aa")]).unwrap()).unwrap();
        let lx = stable_language(&d, 0, 4).unwrap();
        assert!(asymptotic_candidates(&lx, 3, Side::Right).unwrap().pairs.is_empty());
    }

    #[test]
    fn profile_of_single_image_parse() {
        let d = corpus::load("fibonacci").unwrap();
        let prefix = d.compose_range(0, 3).unwrap();
        let lx = stable_language(&d, 3, 6).unwrap();
        let y = sample_words(&d, 0, 64, 1, 0).unwrap().remove(0);
        let p = covering_symbol_profile(&prefix, &y, &lx).unwrap();
        assert!(p.min_count >= 1 && p.min_count <= 2);
        let foreign = vec![1, 1, 1];
        assert_eq!(covering_symbol_profile(&prefix, &foreign, &lx), Err(Error::NotInGeneratedLanguage));
    }
}
