//! Brute-force reference computations. None of these call into the library
//! beyond reading morphism images and table words.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use sadic::recognize::Interpretation;
use sadic::{LanguageTable, Letter, Morphism, Word};

/// Iterates a substitution on characters from `start`.
pub fn iterate(rules: &[(char, &str)], start: char, times: usize) -> String {
    let mut w = start.to_string();
    for _ in 0..times {
        w = w
            .chars()
            .map(|c| rules.iter().find(|(a, _)| *a == c).expect("rule for every letter").1)
            .collect();
    }
    w
}

pub fn fibonacci(times: usize) -> String {
    iterate(&[('a', "ab"), ('b', "a")], 'a', times)
}

pub fn thue_morse(times: usize) -> String {
    iterate(&[('a', "ab"), ('b', "ba")], 'a', times)
}

pub fn factors(text: &str, len: usize) -> BTreeSet<String> {
    let chars: Vec<char> = text.chars().collect();
    chars.windows(len).map(|w| w.iter().collect()).collect()
}

pub fn factors_up_to(text: &str, max_len: usize) -> BTreeSet<String> {
    (1..=max_len).flat_map(|l| factors(text, l)).collect()
}

/// Words read between consecutive occurrences of `u v`, cut between `u` and `v`.
pub fn gap_return_words(text: &str, u: &str, v: &str) -> BTreeSet<String> {
    let pattern = format!("{u}{v}");
    let cuts: Vec<usize> = (0..=text.len().saturating_sub(pattern.len()))
        .filter(|&i| text[i..].starts_with(&pattern))
        .map(|i| i + u.len())
        .collect();
    cuts.windows(2).map(|w| text[w[0]..w[1]].to_string()).collect()
}

/// Images as letter names.
pub fn rules(m: &Morphism) -> BTreeMap<String, Vec<String>> {
    (0..m.source().len())
        .map(|a| {
            let image = m.image(a).iter().map(|&c| m.target().name(c).to_string()).collect();
            (m.source().name(a).to_string(), image)
        })
        .collect()
}

/// `outer ∘ inner` on names.
pub fn compose(outer: &Morphism, inner: &Morphism) -> BTreeMap<String, Vec<String>> {
    let o = rules(outer);
    rules(inner)
        .into_iter()
        .map(|(a, image)| (a, image.iter().flat_map(|c| o[c].iter().cloned()).collect()))
        .collect()
}

pub fn same(m: &Morphism, expected: &BTreeMap<String, Vec<String>>) -> bool {
    rules(m) == *expected
}

/// Every target letter occurs in some image.
pub fn letter_onto(m: &Morphism) -> bool {
    let used: BTreeSet<Letter> = m.images().iter().flatten().copied().collect();
    used.len() == m.target().len()
}

/// All images share a first letter and a last letter.
pub fn proper(m: &Morphism) -> bool {
    let images = m.images();
    images.iter().all(|w| !w.is_empty())
        && images.iter().all(|w| w[0] == images[0][0])
        && images.iter().all(|w| w.last() == images[0].last())
}

fn image_of(m: &Morphism, w: &[Letter]) -> Word {
    w.iter().flat_map(|&a| m.image(a).iter().copied()).collect()
}

fn starts(m: &Morphism, w: &[Letter]) -> Vec<usize> {
    let mut out = vec![0];
    for &a in w {
        out.push(out.last().unwrap() + m.len(a));
    }
    out
}

/// Whether `i` is a genuine centered reading of its window: some table word
/// `z` places the center inside the image of `i.letter` at `i.offset`, with
/// the same window and the same image starts.
pub fn reading_is_valid(sigma: &Morphism, lx: &LanguageTable, i: &Interpretation, r: usize) -> bool {
    if i.window.len() != 2 * r + 1 {
        return false;
    }
    let want_cuts: BTreeSet<isize> = i.local_cuts.iter().copied().collect();
    lx.words.iter().any(|z| {
        let img = image_of(sigma, z);
        let st = starts(sigma, z);
        (0..z.len()).any(|j| {
            if z[j] != i.letter || i.offset >= sigma.len(z[j]) {
                return false;
            }
            let c = st[j] + i.offset;
            if c < r || c + r >= img.len() || img[c - r..=c + r] != i.window[..] {
                return false;
            }
            let cuts: BTreeSet<isize> = st[..z.len()]
                .iter()
                .map(|&s| s as isize - c as isize)
                .filter(|d| d.unsigned_abs() <= r)
                .collect();
            cuts == want_cuts
        })
    })
}

/// Every window of radius `r` inside an image of a table word of length
/// `len` determines its covering symbol.
pub fn recognizable(sigma: &Morphism, lx: &LanguageTable, len: usize, r: usize) -> bool {
    let mut seen: BTreeMap<Word, (usize, Letter)> = BTreeMap::new();
    for z in lx.of_len(len) {
        let img = image_of(sigma, z);
        let st = starts(sigma, z);
        for (j, &a) in z.iter().enumerate() {
            for offset in 0..sigma.len(a) {
                let c = st[j] + offset;
                if c < r || c + r >= img.len() {
                    continue;
                }
                let window = img[c - r..=c + r].to_vec();
                if let Some(&prev) = seen.get(&window) {
                    if prev != (offset, a) {
                        return false;
                    }
                } else {
                    seen.insert(window, (offset, a));
                }
            }
        }
    }
    true
}

/// Per-position counts of covering symbols and the number of
/// factorizations, by enumerating every parse of `y`.
pub fn covering_counts(prefix: &Morphism, y: &[Letter], lx: &LanguageTable) -> (Vec<usize>, u128) {
    let mut symbols: Vec<BTreeSet<(isize, Letter)>> = vec![BTreeSet::new(); y.len()];
    let mut total = 0u128;
    let fits = |a: Letter, at: isize| {
        prefix.image(a).iter().enumerate().all(|(i, &c)| {
            let p = at + i as isize;
            p < 0 || p >= y.len() as isize || y[p as usize] == c
        })
    };
    let admissible = |x: &[Letter]| {
        (1..=lx.max_len.min(x.len())).all(|l| lx.contains(&x[x.len() - l..]))
    };
    // Depth-first over (next start, letters so far).
    let mut stack: Vec<(isize, Vec<Letter>, Vec<isize>)> = Vec::new();
    for a in 0..prefix.source().len() {
        for offset in 0..prefix.len(a) {
            let start = -(offset as isize);
            if fits(a, start) && admissible(&[a]) {
                stack.push((start + prefix.len(a) as isize, vec![a], vec![start]));
            }
        }
    }
    while let Some((pos, x, st)) = stack.pop() {
        if pos >= y.len() as isize {
            total += 1;
            for (&a, &s) in x.iter().zip(&st) {
                let to = (s + prefix.len(a) as isize).min(y.len() as isize);
                for p in s.max(0)..to {
                    symbols[p as usize].insert((s, a));
                }
            }
            continue;
        }
        for a in 0..prefix.source().len() {
            let mut next = x.clone();
            next.push(a);
            if fits(a, pos) && admissible(&next) {
                let mut s = st.clone();
                s.push(pos);
                stack.push((pos + prefix.len(a) as isize, next, s));
            }
        }
    }
    (symbols.iter().map(BTreeSet::len).collect(), total)
}

/// Unordered pairs of `(m+1)`-words sharing their last `m` letters (`right`)
/// or their first `m` letters.
pub fn tail_pairs(words: &BTreeSet<String>, m: usize, right: bool) -> BTreeSet<(String, String)> {
    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for w in words.iter().filter(|w| w.chars().count() == m + 1) {
        let chars: Vec<char> = w.chars().collect();
        let key: String = if right { chars[1..].iter().collect() } else { chars[..m].iter().collect() };
        groups.entry(key).or_default().push(w.clone());
    }
    let mut out = BTreeSet::new();
    for g in groups.values() {
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                out.insert((g[i].clone(), g[j].clone()));
            }
        }
    }
    out
}

/// How far one image runs ahead of the other.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Lead {
    /// `σ(u) h = σ(v)`.
    V(Word),
    /// `σ(u) = σ(v) g`.
    U(Word),
}

/// A pair `(u, v)` with different first letters, `ℓ <= |u| <= ℓ + slack`,
/// `|v| <= ℓ + slack` and `σ(u)` a prefix of `σ(v)`, where `ℓ = |σ|₁`.
pub fn aligned_witness(sigma: &Morphism, slack: usize) -> Option<(Word, Word)> {
    let total = sigma.total_len();
    let max = total + slack;
    let k = sigma.source().len();
    let compare = |x: &[Letter], y: &[Letter]| -> Option<Lead> {
        if y.starts_with(x) {
            Some(Lead::V(y[x.len()..].to_vec()))
        } else if x.starts_with(y) {
            Some(Lead::U(x[y.len()..].to_vec()))
        } else {
            None
        }
    };
    let mut queue: VecDeque<(Lead, Word, Word)> = VecDeque::new();
    let mut seen: HashSet<(Lead, usize, usize)> = HashSet::new();
    for a in 0..k {
        for b in 0..k {
            if a == b {
                continue;
            }
            if let Some(lead) = compare(sigma.image(a), sigma.image(b)) {
                if seen.insert((lead.clone(), 1, 1)) {
                    queue.push_back((lead, vec![a], vec![b]));
                }
            }
        }
    }
    // `v` only grows while `σ(u)` is ahead: trailing letters of `v` past the
    // end of `σ(u)` never matter.
    while let Some((lead, u, v)) = queue.pop_front() {
        if let Lead::V(_) = lead {
            if u.len() >= total {
                return Some((u, v));
            }
        }
        for c in 0..k {
            let img = sigma.image(c);
            let step = match &lead {
                Lead::V(h) if u.len() < max => compare(img, h).map(|l| {
                    let mut u2 = u.clone();
                    u2.push(c);
                    (l, u2, v.clone())
                }),
                Lead::U(g) if v.len() < max => compare(g, img).map(|l| {
                    let mut v2 = v.clone();
                    v2.push(c);
                    (l, u.clone(), v2)
                }),
                _ => None,
            };
            if let Some(next) = step {
                if seen.insert((next.0.clone(), next.1.len(), next.2.len())) {
                    queue.push_back(next);
                }
            }
        }
    }
    None
}

/// Some `σ = p ∘ q` with `q` letter-onto onto fewer letters than the source,
/// found by trying every set of image factors as `p`.
pub fn decomposition_exists(sigma: &Morphism) -> bool {
    let mut pieces: BTreeSet<Word> = BTreeSet::new();
    for image in sigma.images() {
        for i in 0..image.len() {
            for j in i + 1..=image.len() {
                pieces.insert(image[i..j].to_vec());
            }
        }
    }
    let pieces: Vec<Word> = pieces.into_iter().collect();
    let k = sigma.source().len();
    (1..k).any(|size| choose(&pieces, size).iter().any(|p| covers(sigma, p)))
}

fn choose(items: &[Word], size: usize) -> Vec<Vec<Word>> {
    if size == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        for mut rest in choose(&items[i + 1..], size - 1) {
            rest.insert(0, items[i].clone());
            out.push(rest);
        }
    }
    out
}

/// Whether every image parses over `p` with all of `p` used somewhere.
fn covers(sigma: &Morphism, p: &[Word]) -> bool {
    let full = (1usize << p.len()) - 1;
    let mut reachable: BTreeSet<usize> = [0].into();
    for image in sigma.images() {
        // masks[i]: letter sets of parses of image[..i].
        let mut masks: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); image.len() + 1];
        masks[0].insert(0);
        for i in 0..image.len() {
            let here: Vec<usize> = masks[i].iter().copied().collect();
            for (c, piece) in p.iter().enumerate() {
                if image[i..].starts_with(piece) {
                    for &m in &here {
                        masks[i + piece.len()].insert(m | 1 << c);
                    }
                }
            }
        }
        let ends = &masks[image.len()];
        if ends.is_empty() {
            return false;
        }
        reachable = reachable.iter().flat_map(|&r| ends.iter().map(move |&m| r | m)).collect();
    }
    reachable.contains(&full)
}
