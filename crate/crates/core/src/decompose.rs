//! Rank-lowering decompositions `σ = p ∘ q` with `q` letter-onto.
//!
//! The reductions peel elementary morphisms off a morphism until a letter can
//! be erased. Every returned [`Decomposition`] has been recomposed and compared
//! letterwise against its input before it is handed back.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::morphism::{Alphabet, Letter, Morphism, Peel, Word};

/// Which end of the witness words the hypotheses refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Prefix,
    Suffix,
}

/// `q` followed by one `p` per input morphism, with `input[j] = ps[j] ∘ q`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Decomposition {
    pub q: Morphism,
    pub ps: Vec<Morphism>,
}

impl Decomposition {
    /// The single `p` of a one-morphism decomposition.
    pub fn p(&self) -> &Morphism {
        &self.ps[0]
    }

    /// Checks `ps[j] ∘ q = family[j]` for every `j`.
    pub fn verify(&self, family: &[Morphism]) -> Result<()> {
        if family.len() != self.ps.len() {
            return Err(Error::Internal("family size changed".into()));
        }
        for (j, (p, sigma)) in self.ps.iter().zip(family).enumerate() {
            let back = Morphism::compose(p, &self.q)?;
            if !back.same_as(sigma) {
                return Err(Error::Internal(format!(
                    "recomposition differs from member {j}"
                )));
            }
        }
        Ok(())
    }

    fn reversed(self) -> Decomposition {
        Decomposition {
            q: self.q.reversed(),
            ps: self.ps.iter().map(Morphism::reversed).collect(),
        }
    }
}

fn rev(w: &[Letter]) -> Word {
    w.iter().rev().copied().collect()
}

/// Image lengths shared by every member of `family`.
fn aligned_lengths(family: &[Morphism]) -> Result<Vec<usize>> {
    let first = family
        .first()
        .ok_or_else(|| Error::hypothesis("lower_rank_aligned", "empty family"))?;
    for sigma in &family[1..] {
        if sigma.source() != first.source() {
            return Err(Error::hypothesis(
                "lower_rank_aligned",
                "family members have different source alphabets",
            ));
        }
    }
    let n = first.source().len();
    let lens: Vec<usize> = (0..n).map(|a| first.len(a)).collect();
    if family
        .iter()
        .any(|sigma| (0..n).any(|a| sigma.len(a) != lens[a]))
    {
        return Err(Error::hypothesis(
            "lower_rank_aligned",
            "image lengths are not constant across the family",
        ));
    }
    Ok(lens)
}

fn check_word(w: &[Letter], alphabet: &Alphabet, what: &str, op: &'static str) -> Result<()> {
    if w.is_empty() {
        return Err(Error::hypothesis(op, format!("{what} is empty")));
    }
    if w.iter().any(|&a| a >= alphabet.len()) {
        return Err(Error::hypothesis(op, format!("{what} uses a foreign letter")));
    }
    Ok(())
}

/// Finds `q` letter-onto onto a strictly smaller alphabet with
/// `family[j] = p_j ∘ q`, given a witness pair: `u` and `v` start (or end) with
/// different letters, `|u| >= Σ_a ℓ_a` and each `σ_j(u)` is a prefix (or
/// suffix) of `σ_j(v)`.
pub fn lower_rank_aligned(
    family: &[Morphism],
    u: &[Letter],
    v: &[Letter],
    side: Side,
) -> Result<Decomposition> {
    let out = match side {
        Side::Prefix => aligned_prefix(family.to_vec(), u.to_vec(), v.to_vec())?,
        Side::Suffix => {
            let flipped = family.iter().map(Morphism::reversed).collect();
            aligned_prefix(flipped, rev(u), rev(v))?.reversed()
        }
    };
    out.verify(family)?;
    Ok(out)
}

fn aligned_hypotheses(
    family: &[Morphism],
    lens: &[usize],
    u: &[Letter],
    v: &[Letter],
) -> Result<()> {
    const OP: &str = "lower_rank_aligned";
    let alphabet = family[0].source();
    check_word(u, alphabet, "u", OP)?;
    check_word(v, alphabet, "v", OP)?;
    if u[0] == v[0] {
        return Err(Error::hypothesis(OP, "u and v start with the same letter"));
    }
    let total: usize = lens.iter().sum();
    if u.len() < total {
        return Err(Error::hypothesis(
            OP,
            format!("|u| = {} is below the total image length {total}", u.len()),
        ));
    }
    for (j, sigma) in family.iter().enumerate() {
        if !sigma.apply(v).starts_with(&sigma.apply(u)) {
            return Err(Error::hypothesis(
                OP,
                format!("image of u is not a prefix of image of v for member {j}"),
            ));
        }
    }
    Ok(())
}

fn aligned_prefix(mut family: Vec<Morphism>, mut u: Word, mut v: Word) -> Result<Decomposition> {
    let mut lens = aligned_lengths(&family)?;
    let alphabet = family[0].source().clone();
    let mut q = Morphism::identity(&alphabet);
    let mut budget: usize = lens.iter().sum();
    loop {
        aligned_hypotheses(&family, &lens, &u, &v)?;
        let (a, b) = (u[0], v[0]);
        if lens[a] == lens[b] {
            let erase = Morphism::erase(&alphabet, a, b)?;
            let keep: BTreeSet<Letter> = (0..alphabet.len()).filter(|&c| c != b).collect();
            let ps = family
                .iter()
                .map(|sigma| sigma.restrict_source(&keep))
                .collect::<Result<_>>()?;
            return Ok(Decomposition {
                q: Morphism::compose(&erase, &q)?,
                ps,
            });
        }
        // Peel a cut so that the longer of the two leading images shrinks.
        let (short, long) = if lens[a] < lens[b] { (a, b) } else { (b, a) };
        let cut = Morphism::cut(&alphabet, short, long)?;
        family = family
            .iter()
            .map(|sigma| {
                sigma
                    .peel(Peel::Prefix { a: short, b: long })
                    .map(|(rest, _)| rest)
            })
            .collect::<Result<_>>()?;
        lens[long] -= lens[short];
        let tail_u = cut.apply(&u[1..]);
        let tail_v = cut.apply(&v[1..]);
        if short == a {
            u = tail_u;
            v = std::iter::once(b).chain(tail_v).collect();
        } else {
            u = std::iter::once(a).chain(tail_u).collect();
            v = tail_v;
        }
        q = Morphism::compose(&cut, &q)?;
        let next: usize = lens.iter().sum();
        if next >= budget {
            return Err(Error::Internal("aligned reduction did not shrink".into()));
        }
        budget = next;
    }
}

/// Finds `q` letter-onto with `#C <= #A`, `|p|₁ < |σ|₁` and `σ = p ∘ q`.
///
/// With `a`, `b` the first letters of `u`, `v` and `σ(a) = s t`, where
/// `|s| = s_len` and `t` is nonempty, requires `σ(u)` to be a prefix of
/// `s σ(v)`, `|u| >= |σ|₁ + |s|`, and `a != b` when `s` is empty. The suffix
/// side reads every word from the right, with `s` a suffix of `σ(a)`.
pub fn lower_rank_split(
    sigma: &Morphism,
    u: &[Letter],
    v: &[Letter],
    s_len: usize,
    side: Side,
) -> Result<Decomposition> {
    let out = match side {
        Side::Prefix => split_prefix(sigma, u, v, s_len)?,
        Side::Suffix => split_prefix(&sigma.reversed(), &rev(u), &rev(v), s_len)?.reversed(),
    };
    out.verify(std::slice::from_ref(sigma))?;
    if out.p().total_len() >= sigma.total_len() {
        return Err(Error::Internal("split reduction did not shrink".into()));
    }
    Ok(out)
}

fn split_prefix(sigma: &Morphism, u: &[Letter], v: &[Letter], s_len: usize) -> Result<Decomposition> {
    const OP: &str = "lower_rank_split";
    check_word(u, sigma.source(), "u", OP)?;
    check_word(v, sigma.source(), "v", OP)?;
    let (a, b) = (u[0], v[0]);
    let image_a = sigma.image(a);
    if s_len >= image_a.len() {
        return Err(Error::hypothesis(
            OP,
            format!("s_len {s_len} leaves no suffix of an image of length {}", image_a.len()),
        ));
    }
    let mut shifted = image_a[..s_len].to_vec();
    shifted.extend(sigma.apply(v));
    if !shifted.starts_with(&sigma.apply(u)) {
        return Err(Error::hypothesis(OP, "image of u is not a prefix of s followed by image of v"));
    }
    if u.len() < sigma.total_len() + s_len {
        return Err(Error::hypothesis(
            OP,
            format!(
                "|u| = {} is below |σ|₁ + |s| = {}",
                u.len(),
                sigma.total_len() + s_len
            ),
        ));
    }
    if s_len == 0 {
        if a == b {
            return Err(Error::hypothesis(OP, "s is empty and u, v start with the same letter"));
        }
        return aligned_prefix(vec![sigma.clone()], u.to_vec(), v.to_vec());
    }
    let (rest, theta) = sigma.peel(Peel::Interior { a, s_len })?;
    let tilde_u: Word = std::iter::once(a).chain(theta.apply(&u[1..])).collect();
    let tilde_v = theta.apply(v);
    if tilde_u.len() < rest.total_len() {
        return Err(Error::hypothesis(
            OP,
            "length bound fails after the split peel",
        ));
    }
    let inner = aligned_prefix(vec![rest], tilde_u, tilde_v)?;
    Ok(Decomposition {
        q: Morphism::compose(&inner.q, &theta)?,
        ps: inner.ps,
    })
}

/// Decomposes `τ = p ∘ q` with `q` letter-onto and proper and `#D <= #A`,
/// where `φ: A → C`, `τ: B → C`, `τ` is `|φ|₁⁴`-proper, `w` uses every
/// letter of `B` and `φ(u) = τ(w)`.
pub fn factorize_through(
    phi: &Morphism,
    tau: &Morphism,
    u: &[Letter],
    w: &[Letter],
) -> Result<Decomposition> {
    const OP: &str = "factorize_through";
    let phi_source_len = phi.source().len();
    let mut phi = phi.with_target_order(tau.target()).map_err(|_| {
        Error::hypothesis(OP, "φ and τ have different target alphabets")
    })?;
    check_word(u, phi.source(), "u", OP)?;
    check_word(w, tau.source(), "w", OP)?;
    let used: BTreeSet<Letter> = w.iter().copied().collect();
    if used.len() != tau.source().len() {
        return Err(Error::hypothesis(OP, "w does not contain every letter of B"));
    }
    if phi.apply(u) != tau.apply(w) {
        return Err(Error::hypothesis(OP, "φ(u) differs from τ(w)"));
    }
    let needed = phi.total_len().saturating_pow(4);
    if w.len() > 1 && tau.properness_radius() < needed {
        return Err(Error::hypothesis(
            OP,
            format!(
                "τ is only {}-proper, need {needed}",
                tau.properness_radius()
            ),
        ));
    }

    if w.len() == 1 {
        return single_letter_case(&phi, tau, u, phi_source_len);
    }

    let mut u = u.to_vec();
    let mut budget = phi.total_len() + 1;
    let cuts = loop {
        budget -= 1;
        if budget == 0 {
            return Err(Error::Internal("reduction loop exceeded |φ|₁ rounds".into()));
        }
        match next_reduction(&phi, tau, &u, w)? {
            Reduction::Done(cuts) => break cuts,
            Reduction::Reduce(d) => {
                let before = phi.total_len();
                u = d.q.apply(&u);
                phi = d.ps.into_iter().next().expect("one member");
                if phi.total_len() >= before {
                    return Err(Error::Internal("reduction did not shrink φ".into()));
                }
            }
        }
    };

    // cuts[k] is the start of the block of u spelling τ(w_k).
    let mut blocks: Vec<Option<Word>> = vec![None; tau.source().len()];
    for (k, &b) in w.iter().enumerate() {
        let block = &u[cuts[k]..cuts[k + 1]];
        if phi.apply(block) != tau.image(b) {
            return Err(Error::Internal(format!("block {k} does not spell τ(w_k)")));
        }
        blocks[b].get_or_insert_with(|| block.to_vec());
    }
    let images: Vec<Word> = blocks.into_iter().map(|b| b.expect("w uses every letter")).collect();
    let q_full = Morphism::new(tau.source().clone(), phi.source().clone(), images)?;
    let letters = q_full.used_letters();
    let q = q_full.restrict_target(&letters)?;
    let p = phi.restrict_source(&letters)?;
    let out = Decomposition { q, ps: vec![p] };
    finish_factorization(out, tau, phi_source_len)
}

fn single_letter_case(
    phi: &Morphism,
    tau: &Morphism,
    u: &[Letter],
    phi_source_len: usize,
) -> Result<Decomposition> {
    let image = tau.image(0);
    let letters: BTreeSet<Letter> = image.iter().copied().collect();
    let out = if letters.len() <= phi_source_len {
        let q = tau.restrict_target(&letters)?;
        let inclusion = Morphism::new(
            q.target().clone(),
            tau.target().clone(),
            letters.iter().map(|&c| vec![c]).collect(),
        )?;
        Decomposition {
            q,
            ps: vec![inclusion],
        }
    } else {
        let used: BTreeSet<Letter> = u.iter().copied().collect();
        let q = Morphism::new(tau.source().clone(), phi.source().clone(), vec![u.to_vec()])?
            .restrict_target(&used)?;
        Decomposition {
            q,
            ps: vec![phi.restrict_source(&used)?],
        }
    };
    finish_factorization(out, tau, phi_source_len)
}

fn finish_factorization(out: Decomposition, tau: &Morphism, bound: usize) -> Result<Decomposition> {
    out.verify(std::slice::from_ref(tau))?;
    if out.q.target().len() > bound {
        return Err(Error::Internal("factorization alphabet too large".into()));
    }
    if !out.q.is_letter_onto() || !out.q.is_proper() {
        return Err(Error::Internal("q is not letter-onto and proper".into()));
    }
    Ok(out)
}

enum Reduction {
    Done(Vec<usize>),
    Reduce(Decomposition),
}

/// Looks for the lowest block boundary where `φ(u)` and `τ(w)` fail to align
/// with matching boundary letters. Returns the block starts when there is
/// none, or the reduction of `φ` that repairs the first one.
fn next_reduction(phi: &Morphism, tau: &Morphism, u: &[Letter], w: &[Letter]) -> Result<Reduction> {
    let size = phi.total_len();
    let (short, long) = (size * size, size * size * size);
    let n = u.len();
    let mut phi_ends = Vec::with_capacity(n + 1);
    phi_ends.push(0usize);
    for &a in u {
        phi_ends.push(phi_ends.last().unwrap() + phi.len(a));
    }
    let mut cuts = vec![0];
    let mut tau_end = 0;
    for &b in &w[..w.len() - 1] {
        tau_end += tau.len(b);
        // 1-based i_k: the first index whose φ-prefix passes the τ-cut.
        let i_k = phi_ends
            .iter()
            .position(|&e| e > tau_end)
            .ok_or_else(|| Error::Internal("τ-cut beyond φ(u)".into()))?;
        let s_len = tau_end - phi_ends[i_k - 1];
        if s_len > 0 || u[0] != u[i_k - 1] {
            let start = i_k - 1;
            if start + short > n || long > n {
                return Err(Error::Internal("witness too short for the prefix reduction".into()));
            }
            let d = lower_rank_split(phi, &u[start..start + short], &u[..long], s_len, Side::Prefix)?;
            return Ok(Reduction::Reduce(d));
        }
        cuts.push(i_k - 1);
    }
    for &cut in &cuts[1..] {
        if u[n - 1] != u[cut - 1] {
            if cut < short || long > n {
                return Err(Error::Internal("witness too short for the suffix reduction".into()));
            }
            let d = lower_rank_split(phi, &u[cut - short..cut], &u[n - long..], 0, Side::Suffix)?;
            return Ok(Reduction::Reduce(d));
        }
    }
    cuts.push(n);
    Ok(Reduction::Done(cuts))
}

/// Output of [`push_rank_through`]: `nu[n]` for `n` in `0..N` and `psi[n]`
/// for `n` in `0..=N`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct PushThrough {
    pub nu: Vec<Morphism>,
    pub psi: Vec<Morphism>,
    /// Set when level 0 kept `τ_0` whole (`q_1` the identity); `ν_1` is
    /// then only proper after contracting it into `ν_0`.
    pub direct_first: bool,
}

/// Transfers a letter-onto factor `φ: σ → τ` onto a proper sequence `ν` whose
/// alphabets are bounded by those of `σ`.
///
/// `sigma[n]` is `σ_n` (index 0 unused), `tau` holds `τ_0..τ_{N-1}` and `phi`
/// holds `φ_0..φ_N`, with `φ_0 = τ_0 φ_1` and `φ_n σ_n = τ_n φ_{n+1}`.
pub fn push_rank_through(
    sigma: &[Morphism],
    tau: &[Morphism],
    phi: &[Morphism],
) -> Result<PushThrough> {
    const OP: &str = "push_rank_through";
    let levels = tau.len();
    if levels == 0 || phi.len() != levels + 1 || (levels > 1 && sigma.len() < levels) {
        return Err(Error::hypothesis(
            OP,
            format!(
                "need N τ-levels, N+1 φ-levels and σ_1..σ_(N-1); got {}, {}, {}",
                tau.len(),
                phi.len(),
                sigma.len()
            ),
        ));
    }
    for (n, f) in phi.iter().enumerate() {
        if !f.is_letter_onto() {
            return Err(Error::hypothesis(OP, format!("φ_{n} is not letter-onto")));
        }
    }
    let commutes = |lhs: Result<Morphism>, rhs: Result<Morphism>| -> bool {
        matches!((lhs, rhs), (Ok(l), Ok(r)) if l.same_as(&r))
    };
    if !commutes(Ok(phi[0].clone()), Morphism::compose(&tau[0], &phi[1])) {
        return Err(Error::Commutation {
            level: 0,
            identity: "φ_0 = τ_0 φ_1".into(),
        });
    }
    for n in 1..levels {
        if !commutes(
            Morphism::compose(&phi[n], &sigma[n]),
            Morphism::compose(&tau[n], &phi[n + 1]),
        ) {
            return Err(Error::Commutation {
                level: n,
                identity: format!("φ_{n} σ_{n} = τ_{n} φ_{}", n + 1),
            });
        }
    }

    // level n yields q_{n+1} and p_n with τ_n = p_n q_{n+1}
    let mut qs: Vec<Option<Morphism>> = vec![None];
    let mut direct_first = false;
    let mut ps = Vec::with_capacity(levels);
    for n in 0..levels {
        let x: Word = (0..phi[n + 1].source().len()).collect();
        let w = respell(&phi[n + 1].apply(&x), phi[n + 1].target(), tau[n].source())?;
        let u = if n == 0 {
            respell(&x, phi[1].source(), phi[0].source())?
        } else {
            let x = respell(&x, phi[n + 1].source(), sigma[n].source())?;
            respell(&sigma[n].apply(&x), sigma[n].target(), phi[n].source())?
        };
        let d = match factorize_through(&phi[n], &tau[n], &u, &w) {
            // φ_0 contains τ_0, so τ_0 is almost never |φ_0|₁⁴-proper
            Err(Error::Hypothesis { .. }) if n == 0 => {
                direct_first = true;
                Decomposition {
                    q: Morphism::identity(tau[0].source()),
                    ps: vec![tau[0].clone()],
                }
            }
            other => other?,
        };
        qs.push(Some(d.q));
        ps.push(d.ps.into_iter().next().expect("one member"));
    }
    let q = |n: usize| qs[n].as_ref().expect("q_n exists for n >= 1");

    let mut nu = vec![ps[0].clone()];
    for (n, p) in ps.iter().enumerate().skip(1) {
        nu.push(Morphism::compose(q(n), p)?);
    }
    let mut psi = vec![phi[0].clone()];
    for (n, f) in phi.iter().enumerate().skip(1) {
        psi.push(Morphism::compose(q(n), f)?);
    }

    if !commutes(Ok(psi[0].clone()), Morphism::compose(&nu[0], &psi[1])) {
        return Err(Error::Certificate {
            name: "factor",
            detail: "ν_0 ψ_1 differs from ψ_0".into(),
        });
    }
    for n in 1..levels {
        if !commutes(
            Morphism::compose(&psi[n], &sigma[n]),
            Morphism::compose(&nu[n], &psi[n + 1]),
        ) {
            return Err(Error::Certificate {
                name: "factor",
                detail: format!("ψ_{n} σ_{n} differs from ν_{n} ψ_{}", n + 1),
            });
        }
    }
    let first_proper = if direct_first { 2 } else { 1 };
    for (n, m) in nu.iter().enumerate().skip(1) {
        if !m.is_letter_onto() || (n >= first_proper && !m.is_proper()) {
            return Err(Error::Certificate {
                name: "proper",
                detail: format!("ν_{n} is not letter-onto and proper"),
            });
        }
    }
    Ok(PushThrough {
        nu,
        psi,
        direct_first,
    })
}

/// Rewrites `w` from alphabet `from` into the same-named letters of `to`.
pub(crate) fn respell(w: &[Letter], from: &Alphabet, to: &Alphabet) -> Result<Word> {
    if from == to {
        return Ok(w.to_vec());
    }
    w.iter().map(|&a| to.lookup(from.name(a))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rules: &[(&str, &str)]) -> Morphism {
        Morphism::from_chars(rules).unwrap()
    }

    fn word(m: &Morphism, s: &str) -> Word {
        m.source().parse_word(s).unwrap()
    }

    #[test]
    fn equal_images_erase_immediately() {
        let sigma = m(&[("a", "x"), ("b", "x")]);
        let d = lower_rank_aligned(
            std::slice::from_ref(&sigma),
            &word(&sigma, "ab"),
            &word(&sigma, "ba"),
            Side::Prefix,
        )
        .unwrap();
        assert_eq!(d.q, Morphism::erase(sigma.source(), 0, 1).unwrap());
        assert_eq!(d.p().rule_strings(), ["a -> x"]);
    }

    #[test]
    fn aligned_pair_family() {
        let s1 = m(&[("a", "xy"), ("b", "xyy")]);
        let s2 = Morphism::parse("source: a b\ntarget: u v\na -> u v\nb -> u v v\n").unwrap();
        let family = [s1.clone(), s2];
        // a b a b a vs b a b a: both spell the same prefix
        let u = word(&s1, "ababa");
        let v = word(&s1, "babab");
        let d = lower_rank_aligned(&family, &u, &v, Side::Prefix);
        // xy xyy xy xyy xy vs xyy xy xyy xy xyy: not prefix-compatible
        assert!(matches!(d, Err(Error::Hypothesis { .. })));

        let s1 = m(&[("a", "xy"), ("b", "xyxy")]);
        let s2 = Morphism::parse("source: a b\ntarget: u v\na -> u v\nb -> u v u v\n").unwrap();
        let family = [s1.clone(), s2];
        let u = word(&s1, "aaaaaa");
        let v = word(&s1, "bbb");
        let d = lower_rank_aligned(&family, &u, &v, Side::Prefix).unwrap();
        assert!(d.q.target().len() < 2);
        assert!(d.q.is_letter_onto());
        d.verify(&family).unwrap();
    }

    #[test]
    fn aligned_suffix_side() {
        let sigma = m(&[("a", "yx"), ("b", "yxyx")]);
        let u = word(&sigma, "aaaaaa");
        let v = word(&sigma, "bbb");
        let d = lower_rank_aligned(std::slice::from_ref(&sigma), &u, &v, Side::Suffix).unwrap();
        assert_eq!(d.q.target().len(), 1);
        let w = word(&sigma, "aaaaab");
        let err = lower_rank_aligned(std::slice::from_ref(&sigma), &w, &v, Side::Suffix);
        assert!(matches!(err, Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn split_shrinks_total_length() {
        // σ(a) = x·yz splits after one letter; u = a…, v = b…
        let sigma = m(&[("a", "xyz"), ("b", "yzx")]);
        let u = word(&sigma, "aaaaaaa");
        let v = word(&sigma, "bbbbbbb");
        let d = lower_rank_split(&sigma, &u, &v, 1, Side::Prefix).unwrap();
        assert!(d.p().total_len() < sigma.total_len());
        assert!(d.q.target().len() <= sigma.source().len());
        assert!(d.q.is_letter_onto());
    }

    #[test]
    fn split_rejects_bad_hypotheses() {
        let sigma = m(&[("a", "xyz"), ("b", "yzx")]);
        let u = word(&sigma, "aaaaaaa");
        let v = word(&sigma, "bbbbbbb");
        assert!(lower_rank_split(&sigma, &u, &v, 0, Side::Prefix).is_err());
        assert!(lower_rank_split(&sigma, &u, &v, 3, Side::Prefix).is_err());
        assert!(lower_rank_split(&sigma, &u[..3], &v, 1, Side::Prefix).is_err());
        assert!(lower_rank_split(&sigma, &u, &u, 0, Side::Prefix).is_err());
    }

    #[test]
    fn factorize_single_letter() {
        let phi = m(&[("a", "x"), ("b", "y")]);
        let tau = m(&[("c", "xyx")]);
        let d = factorize_through(&phi, &tau, &word(&phi, "aba"), &[0]).unwrap();
        assert_eq!(d.q.target().letters(), ["x", "y"]);
        assert_eq!(d.q.rule_strings(), ["c -> x y x"]);
        assert_eq!(d.p().rule_strings(), ["x -> x", "y -> y"]);

        let phi = m(&[("a", "xyz")]);
        let tau = m(&[("c", "xyz")]);
        let d = factorize_through(&phi, &tau, &[0], &[0]).unwrap();
        assert_eq!(d.q.target().letters(), ["a"]);
        assert_eq!(d.p(), &phi);
    }

    fn proper_block(core: &str, pad: usize) -> String {
        format!("{}{}{}", "a".repeat(pad), core, "a".repeat(pad))
    }

    #[test]
    fn factorize_through_identity() {
        let phi = Morphism::identity(&Alphabet::from_chars("ab").unwrap());
        let q0 = m(&[("c", &proper_block("b", 16)), ("d", &proper_block("bb", 16))]);
        let tau = Morphism::compose(&phi, &q0).unwrap();
        let w = word(&q0, "cd");
        let u = q0.apply(&w);
        let d = factorize_through(&phi, &tau, &u, &w).unwrap();
        assert!(d.q.same_as(&q0));
    }

    #[test]
    fn factorize_rejects_unproper_tau() {
        let phi = m(&[("a", "ab"), ("b", "a")]);
        let tau = m(&[("c", "ab"), ("d", "a")]);
        let err = factorize_through(&phi, &tau, &[0, 1], &[0, 1]).unwrap_err();
        assert!(matches!(err, Error::Hypothesis { .. }));
    }

    #[test]
    fn factorize_reduces_phi() {
        // φ has an extra letter spelling aa, so a reduction is needed.
        let phi = Morphism::parse("a -> x\nb -> y\nc -> x x\n").unwrap();
        let q0 = Morphism::parse(&format!(
            "c1 -> {}\nc2 -> {}\n",
            spaced(&proper_block("b", 256)),
            spaced(&proper_block("bcb", 256))
        ))
        .unwrap();
        let q0 = q0
            .with_target_order(&Alphabet::from_chars("abc").unwrap())
            .unwrap();
        let tau = Morphism::compose(&phi, &q0).unwrap();
        let w = vec![0, 1];
        let u = q0.apply(&w);
        let d = factorize_through(&phi, &tau, &u, &w).unwrap();
        assert!(d.q.target().len() <= 3);
        assert!(d.q.is_proper() && d.q.is_letter_onto());
    }

    fn spaced(s: &str) -> String {
        s.chars().map(String::from).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn push_through_identity_factor() {
        let q1 = m(&[("c", &proper_block("b", 16)), ("d", &proper_block("bb", 16))]);
        let tau0 = q1.clone();
        let ab = Alphabet::from_chars("ab").unwrap();
        let cd = q1.source().clone();
        let phi0 = tau0.clone();
        let phi1 = Morphism::identity(&cd);
        let out = push_rank_through(&[], std::slice::from_ref(&tau0), &[phi0.clone(), phi1]).unwrap();
        assert_eq!(out.nu.len(), 1);
        assert_eq!(out.psi.len(), 2);
        assert!(Morphism::compose(&out.nu[0], &out.psi[1]).unwrap().same_as(&phi0));
        assert_eq!(out.nu[0].target(), &ab);
    }

    #[test]
    fn push_through_two_levels() {
        let sigma1 = m(&[("c", &proper_block("b", 16)), ("d", &proper_block("bb", 16))]);
        let phi2 = Morphism::identity(sigma1.source());
        let phi1 = Morphism::identity(sigma1.target());
        let tau1 = Morphism::compose(&phi1, &sigma1).unwrap();
        let tau0 = m(&[("a", "ab"), ("b", "a")]);
        let phi0 = Morphism::compose(&tau0, &phi1).unwrap();
        let sigma = [Morphism::identity(sigma1.target()), sigma1.clone()];
        let out = push_rank_through(&sigma, &[tau0, tau1], &[phi0.clone(), phi1, phi2]).unwrap();
        assert!(out.direct_first);
        assert!(Morphism::compose(&out.nu[0], &out.psi[1]).unwrap().same_as(&phi0));
        let lhs = Morphism::compose(&out.psi[1], &sigma1).unwrap();
        let rhs = Morphism::compose(&out.nu[1], &out.psi[2]).unwrap();
        assert!(lhs.same_as(&rhs));
        assert!(out.psi[2].is_proper());
        assert!(out.nu.iter().all(|n| n.target().len() <= 2));
    }

    #[test]
    fn push_through_rejects_non_commuting() {
        let tau0 = m(&[("c", "ab"), ("d", "a")]);
        let phi1 = Morphism::identity(tau0.source());
        let phi0 = m(&[("c", "a"), ("d", "ab")]);
        let err = push_rank_through(&[], &[tau0], &[phi0, phi1]).unwrap_err();
        assert!(matches!(err, Error::Commutation { level: 0, .. }));
    }
}
