//! Periodicity primitives over finite words.
//!
//! All functions are generic over the letter type, so they apply equally to
//! `&[u8]`, `&[char]` and the index words used by [`crate::morphism`].
//! Positions are counts of letters to the left of a cut, so a word of length
//! `n` has interior positions `1..n`.

use crate::error::{Error, Result};

/// Smallest `p >= 1` such that `w[i] == w[i + p]` for every valid `i`.
pub fn least_period<T: Eq>(w: &[T]) -> Result<usize> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(w.len() - longest_border(w))
}

/// Length of the longest proper border of `w`.
fn longest_border<T: Eq>(w: &[T]) -> usize {
    let mut border = vec![0usize; w.len()];
    let mut k = 0;
    for i in 1..w.len() {
        while k > 0 && w[i] != w[k] {
            k = border[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        border[i] = k;
    }
    border.last().copied().unwrap_or(0)
}

/// Whether `w` is `p`-periodic. Every `p >= |w|` is a period.
pub fn has_period<T: Eq>(w: &[T], p: usize) -> bool {
    p > 0 && w.iter().zip(w.iter().skip(p)).all(|(x, y)| x == y)
}

/// Local period of `w` at the cut `pos`, with `1 <= pos < |w|`.
///
/// A length `p` is a local period when a word `z` of length `p` can be placed
/// so that it ends at the cut and a second copy starts at the cut, where
/// either copy may overhang the ends of `w`. Both copies are determined by the
/// letters of `w` they cover, so a candidate succeeds exactly when the
/// overlapping letters agree.
pub fn local_period<T: Eq>(w: &[T], pos: usize) -> Result<usize> {
    if pos == 0 || pos >= w.len() {
        return Err(Error::NotInteriorPosition { pos, len: w.len() });
    }
    Ok((1..=w.len())
        .find(|&p| repeats_across(w, pos, p))
        .unwrap_or(w.len()))
}

fn repeats_across<T: Eq>(w: &[T], pos: usize, p: usize) -> bool {
    (0..p).all(|i| {
        let left = pos + i;
        match (left.checked_sub(p), w.get(left)) {
            (Some(l), Some(r)) => w[l] == *r,
            _ => true,
        }
    })
}

/// All cut positions whose local period equals the least period.
///
/// The Critical Factorization Theorem guarantees the result is nonempty.
pub fn critical_positions<T: Eq>(w: &[T]) -> Result<Vec<usize>> {
    if w.len() < 2 {
        return Err(Error::WordTooShort { len: w.len() });
    }
    let period = least_period(w)?;
    let mut out = Vec::new();
    for pos in 1..w.len() {
        if local_period(w, pos)? == period {
            out.push(pos);
        }
    }
    Ok(out)
}

pub fn is_prefix<T: Eq>(prefix: &[T], w: &[T]) -> bool {
    w.starts_with(prefix)
}

pub fn is_suffix<T: Eq>(suffix: &[T], w: &[T]) -> bool {
    w.ends_with(suffix)
}

/// Length of the longest common prefix of all `words`.
pub fn common_prefix_len<T: Eq, W: AsRef<[T]>>(words: &[W]) -> usize {
    let Some(first) = words.first() else { return 0 };
    let first = first.as_ref();
    words.iter().skip(1).fold(first.len(), |acc, w| {
        acc.min(
            first
                .iter()
                .zip(w.as_ref())
                .take_while(|(x, y)| x == y)
                .count(),
        )
    })
}

/// Length of the longest common suffix of all `words`.
pub fn common_suffix_len<T: Eq, W: AsRef<[T]>>(words: &[W]) -> usize {
    let Some(first) = words.first() else { return 0 };
    let first = first.as_ref();
    words.iter().skip(1).fold(first.len(), |acc, w| {
        acc.min(
            first
                .iter()
                .rev()
                .zip(w.as_ref().iter().rev())
                .take_while(|(x, y)| x == y)
                .count(),
        )
    })
}

/// Starting indices of every occurrence of `pattern` in `text`.
pub fn occurrences<T: Eq>(pattern: &[T], text: &[T]) -> Vec<usize> {
    if pattern.is_empty() {
        return (0..=text.len()).collect();
    }
    text.windows(pattern.len())
        .enumerate()
        .filter(|(_, win)| *win == pattern)
        .map(|(i, _)| i)
        .collect()
}

pub fn is_factor<T: Eq>(pattern: &[T], text: &[T]) -> bool {
    pattern.is_empty() || text.windows(pattern.len()).any(|win| win == pattern)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> &[u8] {
        s.as_bytes()
    }

    #[test]
    fn least_period_examples() {
        assert_eq!(least_period(b("aaa")).unwrap(), 1);
        assert_eq!(least_period(b("ab")).unwrap(), 2);
        assert_eq!(least_period(b("abaab")).unwrap(), 3);
        assert_eq!(least_period::<u8>(&[]), Err(Error::EmptyWord));
    }

    #[test]
    fn local_period_examples() {
        assert_eq!(local_period(b("abaab"), 3).unwrap(), 1);
        assert_eq!(local_period(b("abaab"), 2).unwrap(), 3);
        assert_eq!(local_period(b("aa"), 1).unwrap(), 1);
        assert!(matches!(
            local_period(b("aa"), 2),
            Err(Error::NotInteriorPosition { .. })
        ));
        assert!(matches!(
            local_period(b("aa"), 0),
            Err(Error::NotInteriorPosition { .. })
        ));
    }

    #[test]
    fn critical_examples() {
        assert!(critical_positions(b("abaab")).unwrap().contains(&2));
        assert_eq!(critical_positions(b("ab")).unwrap(), vec![1]);
        assert_eq!(critical_positions(b("aa")).unwrap(), vec![1]);
        assert_eq!(
            critical_positions(b("a")),
            Err(Error::WordTooShort { len: 1 })
        );
    }

    #[test]
    fn common_affixes() {
        let ws = [b("abca").to_vec(), b("abba").to_vec(), b("aba").to_vec()];
        assert_eq!(common_prefix_len(&ws), 2);
        assert_eq!(common_suffix_len(&ws), 1);
        assert_eq!(occurrences(b("ab"), b("abab")), vec![0, 2]);
    }
}
