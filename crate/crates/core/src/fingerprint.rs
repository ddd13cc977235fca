//! Polynomial fingerprints of factors, two independent hashes modulo the
//! Mersenne prime `2^61 - 1`.

use crate::morphism::Letter;

const MOD: u64 = (1 << 61) - 1;
const BASES: [u64; 2] = [0x1f3d_5b79_a2c4_e681 % MOD, 0x0b5a_d4ec_e59f_3a17 % MOD];

fn mul(a: u64, b: u64) -> u64 {
    let p = a as u128 * b as u128;
    let s = (p as u64 & MOD) + (p >> 61) as u64;
    if s >= MOD {
        s - MOD
    } else {
        s
    }
}

fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MOD {
        s - MOD
    } else {
        s
    }
}

/// Prefix fingerprints of one word, answering factor queries in O(1).
pub(crate) struct Prefixes {
    hash: [Vec<u64>; 2],
    power: [Vec<u64>; 2],
}

impl Prefixes {
    pub(crate) fn new(word: &[Letter]) -> Self {
        let build = |base: u64| {
            let mut h = Vec::with_capacity(word.len() + 1);
            let mut p = Vec::with_capacity(word.len() + 1);
            h.push(0);
            p.push(1);
            for &c in word {
                h.push(add(mul(*h.last().expect("nonempty"), base), c as u64 + 1));
                p.push(mul(*p.last().expect("nonempty"), base));
            }
            (h, p)
        };
        let (h0, p0) = build(BASES[0]);
        let (h1, p1) = build(BASES[1]);
        Prefixes {
            hash: [h0, h1],
            power: [p0, p1],
        }
    }

    /// Fingerprint of `word[start..start + len]`.
    pub(crate) fn get(&self, start: usize, len: usize) -> u128 {
        let one = |i: usize| {
            let h = &self.hash[i];
            add(h[start + len], MOD - mul(h[start], self.power[i][len]))
        };
        ((one(0) as u128) << 64) | one(1) as u128
    }
}

pub(crate) fn of(word: &[Letter]) -> u128 {
    Prefixes::new(word).get(0, word.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_agree() {
        let w = [0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 1];
        let p = Prefixes::new(&w);
        for len in 1..6 {
            for i in 0..=w.len() - len {
                for j in 0..=w.len() - len {
                    assert_eq!(p.get(i, len) == p.get(j, len), w[i..i + len] == w[j..j + len]);
                }
            }
        }
        assert_eq!(of(&w[2..7]), p.get(2, 5));
    }
}
