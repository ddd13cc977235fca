use itertools::Itertools;
use proptest::prelude::*;

use sadic::coding::inflate;
use sadic::factors::LocalCode;
use sadic::language::stable_language;
use sadic::recognize::{covering_length, recognizability_check, Verdict};
use sadic::{corpus, words, Alphabet, DirectiveSequence, Morphism, Word};

fn word(k: usize, len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..k as u8, len)
}

fn alphabet(prefix: &str, n: usize) -> Alphabet {
    Alphabet::new((0..n).map(|i| format!("{prefix}{i}"))).unwrap()
}

/// Morphisms `n_src` letters to `n_tgt` letters with images of length 1..=max.
fn morphism(n_src: usize, n_tgt: usize, max: usize) -> impl Strategy<Value = Morphism> {
    prop::collection::vec(prop::collection::vec(0..n_tgt, 1..=max), n_src)
        .prop_map(move |images| Morphism::new(alphabet("a", n_src), alphabet("b", n_tgt), images).unwrap())
}

/// Morphisms `{a, b} → {a, b}`.
fn binary(max: usize) -> impl Strategy<Value = Morphism> {
    prop::collection::vec(prop::collection::vec(0..2usize, 1..=max), 2).prop_map(|images| {
        let ab = Alphabet::from_chars("ab").unwrap();
        Morphism::new(ab.clone(), ab, images).unwrap()
    })
}

fn chain() -> impl Strategy<Value = (Morphism, Morphism, Morphism)> {
    (2..=3usize, 2..=3usize, 2..=3usize, 2..=3usize).prop_flat_map(|(a, b, c, d)| {
        let f = prop::collection::vec(prop::collection::vec(0..a, 1..=3), b)
            .prop_map(move |im| Morphism::new(alphabet("b", b), alphabet("a", a), im).unwrap());
        let g = prop::collection::vec(prop::collection::vec(0..b, 1..=3), c)
            .prop_map(move |im| Morphism::new(alphabet("c", c), alphabet("b", b), im).unwrap());
        let h = prop::collection::vec(prop::collection::vec(0..c, 1..=3), d)
            .prop_map(move |im| Morphism::new(alphabet("d", d), alphabet("c", c), im).unwrap());
        (f, g, h)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn least_period_is_the_smallest_period(w in word(3, 1..40)) {
        let p = words::least_period(&w).unwrap();
        prop_assert!(words::has_period(&w, p));
        prop_assert!((1..p).all(|q| !words::has_period(&w, q)));
    }

    #[test]
    fn local_periods_are_bounded_and_some_cut_is_critical(w in word(3, 2..40)) {
        let p = words::least_period(&w).unwrap();
        for pos in 1..w.len() {
            let local = words::local_period(&w, pos).unwrap();
            prop_assert!(local >= 1 && local <= p);
        }
        let critical = words::critical_positions(&w).unwrap();
        prop_assert!(!critical.is_empty());
        prop_assert!(critical.len() < w.len());
    }

    #[test]
    fn squares_have_local_period_at_most_the_root(root in word(2, 1..8), tail in word(2, 0..8)) {
        let w: Vec<u8> = root.iter().chain(&root).chain(&tail).copied().collect();
        prop_assert!(words::local_period(&w, root.len()).unwrap() <= root.len());
    }

    #[test]
    fn composition_is_associative((f, g, h) in chain()) {
        let left = Morphism::compose(&Morphism::compose(&f, &g).unwrap(), &h).unwrap();
        let right = Morphism::compose(&f, &Morphism::compose(&g, &h).unwrap()).unwrap();
        prop_assert!(left.same_as(&right));
    }

    #[test]
    fn composition_acts_by_substitution((f, g, _h) in chain(), w in word(2, 1..10)) {
        let w: Word = w.into_iter().map(usize::from).collect();
        let fg = Morphism::compose(&f, &g).unwrap();
        prop_assert_eq!(fg.apply(&w), f.apply(&g.apply(&w)));
    }

    #[test]
    fn inflation_keeps_lengths(sigma in morphism(3, 2, 5), w in word(3, 1..12)) {
        let w: Word = w.into_iter().map(usize::from).collect();
        let i = inflate(&sigma);
        prop_assert_eq!(i.apply(&w).len(), sigma.apply(&w).len());
        prop_assert!(i.images().iter().enumerate().all(|(a, img)| img.iter().all(|&c| c == a)));
    }

    #[test]
    fn reversal_is_an_involution(sigma in morphism(3, 3, 4), w in word(3, 1..10)) {
        let w: Word = w.into_iter().map(usize::from).collect();
        prop_assert!(sigma.reversed().reversed().same_as(&sigma));
        let back: Word = w.iter().rev().copied().collect();
        let mut image = sigma.reversed().apply(&back);
        image.reverse();
        prop_assert_eq!(image, sigma.apply(&w));
    }

    #[test]
    fn morphism_text_round_trips(sigma in morphism(3, 3, 4)) {
        let back = Morphism::parse(&sigma.to_text()).unwrap();
        prop_assert!(back.same_as(&sigma));
    }

    #[test]
    fn properness_radius_matches_its_definition(sigma in morphism(3, 2, 5)) {
        let r = sigma.properness_radius();
        prop_assert!(sigma.is_r_proper(r));
        prop_assert!(!sigma.is_r_proper(r + 1));
        prop_assert_eq!(sigma.is_proper(), r >= 1);
    }

    #[test]
    fn peeling_recomposes(sigma in morphism(3, 2, 4)) {
        use sadic::Peel;
        for (a, b) in (0..3).tuple_combinations() {
            for case in [Peel::Equal { a, b }, Peel::Prefix { a, b }, Peel::Prefix { a: b, b: a }] {
                if let Ok((rest, e)) = sigma.peel(case) {
                    prop_assert!(Morphism::compose(&rest, &e).unwrap().same_as(&sigma));
                }
            }
        }
    }

    #[test]
    fn local_code_text_round_trips(radius in 0..=2usize, seed in prop::collection::vec(0..3usize, 1..=125)) {
        let domain = Alphabet::from_chars("ab").unwrap();
        let codomain = Alphabet::from_chars("xyz").unwrap();
        let windows: Vec<Word> = (0..2 * radius + 1).map(|_| 0..2).multi_cartesian_product().collect();
        let table = windows.into_iter().zip(seed.iter().cycle()).map(|(w, &c)| (w, c)).collect();
        let code = LocalCode::new(radius, domain.clone(), codomain, table).unwrap();
        let back = LocalCode::parse(&code.to_text(), &domain).unwrap();
        prop_assert_eq!(back.len(), code.len());
        for w in (0..2 * radius + 3).map(|_| 0..2).multi_cartesian_product().take(32) {
            prop_assert_eq!(
                back.apply(&w).map(|v| back.codomain().spell(&v)).unwrap(),
                code.apply(&w).map(|v| code.codomain().spell(&v)).unwrap()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn recognizability_is_monotone_in_the_radius(sigma in binary(4)) {
        let fib = corpus::load("fibonacci").unwrap();
        let lx = stable_language(&fib, 1, covering_length(&sigma, 4)).unwrap();
        let verdicts: Vec<bool> = (0..=4)
            .map(|r| recognizability_check(&sigma, &lx, r).unwrap().verdict == Verdict::RecognizableAtR)
            .collect();
        prop_assert!(verdicts.windows(2).all(|w| !w[0] || w[1]), "{:?}", verdicts);
    }

    #[test]
    fn language_tables_are_factor_closed(sigma in binary(3).prop_filter("expanding", |s| s.max_len() >= 2)) {
        let d = DirectiveSequence::stationary(sigma).unwrap().with_cap(12);
        if let Ok(lx) = stable_language(&d, 0, 5) {
            for w in &lx.words {
                for (i, j) in (0..=w.len()).tuple_combinations() {
                    prop_assert!(lx.contains(&w[i..j]), "{:?} in {:?}", &w[i..j], w);
                }
            }
        }
    }
}
