use serde_json::{json, Value};

use sadic::coding::{build_return_coding, recognizable_tower, return_words, Marker, Source};
use sadic::decompose::{factorize_through, lower_rank_aligned, lower_rank_split, Decomposition, Side};
use sadic::factors::{self, asymptotic_candidates, covering_symbol_profile, sample_words, transported_sequence, transported_structure};
use sadic::language::{level_language, properize, stable_language, trim_letter_onto, ContractionRule, LanguageTable};
use sadic::recognize::{covering_length, minimal_constant, recognizability_check, Interpretation, RecognizabilityReport, Verdict};
use sadic::{corpus, words, Alphabet, Morphism, Peel};

use crate::input::{self, usage, CliResult};
use crate::report::{to_value, Check, Outcome};
use crate::{Command, CorpusAction};

pub fn run(command: &Command, seed: u64) -> CliResult<Outcome> {
    match command {
        Command::Period { word } => period(word),
        Command::Critical { word } => critical(word),
        Command::Compose { morphisms } => compose(morphisms),
        Command::Classify { morphism, r } => classify(morphism, *r),
        Command::Peel { morphism, case, a, b, s_len } => peel(morphism, case, a, b.as_deref(), *s_len),
        Command::LowerRank { morphisms, u, v, side, split } => lower_rank(morphisms, u, v, side, *split),
        Command::FactorizeThrough { phi, tau, u, w } => factorize(phi, tau, u, w),
        Command::Language { dseq, level, len, depth } => language(dseq, *level, *len, *depth),
        Command::Recognizable { morphism, lang, level, r, cap } => recognizable(morphism, lang, *level, *r, *cap),
        Command::ReturnWords { dseq, marker, level, horizon, coding } => return_words_cmd(dseq, marker, *level, *horizon, *coding),
        Command::RecoTower { dseq, levels, out } => reco_tower(dseq, *levels, out.as_deref()),
        Command::Properize { dseq, rule } => properize_cmd(dseq, rule),
        Command::Factor { dseq, code, levels } => factor(dseq, code, *levels),
        Command::Fibers { dseq, code, len, level, samples } => fibers(dseq, code, *len, *level, *samples, seed),
        Command::Asymptotic { dseq, m, side, level } => asymptotic(dseq, *m, side, *level),
        Command::Corpus { action: CorpusAction::List } => Ok(Outcome::default().results(json!({ "entries": corpus::names() }))),
    }
}

fn chars(word: &str) -> CliResult<Vec<char>> {
    if word.is_empty() {
        return Err(sadic::Error::EmptyWord.into());
    }
    Ok(word.chars().collect())
}

fn period(word: &str) -> CliResult<Outcome> {
    let w = chars(word)?;
    let p = words::least_period(&w)?;
    Ok(Outcome::default().input(word).results(json!({ "least_period": p, "length": w.len() })))
}

fn critical(word: &str) -> CliResult<Outcome> {
    let w = chars(word)?;
    let p = words::least_period(&w)?;
    let locals = (1..w.len()).map(|pos| words::local_period(&w, pos)).collect::<sadic::Result<Vec<_>>>()?;
    let positions = words::critical_positions(&w)?;
    let bounded = locals.iter().all(|&l| l <= p);
    Ok(Outcome::default()
        .input(word)
        .results(json!({
            "least_period": p,
            "local_periods": locals,
            "critical_positions": positions,
        }))
        .check(Check::new("critical_nonempty", !positions.is_empty(), format!("{} critical positions", positions.len())))
        .check(Check::new("local_at_most_least", bounded, format!("least period {p}"))))
}

fn compose(args: &[String]) -> CliResult<Outcome> {
    let ms = args.iter().map(|a| input::morphism(a)).collect::<CliResult<Vec<_>>>()?;
    let out = Morphism::compose_chain(&ms)?;
    let mut o = Outcome::default();
    for a in args {
        o = o.input(a);
    }
    Ok(o.results(json!({ "morphism": out, "metrics": out.metrics() })))
}

fn classify(arg: &str, r: usize) -> CliResult<Outcome> {
    let m = input::morphism(arg)?;
    Ok(Outcome::default().input(arg).param("r", r).results(json!({
        "classification": m.classify(r),
        "metrics": m.metrics(),
        "properness_radius": m.properness_radius(),
    })))
}

fn recomposition(rest: &Morphism, e: &Morphism, sigma: &Morphism) -> CliResult<Check> {
    let back = Morphism::compose(rest, e)?;
    Ok(Check::new("recomposition", back.same_as(sigma), "letterwise"))
}

fn peel(arg: &str, case: &str, a: &str, b: Option<&str>, s_len: Option<usize>) -> CliResult<Outcome> {
    let sigma = input::morphism(arg)?;
    let src = sigma.source();
    let a_idx = input::letter(src, a)?;
    let need_b = || -> CliResult<usize> { input::letter(src, b.ok_or_else(|| usage("--b is required for this case"))?) };
    let which = match case {
        "equal" => Peel::Equal { a: a_idx, b: need_b()? },
        "prefix" => Peel::Prefix { a: a_idx, b: need_b()? },
        "interior" => Peel::Interior {
            a: a_idx,
            s_len: s_len.ok_or_else(|| usage("--s-len is required for the interior case"))?,
        },
        other => return Err(usage(format!("unknown peel case `{other}`"))),
    };
    let (rest, e) = sigma.peel(which)?;
    let check = recomposition(&rest, &e, &sigma)?;
    Ok(Outcome::default()
        .input(arg)
        .param("case", case)
        .param("a", a)
        .param("b", b)
        .param("s_len", s_len)
        .results(json!({ "rest": rest, "elementary": e }))
        .check(check))
}

fn side(text: &str) -> CliResult<Side> {
    match text {
        "prefix" => Ok(Side::Prefix),
        "suffix" => Ok(Side::Suffix),
        other => Err(usage(format!("side must be `prefix` or `suffix`, got `{other}`"))),
    }
}

fn decomposition_checks(d: &Decomposition, family: &[Morphism]) -> Vec<Check> {
    vec![
        Check::new("recomposition", d.verify(family).is_ok(), "p_j q equals member j letterwise"),
        Check::new("q_letter_onto", d.q.is_letter_onto(), d.q.rule_strings().join(", ")),
    ]
}

fn lower_rank(args: &[String], u: &str, v: &str, side_text: &str, split: Option<usize>) -> CliResult<Outcome> {
    let family = args.iter().map(|a| input::morphism(a)).collect::<CliResult<Vec<_>>>()?;
    let src = family[0].source().clone();
    let (uw, vw) = (input::word(&src, u)?, input::word(&src, v)?);
    let s = side(side_text)?;
    let d = match split {
        Some(s_len) => {
            if family.len() != 1 {
                return Err(usage("--split takes exactly one morphism"));
            }
            lower_rank_split(&family[0], &uw, &vw, s_len, s)?
        }
        None => lower_rank_aligned(&family, &uw, &vw, s)?,
    };
    let mut o = Outcome::default();
    for a in args {
        o = o.input(a);
    }
    o = o.param("u", u).param("v", v).param("side", side_text).param("split", split);
    for c in decomposition_checks(&d, &family) {
        o = o.check(c);
    }
    let rank = match split {
        None => Check::new(
            "rank_drop",
            d.q.target().len() < src.len(),
            format!("#C = {}, #A = {}", d.q.target().len(), src.len()),
        ),
        Some(_) => Check::new(
            "length_drop",
            d.p().total_len() < family[0].total_len() && d.q.target().len() <= src.len(),
            format!("|p| = {}, |sigma| = {}", d.p().total_len(), family[0].total_len()),
        ),
    };
    Ok(o.check(rank).results(&d))
}

fn factorize(phi_arg: &str, tau_arg: &str, u: &str, w: &str) -> CliResult<Outcome> {
    let phi = input::morphism(phi_arg)?;
    let tau = input::morphism(tau_arg)?;
    let uw = input::word(phi.source(), u)?;
    let ww = input::word(tau.source(), w)?;
    let d = factorize_through(&phi, &tau, &uw, &ww)?;
    let mut o = Outcome::default().input(phi_arg).input(tau_arg).param("u", u).param("w", w);
    for c in decomposition_checks(&d, std::slice::from_ref(&tau)) {
        o = o.check(c);
    }
    Ok(o.check(Check::new("q_proper", d.q.is_proper(), format!("radius {}", d.q.properness_radius())))
        .check(Check::new(
            "alphabet_bound",
            d.q.target().len() <= phi.source().len(),
            format!("#D = {}, #A = {}", d.q.target().len(), phi.source().len()),
        ))
        .results(&d))
}

fn table_json(t: &LanguageTable) -> Value {
    json!({
        "level": t.level,
        "max_len": t.max_len,
        "depth": t.depth,
        "alphabet": t.alphabet.letters(),
        "count": t.words.len(),
        "words": t.spelled(),
        "stabilized": t.stabilized,
        "monotone": t.monotone,
    })
}

fn language(arg: &str, level: usize, len: usize, depth: Option<usize>) -> CliResult<Outcome> {
    let d = input::sequence(arg)?;
    let t = match depth {
        Some(n) => level_language(&d, level, len, n)?,
        None => stable_language(&d, level, len)?,
    };
    Ok(Outcome::default()
        .input(arg)
        .param("level", level)
        .param("len", len)
        .param("depth", depth)
        .results(table_json(&t))
        .check(Check::new("stabilized", t.stabilized, format!("depth {}", t.depth))))
}

fn interpretation_json(i: &Interpretation, sigma: &Morphism) -> Value {
    json!({
        "window": sigma.target().spell(&i.window),
        "offset": i.offset,
        "letter": sigma.source().name(i.letter),
        "local_cuts": i.local_cuts,
    })
}

fn report_json(r: &RecognizabilityReport, sigma: &Morphism) -> (Value, Check) {
    let witness = r
        .witness
        .as_ref()
        .map(|(x, y)| json!([interpretation_json(x, sigma), interpretation_json(y, sigma)]));
    let value = json!({
        "radius": r.radius,
        "verdict": r.verdict,
        "table_size": r.table_size,
        "witness": witness,
    });
    let mut check = Check::new(
        "recognizable",
        r.verdict == Verdict::RecognizableAtR,
        format!("radius {}, {} windows", r.radius, r.table_size),
    );
    if let Some(w) = witness {
        check = check.with_witness(w);
    }
    (value, check)
}

fn recognizable(arg: &str, lang: &str, level: usize, r: Option<usize>, cap: usize) -> CliResult<Outcome> {
    let sigma = input::morphism(arg)?;
    let d = input::sequence(lang)?;
    let reach = r.unwrap_or(cap);
    let lx = stable_language(&d, level, covering_length(&sigma, reach))?;
    let report = match r {
        Some(r) => recognizability_check(&sigma, &lx, r)?,
        None => minimal_constant(&sigma, &lx, cap)?,
    };
    let (value, check) = report_json(&report, &sigma);
    Ok(Outcome::default()
        .input(arg)
        .input(lang)
        .param("level", level)
        .param("r", r)
        .param("cap", cap)
        .results(value)
        .check(check))
}

fn return_words_cmd(arg: &str, marker_text: &str, level: usize, horizon: usize, with_coding: bool) -> CliResult<Outcome> {
    let d = input::sequence(arg)?;
    let alphabet = d.alphabet(level)?.clone();
    let marker = Marker::parse(&alphabet, marker_text)?;
    let rw = return_words(&d, level, &marker, horizon)?;
    let spelled: Vec<String> = rw.words.iter().map(|w| alphabet.spell(w)).collect();
    let mut results = json!({
        "words": spelled,
        "min_gap": rw.min_gap,
        "max_gap": rw.max_gap,
        "occurrences": rw.occurrences,
        "horizon": rw.horizon,
        "stabilized": rw.stabilized,
    });
    let mut o = Outcome::default()
        .input(arg)
        .param("marker", marker_text)
        .param("level", level)
        .param("horizon", horizon)
        .param("coding", with_coding)
        .check(Check::new("stabilized", rw.stabilized, format!("horizon {horizon}")));
    if with_coding {
        let coding = build_return_coding(Source::Expansions { seq: &d, level }, &marker)?;
        for c in &coding.certificates {
            o = o.check(c.into());
        }
        results["coding"] = to_value(&coding);
    }
    Ok(o.results(results))
}

fn reco_tower(arg: &str, levels: usize, out: Option<&std::path::Path>) -> CliResult<Outcome> {
    let d = input::sequence(arg)?;
    let tower = recognizable_tower(&d, levels)?;
    if let Some(dir) = out {
        tower.write_dir(dir)?;
    }
    let mut o = Outcome::default().input(arg).param("levels", levels).results(&tower);
    for c in &tower.certificates {
        o = o.check(c.into());
    }
    Ok(o)
}

fn properize_cmd(arg: &str, rule_text: &str) -> CliResult<Outcome> {
    let rule = match rule_text {
        "twice" => ContractionRule::EveryWordTwice,
        "anchor" => ContractionRule::SharedAnchor,
        other => return Err(usage(format!("rule must be `twice` or `anchor`, got `{other}`"))),
    };
    let d = input::sequence(arg)?;
    let trimmed = trim_letter_onto(&d, d.depth())?;
    let p = properize(&trimmed, rule)?;
    let levels = p.sequence.listed();
    let proper = levels.iter().all(|m| m.is_proper() && m.min_len() >= 2);
    let bounded = levels.iter().enumerate().all(|(k, m)| {
        let below = trimmed.alphabet(p.cuts[(k + 1).min(p.cuts.len() - 1)]).map(Alphabet::len).unwrap_or(0);
        m.source().len() <= below * below
    });
    const CHECK_LEN: usize = 5;
    let mine = stable_language(&p.sequence, 0, CHECK_LEN)?;
    let theirs = stable_language(&trimmed, 0, CHECK_LEN)?;
    let respelled: Vec<String> = mine.spelled();
    let reference: std::collections::BTreeSet<String> = theirs.spelled().into_iter().collect();
    let included = respelled.iter().all(|w| reference.contains(w));
    let anchors: Vec<String> = p
        .anchors
        .iter()
        .zip(&p.cuts)
        .map(|(a, &c)| trimmed.alphabet(c).map(|al| al.spell(a)))
        .collect::<sadic::Result<_>>()?;
    Ok(Outcome::default()
        .input(arg)
        .param("rule", rule_text)
        .results(json!({
            "cuts": p.cuts,
            "anchors": anchors,
            "levels": levels,
            "repeat": p.sequence.repeat().to_string(),
            "alphabet_sizes": levels.iter().map(|m| m.source().len()).collect::<Vec<_>>(),
        }))
        .check(Check::new("proper_growing", proper, "every level proper with images of length >= 2"))
        .check(Check::new("pair_alphabet_bound", bounded, "#B_n <= #A_n^2"))
        .check(Check::new(
            "language_inclusion",
            included,
            format!("{} words of length <= {CHECK_LEN}", respelled.len()),
        )))
}

fn factor(arg: &str, code_arg: &str, levels: usize) -> CliResult<Outcome> {
    let d = input::sequence(arg)?;
    let code = input::code(code_arg, d.alphabet(0)?)?;
    let t = transported_structure(&d, &code, levels)?;
    let mut o = Outcome::default().input(arg).input(code_arg).param("levels", levels).results(&t);
    for c in t.certificates.iter().chain(&t.tower.certificates) {
        o = o.check(c.into());
    }
    Ok(o)
}

fn fibers(arg: &str, code_arg: &str, len: usize, level: usize, samples: usize, seed: u64) -> CliResult<Outcome> {
    let d = input::sequence(arg)?;
    let code = input::code(code_arg, d.alphabet(0)?)?;
    let trimmed = trim_letter_onto(&d, d.depth())?;
    let t = transported_sequence(&trimmed, &code, false)?;
    let seq = &t.sequence;
    let prefix = seq.compose_range(0, level)?;
    let rank = seq.alphabet(level)?.len();
    let lx = stable_language(seq, level, 8)?;
    let ys = sample_words(seq, 0, len, samples, seed)?;
    let profiles = ys
        .iter()
        .map(|y| covering_symbol_profile(&prefix, y, &lx))
        .collect::<sadic::Result<Vec<_>>>()?;
    let worst = profiles.iter().map(|p| p.min_count).max().unwrap_or(0);
    let rows: Vec<Value> = ys
        .iter()
        .zip(&profiles)
        .map(|(y, p)| {
            json!({
                "word": seq.alphabet(0).map(|a| a.spell(y)).unwrap_or_default(),
                "min_count": p.min_count,
                "argmin": p.argmin,
                "factorizations": p.factorizations.to_string(),
                "per_position_counts": p.per_position_counts,
            })
        })
        .collect();
    Ok(Outcome::default()
        .input(arg)
        .input(code_arg)
        .param("len", len)
        .param("level", level)
        .param("samples", samples)
        .param("seed", seed)
        .results(json!({ "profiles": rows, "alphabet_size": rank }))
        .check(Check::new(
            "covering_bound",
            worst <= rank,
            format!("largest min_count {worst}, #A_{level} = {rank}"),
        )))
}

fn asymptotic(arg: &str, m: usize, side_text: &str, level: usize) -> CliResult<Outcome> {
    let d = input::sequence(arg)?;
    let side: factors::Side = side_text.parse()?;
    let lx = stable_language(&d, level, m + 1)?;
    let c = asymptotic_candidates(&lx, m, side)?;
    let pairs: Vec<[String; 2]> = c
        .pairs
        .iter()
        .map(|(x, y)| [lx.alphabet.spell(x), lx.alphabet.spell(y)])
        .collect();
    Ok(Outcome::default()
        .input(arg)
        .param("m", m)
        .param("side", side_text)
        .param("level", level)
        .results(json!({
            "candidates": pairs,
            "count": pairs.len(),
            "specials": c.specials,
            "bound": c.bound,
        }))
        .check(Check::new(
            "count_bound",
            c.pairs.len() <= c.bound,
            format!("{} candidates, bound {}", c.pairs.len(), c.bound),
        )))
}
