//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use minors_core::constructions::{
    build_cs_function, enumerate_z, extract_cs_spec, inv_from_levels, invariance_shapes, witness_new,
    witness_similar_pair, z_levels, CsSpec,
};
use minors_core::functions::{
    characterize_cs_by_minors, characterize_ofo_by_minors, classify, deck, determined_by,
    has_unique_identification_minor, invariance_group, is_similar, is_totally_symmetric, FiniteFunction,
};
use minors_core::patterns::{
    all_subgroups, comp, is_l_equalizing, listed_differentiating, patterns_of_set, symmetric_group_elements,
    Permutation,
};
use minors_core::strings::{all_tuples, closure_classes, compose_tuple, cs, index_singles, singles, Relation, Tuple};
use minors_core::{Domain, Invariant, PermGroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn perm(w: &str) -> Permutation {
    Permutation::parse(w).unwrap()
}

fn word(letters: &str) -> Tuple {
    Tuple::parse(letters, None).unwrap()
}

fn c1_examples() -> Outcome {
    let cases = [
        ("mathematician", "(<1^3,3,5,8,9^2,13^2,14,20^2>, 8 5 3 14)"),
        ("unprosperousness", "(<5^2,14^2,15^2,16^2,18^2,19^4,21^2>, ε)"),
        ("circumlocution", "(<3^3,9^2,12,13,14,15^2,18,20,21^2>, 18 13 12 20 14)"),
        ("ambidextrously", "(<1,2,4,5,9,12,13,15,18,19,20,21,24,25>, 1 13 2 9 4 5 24 20 18 15 21 19 12 25)"),
    ];
    for (w, expected) in cases {
        let got = cs(&word(w)).to_string();
        ensure!(got == expected, "cs({w}) = {got}, expected {expected}");
    }
    ensure!(singles(&word("circumlocution")).to_letters() == "rmltn", "circumlocution singles");
    ensure!(singles(&word("mathematician")).to_letters() == "hecn", "mathematician singles");
    let sigma = perm("54238617");
    let tau: Vec<usize> = sigma.images().iter().map(|&x| x as usize).collect();
    let a = Tuple::parse("1 2 2 3 4 5 5 5", Some(5)).unwrap();
    let b = Tuple::parse("1 2 3 2 4 5 2 6", Some(6)).unwrap();
    let a_sigma = compose_tuple(&a, &tau).unwrap();
    let b_sigma = compose_tuple(&b, &tau).unwrap();
    ensure!(a_sigma.word() == "43225515", "aσ = {}", a_sigma.word());
    ensure!(b_sigma.word() == "42236512", "bσ = {}", b_sigma.word());
    ensure!(singles(&a).word() == "134" && singles(&b).word() == "13456", "singles of a, b");
    let inv = sigma.inverse();
    let pre = |t: &Tuple| -> Vec<usize> {
        let mut s: Vec<usize> = index_singles(t).into_iter().map(|i| inv.apply(i)).collect();
        s.sort();
        s
    };
    let (s, t) = (pre(&a), pre(&b));
    ensure!(s == [0, 1, 6] && t == [0, 3, 4, 5, 6], "S = {s:?}, T = {t:?}");
    let (ps, pt) = (sigma.pattern_at(&s).unwrap(), sigma.pattern_at(&t).unwrap());
    ensure!(ps.to_string() == "321" && pt.to_string() == "32541", "σ_S = {ps}, σ_T = {pt}");
    ensure!(singles(&a_sigma).word() == "431" && singles(&b_sigma).word() == "43651", "singles(aσ), singles(bσ)");
    Ok("4 words, σ = 54238617 example".into())
}

fn same_partition(classes: Vec<Vec<Tuple>>, d: &Domain, inv: Invariant) -> bool {
    let fib = d.fibers(inv);
    let mut by_fiber: BTreeMap<u32, BTreeSet<usize>> = BTreeMap::new();
    for (i, &id) in fib.ids.iter().enumerate() {
        by_fiber.entry(id).or_default().insert(i);
    }
    let expected: BTreeSet<BTreeSet<usize>> = by_fiber.into_values().collect();
    let got: BTreeSet<BTreeSet<usize>> = classes
        .into_iter()
        .map(|c| c.iter().map(|t| d.index_of(t.entries())).collect())
        .collect();
    got == expected
}

fn c2_closures() -> Outcome {
    for (k, n) in [(3, 4), (2, 5)] {
        let d = Domain::shared(k, n).unwrap();
        ensure!(same_partition(closure_classes(k, n, Relation::Delta).unwrap(), &d, Invariant::Ofo), "~ vs ofo at k={k} n={n}");
        ensure!(same_partition(closure_classes(k, n, Relation::Pair).unwrap(), &d, Invariant::Cs), "~₂ vs cs at k={k} n={n}");
    }
    Ok("k=3,n=4 (81 tuples) and k=2,n=5 (32 tuples)".into())
}

/// The specs sampled for the unique-minor check, shared with the deck check.
fn c3_functions() -> Vec<FiniteFunction> {
    let mut out = Vec::new();
    for (seed, (k, n)) in [(3u64, (3, 4)), (4, (2, 5))] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            out.push(build_cs_function(&CsSpec::random(k, n, 2, &mut rng).unwrap()).unwrap());
        }
    }
    out
}

fn c3_cs_unique() -> Outcome {
    let fs = c3_functions();
    for f in &fs {
        ensure!(has_unique_identification_minor(f).unwrap().holds, "UIM fails for {f}");
    }
    Ok(format!("{} random cs-determined functions", fs.len()))
}

/// Every spec over `{1,2}` with two values, for `n ∈ {3,4,5}`.
fn c4_functions() -> Vec<FiniteFunction> {
    let mut out = Vec::new();
    for n in 3..=5 {
        let keys = enumerate_z(2, n);
        assert!(keys.len() <= 8);
        for code in 0u32..(1 << keys.len()) {
            let values = keys.iter().enumerate().map(|(i, k)| (k.clone(), (code >> i & 1) as u8)).collect();
            out.push(build_cs_function(&CsSpec::new(2, n, 2, values).unwrap()).unwrap());
        }
    }
    out
}

fn c4_cs_binary() -> Outcome {
    let fs = c4_functions();
    for f in &fs {
        ensure!(is_totally_symmetric(f).unwrap(), "not totally symmetric: {f}");
    }
    Ok(format!("{} specs exhaustively", fs.len()))
}

fn c5_witness_new() -> Outcome {
    let f = witness_new(3, 4).unwrap();
    ensure!(determined_by(&f, Invariant::Cs), "not cs-determined");
    ensure!(invariance_group(&f).unwrap().is_trivial(), "invariance group not trivial");
    for sigma in symmetric_group_elements(4).iter() {
        ensure!(!determined_by(&f.permuted(sigma), Invariant::Ofo), "f∘σ̂ ofo-determined for σ = {sigma}");
    }
    ensure!(has_unique_identification_minor(&f).unwrap().holds, "UIM fails");
    Ok("cs-determined, Inv trivial, 24/24 permutations not ofo-determined, UIM".into())
}

fn c6_characterizations() -> Outcome {
    let check = |f: &FiniteFunction| -> Outcome {
        ensure!(
            characterize_ofo_by_minors(f).unwrap() == determined_by(f, Invariant::Ofo),
            "ofo characterization disagrees on {f}"
        );
        ensure!(
            characterize_cs_by_minors(f).unwrap() == determined_by(f, Invariant::Cs),
            "cs characterization disagrees on {f}"
        );
        Ok(String::new())
    };
    let (mut ofo, mut csd) = (0, 0);
    for code in 0u32..65536 {
        let table = (0..16).map(|i| (code >> i & 1) as u8).collect();
        let f = FiniteFunction::new(2, 4, 2, table).unwrap();
        check(&f)?;
        ofo += usize::from(determined_by(&f, Invariant::Ofo));
        csd += usize::from(determined_by(&f, Invariant::Cs));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..500 {
        // Two thirds of the sample are built cs- or ofo-determined so both verdicts occur.
        let f = match i % 3 {
            0 => FiniteFunction::random(3, 4, 2, &mut rng).unwrap(),
            1 => build_cs_function(&CsSpec::random(3, 4, 2, &mut rng).unwrap()).unwrap(),
            _ => {
                let vals: Vec<u8> = (0..81).map(|_| rng.gen_range(0..2)).collect();
                FiniteFunction::from_fn(3, 4, 2, |a| {
                    let o: Vec<u8> = a.iter().copied().fold(Vec::new(), |mut acc, x| {
                        if !acc.contains(&x) {
                            acc.push(x);
                        }
                        acc
                    });
                    vals[o.iter().fold(0usize, |s, &x| s * 3 + x as usize)]
                })
                .unwrap()
            }
        };
        check(&f)?;
    }
    Ok(format!("65536 at k=2,n=4 ({ofo} ofo-, {csd} cs-determined) + 500 at k=3,n=4"))
}

fn c7_classes() -> Outcome {
    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for code in 0u32..65536 {
        let table = (0..16).map(|i| (code >> i & 1) as u8).collect();
        let f = FiniteFunction::new(2, 4, 2, table).unwrap();
        let c = classify(&f).unwrap();
        for (name, on) in [
            ("OFO", c.ofo),
            ("CS", c.cs),
            ("2ST", c.two_set_transitive),
            ("SYMM", c.symmetric),
            ("SUPP", c.supp),
        ] {
            *sizes.entry(name).or_default() += usize::from(on);
        }
        ensure!(c.cs == c.symmetric, "CS ≠ SYMM at {f}");
        ensure!(!c.symmetric || c.two_set_transitive, "SYMM ⊄ 2ST at {f}");
        ensure!(!c.supp || (c.ofo && c.cs && c.two_set_transitive), "SUPP ⊄ OFO∩CS∩2ST at {f}");
        ensure!((c.ofo && c.cs) == c.supp, "OFO∩CS ≠ SUPP at {f}");
        ensure!((c.two_set_transitive && c.cs) == c.symmetric, "2ST∩CS ≠ SYMM at {f}");
        ensure!((c.two_set_transitive && c.ofo) == c.supp, "2ST∩OFO ≠ SUPP at {f}");
    }
    Ok(format!("65536 functions, class sizes {sizes:?}"))
}

fn c8_l_diff() -> Outcome {
    for n in 2..=6 {
        let diff2: Vec<Permutation> = symmetric_group_elements(n)
            .iter()
            .filter(|s| !is_l_equalizing(s, 2).unwrap().equalizing)
            .cloned()
            .collect();
        ensure!(diff2 == vec![Permutation::descending(n)], "2-differentiating at n={n}: {diff2:?}");
    }
    for n in 1..=6 {
        let eq: Vec<Permutation> = symmetric_group_elements(n)
            .iter()
            .filter(|s| is_l_equalizing(s, n).unwrap().equalizing)
            .cloned()
            .collect();
        ensure!(eq == vec![Permutation::identity(n)], "n-equalizing at n={n}: {eq:?}");
    }
    let mut listed = 0;
    for ell in [3, 4] {
        for sigma in listed_differentiating(5, ell).unwrap() {
            ensure!(!is_l_equalizing(&sigma, ell).unwrap().equalizing, "{sigma} is {ell}-equalizing");
            listed += 1;
        }
    }
    Ok(format!("(ii),(iv) for n ≤ 6; (iii) {listed} listed permutations at n=5"))
}

fn c9_specs() -> Vec<CsSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut out: Vec<CsSpec> = (0..100).map(|_| CsSpec::random(3, 4, 2, &mut rng).unwrap()).collect();
    out.extend((0..25).map(|_| CsSpec::random(3, 5, 2, &mut rng).unwrap()));
    out
}

fn c9_inv_from_levels() -> Outcome {
    let mut orders = BTreeMap::new();
    for spec in c9_specs() {
        let brute = invariance_group(&build_cs_function(&spec).unwrap()).unwrap();
        let levels = inv_from_levels(&spec).unwrap();
        ensure!(brute == levels, "mismatch: brute {brute} vs levels {levels}");
        *orders.entry((spec.n(), brute.order())).or_insert(0usize) += 1;
    }
    Ok(format!("125 specs, (n, |Inv|) counts {orders:?}"))
}

fn c10_shapes() -> Outcome {
    let shapes = invariance_shapes(3, 4).unwrap();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for spec in c9_specs().into_iter().filter(|s| s.n() == 4) {
        let g: PermGroup = inv_from_levels(&spec).unwrap();
        let name = shapes.iter().find(|(_, h)| *h == g).map(|(n, _)| n.clone());
        ensure!(name.is_some(), "group {g} is not a listed shape");
        *seen.entry(name.unwrap()).or_default() += 1;
    }
    Ok(format!("{} distinct listed shapes at n=4, observed {seen:?}", shapes.len()))
}

fn c11_similar_pair() -> Outcome {
    let sigma = perm("4321");
    let pair = witness_similar_pair(&sigma, 2, 3, 4).unwrap();
    let tau: Vec<usize> = sigma.images().iter().map(|&x| x as usize).collect();
    for a in all_tuples(3, 4).unwrap() {
        let moved = compose_tuple(&a, &tau).unwrap();
        ensure!(pair.g.eval(&a).unwrap() == pair.f.eval(&moved).unwrap(), "g ≠ f∘σ̂ at {a}");
    }
    ensure!(pair.f != pair.g, "f = g");
    ensure!(determined_by(&pair.f, Invariant::Cs) && determined_by(&pair.g, Invariant::Cs), "not cs-determined");
    ensure!(is_similar(&pair.f, &pair.g).is_some(), "not similar");

    let sigma = perm("2341");
    for ell in z_levels(3, 4).iter() {
        ensure!(is_l_equalizing(&sigma, ell).unwrap().equalizing, "2341 not {ell}-equalizing");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut found, mut tried) = (0, 0);
    while found < 200 {
        tried += 1;
        ensure!(tried < 2_000_000, "only {found} transported pairs after {tried} samples");
        let f = build_cs_function(&CsSpec::random(3, 4, 2, &mut rng).unwrap()).unwrap();
        let g = f.permuted(&sigma);
        if extract_cs_spec(&g).is_some() {
            ensure!(f == g, "distinct pair for an equalizing σ: {f} / {g}");
            found += 1;
        }
    }
    Ok(format!("4321 pair verified on 81 tuples; 200 transported pairs for 2341 ({tried} samples)"))
}

fn c12_comp_galois() -> Outcome {
    let subgroups = all_subgroups(3).unwrap();
    ensure!(subgroups.len() == 6, "{} subgroups of S_3", subgroups.len());
    for g in &subgroups {
        let c = comp(5, 3, g.elements()).unwrap();
        ensure!(c.contains(&Permutation::identity(5)), "identity missing from comp(5, {g})");
        for x in &c {
            ensure!(c.contains(&x.inverse()), "comp(5, {g}) not closed under inverse");
            for y in &c {
                ensure!(c.contains(&x.compose(y)), "comp(5, {g}) not closed under composition");
            }
        }
    }
    let s3 = symmetric_group_elements(3);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let s: BTreeSet<Permutation> = s3.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        let t: BTreeSet<Permutation> = s3.iter().filter(|p| s.contains(p) || rng.gen_bool(0.5)).cloned().collect();
        let (cs_, ct) = (comp(5, 3, &s).unwrap(), comp(5, 3, &t).unwrap());
        ensure!(cs_.is_subset(&ct), "monotonicity fails for {s:?} ⊆ {t:?}");
        ensure!(patterns_of_set(&cs_, 3).unwrap().is_subset(&s), "Pat∘Comp not contained in {s:?}");
    }
    Ok("6 subgroups, 50 random subsets".into())
}

fn c13_once_sigma() -> Outcome {
    let elements = symmetric_group_elements(4);
    let mut checked = 0;
    for sigma in elements.iter() {
        let tau: Vec<usize> = sigma.images().iter().map(|&x| x as usize).collect();
        let inv = sigma.inverse();
        for a in all_tuples(3, 4).unwrap() {
            let mut s: Vec<usize> = index_singles(&a).into_iter().map(|i| inv.apply(i)).collect();
            s.sort();
            let lhs = singles(&compose_tuple(&a, &tau).unwrap());
            let rhs = if s.is_empty() {
                singles(&a)
            } else {
                let p: Vec<usize> = sigma.pattern_at(&s).unwrap().images().iter().map(|&x| x as usize).collect();
                compose_tuple(&singles(&a), &p).unwrap()
            };
            ensure!(lhs == rhs, "once-sigma fails at a = {a}, σ = {sigma}");
            checked += 1;
        }
    }
    for pi in elements.iter() {
        for tau in elements.iter() {
            for mask in 1u32..16 {
                let s: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
                let mut ts: Vec<usize> = s.iter().map(|&i| tau.apply(i)).collect();
                ts.sort();
                let lhs = pi.compose(tau).pattern_at(&s).unwrap();
                let rhs = pi.pattern_at(&ts).unwrap().compose(&tau.pattern_at(&s).unwrap());
                ensure!(lhs == rhs, "composition lemma fails at π = {pi}, τ = {tau}, S = {s:?}");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} cases"))
}

fn c14_decks() -> Outcome {
    let mut uim: Vec<FiniteFunction> = c3_functions();
    uim.extend(c4_functions());
    uim.push(witness_new(3, 4).unwrap());
    for f in &uim {
        let d = deck(f).unwrap();
        let n = f.n();
        ensure!(d.distinct() == 1 && d.total() == n * (n - 1) / 2, "deck of UIM function {f}: {d:?}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for i in 0..100 {
        let (k, n) = if i % 2 == 0 { (2, 4) } else { (3, 4) };
        let f = FiniteFunction::random(k, n, 2, &mut rng).unwrap();
        let sigma = &symmetric_group_elements(n)[rng.gen_range(0..24)];
        let g = f.permuted(sigma);
        ensure!(is_similar(&f, &g).is_some(), "constructed pair not similar");
        ensure!(deck(&f).unwrap() == deck(&g).unwrap(), "decks differ for similar pair");
    }
    Ok(format!("{} UIM decks, 100 similar pairs", uim.len()))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, u64, fn() -> Outcome); 14] = [
        (1, "worked-example replay", 1, c1_examples),
        (2, "closure partitions equal ofo/cs fibers", 5, c2_closures),
        (3, "cs-determined functions have a unique identification minor", 30, c3_cs_unique),
        (4, "binary cs-determined functions are totally symmetric", 10, c4_cs_binary),
        (5, "witness_new(3,4)", 5, c5_witness_new),
        (6, "minor characterizations of ofo and cs", 60, c6_characterizations),
        (7, "class inclusions at k=2, n=4", 120, c7_classes),
        (8, "l-differentiating classification", 60, c8_l_diff),
        (9, "inv_from_levels equals brute force", 120, c9_inv_from_levels),
        (10, "observed invariance groups are listed shapes", 10, c10_shapes),
        (11, "distinct similar cs-determined pairs", 30, c11_similar_pair),
        (12, "Comp groups and Galois properties", 10, c12_comp_galois),
        (13, "once-sigma and pattern composition", 60, c13_once_sigma),
        (14, "deck sanity", 30, c14_decks),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, bound, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| *f == id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(bound) => {
                Err(format!("{detail}; exceeded {bound} s bound"))
            }
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => {
                failed += 1;
                ("FAIL", d.clone())
            }
        };
        println!("criterion {id:>2} [{tag}] {name} ({:.2} s): {detail}", elapsed.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
