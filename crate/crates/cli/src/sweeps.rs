use std::collections::BTreeSet;
use std::fmt::Write as _;

use minors_core::functions::{classify, determined_by, FiniteFunction};
use minors_core::patterns::{
    all_subgroups, comp, generate, is_l_equalizing, listed_differentiating, named_group, symmetric_group_elements,
    NamedGroup, PermGroup, Permutation,
};
use minors_core::Invariant;
use rayon::prelude::*;
use serde_json::json;

use crate::commands::identify;
use crate::report::{CliError, Outcome, SearchSpace};
use crate::Sweep;

const MAX_FUNCTIONS: u64 = 1 << 22;
const MAX_VIOLATIONS: usize = 10;

pub fn run(sweep: &Sweep, jobs: usize) -> Result<Outcome, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    pool.install(|| match sweep {
        Sweep::LDiff { n, ell, report_unlisted } => l_diff(*n, *ell, *report_unlisted),
        Sweep::Classes { k, n, m } => classes(*k, *n, *m),
        Sweep::Compn { ell, n } => compn(*ell, *n),
    })
}

fn words(set: &BTreeSet<Permutation>) -> String {
    set.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

fn l_diff(n: usize, ell: usize, report_unlisted: bool) -> Result<Outcome, CliError> {
    if ell == 0 || ell > n {
        return Err(CliError::Input(format!("need 1 <= l <= n, got l = {ell}, n = {n}")));
    }
    let all = symmetric_group_elements(n);
    let verdicts: Vec<(Permutation, bool)> = all
        .par_iter()
        .map(|s| is_l_equalizing(s, ell).map(|r| (s.clone(), r.equalizing)))
        .collect::<Result<_, _>>()?;
    let diff: BTreeSet<Permutation> = verdicts.into_iter().filter(|(_, eq)| !eq).map(|(s, _)| s).collect();

    let mut failures = Vec::new();
    let mut listed = None;
    if ell == 1 {
        if !diff.is_empty() {
            failures.push(format!("l = 1 but differentiating: {}", words(&diff)));
        }
    } else if ell == 2 {
        let expected = BTreeSet::from([Permutation::descending(n)]);
        if diff != expected {
            failures.push(format!("l = 2 differentiating set is {{{}}}, not {{desc_n}}", words(&diff)));
        }
    } else if ell == n {
        if diff.len() + 1 != all.len() || diff.contains(&Permutation::identity(n)) {
            failures.push("l = n should leave only asc_n equalizing".to_string());
        }
    } else {
        let l = listed_differentiating(n, ell)?;
        let missed: BTreeSet<_> = l.difference(&diff).cloned().collect();
        if !missed.is_empty() {
            failures.push(format!("listed but equalizing: {}", words(&missed)));
        }
        listed = Some(l);
    }

    let mut text = format!("l-diff sweep over S_{n} at l = {ell}\n");
    let _ = writeln!(text, "differentiating: {} of {}", diff.len(), all.len());
    if diff.len() <= 12 {
        let only = if diff.len() == 1 { " only" } else { "" };
        let _ = writeln!(text, "differentiating = {{{}}}{only}", words(&diff));
    }
    let mut unlisted_json = None;
    if report_unlisted {
        let covered = match &listed {
            Some(l) => l.clone(),
            None => diff.clone(),
        };
        let unlisted: BTreeSet<_> = diff.difference(&covered).cloned().collect();
        let _ = writeln!(text, "unlisted differentiating: {}", unlisted.len());
        for p in &unlisted {
            let _ = writeln!(text, "  {p}");
        }
        unlisted_json = Some(unlisted.iter().map(|p| p.to_string()).collect::<Vec<_>>());
    }
    for f in &failures {
        let _ = writeln!(text, "VIOLATED: {f}");
    }
    if failures.is_empty() {
        let _ = writeln!(text, "checks: ok");
    }
    Ok(Outcome {
        inputs: json!({ "n": n, "l": ell, "report_unlisted": report_unlisted }),
        result: json!({
            "differentiating_count": diff.len(),
            "differentiating": diff.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "listed_count": listed.as_ref().map(|l| l.len()),
            "unlisted": unlisted_json,
            "failures": failures,
        }),
        text,
        search_space: Some(SearchSpace::exhaustive(all.len() as u64, format!("all permutations in S_{n}"))),
        violated: !failures.is_empty(),
    })
}

const LABELS: [&str; 7] = ["UIM", "OFO", "CS", "2ST", "SYMM", "SUPP", "MS"];

#[derive(Clone, Default)]
struct Tally {
    counts: [u64; LABELS.len()],
    /// One counter per checked statement: how often it failed.
    failures: Vec<u64>,
    examples: Vec<(usize, Vec<u8>)>,
}

struct Check {
    name: &'static str,
    holds: fn(&[bool; LABELS.len()]) -> bool,
}

fn checks(k: usize, n: usize) -> Vec<Check> {
    let mut out = vec![
        Check { name: "SUPP ⊆ OFO", holds: |c| !c[5] || c[1] },
        Check { name: "SUPP ⊆ SYMM", holds: |c| !c[5] || c[4] },
        Check { name: "SYMM ⊆ CS", holds: |c| !c[4] || c[2] },
        Check { name: "SYMM ⊆ 2ST", holds: |c| !c[4] || c[3] },
        Check { name: "MS ⊆ CS", holds: |c| !c[6] || c[2] },
        Check { name: "OFO ⊆ UIM", holds: |c| !c[1] || c[0] },
        Check { name: "CS ⊆ UIM", holds: |c| !c[2] || c[0] },
        Check { name: "2ST ⊆ UIM", holds: |c| !c[3] || c[0] },
    ];
    if k == 2 {
        out.push(Check { name: "CS = SYMM", holds: |c| c[2] == c[4] });
    }
    if n >= k + 2 {
        out.push(Check { name: "OFO ∩ CS = SUPP", holds: |c| (c[1] && c[2]) == c[5] });
        out.push(Check { name: "2ST ∩ CS = SYMM", holds: |c| (c[3] && c[2]) == c[4] });
        out.push(Check { name: "2ST ∩ OFO = SUPP", holds: |c| (c[3] && c[1]) == c[5] });
    }
    out
}

fn decode(mut index: u64, m: usize, len: usize) -> Vec<u8> {
    (0..len)
        .map(|_| {
            let d = (index % m as u64) as u8;
            index /= m as u64;
            d
        })
        .collect()
}

fn classes(k: usize, n: usize, m: usize) -> Result<Outcome, CliError> {
    if k == 0 || n < 2 || m == 0 {
        return Err(CliError::Input("need k >= 1, n >= 2, m >= 1".into()));
    }
    let cells = k.checked_pow(n as u32).ok_or_else(|| CliError::Input("k^n overflows".into()))?;
    let total = (m as u64)
        .checked_pow(cells as u32)
        .filter(|&t| t <= MAX_FUNCTIONS)
        .ok_or_else(|| CliError::Input(format!("{m}^({k}^{n}) functions exceed the sweep limit of {MAX_FUNCTIONS}")))?;
    let checks = checks(k, n);
    let tally = (0..total)
        .into_par_iter()
        .try_fold(
            || Tally { failures: vec![0; checks.len()], ..Tally::default() },
            |mut t, index| -> Result<Tally, CliError> {
                let f = FiniteFunction::new(k, n, m, decode(index, m, cells))?;
                let c = classify(&f)?;
                let flags = [c.uim, c.ofo, c.cs, c.two_set_transitive, c.symmetric, c.supp, determined_by(&f, Invariant::Ms)];
                for (count, on) in t.counts.iter_mut().zip(flags) {
                    *count += u64::from(on);
                }
                for (i, check) in checks.iter().enumerate() {
                    if !(check.holds)(&flags) {
                        t.failures[i] += 1;
                        if t.examples.len() < MAX_VIOLATIONS {
                            t.examples.push((i, f.table().to_vec()));
                        }
                    }
                }
                Ok(t)
            },
        )
        .try_reduce(
            || Tally { failures: vec![0; checks.len()], ..Tally::default() },
            |mut a, b| {
                for (x, y) in a.counts.iter_mut().zip(b.counts) {
                    *x += y;
                }
                for (x, y) in a.failures.iter_mut().zip(&b.failures) {
                    *x += y;
                }
                a.examples.extend(b.examples);
                Ok(a)
            },
        )?;
    let mut examples = tally.examples;
    examples.sort();
    examples.truncate(MAX_VIOLATIONS);

    let mut text = format!("class sweep over all functions {{1..{k}}}^{n} -> {{1..{m}}}\n");
    for (name, count) in LABELS.iter().zip(tally.counts) {
        let _ = writeln!(text, "  {name:<5} {count}");
    }
    for (check, failed) in checks.iter().zip(&tally.failures) {
        let verdict = if *failed == 0 { "holds".to_string() } else { format!("FAILS for {failed} functions") };
        let _ = writeln!(text, "  {:<18} {verdict}", check.name);
    }
    for (i, table) in &examples {
        let values: Vec<String> = table.iter().map(|v| (v + 1).to_string()).collect();
        let _ = writeln!(text, "  counterexample to {}: {}", checks[*i].name, values.join(" "));
    }
    let violated = tally.failures.iter().any(|&x| x > 0);
    let sizes: serde_json::Map<_, _> = LABELS.iter().zip(tally.counts).map(|(n, c)| (n.to_string(), json!(c))).collect();
    let verdicts: Vec<_> = checks
        .iter()
        .zip(&tally.failures)
        .map(|(c, f)| json!({ "statement": c.name, "holds": *f == 0, "failures": f }))
        .collect();
    Ok(Outcome {
        inputs: json!({ "k": k, "n": n, "m": m }),
        result: json!({ "sizes": sizes, "inclusions": verdicts }),
        text,
        search_space: Some(SearchSpace::exhaustive(total, format!("all {m}^({k}^{n}) functions"))),
        violated,
    })
}

/// Largest `a` and `b` with `S_ℓ^{a,0} ≤ G` and `S_ℓ^{0,b} ≤ G`.
fn stabilizer_bounds(g: &PermGroup) -> Result<(usize, usize), CliError> {
    let ell = g.degree();
    let mut bounds = (0, 0);
    for a in 0..=ell {
        if named_group(NamedGroup::StabilizerAb { a, b: 0 }, ell)?.is_subgroup_of(g) {
            bounds.0 = a;
        }
        if named_group(NamedGroup::StabilizerAb { a: 0, b: a }, ell)?.is_subgroup_of(g) {
            bounds.1 = a;
        }
    }
    Ok(bounds)
}

struct CompnRow {
    group: PermGroup,
    comp: PermGroup,
    shape: Option<String>,
    transitive: bool,
    imprimitive: bool,
    has_cycle: bool,
    /// `Some(ok)` when the structural statement applies at this `n`.
    check: Option<bool>,
}

fn compn_row(g: PermGroup, n: usize) -> Result<CompnRow, CliError> {
    let ell = g.degree();
    let c = PermGroup::new(n, comp(n, ell, g.elements())?)?;
    let transitive = g.is_transitive();
    let imprimitive = g.is_imprimitive();
    let has_cycle = g.contains(&Permutation::natural_cycle(ell));
    let check = if transitive && (!imprimitive || has_cycle) {
        if n >= ell + 2 {
            let five = [
                NamedGroup::Symmetric,
                NamedGroup::Dihedral,
                NamedGroup::Cyclic,
                NamedGroup::DescPair,
                NamedGroup::Trivial,
            ];
            let mut ok = false;
            for name in five {
                ok |= named_group(name, n)? == c;
            }
            Some(ok)
        } else {
            None
        }
    } else if !transitive && n + 1 >= 2 * ell {
        let (a, b) = stabilizer_bounds(&g)?;
        let s = named_group(NamedGroup::StabilizerAb { a, b }, n)?;
        let mut gens = s.elements().clone();
        gens.insert(Permutation::descending(n));
        Some(c == s || c == generate(&gens)?)
    } else {
        None
    };
    Ok(CompnRow {
        shape: identify(&c),
        group: g,
        comp: c,
        transitive,
        imprimitive,
        has_cycle,
        check,
    })
}

fn compn(ell: usize, n: usize) -> Result<Outcome, CliError> {
    if ell == 0 || ell > n {
        return Err(CliError::Input(format!("need 1 <= l <= n, got l = {ell}, n = {n}")));
    }
    let subgroups = all_subgroups(ell)?;
    let count = subgroups.len();
    let rows: Vec<CompnRow> = subgroups
        .into_par_iter()
        .map(|g| compn_row(g, n))
        .collect::<Result<_, _>>()?;

    let mut text = format!("Comp^({n}) sweep over the {count} subgroups of S_{ell}\n");
    let mut json_rows = Vec::new();
    for r in &rows {
        let kind = match (r.transitive, r.imprimitive, r.has_cycle) {
            (false, _, _) => "intransitive",
            (true, true, false) => "imprimitive, no cycle",
            (true, true, true) => "imprimitive, cycle",
            (true, false, _) => "primitive",
        };
        let verdict = match r.check {
            Some(true) => "ok",
            Some(false) => "VIOLATED",
            None => "not covered",
        };
        let _ = writeln!(
            text,
            "  |G| = {:<3} {:<22} |Comp| = {:<5} {:<22} {verdict}",
            r.group.order(),
            kind,
            r.comp.order(),
            r.shape.as_deref().unwrap_or("unnamed"),
        );
        json_rows.push(json!({
            "group": r.group.elements().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "order": r.group.order(),
            "kind": kind,
            "comp_order": r.comp.order(),
            "shape": r.shape,
            "check": r.check,
        }));
    }
    let violated = rows.iter().any(|r| r.check == Some(false));
    Ok(Outcome {
        inputs: json!({ "l": ell, "n": n }),
        result: json!({ "rows": json_rows }),
        text,
        search_space: Some(SearchSpace::exhaustive(
            count as u64,
            format!("all {count} subgroups of S_{ell}, Comp^({n}) over S_{n}"),
        )),
        violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decode_is_little_endian_base_m() {
        assert_eq!(decode(5, 2, 4), vec![1, 0, 1, 0]);
        assert_eq!(decode(8, 3, 3), vec![2, 2, 0]);
    }

    #[test]
    fn stabilizer_bounds_of_a_product() {
        let g = named_group(NamedGroup::StabilizerAb { a: 2, b: 2 }, 4).unwrap();
        assert_eq!(stabilizer_bounds(&g).unwrap(), (2, 2));
        assert_eq!(stabilizer_bounds(&PermGroup::trivial(3)).unwrap(), (1, 1));
    }

    #[test]
    fn checks_grow_with_n() {
        assert_eq!(checks(3, 4).len(), 8);
        assert_eq!(checks(2, 4).len(), 12);
    }
}
