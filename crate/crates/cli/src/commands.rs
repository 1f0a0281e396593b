use std::fmt::Write as _;
use std::path::Path;

use minors_core::constructions::{witness_new_spec, build_cs_function, witness_similar_pair};
use minors_core::functions::{classify, deck, has_unique_identification_minor, invariance_group, FiniteFunction};
use minors_core::patterns::{classify_equalizing, comp, named_group, patterns, NamedGroup, PermGroup, Permutation};
use minors_core::strings::{closure_classes, cs, cs_canonical, ms, ofo, ofo_canonical, singles, supp, Relation, Tuple};
use minors_core::{Domain, Invariant};
use serde_json::{json, Value};

use crate::report::{in_file, read_file, write_file, CliError, Outcome, SearchSpace};
use crate::{Cli, Command, OracleRelation, Which};

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Uim { file } => uim(file),
        Command::Classify { file } => classify_cmd(file),
        Command::Invgroup { file } => invgroup(file),
        Command::Deck { file } => deck_cmd(file),
        Command::Canon { tuple, which, k } => canon(tuple, *which, *k),
        Command::Pat { perm, ell } => pat(perm, *ell),
        Command::Comp { n, group_file } => comp_cmd(*n, group_file),
        Command::Equalizing { perm } => equalizing(perm),
        Command::WitnessNew { k, n, out, spec_out } => witness_new_cmd(*k, *n, out.as_deref(), spec_out.as_deref()),
        Command::WitnessPair { perm, ell, k, n, out_f, out_g } => {
            witness_pair(perm, *ell, *k, *n, out_f.as_deref(), out_g.as_deref())
        }
        Command::Oracle { k, n, relation } => oracle(*k, *n, *relation),
        Command::Sweep { sweep } => crate::sweeps::run(sweep, cli.jobs),
    }
}

fn load_function(path: &Path) -> Result<FiniteFunction, CliError> {
    FiniteFunction::parse_text(&read_file(path)?).map_err(in_file(path))
}

pub fn parse_perm(tokens: &[String]) -> Result<Permutation, CliError> {
    Ok(Permutation::parse(&tokens.join(" "))?)
}

fn one_based(table: &[u8]) -> Vec<usize> {
    table.iter().map(|&v| v as usize + 1).collect()
}

fn table_text(table: &[u8]) -> String {
    one_based(table).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn function_json(f: &FiniteFunction) -> Value {
    json!({ "k": f.k(), "n": f.n(), "m": f.m(), "table": one_based(f.table()) })
}

fn group_json(g: &PermGroup) -> Value {
    json!({
        "degree": g.degree(),
        "order": g.order(),
        "elements": g.elements().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
    })
}

fn quiet(inputs: Value, result: Value, text: String) -> Outcome {
    Outcome {
        inputs,
        result,
        text,
        search_space: None,
        violated: false,
    }
}

/// Every named subgroup of `S_n`, with duplicates by element set dropped.
pub fn named_groups(n: usize) -> Vec<(String, PermGroup)> {
    let mut names = vec![
        NamedGroup::Symmetric,
        NamedGroup::Dihedral,
        NamedGroup::Cyclic,
        NamedGroup::DescPair,
        NamedGroup::Trivial,
    ];
    for a in 0..=n {
        for b in 0..=n - a {
            names.push(NamedGroup::StabilizerAb { a, b });
        }
    }
    for c in 1..=n / 2 {
        names.push(NamedGroup::StabilizerCcDesc { c });
    }
    let mut out: Vec<(String, PermGroup)> = Vec::new();
    for name in names {
        if let Ok(g) = named_group(name, n) {
            if !out.iter().any(|(_, h)| *h == g) {
                out.push((name.to_string(), g));
            }
        }
    }
    out
}

pub fn identify(g: &PermGroup) -> Option<String> {
    named_groups(g.degree()).into_iter().find(|(_, h)| h == g).map(|(name, _)| name)
}

fn uim(file: &Path) -> Result<Outcome, CliError> {
    let f = load_function(file)?;
    let r = has_unique_identification_minor(&f)?;
    let mut text = format!("uim: {}\n", r.holds);
    if r.degenerate {
        text.push_str("warning: n = 2 has a single identification minor; the property holds vacuously\n");
    }
    if let Some(h) = &r.base {
        let _ = writeln!(text, "h = f_{{{},{}}}: {}", f.n() - 1, f.n(), table_text(h.table()));
        for (pair, rho) in &r.witnesses {
            let _ = writeln!(text, "  f_{pair} = h∘ρ̂ with ρ = {rho}");
        }
    }
    if let Some(pair) = r.counterexample {
        let _ = writeln!(text, "counterexample: f_{pair} is not similar to f_{{{},{}}}", f.n() - 1, f.n());
    }
    let result = json!({
        "uim": r.holds,
        "degenerate": r.degenerate,
        "base": r.base.as_ref().map(function_json),
        "witnesses": r.witnesses.iter().map(|(p, rho)| json!({"pair": p.to_string(), "rho": rho.to_string()})).collect::<Vec<_>>(),
        "counterexample": r.counterexample.map(|p| p.to_string()),
    });
    Ok(Outcome {
        inputs: json!({ "file": file.display().to_string() }),
        result,
        text,
        search_space: None,
        violated: !r.holds,
    })
}

fn classify_cmd(file: &Path) -> Result<Outcome, CliError> {
    let f = load_function(file)?;
    let c = classify(&f)?;
    let labels: Vec<String> = c.labels().iter().map(|l| l.to_string()).collect();
    let mut text = format!("classes: {}\n", if labels.is_empty() { "none".into() } else { labels.join(" ") });
    for (name, on) in [
        ("UIM", c.uim),
        ("OFO", c.ofo),
        ("CS", c.cs),
        ("2ST", c.two_set_transitive),
        ("SYMM", c.symmetric),
        ("SUPP", c.supp),
    ] {
        let _ = writeln!(text, "  {name:<5} {on}");
    }
    Ok(quiet(
        json!({ "file": file.display().to_string() }),
        json!({ "labels": labels, "classes": c }),
        text,
    ))
}

fn invgroup(file: &Path) -> Result<Outcome, CliError> {
    let f = load_function(file)?;
    let g = invariance_group(&f)?;
    let shape = identify(&g);
    let mut text = format!("order: {}\n", g.order());
    let _ = writeln!(text, "shape: {}", shape.as_deref().unwrap_or("unnamed"));
    let _ = writeln!(text, "elements: {}", g.elements().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "));
    Ok(quiet(
        json!({ "file": file.display().to_string() }),
        json!({ "group": group_json(&g), "shape": shape }),
        text,
    ))
}

fn deck_cmd(file: &Path) -> Result<Outcome, CliError> {
    let f = load_function(file)?;
    let d = deck(&f)?;
    let mut text = format!("deck: {} distinct of {} minors\n", d.distinct(), d.total());
    let mut entries = Vec::new();
    for (table, count) in &d.entries {
        let _ = writeln!(text, "  {count} x {}", table_text(table));
        entries.push(json!({ "count": count, "table": one_based(table) }));
    }
    Ok(quiet(
        json!({ "file": file.display().to_string() }),
        json!({ "k": d.k, "n": d.n - 1, "m": d.m, "distinct": d.distinct(), "total": d.total(), "entries": entries }),
        text,
    ))
}

fn canon(tokens: &[String], which: Which, k: Option<usize>) -> Result<Outcome, CliError> {
    let a = Tuple::parse(&tokens.join(" "), k)?;
    let mut fields: Vec<(&str, String)> = Vec::new();
    let want = |w: Which| which == Which::All || which == w;
    if want(Which::Ms) {
        fields.push(("ms", ms(&a).to_string()));
    }
    if want(Which::Singles) {
        fields.push(("singles", singles(&a).to_string()));
    }
    if want(Which::Cs) {
        fields.push(("cs", cs(&a).to_string()));
        fields.push(("cs_canonical", cs_canonical(&a).to_string()));
    }
    if want(Which::Ofo) {
        fields.push(("ofo", ofo(&a).to_string()));
        if !a.is_empty() {
            fields.push(("ofo_canonical", ofo_canonical(&a)?.to_string()));
        }
    }
    if want(Which::Supp) {
        let s: Vec<String> = supp(&a).iter().map(|&x| (x as usize + 1).to_string()).collect();
        fields.push(("supp", format!("{{{}}}", s.join(","))));
    }
    let mut text = String::new();
    let mut result = serde_json::Map::new();
    for (name, value) in fields {
        let _ = writeln!(text, "{name}: {value}");
        result.insert(name.into(), Value::String(value));
    }
    Ok(quiet(json!({ "tuple": a.to_string(), "k": a.k() }), Value::Object(result), text))
}

fn pat(tokens: &[String], ell: usize) -> Result<Outcome, CliError> {
    let sigma = parse_perm(tokens)?;
    let pats: Vec<String> = patterns(&sigma, ell)?.iter().map(|p| p.to_string()).collect();
    let text = format!("Pat^({ell}) {sigma} = {{{}}} ({} patterns)\n", pats.join(", "), pats.len());
    Ok(quiet(
        json!({ "permutation": sigma.to_string(), "l": ell }),
        json!({ "patterns": pats }),
        text,
    ))
}

fn comp_cmd(n: usize, file: &Path) -> Result<Outcome, CliError> {
    let g = PermGroup::parse_text(&read_file(file)?).map_err(in_file(file))?;
    let c = comp(n, g.degree(), g.elements())?;
    let cg = PermGroup::new(n, c).map_err(|e| CliError::Input(format!("Comp is not a group: {e}")))?;
    let shape = identify(&cg);
    let mut text = format!("Comp^({n}) of a group of order {} in S_{}\n", g.order(), g.degree());
    let _ = writeln!(text, "order: {}", cg.order());
    let _ = writeln!(text, "shape: {}", shape.as_deref().unwrap_or("unnamed"));
    let _ = writeln!(text, "elements: {}", cg.elements().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "));
    Ok(quiet(
        json!({ "n": n, "group": group_json(&g) }),
        json!({ "comp": group_json(&cg), "shape": shape }),
        text,
    ))
}

fn equalizing(tokens: &[String]) -> Result<Outcome, CliError> {
    let sigma = parse_perm(tokens)?;
    let c = classify_equalizing(&sigma)?;
    let mut text = format!("{sigma}\n  ℓ  verdict          |Pat|  |<ΔPat>|  |<Pat>|\n");
    for r in &c.levels {
        let _ = writeln!(
            text,
            "  {:<2} {:<16} {:>5}  {:>8}  {:>7}",
            r.ell,
            if r.equalizing { "equalizing" } else { "differentiating" },
            r.pattern_count,
            r.difference_group_order,
            r.pattern_group_order
        );
    }
    let diff = c.differentiating_levels();
    let _ = writeln!(
        text,
        "differentiating levels: {}",
        if diff.is_empty() { "none".into() } else { diff.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ") }
    );
    Ok(quiet(json!({ "permutation": sigma.to_string() }), json!(c), text))
}

fn witness_new_cmd(k: usize, n: usize, out: Option<&Path>, spec_out: Option<&Path>) -> Result<Outcome, CliError> {
    let spec = witness_new_spec(k, n)?;
    let f = build_cs_function(&spec)?;
    let mut text = String::new();
    match out {
        Some(path) => {
            write_file(path, &f.to_text())?;
            let _ = writeln!(text, "wrote {}", path.display());
        }
        None => text.push_str(&f.to_text()),
    }
    if let Some(path) = spec_out {
        write_file(path, &spec.to_text())?;
        let _ = writeln!(text, "wrote {}", path.display());
    }
    Ok(quiet(
        json!({ "k": k, "n": n }),
        json!({ "function": function_json(&f), "spec": spec }),
        text,
    ))
}

fn witness_pair(
    tokens: &[String],
    ell: usize,
    k: usize,
    n: usize,
    out_f: Option<&Path>,
    out_g: Option<&Path>,
) -> Result<Outcome, CliError> {
    let sigma = parse_perm(tokens)?;
    let pair = witness_similar_pair(&sigma, ell, k, n)?;
    let mut text = format!("σ = {sigma}, ℓ = {ell}, ρ = {} (g = f∘σ̂, f ≠ g)\n", pair.rho);
    for (label, f, path) in [("f", &pair.f, out_f), ("g", &pair.g, out_g)] {
        match path {
            Some(p) => {
                write_file(p, &f.to_text())?;
                let _ = writeln!(text, "wrote {label} to {}", p.display());
            }
            None => {
                let _ = write!(text, "{label}:\n{}", f.to_text());
            }
        }
    }
    Ok(quiet(
        json!({ "permutation": sigma.to_string(), "l": ell, "k": k, "n": n }),
        json!({
            "rho": pair.rho.to_string(),
            "f": function_json(&pair.f),
            "g": function_json(&pair.g),
            "f_spec": pair.f_spec,
            "g_spec": pair.g_spec,
        }),
        text,
    ))
}

fn oracle(k: usize, n: usize, relation: OracleRelation) -> Result<Outcome, CliError> {
    let (rel, inv, name) = match relation {
        OracleRelation::Ofo => (Relation::Delta, Invariant::Ofo, "ofo"),
        OracleRelation::Cs => (Relation::Pair, Invariant::Cs, "cs"),
    };
    let d = Domain::shared(k, n)?;
    let classes = closure_classes(k, n, rel)?;
    let fib = d.fibers(inv);
    // Equal partitions: every class lies in one fiber and the counts agree.
    let within = classes.iter().all(|c| {
        let id = fib.ids[d.index_of(c[0].entries())];
        c.iter().all(|t| fib.ids[d.index_of(t.entries())] == id)
    });
    let matches = within && classes.len() == fib.keys.len();
    let text = format!(
        "classes match {name} fibers: {matches} ({} tuples, {} classes, {} fibers)\n",
        d.size(),
        classes.len(),
        fib.keys.len()
    );
    Ok(Outcome {
        inputs: json!({ "k": k, "n": n, "relation": name }),
        result: json!({ "matches": matches, "tuples": d.size(), "classes": classes.len(), "fibers": fib.keys.len() }),
        text,
        search_space: Some(SearchSpace::exhaustive(d.size() as u64, format!("all tuples in {{1..{k}}}^{n}"))),
        violated: !matches,
    })
}
