//! Finite functions `f : Aⁿ → B` as dense value tables.
//!
//! Tables are indexed lexicographically with the first argument most
//! significant. Values are `0..m` internally and `1..=m` in the text format.
//! For a permutation `σ`, `f∘σ̂` denotes `a ↦ f(a∘σ)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::domain::{Domain, Invariant};
use crate::error::{Error, Result};
use crate::patterns::{is_2set_transitive_group, symmetric_group_elements, PermGroup, Permutation, MAX_DEGREE};
use crate::strings::{apply_delta, Pair, Symbol, Tuple};

/// Explicit value table of a function `{1..k}ⁿ → {1..m}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteFunction {
    k: usize,
    n: usize,
    m: usize,
    table: Vec<u8>,
}

impl FiniteFunction {
    /// From a 0-based value table.
    pub fn new(k: usize, n: usize, m: usize, table: Vec<u8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("function", "arity n >= 1"));
        }
        if m == 0 || m > 256 {
            return Err(Error::precondition("function", "codomain size 1 <= m <= 256"));
        }
        let domain = Domain::shared(k, n)?;
        if table.len() != domain.size() {
            return Err(Error::ArityMismatch {
                expected: domain.size(),
                found: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&v| v as usize >= m) {
            return Err(Error::precondition(
                "function",
                format!("values in 1..={m}, found {}", bad as usize + 1),
            ));
        }
        Ok(FiniteFunction { k, n, m, table })
    }

    pub(crate) fn from_raw(k: usize, n: usize, m: usize, table: Vec<u8>) -> Self {
        FiniteFunction { k, n, m, table }
    }

    /// Tabulates a rule given on 0-based tuples.
    pub fn from_fn(k: usize, n: usize, m: usize, rule: impl Fn(&[Symbol]) -> u8) -> Result<Self> {
        let domain = Domain::shared(k, n)?;
        let table = (0..domain.size()).map(|i| rule(domain.tuple(i))).collect();
        FiniteFunction::new(k, n, m, table)
    }

    pub fn random<R: Rng + ?Sized>(k: usize, n: usize, m: usize, rng: &mut R) -> Result<Self> {
        let domain = Domain::shared(k, n)?;
        let table = (0..domain.size()).map(|_| rng.gen_range(0..m) as u8).collect();
        FiniteFunction::new(k, n, m, table)
    }

    /// Boolean majority on `{1,2}ⁿ`, `n` odd.
    pub fn majority(n: usize) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::precondition("majority", "odd arity"));
        }
        FiniteFunction::from_fn(2, n, 2, |a| {
            let ones = a.iter().filter(|&&x| x == 1).count();
            u8::from(2 * ones > n)
        })
    }

    /// Sum of the 0-based arguments modulo `k`.
    pub fn sum_mod(k: usize, n: usize) -> Result<Self> {
        FiniteFunction::from_fn(k, n, k, |a| {
            (a.iter().map(|&x| x as usize).sum::<usize>() % k) as u8
        })
    }

    /// The projection onto a 0-based argument.
    pub fn projection(k: usize, n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i + 1, bound: n });
        }
        FiniteFunction::from_fn(k, n, k, |a| a[i])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn domain(&self) -> Arc<Domain> {
        Domain::shared(self.k, self.n).expect("domain validated on construction")
    }

    pub fn value_at(&self, a: &[Symbol]) -> u8 {
        self.table[self.domain().index_of(a)]
    }

    pub fn eval(&self, a: &Tuple) -> Result<u8> {
        if a.len() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                found: a.len(),
            });
        }
        if a.k() != self.k {
            return Err(Error::AlphabetMismatch {
                left: self.k,
                right: a.k(),
            });
        }
        Ok(self.value_at(a.entries()))
    }

    /// `f∘σ̂`, i.e. `a ↦ f(a∘σ)`.
    pub fn permuted(&self, sigma: &Permutation) -> FiniteFunction {
        assert_eq!(sigma.degree(), self.n);
        let d = self.domain();
        let w = d.permuted_weights(sigma);
        let table = (0..d.size()).map(|i| self.table[d.index_with(i, &w)]).collect();
        FiniteFunction::from_raw(self.k, self.n, self.m, table)
    }

    /// The bit-exact text form: header `fnv1 k=<k> n=<n> m=<m>` and one line of values.
    pub fn to_text(&self) -> String {
        let mut out = format!("fnv1 k={} n={} m={}\n", self.k, self.n, self.m);
        let values: Vec<String> = self.table.iter().map(|&v| (v as usize + 1).to_string()).collect();
        out.push_str(&values.join(" "));
        out.push('\n');
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::parse(1, 1, "empty function file"))?;
        let (k, n, m) = parse_header(header, "fnv1", 1)?;
        let body = lines.next().ok_or_else(|| Error::parse(2, 1, "missing value line"))?;
        let mut table = Vec::new();
        let mut col = 1;
        for tok in body.split(' ') {
            if tok.is_empty() {
                return Err(Error::parse(2, col, "values must be separated by single spaces"));
            }
            let v: usize = tok
                .parse()
                .map_err(|_| Error::parse(2, col, format!("not a value: {tok:?}")))?;
            if v == 0 || v > m {
                return Err(Error::parse(2, col, format!("value {v} outside 1..={m}")));
            }
            table.push((v - 1) as u8);
            col += tok.len() + 1;
        }
        if let Some((i, extra)) = lines.enumerate().find(|(_, l)| !l.trim().is_empty()) {
            return Err(Error::parse(i + 3, 1, format!("unexpected trailing content {extra:?}")));
        }
        FiniteFunction::new(k, n, m, table).map_err(|e| Error::parse(2, 1, e.to_string()))
    }
}

pub(crate) fn parse_header(line: &str, magic: &str, lineno: usize) -> Result<(usize, usize, usize)> {
    let mut parts = line.split(' ');
    if parts.next() != Some(magic) {
        return Err(Error::parse(lineno, 1, format!("expected `{magic} k=<k> n=<n> m=<m>`")));
    }
    let mut col = magic.len() + 2;
    let mut vals = [0usize; 3];
    for (slot, key) in ["k=", "n=", "m="].iter().enumerate() {
        let part = parts
            .next()
            .ok_or_else(|| Error::parse(lineno, col, format!("missing `{key}`")))?;
        vals[slot] = part
            .strip_prefix(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::parse(lineno, col, format!("expected `{key}<int>`, found {part:?}")))?;
        col += part.len() + 1;
    }
    if let Some(extra) = parts.next() {
        return Err(Error::parse(lineno, col, format!("unexpected {extra:?}")));
    }
    Ok((vals[0], vals[1], vals[2]))
}

impl fmt::Display for FiniteFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text().trim_end())
    }
}

impl Serialize for FiniteFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("FiniteFunction", 4)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("m", &self.m)?;
        let values: Vec<usize> = self.table.iter().map(|&v| v as usize + 1).collect();
        st.serialize_field("table", &values)?;
        st.end()
    }
}

fn check_enumerable(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        Err(Error::precondition("permutation search", format!("arity <= {MAX_DEGREE}")))
    } else {
        Ok(())
    }
}

/// The minor `f(a) = g(a∘τ)` of `g` (arity `τ.len()`), with `τ` given as
/// 0-based images in `0..n`.
pub fn minor(g: &FiniteFunction, tau: &[usize], n: usize) -> Result<FiniteFunction> {
    if tau.len() != g.n {
        return Err(Error::ArityMismatch {
            expected: g.n,
            found: tau.len(),
        });
    }
    if let Some((position, &value)) = tau.iter().enumerate().find(|(_, &t)| t >= n) {
        return Err(Error::MalformedMap {
            position: position + 1,
            value: value + 1,
            bound: n,
        });
    }
    let d = Domain::shared(g.k, n)?;
    let gd = g.domain();
    let table = (0..d.size())
        .map(|i| {
            let a = d.tuple(i);
            let idx: usize = tau
                .iter()
                .enumerate()
                .map(|(p, &t)| a[t] as usize * gd_weight(&gd, p))
                .sum();
            g.table[idx]
        })
        .collect();
    FiniteFunction::new(g.k, n, g.m, table)
}

fn gd_weight(d: &Domain, p: usize) -> usize {
    d.k().pow((d.n() - 1 - p) as u32)
}

/// `f_I = f∘δ̂_I`, of arity `n − 1`.
pub fn identification_minor(f: &FiniteFunction, pair: Pair) -> Result<FiniteFunction> {
    if f.n < 2 {
        return Err(Error::precondition("identification_minor", "arity >= 2"));
    }
    if pair.hi() >= f.n {
        return Err(Error::BadPair(pair.lo() + 1, pair.hi() + 1));
    }
    let lower = Domain::shared(f.k, f.n - 1)?;
    let upper = f.domain();
    let table = (0..lower.size())
        .map(|i| {
            let u = Tuple::from_raw(f.k, lower.tuple(i).to_vec());
            let a = apply_delta(&u, pair).expect("pair checked against arity");
            f.table[upper.index_of(a.entries())]
        })
        .collect();
    Ok(FiniteFunction::from_raw(f.k, f.n - 1, f.m, table))
}

/// All identification minors, keyed by their pair, in lexicographic pair order.
pub fn identification_minors(f: &FiniteFunction) -> Result<Vec<(Pair, FiniteFunction)>> {
    Pair::all(f.n)
        .map(|p| identification_minor(f, p).map(|g| (p, g)))
        .collect()
}

/// Whether `f∘σ̂ = g` holds, scanning indices in increasing order.
fn permuted_equals(d: &Domain, f: &FiniteFunction, sigma: &Permutation, g: &[u8]) -> bool {
    let w = d.permuted_weights(sigma);
    (0..d.size()).all(|i| f.table[d.index_with(i, &w)] == g[i])
}

/// Some `τ` with `f = g∘τ̂`, the first in lexicographic order, if any.
/// Functions of different shape are never similar.
pub fn is_similar(f: &FiniteFunction, g: &FiniteFunction) -> Option<Permutation> {
    if f.k != g.k || f.n != g.n || f.m != g.m {
        return None;
    }
    if f == g {
        return Some(Permutation::identity(f.n));
    }
    if f.n > MAX_DEGREE {
        return None;
    }
    let d = f.domain();
    let mut fc = vec![0usize; f.m];
    let mut gc = vec![0usize; f.m];
    for (&x, &y) in f.table.iter().zip(&g.table) {
        fc[x as usize] += 1;
        gc[y as usize] += 1;
    }
    if fc != gc {
        return None;
    }
    symmetric_group_elements(f.n)
        .iter()
        .find(|tau| permuted_equals(&d, g, tau, &f.table))
        .cloned()
}

/// Result of the unique-identification-minor test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UimReport {
    pub holds: bool,
    /// Arity 2: a single identification minor, so the property is vacuous.
    pub degenerate: bool,
    /// `h = f_{{n−1,n}}` when the property holds.
    pub base: Option<FiniteFunction>,
    /// `(I, ρ_I)` with `f_I = h∘ρ̂_I`, when the property holds.
    pub witnesses: Vec<(Pair, Permutation)>,
    /// A pair whose minor is not similar to `h`, when the property fails.
    pub counterexample: Option<Pair>,
}

pub fn has_unique_identification_minor(f: &FiniteFunction) -> Result<UimReport> {
    if f.n < 2 {
        return Err(Error::precondition("has_unique_identification_minor", "arity >= 2"));
    }
    check_enumerable(f.n - 1)?;
    let base_pair = Pair::new(f.n - 2, f.n - 1)?;
    let h = identification_minor(f, base_pair)?;
    let mut witnesses = Vec::new();
    for pair in Pair::all(f.n) {
        let fi = identification_minor(f, pair)?;
        match is_similar(&fi, &h) {
            Some(rho) => witnesses.push((pair, rho)),
            None => {
                return Ok(UimReport {
                    holds: false,
                    degenerate: false,
                    base: None,
                    witnesses: Vec::new(),
                    counterexample: Some(pair),
                })
            }
        }
    }
    Ok(UimReport {
        holds: true,
        degenerate: f.n == 2,
        base: Some(h),
        witnesses,
        counterexample: None,
    })
}

/// Whether `f` is invariant under `σ`.
pub fn is_invariant_under(f: &FiniteFunction, sigma: &Permutation) -> bool {
    permuted_equals(&f.domain(), f, sigma, &f.table)
}

/// `{σ ∈ S_n : f = f∘σ̂}`.
pub fn invariance_group(f: &FiniteFunction) -> Result<PermGroup> {
    check_enumerable(f.n)?;
    let d = f.domain();
    let elements: BTreeSet<Permutation> = symmetric_group_elements(f.n)
        .iter()
        .filter(|s| permuted_equals(&d, f, s, &f.table))
        .cloned()
        .collect();
    Ok(PermGroup::from_trusted(f.n, elements))
}

pub fn is_totally_symmetric(f: &FiniteFunction) -> Result<bool> {
    check_enumerable(f.n)?;
    // Adjacent transpositions generate S_n.
    Ok((0..f.n.saturating_sub(1)).all(|i| is_invariant_under(f, &Permutation::transposition(f.n, i, i + 1))))
}

pub fn is_2set_transitive(f: &FiniteFunction) -> Result<bool> {
    Ok(is_2set_transitive_group(&invariance_group(f)?))
}

/// The value map `f*` of a function that factors through an invariant,
/// keyed by the canonical representative of each fiber.
pub type DeterminingMap = BTreeMap<Tuple, u8>;

fn constant_on_fibers(f: &FiniteFunction, inv: Invariant, value_at: impl Fn(usize) -> u8) -> Option<Vec<u8>> {
    let d = f.domain();
    let fib = d.fibers(inv);
    let mut vals = vec![u8::MAX; fib.keys.len()];
    let mut set = vec![false; fib.keys.len()];
    for (i, &id) in fib.ids.iter().enumerate() {
        let v = value_at(i);
        let id = id as usize;
        if set[id] {
            if vals[id] != v {
                return None;
            }
        } else {
            set[id] = true;
            vals[id] = v;
        }
    }
    Some(vals)
}

fn to_determining_map(f: &FiniteFunction, inv: Invariant, vals: Vec<u8>) -> DeterminingMap {
    let d = f.domain();
    d.fibers(inv)
        .keys
        .iter()
        .zip(vals)
        .map(|(key, v)| (Tuple::from_raw(f.k, key.clone()), v))
        .collect()
}

/// `f*` with `f = f*∘φ|_{Aⁿ}` if `f` is constant on every fiber of `φ`.
pub fn is_determined_by(f: &FiniteFunction, inv: Invariant) -> Option<DeterminingMap> {
    constant_on_fibers(f, inv, |i| f.table[i]).map(|vals| to_determining_map(f, inv, vals))
}

/// Fast yes/no form of [`is_determined_by`].
pub fn determined_by(f: &FiniteFunction, inv: Invariant) -> bool {
    constant_on_fibers(f, inv, |i| f.table[i]).is_some()
}

/// First `σ` in lexicographic order with `f∘σ̂` determined by the invariant,
/// together with the value map of `f∘σ̂`.
pub fn is_similar_to_determined_by(
    f: &FiniteFunction,
    inv: Invariant,
) -> Result<Option<(Permutation, DeterminingMap)>> {
    check_enumerable(f.n)?;
    let d = f.domain();
    for sigma in symmetric_group_elements(f.n).iter() {
        let w = d.permuted_weights(sigma);
        if let Some(vals) = constant_on_fibers(f, inv, |i| f.table[d.index_with(i, &w)]) {
            let g = f.permuted(sigma);
            return Ok(Some((sigma.clone(), to_determining_map(&g, inv, vals))));
        }
    }
    Ok(None)
}

/// Whether all identification minors are equal as tables.
pub fn characterize_ofo_by_minors(f: &FiniteFunction) -> Result<bool> {
    if f.n < 2 {
        return Err(Error::precondition("characterize_ofo_by_minors", "arity >= 2"));
    }
    let minors = identification_minors(f)?;
    Ok(minors.windows(2).all(|w| w[0].1 == w[1].1))
}

/// Whether `f_I = h∘ζ̂_{min I}` for every `I`, where `h = f_{{n−1,n}}` and
/// `ζ_i = (i i+1 … n−1)`.
pub fn characterize_cs_by_minors(f: &FiniteFunction) -> Result<bool> {
    if f.n < 2 {
        return Err(Error::precondition("characterize_cs_by_minors", "arity >= 2"));
    }
    let h = identification_minor(f, Pair::new(f.n - 2, f.n - 1)?)?;
    for (pair, fi) in identification_minors(f)? {
        let zeta = Permutation::cycle_range(f.n - 1, pair.lo(), f.n - 2);
        if h.permuted(&zeta) != fi {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tests on the partial function restricted to tuples with a repeated entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RepeatedDomainReport {
    pub supp_determined_on_repeated: bool,
    pub totally_symmetric_on_repeated: bool,
}

pub fn restrict_neq_tests(f: &FiniteFunction) -> RepeatedDomainReport {
    let d = f.domain();
    let mask = d.repeated_mask();
    let constant_within = |inv: Invariant| {
        let fib = d.fibers(inv);
        let mut vals = vec![u8::MAX; fib.keys.len()];
        fib.ids.iter().enumerate().filter(|&(i, _)| mask[i]).all(|(i, &id)| {
            let slot = &mut vals[id as usize];
            if *slot == u8::MAX {
                *slot = f.table[i];
                true
            } else {
                *slot == f.table[i]
            }
        })
    };
    // The repeated-entry domain is closed under permutations and its
    // S_n-orbits are exactly the content fibers.
    RepeatedDomainReport {
        supp_determined_on_repeated: constant_within(Invariant::Supp),
        totally_symmetric_on_repeated: constant_within(Invariant::Ms),
    }
}

/// Class memberships of a function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub struct Classes {
    pub uim: bool,
    pub ofo: bool,
    pub cs: bool,
    pub two_set_transitive: bool,
    pub symmetric: bool,
    pub supp: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ClassLabel {
    Uim,
    Ofo,
    Cs,
    TwoSetTransitive,
    Symm,
    Supp,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 6] = [
        ClassLabel::Uim,
        ClassLabel::Ofo,
        ClassLabel::Cs,
        ClassLabel::TwoSetTransitive,
        ClassLabel::Symm,
        ClassLabel::Supp,
    ];
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassLabel::Uim => "UIM",
            ClassLabel::Ofo => "OFO",
            ClassLabel::Cs => "CS",
            ClassLabel::TwoSetTransitive => "2ST",
            ClassLabel::Symm => "SYMM",
            ClassLabel::Supp => "SUPP",
        })
    }
}

impl Classes {
    pub fn labels(&self) -> BTreeSet<ClassLabel> {
        ClassLabel::ALL.into_iter().filter(|&l| self.has(l)).collect()
    }

    pub fn has(&self, label: ClassLabel) -> bool {
        match label {
            ClassLabel::Uim => self.uim,
            ClassLabel::Ofo => self.ofo,
            ClassLabel::Cs => self.cs,
            ClassLabel::TwoSetTransitive => self.two_set_transitive,
            ClassLabel::Symm => self.symmetric,
            ClassLabel::Supp => self.supp,
        }
    }
}

pub fn classify(f: &FiniteFunction) -> Result<Classes> {
    let inv = invariance_group(f)?;
    let uim = if f.n >= 2 {
        has_unique_identification_minor(f)?.holds
    } else {
        true
    };
    Ok(Classes {
        uim,
        ofo: is_similar_to_determined_by(f, Invariant::Ofo)?.is_some(),
        cs: is_similar_to_determined_by(f, Invariant::Cs)?.is_some(),
        two_set_transitive: is_2set_transitive_group(&inv),
        symmetric: inv.order() == (1..=f.n).product::<usize>(),
        supp: determined_by(f, Invariant::Supp),
    })
}

/// `rev f = f∘δ̂_n`.
pub fn reverse(f: &FiniteFunction) -> FiniteFunction {
    f.permuted(&Permutation::descending(f.n))
}

/// The lexicographically least table among `{f∘σ̂ : σ ∈ S_n}`.
pub fn canonical_table(f: &FiniteFunction) -> Result<Vec<u8>> {
    check_enumerable(f.n)?;
    let d = f.domain();
    let mut best = f.table.clone();
    let mut cand = vec![0u8; d.size()];
    for sigma in symmetric_group_elements(f.n).iter().skip(1) {
        let w = d.permuted_weights(sigma);
        let mut decided = std::cmp::Ordering::Equal;
        for i in 0..d.size() {
            let v = f.table[d.index_with(i, &w)];
            cand[i] = v;
            if decided == std::cmp::Ordering::Equal {
                decided = v.cmp(&best[i]);
                if decided == std::cmp::Ordering::Greater {
                    break;
                }
            }
        }
        if decided == std::cmp::Ordering::Less {
            best.copy_from_slice(&cand);
        }
    }
    Ok(best)
}

/// Identification minors up to similarity, as a multiset of canonical tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Deck {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub entries: BTreeMap<Vec<u8>, usize>,
}

impl Deck {
    pub fn total(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }
}

pub fn deck(f: &FiniteFunction) -> Result<Deck> {
    if f.n < 3 {
        return Err(Error::precondition("deck", "arity >= 3"));
    }
    let mut entries = BTreeMap::new();
    for (_, fi) in identification_minors(f)? {
        *entries.entry(canonical_table(&fi)?).or_insert(0) += 1;
    }
    Ok(Deck {
        k: f.k,
        n: f.n,
        m: f.m,
        entries,
    })
}
