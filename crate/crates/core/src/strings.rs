//! Tuples over a finite alphabet and the maps that summarize them.
//!
//! Symbols are `0..k` internally and `1..=k` in every external form (parsing,
//! `Display`). Tuple composition follows `(a∘τ)(i) = a(τ(i))`, so composing a
//! tuple with a permutation word reads off the entries at the listed positions.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// An alphabet symbol, `0..k`.
pub type Symbol = u8;

/// Largest alphabet supported; symbols must fit in a `u8`.
pub const MAX_ALPHABET: usize = 255;

/// A finite string over the alphabet `{1..k}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tuple {
    k: usize,
    entries: Vec<Symbol>,
}

impl Tuple {
    /// Builds a tuple from 0-based symbols.
    pub fn new(k: usize, entries: Vec<Symbol>) -> Result<Self> {
        if k == 0 || k > MAX_ALPHABET {
            return Err(Error::precondition("alphabet", format!("1 <= k <= {MAX_ALPHABET}")));
        }
        if let Some(&bad) = entries.iter().find(|&&x| x as usize >= k) {
            return Err(Error::SymbolOutOfRange {
                symbol: bad as usize + 1,
                k,
            });
        }
        Ok(Tuple { k, entries })
    }

    pub(crate) fn from_raw(k: usize, entries: Vec<Symbol>) -> Self {
        debug_assert!(entries.iter().all(|&x| (x as usize) < k));
        Tuple { k, entries }
    }

    /// Builds a tuple from 1-based symbols as written in text.
    pub fn from_one_based(k: usize, symbols: &[usize]) -> Result<Self> {
        let mut entries = Vec::with_capacity(symbols.len());
        for &s in symbols {
            if s == 0 || s > k {
                return Err(Error::SymbolOutOfRange { symbol: s, k });
            }
            entries.push((s - 1) as Symbol);
        }
        Tuple::new(k, entries)
    }

    pub fn empty(k: usize) -> Self {
        Tuple { k, entries: Vec::new() }
    }

    /// Parses the text form: space-separated numbers `1..=k`, or letters
    /// mapped `a→1, b→2, …` (either one word or space-separated letters).
    ///
    /// When `k` is `None` the alphabet is the largest symbol seen for numeric
    /// input and 26 for letters.
    pub fn parse(text: &str, k: Option<usize>) -> Result<Self> {
        let tokens: Vec<(usize, &str)> = tokens_with_columns(text);
        let letters = !tokens.is_empty()
            && tokens
                .iter()
                .all(|(_, t)| t.chars().all(|c| c.is_ascii_alphabetic()));
        let mut symbols = Vec::new();
        if letters {
            for (_, tok) in &tokens {
                for c in tok.chars() {
                    symbols.push((c.to_ascii_lowercase() as u8 - b'a') as usize + 1);
                }
            }
        } else {
            for (col, tok) in &tokens {
                let v: usize = tok
                    .parse()
                    .map_err(|_| Error::parse(1, *col, format!("not a symbol: {tok:?}")))?;
                if v == 0 {
                    return Err(Error::parse(1, *col, "symbols are numbered from 1"));
                }
                symbols.push(v);
            }
        }
        let k = match k {
            Some(k) => k,
            None if letters => 26,
            None => symbols.iter().copied().max().unwrap_or(1),
        };
        Tuple::from_one_based(k, &symbols)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Symbol] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Symbol> {
        self.entries
    }

    /// Entries as 1-based numbers.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.entries.iter().map(|&x| x as usize + 1).collect()
    }

    /// Renders with letters `a, b, …` (only meaningful for `k <= 26`).
    pub fn to_letters(&self) -> String {
        self.entries.iter().map(|&x| (b'a' + x) as char).collect()
    }

    /// Compact word form: digits run together when every symbol is a single
    /// digit, space-separated otherwise.
    pub fn word(&self) -> String {
        if self.k <= 9 {
            self.entries.iter().map(|&x| char::from(b'1' + x)).collect()
        } else {
            self.to_string()
        }
    }

    /// The reversed tuple.
    pub fn reversed(&self) -> Tuple {
        let mut entries = self.entries.clone();
        entries.reverse();
        Tuple::from_raw(self.k, entries)
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "ε");
        }
        for (i, &x) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", x as usize + 1)?;
        }
        Ok(())
    }
}

fn tokens_with_columns(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() || c == ',' {
            if let Some(s) = start.take() {
                out.push((s + 1, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &text[s..]));
    }
    out
}

/// A multiset over `{1..k}` stored as its multiplicity vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Multiset {
    counts: Vec<usize>,
}

impl Multiset {
    pub fn zero(k: usize) -> Self {
        Multiset { counts: vec![0; k] }
    }

    pub fn from_counts(counts: Vec<usize>) -> Self {
        Multiset { counts }
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Multiplicity of a 0-based symbol.
    pub fn multiplicity(&self, x: Symbol) -> usize {
        self.counts[x as usize]
    }

    pub fn cardinality(&self) -> usize {
        self.counts.iter().sum()
    }

    /// The support set, ascending.
    pub fn support(&self) -> BTreeSet<Symbol> {
        (0..self.counts.len())
            .filter(|&x| self.counts[x] > 0)
            .map(|x| x as Symbol)
            .collect()
    }

    /// Multiset join: multiplicities add.
    pub fn join(&self, other: &Multiset) -> Multiset {
        assert_eq!(self.k(), other.k(), "joining multisets over different alphabets");
        Multiset {
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub(crate) fn add_one(&mut self, x: Symbol) {
        self.counts[x as usize] += 1;
    }

    /// Non-decreasing tuple listing every element with multiplicity.
    pub fn sorted_tuple(&self) -> Tuple {
        let mut entries = Vec::with_capacity(self.cardinality());
        for (x, &c) in self.counts.iter().enumerate() {
            entries.extend(std::iter::repeat_n(x as Symbol, c));
        }
        Tuple::from_raw(self.k(), entries)
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        let mut first = true;
        for (x, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, ",")?;
            }
            first = false;
            if c == 1 {
                write!(f, "{}", x + 1)?;
            } else {
                write!(f, "{}^{}", x + 1, c)?;
            }
        }
        write!(f, ">")
    }
}

/// A value of the content-and-singletons map: a multiset together with the
/// repetition-free word of its multiplicity-one elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CsValue {
    content: Multiset,
    singles: Tuple,
}

impl CsValue {
    /// Checks membership: a symbol occurs in `singles` exactly when its
    /// multiplicity is 1, and `singles` has no repeats.
    pub fn new(content: Multiset, singles: Tuple) -> Result<Self> {
        if content.k() != singles.k() {
            return Err(Error::AlphabetMismatch {
                left: content.k(),
                right: singles.k(),
            });
        }
        let mut seen = vec![false; content.k()];
        for &x in singles.entries() {
            if seen[x as usize] {
                return Err(Error::RepeatedEntries(singles.to_one_based()));
            }
            seen[x as usize] = true;
        }
        for (x, &c) in content.counts().iter().enumerate() {
            if (c == 1) != seen[x] {
                return Err(Error::InvalidSpecKey(format!(
                    "symbol {} has multiplicity {} but {} the singles word",
                    x + 1,
                    c,
                    if seen[x] { "occurs in" } else { "is missing from" }
                )));
            }
        }
        Ok(CsValue { content, singles })
    }

    pub(crate) fn from_parts_unchecked(content: Multiset, singles: Tuple) -> Self {
        CsValue { content, singles }
    }

    pub fn content(&self) -> &Multiset {
        &self.content
    }

    pub fn singles(&self) -> &Tuple {
        &self.singles
    }

    /// Number of singletons, the level `ℓ` of this value.
    pub fn level(&self) -> usize {
        self.singles.len()
    }

    /// Same content, singles word replaced (used for `(M, a∘σ)`).
    pub fn with_singles(&self, singles: Tuple) -> CsValue {
        debug_assert_eq!(singles.len(), self.singles.len());
        CsValue {
            content: self.content.clone(),
            singles,
        }
    }
}

impl fmt::Display for CsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.content, self.singles.word_or_eps())
    }
}

impl Tuple {
    fn word_or_eps(&self) -> String {
        if self.is_empty() {
            "ε".to_string()
        } else {
            self.word()
        }
    }
}

/// A 2-element subset `{lo, hi}` of positions, 0-based, `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Pair {
    lo: usize,
    hi: usize,
}

impl Pair {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Ok(Pair { lo: i, hi: j }),
            std::cmp::Ordering::Greater => Ok(Pair { lo: j, hi: i }),
            std::cmp::Ordering::Equal => Err(Error::BadPair(i + 1, j + 1)),
        }
    }

    /// From 1-based positions.
    pub fn one_based(i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 {
            return Err(Error::BadPair(i, j));
        }
        Pair::new(i - 1, j - 1)
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }

    /// All 2-subsets of `{0..n}` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Pair> {
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| Pair { lo: i, hi: j }))
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo + 1, self.hi + 1)
    }
}

/// `a∘τ`: `result[i] = a[τ(i)]`, with `τ` given as 0-based images.
pub fn compose_tuple(a: &Tuple, tau: &[usize]) -> Result<Tuple> {
    let n = a.len();
    let mut entries = Vec::with_capacity(tau.len());
    for (position, &t) in tau.iter().enumerate() {
        if t >= n {
            return Err(Error::MalformedMap {
                position: position + 1,
                value: t + 1,
                bound: n,
            });
        }
        entries.push(a.entries[t]);
    }
    Ok(Tuple::from_raw(a.k, entries))
}

/// The identifying map `δ_I : {0..n} → {0..n-1}` as a list of images.
pub fn delta_map(n: usize, pair: Pair) -> Result<Vec<usize>> {
    if n < 2 || pair.hi >= n {
        return Err(Error::precondition("δ_I", format!("a 2-subset of 1..={n}")));
    }
    Ok((0..n)
        .map(|i| match i.cmp(&pair.hi) {
            std::cmp::Ordering::Less => i,
            std::cmp::Ordering::Equal => pair.lo,
            std::cmp::Ordering::Greater => i - 1,
        })
        .collect())
}

/// `a∘δ_I`: inserts a copy of `a[lo]` so that it lands at position `hi`.
pub fn apply_delta(a: &Tuple, pair: Pair) -> Result<Tuple> {
    let n = a.len() + 1;
    if pair.hi >= n {
        return Err(Error::ArityMismatch {
            expected: pair.hi,
            found: a.len(),
        });
    }
    let mut entries = Vec::with_capacity(n);
    entries.extend_from_slice(&a.entries[..pair.hi]);
    entries.push(a.entries[pair.lo]);
    entries.extend_from_slice(&a.entries[pair.hi..]);
    Ok(Tuple::from_raw(a.k, entries))
}

/// Content of a tuple.
pub fn ms(a: &Tuple) -> Multiset {
    let mut m = Multiset::zero(a.k);
    for &x in &a.entries {
        m.add_one(x);
    }
    m
}

pub(crate) fn counts_of(k: usize, entries: &[Symbol]) -> Vec<usize> {
    let mut counts = vec![0usize; k];
    for &x in entries {
        counts[x as usize] += 1;
    }
    counts
}

/// Singletons of `a` in order of occurrence.
pub fn singles(a: &Tuple) -> Tuple {
    Tuple::from_raw(a.k, singles_raw(a.k, &a.entries))
}

pub(crate) fn singles_raw(k: usize, entries: &[Symbol]) -> Vec<Symbol> {
    let counts = counts_of(k, entries);
    entries
        .iter()
        .copied()
        .filter(|&x| counts[x as usize] == 1)
        .collect()
}

/// Positions (0-based, ascending) holding a singleton.
pub fn index_singles(a: &Tuple) -> Vec<usize> {
    let counts = counts_of(a.k, &a.entries);
    (0..a.len())
        .filter(|&i| counts[a.entries[i] as usize] == 1)
        .collect()
}

/// Content and singletons.
pub fn cs(a: &Tuple) -> CsValue {
    CsValue::from_parts_unchecked(ms(a), singles(a))
}

/// Symbols in order of first occurrence.
pub fn ofo(a: &Tuple) -> Tuple {
    Tuple::from_raw(a.k, ofo_raw(a.k, &a.entries))
}

pub(crate) fn ofo_raw(k: usize, entries: &[Symbol]) -> Vec<Symbol> {
    let mut seen = vec![false; k];
    let mut out = Vec::new();
    for &x in entries {
        if !seen[x as usize] {
            seen[x as usize] = true;
            out.push(x);
        }
    }
    out
}

/// Set of entries.
pub fn supp(a: &Tuple) -> BTreeSet<Symbol> {
    a.entries.iter().copied().collect()
}

/// `(ms(a) ∪̇ ⟨a_i⟩, singles(a) with a_i deleted)` for 0-based `i`.
///
/// Equals `cs(a∘δ_{{i,j}})` for every `j > i`.
pub fn cs_shifted(i: usize, a: &Tuple) -> Result<CsValue> {
    if i >= a.len() {
        return Err(Error::IndexOutOfRange {
            index: i + 1,
            bound: a.len(),
        });
    }
    let mut content = ms(a);
    content.add_one(a.entries[i]);
    let x = a.entries[i];
    let singles = Tuple::from_raw(
        a.k,
        singles_raw(a.k, &a.entries).into_iter().filter(|&s| s != x).collect(),
    );
    Ok(CsValue::from_parts_unchecked(content, singles))
}

/// `x…x·ofo(a)` of length `|a|`, where `x` is the first symbol of `a`.
pub fn ofo_canonical(a: &Tuple) -> Result<Tuple> {
    if a.is_empty() {
        return Err(Error::precondition("ofo_canonical", "a nonempty tuple"));
    }
    Ok(Tuple::from_raw(a.k, ofo_canonical_raw(a.k, &a.entries)))
}

pub(crate) fn ofo_canonical_raw(k: usize, entries: &[Symbol]) -> Vec<Symbol> {
    let o = ofo_raw(k, entries);
    let mut out = vec![o[0]; entries.len() - o.len()];
    out.extend_from_slice(&o);
    out
}

/// `singles(a)` followed by the repeated symbols, with multiplicity, in
/// non-decreasing order.
pub fn cs_canonical(a: &Tuple) -> Tuple {
    Tuple::from_raw(a.k, cs_canonical_raw(a.k, &a.entries))
}

pub(crate) fn cs_canonical_raw(k: usize, entries: &[Symbol]) -> Vec<Symbol> {
    let counts = counts_of(k, entries);
    let mut out: Vec<Symbol> = entries
        .iter()
        .copied()
        .filter(|&x| counts[x as usize] == 1)
        .collect();
    for (x, &c) in counts.iter().enumerate() {
        if c >= 2 {
            out.extend(std::iter::repeat_n(x as Symbol, c));
        }
    }
    out
}

/// The two step relations whose transitive closures are studied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    /// `a ~ b`: `a = u∘δ_I`, `b = u∘δ_J` for some `u`, `I`, `J`.
    Delta,
    /// `a ~₂ b`: `a = xαyαz`, `b = x'αy'αz'` with `xyz = x'y'z'`.
    Pair,
}

impl Relation {
    pub fn neighbors(self, a: &Tuple) -> Result<BTreeSet<Tuple>> {
        match self {
            Relation::Delta => sim_neighbors(a),
            Relation::Pair => sim2_neighbors(a),
        }
    }
}

/// All `b` with `a ~ b`.
pub fn sim_neighbors(a: &Tuple) -> Result<BTreeSet<Tuple>> {
    let n = a.len();
    if n < 2 {
        return Err(Error::precondition("sim_neighbors", "length >= 2"));
    }
    let mut out = BTreeSet::new();
    // a = u∘δ_I forces a[lo] = a[hi] and u = a with position hi removed.
    for pre in Pair::all(n) {
        if a.entries[pre.lo] != a.entries[pre.hi] {
            continue;
        }
        let mut u = a.entries.clone();
        u.remove(pre.hi);
        let u = Tuple::from_raw(a.k, u);
        for post in Pair::all(n) {
            out.insert(apply_delta(&u, post)?);
        }
    }
    Ok(out)
}

/// All `b` with `a ~₂ b`. Empty for repetition-free `a`.
pub fn sim2_neighbors(a: &Tuple) -> Result<BTreeSet<Tuple>> {
    let n = a.len();
    if n < 2 {
        return Err(Error::precondition("sim2_neighbors", "length >= 2"));
    }
    let mut out = BTreeSet::new();
    for p in 0..n {
        for q in p + 1..n {
            let alpha = a.entries[p];
            if a.entries[q] != alpha {
                continue;
            }
            let rest: Vec<Symbol> = a
                .entries
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != p && i != q)
                .map(|(_, &x)| x)
                .collect();
            // Reinsert α before rest[s] and before rest[t], s <= t.
            for s in 0..=rest.len() {
                for t in s..=rest.len() {
                    let mut b = Vec::with_capacity(n);
                    b.extend_from_slice(&rest[..s]);
                    b.push(alpha);
                    b.extend_from_slice(&rest[s..t]);
                    b.push(alpha);
                    b.extend_from_slice(&rest[t..]);
                    out.insert(Tuple::from_raw(a.k, b));
                }
            }
        }
    }
    Ok(out)
}

/// Whether `b` is reachable from `a` in the reflexive-transitive closure of
/// the chosen relation, by breadth-first search.
pub fn closure_equal(a: &Tuple, b: &Tuple, relation: Relation) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::ArityMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.k != b.k {
        return Err(Error::AlphabetMismatch {
            left: a.k,
            right: b.k,
        });
    }
    if a == b {
        return Ok(true);
    }
    if a.len() < 2 {
        return Ok(false);
    }
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(a.clone());
    queue.push_back(a.clone());
    while let Some(x) = queue.pop_front() {
        for y in relation.neighbors(&x)? {
            if &y == b {
                return Ok(true);
            }
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    Ok(false)
}

/// Partition of `Aⁿ` into closure classes of the relation, each class sorted
/// and the classes ordered by their least element.
pub fn closure_classes(k: usize, n: usize, relation: Relation) -> Result<Vec<Vec<Tuple>>> {
    let all = all_tuples(k, n)?;
    let mut class_of: BTreeMap<Tuple, usize> = BTreeMap::new();
    let mut classes: Vec<Vec<Tuple>> = Vec::new();
    for start in all {
        if class_of.contains_key(&start) {
            continue;
        }
        let id = classes.len();
        let mut members = vec![start.clone()];
        class_of.insert(start.clone(), id);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            if x.len() < 2 {
                break;
            }
            for y in relation.neighbors(&x)? {
                if !class_of.contains_key(&y) {
                    class_of.insert(y.clone(), id);
                    members.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        members.sort();
        classes.push(members);
    }
    Ok(classes)
}

/// Every tuple of `Aⁿ` in lexicographic order.
pub fn all_tuples(k: usize, n: usize) -> Result<Vec<Tuple>> {
    if k == 0 || k > MAX_ALPHABET {
        return Err(Error::precondition("alphabet", format!("1 <= k <= {MAX_ALPHABET}")));
    }
    let total = checked_pow(k, n).ok_or(Error::DomainTooLarge { k, n })?;
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0 as Symbol; n];
    for _ in 0..total {
        out.push(Tuple::from_raw(k, cur.clone()));
        for pos in (0..n).rev() {
            if (cur[pos] as usize) + 1 < k {
                cur[pos] += 1;
                break;
            }
            cur[pos] = 0;
        }
    }
    Ok(out)
}

pub(crate) fn checked_pow(k: usize, n: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..n {
        acc = acc.checked_mul(k)?;
    }
    if acc > 1 << 26 {
        None
    } else {
        Some(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(text: &str) -> Tuple {
        Tuple::parse(text, None).unwrap()
    }

    fn tk(k: usize, text: &str) -> Tuple {
        Tuple::parse(text, Some(k)).unwrap()
    }

    #[test]
    fn compose_examples() {
        let a = t("7 8 9");
        assert_eq!(compose_tuple(&a, &[0, 1, 2]).unwrap(), a);
        let a = tk(5, "1 2 2 3 4 5 5 5");
        let sigma: Vec<usize> = "54238617".bytes().map(|b| (b - b'1') as usize).collect();
        assert_eq!(compose_tuple(&a, &sigma).unwrap().word(), "43225515");
        let a = t("5 6");
        assert_eq!(compose_tuple(&a, &[0, 0, 0]).unwrap(), t("5 5 5").retag(6));
        assert!(matches!(
            compose_tuple(&a, &[0, 2]),
            Err(Error::MalformedMap { position: 2, value: 3, bound: 2 })
        ));
    }

    impl Tuple {
        fn retag(self, k: usize) -> Tuple {
            Tuple::new(k, self.entries).unwrap()
        }
    }

    #[test]
    fn delta_examples() {
        let a = tk(3, "1 2 3");
        assert_eq!(apply_delta(&a, Pair::one_based(1, 3).unwrap()).unwrap(), tk(3, "1 2 1 3"));
        assert_eq!(apply_delta(&a, Pair::one_based(1, 2).unwrap()).unwrap(), tk(3, "1 1 2 3"));
        assert_eq!(apply_delta(&a, Pair::one_based(2, 4).unwrap()).unwrap(), tk(3, "1 2 3 2"));
        assert!(apply_delta(&a, Pair::one_based(1, 5).unwrap()).is_err());
    }

    #[test]
    fn delta_case_formula_matches_explicit_form() {
        for n in 2..=6 {
            for a in all_tuples(3, n - 1).unwrap() {
                for pair in Pair::all(n) {
                    let via_map = compose_tuple(&a, &delta_map(n, pair).unwrap()).unwrap();
                    assert_eq!(via_map, apply_delta(&a, pair).unwrap());
                }
            }
        }
    }

    #[test]
    fn ms_singles_cs_examples() {
        let m = t("mathematician");
        assert_eq!(ms(&m).to_string(), "<1^3,3,5,8,9^2,13^2,14,20^2>");
        assert_eq!(singles(&m).to_letters(), "hecn");
        assert_eq!(ms(&Tuple::empty(3)), Multiset::zero(3));
        assert_eq!(ms(&t("5 5 5")).to_string(), "<5^3>");

        let u = t("unprosperousness");
        let v = cs(&u);
        assert!(v.singles().is_empty());
        let letters: Vec<(char, usize)> = v
            .content()
            .counts()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(x, &c)| ((b'a' + x as u8) as char, c))
            .collect();
        assert_eq!(
            letters,
            vec![('e', 2), ('n', 2), ('o', 2), ('p', 2), ('r', 2), ('s', 4), ('u', 2)]
        );

        let c = t("circumlocution");
        assert_eq!(singles(&c).to_letters(), "rmltn");
        let amb = t("ambidextrously");
        assert_eq!(singles(&amb), amb);

        let a = t("1 2 3");
        assert_eq!(cs(&a).to_string(), "(<1,2,3>, 123)");
    }

    #[test]
    fn singles_and_index_singles_examples() {
        let a = tk(5, "1 2 2 3 4 5 5 5");
        let b = tk(6, "1 2 3 2 4 5 2 6");
        assert_eq!(singles(&a).word(), "134");
        assert_eq!(singles(&b).word(), "13456");
        assert_eq!(index_singles(&a), vec![0, 3, 4]);
        assert_eq!(index_singles(&b), vec![0, 2, 4, 5, 7]);
        assert!(singles(&t("1 1 1")).is_empty());
        assert!(index_singles(&t("1 1")).is_empty());
    }

    #[test]
    fn ofo_supp_examples() {
        assert_eq!(ofo(&t("1 2 1 3")), t("1 2 3"));
        assert_eq!(ofo(&t("3 1 2")), t("3 1 2"));
        assert_eq!(supp(&t("1 2 1 3")), [0, 1, 2].into_iter().collect());
        assert!(supp(&Tuple::empty(2)).is_empty());
        assert!(ofo(&Tuple::empty(2)).is_empty());
    }

    #[test]
    fn ofo_is_invariant_under_identification() {
        for n in 2..=5 {
            for a in all_tuples(3, n - 1).unwrap() {
                for pair in Pair::all(n) {
                    assert_eq!(ofo(&apply_delta(&a, pair).unwrap()), ofo(&a));
                }
                assert_eq!(supp(&a), supp(&ofo(&a)));
            }
        }
    }

    #[test]
    fn cs_shifted_matches_identified_cs() {
        let a = tk(3, "1 2 3");
        let v = cs_shifted(1, &a).unwrap();
        assert_eq!(v.to_string(), "(<1,2^2,3>, 13)");
        let v = cs_shifted(0, &a).unwrap();
        assert_eq!(v.content().to_string(), "<1^2,2,3>");
        assert_eq!(v.singles().word(), "23");
        assert!(cs_shifted(3, &a).is_err());
        for n in 2..=5 {
            for a in all_tuples(3, n - 1).unwrap() {
                for pair in Pair::all(n) {
                    let direct = cs(&apply_delta(&a, pair).unwrap());
                    assert_eq!(cs_shifted(pair.lo(), &a).unwrap(), direct);
                }
            }
        }
    }

    #[test]
    fn canonical_form_examples() {
        assert_eq!(ofo_canonical(&tk(3, "1 2 1 3")).unwrap(), tk(3, "1 1 2 3"));
        assert_eq!(ofo_canonical(&tk(3, "3 1 2")).unwrap(), tk(3, "3 1 2"));
        assert!(ofo_canonical(&Tuple::empty(3)).is_err());

        let a = tk(5, "1 2 2 3 4 5 5 5");
        let c = cs_canonical(&a);
        assert_eq!(c.word(), "13422555");
        assert_eq!(cs(&c), cs(&a));
        assert_eq!(cs_canonical(&tk(3, "2 3 1")), tk(3, "2 3 1"));
    }

    fn partition_by<K: Ord>(tuples: &[Tuple], key: impl Fn(&Tuple) -> K) -> BTreeSet<Vec<Tuple>> {
        let mut groups: BTreeMap<K, Vec<Tuple>> = BTreeMap::new();
        for a in tuples {
            groups.entry(key(a)).or_default().push(a.clone());
        }
        groups.into_values().collect()
    }

    #[test]
    fn canonical_fibers_equal_invariant_fibers() {
        let all = all_tuples(3, 4).unwrap();
        assert_eq!(
            partition_by(&all, |a| ofo_canonical(a).unwrap()),
            partition_by(&all, ofo)
        );
        assert_eq!(partition_by(&all, cs_canonical), partition_by(&all, cs));
        for a in &all {
            let c = cs_canonical(a);
            assert_eq!(cs_canonical(&c), c);
            let o = ofo_canonical(a).unwrap();
            assert_eq!(ofo_canonical(&o).unwrap(), o);
        }
    }

    #[test]
    fn sim_neighbors_examples() {
        let aa = tk(1, "1 1");
        assert_eq!(sim_neighbors(&aa).unwrap(), [aa.clone()].into_iter().collect());
        assert!(sim_neighbors(&tk(2, "1")).is_err());
        for a in all_tuples(2, 3).unwrap() {
            let n = sim_neighbors(&a).unwrap();
            // Every tuple of length 3 over two symbols has a repeat.
            assert!(n.contains(&a), "{a}");
        }
        for len in 2..=4 {
            let all = all_tuples(2, len).unwrap();
            for a in &all {
                for b in &all {
                    let ab = sim_neighbors(a).unwrap().contains(b);
                    let ba = sim_neighbors(b).unwrap().contains(a);
                    assert_eq!(ab, ba);
                }
            }
        }
    }

    #[test]
    fn sim2_neighbors_examples() {
        assert!(sim2_neighbors(&tk(3, "1 2 3")).unwrap().is_empty());
        let got = sim2_neighbors(&tk(2, "1 2 1")).unwrap();
        let want: BTreeSet<Tuple> = ["1 2 1", "1 1 2", "2 1 1"].iter().map(|s| tk(2, s)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn closure_examples() {
        assert!(closure_equal(&tk(3, "1 2 1 3"), &tk(3, "1 1 2 3"), Relation::Delta).unwrap());
        let a = tk(3, "1 2 3");
        assert!(closure_equal(&a, &a, Relation::Pair).unwrap());
        assert!(!closure_equal(&tk(2, "1 1 2"), &tk(2, "2 2 1"), Relation::Pair).unwrap());
        assert!(closure_equal(&a, &tk(3, "1 2"), Relation::Delta).is_err());
    }

    #[test]
    fn closure_classes_are_invariant_fibers() {
        for (k, n) in [(2, 3), (3, 3), (2, 4), (3, 4)] {
            let all = all_tuples(k, n).unwrap();
            let delta: BTreeSet<Vec<Tuple>> =
                closure_classes(k, n, Relation::Delta).unwrap().into_iter().collect();
            let pair: BTreeSet<Vec<Tuple>> =
                closure_classes(k, n, Relation::Pair).unwrap().into_iter().collect();
            assert_eq!(delta, partition_by(&all, ofo));
            assert_eq!(pair, partition_by(&all, cs));
        }
    }

    #[test]
    fn cs_value_membership() {
        let m = Multiset::from_counts(vec![2, 1, 1]);
        assert!(CsValue::new(m.clone(), tk(3, "3 2")).is_ok());
        assert!(CsValue::new(m.clone(), tk(3, "3")).is_err());
        assert!(CsValue::new(m, tk(3, "3 1 2")).is_err());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(Tuple::parse("1 x2", None), Err(Error::Parse { column: 3, .. })));
        assert!(Tuple::parse("0 1", None).is_err());
        assert!(Tuple::parse("4", Some(3)).is_err());
    }
}
