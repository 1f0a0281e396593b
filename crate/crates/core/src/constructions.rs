//! Functions that factor through `cs`, described by their level specs
//! `f* : Z⁽ⁿ⁾(A) → B`, and the witness functions built from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use rand::Rng;
use serde::Serialize;

use crate::domain::Invariant;
use crate::error::{Error, Result};
use crate::functions::{determined_by, is_determined_by, FiniteFunction};
use crate::patterns::{
    differences, generate, is_l_equalizing, named_group, patterns, patterns_within, symmetric_group_elements,
    NamedGroup, PermGroup, Permutation,
};
use crate::strings::{cs, CsValue, Multiset, Symbol, Tuple};

/// The admissible singleton counts `Z(k, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSet {
    pub k: usize,
    pub n: usize,
    pub levels: BTreeSet<usize>,
}

impl LevelSet {
    pub fn contains(&self, ell: usize) -> bool {
        self.levels.contains(&ell)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels.iter().copied()
    }
}

pub fn z_levels(k: usize, n: usize) -> LevelSet {
    let levels = if k < n {
        (0..k).collect()
    } else {
        (0..=n).filter(|&l| l + 1 != n).collect()
    };
    LevelSet { k, n, levels }
}

fn check_level(k: usize, n: usize, ell: usize) -> Result<()> {
    if z_levels(k, n).contains(ell) {
        Ok(())
    } else {
        Err(Error::precondition("level", format!("ℓ in Z({k},{n}), got {ell}")))
    }
}

/// Count vectors of length `k` summing to `n`, in lexicographic order.
fn compositions(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == k {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(k, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, n, &mut Vec::with_capacity(k), &mut out);
    out
}

/// `Z⁽ⁿ⁾_ℓ(A)` in increasing order.
pub fn enumerate_level(k: usize, n: usize, ell: usize) -> Result<Vec<CsValue>> {
    check_level(k, n, ell)?;
    let mut out = Vec::new();
    for counts in compositions(k, n) {
        let ones: Vec<Symbol> = (0..k).filter(|&x| counts[x] == 1).map(|x| x as Symbol).collect();
        if ones.len() != ell {
            continue;
        }
        let content = Multiset::from_counts(counts);
        for word in ones.iter().copied().permutations(ell) {
            out.push(CsValue::from_parts_unchecked(content.clone(), Tuple::from_raw(k, word)));
        }
    }
    out.sort();
    Ok(out)
}

/// `Z⁽ⁿ⁾(A)`, all levels.
pub fn enumerate_z(k: usize, n: usize) -> Vec<CsValue> {
    let mut out: Vec<CsValue> = z_levels(k, n)
        .iter()
        .flat_map(|l| enumerate_level(k, n, l).expect("level taken from Z(k,n)"))
        .collect();
    out.sort();
    out
}

/// A level spec `f*`, 0-based values in `0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsSpec {
    k: usize,
    n: usize,
    m: usize,
    values: BTreeMap<CsValue, u8>,
}

impl CsSpec {
    /// A spec that must cover `Z⁽ⁿ⁾(A)` exactly.
    pub fn new(k: usize, n: usize, m: usize, values: BTreeMap<CsValue, u8>) -> Result<Self> {
        let spec = CsSpec::partial(k, n, m, values)?;
        spec.check_total()?;
        Ok(spec)
    }

    /// Checks every key and value but not totality.
    pub fn partial(k: usize, n: usize, m: usize, values: BTreeMap<CsValue, u8>) -> Result<Self> {
        if m == 0 || m > 256 {
            return Err(Error::precondition("cs spec", "codomain size 1 <= m <= 256"));
        }
        for (key, &v) in &values {
            if key.content().k() != k || key.content().cardinality() != n {
                return Err(Error::InvalidSpecKey(key.to_string()));
            }
            CsValue::new(key.content().clone(), key.singles().clone())
                .map_err(|_| Error::InvalidSpecKey(key.to_string()))?;
            if v as usize >= m {
                return Err(Error::precondition("cs spec", format!("values in 1..={m} at {key}")));
            }
        }
        Ok(CsSpec { k, n, m, values })
    }

    fn check_total(&self) -> Result<()> {
        match enumerate_z(self.k, self.n).into_iter().find(|v| !self.values.contains_key(v)) {
            Some(missing) => Err(Error::IncompleteSpec(missing.to_string())),
            None => Ok(()),
        }
    }

    pub fn from_fn(k: usize, n: usize, m: usize, rule: impl Fn(&CsValue) -> u8) -> Result<Self> {
        let values = enumerate_z(k, n).into_iter().map(|v| {
            let x = rule(&v);
            (v, x)
        });
        CsSpec::new(k, n, m, values.collect())
    }

    pub fn constant(k: usize, n: usize, m: usize, value: u8) -> Result<Self> {
        CsSpec::from_fn(k, n, m, |_| value)
    }

    pub fn random<R: Rng + ?Sized>(k: usize, n: usize, m: usize, rng: &mut R) -> Result<Self> {
        let keys = enumerate_z(k, n);
        let values = keys.into_iter().map(|v| (v, rng.gen_range(0..m) as u8)).collect();
        CsSpec::new(k, n, m, values)
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

    pub fn values(&self) -> &BTreeMap<CsValue, u8> {
        &self.values
    }

    pub fn get(&self, key: &CsValue) -> Option<u8> {
        self.values.get(key).copied()
    }

    /// The restriction `f*_ℓ`.
    pub fn level(&self, ell: usize) -> impl Iterator<Item = (&CsValue, u8)> {
        self.values.iter().filter(move |(k, _)| k.level() == ell).map(|(k, &v)| (k, v))
    }

    /// Header `csspec k=<k> n=<n> m=<m>` then
    /// `<count_1> … <count_k> | <singles word> -> <value>` per key.
    pub fn to_text(&self) -> String {
        let mut out = format!("csspec k={} n={} m={}\n", self.k, self.n, self.m);
        for (key, &v) in &self.values {
            let counts = key.content().counts().iter().map(|c| c.to_string()).join(" ");
            out.push_str(&format!("{counts} | {} -> {}\n", key.singles(), v as usize + 1));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, 1, "empty cs spec file"))?;
        let (k, n, m) = crate::functions::parse_header(header, "csspec", 1)?;
        if k == 0 || k > crate::strings::MAX_ALPHABET {
            return Err(Error::parse(1, 1, "alphabet size out of range"));
        }
        let mut values = BTreeMap::new();
        for (i, line) in lines {
            let lineno = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (key, v) = parse_spec_line(line, lineno, k, n, m)?;
            if values.insert(key.clone(), v).is_some() {
                return Err(Error::parse(lineno, 1, format!("duplicate key {key}")));
            }
        }
        CsSpec::new(k, n, m, values)
    }
}

fn parse_spec_line(line: &str, lineno: usize, k: usize, n: usize, m: usize) -> Result<(CsValue, u8)> {
    let bar = line
        .find('|')
        .ok_or_else(|| Error::parse(lineno, 1, "expected `<counts> | <singles> -> <value>`"))?;
    let arrow = line
        .find("->")
        .filter(|&a| a > bar)
        .ok_or_else(|| Error::parse(lineno, bar + 1, "missing `->`"))?;
    let counts: Vec<usize> = line[..bar]
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(lineno, 1, "counts must be non-negative integers"))?;
    if counts.len() != k {
        return Err(Error::parse(lineno, 1, format!("expected {k} counts, found {}", counts.len())));
    }
    if counts.iter().sum::<usize>() != n {
        return Err(Error::parse(lineno, 1, format!("counts must sum to n = {n}")));
    }
    let word = line[bar + 1..arrow].trim();
    let singles = if word.is_empty() || word == "ε" {
        Tuple::empty(k)
    } else {
        Tuple::parse(word, Some(k)).map_err(|e| Error::parse(lineno, bar + 2, e.to_string()))?
    };
    let key = CsValue::new(Multiset::from_counts(counts), singles)
        .map_err(|e| Error::parse(lineno, bar + 2, e.to_string()))?;
    let vtext = line[arrow + 2..].trim();
    let v: usize = vtext
        .parse()
        .map_err(|_| Error::parse(lineno, arrow + 3, format!("not a value: {vtext:?}")))?;
    if v == 0 || v > m {
        return Err(Error::parse(lineno, arrow + 3, format!("value {v} outside 1..={m}")));
    }
    Ok((key, (v - 1) as u8))
}

impl fmt::Display for CsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text().trim_end())
    }
}

impl Serialize for CsSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let entries: Vec<(String, usize)> = self
            .values
            .iter()
            .map(|(key, &v)| (key.to_string(), v as usize + 1))
            .collect();
        let mut st = serializer.serialize_struct("CsSpec", 4)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("values", &entries)?;
        st.end()
    }
}

/// `f = f*∘cs|_{Aⁿ}`.
pub fn build_cs_function(spec: &CsSpec) -> Result<FiniteFunction> {
    let d = crate::domain::Domain::shared(spec.k, spec.n)?;
    let fib = d.fibers(Invariant::Cs);
    let per_fiber = fib
        .keys
        .iter()
        .map(|key| {
            let v = cs(&Tuple::from_raw(spec.k, key.clone()));
            spec.get(&v).ok_or_else(|| Error::IncompleteSpec(v.to_string()))
        })
        .collect::<Result<Vec<u8>>>()?;
    let table = fib.ids.iter().map(|&id| per_fiber[id as usize]).collect();
    FiniteFunction::new(spec.k, spec.n, spec.m, table)
}

/// The spec of a function constant on `cs`-fibers.
pub fn extract_cs_spec(f: &FiniteFunction) -> Option<CsSpec> {
    let map = is_determined_by(f, Invariant::Cs)?;
    let values = map.into_iter().map(|(t, v)| (cs(&t), v)).collect();
    Some(CsSpec {
        k: f.k(),
        n: f.n(),
        m: f.m(),
        values,
    })
}

/// The distinguished value `(⟨1^{n−k+1}, 2, …, k⟩, 23…k)`.
fn witness_new_key(k: usize, n: usize) -> CsValue {
    let mut counts = vec![1usize; k];
    counts[0] = n - k + 1;
    let singles = (1..k).map(|x| x as Symbol).collect();
    CsValue::from_parts_unchecked(Multiset::from_counts(counts), Tuple::from_raw(k, singles))
}

pub fn witness_new_spec(k: usize, n: usize) -> Result<CsSpec> {
    if k < 3 || n < k + 1 {
        return Err(Error::precondition("witness_new", "k >= 3 and n >= k + 1"));
    }
    let key = witness_new_key(k, n);
    CsSpec::from_fn(k, n, 2, |v| u8::from(*v == key))
}

/// cs-determined, with trivial invariance group, and not similar to any
/// ofo-determined function.
pub fn witness_new(k: usize, n: usize) -> Result<FiniteFunction> {
    build_cs_function(&witness_new_spec(k, n)?)
}

fn permute_word(a: &Tuple, sigma: &Permutation) -> Tuple {
    Tuple::from_raw(a.k(), sigma.images().iter().map(|&i| a.entries()[i as usize]).collect())
}

/// `{σ ∈ S_ℓ : f*_ℓ(M, a) = f*_ℓ(M, a∘σ)}`. Level 0 gives the trivial group
/// of degree 0.
pub fn level_invariants(spec: &CsSpec, ell: usize) -> Result<PermGroup> {
    check_level(spec.k, spec.n, ell)?;
    if ell == 0 {
        return Ok(PermGroup::trivial(0));
    }
    let level: Vec<(&CsValue, u8)> = spec.level(ell).collect();
    let elements = symmetric_group_elements(ell)
        .iter()
        .filter(|sigma| {
            level.iter().all(|(key, v)| {
                let moved = key.with_singles(permute_word(key.singles(), sigma));
                spec.get(&moved) == Some(*v)
            })
        })
        .cloned()
        .collect();
    Ok(PermGroup::from_trusted(ell, elements))
}

/// `⋂_ℓ Comp⁽ⁿ⁾ G_ℓ` over a family of level groups; levels 0 and 1 never
/// constrain.
pub fn intersect_comps(n: usize, groups: &BTreeMap<usize, PermGroup>) -> Result<PermGroup> {
    let constraining: Vec<(usize, &PermGroup)> = groups.iter().filter(|(&l, _)| l >= 2).map(|(&l, g)| (l, g)).collect();
    for (l, g) in &constraining {
        if g.degree() != *l || *l > n {
            return Err(Error::DegreeMismatch {
                expected: *l,
                found: g.degree(),
            });
        }
    }
    if n > crate::patterns::MAX_DEGREE {
        return Err(Error::precondition("intersect_comps", "n <= 8"));
    }
    let elements = symmetric_group_elements(n)
        .iter()
        .filter(|sigma| constraining.iter().all(|(l, g)| patterns_within(sigma, *l, g.elements())))
        .cloned()
        .collect();
    Ok(PermGroup::from_trusted(n, elements))
}

/// The invariance group of `build(spec)` assembled from its level groups.
pub fn inv_from_levels(spec: &CsSpec) -> Result<PermGroup> {
    let groups = z_levels(spec.k, spec.n)
        .iter()
        .map(|l| level_invariants(spec, l).map(|g| (l, g)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    intersect_comps(spec.n, &groups)
}

fn check_same_shape(a: &CsSpec, b: &CsSpec) -> Result<()> {
    if (a.k, a.n, a.m) != (b.k, b.n, b.m) {
        return Err(Error::precondition(
            "spec pair",
            format!("equal (k, n, m), got {:?} and {:?}", (a.k, a.n, a.m), (b.k, b.n, b.m)),
        ));
    }
    Ok(())
}

/// Whether `build(g) = build(f)∘σ̂`, decided level by level through the
/// patterns of `σ`.
pub fn check_sigma_transport(f_spec: &CsSpec, g_spec: &CsSpec, sigma: &Permutation) -> Result<bool> {
    check_same_shape(f_spec, g_spec)?;
    if sigma.degree() != f_spec.n {
        return Err(Error::DegreeMismatch {
            expected: f_spec.n,
            found: sigma.degree(),
        });
    }
    for ell in z_levels(f_spec.k, f_spec.n).iter() {
        let pats = patterns(sigma, ell)?;
        for (key, gv) in g_spec.level(ell) {
            for tau in &pats {
                let moved = key.with_singles(permute_word(key.singles(), tau));
                if f_spec.get(&moved) != Some(gv) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A pair of distinct cs-determined functions with `g = f∘σ̂`.
#[derive(Clone, Debug, Serialize)]
pub struct SimilarPair {
    pub sigma: Permutation,
    pub ell: usize,
    pub rho: Permutation,
    pub f_spec: CsSpec,
    pub g_spec: CsSpec,
    pub f: FiniteFunction,
    pub g: FiniteFunction,
}

/// Requires `σ` to be `ℓ`-differentiating. With `H = ⟨Δ Pat⁽ℓ⁾σ⟩` and `ρ` the
/// least member of `Pat⁽ℓ⁾σ`, `f*` is 2 exactly at singles words of members
/// of `H` and `g*` exactly at words of `π∘ρ⁻¹`, `π ∈ H`.
pub fn witness_similar_pair(sigma: &Permutation, ell: usize, k: usize, n: usize) -> Result<SimilarPair> {
    if sigma.degree() != n {
        return Err(Error::DegreeMismatch {
            expected: n,
            found: sigma.degree(),
        });
    }
    if ell == 0 {
        return Err(Error::precondition("witness_similar_pair", "ℓ >= 1"));
    }
    check_level(k, n, ell)?;
    let report = is_l_equalizing(sigma, ell)?;
    if report.equalizing {
        return Err(Error::Refused(format!(
            "{sigma} is {ell}-equalizing (|Pat| = {}, |<ΔPat>| = {}, <ΔPat> meets Pat); transported cs-determined pairs coincide",
            report.pattern_count, report.difference_group_order
        )));
    }
    let pats = patterns(sigma, ell)?;
    let h = generate(&differences(&pats)?)?;
    let rho = pats.iter().next().expect("patterns are nonempty").clone();
    let rho_inv = rho.inverse();
    let f_words: BTreeSet<Vec<u8>> = h.elements().iter().map(|p| p.images().to_vec()).collect();
    let g_words: BTreeSet<Vec<u8>> = h.elements().iter().map(|p| p.compose(&rho_inv).images().to_vec()).collect();
    let indicator = |words: &BTreeSet<Vec<u8>>| {
        CsSpec::from_fn(k, n, 2, |v| u8::from(v.level() == ell && words.contains(v.singles().entries())))
    };
    let f_spec = indicator(&f_words)?;
    let g_spec = indicator(&g_words)?;
    let f = build_cs_function(&f_spec)?;
    let g = build_cs_function(&g_spec)?;
    Ok(SimilarPair {
        sigma: sigma.clone(),
        ell,
        rho,
        f_spec,
        g_spec,
        f,
        g,
    })
}

/// `f'(M, a) = f*(M, rev a)`.
pub fn reverse_spec(spec: &CsSpec) -> CsSpec {
    let values = spec
        .values
        .iter()
        .map(|(key, &v)| (key.with_singles(key.singles().reversed()), v))
        .collect();
    CsSpec {
        values,
        ..spec.clone()
    }
}

/// A spec whose level-`ℓ` invariance group is exactly `G_ℓ` for each given
/// level; levels not listed get a constant part. At level `ℓ`, a singles
/// word `α` with support `{1..ℓ}` is sent to the index of the coset `α∘G_ℓ`
/// (plus one), every other key to 0.
pub fn level_group_spec(k: usize, n: usize, groups: &BTreeMap<usize, PermGroup>) -> Result<CsSpec> {
    let mut coset_index: BTreeMap<usize, BTreeMap<Vec<u8>, u8>> = BTreeMap::new();
    let mut m = 1;
    for (&ell, g) in groups {
        check_level(k, n, ell)?;
        if g.degree() != ell {
            return Err(Error::DegreeMismatch {
                expected: ell,
                found: g.degree(),
            });
        }
        let mut index = BTreeMap::new();
        let mut reps: BTreeMap<Permutation, u8> = BTreeMap::new();
        for alpha in symmetric_group_elements(ell).iter() {
            let rep = g.elements().iter().map(|x| alpha.compose(x)).min().expect("groups are nonempty");
            let next = reps.len() as u8 + 1;
            let id = *reps.entry(rep).or_insert(next);
            index.insert(alpha.images().to_vec(), id);
        }
        m = m.max(reps.len() + 1);
        coset_index.insert(ell, index);
    }
    if m > 256 {
        return Err(Error::precondition("level_group_spec", "at most 255 cosets per level"));
    }
    CsSpec::from_fn(k, n, m, |v| {
        coset_index
            .get(&v.level())
            .and_then(|idx| idx.get(v.singles().entries()))
            .copied()
            .unwrap_or(0)
    })
}

/// The groups that can occur as invariance groups of cs-determined functions
/// when `n ≥ 2k − 3`, instantiated at degree `n` and deduplicated by element
/// set (the first name is kept).
pub fn invariance_shapes(k: usize, n: usize) -> Result<Vec<(String, PermGroup)>> {
    let mut names = vec![
        NamedGroup::Symmetric,
        NamedGroup::Dihedral,
        NamedGroup::Cyclic,
        NamedGroup::DescPair,
        NamedGroup::Trivial,
    ];
    for a in 1..k {
        for b in 1..k - a {
            if a + b <= n {
                names.push(NamedGroup::StabilizerAb { a, b });
            }
        }
    }
    for c in (1..).take_while(|c| 2 * c < k && 2 * c <= n) {
        names.push(NamedGroup::StabilizerCcDesc { c });
    }
    let mut out: Vec<(String, PermGroup)> = Vec::new();
    for name in names {
        let g = named_group(name, n)?;
        if !out.iter().any(|(_, h)| *h == g) {
            out.push((name.to_string(), g));
        }
    }
    Ok(out)
}

/// Whether `build(spec)` is totally symmetric, read off the spec directly.
pub fn spec_ignores_singles(spec: &CsSpec) -> bool {
    let mut seen: BTreeMap<&Multiset, u8> = BTreeMap::new();
    spec.values.iter().all(|(key, &v)| *seen.entry(key.content()).or_insert(v) == v)
}

/// Whether `f` is cs-determined; shorthand used by callers that do not need
/// the spec itself.
pub fn is_cs_determined(f: &FiniteFunction) -> bool {
    determined_by(f, Invariant::Cs)
}
