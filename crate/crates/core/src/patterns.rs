//! Permutations, permutation patterns, and explicit small-degree groups.
//!
//! A permutation is stored as its one-line image word, 0-based. Products use
//! function composition, `(σ∘τ)(i) = σ(τ(i))`, and act on tuples on the right:
//! `(a∘σ)∘τ = a∘(σ∘τ)`. Inverses and difference sets `{x⁻¹∘y}` follow the same
//! convention everywhere.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest degree for which whole symmetric groups are enumerated.
pub const MAX_DEGREE: usize = 8;

/// A bijection on `{1..n}`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    /// From a 0-based image word.
    pub fn new(images: Vec<u8>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::NotAPermutation(
                    images.iter().map(|&v| v as usize + 1).collect(),
                ));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_raw(images: Vec<u8>) -> Self {
        Permutation { images }
    }

    /// From a 1-based one-line word such as `[5, 4, 2, 3, 8, 6, 1, 7]`.
    pub fn from_word(word: &[usize]) -> Result<Self> {
        if word.iter().any(|&x| x == 0 || x > word.len() || x > 256) {
            return Err(Error::NotAPermutation(word.to_vec()));
        }
        Permutation::new(word.iter().map(|&x| (x - 1) as u8).collect())
    }

    /// Parses `5 4 2 3 8 6 1 7`, or the compact `54238617` for degree <= 9.
    pub fn parse(text: &str) -> Result<Self> {
        let tokens: Vec<&str> = text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
        let digits: Vec<usize> = if tokens.len() == 1 && tokens[0].len() > 1 {
            tokens[0]
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::parse(1, 1, format!("not a permutation word: {text:?}")))?
        } else {
            let mut out = Vec::with_capacity(tokens.len());
            for tok in tokens {
                out.push(
                    tok.parse()
                        .map_err(|_| Error::parse(1, 1, format!("not an integer: {tok:?}")))?,
                );
            }
            out
        };
        Permutation::from_word(&digits)
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u8).collect(),
        }
    }

    /// `n (n−1) … 1`.
    pub fn descending(n: usize) -> Self {
        Permutation {
            images: (0..n as u8).rev().collect(),
        }
    }

    /// The natural cycle `(1 2 … n)`, word `2 3 … n 1`.
    pub fn natural_cycle(n: usize) -> Self {
        Permutation {
            images: (0..n).map(|i| ((i + 1) % n) as u8).collect(),
        }
    }

    /// The cycle `(i i+1 … j)` on `{1..n}`, 0-based endpoints `i <= j`.
    pub fn cycle_range(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<u8> = (0..n as u8).collect();
        if i < j {
            for p in i..j {
                images[p] = (p + 1) as u8;
            }
            images[j] = i as u8;
        }
        Permutation { images }
    }

    /// The transposition of two 0-based points.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<u8> = (0..n as u8).collect();
        images.swap(i, j);
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    /// Image of a 0-based point.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn to_word(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "composing permutations of different degree");
        Permutation {
            images: other.images.iter().map(|&x| self.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Permutation { images: inv }
    }

    /// The pattern `σ_S` at a set of 0-based positions, computed as
    /// `h⁻¹_{σ(S)} ∘ σ|_S ∘ h_S`.
    pub fn pattern_at(&self, positions: &[usize]) -> Result<Permutation> {
        if positions.is_empty() {
            return Err(Error::precondition("pattern_at", "a nonempty position set"));
        }
        let mut s: Vec<usize> = positions.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != positions.len() || *s.last().unwrap() >= self.degree() {
            return Err(Error::precondition(
                "pattern_at",
                format!("distinct positions in 1..={}", self.degree()),
            ));
        }
        // h_S: i -> s[i]; the image set σ(S) sorted gives h_{σ(S)}.
        let mut image_set: Vec<usize> = s.iter().map(|&p| self.apply(p)).collect();
        image_set.sort_unstable();
        let rank = |v: usize| image_set.binary_search(&v).unwrap() as u8;
        Ok(Permutation {
            images: s.iter().map(|&p| rank(self.apply(p))).collect(),
        })
    }

    /// Pattern at an `ℓ`-subset given in increasing order, without checks.
    pub(crate) fn pattern_at_sorted(&self, s: &[usize], out: &mut Vec<u8>) {
        out.clear();
        for &p in s {
            let v = self.images[p];
            let r = s.iter().filter(|&&q| self.images[q] < v).count();
            out.push(r as u8);
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.images.is_empty() {
            return write!(f, "ε");
        }
        if self.degree() <= 9 {
            for &x in &self.images {
                write!(f, "{}", x + 1)?;
            }
            Ok(())
        } else {
            write!(f, "{}", self.to_word().iter().join(" "))
        }
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Reduced form of a sequence of distinct integers.
pub fn red(u: &[usize]) -> Result<Permutation> {
    let mut sorted = u.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::RepeatedEntries(u.to_vec()));
    }
    if u.len() > 256 {
        return Err(Error::precondition("red", "at most 256 entries"));
    }
    Ok(Permutation {
        images: u
            .iter()
            .map(|v| sorted.binary_search(v).unwrap() as u8)
            .collect(),
    })
}

/// All `n!` permutations in lexicographic order of their words.
pub fn symmetric_group_elements(n: usize) -> Arc<Vec<Permutation>> {
    static CACHE: OnceLock<Vec<OnceLock<Arc<Vec<Permutation>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (0..=MAX_DEGREE).map(|_| OnceLock::new()).collect());
    assert!(n <= MAX_DEGREE, "symmetric group of degree {n} is too large to enumerate");
    cache[n]
        .get_or_init(|| {
            Arc::new(
                (0..n as u8)
                    .permutations(n)
                    .map(Permutation::from_raw)
                    .collect(),
            )
        })
        .clone()
}

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        Err(Error::precondition("symmetric group enumeration", format!("degree <= {MAX_DEGREE}")))
    } else {
        Ok(())
    }
}

/// `Pat^(ℓ) σ`.
pub fn patterns(sigma: &Permutation, ell: usize) -> Result<BTreeSet<Permutation>> {
    let n = sigma.degree();
    if ell > n {
        return Err(Error::precondition("patterns", format!("0 <= ℓ <= {n}")));
    }
    let mut out = BTreeSet::new();
    let mut buf = Vec::with_capacity(ell);
    for s in (0..n).combinations(ell) {
        sigma.pattern_at_sorted(&s, &mut buf);
        out.insert(Permutation::from_raw(buf.clone()));
    }
    Ok(out)
}

/// `Pat^(ℓ) T`, the union over members of `T`.
pub fn patterns_of_set<'a>(
    set: impl IntoIterator<Item = &'a Permutation>,
    ell: usize,
) -> Result<BTreeSet<Permutation>> {
    let mut out = BTreeSet::new();
    for sigma in set {
        out.extend(patterns(sigma, ell)?);
    }
    Ok(out)
}

/// Whether every `ℓ`-pattern of `sigma` lies in `allowed`.
pub fn patterns_within(sigma: &Permutation, ell: usize, allowed: &BTreeSet<Permutation>) -> bool {
    let mut buf = Vec::with_capacity(ell);
    (0..sigma.degree()).combinations(ell).all(|s| {
        sigma.pattern_at_sorted(&s, &mut buf);
        allowed.contains(&Permutation::from_raw(buf.clone()))
    })
}

/// `Comp^(n) S`: the `n`-permutations all of whose `ℓ`-patterns lie in `S`.
pub fn comp(n: usize, ell: usize, set: &BTreeSet<Permutation>) -> Result<BTreeSet<Permutation>> {
    check_degree(n)?;
    if ell > n {
        return Err(Error::precondition("comp", format!("ℓ <= n = {n}")));
    }
    if let Some(bad) = set.iter().find(|p| p.degree() != ell) {
        return Err(Error::DegreeMismatch {
            expected: ell,
            found: bad.degree(),
        });
    }
    Ok(symmetric_group_elements(n)
        .iter()
        .filter(|pi| patterns_within(pi, ell, set))
        .cloned()
        .collect())
}

/// `{x⁻¹∘y : x, y ∈ S}`.
pub fn differences(set: &BTreeSet<Permutation>) -> Result<BTreeSet<Permutation>> {
    let first = set
        .iter()
        .next()
        .ok_or_else(|| Error::precondition("differences", "a nonempty set"))?;
    let n = first.degree();
    if let Some(bad) = set.iter().find(|p| p.degree() != n) {
        return Err(Error::DegreeMismatch {
            expected: n,
            found: bad.degree(),
        });
    }
    let inverses: Vec<Permutation> = set.iter().map(Permutation::inverse).collect();
    let mut out = BTreeSet::new();
    for xi in &inverses {
        for y in set {
            out.insert(xi.compose(y));
        }
    }
    Ok(out)
}

/// A permutation group given by its full element set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PermGroup {
    degree: usize,
    elements: BTreeSet<Permutation>,
}

impl PermGroup {
    /// Validates that `elements` contains the identity and is closed under
    /// products and inverses.
    pub fn new(degree: usize, elements: BTreeSet<Permutation>) -> Result<Self> {
        if let Some(bad) = elements.iter().find(|p| p.degree() != degree) {
            return Err(Error::DegreeMismatch {
                expected: degree,
                found: bad.degree(),
            });
        }
        if !elements.contains(&Permutation::identity(degree)) {
            return Err(Error::NotAGroup("identity missing".into()));
        }
        // Grow a subgroup from greedily chosen generators; the set is a group
        // exactly when this reproduces it.
        let mut gens: Vec<Permutation> = Vec::new();
        let mut span: BTreeSet<Permutation> = [Permutation::identity(degree)].into_iter().collect();
        for e in &elements {
            if !span.contains(e) {
                gens.push(e.clone());
                span = closure(degree, &gens);
                if !span.is_subset(&elements) {
                    return Err(Error::NotAGroup(format!(
                        "not closed: products of {} leave the set",
                        gens.iter().join(", ")
                    )));
                }
            }
        }
        if span != elements {
            return Err(Error::NotAGroup("not closed under products".into()));
        }
        Ok(PermGroup { degree, elements })
    }

    pub(crate) fn from_trusted(degree: usize, elements: BTreeSet<Permutation>) -> Self {
        debug_assert!(elements.contains(&Permutation::identity(degree)));
        PermGroup { degree, elements }
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            elements: [Permutation::identity(degree)].into_iter().collect(),
        }
    }

    pub fn symmetric(degree: usize) -> Result<Self> {
        check_degree(degree)?;
        Ok(PermGroup {
            degree,
            elements: symmetric_group_elements(degree).iter().cloned().collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn elements(&self) -> &BTreeSet<Permutation> {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.contains(p)
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements.is_subset(&other.elements)
    }

    pub fn intersection(&self, other: &PermGroup) -> PermGroup {
        assert_eq!(self.degree, other.degree);
        PermGroup {
            degree: self.degree,
            elements: self.elements.intersection(&other.elements).cloned().collect(),
        }
    }

    /// Checks identity, products and inverses directly (quadratic in order).
    pub fn satisfies_group_axioms(&self) -> bool {
        self.elements.contains(&Permutation::identity(self.degree))
            && self.elements.iter().all(|x| {
                self.elements.contains(&x.inverse())
                    && self.elements.iter().all(|y| self.elements.contains(&x.compose(y)))
            })
    }

    /// Orbits of the natural action on points, each sorted, ordered by least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            let mut orbit: Vec<usize> = self
                .elements
                .iter()
                .map(|g| g.apply(start))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            orbit.sort_unstable();
            for &p in &orbit {
                seen[p] = true;
            }
            out.push(orbit);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbits().len() == 1
    }

    /// A transitive group is imprimitive when some pair of points generates
    /// a proper block.
    pub fn is_imprimitive(&self) -> bool {
        if !self.is_transitive() || self.degree < 4 {
            return false;
        }
        (1..self.degree).any(|x| {
            let block = minimal_block(self, 0, x);
            block.len() < self.degree
        })
    }

    /// Serialized as a `degree=<n>` header and one permutation word per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("degree={}\n", self.degree);
        for p in &self.elements {
            out.push_str(&p.to_word().iter().join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, 1, "missing `degree=<n>` header"))?;
        let degree: usize = header
            .strip_prefix("degree=")
            .and_then(|d| d.trim().parse().ok())
            .ok_or_else(|| Error::parse(hline, 1, "expected `degree=<n>`"))?;
        let mut elements = BTreeSet::new();
        for (line, text) in lines {
            let p = Permutation::parse(text).map_err(|e| Error::parse(line, 1, e.to_string()))?;
            if p.degree() != degree {
                return Err(Error::parse(
                    line,
                    1,
                    format!("permutation of degree {} in a degree-{degree} group", p.degree()),
                ));
            }
            elements.insert(p);
        }
        elements.insert(Permutation::identity(degree));
        PermGroup::new(degree, elements)
    }
}

fn minimal_block(group: &PermGroup, a: usize, b: usize) -> Vec<usize> {
    let n = group.degree;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut x = x;
        while parent[x] != r {
            let next = parent[x];
            parent[x] = r;
            x = next;
        }
        r
    }
    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
    parent[rb] = ra;
    loop {
        let mut changed = false;
        for g in &group.elements {
            for x in 0..n {
                let rx = find(&mut parent, x);
                if rx == x {
                    continue;
                }
                let (gx, grx) = (g.apply(x), g.apply(rx));
                let (p, q) = (find(&mut parent, gx), find(&mut parent, grx));
                if p != q {
                    parent[p] = q;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let root = find(&mut parent, a);
    (0..n).filter(|&x| find(&mut parent, x) == root).collect()
}

impl fmt::Display for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.elements.iter().join(", "))
    }
}

impl Serialize for PermGroup {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("PermGroup", 3)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("order", &self.elements.len())?;
        st.serialize_field("elements", &self.elements)?;
        st.end()
    }
}

fn closure(degree: usize, gens: &[Permutation]) -> BTreeSet<Permutation> {
    let id = Permutation::identity(degree);
    let mut seen: BTreeSet<Permutation> = [id.clone()].into_iter().collect();
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.compose(g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// The subgroup generated by a nonempty set of same-degree permutations.
pub fn generate(set: &BTreeSet<Permutation>) -> Result<PermGroup> {
    let first = set
        .iter()
        .next()
        .ok_or_else(|| Error::precondition("generate", "a nonempty generating set"))?;
    let degree = first.degree();
    if let Some(bad) = set.iter().find(|p| p.degree() != degree) {
        return Err(Error::DegreeMismatch {
            expected: degree,
            found: bad.degree(),
        });
    }
    let gens: Vec<Permutation> = set.iter().filter(|p| !p.is_identity()).cloned().collect();
    Ok(PermGroup::from_trusted(degree, closure(degree, &gens)))
}

/// Outcome of the `ℓ`-equalizing test for one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EqualizingReport {
    pub ell: usize,
    pub pattern_count: usize,
    /// `|⟨Δ Pat^(ℓ) σ⟩|`.
    pub difference_group_order: usize,
    /// `|⟨Pat^(ℓ) σ⟩|`.
    pub pattern_group_order: usize,
    /// `⟨ΔP⟩ = ⟨P⟩`.
    pub groups_equal: bool,
    /// `⟨ΔP⟩ ∩ P ≠ ∅`.
    pub meets_patterns: bool,
    /// `P ⊆ ⟨ΔP⟩`.
    pub contains_patterns: bool,
    pub equalizing: bool,
}

/// Whether `⟨Δ Pat^(ℓ) σ⟩` meets `Pat^(ℓ) σ`. Level 0 is equalizing since
/// both sets are `{ε}`.
pub fn is_l_equalizing(sigma: &Permutation, ell: usize) -> Result<EqualizingReport> {
    let n = sigma.degree();
    if ell > n {
        return Err(Error::precondition("is_l_equalizing", format!("0 <= ℓ <= {n}")));
    }
    let pats = patterns(sigma, ell)?;
    let diff_group = generate(&differences(&pats)?)?;
    let pat_group = generate(&pats)?;
    let groups_equal = diff_group == pat_group;
    let meets_patterns = pats.iter().any(|p| diff_group.contains(p));
    let contains_patterns = pats.iter().all(|p| diff_group.contains(p));
    if groups_equal != meets_patterns || meets_patterns != contains_patterns {
        return Err(Error::Refused(format!(
            "inconsistent equalizing conditions for {sigma} at ℓ={ell}"
        )));
    }
    Ok(EqualizingReport {
        ell,
        pattern_count: pats.len(),
        difference_group_order: diff_group.order(),
        pattern_group_order: pat_group.order(),
        groups_equal,
        meets_patterns,
        contains_patterns,
        equalizing: meets_patterns,
    })
}

/// Per-level verdicts for `ℓ = 1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EqualizingClassification {
    pub permutation: Permutation,
    pub levels: Vec<EqualizingReport>,
    /// Equalizing at every level.
    pub equalizing: bool,
}

impl EqualizingClassification {
    pub fn differentiating_levels(&self) -> Vec<usize> {
        self.levels.iter().filter(|r| !r.equalizing).map(|r| r.ell).collect()
    }
}

pub fn classify_equalizing(sigma: &Permutation) -> Result<EqualizingClassification> {
    let levels = (1..=sigma.degree())
        .map(|ell| is_l_equalizing(sigma, ell))
        .collect::<Result<Vec<_>>>()?;
    let equalizing = levels.iter().all(|r| r.equalizing);
    Ok(EqualizingClassification {
        permutation: sigma.clone(),
        levels,
        equalizing,
    })
}

/// `π ⊕ τ`: `τ` shifted up and placed after `π`.
pub fn direct_sum(pi: &Permutation, tau: &Permutation) -> Permutation {
    let p = pi.degree() as u8;
    let mut images = pi.images.clone();
    images.extend(tau.images.iter().map(|&x| x + p));
    Permutation { images }
}

/// `π ⊖ τ`: `π` shifted up and placed before `τ`.
pub fn skew_sum(pi: &Permutation, tau: &Permutation) -> Permutation {
    let q = tau.degree() as u8;
    let mut images: Vec<u8> = pi.images.iter().map(|&x| x + q).collect();
    images.extend_from_slice(&tau.images);
    Permutation { images }
}

/// Named subgroups of `S_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum NamedGroup {
    Symmetric,
    Trivial,
    /// `{asc, desc}`.
    DescPair,
    /// `⟨ζ_n⟩`.
    Cyclic,
    /// `⟨ζ_n, δ_n⟩`.
    Dihedral,
    /// `S_n^{a,b}`: stabilizes `{1..a}` and `{n−b+1..n}` setwise, fixes the rest.
    StabilizerAb { a: usize, b: usize },
    /// `⟨S_n^{c,c}, δ_n⟩`.
    StabilizerCcDesc { c: usize },
}

impl NamedGroup {
    pub fn parse(name: &str, a: Option<usize>, b: Option<usize>) -> Result<Self> {
        Ok(match name {
            "symmetric" => NamedGroup::Symmetric,
            "trivial" => NamedGroup::Trivial,
            "desc_pair" => NamedGroup::DescPair,
            "cyclic" => NamedGroup::Cyclic,
            "dihedral" => NamedGroup::Dihedral,
            "stabilizer_ab" => NamedGroup::StabilizerAb {
                a: a.ok_or_else(|| Error::precondition("stabilizer_ab", "parameter a"))?,
                b: b.ok_or_else(|| Error::precondition("stabilizer_ab", "parameter b"))?,
            },
            "stabilizer_cc_desc" => NamedGroup::StabilizerCcDesc {
                c: a.ok_or_else(|| Error::precondition("stabilizer_cc_desc", "parameter c"))?,
            },
            other => {
                return Err(Error::precondition(
                    "named_group",
                    format!("a known group name, not {other:?}"),
                ))
            }
        })
    }
}

impl fmt::Display for NamedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedGroup::Symmetric => write!(f, "S_n"),
            NamedGroup::Trivial => write!(f, "{{asc_n}}"),
            NamedGroup::DescPair => write!(f, "<desc_n>"),
            NamedGroup::Cyclic => write!(f, "Z_n"),
            NamedGroup::Dihedral => write!(f, "D_n"),
            NamedGroup::StabilizerAb { a, b } => write!(f, "S_n^{{{a},{b}}}"),
            NamedGroup::StabilizerCcDesc { c } => write!(f, "<S_n^{{{c},{c}}}, desc_n>"),
        }
    }
}

pub fn named_group(name: NamedGroup, n: usize) -> Result<PermGroup> {
    check_degree(n)?;
    let gens = |g: Vec<Permutation>| PermGroup::from_trusted(n, closure(n, &g));
    Ok(match name {
        NamedGroup::Symmetric => PermGroup::symmetric(n)?,
        NamedGroup::Trivial => PermGroup::trivial(n),
        NamedGroup::DescPair => gens(vec![Permutation::descending(n)]),
        NamedGroup::Cyclic => gens(vec![Permutation::natural_cycle(n)]),
        NamedGroup::Dihedral => gens(vec![Permutation::natural_cycle(n), Permutation::descending(n)]),
        NamedGroup::StabilizerAb { a, b } => stabilizer_ab(n, a, b)?,
        NamedGroup::StabilizerCcDesc { c } => {
            let mut g: Vec<Permutation> = stabilizer_ab(n, c, c)?.elements.into_iter().collect();
            g.push(Permutation::descending(n));
            gens(g)
        }
    })
}

fn stabilizer_ab(n: usize, a: usize, b: usize) -> Result<PermGroup> {
    if a + b > n {
        return Err(Error::precondition("stabilizer_ab", format!("a + b <= n = {n}")));
    }
    let elements = symmetric_group_elements(n)
        .iter()
        .filter(|p| {
            (0..n).all(|i| {
                let x = p.apply(i);
                if i < a {
                    x < a
                } else if i >= n - b {
                    x >= n - b
                } else {
                    x == i
                }
            })
        })
        .cloned()
        .collect();
    Ok(PermGroup::from_trusted(n, elements))
}

/// The two families of `n`-permutations known to be `ℓ`-differentiating for
/// `3 <= ℓ <= n − 1`: `δ_m ⊕ δ_{n−m}` for `0 <= m <= n − 1`, and
/// `π ⊖ δ_{n−ℓ} ⊖ τ` for `π ∈ S_p`, `τ ∈ S_q`, `p, q >= 1`, `p + q = ℓ`.
pub fn listed_differentiating(n: usize, ell: usize) -> Result<BTreeSet<Permutation>> {
    check_degree(n)?;
    if ell < 3 || ell + 1 > n {
        return Err(Error::precondition("listed_differentiating", "3 <= ℓ <= n − 1"));
    }
    let mut out = BTreeSet::new();
    for m in 0..n {
        out.insert(direct_sum(&Permutation::descending(m), &Permutation::descending(n - m)));
    }
    let middle = Permutation::descending(n - ell);
    for p in 1..ell {
        for pi in symmetric_group_elements(p).iter() {
            for tau in symmetric_group_elements(ell - p).iter() {
                out.insert(skew_sum(&skew_sum(pi, &middle), tau));
            }
        }
    }
    Ok(out)
}

/// Whether `G` maps every 2-subset of points onto every other.
pub fn is_2set_transitive_group(group: &PermGroup) -> bool {
    let n = group.degree;
    if n < 2 {
        return true;
    }
    // Transitive on 2-subsets iff the orbit of {0,1} is everything.
    let mut orbit = BTreeSet::new();
    for g in &group.elements {
        let (x, y) = (g.apply(0), g.apply(1));
        orbit.insert((x.min(y), x.max(y)));
    }
    orbit.len() == n * (n - 1) / 2
}

/// Every subgroup of `S_ℓ`, by closing under adjoining one element at a time.
pub fn all_subgroups(ell: usize) -> Result<Vec<PermGroup>> {
    check_degree(ell)?;
    let elements = symmetric_group_elements(ell);
    let mut found: BTreeSet<BTreeSet<Permutation>> = BTreeSet::new();
    let trivial = PermGroup::trivial(ell).elements;
    found.insert(trivial.clone());
    let mut frontier = vec![trivial];
    while let Some(h) = frontier.pop() {
        for g in elements.iter() {
            if h.contains(g) {
                continue;
            }
            let mut gens: Vec<Permutation> = h.iter().cloned().collect();
            gens.push(g.clone());
            let bigger = closure(ell, &gens);
            if found.insert(bigger.clone()) {
                frontier.push(bigger);
            }
        }
    }
    let mut out: Vec<PermGroup> = found
        .into_iter()
        .map(|e| PermGroup::from_trusted(ell, e))
        .collect();
    out.sort_by(|x, y| x.order().cmp(&y.order()).then_with(|| x.elements.cmp(&y.elements)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(word: &str) -> Permutation {
        Permutation::parse(word).unwrap()
    }

    fn set(words: &[&str]) -> BTreeSet<Permutation> {
        words.iter().map(|w| p(w)).collect()
    }

    #[test]
    fn red_examples() {
        assert_eq!(red(&[5, 4, 1]).unwrap(), p("321"));
        assert_eq!(red(&[5, 3, 8, 6, 1]).unwrap(), p("32541"));
        assert_eq!(red(&[2, 4, 1, 3]).unwrap(), p("2413"));
        assert!(red(&[1, 2, 1]).is_err());
    }

    #[test]
    fn pattern_at_examples() {
        let sigma = p("54238617");
        assert_eq!(sigma.pattern_at(&[0, 1, 6]).unwrap(), p("321"));
        assert_eq!(sigma.pattern_at(&[0, 3, 4, 5, 6]).unwrap(), p("32541"));
        assert_eq!(sigma.pattern_at(&(0..8).collect::<Vec<_>>()).unwrap(), sigma);
        assert!(sigma.pattern_at(&[]).is_err());
    }

    #[test]
    fn pattern_definitions_agree() {
        for n in 1..=6 {
            for sigma in symmetric_group_elements(n).iter() {
                for mask in 1u32..(1 << n) {
                    let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                    let word: Vec<usize> = s.iter().map(|&i| sigma.apply(i)).collect();
                    assert_eq!(sigma.pattern_at(&s).unwrap(), red(&word).unwrap());
                }
            }
        }
    }

    #[test]
    fn patterns_examples() {
        assert_eq!(patterns(&p("4321"), 2).unwrap(), set(&["21"]));
        let sigma = p("2413");
        assert_eq!(patterns(&sigma, 4).unwrap(), set(&["2413"]));
        assert_eq!(patterns(&sigma, 1).unwrap(), set(&["1"]));
        assert!(patterns(&sigma, 5).is_err());
        let pats = patterns(&p("54238617"), 2).unwrap();
        assert!(pats.contains(&p("21")) && pats.contains(&p("12")));
    }

    #[test]
    fn comp_examples() {
        assert_eq!(comp(3, 2, &set(&["12"])).unwrap(), set(&["123"]));
        let s3: BTreeSet<_> = symmetric_group_elements(3).iter().cloned().collect();
        assert_eq!(comp(5, 3, &s3).unwrap().len(), 120);
        assert!(comp(4, 2, &set(&["123"])).is_err());
    }

    #[test]
    fn generate_examples() {
        let g = generate(&set(&["213", "231"])).unwrap();
        assert_eq!(g.order(), 6);
        assert!(generate(&set(&["123"])).unwrap().is_trivial());
        for n in 1..=6 {
            assert_eq!(generate(&[Permutation::natural_cycle(n)].into_iter().collect()).unwrap().order(), n);
        }
        assert!(generate(&BTreeSet::new()).is_err());
    }

    #[test]
    fn differences_examples() {
        assert_eq!(differences(&set(&["21"])).unwrap(), set(&["12"]));
        let s = set(&["231", "312", "132"]);
        let d = differences(&s).unwrap();
        assert!(d.contains(&Permutation::identity(3)));
        assert!(d.len() <= 9);
    }

    #[test]
    fn equalizing_examples() {
        assert!(!is_l_equalizing(&p("4321"), 2).unwrap().equalizing);
        assert!(is_l_equalizing(&p("2413"), 2).unwrap().equalizing);
        for sigma in symmetric_group_elements(4).iter() {
            let r = is_l_equalizing(sigma, 4).unwrap();
            assert_eq!(r.equalizing, sigma.is_identity());
        }
        let asc = classify_equalizing(&Permutation::identity(5)).unwrap();
        assert!(asc.equalizing);
        let desc = classify_equalizing(&Permutation::descending(5)).unwrap();
        assert_eq!(desc.differentiating_levels(), vec![2, 3, 4, 5]);
    }

    #[test]
    fn sums() {
        assert_eq!(direct_sum(&p("21"), &p("21")), p("2143"));
        assert_eq!(skew_sum(&p("12"), &p("12")), p("3412"));
        assert_eq!(direct_sum(&Permutation::identity(2), &Permutation::identity(3)), Permutation::identity(5));
        let empty = Permutation::identity(0);
        assert_eq!(direct_sum(&empty, &Permutation::descending(3)), Permutation::descending(3));
        assert_eq!(skew_sum(&Permutation::identity(3), &empty), Permutation::identity(3));
    }

    #[test]
    fn named_groups() {
        assert_eq!(named_group(NamedGroup::Cyclic, 4).unwrap().order(), 4);
        assert_eq!(named_group(NamedGroup::Dihedral, 4).unwrap().order(), 8);
        let st = named_group(NamedGroup::StabilizerAb { a: 2, b: 1 }, 5).unwrap();
        assert_eq!(st.elements(), &set(&["12345", "21345"]));
        let cc = named_group(NamedGroup::StabilizerCcDesc { c: 2 }, 5).unwrap();
        assert_eq!(cc.order(), 8);
        assert!(named_group(NamedGroup::StabilizerAb { a: 3, b: 3 }, 5).is_err());
        for name in [NamedGroup::Symmetric, NamedGroup::Trivial, NamedGroup::DescPair, NamedGroup::Cyclic, NamedGroup::Dihedral] {
            assert!(named_group(name, 5).unwrap().satisfies_group_axioms());
        }
    }

    #[test]
    fn two_set_transitivity() {
        assert!(is_2set_transitive_group(&PermGroup::symmetric(5).unwrap()));
        assert!(!is_2set_transitive_group(&PermGroup::trivial(3)));
        // The pentagon's edges form a single orbit, its diagonals another.
        assert!(!is_2set_transitive_group(&named_group(NamedGroup::Dihedral, 5).unwrap()));
        assert!(!is_2set_transitive_group(&named_group(NamedGroup::Dihedral, 4).unwrap()));
        // x -> x + 1 and x -> 2x generate AGL(1,5), which is 2-transitive.
        let affine = generate(&set(&["23451", "13524"])).unwrap();
        assert_eq!(affine.order(), 20);
        assert!(is_2set_transitive_group(&affine));
        for g in all_subgroups(4).unwrap() {
            let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
            let brute = pairs.iter().all(|&(a, b)| {
                pairs.iter().all(|&(c, d)| {
                    g.elements().iter().any(|s| {
                        let (x, y) = (s.apply(a), s.apply(b));
                        (x.min(y), x.max(y)) == (c, d)
                    })
                })
            });
            assert_eq!(is_2set_transitive_group(&g), brute);
        }
    }

    #[test]
    fn group_validation() {
        assert!(PermGroup::new(3, set(&["123", "213"])).is_ok());
        assert!(PermGroup::new(3, set(&["123", "231"])).is_err());
        assert!(PermGroup::new(3, set(&["213"])).is_err());
        let text = named_group(NamedGroup::Dihedral, 5).unwrap().to_text();
        assert_eq!(PermGroup::parse_text(&text).unwrap(), named_group(NamedGroup::Dihedral, 5).unwrap());
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(all_subgroups(3).unwrap().len(), 6);
        assert_eq!(all_subgroups(4).unwrap().len(), 30);
    }

    #[test]
    fn primitivity() {
        assert!(named_group(NamedGroup::Dihedral, 4).unwrap().is_imprimitive());
        assert!(!PermGroup::symmetric(4).unwrap().is_imprimitive());
        assert!(!named_group(NamedGroup::Dihedral, 5).unwrap().is_imprimitive());
        assert!(!PermGroup::trivial(4).is_transitive());
    }
}
