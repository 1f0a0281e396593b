//! Dense enumeration of `Aⁿ` with per-invariant fiber ids, shared between
//! callers through a process-wide cache.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::patterns::Permutation;
use crate::strings::{checked_pow, counts_of, cs_canonical_raw, ofo_canonical_raw, Symbol};

/// The four tuple summaries a function can factor through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Invariant {
    Supp,
    Ofo,
    Ms,
    Cs,
}

impl Invariant {
    pub const ALL: [Invariant; 4] = [Invariant::Supp, Invariant::Ofo, Invariant::Ms, Invariant::Cs];

    pub fn name(self) -> &'static str {
        match self {
            Invariant::Supp => "supp",
            Invariant::Ofo => "ofo",
            Invariant::Ms => "ms",
            Invariant::Cs => "cs",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "supp" => Ok(Invariant::Supp),
            "ofo" => Ok(Invariant::Ofo),
            "ms" => Ok(Invariant::Ms),
            "cs" => Ok(Invariant::Cs),
            other => Err(Error::precondition(
                "invariant",
                format!("one of supp, ofo, ms, cs (got {other:?})"),
            )),
        }
    }

    /// Canonical representative of the fiber containing `a`: sorted support,
    /// `ofo_canonical`, sorted content, `cs_canonical` respectively.
    pub(crate) fn key(self, k: usize, a: &[Symbol]) -> Vec<Symbol> {
        match self {
            Invariant::Supp => {
                let counts = counts_of(k, a);
                (0..k).filter(|&x| counts[x] > 0).map(|x| x as Symbol).collect()
            }
            Invariant::Ofo => {
                if a.is_empty() {
                    Vec::new()
                } else {
                    ofo_canonical_raw(k, a)
                }
            }
            Invariant::Ms => {
                let mut v = a.to_vec();
                v.sort_unstable();
                v
            }
            Invariant::Cs => cs_canonical_raw(k, a),
        }
    }
}

/// Fiber partition of `Aⁿ` under one invariant.
#[derive(Debug)]
pub struct Fibers {
    /// Fiber id of each tuple index.
    pub ids: Vec<u32>,
    /// Canonical key of each fiber, in order of first appearance.
    pub keys: Vec<Vec<Symbol>>,
}

#[derive(Debug)]
pub struct Domain {
    k: usize,
    n: usize,
    size: usize,
    digits: Vec<Symbol>,
    weights: Vec<usize>,
    fibers: [OnceLock<Fibers>; 4],
    repeated: OnceLock<Vec<bool>>,
}

impl Domain {
    /// The shared domain for `(k, n)`.
    pub fn shared(k: usize, n: usize) -> Result<Arc<Domain>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Domain>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(d) = cache.lock().unwrap().get(&(k, n)) {
            return Ok(d.clone());
        }
        let d = Arc::new(Domain::build(k, n)?);
        cache.lock().unwrap().insert((k, n), d.clone());
        Ok(d)
    }

    fn build(k: usize, n: usize) -> Result<Domain> {
        if k == 0 || k > crate::strings::MAX_ALPHABET {
            return Err(Error::precondition("alphabet", "1 <= k <= 255"));
        }
        let size = checked_pow(k, n).ok_or(Error::DomainTooLarge { k, n })?;
        let mut digits = Vec::with_capacity(size * n);
        let mut cur = vec![0 as Symbol; n];
        for _ in 0..size {
            digits.extend_from_slice(&cur);
            for pos in (0..n).rev() {
                if (cur[pos] as usize) + 1 < k {
                    cur[pos] += 1;
                    break;
                }
                cur[pos] = 0;
            }
        }
        let mut weights = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            weights[i] = weights[i + 1] * k;
        }
        Ok(Domain {
            k,
            n,
            size,
            digits,
            weights,
            fibers: Default::default(),
            repeated: OnceLock::new(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tuple(&self, idx: usize) -> &[Symbol] {
        &self.digits[idx * self.n..(idx + 1) * self.n]
    }

    pub fn index_of(&self, a: &[Symbol]) -> usize {
        a.iter().zip(&self.weights).map(|(&x, &w)| x as usize * w).sum()
    }

    /// Weights such that `index(a∘σ) = Σ_j a[j]·w[j]`.
    pub fn permuted_weights(&self, sigma: &Permutation) -> Vec<usize> {
        let mut w = vec![0usize; self.n];
        for i in 0..self.n {
            w[sigma.apply(i)] = self.weights[i];
        }
        w
    }

    #[inline]
    pub fn index_with(&self, idx: usize, weights: &[usize]) -> usize {
        self.tuple(idx)
            .iter()
            .zip(weights)
            .map(|(&x, &w)| x as usize * w)
            .sum()
    }

    /// `map[idx(a)] = idx(a∘σ)`.
    pub fn permutation_map(&self, sigma: &Permutation) -> Vec<u32> {
        let w = self.permuted_weights(sigma);
        (0..self.size).map(|i| self.index_with(i, &w) as u32).collect()
    }

    pub fn fibers(&self, inv: Invariant) -> &Fibers {
        let slot = match inv {
            Invariant::Supp => 0,
            Invariant::Ofo => 1,
            Invariant::Ms => 2,
            Invariant::Cs => 3,
        };
        self.fibers[slot].get_or_init(|| {
            let mut lookup: HashMap<Vec<Symbol>, u32> = HashMap::new();
            let mut keys = Vec::new();
            let mut ids = Vec::with_capacity(self.size);
            for i in 0..self.size {
                let key = inv.key(self.k, self.tuple(i));
                let next = keys.len() as u32;
                let id = *lookup.entry(key.clone()).or_insert_with(|| {
                    keys.push(key);
                    next
                });
                ids.push(id);
            }
            Fibers { ids, keys }
        })
    }

    /// `true` at tuples with at least one repeated entry.
    pub fn repeated_mask(&self) -> &[bool] {
        self.repeated.get_or_init(|| {
            (0..self.size)
                .map(|i| {
                    let counts = counts_of(self.k, self.tuple(i));
                    counts.iter().any(|&c| c >= 2)
                })
                .collect()
        })
    }
}
