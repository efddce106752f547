use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::Rational;
use crate::error::{Error, Result};

/// Hard ceiling on the number of constrained coordinates, set by the `u64`
/// clause encoding.
pub const MAX_SUPPORT: usize = 64;

/// A finite union of cylinder sets in `{0,1}^Z`.
///
/// Clause `c` is a total assignment on `support`: bit `j` of `c` is the value
/// of coordinate `support[j]`. Distinct clauses are disjoint cylinders. The
/// canonical form keeps only coordinates the set actually depends on, so two
/// cylinders are equal as sets iff they are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cylinder {
    support: Vec<i64>,
    clauses: BTreeSet<u64>,
}

impl Cylinder {
    pub fn empty() -> Self {
        Cylinder {
            support: Vec::new(),
            clauses: BTreeSet::new(),
        }
    }

    pub fn full() -> Self {
        Cylinder {
            support: Vec::new(),
            clauses: BTreeSet::from([0]),
        }
    }

    /// `{x : x_coord = bit}`.
    pub fn literal(coord: i64, bit: bool) -> Self {
        Cylinder {
            support: vec![coord],
            clauses: BTreeSet::from([bit as u64]),
        }
    }

    /// Union of conjunction clauses, each a list of `(coordinate, bit)` pairs.
    /// Clauses may constrain different coordinates and may overlap.
    pub fn from_clauses(clauses: &[Vec<(i64, bool)>]) -> Result<Self> {
        let mut support: Vec<i64> = clauses.iter().flatten().map(|(c, _)| *c).collect();
        support.sort_unstable();
        support.dedup();
        if support.len() > MAX_SUPPORT {
            return Err(Error::LoweringCapExceeded {
                support: support.len(),
                cap: MAX_SUPPORT,
            });
        }
        let mut out = BTreeSet::new();
        for clause in clauses {
            let mut fixed_mask = 0u64;
            let mut fixed_val = 0u64;
            for &(c, b) in clause {
                let j = support.binary_search(&c).expect("coordinate in support");
                let bit = 1u64 << j;
                if fixed_mask & bit != 0 && ((fixed_val & bit != 0) != b) {
                    // contradictory literals: empty clause
                    fixed_mask = u64::MAX;
                    break;
                }
                fixed_mask |= bit;
                if b {
                    fixed_val |= bit;
                }
            }
            if fixed_mask == u64::MAX {
                continue;
            }
            let free: Vec<usize> = (0..support.len()).filter(|j| fixed_mask & (1 << j) == 0).collect();
            if free.len() > 24 {
                return Err(Error::LoweringCapExceeded {
                    support: support.len(),
                    cap: 24,
                });
            }
            for bits in 0u64..(1u64 << free.len()) {
                let mut c = fixed_val;
                for (i, &j) in free.iter().enumerate() {
                    if bits & (1 << i) != 0 {
                        c |= 1 << j;
                    }
                }
                out.insert(c);
            }
        }
        Ok(Cylinder::canonical(support, out))
    }

    /// Builds from a support and clause set already aligned to it.
    pub(crate) fn canonical(support: Vec<i64>, clauses: BTreeSet<u64>) -> Self {
        let s = support.len();
        let essential: Vec<usize> = (0..s)
            .filter(|&j| clauses.iter().any(|c| !clauses.contains(&(c ^ (1 << j)))))
            .collect();
        if essential.len() == s {
            return Cylinder { support, clauses };
        }
        let new_support = essential.iter().map(|&j| support[j]).collect();
        let inessential_mask: u64 = (0..s).filter(|j| !essential.contains(j)).map(|j| 1u64 << j).sum();
        let new_clauses = clauses
            .iter()
            .filter(|c| *c & inessential_mask == 0)
            .map(|c| compress(*c, &essential))
            .collect();
        Cylinder {
            support: new_support,
            clauses: new_clauses,
        }
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn clauses(&self) -> &BTreeSet<u64> {
        &self.clauses
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.support.is_empty() && !self.clauses.is_empty()
    }

    pub fn measure(&self) -> Rational {
        Rational::new(BigInt::from(self.clauses.len()), BigInt::one() << self.support.len())
    }

    pub fn shifted(&self, d: i64) -> Self {
        Cylinder {
            support: self.support.iter().map(|c| c + d).collect(),
            clauses: self.clauses.clone(),
        }
    }

    /// Bit of coordinate `coord` in clause `c`, if constrained.
    pub fn clause_bit(&self, c: u64, coord: i64) -> Option<bool> {
        self.support.binary_search(&coord).ok().map(|j| c & (1 << j) != 0)
    }

    /// Membership table indexed by projections onto `union`.
    fn projector(&self, union: &[i64]) -> Vec<usize> {
        self.support
            .iter()
            .map(|c| union.binary_search(c).expect("support contained in union"))
            .collect()
    }

    /// Evaluates `op` pointwise over the union support by exhaustive
    /// enumeration of its `2^|union|` assignments.
    pub(crate) fn combine(&self, other: &Cylinder, cap: usize, op: impl Fn(bool, bool) -> bool) -> Result<Self> {
        let mut union: Vec<i64> = self.support.iter().chain(other.support.iter()).copied().collect();
        union.sort_unstable();
        union.dedup();
        if union.len() > cap.min(MAX_SUPPORT) {
            return Err(Error::LoweringCapExceeded {
                support: union.len(),
                cap,
            });
        }
        let table_a = self.table();
        let table_b = other.table();
        let pa = self.projector(&union);
        let pb = other.projector(&union);
        let mut out = BTreeSet::new();
        for a in 0u64..(1u64 << union.len()) {
            let ia = project(a, &pa);
            let ib = project(a, &pb);
            if op(table_a[ia as usize], table_b[ib as usize]) {
                out.insert(a);
            }
        }
        Ok(Cylinder::canonical(union, out))
    }

    fn table(&self) -> Vec<bool> {
        let mut t = vec![false; 1usize << self.support.len()];
        for &c in &self.clauses {
            t[c as usize] = true;
        }
        t
    }
}

/// Gathers the bits of `a` at `positions` into a compact index.
fn project(a: u64, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &p)| acc | (((a >> p) & 1) << i))
}

fn compress(c: u64, keep: &[usize]) -> u64 {
    project(c, keep)
}
