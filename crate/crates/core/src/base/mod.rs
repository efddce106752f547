//! Concrete base probability spaces `(S, nu)` with their group actions.
//!
//! * Bernoulli model: `{0,1}^Z` with the uniform product measure, acted on by
//!   the integers. The shift moves points by `(g.x)_k = x_{k-g}`, so as a set
//!   `gE` has its support translated by `+g`.
//! * Circle model: `R/Z` with Lebesgue measure, acted on by rotations.

mod arcs;
mod cylinder;
mod group;

use std::fmt;

use num_traits::Zero;

pub use arcs::ArcUnion;
pub use cylinder::{Cylinder, MAX_SUPPORT};
pub use group::{CompactWindow, GroupElement};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::invariance::overlap;

/// Largest support a symbolic majority set is materialized on.
pub const DEFAULT_LOWERING_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Bernoulli,
    Circle,
}

/// The window-majority event `{x : x_o + ... + x_{o+2n} >= n+1}` with `o = offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MajoritySet {
    pub n: u64,
    pub offset: i64,
}

impl MajoritySet {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSet("majority window needs n >= 1".into()));
        }
        Ok(MajoritySet { n, offset: 0 })
    }

    pub fn window_len(&self) -> u64 {
        2 * self.n + 1
    }

    pub fn support(&self) -> Vec<i64> {
        (self.offset..=self.offset + 2 * self.n as i64).collect()
    }

    pub fn lower(&self, cap: usize) -> Result<Cylinder> {
        let len = self.window_len() as usize;
        if len > cap.min(MAX_SUPPORT) {
            return Err(Error::LoweringCapExceeded { support: len, cap });
        }
        let clauses = (0u64..(1u64 << len))
            .filter(|c| c.count_ones() as u64 > self.n)
            .collect();
        Ok(Cylinder::canonical(self.support(), clauses))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    Intersect,
    Union,
    Diff,
    SymDiff,
}

impl BoolOp {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::Intersect => a && b,
            BoolOp::Union => a || b,
            BoolOp::Diff => a && !b,
            BoolOp::SymDiff => a != b,
        }
    }
}

/// A measurable subset of one of the two base spaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseSet {
    Cylinder(Cylinder),
    Arcs(ArcUnion),
    Majority(MajoritySet),
}

impl BaseSet {
    pub fn literal(coord: i64, bit: bool) -> Self {
        BaseSet::Cylinder(Cylinder::literal(coord, bit))
    }

    pub fn arc(a: Rational, b: Rational) -> Result<Self> {
        Ok(BaseSet::Arcs(ArcUnion::new(vec![(a, b)])?))
    }

    pub fn majority(n: u64) -> Result<Self> {
        Ok(BaseSet::Majority(MajoritySet::new(n)?))
    }

    pub fn full(model: Model) -> Self {
        match model {
            Model::Bernoulli => BaseSet::Cylinder(Cylinder::full()),
            Model::Circle => BaseSet::Arcs(ArcUnion::full()),
        }
    }

    pub fn empty(model: Model) -> Self {
        match model {
            Model::Bernoulli => BaseSet::Cylinder(Cylinder::empty()),
            Model::Circle => BaseSet::Arcs(ArcUnion::empty()),
        }
    }

    pub fn model(&self) -> Model {
        match self {
            BaseSet::Cylinder(_) | BaseSet::Majority(_) => Model::Bernoulli,
            BaseSet::Arcs(_) => Model::Circle,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            BaseSet::Cylinder(c) => c.is_empty(),
            BaseSet::Arcs(a) => a.is_empty(),
            BaseSet::Majority(_) => false,
        }
    }

    /// Exact base measure.
    pub fn nu(&self) -> Rational {
        match self {
            BaseSet::Cylinder(c) => c.measure(),
            BaseSet::Arcs(a) => a.measure(),
            // flipping every coordinate swaps A_n with its complement
            BaseSet::Majority(_) => Rational::new(1.into(), 2.into()),
        }
    }

    /// Coordinates a Bernoulli-model set depends on; `None` for arcs.
    pub fn support(&self) -> Option<Vec<i64>> {
        match self {
            BaseSet::Cylinder(c) => Some(c.support().to_vec()),
            BaseSet::Majority(m) => Some(m.support()),
            BaseSet::Arcs(_) => None,
        }
    }

    /// The image `gE`.
    pub fn act(&self, g: &GroupElement) -> Result<BaseSet> {
        match (g, self) {
            (GroupElement::ShiftBy(d), BaseSet::Cylinder(c)) => Ok(BaseSet::Cylinder(c.shifted(*d))),
            (GroupElement::ShiftBy(d), BaseSet::Majority(m)) => Ok(BaseSet::Majority(MajoritySet {
                n: m.n,
                offset: m.offset + d,
            })),
            (GroupElement::RotateBy(t), BaseSet::Arcs(a)) => Ok(BaseSet::Arcs(a.rotated(t))),
            _ => Err(Error::ModelMismatch),
        }
    }

    /// Materializes a symbolic majority set as an explicit cylinder union.
    pub fn lowered(&self, cap: usize) -> Result<BaseSet> {
        match self {
            BaseSet::Majority(m) => Ok(BaseSet::Cylinder(m.lower(cap)?)),
            other => Ok(other.clone()),
        }
    }

    pub fn boolean(&self, op: BoolOp, other: &BaseSet) -> Result<BaseSet> {
        self.boolean_with_cap(op, other, DEFAULT_LOWERING_CAP)
    }

    pub fn boolean_with_cap(&self, op: BoolOp, other: &BaseSet, cap: usize) -> Result<BaseSet> {
        if self.model() != other.model() {
            return Err(Error::ModelMismatch);
        }
        let model = self.model();
        if self == other {
            return Ok(match op {
                BoolOp::Intersect | BoolOp::Union => self.clone(),
                BoolOp::Diff | BoolOp::SymDiff => BaseSet::empty(model),
            });
        }
        match (self.lowered(cap)?, other.lowered(cap)?) {
            (BaseSet::Cylinder(a), BaseSet::Cylinder(b)) => {
                Ok(BaseSet::Cylinder(a.combine(&b, cap, |x, y| op.apply(x, y))?))
            }
            (BaseSet::Arcs(a), BaseSet::Arcs(b)) => Ok(BaseSet::Arcs(a.combine(&b, |x, y| op.apply(x, y)))),
            _ => Err(Error::ModelMismatch),
        }
    }

    pub fn complement(&self) -> Result<BaseSet> {
        BaseSet::full(self.model()).boolean(BoolOp::Diff, self)
    }

    /// `nu(E ∩ F)`. Two majority sets of equal window size go through the
    /// exact overlap computation, never through lowering.
    pub fn intersection_measure(&self, other: &BaseSet) -> Result<Rational> {
        if self.model() != other.model() {
            return Err(Error::ModelMismatch);
        }
        if self == other {
            return Ok(self.nu());
        }
        match (self, other) {
            (BaseSet::Majority(a), BaseSet::Majority(b)) if a.n == b.n => {
                return Ok(overlap(a.n, a.offset.abs_diff(b.offset)));
            }
            (BaseSet::Majority(_), _) | (_, BaseSet::Majority(_)) => {
                if let (Some(sa), Some(sb)) = (self.support(), other.support()) {
                    if sa.iter().all(|c| sb.binary_search(c).is_err()) {
                        return Ok(self.nu() * other.nu());
                    }
                }
            }
            _ => {}
        }
        Ok(self.boolean(BoolOp::Intersect, other)?.nu())
    }

    pub fn is_subset_of(&self, other: &BaseSet) -> Result<bool> {
        if self == other || self.is_empty() {
            return Ok(true);
        }
        Ok(self.boolean(BoolOp::Diff, other)?.is_empty())
    }

    pub fn is_disjoint_from(&self, other: &BaseSet) -> Result<bool> {
        if self.model() != other.model() {
            return Err(Error::ModelMismatch);
        }
        if self.is_empty() || other.is_empty() {
            return Ok(true);
        }
        if let (Some(sa), Some(sb)) = (self.support(), other.support()) {
            if sa.iter().all(|c| sb.binary_search(c).is_err()) {
                // independent nonempty sets always meet
                return Ok(false);
            }
        }
        if self == other {
            return Ok(false);
        }
        Ok(self.intersection_measure(other)?.is_zero())
    }
}

impl fmt::Display for BaseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::literal::format_base_set(self))
    }
}

/// Smallest `r` such that `dA` and `B` depend on disjoint coordinate blocks
/// for every `|d| >= r`; beyond it `nu(dA ∩ B) = nu(A) nu(B)` exactly.
pub fn mixing_threshold(a: &BaseSet, b: &BaseSet) -> Result<u64> {
    let (Some(sa), Some(sb)) = (a.support(), b.support()) else {
        return Err(Error::NotBernoulli);
    };
    let (Some(a_min), Some(a_max), Some(b_min), Some(b_max)) = (sa.first(), sa.last(), sb.first(), sb.last()) else {
        return Ok(0);
    };
    // (sa + d) ∩ sb is nonempty only for d = b - a; the extreme such d are
    // attained at the ends of both supports.
    let reach = (b_max - a_min).unsigned_abs().max((b_min - a_max).unsigned_abs());
    Ok(reach + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn cyl(clauses: &[&[(i64, bool)]]) -> BaseSet {
        let v: Vec<Vec<(i64, bool)>> = clauses.iter().map(|c| c.to_vec()).collect();
        BaseSet::Cylinder(Cylinder::from_clauses(&v).unwrap())
    }

    #[test]
    fn nu_examples() {
        assert_eq!(BaseSet::literal(0, true).nu(), rat(1, 2));
        for n in 1..=8 {
            assert_eq!(BaseSet::majority(n).unwrap().nu(), rat(1, 2));
            assert_eq!(crate::invariance::majority_measure(n), rat(1, 2));
        }
        assert_eq!(BaseSet::arc(int(0), rat(1, 2)).unwrap().nu(), rat(1, 2));
    }

    #[test]
    fn act_examples() {
        let e = BaseSet::literal(0, true);
        assert_eq!(e.act(&GroupElement::shift(0)).unwrap(), e);
        assert_eq!(e.act(&GroupElement::shift(2)).unwrap(), BaseSet::literal(2, true));
        let arc = BaseSet::arc(int(0), rat(1, 2)).unwrap();
        assert_eq!(
            arc.act(&GroupElement::rotate(rat(1, 3))).unwrap(),
            BaseSet::arc(rat(1, 3), rat(5, 6)).unwrap()
        );
        assert_eq!(
            BaseSet::majority(2).unwrap().act(&GroupElement::shift(3)).unwrap(),
            BaseSet::Majority(MajoritySet { n: 2, offset: 3 })
        );
        assert_eq!(arc.act(&GroupElement::shift(1)), Err(Error::ModelMismatch));
    }

    #[test]
    fn boolean_examples() {
        let x0 = BaseSet::literal(0, true);
        let x1 = BaseSet::literal(1, true);
        let both = x0.boolean(BoolOp::Intersect, &x1).unwrap();
        assert_eq!(both, cyl(&[&[(0, true), (1, true)]]));
        assert_eq!(both.nu(), rat(1, 4));
        assert!(x0.boolean(BoolOp::SymDiff, &x0).unwrap().is_empty());

        let a = BaseSet::arc(int(0), rat(1, 2)).unwrap();
        let b = BaseSet::arc(rat(1, 3), rat(5, 6)).unwrap();
        let i = a.boolean(BoolOp::Intersect, &b).unwrap();
        assert_eq!(i, BaseSet::arc(rat(1, 3), rat(1, 2)).unwrap());
        assert_eq!(i.nu(), rat(1, 6));
        assert_eq!(a.boolean(BoolOp::Intersect, &x0), Err(Error::ModelMismatch));
    }

    #[test]
    fn majority_lowering_and_cap() {
        let m1 = BaseSet::majority(1).unwrap();
        let lowered = m1.lowered(DEFAULT_LOWERING_CAP).unwrap();
        assert_eq!(lowered.nu(), rat(1, 2));
        assert_eq!(lowered.support().unwrap(), vec![0, 1, 2]);
        let big = BaseSet::majority(12).unwrap();
        assert!(matches!(
            big.boolean(BoolOp::Intersect, &BaseSet::literal(0, true)),
            Err(Error::LoweringCapExceeded { support: 25, .. })
        ));
        // symbolic route avoids lowering
        let shifted = big.act(&GroupElement::shift(1)).unwrap();
        assert!(big.intersection_measure(&shifted).is_ok());
        assert_eq!(
            big.intersection_measure(&BaseSet::literal(-5, true)).unwrap(),
            rat(1, 4)
        );
    }

    #[test]
    fn mixing_threshold_examples() {
        let x0 = BaseSet::literal(0, true);
        assert_eq!(mixing_threshold(&x0, &x0).unwrap(), 1);
        let a = cyl(&[&[(0, true), (1, false)]]);
        assert_eq!(mixing_threshold(&a, &x0).unwrap(), 2);
        let m = BaseSet::majority(1).unwrap();
        assert_eq!(mixing_threshold(&m, &m).unwrap(), 3);
        assert_eq!(mixing_threshold(&BaseSet::empty(Model::Bernoulli), &x0).unwrap(), 0);
        let arc = BaseSet::arc(int(0), rat(1, 2)).unwrap();
        assert_eq!(mixing_threshold(&arc, &arc), Err(Error::NotBernoulli));
    }

    #[test]
    fn majority_one_mixes_at_three() {
        // Exhaustive: for |d| >= 3 the shifted windows are disjoint.
        let m = BaseSet::majority(1).unwrap();
        for d in [-4i64, -3, 3, 4] {
            let md = m.act(&GroupElement::shift(d)).unwrap();
            let i = md
                .lowered(24)
                .unwrap()
                .boolean(BoolOp::Intersect, &m.lowered(24).unwrap())
                .unwrap();
            assert_eq!(i.nu(), rat(1, 4));
        }
        let m2 = m.act(&GroupElement::shift(2)).unwrap();
        assert_ne!(m.intersection_measure(&m2).unwrap(), rat(1, 4));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        pub(crate) fn cylinder_strategy() -> impl Strategy<Value = BaseSet> {
            proptest::collection::vec(proptest::collection::vec((-3i64..=3, any::<bool>()), 1..4), 0..4)
                .prop_map(|clauses| BaseSet::Cylinder(Cylinder::from_clauses(&clauses).unwrap()))
        }

        fn arc_strategy() -> impl Strategy<Value = BaseSet> {
            proptest::collection::vec((0i64..12, 1i64..6), 0..4).prop_map(|v| {
                let arcs = v
                    .into_iter()
                    .map(|(a, len)| (rat(a, 12), rat((a + len).min(12), 12)))
                    .collect();
                BaseSet::Arcs(ArcUnion::new(arcs).unwrap())
            })
        }

        proptest! {
            #[test]
            fn shift_preserves_measure(e in cylinder_strategy(), d in -20i64..20) {
                prop_assert_eq!(e.act(&GroupElement::shift(d)).unwrap().nu(), e.nu());
            }

            #[test]
            fn rotation_preserves_measure(e in arc_strategy(), p in 0i64..60) {
                let g = GroupElement::rotate(rat(p, 60));
                prop_assert_eq!(e.act(&g).unwrap().nu(), e.nu());
            }

            #[test]
            fn modularity_cylinders(e in cylinder_strategy(), f in cylinder_strategy()) {
                let u = e.boolean(BoolOp::Union, &f).unwrap().nu();
                let i = e.boolean(BoolOp::Intersect, &f).unwrap().nu();
                prop_assert_eq!(u + i, e.nu() + f.nu());
            }

            #[test]
            fn modularity_arcs(e in arc_strategy(), f in arc_strategy()) {
                let u = e.boolean(BoolOp::Union, &f).unwrap().nu();
                let i = e.boolean(BoolOp::Intersect, &f).unwrap().nu();
                prop_assert_eq!(u + i, e.nu() + f.nu());
            }

            #[test]
            fn action_axioms_shift(e in cylinder_strategy(), a in -9i64..9, b in -9i64..9) {
                let (g, h) = (GroupElement::shift(a), GroupElement::shift(b));
                let lhs = e.act(&h).unwrap().act(&g).unwrap();
                let rhs = e.act(&g.compose(&h).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
                prop_assert_eq!(e.act(&GroupElement::shift(0)).unwrap(), e);
            }

            #[test]
            fn action_axioms_rotation(e in arc_strategy(), a in 0i64..24, b in 0i64..24) {
                let (g, h) = (GroupElement::rotate(rat(a, 24)), GroupElement::rotate(rat(b, 24)));
                let lhs = e.act(&h).unwrap().act(&g).unwrap();
                let rhs = e.act(&g.compose(&h).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn mixing_is_exact_beyond_threshold(a in cylinder_strategy(), b in cylinder_strategy(), extra in 0u64..4) {
                let r = mixing_threshold(&a, &b).unwrap();
                for sign in [-1i64, 1] {
                    let d = sign * (r + extra) as i64;
                    let da = a.act(&GroupElement::shift(d)).unwrap();
                    prop_assert_eq!(da.intersection_measure(&b).unwrap(), a.nu() * b.nu());
                }
            }
        }
    }
}
