//! Head-finite product sets over `X = prod_{k>=1} S` and their measure.
//!
//! A [`Rectangle`] is `A_1 x ... x A_h x T_{h+1} x T_{h+2} x ...`, where the
//! tail factors come from a shared [`TailContext`] and all have base measure
//! exactly `1/2`. The product measure `mu(A) = prod_k 2 nu(A_k)` is then the
//! finite head product. Finite disjoint unions of rectangles over one tail
//! form a [`RingSet`]; set expressions are normalized into that form by
//! coordinate-wise splitting.

mod c0;

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

pub use c0::{c0_eval, c0_threshold, C0Threshold, C0Value};

use crate::arith::{int, Rational};
use crate::base::{BaseSet, BoolOp, GroupElement, MajoritySet, Model};
use crate::error::{Error, Result};
use crate::literal::{format_rect_parts, RectLiteral, TailLiteral};
use crate::witness::WitnessSchedule;

/// Default cap on `N` for [`disjoint_family`].
pub const DEFAULT_FAMILY_CAP: u32 = 10;

/// The infinitely many factors beyond a rectangle's head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailContext {
    /// Every tail factor is the same set of measure `1/2`.
    Half(BaseSet),
    /// Tail factor `k` is the majority set `A_{n(k,m)}`, translated by `shift`.
    Schedule {
        schedule: Arc<WitnessSchedule>,
        m: u64,
        shift: i64,
    },
}

impl TailContext {
    pub fn half(set: BaseSet) -> Result<Self> {
        let nu = set.nu();
        if nu != Rational::new(1.into(), 2.into()) {
            return Err(Error::MeasureNotHalf(nu));
        }
        Ok(TailContext::Half(set))
    }

    pub fn schedule(schedule: Arc<WitnessSchedule>, m: u64) -> Result<Self> {
        if m == 0 || m > schedule.m_max() {
            return Err(Error::ScheduleIndexOutOfRange { k: 1, m });
        }
        Ok(TailContext::Schedule { schedule, m, shift: 0 })
    }

    pub fn model(&self) -> Model {
        match self {
            TailContext::Half(t) => t.model(),
            TailContext::Schedule { .. } => Model::Bernoulli,
        }
    }

    /// Factor at (1-based) index `k`.
    pub fn factor(&self, k: usize) -> Result<BaseSet> {
        match self {
            TailContext::Half(t) => Ok(t.clone()),
            TailContext::Schedule { schedule, m, shift } => Ok(BaseSet::Majority(MajoritySet {
                n: schedule.n(k, *m)?,
                offset: *shift,
            })),
        }
    }

    pub fn act(&self, g: &GroupElement) -> Result<TailContext> {
        match (self, g) {
            (TailContext::Half(t), _) => Ok(TailContext::Half(t.act(g)?)),
            (TailContext::Schedule { schedule, m, shift }, GroupElement::ShiftBy(d)) => Ok(TailContext::Schedule {
                schedule: Arc::clone(schedule),
                m: *m,
                shift: shift + d,
            }),
            _ => Err(Error::ModelMismatch),
        }
    }

    pub fn to_literal(&self) -> TailLiteral {
        match self {
            TailContext::Half(t) => TailLiteral::Half(t.clone()),
            TailContext::Schedule { m, shift, .. } => TailLiteral::Schedule { m: *m, shift: *shift },
        }
    }
}

/// A product set with finitely many explicit head factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rectangle {
    head: Vec<BaseSet>,
    tail: TailContext,
}

impl Rectangle {
    /// Builds a rectangle; trailing head factors equal to the tail factor at
    /// their index are dropped so equal sets compare equal.
    pub fn new(head: Vec<BaseSet>, tail: TailContext) -> Result<Self> {
        let model = tail.model();
        if head.iter().any(|f| f.model() != model) {
            return Err(Error::ModelMismatch);
        }
        let mut r = Rectangle { head, tail };
        while let Some(last) = r.head.last() {
            if *last == r.tail.factor(r.head.len())? {
                r.head.pop();
            } else {
                break;
            }
        }
        Ok(r)
    }

    /// Binds a parsed literal; schedule tails need `schedule`.
    pub fn from_literal(lit: &RectLiteral, schedule: Option<&Arc<WitnessSchedule>>) -> Result<Self> {
        let tail = match &lit.tail {
            TailLiteral::Half(t) => TailContext::half(t.clone())?,
            TailLiteral::Schedule { m, shift } => {
                let s =
                    schedule.ok_or_else(|| Error::InvalidArgument("schedule tail needs a built schedule".into()))?;
                TailContext::schedule(Arc::clone(s), *m)?.act(&GroupElement::shift(*shift))?
            }
        };
        Rectangle::new(lit.head.clone(), tail)
    }

    /// The pure-tail rectangle.
    pub fn tail_only(tail: TailContext) -> Self {
        Rectangle { head: Vec::new(), tail }
    }

    pub fn head(&self) -> &[BaseSet] {
        &self.head
    }

    pub fn tail(&self) -> &TailContext {
        &self.tail
    }

    pub fn model(&self) -> Model {
        self.tail.model()
    }

    /// Factor at (1-based) index `k`.
    pub fn factor(&self, k: usize) -> Result<BaseSet> {
        match self.head.get(k - 1) {
            Some(f) => Ok(f.clone()),
            None => self.tail.factor(k),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.head.iter().any(BaseSet::is_empty)
    }

    pub fn act(&self, g: &GroupElement) -> Result<Rectangle> {
        Ok(Rectangle {
            head: self.head.iter().map(|f| f.act(g)).collect::<Result<_>>()?,
            tail: self.tail.act(g)?,
        })
    }

    fn check_tail(&self, other: &Rectangle) -> Result<()> {
        if self.tail != other.tail {
            return Err(Error::TailMismatch);
        }
        Ok(())
    }

    pub fn intersect(&self, other: &Rectangle) -> Result<Rectangle> {
        self.check_tail(other)?;
        let h = self.head.len().max(other.head.len());
        let head = (1..=h)
            .map(|k| self.factor(k)?.boolean(BoolOp::Intersect, &other.factor(k)?))
            .collect::<Result<_>>()?;
        Rectangle::new(head, self.tail.clone())
    }

    /// `self \ other` as at most `h` pairwise disjoint rectangles: piece `k`
    /// agrees with `other` (intersected) before `k`, lies in
    /// `self_k \ other_k` at `k`, and follows `self` after `k`.
    pub fn difference(&self, other: &Rectangle) -> Result<Vec<Rectangle>> {
        self.check_tail(other)?;
        let h = self.head.len().max(other.head.len());
        let mut pieces = Vec::new();
        let mut prefix: Vec<BaseSet> = Vec::with_capacity(h);
        for k in 1..=h {
            let mine = self.factor(k)?;
            let theirs = other.factor(k)?;
            let diff = mine.boolean(BoolOp::Diff, &theirs)?;
            if !diff.is_empty() {
                let mut head = prefix.clone();
                head.push(diff);
                for j in k + 1..=h {
                    head.push(self.factor(j)?);
                }
                let piece = Rectangle::new(head, self.tail.clone())?;
                if !piece.is_empty() {
                    pieces.push(piece);
                }
            }
            let common = mine.boolean(BoolOp::Intersect, &theirs)?;
            if common.is_empty() {
                break;
            }
            prefix.push(common);
        }
        Ok(pieces)
    }

    /// A head coordinate where the two rectangles have disjoint factors.
    pub fn separating_coordinate(&self, other: &Rectangle) -> Result<Option<usize>> {
        self.check_tail(other)?;
        let h = self.head.len().max(other.head.len());
        for k in 1..=h {
            if self.factor(k)?.is_disjoint_from(&other.factor(k)?)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    pub fn is_subset_of(&self, other: &Rectangle) -> Result<bool> {
        Ok(self.first_uncontained(other)?.is_none())
    }

    fn first_uncontained(&self, other: &Rectangle) -> Result<Option<usize>> {
        self.check_tail(other)?;
        if self.is_empty() {
            return Ok(None);
        }
        let h = self.head.len().max(other.head.len());
        for k in 1..=h {
            if !self.factor(k)?.is_subset_of(&other.factor(k)?)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }
}

impl fmt::Display for Rectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rect_parts(&self.head, &self.tail.to_literal()))
    }
}

/// `mu(A) = prod_{k<=h} 2 nu(A_k)`; tail factors contribute exactly 1.
pub fn rect_measure(a: &Rectangle) -> Rational {
    let two = int(2);
    a.head.iter().map(|f| &two * f.nu()).product()
}

/// Records that pieces `i` and `j` have disjoint factors at coordinate `coord`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DisjointnessCert {
    pub i: usize,
    pub j: usize,
    pub coord: usize,
}

/// A finite disjoint union of rectangles over one tail context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSet {
    tail: TailContext,
    pieces: Vec<Rectangle>,
    certs: Vec<DisjointnessCert>,
}

impl RingSet {
    pub fn empty(tail: TailContext) -> Self {
        RingSet {
            tail,
            pieces: Vec::new(),
            certs: Vec::new(),
        }
    }

    pub fn from_rect(r: Rectangle) -> Self {
        let tail = r.tail.clone();
        let pieces = if r.is_empty() { Vec::new() } else { vec![r] };
        RingSet {
            tail,
            pieces,
            certs: Vec::new(),
        }
    }

    /// Drops empty pieces and certifies pairwise disjointness; fails if some
    /// pair has no separating head coordinate.
    pub fn from_pieces(tail: TailContext, pieces: Vec<Rectangle>) -> Result<Self> {
        let pieces: Vec<Rectangle> = pieces.into_iter().filter(|p| !p.is_empty()).collect();
        let mut certs = Vec::new();
        for i in 0..pieces.len() {
            if pieces[i].tail != tail {
                return Err(Error::TailMismatch);
            }
            for j in i + 1..pieces.len() {
                let coord = pieces[i]
                    .separating_coordinate(&pieces[j])?
                    .ok_or_else(|| Error::InvalidSet(format!("pieces {i} and {j} are not disjoint")))?;
                certs.push(DisjointnessCert { i, j, coord });
            }
        }
        Ok(RingSet { tail, pieces, certs })
    }

    pub fn tail(&self) -> &TailContext {
        &self.tail
    }

    pub fn pieces(&self) -> &[Rectangle] {
        &self.pieces
    }

    pub fn certificates(&self) -> &[DisjointnessCert] {
        &self.certs
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Re-checks every stored disjointness certificate and that one exists
    /// for every pair.
    pub fn verify_certificates(&self) -> Result<bool> {
        let n = self.pieces.len();
        if self.certs.len() != n * n.saturating_sub(1) / 2 {
            return Ok(false);
        }
        for c in &self.certs {
            let a = self.pieces[c.i].factor(c.coord)?;
            let b = self.pieces[c.j].factor(c.coord)?;
            if !a.is_disjoint_from(&b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A set expression over rectangles sharing one tail.
#[derive(Clone, Debug)]
pub enum SetExpr {
    Rect(Rectangle),
    Intersect(Box<SetExpr>, Box<SetExpr>),
    Diff(Box<SetExpr>, Box<SetExpr>),
    Union(Box<SetExpr>, Box<SetExpr>),
}

impl SetExpr {
    pub fn rect(r: Rectangle) -> Self {
        SetExpr::Rect(r)
    }

    pub fn intersect(self, other: SetExpr) -> Self {
        SetExpr::Intersect(Box::new(self), Box::new(other))
    }

    pub fn diff(self, other: SetExpr) -> Self {
        SetExpr::Diff(Box::new(self), Box::new(other))
    }

    pub fn union(self, other: SetExpr) -> Self {
        SetExpr::Union(Box::new(self), Box::new(other))
    }

    fn first_tail(&self) -> &TailContext {
        match self {
            SetExpr::Rect(r) => &r.tail,
            SetExpr::Intersect(a, _) | SetExpr::Diff(a, _) | SetExpr::Union(a, _) => a.first_tail(),
        }
    }
}

/// Normalizes an expression into a disjoint union of rectangles.
pub fn ring_normalize(expr: &SetExpr) -> Result<RingSet> {
    let tail = expr.first_tail().clone();
    let pieces = normalize_pieces(expr, &tail)?;
    RingSet::from_pieces(tail, pieces)
}

fn normalize_pieces(expr: &SetExpr, tail: &TailContext) -> Result<Vec<Rectangle>> {
    match expr {
        SetExpr::Rect(r) => {
            if &r.tail != tail {
                return Err(Error::TailMismatch);
            }
            Ok(if r.is_empty() { Vec::new() } else { vec![r.clone()] })
        }
        SetExpr::Intersect(a, b) => {
            let (pa, pb) = (normalize_pieces(a, tail)?, normalize_pieces(b, tail)?);
            let mut out = Vec::new();
            for x in &pa {
                for y in &pb {
                    let z = x.intersect(y)?;
                    if !z.is_empty() {
                        out.push(z);
                    }
                }
            }
            Ok(out)
        }
        SetExpr::Diff(a, b) => {
            let (pa, pb) = (normalize_pieces(a, tail)?, normalize_pieces(b, tail)?);
            subtract_all(pa, &pb)
        }
        SetExpr::Union(a, b) => {
            let (pa, pb) = (normalize_pieces(a, tail)?, normalize_pieces(b, tail)?);
            let mut out = pa.clone();
            out.extend(subtract_all(pb, &pa)?);
            Ok(out)
        }
    }
}

fn subtract_all(from: Vec<Rectangle>, remove: &[Rectangle]) -> Result<Vec<Rectangle>> {
    let mut current = from;
    for r in remove {
        let mut next = Vec::with_capacity(current.len());
        for c in &current {
            next.extend(c.difference(r)?);
        }
        current = next;
    }
    Ok(current)
}

/// `mu(E)` as the sum of piece measures.
pub fn mu(e: &RingSet) -> Rational {
    e.pieces.iter().map(rect_measure).sum()
}

/// Conditional product measure `P_B(E) = sum_pieces prod_k nu(E_k ∩ B_k) / nu(B_k)`.
pub fn p_cond(b: &Rectangle, e: &RingSet) -> Result<Rational> {
    if b.tail != e.tail {
        return Err(Error::TailMismatch);
    }
    for (k, f) in b.head.iter().enumerate() {
        if f.nu().is_zero() {
            return Err(Error::ZeroMeasureFactor { coord: k + 1 });
        }
    }
    let mut total = Rational::zero();
    for (i, piece) in e.pieces.iter().enumerate() {
        if let Some(coord) = piece.first_uncontained(b)? {
            return Err(Error::ContainmentViolation { piece: i, coord });
        }
        let h = piece.head.len().max(b.head.len());
        let mut p = Rational::one();
        for k in 1..=h {
            let bk = b.factor(k)?;
            p *= piece.factor(k)?.intersection_measure(&bk)? / bk.nu();
        }
        total += p;
    }
    Ok(total)
}

/// The diagonal action `g.(s_k) = (g s_k)` applied to every piece and the tail.
pub fn diag_act(g: &GroupElement, e: &RingSet) -> Result<RingSet> {
    if g.model() != e.tail.model() {
        return Err(Error::ModelMismatch);
    }
    Ok(RingSet {
        tail: e.tail.act(g)?,
        pieces: e.pieces.iter().map(|p| p.act(g)).collect::<Result<_>>()?,
        certs: e.certs.clone(),
    })
}

/// The `2^N` rectangles `A_{e_1} x ... x A_{e_N} x A x A x ...` with
/// `A_0 = A`, `A_1 = S \ A`; each has measure 1 and they are pairwise disjoint.
pub fn disjoint_family(n: u32, a: &BaseSet) -> Result<RingSet> {
    disjoint_family_capped(n, a, DEFAULT_FAMILY_CAP)
}

pub fn disjoint_family_capped(n: u32, a: &BaseSet, cap: u32) -> Result<RingSet> {
    if n == 0 || n > cap {
        return Err(Error::FamilyTooLarge { n, cap });
    }
    let tail = TailContext::half(a.clone())?;
    let complement = a.complement()?;
    if !a.is_disjoint_from(&complement)? {
        return Err(Error::InvalidSet("set and complement overlap".into()));
    }
    let count = 1usize << n;
    let pieces: Vec<Rectangle> = (0..count)
        .map(|pattern| {
            let head = (0..n as usize)
                .map(|k| {
                    if pattern >> k & 1 == 0 {
                        a.clone()
                    } else {
                        complement.clone()
                    }
                })
                .collect();
            // keep the full head so every piece spells out its sign pattern
            Rectangle {
                head,
                tail: tail.clone(),
            }
        })
        .collect();
    let mut certs = Vec::with_capacity(count * (count - 1) / 2);
    for i in 0..count {
        for j in i + 1..count {
            let coord = ((i ^ j).trailing_zeros() + 1) as usize;
            certs.push(DisjointnessCert { i, j, coord });
        }
    }
    Ok(RingSet { tail, pieces, certs })
}
