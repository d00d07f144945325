//! Canonical-form arithmetic for the group catalog.
//!
//! Three families of countable infinite amenable groups are supported:
//!
//! - `IntegerLattice(d)`: ℤ^d under coordinatewise addition.
//! - `FiniteSumGroup(m_1, m_2, …)`: the direct sum ⊕_i ℤ/m_i, where the
//!   orders follow an eventually repeating pattern (index i has order
//!   `pattern[i % pattern.len()]`). Every element has finite order.
//! - `LamplighterZ(m)`: the wreath product (⊕_ℤ ℤ/m) ⋊ ℤ, elements written
//!   as a finitely supported lamp function together with a shift.
//!
//! Canonical forms are unique (sorted supports, no zero entries, residues
//! reduced), so element equality is plain coordinate equality.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

/// Description of a group in the catalog.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum GroupDescriptor {
    /// ℤ^d, `dim` ≥ 1.
    IntegerLattice { dim: usize },
    /// ⊕_i ℤ/m_i with the orders given by an eventually repeating pattern,
    /// each entry ≥ 2.
    FiniteSumGroup { pattern: Vec<u32> },
    /// (⊕_ℤ ℤ/m) ⋊ ℤ with lamp order `base` ≥ 2.
    LamplighterZ { base: u32 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("element does not belong to this group: {0}")]
    Mismatch(String),
    #[error("coordinate overflow in group arithmetic")]
    Overflow,
}

/// An element in canonical coordinates.
///
/// The variant must match the owning group's kind; [`Group`] operations
/// check this and report [`GroupError::Mismatch`] otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    /// Lattice point, one entry per dimension.
    Lattice(Vec<i64>),
    /// Finitely supported residue vector, sorted by index, values nonzero.
    SumResidues(Vec<(u32, u32)>),
    /// Lamp configuration (sorted by position, values nonzero) and shift.
    Lamp { lamps: Vec<(i64, u32)>, shift: i64 },
}

/// Order of an element: the least k ≥ 1 with g^k = identity, or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementOrder {
    Finite(u64),
    Infinite,
}

impl ElementOrder {
    pub fn is_finite(&self) -> bool {
        matches!(self, ElementOrder::Finite(_))
    }
}

/// Arithmetic context for one concrete group.
///
/// All operations are pure; `Group` is freely shareable across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    desc: GroupDescriptor,
}

impl Group {
    pub fn new(desc: GroupDescriptor) -> Result<Self, GroupError> {
        match &desc {
            GroupDescriptor::IntegerLattice { dim } => {
                if *dim == 0 {
                    return Err(GroupError::InvalidDescriptor("lattice dimension must be ≥ 1".into()));
                }
            }
            GroupDescriptor::FiniteSumGroup { pattern } => {
                if pattern.is_empty() {
                    return Err(GroupError::InvalidDescriptor("order pattern must be nonempty".into()));
                }
                if pattern.iter().any(|&m| m < 2) {
                    return Err(GroupError::InvalidDescriptor("cyclic orders must be ≥ 2".into()));
                }
            }
            GroupDescriptor::LamplighterZ { base } => {
                if *base < 2 {
                    return Err(GroupError::InvalidDescriptor("lamp order must be ≥ 2".into()));
                }
            }
        }
        Ok(Group { desc })
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.desc
    }

    /// Order of coordinate `idx` for the finite-sum kind.
    pub(crate) fn sum_order(&self, idx: u32) -> u32 {
        match &self.desc {
            GroupDescriptor::FiniteSumGroup { pattern } => pattern[idx as usize % pattern.len()],
            _ => unreachable!("sum_order on non-sum group"),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &self.desc {
            GroupDescriptor::IntegerLattice { dim } => GroupElement::Lattice(vec![0; *dim]),
            GroupDescriptor::FiniteSumGroup { .. } => GroupElement::SumResidues(Vec::new()),
            GroupDescriptor::LamplighterZ { .. } => GroupElement::Lamp { lamps: Vec::new(), shift: 0 },
        }
    }

    pub fn is_identity(&self, a: &GroupElement) -> bool {
        *a == self.identity()
    }

    /// Check that `a` is a canonical element of this group.
    pub fn validate_element(&self, a: &GroupElement) -> Result<(), GroupError> {
        match (&self.desc, a) {
            (GroupDescriptor::IntegerLattice { dim }, GroupElement::Lattice(v)) => {
                if v.len() != *dim {
                    return Err(GroupError::Mismatch(format!(
                        "expected {dim} lattice coordinates, found {}",
                        v.len()
                    )));
                }
                Ok(())
            }
            (GroupDescriptor::FiniteSumGroup { .. }, GroupElement::SumResidues(rs)) => {
                for w in rs.windows(2) {
                    if w[0].0 >= w[1].0 {
                        return Err(GroupError::Mismatch("residue support not strictly sorted".into()));
                    }
                }
                for &(i, v) in rs {
                    let m = self.sum_order(i);
                    if v == 0 || v >= m {
                        return Err(GroupError::Mismatch(format!(
                            "residue {v} at index {i} out of range for order {m}"
                        )));
                    }
                }
                Ok(())
            }
            (GroupDescriptor::LamplighterZ { base }, GroupElement::Lamp { lamps, .. }) => {
                for w in lamps.windows(2) {
                    if w[0].0 >= w[1].0 {
                        return Err(GroupError::Mismatch("lamp support not strictly sorted".into()));
                    }
                }
                for &(_, v) in lamps {
                    if v == 0 || v >= *base {
                        return Err(GroupError::Mismatch(format!("lamp value {v} out of range")));
                    }
                }
                Ok(())
            }
            _ => Err(GroupError::Mismatch("element kind does not match group kind".into())),
        }
    }

    /// Canonical product `ab`.
    pub fn compose(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        match (&self.desc, a, b) {
            (GroupDescriptor::IntegerLattice { dim }, GroupElement::Lattice(x), GroupElement::Lattice(y)) => {
                if x.len() != *dim || y.len() != *dim {
                    return Err(GroupError::Mismatch("lattice dimension mismatch".into()));
                }
                let mut out = Vec::with_capacity(*dim);
                for (xi, yi) in x.iter().zip(y) {
                    out.push(xi.checked_add(*yi).ok_or(GroupError::Overflow)?);
                }
                Ok(GroupElement::Lattice(out))
            }
            (GroupDescriptor::FiniteSumGroup { .. }, GroupElement::SumResidues(x), GroupElement::SumResidues(y)) => {
                Ok(GroupElement::SumResidues(merge_residues(x, y, |i| self.sum_order(i))))
            }
            (
                GroupDescriptor::LamplighterZ { base },
                GroupElement::Lamp { lamps: la, shift: ta },
                GroupElement::Lamp { lamps: lb, shift: tb },
            ) => {
                // (φ, t)(ψ, u) = (φ + ψ(· − t), t + u)
                let shifted: Vec<(i64, u32)> = lb
                    .iter()
                    .map(|&(p, v)| Ok((p.checked_add(*ta).ok_or(GroupError::Overflow)?, v)))
                    .collect::<Result<_, GroupError>>()?;
                let lamps = merge_lamps(la, &shifted, *base);
                let shift = ta.checked_add(*tb).ok_or(GroupError::Overflow)?;
                Ok(GroupElement::Lamp { lamps, shift })
            }
            _ => Err(GroupError::Mismatch("element kinds do not match group".into())),
        }
    }

    /// Canonical inverse, so that `compose(a, inverse(a)) = identity`.
    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        match (&self.desc, a) {
            (GroupDescriptor::IntegerLattice { .. }, GroupElement::Lattice(x)) => {
                GroupElement::Lattice(x.iter().map(|v| -v).collect())
            }
            (GroupDescriptor::FiniteSumGroup { .. }, GroupElement::SumResidues(rs)) => {
                GroupElement::SumResidues(rs.iter().map(|&(i, v)| (i, self.sum_order(i) - v)).collect())
            }
            (GroupDescriptor::LamplighterZ { base }, GroupElement::Lamp { lamps, shift }) => {
                // (φ, t)^{-1} = (−φ(· + t), −t)
                let mut inv: Vec<(i64, u32)> = lamps.iter().map(|&(p, v)| (p - shift, base - v)).collect();
                inv.sort_unstable_by_key(|&(p, _)| p);
                GroupElement::Lamp { lamps: inv, shift: -shift }
            }
            _ => panic!("inverse: element kind does not match group"),
        }
    }

    /// `a^k` for k ∈ ℤ (square-and-multiply on the canonical form).
    pub fn power(&self, a: &GroupElement, k: i64) -> Result<GroupElement, GroupError> {
        if k == 0 {
            return Ok(self.identity());
        }
        let (mut base, mut e) = if k < 0 {
            (self.inverse(a), k.unsigned_abs())
        } else {
            (a.clone(), k as u64)
        };
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.compose(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.compose(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Least k ≥ 1 with `a^k` = identity, or [`ElementOrder::Infinite`].
    pub fn element_order(&self, a: &GroupElement) -> ElementOrder {
        match (&self.desc, a) {
            (GroupDescriptor::IntegerLattice { .. }, GroupElement::Lattice(x)) => {
                if x.iter().all(|&v| v == 0) {
                    ElementOrder::Finite(1)
                } else {
                    ElementOrder::Infinite
                }
            }
            (GroupDescriptor::FiniteSumGroup { .. }, GroupElement::SumResidues(rs)) => {
                let mut ord: u64 = 1;
                for &(i, v) in rs {
                    let m = self.sum_order(i) as u64;
                    ord = num_integer::lcm(ord, m / num_integer::gcd(m, v as u64));
                }
                ElementOrder::Finite(ord)
            }
            (GroupDescriptor::LamplighterZ { base }, GroupElement::Lamp { lamps, shift }) => {
                if *shift != 0 {
                    ElementOrder::Infinite
                } else {
                    let m = *base as u64;
                    let mut ord: u64 = 1;
                    for &(_, v) in lamps {
                        ord = num_integer::lcm(ord, m / num_integer::gcd(m, v as u64));
                    }
                    ElementOrder::Finite(ord)
                }
            }
            _ => panic!("element_order: element kind does not match group"),
        }
    }

    /// Deterministic duplicate-free enumeration starting at the identity.
    ///
    /// The order is fixed per kind and prefix-stable (the first n elements
    /// never change as `count` grows):
    ///
    /// - ℤ¹: 0, 1, −1, 2, −2, …
    /// - ℤ^d (d ≥ 2): L∞ shells of radius 0, 1, 2, …; within a shell,
    ///   lexicographic order of coordinate vectors.
    /// - sums: shells by highest supported index; within a shell, mixed-radix
    ///   lexicographic order of the leading coordinates.
    /// - lamplighter: shells by max(|shift|, lamp support radius); within a
    ///   shell, canonical element order.
    pub fn enumerate(&self, count: usize) -> Vec<GroupElement> {
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return out;
        }
        match &self.desc {
            GroupDescriptor::IntegerLattice { dim: 1 } => {
                out.push(GroupElement::Lattice(vec![0]));
                let mut k: i64 = 1;
                while out.len() < count {
                    out.push(GroupElement::Lattice(vec![k]));
                    if out.len() < count {
                        out.push(GroupElement::Lattice(vec![-k]));
                    }
                    k += 1;
                }
            }
            GroupDescriptor::IntegerLattice { dim } => {
                let d = *dim;
                let mut r: i64 = 0;
                while out.len() < count {
                    let mut shell = lattice_shell(d, r);
                    shell.sort_unstable();
                    for v in shell {
                        if out.len() == count {
                            break;
                        }
                        out.push(GroupElement::Lattice(v));
                    }
                    r += 1;
                }
            }
            GroupDescriptor::FiniteSumGroup { .. } => {
                out.push(GroupElement::SumResidues(Vec::new()));
                let mut k: u32 = 1;
                while out.len() < count {
                    // all vectors supported in [0, k) with coordinate k-1 nonzero
                    let mut digits = vec![0u32; k as usize];
                    digits[(k - 1) as usize] = 1;
                    loop {
                        let elem: Vec<(u32, u32)> = digits
                            .iter()
                            .enumerate()
                            .filter(|(_, &v)| v != 0)
                            .map(|(i, &v)| (i as u32, v))
                            .collect();
                        out.push(GroupElement::SumResidues(elem));
                        if out.len() == count {
                            break;
                        }
                        if !next_digits(&mut digits, k, |i| self.sum_order(i)) {
                            break;
                        }
                    }
                    k += 1;
                }
            }
            GroupDescriptor::LamplighterZ { base } => {
                let mut r: i64 = 0;
                let mut prev_ball: Vec<GroupElement> = Vec::new();
                while out.len() < count {
                    let ball = lamp_ball(*base, r);
                    let mut shell: Vec<GroupElement> =
                        ball.iter().filter(|e| !prev_ball.contains(e)).cloned().collect();
                    shell.sort();
                    for e in shell {
                        if out.len() == count {
                            break;
                        }
                        out.push(e);
                    }
                    prev_ball = ball;
                    r += 1;
                }
            }
        }
        out
    }
}

/// All lattice points with L∞ norm exactly `r`.
fn lattice_shell(d: usize, r: i64) -> Vec<Vec<i64>> {
    if r == 0 {
        return vec![vec![0; d]];
    }
    let mut out = Vec::new();
    let mut v = vec![-r; d];
    loop {
        if v.iter().map(|x| x.abs()).max().unwrap() == r {
            out.push(v.clone());
        }
        // odometer over the box [-r, r]^d
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if v[i] < r {
                v[i] += 1;
                for x in v.iter_mut().skip(i + 1) {
                    *x = -r;
                }
                break;
            }
        }
    }
}

/// Mixed-radix increment on `digits[0..k]`, keeping digit k−1 nonzero.
/// Returns false when exhausted.
fn next_digits(digits: &mut [u32], k: u32, order: impl Fn(u32) -> u32) -> bool {
    let k = k as usize;
    let mut i = 0;
    loop {
        if i == k {
            return false;
        }
        let m = order(i as u32);
        let min = if i == k - 1 { 1 } else { 0 };
        if digits[i] + 1 < m {
            digits[i] += 1;
            return true;
        }
        digits[i] = min;
        i += 1;
    }
}

/// All lamplighter elements with lamp support in [−r, r] and |shift| ≤ r.
fn lamp_ball(base: u32, r: i64) -> Vec<GroupElement> {
    let positions: Vec<i64> = (-r..=r).collect();
    let n = positions.len();
    let mut out = Vec::new();
    let mut values = vec![0u32; n];
    loop {
        let lamps: Vec<(i64, u32)> = positions
            .iter()
            .zip(&values)
            .filter(|(_, &v)| v != 0)
            .map(|(&p, &v)| (p, v))
            .collect();
        for t in -r..=r {
            out.push(GroupElement::Lamp { lamps: lamps.clone(), shift: t });
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if values[i] + 1 < base {
                values[i] += 1;
                break;
            }
            values[i] = 0;
            i += 1;
        }
    }
}

fn merge_residues(a: &[(u32, u32)], b: &[(u32, u32)], order: impl Fn(u32) -> u32) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            let idx = a[i].0;
            let v = (a[i].1 + b[j].1) % order(idx);
            if v != 0 {
                out.push((idx, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn merge_lamps(a: &[(i64, u32)], b: &[(i64, u32)], base: u32) -> Vec<(i64, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            let p = a[i].0;
            let v = (a[i].1 + b[j].1) % base;
            if v != 0 {
                out.push((p, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Lattice(v) if v.len() == 1 => write!(f, "{}", v[0]),
            GroupElement::Lattice(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            GroupElement::SumResidues(rs) => {
                if rs.is_empty() {
                    return write!(f, "e");
                }
                for (i, (idx, v)) in rs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{idx}:{v}")?;
                }
                Ok(())
            }
            GroupElement::Lamp { lamps, shift } => {
                write!(f, "[")?;
                for (i, (p, v)) in lamps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{p}:{v}")?;
                }
                write!(f, "|{shift}]")
            }
        }
    }
}

// Serialization in canonical coordinates: lattice elements as bare integer
// arrays, sum elements as {"residues": [[index, value], …]}, lamplighter
// elements as {"lamps": [[pos, value], …], "shift": t}.
impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            GroupElement::Lattice(v) => v.serialize(ser),
            GroupElement::SumResidues(rs) => {
                #[derive(Serialize)]
                struct Sum<'a> {
                    residues: &'a [(u32, u32)],
                }
                Sum { residues: rs }.serialize(ser)
            }
            GroupElement::Lamp { lamps, shift } => {
                #[derive(Serialize)]
                struct Lamp<'a> {
                    lamps: &'a [(i64, u32)],
                    shift: i64,
                }
                Lamp { lamps, shift: *shift }.serialize(ser)
            }
        }
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(de)?;
        if v.is_array() {
            let coords: Vec<i64> =
                serde_json::from_value(v).map_err(|e| D::Error::custom(e.to_string()))?;
            return Ok(GroupElement::Lattice(coords));
        }
        let obj = v.as_object().ok_or_else(|| D::Error::custom("expected array or object"))?;
        if obj.contains_key("residues") {
            #[derive(Deserialize)]
            struct Sum {
                residues: Vec<(u32, u32)>,
            }
            let s: Sum = serde_json::from_value(v).map_err(|e| D::Error::custom(e.to_string()))?;
            return Ok(GroupElement::SumResidues(s.residues));
        }
        if obj.contains_key("lamps") {
            #[derive(Deserialize)]
            struct Lamp {
                lamps: Vec<(i64, u32)>,
                shift: i64,
            }
            let l: Lamp = serde_json::from_value(v).map_err(|e| D::Error::custom(e.to_string()))?;
            return Ok(GroupElement::Lamp { lamps: l.lamps, shift: l.shift });
        }
        Err(D::Error::custom("unrecognized element encoding"))
    }
}

/// Convenience constructors used across tests and the CLI.
impl Group {
    pub fn lattice(dim: usize) -> Group {
        Group::new(GroupDescriptor::IntegerLattice { dim }).expect("valid lattice")
    }
    pub fn finite_sum(pattern: &[u32]) -> Group {
        Group::new(GroupDescriptor::FiniteSumGroup { pattern: pattern.to_vec() }).expect("valid sum group")
    }
    pub fn lamplighter(base: u32) -> Group {
        Group::new(GroupDescriptor::LamplighterZ { base }).expect("valid lamplighter")
    }
    pub fn lattice_point(coords: &[i64]) -> GroupElement {
        GroupElement::Lattice(coords.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1() -> Group {
        Group::lattice(1)
    }

    #[test]
    fn lattice_compose_adds() {
        let g = z1();
        let a = GroupElement::Lattice(vec![2]);
        let b = GroupElement::Lattice(vec![3]);
        assert_eq!(g.compose(&a, &b).unwrap(), GroupElement::Lattice(vec![5]));
    }

    #[test]
    fn identity_is_neutral() {
        for g in [z1(), Group::finite_sum(&[2, 3]), Group::lamplighter(2)] {
            for a in g.enumerate(20) {
                assert_eq!(g.compose(&a, &g.identity()).unwrap(), a);
                assert_eq!(g.compose(&g.identity(), &a).unwrap(), a);
            }
        }
    }

    #[test]
    fn sum_compose_mod2() {
        let g = Group::finite_sum(&[2]);
        let a = GroupElement::SumResidues(vec![(0, 1)]);
        let b = GroupElement::SumResidues(vec![(0, 1), (1, 1)]);
        assert_eq!(g.compose(&a, &b).unwrap(), GroupElement::SumResidues(vec![(1, 1)]));
    }

    #[test]
    fn lattice_inverse_negates() {
        let g = z1();
        assert_eq!(g.inverse(&GroupElement::Lattice(vec![5])), GroupElement::Lattice(vec![-5]));
        assert_eq!(g.inverse(&g.identity()), g.identity());
    }

    #[test]
    fn lamplighter_inverse_composes_to_identity_over_ball() {
        // checked exhaustively over a small ball
        let g = Group::lamplighter(2);
        for a in g.enumerate(100) {
            let inv = g.inverse(&a);
            assert_eq!(g.compose(&a, &inv).unwrap(), g.identity(), "a = {a}");
            assert_eq!(g.compose(&inv, &a).unwrap(), g.identity(), "a = {a}");
        }
    }

    #[test]
    fn orders() {
        let z2 = Group::lattice(2);
        assert_eq!(z2.element_order(&GroupElement::Lattice(vec![1, 0])), ElementOrder::Infinite);
        assert_eq!(z2.element_order(&z2.identity()), ElementOrder::Finite(1));

        // order of (1,1,0,…) in ⊕ ℤ/2 ⊕ ℤ/3 ⊕ … is lcm(2,3) = 6,
        // cross-checked by iterating compose until identity
        let gs = Group::finite_sum(&[2, 3]);
        let a = GroupElement::SumResidues(vec![(0, 1), (1, 1)]);
        assert_eq!(gs.element_order(&a), ElementOrder::Finite(6));
        let mut acc = a.clone();
        let mut k = 1u64;
        while acc != gs.identity() {
            acc = gs.compose(&acc, &a).unwrap();
            k += 1;
            assert!(k <= 6);
        }
        assert_eq!(k, 6);
    }

    #[test]
    fn order_iteration_oracle_small() {
        // for every enumerated element of finite order k ≤ 64:
        // a^k = e and a^j ≠ e for 0 < j < k
        for g in [Group::finite_sum(&[2, 3]), Group::lamplighter(3)] {
            for a in g.enumerate(64) {
                if let ElementOrder::Finite(k) = g.element_order(&a) {
                    assert!(k <= 64, "unexpectedly large order {k}");
                    let mut acc = g.identity();
                    for j in 1..=k {
                        acc = g.compose(&acc, &a).unwrap();
                        if j < k {
                            assert_ne!(acc, g.identity(), "a = {a}, premature identity at {j}");
                        }
                    }
                    assert_eq!(acc, g.identity(), "a = {a}");
                }
            }
        }
    }

    #[test]
    fn z1_enumeration_order() {
        let g = z1();
        let e: Vec<i64> = g
            .enumerate(5)
            .into_iter()
            .map(|x| match x {
                GroupElement::Lattice(v) => v[0],
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(e, vec![0, 1, -1, 2, -2]);
    }

    #[test]
    fn enumerate_one_is_identity() {
        for g in [z1(), Group::lattice(2), Group::finite_sum(&[2, 3]), Group::lamplighter(2)] {
            assert_eq!(g.enumerate(1), vec![g.identity()]);
        }
    }

    #[test]
    fn z2_enumeration_is_box_spiral() {
        // 9 elements = the 3×3 box around the origin, shell 1 in lex order
        let g = Group::lattice(2);
        let got = g.enumerate(9);
        let expect: Vec<GroupElement> = [
            vec![0, 0],
            vec![-1, -1],
            vec![-1, 0],
            vec![-1, 1],
            vec![0, -1],
            vec![0, 1],
            vec![1, -1],
            vec![1, 0],
            vec![1, 1],
        ]
        .into_iter()
        .map(GroupElement::Lattice)
        .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn enumeration_prefix_stable_and_duplicate_free() {
        for g in [z1(), Group::lattice(2), Group::finite_sum(&[2, 3]), Group::lamplighter(2)] {
            let long = g.enumerate(200);
            let short = g.enumerate(63);
            assert_eq!(&long[..63], &short[..]);
            let mut dedup = long.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), long.len(), "duplicates in enumeration");
        }
    }

    #[test]
    fn group_axioms_exhaustive() {
        // associativity, identity, inverses over all pairs/triples from a
        // 64-element enumeration (triples checked on a coarser grid to keep
        // the test quick; pairs checked fully)
        for g in [z1(), Group::lattice(2), Group::finite_sum(&[2, 3]), Group::lamplighter(2)] {
            let elems = g.enumerate(64);
            for a in &elems {
                let inv = g.inverse(a);
                assert_eq!(g.compose(a, &inv).unwrap(), g.identity());
                assert_eq!(g.compose(&inv, a).unwrap(), g.identity());
            }
            for a in &elems {
                for b in &elems {
                    let _ = g.compose(a, b).unwrap();
                }
            }
            for a in elems.iter().step_by(4) {
                for b in elems.iter().step_by(4) {
                    for c in elems.iter().step_by(4) {
                        let lhs = g.compose(&g.compose(a, b).unwrap(), c).unwrap();
                        let rhs = g.compose(a, &g.compose(b, c).unwrap()).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn power_matches_repeated_compose() {
        let g = Group::lamplighter(3);
        for a in g.enumerate(30) {
            let mut acc = g.identity();
            for k in 0..=6i64 {
                assert_eq!(g.power(&a, k).unwrap(), acc);
                acc = g.compose(&acc, &a).unwrap();
            }
            assert_eq!(g.power(&a, -3).unwrap(), g.inverse(&g.power(&a, 3).unwrap()));
        }
    }

    #[test]
    fn mismatch_is_reported() {
        let g = z1();
        let a = GroupElement::Lattice(vec![1]);
        let b = GroupElement::SumResidues(vec![(0, 1)]);
        assert!(matches!(g.compose(&a, &b), Err(GroupError::Mismatch(_))));
        let z2 = Group::lattice(2);
        assert!(z2.validate_element(&a).is_err());
    }

    #[test]
    fn element_serde_roundtrip() {
        let samples = vec![
            GroupElement::Lattice(vec![3, -4]),
            GroupElement::SumResidues(vec![(0, 1), (3, 2)]),
            GroupElement::Lamp { lamps: vec![(-1, 1), (2, 1)], shift: -3 },
        ];
        for e in samples {
            let s = serde_json::to_string(&e).unwrap();
            let back: GroupElement = serde_json::from_str(&s).unwrap();
            assert_eq!(back, e);
        }
        // lattice elements serialize as bare arrays
        assert_eq!(serde_json::to_string(&GroupElement::Lattice(vec![1, 2])).unwrap(), "[1,2]");
    }
}
