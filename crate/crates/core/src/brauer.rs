//! Br(k) for k ∈ {ℝ, 𝔽_q, ℚ_p, ℚ} as an explicit abelian group of
//! local-invariant vectors.
//!
//! A class is stored as its finite-support map Place → ℚ/ℤ with reduced
//! fractions in [0, 1); zero entries are never stored. Over ℚ every vector
//! must satisfy reciprocity (invariants sum to 0 mod 1) and the real entry
//! lies in {0, 1/2}. Every algebra-level statement (tensor, Clifford class,
//! Morita class) is computed at this invariant level, which makes equality
//! decidable and exact.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::numfield::{hilbert_symbol, relevant_places, FieldSpec, Place, Rat};

/// An element of ℚ/ℤ, kept reduced in [0, 1).
pub type Inv = Ratio<i64>;

fn reduce_mod_one(x: Inv) -> Inv {
    let f = x.floor();
    x - f
}

/// An element of Br(k) as a finite-support vector of local invariants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BrauerClassWire", into = "BrauerClassWire")]
pub struct BrauerClass {
    field: FieldSpec,
    invariants: BTreeMap<Place, Inv>,
}

#[derive(Serialize, Deserialize)]
struct BrauerClassWire {
    field: FieldSpec,
    invariants: Vec<(Place, i64, i64)>,
}

impl From<BrauerClass> for BrauerClassWire {
    fn from(c: BrauerClass) -> Self {
        BrauerClassWire {
            field: c.field,
            invariants: c
                .invariants
                .into_iter()
                .map(|(v, x)| (v, *x.numer(), *x.denom()))
                .collect(),
        }
    }
}

impl TryFrom<BrauerClassWire> for BrauerClass {
    type Error = Error;
    fn try_from(w: BrauerClassWire) -> Result<Self> {
        if w.invariants.iter().any(|&(_, _, d)| d == 0) {
            return Err(Error::InvalidInvariants("zero denominator".into()));
        }
        BrauerClass::from_invariants(
            w.field,
            w.invariants
                .into_iter()
                .map(|(v, n, d)| (v, Inv::new(n, d))),
        )
    }
}

impl BrauerClass {
    pub fn zero(field: FieldSpec) -> Self {
        BrauerClass {
            field,
            invariants: BTreeMap::new(),
        }
    }

    /// Builds a class from local invariants, validating the field's support
    /// and reciprocity constraints. Entries are reduced mod 1; zeros dropped.
    pub fn from_invariants<I: IntoIterator<Item = (Place, Inv)>>(
        field: FieldSpec,
        entries: I,
    ) -> Result<Self> {
        let mut map: BTreeMap<Place, Inv> = BTreeMap::new();
        for (v, x) in entries {
            let x = reduce_mod_one(x);
            if x.is_zero() {
                continue;
            }
            let prev = map.insert(v, x);
            if prev.is_some() {
                return Err(Error::InvalidInvariants(format!("duplicate place {v}")));
            }
        }
        if let Some(x) = map.get(&Place::Real) {
            if *x != Inv::new(1, 2) {
                return Err(Error::InvalidInvariants(format!(
                    "real invariant must be 0 or 1/2, got {x}"
                )));
            }
        }
        match &field {
            FieldSpec::Rationals => {
                let sum: Inv = map.values().copied().sum();
                if !reduce_mod_one(sum).is_zero() {
                    return Err(Error::InvalidInvariants(
                        "invariants violate reciprocity (sum not 0 mod 1)".into(),
                    ));
                }
            }
            FieldSpec::Reals => {
                if map.keys().any(|v| *v != Place::Real) {
                    return Err(Error::InvalidInvariants(
                        "Br(R) classes live at the real place only".into(),
                    ));
                }
            }
            FieldSpec::FiniteField { .. } => {
                if !map.is_empty() {
                    return Err(Error::InvalidInvariants(
                        "Br of a finite field is trivial".into(),
                    ));
                }
            }
            FieldSpec::PAdic { p } => {
                if map.keys().any(|v| *v != Place::Finite(*p)) {
                    return Err(Error::InvalidInvariants(format!(
                        "Br(Q{p}) classes live at the place {p} only"
                    )));
                }
            }
        }
        Ok(BrauerClass {
            field,
            invariants: map,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.invariants.is_empty()
    }

    pub fn invariant_at(&self, v: Place) -> Inv {
        self.invariants.get(&v).copied().unwrap_or_else(Inv::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = Place> + '_ {
        self.invariants.keys().copied()
    }

    pub fn invariants(&self) -> impl Iterator<Item = (Place, Inv)> + '_ {
        self.invariants.iter().map(|(&v, &x)| (v, x))
    }

    /// The class of the quaternion algebra (a, b)_k: local invariant 1/2
    /// exactly where (a, b)_v = -1.
    pub fn quaternion(a: &Rat, b: &Rat, k: &FieldSpec) -> Result<Self> {
        k.require_char_not_two()?;
        k.check_element(a)?;
        k.check_element(b)?;
        let half = Inv::new(1, 2);
        match k {
            FieldSpec::Reals => {
                if a.is_negative() && b.is_negative() {
                    Self::from_invariants(k.clone(), [(Place::Real, half)])
                } else {
                    Ok(Self::zero(k.clone()))
                }
            }
            FieldSpec::FiniteField { .. } => Ok(Self::zero(k.clone())),
            FieldSpec::PAdic { p } => {
                if hilbert_symbol(a, b, Place::Finite(*p))? == -1 {
                    Self::from_invariants(k.clone(), [(Place::Finite(*p), half)])
                } else {
                    Ok(Self::zero(k.clone()))
                }
            }
            FieldSpec::Rationals => {
                let mut entries = Vec::new();
                for v in relevant_places(&[a, b])? {
                    if hilbert_symbol(a, b, v)? == -1 {
                        entries.push((v, half));
                    }
                }
                Self::from_invariants(k.clone(), entries)
            }
        }
    }

    /// Group law: pointwise sum of invariants mod 1.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        let mut map = self.invariants.clone();
        for (&v, &x) in &other.invariants {
            let e = map.entry(v).or_insert_with(Inv::zero);
            *e = reduce_mod_one(*e + x);
        }
        map.retain(|_, x| !x.is_zero());
        Ok(BrauerClass {
            field: self.field.clone(),
            invariants: map,
        })
    }

    /// Opposite algebra: pointwise negation mod 1.
    pub fn inverse(&self) -> Self {
        let invariants = self
            .invariants
            .iter()
            .map(|(&v, &x)| (v, reduce_mod_one(-x)))
            .collect();
        BrauerClass {
            field: self.field.clone(),
            invariants,
        }
    }

    /// Order in Br(k): lcm of the denominators of the invariants.
    pub fn period(&self) -> u64 {
        self.invariants
            .values()
            .fold(1i64, |acc, x| acc.lcm(x.denom())) as u64
    }

    /// Schur index. Over ℝ, 𝔽_q and ℚ_p this is the period; over ℚ it is the
    /// lcm of the local indices, which again equals the period. Adopted as a
    /// stated convention (the classical local-global index theorem for
    /// number fields), since the index-reduction formulas consume ind(D) as
    /// a number.
    pub fn index(&self) -> u64 {
        self.period()
    }

    /// The cyclic subgroup generated by this class, in the order
    /// 0, x, 2x, ... (length = period).
    pub fn cyclic_subgroup(&self) -> Vec<Self> {
        let mut out = vec![Self::zero(self.field.clone())];
        let mut acc = Self::zero(self.field.clone());
        for _ in 1..self.period() {
            acc = acc.tensor(self).expect("same field");
            out.push(acc.clone());
        }
        out
    }

    /// Lexicographic comparison of invariant vectors under the sorted-place
    /// ordering (missing entries count as 0).
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        let mut a = self.invariants.iter().peekable();
        let mut b = other.invariants.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(&va, &xa)), Some(&(&vb, &xb))) => match va.cmp(&vb) {
                    // the earlier-place side has a nonzero value against 0
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        match xa.cmp(&xb) {
                            Ordering::Equal => {}
                            ord => return ord,
                        }
                        a.next();
                        b.next();
                    }
                },
            }
        }
    }
}

impl fmt::Display for BrauerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 in Br({})", self.field);
        }
        let parts: Vec<String> = self
            .invariants
            .iter()
            .map(|(v, x)| format!("{v}: {x}"))
            .collect();
        write!(f, "{{{}}} in Br({})", parts.join(", "), self.field)
    }
}

/// Enumeration window for Br(ℚ): torsion bound m and allowed support S.
/// Br(ℚ) is infinite, so enumeration is only meaningful inside such a
/// window; results are window-relative by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub torsion_bound: u64,
    pub support: Vec<Place>,
}

impl Window {
    pub fn new(torsion_bound: u64, mut support: Vec<Place>) -> Result<Self> {
        if torsion_bound == 0 {
            return Err(Error::Invalid("torsion bound must be >= 1".into()));
        }
        support.sort_unstable();
        support.dedup();
        for v in &support {
            if let Place::Finite(p) = v {
                Place::finite(*p)?;
            }
        }
        Ok(Window {
            torsion_bound,
            support,
        })
    }
}

/// All classes x with m·x = 0 and (over ℚ) support inside S, in
/// lexicographic order on invariant vectors.
///
/// For ℝ this is {0} or {0, 1/2}; for 𝔽_q it is {0}; for ℚ_p it is the m
/// classes {j/m}. Over ℚ reciprocity is enforced, so the result is the
/// kernel of multiplication by m inside the subgroup supported on S.
pub fn enumerate_torsion(k: &FieldSpec, m: u64, support: Option<&[Place]>) -> Result<Vec<BrauerClass>> {
    if m == 0 {
        return Err(Error::Invalid("torsion bound must be >= 1".into()));
    }
    match k {
        FieldSpec::Reals => {
            let mut out = vec![BrauerClass::zero(k.clone())];
            if m % 2 == 0 {
                out.push(BrauerClass::from_invariants(
                    k.clone(),
                    [(Place::Real, Inv::new(1, 2))],
                )?);
            }
            Ok(out)
        }
        FieldSpec::FiniteField { .. } => Ok(vec![BrauerClass::zero(k.clone())]),
        FieldSpec::PAdic { p } => {
            let m = m as i64;
            let mut out = Vec::new();
            for j in 0..m {
                out.push(BrauerClass::from_invariants(
                    k.clone(),
                    [(Place::Finite(*p), Inv::new(j, m))],
                )?);
            }
            out.sort_by(BrauerClass::lex_cmp);
            Ok(out)
        }
        FieldSpec::Rationals => {
            let support = match support {
                Some(s) => s,
                None if m == 1 => &[],
                None => return Err(Error::MissingWindow),
            };
            if m > 1 && support.is_empty() {
                return Err(Error::MissingWindow);
            }
            let mut places: Vec<Place> = support.to_vec();
            places.sort_unstable();
            places.dedup();
            let m = m as i64;
            let mut out = Vec::new();
            let mut current: Vec<(Place, Inv)> = Vec::new();
            // depth-first in ascending value order per place, so the output
            // comes out in lexicographic order directly
            fn rec(
                places: &[Place],
                idx: usize,
                m: i64,
                sum: Inv,
                current: &mut Vec<(Place, Inv)>,
                out: &mut Vec<BrauerClass>,
            ) {
                if idx == places.len() {
                    if reduce_mod_one(sum).is_zero() {
                        out.push(
                            BrauerClass::from_invariants(
                                FieldSpec::Rationals,
                                current.iter().copied(),
                            )
                            .expect("reciprocity checked"),
                        );
                    }
                    return;
                }
                let v = places[idx];
                for j in 0..m {
                    let x = Inv::new(j, m);
                    if v == Place::Real && !x.is_zero() && x != Inv::new(1, 2) {
                        continue;
                    }
                    current.push((v, x));
                    rec(places, idx + 1, m, sum + x, current, out);
                    current.pop();
                }
            }
            rec(&places, 0, m, Inv::zero(), &mut current, &mut out);
            out.sort_by(BrauerClass::lex_cmp);
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::rat;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn h_r() -> BrauerClass {
        BrauerClass::quaternion(&rat(-1), &rat(-1), &FieldSpec::Reals).unwrap()
    }

    #[test]
    fn quaternion_examples() {
        // (-1,-1)_R is the class of the quaternions
        let h = h_r();
        assert_eq!(h.invariant_at(Place::Real), Inv::new(1, 2));
        assert_eq!(h.period(), 2);

        // (1, b) is split
        assert!(BrauerClass::quaternion(&rat(1), &rat(-1), &q())
            .unwrap()
            .is_zero());

        // (-1,-1)_Q ramifies exactly at oo and 2
        let hq = BrauerClass::quaternion(&rat(-1), &rat(-1), &q()).unwrap();
        assert_eq!(
            hq.support().collect::<Vec<_>>(),
            vec![Place::Real, Place::Finite(2)]
        );
        assert_eq!(hq.invariant_at(Place::Finite(2)), Inv::new(1, 2));

        // finite fields are split
        let f9 = FieldSpec::finite(9).unwrap();
        assert!(BrauerClass::quaternion(&rat(-1), &rat(-1), &f9)
            .unwrap()
            .is_zero());
        // characteristic 2 rejected
        let f4 = FieldSpec::finite(4).unwrap();
        assert!(BrauerClass::quaternion(&rat(1), &rat(1), &f4).is_err());
    }

    #[test]
    fn quaternion_symmetry_and_norm_relation() {
        for a in [-3i64, -1, 2, 5] {
            for b in [-2i64, 3, 7] {
                let ab = BrauerClass::quaternion(&rat(a), &rat(b), &q()).unwrap();
                let ba = BrauerClass::quaternion(&rat(b), &rat(a), &q()).unwrap();
                assert_eq!(ab, ba);
                let a_minus_a = BrauerClass::quaternion(&rat(a), &rat(-a), &q()).unwrap();
                assert!(a_minus_a.is_zero());
            }
        }
    }

    #[test]
    fn tensor_group_law() {
        let h = h_r();
        assert!(h.tensor(&h).unwrap().is_zero());
        let z = BrauerClass::zero(FieldSpec::Reals);
        assert_eq!(h.tensor(&z).unwrap(), h);
        assert!(h.tensor(&h.inverse()).unwrap().is_zero());

        // pointwise sum over Q with overlapping support
        let x = BrauerClass::from_invariants(
            q(),
            [(Place::Finite(2), Inv::new(1, 3)), (Place::Finite(5), Inv::new(2, 3))],
        )
        .unwrap();
        let y = BrauerClass::from_invariants(
            q(),
            [(Place::Finite(2), Inv::new(2, 3)), (Place::Finite(7), Inv::new(1, 3))],
        )
        .unwrap();
        let xy = x.tensor(&y).unwrap();
        assert_eq!(xy.invariant_at(Place::Finite(2)), Inv::zero());
        assert_eq!(xy.invariant_at(Place::Finite(5)), Inv::new(2, 3));
        assert_eq!(xy.invariant_at(Place::Finite(7)), Inv::new(1, 3));

        // field mismatch rejected
        assert!(h.tensor(&x).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert!(BrauerClass::zero(q()).inverse().is_zero());
        let h = h_r();
        assert_eq!(h.inverse(), h); // 2-torsion
        let x = BrauerClass::from_invariants(
            q(),
            [(Place::Finite(7), Inv::new(1, 3)), (Place::Finite(2), Inv::new(2, 3))],
        )
        .unwrap();
        assert_eq!(x.inverse().invariant_at(Place::Finite(7)), Inv::new(2, 3));
    }

    #[test]
    fn period_and_index() {
        assert_eq!(BrauerClass::zero(q()).period(), 1);
        assert_eq!(h_r().period(), 2);
        let x = BrauerClass::from_invariants(
            q(),
            [(Place::Finite(2), Inv::new(1, 3)), (Place::Finite(5), Inv::new(2, 3))],
        )
        .unwrap();
        assert_eq!(x.period(), 3);
        assert_eq!(x.index(), 3);

        let hq = BrauerClass::quaternion(&rat(-1), &rat(-1), &q()).unwrap();
        assert_eq!(hq.index(), 2);

        let q5 = FieldSpec::padic(5).unwrap();
        let y =
            BrauerClass::from_invariants(q5, [(Place::Finite(5), Inv::new(1, 4))]).unwrap();
        assert_eq!(y.index(), 4);
    }

    #[test]
    fn reciprocity_enforced() {
        // a vector with a single 1/2 at one finite place violates reciprocity
        let bad = BrauerClass::from_invariants(q(), [(Place::Finite(3), Inv::new(1, 2))]);
        assert!(bad.is_err());
        // real invariant 1/3 is impossible
        let bad = BrauerClass::from_invariants(q(), [
            (Place::Real, Inv::new(1, 3)),
            (Place::Finite(3), Inv::new(2, 3)),
        ]);
        assert!(bad.is_err());
    }

    #[test]
    fn enumerate_torsion_examples() {
        let r = enumerate_torsion(&FieldSpec::Reals, 2, None).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].is_zero());
        assert_eq!(r[1], h_r());

        let f5 = FieldSpec::finite(5).unwrap();
        assert_eq!(enumerate_torsion(&f5, 12, None).unwrap().len(), 1);

        let s = vec![Place::Real, Place::Finite(2), Place::Finite(3)];
        let cs = enumerate_torsion(&q(), 2, Some(&s)).unwrap();
        assert_eq!(cs.len(), 4); // even-support subsets of a 3-element set

        // 2^(|S|-1) when oo is in S
        let s = vec![Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(5)];
        assert_eq!(enumerate_torsion(&q(), 2, Some(&s)).unwrap().len(), 8);

        // window mandatory over Q
        assert!(enumerate_torsion(&q(), 2, None).is_err());
        assert!(enumerate_torsion(&q(), 1, None).is_ok());

        let q7 = FieldSpec::padic(7).unwrap();
        let cs = enumerate_torsion(&q7, 3, None).unwrap();
        assert_eq!(cs.len(), 3);
        assert!(cs[0].is_zero());
    }

    #[test]
    fn lex_order_is_total_and_deterministic() {
        let a = BrauerClass::from_invariants(
            q(),
            [(Place::Finite(2), Inv::new(1, 2)), (Place::Finite(3), Inv::new(1, 2))],
        )
        .unwrap();
        let b = BrauerClass::from_invariants(
            q(),
            [(Place::Finite(3), Inv::new(1, 2)), (Place::Finite(5), Inv::new(1, 2))],
        )
        .unwrap();
        let z = BrauerClass::zero(q());
        // zero vector is least; a nonzero entry at an earlier place sorts later
        assert_eq!(z.lex_cmp(&a), Ordering::Less);
        assert_eq!(a.lex_cmp(&b), Ordering::Greater);
        assert_eq!(a.lex_cmp(&a), Ordering::Equal);
    }

    #[test]
    fn json_round_trip() {
        let hq = BrauerClass::quaternion(&rat(-1), &rat(-3), &q()).unwrap();
        let js = serde_json::to_string(&hq).unwrap();
        let back: BrauerClass = serde_json::from_str(&js).unwrap();
        assert_eq!(hq, back);
        assert_eq!(js, serde_json::to_string(&back).unwrap()); // bit-exact

        // deserializing a reciprocity violation fails
        let bad = r#"{"field":{"kind":"rationals"},"invariants":[[3,1,2]]}"#;
        assert!(serde_json::from_str::<BrauerClass>(bad).is_err());
    }
}
