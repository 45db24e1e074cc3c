//! Twisted Brauer sets of small geometries: classification schemas, the
//! Br(k)-action with orbits and stabilizers, index reduction over quadrics,
//! twist identity, bounded enumeration, and the K₁-torsion distinguisher
//! for the real conic case.
//!
//! Points are stored as canonical coset data (torsor datum + reduced twist
//! class), which the classification theorems make a faithful encoding of
//! the twisted derived categories themselves.

use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::brauer::{enumerate_torsion, BrauerClass, Window};
use crate::error::{Error, Result};
use crate::numfield::{self, rat, FieldSpec, Place, Rat};
use crate::quadform::QuadraticForm;
use crate::quiver;

/// The geometries whose twisted Brauer sets the engine classifies.
///
/// `QuadricOdd { n }` is the smooth quadric hypersurface in P^{2n} (a form
/// of rank 2n+1); `QuadricEven { n }` the one in P^{2n-1} (rank 2n, n ≥ 2);
/// `NcProjective { n }` the noncommutative projective space attached to the
/// n-arrow Kronecker quiver Ω_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    Genus0,
    SeveriBrauer { n: u32 },
    QuadricOdd { n: u32 },
    QuadricEven { n: u32 },
    NcProjective { n: u32 },
}

impl Geometry {
    /// Smooth projective curve of genus g; only g = 0 is classifiable.
    pub fn curve(genus: u32) -> Result<Self> {
        if genus > 0 {
            return Err(Error::HigherGenus(genus));
        }
        Ok(Geometry::Genus0)
    }

    pub fn severi_brauer(n: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::Invalid("Severi-Brauer degree must be >= 1".into()));
        }
        Ok(Geometry::SeveriBrauer { n })
    }

    pub fn quadric_odd(n: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::Invalid("odd quadric parameter must be >= 1".into()));
        }
        Ok(Geometry::QuadricOdd { n })
    }

    /// Requires n ≥ 2: the rank-2n machinery (full Clifford class, index
    /// reduction exponent n−2) is only defined from rank 4 on.
    pub fn quadric_even(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::BadRank(
                "even quadric parameter must be >= 2 (form rank >= 4)".into(),
            ));
        }
        Ok(Geometry::QuadricEven { n })
    }

    pub fn nc_projective(n: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::Invalid(
                "noncommutative projective degree must be >= 1".into(),
            ));
        }
        Ok(Geometry::NcProjective { n })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Geometry::Genus0 => Ok(()),
            Geometry::SeveriBrauer { n } => Geometry::severi_brauer(n).map(|_| ()),
            Geometry::QuadricOdd { n } => Geometry::quadric_odd(n).map(|_| ()),
            Geometry::QuadricEven { n } => Geometry::quadric_even(n).map(|_| ()),
            Geometry::NcProjective { n } => Geometry::nc_projective(n).map(|_| ()),
        }
    }

    /// Period bound for Brauer-type torsors, None for quadrics.
    fn torsor_period_bound(&self) -> Option<u64> {
        match *self {
            Geometry::Genus0 => Some(2),
            Geometry::SeveriBrauer { n } | Geometry::NcProjective { n } => Some(n as u64),
            _ => None,
        }
    }

    /// Required form rank for quadric torsors, None otherwise.
    fn form_rank(&self) -> Option<usize> {
        match *self {
            Geometry::QuadricOdd { n } => Some(2 * n as usize + 1),
            Geometry::QuadricEven { n } => Some(2 * n as usize),
            _ => None,
        }
    }
}

/// The torsor datum underlying a twist point: a Brauer class (conics,
/// Severi-Brauer varieties, noncommutative projective spaces) or a
/// quadratic form up to similarity (quadrics).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsorDatum {
    Brauer(BrauerClass),
    Form(QuadraticForm),
}

impl TorsorDatum {
    pub fn field(&self) -> &FieldSpec {
        match self {
            TorsorDatum::Brauer(c) => c.field(),
            TorsorDatum::Form(q) => q.field(),
        }
    }
}

/// A point of the twisted Brauer set: geometry, torsor, and the twist class
/// stored as the canonical (lexicographically least) representative of its
/// coset modulo the stabilizer of the torsor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TwistPointWire", into = "TwistPointWire")]
pub struct TwistPoint {
    geometry: Geometry,
    torsor: TorsorDatum,
    twist: BrauerClass,
}

#[derive(Serialize, Deserialize)]
struct TwistPointWire {
    geometry: Geometry,
    torsor: TorsorDatum,
    twist: BrauerClass,
}

impl From<TwistPoint> for TwistPointWire {
    fn from(t: TwistPoint) -> Self {
        TwistPointWire {
            geometry: t.geometry,
            torsor: t.torsor,
            twist: t.twist,
        }
    }
}

impl TryFrom<TwistPointWire> for TwistPoint {
    type Error = Error;
    fn try_from(w: TwistPointWire) -> Result<Self> {
        TwistPoint::new(w.geometry, w.torsor, w.twist)
    }
}

impl TwistPoint {
    pub fn new(geometry: Geometry, torsor: TorsorDatum, twist: BrauerClass) -> Result<Self> {
        geometry.validate()?;
        if torsor.field() != twist.field() {
            return Err(Error::FieldMismatch(
                torsor.field().to_string(),
                twist.field().to_string(),
            ));
        }
        let torsor = match (&geometry, torsor) {
            (g, TorsorDatum::Brauer(c)) => {
                let Some(bound) = g.torsor_period_bound() else {
                    return Err(Error::GeometryMismatch(
                        "quadric geometries take a quadratic form torsor".into(),
                    ));
                };
                if bound % c.period() != 0 {
                    return Err(Error::InvalidInvariants(format!(
                        "torsor period {} does not divide {bound}",
                        c.period()
                    )));
                }
                TorsorDatum::Brauer(c)
            }
            (g, TorsorDatum::Form(q)) => {
                let Some(rank) = g.form_rank() else {
                    return Err(Error::GeometryMismatch(
                        "this geometry takes a Brauer-class torsor".into(),
                    ));
                };
                if q.rank() != rank {
                    return Err(Error::BadRank(format!(
                        "quadric torsor must have rank {rank}, got {}",
                        q.rank()
                    )));
                }
                TorsorDatum::Form(q.reduced()?)
            }
        };
        let stab = stabilizer_subgroup(&geometry, &torsor)?;
        let twist = reduce_coset(&twist, &stab)?;
        Ok(TwistPoint {
            geometry,
            torsor,
            twist,
        })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn torsor(&self) -> &TorsorDatum {
        &self.torsor
    }

    pub fn twist(&self) -> &BrauerClass {
        &self.twist
    }

    pub fn field(&self) -> &FieldSpec {
        self.twist.field()
    }
}

/// Shape of the derived automorphism group: number of ℤ factors (shift and
/// twist/degree) and the reductive quotient acting on the geometry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutShape {
    pub z_factors: u32,
    pub reductive_quotient: String,
}

/// The obstruction group for lifting torsors to twist points; the flag
/// records that every torsor in the declared set does lift (all five
/// geometries admit explicit twisted models).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub group: String,
    pub vanishes_for_lifts: bool,
}

/// The exact-sequence shape classifying twists of a geometry over a field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationSchema {
    pub geometry: Geometry,
    pub field: FieldSpec,
    pub aut_shape: AutShape,
    pub torsor_set: String,
    pub stabilizer_rule: String,
    pub obstruction: Obstruction,
}

/// The classification schema for a geometry over a field: the shape of the
/// derived automorphism group, the torsor-classifying set, the stabilizer
/// rule for the Br(k)-action, and the lifting obstruction.
pub fn schema(g: &Geometry, k: &FieldSpec) -> Result<ClassificationSchema> {
    g.validate()?;
    let (aut_shape, torsor_set, stabilizer_rule) = match *g {
        Geometry::Genus0 => (
            AutShape {
                z_factors: 2,
                reductive_quotient: "PGL2".into(),
            },
            "quaternion-classes".to_string(),
            "amitsur-cyclic".to_string(),
        ),
        Geometry::SeveriBrauer { n } | Geometry::NcProjective { n } => (
            AutShape {
                z_factors: 2,
                reductive_quotient: format!("PGL{n}"),
            },
            format!("degree-{n}-csa-classes"),
            "amitsur-cyclic".to_string(),
        ),
        Geometry::QuadricOdd { n } => {
            k.require_char_not_two()?;
            (
                AutShape {
                    z_factors: 2,
                    reductive_quotient: "PSO".into(),
                },
                format!("similarity-classes-rank-{}", 2 * n + 1),
                if n == 1 { "amitsur-cyclic" } else { "trivial" }.to_string(),
            )
        }
        Geometry::QuadricEven { n } => {
            k.require_char_not_two()?;
            (
                AutShape {
                    z_factors: 2,
                    reductive_quotient: "PSO".into(),
                },
                format!("similarity-classes-rank-{}", 2 * n),
                if n == 2 { "clifford-cyclic" } else { "trivial" }.to_string(),
            )
        }
    };
    Ok(ClassificationSchema {
        geometry: *g,
        field: k.clone(),
        aut_shape,
        torsor_set,
        stabilizer_rule,
        obstruction: Obstruction {
            group: "H3(k, Gm)".into(),
            vanishes_for_lifts: true,
        },
    })
}

/// Index of D over the function field of the quadric {p = 0}:
/// rank 2n+1 ↦ gcd{ind D, 2^{n−1}·ind(D ⊗ C₀(p))};
/// rank 2n   ↦ gcd{ind D, 2^{n−2}·ind(D ⊗ C(p))}, n ≥ 2.
pub fn index_reduction(d: &BrauerClass, p: &QuadraticForm) -> Result<u64> {
    if d.field() != p.field() {
        return Err(Error::FieldMismatch(
            d.field().to_string(),
            p.field().to_string(),
        ));
    }
    let r = p.rank();
    if r < 3 {
        return Err(Error::BadRank(format!(
            "index reduction needs rank >= 3, got {r}"
        )));
    }
    let ind_d = d.index();
    let (exponent, clifford) = if r % 2 == 1 {
        ((r as u32 - 1) / 2 - 1, p.even_clifford_class()?)
    } else {
        (r as u32 / 2 - 2, p.full_clifford_class()?)
    };
    let twisted = d.tensor(&clifford)?;
    Ok(ind_d.gcd(&(2u64.pow(exponent) * twisted.index())))
}

/// The full stabilizer subgroup (no window restriction), sorted.
fn stabilizer_subgroup(g: &Geometry, torsor: &TorsorDatum) -> Result<Vec<BrauerClass>> {
    let generator = match (*g, torsor) {
        (Geometry::Genus0, TorsorDatum::Brauer(a))
        | (Geometry::SeveriBrauer { .. }, TorsorDatum::Brauer(a))
        | (Geometry::NcProjective { .. }, TorsorDatum::Brauer(a)) => a.clone(),
        (Geometry::QuadricOdd { n }, TorsorDatum::Form(p)) => {
            if n == 1 {
                p.even_clifford_class()? // the conic case: Amitsur via C_0
            } else {
                BrauerClass::zero(p.field().clone())
            }
        }
        (Geometry::QuadricEven { n }, TorsorDatum::Form(p)) => {
            if n == 2 {
                p.full_clifford_class()?
            } else {
                BrauerClass::zero(p.field().clone())
            }
        }
        _ => {
            return Err(Error::GeometryMismatch(
                "torsor datum does not match geometry".into(),
            ))
        }
    };
    let mut sub = generator.cyclic_subgroup();
    sub.sort_by(BrauerClass::lex_cmp);
    sub.dedup();
    Ok(sub)
}

/// The stabilizer of the torsor inside Br(k), intersected with the window
/// over ℚ. Membership is independently certifiable for quadrics via
/// index_reduction(D, p) = 1.
pub fn stabilizer(
    g: &Geometry,
    torsor: &TorsorDatum,
    k: &FieldSpec,
    window: Option<&Window>,
) -> Result<Vec<BrauerClass>> {
    g.validate()?;
    if torsor.field() != k {
        return Err(Error::FieldMismatch(
            torsor.field().to_string(),
            k.to_string(),
        ));
    }
    // reuse TwistPoint validation of the torsor against the geometry
    let point = TwistPoint::new(*g, torsor.clone(), BrauerClass::zero(k.clone()))?;
    let mut sub = stabilizer_subgroup(g, &point.torsor)?;
    if let (FieldSpec::Rationals, Some(w)) = (k, window) {
        sub.retain(|c| {
            w.torsion_bound % c.period() == 0
                && c.support().all(|v| w.support.contains(&v))
        });
    }
    Ok(sub)
}

/// Canonical coset representative: lexicographically least element of
/// {x ⊗ s : s in the subgroup}.
fn reduce_coset(x: &BrauerClass, subgroup: &[BrauerClass]) -> Result<BrauerClass> {
    let mut best: Option<BrauerClass> = None;
    for s in subgroup {
        let y = x.tensor(s)?;
        if best.as_ref().map_or(true, |b| y.lex_cmp(b).is_lt()) {
            best = Some(y);
        }
    }
    Ok(best.expect("subgroup contains 0"))
}

/// The Br(k)-action: tensors the twist and re-reduces modulo the stabilizer.
pub fn act(alpha: &BrauerClass, t: &TwistPoint) -> Result<TwistPoint> {
    if alpha.field() != t.field() {
        return Err(Error::FieldMismatch(
            alpha.field().to_string(),
            t.field().to_string(),
        ));
    }
    let stab = stabilizer_subgroup(&t.geometry, &t.torsor)?;
    let twist = reduce_coset(&alpha.tensor(&t.twist)?, &stab)?;
    Ok(TwistPoint {
        geometry: t.geometry,
        torsor: t.torsor.clone(),
        twist,
    })
}

/// Twist identity: same torsor (Brauer-class equality, or form similarity
/// for quadrics) and same twist coset modulo the stabilizer.
pub fn same_twist(t1: &TwistPoint, t2: &TwistPoint) -> Result<bool> {
    if t1.geometry != t2.geometry {
        return Err(Error::GeometryMismatch(format!(
            "{:?} vs {:?}",
            t1.geometry, t2.geometry
        )));
    }
    if t1.field() != t2.field() {
        return Err(Error::FieldMismatch(
            t1.field().to_string(),
            t2.field().to_string(),
        ));
    }
    let torsors_agree = match (&t1.torsor, &t2.torsor) {
        (TorsorDatum::Brauer(a), TorsorDatum::Brauer(b)) => a == b,
        (TorsorDatum::Form(p), TorsorDatum::Form(q)) => p.similar(q, p.field())?.is_some(),
        _ => false,
    };
    if !torsors_agree {
        return Ok(false);
    }
    // cosets agree iff the difference of twists lies in the stabilizer
    let stab = stabilizer_subgroup(&t1.geometry, &t1.torsor)?;
    let diff = t1.twist.tensor(&t2.twist.inverse())?;
    Ok(stab.contains(&diff))
}

/// A quaternion symbol (a, b) realizing a 2-torsion Brauer class. Searches
/// subset products of −1, 2, the primes in the class's support, and (if
/// needed) small auxiliary primes.
pub fn quaternion_symbol_for(class: &BrauerClass) -> Result<(Rat, Rat)> {
    if class.period() > 2 {
        return Err(Error::InvalidInvariants(
            "quaternion symbols realize 2-torsion classes only".into(),
        ));
    }
    if class.is_zero() {
        return Ok((Rat::one(), Rat::one()));
    }
    match class.field() {
        FieldSpec::Reals => Ok((rat(-1), rat(-1))),
        FieldSpec::FiniteField { .. } => Ok((Rat::one(), Rat::one())),
        FieldSpec::PAdic { p } => {
            let (a, b) = if *p == 2 {
                (rat(-1), rat(-1))
            } else {
                (rat(*p as i64), rat(numfield::smallest_nonresidue(*p) as i64))
            };
            debug_assert_eq!(&BrauerClass::quaternion(&a, &b, class.field())?, class);
            Ok((a, b))
        }
        FieldSpec::Rationals => {
            let mut base: Vec<i64> = vec![-1, 2];
            for v in class.support() {
                if let Place::Finite(p) = v {
                    if p != 2 {
                        base.push(p as i64);
                    }
                }
            }
            let aux: Vec<i64> = (3..200)
                .filter(|&q| numfield::is_prime(q as u64) && !base.contains(&q))
                .collect();
            let mut gens = base.clone();
            for extra in std::iter::once(None).chain(aux.iter().map(Some)) {
                if let Some(&q) = extra {
                    gens = base.clone();
                    gens.push(q);
                }
                let mut values: Vec<Rat> = vec![Rat::one()];
                for &g in &gens {
                    let mut next = values.clone();
                    for v in &values {
                        next.push(v * rat(g));
                    }
                    values = next;
                }
                for a in &values {
                    for b in &values {
                        if BrauerClass::quaternion(a, b, class.field())? == *class {
                            return Ok((a.clone(), b.clone()));
                        }
                    }
                }
            }
            Err(Error::InvalidInvariants(
                "no quaternion symbol found in the search window".into(),
            ))
        }
    }
}

/// The plane conic of the quaternion class [A] = (a, b): the rank-3 form
/// ⟨1, −a, −b⟩ (so its even Clifford class is [A] again).
pub fn conic_form(class: &BrauerClass) -> Result<QuadraticForm> {
    let (a, b) = quaternion_symbol_for(class)?;
    QuadraticForm::new(class.field().clone(), vec![Rat::one(), -a, -b])
}

fn combinations_with_replacement(values: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; r];
    fn rec(values: usize, r: usize, pos: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == r {
            out.push(cur.clone());
            return;
        }
        for v in start..values {
            cur[pos] = v;
            rec(values, r, pos + 1, v, cur, out);
        }
    }
    rec(values, r, 0, 0, &mut cur, &mut out);
    out
}

/// Deterministic key identifying the equivalence class of a form, relative
/// to a fixed list of places (ℚ only; other fields pass their single
/// relevant invariants).
fn equiv_key(q: &QuadraticForm, places: &[Place]) -> Result<String> {
    let disc = q.discriminant()?;
    let mut key = format!("d={};", disc.rep);
    match q.field() {
        FieldSpec::Reals => {
            let (pos, neg) = q.signature()?;
            key.push_str(&format!("sig={pos},{neg};"));
        }
        FieldSpec::FiniteField { .. } => {}
        FieldSpec::PAdic { p } => {
            key.push_str(&format!("h={};", q.hasse_invariant(Place::Finite(*p))?));
        }
        FieldSpec::Rationals => {
            let (pos, neg) = q.signature()?;
            key.push_str(&format!("sig={pos},{neg};"));
            for &v in places {
                key.push_str(&format!("h{v:?}={};", q.hasse_invariant(v)?));
            }
        }
    }
    Ok(key)
}

/// Similarity classes of rank-r forms with coefficients drawn from the
/// field's square-class representatives (window-relative over ℚ).
fn quadric_torsor_forms(
    k: &FieldSpec,
    rank: usize,
    window: Option<&Window>,
) -> Result<Vec<QuadraticForm>> {
    k.require_char_not_two()?;
    let values: Vec<Rat> = match k {
        FieldSpec::Reals => vec![Rat::one(), rat(-1)],
        FieldSpec::FiniteField { q } => {
            let (p, m) = numfield::prime_power(*q).expect("validated");
            if m % 2 == 0 {
                vec![Rat::one()]
            } else {
                vec![Rat::one(), rat(numfield::smallest_nonresidue(p) as i64)]
            }
        }
        FieldSpec::PAdic { p } => {
            if *p == 2 {
                [1i64, 3, 5, 7, 2, 6, 10, 14].iter().map(|&x| rat(x)).collect()
            } else {
                let u = numfield::smallest_nonresidue(*p) as i64;
                vec![Rat::one(), rat(u), rat(*p as i64), rat(u * *p as i64)]
            }
        }
        FieldSpec::Rationals => {
            let w = window.ok_or(Error::MissingWindow)?;
            let mut gens: Vec<i64> = vec![-1];
            for &v in &w.support {
                if let Place::Finite(p) = v {
                    gens.push(p as i64);
                }
            }
            let mut values: Vec<Rat> = vec![Rat::one()];
            for g in gens {
                let mut next = values.clone();
                for v in &values {
                    next.push(v * rat(g));
                }
                values = next;
            }
            values
        }
    };
    let combos = combinations_with_replacement(values.len(), rank);
    if combos.len() > 20_000 {
        return Err(Error::Unsupported(format!(
            "quadric torsor enumeration too large: {} candidate forms",
            combos.len()
        )));
    }
    let places: Vec<Place> = match (k, window) {
        (FieldSpec::Rationals, Some(w)) => {
            let mut ps = vec![Place::Real, Place::Finite(2)];
            ps.extend(w.support.iter().copied());
            ps.sort_unstable();
            ps.dedup();
            ps
        }
        _ => Vec::new(),
    };
    // one representative per equivalence class first, then group by similarity
    let mut equiv_reps: Vec<QuadraticForm> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for combo in combos {
        let diag: Vec<Rat> = combo.iter().map(|&i| values[i].clone()).collect();
        let q = QuadraticForm::new(k.clone(), diag)?;
        if seen.insert(equiv_key(&q, &places)?) {
            equiv_reps.push(q);
        }
    }
    let mut sim_reps: Vec<QuadraticForm> = Vec::new();
    for q in equiv_reps {
        let mut found = false;
        for r in &sim_reps {
            if r.similar(&q, k)?.is_some() {
                found = true;
                break;
            }
        }
        if !found {
            sim_reps.push(q);
        }
    }
    Ok(sim_reps)
}

/// The torsor data of a geometry over a field, in deterministic order.
fn torsor_data(g: &Geometry, k: &FieldSpec, window: Option<&Window>) -> Result<Vec<TorsorDatum>> {
    match g {
        Geometry::Genus0 | Geometry::SeveriBrauer { .. } | Geometry::NcProjective { .. } => {
            let n = g.torsor_period_bound().expect("brauer-type geometry");
            let (m, support) = match k {
                FieldSpec::Reals | FieldSpec::FiniteField { .. } => (n, None),
                FieldSpec::PAdic { .. } => {
                    let w = window.ok_or(Error::MissingWindow)?;
                    (n.gcd(&w.torsion_bound), None)
                }
                FieldSpec::Rationals => {
                    let w = window.ok_or(Error::MissingWindow)?;
                    (n.gcd(&w.torsion_bound), Some(w.support.as_slice()))
                }
            };
            Ok(enumerate_torsion(k, m, support)?
                .into_iter()
                .map(TorsorDatum::Brauer)
                .collect())
        }
        Geometry::QuadricOdd { .. } | Geometry::QuadricEven { .. } => {
            let rank = g.form_rank().expect("quadric geometry");
            Ok(quadric_torsor_forms(k, rank, window)?
                .into_iter()
                .map(TorsorDatum::Form)
                .collect())
        }
    }
}

/// All twist points within the window, with their Br(k)-orbit ids. The
/// orbit id equals the index of the underlying torsor in the deterministic
/// torsor order (twists over a fixed torsor form one window-orbit).
pub fn enumerate_twists(
    g: &Geometry,
    k: &FieldSpec,
    window: Option<&Window>,
) -> Result<Vec<(TwistPoint, usize)>> {
    g.validate()?;
    let classes = match k {
        FieldSpec::Reals => enumerate_torsion(k, 2, None)?,
        FieldSpec::FiniteField { .. } => enumerate_torsion(k, 1, None)?,
        FieldSpec::PAdic { .. } => {
            let w = window.ok_or(Error::MissingWindow)?;
            enumerate_torsion(k, w.torsion_bound, None)?
        }
        FieldSpec::Rationals => {
            let w = window.ok_or(Error::MissingWindow)?;
            enumerate_torsion(k, w.torsion_bound, Some(&w.support))?
        }
    };
    let mut out = Vec::new();
    for (orbit, torsor) in torsor_data(g, k, window)?.into_iter().enumerate() {
        let stab = stabilizer_subgroup(g, &torsor)?;
        let mut reps: Vec<BrauerClass> = Vec::new();
        for c in &classes {
            let r = reduce_coset(c, &stab)?;
            if !reps.contains(&r) {
                reps.push(r);
            }
        }
        reps.sort_by(BrauerClass::lex_cmp);
        for twist in reps {
            out.push((
                TwistPoint {
                    geometry: *g,
                    torsor: torsor.clone(),
                    twist,
                },
                orbit,
            ));
        }
    }
    Ok(out)
}

/// K₁-torsion data for one real-conic twist point: the two exceptional
/// factor algebras (R or H) and the torsion orders of their K₁ detected
/// through the reduced norm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct K1Factors {
    pub factors: (String, String),
    pub torsion: (u32, u32),
}

/// Witness that two real-conic twist points are inequivalent: their K₁
/// torsion profiles differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct K1Witness {
    pub first: K1Factors,
    pub second: K1Factors,
}

fn k1_factors(t: &TwistPoint) -> Result<K1Factors> {
    let TorsorDatum::Brauer(a) = &t.torsor else {
        return Err(Error::GeometryMismatch("expected a conic point".into()));
    };
    // semiorthogonal factors of the twisted conic: algebras with classes
    // alpha and alpha + [A]
    let c1 = t.twist.clone();
    let c2 = t.twist.tensor(a)?;
    let name = |c: &BrauerClass| if c.is_zero() { "R" } else { "H" }.to_string();
    let torsion = |c: &BrauerClass| quiver::k1_torsion_order(c.is_zero());
    Ok(K1Factors {
        factors: (name(&c1), name(&c2)),
        torsion: (torsion(&c1), torsion(&c2)),
    })
}

/// The K-theoretic distinguisher for genus-0 twists over ℝ: when the two
/// points differ, reports the torsion of the degree-1 K-groups of their
/// exceptional factors (2 for R, where −1 is a reduced norm; 1 for H,
/// where reduced norms are positive). Returns None when not applicable or
/// when the points coincide.
pub fn k1_distinguisher(t1: &TwistPoint, t2: &TwistPoint) -> Result<Option<K1Witness>> {
    let applicable = t1.geometry == Geometry::Genus0
        && t2.geometry == Geometry::Genus0
        && *t1.field() == FieldSpec::Reals
        && *t2.field() == FieldSpec::Reals;
    if !applicable || same_twist(t1, t2)? {
        return Ok(None);
    }
    Ok(Some(K1Witness {
        first: k1_factors(t1)?,
        second: k1_factors(t2)?,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brauer::Inv;

    fn reals() -> FieldSpec {
        FieldSpec::reals()
    }

    fn rationals() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn h_class() -> BrauerClass {
        BrauerClass::quaternion(&rat(-1), &rat(-1), &reals()).unwrap()
    }

    fn mod_p1() -> TwistPoint {
        TwistPoint::new(
            Geometry::Genus0,
            TorsorDatum::Brauer(BrauerClass::zero(reals())),
            BrauerClass::zero(reals()),
        )
        .unwrap()
    }

    fn mod_p1_h() -> TwistPoint {
        TwistPoint::new(
            Geometry::Genus0,
            TorsorDatum::Brauer(BrauerClass::zero(reals())),
            h_class(),
        )
        .unwrap()
    }

    fn mod_c(twist: BrauerClass) -> TwistPoint {
        TwistPoint::new(Geometry::Genus0, TorsorDatum::Brauer(h_class()), twist).unwrap()
    }

    #[test]
    fn geometry_validation() {
        assert!(Geometry::curve(0).is_ok());
        assert!(matches!(Geometry::curve(1), Err(Error::HigherGenus(1))));
        assert!(Geometry::quadric_even(1).is_err());
        assert!(Geometry::severi_brauer(0).is_err());
    }

    #[test]
    fn schema_examples() {
        let s = schema(&Geometry::Genus0, &reals()).unwrap();
        assert_eq!(s.aut_shape.z_factors, 2);
        assert_eq!(s.aut_shape.reductive_quotient, "PGL2");
        assert_eq!(s.torsor_set, "quaternion-classes");
        assert_eq!(s.stabilizer_rule, "amitsur-cyclic");
        assert!(s.obstruction.vanishes_for_lifts);

        let s = schema(&Geometry::QuadricOdd { n: 2 }, &rationals()).unwrap();
        assert_eq!(s.stabilizer_rule, "trivial");
        assert_eq!(s.torsor_set, "similarity-classes-rank-5");

        let sb = schema(&Geometry::SeveriBrauer { n: 3 }, &rationals()).unwrap();
        let ncp = schema(&Geometry::NcProjective { n: 3 }, &rationals()).unwrap();
        assert_eq!(sb.torsor_set, ncp.torsor_set);
        assert_eq!(sb.stabilizer_rule, ncp.stabilizer_rule);

        // quadrics need char != 2
        assert!(schema(&Geometry::QuadricOdd { n: 1 }, &FieldSpec::finite(4).unwrap()).is_err());
    }

    #[test]
    fn index_reduction_examples() {
        let p5 = QuadraticForm::from_ints(rationals(), &[1, 1, 1, 1, -1]).unwrap();
        let zero = BrauerClass::zero(rationals());
        assert_eq!(index_reduction(&zero, &p5).unwrap(), 1);

        let d = BrauerClass::quaternion(&rat(-1), &rat(-1), &rationals()).unwrap();
        assert_eq!(index_reduction(&d, &p5).unwrap(), 2);

        // rank-4 form with nontrivial full Clifford class: its own class
        // reduces to index 1 over the quadric
        let p4 = QuadraticForm::from_ints(rationals(), &[1, 1, 1, 1]).unwrap();
        let c = p4.full_clifford_class().unwrap();
        assert!(!c.is_zero());
        assert_eq!(index_reduction(&c, &p4).unwrap(), 1);

        let p2 = QuadraticForm::from_ints(rationals(), &[1, 1]).unwrap();
        assert!(index_reduction(&zero, &p2).is_err());
    }

    #[test]
    fn stabilizer_examples() {
        // (Genus0, [H], R) -> {0, [H]}
        let stab = stabilizer(
            &Geometry::Genus0,
            &TorsorDatum::Brauer(h_class()),
            &reals(),
            None,
        )
        .unwrap();
        assert_eq!(stab.len(), 2);
        assert!(stab.contains(&BrauerClass::zero(reals())));
        assert!(stab.contains(&h_class()));

        // rank-5 quadric over Q: free action
        let p5 = QuadraticForm::from_ints(rationals(), &[1, 1, 1, 1, -1]).unwrap();
        let stab = stabilizer(
            &Geometry::QuadricOdd { n: 2 },
            &TorsorDatum::Form(p5),
            &rationals(),
            None,
        )
        .unwrap();
        assert_eq!(stab, vec![BrauerClass::zero(rationals())]);

        // quadric surface: Clifford-cyclic, every member certified by
        // index reduction
        let p4 = QuadraticForm::from_ints(rationals(), &[1, 1, 1, 1]).unwrap();
        let stab = stabilizer(
            &Geometry::QuadricEven { n: 2 },
            &TorsorDatum::Form(p4.clone()),
            &rationals(),
            None,
        )
        .unwrap();
        assert_eq!(stab.len(), 2);
        for d in &stab {
            assert_eq!(index_reduction(d, &p4).unwrap(), 1);
        }
    }

    #[test]
    fn stabilizer_window_intersection() {
        // [(-1,-1)] has support {oo, 2}; a window without 2 excludes it
        let p4 = QuadraticForm::from_ints(rationals(), &[1, 1, 1, 1]).unwrap();
        let w = Window::new(2, vec![Place::Real, Place::Finite(3)]).unwrap();
        let stab = stabilizer(
            &Geometry::QuadricEven { n: 2 },
            &TorsorDatum::Form(p4),
            &rationals(),
            Some(&w),
        )
        .unwrap();
        assert_eq!(stab, vec![BrauerClass::zero(rationals())]);
    }

    #[test]
    fn action_examples() {
        let t = mod_p1();
        assert!(same_twist(&act(&BrauerClass::zero(reals()), &t).unwrap(), &t).unwrap());
        // [H] moves Mod_P1 to the twisted point
        let moved = act(&h_class(), &t).unwrap();
        assert!(same_twist(&moved, &mod_p1_h()).unwrap());
        assert!(!same_twist(&moved, &t).unwrap());
        // [H] fixes the conic point
        let c = mod_c(BrauerClass::zero(reals()));
        assert!(same_twist(&act(&h_class(), &c).unwrap(), &c).unwrap());
    }

    #[test]
    fn action_axioms() {
        let a = h_class();
        for t in [mod_p1(), mod_p1_h(), mod_c(BrauerClass::zero(reals()))] {
            let ab = act(&a, &act(&a, &t).unwrap()).unwrap();
            let sum = act(&a.tensor(&a).unwrap(), &t).unwrap();
            assert!(same_twist(&ab, &sum).unwrap());
        }
    }

    #[test]
    fn same_twist_examples() {
        assert!(same_twist(&mod_p1(), &mod_p1()).unwrap());
        // twisting the conic by [H] gives nothing new
        assert!(same_twist(&mod_c(BrauerClass::zero(reals())), &mod_c(h_class())).unwrap());
        assert!(!same_twist(&mod_p1(), &mod_p1_h()).unwrap());
        // geometry mismatch is an error
        let sb = TwistPoint::new(
            Geometry::SeveriBrauer { n: 2 },
            TorsorDatum::Brauer(BrauerClass::zero(reals())),
            BrauerClass::zero(reals()),
        )
        .unwrap();
        assert!(same_twist(&mod_p1(), &sb).is_err());
    }

    #[test]
    fn quadric_torsor_similarity_identity() {
        // <1,1,1,1,-1> and <-1,-1,-1,-1,1> are similar: same twist point
        let p = QuadraticForm::from_ints(rationals(), &[1, 1, 1, 1, -1]).unwrap();
        let q = QuadraticForm::from_ints(rationals(), &[-1, -1, -1, -1, 1]).unwrap();
        let g = Geometry::QuadricOdd { n: 2 };
        let zero = BrauerClass::zero(rationals());
        let t1 = TwistPoint::new(g, TorsorDatum::Form(p), zero.clone()).unwrap();
        let t2 = TwistPoint::new(g, TorsorDatum::Form(q), zero).unwrap();
        assert!(same_twist(&t1, &t2).unwrap());
    }

    #[test]
    fn enumerate_real_conic() {
        let pts = enumerate_twists(&Geometry::Genus0, &reals(), None).unwrap();
        assert_eq!(pts.len(), 3);
        let orbits: std::collections::BTreeSet<usize> =
            pts.iter().map(|(_, o)| *o).collect();
        assert_eq!(orbits.len(), 2);
        // split torsor carries two points, the nonsplit conic one
        assert_eq!(pts.iter().filter(|(_, o)| *o == 0).count(), 2);
        assert_eq!(pts.iter().filter(|(_, o)| *o == 1).count(), 1);
    }

    #[test]
    fn enumerate_finite_field_conic() {
        let k = FieldSpec::finite(5).unwrap();
        let pts = enumerate_twists(&Geometry::Genus0, &k, None).unwrap();
        assert_eq!(pts.len(), 1);
    }

    #[test]
    fn enumerate_padic_conic() {
        let k = FieldSpec::padic(3).unwrap();
        let w = Window::new(2, vec![]).unwrap();
        let pts = enumerate_twists(&Geometry::Genus0, &k, Some(&w)).unwrap();
        assert_eq!(pts.len(), 3);
        let orbits: std::collections::BTreeSet<usize> =
            pts.iter().map(|(_, o)| *o).collect();
        assert_eq!(orbits.len(), 2);
    }

    #[test]
    fn enumerate_requires_window_over_q() {
        assert!(matches!(
            enumerate_twists(&Geometry::Genus0, &rationals(), None),
            Err(Error::MissingWindow)
        ));
    }

    #[test]
    fn enumerate_rational_window() {
        let w = Window::new(2, vec![Place::Real, Place::Finite(2)]).unwrap();
        let pts = enumerate_twists(&Geometry::Genus0, &rationals(), Some(&w)).unwrap();
        // torsors: 0 and (-1,-1); window classes: the same two.
        // split torsor: two points; conic torsor: one point.
        assert_eq!(pts.len(), 3);
        for (t, _) in &pts {
            assert_eq!(t.field(), &rationals());
        }
    }

    #[test]
    fn k1_distinguisher_examples() {
        let w = k1_distinguisher(&mod_p1(), &mod_p1_h()).unwrap().unwrap();
        assert_eq!(w.first.torsion, (2, 2));
        assert_eq!(w.second.torsion, (1, 1));

        let w = k1_distinguisher(&mod_p1(), &mod_c(BrauerClass::zero(reals())))
            .unwrap()
            .unwrap();
        assert_eq!(w.first.torsion, (2, 2));
        assert_eq!(w.second.torsion, (2, 1));
        assert_eq!(w.second.factors, ("R".into(), "H".into()));

        assert!(k1_distinguisher(&mod_p1(), &mod_p1()).unwrap().is_none());
        // out of scope: rationals
        let tq = TwistPoint::new(
            Geometry::Genus0,
            TorsorDatum::Brauer(BrauerClass::zero(rationals())),
            BrauerClass::zero(rationals()),
        )
        .unwrap();
        assert!(k1_distinguisher(&tq, &tq).unwrap().is_none());
    }

    #[test]
    fn quaternion_symbol_search() {
        for (a, b) in [(-1, -1), (-1, 3), (2, 5), (3, 5), (-2, -5)] {
            let c = BrauerClass::quaternion(&rat(a), &rat(b), &rationals()).unwrap();
            let (x, y) = quaternion_symbol_for(&c).unwrap();
            assert_eq!(BrauerClass::quaternion(&x, &y, &rationals()).unwrap(), c);
        }
    }

    #[test]
    fn conic_form_clifford_roundtrip() {
        let c = BrauerClass::quaternion(&rat(-1), &rat(3), &rationals()).unwrap();
        let f = conic_form(&c).unwrap();
        assert_eq!(f.even_clifford_class().unwrap(), c);
    }

    #[test]
    fn amitsur_membership_via_index_reduction() {
        // alpha in <[A]> iff alpha pulls back to 0 on the conic of [A],
        // iff index_reduction(alpha, conic form) = 1
        let a = BrauerClass::quaternion(&rat(-1), &rat(-1), &rationals()).unwrap();
        let f = conic_form(&a).unwrap();
        let candidates = [
            BrauerClass::zero(rationals()),
            a.clone(),
            BrauerClass::quaternion(&rat(-1), &rat(3), &rationals()).unwrap(),
            BrauerClass::quaternion(&rat(2), &rat(5), &rationals()).unwrap(),
        ];
        for alpha in &candidates {
            let in_group = a.cyclic_subgroup().contains(alpha);
            let pulled = index_reduction(alpha, &f).unwrap();
            assert_eq!(in_group, pulled == 1, "failed for {alpha:?}");
        }
    }

    #[test]
    fn twist_point_reduction_invariant() {
        // constructing Mod_C with twist [H] stores the reduced (zero) twist
        let t = mod_c(h_class());
        assert!(t.twist().is_zero());
    }

    #[test]
    fn twist_point_validation() {
        // period-3 class is not a conic torsor
        let k = FieldSpec::padic(5).unwrap();
        let c = BrauerClass::from_invariants(k.clone(), [(Place::Finite(5), Inv::new(1, 3))])
            .unwrap();
        assert!(TwistPoint::new(
            Geometry::Genus0,
            TorsorDatum::Brauer(c.clone()),
            BrauerClass::zero(k.clone())
        )
        .is_err());
        // but it is a Severi-Brauer P^2 torsor
        assert!(TwistPoint::new(
            Geometry::SeveriBrauer { n: 3 },
            TorsorDatum::Brauer(c),
            BrauerClass::zero(k)
        )
        .is_ok());
        // rank mismatch
        let p = QuadraticForm::from_ints(rationals(), &[1, 1, 1]).unwrap();
        assert!(TwistPoint::new(
            Geometry::QuadricOdd { n: 2 },
            TorsorDatum::Form(p),
            BrauerClass::zero(rationals())
        )
        .is_err());
    }

    #[test]
    fn twist_point_json_roundtrip() {
        let t = mod_c(BrauerClass::zero(reals()));
        let s = serde_json::to_string(&t).unwrap();
        let back: TwistPoint = serde_json::from_str(&s).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn enumerate_quadric_surface_over_reals() {
        // rank-4 forms over R up to similarity: (4,0), (3,1), (2,2)
        let pts = enumerate_twists(&Geometry::QuadricEven { n: 2 }, &reals(), None).unwrap();
        let torsors: std::collections::BTreeSet<usize> = pts.iter().map(|(_, o)| *o).collect();
        assert_eq!(torsors.len(), 3);
    }
}
