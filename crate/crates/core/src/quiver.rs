//! Path algebras and modulated quivers (species): Cartan matrices, Euler
//! forms on K₀, unimodular-congruence obstructions to derived equivalence,
//! exceptional-collection Euler forms for projective space, and the
//! reduced-norm/K₁-torsion distinguisher.
//!
//! Species are recorded by dimension data only: a vertex carries the
//! dimension of its division algebra over the base field, an arrow the
//! dimension of its bimodule. Every computation here lives on K₀.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfield::Rat;

/// A finite quiver with ordered vertices; must be acyclic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertex_count: usize,
    arrows: Vec<(usize, usize)>,
}

impl Quiver {
    pub fn new(vertex_count: usize, arrows: Vec<(usize, usize)>) -> Result<Self> {
        for &(s, t) in &arrows {
            if s >= vertex_count || t >= vertex_count {
                return Err(Error::BadQuiver(format!("arrow ({s},{t}) out of range")));
            }
        }
        let q = Quiver {
            vertex_count,
            arrows,
        };
        if topological_order(q.vertex_count, &q.arrows).is_none() {
            return Err(Error::BadQuiver("quiver has a directed cycle".into()));
        }
        Ok(q)
    }

    /// The quiver with two vertices a, b and n parallel arrows a -> b.
    pub fn omega(n: usize) -> Self {
        Quiver {
            vertex_count: 2,
            arrows: vec![(0, 1); n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }
}

fn topological_order(n: usize, arrows: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    for &(_, t) in arrows {
        indeg[t] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    stack.reverse(); // take smaller indices first
    let mut order = Vec::with_capacity(n);
    let mut indeg = indeg;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &(s, t) in arrows {
            if s == v {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    stack.push(t);
                }
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// A modulated quiver: vertices labeled by division-algebra dimensions over
/// the base field, arrows by bimodule dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpeciesWire", into = "SpeciesWire")]
pub struct Species {
    vertex_dims: Vec<u64>,
    arrows: Vec<(usize, usize, u64)>,
}

#[derive(Serialize, Deserialize)]
struct SpeciesWire {
    vertices: Vec<SpeciesVertexWire>,
    arrows: Vec<SpeciesArrowWire>,
}

#[derive(Serialize, Deserialize)]
struct SpeciesVertexWire {
    label_dim: u64,
}

#[derive(Serialize, Deserialize)]
struct SpeciesArrowWire {
    src: usize,
    dst: usize,
    dim: u64,
}

impl From<Species> for SpeciesWire {
    fn from(s: Species) -> Self {
        SpeciesWire {
            vertices: s
                .vertex_dims
                .iter()
                .map(|&d| SpeciesVertexWire { label_dim: d })
                .collect(),
            arrows: s
                .arrows
                .iter()
                .map(|&(src, dst, dim)| SpeciesArrowWire { src, dst, dim })
                .collect(),
        }
    }
}

impl TryFrom<SpeciesWire> for Species {
    type Error = Error;
    fn try_from(w: SpeciesWire) -> Result<Self> {
        Species::new(
            w.vertices.iter().map(|v| v.label_dim).collect(),
            w.arrows.iter().map(|a| (a.src, a.dst, a.dim)).collect(),
        )
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Species {
    pub fn new(vertex_dims: Vec<u64>, arrows: Vec<(usize, usize, u64)>) -> Result<Self> {
        let n = vertex_dims.len();
        if vertex_dims.iter().any(|&d| d == 0) {
            return Err(Error::BadQuiver("vertex dimensions must be >= 1".into()));
        }
        for &(s, t, m) in &arrows {
            if s >= n || t >= n {
                return Err(Error::BadQuiver(format!("arrow ({s},{t}) out of range")));
            }
            if m == 0 {
                return Err(Error::BadQuiver("bimodule dimension must be >= 1".into()));
            }
            if m % gcd(vertex_dims[s], vertex_dims[t]) != 0 {
                return Err(Error::BadQuiver(format!(
                    "bimodule dimension {m} on ({s},{t}) not divisible by gcd({}, {})",
                    vertex_dims[s], vertex_dims[t]
                )));
            }
        }
        if topological_order(n, &arrows.iter().map(|&(s, t, _)| (s, t)).collect::<Vec<_>>())
            .is_none()
        {
            return Err(Error::BadQuiver("species has a directed cycle".into()));
        }
        Ok(Species {
            vertex_dims,
            arrows,
        })
    }

    /// Plain path algebra kQ: trivial labels everywhere.
    pub fn from_quiver(q: &Quiver) -> Self {
        Species {
            vertex_dims: vec![1; q.vertex_count()],
            arrows: q.arrows().iter().map(|&(s, t)| (s, t, 1)).collect(),
        }
    }

    /// kΩ_n.
    pub fn omega(n: usize) -> Self {
        Self::from_quiver(&Quiver::omega(n))
    }

    /// The species R:• ⇉ •:H of the real conic: labels 1 and 4, single
    /// 4-dimensional bimodule (the regular H-side bimodule).
    pub fn real_conic() -> Self {
        Species {
            vertex_dims: vec![1, 4],
            arrows: vec![(0, 1, 4)],
        }
    }

    pub fn vertex_dims(&self) -> &[u64] {
        &self.vertex_dims
    }

    /// Cartan matrix: C[i][j] = dim_k e_i A e_j, the base-field dimension of
    /// the (i,j) path space weighted by bimodule dimensions, C[i][i] = d_i.
    /// A path through an intermediate vertex v contributes a tensor product
    /// over the division algebra at v, hence a division by d_v.
    pub fn cartan_matrix(&self) -> Result<Vec<Vec<i64>>> {
        let n = self.vertex_dims.len();
        let order = topological_order(
            n,
            &self.arrows.iter().map(|&(s, t, _)| (s, t)).collect::<Vec<_>>(),
        )
        .expect("validated acyclic");
        let mut c = vec![vec![0i64; n]; n];
        // process in reverse topological order so successors are done first
        for &i in order.iter().rev() {
            c[i][i] = self.vertex_dims[i] as i64;
            for &(s, v, m) in &self.arrows {
                if s != i {
                    continue;
                }
                let dv = self.vertex_dims[v] as i64;
                for j in 0..n {
                    if c[v][j] == 0 {
                        continue;
                    }
                    let prod = m as i64 * c[v][j];
                    if prod % dv != 0 {
                        return Err(Error::BadQuiver(format!(
                            "non-integral path dimension through vertex {v}"
                        )));
                    }
                    c[i][j] += prod / dv;
                }
            }
        }
        Ok(c)
    }
}

/// The Euler pairing on K₀ in a fixed basis (vertex projectives for species,
/// the exceptional collection O, O(1), ..., O(n) for projective space).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerForm {
    pub matrix: Vec<Vec<i64>>,
}

impl EulerForm {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let r = matrix.len();
        if r == 0 || matrix.iter().any(|row| row.len() != r) {
            return Err(Error::Invalid("Euler form matrix must be square".into()));
        }
        Ok(EulerForm { matrix })
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn det(&self) -> i64 {
        det_i64(&self.matrix)
    }
}

fn det_i64(m: &[Vec<i64>]) -> i64 {
    // exact rational elimination, result is an integer
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .map(|row| row.iter().map(|&x| Rat::from_integer(x.into())).collect())
        .collect();
    let mut det = Rat::from_integer(1.into());
    for i in 0..n {
        let Some(p) = (i..n).find(|&r| !a[r][i].is_zero()) else {
            return 0;
        };
        if p != i {
            a.swap(i, p);
            det = -det;
        }
        det *= a[i][i].clone();
        for r in (i + 1)..n {
            let f = &a[r][i] / &a[i][i];
            for c in i..n {
                let v = &a[r][c] - &f * &a[i][c];
                a[r][c] = v;
            }
        }
    }
    let d: BigRational = det;
    debug_assert!(d.is_integer());
    i64::try_from(d.to_integer()).expect("determinant fits i64")
}

/// Euler form of a hereditary species in the projective basis: equals the
/// Cartan matrix (no higher Ext between projectives).
pub fn euler_form(s: &Species) -> Result<EulerForm> {
    EulerForm::new(s.cartan_matrix()?)
}

fn binomial(n: u64, k: u64) -> i64 {
    if k > n {
        return 0;
    }
    let mut r: i64 = 1;
    for i in 0..k.min(n - k) {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

/// Euler pairing of the exceptional collection O, O(1), ..., O(n) on P^n:
/// E[i][j] = binom(j - i + n, n) for j >= i, else 0.
pub fn euler_form_projective_space(n: u32) -> EulerForm {
    let r = (n + 1) as usize;
    let mut m = vec![vec![0i64; r]; r];
    for i in 0..r {
        for j in i..r {
            m[i][j] = binomial((j - i) as u64 + n as u64, n as u64);
        }
    }
    EulerForm { matrix: m }
}

/// Outcome of the bounded unimodular-congruence search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CongruenceOutcome {
    /// P with det ±1 and P^T e1 P = e2.
    Congruent { transform: Vec<Vec<i64>> },
    /// No P exists at any radius; carries the invariant that certifies it.
    CertifiedAbsent { certificate: String },
    /// Nothing found within the radius; absence is not certified.
    UnknownBeyondRadius { radius: i64 },
}

/// Searches for an integer P with |entries| <= bound, det P = ±1 and
/// P^T e1 P = e2. |det| mismatch short-circuits to certified absence, since
/// |det| is a unimodular-congruence invariant.
pub fn congruent_unimodular(e1: &EulerForm, e2: &EulerForm, bound: i64) -> Result<CongruenceOutcome> {
    if e1.rank() != e2.rank() {
        return Err(Error::BadRank(format!(
            "congruence needs equal ranks, got {} and {}",
            e1.rank(),
            e2.rank()
        )));
    }
    if bound < 1 {
        return Err(Error::Invalid("search radius must be >= 1".into()));
    }
    let d1 = e1.det().abs();
    let d2 = e2.det().abs();
    if d1 != d2 {
        return Ok(CongruenceOutcome::CertifiedAbsent {
            certificate: format!("|det| differs: {d1} vs {d2}"),
        });
    }
    let n = e1.rank();
    // backtracking over columns of P; partial congruence constraints prune
    let mut cols: Vec<Vec<i64>> = Vec::new();
    if search_columns(&e1.matrix, &e2.matrix, n, bound, &mut cols) {
        // cols holds columns of P
        let mut p = vec![vec![0i64; n]; n];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                p[i][j] = col[i];
            }
        }
        return Ok(CongruenceOutcome::Congruent { transform: p });
    }
    Ok(CongruenceOutcome::UnknownBeyondRadius { radius: bound })
}

fn bilinear(e: &[Vec<i64>], x: &[i64], y: &[i64]) -> i64 {
    let n = x.len();
    let mut s = 0i64;
    for i in 0..n {
        if x[i] == 0 {
            continue;
        }
        for j in 0..n {
            s += x[i] * e[i][j] * y[j];
        }
    }
    s
}

fn search_columns(
    e1: &[Vec<i64>],
    e2: &[Vec<i64>],
    n: usize,
    bound: i64,
    cols: &mut Vec<Vec<i64>>,
) -> bool {
    let j = cols.len();
    if j == n {
        let mut p = vec![vec![0i64; n]; n];
        for (jj, col) in cols.iter().enumerate() {
            for i in 0..n {
                p[i][jj] = col[i];
            }
        }
        return det_i64(&p).abs() == 1;
    }
    let mut col = vec![-bound; n];
    loop {
        // congruence constraints involving column j and earlier columns
        let ok = bilinear(e1, &col, &col) == e2[j][j]
            && (0..j).all(|i| {
                bilinear(e1, &cols[i], &col) == e2[i][j] && bilinear(e1, &col, &cols[i]) == e2[j][i]
            });
        if ok {
            cols.push(col.clone());
            if search_columns(e1, e2, n, bound, cols) {
                return true;
            }
            cols.pop();
        }
        // increment odometer
        let mut k = 0;
        loop {
            if k == n {
                return false;
            }
            col[k] += 1;
            if col[k] <= bound {
                break;
            }
            col[k] = -bound;
            k += 1;
        }
    }
}

/// Reduced norm of a quaternion x = a + bi + cj + dk over ℝ: a²+b²+c²+d².
pub fn reduced_norm(x: &[Rat; 4]) -> Rat {
    x.iter().map(|c| c * c).fold(Rat::zero(), |acc, v| acc + v)
}

/// Whether v lies in the image of the reduced norm on units.
/// split = true: M₂(ℝ), Nrd = det, surjective onto ℝ^×.
/// split = false: ℍ, Nrd = sum of four squares, image ℝ_{>0}.
pub fn reduced_norm_image_contains(v: &Rat, split: bool) -> Result<bool> {
    if v.is_zero() {
        return Err(Error::ZeroInput("reduced norm membership"));
    }
    Ok(split || v.is_positive())
}

/// Torsion order of the degree-1 K-group factor detected through the
/// reduced norm: 2 when -1 is a reduced norm (the R side, K₁ = ℝ^× with
/// torsion {±1}), 1 otherwise (the H side, Nrd lands in ℝ_{>0}).
pub fn k1_torsion_order(split: bool) -> u32 {
    if reduced_norm_image_contains(&Rat::from_integer((-1).into()), split).expect("nonzero") {
        2
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::rat;

    #[test]
    fn cartan_examples() {
        assert_eq!(
            Species::omega(3).cartan_matrix().unwrap(),
            vec![vec![1, 3], vec![0, 1]]
        );
        let h_point = Species::new(vec![4], vec![]).unwrap();
        assert_eq!(h_point.cartan_matrix().unwrap(), vec![vec![4]]);
        assert_eq!(
            Species::real_conic().cartan_matrix().unwrap(),
            vec![vec![1, 4], vec![0, 4]]
        );
    }

    #[test]
    fn cartan_weighted_paths_through_middle() {
        // 1 --(2)--> 2 --(2)--> 1 : path dim = 2*2/2 = 2
        let s = Species::new(vec![1, 2, 1], vec![(0, 1, 2), (1, 2, 2)]).unwrap();
        let c = s.cartan_matrix().unwrap();
        assert_eq!(c[0][2], 2);
        assert_eq!(c, vec![vec![1, 2, 2], vec![0, 2, 2], vec![0, 0, 1]]);
    }

    #[test]
    fn cyclic_rejected() {
        assert!(Quiver::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Species::new(vec![1, 1], vec![(0, 1, 1), (1, 0, 1)]).is_err());
        // self-loop
        assert!(Quiver::new(1, vec![(0, 0)]).is_err());
    }

    #[test]
    fn species_validation() {
        assert!(Species::new(vec![1, 0], vec![]).is_err());
        assert!(Species::new(vec![2, 4], vec![(0, 1, 3)]).is_err()); // 3 not divisible by gcd(2,4)
        assert!(Species::new(vec![1, 4], vec![(0, 1, 4)]).is_ok());
    }

    #[test]
    fn euler_form_examples() {
        assert_eq!(
            euler_form(&Species::omega(2)).unwrap().matrix,
            vec![vec![1, 2], vec![0, 1]]
        );
        let two_points = Species::new(vec![1, 1], vec![]).unwrap();
        assert_eq!(
            euler_form(&two_points).unwrap().matrix,
            vec![vec![1, 0], vec![0, 1]]
        );
        assert_eq!(
            euler_form(&Species::real_conic()).unwrap().matrix,
            vec![vec![1, 4], vec![0, 4]]
        );
    }

    #[test]
    fn projective_space_euler_forms() {
        assert_eq!(
            euler_form_projective_space(1).matrix,
            vec![vec![1, 2], vec![0, 1]]
        );
        assert_eq!(
            euler_form_projective_space(2).matrix,
            vec![vec![1, 3, 6], vec![0, 1, 3], vec![0, 0, 1]]
        );
        for n in 1..6 {
            let e = euler_form_projective_space(n);
            for i in 0..e.rank() {
                assert_eq!(e.matrix[i][i], 1);
            }
        }
    }

    #[test]
    fn cartan_determinant_is_product_of_labels() {
        for s in [Species::omega(4), Species::real_conic(),
                  Species::new(vec![2, 1, 4], vec![(0, 1, 2), (1, 2, 4), (0, 2, 4)]).unwrap()] {
            let det = euler_form(&s).unwrap().det();
            let expected: i64 = s.vertex_dims().iter().product::<u64>() as i64;
            assert_eq!(det, expected);
        }
    }

    #[test]
    fn congruence_examples() {
        let e = euler_form(&Species::omega(2)).unwrap();
        let p1 = euler_form_projective_space(1);
        // equal matrices: identity works
        match congruent_unimodular(&e, &p1, 1).unwrap() {
            CongruenceOutcome::Congruent { transform } => {
                assert_eq!(det_i64(&transform).abs(), 1);
            }
            other => panic!("expected congruence, got {other:?}"),
        }
        // det 1 vs det 4: certified absent
        let conic = euler_form(&Species::real_conic()).unwrap();
        match congruent_unimodular(&e, &conic, 3).unwrap() {
            CongruenceOutcome::CertifiedAbsent { certificate } => {
                assert!(certificate.contains("1 vs 4"));
            }
            other => panic!("expected certified absence, got {other:?}"),
        }
        // rank mismatch
        let one = EulerForm::new(vec![vec![1]]).unwrap();
        assert!(congruent_unimodular(&e, &one, 1).is_err());
    }

    #[test]
    fn congruence_symmetry_of_success() {
        let e1 = EulerForm::new(vec![vec![1, 2], vec![0, 1]]).unwrap();
        // congruent partner: P^T e1 P with P = [[1,1],[0,1]]
        let e2 = EulerForm::new(vec![vec![1, 3], vec![1, 4]]).unwrap();
        assert_eq!(det_i64(&e2.matrix).abs(), 1);
        let fwd = congruent_unimodular(&e1, &e2, 2).unwrap();
        let bwd = congruent_unimodular(&e2, &e1, 2).unwrap();
        assert!(matches!(fwd, CongruenceOutcome::Congruent { .. }));
        assert!(matches!(bwd, CongruenceOutcome::Congruent { .. }));
    }

    #[test]
    fn reduced_norm_examples() {
        assert_eq!(reduced_norm(&[rat(1), rat(0), rat(0), rat(0)]), rat(1));
        assert_eq!(reduced_norm(&[rat(0), rat(1), rat(0), rat(0)]), rat(1));
        assert_eq!(reduced_norm(&[rat(1), rat(1), rat(1), rat(1)]), rat(4));
    }

    #[test]
    fn reduced_norm_image() {
        assert!(!reduced_norm_image_contains(&rat(-1), false).unwrap());
        assert!(reduced_norm_image_contains(&rat(-1), true).unwrap());
        assert!(reduced_norm_image_contains(&rat(4), false).unwrap());
        assert!(reduced_norm_image_contains(&rat(0), false).is_err());
        assert_eq!(k1_torsion_order(true), 2);
        assert_eq!(k1_torsion_order(false), 1);
    }
}
