//! Čech cochains with constant coefficients in F_p, indexed by the simplices of
//! a nerve.
//!
//! A q-cochain assigns one field value to every q-simplex. Bases are always
//! the q-simplices in lexicographic order, so matrices built here can be
//! compared entry-for-entry across calls.

use thiserror::Error;

use crate::complex::{map_simplex, ComplexError, Simplex, SimplicialComplex, VertexMap};
use crate::linalg::{FMatrix, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CechError {
    #[error("complex is not a subcomplex: {0} is missing")]
    NotSubcomplex(Simplex),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("vector of length {actual} is not a cochain of dimension {expected}")]
    WrongLength { expected: usize, actual: usize },
    #[error("cochain is not a cocycle")]
    NotACocycle,
}

/// C^q(K): the span of the q-simplices of a complex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CochainSpace {
    degree: usize,
    basis: Vec<Simplex>,
}

impl CochainSpace {
    pub fn new(complex: &SimplicialComplex, degree: usize) -> Self {
        CochainSpace { degree, basis: complex.simplices(degree).cloned().collect() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Simplex] {
        &self.basis
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.basis.binary_search(s).ok()
    }
}

/// A single cochain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    pub space: CochainSpace,
    pub field: PrimeField,
    pub values: Vec<u32>,
}

impl Cochain {
    pub fn zero(space: CochainSpace, field: PrimeField) -> Self {
        let values = vec![0; space.dim()];
        Cochain { space, field, values }
    }

    pub fn from_values(space: CochainSpace, field: PrimeField, values: Vec<u32>) -> Result<Self, CechError> {
        if values.len() != space.dim() {
            return Err(CechError::WrongLength { expected: space.dim(), actual: values.len() });
        }
        let values = values.into_iter().map(|v| v % field.modulus()).collect();
        Ok(Cochain { space, field, values })
    }

    pub fn value(&self, s: &Simplex) -> Option<u32> {
        self.space.index_of(s).map(|i| self.values[i])
    }
}

/// One degree of a chain map (or a differential): a matrix between two cochain
/// spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMapLevel {
    pub source: CochainSpace,
    pub target: CochainSpace,
    pub matrix: FMatrix,
}

impl ChainMapLevel {
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        self.matrix.apply(v)
    }
}

/// The coboundary δ: C^q(K) → C^{q+1}(K), `(δf)(σ) = Σ_i (-1)^i f(σ with vertex i removed)`.
pub fn cech_differential(k: &SimplicialComplex, q: usize, field: PrimeField) -> ChainMapLevel {
    let source = CochainSpace::new(k, q);
    let target = CochainSpace::new(k, q + 1);
    let mut m = FMatrix::zeros(field, target.dim(), source.dim());
    for (r, sigma) in target.basis().iter().enumerate() {
        for i in 0..=sigma.dim() {
            let face = sigma.face(i).expect("q+1 >= 1");
            let c = source.index_of(&face).expect("complex is closed under faces");
            m.add_to(r, c, field.sign(i));
        }
    }
    ChainMapLevel { source, target, matrix: m }
}

/// Representatives and coordinates for H^q(K) = Z^q / B^q.
#[derive(Debug, Clone)]
pub struct Cohomology {
    pub degree: usize,
    pub field: PrimeField,
    pub space: CochainSpace,
    /// Basis of the cocycles Z^q.
    pub cocycles: Vec<Vec<u32>>,
    /// Basis of the coboundaries B^q.
    pub coboundaries: Vec<Vec<u32>>,
    /// Cocycles whose classes form a basis of H^q; `len() == dim()`.
    pub representatives: Vec<Vec<u32>>,
    delta: FMatrix,
    // columns: representatives then coboundaries
    coordinates: FMatrix,
}

impl Cohomology {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_cocycle(&self, v: &[u32]) -> bool {
        v.len() == self.space.dim() && self.delta.apply(v).iter().all(|&x| x == 0)
    }

    /// Coordinates of the class of a cocycle in the representative basis.
    pub fn class_of(&self, z: &[u32]) -> Result<Vec<u32>, CechError> {
        if z.len() != self.space.dim() {
            return Err(CechError::WrongLength { expected: self.space.dim(), actual: z.len() });
        }
        if !self.is_cocycle(z) {
            return Err(CechError::NotACocycle);
        }
        let x = self
            .coordinates
            .solve(z)
            .expect("length checked")
            .expect("representatives and coboundaries span the cocycles");
        Ok(x[..self.dim()].to_vec())
    }

    /// Cocycle representing the class with the given coordinates.
    pub fn cocycle_for(&self, coords: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut out = vec![0; self.space.dim()];
        for (c, rep) in coords.iter().zip(&self.representatives) {
            for (o, &r) in out.iter_mut().zip(rep) {
                *o = f.add(*o, f.mul(*c, r));
            }
        }
        out
    }

    pub fn is_coboundary(&self, z: &[u32]) -> Result<bool, CechError> {
        Ok(self.class_of(z)?.iter().all(|&c| c == 0))
    }
}

/// H^q(K) with explicit bases. `dim = nullity(δ^q) - rank(δ^{q-1})`.
pub fn cohomology(k: &SimplicialComplex, q: usize, field: PrimeField) -> Cohomology {
    let space = CochainSpace::new(k, q);
    let delta = cech_differential(k, q, field).matrix;
    let cocycles = delta.kernel_basis();
    let coboundaries = if q == 0 { Vec::new() } else { cech_differential(k, q - 1, field).matrix.column_space_basis() };
    let n = space.dim();
    let mut acc = FMatrix::from_columns(field, n, &coboundaries);
    let mut rank = acc.rank();
    let mut representatives = Vec::new();
    for z in &cocycles {
        let next = acc.hstack(&FMatrix::from_columns(field, n, std::slice::from_ref(z)));
        let r = next.rank();
        if r > rank {
            representatives.push(z.clone());
            acc = next;
            rank = r;
        }
    }
    let mut cols = representatives.clone();
    cols.extend(coboundaries.iter().cloned());
    let coordinates = FMatrix::from_columns(field, n, &cols);
    Cohomology { degree: q, field, space, cocycles, coboundaries, representatives, delta, coordinates }
}

/// Cohomology dimensions for degrees `0..=q_max`.
pub fn cohomology_dims(k: &SimplicialComplex, q_max: usize, field: PrimeField) -> Vec<usize> {
    (0..=q_max).map(|q| cohomology(k, q, field).dim()).collect()
}

/// The restriction C^q(K) → C^q(L) for a subcomplex L ⊆ K.
pub fn restriction_map(
    k: &SimplicialComplex,
    l: &SimplicialComplex,
    q: usize,
    field: PrimeField,
) -> Result<ChainMapLevel, CechError> {
    if let Some(s) = l.all_simplices().find(|s| !k.contains(s)) {
        return Err(CechError::NotSubcomplex(s.clone()));
    }
    let source = CochainSpace::new(k, q);
    let target = CochainSpace::new(l, q);
    let mut m = FMatrix::zeros(field, target.dim(), source.dim());
    for (r, s) in target.basis().iter().enumerate() {
        let c = source.index_of(s).expect("checked subcomplex");
        m.set(r, c, 1);
    }
    Ok(ChainMapLevel { source, target, matrix: m })
}

/// Restricts a cochain on K to the subcomplex L.
pub fn restrict_cochain(f: &Cochain, l: &SimplicialComplex) -> Result<Cochain, CechError> {
    let target = CochainSpace::new(l, f.space.degree());
    let mut values = Vec::with_capacity(target.dim());
    for s in target.basis() {
        let v = f.value(s).ok_or_else(|| CechError::NotSubcomplex(s.clone()))?;
        values.push(v);
    }
    Ok(Cochain { space: target, field: f.field, values })
}

/// Extends a cochain on L ⊆ K to K by zero on every simplex outside L.
pub fn extend_by_zero(f: &Cochain, k: &SimplicialComplex) -> Result<Cochain, CechError> {
    if let Some(s) = f.space.basis().iter().find(|s| !k.contains(s)) {
        return Err(CechError::NotSubcomplex(s.clone()));
    }
    let space = CochainSpace::new(k, f.space.degree());
    let values = space.basis().iter().map(|s| f.value(s).unwrap_or(0)).collect();
    Ok(Cochain { space, field: f.field, values })
}

/// Pullback g*: C^q(K) → C^q(L) along a simplicial vertex map g: L → K.
///
/// Alternating convention: a simplex whose image repeats a vertex pulls back to
/// 0, and an order-reversing image picks up the sign of the sorting permutation.
pub fn pullback_map(
    g: &VertexMap,
    domain: &SimplicialComplex,
    codomain: &SimplicialComplex,
    q: usize,
    field: PrimeField,
) -> Result<ChainMapLevel, CechError> {
    domain.check_simplicial(g, codomain)?;
    let source = CochainSpace::new(codomain, q);
    let target = CochainSpace::new(domain, q);
    let mut m = FMatrix::zeros(field, target.dim(), source.dim());
    for (r, s) in target.basis().iter().enumerate() {
        let img = map_simplex(g, s)?;
        if img.degenerate {
            continue;
        }
        let c = source.index_of(&img.simplex).expect("simplicial checked");
        m.set(r, c, field.sign(img.odd as usize));
    }
    Ok(ChainMapLevel { source, target, matrix: m })
}

/// Matrix of the map induced on cohomology by a chain map level, in the
/// representative bases of `source` and `target`.
pub fn induced_on_cohomology(map: &FMatrix, source: &Cohomology, target: &Cohomology) -> Result<FMatrix, CechError> {
    let cols = source.representatives.iter().map(|z| target.class_of(&map.apply(z))).collect::<Result<Vec<_>, _>>()?;
    Ok(FMatrix::from_columns(source.field, target.dim(), &cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Label;

    const F2: PrimeField = PrimeField::F2;

    fn cx(gens: &[&[&str]]) -> SimplicialComplex {
        SimplicialComplex::build(gens.iter().map(|g| g.iter().copied())).unwrap()
    }

    fn s(v: &[&str]) -> Simplex {
        Simplex::from_unsorted(v.iter().copied()).unwrap()
    }

    fn four_cycle() -> SimplicialComplex {
        cx(&[&["l", "o1"], &["o1", "r"], &["l", "o2"], &["o2", "r"]])
    }

    #[test]
    fn edge_differential_is_difference_of_endpoints() {
        let f7 = PrimeField::new(7).unwrap();
        let k = cx(&[&["a", "b"]]);
        let d = cech_differential(&k, 0, f7);
        // f(a) = 2, f(b) = 5  →  δf(ab) = f(b) - f(a) = 3
        assert_eq!(d.apply(&[2, 5]), vec![3]);
    }

    #[test]
    fn delta_squared_vanishes_on_triangle() {
        let f5 = PrimeField::new(5).unwrap();
        let k = cx(&[&["a", "b", "c"]]);
        let d0 = cech_differential(&k, 0, f5).matrix;
        let d1 = cech_differential(&k, 1, f5).matrix;
        assert!(d1.mul(&d0).is_zero());
    }

    #[test]
    fn four_cycle_incidence_rank() {
        let d = cech_differential(&four_cycle(), 0, F2);
        assert_eq!((d.matrix.rows(), d.matrix.cols()), (4, 4));
        assert_eq!(d.matrix.rank(), 3);
    }

    #[test]
    fn cohomology_examples() {
        assert_eq!(cohomology(&cx(&[&["p"]]), 0, F2).dim(), 1);
        let c = four_cycle();
        assert_eq!(cohomology(&c, 0, F2).dim(), 1);
        assert_eq!(cohomology(&c, 1, F2).dim(), 1);
        let theta = cx(&[&["a", "b"], &["a", "c1"], &["b", "c1"], &["a", "c2"], &["b", "c2"]]);
        assert_eq!(theta.count(1) - theta.count(0) + 1, 2);
        assert_eq!(cohomology(&theta, 1, F2).dim(), 2);
    }

    #[test]
    fn class_coordinates_detect_coboundaries() {
        let c = four_cycle();
        let h1 = cohomology(&c, 1, F2);
        // edges: l-o1, l-o2, o1-r, o2-r ; a single odd edge is the generator
        let g = vec![0, 0, 0, 1];
        assert_eq!(h1.class_of(&g).unwrap(), vec![1]);
        let d0 = cech_differential(&c, 0, F2).matrix;
        let b = d0.apply(&[1, 0, 1, 0]);
        assert!(h1.is_coboundary(&b).unwrap());
    }

    #[test]
    fn restriction_and_extension() {
        let k = four_cycle();
        let n1 = cx(&[&["l", "o1"], &["o1", "r"]]);
        let space = CochainSpace::new(&k, 1);
        let f = Cochain::from_values(space, F2, vec![1, 0, 1, 1]).unwrap();
        assert_eq!(restrict_cochain(&f, &k).unwrap(), f);
        assert_eq!(restrict_cochain(&f, &SimplicialComplex::empty()).unwrap().values.len(), 0);
        let r = restrict_cochain(&f, &n1).unwrap();
        assert_eq!(r.space.basis(), &[s(&["l", "o1"]), s(&["o1", "r"])]);
        assert_eq!(r.values, vec![1, 1]);

        // H⁰(N12) generator (l:1, r:0) extended to the 4-cycle
        let n12 = cx(&[&["l"], &["r"]]);
        let g = Cochain::from_values(CochainSpace::new(&n12, 0), F2, vec![1, 0]).unwrap();
        let e = extend_by_zero(&g, &k).unwrap();
        assert_eq!(e.values, vec![1, 0, 0, 0]); // l, o1, o2, r
        assert_eq!(restrict_cochain(&e, &n12).unwrap(), g);
        assert_eq!(extend_by_zero(&f, &k).unwrap(), f);
        let z = Cochain::zero(CochainSpace::new(&n1, 1), F2);
        assert!(extend_by_zero(&z, &k).unwrap().values.iter().all(|&v| v == 0));
        assert!(matches!(extend_by_zero(&f, &n1), Err(CechError::NotSubcomplex(_))));
    }

    #[test]
    fn pullback_identity_and_degenerate() {
        let k = cx(&[&["a", "b"], &["b", "c"]]);
        let id: VertexMap = k.vertex_set().into_iter().map(|l| (l.clone(), l)).collect();
        for q in 0..2 {
            let p = pullback_map(&id, &k, &k, q, F2).unwrap();
            assert_eq!(p.matrix, FMatrix::identity(F2, k.count(q)));
        }
        let collapse: VertexMap =
            [("a", "a"), ("b", "a"), ("c", "c")].into_iter().map(|(x, y)| (Label::from(x), Label::from(y))).collect();
        let target = cx(&[&["a", "c"]]);
        let p = pullback_map(&collapse, &k, &target, 1, F2).unwrap();
        // ab collapses to a vertex → its row is zero; bc ↦ ac
        assert_eq!(p.matrix.row(0), &[0]);
        assert_eq!(p.matrix.row(1), &[1]);
    }

    #[test]
    fn pullback_sign_on_order_reversal() {
        let f3 = PrimeField::F3;
        let dom = cx(&[&["a", "b"]]);
        let cod = cx(&[&["x", "y"]]);
        let flip: VertexMap =
            [("a", "y"), ("b", "x")].into_iter().map(|(x, y)| (Label::from(x), Label::from(y))).collect();
        let p1 = pullback_map(&flip, &dom, &cod, 1, f3).unwrap();
        assert_eq!(p1.matrix.get(0, 0), 2);
        let p0 = pullback_map(&flip, &dom, &cod, 0, f3).unwrap();
        let d_dom = cech_differential(&dom, 0, f3).matrix;
        let d_cod = cech_differential(&cod, 0, f3).matrix;
        assert_eq!(d_dom.mul(&p0.matrix), p1.matrix.mul(&d_cod));
    }

    #[test]
    fn pullback_rejects_non_simplicial() {
        let dom = cx(&[&["a", "b"]]);
        let cod = cx(&[&["x"], &["y"]]);
        let m: VertexMap =
            [("a", "x"), ("b", "y")].into_iter().map(|(x, y)| (Label::from(x), Label::from(y))).collect();
        assert!(matches!(
            pullback_map(&m, &dom, &cod, 0, F2),
            Err(CechError::Complex(ComplexError::NotSimplicial { .. }))
        ));
    }
}
