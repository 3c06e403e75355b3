//! The generalized Mayer-Vietoris machinery on a glued diagram.
//!
//! Level `p ≥ 1` is the direct sum of `C^q(N_T)` over index sets `|T| = p` in
//! lexicographic order; level 0 is `C^q(N)` of the union nerve. The map out of
//! level 0 is Φ* (restriction to every piece). The map out of level `p ≥ 1` is
//! the difference map
//!
//! `(δ̃f)_{T'} = Σ_k (-1)^{k+1} f_{T' ∖ t_k}|_{N_{T'}}`, with `k` 0-based,
//!
//! which for two pieces is `(f¹, f²) ↦ f¹|₁₂ − f²|₁₂`.
//!
//! Every exactness claim is checked by rank arithmetic.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::cech::{cech_differential, cohomology, restriction_map, CochainSpace, Cohomology};
use crate::complex::SimplicialComplex;
use crate::diagram::{subsets_of_size, DiagramError, GluedDiagram};
use crate::linalg::{FMatrix, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MvError {
    #[error("operation needs exactly two pieces, diagram has {0}")]
    NotBinary(usize),
    #[error("level {level} has no outgoing difference map for {n} pieces")]
    BadLevel { level: usize, n: usize },
    #[error("operation needs the field F_2, got {0}")]
    WrongField(PrimeField),
    #[error("family is incompatible on the overlap of pieces {first} and {second}")]
    IncompatibleFamily { first: String, second: String },
    #[error("family member {index} has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    BadFamily { index: usize, rows: usize, cols: usize, expected_rows: usize, expected_cols: usize },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// All intersection nerves `N_T` of a diagram, computed once. Level 0 holds the
/// union nerve under the empty index set.
#[derive(Debug, Clone)]
pub struct IntersectionLattice {
    field: PrimeField,
    n: usize,
    ids: Vec<String>,
    levels: Vec<Vec<(Vec<usize>, SimplicialComplex)>>,
    position: BTreeMap<Vec<usize>, usize>,
}

impl IntersectionLattice {
    pub fn new(d: &GluedDiagram) -> Self {
        let n = d.n();
        let mut levels = vec![vec![(Vec::new(), d.union().clone())]];
        let mut position = BTreeMap::new();
        position.insert(Vec::new(), 0);
        let mut known: BTreeMap<Vec<usize>, SimplicialComplex> = BTreeMap::new();
        for p in 1..=n {
            let mut level = Vec::new();
            for t in subsets_of_size(n, p) {
                let k = if p == 1 { d.nerve(t[0]).clone() } else { known[&t[..p - 1]].intersect(d.nerve(t[p - 1])) };
                position.insert(t.clone(), level.len());
                known.insert(t.clone(), k.clone());
                level.push((t, k));
            }
            levels.push(level);
        }
        IntersectionLattice { field: d.field(), n, ids: d.piece_ids(), levels, position }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// `(T, N_T)` for every `|T| = p`, lexicographic in `T`.
    pub fn level(&self, p: usize) -> &[(Vec<usize>, SimplicialComplex)] {
        &self.levels[p]
    }

    pub fn nerve(&self, t: &[usize]) -> &SimplicialComplex {
        &self.levels[t.len()][self.position[t]].1
    }

    pub fn ids_of(&self, t: &[usize]) -> Vec<String> {
        t.iter().map(|&i| self.ids[i].clone()).collect()
    }

    pub fn tuple_space(&self, p: usize, q: usize) -> TupleCochainSpace {
        TupleCochainSpace {
            level: p,
            degree: q,
            components: self.levels[p].iter().map(|(t, k)| (t.clone(), CochainSpace::new(k, q))).collect(),
        }
    }

    fn cohomologies(&self, p: usize, q: usize) -> Vec<Cohomology> {
        self.levels[p].iter().map(|(_, k)| cohomology(k, q, self.field)).collect()
    }

    /// The map out of level `p` in degree `q`: Φ* for `p = 0`, δ̃ otherwise.
    pub fn level_map(&self, p: usize, q: usize) -> TupleMap {
        let f = self.field;
        let source = self.tuple_space(p, q);
        let target = self.tuple_space(p + 1, q);
        let (so, to) = (source.offsets(), target.offsets());
        let mut m = FMatrix::zeros(f, target.dim(), source.dim());
        for (r, (tp, kp)) in self.levels[p + 1].iter().enumerate() {
            for k in 0..tp.len() {
                let mut t = tp.clone();
                t.remove(k);
                let c = self.position[&t];
                let sign = if p == 0 { 1 } else { f.sign(k + 1) };
                let res = restriction_map(&self.levels[p][c].1, kp, q, f).expect("N_T' is a subcomplex of N_T");
                m.put_block(to[r], so[c], &res.matrix.scale(sign));
            }
        }
        TupleMap { source, target, matrix: m }
    }

    /// δ on every component of level `p`, as one block-diagonal matrix.
    pub fn delta(&self, p: usize, q: usize) -> FMatrix {
        let blocks: Vec<FMatrix> =
            self.levels[p].iter().map(|(_, k)| cech_differential(k, q, self.field).matrix).collect();
        FMatrix::block_diagonal(self.field, &blocks)
    }

    /// The map induced by [`level_map`](Self::level_map) on cohomology, in the
    /// representative bases of the components.
    pub fn descended(&self, p: usize, q: usize) -> DescendedMap {
        let map = self.level_map(p, q).matrix;
        let source = self.cohomologies(p, q);
        let target = self.cohomologies(p + 1, q);
        let offsets = offsets(source.iter().map(|h| h.space.dim()));
        let mut cols = Vec::new();
        for (h, &off) in source.iter().zip(&offsets) {
            for rep in &h.representatives {
                let mut v = vec![0; map.cols()];
                v[off..off + rep.len()].copy_from_slice(rep);
                cols.push(tuple_class(&target, &map.apply(&v)));
            }
        }
        let rows = target.iter().map(Cohomology::dim).sum();
        DescendedMap { matrix: FMatrix::from_columns(self.field, rows, &cols), source, target }
    }
}

fn offsets(dims: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut acc = 0;
    dims.map(|d| {
        let o = acc;
        acc += d;
        o
    })
    .collect()
}

fn tuple_class(cohs: &[Cohomology], v: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let mut off = 0;
    for h in cohs {
        let n = h.space.dim();
        out.extend(h.class_of(&v[off..off + n]).expect("chain maps send cocycles to cocycles"));
        off += n;
    }
    out
}

/// A direct sum of cochain spaces `⊕_{|T| = p} C^q(N_T)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleCochainSpace {
    pub level: usize,
    pub degree: usize,
    pub components: Vec<(Vec<usize>, CochainSpace)>,
}

impl TupleCochainSpace {
    pub fn dim(&self) -> usize {
        self.components.iter().map(|(_, c)| c.dim()).sum()
    }

    /// Start offset of each component in the stacked coordinate vector.
    pub fn offsets(&self) -> Vec<usize> {
        offsets(self.components.iter().map(|(_, c)| c.dim()))
    }
}

/// A linear map between tuple spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleMap {
    pub source: TupleCochainSpace,
    pub target: TupleCochainSpace,
    pub matrix: FMatrix,
}

/// A level map pushed down to cohomology.
#[derive(Debug, Clone)]
pub struct DescendedMap {
    pub matrix: FMatrix,
    pub source: Vec<Cohomology>,
    pub target: Vec<Cohomology>,
}

/// Φ*: C^q(N) → ⊕ C^q(N_i).
pub fn phi_star(d: &GluedDiagram, q: usize) -> TupleMap {
    IntersectionLattice::new(d).level_map(0, q)
}

/// δ̃ from level `p` to level `p + 1`, for `1 ≤ p < n`.
pub fn delta_tilde(d: &GluedDiagram, p: usize, q: usize) -> Result<TupleMap, MvError> {
    if p == 0 || p >= d.n() {
        return Err(MvError::BadLevel { level: p, n: d.n() });
    }
    Ok(IntersectionLattice::new(d).level_map(p, q))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositionCheck {
    /// 0 for `C^q(N)`, `p` for the sum over `|T| = p`.
    pub level: usize,
    pub dim: usize,
    pub rank_in: usize,
    pub nullity_out: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactnessVerdict {
    pub degree: usize,
    pub positions: Vec<PositionCheck>,
    pub exact: bool,
}

impl ExactnessVerdict {
    pub fn failing(&self) -> impl Iterator<Item = &PositionCheck> {
        self.positions.iter().filter(|p| !p.exact)
    }
}

/// Checks `0 → C^q(N) → ⊕C^q(N_i) → ⊕C^q(N_ij) → ⋯ → C^q(N_{1⋯n}) → 0`.
pub fn verify_exact_sequence(d: &GluedDiagram, q: usize) -> ExactnessVerdict {
    exactness_on(&IntersectionLattice::new(d), q)
}

pub fn exactness_on(lat: &IntersectionLattice, q: usize) -> ExactnessVerdict {
    let n = lat.n();
    let maps: Vec<FMatrix> = (0..n).map(|p| lat.level_map(p, q).matrix).collect();
    let ranks: Vec<usize> = maps.iter().map(FMatrix::rank).collect();
    let mut positions = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let dim = lat.tuple_space(p, q).dim();
        let rank_in = if p == 0 { 0 } else { ranks[p - 1] };
        let nullity_out = if p == n { dim } else { dim - ranks[p] };
        positions.push(PositionCheck { level: p, dim, rank_in, nullity_out, exact: rank_in == nullity_out });
    }
    let exact = positions.iter().all(|p| p.exact);
    ExactnessVerdict { degree: q, positions, exact }
}

/// δ*: H^q(N₁₂) → H^{q+1}(N) in representative bases.
#[derive(Debug, Clone)]
pub struct ConnectingMap {
    pub degree: usize,
    pub matrix: FMatrix,
    pub source: Cohomology,
    pub target: Cohomology,
}

/// The connecting homomorphism, lifting through piece 1.
pub fn connecting_homomorphism(d: &GluedDiagram, q: usize) -> Result<ConnectingMap, MvError> {
    connecting_homomorphism_via(d, q, 0)
}

/// The connecting homomorphism, lifting through piece `lift_piece` (0 or 1).
pub fn connecting_homomorphism_via(d: &GluedDiagram, q: usize, lift_piece: usize) -> Result<ConnectingMap, MvError> {
    if d.n() != 2 {
        return Err(MvError::NotBinary(d.n()));
    }
    if lift_piece > 1 {
        return Err(DiagramError::BadIndexSet(format!("lift piece {lift_piece}")).into());
    }
    let lat = IntersectionLattice::new(d);
    Ok(connecting_on(&lat, q, lift_piece))
}

/// Snake-lemma chase for one cocycle `z` on N₁₂: the cochain `h` on `N` with
/// `Φ*h = (δx₁, δx₂)` where `x` lifts `z` through `lift_piece`.
pub fn connecting_cochain(lat: &IntersectionLattice, q: usize, z: &[u32], lift_piece: usize) -> Vec<u32> {
    let f = lat.field();
    let overlap = lat.nerve(&[0, 1]);
    let pieces = lat.tuple_space(1, q);
    let off = pieces.offsets();
    // coefficient of piece s in δ̃ at {0,1}: the other index sits at position 1 - s
    let coef = f.sign(1 - lift_piece + 1);
    let target = lat.nerve(&[lift_piece]);
    let ext = restriction_map(target, overlap, q, f).expect("overlap inside piece").matrix.transpose();
    let mut x = vec![0; pieces.dim()];
    for (i, v) in ext.apply(z).into_iter().enumerate() {
        x[off[lift_piece] + i] = f.mul(coef, v);
    }
    debug_assert_eq!(lat.level_map(1, q).matrix.apply(&x), z.to_vec());
    let y = lat.delta(1, q).apply(&x);
    lat.level_map(0, q + 1).matrix.solve(&y).expect("lengths match").expect("δx lies in the image of Φ* by exactness")
}

fn connecting_on(lat: &IntersectionLattice, q: usize, lift_piece: usize) -> ConnectingMap {
    let f = lat.field();
    let source = cohomology(lat.nerve(&[0, 1]), q, f);
    let target = cohomology(lat.nerve(&[]), q + 1, f);
    let cols: Vec<Vec<u32>> = source
        .representatives
        .iter()
        .map(|z| {
            let h = connecting_cochain(lat, q, z, lift_piece);
            target.class_of(&h).expect("h is a cocycle")
        })
        .collect();
    ConnectingMap { degree: q, matrix: FMatrix::from_columns(f, target.dim(), &cols), source, target }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LesDegree {
    pub degree: usize,
    pub h_union: usize,
    pub h_pieces: Vec<usize>,
    pub h_overlap: usize,
    pub rank_phi: usize,
    pub rank_alpha: usize,
    pub rank_connecting: usize,
    pub coker_alpha_prev: usize,
    pub ker_alpha: usize,
    pub identity_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LesPosition {
    pub label: String,
    pub dim: usize,
    pub rank_in: usize,
    pub nullity_out: usize,
    pub exact: bool,
}

/// The long exact sequence in cohomology for two pieces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LesReport {
    pub degrees: Vec<LesDegree>,
    pub positions: Vec<LesPosition>,
    pub exact: bool,
    pub identity_holds: bool,
}

/// Computes `⋯ → H^q(N) → H^q(N₁)⊕H^q(N₂) → H^q(N₁₂) → H^{q+1}(N) → ⋯` for
/// `q ≤ q_max`, checks exactness at each position and the identity
/// `dim H^q(N) = dim coker α_{q−1} + dim ker α_q`.
pub fn assemble_les(d: &GluedDiagram, q_max: usize) -> Result<LesReport, MvError> {
    if d.n() != 2 {
        return Err(MvError::NotBinary(d.n()));
    }
    let lat = IntersectionLattice::new(d);
    let mut degrees = Vec::new();
    let mut positions = Vec::new();
    let mut prev_connecting_rank = 0;
    let mut prev_coker = 0;
    for q in 0..=q_max {
        let phi = lat.descended(0, q);
        let alpha = lat.descended(1, q);
        let conn = connecting_on(&lat, q, 0);
        let h_union = phi.source[0].dim();
        let h_pieces: Vec<usize> = phi.target.iter().map(Cohomology::dim).collect();
        let h_sum: usize = h_pieces.iter().sum();
        let h_overlap = alpha.target[0].dim();
        let (rank_phi, rank_alpha, rank_connecting) = (phi.matrix.rank(), alpha.matrix.rank(), conn.matrix.rank());
        let ker_alpha = h_sum - rank_alpha;
        let identity_holds = h_union == prev_coker + ker_alpha;
        let mut push = |label: String, dim: usize, rank_in: usize, rank_out: usize| {
            let nullity_out = dim - rank_out;
            positions.push(LesPosition { label, dim, rank_in, nullity_out, exact: rank_in == nullity_out });
        };
        push(format!("H^{q}(N)"), h_union, prev_connecting_rank, rank_phi);
        push(format!("H^{q}(N_1)+H^{q}(N_2)"), h_sum, rank_phi, rank_alpha);
        push(format!("H^{q}(N_12)"), h_overlap, rank_alpha, rank_connecting);
        degrees.push(LesDegree {
            degree: q,
            h_union,
            h_pieces,
            h_overlap,
            rank_phi,
            rank_alpha,
            rank_connecting,
            coker_alpha_prev: prev_coker,
            ker_alpha,
            identity_holds,
        });
        prev_connecting_rank = rank_connecting;
        prev_coker = h_overlap - rank_alpha;
    }
    let exact = positions.iter().all(|p| p.exact);
    let identity_holds = degrees.iter().all(|d| d.identity_holds);
    Ok(LesReport { degrees, positions, exact, identity_holds })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TotalReport {
    pub dims: Vec<usize>,
    pub union_dims: Vec<usize>,
    pub d_squared_zero: bool,
    pub agrees: bool,
}

/// Cohomology of the total complex of the bicomplex with column `p` equal to
/// level `p + 1` and total differential `D = δ̃ + (−1)^p δ`.
pub fn total_cohomology(d: &GluedDiagram, k_max: usize) -> TotalReport {
    total_on(&IntersectionLattice::new(d), k_max)
}

pub fn total_on(lat: &IntersectionLattice, k_max: usize) -> TotalReport {
    let f = lat.field();
    let n = lat.n();
    // components of Tot^k: (column, degree, offset)
    let layout = |k: usize| -> (Vec<(usize, usize, usize)>, usize) {
        let mut comps = Vec::new();
        let mut off = 0;
        for c in 0..n.min(k + 1) {
            let q = k - c;
            comps.push((c, q, off));
            off += lat.tuple_space(c + 1, q).dim();
        }
        (comps, off)
    };
    let differential = |k: usize| -> FMatrix {
        let (src, sdim) = layout(k);
        let (tgt, tdim) = layout(k + 1);
        let at = |c: usize, q: usize| tgt.iter().find(|&&(tc, tq, _)| tc == c && tq == q).map(|t| t.2);
        let mut m = FMatrix::zeros(f, tdim, sdim);
        for &(c, q, off) in &src {
            if c + 1 < n {
                let r = at(c + 1, q).expect("column c+1 present in degree k+1");
                m.put_block(r, off, &lat.level_map(c + 1, q).matrix);
            }
            let r = at(c, q + 1).expect("column c present in degree k+1");
            m.put_block(r, off, &lat.delta(c + 1, q).scale(f.sign(c)));
        }
        m
    };
    let ds: Vec<FMatrix> = (0..=k_max + 1).map(differential).collect();
    let d_squared_zero = (0..=k_max).all(|k| ds[k + 1].mul(&ds[k]).is_zero());
    let dims: Vec<usize> = (0..=k_max)
        .map(|k| {
            let (_, dim) = layout(k);
            let prev = if k == 0 { 0 } else { ds[k - 1].rank() };
            dim - ds[k].rank() - prev
        })
        .collect();
    let union_dims = crate::cech::cohomology_dims(lat.nerve(&[]), k_max, f);
    let agrees = dims == union_dims;
    TotalReport { dims, union_dims, d_squared_zero, agrees }
}

/// Compatible tuples `{(f¹,…,fⁿ) : f^i|N_ij = f^j|N_ij}` in degree `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibredProduct {
    pub degree: usize,
    /// Basis vectors in the level-1 tuple space.
    pub basis: Vec<Vec<u32>>,
    pub union_dim: usize,
    pub phi_rank: usize,
    /// δ̃∘Φ* = 0.
    pub contains_image: bool,
}

impl FibredProduct {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The product equals the image of Φ* and Φ* is injective.
    pub fn equals_image(&self) -> bool {
        self.contains_image && self.phi_rank == self.dim() && self.phi_rank == self.union_dim
    }
}

pub fn fibred_product(d: &GluedDiagram, q: usize) -> FibredProduct {
    let lat = IntersectionLattice::new(d);
    let phi = lat.level_map(0, q).matrix;
    let (basis, contains_image) = if lat.n() == 1 {
        let id = FMatrix::identity(lat.field(), phi.rows());
        ((0..phi.rows()).map(|c| id.column(c)).collect(), true)
    } else {
        let dt = lat.level_map(1, q).matrix;
        (dt.kernel_basis(), dt.mul(&phi).is_zero())
    };
    FibredProduct { degree: q, basis, union_dim: phi.cols(), phi_rank: phi.rank(), contains_image }
}

/// The unique map into the fibred product with prescribed projections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mediating {
    /// Stacked family, landing in the level-1 tuple space.
    pub into_tuple: FMatrix,
    /// The same map read through the isomorphism with `C^q(N)`.
    pub into_union: FMatrix,
}

/// Builds the mediating map for a family `ρ_i: V → C^q(N_i)` that commutes
/// with restriction to every overlap.
pub fn mediating_map(d: &GluedDiagram, q: usize, family: &[FMatrix]) -> Result<Mediating, MvError> {
    let lat = IntersectionLattice::new(d);
    let f = lat.field();
    let n = lat.n();
    if family.len() != n {
        return Err(DiagramError::BadIndexSet(format!("expected {n} maps, got {}", family.len())).into());
    }
    let cols = family.first().map_or(0, FMatrix::cols);
    for (i, r) in family.iter().enumerate() {
        let rows = CochainSpace::new(lat.nerve(&[i]), q).dim();
        if r.rows() != rows || r.cols() != cols {
            return Err(MvError::BadFamily {
                index: i,
                rows: r.rows(),
                cols: r.cols(),
                expected_rows: rows,
                expected_cols: cols,
            });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let nij = lat.nerve(&[i, j]);
            let ri = restriction_map(lat.nerve(&[i]), nij, q, f).expect("subcomplex").matrix;
            let rj = restriction_map(lat.nerve(&[j]), nij, q, f).expect("subcomplex").matrix;
            if ri.mul(&family[i]) != rj.mul(&family[j]) {
                let ids = lat.ids_of(&[i, j]);
                return Err(MvError::IncompatibleFamily { first: ids[0].clone(), second: ids[1].clone() });
            }
        }
    }
    let into_tuple = FMatrix::vstack(f, cols, family);
    let phi = lat.level_map(0, q).matrix;
    let solved: Vec<Vec<u32>> = (0..cols)
        .map(|c| {
            phi.solve(&into_tuple.column(c)).expect("lengths match").expect("compatible tuples lie in the image of Φ*")
        })
        .collect();
    let into_union = FMatrix::from_columns(f, phi.cols(), &solved);
    Ok(Mediating { into_tuple, into_union })
}

/// The fibred product built one piece at a time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InductiveProduct {
    pub degree: usize,
    /// Columns span the product inside the level-1 tuple space.
    pub basis: FMatrix,
    pub flat_dim: usize,
}

impl InductiveProduct {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn agrees(&self) -> bool {
        self.dim() == self.flat_dim
    }
}

/// Two-step product: first glue pieces `1..m−1`, then attach piece `m` along
/// the (itself inductively computed) product over the overlaps `N_im`.
pub fn inductive_product(d: &GluedDiagram, q: usize) -> InductiveProduct {
    let pieces: Vec<SimplicialComplex> = (0..d.n()).map(|i| d.nerve(i).clone()).collect();
    let basis = inductive_basis(&pieces, q, d.field());
    InductiveProduct { degree: q, basis, flat_dim: fibred_product(d, q).dim() }
}

fn inductive_basis(ks: &[SimplicialComplex], q: usize, f: PrimeField) -> FMatrix {
    let m = ks.len();
    let dim = |k: &SimplicialComplex| CochainSpace::new(k, q).dim();
    if m == 1 {
        return FMatrix::identity(f, dim(&ks[0]));
    }
    let last = &ks[m - 1];
    let prefix = inductive_basis(&ks[..m - 1], q, f);
    let overlaps: Vec<SimplicialComplex> = ks[..m - 1].iter().map(|k| k.intersect(last)).collect();
    let over = inductive_basis(&overlaps, q, f);
    let res = |k: &SimplicialComplex, l: &SimplicialComplex| {
        restriction_map(k, l, q, f).expect("overlap inside piece").matrix
    };
    let alpha =
        FMatrix::block_diagonal(f, &ks[..m - 1].iter().zip(&overlaps).map(|(k, o)| res(k, o)).collect::<Vec<_>>());
    let beta = FMatrix::vstack(f, dim(last), &overlaps.iter().map(|o| res(last, o)).collect::<Vec<_>>());
    let coords =
        |v: Vec<u32>| over.solve(&v).expect("lengths match").expect("restrictions of compatible tuples are compatible");
    let ap = alpha.mul(&prefix);
    let a_cols: Vec<Vec<u32>> = (0..ap.cols()).map(|c| coords(ap.column(c))).collect();
    let b_cols: Vec<Vec<u32>> = (0..beta.cols()).map(|c| coords(beta.column(c))).collect();
    let a = FMatrix::from_columns(f, over.cols(), &a_cols);
    let b = FMatrix::from_columns(f, over.cols(), &b_cols);
    let kernel = a.hstack(&b.scale(f.neg(1))).kernel_basis();
    let (np, nl) = (prefix.cols(), dim(last));
    let cols: Vec<Vec<u32>> = kernel
        .iter()
        .map(|w| {
            let mut v = prefix.apply(&w[..np]);
            v.extend_from_slice(&w[np..np + nl]);
            v
        })
        .collect();
    FMatrix::from_columns(f, prefix.rows() + nl, &cols)
}

/// H¹ of the union versus the fibred product of the pieces' H¹.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct H1Check {
    pub hypothesis_holds: bool,
    /// Index sets (as piece ids) whose intersection nerve is not connected.
    pub disconnected: Vec<Vec<String>>,
    pub h1_union: usize,
    pub h1_fibred: usize,
    /// `Some(equality)` when the connectivity hypothesis holds, `None` otherwise.
    pub holds: Option<bool>,
}

pub fn h1_fibred_check(d: &GluedDiagram) -> H1Check {
    let lat = IntersectionLattice::new(d);
    let disconnected = disconnected_sets(&lat);
    let hypothesis_holds = disconnected.is_empty();
    let h1_union = cohomology(d.union(), 1, d.field()).dim();
    let h1_fibred = if lat.n() == 1 {
        cohomology(d.nerve(0), 1, d.field()).dim()
    } else {
        let m = lat.descended(1, 1).matrix;
        m.cols() - m.rank()
    };
    let holds = hypothesis_holds.then_some(h1_union == h1_fibred);
    H1Check { hypothesis_holds, disconnected, h1_union, h1_fibred, holds }
}

fn disconnected_sets(lat: &IntersectionLattice) -> Vec<Vec<String>> {
    (1..=lat.n())
        .flat_map(|p| lat.level(p).iter())
        .filter(|(_, k)| k.components().len() != 1)
        .map(|(t, _)| lat.ids_of(t))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelH1 {
    pub pieces: Vec<String>,
    pub h1: usize,
}

/// Line-bundle count from the pieces versus the ground truth `2^{dim H¹(N)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub connected_hypothesis: bool,
    pub disconnected: Vec<Vec<String>>,
    pub surjective_hypothesis: bool,
    /// Levels `p` whose descended δ̃ on H¹ is not surjective.
    pub non_surjective_levels: Vec<usize>,
    pub levels: Vec<Vec<LevelH1>>,
    /// `S = Σ_p (−1)^{p+1} Σ_{|T|=p} dim H¹(N_T)`.
    pub exponent: i64,
    /// `2^S`, absent when `S < 0`.
    pub dimension_form: Option<u128>,
    /// `Σ_p (−1)^{p+1} Σ_{|T|=p} |H¹(N_T)|`.
    pub literal_form: i128,
    pub h1_union: usize,
    pub ground_truth: u128,
    pub dimension_form_agrees: bool,
    pub literal_form_agrees: bool,
}

fn pow2(e: usize) -> u128 {
    1u128.checked_shl(e as u32).filter(|_| e < 127).expect("H¹ dimension below 127")
}

pub fn count_line_bundles(d: &GluedDiagram) -> Result<CountReport, MvError> {
    if d.field() != PrimeField::F2 {
        return Err(MvError::WrongField(d.field()));
    }
    let lat = IntersectionLattice::new(d);
    let f = d.field();
    let disconnected = disconnected_sets(&lat);
    let mut levels = Vec::new();
    let mut exponent: i64 = 0;
    let mut literal_form: i128 = 0;
    for p in 1..=lat.n() {
        let sign: i64 = if p % 2 == 1 { 1 } else { -1 };
        let entries: Vec<LevelH1> = lat
            .level(p)
            .iter()
            .map(|(t, k)| LevelH1 { pieces: lat.ids_of(t), h1: cohomology(k, 1, f).dim() })
            .collect();
        for e in &entries {
            exponent += sign * e.h1 as i64;
            literal_form += sign as i128 * pow2(e.h1) as i128;
        }
        levels.push(entries);
    }
    let non_surjective_levels: Vec<usize> = (1..lat.n())
        .filter(|&p| {
            let m = lat.descended(p, 1).matrix;
            m.rank() != m.rows()
        })
        .collect();
    let h1_union = cohomology(d.union(), 1, f).dim();
    let ground_truth = pow2(h1_union);
    let dimension_form = usize::try_from(exponent).ok().map(pow2);
    Ok(CountReport {
        connected_hypothesis: disconnected.is_empty(),
        disconnected,
        surjective_hypothesis: non_surjective_levels.is_empty(),
        non_surjective_levels,
        levels,
        exponent,
        dimension_form,
        literal_form,
        h1_union,
        ground_truth,
        dimension_form_agrees: dimension_form == Some(ground_truth),
        literal_form_agrees: literal_form == ground_truth as i128,
    })
}
