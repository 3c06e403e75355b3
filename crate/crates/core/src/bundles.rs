//! Constant transition cocycles on nerves: vector bundles trivialized by a
//! cover with locally constant transitions.
//!
//! Conventions:
//! - sections satisfy `s_α = g_αβ s_β`, with `g_βα = g_αβ⁻¹`;
//! - a vertex gauge `c` acts by `h_αβ = c_α⁻¹ g_αβ c_β`;
//! - an identification `k^{ij}` between pieces sends sections by
//!   `s^j_α = k^{ij}_α s^i_α`, so transitions satisfy
//!   `g^j_αβ = k^{ij}_α g^i_αβ (k^{ij}_β)⁻¹` and identifications compose as
//!   `k^{ik} = k^{jk} k^{ij}`.
//!
//! Line bundles use the group O(1) = {±1}. It is classified additively by
//! H¹ over F₂, but it acts on sections with coefficients in an odd prime
//! field, since over F₂ the sign −1 would act trivially.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cech::{cohomology, CochainSpace, Cohomology};
use crate::complex::{Label, Simplex, SimplicialComplex};
use crate::diagram::GluedDiagram;
use crate::linalg::{FMatrix, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("classification needs an abelian structure group; rank is {0}")]
    NonAbelianRank(usize),
    #[error("structure group is not sign-valued")]
    NotSignValued,
    #[error("operation needs the field F_2, got {0}")]
    WrongField(PrimeField),
    #[error("section coefficients must lie in an odd prime field, got {0}")]
    EvenSectionField(PrimeField),
    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),
    #[error("incompatible piece data: {0}")]
    IncompatibleData(String),
    #[error("sections of pieces {first} and {second} disagree at {label}")]
    Incompatible { first: String, second: String, label: Label },
    #[error("section on piece {piece} is not parallel")]
    NotParallel { piece: String },
    #[error("expected {expected} values, got {actual}")]
    WrongLength { expected: usize, actual: usize },
}

/// The structure group of a bundle together with its linear action.
pub trait StructureGroup: Clone + fmt::Debug {
    type Element: Clone + PartialEq + fmt::Debug;

    /// Fibre dimension.
    fn rank(&self) -> usize;
    fn identity(&self) -> Self::Element;
    fn compose(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn inverse(&self, a: &Self::Element) -> Self::Element;
    fn is_member(&self, a: &Self::Element) -> bool;
    /// Every group element, for brute-force searches at desk scale.
    fn elements(&self) -> Vec<Self::Element>;
    /// Field of section coefficients.
    fn coefficients(&self) -> PrimeField;
    /// Matrix of the action on `F^rank`.
    fn action_matrix(&self, a: &Self::Element) -> FMatrix;
    /// The element as a value in F₂, for sign-valued groups.
    fn additive_coordinate(&self, a: &Self::Element) -> Result<u32, BundleError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `0 ↦ +1`, `1 ↦ −1` (the F₂ coordinate).
    pub fn from_bit(b: u32) -> Sign {
        if b.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn bit(self) -> u32 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

/// O(1) = {±1}, acting on sections over an odd prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct O1 {
    section_field: PrimeField,
}

impl O1 {
    pub fn new(section_field: PrimeField) -> Result<Self, BundleError> {
        if section_field.modulus() == 2 {
            return Err(BundleError::EvenSectionField(section_field));
        }
        Ok(O1 { section_field })
    }
}

impl Default for O1 {
    fn default() -> Self {
        O1 { section_field: PrimeField::F3 }
    }
}

impl StructureGroup for O1 {
    type Element = Sign;

    fn rank(&self) -> usize {
        1
    }
    fn identity(&self) -> Sign {
        Sign::Plus
    }
    fn compose(&self, a: &Sign, b: &Sign) -> Sign {
        Sign::from_bit(a.bit() + b.bit())
    }
    fn inverse(&self, a: &Sign) -> Sign {
        *a
    }
    fn is_member(&self, _: &Sign) -> bool {
        true
    }
    fn elements(&self) -> Vec<Sign> {
        vec![Sign::Plus, Sign::Minus]
    }
    fn coefficients(&self) -> PrimeField {
        self.section_field
    }
    fn action_matrix(&self, a: &Sign) -> FMatrix {
        let f = self.section_field;
        let v = if *a == Sign::Plus { 1 } else { f.neg(1) };
        FMatrix::from_columns(f, 1, &[vec![v]])
    }
    fn additive_coordinate(&self, a: &Sign) -> Result<u32, BundleError> {
        Ok(a.bit())
    }
}

/// GL(k, F_p), acting on `F_p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneralLinear {
    pub rank: usize,
    pub field: PrimeField,
}

impl StructureGroup for GeneralLinear {
    type Element = FMatrix;

    fn rank(&self) -> usize {
        self.rank
    }
    fn identity(&self) -> FMatrix {
        FMatrix::identity(self.field, self.rank)
    }
    fn compose(&self, a: &FMatrix, b: &FMatrix) -> FMatrix {
        a.mul(b)
    }
    fn inverse(&self, a: &FMatrix) -> FMatrix {
        a.inverse().expect("group elements are invertible")
    }
    fn is_member(&self, a: &FMatrix) -> bool {
        a.field() == self.field && a.rows() == self.rank && a.inverse().is_some()
    }
    fn elements(&self) -> Vec<FMatrix> {
        let p = self.field.modulus() as u64;
        let cells = self.rank * self.rank;
        let total = p.pow(cells as u32);
        (0..total)
            .filter_map(|mut code| {
                let mut m = FMatrix::zeros(self.field, self.rank, self.rank);
                for c in 0..cells {
                    m.set(c / self.rank, c % self.rank, (code % p) as u32);
                    code /= p;
                }
                m.inverse().is_some().then_some(m)
            })
            .collect()
    }
    fn coefficients(&self) -> PrimeField {
        self.field
    }
    fn action_matrix(&self, a: &FMatrix) -> FMatrix {
        a.clone()
    }
    fn additive_coordinate(&self, _: &FMatrix) -> Result<u32, BundleError> {
        if self.rank > 1 {
            Err(BundleError::NonAbelianRank(self.rank))
        } else {
            Err(BundleError::NotSignValued)
        }
    }
}

fn edge(a: &Label, b: &Label) -> Simplex {
    Simplex::from_unsorted([a.clone(), b.clone()]).expect("distinct endpoints")
}

/// Transition values `g_αβ` on the edges `α < β` of a base complex.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantCocycle<G: StructureGroup> {
    pub group: G,
    pub base: SimplicialComplex,
    pub values: BTreeMap<Simplex, G::Element>,
}

/// A vertex gauge: one group element per vertex.
pub type Gauge<G> = BTreeMap<Label, <G as StructureGroup>::Element>;

impl<G: StructureGroup> ConstantCocycle<G> {
    pub fn trivial(group: G, base: SimplicialComplex) -> Self {
        let values = base.simplices(1).map(|e| (e.clone(), group.identity())).collect();
        ConstantCocycle { group, base, values }
    }

    /// `g_αβ` for any ordered pair of vertices joined by an edge (or equal).
    pub fn get(&self, a: &Label, b: &Label) -> Option<G::Element> {
        if a == b {
            return Some(self.group.identity());
        }
        let v = self.values.get(&edge(a, b))?;
        Some(if a < b { v.clone() } else { self.group.inverse(v) })
    }

    /// Restriction to a subcomplex.
    pub fn restrict(&self, sub: &SimplicialComplex) -> Self {
        ConstantCocycle {
            group: self.group.clone(),
            base: sub.clone(),
            values: sub.simplices(1).filter_map(|e| self.values.get(e).map(|v| (e.clone(), v.clone()))).collect(),
        }
    }

    /// `h_αβ = c_α⁻¹ g_αβ c_β`.
    pub fn gauge(&self, c: &Gauge<G>) -> Self {
        let g = &self.group;
        let values = self
            .values
            .iter()
            .map(|(e, v)| {
                let (a, b) = (&e.vertices()[0], &e.vertices()[1]);
                (e.clone(), g.compose(&g.inverse(&c[a]), &g.compose(v, &c[b])))
            })
            .collect();
        ConstantCocycle { group: g.clone(), base: self.base.clone(), values }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CocycleViolation {
    MissingEdge { edge: String },
    ExtraEdge { edge: String },
    NotInvertible { edge: String },
    Triangle { triangle: String },
}

impl fmt::Display for CocycleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CocycleViolation::MissingEdge { edge } => write!(f, "no value on edge {edge}"),
            CocycleViolation::ExtraEdge { edge } => write!(f, "value on {edge}, which is not an edge of the base"),
            CocycleViolation::NotInvertible { edge } => write!(f, "value on {edge} is not invertible"),
            CocycleViolation::Triangle { triangle } => write!(f, "cocycle identity fails on {triangle}"),
        }
    }
}

/// Checks invertibility and `g_αβ g_βγ g_γα = id` on every triangle.
pub fn validate_cocycle<G: StructureGroup>(g: &ConstantCocycle<G>) -> Vec<CocycleViolation> {
    let mut out = Vec::new();
    for e in g.base.simplices(1) {
        match g.values.get(e) {
            None => out.push(CocycleViolation::MissingEdge { edge: e.to_string() }),
            Some(v) if !g.group.is_member(v) => out.push(CocycleViolation::NotInvertible { edge: e.to_string() }),
            Some(_) => {}
        }
    }
    for e in g.values.keys() {
        if !g.base.contains(e) || e.dim() != 1 {
            out.push(CocycleViolation::ExtraEdge { edge: e.to_string() });
        }
    }
    if !out.is_empty() {
        return out;
    }
    let grp = &g.group;
    for t in g.base.simplices(2) {
        let [a, b, c] = [&t.vertices()[0], &t.vertices()[1], &t.vertices()[2]];
        let prod = grp.compose(
            &g.get(a, b).expect("edge"),
            &grp.compose(&g.get(b, c).expect("edge"), &g.get(c, a).expect("edge")),
        );
        if prod != grp.identity() {
            out.push(CocycleViolation::Triangle { triangle: t.to_string() });
        }
    }
    out
}

/// The F₂ 1-cochain of a sign-valued cocycle.
pub fn additive_cochain<G: StructureGroup>(g: &ConstantCocycle<G>) -> Result<Vec<u32>, BundleError> {
    if g.group.rank() > 1 {
        return Err(BundleError::NonAbelianRank(g.group.rank()));
    }
    g.base
        .simplices(1)
        .map(|e| {
            let v = g.values.get(e).ok_or_else(|| BundleError::InvalidCocycle(format!("no value on {e}")))?;
            g.group.additive_coordinate(v)
        })
        .collect()
}

/// Coordinates of the class of a line-bundle cocycle in H¹(base; F₂).
pub fn cocycle_class<G: StructureGroup>(g: &ConstantCocycle<G>) -> Result<Vec<u32>, BundleError> {
    let h1 = cohomology(&g.base, 1, PrimeField::F2);
    cocycle_class_in(g, &h1)
}

/// Like [`cocycle_class`] with a precomputed `H¹(base; F₂)`.
pub fn cocycle_class_in<G: StructureGroup>(g: &ConstantCocycle<G>, h1: &Cohomology) -> Result<Vec<u32>, BundleError> {
    let z = additive_cochain(g)?;
    h1.class_of(&z).map_err(|e| BundleError::InvalidCocycle(e.to_string()))
}

/// The O(1) cocycle with the given F₂ values on the edges of `base`.
pub fn sign_cocycle(base: &SimplicialComplex, bits: &[u32]) -> ConstantCocycle<O1> {
    let values = base.simplices(1).zip(bits).map(|(e, &b)| (e.clone(), Sign::from_bit(b))).collect();
    ConstantCocycle { group: O1::default(), base: base.clone(), values }
}

/// One representative per element of `H¹(N; F₂)`, in lexicographic order of
/// class coordinates (the trivial class first).
pub fn enumerate_line_bundles(d: &GluedDiagram) -> Result<Vec<ConstantCocycle<O1>>, BundleError> {
    if d.field() != PrimeField::F2 {
        return Err(BundleError::WrongField(d.field()));
    }
    let h1 = cohomology(d.union(), 1, PrimeField::F2);
    let dim = h1.dim();
    Ok((0..1u64 << dim)
        .map(|code| {
            let coords: Vec<u32> = (0..dim).map(|i| ((code >> (dim - 1 - i)) & 1) as u32).collect();
            sign_cocycle(d.union(), &h1.cocycle_for(&coords))
        })
        .collect())
}

/// A gauge `c` with `g.gauge(c) == h`, found by trying every root value on each
/// component and propagating along edges.
pub fn find_gauge<G: StructureGroup>(g: &ConstantCocycle<G>, h: &ConstantCocycle<G>) -> Option<Gauge<G>> {
    if g.base != h.base {
        return None;
    }
    let grp = &g.group;
    let mut neighbours: BTreeMap<&Label, Vec<&Label>> = BTreeMap::new();
    for e in g.base.simplices(1) {
        let (a, b) = (&e.vertices()[0], &e.vertices()[1]);
        neighbours.entry(a).or_default().push(b);
        neighbours.entry(b).or_default().push(a);
    }
    let mut gauge: Gauge<G> = BTreeMap::new();
    for comp in g.base.components() {
        let root = comp.iter().next().expect("nonempty component");
        let found = grp.elements().into_iter().find_map(|start| {
            let mut c: Gauge<G> = BTreeMap::new();
            c.insert(root.clone(), start);
            let mut queue = VecDeque::from([root]);
            while let Some(a) = queue.pop_front() {
                for &b in neighbours.get(a).into_iter().flatten() {
                    // c_β = g_αβ⁻¹ c_α h_αβ
                    let cb = grp.compose(&grp.inverse(&g.get(a, b)?), &grp.compose(&c[a], &h.get(a, b)?));
                    match c.get(b) {
                        Some(existing) if *existing != cb => return None,
                        Some(_) => {}
                        None => {
                            c.insert(b.clone(), cb);
                            queue.push_back(b);
                        }
                    }
                }
            }
            Some(c)
        })?;
        gauge.extend(found);
    }
    Some(gauge)
}

pub fn equivalent<G: StructureGroup>(g: &ConstantCocycle<G>, h: &ConstantCocycle<G>) -> bool {
    find_gauge(g, h).is_some()
}

/// Bundle data on each piece of a diagram, tied together by identifications.
#[derive(Debug, Clone, PartialEq)]
pub struct PieceBundleData<G: StructureGroup> {
    pub group: G,
    /// One cocycle per piece, on that piece's nerve (global labels).
    pub pieces: Vec<ConstantCocycle<G>>,
    /// `k^{ij}_α` for `i < j` and vertices `α` of `N_ij`; absent means identity.
    pub identifications: BTreeMap<(usize, usize), Gauge<G>>,
}

impl<G: StructureGroup> PieceBundleData<G> {
    /// `k^{ij}_α` for any ordered pair.
    pub fn k(&self, i: usize, j: usize, a: &Label) -> G::Element {
        let g = &self.group;
        let stored =
            |i, j| self.identifications.get(&(i, j)).and_then(|m| m.get(a)).cloned().unwrap_or_else(|| g.identity());
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => g.identity(),
            std::cmp::Ordering::Less => stored(i, j),
            std::cmp::Ordering::Greater => g.inverse(&stored(j, i)),
        }
    }
}

/// Checks each piece cocycle and the compatibility of transitions with the
/// identifications on every overlap.
pub fn validate_piece_data<G: StructureGroup>(d: &GluedDiagram, data: &PieceBundleData<G>) -> Result<(), BundleError> {
    let bad = |s: String| Err(BundleError::IncompatibleData(s));
    if data.pieces.len() != d.n() {
        return bad(format!("expected {} piece cocycles, got {}", d.n(), data.pieces.len()));
    }
    let ids = d.piece_ids();
    for (i, g) in data.pieces.iter().enumerate() {
        if &g.base != d.nerve(i) {
            return bad(format!("cocycle of piece {} is not on that piece's nerve", ids[i]));
        }
        if let Some(v) = validate_cocycle(g).first() {
            return bad(format!("piece {}: {v}", ids[i]));
        }
    }
    let grp = &data.group;
    for (&(i, j), m) in &data.identifications {
        if i >= j || j >= d.n() {
            return bad(format!("identification key ({i}, {j}) is not an ordered pair of pieces"));
        }
        let nij = d.nerve(i).intersect(d.nerve(j));
        for (a, v) in m {
            if !nij.has_vertex(a) {
                return bad(format!("identification {}->{} at {a}, which is not in the overlap", ids[i], ids[j]));
            }
            if !grp.is_member(v) {
                return bad(format!("identification {}->{} at {a} is not invertible", ids[i], ids[j]));
            }
        }
    }
    for i in 0..d.n() {
        for j in i + 1..d.n() {
            let nij = d.nerve(i).intersect(d.nerve(j));
            for e in nij.simplices(1) {
                let (a, b) = (&e.vertices()[0], &e.vertices()[1]);
                let gi = data.pieces[i].get(a, b).expect("edge of piece");
                let gj = data.pieces[j].get(a, b).expect("edge of piece");
                let pushed = grp.compose(&data.k(i, j, a), &grp.compose(&gi, &grp.inverse(&data.k(i, j, b))));
                if pushed != gj {
                    return bad(format!(
                        "transitions of pieces {} and {} are not related by the identification on edge {e}",
                        ids[i], ids[j]
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Result of gluing piece data.
#[derive(Debug, Clone, PartialEq)]
pub enum ColimitOutcome<G: StructureGroup> {
    /// A cocycle on the union nerve, with the gauge relating it to each piece:
    /// `g|N_i = g^i.gauge(gauges[i])`.
    Glued { cocycle: ConstantCocycle<G>, gauges: Vec<Gauge<G>> },
    /// The identifications around the cycle of pieces `cycle` disagree at
    /// `label`, so no gauge on this cover glues the pieces.
    Obstructed { label: Label, cycle: Vec<String> },
}

/// Glues piece data to a single cocycle on the union nerve.
pub fn colimit_bundle<G: StructureGroup>(
    d: &GluedDiagram,
    data: &PieceBundleData<G>,
) -> Result<ColimitOutcome<G>, BundleError> {
    validate_piece_data(d, data)?;
    let grp = &data.group;
    let n = d.n();
    let ids = d.piece_ids();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let nijk = d.nerve(i).intersect(d.nerve(j)).intersect(d.nerve(k));
                for a in nijk.vertex_set() {
                    let around = grp.compose(&data.k(j, k, &a), &data.k(i, j, &a));
                    if around != data.k(i, k, &a) {
                        return Ok(ColimitOutcome::Obstructed {
                            label: a,
                            cycle: vec![ids[i].clone(), ids[j].clone(), ids[k].clone()],
                        });
                    }
                }
            }
        }
    }
    // c^i_α = k^{i₀ i}_α, where i₀ is the first piece containing α
    let first_piece = |a: &Label| (0..n).find(|&i| d.nerve(i).has_vertex(a)).expect("label of some piece");
    let gauges: Vec<Gauge<G>> = (0..n)
        .map(|i| d.nerve(i).vertex_set().into_iter().map(|a| (a.clone(), data.k(first_piece(&a), i, &a))).collect())
        .collect();
    let mut values = BTreeMap::new();
    for (i, g) in data.pieces.iter().enumerate() {
        for (e, v) in g.gauge(&gauges[i]).values {
            if let Some(prev) = values.get(&e) {
                if prev != &v {
                    return Err(BundleError::IncompatibleData(format!("gauged transitions disagree on {e}")));
                }
            } else {
                values.insert(e, v);
            }
        }
    }
    let cocycle = ConstantCocycle { group: grp.clone(), base: d.union().clone(), values };
    Ok(ColimitOutcome::Glued { cocycle, gauges })
}

/// Per-piece restrictions of a cocycle on the union, with identity identifications.
pub fn restrict_bundle<G: StructureGroup>(g: &ConstantCocycle<G>, d: &GluedDiagram) -> PieceBundleData<G> {
    PieceBundleData {
        group: g.group.clone(),
        pieces: (0..d.n()).map(|i| g.restrict(d.nerve(i))).collect(),
        identifications: BTreeMap::new(),
    }
}

/// Space of parallel sections, stacked vertex by vertex in label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionSpace {
    pub vertices: Vec<Label>,
    pub rank: usize,
    pub field: PrimeField,
    pub basis: Vec<Vec<u32>>,
}

impl SectionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn parallel_constraints<G: StructureGroup>(g: &ConstantCocycle<G>) -> FMatrix {
    let f = g.group.coefficients();
    let k = g.group.rank();
    let verts = CochainSpace::new(&g.base, 0);
    let edges: Vec<&Simplex> = g.base.simplices(1).collect();
    let mut m = FMatrix::zeros(f, edges.len() * k, verts.dim() * k);
    for (r, e) in edges.iter().enumerate() {
        let (a, b) = (&e.vertices()[0], &e.vertices()[1]);
        let ia = verts.index_of(&Simplex::vertex(a.clone())).expect("vertex");
        let ib = verts.index_of(&Simplex::vertex(b.clone())).expect("vertex");
        let act = g.group.action_matrix(&g.get(a, b).expect("edge value"));
        // s_a − g_ab s_b = 0
        m.put_block(r * k, ia * k, &FMatrix::identity(f, k));
        m.put_block(r * k, ib * k, &act.scale(f.neg(1)));
    }
    m
}

/// Solutions of `s_α = g_αβ s_β` on every edge.
pub fn parallel_sections<G: StructureGroup>(g: &ConstantCocycle<G>) -> SectionSpace {
    SectionSpace {
        vertices: g.base.vertex_set().into_iter().collect(),
        rank: g.group.rank(),
        field: g.group.coefficients(),
        basis: parallel_constraints(g).kernel_basis(),
    }
}

pub fn is_parallel<G: StructureGroup>(g: &ConstantCocycle<G>, s: &[u32]) -> bool {
    let m = parallel_constraints(g);
    s.len() == m.cols() && m.apply(s).iter().all(|&x| x == 0)
}

fn block(s: &[u32], index: usize, k: usize) -> &[u32] {
    &s[index * k..(index + 1) * k]
}

/// Glues per-piece parallel sections into one on the colimit cocycle.
///
/// `sections[i]` is stacked over the vertices of `N_i` in label order.
pub fn glue_sections<G: StructureGroup>(
    d: &GluedDiagram,
    data: &PieceBundleData<G>,
    sections: &[Vec<u32>],
) -> Result<Vec<u32>, BundleError> {
    let k = data.group.rank();
    let ids = d.piece_ids();
    if sections.len() != d.n() {
        return Err(BundleError::WrongLength { expected: d.n(), actual: sections.len() });
    }
    let verts: Vec<Vec<Label>> = (0..d.n()).map(|i| d.nerve(i).vertex_set().into_iter().collect()).collect();
    for (i, s) in sections.iter().enumerate() {
        if s.len() != verts[i].len() * k {
            return Err(BundleError::WrongLength { expected: verts[i].len() * k, actual: s.len() });
        }
        if !is_parallel(&data.pieces[i], s) {
            return Err(BundleError::NotParallel { piece: ids[i].clone() });
        }
    }
    let at = |i: usize, a: &Label| {
        let idx = verts[i].binary_search(a).expect("vertex of piece");
        block(&sections[i], idx, k)
    };
    for i in 0..d.n() {
        for j in i + 1..d.n() {
            let shared: BTreeSet<&Label> = verts[i].iter().filter(|a| verts[j].binary_search(a).is_ok()).collect();
            for a in shared {
                let pushed = data.group.action_matrix(&data.k(i, j, a)).apply(at(i, a));
                if pushed != at(j, a) {
                    return Err(BundleError::Incompatible {
                        first: ids[i].clone(),
                        second: ids[j].clone(),
                        label: a.clone(),
                    });
                }
            }
        }
    }
    // on the first piece containing α the colimit gauge is the identity
    let mut out = Vec::new();
    for a in d.union().vertex_set() {
        let i = (0..d.n()).find(|&i| d.nerve(i).has_vertex(&a)).expect("label of some piece");
        out.extend_from_slice(at(i, &a));
    }
    Ok(out)
}

/// Dimension of `{(s¹,…,sⁿ) : s^i parallel, s^j_α = k^{ij}_α s^i_α}`.
pub fn compatible_sections_dim<G: StructureGroup>(d: &GluedDiagram, data: &PieceBundleData<G>) -> usize {
    let f = data.group.coefficients();
    let k = data.group.rank();
    let verts: Vec<Vec<Label>> = (0..d.n()).map(|i| d.nerve(i).vertex_set().into_iter().collect()).collect();
    let mut offsets = Vec::new();
    let mut total = 0;
    for v in &verts {
        offsets.push(total);
        total += v.len() * k;
    }
    let mut blocks: Vec<FMatrix> = Vec::new();
    for (i, g) in data.pieces.iter().enumerate() {
        let c = parallel_constraints(g);
        let mut wide = FMatrix::zeros(f, c.rows(), total);
        wide.put_block(0, offsets[i], &c);
        blocks.push(wide);
    }
    for i in 0..d.n() {
        for j in i + 1..d.n() {
            for (ia, a) in verts[i].iter().enumerate() {
                let Ok(ja) = verts[j].binary_search(a) else { continue };
                let mut row = FMatrix::zeros(f, k, total);
                row.put_block(0, offsets[i] + ia * k, &data.group.action_matrix(&data.k(i, j, a)));
                row.put_block(0, offsets[j] + ja * k, &FMatrix::identity(f, k).scale(f.neg(1)));
                blocks.push(row);
            }
        }
    }
    FMatrix::vstack(f, total, &blocks).rank_nullity().1
}
