//! Finite abstract simplicial complexes over totally ordered text labels.
//!
//! Complexes are stored as explicit, downward-closed simplex sets grouped by
//! dimension. The label order (lexicographic on the canonical text form) is
//! global: it fixes the vertex order inside every simplex and therefore every
//! cochain sign downstream.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("malformed simplex {0:?}: vertices must be nonempty and strictly increasing")]
    MalformedSimplex(Vec<String>),
    #[error("vertex map is undefined on label {0}")]
    UndefinedVertex(Label),
    #[error("vertex map is not simplicial: image of {simplex} is not a simplex of the target")]
    NotSimplicial { simplex: Simplex },
}

/// A cover index. Ordered lexicographically on its text form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Label(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

/// A simplex: a strictly increasing, nonempty vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(Vec<Label>);

impl Simplex {
    /// Builds a simplex from an already strictly increasing sequence.
    pub fn new(vertices: Vec<Label>) -> Result<Self, ComplexError> {
        if vertices.is_empty() || vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ComplexError::MalformedSimplex(vertices.into_iter().map(|l| l.0).collect()));
        }
        Ok(Simplex(vertices))
    }

    /// Sorts the vertices first; repeated vertices are still rejected.
    pub fn from_unsorted<I, L>(vertices: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = L>,
        L: Into<Label>,
    {
        let mut v: Vec<Label> = vertices.into_iter().map(Into::into).collect();
        v.sort();
        Simplex::new(v)
    }

    pub fn vertex(label: impl Into<Label>) -> Self {
        Simplex(vec![label.into()])
    }

    pub fn vertices(&self) -> &[Label] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// The codimension-one face obtained by deleting the vertex at `index`.
    /// Returns `None` for a vertex (the empty face is not a simplex here).
    pub fn face(&self, index: usize) -> Option<Simplex> {
        if self.0.len() < 2 {
            return None;
        }
        let mut v = self.0.clone();
        v.remove(index);
        Some(Simplex(v))
    }

    /// All nonempty faces, including the simplex itself.
    pub fn all_faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (1u64..(1u64 << n))
            .map(|mask| Simplex((0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.0[i].clone()).collect()))
            .collect()
    }

    pub fn contains_vertex(&self, label: &Label) -> bool {
        self.0.binary_search(label).is_ok()
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(l.as_str())?;
        }
        f.write_str("}")
    }
}

/// Label-to-label map, used for gluing bijections, refinements and simplicial maps.
pub type VertexMap = BTreeMap<Label, Label>;

/// The result of applying a vertex map to a simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexImage {
    /// The image vertex set as a simplex (duplicates removed).
    pub simplex: Simplex,
    /// `true` when two vertices were identified.
    pub degenerate: bool,
    /// Parity of the permutation sorting the image sequence (only meaningful when
    /// not degenerate).
    pub odd: bool,
}

/// Applies `map` vertex-wise to `s`.
pub fn map_simplex(map: &VertexMap, s: &Simplex) -> Result<SimplexImage, ComplexError> {
    let image: Vec<Label> = s
        .vertices()
        .iter()
        .map(|v| map.get(v).cloned().ok_or_else(|| ComplexError::UndefinedVertex(v.clone())))
        .collect::<Result<_, _>>()?;
    let mut inversions = 0usize;
    for i in 0..image.len() {
        for j in i + 1..image.len() {
            if image[i] > image[j] {
                inversions += 1;
            }
        }
    }
    let mut sorted = image.clone();
    sorted.sort();
    sorted.dedup();
    let degenerate = sorted.len() < image.len();
    Ok(SimplexImage { simplex: Simplex(sorted), degenerate, odd: inversions % 2 == 1 })
}

/// A finite abstract simplicial complex, closed under taking nonempty faces.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
    // by_dim[q] holds the q-simplices; no trailing empty levels.
    by_dim: Vec<BTreeSet<Simplex>>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Downward closure of a set of generators.
    pub fn from_generators<I>(generators: I) -> Self
    where
        I: IntoIterator<Item = Simplex>,
    {
        let mut k = Self::empty();
        for g in generators {
            k.insert_closed(&g);
        }
        k
    }

    /// Like [`from_generators`](Self::from_generators) but takes raw vertex
    /// sequences and rejects any that are not strictly increasing.
    pub fn build<I, S, L>(generators: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = L>,
        L: Into<Label>,
    {
        let simplices = generators
            .into_iter()
            .map(|g| Simplex::new(g.into_iter().map(Into::into).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_generators(simplices))
    }

    fn insert_raw(&mut self, s: Simplex) {
        let d = s.dim();
        while self.by_dim.len() <= d {
            self.by_dim.push(BTreeSet::new());
        }
        self.by_dim[d].insert(s);
    }

    fn insert_closed(&mut self, s: &Simplex) {
        if self.contains(s) {
            return;
        }
        for f in s.all_faces() {
            self.insert_raw(f);
        }
    }

    fn from_set(simplices: impl IntoIterator<Item = Simplex>) -> Self {
        let mut k = Self::empty();
        for s in simplices {
            k.insert_raw(s);
        }
        k
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.by_dim.get(s.dim()).is_some_and(|level| level.contains(s))
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim.is_empty()
    }

    /// Top dimension, `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    /// The q-simplices in lexicographic order.
    pub fn simplices(&self, q: usize) -> impl Iterator<Item = &Simplex> + '_ {
        self.by_dim.get(q).into_iter().flatten()
    }

    pub fn count(&self, q: usize) -> usize {
        self.by_dim.get(q).map_or(0, BTreeSet::len)
    }

    /// Every simplex, ordered by dimension and then lexicographically.
    pub fn all_simplices(&self) -> impl Iterator<Item = &Simplex> + '_ {
        self.by_dim.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(BTreeSet::len).sum()
    }

    pub fn vertex_set(&self) -> BTreeSet<Label> {
        self.simplices(0).map(|s| s.vertices()[0].clone()).collect()
    }

    pub fn has_vertex(&self, l: &Label) -> bool {
        self.contains(&Simplex::vertex(l.clone()))
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.all_simplices().all(|s| other.contains(s))
    }

    /// Exact simplex-set intersection.
    pub fn intersect(&self, other: &SimplicialComplex) -> SimplicialComplex {
        Self::from_set(self.all_simplices().filter(|s| other.contains(s)).cloned())
    }

    /// Exact simplex-set union of any number of complexes.
    pub fn union_all<'a, I>(complexes: I) -> SimplicialComplex
    where
        I: IntoIterator<Item = &'a SimplicialComplex>,
    {
        let mut k = Self::empty();
        for c in complexes {
            for s in c.all_simplices() {
                k.insert_raw(s.clone());
            }
        }
        k
    }

    pub fn union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        Self::union_all([self, other])
    }

    /// The full subcomplex spanned by `labels`.
    pub fn induced(&self, labels: &BTreeSet<Label>) -> SimplicialComplex {
        Self::from_set(self.all_simplices().filter(|s| s.vertices().iter().all(|v| labels.contains(v))).cloned())
    }

    /// Partition of the vertex set into edge-connected components. Components
    /// are listed in order of their smallest label.
    pub fn components(&self) -> Vec<BTreeSet<Label>> {
        let vertices: Vec<Label> = self.vertex_set().into_iter().collect();
        let index: BTreeMap<&Label, usize> = vertices.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut parent: Vec<usize> = (0..vertices.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in self.simplices(1) {
            let a = find(&mut parent, index[&e.vertices()[0]]);
            let b = find(&mut parent, index[&e.vertices()[1]]);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, BTreeSet<Label>> = BTreeMap::new();
        for (i, l) in vertices.iter().enumerate() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().insert(l.clone());
        }
        groups.into_values().collect()
    }

    /// Relabels every vertex through `map`, which must be injective on the
    /// vertex set (checked by the caller when it matters).
    pub fn relabel(&self, map: &VertexMap) -> Result<SimplicialComplex, ComplexError> {
        let mut k = Self::empty();
        for s in self.all_simplices() {
            let img = map_simplex(map, s)?;
            k.insert_raw(img.simplex);
        }
        Ok(k)
    }

    /// Checks that `map` sends every simplex of `self` onto a simplex of `target`.
    pub fn check_simplicial(&self, map: &VertexMap, target: &SimplicialComplex) -> Result<(), ComplexError> {
        for s in self.all_simplices() {
            let img = map_simplex(map, s)?;
            if !target.contains(&img.simplex) {
                return Err(ComplexError::NotSimplicial { simplex: s.clone() });
            }
        }
        Ok(())
    }

    /// Maximal simplices, used for compact serialization.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for (d, level) in self.by_dim.iter().enumerate() {
            for s in level {
                let covered = self
                    .by_dim
                    .get(d + 1)
                    .is_some_and(|up| up.iter().any(|t| s.vertices().iter().all(|v| t.contains_vertex(v))));
                if !covered {
                    out.push(s.clone());
                }
            }
        }
        out
    }
}
