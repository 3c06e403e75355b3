//! Adjunction systems of cover nerves and the glued diagrams they canonicalize to.
//!
//! A piece is a nerve on piece-local labels. A gluing bijection identifies
//! some labels of piece `i` with labels of piece `j`, standing in for the
//! gluing map on the region covered by those labels. Canonicalization takes the
//! symmetric-transitive closure of all gluings; every equivalence class becomes
//! one global label.
//!
//! Modeling obligation on the caller: each piece's cover should be good, and a
//! cover element should either lie inside a gluing region (and then be shared)
//! or not be shared at all. Under that assumption the nerve of every multiple
//! intersection is the intersection of the piece nerves, which is how `N_T` is
//! defined here. Boundary conditions on the gluing regions (homeomorphic
//! closures) have no nerve-level content and are not checked.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{map_simplex, Label, Simplex, SimplicialComplex, VertexMap};
use crate::linalg::PrimeField;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("invalid adjunction system:\n{0}")]
    InvalidSystem(ValidationReport),
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("bad index set: {0}")]
    BadIndexSet(String),
    #[error("incompatible family: pieces {first} and {second} disagree on label {label}")]
    IncompatibleFamily { label: Label, first: String, second: String },
    #[error("map for piece {piece} is not simplicial on {simplex}")]
    NotSimplicial { piece: String, simplex: Simplex },
    #[error("map for piece {piece} is undefined on label {label}")]
    UndefinedVertex { piece: String, label: Label },
}

/// A piece `M_i` with its cover nerve on local labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalPiece {
    pub id: String,
    pub labels: BTreeSet<Label>,
    pub nerve: SimplicialComplex,
}

impl LocalPiece {
    /// A piece whose label set is exactly the vertex set of its nerve.
    pub fn new(id: impl Into<String>, nerve: SimplicialComplex) -> Self {
        let labels = nerve.vertex_set();
        LocalPiece { id: id.into(), labels, nerve }
    }
}

/// `σ_ij`: an injective label map from a subset of piece `source`'s labels to
/// piece `target`'s labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingBijection {
    pub source: String,
    pub target: String,
    pub map: VertexMap,
}

impl GluingBijection {
    pub fn new<I, A, B>(source: impl Into<String>, target: impl Into<String>, pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<Label>,
        B: Into<Label>,
    {
        GluingBijection {
            source: source.into(),
            target: target.into(),
            map: pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect(),
        }
    }
}

/// The triple (pieces, gluing regions, gluing maps) together with a coefficient field.
///
/// Gluings are listed per ordered pair. When only `σ_ij` is listed, `σ_ji` is
/// its inverse; when both are listed they must be mutually inverse. `σ_ii` is
/// the identity whether or not it is listed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjunctionSystem {
    pub pieces: Vec<LocalPiece>,
    pub gluings: Vec<GluingBijection>,
    pub field: PrimeField,
}

/// One failed condition, with the witness that fails it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicatePiece {
        piece: String,
    },
    UnknownPiece {
        piece: String,
    },
    UnknownLabel {
        piece: String,
        label: String,
    },
    DuplicateGluing {
        source: String,
        target: String,
    },
    /// `σ_ii` listed but not the identity on all labels.
    A1 {
        piece: String,
        label: String,
        detail: String,
    },
    /// `σ_ji` is not the inverse of `σ_ij`.
    A2 {
        source: String,
        target: String,
        label: String,
        detail: String,
    },
    /// `σ_ik ≠ σ_jk ∘ σ_ij` on a shared label.
    A3 {
        i: String,
        j: String,
        k: String,
        label: String,
        detail: String,
    },
    NotInjective {
        source: String,
        target: String,
        label: String,
    },
    /// The gluing does not carry the induced subcomplex on its domain
    /// isomorphically onto the induced subcomplex on its image.
    NotSimplicialIso {
        source: String,
        target: String,
        simplex: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicatePiece { piece } => write!(f, "duplicate piece id {piece}"),
            Violation::UnknownPiece { piece } => write!(f, "gluing refers to unknown piece {piece}"),
            Violation::UnknownLabel { piece, label } => {
                write!(f, "label {label} is not a label of piece {piece}")
            }
            Violation::DuplicateGluing { source, target } => {
                write!(f, "gluing {source}->{target} listed twice")
            }
            Violation::A1 { piece, label, detail } => {
                write!(f, "A1 violated on piece {piece} at label {label}: {detail}")
            }
            Violation::A2 { source, target, label, detail } => {
                write!(f, "A2 violated for {source}<->{target} at label {label}: {detail}")
            }
            Violation::A3 { i, j, k, label, detail } => {
                write!(f, "A3 violated for ({i},{j},{k}) at label {label}: {detail}")
            }
            Violation::NotInjective { source, target, label } => {
                write!(f, "gluing {source}->{target} is not injective (image {label} repeated)")
            }
            Violation::NotSimplicialIso { source, target, simplex } => write!(
                f,
                "gluing {source}->{target} is not a simplicial isomorphism of induced subcomplexes at {simplex}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

fn invert(map: &VertexMap) -> VertexMap {
    map.iter().map(|(a, b)| (b.clone(), a.clone())).collect()
}

impl AdjunctionSystem {
    pub fn new(field: PrimeField, pieces: Vec<LocalPiece>, gluings: Vec<GluingBijection>) -> Self {
        AdjunctionSystem { pieces, gluings, field }
    }

    fn piece_index(&self) -> BTreeMap<&str, usize> {
        self.pieces.iter().enumerate().map(|(i, p)| (p.id.as_str(), i)).collect()
    }

    /// Effective gluing maps for all ordered pairs `i != j` with a nonempty
    /// region, after applying the implied-inverse rule. Only meaningful once the
    /// system has validated.
    fn effective_gluings(&self) -> BTreeMap<(usize, usize), VertexMap> {
        let idx = self.piece_index();
        let mut out: BTreeMap<(usize, usize), VertexMap> = BTreeMap::new();
        for g in &self.gluings {
            let (Some(&i), Some(&j)) = (idx.get(g.source.as_str()), idx.get(g.target.as_str())) else {
                continue;
            };
            if i != j {
                out.insert((i, j), g.map.clone());
            }
        }
        let listed: Vec<(usize, usize)> = out.keys().copied().collect();
        for (i, j) in listed {
            if !out.contains_key(&(j, i)) {
                let inv = invert(&out[&(i, j)]);
                out.insert((j, i), inv);
            }
        }
        out.retain(|_, m| !m.is_empty());
        out
    }

    /// Keeps only the pieces whose ids are listed, with the gluings among them.
    pub fn restrict(&self, ids: &BTreeSet<String>) -> AdjunctionSystem {
        AdjunctionSystem {
            pieces: self.pieces.iter().filter(|p| ids.contains(&p.id)).cloned().collect(),
            gluings: self
                .gluings
                .iter()
                .filter(|g| ids.contains(&g.source) && ids.contains(&g.target))
                .cloned()
                .collect(),
            field: self.field,
        }
    }
}

/// Checks conditions A1–A3 plus injectivity and the simplicial-isomorphism
/// condition on gluing regions. Every failure is reported, not just the first.
pub fn validate_system(sys: &AdjunctionSystem) -> ValidationReport {
    let mut v = Vec::new();
    let mut idx: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, p) in sys.pieces.iter().enumerate() {
        if idx.insert(p.id.as_str(), i).is_some() {
            v.push(Violation::DuplicatePiece { piece: p.id.clone() });
        }
        for l in p.nerve.vertex_set() {
            if !p.labels.contains(&l) {
                v.push(Violation::UnknownLabel { piece: p.id.clone(), label: l.to_string() });
            }
        }
    }

    let mut seen = BTreeSet::new();
    let mut listed: BTreeMap<(usize, usize), &VertexMap> = BTreeMap::new();
    for g in &sys.gluings {
        let mut ok = true;
        for id in [&g.source, &g.target] {
            if !idx.contains_key(id.as_str()) {
                v.push(Violation::UnknownPiece { piece: id.clone() });
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        if !seen.insert((g.source.clone(), g.target.clone())) {
            v.push(Violation::DuplicateGluing { source: g.source.clone(), target: g.target.clone() });
            continue;
        }
        let (i, j) = (idx[g.source.as_str()], idx[g.target.as_str()]);
        let (pi, pj) = (&sys.pieces[i], &sys.pieces[j]);
        for (a, b) in &g.map {
            if !pi.labels.contains(a) {
                v.push(Violation::UnknownLabel { piece: pi.id.clone(), label: a.to_string() });
                ok = false;
            }
            if !pj.labels.contains(b) {
                v.push(Violation::UnknownLabel { piece: pj.id.clone(), label: b.to_string() });
                ok = false;
            }
        }
        if i == j {
            for l in &pi.labels {
                match g.map.get(l) {
                    Some(m) if m == l => {}
                    Some(m) => v.push(Violation::A1 {
                        piece: pi.id.clone(),
                        label: l.to_string(),
                        detail: format!("self-gluing sends {l} to {m}"),
                    }),
                    None => v.push(Violation::A1 {
                        piece: pi.id.clone(),
                        label: l.to_string(),
                        detail: "self-gluing is not defined on every label".into(),
                    }),
                }
            }
            continue;
        }
        let mut images = BTreeSet::new();
        for b in g.map.values() {
            if !images.insert(b) {
                v.push(Violation::NotInjective {
                    source: g.source.clone(),
                    target: g.target.clone(),
                    label: b.to_string(),
                });
                ok = false;
            }
        }
        if ok {
            listed.insert((i, j), &g.map);
        }
    }

    // A2 for pairs listed in both directions.
    for (&(i, j), &fwd) in &listed {
        if i > j {
            continue;
        }
        let Some(&back) = listed.get(&(j, i)) else { continue };
        let (si, sj) = (&sys.pieces[i].id, &sys.pieces[j].id);
        for (a, b) in fwd {
            match back.get(b) {
                Some(x) if x == a => {}
                Some(x) => v.push(Violation::A2 {
                    source: si.clone(),
                    target: sj.clone(),
                    label: a.to_string(),
                    detail: format!("{si}->{sj} sends {a} to {b} but {sj}->{si} sends {b} to {x}"),
                }),
                None => v.push(Violation::A2 {
                    source: si.clone(),
                    target: sj.clone(),
                    label: a.to_string(),
                    detail: format!("{b} is in the image of {si}->{sj} but not in the domain of {sj}->{si}"),
                }),
            }
        }
        let fwd_image: BTreeSet<&Label> = fwd.values().collect();
        for b in back.keys() {
            if !fwd_image.contains(b) {
                v.push(Violation::A2 {
                    source: sj.clone(),
                    target: si.clone(),
                    label: b.to_string(),
                    detail: format!("{b} is in the domain of {sj}->{si} but not in the image of {si}->{sj}"),
                });
            }
        }
    }
    if !v.is_empty() {
        return ValidationReport { violations: v };
    }

    let eff = sys.effective_gluings();
    let n = sys.pieces.len();
    // A3: for x in dom σ_ij ∩ dom σ_ik, σ_jk(σ_ij(x)) must be defined and equal σ_ik(x).
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let (Some(sij), Some(sik)) = (eff.get(&(i, j)), eff.get(&(i, k))) else {
                    continue;
                };
                let sjk = eff.get(&(j, k));
                for (x, y) in sij {
                    let Some(z) = sik.get(x) else { continue };
                    let composed = sjk.and_then(|m| m.get(y));
                    if composed != Some(z) {
                        let (pi, pj, pk) = (&sys.pieces[i].id, &sys.pieces[j].id, &sys.pieces[k].id);
                        let detail = match composed {
                            Some(w) => format!("{pi}->{pk} gives {z} but {pj}->{pk} after {pi}->{pj} gives {w}"),
                            None => format!("{pi}->{pk} gives {z} but {pj}->{pk} is undefined on {y}"),
                        };
                        v.push(Violation::A3 {
                            i: pi.clone(),
                            j: pj.clone(),
                            k: pk.clone(),
                            label: x.to_string(),
                            detail,
                        });
                    }
                }
            }
        }
    }

    // Each gluing must be a simplicial isomorphism between induced subcomplexes.
    for (&(i, j), m) in &eff {
        if i > j {
            continue;
        }
        let dom: BTreeSet<Label> = m.keys().cloned().collect();
        let img: BTreeSet<Label> = m.values().cloned().collect();
        let src = sys.pieces[i].nerve.induced(&dom);
        let tgt = sys.pieces[j].nerve.induced(&img);
        let push = |v: &mut Vec<Violation>, s: &Simplex| {
            v.push(Violation::NotSimplicialIso {
                source: sys.pieces[i].id.clone(),
                target: sys.pieces[j].id.clone(),
                simplex: s.to_string(),
            })
        };
        for s in src.all_simplices() {
            let image = map_simplex(m, s).expect("domain covers induced complex").simplex;
            if !tgt.contains(&image) {
                push(&mut v, s);
            }
        }
        let back = invert(m);
        for s in tgt.all_simplices() {
            let pre = map_simplex(&back, s).expect("image covers induced complex").simplex;
            if !src.contains(&pre) {
                push(&mut v, s);
            }
        }
    }
    ValidationReport { violations: v }
}

/// A piece of a glued diagram: its nerve on global labels and the map from
/// its local labels to global labels (the canonical embedding φ_i on labels).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluedPiece {
    pub id: String,
    pub nerve: SimplicialComplex,
    pub local_to_global: VertexMap,
}

/// The cover-level model of the glued space: per-piece nerves `N_i` on global
/// labels, their union `N`, and the equivalence classes behind each label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluedDiagram {
    field: PrimeField,
    pieces: Vec<GluedPiece>,
    union: SimplicialComplex,
    classes: BTreeMap<Label, Vec<(String, Label)>>,
}

impl GluedDiagram {
    /// Assembles a diagram from pieces already on global labels. Pieces are
    /// sorted by id.
    pub fn from_parts(field: PrimeField, mut pieces: Vec<GluedPiece>) -> Self {
        pieces.sort_by(|a, b| a.id.cmp(&b.id));
        let union = SimplicialComplex::union_all(pieces.iter().map(|p| &p.nerve));
        let mut classes: BTreeMap<Label, Vec<(String, Label)>> = BTreeMap::new();
        for p in &pieces {
            for (local, global) in &p.local_to_global {
                classes.entry(global.clone()).or_default().push((p.id.clone(), local.clone()));
            }
        }
        for members in classes.values_mut() {
            members.sort();
        }
        GluedDiagram { field, pieces, union, classes }
    }

    /// Builds a diagram directly from nerves on shared global labels.
    pub fn from_global_pieces<I, S>(field: PrimeField, pieces: I) -> Self
    where
        I: IntoIterator<Item = (S, SimplicialComplex)>,
        S: Into<String>,
    {
        let pieces = pieces
            .into_iter()
            .map(|(id, nerve)| {
                let local_to_global = nerve.vertex_set().into_iter().map(|l| (l.clone(), l)).collect();
                GluedPiece { id: id.into(), nerve, local_to_global }
            })
            .collect();
        Self::from_parts(field, pieces)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn with_field(&self, field: PrimeField) -> Self {
        GluedDiagram { field, ..self.clone() }
    }

    /// Number of pieces.
    pub fn n(&self) -> usize {
        self.pieces.len()
    }

    pub fn pieces(&self) -> &[GluedPiece] {
        &self.pieces
    }

    pub fn piece_ids(&self) -> Vec<String> {
        self.pieces.iter().map(|p| p.id.clone()).collect()
    }

    pub fn nerve(&self, i: usize) -> &SimplicialComplex {
        &self.pieces[i].nerve
    }

    pub fn union(&self) -> &SimplicialComplex {
        &self.union
    }

    pub fn global_labels(&self) -> impl Iterator<Item = &Label> {
        self.classes.keys()
    }

    /// `(piece id, local label)` members of each global label.
    pub fn classes(&self) -> &BTreeMap<Label, Vec<(String, Label)>> {
        &self.classes
    }

    fn check_index_set(&self, t: &[usize]) -> Result<Vec<usize>, DiagramError> {
        if t.is_empty() {
            return Err(DiagramError::EmptyIndexSet);
        }
        let mut s: Vec<usize> = t.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != t.len() {
            return Err(DiagramError::BadIndexSet(format!("repeated index in {t:?}")));
        }
        if let Some(&bad) = s.iter().find(|&&i| i >= self.n()) {
            return Err(DiagramError::BadIndexSet(format!("index {bad} out of range")));
        }
        Ok(s)
    }

    /// `N_T`: the intersection of the piece nerves indexed by `t`.
    pub fn intersection_nerve(&self, t: &[usize]) -> Result<SimplicialComplex, DiagramError> {
        let t = self.check_index_set(t)?;
        let mut k = self.pieces[t[0]].nerve.clone();
        for &i in &t[1..] {
            k = k.intersect(&self.pieces[i].nerve);
        }
        Ok(k)
    }

    /// Piece ids for an index set.
    pub fn ids_of(&self, t: &[usize]) -> Vec<String> {
        t.iter().map(|&i| self.pieces[i].id.clone()).collect()
    }

    /// Rebuilds an adjunction system: local nerves plus one gluing per
    /// unordered pair, identifying labels that share a global class.
    pub fn to_system(&self) -> AdjunctionSystem {
        let inverses: Vec<VertexMap> = self.pieces.iter().map(|p| invert(&p.local_to_global)).collect();
        let pieces = self
            .pieces
            .iter()
            .zip(&inverses)
            .map(|(p, inv)| LocalPiece {
                id: p.id.clone(),
                labels: p.local_to_global.keys().cloned().collect(),
                nerve: p.nerve.relabel(inv).expect("local_to_global covers the nerve"),
            })
            .collect();
        let mut gluings = Vec::new();
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                let pairs: VertexMap = inverses[i]
                    .iter()
                    .filter_map(|(g, li)| inverses[j].get(g).map(|lj| (li.clone(), lj.clone())))
                    .collect();
                if !pairs.is_empty() {
                    gluings.push(GluingBijection {
                        source: self.pieces[i].id.clone(),
                        target: self.pieces[j].id.clone(),
                        map: pairs,
                    });
                }
            }
        }
        AdjunctionSystem { pieces, gluings, field: self.field }
    }
}

/// Groups labels into equivalence classes and builds the glued diagram.
///
/// Each class is named by the local label of its lexicographically minimal
/// `(piece id, local label)` member; names that would collide are qualified as
/// `label@piece`.
pub fn canonicalize(sys: &AdjunctionSystem) -> Result<GluedDiagram, DiagramError> {
    let report = validate_system(sys);
    if !report.is_valid() {
        return Err(DiagramError::InvalidSystem(report));
    }
    let mut nodes: Vec<(String, Label)> = Vec::new();
    let mut node_index: BTreeMap<(usize, Label), usize> = BTreeMap::new();
    for (i, p) in sys.pieces.iter().enumerate() {
        for l in &p.labels {
            node_index.insert((i, l.clone()), nodes.len());
            nodes.push((p.id.clone(), l.clone()));
        }
    }
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for ((i, j), m) in sys.effective_gluings() {
        for (a, b) in m {
            let x = find(&mut parent, node_index[&(i, a)]);
            let y = find(&mut parent, node_index[&(j, b)]);
            if x != y {
                parent[x.max(y)] = x.min(y);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for n in 0..nodes.len() {
        let r = find(&mut parent, n);
        groups.entry(r).or_default().push(n);
    }
    let mins: Vec<(usize, &(String, Label))> = groups
        .values()
        .map(|members| {
            let m = members.iter().map(|&n| &nodes[n]).min().expect("nonempty class");
            (members[0], m)
        })
        .collect();
    let mut name_count: BTreeMap<&Label, usize> = BTreeMap::new();
    for (_, (_, l)) in &mins {
        *name_count.entry(l).or_default() += 1;
    }
    let mut class_name: BTreeMap<usize, Label> = BTreeMap::new();
    for (root_member, (piece, l)) in &mins {
        let name = if name_count[l] > 1 { Label::new(format!("{l}@{piece}")) } else { l.clone() };
        class_name.insert(find(&mut parent, *root_member), name);
    }

    let mut pieces = Vec::with_capacity(sys.pieces.len());
    for (i, p) in sys.pieces.iter().enumerate() {
        let local_to_global: VertexMap = p
            .labels
            .iter()
            .map(|l| {
                let r = find(&mut parent, node_index[&(i, l.clone())]);
                (l.clone(), class_name[&r].clone())
            })
            .collect();
        let nerve = p.nerve.relabel(&local_to_global).expect("labels cover nerve");
        pieces.push(GluedPiece { id: p.id.clone(), nerve, local_to_global });
    }
    Ok(GluedDiagram::from_parts(sys.field, pieces))
}

/// Replaces the pieces indexed by `j` with a single piece carrying the union of
/// their nerves. The union nerve of the result is that of `d`.
pub fn collapse(d: &GluedDiagram, j: &[usize]) -> Result<GluedDiagram, DiagramError> {
    let j = d.check_index_set(j).map_err(|e| match e {
        DiagramError::EmptyIndexSet => DiagramError::BadIndexSet("empty collapse set".into()),
        other => other,
    })?;
    if j.len() == d.n() {
        return Err(DiagramError::BadIndexSet("cannot collapse every piece".into()));
    }
    let merged_id = d.ids_of(&j).join("+");
    let merged = SimplicialComplex::union_all(j.iter().map(|&i| d.nerve(i)));
    let mut pieces: Vec<GluedPiece> =
        d.pieces.iter().enumerate().filter(|(i, _)| !j.contains(i)).map(|(_, p)| p.clone()).collect();
    let local_to_global = if j.len() == 1 {
        d.pieces[j[0]].local_to_global.clone()
    } else {
        merged.vertex_set().into_iter().map(|l| (l.clone(), l)).collect()
    };
    pieces.push(GluedPiece { id: merged_id, nerve: merged, local_to_global });
    Ok(GluedDiagram::from_parts(d.field, pieces))
}

/// The glued diagram of the subsystem on `j`, with the injection κ of its
/// global labels into those of `d`.
pub fn subsystem_embedding(d: &GluedDiagram, j: &[usize]) -> Result<(GluedDiagram, VertexMap), DiagramError> {
    let j = d.check_index_set(j)?;
    let ids: BTreeSet<String> = d.ids_of(&j).into_iter().collect();
    let sub = canonicalize(&d.to_system().restrict(&ids))?;
    let by_id: BTreeMap<&str, &GluedPiece> = d.pieces.iter().map(|p| (p.id.as_str(), p)).collect();
    let mut kappa = VertexMap::new();
    for (label, members) in sub.classes() {
        let (pid, local) = &members[0];
        kappa.insert(label.clone(), by_id[pid.as_str()].local_to_global[local].clone());
    }
    Ok((sub, kappa))
}

/// The unique vertex map α on the union nerve with α∘φ_i = ψ_i.
///
/// `families[i]` is ψ_i on the local labels of piece `i`; it must be simplicial
/// into `target`, and the family must agree on glued labels.
pub fn induced_map(
    d: &GluedDiagram,
    target: &SimplicialComplex,
    families: &[VertexMap],
) -> Result<VertexMap, DiagramError> {
    if families.len() != d.n() {
        return Err(DiagramError::BadIndexSet(format!("expected {} maps, got {}", d.n(), families.len())));
    }
    for (p, psi) in d.pieces.iter().zip(families) {
        // ψ_i transported to global labels
        let mut on_global = VertexMap::new();
        for (local, global) in &p.local_to_global {
            let img = psi
                .get(local)
                .ok_or_else(|| DiagramError::UndefinedVertex { piece: p.id.clone(), label: local.clone() })?;
            on_global.insert(global.clone(), img.clone());
        }
        p.nerve.check_simplicial(&on_global, target).map_err(|_| {
            let bad = p
                .nerve
                .all_simplices()
                .find(|s| map_simplex(&on_global, s).map_or(true, |img| !target.contains(&img.simplex)))
                .expect("a failing simplex exists");
            let inv = invert(&p.local_to_global);
            DiagramError::NotSimplicial {
                piece: p.id.clone(),
                simplex: map_simplex(&inv, bad).map(|i| i.simplex).unwrap_or_else(|_| bad.clone()),
            }
        })?;
    }
    let by_id: BTreeMap<&str, usize> = d.pieces.iter().enumerate().map(|(i, p)| (p.id.as_str(), i)).collect();
    let mut alpha = VertexMap::new();
    for (label, members) in &d.classes {
        let (first_piece, first_local) = &members[0];
        let value = &families[by_id[first_piece.as_str()]][first_local];
        for (piece, local) in &members[1..] {
            if &families[by_id[piece.as_str()]][local] != value {
                return Err(DiagramError::IncompatibleFamily {
                    label: label.clone(),
                    first: first_piece.clone(),
                    second: piece.clone(),
                });
            }
        }
        alpha.insert(label.clone(), value.clone());
    }
    Ok(alpha)
}

/// All index subsets of `0..n` of size `p`, in lexicographic order.
pub fn subsets_of_size(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= n {
        rec(0, n, p, &mut Vec::new(), &mut out);
    }
    out
}
