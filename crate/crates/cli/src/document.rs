//! The JSON diagram document: parsing, validation and emission.
//!
//! ```json
//! {"field": 2,
//!  "pieces": [{"id": "1", "simplices": [["l", "o1"], ["o1", "r"]]}],
//!  "gluings": [{"i": "1", "j": "2", "pairs": [["l", "l"], ["r", "r"]]}],
//!  "bundle": {"rank": 1,
//!             "transitions": [{"piece": "1", "edge": ["l", "o1"], "value": 1}],
//!             "identifications": [{"i": "1", "j": "2", "label": "r", "value": 1}]},
//!  "refinement": {"fine": { ...a document... },
//!                 "map": [["l1", "l"]],
//!                 "containment": [["l1", ["l"]]]}}
//! ```
//!
//! Simplices are maximal simplices on piece-local labels; closure is taken on
//! load. Bundle entries also use piece-local labels. For rank 1 a value is a
//! sign bit (1 means −1); for rank k it is a k×k matrix given by rows.
//! Refinement maps and containment use global labels of the fine and coarse
//! diagrams.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use nhcech::bundles::{ConstantCocycle, GeneralLinear, PieceBundleData, Sign, StructureGroup, O1};
use nhcech::complex::{Label, Simplex, SimplicialComplex, VertexMap};
use nhcech::diagram::{canonicalize, AdjunctionSystem, DiagramError, GluedDiagram, GluingBijection, LocalPiece};
use nhcech::linalg::{FMatrix, LinalgError, PrimeField};
use nhcech::refinement::RefinementMap;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("{0}")]
    InvalidSystem(DiagramError),
    #[error("invalid {block} block: {message}")]
    InvalidBlock { block: &'static str, message: String },
    #[error("document has no {0} block")]
    MissingBlock(&'static str),
    #[error("this command needs the field F_2, got F_{0}")]
    WrongField(u32),
    #[error("unknown gallery entry {0:?}; try `gallery list`")]
    UnknownGallery(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Parse { location: location.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub id: String,
    pub simplices: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingDoc {
    pub i: String,
    pub j: String,
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub piece: String,
    pub edge: (String, String),
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentificationDoc {
    pub i: String,
    pub j: String,
    pub label: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDoc {
    pub rank: usize,
    #[serde(default)]
    pub transitions: Vec<TransitionDoc>,
    #[serde(default)]
    pub identifications: Vec<IdentificationDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinementDoc {
    pub fine: Box<DiagramDocument>,
    pub map: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub containment: Option<Vec<(String, Vec<String>)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramDocument {
    pub field: u64,
    pub pieces: Vec<PieceDoc>,
    #[serde(default)]
    pub gluings: Vec<GluingDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<BundleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<RefinementDoc>,
}

/// Bundle data with the structure group fixed by the document's rank.
#[derive(Debug, Clone, PartialEq)]
pub enum BundleData {
    Line(PieceBundleData<O1>),
    General(PieceBundleData<GeneralLinear>),
}

impl DiagramDocument {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn field(&self, override_field: Option<u64>) -> Result<PrimeField, CliError> {
        let p = override_field.unwrap_or(self.field);
        PrimeField::new(p).map_err(|e| match e {
            LinalgError::NonPrimeModulus(p) => CliError::NonPrimeModulus(p),
            other => CliError::parse("field", other.to_string()),
        })
    }

    /// The adjunction system as written, before validation.
    pub fn to_system(&self, override_field: Option<u64>) -> Result<AdjunctionSystem, CliError> {
        let field = self.field(override_field)?;
        let mut seen = BTreeSet::new();
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (pi, p) in self.pieces.iter().enumerate() {
            if !seen.insert(p.id.as_str()) {
                return Err(CliError::parse(format!("pieces[{pi}].id"), format!("duplicate piece id {:?}", p.id)));
            }
            let mut gens = Vec::with_capacity(p.simplices.len());
            for (si, s) in p.simplices.iter().enumerate() {
                let at = format!("pieces[{pi}].simplices[{si}]");
                let distinct: BTreeSet<&String> = s.iter().collect();
                if s.is_empty() {
                    return Err(CliError::parse(at, "empty simplex"));
                }
                if distinct.len() != s.len() {
                    return Err(CliError::parse(at, "repeated vertex in simplex"));
                }
                gens.push(Simplex::from_unsorted(s.iter().map(String::as_str)).expect("checked distinct"));
            }
            pieces.push(LocalPiece::new(p.id.clone(), SimplicialComplex::from_generators(gens)));
        }
        let gluings = self
            .gluings
            .iter()
            .map(|g| {
                GluingBijection::new(g.i.clone(), g.j.clone(), g.pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))
            })
            .collect();
        for (gi, g) in self.gluings.iter().enumerate() {
            let domain: BTreeSet<&String> = g.pairs.iter().map(|(a, _)| a).collect();
            if domain.len() != g.pairs.len() {
                return Err(CliError::parse(format!("gluings[{gi}].pairs"), "label listed twice"));
            }
        }
        Ok(AdjunctionSystem::new(field, pieces, gluings))
    }

    /// Parses, validates and canonicalizes.
    pub fn to_diagram(&self, override_field: Option<u64>) -> Result<GluedDiagram, CliError> {
        canonicalize(&self.to_system(override_field)?).map_err(CliError::InvalidSystem)
    }

    pub fn from_system(sys: &AdjunctionSystem) -> Self {
        let pieces = sys
            .pieces
            .iter()
            .map(|p| PieceDoc {
                id: p.id.clone(),
                simplices: p
                    .nerve
                    .maximal_simplices()
                    .iter()
                    .map(|s| s.vertices().iter().map(|l| l.to_string()).collect())
                    .collect(),
            })
            .collect();
        let gluings = sys
            .gluings
            .iter()
            .map(|g| GluingDoc {
                i: g.source.clone(),
                j: g.target.clone(),
                pairs: g.map.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            })
            .collect();
        DiagramDocument { field: sys.field.modulus() as u64, pieces, gluings, bundle: None, refinement: None }
    }

    /// The bundle block resolved against a canonicalized diagram.
    pub fn bundle_data(&self, d: &GluedDiagram) -> Result<Option<BundleData>, CliError> {
        let Some(b) = &self.bundle else { return Ok(None) };
        let bad = |message: String| CliError::InvalidBlock { block: "bundle", message };
        if b.rank == 0 {
            return Err(bad("rank must be positive".into()));
        }
        if b.rank == 1 {
            let section_field = if d.field().modulus() == 2 { PrimeField::F3 } else { d.field() };
            let group = O1::new(section_field).expect("odd field");
            let parse = |v: &Value| match v.as_u64() {
                Some(0) => Ok(Sign::Plus),
                Some(1) => Ok(Sign::Minus),
                _ => Err(bad(format!("rank-1 value must be 0 or 1, got {v}"))),
            };
            Ok(Some(BundleData::Line(resolve(b, d, group, parse)?)))
        } else {
            let group = GeneralLinear { rank: b.rank, field: d.field() };
            let parse = |v: &Value| {
                let rows: Vec<Vec<i64>> =
                    serde_json::from_value(v.clone()).map_err(|e| bad(format!("matrix value expected: {e}")))?;
                if rows.len() != b.rank || rows.iter().any(|r| r.len() != b.rank) {
                    return Err(bad(format!("matrix must be {0}x{0}", b.rank)));
                }
                Ok(FMatrix::from_rows(d.field(), &rows))
            };
            Ok(Some(BundleData::General(resolve(b, d, group, parse)?)))
        }
    }

    /// The refinement block as a refinement map onto this document's diagram.
    pub fn refinement_map(
        &self,
        coarse: &GluedDiagram,
        override_field: Option<u64>,
    ) -> Result<RefinementMap, CliError> {
        let r = self.refinement.as_ref().ok_or(CliError::MissingBlock("refinement"))?;
        if r.fine.refinement.is_some() {
            return Err(CliError::InvalidBlock { block: "refinement", message: "nested refinement".into() });
        }
        let fine = r.fine.to_diagram(override_field)?;
        let mut lambda = VertexMap::new();
        for (a, b) in &r.map {
            if lambda.insert(Label::from(a.as_str()), Label::from(b.as_str())).is_some() {
                return Err(CliError::InvalidBlock { block: "refinement", message: format!("label {a} mapped twice") });
            }
        }
        let containment = r.containment.as_ref().map(|c| {
            c.iter()
                .map(|(f, cs)| (Label::from(f.as_str()), cs.iter().map(|x| Label::from(x.as_str())).collect()))
                .collect::<BTreeMap<Label, BTreeSet<Label>>>()
        });
        Ok(RefinementMap { fine, coarse: coarse.clone(), lambda, containment })
    }
}

fn resolve<G: StructureGroup>(
    b: &BundleDoc,
    d: &GluedDiagram,
    group: G,
    parse: impl Fn(&Value) -> Result<G::Element, CliError>,
) -> Result<PieceBundleData<G>, CliError> {
    let bad = |message: String| CliError::InvalidBlock { block: "bundle", message };
    let index: BTreeMap<&str, usize> = d.pieces().iter().enumerate().map(|(i, p)| (p.id.as_str(), i)).collect();
    let piece = |id: &str| index.get(id).copied().ok_or_else(|| bad(format!("unknown piece {id}")));
    let global = |i: usize, local: &str| {
        d.pieces()[i]
            .local_to_global
            .get(&Label::from(local))
            .cloned()
            .ok_or_else(|| bad(format!("{local} is not a label of piece {}", d.pieces()[i].id)))
    };
    let mut pieces: Vec<ConstantCocycle<G>> =
        (0..d.n()).map(|i| ConstantCocycle::trivial(group.clone(), d.nerve(i).clone())).collect();
    let mut set_edges = BTreeSet::new();
    for t in &b.transitions {
        let i = piece(&t.piece)?;
        let (a, c) = (global(i, &t.edge.0)?, global(i, &t.edge.1)?);
        if a == c {
            return Err(bad(format!("degenerate edge {:?}", t.edge)));
        }
        let e = Simplex::from_unsorted([a.clone(), c.clone()]).expect("distinct");
        if !d.nerve(i).contains(&e) {
            return Err(bad(format!("{:?} is not an edge of piece {}", t.edge, t.piece)));
        }
        if !set_edges.insert((i, e.clone())) {
            return Err(bad(format!("edge {:?} of piece {} listed twice", t.edge, t.piece)));
        }
        let mut v = parse(&t.value)?;
        if !group.is_member(&v) {
            return Err(bad(format!("value on {:?} is not invertible", t.edge)));
        }
        // the document gives g_{first, second}; store it oriented low → high
        if a > c {
            v = group.inverse(&v);
        }
        pieces[i].values.insert(e, v);
    }
    let mut identifications: BTreeMap<(usize, usize), BTreeMap<Label, G::Element>> = BTreeMap::new();
    for k in &b.identifications {
        let (i, j) = (piece(&k.i)?, piece(&k.j)?);
        if i == j {
            return Err(bad(format!("identification of piece {} with itself", k.i)));
        }
        let l = global(i, &k.label)?;
        if !d.nerve(j).has_vertex(&l) {
            return Err(bad(format!("{} is not shared by pieces {} and {}", k.label, k.i, k.j)));
        }
        let mut v = parse(&k.value)?;
        if !group.is_member(&v) {
            return Err(bad(format!("identification at {} is not invertible", k.label)));
        }
        let key = if i < j { (i, j) } else { (j, i) };
        if i > j {
            v = group.inverse(&v);
        }
        if identifications.entry(key).or_default().insert(l, v).is_some() {
            return Err(bad(format!("identification at {} listed twice", k.label)));
        }
    }
    Ok(PieceBundleData { group, pieces, identifications })
}

/// Reads and parses a document file.
pub fn read_document(path: &Path) -> Result<(DiagramDocument, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::parse("file", format!("not UTF-8: {e}")))?;
    Ok((DiagramDocument::from_json(text)?, bytes))
}

/// Loads a document and returns its validated adjunction system.
pub fn load_diagram(path: &Path, override_field: Option<u64>) -> Result<AdjunctionSystem, CliError> {
    let (doc, _) = read_document(path)?;
    let sys = doc.to_system(override_field)?;
    canonicalize(&sys).map_err(CliError::InvalidSystem)?;
    Ok(sys)
}
