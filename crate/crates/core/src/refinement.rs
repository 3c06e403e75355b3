//! Refinement maps between two covers of the same glued space and the chain
//! maps they induce.
//!
//! `λ` sends each fine cover element to a coarse element containing it. On
//! nerves this is a simplicial map, and pulling back along it gives chain maps
//! from coarse cochains to fine cochains on the union nerve and on every
//! intersection nerve `N_T`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cech::{cohomology, induced_on_cohomology, pullback_map};
use crate::complex::{map_simplex, Label, VertexMap};
use crate::diagram::GluedDiagram;
use crate::linalg::FMatrix;
use crate::mv::{connecting_cochain, IntersectionLattice};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefinementError {
    #[error("invalid refinement:\n{0}")]
    InvalidRefinement(RefinementReport),
    #[error("no containment relation supplied")]
    NoContainment,
}

/// A label map from a fine diagram to a coarse diagram with the same pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementMap {
    pub fine: GluedDiagram,
    pub coarse: GluedDiagram,
    /// Fine global label ↦ coarse global label.
    pub lambda: VertexMap,
    /// Optional record of which coarse elements contain each fine element.
    /// When present, `λ` must choose from it.
    pub containment: Option<BTreeMap<Label, BTreeSet<Label>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RefinementViolation {
    PieceMismatch {
        fine: Vec<String>,
        coarse: Vec<String>,
    },
    FieldMismatch {
        fine: u32,
        coarse: u32,
    },
    Undefined {
        label: String,
    },
    NotSimplicial {
        simplex: String,
    },
    /// A fine simplex of `N_T` lands outside the coarse `N_T`.
    LeavesPieces {
        pieces: Vec<String>,
        simplex: String,
        image: String,
    },
    NotContained {
        label: String,
        image: String,
    },
}

impl fmt::Display for RefinementViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefinementViolation::PieceMismatch { fine, coarse } => {
                write!(f, "fine pieces {fine:?} differ from coarse pieces {coarse:?}")
            }
            RefinementViolation::FieldMismatch { fine, coarse } => {
                write!(f, "fine field F_{fine} differs from coarse field F_{coarse}")
            }
            RefinementViolation::Undefined { label } => write!(f, "λ is undefined on {label}"),
            RefinementViolation::NotSimplicial { simplex } => {
                write!(f, "image of {simplex} is not a simplex of the coarse union")
            }
            RefinementViolation::LeavesPieces { pieces, simplex, image } => {
                write!(
                    f,
                    "{simplex} in N_{} maps to {image}, outside the coarse N_{}",
                    pieces.join(","),
                    pieces.join(",")
                )
            }
            RefinementViolation::NotContained { label, image } => {
                write!(f, "λ({label}) = {image}, which does not contain {label}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RefinementReport {
    pub violations: Vec<RefinementViolation>,
}

impl RefinementReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for RefinementReport {
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

pub fn validate_refinement(r: &RefinementMap) -> RefinementReport {
    let mut v = Vec::new();
    if r.fine.piece_ids() != r.coarse.piece_ids() {
        v.push(RefinementViolation::PieceMismatch { fine: r.fine.piece_ids(), coarse: r.coarse.piece_ids() });
        return RefinementReport { violations: v };
    }
    if r.fine.field() != r.coarse.field() {
        v.push(RefinementViolation::FieldMismatch {
            fine: r.fine.field().modulus(),
            coarse: r.coarse.field().modulus(),
        });
    }
    for l in r.fine.union().vertex_set() {
        if !r.lambda.contains_key(&l) {
            v.push(RefinementViolation::Undefined { label: l.to_string() });
        }
    }
    if !v.is_empty() {
        return RefinementReport { violations: v };
    }
    if let Some(c) = &r.containment {
        for (l, img) in &r.lambda {
            if !c.get(l).is_some_and(|s| s.contains(img)) {
                v.push(RefinementViolation::NotContained { label: l.to_string(), image: img.to_string() });
            }
        }
    }
    let union_image = |s| map_simplex(&r.lambda, s).expect("λ is total").simplex;
    for s in r.fine.union().all_simplices() {
        if !r.coarse.union().contains(&union_image(s)) {
            v.push(RefinementViolation::NotSimplicial { simplex: s.to_string() });
        }
    }
    let (fl, cl) = (IntersectionLattice::new(&r.fine), IntersectionLattice::new(&r.coarse));
    for p in 1..=fl.n() {
        for ((t, fk), (_, ck)) in fl.level(p).iter().zip(cl.level(p)) {
            for s in fk.all_simplices() {
                let img = union_image(s);
                if !ck.contains(&img) {
                    v.push(RefinementViolation::LeavesPieces {
                        pieces: fl.ids_of(t),
                        simplex: s.to_string(),
                        image: img.to_string(),
                    });
                }
            }
        }
    }
    RefinementReport { violations: v }
}

fn ensure_valid(r: &RefinementMap) -> Result<(), RefinementError> {
    let report = validate_refinement(r);
    if report.is_valid() {
        Ok(())
    } else {
        Err(RefinementError::InvalidRefinement(report))
    }
}

/// Pullback matrices (coarse → fine) along λ in one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementPullback {
    pub degree: usize,
    /// `levels[p]` lists `(T, λ*)` for `|T| = p`; level 0 is the union nerve.
    pub levels: Vec<Vec<(Vec<usize>, FMatrix)>>,
    /// Every pullback commutes with δ.
    pub commutes_with_delta: bool,
}

impl RefinementPullback {
    /// The block-diagonal pullback on a whole level.
    pub fn level_matrix(&self, p: usize) -> FMatrix {
        block(&self.levels[p])
    }
}

/// Per-intersection pullback blocks of one level.
type LevelPullbacks = Vec<(Vec<usize>, FMatrix)>;

fn pullbacks(r: &RefinementMap, fl: &IntersectionLattice, cl: &IntersectionLattice, q: usize) -> Vec<LevelPullbacks> {
    let f = r.fine.field();
    (0..=fl.n())
        .map(|p| {
            fl.level(p)
                .iter()
                .zip(cl.level(p))
                .map(|((t, fk), (_, ck))| {
                    let m = pullback_map(&r.lambda, fk, ck, q, f).expect("validated refinement").matrix;
                    (t.clone(), m)
                })
                .collect()
        })
        .collect()
}

pub fn refine_pullback(r: &RefinementMap, q: usize) -> Result<RefinementPullback, RefinementError> {
    ensure_valid(r)?;
    let (fl, cl) = (IntersectionLattice::new(&r.fine), IntersectionLattice::new(&r.coarse));
    let here = pullbacks(r, &fl, &cl, q);
    let next = pullbacks(r, &fl, &cl, q + 1);
    let commutes_with_delta = (0..=fl.n()).all(|p| {
        let lhs = fl.delta(p, q).mul(&block(&here[p]));
        let rhs = block(&next[p]).mul(&cl.delta(p, q));
        lhs == rhs
    });
    Ok(RefinementPullback { degree: q, levels: here, commutes_with_delta })
}

fn block(level: &[(Vec<usize>, FMatrix)]) -> FMatrix {
    let blocks: Vec<FMatrix> = level.iter().map(|(_, m)| m.clone()).collect();
    FMatrix::block_diagonal(blocks[0].field(), &blocks)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareCheck {
    /// `delta`, `phi_star`, `delta_tilde` or `connecting`.
    pub map: String,
    pub level: usize,
    pub degree: usize,
    pub commutes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InducedCheck {
    pub degree: usize,
    pub coarse_dim: usize,
    pub fine_dim: usize,
    pub rank: usize,
    pub isomorphism: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NaturalityReport {
    pub squares: Vec<SquareCheck>,
    pub induced: Vec<InducedCheck>,
    pub all_commute: bool,
}

/// Checks that λ* commutes with δ, Φ* and every δ̃ for degrees `≤ q_max`, and
/// for two pieces with the connecting homomorphism on classes.
#[allow(clippy::needless_range_loop)]
pub fn naturality_check(r: &RefinementMap, q_max: usize) -> Result<NaturalityReport, RefinementError> {
    ensure_valid(r)?;
    let f = r.fine.field();
    let (fl, cl) = (IntersectionLattice::new(&r.fine), IntersectionLattice::new(&r.coarse));
    let n = fl.n();
    let lam: Vec<Vec<LevelPullbacks>> = (0..=q_max + 1).map(|q| pullbacks(r, &fl, &cl, q)).collect();
    let mut squares = Vec::new();
    for q in 0..=q_max {
        for p in 0..=n {
            let lhs = fl.delta(p, q).mul(&block(&lam[q][p]));
            let rhs = block(&lam[q + 1][p]).mul(&cl.delta(p, q));
            squares.push(SquareCheck { map: "delta".into(), level: p, degree: q, commutes: lhs == rhs });
        }
        for p in 0..n {
            let lhs = fl.level_map(p, q).matrix.mul(&block(&lam[q][p]));
            let rhs = block(&lam[q][p + 1]).mul(&cl.level_map(p, q).matrix);
            let map = if p == 0 { "phi_star" } else { "delta_tilde" };
            squares.push(SquareCheck { map: map.into(), level: p, degree: q, commutes: lhs == rhs });
        }
        if n == 2 {
            let coarse_overlap = cohomology(cl.nerve(&[0, 1]), q, f);
            let fine_union = cohomology(fl.nerve(&[]), q + 1, f);
            let overlap_pullback = &lam[q][2][0].1;
            let union_pullback = &lam[q + 1][0][0].1;
            let commutes = coarse_overlap.representatives.iter().all(|z| {
                let coarse_h = connecting_cochain(&cl, q, z, 0);
                let via_coarse = union_pullback.apply(&coarse_h);
                let via_fine = connecting_cochain(&fl, q, &overlap_pullback.apply(z), 0);
                fine_union.class_of(&via_coarse).expect("cocycle") == fine_union.class_of(&via_fine).expect("cocycle")
            });
            squares.push(SquareCheck { map: "connecting".into(), level: 2, degree: q, commutes });
        }
    }
    let induced = (0..=q_max)
        .map(|q| {
            let m = induced_union(r, &lam[q][0][0].1, q);
            let rank = m.rank();
            InducedCheck {
                degree: q,
                coarse_dim: m.cols(),
                fine_dim: m.rows(),
                rank,
                isomorphism: m.rows() == m.cols() && rank == m.cols(),
            }
        })
        .collect();
    let all_commute = squares.iter().all(|s| s.commutes);
    Ok(NaturalityReport { squares, induced, all_commute })
}

fn induced_union(r: &RefinementMap, pullback: &FMatrix, q: usize) -> FMatrix {
    let f = r.fine.field();
    let coarse = cohomology(r.coarse.union(), q, f);
    let fine = cohomology(r.fine.union(), q, f);
    induced_on_cohomology(pullback, &coarse, &fine).expect("pullbacks are chain maps")
}

/// `λ*: H^q(coarse N) → H^q(fine N)` in representative bases.
pub fn induced_on_union(r: &RefinementMap, q: usize) -> Result<FMatrix, RefinementError> {
    ensure_valid(r)?;
    let pb = pullback_map(&r.lambda, r.fine.union(), r.coarse.union(), q, r.fine.field())
        .expect("validated refinement")
        .matrix;
    Ok(induced_union(r, &pb, q))
}

/// Every λ drawn from the containment relation that passes validation.
pub fn valid_lambdas(r: &RefinementMap) -> Result<Vec<VertexMap>, RefinementError> {
    let c = r.containment.as_ref().ok_or(RefinementError::NoContainment)?;
    let labels: Vec<&Label> = c.keys().collect();
    let choices: Vec<Vec<&Label>> = labels.iter().map(|l| c[*l].iter().collect()).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; labels.len()];
    loop {
        let lambda: VertexMap = labels
            .iter()
            .zip(&choices)
            .zip(&idx)
            .map(|((l, options), &i)| ((*l).clone(), options[i].clone()))
            .collect();
        let candidate = RefinementMap { lambda, ..r.clone() };
        if validate_refinement(&candidate).is_valid() {
            out.push(candidate.lambda);
        }
        // odometer over the choices
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::canonicalize;
    use crate::gallery::{self, RefinementExample};

    fn build(ex: RefinementExample) -> RefinementMap {
        RefinementMap {
            fine: canonicalize(&ex.fine).unwrap(),
            coarse: canonicalize(&ex.coarse).unwrap(),
            lambda: ex.lambda,
            containment: ex.containment,
        }
    }

    fn identity_of(sys: crate::diagram::AdjunctionSystem) -> RefinementMap {
        let d = canonicalize(&sys).unwrap();
        let lambda = d.union().vertex_set().into_iter().map(|l| (l.clone(), l)).collect();
        RefinementMap { fine: d.clone(), coarse: d, lambda, containment: None }
    }

    #[test]
    fn identity_refinement() {
        let r = identity_of(gallery::two_origin_line());
        assert!(validate_refinement(&r).is_valid());
        for q in 0..2 {
            let pb = refine_pullback(&r, q).unwrap();
            assert!(pb.commutes_with_delta);
            for level in &pb.levels {
                for (_, m) in level {
                    assert_eq!(*m, FMatrix::identity(m.field(), m.rows()));
                }
            }
        }
        assert!(naturality_check(&r, 1).unwrap().all_commute);
    }

    #[test]
    fn gallery_refinements_are_natural() {
        for ex in [gallery::two_origin_split(), gallery::bug_eyed_split(), gallery::circle_hexagon()] {
            let r = build(ex);
            assert!(validate_refinement(&r).is_valid(), "{}", validate_refinement(&r));
            let rep = naturality_check(&r, 1).unwrap();
            assert!(rep.all_commute, "{rep:?}");
            assert!(rep.induced.iter().all(|i| i.isomorphism));
        }
    }

    #[test]
    fn two_origin_h1_iso() {
        let r = build(gallery::two_origin_split());
        let m = induced_on_union(&r, 1).unwrap();
        assert_eq!((m.rows(), m.cols(), m.rank()), (1, 1, 1));
        let rep = naturality_check(&r, 1).unwrap();
        assert!(rep.squares.iter().any(|s| s.map == "connecting" && s.commutes));
    }

    #[test]
    fn piece_violation_detected() {
        let mut r = build(gallery::two_origin_split());
        // o1 exists only in piece 1; sending it to o2 leaves the piece
        r.lambda.insert("o1".into(), "o2".into());
        let rep = validate_refinement(&r);
        assert!(rep.violations.iter().any(|v| matches!(v, RefinementViolation::LeavesPieces { .. })));
        assert!(matches!(naturality_check(&r, 1), Err(RefinementError::InvalidRefinement(_))));
    }

    #[test]
    fn containment_is_enforced() {
        let mut r = build(gallery::circle_hexagon());
        r.lambda.insert("x".into(), "b".into());
        assert!(validate_refinement(&r)
            .violations
            .iter()
            .any(|v| matches!(v, RefinementViolation::NotContained { .. })));
    }

    #[test]
    fn contractible_target_h0() {
        // a path refined onto a single vertex
        let fine = canonicalize(&gallery::branching_line(2)).unwrap();
        let coarse_sys = crate::diagram::AdjunctionSystem::new(
            fine.field(),
            vec![
                crate::diagram::LocalPiece::new("1", crate::complex::SimplicialComplex::build([["l"]]).unwrap()),
                crate::diagram::LocalPiece::new("2", crate::complex::SimplicialComplex::build([["l"]]).unwrap()),
            ],
            vec![crate::diagram::GluingBijection::new("1", "2", [("l", "l")])],
        );
        let coarse = canonicalize(&coarse_sys).unwrap();
        let lambda = fine.union().vertex_set().into_iter().map(|l| (l, Label::from("l"))).collect();
        let r = RefinementMap { fine, coarse, lambda, containment: None };
        let m = induced_on_union(&r, 0).unwrap();
        assert_eq!((m.rows(), m.cols(), m.rank()), (1, 1, 1));
    }

    #[test]
    fn all_lambdas_on_hexagon() {
        let r = build(gallery::circle_hexagon());
        let all = valid_lambdas(&r).unwrap();
        assert_eq!(all.len(), 8);
        let reference = induced_on_union(&r, 1).unwrap();
        for lambda in all {
            let other = RefinementMap { lambda, ..r.clone() };
            assert_eq!(induced_on_union(&other, 1).unwrap(), reference);
            assert_eq!(induced_on_union(&other, 0).unwrap(), induced_on_union(&r, 0).unwrap());
        }
        assert_eq!(valid_lambdas(&build(gallery::two_origin_split())), Err(RefinementError::NoContainment));
    }
}
