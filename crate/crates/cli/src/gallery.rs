//! Gallery entries as documents, with their bundle and refinement blocks.

use serde_json::Value;

use nhcech::gallery::{self, RefinementExample};

use crate::document::{BundleDoc, CliError, DiagramDocument, IdentificationDoc, RefinementDoc};

pub const DEFAULT_N: usize = 3;
pub const DEFAULT_SEED: u64 = 0;

/// One line per entry for `gallery list`.
pub fn listing() -> Vec<String> {
    vec![
        "two_origin_line      line with two origins; 2 pieces, union nerve a 4-cycle".into(),
        "branching_line_n     n branches sharing the left part (--n, default 3, n >= 2)".into(),
        "bug_eyed_circle      circle with a doubled arc; 2 pieces".into(),
        "three_circles        three circles along a common region; 3 pieces".into(),
        "random               seeded admissible diagram, 2 to 4 pieces (--seed, default 0)".into(),
    ]
}

fn with_refinement(mut doc: DiagramDocument, ex: RefinementExample) -> DiagramDocument {
    let fine = DiagramDocument::from_system(&ex.fine);
    doc.refinement = Some(RefinementDoc {
        fine: Box::new(fine),
        map: ex.lambda.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        containment: ex.containment.map(|c| {
            c.into_iter().map(|(f, cs)| (f.to_string(), cs.into_iter().map(|x| x.to_string()).collect())).collect()
        }),
    });
    doc
}

/// The document for a gallery entry.
pub fn document(name: &str, n: usize, seed: u64) -> Result<DiagramDocument, CliError> {
    let doc = match name {
        "two_origin_line" => {
            let mut doc = DiagramDocument::from_system(&gallery::two_origin_line());
            // identify the two copies of r through −1
            doc.bundle = Some(BundleDoc {
                rank: 1,
                transitions: Vec::new(),
                identifications: vec![IdentificationDoc {
                    i: "1".into(),
                    j: "2".into(),
                    label: "r".into(),
                    value: Value::from(1),
                }],
            });
            with_refinement(doc, gallery::two_origin_split())
        }
        "branching_line_n" => {
            if n < 2 {
                return Err(CliError::Usage(format!("branching_line_n needs n >= 2, got {n}")));
            }
            DiagramDocument::from_system(&gallery::branching_line(n))
        }
        "bug_eyed_circle" => {
            with_refinement(DiagramDocument::from_system(&gallery::bug_eyed_circle()), gallery::bug_eyed_split())
        }
        "three_circles" => DiagramDocument::from_system(&gallery::three_circles()),
        "random" => DiagramDocument::from_system(&gallery::random_admissible(seed)),
        other => return Err(CliError::UnknownGallery(other.to_string())),
    };
    Ok(doc)
}

/// The entries `--all-gallery` runs over: every named family (branching line
/// for n = 2 and 3) and the generator at seed 0.
pub fn batch() -> Vec<(String, DiagramDocument)> {
    let mut out = Vec::new();
    for (label, name, n) in [
        ("two_origin_line", "two_origin_line", DEFAULT_N),
        ("branching_line_2", "branching_line_n", 2),
        ("branching_line_3", "branching_line_n", 3),
        ("bug_eyed_circle", "bug_eyed_circle", DEFAULT_N),
        ("three_circles", "three_circles", DEFAULT_N),
    ] {
        out.push((label.to_string(), document(name, n, DEFAULT_SEED).expect("named entry")));
    }
    out.push((format!("random_seed_{DEFAULT_SEED}"), document("random", DEFAULT_N, DEFAULT_SEED).expect("generator")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_origin_document() {
        let doc = document("two_origin_line", DEFAULT_N, 0).unwrap();
        let d = doc.to_diagram(None).unwrap();
        assert_eq!(d.n(), 2);
        let labels: Vec<String> = d.global_labels().map(|l| l.to_string()).collect();
        assert_eq!(labels, ["l", "o1", "o2", "r"]);
        assert!(doc.bundle_data(&d).unwrap().is_some());
        assert!(doc.refinement_map(&d, None).is_ok());
    }

    #[test]
    fn branching_three() {
        let d = document("branching_line_n", 3, 0).unwrap().to_diagram(None).unwrap();
        assert_eq!(d.n(), 3);
        assert!(d.intersection_nerve(&[0, 1, 2]).unwrap().has_vertex(&"l".into()));
        assert!(matches!(document("branching_line_n", 1, 0), Err(CliError::Usage(_))));
    }

    #[test]
    fn unknown_and_list() {
        assert!(matches!(document("moebius", 3, 0), Err(CliError::UnknownGallery(_))));
        assert_eq!(listing().len(), 5);
    }

    #[test]
    fn emission_is_stable() {
        for (_, doc) in batch() {
            let text = doc.to_json();
            let again = DiagramDocument::from_json(&text).unwrap();
            assert_eq!(again.to_json(), text);
            let a = again.to_diagram(None).unwrap();
            let b = doc.to_diagram(None).unwrap();
            assert_eq!(a, b);
        }
    }
}
