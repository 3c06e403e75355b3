//! Built-in adjunction systems: the standard small non-Hausdorff examples, a
//! seeded random generator, and a few cover refinements between them.
//!
//! Piece ids are "1", "2", ...; each gluing is listed once, in the `i < j`
//! direction.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{Label, Simplex, SimplicialComplex, VertexMap};
use crate::diagram::{AdjunctionSystem, GluingBijection, LocalPiece};
use crate::linalg::PrimeField;

fn cx(gens: &[&[&str]]) -> SimplicialComplex {
    SimplicialComplex::from_generators(
        gens.iter().map(|g| Simplex::from_unsorted(g.iter().copied()).expect("gallery simplex")),
    )
}

fn shared(i: usize, j: usize, labels: &[&str]) -> GluingBijection {
    GluingBijection::new(i.to_string(), j.to_string(), labels.iter().map(|&l| (l, l)))
}

/// The line with two origins: two copies of a path `l - o_i - r` glued away
/// from the origin. The union nerve is a 4-cycle.
pub fn two_origin_line() -> AdjunctionSystem {
    AdjunctionSystem::new(
        PrimeField::F2,
        vec![
            LocalPiece::new("1", cx(&[&["l", "o1"], &["o1", "r"]])),
            LocalPiece::new("2", cx(&[&["l", "o2"], &["o2", "r"]])),
        ],
        vec![shared(1, 2, &["l", "r"])],
    )
}

/// `n` half-open branches `[l, b_i]` glued along the common left part `l`.
pub fn branching_line(n: usize) -> AdjunctionSystem {
    let pieces = (1..=n)
        .map(|i| {
            let b = format!("b{i}");
            LocalPiece::new(i.to_string(), cx(&[&["l", b.as_str()]]))
        })
        .collect();
    let mut gluings = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            gluings.push(shared(i, j, &["l"]));
        }
    }
    AdjunctionSystem::new(PrimeField::F2, pieces, gluings)
}

fn circles(n: usize) -> AdjunctionSystem {
    let pieces = (1..=n)
        .map(|i| {
            let c = format!("c{i}");
            LocalPiece::new(i.to_string(), cx(&[&["a", "b"], &["b", c.as_str()], &["a", c.as_str()]]))
        })
        .collect();
    let mut gluings = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            gluings.push(shared(i, j, &["a", "b"]));
        }
    }
    AdjunctionSystem::new(PrimeField::F2, pieces, gluings)
}

/// Two circles glued along a common arc (a circle with a doubled arc). The
/// union nerve is a theta graph.
pub fn bug_eyed_circle() -> AdjunctionSystem {
    circles(2)
}

/// Three circles glued along a common punctured-circle region.
pub fn three_circles() -> AdjunctionSystem {
    circles(3)
}

/// Names of the fixed gallery families (`branching_line_n` takes `n`).
pub const NAMED: [&str; 4] = ["two_origin_line", "branching_line_n", "bug_eyed_circle", "three_circles"];

/// Name of the seeded generator.
pub const RANDOM: &str = "random";

/// A random admissible shared-label system.
///
/// A random global complex of dimension ≤ 2 is drawn on 3–8 labels; each of
/// 2–4 pieces gets a random label subset and the induced subcomplex on it.
/// Local labels carry the piece id as a suffix, so canonicalization has real
/// work to do; gluings are the identity on shared global labels.
pub fn random_admissible(seed: u64) -> AdjunctionSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_pieces = rng.gen_range(2..=4usize);
    let n_labels = rng.gen_range(3..=8usize);
    let labels: Vec<String> = (0..n_labels).map(|i| format!("v{i:02}")).collect();

    let mut gens: Vec<Vec<&str>> = labels.iter().map(|l| vec![l.as_str()]).collect();
    let mut edges = BTreeSet::new();
    for a in 0..n_labels {
        for b in a + 1..n_labels {
            if rng.gen_bool(0.5) {
                edges.insert((a, b));
                gens.push(vec![&labels[a], &labels[b]]);
            }
        }
    }
    for a in 0..n_labels {
        for b in a + 1..n_labels {
            for c in b + 1..n_labels {
                let full = edges.contains(&(a, b)) && edges.contains(&(b, c)) && edges.contains(&(a, c));
                if full && rng.gen_bool(0.4) {
                    gens.push(vec![&labels[a], &labels[b], &labels[c]]);
                }
            }
        }
    }
    let global = SimplicialComplex::from_generators(
        gens.iter().map(|g| Simplex::from_unsorted(g.iter().copied()).expect("distinct labels")),
    );

    let mut members: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_pieces];
    for v in 0..n_labels {
        let mut placed = false;
        for m in members.iter_mut() {
            if rng.gen_bool(0.6) {
                m.insert(v);
                placed = true;
            }
        }
        if !placed {
            let i = rng.gen_range(0..n_pieces);
            members[i].insert(v);
        }
    }
    for m in members.iter_mut() {
        if m.is_empty() {
            m.insert(rng.gen_range(0..n_labels));
        }
    }

    let local = |v: usize, piece: usize| Label::new(format!("{}.{}", labels[v], piece + 1));
    let pieces = members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let set: BTreeSet<Label> = m.iter().map(|&v| Label::new(labels[v].clone())).collect();
            let to_local: VertexMap = m.iter().map(|&v| (Label::new(labels[v].clone()), local(v, i))).collect();
            let nerve = global.induced(&set).relabel(&to_local).expect("total on the subset");
            LocalPiece::new((i + 1).to_string(), nerve)
        })
        .collect();
    let mut gluings = Vec::new();
    for i in 0..n_pieces {
        for j in i + 1..n_pieces {
            let common: Vec<usize> = members[i].intersection(&members[j]).copied().collect();
            if !common.is_empty() {
                gluings.push(GluingBijection {
                    source: (i + 1).to_string(),
                    target: (j + 1).to_string(),
                    map: common.iter().map(|&v| (local(v, i), local(v, j))).collect(),
                });
            }
        }
    }
    AdjunctionSystem::new(PrimeField::F2, pieces, gluings)
}

/// A cover refinement on the level of adjunction systems: a finer system of the
/// same shape and a label map into the coarse system's global labels.
#[derive(Debug, Clone)]
pub struct RefinementExample {
    pub coarse: AdjunctionSystem,
    pub fine: AdjunctionSystem,
    /// Fine global label ↦ coarse global label.
    pub lambda: VertexMap,
    /// Fine global label ↦ coarse labels whose cover element contains it.
    pub containment: Option<BTreeMap<Label, BTreeSet<Label>>>,
}

fn lambda_of(pairs: &[(&str, &str)]) -> VertexMap {
    pairs.iter().map(|&(a, b)| (Label::from(a), Label::from(b))).collect()
}

/// The two-origin line with each of `l` and `r` split into two cover elements.
pub fn two_origin_split() -> RefinementExample {
    let piece = |i: &str| {
        let o = format!("o{i}");
        LocalPiece::new(i, cx(&[&["l1", "l2"], &["l2", o.as_str()], &[o.as_str(), "r2"], &["r1", "r2"]]))
    };
    let fine = AdjunctionSystem::new(
        PrimeField::F2,
        vec![piece("1"), piece("2")],
        vec![shared(1, 2, &["l1", "l2", "r1", "r2"])],
    );
    RefinementExample {
        coarse: two_origin_line(),
        fine,
        lambda: lambda_of(&[("l1", "l"), ("l2", "l"), ("o1", "o1"), ("o2", "o2"), ("r1", "r"), ("r2", "r")]),
        containment: None,
    }
}

/// The doubled circle with the shared arc `a` split in two.
pub fn bug_eyed_split() -> RefinementExample {
    let piece = |i: &str| {
        let c = format!("c{i}");
        LocalPiece::new(i, cx(&[&["a1", "a2"], &["a2", "b"], &["b", c.as_str()], &["a1", c.as_str()]]))
    };
    let fine =
        AdjunctionSystem::new(PrimeField::F2, vec![piece("1"), piece("2")], vec![shared(1, 2, &["a1", "a2", "b"])]);
    RefinementExample {
        coarse: bug_eyed_circle(),
        fine,
        lambda: lambda_of(&[("a1", "a"), ("a2", "a"), ("b", "b"), ("c1", "c1"), ("c2", "c2")]),
        containment: None,
    }
}

/// A single circle covered by three arcs, refined by six smaller arcs. Every
/// other fine arc sits in the overlap of two coarse arcs, so λ has 8 valid
/// choices.
pub fn circle_hexagon() -> RefinementExample {
    let coarse = AdjunctionSystem::new(
        PrimeField::F2,
        vec![LocalPiece::new("1", cx(&[&["a", "b"], &["b", "c"], &["a", "c"]]))],
        vec![],
    );
    let fine = AdjunctionSystem::new(
        PrimeField::F2,
        vec![LocalPiece::new("1", cx(&[&["x", "y"], &["y", "z"], &["z", "w"], &["w", "u"], &["u", "v"], &["v", "x"]]))],
        vec![],
    );
    let containment: BTreeMap<Label, BTreeSet<Label>> =
        [("x", &["a"][..]), ("y", &["a", "b"]), ("z", &["b"]), ("w", &["b", "c"]), ("u", &["c"]), ("v", &["a", "c"])]
            .into_iter()
            .map(|(f, cs)| (Label::from(f), cs.iter().map(|&c| Label::from(c)).collect()))
            .collect();
    RefinementExample {
        coarse,
        fine,
        lambda: lambda_of(&[("u", "c"), ("v", "c"), ("w", "b"), ("x", "a"), ("y", "a"), ("z", "b")]),
        containment: Some(containment),
    }
}
