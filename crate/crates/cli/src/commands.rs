//! One pipeline per command, each producing a [`RunReport`].

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use nhcech::bundles::{
    cocycle_class, colimit_bundle, compatible_sections_dim, enumerate_line_bundles, parallel_sections, restrict_bundle,
    validate_piece_data, BundleError, ColimitOutcome, ConstantCocycle, StructureGroup,
};
use nhcech::cech::cohomology_dims;
use nhcech::diagram::{canonicalize, collapse, subsets_of_size, validate_system, GluedDiagram};
use nhcech::linalg::PrimeField;
use nhcech::mv::{
    assemble_les, connecting_homomorphism_via, count_line_bundles, fibred_product, h1_fibred_check, inductive_product,
    total_cohomology, verify_exact_sequence, IntersectionLattice, MvError,
};
use nhcech::refinement::{induced_on_union, naturality_check, valid_lambdas, validate_refinement, RefinementMap};

use crate::document::{read_document, BundleData, CliError, DiagramDocument};
use crate::gallery;
use crate::report::{BatchCase, BatchReport, RunReport, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Cohomology,
    Mv,
    Fibred,
    Bundles,
    Count,
    CollapseCheck,
    RefineCheck,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Validate,
        Command::Cohomology,
        Command::Mv,
        Command::Fibred,
        Command::Bundles,
        Command::Count,
        Command::CollapseCheck,
        Command::RefineCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Cohomology => "cohomology",
            Command::Mv => "mv",
            Command::Fibred => "fibred",
            Command::Bundles => "bundles",
            Command::Count => "count",
            Command::CollapseCheck => "collapse-check",
            Command::RefineCheck => "refine-check",
        }
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Options {
    /// Overrides the document's field.
    pub field: Option<u64>,
    pub qmax: Option<usize>,
    pub q: Option<usize>,
    /// Records wall time in the report (which makes it nondeterministic).
    pub timing: bool,
}

/// Runs a command on a document file.
pub fn run_file(cmd: Command, path: &Path, opts: &Options) -> Result<RunReport, CliError> {
    let (doc, bytes) = read_document(path)?;
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    run_document(cmd, &name, &bytes, &doc, opts)
}

/// Runs a command on a parsed document; `bytes` are what the digest covers.
pub fn run_document(
    cmd: Command,
    name: &str,
    bytes: &[u8],
    doc: &DiagramDocument,
    opts: &Options,
) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let field = doc.field(opts.field)?;
    let mut r = RunReport::new(cmd.name(), name, bytes, field.modulus());
    match cmd {
        Command::Validate => validate(&mut r, doc, opts)?,
        Command::Cohomology => cohomology(&mut r, &doc.to_diagram(opts.field)?, opts),
        Command::Mv => mv(&mut r, &doc.to_diagram(opts.field)?),
        Command::Fibred => fibred(&mut r, &doc.to_diagram(opts.field)?, opts),
        Command::Bundles => bundles(&mut r, doc, &doc.to_diagram(opts.field)?)?,
        Command::Count => count(&mut r, &doc.to_diagram(opts.field)?)?,
        Command::CollapseCheck => collapse_check(&mut r, &doc.to_diagram(opts.field)?),
        Command::RefineCheck => {
            let d = doc.to_diagram(opts.field)?;
            refine_check(&mut r, &doc.refinement_map(&d, opts.field)?)
        }
    }
    if opts.timing {
        r.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(r)
}

/// Runs a command over every gallery entry in parallel; output order is the
/// gallery order. `refine-check` skips entries without a refinement block.
pub fn run_gallery(cmd: Command, opts: &Options) -> BatchReport {
    let entries: Vec<(String, DiagramDocument)> = gallery::batch()
        .into_iter()
        .filter(|(_, doc)| cmd != Command::RefineCheck || doc.refinement.is_some())
        .collect();
    let cases = entries
        .par_iter()
        .map(|(name, doc)| {
            let bytes = doc.to_json().into_bytes();
            match run_document(cmd, name, &bytes, doc, opts) {
                Ok(report) => {
                    BatchCase { name: name.clone(), exit_code: report.exit_code(), report: Some(report), error: None }
                }
                Err(e) => BatchCase { name: name.clone(), exit_code: 2, report: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    BatchReport { command: cmd.name().to_string(), cases }
}

/// Highest degree worth reporting: the union's dimension, and at least `floor`.
fn top(d: &GluedDiagram, floor: usize) -> usize {
    d.union().dimension().unwrap_or(0).max(floor)
}

fn dims_cell(dims: &[usize]) -> String {
    dims.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn validate(r: &mut RunReport, doc: &DiagramDocument, opts: &Options) -> Result<(), CliError> {
    let sys = doc.to_system(opts.field)?;
    let report = validate_system(&sys);
    let mut t = Table::new("violations", &["kind", "witness"]);
    for v in &report.violations {
        let kind = serde_json::to_value(v).expect("serializes")["kind"].as_str().unwrap_or_default().to_string();
        t.row([kind, v.to_string()]);
    }
    r.detail("violations", &report.violations);
    let n = report.violations.len();
    r.verdict(
        "adjunction system valid",
        report.is_valid(),
        if n == 0 { String::new() } else { format!("{n} violations") },
    );
    if !report.is_valid() {
        r.tables.push(t);
        return Ok(());
    }
    let d = canonicalize(&sys).map_err(CliError::InvalidSystem)?;
    let mut pieces = Table::new("pieces", &["piece", "labels", "simplices", "dim"]);
    for (i, p) in d.pieces().iter().enumerate() {
        let k = d.nerve(i);
        pieces.row([
            p.id.clone(),
            k.vertex_set().len().to_string(),
            k.len().to_string(),
            k.dimension().unwrap_or(0).to_string(),
        ]);
    }
    r.tables.push(pieces);
    let mut classes = Table::new("global labels", &["label", "members"]);
    for (label, members) in d.classes() {
        let m: Vec<String> = members.iter().map(|(p, l)| format!("{p}:{l}")).collect();
        classes.row([label.to_string(), m.join(" ")]);
    }
    r.tables.push(classes);
    r.detail("global_labels", d.global_labels().map(|l| l.to_string()).collect::<Vec<_>>());
    if doc.bundle.is_some() {
        let ok = match doc.bundle_data(&d)? {
            Some(BundleData::Line(data)) => validate_piece_data(&d, &data),
            Some(BundleData::General(data)) => validate_piece_data(&d, &data),
            None => Ok(()),
        };
        r.verdict("bundle data consistent", ok.is_ok(), ok.err().map(|e| e.to_string()).unwrap_or_default());
    }
    if doc.refinement.is_some() {
        let rep = validate_refinement(&doc.refinement_map(&d, opts.field)?);
        r.verdict("refinement valid", rep.is_valid(), if rep.is_valid() { String::new() } else { rep.to_string() });
        r.detail("refinement_violations", &rep.violations);
    }
    Ok(())
}

fn cohomology(r: &mut RunReport, d: &GluedDiagram, opts: &Options) {
    let qmax = opts.qmax.unwrap_or_else(|| top(d, 0));
    let f = d.field();
    let header: Vec<String> = ["space".to_string()].into_iter().chain((0..=qmax).map(|q| format!("H^{q}"))).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new("cohomology dimensions", &header);
    let union = cohomology_dims(d.union(), qmax, f);
    t.row(std::iter::once("N".to_string()).chain(union.iter().map(usize::to_string)));
    let lat = IntersectionLattice::new(d);
    let mut per_set = Vec::new();
    for p in 1..=lat.n() {
        for (s, k) in lat.level(p) {
            let dims = cohomology_dims(k, qmax, f);
            let name = format!("N_{}", lat.ids_of(s).join(","));
            t.row(std::iter::once(name.clone()).chain(dims.iter().map(usize::to_string)));
            per_set.push((lat.ids_of(s), dims));
        }
    }
    r.tables.push(t);
    let total = total_cohomology(d, qmax);
    r.verdict("total complex D^2 = 0", total.d_squared_zero, "");
    r.verdict(
        "total-complex dimensions equal union dimensions",
        total.agrees,
        format!("total [{}], union [{}]", dims_cell(&total.dims), dims_cell(&union)),
    );
    r.detail("union", &union);
    r.detail("intersections", per_set);
    r.detail("total", total);
}

fn mv(r: &mut RunReport, d: &GluedDiagram) {
    let qmax = top(d, 2);
    let mut t = Table::new("generalized sequence", &["q", "level", "dim", "rank in", "nullity out", "exact"]);
    let mut verdicts = Vec::new();
    for q in 0..=qmax {
        let v = verify_exact_sequence(d, q);
        for p in &v.positions {
            t.row([
                q.to_string(),
                p.level.to_string(),
                p.dim.to_string(),
                p.rank_in.to_string(),
                p.nullity_out.to_string(),
                yes(p.exact).into(),
            ]);
        }
        r.verdict(format!("sequence exact in degree {q}"), v.exact, "");
        verdicts.push(v);
    }
    r.tables.push(t);
    r.detail("exactness", verdicts);

    let total = total_cohomology(d, qmax);
    let union = cohomology_dims(d.union(), qmax, d.field());
    r.verdict("total complex D^2 = 0", total.d_squared_zero, "");
    r.verdict(
        "total-complex dimensions equal union dimensions",
        total.agrees,
        format!("total [{}], union [{}]", dims_cell(&total.dims), dims_cell(&union)),
    );
    r.detail("total", &total);

    if d.n() == 1 {
        r.flag("single piece: no long exact sequence");
        return;
    }
    let two = if d.n() == 2 {
        d.clone()
    } else {
        let c = collapse(d, &(0..d.n() - 1).collect::<Vec<_>>()).expect("proper nonempty subset");
        r.flag(format!("long exact sequence taken on the two-piece collapse {}", c.piece_ids().join(" | ")));
        c
    };
    let les = assemble_les(&two, qmax).expect("two pieces");
    let ids = two.piece_ids();
    let mut lt = Table::new(
        "long exact sequence",
        &[
            "q",
            "H(N)",
            &format!("H(N_{})", ids[0]),
            &format!("H(N_{})", ids[1]),
            "H(N_12)",
            "rank phi",
            "rank alpha",
            "rank delta*",
            "coker+ker",
        ],
    );
    for g in &les.degrees {
        lt.row([
            g.degree.to_string(),
            g.h_union.to_string(),
            g.h_pieces[0].to_string(),
            g.h_pieces[1].to_string(),
            g.h_overlap.to_string(),
            g.rank_phi.to_string(),
            g.rank_alpha.to_string(),
            g.rank_connecting.to_string(),
            format!("{}+{}", g.coker_alpha_prev, g.ker_alpha),
        ]);
    }
    r.tables.push(lt);
    r.verdict(
        "long exact sequence exact",
        les.exact,
        les.positions.iter().filter(|p| !p.exact).map(|p| p.label.clone()).collect::<Vec<_>>().join(", "),
    );
    r.verdict("dim H^q(N) = dim coker alpha_(q-1) + dim ker alpha_q", les.identity_holds, "");
    let les_dims: Vec<usize> = les.degrees.iter().map(|g| g.h_union).collect();
    r.verdict("sequence dimensions equal union dimensions", les_dims == union, format!("[{}]", dims_cell(&les_dims)));
    let lift_free = (0..qmax).all(|q| {
        connecting_homomorphism_via(&two, q, 0).expect("binary").matrix
            == connecting_homomorphism_via(&two, q, 1).expect("binary").matrix
    });
    r.verdict("connecting map independent of the lifted piece", lift_free, "");
    r.detail("les", les);
}

fn fibred(r: &mut RunReport, d: &GluedDiagram, opts: &Options) {
    let degrees: Vec<usize> = match opts.q {
        Some(q) => vec![q],
        None => (0..=top(d, 2)).collect(),
    };
    let mut t = Table::new("fibred products of cochains", &["q", "dim product", "dim C^q(N)", "rank phi", "inductive"]);
    let mut rows = Vec::new();
    for &q in &degrees {
        let fp = fibred_product(d, q);
        let ind = inductive_product(d, q);
        t.row([
            q.to_string(),
            fp.dim().to_string(),
            fp.union_dim.to_string(),
            fp.phi_rank.to_string(),
            ind.dim().to_string(),
        ]);
        r.verdict(format!("product equals image of phi in degree {q}"), fp.equals_image(), "");
        r.verdict(format!("inductive product agrees in degree {q}"), ind.agrees(), "");
        rows.push(serde_json::json!({
            "degree": q, "dim": fp.dim(), "union_dim": fp.union_dim, "phi_rank": fp.phi_rank,
            "inductive_dim": ind.dim(), "basis": fp.basis,
        }));
    }
    r.tables.push(t);
    r.detail("products", rows);

    let h = h1_fibred_check(d);
    let mut ht = Table::new("first cohomology versus fibred product", &["H^1(N)", "fibred", "hypothesis"]);
    ht.row([h.h1_union.to_string(), h.h1_fibred.to_string(), yes(h.hypothesis_holds).to_string()]);
    r.tables.push(ht);
    match h.holds {
        Some(eq) => r.verdict("H^1(N) equals fibred product of H^1", eq, format!("{} vs {}", h.h1_union, h.h1_fibred)),
        None => r.flag(format!(
            "connectivity hypothesis fails (disconnected: {}); H^1(N) = {} vs fibred {}",
            h.disconnected.iter().map(|s| format!("N_{}", s.join(","))).collect::<Vec<_>>().join(" "),
            h.h1_union,
            h.h1_fibred
        )),
    }
    r.detail("h1_check", h);
}

fn edge_signs<G: StructureGroup>(g: &ConstantCocycle<G>) -> String {
    let minus: Vec<String> = g
        .values
        .iter()
        .filter(|(_, v)| **v != g.group.identity())
        .map(|(e, _)| format!("{}-{}", e.vertices()[0], e.vertices()[1]))
        .collect();
    if minus.is_empty() {
        "-".into()
    } else {
        minus.join(" ")
    }
}

fn coords_cell(c: &[u32]) -> String {
    if c.is_empty() {
        "()".into()
    } else {
        format!("({})", c.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
    }
}

fn bundle_err(e: BundleError) -> CliError {
    match e {
        BundleError::WrongField(f) => CliError::WrongField(f.modulus()),
        other => CliError::InvalidBlock { block: "bundle", message: other.to_string() },
    }
}

fn bundles(r: &mut RunReport, doc: &DiagramDocument, d: &GluedDiagram) -> Result<(), CliError> {
    let classes = enumerate_line_bundles(d).map_err(bundle_err)?;
    let h1 = cohomology_dims(d.union(), 1, PrimeField::F2)[1];
    r.verdict(
        "one class per element of H^1(N; F_2)",
        classes.len() == 1 << h1,
        format!("{} classes, dim H^1 = {h1}", classes.len()),
    );
    let mut t =
        Table::new("line-bundle classes", &["class", "-1 on edges", "sections", "round trip", "glued sections"]);
    let mut details = Vec::new();
    let mut round_trips = true;
    let mut sections_agree = true;
    for g in &classes {
        let coords = cocycle_class(g).map_err(bundle_err)?;
        let sections = parallel_sections(g).dim();
        let data = restrict_bundle(g, d);
        let (back, glued) = match colimit_bundle(d, &data).map_err(bundle_err)? {
            ColimitOutcome::Glued { cocycle, .. } => {
                let back = cocycle_class(&cocycle).map_err(bundle_err)?;
                (Some(back), Some(compatible_sections_dim(d, &data) == parallel_sections(&cocycle).dim()))
            }
            ColimitOutcome::Obstructed { .. } => (None, None),
        };
        let same = back.as_deref() == Some(coords.as_slice());
        round_trips &= same;
        sections_agree &= glued == Some(true);
        t.row([
            coords_cell(&coords),
            edge_signs(g),
            sections.to_string(),
            yes(same).into(),
            yes(glued == Some(true)).into(),
        ]);
        details.push(serde_json::json!({
            "class": coords,
            "minus_edges": edge_signs(g),
            "parallel_sections": sections,
            "round_trip": same,
        }));
    }
    r.tables.push(t);
    r.verdict("restriction then colimit preserves every class", round_trips, "");
    r.verdict("glued section dimension equals colimit section dimension", sections_agree, "");
    r.detail("classes", details);

    match doc.bundle_data(d)? {
        None => {}
        Some(BundleData::Line(data)) => document_bundle(r, d, &data, true)?,
        Some(BundleData::General(data)) => document_bundle(r, d, &data, false)?,
    }
    Ok(())
}

fn document_bundle<G: StructureGroup>(
    r: &mut RunReport,
    d: &GluedDiagram,
    data: &nhcech::bundles::PieceBundleData<G>,
    line: bool,
) -> Result<(), CliError> {
    let mut t = Table::new("document bundle", &["rank", "outcome", "class", "parallel sections", "glued sections"]);
    let rank = data.group.rank().to_string();
    match colimit_bundle(d, data) {
        Err(BundleError::IncompatibleData(msg)) => {
            t.row([rank, "incompatible".into(), "-".into(), "-".into(), "-".into()]);
            r.verdict("document bundle data consistent", false, msg);
        }
        Err(e) => return Err(bundle_err(e)),
        Ok(ColimitOutcome::Obstructed { label, cycle }) => {
            t.row([rank, "obstructed".into(), "-".into(), "-".into(), "-".into()]);
            r.flag(format!("identifications around pieces {} disagree at {label}; no colimit", cycle.join(",")));
            r.detail(
                "document_bundle",
                serde_json::json!({"outcome": "obstructed", "label": label.to_string(), "cycle": cycle}),
            );
        }
        Ok(ColimitOutcome::Glued { cocycle, .. }) => {
            let class = if line { Some(cocycle_class(&cocycle).map_err(bundle_err)?) } else { None };
            let sections = parallel_sections(&cocycle).dim();
            let glued = compatible_sections_dim(d, data);
            let class_cell = class.as_deref().map(coords_cell).unwrap_or_else(|| "-".into());
            t.row([rank, "glued".into(), class_cell, sections.to_string(), glued.to_string()]);
            r.verdict(
                "document bundle: glued sections equal colimit sections",
                glued == sections,
                format!("{glued} vs {sections}"),
            );
            r.detail(
                "document_bundle",
                serde_json::json!({"outcome": "glued", "class": class, "parallel_sections": sections, "glued_sections": glued}),
            );
        }
    }
    r.tables.push(t);
    Ok(())
}

fn count(r: &mut RunReport, d: &GluedDiagram) -> Result<(), CliError> {
    let c = count_line_bundles(d).map_err(|e| match e {
        MvError::WrongField(f) => CliError::WrongField(f.modulus()),
        other => CliError::Usage(other.to_string()),
    })?;
    let mut lv = Table::new("first cohomology of intersections", &["level", "pieces", "H^1"]);
    for (p, level) in c.levels.iter().enumerate() {
        for e in level {
            lv.row([(p + 1).to_string(), e.pieces.join(","), e.h1.to_string()]);
        }
    }
    r.tables.push(lv);
    let mut ft = Table::new("line-bundle count", &["form", "value"]);
    ft.row(["exponent S".to_string(), c.exponent.to_string()]);
    ft.row([
        "dimension form 2^S".to_string(),
        c.dimension_form.map(|v| v.to_string()).unwrap_or_else(|| "undefined".into()),
    ]);
    ft.row(["literal form".to_string(), c.literal_form.to_string()]);
    ft.row(["ground truth 2^dim H^1(N)".to_string(), c.ground_truth.to_string()]);
    r.tables.push(ft);

    let enumerated = enumerate_line_bundles(d).map_err(bundle_err)?.len() as u128;
    r.verdict("ground truth equals enumerated classes", enumerated == c.ground_truth, format!("{enumerated} classes"));
    let hypotheses = c.connected_hypothesis && c.surjective_hypothesis;
    if hypotheses {
        r.verdict("dimension form equals ground truth", c.dimension_form_agrees, "");
    } else {
        let mut why = Vec::new();
        if !c.connected_hypothesis {
            why.push(format!(
                "disconnected {}",
                c.disconnected.iter().map(|s| format!("N_{}", s.join(","))).collect::<Vec<_>>().join(" ")
            ));
        }
        if !c.surjective_hypothesis {
            why.push(format!("non-surjective levels {:?}", c.non_surjective_levels));
        }
        r.flag(format!(
            "hypotheses fail ({}); dimension form {} vs ground truth {} is not a verdict",
            why.join("; "),
            c.dimension_form.map(|v| v.to_string()).unwrap_or_else(|| "undefined".into()),
            c.ground_truth
        ));
    }
    if !c.literal_form_agrees {
        r.flag(format!("literal form mismatch: {} vs ground truth {}", c.literal_form, c.ground_truth));
    }
    r.detail("count", c);
    Ok(())
}

fn collapse_check(r: &mut RunReport, d: &GluedDiagram) {
    let qmax = top(d, 2);
    let union = cohomology_dims(d.union(), qmax, d.field());
    if d.n() < 2 {
        r.flag("single piece: nothing to collapse");
        return;
    }
    let mut t = Table::new("collapses", &["collapsed", "pieces", "union dims", "total dims", "exact"]);
    let mut rows = Vec::new();
    for size in 1..d.n() {
        for j in subsets_of_size(d.n(), size) {
            let c = collapse(d, &j).expect("proper nonempty subset");
            let dims = cohomology_dims(c.union(), qmax, c.field());
            let total = total_cohomology(&c, qmax);
            let exact = (0..=qmax).all(|q| verify_exact_sequence(&c, q).exact);
            let name = d.ids_of(&j).join("+");
            t.row([name.clone(), c.n().to_string(), dims_cell(&dims), dims_cell(&total.dims), yes(exact).into()]);
            r.verdict(
                format!("collapse {name} preserves cohomology and exactness"),
                dims == union && total.dims == union && exact,
                "",
            );
            rows.push(serde_json::json!({"collapsed": d.ids_of(&j), "union_dims": dims, "total_dims": total.dims, "exact": exact}));
        }
    }
    r.tables.push(t);
    r.detail("union_dims", union);
    r.detail("collapses", rows);
}

fn refine_check(r: &mut RunReport, map: &RefinementMap) {
    let rep = validate_refinement(map);
    r.verdict("refinement valid", rep.is_valid(), if rep.is_valid() { String::new() } else { rep.to_string() });
    r.detail("violations", &rep.violations);
    if !rep.is_valid() {
        return;
    }
    let qmax = top(&map.coarse, 1);
    let nat = naturality_check(map, qmax).expect("validated");
    let mut st = Table::new("naturality squares", &["map", "level", "q", "commutes"]);
    for s in &nat.squares {
        st.row([s.map.clone(), s.level.to_string(), s.degree.to_string(), yes(s.commutes).into()]);
    }
    r.tables.push(st);
    r.verdict("every naturality square commutes", nat.all_commute, format!("{} squares", nat.squares.len()));
    let mut it = Table::new("induced map on H(N)", &["q", "coarse", "fine", "rank", "isomorphism"]);
    for i in &nat.induced {
        it.row([
            i.degree.to_string(),
            i.coarse_dim.to_string(),
            i.fine_dim.to_string(),
            i.rank.to_string(),
            yes(i.isomorphism).into(),
        ]);
        r.verdict(format!("induced map on H^{} is an isomorphism", i.degree), i.isomorphism, "");
    }
    r.tables.push(it);
    if map.containment.is_some() {
        let lambdas = valid_lambdas(map).expect("containment present");
        let same = (0..=qmax).all(|q| {
            let base = induced_on_union(map, q).expect("validated");
            lambdas.iter().all(|l| {
                let other = RefinementMap { lambda: l.clone(), ..map.clone() };
                induced_on_union(&other, q).expect("valid choice") == base
            })
        });
        r.verdict("induced map independent of the choice of lambda", same, format!("{} valid choices", lambdas.len()));
    } else {
        r.flag("no containment relation: independence of lambda not checked");
    }
    r.detail("naturality", nat);
}
