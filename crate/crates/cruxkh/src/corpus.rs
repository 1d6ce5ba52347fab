//! The standard diagram corpus shipped in-repo: unknots, kinks, Hopf links,
//! trefoils, the twist family, FI configurations, reducible connected sums
//! and hand-picked Reidemeister variants.
//!
//! File names group invariance families by the stem before the first dot.

use crate::diagram::Compass::{NE, NW, SE, SW};
use crate::diagram::*;

pub fn entries() -> Vec<(String, Diagram)> {
    let mut out: Vec<(String, Diagram)> = Vec::new();
    let mut push = |name: &str, d: Diagram| out.push((name.to_string(), d));

    push("unknot", unknot());
    push("unknot.r1p", kink_unknot(VertexKind::Pos));
    push("unknot.r1n", kink_unknot(VertexKind::Neg));
    // R2 slide on the kinked unknot (the closure of s s^-1 is an unlink,
    // not an unknot, so it lives under its own stem below)
    push(
        "unknot.r2",
        r2_variant(&kink_unknot(VertexKind::Pos), 0).expect("unknot R2"),
    );
    push(
        "unlink2",
        braid_closure(2, &[(0, VertexKind::Pos), (0, VertexKind::Neg)]),
    );

    push("hopf_pos", hopf_link(VertexKind::Pos));
    push("hopf_neg", hopf_link(VertexKind::Neg));

    let tref = trefoil(VertexKind::Neg);
    push("tref_left", tref.clone());
    push(
        "tref_left.r1p",
        r1_variant(&tref, tref.vertices[0].ports[OUT_L], VertexKind::Pos),
    );
    let tref3 = braid_closure(
        3,
        &[
            (0, VertexKind::Neg),
            (1, VertexKind::Neg),
            (0, VertexKind::Neg),
            (1, VertexKind::Neg),
        ],
    );
    push("tref_left.3braid", tref3.clone());
    if let Some(r3) = r3_variant(&tref3, 0, 1, 2) {
        push("tref_left.r3", r3);
    }
    push("tref_right", trefoil(VertexKind::Pos));

    let f8 = figure_eight();
    push("fig8", f8.clone());
    push("fig8.r2", r2_variant(&f8, 1).expect("fig8 R2"));

    for r in 3..=5 {
        push(&format!("d{r}"), twist_knot(r));
    }

    for r in 0..=5 {
        push(&format!("g{r}"), twist_family(r, DoubleResolution::Keep));
    }
    let g0 = twist_family(0, DoubleResolution::Keep);
    push(
        "g0.r1p",
        r1_variant(&g0, g0.vertices[0].ports[OUT_L], VertexKind::Pos),
    );
    // R2 slide over the double point's out-strands: the singular R2 variant
    push("g0.r2", r2_variant(&g0, 0).expect("g0 R2"));

    push("fi_unknot", fi_unknot());
    // trefoil with a kinked double point (FI shape on a nontrivial diagram)
    let kinked = r1_variant(&tref, tref.vertices[0].ports[OUT_L], VertexKind::Pos);
    let kink_id = kinked.max_vertex_id() - 1;
    push("fi_tref", make_double(&kinked, kink_id).expect("fi_tref"));

    // singular figure-eight-like diagram: double one clasp crossing of D(2)
    push("sing_fig8", make_double(&f8, 1).expect("sing fig8"));

    // reducible connected sums (c0 negative, largest id)
    let cut = tref.vertices[0].ports[OUT_L];
    let red = connected_sum_reducible(&tref, cut, &tref, cut);
    let red_c0 = red.max_vertex_id() - 1;
    push("red_sum", red.clone());
    push("red_sum_sing", make_double(&red, red_c0).expect("red sing"));
    // trefoil with a nugatory crossing: trivial second tangle
    let nugatory = {
        let mut g = GeomBuilder::new();
        let a = g.vertex(VertexKind::Neg);
        let b = g.vertex(VertexKind::Neg);
        let c = g.vertex(VertexKind::Neg);
        // 2-braid trefoil with one strand pulled into a distant loop at c0
        g.connect(a, NW, b, SW);
        g.connect(a, NE, b, SE);
        g.connect(b, NW, c, SW);
        g.connect(b, NE, c, SE);
        g.connect(c, NW, a, SW);
        let c0 = g.vertex(VertexKind::Neg);
        g.connect(c, NE, c0, SW);
        g.connect(c0, NE, c0, SE);
        g.connect(c0, NW, a, SE);
        g.build().expect("nugatory trefoil")
    };
    push("red_kink", nugatory.clone());
    push(
        "red_kink_sing",
        make_double(&nugatory, 3).expect("red kink sing"),
    );

    out
}

/// Write the corpus into a directory as JSON files.
pub fn write_to(dir: &std::path::Path) -> std::io::Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut names = Vec::new();
    for (name, d) in entries() {
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, d.serialize() + "\n")?;
        names.push(name);
    }
    Ok(names)
}

/// Load all diagrams from a directory, sorted by file name.
pub fn load_dir(dir: &std::path::Path) -> std::io::Result<Vec<(String, Diagram)>> {
    let mut out = Vec::new();
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
        .collect();
    paths.sort();
    for p in paths {
        let text = std::fs::read_to_string(&p)?;
        let d = Diagram::parse(&text).map_err(|e| {
            std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("{}: {e}", p.display()),
            )
        })?;
        let name = p
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        out.push((name, d));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_files_match_builders() {
        // the in-repo corpus/ directory is generated by `cruxkh corpus`; keep
        // the two in sync
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
        if !dir.exists() {
            panic!("corpus directory missing; run `cruxkh corpus --out corpus`");
        }
        let shipped = load_dir(&dir).unwrap();
        let built: std::collections::BTreeMap<String, Diagram> = entries().into_iter().collect();
        assert_eq!(shipped.len(), built.len(), "entry count drift");
        for (name, d) in shipped {
            assert_eq!(Some(&d), built.get(&name), "{name} drifted");
        }
    }

    #[test]
    fn corpus_validates() {
        for (name, d) in entries() {
            d.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn corpus_names_unique() {
        let names: Vec<String> = entries().into_iter().map(|(n, _)| n).collect();
        let mut dedup = names.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(names.len(), dedup.len());
    }

    #[test]
    fn reducible_diagrams_have_empty_crux_sets() {
        for name in ["red_sum_sing", "red_kink_sing"] {
            let d = entries()
                .into_iter()
                .find(|(n, _)| n == name)
                .map(|(_, d)| d)
                .unwrap();
            assert_eq!(d.double_points().len(), 1);
            assert!(
                crate::smoothing::crux_maps(&d).unwrap().is_empty(),
                "{name}"
            );
        }
    }

    #[test]
    fn nugatory_is_a_knot() {
        let d = entries()
            .into_iter()
            .find(|(n, _)| n == "red_kink")
            .map(|(_, d)| d)
            .unwrap();
        assert_eq!(d.components(), 1);
        assert_eq!(d.vertices.len(), 4);
    }

    #[test]
    fn singular_corpus_sizes_within_bounds() {
        for (name, d) in entries() {
            if d.double_points().len() == 1 {
                assert!(
                    d.vertices.len() <= 8,
                    "{name} exceeds 7 crossings + 1 double point"
                );
            }
        }
    }
}
