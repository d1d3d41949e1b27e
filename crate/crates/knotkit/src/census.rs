//! A bundled corpus of small knots with their tabulated genera, used to
//! exercise the reduction pipeline, plus a simple multi-diagram file format.

use crate::diagram::{Diagram, PdError};
use crate::gen::{alternating_connect_sum, braid_closure, double_twist, pretzel, torus_two, twist_knot};

/// One corpus knot: a concrete diagram together with the Seifert genus of
/// the underlying knot as tabulated in the standard knot atlases.
#[derive(Debug, Clone)]
pub struct CensusEntry {
    pub name: String,
    pub diagram: Diagram,
    pub genus: u32,
}

fn entry(name: &str, diagram: Diagram, genus: u32) -> CensusEntry {
    CensusEntry { name: name.to_string(), diagram: diagram.with_name(Some(name.to_string())), genus }
}

/// Every bundled knot: torus and twist families, double twists, pretzels,
/// two non-alternating braid closures, connect sums, and mirrors. All
/// diagrams have at most nine crossings.
pub fn bundled_census() -> Vec<CensusEntry> {
    let tre = torus_two(3);
    let mut v = Vec::new();

    for k in [3usize, 5, 7, 9] {
        v.push(entry(&format!("torus(2,{k})"), torus_two(k), (k as u32 - 1) / 2));
    }
    for n in 2..=7usize {
        v.push(entry(&format!("twist-{n}"), twist_knot(n), 1));
    }
    for (p, q) in [(4, 2), (2, 4), (4, 4), (6, 2), (2, 6)] {
        v.push(entry(&format!("double-twist({p},{q})"), double_twist(p, q), 1));
    }
    let pretzels: &[(&[usize], u32)] = &[
        (&[1, 1, 3], 1),
        (&[1, 1, 5], 1),
        (&[1, 3, 3], 1),
        (&[1, 1, 7], 1),
        (&[1, 3, 5], 1),
        (&[3, 3, 3], 1),
        (&[1, 1, 1, 1, 3], 2),
        (&[1, 1, 1, 3, 3], 2),
        (&[1, 1, 1, 1, 5], 2),
        (&[1, 3, 1, 3, 1], 2),
        (&[1, 1, 1, 1, 1, 1, 3], 3),
    ];
    for &(qs, genus) in pretzels {
        let label: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
        v.push(entry(&format!("pretzel({})", label.join(",")), pretzel(qs), genus));
    }
    v.push(entry(
        "braid(1,-2,1,-2)",
        braid_closure(3, &[1, -2, 1, -2]).unwrap(),
        1,
    ));
    v.push(entry(
        "braid(1,-2)^4",
        braid_closure(3, &[1, -2, 1, -2, 1, -2, 1, -2]).unwrap(),
        3,
    ));
    // The positive braid form of the granny knot; the one bundled diagram
    // that does not alternate.
    v.push(entry(
        "braid(1,1,1,2,2,2)",
        braid_closure(3, &[1, 1, 1, 2, 2, 2]).unwrap(),
        2,
    ));

    let sums: &[(&str, Diagram, Diagram, u32)] = &[
        ("granny", tre.clone(), tre.clone(), 2),
        ("trefoil#twist-2", tre.clone(), twist_knot(2), 2),
        ("trefoil#twist-3", tre.clone(), twist_knot(3), 2),
        ("trefoil#torus(2,5)", tre.clone(), torus_two(5), 3),
        ("twist-2#twist-2", twist_knot(2), twist_knot(2), 2),
        ("trefoil#twist-4", tre.clone(), twist_knot(4), 2),
        ("twist-2#twist-3", twist_knot(2), twist_knot(3), 2),
        ("twist-2#torus(2,5)", twist_knot(2), torus_two(5), 3),
        ("trefoil#pretzel(1,1,3)", tre.clone(), pretzel(&[1, 1, 3]), 2),
    ];
    for (name, a, b, genus) in sums {
        v.push(entry(name, alternating_connect_sum(a, b), *genus));
    }
    v.push(entry(
        "granny#trefoil",
        alternating_connect_sum(&alternating_connect_sum(&tre, &tre), &tre),
        3,
    ));

    v.push(entry("mirror-torus(2,3)", tre.mirror(), 1));
    v.push(entry("mirror-twist-2", twist_knot(2).mirror(), 1));
    v.push(entry("mirror-pretzel(1,1,3)", pretzel(&[1, 1, 3]).mirror(), 1));
    v.push(entry("mirror-double-twist(4,2)", double_twist(4, 2).mirror(), 1));

    v
}

/// Parse a collection file: one diagram per line, `#` starts a comment,
/// and a line may carry a `name:` prefix before its PD code.
pub fn parse_collection(text: &str) -> Result<Vec<Diagram>, PdError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        // A name prefix ends at the first ':' that is not inside the code.
        let (name, code) = match line.find(':') {
            Some(i) if !line[..i].contains(['(', '[']) => {
                (Some(line[..i].trim()), line[i + 1..].trim())
            }
            _ => (None, line),
        };
        out.push(Diagram::parse_named(code, name.map(str::to_string))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seifert::Seifert;
    use std::collections::BTreeSet;

    #[test]
    fn census_is_complete_and_correct() {
        let census = bundled_census();
        assert_eq!(census.len(), 43);
        let names: BTreeSet<&str> = census.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names.len(), census.len(), "names must be unique");
        for e in &census {
            assert!(e.diagram.is_knot(), "{}", e.name);
            assert!(e.diagram.n_crossings() <= 9, "{}", e.name);
            assert_eq!(Seifert::new(&e.diagram).genus(), e.genus, "{}", e.name);
        }
    }

    #[test]
    fn most_census_diagrams_alternate() {
        let census = bundled_census();
        let offbeat: Vec<&str> = census
            .iter()
            .filter(|e| !e.diagram.is_alternating())
            .map(|e| e.name.as_str())
            .collect();
        assert_eq!(offbeat, ["braid(1,1,1,2,2,2)"]);
    }

    #[test]
    fn collection_files_round_trip() {
        let text = "\
# small sample
trefoil: X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)
X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]  # unnamed variant
fig8: PD[X[4,2,5,1],X[8,6,1,5],X[6,3,7,4],X[2,7,3,8]]
";
        let ds = parse_collection(text).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds[0].name(), Some("trefoil"));
        assert_eq!(ds[1].name(), None);
        assert_eq!(ds[0].to_pd_string(), ds[1].to_pd_string());
        assert_eq!(ds[2].n_crossings(), 4);
        assert!(ds[2].is_knot());
        assert!(parse_collection("oops: X(1,2,3)").is_err());
    }
}
