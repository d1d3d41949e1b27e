//! Seifert circles, the Seifert graph, and its twist-arc decomposition.
//!
//! Smoothing every crossing coherently with the strand orientations splits a
//! diagram into disjoint circles; the circles and the crossings joining them
//! form the Seifert graph. Chains of crossings running through circles that
//! meet exactly two crossings are the diagram's twist arcs. The planar
//! arrangement of the circles is recovered combinatorially: at every
//! crossing one side of each of the two circles is glued into a common
//! region, the regions form a tree, and circle nesting depths and normal
//! orientations are read off that tree.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diagram::{Diagram, Edge};

#[derive(Debug, Error)]
pub enum SeifertError {
    #[error(
        "no circle meets three or more crossings; the diagram is a closed chain of twist regions"
    )]
    NoFatVertex,
    #[error("circle {circle} meets only {valency} crossing(s); remove nugatory crossings first")]
    ThinVertex { circle: usize, valency: usize },
}

/// One edge of the Seifert graph: the crossing `crossing` joins the two
/// (always distinct) circles in `circles`.
#[derive(Debug, Clone, Copy)]
pub struct GraphEdge {
    pub crossing: usize,
    pub circles: (usize, usize),
    pub sign: i8,
}

#[derive(Debug, Clone)]
pub struct SeifertGraph {
    pub n_vertices: usize,
    pub edges: Vec<GraphEdge>,
}

impl SeifertGraph {
    pub fn valency(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.circles.0 == v) + usize::from(e.circles.1 == v))
            .sum()
    }

    pub fn valencies(&self) -> Vec<usize> {
        (0..self.n_vertices).map(|v| self.valency(v)).collect()
    }
}

/// The regions of the circle arrangement. Each circle has a left and a
/// right side (with respect to its orientation as a strand); crossings glue
/// sides together, and for a connected diagram with `s` circles exactly
/// `s + 1` regions remain. They form a tree whose edges are the circles.
#[derive(Debug, Clone)]
pub struct Regions {
    pub n_regions: usize,
    /// Per circle: the region on its [left, right] side.
    pub side_regions: Vec<[usize; 2]>,
    /// Per region: distance from the root region in the region tree.
    pub depth: Vec<usize>,
}

/// A maximal chain of crossings through circles of valency two, anchored at
/// both ends on circles of valency at least three. Its length is the band
/// count of the twist region it represents.
#[derive(Debug, Clone)]
pub struct TwistArc {
    /// Crossing indices in chain order.
    pub crossings: Vec<usize>,
    /// Crossing signs, parallel to `crossings`.
    pub signs: Vec<i8>,
    /// The fat circles at the two ends (equal for a chain that loops back).
    pub endpoints: (usize, usize),
}

impl TwistArc {
    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ArcDecomposition {
    pub arcs: Vec<TwistArc>,
    /// Number of fat vertices (circles of valency >= 3).
    pub n_fat: usize,
    /// Valency -> number of fat vertices with that valency.
    pub fat_valencies: BTreeMap<usize, usize>,
}

impl ArcDecomposition {
    /// Number of arcs; equals half the total valency of the fat vertices.
    pub fn n_arcs(&self) -> usize {
        self.arcs.len()
    }
}

/// Follow the oriented smoothing out of the head of `e`: the incoming
/// under-strand continues along the outgoing over-strand's side and vice
/// versa, so both exits keep the strand directions intact.
pub fn smoothing_successor(d: &Diagram, e: Edge) -> Edge {
    let (c, s) = d.edge(e).head;
    let x = &d.crossings()[c];
    if s == 0 {
        // Incoming under-strand pairs with the outgoing over-strand.
        x.tuple[if x.sign > 0 { 3 } else { 1 }]
    } else {
        debug_assert_eq!(s, x.over_in_slot);
        x.tuple[2]
    }
}

#[derive(Debug, Clone)]
pub struct Seifert {
    circles: Vec<Vec<Edge>>,
    circle_of: BTreeMap<Edge, usize>,
    graph: SeifertGraph,
    regions: Regions,
    n_crossings: usize,
    n_components: usize,
}

struct Uf(Vec<usize>);

impl Uf {
    fn new(n: usize) -> Uf {
        Uf((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra.max(rb)] = ra.min(rb);
    }
}

const LEFT: usize = 0;
const RIGHT: usize = 1;

impl Seifert {
    pub fn new(d: &Diagram) -> Seifert {
        // Circles: orbits of the smoothing successor, each listed from its
        // smallest edge. The empty diagram is one round circle.
        let mut circles: Vec<Vec<Edge>> = Vec::new();
        let mut circle_of: BTreeMap<Edge, usize> = BTreeMap::new();
        for e in d.edge_labels() {
            if circle_of.contains_key(&e) {
                continue;
            }
            let idx = circles.len();
            let mut orbit = Vec::new();
            let mut cur = e;
            loop {
                orbit.push(cur);
                circle_of.insert(cur, idx);
                cur = smoothing_successor(d, cur);
                if cur == e {
                    break;
                }
            }
            circles.push(orbit);
        }
        if circles.is_empty() {
            circles.push(Vec::new());
        }
        let s = circles.len();

        let edges: Vec<GraphEdge> = d
            .crossings()
            .iter()
            .enumerate()
            .map(|(ci, x)| {
                let a = circle_of[&x.tuple[0]];
                let b = circle_of[&x.tuple[2]];
                assert_ne!(a, b, "a crossing always joins two distinct circles");
                GraphEdge { crossing: ci, circles: (a, b), sign: x.sign }
            })
            .collect();
        let graph = SeifertGraph { n_vertices: s, edges };

        // Glue circle sides into regions. With the tuple read
        // counterclockwise, the two smoothed arcs pass each other so that
        // the strip between them is the right side of the arc through
        // slot 0 at a positive crossing, and its left side at a negative
        // one; the other arc faces the strip with the opposite hand.
        let mut uf = Uf::new(2 * s);
        for x in d.crossings() {
            let a = circle_of[&x.tuple[0]];
            if x.sign > 0 {
                let b = circle_of[&x.tuple[1]];
                uf.union(2 * a + RIGHT, 2 * b + LEFT);
            } else {
                let b = circle_of[&x.tuple[3]];
                uf.union(2 * a + LEFT, 2 * b + RIGHT);
            }
        }
        let mut region_ids: BTreeMap<usize, usize> = BTreeMap::new();
        for node in 0..2 * s {
            let r = uf.find(node);
            let next = region_ids.len();
            region_ids.entry(r).or_insert(next);
        }
        let n_regions = region_ids.len();
        assert_eq!(
            n_regions,
            s + 1,
            "{s} circles from a connected diagram bound {} regions",
            s + 1
        );
        let side_regions: Vec<[usize; 2]> = (0..s)
            .map(|c| [region_ids[&uf.find(2 * c + LEFT)], region_ids[&uf.find(2 * c + RIGHT)]])
            .collect();

        // The circles are the edges of the region adjacency graph, which
        // must be a tree; root it at the right side of circle 0.
        let root = side_regions[0][RIGHT];
        let mut depth = vec![usize::MAX; n_regions];
        depth[root] = 0;
        let mut frontier = vec![root];
        while let Some(r) = frontier.pop() {
            for sides in &side_regions {
                for (i, &ri) in sides.iter().enumerate() {
                    if ri == r && depth[sides[1 - i]] == usize::MAX {
                        depth[sides[1 - i]] = depth[r] + 1;
                        frontier.push(sides[1 - i]);
                    }
                }
            }
        }
        assert!(depth.iter().all(|&v| v != usize::MAX), "region tree is connected");
        for sides in &side_regions {
            let (a, b) = (depth[sides[LEFT]], depth[sides[RIGHT]]);
            assert_eq!(a.abs_diff(b), 1, "each circle separates adjacent tree levels");
        }
        let regions = Regions { n_regions, side_regions, depth };

        Seifert {
            circles,
            circle_of,
            graph,
            regions,
            n_crossings: d.n_crossings(),
            n_components: d.n_components(),
        }
    }

    pub fn circles(&self) -> &[Vec<Edge>] {
        &self.circles
    }

    pub fn n_circles(&self) -> usize {
        self.circles.len()
    }

    pub fn circle_of(&self, e: Edge) -> usize {
        self.circle_of[&e]
    }

    pub fn graph(&self) -> &SeifertGraph {
        &self.graph
    }

    pub fn regions(&self) -> &Regions {
        &self.regions
    }

    /// Genus of the surface built from the circles and crossing bands:
    /// its Euler characteristic is s - c, and it has one boundary circle
    /// per link component.
    pub fn genus(&self) -> u32 {
        let chi = self.circles.len() as i64 - self.n_crossings as i64;
        let two_g = 2 - self.n_components as i64 - chi;
        assert!(two_g >= 0 && two_g % 2 == 0, "genus must be a non-negative integer");
        (two_g / 2) as u32
    }

    /// How many circles separate this circle from the root region.
    pub fn nesting_depth(&self, circle: usize) -> usize {
        let [l, r] = self.regions.side_regions[circle];
        self.regions.depth[l].min(self.regions.depth[r])
    }

    /// `+1` when the circle's left side is the deeper (enclosed) side.
    pub fn normal_orientation(&self, circle: usize) -> i8 {
        let [l, r] = self.regions.side_regions[circle];
        if self.regions.depth[l] > self.regions.depth[r] {
            1
        } else {
            -1
        }
    }

    /// Structural facts the construction is expected to satisfy on every
    /// valid diagram; exercised wholesale by the property tests.
    ///
    /// Circles adjacent at a crossing either sit side by side in their
    /// common region (then their normal orientations disagree) or one is
    /// nested inside the other (then they agree).
    pub fn verify(&self, d: &Diagram) -> Result<(), String> {
        let mut seen = 0usize;
        for (i, orbit) in self.circles.iter().enumerate() {
            for &e in orbit {
                if self.circle_of[&e] != i {
                    return Err(format!("edge {e} not indexed to its circle"));
                }
                seen += 1;
            }
        }
        if seen != d.n_edges() {
            return Err("circles do not partition the edges".into());
        }
        for ge in &self.graph.edges {
            if ge.circles.0 == ge.circles.1 {
                return Err(format!("crossing {} joins a circle to itself", ge.crossing));
            }
        }
        for x in d.crossings() {
            let strip = if x.sign > 0 {
                (self.circle_of[&x.tuple[0]], RIGHT, self.circle_of[&x.tuple[1]], LEFT)
            } else {
                (self.circle_of[&x.tuple[0]], LEFT, self.circle_of[&x.tuple[3]], RIGHT)
            };
            let (a, ha, b, hb) = strip;
            let r = self.regions.side_regions[a][ha];
            if r != self.regions.side_regions[b][hb] {
                return Err("glued sides ended in different regions".into());
            }
            let depth = |reg: usize| self.regions.depth[reg];
            let a_other = self.regions.side_regions[a][1 - ha];
            let b_other = self.regions.side_regions[b][1 - hb];
            let a_encloses = depth(a_other) < depth(r);
            let b_encloses = depth(b_other) < depth(r);
            let same = self.normal_orientation(a) == self.normal_orientation(b);
            match (a_encloses, b_encloses) {
                (true, true) => return Err("region would have two parents".into()),
                (false, false) if same => {
                    return Err("side-by-side circles with equal normal orientation".into())
                }
                (true, false) | (false, true) if !same => {
                    return Err("nested circles with opposite normal orientation".into())
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Twist arcs: walk from each fat circle through valency-2 circles
    /// until another fat circle is reached. Every crossing belongs to
    /// exactly one arc.
    pub fn arc_decomposition(&self) -> Result<ArcDecomposition, SeifertError> {
        let s = self.circles.len();
        if self.n_crossings == 0 {
            return Ok(ArcDecomposition { arcs: Vec::new(), n_fat: 0, fat_valencies: BTreeMap::new() });
        }
        let mut incidence: Vec<Vec<(usize, usize)>> = vec![Vec::new(); s];
        for (ei, ge) in self.graph.edges.iter().enumerate() {
            incidence[ge.circles.0].push((ei, ge.circles.1));
            incidence[ge.circles.1].push((ei, ge.circles.0));
        }
        let valency: Vec<usize> = incidence.iter().map(|v| v.len()).collect();
        if let Some(v) = valency.iter().position(|&v| v < 2) {
            return Err(SeifertError::ThinVertex { circle: v, valency: valency[v] });
        }
        if !valency.iter().any(|&v| v >= 3) {
            return Err(SeifertError::NoFatVertex);
        }

        let mut visited = vec![false; self.graph.edges.len()];
        let mut arcs = Vec::new();
        for v in 0..s {
            if valency[v] < 3 {
                continue;
            }
            for &(e0, mut cur) in &incidence[v] {
                if visited[e0] {
                    continue;
                }
                visited[e0] = true;
                let mut chain = vec![e0];
                let mut prev = e0;
                while valency[cur] == 2 {
                    let &(nxt, w) = incidence[cur]
                        .iter()
                        .find(|&&(ei, _)| ei != prev)
                        .expect("valency-2 circle has a second crossing");
                    visited[nxt] = true;
                    chain.push(nxt);
                    prev = nxt;
                    cur = w;
                }
                arcs.push(TwistArc {
                    crossings: chain.iter().map(|&ei| self.graph.edges[ei].crossing).collect(),
                    signs: chain.iter().map(|&ei| self.graph.edges[ei].sign).collect(),
                    endpoints: (v, cur),
                });
            }
        }
        assert!(visited.iter().all(|&b| b), "every crossing lies on some arc");

        let mut fat_valencies: BTreeMap<usize, usize> = BTreeMap::new();
        for &val in valency.iter().filter(|&&v| v >= 3) {
            *fat_valencies.entry(val).or_insert(0) += 1;
        }
        let n_fat = fat_valencies.values().sum();
        let half_total: usize = fat_valencies.iter().map(|(v, n)| v * n).sum::<usize>() / 2;
        assert_eq!(arcs.len(), half_total, "arc count equals half the fat valency total");
        Ok(ArcDecomposition { arcs, n_fat, fat_valencies })
    }

    /// Graphviz rendering of the Seifert graph.
    pub fn to_dot(&self, d: &Diagram) -> String {
        let mut out = String::from("graph seifert {\n");
        for (i, orbit) in self.circles.iter().enumerate() {
            let edges: Vec<String> = orbit.iter().map(|e| e.to_string()).collect();
            out.push_str(&format!(
                "  c{i} [label=\"circle {i} [{}] depth {}\"];\n",
                edges.join(","),
                self.nesting_depth(i)
            ));
        }
        for ge in &self.graph.edges {
            let x = &d.crossings()[ge.crossing];
            out.push_str(&format!(
                "  c{} -- c{} [label=\"x{} ({}{})\"];\n",
                ge.circles.0,
                ge.circles.1,
                ge.crossing,
                if ge.sign > 0 { '+' } else { '-' },
                x.tuple[0]
            ));
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";

    fn seifert(pd: &str) -> (Diagram, Seifert) {
        let d = Diagram::parse(pd).unwrap();
        let s = Seifert::new(&d);
        (d, s)
    }

    #[test]
    fn trefoil_circles_and_graph() {
        let (d, s) = seifert(TREFOIL);
        assert_eq!(s.circles(), &[vec![1, 5, 3], vec![2, 6, 4]]);
        assert_eq!(s.n_circles(), 2);
        assert_eq!(s.genus(), 1);
        assert_eq!(s.graph().valencies(), vec![3, 3]);
        assert!(s.graph().edges.iter().all(|e| e.circles == (0, 1) && e.sign == 1));
        s.verify(&d).unwrap();
    }

    #[test]
    fn trefoil_regions_and_orientations() {
        let (_, s) = seifert(TREFOIL);
        assert_eq!(s.regions().n_regions, 3);
        // Rooted at the strip between the two circles, both sit at depth 0,
        // side by side, so their normal orientations disagree.
        assert_eq!(s.nesting_depth(0), 0);
        assert_eq!(s.nesting_depth(1), 0);
        assert_ne!(s.normal_orientation(0), s.normal_orientation(1));
    }

    #[test]
    fn trefoil_arcs() {
        let (_, s) = seifert(TREFOIL);
        let arcs = s.arc_decomposition().unwrap();
        assert_eq!(arcs.n_fat, 2);
        assert_eq!(arcs.fat_valencies, BTreeMap::from([(3, 2)]));
        assert_eq!(arcs.n_arcs(), 3);
        assert!(arcs.arcs.iter().all(|a| a.len() == 1 && a.endpoints == (0, 1)));
    }

    #[test]
    fn crossing_changes_preserve_circles() {
        let (d, s) = seifert(TREFOIL);
        let m = d.mirror();
        let sm = Seifert::new(&m);
        assert_eq!(s.circles(), sm.circles());
        assert_eq!(sm.genus(), 1);
        assert!(sm.graph().edges.iter().all(|e| e.sign == -1));
        sm.verify(&m).unwrap();
    }

    #[test]
    fn kink_is_a_thin_vertex() {
        let (d, s) = seifert("X(1,2,2,1)");
        assert_eq!(s.n_circles(), 2);
        assert_eq!(s.genus(), 0);
        s.verify(&d).unwrap();
        assert!(matches!(
            s.arc_decomposition(),
            Err(SeifertError::ThinVertex { valency: 1, .. })
        ));
    }

    #[test]
    fn empty_diagram_is_one_circle() {
        let (d, s) = seifert("");
        assert_eq!(s.n_circles(), 1);
        assert_eq!(s.genus(), 0);
        assert_eq!(s.regions().n_regions, 2);
        s.verify(&d).unwrap();
        assert_eq!(s.arc_decomposition().unwrap().n_arcs(), 0);
    }

    #[test]
    fn clasp_smoothing() {
        let (d, s) = seifert("X(1,4,2,3) X(3,2,4,1)");
        assert_eq!(s.n_circles(), 2);
        // Two components, two crossings, two circles: an annulus.
        assert_eq!(s.genus(), 0);
        s.verify(&d).unwrap();
    }

    proptest! {
        /// Flipping any subset of crossings never changes the circles, the
        /// arc structure, or the genus, and all structural region facts
        /// survive.
        #[test]
        fn flips_fix_the_circle_structure(mask in 0u8..8) {
            let mut d = Diagram::parse(TREFOIL).unwrap();
            for i in 0..3 {
                if mask & (1 << i) != 0 {
                    // flip by current position of an original crossing: the
                    // label set of each crossing is stable under flips.
                    d = d.flip_crossing(i % d.n_crossings());
                }
            }
            let s = Seifert::new(&d);
            prop_assert_eq!(s.circles(), &[vec![1, 5, 3], vec![2, 6, 4]]);
            prop_assert_eq!(s.genus(), 1);
            prop_assert_eq!(s.graph().valencies(), vec![3, 3]);
            prop_assert!(s.verify(&d).is_ok());
        }
    }
}
