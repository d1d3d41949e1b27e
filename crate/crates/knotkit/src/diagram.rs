//! PD codes: parsing, validation, and elementary diagram operations.
//!
//! A crossing `X(a,b,c,d)` lists its four incident edge labels
//! counterclockwise starting from the incoming under-strand. Validation
//! recovers strand orientations from that convention, rejects codes that do
//! not describe a connected diagram in the plane (the face count recovered
//! from the rotation system must satisfy Euler's formula), and precomputes
//! signs, components and faces for the later stages.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Edge label in a PD code. Labels are arbitrary positive integers and are
/// kept exactly as given, so diagrams can be compared label-for-label.
pub type Edge = u32;

#[derive(Debug, Error)]
pub enum PdError {
    #[error("PD syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("edge label {label} occurs {count} times, expected exactly 2")]
    Label { label: Edge, count: usize },
    #[error("not a planar diagram: {msg}")]
    Realizability { msg: String },
    #[error("diagram is disconnected")]
    Disconnected,
}

/// A single crossing.
///
/// Slot 0 is always the incoming under-strand and slot 2 the outgoing one.
/// The over-strand occupies slots 1 and 3; `over_in_slot` records which of
/// the two carries it into the crossing. `sign` is `+1` exactly when the
/// over-strand enters at slot 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    pub tuple: [Edge; 4],
    pub over_in_slot: u8,
    pub sign: i8,
}

impl Crossing {
    pub fn over_out_slot(&self) -> u8 {
        (self.over_in_slot + 2) % 4
    }

    pub fn edge_at(&self, slot: u8) -> Edge {
        self.tuple[slot as usize]
    }
}

/// Attachment points of an edge: `tail` is the (crossing, slot) the edge
/// leaves from, `head` the (crossing, slot) it arrives at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRec {
    pub tail: (usize, u8),
    pub head: (usize, u8),
}

/// A validated diagram. Crossings are stored sorted by (smallest incident
/// label, tuple), so parsing a serialized diagram reproduces it exactly.
#[derive(Debug, Clone)]
pub struct Diagram {
    name: Option<String>,
    crossings: Vec<Crossing>,
    edges: BTreeMap<Edge, EdgeRec>,
    components: Vec<Vec<Edge>>,
    comp_of: BTreeMap<Edge, usize>,
    faces: Vec<Vec<(usize, u8)>>,
    face_of: BTreeMap<(usize, u8), usize>,
    edge_faces: BTreeMap<Edge, [usize; 2]>,
}

pub(crate) fn rotated(t: [Edge; 4], k: u8) -> [Edge; 4] {
    let k = k as usize;
    [t[k % 4], t[(k + 1) % 4], t[(k + 2) % 4], t[(k + 3) % 4]]
}

/// The permutation the constructor applies to a tuple list: entry `j` of the
/// result is the index into `tuples` that becomes crossing `j`.
pub(crate) fn sort_order(tuples: &[[Edge; 4]]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..tuples.len()).collect();
    order.sort_by_key(|&i| (*tuples[i].iter().min().expect("nonempty tuple"), tuples[i]));
    order
}

/// `from_tuples` plus the permutation it applied: crossing `j` of the result
/// came from `tuples[order[j]]`.
pub(crate) fn from_tuples_tracked(
    tuples: Vec<[Edge; 4]>,
    name: Option<String>,
) -> Result<(Diagram, Vec<usize>), PdError> {
    let order = sort_order(&tuples);
    let d = Diagram::from_tuples(tuples, name)?;
    Ok((d, order))
}

/// Whether raw tuples describe a planar diagram whose strands alternate,
/// without building a `Diagram`. Flat arrays keep this cheap enough to sit
/// inside a candidate search: it applies exactly the label-pairing, face
/// (planarity) and alternation tests of `from_tuples` + `is_alternating`,
/// none of which need strand orientations. Directing the strands remains
/// the caller's concern when it builds the accepted candidate for real.
pub(crate) fn planar_alternating(tuples: &[[Edge; 4]]) -> bool {
    let n = tuples.len();
    if n == 0 {
        return true;
    }
    let max = tuples.iter().flatten().max().copied().expect("nonempty") as usize;
    const NONE: u32 = u32::MAX;
    // the two darts (crossing * 4 + slot) carrying each edge label
    let mut inc = vec![[NONE; 2]; max + 1];
    for (x, t) in tuples.iter().enumerate() {
        for (s, &e) in t.iter().enumerate() {
            let d = (x * 4 + s) as u32;
            let pair = &mut inc[e as usize];
            if pair[0] == NONE {
                pair[0] = d;
            } else if pair[1] == NONE {
                pair[1] = d;
            } else {
                return false;
            }
        }
    }
    if tuples.iter().flatten().any(|&e| inc[e as usize][1] == NONE) {
        return false;
    }
    let other = |d: u32| {
        let [a, b] = inc[tuples[(d / 4) as usize][(d % 4) as usize] as usize];
        if a == d {
            b
        } else {
            a
        }
    };

    // Alternation: walk each strand by leaving through the opposite slot;
    // passage parity (slots 0/2 under, 1/3 over) must flip every step.
    let mut seen = vec![false; 4 * n];
    for start in 0..4 * n as u32 {
        if seen[start as usize] {
            continue;
        }
        let mut d = start;
        loop {
            seen[d as usize] = true;
            let exit = (d & !3) + (d + 2) % 4;
            seen[exit as usize] = true;
            let next = other(exit);
            if next % 2 == d % 2 {
                return false;
            }
            d = next;
            if d == start {
                break;
            }
        }
    }

    // Planarity: faces are the cycles of "cross the edge, turn one slot";
    // a connected 4-valent diagram embeds in the sphere iff there are n + 2
    // of them. Candidate wirings are attached to existing strands, so
    // connectedness needs no separate test here.
    let mut seen = vec![false; 4 * n];
    let mut faces = 0;
    for start in 0..4 * n as u32 {
        if seen[start as usize] {
            continue;
        }
        faces += 1;
        let mut d = start;
        loop {
            seen[d as usize] = true;
            let j = other(d);
            d = (j & !3) + (j + 1) % 4;
            if d == start {
                break;
            }
        }
    }
    faces == n + 2
}

fn dir_of(over_in: &[Option<u8>], c: usize, s: u8) -> Option<bool> {
    // true = the edge points into the crossing at this slot
    match s {
        0 => Some(true),
        2 => Some(false),
        1 => over_in[c].map(|o| o == 1),
        3 => over_in[c].map(|o| o == 3),
        _ => unreachable!("slot out of range"),
    }
}

fn over_in_for(slot: u8, is_in: bool) -> u8 {
    match (slot, is_in) {
        (1, true) | (3, false) => 1,
        (3, true) | (1, false) => 3,
        _ => unreachable!("slots 0 and 2 have fixed direction"),
    }
}

impl Diagram {
    /// The zero-crossing unknot: one closed component, two faces.
    pub fn unknot(name: Option<String>) -> Diagram {
        Diagram {
            name,
            crossings: Vec::new(),
            edges: BTreeMap::new(),
            components: vec![Vec::new()],
            comp_of: BTreeMap::new(),
            faces: vec![Vec::new(), Vec::new()],
            face_of: BTreeMap::new(),
            edge_faces: BTreeMap::new(),
        }
    }

    pub fn from_tuples(tuples: Vec<[Edge; 4]>, name: Option<String>) -> Result<Diagram, PdError> {
        let mut count: BTreeMap<Edge, usize> = BTreeMap::new();
        for t in &tuples {
            for &e in t {
                *count.entry(e).or_insert(0) += 1;
            }
        }
        if let Some((&label, &c)) = count.iter().find(|&(_, &c)| c != 2) {
            return Err(PdError::Label { label, count: c });
        }
        if tuples.is_empty() {
            return Ok(Diagram::unknot(name));
        }

        let mut tuples = tuples;
        tuples.sort_by_key(|t| (*t.iter().min().expect("nonempty tuple"), *t));
        let n = tuples.len();

        let mut occ: BTreeMap<Edge, Vec<(usize, u8)>> = BTreeMap::new();
        for (ci, t) in tuples.iter().enumerate() {
            for (s, &e) in t.iter().enumerate() {
                occ.entry(e).or_default().push((ci, s as u8));
            }
        }

        // Recover which of slots 1, 3 carries the over-strand into each
        // crossing. The only constraint is that the two occurrences of an
        // edge point in opposite directions; it propagates from slots 0 and
        // 2, whose directions are fixed. Components that never pass under
        // anything are left free by this, so any still-undetermined edge is
        // directed tail-first at its first occurrence.
        let mut over_in: Vec<Option<u8>> = vec![None; n];
        let mut queue: VecDeque<Edge> = occ.keys().copied().collect();
        let mut queued: BTreeSet<Edge> = occ.keys().copied().collect();
        loop {
            while let Some(e) = queue.pop_front() {
                queued.remove(&e);
                let os = &occ[&e];
                let (c1, s1) = os[0];
                let (c2, s2) = os[1];
                match (dir_of(&over_in, c1, s1), dir_of(&over_in, c2, s2)) {
                    (Some(a), Some(b)) => {
                        if a == b {
                            return Err(PdError::Realizability {
                                msg: format!("edge {e} is directed the same way at both ends"),
                            });
                        }
                    }
                    (Some(a), None) => {
                        over_in[c2] = Some(over_in_for(s2, !a));
                        for &x in &tuples[c2] {
                            if queued.insert(x) {
                                queue.push_back(x);
                            }
                        }
                    }
                    (None, Some(b)) => {
                        over_in[c1] = Some(over_in_for(s1, !b));
                        for &x in &tuples[c1] {
                            if queued.insert(x) {
                                queue.push_back(x);
                            }
                        }
                    }
                    (None, None) => {}
                }
            }
            let pick = occ
                .values()
                .find(|os| dir_of(&over_in, os[0].0, os[0].1).is_none())
                .map(|os| os[0]);
            match pick {
                Some((c1, s1)) => {
                    over_in[c1] = Some(over_in_for(s1, false));
                    for &x in &tuples[c1] {
                        if queued.insert(x) {
                            queue.push_back(x);
                        }
                    }
                }
                None => break,
            }
        }

        let crossings: Vec<Crossing> = tuples
            .iter()
            .enumerate()
            .map(|(ci, &t)| {
                let o = over_in[ci].expect("orientation resolved at fixpoint");
                Crossing { tuple: t, over_in_slot: o, sign: if o == 1 { 1 } else { -1 } }
            })
            .collect();

        let mut edges: BTreeMap<Edge, EdgeRec> = BTreeMap::new();
        for (&e, os) in &occ {
            let d0 = dir_of(&over_in, os[0].0, os[0].1).expect("orientation resolved");
            let (head, tail) = if d0 { (os[0], os[1]) } else { (os[1], os[0]) };
            edges.insert(e, EdgeRec { tail, head });
        }

        // Connectivity over crossings linked by shared edges.
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut reached = 1;
        let mut bfs = VecDeque::from([0usize]);
        while let Some(c) = bfs.pop_front() {
            for &e in &tuples[c] {
                for &(c2, _) in &occ[&e] {
                    if !seen[c2] {
                        seen[c2] = true;
                        reached += 1;
                        bfs.push_back(c2);
                    }
                }
            }
        }
        if reached != n {
            return Err(PdError::Disconnected);
        }

        // Closed components: leave a crossing on the slot opposite the one
        // entered. Each starts at its smallest edge label.
        let mut components: Vec<Vec<Edge>> = Vec::new();
        let mut comp_of: BTreeMap<Edge, usize> = BTreeMap::new();
        for &start in occ.keys() {
            if comp_of.contains_key(&start) {
                continue;
            }
            let idx = components.len();
            let mut walk = Vec::new();
            let mut cur = start;
            loop {
                walk.push(cur);
                comp_of.insert(cur, idx);
                let head = edges[&cur].head;
                let exit = (head.1 + 2) % 4;
                let nxt = tuples[head.0][exit as usize];
                debug_assert_eq!(
                    edges[&nxt].tail,
                    (head.0, exit),
                    "walk must leave along the next edge's tail"
                );
                cur = nxt;
                if cur == start {
                    break;
                }
            }
            components.push(walk);
        }

        // Faces of the rotation system; exactly n + 2 of them in the plane.
        let partner = |c: usize, s: u8| -> (usize, u8) {
            let os = &occ[&tuples[c][s as usize]];
            if os[0] == (c, s) {
                os[1]
            } else {
                os[0]
            }
        };
        let mut face_of: BTreeMap<(usize, u8), usize> = BTreeMap::new();
        let mut faces: Vec<Vec<(usize, u8)>> = Vec::new();
        for c0 in 0..n {
            for s0 in 0..4u8 {
                if face_of.contains_key(&(c0, s0)) {
                    continue;
                }
                let fi = faces.len();
                let mut cycle = Vec::new();
                let (mut c, mut s) = (c0, s0);
                loop {
                    face_of.insert((c, s), fi);
                    cycle.push((c, s));
                    let (pc, ps) = partner(c, s);
                    c = pc;
                    s = (ps + 1) % 4;
                    if (c, s) == (c0, s0) {
                        break;
                    }
                }
                faces.push(cycle);
            }
        }
        if faces.len() != n + 2 {
            return Err(PdError::Realizability {
                msg: format!(
                    "{} crossings trace {} faces, a planar diagram has {}",
                    n,
                    faces.len(),
                    n + 2
                ),
            });
        }
        let edge_faces: BTreeMap<Edge, [usize; 2]> = occ
            .iter()
            .map(|(&e, os)| (e, [face_of[&os[0]], face_of[&os[1]]]))
            .collect();

        Ok(Diagram { name, crossings, edges, components, comp_of, faces, face_of, edge_faces })
    }

    pub fn parse(text: &str) -> Result<Diagram, PdError> {
        Self::parse_named(text, None)
    }

    /// Accepts whitespace- or comma-separated `X(a,b,c,d)` / `X[a,b,c,d]`
    /// tokens, optionally wrapped in `PD[...]`. An empty string is the
    /// zero-crossing unknot.
    pub fn parse_named(text: &str, name: Option<String>) -> Result<Diagram, PdError> {
        fn skip_sep(b: &[u8], i: &mut usize) {
            while *i < b.len()
                && (b[*i].is_ascii_whitespace() || b[*i] == b',' || b[*i] == b';')
            {
                *i += 1;
            }
        }
        fn skip_ws(b: &[u8], i: &mut usize) {
            while *i < b.len() && b[*i].is_ascii_whitespace() {
                *i += 1;
            }
        }
        fn syntax(pos: usize, msg: &str) -> PdError {
            PdError::Syntax { pos, msg: msg.to_string() }
        }
        fn number(b: &[u8], i: &mut usize) -> Result<Edge, PdError> {
            let start = *i;
            while *i < b.len() && b[*i].is_ascii_digit() {
                *i += 1;
            }
            if start == *i {
                return Err(syntax(start, "expected an edge label"));
            }
            let text = std::str::from_utf8(&b[start..*i]).expect("digits are ascii");
            let v: Edge =
                text.parse().map_err(|_| syntax(start, "edge label does not fit in 32 bits"))?;
            if v == 0 {
                return Err(syntax(start, "edge labels start at 1"));
            }
            Ok(v)
        }

        let b = text.as_bytes();
        let mut i = 0usize;
        let mut tuples: Vec<[Edge; 4]> = Vec::new();
        skip_ws(b, &mut i);
        let mut wrapped = b.len() >= i + 3 && &b[i..i + 3] == b"PD[";
        if wrapped {
            i += 3;
        }
        loop {
            skip_sep(b, &mut i);
            if i >= b.len() {
                break;
            }
            if wrapped && b[i] == b']' {
                i += 1;
                skip_ws(b, &mut i);
                if i < b.len() {
                    return Err(syntax(i, "trailing input after closing ']'"));
                }
                wrapped = false;
                break;
            }
            if b[i] != b'X' {
                return Err(syntax(i, "expected 'X'"));
            }
            i += 1;
            if i >= b.len() || (b[i] != b'(' && b[i] != b'[') {
                return Err(syntax(i, "expected '(' or '[' after 'X'"));
            }
            let close = if b[i] == b'(' { b')' } else { b']' };
            i += 1;
            let mut t = [0 as Edge; 4];
            for (k, slot) in t.iter_mut().enumerate() {
                skip_ws(b, &mut i);
                *slot = number(b, &mut i)?;
                skip_ws(b, &mut i);
                let want = if k < 3 { b',' } else { close };
                if i >= b.len() || b[i] != want {
                    return Err(syntax(i, if k < 3 { "expected ','" } else { "expected closing bracket" }));
                }
                i += 1;
            }
            tuples.push(t);
        }
        if wrapped {
            return Err(syntax(text.len(), "missing closing ']'"));
        }
        Diagram::from_tuples(tuples, name)
    }

    pub fn to_pd_string(&self) -> String {
        self.crossings
            .iter()
            .map(|c| format!("X({},{},{},{})", c.tuple[0], c.tuple[1], c.tuple[2], c.tuple[3]))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: Option<String>) -> Diagram {
        self.name = name;
        self
    }

    pub fn n_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn tuples(&self) -> Vec<[Edge; 4]> {
        self.crossings.iter().map(|c| c.tuple).collect()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_labels(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.keys().copied()
    }

    pub fn edge(&self, e: Edge) -> &EdgeRec {
        &self.edges[&e]
    }

    pub fn max_label(&self) -> Edge {
        self.edges.keys().next_back().copied().unwrap_or(0)
    }

    pub fn components(&self) -> &[Vec<Edge>] {
        &self.components
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn component_of(&self, e: Edge) -> usize {
        self.comp_of[&e]
    }

    pub fn is_knot(&self) -> bool {
        self.components.len() == 1
    }

    pub fn faces(&self) -> &[Vec<(usize, u8)>] {
        &self.faces
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    /// The two faces incident to an edge (its two sides; always distinct in
    /// a diagram of a closed curve, which has no bridges).
    pub fn edge_faces(&self, e: Edge) -> [usize; 2] {
        self.edge_faces[&e]
    }

    /// The face whose boundary walk leaves the given (crossing, slot)
    /// corner along the edge there.
    pub fn face_at(&self, dart: (usize, u8)) -> usize {
        self.face_of[&dart]
    }

    pub fn writhe(&self) -> i32 {
        self.crossings.iter().map(|c| c.sign as i32).sum()
    }

    /// The crossings met along component `i`, in walk order: for every edge
    /// of the component, the (edge, crossing, head slot) where it arrives.
    pub fn component_passages(&self, i: usize) -> Vec<(Edge, usize, u8)> {
        self.components[i]
            .iter()
            .map(|&e| {
                let h = self.edges[&e].head;
                (e, h.0, h.1)
            })
            .collect()
    }

    /// True when every component passes alternately over and under along
    /// its whole course.
    pub fn is_alternating(&self) -> bool {
        self.components.iter().all(|comp| {
            let unders: Vec<bool> =
                comp.iter().map(|&e| self.edges[&e].head.1 == 0).collect();
            let m = unders.len();
            m == 0 || (0..m).all(|j| unders[j] != unders[(j + 1) % m])
        })
    }

    /// Mirror image: every crossing switches which strand is on top. The
    /// tuple is re-rooted at the old incoming over-strand.
    pub fn mirror(&self) -> Diagram {
        let tuples = self
            .crossings
            .iter()
            .map(|c| rotated(c.tuple, if c.sign > 0 { 1 } else { 3 }))
            .collect();
        Diagram::from_tuples(tuples, self.name.clone())
            .expect("mirror of a valid diagram is valid")
    }

    /// Reverse the orientation of every component. Signs are unchanged.
    pub fn reverse(&self) -> Diagram {
        let tuples = self.crossings.iter().map(|c| rotated(c.tuple, 2)).collect();
        Diagram::from_tuples(tuples, self.name.clone())
            .expect("reverse of a valid diagram is valid")
    }

    /// Switch over- and under-strand at crossing `i` only.
    pub fn flip_crossing(&self, i: usize) -> Diagram {
        let mut tuples = self.tuples();
        let c = &self.crossings[i];
        tuples[i] = rotated(c.tuple, if c.sign > 0 { 1 } else { 3 });
        Diagram::from_tuples(tuples, self.name.clone())
            .expect("a crossing change keeps the diagram valid")
    }

    /// Apply an injective relabeling to every edge.
    pub fn relabel(&self, map: &BTreeMap<Edge, Edge>) -> Result<Diagram, PdError> {
        let tuples = self
            .crossings
            .iter()
            .map(|c| c.tuple.map(|e| *map.get(&e).unwrap_or(&e)))
            .collect();
        Diagram::from_tuples(tuples, self.name.clone())
    }

    /// Same crossings with the same labels (diagrams are stored sorted, so
    /// this is plain equality of PD codes).
    pub fn labeled_eq(&self, other: &Diagram) -> bool {
        self.tuples() == other.tuples()
    }

    fn relabel_candidate(&self, order: &[usize], starts: &[usize]) -> Vec<[Edge; 4]> {
        let mut map: BTreeMap<Edge, Edge> = BTreeMap::new();
        let mut next: Edge = 1;
        for (k, &ci) in order.iter().enumerate() {
            let comp = &self.components[ci];
            for j in 0..comp.len() {
                map.insert(comp[(starts[k] + j) % comp.len()], next);
                next += 1;
            }
        }
        let mut out: Vec<[Edge; 4]> = self
            .crossings
            .iter()
            .map(|c| c.tuple.map(|e| *map.get(&e).unwrap_or(&Edge::MAX)))
            .collect();
        out.sort_by_key(|t| (*t.iter().min().expect("nonempty tuple"), *t));
        out
    }

    /// Canonical tuple list: labels are rewritten 1..2n following the
    /// component walks, minimizing the sorted tuple list over every walk
    /// start (and, for links of at most three components, every component
    /// order). Links with more components use a deterministic greedy order,
    /// which is stable but not a true canonical form; the pipeline only
    /// relies on exactness for knots.
    pub fn canonical_tuples(&self) -> Vec<[Edge; 4]> {
        if self.crossings.is_empty() {
            return Vec::new();
        }
        let k = self.components.len();
        let mut best: Option<Vec<[Edge; 4]>> = None;
        let consider = |cand: Vec<[Edge; 4]>, best: &mut Option<Vec<[Edge; 4]>>| {
            if best.as_ref().is_none_or(|b| cand < *b) {
                *best = Some(cand);
            }
        };
        if k <= 3 {
            for order in permutations(k) {
                let sizes: Vec<usize> = order.iter().map(|&ci| self.components[ci].len()).collect();
                let mut starts = vec![0usize; k];
                'sweep: loop {
                    consider(self.relabel_candidate(&order, &starts), &mut best);
                    // odometer over all start positions
                    let mut pos = 0;
                    loop {
                        if pos == k {
                            break 'sweep;
                        }
                        starts[pos] += 1;
                        if starts[pos] < sizes[pos] {
                            break;
                        }
                        starts[pos] = 0;
                        pos += 1;
                    }
                }
            }
            return best.expect("at least one candidate");
        }
        let mut order: Vec<usize> = Vec::new();
        let mut starts: Vec<usize> = Vec::new();
        let mut remaining: BTreeSet<usize> = (0..k).collect();
        while !remaining.is_empty() {
            let mut step: Option<(Vec<[Edge; 4]>, usize, usize)> = None;
            for &ci in &remaining {
                for s in 0..self.components[ci].len() {
                    let mut ord = order.clone();
                    let mut sts = starts.clone();
                    ord.push(ci);
                    sts.push(s);
                    let cand = self.relabel_candidate(&ord, &sts);
                    if step.as_ref().is_none_or(|(b, _, _)| cand < *b) {
                        step = Some((cand, ci, s));
                    }
                }
            }
            let (_, ci, s) = step.expect("components are nonempty");
            order.push(ci);
            starts.push(s);
            remaining.remove(&ci);
        }
        self.relabel_candidate(&order, &starts)
    }

    pub fn canonical_relabel(&self) -> Diagram {
        Diagram::from_tuples(self.canonical_tuples(), self.name.clone())
            .expect("relabeling preserves validity")
    }

    /// Equality of diagrams up to relabeling of edges (orientations and
    /// over/under data are respected).
    pub fn canonically_equal(&self, other: &Diagram) -> bool {
        self.n_crossings() == other.n_crossings() && self.canonical_tuples() == other.canonical_tuples()
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..k).collect(), &mut out);
    out
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pd_string())
    }
}

impl serde::Serialize for Diagram {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_pd_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";

    fn trefoil() -> Diagram {
        Diagram::parse(TREFOIL).unwrap()
    }

    #[test]
    fn trefoil_basics() {
        let d = trefoil();
        assert_eq!(d.n_crossings(), 3);
        assert_eq!(d.n_edges(), 6);
        assert_eq!(d.n_components(), 1);
        assert_eq!(d.n_faces(), 5);
        assert_eq!(d.writhe(), 3);
        assert!(d.is_alternating());
        assert!(d.is_knot());
        assert!(d.crossings().iter().all(|c| c.sign == 1 && c.over_in_slot == 1));
    }

    #[test]
    fn trefoil_walk_and_passages() {
        let d = trefoil();
        assert_eq!(d.components()[0], vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(
            d.component_passages(0),
            vec![(1, 0, 0), (2, 2, 1), (3, 1, 0), (4, 0, 1), (5, 2, 0), (6, 1, 1)]
        );
    }

    #[test]
    fn crossings_are_stored_sorted() {
        let d = Diagram::parse("X(5,2,6,3) X(1,4,2,5) X(3,6,4,1)").unwrap();
        assert_eq!(d.to_pd_string(), TREFOIL);
        let again = Diagram::parse(&d.to_pd_string()).unwrap();
        assert!(again.labeled_eq(&d));
    }

    #[test]
    fn parse_formats() {
        let variants = [
            "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]",
            "PD[X[1,4,2,5], X[3,6,4,1], X[5,2,6,3]]",
            "X(1, 4, 2, 5), X(3,6,4,1),X(5,2,6,3)",
        ];
        for v in variants {
            assert!(Diagram::parse(v).unwrap().labeled_eq(&trefoil()), "{v}");
        }
    }

    #[test]
    fn parse_rejects_malformed_input() {
        for bad in ["X(1,2,3)", "Y(1,2,3,4)", "X(1,2,3,4", "X(0,1,2,3)", "PD[X(1,2,2,1)", "X(1,2,2,1) junk"] {
            assert!(matches!(Diagram::parse(bad), Err(PdError::Syntax { .. })), "{bad}");
        }
    }

    #[test]
    fn the_fast_check_agrees_with_the_full_build() {
        let fig8 = [[4, 2, 5, 1], [8, 6, 1, 5], [6, 3, 7, 4], [2, 7, 3, 8]];
        assert!(planar_alternating(&fig8));
        // same shadow with one crossing changed: planar but not alternating
        let changed = [[1, 4, 2, 5], [8, 6, 1, 5], [6, 3, 7, 4], [2, 7, 3, 8]];
        assert!(!planar_alternating(&changed));
        // cyclic order scrambled at one crossing: alternating labels, 4 faces
        let twisted = [[4, 1, 5, 2], [8, 6, 1, 5], [6, 3, 7, 4], [2, 7, 3, 8]];
        assert!(!planar_alternating(&twisted));
        // a label used three times
        assert!(!planar_alternating(&[[1, 1, 2, 2], [3, 4, 3, 1]]));
        assert!(planar_alternating(&[]));
    }

    #[test]
    fn empty_is_the_unknot() {
        for s in ["", "   ", "PD[]"] {
            let d = Diagram::parse(s).unwrap();
            assert_eq!(d.n_crossings(), 0);
            assert_eq!(d.n_components(), 1);
            assert_eq!(d.n_faces(), 2);
            assert_eq!(d.writhe(), 0);
            assert!(d.is_alternating());
            assert_eq!(d.to_pd_string(), "");
        }
    }

    #[test]
    fn kinks_have_three_faces_and_unit_writhe() {
        let pos = Diagram::parse("X(1,2,2,1)").unwrap();
        assert_eq!(pos.n_faces(), 3);
        assert_eq!(pos.writhe(), 1);
        assert!(pos.is_alternating());

        let neg = Diagram::parse("X(1,1,2,2)").unwrap();
        assert_eq!(neg.n_faces(), 3);
        assert_eq!(neg.writhe(), -1);
    }

    #[test]
    fn clasp_is_a_two_component_link() {
        let d = Diagram::parse("X(1,4,2,3) X(3,2,4,1)").unwrap();
        assert_eq!(d.n_components(), 2);
        assert_eq!(d.n_faces(), 4);
        assert!(d.is_alternating());
    }

    #[test]
    fn label_count_errors() {
        assert!(matches!(
            Diagram::parse("X(1,1,1,2)"),
            Err(PdError::Label { label: 1, count: 3 })
        ));
        assert!(matches!(
            Diagram::parse("X(1,2,3,4)"),
            Err(PdError::Label { label: 1, count: 1 })
        ));
    }

    #[test]
    fn disconnected_is_rejected() {
        let two = format!("{TREFOIL} X(7,10,8,11) X(9,12,10,7) X(11,8,12,9)");
        assert!(matches!(Diagram::parse(&two), Err(PdError::Disconnected)));
    }

    #[test]
    fn nonplanar_codes_are_rejected() {
        // A genus-one embedding: two crossings but only two faces.
        assert!(matches!(
            Diagram::parse("X(3,1,4,2) X(4,2,1,3)"),
            Err(PdError::Realizability { .. })
        ));
        // One crossing whose loop closes across the opposite slots.
        assert!(matches!(
            Diagram::parse("X(1,2,1,2)"),
            Err(PdError::Realizability { .. })
        ));
        // Edge 1 would have to enter at slot 0 of both crossings.
        assert!(matches!(
            Diagram::parse("X(1,2,3,4) X(1,4,3,2)"),
            Err(PdError::Realizability { .. })
        ));
    }

    #[test]
    fn mirror_negates_writhe_and_is_an_involution() {
        let d = trefoil();
        let m = d.mirror();
        assert_eq!(m.writhe(), -3);
        assert!(m.is_alternating());
        assert!(!m.canonically_equal(&d));
        assert!(m.mirror().labeled_eq(&d));
    }

    #[test]
    fn reverse_preserves_writhe_and_is_an_involution() {
        let d = trefoil();
        let r = d.reverse();
        assert_eq!(r.writhe(), 3);
        assert!(r.reverse().labeled_eq(&d));
        // This trefoil diagram is symmetric enough to be invertible on the nose.
        assert!(r.canonically_equal(&d));
    }

    #[test]
    fn flipping_every_crossing_is_the_mirror() {
        // Crossings re-sort after each flip, so find each remaining
        // positive one by sign rather than by a fixed index.
        let mut d = trefoil();
        while let Some(i) = d.crossings().iter().position(|c| c.sign > 0) {
            d = d.flip_crossing(i);
        }
        assert!(d.labeled_eq(&trefoil().mirror()));
    }

    #[test]
    fn trefoil_is_its_own_canonical_form() {
        let d = trefoil();
        assert_eq!(d.canonical_relabel().to_pd_string(), TREFOIL);
    }

    proptest! {
        #[test]
        fn relabeling_preserves_everything(
            perm in Just((1..=6u32).collect::<Vec<_>>()).prop_shuffle(),
            scale in 1u32..=5,
        ) {
            let map: BTreeMap<Edge, Edge> =
                (1..=6u32).map(|k| (k, perm[(k - 1) as usize] * scale)).collect();
            let d = trefoil().relabel(&map).unwrap();
            prop_assert_eq!(d.n_faces(), 5);
            prop_assert_eq!(d.writhe(), 3);
            prop_assert!(d.is_alternating());
            prop_assert!(d.canonically_equal(&trefoil()));
            prop_assert!(!d.canonically_equal(&trefoil().mirror()));
        }

        #[test]
        fn involutions_commute_with_relabeling(
            perm in Just((1..=6u32).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            let map: BTreeMap<Edge, Edge> =
                (1..=6u32).map(|k| (k, perm[(k - 1) as usize])).collect();
            let d = trefoil().relabel(&map).unwrap();
            prop_assert!(d.mirror().mirror().labeled_eq(&d));
            prop_assert!(d.reverse().reverse().labeled_eq(&d));
            prop_assert!(d.mirror().canonically_equal(&trefoil().mirror()));
        }
    }
}
