//! Diagram surgeries: removing crossing pairs, inserting full twists,
//! adding kinks, connect sums, and deleting whole components.
//!
//! Every operation rebuilds and revalidates the diagram, so a bad call site
//! surfaces as a `PdError` rather than a silently broken diagram.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::diagram::{from_tuples_tracked, Diagram, Edge, PdError};

#[derive(Debug, Error)]
pub enum MoveError {
    #[error("edges {0} and {1} do not bound a common face")]
    NoCommonFace(Edge, Edge),
    #[error("a twist site needs two distinct edges, got {0} twice")]
    SameEdge(Edge),
    #[error(transparent)]
    Pd(#[from] PdError),
}

/// How two edges on a common face run relative to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteKind {
    /// The strands point the same way; the face boundary traverses one
    /// forwards and the other backwards.
    Parallel,
    /// The strands point opposite ways along the face.
    Antiparallel,
}

/// Classify the twist site spanned by `e1`, `e2`, if they bound a common
/// face. The face boundary enters an edge either at its tail (traversing it
/// forwards) or at its head (backwards); strands are parallel exactly when
/// the two traversal directions differ.
pub fn site_kind(d: &Diagram, e1: Edge, e2: Edge) -> Option<SiteKind> {
    let f1 = d.edge_faces(e1);
    let common = *d.edge_faces(e2).iter().find(|f| f1.contains(f))?;
    let fwd = |e: Edge| d.face_at(d.edge(e).tail) == common;
    Some(if fwd(e1) != fwd(e2) { SiteKind::Parallel } else { SiteKind::Antiparallel })
}

/// Delete the crossings in `drop`, letting every strand that entered the
/// set continue straight through (enter a crossing, leave on the opposite
/// slot) until it exits. Components living entirely inside `drop` vanish.
pub fn remove_crossings_straight(
    d: &Diagram,
    drop: &BTreeSet<usize>,
) -> Result<Diagram, PdError> {
    remove_crossings_straight_tracked(d, drop).map(|(nd, _)| nd)
}

/// Tracked variant of [`remove_crossings_straight`]: also returns, per
/// crossing of the result, its index in the input diagram.
pub(crate) fn remove_crossings_straight_tracked(
    d: &Diagram,
    drop: &BTreeSet<usize>,
) -> Result<(Diagram, Vec<usize>), PdError> {
    let tuples = d.tuples();
    let mut rename: BTreeMap<Edge, Edge> = BTreeMap::new();
    for e in d.edge_labels() {
        let rec = d.edge(e);
        if !drop.contains(&rec.head.0) || drop.contains(&rec.tail.0) {
            continue; // not an entry edge
        }
        let (mut c, mut s) = rec.head;
        let exit = loop {
            let out = (s + 2) % 4;
            let f = tuples[c][out as usize];
            let fh = d.edge(f).head;
            if !drop.contains(&fh.0) {
                break f;
            }
            (c, s) = fh;
        };
        rename.insert(exit, e);
    }
    let mut kept = Vec::with_capacity(tuples.len().saturating_sub(drop.len()));
    let mut remaining = Vec::with_capacity(kept.capacity());
    for (i, t) in tuples.iter().enumerate() {
        if !drop.contains(&i) {
            kept.push(i);
            remaining.push(t.map(|e| *rename.get(&e).unwrap_or(&e)));
        }
    }
    let (nd, order) = from_tuples_tracked(remaining, d.name().map(str::to_string))?;
    let origin = order.into_iter().map(|p| kept[p]).collect();
    Ok((nd, origin))
}

/// Remove two crossings that a pair of strands runs through consecutively
/// (a bigon), rejoining the strands straight.
pub fn remove_crossing_pair(d: &Diagram, x: usize, y: usize) -> Result<Diagram, PdError> {
    remove_crossings_straight(d, &BTreeSet::from([x, y]))
}

/// Delete component `comp` entirely; every crossing it ran through loses
/// it, and the other strand (if any) is rejoined straight.
pub fn delete_component(d: &Diagram, comp: usize) -> Result<Diagram, PdError> {
    let drop: BTreeSet<usize> = d
        .crossings()
        .iter()
        .enumerate()
        .filter(|(_, x)| x.tuple.iter().any(|&e| d.component_of(e) == comp))
        .map(|(i, _)| i)
        .collect();
    remove_crossings_straight(d, &drop)
}

/// One full twist: two fresh crossings through which the strands entering
/// on `a` and `b` swap sides and swap back. `g1`, `g2` are the middle
/// edges, `h1`, `h2` the continuations of `a`, `b`. Both crossings get
/// sign `sigma`.
///
/// For an antiparallel site the four cut ends can sit around the shared
/// face in either of two mirror arrangements, and swapping `a` and `b`
/// does not move between them; `flip` selects the wiring where strand `a`
/// passes the opposite way through its first crossing. Parallel sites
/// reach both arrangements through the swap alone, so `flip` is unused
/// there.
#[allow(clippy::too_many_arguments)]
fn twist_block(
    kind: SiteKind,
    sigma: i8,
    flip: bool,
    a: Edge,
    b: Edge,
    g1: Edge,
    g2: Edge,
    h1: Edge,
    h2: Edge,
) -> [[Edge; 4]; 2] {
    match (kind, sigma > 0, flip) {
        (SiteKind::Parallel, false, _) => [[a, g1, g2, b], [g1, h1, h2, g2]],
        (SiteKind::Parallel, true, _) => [[b, a, g1, g2], [g2, g1, h1, h2]],
        (SiteKind::Antiparallel, true, false) => [[a, g2, g1, h2], [b, g1, g2, h1]],
        (SiteKind::Antiparallel, true, true) => [[g2, a, h2, g1], [g1, b, h1, g2]],
        (SiteKind::Antiparallel, false, false) => [[g2, g1, h2, a], [g1, g2, h1, b]],
        (SiteKind::Antiparallel, false, true) => [[a, h2, g1, g2], [b, h1, g2, g1]],
    }
}

fn build_twists(
    d: &Diagram,
    kind: SiteKind,
    flip: bool,
    a: Edge,
    b: Edge,
    n: usize,
    sigma: i8,
) -> Result<(Diagram, Vec<Option<usize>>), PdError> {
    let mut tuples = d.tuples();
    let old = tuples.len();
    let mut next = d.max_label();
    let mut blocks = Vec::with_capacity(2 * n);
    let (final_a, final_b);
    match kind {
        SiteKind::Parallel => {
            // both strands run through the stack in the same order
            let (mut cur_a, mut cur_b) = (a, b);
            for _ in 0..n {
                let (g1, g2, h1, h2) = (next + 1, next + 2, next + 3, next + 4);
                next += 4;
                let [z1, z2] = twist_block(kind, sigma, flip, cur_a, cur_b, g1, g2, h1, h2);
                blocks.push(z1);
                blocks.push(z2);
                (cur_a, cur_b) = (h1, h2);
            }
            (final_a, final_b) = (cur_a, cur_b);
        }
        SiteKind::Antiparallel => {
            // the strands run through the stack in opposite orders, so the
            // b side chains backwards: block k takes b from block k+1
            let mut b_in: Vec<Edge> = (1..n)
                .map(|_| {
                    next += 1;
                    next
                })
                .collect();
            b_in.push(b);
            let mut cur_a = a;
            let mut b_out = 0;
            for k in 0..n {
                let (g1, g2, ha) = (next + 1, next + 2, next + 3);
                next += 3;
                let hb = if k == 0 {
                    next += 1;
                    b_out = next;
                    b_out
                } else {
                    b_in[k - 1]
                };
                let [z1, z2] = twist_block(kind, sigma, flip, cur_a, b_in[k], g1, g2, ha, hb);
                blocks.push(z1);
                blocks.push(z2);
                cur_a = ha;
            }
            (final_a, final_b) = (cur_a, b_out);
        }
    }
    let (hc, hs) = d.edge(a).head;
    tuples[hc][hs as usize] = final_a;
    let (hc, hs) = d.edge(b).head;
    tuples[hc][hs as usize] = final_b;
    tuples.extend(blocks);
    let (nd, order) = from_tuples_tracked(tuples, d.name().map(str::to_string))?;
    let origin = order.into_iter().map(|p| if p < old { Some(p) } else { None }).collect();
    Ok((nd, origin))
}

/// Insert `n` full twists of sign `sigma` across the face shared by `e1`
/// and `e2`. The strands are subdivided; both keep their labels on the
/// tail side. Which of the two edges sits on which side of the face is
/// detected by trying both: the wrong assignment is not planar.
pub fn insert_full_twists(
    d: &Diagram,
    e1: Edge,
    e2: Edge,
    n: usize,
    sigma: i8,
) -> Result<Diagram, MoveError> {
    insert_full_twists_tracked(d, e1, e2, n, sigma).map(|(nd, _)| nd)
}

/// Tracked variant of [`insert_full_twists`]: also returns, per crossing of
/// the result, its index in the input diagram (`None` for the fresh twist
/// crossings).
pub(crate) fn insert_full_twists_tracked(
    d: &Diagram,
    e1: Edge,
    e2: Edge,
    n: usize,
    sigma: i8,
) -> Result<(Diagram, Vec<Option<usize>>), MoveError> {
    assert!(sigma == 1 || sigma == -1, "twist sign must be +1 or -1");
    if e1 == e2 {
        return Err(MoveError::SameEdge(e1));
    }
    if n == 0 {
        return Ok((d.clone(), (0..d.n_crossings()).map(Some).collect()));
    }
    let kind = site_kind(d, e1, e2).ok_or(MoveError::NoCommonFace(e1, e2))?;
    let flips: &[bool] = match kind {
        SiteKind::Parallel => &[false],
        SiteKind::Antiparallel => &[false, true],
    };
    let mut last_err = None;
    for &flip in flips {
        for (a, b) in [(e1, e2), (e2, e1)] {
            match build_twists(d, kind, flip, a, b, n, sigma) {
                Ok((nd, origin)) => {
                    debug_assert_eq!(nd.writhe(), d.writhe() + 2 * n as i32 * sigma as i32);
                    debug_assert_eq!(nd.n_crossings(), d.n_crossings() + 2 * n);
                    return Ok((nd, origin));
                }
                Err(e @ PdError::Realizability { .. }) => last_err = Some(e),
                Err(e) => return Err(e.into()),
            }
        }
    }
    Err(last_err.expect("all side assignments attempted").into())
}

/// Cancel opposite-sign bigons: wherever a two-sided face has crossings of
/// opposite sign, the pair is removed (a Reidemeister II move), repeatedly,
/// always taking the lowest-numbered such face first. Pairs whose removal
/// would disconnect the diagram are skipped.
pub fn normalize_bigons(d: &Diagram) -> Diagram {
    let mut cur = d.clone();
    'scan: loop {
        let signs: Vec<i8> = cur.crossings().iter().map(|x| x.sign).collect();
        for face in cur.faces() {
            if face.len() != 2 {
                continue;
            }
            let (x, y) = (face[0].0, face[1].0);
            if x == y || signs[x] == signs[y] {
                continue;
            }
            if let Ok(next) = remove_crossing_pair(&cur, x, y) {
                cur = next;
                continue 'scan;
            }
        }
        return cur;
    }
}

/// The four kink shapes: the strand can pass under or over itself, with
/// the loop thrown to either side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KinkVariant {
    PosUnder,
    NegUnder,
    PosOver,
    NegOver,
}

impl KinkVariant {
    pub const ALL: [KinkVariant; 4] =
        [KinkVariant::PosUnder, KinkVariant::NegUnder, KinkVariant::PosOver, KinkVariant::NegOver];

    pub fn sign(self) -> i8 {
        match self {
            KinkVariant::PosUnder | KinkVariant::PosOver => 1,
            KinkVariant::NegUnder | KinkVariant::NegOver => -1,
        }
    }
}

/// Add a kink on edge `e`: the strand crosses itself once. `e` keeps its
/// label on the tail side; `f` continues to the old head, `g` is the loop.
pub fn add_kink(d: &Diagram, e: Edge, variant: KinkVariant) -> Result<Diagram, PdError> {
    let mut tuples = d.tuples();
    let f = d.max_label() + 1;
    let g = f + 1;
    let (hc, hs) = d.edge(e).head;
    tuples[hc][hs as usize] = f;
    tuples.push(match variant {
        KinkVariant::PosUnder => [e, g, g, f],
        KinkVariant::NegUnder => [e, f, g, g],
        KinkVariant::PosOver => [g, e, f, g],
        KinkVariant::NegOver => [g, g, f, e],
    });
    Diagram::from_tuples(tuples, d.name().map(str::to_string))
}

/// Connect sum spliced along edge `x` of `a` and edge `y` of `b`; `b`'s
/// labels are shifted above `a`'s. The strand leaving `x`'s tail continues
/// into `y`'s head and vice versa.
pub fn connect_sum_at(a: &Diagram, x: Edge, b: &Diagram, y: Edge) -> Result<Diagram, PdError> {
    if a.n_crossings() == 0 {
        return Ok(b.clone());
    }
    if b.n_crossings() == 0 {
        return Ok(a.clone());
    }
    let shift = a.max_label();
    let offset = a.n_crossings();
    let mut tuples = a.tuples();
    for t in b.tuples() {
        tuples.push(t.map(|e| e + shift));
    }
    // Splice: the strand leaving x's tail runs into y's head and keeps
    // label x; the strand leaving y's tail runs into x's head as y.
    let (bhc, bhs) = b.edge(y).head;
    tuples[offset + bhc][bhs as usize] = x;
    let (ahc, ahs) = a.edge(x).head;
    tuples[ahc][ahs as usize] = y + shift;
    Diagram::from_tuples(tuples, None)
}

/// Connect sum along the smallest edge of each summand.
pub fn connect_sum(a: &Diagram, b: &Diagram) -> Result<Diagram, PdError> {
    let x = a.edge_labels().next().unwrap_or(1);
    let y = b.edge_labels().next().unwrap_or(1);
    connect_sum_at(a, x, b, y)
}
