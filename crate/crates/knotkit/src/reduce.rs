//! The reduction pipeline's combinatorial half: make a diagram alternating
//! by crossing changes, factor off connect summands, drop nugatory
//! crossings, recognize closed 2-braids, and collapse every twist region to
//! at most two bands (three on the insurance arc) while recording the full
//! twist deficit of each region in a ledger.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::diagram::{from_tuples_tracked, rotated, Diagram, Edge, PdError};
use crate::moves::{insert_full_twists_tracked, remove_crossings_straight_tracked, MoveError};
use crate::seifert::{Seifert, SeifertError, TwistArc};

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("expected a knot, got {0} components")]
    NotKnot(usize),
    #[error("diagram is not alternating")]
    NotAlternating,
    #[error("diagram is a connect sum; edges {0} and {1} bound a splitting circle")]
    NotPrime(Edge, Edge),
    #[error("diagram has a nugatory crossing at circle {0}")]
    Nugatory(usize),
    #[error("diagram is a closed 2-braid with {0} crossings")]
    TorusChain(usize),
    #[error(transparent)]
    Arcs(#[from] SeifertError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Pd(#[from] PdError),
}

/// Union-find over passage darts with an "opposite side" parity on each
/// link, so one query tells whether two passages must agree or differ.
struct ParityUf {
    parent: Vec<usize>,
    parity: Vec<u8>,
}

impl ParityUf {
    fn new(n: usize) -> ParityUf {
        ParityUf { parent: (0..n).collect(), parity: vec![0; n] }
    }

    fn find(&mut self, x: usize) -> (usize, u8) {
        if self.parent[x] == x {
            return (x, 0);
        }
        let (root, p) = self.find(self.parent[x]);
        self.parent[x] = root;
        self.parity[x] ^= p;
        (root, self.parity[x])
    }

    fn union(&mut self, a: usize, b: usize, rel: u8) {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            assert_eq!(pa ^ pb, rel, "parity constraints are consistent on planar diagrams");
            return;
        }
        self.parent[rb] = ra;
        self.parity[rb] = pa ^ pb ^ rel;
    }
}

/// An alternating diagram over the same underlying curve, reached by
/// changing crossings only. Strict alternation leaves exactly two
/// complementary solutions; the free choice is pinned by letting the
/// passage that produces the smallest edge label run over, so an
/// already-alternating diagram either comes back unchanged or as its
/// mirror, and the map is idempotent.
pub fn alternate(d: &Diagram) -> Diagram {
    alternate_tracked(d).0
}

/// `alternate` plus, per output crossing, whether it was flipped.
pub(crate) fn alternate_tracked(d: &Diagram) -> (Diagram, Vec<bool>) {
    let n = d.n_crossings();
    if n == 0 {
        return (d.clone(), Vec::new());
    }
    // Two darts per crossing: the under-in passage (even) and the over-in
    // passage (odd). Passages at one crossing take opposite sides, and so
    // do consecutive passages along a strand. Each component meets every
    // other transversally an even number of times, so the cyclic chains
    // have even length and the constraints are solvable.
    let dart = |c: usize, s: u8| -> usize {
        if s == 0 {
            2 * c
        } else {
            debug_assert_eq!(s, d.crossings()[c].over_in_slot);
            2 * c + 1
        }
    };
    let mut uf = ParityUf::new(2 * n);
    for c in 0..n {
        uf.union(2 * c, 2 * c + 1, 1);
    }
    for comp in 0..d.n_components() {
        let passages = d.component_passages(comp);
        let k = passages.len();
        for i in 0..k {
            let (_, c1, s1) = passages[i];
            let (_, c2, s2) = passages[(i + 1) % k];
            uf.union(dart(c1, s1), dart(c2, s2), 1);
        }
    }
    let e0 = d.edge_labels().next().expect("nonempty diagram has edges");
    let (tc, ts) = d.edge(e0).tail;
    let anchor = dart(tc, (ts + 2) % 4);
    let (anchor_root, anchor_parity) = uf.find(anchor);

    let mut tuples = Vec::with_capacity(n);
    let mut flips = Vec::with_capacity(n);
    for (c, x) in d.crossings().iter().enumerate() {
        let (root, p) = uf.find(2 * c + 1);
        assert_eq!(root, anchor_root, "a connected diagram has a single parity class");
        let stays_over = p == anchor_parity;
        if stays_over {
            tuples.push(x.tuple);
        } else {
            tuples.push(rotated(x.tuple, x.over_in_slot));
        }
        flips.push(!stays_over);
    }
    let (nd, order) = from_tuples_tracked(tuples, d.name().map(str::to_string))
        .expect("crossing changes preserve planarity");
    let flips = order.into_iter().map(|p| flips[p]).collect();
    debug_assert!(nd.is_alternating());
    (nd, flips)
}

/// Find a pair of edges bounding a splitting circle: two edges that share
/// both their faces and whose removal disconnects the underlying graph,
/// with at least one crossing on each side.
fn split_candidate(d: &Diagram) -> Option<(Edge, Edge)> {
    let mut by_faces: BTreeMap<[usize; 2], Vec<Edge>> = BTreeMap::new();
    for e in d.edge_labels() {
        let mut fs = d.edge_faces(e);
        fs.sort_unstable();
        by_faces.entry(fs).or_default().push(e);
    }
    let mut candidates: Vec<(Edge, Edge)> = Vec::new();
    for group in by_faces.values() {
        for (i, &e) in group.iter().enumerate() {
            for &f in &group[i + 1..] {
                candidates.push((e, f));
            }
        }
    }
    candidates.sort_unstable();
    candidates
        .into_iter()
        .find(|&(e, f)| split_sides(d, e, f).is_some_and(|a| a.len() < d.n_crossings()))
}

/// The crossings on the head side of `e` when the diagram is cut at `e`
/// and `f`, or `None` if cutting there does not disconnect it.
fn split_sides(d: &Diagram, e: Edge, f: Edge) -> Option<BTreeSet<usize>> {
    let start = d.edge(e).head.0;
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(c) = stack.pop() {
        for &g in &d.crossings()[c].tuple {
            if g == e || g == f {
                continue;
            }
            for cc in [d.edge(g).head.0, d.edge(g).tail.0] {
                if seen.insert(cc) {
                    stack.push(cc);
                }
            }
        }
    }
    if seen.contains(&d.edge(e).tail.0) {
        return None;
    }
    // With exactly two cut points the strand enters once and leaves once.
    assert!(seen.contains(&d.edge(f).tail.0) && !seen.contains(&d.edge(f).head.0));
    Some(seen)
}

fn cut_summand(
    d: &Diagram,
    keep: &BTreeSet<usize>,
    old: Edge,
    new: Edge,
    origin: &[usize],
) -> Result<(Diagram, Vec<usize>), PdError> {
    let mut tuples = Vec::with_capacity(keep.len());
    let mut src = Vec::with_capacity(keep.len());
    for &i in keep {
        tuples.push(d.crossings()[i].tuple.map(|g| if g == old { new } else { g }));
        src.push(origin[i]);
    }
    let (nd, order) = from_tuples_tracked(tuples, d.name().map(str::to_string))?;
    Ok((nd, order.into_iter().map(|p| src[p]).collect()))
}

/// Factor the diagram along splitting circles until none remain, keeping
/// the summand of larger genus (then fewer crossings, then smaller
/// canonical form) at every step.
pub fn prime_reduce(d: &Diagram) -> Result<Diagram, ReduceError> {
    prime_reduce_tracked(d).map(|(nd, _, _)| nd)
}

pub(crate) fn prime_reduce_tracked(
    d: &Diagram,
) -> Result<(Diagram, Vec<usize>, Vec<String>), ReduceError> {
    let mut cur = d.clone();
    let mut origin: Vec<usize> = (0..cur.n_crossings()).collect();
    let mut log = Vec::new();
    while let Some((e, f)) = split_candidate(&cur) {
        let a_side = split_sides(&cur, e, f).expect("candidate pair separates");
        let b_side: BTreeSet<usize> =
            (0..cur.n_crossings()).filter(|i| !a_side.contains(i)).collect();
        let (a, ao) = cut_summand(&cur, &a_side, f, e, &origin)?;
        let (b, bo) = cut_summand(&cur, &b_side, e, f, &origin)?;
        let (ga, gb) = (Seifert::new(&a).genus(), Seifert::new(&b).genus());
        let keep_a = match ga.cmp(&gb) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => match a.n_crossings().cmp(&b.n_crossings()) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => a.canonical_tuples() <= b.canonical_tuples(),
            },
        };
        let (kept, dropped) = if keep_a { ((a, ao, ga), (b, gb)) } else { ((b, bo, gb), (a, ga)) };
        log.push(format!(
            "split along edges ({e}, {f}): kept the {}-crossing genus-{} summand, dropped the {}-crossing genus-{} one",
            kept.0.n_crossings(),
            kept.2,
            dropped.0.n_crossings(),
            dropped.1,
        ));
        (cur, origin) = (kept.0, kept.1);
    }
    Ok((cur, origin, log))
}

/// Remove nugatory crossings: while some Seifert circle carries a single
/// band, that band's crossing can be untwisted away.
pub fn remove_nugatory(d: &Diagram) -> Result<Diagram, ReduceError> {
    remove_nugatory_tracked(d).map(|(nd, _, _)| nd)
}

pub(crate) fn remove_nugatory_tracked(
    d: &Diagram,
) -> Result<(Diagram, Vec<usize>, Vec<String>), ReduceError> {
    let mut cur = d.clone();
    let mut origin: Vec<usize> = (0..cur.n_crossings()).collect();
    let mut log = Vec::new();
    while cur.n_crossings() > 0 {
        let seifert = Seifert::new(&cur);
        let valencies = seifert.graph().valencies();
        let Some(v) = valencies.iter().position(|&x| x == 1) else {
            break;
        };
        let x = seifert
            .graph()
            .edges
            .iter()
            .find(|ge| ge.circles.0 == v || ge.circles.1 == v)
            .expect("valency-one circle has a band")
            .crossing;
        log.push(format!("removed nugatory crossing {x} (sole band of circle {v})"));
        let (nd, o2) = remove_crossings_straight_tracked(&cur, &BTreeSet::from([x]))?;
        origin = o2.into_iter().map(|p| origin[p]).collect();
        cur = nd;
    }
    Ok((cur, origin, log))
}

/// A diagram with exactly two Seifert circles is a closed 2-braid; reduced
/// and alternating, that is the standard (2,k) torus diagram, which has no
/// fat circles and must be handled before arc collapse.
pub fn detect_torus_2k(d: &Diagram) -> Option<usize> {
    if d.n_crossings() == 0 {
        return None;
    }
    (Seifert::new(d).n_circles() == 2).then(|| d.n_crossings())
}

/// One twist region's collapse arithmetic. Deficits count full twists of
/// sign `twist_sign`; recovering the alternating knot takes
/// `deficit_alternating` of them through the region's loop, recovering the
/// original knot takes `deficit_input` (each crossing change inside the
/// region trades a full twist).
#[derive(Debug, Clone, Serialize)]
pub struct TwistLedgerEntry {
    pub arc: usize,
    /// Band count before collapse.
    pub band_count: usize,
    /// Signs along the chain in the input diagram.
    pub input_signs: Vec<i8>,
    /// Signs along the chain after alternation (all equal).
    pub alternating_signs: Vec<i8>,
    /// Bands kept: 2 for even regions, 1 for odd, 3 on the insurance arc.
    pub kept: usize,
    pub twist_sign: i8,
    pub insurance: bool,
    pub deficit_alternating: i64,
    pub deficit_input: i64,
}

/// Everything the collapse did, with enough provenance to undo it.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionRecord {
    /// The diagram as given.
    pub input: Diagram,
    /// After crossing changes only.
    pub alternating: Diagram,
    /// After factoring and nugatory removal: the diagram the arcs live on.
    pub pre_collapse: Diagram,
    /// The collapsed diagram.
    pub reduced: Diagram,
    pub genus: u32,
    pub ledger: Vec<TwistLedgerEntry>,
    pub insurance_arc: Option<usize>,
    pub provenance: Vec<String>,
    /// Per pre-collapse crossing: was it flipped relative to the input?
    #[serde(skip)]
    pub(crate) flips: Vec<bool>,
    /// The reduced diagram's arcs, in ledger order.
    #[serde(skip)]
    pub(crate) reduced_arcs: Vec<TwistArc>,
}

impl ReductionRecord {
    /// The factored diagram with the input's own over/under choices: every
    /// crossing the alternation flipped is flipped back.
    pub fn pre_collapse_as_input(&self) -> Diagram {
        let mut tuples = self.pre_collapse.tuples();
        for (i, x) in self.pre_collapse.crossings().iter().enumerate() {
            if self.flips[i] {
                let k = x.over_in_slot as usize;
                tuples[i] = std::array::from_fn(|j| x.tuple[(k + j) % 4]);
            }
        }
        Diagram::from_tuples(tuples, self.pre_collapse.name().map(str::to_string))
            .expect("crossing changes keep the shadow")
    }
}

/// Collapse every twist region of an alternating, prime, nugatory-free
/// knot diagram: keep the last two bands of even regions and the last band
/// of odd ones. If that would leave single bands everywhere the result
/// would be a closed 2-braid whenever two fat circles remain, so the
/// lowest-numbered arc keeps (or grows to) three bands instead.
pub fn collapse_arcs(d: &Diagram) -> Result<ReductionRecord, ReduceError> {
    collapse_with(d.clone(), d.clone(), d.clone(), vec![false; d.n_crossings()], Vec::new())
}

pub(crate) fn collapse_with(
    input: Diagram,
    alternating: Diagram,
    pre: Diagram,
    flips: Vec<bool>,
    mut provenance: Vec<String>,
) -> Result<ReductionRecord, ReduceError> {
    assert_eq!(flips.len(), pre.n_crossings());
    if !pre.is_knot() {
        return Err(ReduceError::NotKnot(pre.n_components()));
    }
    if !pre.is_alternating() {
        return Err(ReduceError::NotAlternating);
    }
    if let Some((e, f)) = split_candidate(&pre) {
        return Err(ReduceError::NotPrime(e, f));
    }
    let seifert = Seifert::new(&pre);
    if let Some(v) = seifert.graph().valencies().iter().position(|&x| x == 1) {
        return Err(ReduceError::Nugatory(v));
    }
    if let Some(k) = detect_torus_2k(&pre) {
        if pre.n_crossings() > 0 {
            return Err(ReduceError::TorusChain(k));
        }
    }
    let genus = seifert.genus();
    let arcs = if pre.n_crossings() == 0 {
        Vec::new()
    } else {
        seifert.arc_decomposition()?.arcs
    };

    let mut kept: Vec<usize> = Vec::with_capacity(arcs.len());
    let mut eps: Vec<i8> = Vec::with_capacity(arcs.len());
    for arc in &arcs {
        let e = arc.signs[0];
        assert!(arc.signs.iter().all(|&s| s == e), "alternating twist regions are homogeneous");
        eps.push(e);
        kept.push(if arc.len() % 2 == 0 { 2 } else { 1 });
    }
    let mut insurance_arc = None;
    if !kept.is_empty() && kept.iter().all(|&r| r == 1) {
        kept[0] = 3;
        insurance_arc = Some(0);
        provenance.push(
            "every region collapsed to a single band; arc 0 keeps three to avoid a closed 2-braid"
                .to_string(),
        );
    }

    let mut ledger = Vec::with_capacity(arcs.len());
    for (i, arc) in arcs.iter().enumerate() {
        let b = arc.len();
        let input_signs: Vec<i8> =
            arc.crossings.iter().map(|&c| if flips[c] { -eps[i] } else { eps[i] }).collect();
        let changed = input_signs.iter().filter(|&&s| s != eps[i]).count() as i64;
        let deficit_alternating = (b as i64 - kept[i] as i64) / 2;
        ledger.push(TwistLedgerEntry {
            arc: i,
            band_count: b,
            input_signs,
            alternating_signs: vec![eps[i]; b],
            kept: kept[i],
            twist_sign: eps[i],
            insurance: insurance_arc == Some(i),
            deficit_alternating,
            deficit_input: deficit_alternating - changed,
        });
    }

    // Drop the leading bands of every chain in one pass; the strands close
    // up straight through the removed crossings.
    let mut drop = BTreeSet::new();
    for (i, arc) in arcs.iter().enumerate() {
        if arc.len() > kept[i] {
            drop.extend(arc.crossings[..arc.len() - kept[i]].iter().copied());
        }
    }
    let (k0, origin) = remove_crossings_straight_tracked(&pre, &drop)?;
    let mut reduced = k0;
    let mut origin: Vec<Option<usize>> = origin.into_iter().map(Some).collect();
    if let Some(ins) = insurance_arc {
        if arcs[ins].len() == 1 {
            // A single band grows to three: one full twist of the same
            // hand across the band's own corner.
            let pre_x = arcs[ins].crossings[0];
            let j = origin
                .iter()
                .position(|&o| o == Some(pre_x))
                .expect("insurance band is retained");
            let x = &reduced.crossings()[j];
            let (u, v) = (x.tuple[0], x.edge_at(x.over_out_slot()));
            let (nd, o2) = insert_full_twists_tracked(&reduced, u, v, 1, eps[ins])?;
            origin = o2.into_iter().map(|o| o.and_then(|p| origin[p])).collect();
            reduced = nd;
        }
    }

    assert!(reduced.is_alternating(), "collapse preserves alternation");
    assert_eq!(reduced.n_crossings(), kept.iter().sum::<usize>());
    let reduced_seifert = Seifert::new(&reduced);
    assert_eq!(reduced_seifert.genus(), genus, "collapse preserves diagram genus");
    let removed: i64 = ledger.iter().map(|e| 2 * e.deficit_alternating).sum();
    assert_eq!(reduced_seifert.n_circles() as i64, seifert.n_circles() as i64 - removed);
    assert!(detect_torus_2k(&reduced).is_none() || reduced.n_crossings() == 0);

    let reduced_arcs = if arcs.is_empty() {
        Vec::new()
    } else {
        let decomposition = reduced_seifert.arc_decomposition()?;
        let pre_decomposition = seifert.arc_decomposition()?;
        assert_eq!(decomposition.n_fat, pre_decomposition.n_fat, "fat circles survive collapse");
        assert_eq!(decomposition.fat_valencies, pre_decomposition.fat_valencies);
        assert_eq!(decomposition.n_arcs(), arcs.len());
        let mut arc_of_pre: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, arc) in arcs.iter().enumerate() {
            for &c in &arc.crossings {
                arc_of_pre.insert(c, i);
            }
        }
        let mut matched: Vec<Option<TwistArc>> = vec![None; arcs.len()];
        for ka in decomposition.arcs {
            let sources: BTreeSet<usize> = ka
                .crossings
                .iter()
                .filter_map(|&j| origin[j])
                .map(|p| arc_of_pre[&p])
                .collect();
            assert_eq!(sources.len(), 1, "each collapsed arc descends from one source arc");
            let i = *sources.first().expect("nonempty");
            assert!(matched[i].is_none(), "source arcs and collapsed arcs correspond");
            assert_eq!(ka.len(), kept[i]);
            assert!(ka.signs.iter().all(|&s| s == eps[i]));
            matched[i] = Some(ka);
        }
        matched.into_iter().map(|a| a.expect("every ledger arc appears")).collect()
    };

    Ok(ReductionRecord {
        input,
        alternating,
        pre_collapse: pre,
        reduced,
        genus,
        ledger,
        insurance_arc,
        provenance,
        flips,
        reduced_arcs,
    })
}
