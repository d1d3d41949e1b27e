//! Band augmentation: a small circle is hung around each retained twist
//! band, producing a link that remembers where the dropped full twists
//! belong. One circle per band keeps the link alternating; twisting along
//! a circle's spanning disk and then deleting the circle re-creates the
//! twists, so the collapse becomes reversible by surgery instructions.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::diagram::{from_tuples_tracked, planar_alternating, Diagram, Edge, PdError};
use crate::moves::{
    delete_component, insert_full_twists, normalize_bigons, remove_crossings_straight_tracked,
    MoveError,
};
use crate::reduce::{ReductionRecord, TwistLedgerEntry};
use crate::seifert::Seifert;

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error(transparent)]
    Pd(#[from] PdError),
    #[error(transparent)]
    Move(#[from] MoveError),
}

/// One crossing-free circle hung around a retained band.
#[derive(Debug, Clone, Serialize)]
pub struct LoopComponent {
    /// The band's position in the twist ledger.
    pub arc: usize,
    /// Component index in the augmented diagram.
    pub component: usize,
    /// The circle's own four edges, in walk order.
    pub edges: [Edge; 4],
    /// The two strand edges inside the circle: full twists inserted across
    /// this pair land in the circle's spanning disk.
    pub site: (Edge, Edge),
}

/// The collapsed knot with one encircling loop per twist band.
#[derive(Debug, Clone, Serialize)]
pub struct AugmentedLink {
    pub diagram: Diagram,
    /// Component index of the knot itself.
    pub knot_component: usize,
    pub loops: Vec<LoopComponent>,
    /// Current crossing indices of each band, in ledger order.
    #[serde(skip)]
    pub(crate) band_idx: Vec<Vec<usize>>,
}

/// Which diagram a surgery manifest rebuilds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RoundtripTarget {
    /// The alternating factored diagram.
    Alternating,
    /// The factored diagram with the input's own over/under choices.
    Input,
}

/// 1/n filling along one loop: insert `coefficient` full twists of
/// handedness `twist_sign` (negated for negative coefficients) across the
/// loop's disk, then delete the loop.
#[derive(Debug, Clone, Serialize)]
pub struct SurgeryInstruction {
    pub component: usize,
    pub arc: usize,
    pub coefficient: i64,
    pub twist_sign: i8,
    pub site: (Edge, Edge),
}

impl fmt::Display for SurgeryInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "component {}: 1/{} along the disk of arc {}",
            self.component, self.coefficient, self.arc
        )?;
        if self.coefficient == 0 {
            write!(f, " (trivial: the circle comes out untwisted)")?;
        }
        Ok(())
    }
}

/// Which two edge-ends of a band crossing the encircling ring cuts.
///
/// The ring must wrap the two strands of the twist region where they
/// leave the region, so it cuts the two ends of the band's outermost
/// crossing that do not continue on to the next crossing of the region.
/// Depending on how the strands run through the region that outer pair
/// is one of four shapes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum RingPair {
    /// incoming under-strand and outgoing over-strand
    UnderInOverOut,
    /// incoming over-strand and outgoing under-strand
    OverInUnderOut,
    /// both incoming strands
    BothIn,
    /// both outgoing strands
    BothOut,
}

/// The two edges `pair` cuts at a band crossing with tuple `t` and
/// over-in slot `oin`, each tagged with whether its strand passes under
/// at its first ring crossing.
///
/// An edge entering the crossing as the under-strand must meet the ring
/// under first (its passage before the ring runs over and the one at the
/// band runs under), and the other three cases follow the same
/// alternation count.
fn ring_cut(t: [Edge; 4], oin: usize, pair: RingPair) -> (Edge, bool, Edge, bool) {
    let oout = (oin + 2) % 4;
    match pair {
        RingPair::UnderInOverOut => (t[0], true, t[oout], true),
        RingPair::OverInUnderOut => (t[oin], false, t[2], false),
        RingPair::BothIn => (t[0], true, t[oin], false),
        RingPair::BothOut => (t[2], false, t[oout], true),
    }
}

/// Every candidate wiring of a four-crossing ring around the cut edges
/// `u` and `v`.
///
/// The strand of `u` runs `u → c1 → c2` through its two ring crossings
/// and the strand of `v` runs `v → c3 → c4`; `u_uf`/`v_uf` say whether
/// each passes under at its first. `l1..l4` chain the ring's own walk.
/// The parity of every passage is forced by alternation, which also
/// restricts the walk to orders whose passages alternate along the ring;
/// what remains free is the visit order and, per crossing, which side the
/// ring passes. All combinations are returned in a fixed order and the
/// caller keeps the first that embeds in the plane — the chirality of
/// each corner of the diagram decides which one that is.
fn ring_candidates(
    u: Edge,
    v: Edge,
    u_uf: bool,
    v_uf: bool,
    labels: [Edge; 8],
) -> Vec<([[Edge; 4]; 4], [u8; 4])> {
    let [c1, c2, c3, c4, ..] = labels;
    // (strand in, strand out, strand passes under) per ring crossing,
    // indexed: 0, 1 = first and second along u; 2, 3 = along v
    let stations = [(u, c1, u_uf), (c1, c2, !u_uf), (v, c3, v_uf), (c3, c4, !v_uf)];
    let mut out = Vec::new();
    for rest in [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]] {
        let order = [0, rest[0], rest[1], rest[2]];
        let alternates = (0..4).all(|k| {
            let (_, _, a) = stations[order[k]];
            let (_, _, b) = stations[order[(k + 1) % 4]];
            a != b
        });
        if !alternates {
            continue;
        }
        // The ring crosses each strand twice in immediate succession, so in
        // practice its four crossings mirror together; the two coherent
        // chiralities go first and the mixed masks remain as a safety net.
        for mask in [0u8, 15].into_iter().chain(1..15) {
            let mut ring = [[0 as Edge; 4]; 4];
            let mut over_ins = [0u8; 4];
            for (k, station) in order.into_iter().enumerate() {
                let (sin, sout, s_under) = stations[station];
                let rin = labels[4 + (k + 3) % 4];
                let rout = labels[4 + k];
                let mirrored = mask & (1 << k) != 0;
                ring[k] = match (s_under, mirrored) {
                    (true, false) => [sin, rin, sout, rout],
                    (true, true) => [sin, rout, sout, rin],
                    (false, false) => [rin, sin, rout, sout],
                    (false, true) => [rin, sout, rout, sin],
                };
                over_ins[k] = if mirrored { 3 } else { 1 };
            }
            out.push((ring, over_ins));
        }
    }
    out
}

/// Hang a circle around the first retained band of every arc.
///
/// Each circle crosses the two strands flanking one corner of its band,
/// preferring the side of the arc's first endpoint circle, passing
/// alternately over and under so the whole link stays alternating. Ring
/// insertions rewire the head slots of the strand edges they cut, so the
/// arcs are processed one at a time, re-reading the strand labels from
/// the current diagram and carrying the band indices through each
/// insertion.
pub fn augment(rec: &ReductionRecord) -> Result<AugmentedLink, AugmentError> {
    let base = &rec.reduced;
    let n_arcs = rec.reduced_arcs.len();
    let s = Seifert::new(base);
    // which side of each band faces the arc's first endpoint circle
    let under_side: Vec<bool> = rec
        .reduced_arcs
        .iter()
        .map(|a| {
            let x = &base.crossings()[a.crossings[0]];
            s.circle_of(x.tuple[0]) == a.endpoints.0
        })
        .collect();

    // The rings accumulate on raw tuples — appending never renumbers the
    // existing crossings — with edge endpoints tracked by hand; the real
    // diagram, which re-checks everything, is built once at the end.
    let mut tuples = base.tuples();
    let mut over_in: Vec<u8> = base.crossings().iter().map(|x| x.over_in_slot).collect();
    let mut max_label = base.max_label();
    let grown = max_label as usize + 8 * n_arcs + 1;
    let mut head = vec![(usize::MAX, 0u8); grown];
    let mut tail = vec![(usize::MAX, 0u8); grown];
    for e in base.edge_labels() {
        head[e as usize] = base.edge(e).head;
        tail[e as usize] = base.edge(e).tail;
    }

    let mut band_idx: Vec<Vec<usize>> =
        rec.reduced_arcs.iter().map(|a| a.crossings.clone()).collect();
    let mut placed: Vec<(usize, [Edge; 4], (Edge, Edge))> = Vec::new();

    for i in 0..n_arcs {
        let xi = band_idx[i][0];
        let t = tuples[xi];
        let oin = over_in[xi] as usize;
        let oout = (oin + 2) % 4;
        let labels: [Edge; 8] = std::array::from_fn(|k| max_label + 1 + k as Edge);
        let [mu, _, mv, _, l1, l2, l3, l4] = labels;

        let pairs: Vec<RingPair> = if band_idx[i].len() >= 2 {
            // the ring must stay outside the region, so cut the two ends
            // of the band crossing that do not run on to its neighbour
            let y = band_idx[i][1];
            let under_in_mid = tail[t[0] as usize].0 == y;
            let over_in_mid = tail[t[oin] as usize].0 == y;
            assert_ne!(
                under_in_mid,
                head[t[2] as usize].0 == y,
                "one end of the under-strand continues into the region"
            );
            assert_ne!(
                over_in_mid,
                head[t[oout] as usize].0 == y,
                "one end of the over-strand continues into the region"
            );
            vec![match (under_in_mid, over_in_mid) {
                (true, true) => RingPair::BothOut,
                (true, false) => RingPair::OverInUnderOut,
                (false, true) => RingPair::UnderInOverOut,
                (false, false) => RingPair::BothIn,
            }]
        } else if under_side[i] {
            // a single-crossing band has no interior; prefer the corner
            // facing the arc's first endpoint circle
            vec![RingPair::UnderInOverOut, RingPair::OverInUnderOut]
        } else {
            vec![RingPair::OverInUnderOut, RingPair::UnderInOverOut]
        };

        let mut accepted = false;
        'search: for pair in pairs {
            let (u, u_uf, v, v_uf) = ring_cut(t, oin, pair);
            let u_head = head[u as usize];
            let v_head = head[v as usize];
            for (ring, over_ins) in ring_candidates(u, v, u_uf, v_uf, labels) {
                let mut cand = tuples.clone();
                cand[u_head.0][u_head.1 as usize] = labels[1];
                cand[v_head.0][v_head.1 as usize] = labels[3];
                cand.extend(ring);
                if !planar_alternating(&cand) {
                    continue;
                }
                let old = tuples.len();
                tuples = cand;
                over_in.extend(over_ins);
                max_label += 8;
                // the strand segments past the ring arrive where the cut
                // edges used to; every other new endpoint is on the ring
                head[labels[1] as usize] = u_head;
                head[labels[3] as usize] = v_head;
                for (k, tt) in ring.iter().enumerate() {
                    let o = over_ins[k] as usize;
                    head[tt[0] as usize] = (old + k, 0);
                    head[tt[o] as usize] = (old + k, o as u8);
                    tail[tt[2] as usize] = (old + k, 2);
                    tail[tt[(o + 2) % 4] as usize] = (old + k, ((o + 2) % 4) as u8);
                }
                accepted = true;
                break 'search;
            }
        }
        assert!(accepted, "one of the ring wirings embeds");
        placed.push((i, [l1, l2, l3, l4], (mu, mv)));
    }

    let old = base.n_crossings() + n_arcs * 4;
    debug_assert_eq!(tuples.len(), old);
    let (cur, order) = from_tuples_tracked(tuples, base.name().map(str::to_string))?;
    let mut new_at = vec![usize::MAX; old];
    for (j, &p) in order.iter().enumerate() {
        new_at[p] = j;
    }
    for band in &mut band_idx {
        for c in band.iter_mut() {
            *c = new_at[*c];
        }
    }

    assert!(cur.is_alternating(), "augmentation keeps the diagram alternating");
    assert_eq!(cur.n_crossings(), base.n_crossings() + 4 * n_arcs);
    assert_eq!(cur.n_components(), 1 + n_arcs, "one new circle per arc");
    let mut loops = Vec::new();
    let mut loop_comps = BTreeSet::new();
    for (arc, edges, site) in placed {
        let component = cur.component_of(edges[0]);
        assert_eq!(cur.component_passages(component).len(), 4, "a circle passes four crossings");
        loop_comps.insert(component);
        loops.push(LoopComponent { arc, component, edges, site });
    }
    let knot_component = (0..cur.n_components())
        .find(|c| !loop_comps.contains(c))
        .expect("the knot keeps a component of its own");

    Ok(AugmentedLink { diagram: cur, knot_component, loops, band_idx })
}

/// Drop the two retained crossings of every even twist region from the
/// augmented link, shifting one more full twist per region into its
/// surgery coefficient. The strands pass the region's circle alternately
/// before and after, so the link stays alternating; odd regions and the
/// insurance arc keep their bands.
pub fn improve(
    rec: &ReductionRecord,
    link: &AugmentedLink,
) -> Result<(AugmentedLink, Vec<TwistLedgerEntry>), AugmentError> {
    let mut ledger = rec.ledger.clone();
    let improvable: Vec<bool> = ledger.iter().map(|e| e.kept == 2).collect();
    let drop: BTreeSet<usize> = improvable
        .iter()
        .enumerate()
        .filter(|&(_, &yes)| yes)
        .flat_map(|(i, _)| link.band_idx[i].iter().copied())
        .collect();
    if drop.is_empty() {
        return Ok((link.clone(), ledger));
    }
    let (next, origin) = remove_crossings_straight_tracked(&link.diagram, &drop)?;
    let mut new_at = vec![usize::MAX; link.diagram.n_crossings()];
    for (j, &p) in origin.iter().enumerate() {
        new_at[p] = j;
    }
    let band_idx: Vec<Vec<usize>> = link
        .band_idx
        .iter()
        .enumerate()
        .map(|(i, band)| {
            if improvable[i] {
                Vec::new()
            } else {
                band.iter().map(|&c| new_at[c]).collect()
            }
        })
        .collect();
    for e in &mut ledger {
        if e.kept == 2 {
            e.kept = 0;
            e.deficit_alternating += 1;
            e.deficit_input += 1;
        }
    }

    assert!(next.is_alternating(), "removing whole retained pairs keeps alternation");
    assert_eq!(next.n_components(), link.diagram.n_components());
    assert_eq!(
        next.n_crossings(),
        4 * link.loops.len() + ledger.iter().map(|e| e.kept).sum::<usize>()
    );
    let mut loops = Vec::new();
    let mut loop_comps = BTreeSet::new();
    for lp in &link.loops {
        let component = next.component_of(lp.edges[0]);
        loop_comps.insert(component);
        loops.push(LoopComponent { component, ..lp.clone() });
    }
    let knot_component = (0..next.n_components())
        .find(|c| !loop_comps.contains(c))
        .expect("the knot keeps a component of its own");

    Ok((AugmentedLink { diagram: next, knot_component, loops, band_idx }, ledger))
}

/// The 1/n filling manifest for every loop, with coefficients drawn from
/// the ledger column matching `target`.
pub fn surgery_instructions(
    link: &AugmentedLink,
    ledger: &[TwistLedgerEntry],
    target: RoundtripTarget,
) -> Vec<SurgeryInstruction> {
    link.loops
        .iter()
        .map(|lp| {
            let e = &ledger[lp.arc];
            let coefficient = match target {
                RoundtripTarget::Alternating => e.deficit_alternating,
                RoundtripTarget::Input => e.deficit_input,
            };
            SurgeryInstruction {
                component: lp.component,
                arc: lp.arc,
                coefficient,
                twist_sign: e.twist_sign,
                site: lp.site,
            }
        })
        .collect()
}

/// Execute the surgery manifest diagrammatically and compare: insert each
/// loop's twists across its disk, delete the loops, cancel mixed-sign
/// bigons, and test the result against the factored diagram the manifest
/// claims to rebuild.
pub fn verify_roundtrip(
    rec: &ReductionRecord,
    link: &AugmentedLink,
    ledger: &[TwistLedgerEntry],
    target: RoundtripTarget,
) -> Result<bool, AugmentError> {
    let mut cur = link.diagram.clone();
    for lp in &link.loops {
        let e = &ledger[lp.arc];
        let n = match target {
            RoundtripTarget::Alternating => e.deficit_alternating,
            RoundtripTarget::Input => e.deficit_input,
        };
        if n == 0 {
            continue;
        }
        let sigma = if n > 0 { e.twist_sign } else { -e.twist_sign };
        cur = insert_full_twists(&cur, lp.site.0, lp.site.1, n.unsigned_abs() as usize, sigma)?;
    }
    for lp in &link.loops {
        let comp = cur.component_of(lp.edges[0]);
        cur = delete_component(&cur, comp)?;
    }
    let back = normalize_bigons(&cur);
    // The input may hold mixed-sign twist regions (each crossing change
    // inside a region trades a full twist), so both sides are compared
    // after cancelling their mixed-sign bigons; an alternating target has
    // none and passes through unchanged.
    let want = normalize_bigons(&match target {
        RoundtripTarget::Alternating => rec.pre_collapse.clone(),
        RoundtripTarget::Input => rec.pre_collapse_as_input(),
    });
    Ok(back.canonically_equal(&want))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{pretzel, twist_knot};
    use crate::reduce::{alternate_tracked, collapse_arcs, collapse_with};
    use proptest::prelude::*;

    fn rec_of(d: &Diagram) -> ReductionRecord {
        collapse_arcs(d).unwrap()
    }

    fn figure_eight() -> Diagram {
        twist_knot(2)
    }

    #[test]
    fn the_figure_eight_gains_two_circles() {
        let rec = rec_of(&figure_eight());
        let l = augment(&rec).unwrap();
        assert_eq!(l.loops.len(), 2);
        assert_eq!(l.diagram.n_crossings(), 12);
        assert_eq!(l.diagram.n_components(), 3);
        assert!(l.diagram.is_alternating());
        assert_ne!(l.loops[0].component, l.loops[1].component);
        assert_ne!(l.knot_component, l.loops[0].component);
        assert_ne!(l.knot_component, l.loops[1].component);
        // the knot strand passes all original and all circle crossings
        assert_eq!(l.diagram.component_passages(l.knot_component).len(), 2 * 4 + 2 * 4);
    }

    #[test]
    fn loop_deletion_recovers_the_collapsed_knot() {
        for d in [
            figure_eight(),
            twist_knot(4),
            twist_knot(6),
            twist_knot(7),
            pretzel(&[3, 3, 3]),
            pretzel(&[5, 3, 3]),
            pretzel(&[1, 3, 3]),
            pretzel(&[1, 3, 1, 3, 1]),
        ] {
            let rec = rec_of(&d);
            let l = augment(&rec).unwrap();
            let mut cur = l.diagram.clone();
            for lp in &l.loops {
                let comp = cur.component_of(lp.edges[0]);
                cur = delete_component(&cur, comp).unwrap();
            }
            assert!(
                cur.canonically_equal(&rec.reduced),
                "deleting the circles of {d} leaves its collapsed knot"
            );
        }
    }

    #[test]
    fn improving_even_regions_drops_their_bands() {
        let rec = rec_of(&figure_eight());
        let l = augment(&rec).unwrap();
        let (li, ledger) = improve(&rec, &l).unwrap();
        assert_eq!(li.diagram.n_crossings(), 8);
        assert_eq!(li.diagram.n_components(), 3);
        assert!(li.diagram.is_alternating());
        assert_eq!(ledger.iter().map(|e| e.kept).collect::<Vec<_>>(), vec![0, 0]);
        assert_eq!(
            ledger.iter().map(|e| e.deficit_alternating).collect::<Vec<_>>(),
            vec![1, 1]
        );

        // all-odd regions leave nothing to improve
        let rec = rec_of(&pretzel(&[3, 3, 3]));
        let l = augment(&rec).unwrap();
        assert_eq!(l.diagram.n_crossings(), 17);
        let (li, ledger) = improve(&rec, &l).unwrap();
        assert_eq!(li.diagram.n_crossings(), 17);
        assert_eq!(
            ledger.iter().map(|e| e.deficit_alternating).collect::<Vec<_>>(),
            rec.ledger.iter().map(|e| e.deficit_alternating).collect::<Vec<_>>()
        );
    }

    #[test]
    fn surgery_coefficients_follow_the_ledger() {
        let rec = rec_of(&pretzel(&[3, 3, 3]));
        let l = augment(&rec).unwrap();
        let manifest = surgery_instructions(&l, &rec.ledger, RoundtripTarget::Alternating);
        assert_eq!(manifest.len(), 3);
        assert_eq!(manifest.iter().map(|s| s.coefficient).collect::<Vec<_>>(), vec![0, 1, 1]);
        let line = manifest[0].to_string();
        assert!(line.contains("1/0") && line.contains("trivial"), "{line}");
        assert!(manifest[1].to_string().contains("1/1"));

        let rec = rec_of(&figure_eight());
        let l = augment(&rec).unwrap();
        let (li, ledger) = improve(&rec, &l).unwrap();
        let manifest = surgery_instructions(&li, &ledger, RoundtripTarget::Alternating);
        assert_eq!(manifest.iter().map(|s| s.coefficient).collect::<Vec<_>>(), vec![1, 1]);
        assert_eq!(
            manifest.iter().map(|s| s.twist_sign).collect::<Vec<_>>().len(),
            2
        );
    }

    /// A relabeling of the (1,3,3) pretzel whose first twist region is the
    /// single-crossing band, driving the insurance insertion and hence a
    /// surgery coefficient of -1.
    fn p133_single_band_first() -> Diagram {
        let d = pretzel(&[1, 3, 3]);
        let m = d.max_label();
        (1..m)
            .find_map(|k| {
                let map: std::collections::BTreeMap<Edge, Edge> =
                    (1..=m).map(|e| (e, (e + k - 1) % m + 1)).collect();
                let r = d.relabel(&map).unwrap();
                let arcs = Seifert::new(&r).arc_decomposition().unwrap();
                (arcs.arcs[0].crossings.len() == 1).then_some(r)
            })
            .expect("some rotation leads with the single band")
    }

    #[test]
    fn roundtrips_rebuild_the_factored_diagram() {
        for d in [
            figure_eight(),
            twist_knot(4),
            twist_knot(5),
            twist_knot(6),
            twist_knot(7),
            pretzel(&[3, 3, 3]),
            pretzel(&[5, 3, 3]),
            pretzel(&[1, 3, 3]),
            p133_single_band_first(),
            crate::gen::double_twist(4, 4),
        ] {
            let rec = rec_of(&d);
            let l = augment(&rec).unwrap();
            assert!(
                verify_roundtrip(&rec, &l, &rec.ledger, RoundtripTarget::Alternating).unwrap(),
                "surgery on the augmented link must rebuild {d}"
            );
            let (li, ledger) = improve(&rec, &l).unwrap();
            assert!(
                verify_roundtrip(&rec, &li, &ledger, RoundtripTarget::Alternating).unwrap(),
                "surgery on the improved link must rebuild {d}"
            );
        }
    }

    #[test]
    fn crossing_changes_roundtrip_to_the_input() {
        for d in [figure_eight(), twist_knot(4), pretzel(&[3, 3, 3])] {
            for i in 0..d.n_crossings() {
                let changed = d.flip_crossing(i);
                let (alt, flips) = alternate_tracked(&changed);
                let rec =
                    collapse_with(changed.clone(), alt.clone(), alt.clone(), flips, Vec::new())
                        .unwrap();
                let l = augment(&rec).unwrap();
                assert!(
                    verify_roundtrip(&rec, &l, &rec.ledger, RoundtripTarget::Input).unwrap(),
                    "surgery must rebuild {changed} from its augmentation"
                );
                assert!(
                    verify_roundtrip(&rec, &l, &rec.ledger, RoundtripTarget::Alternating).unwrap(),
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_collapsible_knots_augment_cleanly(seed in proptest::num::u64::ANY) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let d = crate::gen::random_knot(&mut rng, 10);
            let alt = crate::reduce::alternate(&d);
            let Ok(rec) = collapse_arcs(&alt) else { return Ok(()) };
            if rec.reduced.n_crossings() == 0 {
                return Ok(());
            }
            let l = augment(&rec).unwrap();
            prop_assert!(l.diagram.is_alternating());
            prop_assert_eq!(l.diagram.n_components(), 1 + l.loops.len());
            prop_assert!(verify_roundtrip(&rec, &l, &rec.ledger, RoundtripTarget::Alternating).unwrap());
            let (li, ledger) = improve(&rec, &l).unwrap();
            prop_assert!(verify_roundtrip(&rec, &li, &ledger, RoundtripTarget::Alternating).unwrap());
        }
    }
}
