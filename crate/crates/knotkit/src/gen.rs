//! Diagram generators: torus twist chains, braid closures, alternating
//! knots from Gauss templates, and seeded random knots.

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::diagram::{Diagram, Edge, PdError};
use crate::moves::{add_kink, connect_sum, KinkVariant};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("braid letter {letter} out of range for {strands} strands")]
    BadLetter { letter: i32, strands: usize },
    #[error("braid word must touch every column of a {strands}-strand braid")]
    UnusedColumn { strands: usize },
    #[error(transparent)]
    Pd(#[from] PdError),
}

/// The closed 2-strand braid with `k` positive crossings, `k` odd: the
/// (2,k) torus knot; `k = 3` is the standard trefoil. The strand meets the
/// crossings in order twice around, so crossing `j` is passed at walk
/// positions `j` and `j + k`, under at the odd one.
pub fn torus_two(k: usize) -> Diagram {
    assert!(k >= 3 && k % 2 == 1, "only an odd twist chain closes to a knot");
    let n = 2 * k;
    let arrive = |t: usize| if t == 0 { n as Edge } else { t as Edge };
    let depart = |t: usize| t as Edge + 1;
    let tuples = (0..k)
        .map(|j| {
            let (u, o) = if j % 2 == 1 { (j, j + k) } else { (j + k, j) };
            [arrive(u), arrive(o), depart(u), depart(o)]
        })
        .collect();
    Diagram::from_tuples(tuples, None).expect("torus twist chains are planar")
}

/// Closure of a braid word on `strands` strands; letter `i` is the
/// positive crossing of columns `i`, `i+1`, and `-i` its negative. Every
/// column must be used (an untouched column would be a crossing-free loop,
/// which a PD code cannot carry).
pub fn braid_closure(strands: usize, word: &[i32]) -> Result<Diagram, GenError> {
    assert!(strands >= 2, "a braid needs at least two strands");
    let mut cur: Vec<Edge> = (1..=strands as Edge).collect();
    let mut touched = vec![false; strands];
    let mut fresh = strands as Edge + 1;
    let mut tuples: Vec<[Edge; 4]> = Vec::with_capacity(word.len());
    for &l in word {
        let i = l.unsigned_abs() as usize;
        if l == 0 || i >= strands {
            return Err(GenError::BadLetter { letter: l, strands });
        }
        let i = i - 1;
        touched[i] = true;
        touched[i + 1] = true;
        let (a, b) = (cur[i], cur[i + 1]);
        let (q, p) = (fresh, fresh + 1);
        fresh += 2;
        // The strand entering top-left leaves bottom-right and vice versa;
        // counterclockwise from the incoming under-strand.
        tuples.push(if l > 0 { [b, a, q, p] } else { [a, q, p, b] });
        cur[i] = q;
        cur[i + 1] = p;
    }
    if !touched.iter().all(|&t| t) {
        return Err(GenError::UnusedColumn { strands });
    }
    let close: BTreeMap<Edge, Edge> =
        cur.iter().enumerate().map(|(i, &e)| (e, i as Edge + 1)).collect();
    for t in &mut tuples {
        for s in t.iter_mut() {
            *s = *close.get(s).unwrap_or(s);
        }
    }
    Ok(Diagram::from_tuples(tuples, None)?)
}

/// Where each strand of the braid ends up.
pub fn braid_permutation(strands: usize, word: &[i32]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..strands).collect();
    for &l in word {
        let i = l.unsigned_abs() as usize - 1;
        perm.swap(i, i + 1);
    }
    perm
}

/// True when the closure of the braid is a single-component knot.
pub fn braid_closes_to_knot(strands: usize, word: &[i32]) -> bool {
    let perm = braid_permutation(strands, word);
    let mut seen = vec![false; strands];
    let mut cycle = 0;
    let mut at = 0;
    while !seen[at] {
        seen[at] = true;
        cycle += 1;
        at = perm[at];
    }
    cycle == strands
}

/// Build the alternating knot whose strand visits the given crossing ids in
/// order, passing over at even positions and under at odd ones. Each id in
/// `0..c` must appear at one even and one odd position. All `2^c` chirality
/// assignments are tried; among the planar ones the lexicographically
/// smallest canonical diagram is returned.
pub fn alternating_template(visits: &[usize]) -> Option<Diagram> {
    let len = visits.len();
    assert!(len.is_multiple_of(2) && len > 0, "a closed walk has an even number of passages");
    let c = len / 2;
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); c];
    for (pos, &id) in visits.iter().enumerate() {
        assert!(id < c, "crossing ids must cover 0..{c}");
        slots[id].push(pos);
    }
    let pairs: Vec<(usize, usize)> = slots
        .iter()
        .map(|ps| {
            assert_eq!(ps.len(), 2, "each crossing is visited exactly twice");
            let (a, b) = (ps[0], ps[1]);
            assert_ne!(a % 2, b % 2, "the walk must alternate over and under");
            if a % 2 == 1 {
                (a, b) // (under position, over position)
            } else {
                (b, a)
            }
        })
        .collect();
    let arrive = |pos: usize| if pos == 0 { len as Edge } else { pos as Edge };
    let depart = |pos: usize| pos as Edge + 1;

    let mut best: Option<(Vec<[Edge; 4]>, Diagram)> = None;
    for mask in 0u32..(1 << c) {
        let tuples: Vec<[Edge; 4]> = pairs
            .iter()
            .enumerate()
            .map(|(id, &(u, o))| {
                if mask & (1 << id) != 0 {
                    [arrive(u), arrive(o), depart(u), depart(o)]
                } else {
                    [arrive(u), depart(o), depart(u), arrive(o)]
                }
            })
            .collect();
        let Ok(d) = Diagram::from_tuples(tuples, None) else { continue };
        debug_assert!(d.is_knot() && d.is_alternating());
        let key = d.canonical_tuples();
        if best.as_ref().is_none_or(|(b, _)| key < *b) {
            best = Some((key, d));
        }
    }
    best.map(|(_, d)| d.canonical_relabel())
}

/// Twist knot with `n` twist crossings closed by a clasp; `n = 1` is the
/// trefoil, `n = 2` the figure eight.
pub fn twist_knot(n: usize) -> Diagram {
    assert!(n >= 1);
    let mut visits: Vec<usize> = (0..n).collect();
    visits.push(n);
    visits.push(n + 1);
    visits.extend((0..n).rev());
    if n.is_multiple_of(2) {
        visits.extend([n + 1, n]);
    } else {
        visits.extend([n, n + 1]);
    }
    let d = alternating_template(&visits).expect("twist knot templates are planar");
    assert_eq!(d.n_crossings(), n + 2);
    d
}

/// The knot made of two antiparallel twist regions with `p` and `q`
/// crossings; alternating exactly when both counts are even.
pub fn double_twist(p: usize, q: usize) -> Diagram {
    assert!(p >= 2 && q >= 2 && p.is_multiple_of(2) && q.is_multiple_of(2), "both twist regions must be even");
    let mut visits: Vec<usize> = (0..p).collect();
    visits.extend(p..p + q);
    visits.extend((0..p).rev());
    visits.extend((p..p + q).rev());
    let d = alternating_template(&visits).expect("double twist templates are planar");
    assert_eq!(d.n_crossings(), p + q);
    d
}

/// Pretzel knot: an odd number of vertical twist bands, each with an odd
/// crossing count, side by side and closed around the outside. The strand
/// descends band 1, ascends band 2, and so on across the row, then makes
/// a second pass in the opposite directions; with every count odd this
/// closes up into a single knot. No chirality search is needed: the j-th
/// crossing of a band is entered by both passes from the same side, which
/// side alternating with j, so each crossing's quadrant layout is forced.
pub fn pretzel(qs: &[usize]) -> Diagram {
    assert!(qs.len() % 2 == 1, "a pretzel knot needs an odd number of bands");
    assert!(qs.iter().all(|&q| q % 2 == 1), "every band must have an odd crossing count");
    let n: usize = qs.iter().sum();
    let arrive = |p: usize| if p == 0 { 2 * n as Edge } else { p as Edge };
    let depart = |p: usize| p as Edge + 1;
    let mut tuples = Vec::with_capacity(n);
    let mut offset = 0;
    for (idx, &q) in qs.iter().enumerate() {
        for j in 1..=q {
            // Walk positions of the downward and upward passes; passes
            // alternate over/under with position parity, and the two
            // passes of one crossing always land on opposite parities
            // because the total crossing count is odd.
            let (down, up) = if idx.is_multiple_of(2) {
                (offset + j - 1, n + offset + q - j)
            } else {
                (n + offset + j - 1, offset + q - j)
            };
            let (u, o) = if down % 2 == 1 { (down, up) } else { (up, down) };
            let positive = (down % 2 == 1) != (j % 2 == 1);
            tuples.push(if positive {
                [arrive(u), arrive(o), depart(u), depart(o)]
            } else {
                [arrive(u), depart(o), depart(u), arrive(o)]
            });
        }
        offset += q;
    }
    let d = Diagram::from_tuples(tuples, None).expect("pretzel templates are planar");
    assert_eq!(d.n_crossings(), n);
    assert!(d.is_knot() && d.is_alternating());
    d.canonical_relabel()
}

/// Connect sum tuned so the result stays alternating: exactly one of `b`
/// and its mirror meshes with `a`'s over/under phase at the junction.
pub fn alternating_connect_sum(a: &Diagram, b: &Diagram) -> Diagram {
    assert!(a.is_alternating() && b.is_alternating());
    let plain = connect_sum(a, b).expect("connect sums of knots are planar");
    if plain.is_alternating() {
        return plain;
    }
    let mirrored = connect_sum(a, &b.mirror()).expect("connect sums of knots are planar");
    assert!(mirrored.is_alternating(), "one of the two phases must mesh");
    mirrored
}

/// A seeded random knot diagram with at most `max_crossings` crossings:
/// a random braid closure that is a knot, decorated with occasional kinks
/// and an occasional trefoil summand.
pub fn random_knot<R: Rng>(rng: &mut R, max_crossings: usize) -> Diagram {
    assert!(max_crossings >= 3);
    loop {
        let strands = rng.gen_range(2..=5.min(max_crossings / 2).max(2));
        let len = rng.gen_range((strands - 1).max(2)..=max_crossings);
        let word: Vec<i32> = (0..len)
            .map(|_| {
                let col = rng.gen_range(1..strands) as i32;
                if rng.gen_bool(0.5) {
                    col
                } else {
                    -col
                }
            })
            .collect();
        if !braid_closes_to_knot(strands, &word) {
            continue;
        }
        let Ok(mut d) = braid_closure(strands, &word) else { continue };
        let spare = max_crossings - d.n_crossings();
        for _ in 0..rng.gen_range(0..=spare.min(2)) {
            let labels: Vec<Edge> = d.edge_labels().collect();
            let e = labels[rng.gen_range(0..labels.len())];
            d = add_kink(&d, e, KinkVariant::ALL[rng.gen_range(0..4)])
                .expect("kinks keep diagrams valid");
        }
        if max_crossings >= d.n_crossings() + 3 && rng.gen_bool(0.2) {
            d = connect_sum(&d, &torus_two(3)).expect("summing a knot keeps a knot");
        }
        return d;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seifert::Seifert;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TREFOIL: &str = "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)";

    #[test]
    fn torus_two_three_is_the_standard_trefoil() {
        assert_eq!(torus_two(3).to_pd_string(), TREFOIL);
    }

    #[test]
    fn torus_two_properties() {
        for k in [3usize, 5, 7, 9] {
            let d = torus_two(k);
            assert_eq!(d.n_crossings(), k);
            assert_eq!(d.writhe(), k as i32);
            assert!(d.is_knot());
            assert!(d.is_alternating());
            let s = Seifert::new(&d);
            assert_eq!(s.n_circles(), 2);
            assert_eq!(s.genus(), (k as u32 - 1) / 2);
            assert_eq!(s.graph().valencies(), vec![k, k]);
            s.verify(&d).unwrap();
        }
    }

    #[test]
    fn braid_closure_of_sigma_one_cubed_is_the_trefoil() {
        let d = braid_closure(2, &[1, 1, 1]).unwrap();
        assert_eq!(d.writhe(), 3);
        assert!(d.canonically_equal(&torus_two(3)));
    }

    #[test]
    fn braid_closure_figure_eight() {
        let d = braid_closure(3, &[1, -2, 1, -2]).unwrap();
        assert_eq!(d.n_crossings(), 4);
        assert_eq!(d.writhe(), 0);
        assert!(d.is_knot());
        let s = Seifert::new(&d);
        assert_eq!(s.n_circles(), 3);
        assert_eq!(s.genus(), 1);
    }

    #[test]
    fn braid_closure_rejects_bad_words() {
        assert!(matches!(
            braid_closure(2, &[2]),
            Err(GenError::BadLetter { letter: 2, strands: 2 })
        ));
        assert!(matches!(
            braid_closure(3, &[1, 1, 1]),
            Err(GenError::UnusedColumn { strands: 3 })
        ));
    }

    #[test]
    fn hopf_braid_is_not_a_knot() {
        assert!(!braid_closes_to_knot(2, &[1, 1]));
        assert!(braid_closes_to_knot(2, &[1, 1, 1]));
        assert_eq!(braid_closure(2, &[1, 1]).unwrap().n_components(), 2);
    }

    #[test]
    fn template_solver_recovers_the_trefoil() {
        let d = alternating_template(&[0, 1, 2, 0, 1, 2]).unwrap();
        assert!(d.canonically_equal(&torus_two(3)));
    }

    #[test]
    fn twist_knots() {
        assert!(twist_knot(1).canonically_equal(&torus_two(3)));
        for n in 2..=7 {
            let d = twist_knot(n);
            assert_eq!(d.n_crossings(), n + 2);
            assert!(d.is_knot());
            assert!(d.is_alternating());
            let s = Seifert::new(&d);
            assert_eq!(s.n_circles(), n + 1);
            assert_eq!(s.genus(), 1);
            s.verify(&d).unwrap();
        }
    }

    #[test]
    fn figure_eight_structure() {
        let d = twist_knot(2);
        assert_eq!(d.n_crossings(), 4);
        assert_eq!(d.n_faces(), 6);
        assert_eq!(d.writhe(), 0);
        let s = Seifert::new(&d);
        let mut val = s.graph().valencies();
        val.sort();
        assert_eq!(val, vec![2, 2, 4]);
        let arcs = s.arc_decomposition().unwrap();
        assert_eq!(arcs.n_fat, 1);
        assert_eq!(arcs.n_arcs(), 2);
        let mut lens: Vec<usize> = arcs.arcs.iter().map(|a| a.len()).collect();
        lens.sort();
        assert_eq!(lens, vec![2, 2]);
        assert!(arcs.arcs.iter().all(|a| a.endpoints.0 == a.endpoints.1));
    }

    #[test]
    fn double_twist_knots() {
        assert!(double_twist(2, 2).canonically_equal(&twist_knot(2)));
        for (p, q) in [(4, 2), (2, 4), (4, 4), (6, 2), (2, 6)] {
            let d = double_twist(p, q);
            assert_eq!(d.n_crossings(), p + q);
            assert!(d.is_knot());
            assert!(d.is_alternating());
            let s = Seifert::new(&d);
            assert_eq!(s.n_circles(), p + q - 1);
            assert_eq!(s.genus(), 1);
        }
    }

    #[test]
    fn pretzels() {
        assert!(pretzel(&[1, 1, 1]).canonically_equal(&torus_two(3)));
        let cases: &[(&[usize], u32)] = &[
            (&[1, 1, 3], 1),
            (&[1, 1, 5], 1),
            (&[1, 3, 3], 1),
            (&[3, 3, 3], 1),
            (&[1, 1, 1, 1, 3], 2),
            (&[1, 3, 1, 3, 1], 2),
            (&[1, 1, 1, 1, 1, 1, 3], 3),
        ];
        for &(qs, genus) in cases {
            let d = pretzel(qs);
            let c: usize = qs.iter().sum();
            assert_eq!(d.n_crossings(), c);
            assert!(d.is_knot(), "{qs:?}");
            assert!(d.is_alternating());
            let s = Seifert::new(&d);
            assert_eq!(s.n_circles(), c - qs.len() + 2);
            assert_eq!(s.genus(), genus, "{qs:?}");
            s.verify(&d).unwrap();
        }
    }

    #[test]
    fn pretzel_arcs_match_the_bands() {
        let d = pretzel(&[3, 3, 3]);
        let s = Seifert::new(&d);
        let arcs = s.arc_decomposition().unwrap();
        assert_eq!(arcs.n_fat, 2);
        assert_eq!(arcs.fat_valencies, BTreeMap::from([(3, 2)]));
        let mut lens: Vec<usize> = arcs.arcs.iter().map(|a| a.len()).collect();
        lens.sort();
        assert_eq!(lens, vec![3, 3, 3]);
    }

    #[test]
    fn alternating_connect_sums() {
        let t = torus_two(3);
        let g = alternating_connect_sum(&t, &t);
        assert!(g.is_alternating());
        assert_eq!(g.n_crossings(), 6);
        assert_eq!(Seifert::new(&g).genus(), 2);
        let f = alternating_connect_sum(&t, &twist_knot(2));
        assert!(f.is_alternating());
        assert_eq!(Seifert::new(&f).genus(), 2);
    }

    proptest! {
        #[test]
        fn random_knots_are_valid_bounded_knots(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_knot(&mut rng, 16);
            prop_assert!(d.is_knot());
            prop_assert!(d.n_crossings() >= 2 && d.n_crossings() <= 16);
            let s = Seifert::new(&d);
            prop_assert!(s.verify(&d).is_ok());
        }
    }
}
