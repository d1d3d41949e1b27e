//! Crossing-count and volume bounds for the augmented link, plus the
//! classification of genus-one inputs into their two families.
//!
//! Every inequality is integral except the volume lines, which scale
//! crossing counts by `V0`, the volume of the regular ideal hyperbolic
//! tetrahedron. `V0` is a frozen constant; [`tetrahedron_volume_series`]
//! recomputes it from scratch through the Lobachevsky function so the
//! tests can cross-examine the constant instead of trusting it.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::augment::AugmentedLink;
use crate::diagram::Diagram;
use crate::reduce::ReductionRecord;
use crate::seifert::Seifert;

/// Volume of the regular ideal hyperbolic tetrahedron, 2·Λ(π/6).
pub const V0: f64 = 1.0149416064096536;

/// Absolute tolerance for comparisons among V0-scaled volume figures.
/// Crossing counts are exact integers, so the only rounding enters
/// through the handful of multiplications by `V0`.
pub const VOLUME_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum BoundsError {
    /// The artifacts disagree with each other: a pipeline bug, not bad input.
    #[error("inconsistent pipeline artifacts: {0}")]
    Inconsistency(String),
    #[error("classification precondition failed: {0}")]
    Precondition(String),
}

/// ζ(s) for an even integer s ≥ 2: direct summation of the first ten
/// thousand terms, then an Euler–Maclaurin tail. The first omitted
/// correction is below 1e-21 already at s = 2.
fn zeta_even(s: i32) -> f64 {
    const CUTOFF: usize = 10_000;
    let mut sum = 0.0;
    for k in (1..=CUTOFF).rev() {
        sum += (k as f64).powi(-s);
    }
    let n = CUTOFF as f64;
    let sf = f64::from(s);
    sum + n.powi(1 - s) / (sf - 1.0) - n.powi(-s) / 2.0 + sf * n.powi(-s - 1) / 12.0
}

/// The Lobachevsky function Λ(θ) = −∫₀^θ ln|2 sin t| dt on (0, π), by the
/// uniformly convergent series
///
///   Λ(θ) = θ(1 − ln 2θ) + Σ_{n≥1} ζ(2n)/(n(2n+1)) · θ · (θ/π)^{2n},
///
/// obtained by integrating ln(sin t / t) = −Σ ζ(2n) (t/π)^{2n} / n
/// term by term. The ratio (θ/π)² is at most 1/9 where we evaluate,
/// so a few dozen terms are far more than enough.
fn lobachevsky(theta: f64) -> f64 {
    let mut sum = theta * (1.0 - (2.0 * theta).ln());
    let ratio = (theta / std::f64::consts::PI).powi(2);
    let mut power = theta;
    for n in 1..=64 {
        power *= ratio;
        let term = zeta_even(2 * n) / (f64::from(n) * f64::from(2 * n + 1)) * power;
        sum += term;
        if term < 1e-18 {
            break;
        }
    }
    sum
}

/// Recompute the volume of the regular ideal tetrahedron from scratch:
/// the dihedral angles are all π/3, giving 2·Λ(π/6). Serves as the
/// independent oracle for [`V0`].
pub fn tetrahedron_volume_series() -> f64 {
    2.0 * lobachevsky(std::f64::consts::PI / 6.0)
}

/// Every counting and volume figure for one pipeline run: the genus,
/// the fat-circle census of the collapsed surface, the three crossing
/// counts, and each inequality of the finiteness argument evaluated in
/// exact integer arithmetic.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub genus: u32,
    /// Fat (valency ≥ 3) circles of the Seifert graph.
    pub n_fat: usize,
    /// Valency → number of fat circles with that valency.
    pub fat_valencies: BTreeMap<usize, usize>,
    /// Twist arcs between fat circles.
    pub n_arcs: usize,
    /// Crossings of the collapsed knot diagram.
    pub crossings_reduced: usize,
    /// Crossings of the augmented link (four per loop plus the knot's own).
    pub crossings_link: usize,
    /// Crossings after dropping the retained pairs of even regions.
    pub crossings_improved: usize,
    /// crossings_link ≤ 36·genus.
    pub bound_36g: bool,
    /// n_arcs ≤ 6·genus − 1.
    pub bound_6g_minus_1: bool,
    /// n_fat ≤ 4·genus − 2.
    pub bound_4g_minus_2: bool,
    /// crossings_improved ≤ 5·n_arcs + 2.
    pub bound_5a_plus_2: bool,
    /// 4·V0·crossings_improved.
    pub volume_bound_raw: f64,
    /// 4·V0·crossings_link, the figure before the even-region improvement.
    pub volume_bound_coarse: f64,
    /// 122·genus, the linear envelope of the raw bound.
    pub volume_bound_linear: f64,
    /// 120·genus·V0.
    pub corollary_bound: f64,
    pub v0: f64,
}

impl BoundsReport {
    /// Every counting inequality at once.
    pub fn all_bounds_hold(&self) -> bool {
        self.bound_36g && self.bound_6g_minus_1 && self.bound_4g_minus_2 && self.bound_5a_plus_2
    }
}

/// Assemble the report for one run, re-deriving every count it quotes
/// from the artifacts themselves and cross-checking the copies against
/// each other. Any disagreement is an [`BoundsError::Inconsistency`]:
/// the artifacts of a correct pipeline cannot produce one.
pub fn report(
    rec: &ReductionRecord,
    link: &AugmentedLink,
    improved: &AugmentedLink,
) -> Result<BoundsReport, BoundsError> {
    let fail = BoundsError::Inconsistency;

    let pre = Seifert::new(&rec.pre_collapse);
    let dec = pre
        .arc_decomposition()
        .map_err(|e| fail(format!("factored diagram has no arc structure: {e}")))?;
    let red = Seifert::new(&rec.reduced);
    let dec_red = red
        .arc_decomposition()
        .map_err(|e| fail(format!("collapsed diagram has no arc structure: {e}")))?;

    let g = rec.genus;
    if pre.genus() != g || red.genus() != g {
        return Err(fail(format!(
            "genus drifted: recorded {g}, factored {}, collapsed {}",
            pre.genus(),
            red.genus()
        )));
    }
    if dec.n_fat != dec_red.n_fat || dec.fat_valencies != dec_red.fat_valencies {
        return Err(fail("collapse changed the fat-circle structure".into()));
    }
    let n_fat = dec.n_fat;
    let n_arcs = dec.arcs.len();
    if dec_red.arcs.len() != n_arcs || rec.ledger.len() != n_arcs {
        return Err(fail(format!(
            "arc counts disagree: factored {n_arcs}, collapsed {}, ledger {}",
            dec_red.arcs.len(),
            rec.ledger.len()
        )));
    }

    // The collapsed surface is N disks and A bands, so its Euler
    // characteristic reads off both ways: from the genus and from the
    // arc census. Recount the arcs once more through the valency table.
    let chi = 1 - 2 * i64::from(g);
    if chi != n_fat as i64 - n_arcs as i64 {
        return Err(fail(format!("1 - 2g = {chi} but N - A = {}", n_fat as i64 - n_arcs as i64)));
    }
    let end_total: usize = dec.fat_valencies.iter().map(|(v, n)| v * n).sum();
    if !end_total.is_multiple_of(2) || chi != n_fat as i64 - (end_total / 2) as i64 {
        return Err(fail(format!(
            "valency recount broke the Euler identity: N = {n_fat}, arc ends = {end_total}"
        )));
    }

    let crossings_reduced = rec.reduced.n_crossings();
    let crossings_link = link.diagram.n_crossings();
    let crossings_improved = improved.diagram.n_crossings();
    if link.loops.len() != n_arcs || improved.loops.len() != n_arcs {
        return Err(fail(format!(
            "loop counts disagree with the arcs: {} and {} vs {n_arcs}",
            link.loops.len(),
            improved.loops.len()
        )));
    }
    if crossings_link != 4 * n_arcs + crossings_reduced {
        return Err(fail(format!(
            "the augmented link has {crossings_link} crossings, not 4A + c = {}",
            4 * n_arcs + crossings_reduced
        )));
    }
    if crossings_improved > crossings_link
        || !(crossings_link - crossings_improved).is_multiple_of(2)
    {
        return Err(fail(format!(
            "improvement must drop whole twists: {crossings_link} -> {crossings_improved}"
        )));
    }

    let g64 = i64::from(g);
    let report = BoundsReport {
        genus: g,
        n_fat,
        fat_valencies: dec.fat_valencies,
        n_arcs,
        crossings_reduced,
        crossings_link,
        crossings_improved,
        bound_36g: (crossings_link as i64) <= 36 * g64,
        bound_6g_minus_1: (n_arcs as i64) <= 6 * g64 - 1,
        bound_4g_minus_2: (n_fat as i64) <= 4 * g64 - 2,
        bound_5a_plus_2: (crossings_improved as i64) <= 5 * n_arcs as i64 + 2,
        volume_bound_raw: 4.0 * V0 * crossings_improved as f64,
        volume_bound_coarse: 4.0 * V0 * crossings_link as f64,
        volume_bound_linear: 122.0 * f64::from(g),
        corollary_bound: 120.0 * f64::from(g) * V0,
        v0: V0,
    };
    // 4·V0 < 4.06, so 30g improved crossings stay under the 122g line.
    if (crossings_improved as i64) <= 30 * g64
        && report.volume_bound_raw > report.volume_bound_linear + VOLUME_TOL
    {
        return Err(fail(format!(
            "volume figures out of order: 4·V0·{crossings_improved} > 122·{g}"
        )));
    }
    Ok(report)
}

/// A triangulation bound for the link complement: the count of ideal
/// tetrahedra needed is at most four per crossing.
pub fn tetrahedron_count_bound(d: &Diagram) -> usize {
    4 * d.n_crossings()
}

/// The two families of alternating knots with canonical genus one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GenusOneClass {
    /// Double-twist form: one fat circle, two interleaved twist regions
    /// with the given even band counts (largest first).
    TwoBridge(usize, usize),
    /// Pretzel form: two fat circles joined by strands of pairwise odd
    /// band counts (largest first).
    OddPretzel(Vec<usize>),
    /// Should never occur; carries what was seen, for diagnosis.
    Unrecognized { n_fat: usize, arc_lengths: Vec<usize> },
}

/// Sort an alternating genus-one knot diagram into its family by
/// inspecting the arc decomposition. Closed 2-braids (the torus forms)
/// are refused here as they are everywhere else in the pipeline, as are
/// diagrams with nugatory crossings or the wrong genus.
pub fn classify_genus_one(d: &Diagram) -> Result<GenusOneClass, BoundsError> {
    if !d.is_knot() {
        return Err(BoundsError::Precondition(format!(
            "expected a knot, got {} components",
            d.n_components()
        )));
    }
    if !d.is_alternating() {
        return Err(BoundsError::Precondition("the diagram is not alternating".into()));
    }
    let s = Seifert::new(d);
    if s.n_circles() == 2 {
        return Err(BoundsError::Precondition(
            "two Seifert circles make a closed 2-braid, handled as a torus form".into(),
        ));
    }
    if s.genus() != 1 {
        return Err(BoundsError::Precondition(format!("genus is {}, not 1", s.genus())));
    }
    let dec = s.arc_decomposition().map_err(|e| BoundsError::Precondition(e.to_string()))?;
    let mut lens: Vec<usize> = dec.arcs.iter().map(|a| a.len()).collect();
    lens.sort_unstable_by(|a, b| b.cmp(a));
    Ok(match dec.n_fat {
        1 if lens.len() == 2 && lens.iter().all(|l| l.is_multiple_of(2)) => {
            GenusOneClass::TwoBridge(lens[0], lens[1])
        }
        2 if lens.iter().all(|l| !l.is_multiple_of(2)) => GenusOneClass::OddPretzel(lens),
        _ => GenusOneClass::Unrecognized { n_fat: dec.n_fat, arc_lengths: lens },
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;

    use super::*;
    use crate::augment::{augment, improve};
    use crate::gen::{double_twist, pretzel, torus_two, twist_knot};
    use crate::reduce::collapse_arcs;

    fn run(d: &Diagram) -> (ReductionRecord, AugmentedLink, AugmentedLink) {
        let rec = collapse_arcs(d).unwrap();
        let link = augment(&rec).unwrap();
        let (improved, _) = improve(&rec, &link).unwrap();
        (rec, link, improved)
    }

    #[test]
    fn zeta_even_matches_the_classical_values() {
        assert!((zeta_even(2) - PI * PI / 6.0).abs() < 1e-12);
        assert!((zeta_even(4) - PI.powi(4) / 90.0).abs() < 1e-12);
    }

    #[test]
    fn the_series_recovers_the_tetrahedron_volume() {
        let v = tetrahedron_volume_series();
        assert!((v - V0).abs() < 1e-10, "series gave {v}");
        // The same volume as six times the birectangular piece at π/3.
        assert!((3.0 * lobachevsky(PI / 3.0) - v).abs() < 1e-12);
        assert!(1.0 < V0 && V0 < 1.015);
        assert!(120.0 * V0 < 122.0);
    }

    #[test]
    fn the_figure_eight_report_counts_everything() {
        let (rec, link, improved) = run(&twist_knot(2));
        let r = report(&rec, &link, &improved).unwrap();
        assert_eq!(r.genus, 1);
        assert_eq!(r.n_fat, 1);
        assert_eq!(r.fat_valencies, BTreeMap::from([(4, 1)]));
        assert_eq!(r.n_arcs, 2);
        assert_eq!(
            (r.crossings_reduced, r.crossings_link, r.crossings_improved),
            (4, 12, 8)
        );
        assert!(r.all_bounds_hold());
        assert!((r.volume_bound_raw - 32.478131405108915).abs() < VOLUME_TOL);
        assert!((r.volume_bound_coarse - 48.0 * V0).abs() < VOLUME_TOL);
        assert_eq!(r.volume_bound_linear, 122.0);
        assert!((r.corollary_bound - 121.79299276915843).abs() < VOLUME_TOL);
        assert!(r.corollary_bound < 122.0);
    }

    #[test]
    fn the_pretzel_report_keeps_its_insurance_bands() {
        let (rec, link, improved) = run(&pretzel(&[3, 3, 3]));
        assert!(rec.insurance_arc.is_some());
        let r = report(&rec, &link, &improved).unwrap();
        assert_eq!(r.genus, 1);
        assert_eq!(r.n_fat, 2);
        assert_eq!(r.fat_valencies, BTreeMap::from([(3, 2)]));
        assert_eq!(r.n_arcs, 3);
        assert_eq!(
            (r.crossings_reduced, r.crossings_link, r.crossings_improved),
            (5, 17, 17)
        );
        assert!(r.all_bounds_hold());
        // All-odd regions leave nothing to improve: 5A + 2 is attained.
        assert_eq!(r.crossings_improved as i64, 5 * r.n_arcs as i64 + 2);
        assert!((r.volume_bound_raw - 69.01602923585645).abs() < VOLUME_TOL);
        assert_eq!(r.volume_bound_raw, r.volume_bound_coarse);
    }

    #[test]
    fn mismatched_artifacts_are_refused() {
        let (rec, _, _) = run(&twist_knot(2));
        let (_, link, improved) = run(&pretzel(&[3, 3, 3]));
        assert!(matches!(
            report(&rec, &link, &improved),
            Err(BoundsError::Inconsistency(_))
        ));
    }

    #[test]
    fn tetrahedron_counts_scale_with_crossings() {
        let (_, link, improved) = run(&twist_knot(2));
        assert_eq!(tetrahedron_count_bound(&improved.diagram), 32);
        let (_, link333, _) = run(&pretzel(&[3, 3, 3]));
        assert_eq!(tetrahedron_count_bound(&link333.diagram), 68);
        assert_eq!(tetrahedron_count_bound(&link.diagram), 48);
    }

    #[test]
    fn genus_one_knots_sort_into_the_two_families() {
        assert_eq!(classify_genus_one(&twist_knot(2)).unwrap(), GenusOneClass::TwoBridge(2, 2));
        assert_eq!(classify_genus_one(&twist_knot(4)).unwrap(), GenusOneClass::TwoBridge(4, 2));
        assert_eq!(
            classify_genus_one(&double_twist(4, 4)).unwrap(),
            GenusOneClass::TwoBridge(4, 4)
        );
        assert_eq!(
            classify_genus_one(&pretzel(&[3, 3, 3])).unwrap(),
            GenusOneClass::OddPretzel(vec![3, 3, 3])
        );
        // Odd twist knots wear their pretzel form: T5 = P(5,1,1).
        assert_eq!(
            classify_genus_one(&twist_knot(5)).unwrap(),
            GenusOneClass::OddPretzel(vec![5, 1, 1])
        );
    }

    #[test]
    fn the_classifier_refuses_what_the_pipeline_shunts() {
        assert!(matches!(
            classify_genus_one(&torus_two(3)),
            Err(BoundsError::Precondition(_))
        ));
        let genus_two = pretzel(&[3, 3, 3, 3, 3]);
        assert!(matches!(
            classify_genus_one(&genus_two),
            Err(BoundsError::Precondition(_))
        ));
    }

    proptest! {
        #[test]
        fn odd_pretzels_classify_and_pass_every_bound(
            a in 0..5usize, b in 0..5usize, c in 0..5usize,
        ) {
            let (a, b, c) = (2 * a + 1, 2 * b + 1, 2 * c + 1);
            prop_assume!(a + b + c > 3); // (1,1,1) is the trefoil, a torus form
            let d = pretzel(&[a, b, c]);
            let mut want = vec![a, b, c];
            want.sort_unstable_by(|x, y| y.cmp(x));
            prop_assert_eq!(classify_genus_one(&d).unwrap(), GenusOneClass::OddPretzel(want));
            let (rec, link, improved) = run(&d);
            let r = report(&rec, &link, &improved).unwrap();
            prop_assert!(r.all_bounds_hold());
            prop_assert_eq!(r.genus, 1);
            prop_assert!(r.volume_bound_raw <= r.volume_bound_linear + VOLUME_TOL);
        }
    }
}
