//! The end-to-end run: take any knot diagram, make it alternating by
//! crossing changes, factor out connect sums and nugatory crossings,
//! shunt the degenerate shapes aside, collapse the twist regions, hang a
//! circle on every arc, and bundle the surgery manifests, counting
//! bounds, and (for genus one) the family classification.

use serde::Serialize;
use thiserror::Error;

use crate::augment::{
    self, surgery_instructions, AugmentError, AugmentedLink, RoundtripTarget, SurgeryInstruction,
};
use crate::bounds::{self, BoundsError, BoundsReport, GenusOneClass};
use crate::diagram::Diagram;
use crate::reduce::{
    alternate_tracked, collapse_with, detect_torus_2k, prime_reduce_tracked,
    remove_nugatory_tracked, ReduceError, ReductionRecord, TwistLedgerEntry,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Shapes the construction is not meant for: they are recognized and
/// reported, not treated as failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NonHyperbolicOutcome {
    /// Everything reduced away.
    Unknot,
    /// The reduced alternating diagram closed up as a 2-strand twist
    /// chain: the (2,k) torus knot.
    TorusChain { crossings: usize },
}

/// A degenerate run: what was recognized and the trail that led there.
#[derive(Debug, Clone, Serialize)]
pub struct NonHyperbolicReport {
    pub outcome: NonHyperbolicOutcome,
    pub provenance: Vec<String>,
}

/// Everything a completed run produces.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineBundle {
    pub record: ReductionRecord,
    /// The augmented link: one circle per arc of the collapsed diagram.
    pub link: AugmentedLink,
    /// The even-region refinement of `link`, when requested.
    pub improved: Option<AugmentedLink>,
    /// Ledger matching `improved`.
    pub improved_ledger: Option<Vec<TwistLedgerEntry>>,
    /// Filling manifest rebuilding the alternating knot, for the final link.
    pub surgery_alternating: Vec<SurgeryInstruction>,
    /// Filling manifest rebuilding the input knot, for the final link.
    pub surgery_input: Vec<SurgeryInstruction>,
    pub bounds: BoundsReport,
    /// Present exactly when the genus is one.
    pub classification: Option<GenusOneClass>,
}

impl PipelineBundle {
    /// The link the manifests and the raw volume figure refer to.
    pub fn final_link(&self) -> &AugmentedLink {
        self.improved.as_ref().unwrap_or(&self.link)
    }

    /// The ledger paired with [`final_link`](Self::final_link).
    pub fn final_ledger(&self) -> &[TwistLedgerEntry] {
        self.improved_ledger.as_deref().unwrap_or(&self.record.ledger)
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum PipelineOutcome {
    Reduced(Box<PipelineBundle>),
    NonHyperbolic(NonHyperbolicReport),
}

/// Run the whole construction on `d`. With `improve` set, even twist
/// regions shed their retained bands into their surgery coefficients,
/// which is what makes the final crossing bound linear in the genus.
pub fn run_pipeline(d: &Diagram, improve: bool) -> Result<PipelineOutcome, PipelineError> {
    if !d.is_knot() {
        return Err(ReduceError::NotKnot(d.n_components()).into());
    }

    let (alternating, mut flips) = alternate_tracked(d);
    let mut provenance = Vec::new();
    let changed = flips.iter().filter(|&&f| f).count();
    if changed > 0 {
        provenance.push(format!("changed {changed} crossing(s) to reach the alternating phase"));
    }

    // Factoring can expose new nugatory crossings and vice versa, so
    // alternate the two until a full round leaves the diagram alone.
    // Crossings strictly decrease every other round, so this ends.
    let mut cur = alternating.clone();
    loop {
        let before = cur.n_crossings();
        let (nd, origin, log) = prime_reduce_tracked(&cur)?;
        flips = origin.iter().map(|&p| flips[p]).collect();
        provenance.extend(log);
        cur = nd;
        let (nd, origin, log) = remove_nugatory_tracked(&cur)?;
        flips = origin.iter().map(|&p| flips[p]).collect();
        provenance.extend(log);
        cur = nd;
        if cur.n_crossings() == before {
            break;
        }
    }

    if cur.n_crossings() == 0 {
        provenance.push("the reduced diagram has no crossings left".to_string());
        return Ok(PipelineOutcome::NonHyperbolic(NonHyperbolicReport {
            outcome: NonHyperbolicOutcome::Unknot,
            provenance,
        }));
    }
    if let Some(crossings) = detect_torus_2k(&cur) {
        provenance.push(format!("the reduced diagram is a closed 2-braid with {crossings} crossings"));
        return Ok(PipelineOutcome::NonHyperbolic(NonHyperbolicReport {
            outcome: NonHyperbolicOutcome::TorusChain { crossings },
            provenance,
        }));
    }

    let record = collapse_with(d.clone(), alternating, cur, flips, provenance)?;
    let link = augment::augment(&record)?;
    let (improved, improved_ledger) = if improve {
        let (l, ledger) = augment::improve(&record, &link)?;
        (Some(l), Some(ledger))
    } else {
        (None, None)
    };

    let final_link = improved.as_ref().unwrap_or(&link);
    let final_ledger = improved_ledger.as_deref().unwrap_or(&record.ledger);
    let surgery_alternating =
        surgery_instructions(final_link, final_ledger, RoundtripTarget::Alternating);
    let surgery_input = surgery_instructions(final_link, final_ledger, RoundtripTarget::Input);
    let bounds = bounds::report(&record, &link, final_link)?;
    let classification = if record.genus == 1 {
        Some(bounds::classify_genus_one(&record.pre_collapse)?)
    } else {
        None
    };

    Ok(PipelineOutcome::Reduced(Box::new(PipelineBundle {
        record,
        link,
        improved,
        improved_ledger,
        surgery_alternating,
        surgery_input,
        bounds,
        classification,
    })))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::augment::verify_roundtrip;
    use crate::gen::{alternating_connect_sum, braid_closure, pretzel, random_knot, torus_two, twist_knot};

    fn bundle_of(outcome: PipelineOutcome) -> Box<PipelineBundle> {
        match outcome {
            PipelineOutcome::Reduced(b) => b,
            PipelineOutcome::NonHyperbolic(r) => panic!("expected a full run, got {r:?}"),
        }
    }

    #[test]
    fn the_figure_eight_bundle_is_complete() {
        let b = bundle_of(run_pipeline(&twist_knot(2), true).unwrap());
        assert_eq!(b.record.genus, 1);
        assert_eq!(b.link.diagram.n_crossings(), 12);
        assert_eq!(b.final_link().diagram.n_crossings(), 8);
        assert!(b.bounds.all_bounds_hold());
        assert_eq!(b.classification, Some(GenusOneClass::TwoBridge(2, 2)));
        assert_eq!(b.surgery_alternating.len(), 2);
        assert_eq!(b.surgery_input.len(), 2);
        // Both retained pairs moved into the coefficients.
        for s in &b.surgery_alternating {
            assert_eq!(s.coefficient, 1);
        }
        serde_json::to_string(&b).expect("the bundle serializes");
    }

    #[test]
    fn skipping_the_refinement_keeps_the_full_link() {
        let b = bundle_of(run_pipeline(&twist_knot(2), false).unwrap());
        assert!(b.improved.is_none());
        assert_eq!(b.final_link().diagram.n_crossings(), 12);
        assert!(b.bounds.all_bounds_hold());
        for s in &b.surgery_alternating {
            assert_eq!(s.coefficient, 0);
        }
    }

    #[test]
    fn torus_inputs_are_recognized_not_processed() {
        let out = run_pipeline(&torus_two(3), true).unwrap();
        match out {
            PipelineOutcome::NonHyperbolic(r) => {
                assert_eq!(r.outcome, NonHyperbolicOutcome::TorusChain { crossings: 3 });
            }
            PipelineOutcome::Reduced(_) => panic!("the trefoil is a torus knot"),
        }
    }

    #[test]
    fn connect_sums_factor_before_the_torus_check() {
        let granny = alternating_connect_sum(&torus_two(3), &torus_two(3));
        let out = run_pipeline(&granny, true).unwrap();
        match out {
            PipelineOutcome::NonHyperbolic(r) => {
                assert_eq!(r.outcome, NonHyperbolicOutcome::TorusChain { crossings: 3 });
                assert!(
                    r.provenance.iter().any(|l| l.contains("split along")),
                    "{:?}",
                    r.provenance
                );
            }
            PipelineOutcome::Reduced(_) => panic!("the granny knot splits into torus summands"),
        }
    }

    #[test]
    fn kinked_unknots_reduce_to_nothing() {
        let kink = braid_closure(2, &[1]).unwrap();
        let out = run_pipeline(&kink, true).unwrap();
        match out {
            PipelineOutcome::NonHyperbolic(r) => assert_eq!(r.outcome, NonHyperbolicOutcome::Unknot),
            PipelineOutcome::Reduced(_) => panic!("a single kink is the unknot"),
        }
    }

    #[test]
    fn links_are_refused() {
        let two_comp = braid_closure(2, &[1, -1]).unwrap();
        assert!(matches!(
            run_pipeline(&two_comp, true),
            Err(PipelineError::Reduce(ReduceError::NotKnot(2)))
        ));
    }

    #[test]
    fn the_insurance_case_flows_through() {
        let b = bundle_of(run_pipeline(&pretzel(&[3, 3, 3]), true).unwrap());
        assert!(b.record.insurance_arc.is_some());
        assert_eq!(b.final_link().diagram.n_crossings(), 17);
        assert_eq!(b.classification, Some(GenusOneClass::OddPretzel(vec![3, 3, 3])));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn random_knots_always_resolve(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_knot(&mut rng, 12);
            match run_pipeline(&d, true).unwrap() {
                PipelineOutcome::NonHyperbolic(_) => {}
                PipelineOutcome::Reduced(b) => {
                    prop_assert!(b.bounds.all_bounds_hold());
                    prop_assert!(b.record.genus >= 1);
                    let link = b.final_link();
                    let ledger = b.final_ledger();
                    for target in [RoundtripTarget::Alternating, RoundtripTarget::Input] {
                        prop_assert!(verify_roundtrip(&b.record, link, ledger, target).unwrap());
                    }
                }
            }
        }
    }
}
