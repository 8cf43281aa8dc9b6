//! Acceptance suite: every advertised guarantee of the library, run at its
//! pinned tolerance, one printed line per criterion.
//!
//! `verify --suite all` in the CLI runs the same checks through the same
//! code path; this target is the in-tree gate.

use std::time::Instant;

use klein_theta::verify::{run_suite, CriterionReport, Suite, VerifyConfig};

/// Criteria that must be present in a full run, in report order.
const REQUIRED: &[&str] = &[
    "theta-census",
    "type-census",
    "arf-census",
    "picard-components",
    "sw-coherence",
    "semicharacter-two-route",
    "cocycle",
    "holonomy",
    "curvature",
    "theta-null-parity",
    "torsor-equivariance",
    "circle-generation",
    "full-suite",
];

#[test]
fn acceptance_suite_passes() {
    let start = Instant::now();
    let reports = run_suite(Suite::All, &VerifyConfig::default());
    let elapsed = start.elapsed().as_secs_f64();

    for report in &reports {
        println!("{report}");
    }
    println!("acceptance: {} checks in {elapsed:.1}s", reports.len());

    for id in REQUIRED {
        let found: Vec<&CriterionReport> = reports.iter().filter(|r| r.id == *id).collect();
        assert_eq!(found.len(), 1, "criterion {id} missing or duplicated");
        assert!(
            found[0].passed,
            "criterion {id} failed: {}",
            found[0].detail
        );
    }
    let failed: Vec<&CriterionReport> = reports.iter().filter(|r| !r.passed).collect();
    assert!(
        failed.is_empty(),
        "failing checks: {:?}",
        failed.iter().map(|r| r.id).collect::<Vec<_>>()
    );
    assert!(
        elapsed <= 300.0,
        "full suite took {elapsed:.1}s, budget is 300s"
    );
}
