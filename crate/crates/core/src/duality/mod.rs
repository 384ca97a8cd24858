//! Krein parameters, Q-polynomial structures and the scalars attached to
//! them, computed from an intersection array and its spectrum.

mod classical;
mod krein;
mod params;
mod pascasio;
mod qpoly;
mod recurrence;

pub use classical::{classical_parameters, classical_qpoly, ClassicalParams, ClassicalQPoly};
pub use krein::{krein_parameters, KreinInvariants, KreinTable};
pub(crate) use krein::check_ordering;
pub use params::{aw_parameters, AWParams};
pub use pascasio::{pascasio_check, pascasio_orderings, PascasioResult, PascasioScalars};
pub use qpoly::{
    dual_eigenvalue_sequence, dual_structure, qpoly_orderings_direct, reconstruct_eigenvalue_order,
    satisfies_qpoly_pattern, structure_for_ordering, DualStructure, EigenvalueOrder,
    QPolyStructure,
};
pub use recurrence::{recurrence_classify, td_parameters, RecurrenceClass, TDParams};

use crate::array::{feasibility_report, FeasibilityCheck, FeasibilityReport, IntersectionArray};
use crate::spectral::SpectralData;
use crate::tolerance::Tolerance;

/// The exact feasibility report extended with multiplicity integrality and
/// the Krein condition.
pub fn spectral_feasibility(
    ia: &IntersectionArray,
    sp: &SpectralData,
    tol: &Tolerance,
) -> crate::Result<FeasibilityReport> {
    let mut report = feasibility_report(ia);
    let integral = sp.integral_multiplicities();
    let witness = match integral.iter().position(|ok| !ok) {
        Some(j) => format!("m_{j} = {}", sp.m[j]),
        None => format!(
            "m = ({})",
            sp.m.iter()
                .map(|m| format!("{}", m.round()))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    };
    report.checks.push(FeasibilityCheck::new(
        "multiplicities_integral",
        integral.iter().all(|&b| b),
        witness,
    ));
    let natural: Vec<usize> = (0..=ia.diameter()).collect();
    let krein = krein_parameters(ia, sp, &natural)?;
    let witness = match krein.krein_violation(tol) {
        Some((h, i, j, x)) => format!("q^{h}_{{{i},{j}}} = {x}"),
        None => format!("min q^h_ij = {}", krein.invariants.min_entry),
    };
    report.checks.push(FeasibilityCheck::new(
        "krein_condition",
        krein.krein_condition(tol),
        witness,
    ));
    Ok(report)
}
