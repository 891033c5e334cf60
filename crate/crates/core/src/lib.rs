//! Exact convergence analysis for integer continued fractions written with
//! subtracted partial quotients: `b_0 - 1/(b_1 - 1/(b_2 - ...))`.
//!
//! The pieces fit together like this:
//!
//! - [`CoefficientStream`] holds a coefficient sequence — finite, eventually
//!   periodic, or produced by a generator — and [`neg_from_regular`] /
//!   [`regular_from_neg`] convert to and from ordinary (added-quotient)
//!   continued fractions.
//! - [`MoebiusMap`] and [`convergents`] evaluate prefixes exactly;
//!   [`Enclosure`] brackets the limit of a stream whose coefficients stay
//!   at modulus two or more.
//! - [`PhiState`] and [`phi_trace`] drive the singularization rewrite that
//!   removes coefficients in `{0, 1, -1}`, the engine behind classification.
//! - [`classify`] runs that engine to a verdict: converges (rationally,
//!   irrationally, or to an extended rational) or diverges, with a
//!   replayable [`CycleCertificate`] whenever the verdict is exact.
//! - [`path_from_stream`] and [`render_svg`] trace the convergents across
//!   the Farey graph and draw the walk as hyperbolic geodesics.
//!
//! All arithmetic is exact; nothing here rounds until a caller asks for a
//! decimal rendering.

pub mod classify;
pub mod error;
pub mod farey;
pub mod moebius;
pub mod phi;
pub mod rational;
pub mod stream;

pub use classify::{
    classify, classify_with, detect_certificate, rational_value_from_tail, stalled_front_value,
    tail_tendency, verify_certificate, CertificateKind, ClassificationReport, CycleCertificate,
    LiminfPosition, Mode, ReportedValue, Status, StepBudget, TailTendency, TraceEnd, TraceSummary,
    DEFAULT_MAX_STEPS, DEFAULT_STATE_HISTORY_CAP, DEFAULT_VALUE_DIGITS,
};
pub use error::{Error, Result};
pub use farey::{
    geodesic, is_adjacent, path_from_stream, path_to_json, render_svg, revisit_histogram,
    FareyPath, GeodesicArc, RevisitHistogram, Viewport,
};
pub use moebius::{
    convergents, convergents_of, enclose_to_width, enclose_value, enclose_value_sequence,
    evaluate_finite, evaluate_slice, ConvergentSeq, Enclosure, MoebiusMap,
};
pub use phi::{
    index_map_step, phi_step, phi_trace, PhiRule, PhiState, PhiTrace, StepInfo, StepRecord,
    TraceStop, DEFAULT_ACCESS_BUDGET, DEFAULT_SCAN_HORIZON,
};
pub use rational::ExtendedRational;
pub use stream::{neg_from_regular, regular_from_neg, CoefficientStream, GeneratorStream};
