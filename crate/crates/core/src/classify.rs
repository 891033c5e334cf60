//! Convergence classification driven by the singularization dynamics.
//!
//! The verdict hangs on two quantities along the rewrite orbit: the first bad
//! position `p⁽ⁿ⁾` of the n-th image and the coefficient modulus `q⁽ⁿ⁾` just
//! below it. When `p⁽ⁿ⁾` escapes to infinity the fraction converges — to a
//! rational exactly when the limiting coefficients end in an all-2 or
//! all-(−2) tail. When `p⁽ⁿ⁾` keeps returning to some finite floor, the
//! fraction converges to an extended rational (the convergent just below the
//! floor) if `q⁽ⁿ⁾` blows up, and diverges by oscillation if `q⁽ⁿ⁾` stays
//! bounded.
//!
//! Eventually periodic input is decided *exactly*: the orbit is searched for
//! one of four certificate shapes — a fixed point, an exact state cycle, a
//! window cycle that shifts the bad front outward each round, or a cycle
//! that repeats except for one steadily drifting coefficient — and every
//! certificate is re-verified by an independent replay
//! ([`verify_certificate`]) before it is reported. Generator input gets the
//! same dynamics run under an access budget, with the verdict read off
//! windowed evidence and labelled [`Mode::Empirical`]; finite input is
//! evaluated outright.

use std::collections::HashMap;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::moebius::{enclose_to_width, enclose_value, evaluate_finite, evaluate_slice, Enclosure, MoebiusMap};
use crate::phi::{PhiRule, PhiState, PhiTrace, StepRecord, TraceStop, DEFAULT_SCAN_HORIZON, TRACE_ROW_CAP};
use crate::rational::ExtendedRational;
use crate::stream::{canonical_parts, CoefficientStream};

/// Rewrite steps allowed per classification.
pub const DEFAULT_MAX_STEPS: usize = 10_000;

/// States remembered for cycle detection before the maps stop growing.
pub const DEFAULT_STATE_HISTORY_CAP: usize = 50_000;

/// Enclosure precision (decimal digits) for irrational verdicts.
pub const DEFAULT_VALUE_DIGITS: u32 = 12;

// Evidence thresholds for generator streams. The window is the number of
// recent steps a trend must persist for; the floor is how far out the bad
// front must sit before "escaping" is believed.
const EVIDENCE_WINDOW: usize = 100;
const EVIDENCE_P_FLOOR: usize = 50;
const TAIL_RUN_MIN: usize = 5;
const RECURRENCE_MIN: usize = 5;

// Exact-driver guards: states whose canonical description outgrows this are
// abandoned as Unknown (no certificate anchors at that size anyway), and
// longer keys are not remembered for cycle detection.
const STATE_SIZE_STOP: usize = 1024;
const KEY_INSERT_CAP: usize = 256;

// Depth guards for enclosure refinement and empirical brackets.
const ENCLOSURE_DEPTH_CAP: usize = 65_536;
const EMPIRICAL_ENCLOSURE_DEPTH: usize = 50;

/// The five possible verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    ConvergesRational,
    ConvergesIrrational,
    ConvergesExtendedRational,
    Diverges,
    Unknown,
}

/// How the verdict was reached: exact certificates, windowed evidence on a
/// budgeted run, or direct evaluation of a finite fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Empirical,
    FiniteInput,
}

/// Limit inferior of the first-bad-position sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiminfPosition {
    Finite(usize),
    Infinite,
}

/// A limit reported either exactly or as a guaranteed bracket.
#[derive(Clone, Debug, PartialEq)]
pub enum ReportedValue {
    Exact(ExtendedRational),
    Enclosure(Enclosure),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    /// The state at step `n1 = n2` has no bad coefficient at all.
    FixedPoint,
    /// The states at `n1` and `n2` are identical, so the orbit cycles and
    /// both p and q stay bounded: divergence.
    ExactCycle,
    /// The states at `n1` and `n2` agree from their bad fronts onward while
    /// the front moved outward, so the front escapes and the coefficients
    /// behind it repeat the emitted block forever. A window anchored at
    /// front 1 additionally needs every lead coefficient across it to keep
    /// `|b| >= 2`: the block then embeds those leads at positions where
    /// badness counts, and a bad one would break the self-similarity.
    ShiftCycle,
    /// The states at `n1` and `n2` agree except for one coefficient just
    /// below the stalled front, which moved by a fixed drift; the drift
    /// repeats, q blows up, and the limit is the convergent below the front.
    DriftCycle,
}

/// A machine-checkable description of recurring orbit structure;
/// [`verify_certificate`] replays it from scratch.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleCertificate {
    pub kind: CertificateKind,
    pub n1: usize,
    pub n2: usize,
    /// Position of the drifting coefficient (`DriftCycle` only).
    pub drift_position: Option<usize>,
    /// Per-cycle movement of that coefficient (`DriftCycle` only).
    pub drift_delta: Option<BigInt>,
    /// Coefficient block inserted per cycle (`ShiftCycle` only).
    pub emitted_period: Option<Vec<BigInt>>,
}

/// Why the classification run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceEnd {
    /// A state with no bad coefficient was reached.
    Fixed,
    /// A verified certificate settled the verdict.
    Certificate,
    /// Windowed evidence settled an empirical verdict.
    Evidence,
    /// The step allowance ran out.
    StepLimit,
    /// The generator-access budget ran out.
    AccessBudget,
    /// The canonical state description outgrew the tractable size.
    StateGrowth,
}

/// Condensed view of the run for reports (and the only supporting data an
/// Unknown verdict carries).
#[derive(Clone, Debug)]
pub struct TraceSummary {
    pub steps: usize,
    pub end: TraceEnd,
    /// First bad positions of the most recent steps (`None` marks ∞).
    pub p_tail: Vec<Option<usize>>,
    /// Coefficient moduli at the running-minimum front over the same steps.
    pub q_tail: Vec<Option<BigInt>>,
    /// Leading coefficients that no recent rewrite reached (capped).
    pub stable_prefix: Vec<BigInt>,
}

/// Work limits for a classification run.
#[derive(Clone, Debug)]
pub struct StepBudget {
    pub max_steps: usize,
    pub access_budget: u64,
    pub state_history_cap: usize,
}

impl Default for StepBudget {
    fn default() -> Self {
        StepBudget {
            max_steps: DEFAULT_MAX_STEPS,
            access_budget: crate::phi::DEFAULT_ACCESS_BUDGET,
            state_history_cap: DEFAULT_STATE_HISTORY_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub status: Status,
    pub mode: Mode,
    /// `None` when the run ended Unknown.
    pub p_liminf: Option<LiminfPosition>,
    /// Exact limit, or a guaranteed bracket for irrational limits; absent
    /// for divergence and Unknown.
    pub value: Option<ReportedValue>,
    /// Present exactly for certificate-backed (exact or finite) verdicts.
    pub certificate: Option<CycleCertificate>,
    pub steps_used: usize,
    pub trace: TraceSummary,
}

/// Classifies with default budgets.
pub fn classify(stream: &CoefficientStream) -> ClassificationReport {
    classify_with(stream, &StepBudget::default())
}

/// Classifies under explicit budgets. Never fails: exhausted budgets produce
/// a [`Status::Unknown`] report carrying the partial trace.
pub fn classify_with(stream: &CoefficientStream, budget: &StepBudget) -> ClassificationReport {
    let canonical = stream.clone().canonicalize();
    match &canonical {
        CoefficientStream::Finite(_) => classify_finite(&canonical),
        CoefficientStream::EventuallyPeriodic { .. } => classify_periodic(&canonical, budget),
        CoefficientStream::Generator(_) => classify_generator(&canonical, budget),
    }
}

// ---------------------------------------------------------------------------
// Finite input: evaluate outright, run the (short) chain for the record.

fn classify_finite(stream: &CoefficientStream) -> ClassificationReport {
    let len = stream.len().expect("finite stream has a length");
    let trace = PhiTrace::run(PhiState::new(stream.clone()), len.max(1), false);
    debug_assert_eq!(trace.stop(), TraceStop::Fixed);
    let fixed_at = trace.fixed_at().unwrap_or(0);
    let value = evaluate_finite(stream).expect("input is finite");
    let status = if value.is_infinite() {
        Status::ConvergesExtendedRational
    } else {
        Status::ConvergesRational
    };
    let summary = summarize(trace.records(), trace.final_state(), TraceEnd::Fixed);
    ClassificationReport {
        status,
        mode: Mode::FiniteInput,
        p_liminf: Some(LiminfPosition::Infinite),
        value: Some(ReportedValue::Exact(value)),
        certificate: Some(fixed_certificate(fixed_at)),
        steps_used: summary.steps,
        trace: summary,
    }
}

// ---------------------------------------------------------------------------
// Eventually periodic input: exact certificates.

type Parts = (Vec<BigInt>, Vec<BigInt>);

fn parts_len(parts: &Parts) -> usize {
    parts.0.len() + parts.1.len()
}

/// Canonical description of the sequence with its first `k` coefficients
/// dropped.
fn shift_parts(parts: &Parts, k: usize) -> Parts {
    let (prefix, period) = parts;
    if k <= prefix.len() {
        canonical_parts(prefix[k..].to_vec(), period.clone())
    } else {
        let r = (k - prefix.len()) % period.len();
        let mut rotated = period[r..].to_vec();
        rotated.extend_from_slice(&period[..r]);
        canonical_parts(Vec::new(), rotated)
    }
}

fn fixed_certificate(n: usize) -> CycleCertificate {
    CycleCertificate {
        kind: CertificateKind::FixedPoint,
        n1: n,
        n2: n,
        drift_position: None,
        drift_delta: None,
        emitted_period: None,
    }
}

/// Incremental certificate search over an orbit of periodic states. Each
/// state is keyed three ways -- whole description, description from the bad
/// front onward, and description with the coefficient under the front
/// blanked out -- and a hit against an earlier state proposes an ExactCycle,
/// ShiftCycle, or DriftCycle respectively. Every proposal is replayed
/// against the original stream before being returned; anchors move forward
/// when the front dips below them, when a bad lead poisons a front-1
/// window, or when a replay fails.
struct CycleDetector {
    original: CoefficientStream,
    p_hist: Vec<Option<usize>>,
    lead_good: Vec<bool>,
    full_map: HashMap<Parts, usize>,
    window_map: HashMap<Parts, (usize, usize)>,
    blank_map: HashMap<(usize, Vec<BigInt>, Parts), (usize, BigInt)>,
    states_recorded: usize,
    cap: usize,
}

impl CycleDetector {
    fn new(original: CoefficientStream, cap: usize) -> Self {
        CycleDetector {
            original,
            p_hist: Vec::new(),
            lead_good: Vec::new(),
            full_map: HashMap::new(),
            window_map: HashMap::new(),
            blank_map: HashMap::new(),
            states_recorded: 0,
            cap,
        }
    }

    fn p_at(&self, n: usize) -> usize {
        self.p_hist[n].expect("cycling states keep a bad position")
    }

    fn p_min_over(&self, n1: usize, n2: usize) -> usize {
        self.p_hist[n1..n2]
            .iter()
            .map(|p| p.expect("cycling states keep a bad position"))
            .min()
            .expect("cycle is nonempty")
    }

    /// Feeds the state at step `n` (with `p` its first bad position) and
    /// returns a replay-verified certificate as soon as one matches.
    fn observe(
        &mut self,
        n: usize,
        state: &PhiState,
        p: Option<usize>,
    ) -> Option<CycleCertificate> {
        debug_assert_eq!(n, self.p_hist.len());
        self.p_hist.push(p);
        self.lead_good
            .push(state.peek(0).is_some_and(|b| !b.is_zero() && !b.abs().is_one()));
        let Some(p) = p else {
            let cert = fixed_certificate(n);
            debug_assert!(verify_certificate(&self.original, &cert));
            return Some(cert);
        };
        let Some((prefix, period)) = state.periodic_parts() else {
            // Finite states shrink strictly and can never cycle.
            return None;
        };
        let parts: Parts = (prefix.to_vec(), period.to_vec());

        if let Some(&n1) = self.full_map.get(&parts) {
            let cert = CycleCertificate {
                kind: CertificateKind::ExactCycle,
                n1,
                n2: n,
                drift_position: None,
                drift_delta: None,
                emitted_period: None,
            };
            if verify_certificate(&self.original, &cert) {
                return Some(cert);
            }
        }

        let wkey = shift_parts(&parts, p - 1);
        let mut reanchor_window = false;
        if let Some(&(n1, p1)) = self.window_map.get(&wkey) {
            let dipped = self.p_hist[n1..=n]
                .iter()
                .any(|pk| pk.expect("no fixed state inside the run") < p1);
            if dipped || (p1 == 1 && !self.lead_good[n1..=n].iter().all(|&g| g)) {
                reanchor_window = true;
            } else if p > p1 {
                let block: Vec<BigInt> = (p1 - 1..p - 1).map(|i| peek(state, i)).collect();
                let cert = CycleCertificate {
                    kind: CertificateKind::ShiftCycle,
                    n1,
                    n2: n,
                    drift_position: None,
                    drift_delta: None,
                    emitted_period: Some(block),
                };
                if verify_certificate(&self.original, &cert) {
                    return Some(cert);
                }
                reanchor_window = true;
            }
        }

        let below: Vec<BigInt> = (0..p - 1).map(|i| peek(state, i)).collect();
        let bkey = (p, below, shift_parts(&parts, p));
        let drifter = peek(state, p - 1);
        let mut reanchor_blank = false;
        if let Some(&(n1, ref w1)) = self.blank_map.get(&bkey) {
            let delta = &drifter - w1;
            let dipped = self.p_hist[n1..=n]
                .iter()
                .any(|pk| pk.expect("no fixed state inside the run") < p);
            if dipped {
                reanchor_blank = true;
            } else if !delta.is_zero() {
                let cert = CycleCertificate {
                    kind: CertificateKind::DriftCycle,
                    n1,
                    n2: n,
                    drift_position: Some(p - 1),
                    drift_delta: Some(delta),
                    emitted_period: None,
                };
                if verify_certificate(&self.original, &cert) {
                    return Some(cert);
                }
                reanchor_blank = true;
            }
        }

        if self.states_recorded < self.cap && parts_len(&parts) <= KEY_INSERT_CAP {
            self.states_recorded += 1;
            self.full_map.entry(parts).or_insert(n);
            if reanchor_window {
                self.window_map.insert(wkey, (n, p));
            } else {
                self.window_map.entry(wkey).or_insert((n, p));
            }
            if reanchor_blank {
                self.blank_map.insert(bkey, (n, drifter));
            } else {
                self.blank_map.entry(bkey).or_insert((n, drifter));
            }
        }
        None
    }
}

fn classify_periodic(stream: &CoefficientStream, budget: &StepBudget) -> ClassificationReport {
    let mut state = PhiState::new(stream.clone());
    let mut records: Vec<StepRecord> = Vec::new();
    let mut detector = CycleDetector::new(stream.clone(), budget.state_history_cap);
    let mut end = TraceEnd::StepLimit;

    let p0 = scan(&mut state);
    if let Some(cert) = detector.observe(0, &state, p0) {
        return certificate_report(cert, &detector, &records, &state);
    }
    for _ in 0..budget.max_steps {
        let info = state.advance().expect("periodic steps are budget-free");
        debug_assert_ne!(info.rule, PhiRule::Fixed);
        let p_new = scan(&mut state);
        push_record(&mut records, &state, &info, p_new);
        let n = state.step();
        if p_new.is_some() {
            let (prefix, period) = state.periodic_parts().expect("state is periodic");
            if prefix.len() + period.len() > STATE_SIZE_STOP {
                end = TraceEnd::StateGrowth;
                break;
            }
        }
        if let Some(cert) = detector.observe(n, &state, p_new) {
            return certificate_report(cert, &detector, &records, &state);
        }
    }

    let summary = summarize(&records, &state, end);
    ClassificationReport {
        status: Status::Unknown,
        mode: Mode::Exact,
        p_liminf: None,
        value: None,
        certificate: None,
        steps_used: summary.steps,
        trace: summary,
    }
}

/// Turns a verified certificate into its report: fixed points and shift
/// cycles converge (split by the limit's tail), exact cycles diverge, and
/// drift cycles converge to the convergent below the stalled front.
fn certificate_report(
    cert: CycleCertificate,
    detector: &CycleDetector,
    records: &[StepRecord],
    state: &PhiState,
) -> ClassificationReport {
    match cert.kind {
        CertificateKind::FixedPoint => {
            let summary = summarize(records, state, TraceEnd::Fixed);
            report_converging_limit(&state.stream(), Mode::Exact, cert, summary)
        }
        CertificateKind::ExactCycle => {
            let p_min = detector.p_min_over(cert.n1, cert.n2);
            let summary = summarize(records, state, TraceEnd::Certificate);
            ClassificationReport {
                status: Status::Diverges,
                mode: Mode::Exact,
                p_liminf: Some(LiminfPosition::Finite(p_min)),
                value: None,
                certificate: Some(cert),
                steps_used: summary.steps,
                trace: summary,
            }
        }
        CertificateKind::ShiftCycle => {
            let p1 = detector.p_at(cert.n1);
            let head: Vec<BigInt> = (0..p1 - 1).map(|i| peek(state, i)).collect();
            let block = cert
                .emitted_period
                .clone()
                .expect("shift cycles carry a block");
            let limit = CoefficientStream::eventually_periodic(head, block)
                .expect("shift blocks are nonempty");
            let summary = summarize(records, state, TraceEnd::Certificate);
            report_converging_limit(&limit, Mode::Exact, cert, summary)
        }
        CertificateKind::DriftCycle => {
            let j = cert.drift_position.expect("drift cycles carry a position");
            let head: Vec<BigInt> = (0..j).map(|i| peek(state, i)).collect();
            let summary = summarize(records, state, TraceEnd::Certificate);
            ClassificationReport {
                status: Status::ConvergesExtendedRational,
                mode: Mode::Exact,
                p_liminf: Some(LiminfPosition::Finite(j + 1)),
                value: Some(ReportedValue::Exact(evaluate_slice(&head))),
                certificate: Some(cert),
                steps_used: summary.steps,
                trace: summary,
            }
        }
    }
}

/// Shared by fixed points and shift cycles: the limiting coefficient stream
/// has no bad positions, so it converges; all-2 or all-(−2) tails make the
/// limit rational and anything else irrational (bracketed exactly).
fn report_converging_limit(
    limit: &CoefficientStream,
    mode: Mode,
    certificate: CycleCertificate,
    summary: TraceSummary,
) -> ClassificationReport {
    let (status, value) = match tail_tendency(limit) {
        TailTendency::Plus2 | TailTendency::Minus2 => {
            let tail_start = match limit {
                CoefficientStream::EventuallyPeriodic { prefix, .. } => prefix.len(),
                _ => unreachable!("limits of periodic runs stay periodic"),
            };
            let value = rational_value_from_tail(limit, tail_start)
                .expect("the tendency already proved the tail");
            (Status::ConvergesRational, ReportedValue::Exact(value))
        }
        TailTendency::Neither => {
            let target =
                BigRational::new(BigInt::one(), BigInt::from(10).pow(DEFAULT_VALUE_DIGITS));
            let bracket = enclose_to_width(limit, &target, ENCLOSURE_DEPTH_CAP)
                .expect("fixed limits keep |b| >= 2 past the lead");
            (Status::ConvergesIrrational, ReportedValue::Enclosure(bracket))
        }
    };
    ClassificationReport {
        status,
        mode,
        p_liminf: Some(LiminfPosition::Infinite),
        value: Some(value),
        certificate: Some(certificate),
        steps_used: summary.steps,
        trace: summary,
    }
}

/// Value of `[head..., t, t, t, ...]` where the tail is all 2s (`plus`) or
/// all −2s: those tails evaluate to +1 and −1 respectively, and the head's
/// composite map carries that point to the limit.
fn tail_anchored_value(head: &[BigInt], plus: bool) -> ExtendedRational {
    let mut m = MoebiusMap::identity();
    for b in head {
        m = m.compose(&MoebiusMap::s_map(b));
    }
    m.apply(&ExtendedRational::from_integer(if plus { 1 } else { -1 }))
}

/// Whether the coefficients settle into an all-2 tail, an all-(-2) tail, or
/// neither -- the split between rational and irrational limits for streams
/// that keep |b| >= 2 past the lead. Exact for finite input (which has no
/// infinite tail: always `Neither`) and for eventually periodic input
/// (canonical period [2] or [-2]); generator input is scanned to its
/// horizon hint and the answer reflects only the observed trailing run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailTendency {
    Plus2,
    Minus2,
    Neither,
}

pub fn tail_tendency(stream: &CoefficientStream) -> TailTendency {
    match &stream.clone().canonicalize() {
        CoefficientStream::Finite(_) => TailTendency::Neither,
        CoefficientStream::EventuallyPeriodic { period, .. } => {
            if period[..] == [BigInt::from(2)] {
                TailTendency::Plus2
            } else if period[..] == [BigInt::from(-2)] {
                TailTendency::Minus2
            } else {
                TailTendency::Neither
            }
        }
        CoefficientStream::Generator(g) => {
            let horizon = g.horizon_hint().unwrap_or(DEFAULT_SCAN_HORIZON);
            if horizon == 0 {
                return TailTendency::Neither;
            }
            let last = g.coefficient(horizon - 1);
            let plus = if last == BigInt::from(2) {
                true
            } else if last == BigInt::from(-2) {
                false
            } else {
                return TailTendency::Neither;
            };
            let mut run = 1usize;
            while run < horizon && g.coefficient(horizon - 1 - run) == last {
                run += 1;
            }
            if run >= TAIL_RUN_MIN {
                if plus {
                    TailTendency::Plus2
                } else {
                    TailTendency::Minus2
                }
            } else {
                TailTendency::Neither
            }
        }
    }
}

/// Exact value of a stream whose coefficients from `tail_start` onward are
/// all 2 (tail value +1) or all -2 (tail value -1): the head's composite
/// map applied to the tail value. The tail is checked -- exactly for finite
/// and eventually periodic streams, to the horizon hint for generators --
/// and a violation is an error.
pub fn rational_value_from_tail(
    stream: &CoefficientStream,
    tail_start: usize,
) -> Result<ExtendedRational> {
    let s = stream.clone().canonicalize();
    let two = BigInt::from(2);
    let mismatch = |expected: BigInt| Error::TailMismatch {
        tail_start,
        expected,
    };
    let constant = match s.coefficient_at(tail_start) {
        Ok(c) if c == two || c == -&two => c,
        _ => return Err(mismatch(two)),
    };
    let tail_holds = match &s {
        CoefficientStream::Finite(coeffs) => coeffs[tail_start..].iter().all(|b| *b == constant),
        CoefficientStream::EventuallyPeriodic { prefix, period } => {
            prefix[tail_start.min(prefix.len())..]
                .iter()
                .chain(period.iter())
                .all(|b| *b == constant)
        }
        CoefficientStream::Generator(g) => {
            let horizon = g.horizon_hint().unwrap_or(DEFAULT_SCAN_HORIZON);
            tail_start < horizon
                && (tail_start..horizon).all(|i| g.coefficient(i) == constant)
        }
    };
    if !tail_holds {
        return Err(mismatch(constant));
    }
    let head: Vec<BigInt> = (0..tail_start)
        .map(|i| s.coefficient_at(i))
        .collect::<Result<_>>()?;
    Ok(tail_anchored_value(&head, constant == two))
}

/// The limit when the bad front stalls at position `p` while the
/// coefficient under it grows without bound: the convergent of the stable
/// coefficients just below the front. Needs `p - 1` stable coefficients;
/// for `p = 1` there are none and the value is the path's starting vertex,
/// infinity.
pub fn stalled_front_value(trace: &PhiTrace, p: usize) -> Result<ExtendedRational> {
    let stable = trace.stable_prefix();
    let needed = match p.checked_sub(1) {
        Some(n) => n,
        None => {
            return Err(Error::IndexOutOfRange {
                index: 0,
                len: stable.len(),
            })
        }
    };
    if stable.len() < needed {
        return Err(Error::IndexOutOfRange {
            index: needed,
            len: stable.len(),
        });
    }
    Ok(evaluate_slice(&stable[..needed]))
}

/// Scans states from consecutive rewrite steps -- `states[0]` must be the
/// unstepped original, as retained by [`PhiTrace::run`] -- and returns the
/// first certificate that a fresh replay confirms. Generator-backed states
/// are never certified; finite states can only reach `FixedPoint`.
pub fn detect_certificate(states: &[PhiState]) -> Option<CycleCertificate> {
    let first = states.first()?;
    if first.is_generator_backed() {
        return None;
    }
    let mut detector = CycleDetector::new(first.stream(), DEFAULT_STATE_HISTORY_CAP);
    for (n, state) in states.iter().enumerate() {
        let mut state = state.clone();
        let p = scan(&mut state);
        if let Some(cert) = detector.observe(n, &state, p) {
            return Some(cert);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Generator input: budgeted run, windowed evidence, empirical verdicts.

enum EmpiricalVerdict {
    Escape,
    StalledGrowingQ { p: usize },
    Recurrence { p: usize },
}

fn classify_generator(stream: &CoefficientStream, budget: &StepBudget) -> ClassificationReport {
    let mut state = PhiState::new(stream.clone()).with_access_budget(budget.access_budget);
    let mut records: Vec<StepRecord> = Vec::new();
    let mut end = TraceEnd::StepLimit;
    let mut fixed = false;
    let mut verdict: Option<EmpiricalVerdict> = None;

    loop {
        let remaining = budget.max_steps.saturating_sub(state.step());
        if remaining == 0 {
            break;
        }
        let trace = PhiTrace::run(state, remaining.min(EVIDENCE_WINDOW), false);
        let (mut chunk, next, _, stop) = trace.into_parts();
        records.append(&mut chunk);
        state = next;
        match stop {
            TraceStop::Fixed => {
                fixed = true;
                end = TraceEnd::Fixed;
                break;
            }
            TraceStop::BudgetExhausted => {
                end = TraceEnd::AccessBudget;
                break;
            }
            TraceStop::MaxSteps => {}
        }
        verdict = empirical_verdict(&records);
        if verdict.is_some() {
            end = TraceEnd::Evidence;
            break;
        }
    }

    if fixed {
        let head = state.head_snapshot(usize::MAX);
        let summary = summarize(&records, &state, end);
        return report_observed_limit(&head, summary);
    }
    if verdict.is_none() {
        verdict = empirical_verdict(&records);
        if verdict.is_some() {
            end = TraceEnd::Evidence;
        }
    }

    let summary = summarize(&records, &state, end);
    match verdict {
        Some(EmpiricalVerdict::Escape) => {
            let window = &records[records.len() - EVIDENCE_WINDOW..];
            let basis = window
                .iter()
                .map(|r| r.p.expect("escape windows contain no fixed state"))
                .min()
                .expect("window is nonempty");
            let stable = state.head_snapshot(basis - 1);
            report_observed_limit(&stable, summary)
        }
        Some(EmpiricalVerdict::StalledGrowingQ { p }) => {
            let head: Vec<BigInt> = (0..p - 1).map(|i| peek(&state, i)).collect();
            ClassificationReport {
                status: Status::ConvergesExtendedRational,
                mode: Mode::Empirical,
                p_liminf: Some(LiminfPosition::Finite(p)),
                value: Some(ReportedValue::Exact(evaluate_slice(&head))),
                certificate: None,
                steps_used: summary.steps,
                trace: summary,
            }
        }
        Some(EmpiricalVerdict::Recurrence { p }) => ClassificationReport {
            status: Status::Diverges,
            mode: Mode::Empirical,
            p_liminf: Some(LiminfPosition::Finite(p)),
            value: None,
            certificate: None,
            steps_used: summary.steps,
            trace: summary,
        },
        None => ClassificationReport {
            status: Status::Unknown,
            mode: Mode::Empirical,
            p_liminf: None,
            value: None,
            certificate: None,
            steps_used: summary.steps,
            trace: summary,
        },
    }
}

/// Empirical counterpart of [`report_converging_limit`]: the observed stable
/// coefficients stand in for the limit. A trailing run of at least
/// [`TAIL_RUN_MIN`] 2s (or −2s) is read as a rational tail; anything else is
/// bracketed to the depth the observation supports.
fn report_observed_limit(stable: &[BigInt], summary: TraceSummary) -> ClassificationReport {
    let (status, value) = match trailing_tail(stable) {
        Some((t, plus)) => (
            Status::ConvergesRational,
            ReportedValue::Exact(tail_anchored_value(&stable[..t], plus)),
        ),
        None => {
            let depth = EMPIRICAL_ENCLOSURE_DEPTH.min(stable.len().saturating_sub(1));
            let head = CoefficientStream::Finite(stable[..=depth].to_vec());
            let bracket = enclose_value(&head, depth)
                .expect("observed stable coefficients keep |b| >= 2 past the lead");
            (Status::ConvergesIrrational, ReportedValue::Enclosure(bracket))
        }
    };
    ClassificationReport {
        status,
        mode: Mode::Empirical,
        p_liminf: Some(LiminfPosition::Infinite),
        value: Some(value),
        certificate: None,
        steps_used: summary.steps,
        trace: summary,
    }
}

/// Start index and sign of a trailing all-2 / all-(−2) run of length at
/// least [`TAIL_RUN_MIN`], if the observed coefficients end in one.
fn trailing_tail(coeffs: &[BigInt]) -> Option<(usize, bool)> {
    let last = coeffs.last()?;
    let plus = if *last == BigInt::from(2) {
        true
    } else if *last == BigInt::from(-2) {
        false
    } else {
        return None;
    };
    let mut t = coeffs.len();
    while t > 0 && coeffs[t - 1] == *last {
        t -= 1;
    }
    (coeffs.len() - t >= TAIL_RUN_MIN).then_some((t, plus))
}

fn empirical_verdict(records: &[StepRecord]) -> Option<EmpiricalVerdict> {
    if escape_evidence(records) {
        return Some(EmpiricalVerdict::Escape);
    }
    if let Some(p) = stalled_q_evidence(records) {
        return Some(EmpiricalVerdict::StalledGrowingQ { p });
    }
    recurrence_evidence(records).map(|p| EmpiricalVerdict::Recurrence { p })
}

/// The bad front's recent floor sits past [`EVIDENCE_P_FLOOR`] and has not
/// receded against the window before: read as p → ∞.
fn escape_evidence(records: &[StepRecord]) -> bool {
    let n = records.len();
    if n < 2 * EVIDENCE_WINDOW {
        return false;
    }
    let min_p = |rs: &[StepRecord]| {
        rs.iter()
            .map(|r| r.p.unwrap_or(usize::MAX))
            .min()
            .expect("window is nonempty")
    };
    let last = min_p(&records[n - EVIDENCE_WINDOW..]);
    let prev = min_p(&records[n - 2 * EVIDENCE_WINDOW..n - EVIDENCE_WINDOW]);
    last != usize::MAX && last > EVIDENCE_P_FLOOR && last >= prev
}

/// The front has sat at one position all window while the coefficient below
/// it grew strictly: read as q → ∞ at a stalled p.
fn stalled_q_evidence(records: &[StepRecord]) -> Option<usize> {
    let n = records.len();
    if n < EVIDENCE_WINDOW {
        return None;
    }
    let window = &records[n - EVIDENCE_WINDOW..];
    let p = window[0].p?;
    if p > TRACE_ROW_CAP || !window.iter().all(|r| r.p == Some(p)) {
        return None;
    }
    let mut prev: Option<BigInt> = None;
    for r in window {
        let q = r.row.get(p - 1)?.abs();
        if let Some(prev) = &prev {
            if &q <= prev {
                return None;
            }
        }
        prev = Some(q);
    }
    Some(p)
}

/// Some whole front configuration `(p, coefficients up to p)` recurred at
/// least [`RECURRENCE_MIN`] times and is still recurring in the final
/// quarter of the run: read as a bounded oscillation, i.e. divergence.
fn recurrence_evidence(records: &[StepRecord]) -> Option<usize> {
    let n = records.len();
    if n < EVIDENCE_WINDOW {
        return None;
    }
    let mut seen: HashMap<(usize, &[BigInt]), (usize, usize)> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        if let Some(p) = r.p {
            if p <= TRACE_ROW_CAP {
                let entry = seen.entry((p, r.row.as_slice())).or_insert((0, 0));
                entry.0 += 1;
                entry.1 = i;
            }
        }
    }
    seen.iter()
        .filter(|(_, &(count, last))| count >= RECURRENCE_MIN && last * 4 >= n * 3)
        .map(|(&(p, _), _)| p)
        .min()
}

// ---------------------------------------------------------------------------
// Shared plumbing.

fn scan(state: &mut PhiState) -> Option<usize> {
    state
        .first_bad_position(DEFAULT_SCAN_HORIZON)
        .expect("finite and periodic scans are budget-free")
}

fn peek(state: &PhiState, i: usize) -> BigInt {
    state.peek(i).expect("coefficient is available")
}

fn push_record(
    records: &mut Vec<StepRecord>,
    state: &PhiState,
    info: &crate::phi::StepInfo,
    p: Option<usize>,
) {
    let q = p.map(|p| peek(state, p - 1).abs());
    let row = match p {
        Some(p) => state.head_snapshot(p.min(TRACE_ROW_CAP) + 1),
        None => state.head_snapshot(TRACE_ROW_CAP),
    };
    records.push(StepRecord {
        step: state.step(),
        rule: info.rule,
        m: info.m.expect("recorded steps rewrote a position"),
        deleted_convergent_positions: info.deleted_convergent_positions.clone(),
        p,
        q,
        row,
    });
}

fn summarize(records: &[StepRecord], final_state: &PhiState, end: TraceEnd) -> TraceSummary {
    const TAIL: usize = 16;
    const STABLE_CAP: usize = 32;
    let tail_start = records.len().saturating_sub(TAIL);
    let p_tail: Vec<Option<usize>> = records[tail_start..].iter().map(|r| r.p).collect();
    let basis = records.iter().filter_map(|r| r.p).min();
    let q_tail = match basis {
        Some(b) => records[tail_start..]
            .iter()
            .map(|r| r.row.get(b - 1).map(|x| x.abs()))
            .collect(),
        None => Vec::new(),
    };
    let window = &records[records.len().saturating_sub(EVIDENCE_WINDOW)..];
    let min_p = window.iter().map(|r| r.p.unwrap_or(usize::MAX)).min();
    let stable_prefix = match min_p {
        None | Some(usize::MAX) => final_state.head_snapshot(STABLE_CAP),
        Some(mp) => final_state.head_snapshot(mp.saturating_sub(1).min(STABLE_CAP)),
    };
    TraceSummary {
        steps: final_state.step(),
        end,
        p_tail,
        q_tail,
        stable_prefix,
    }
}

// ---------------------------------------------------------------------------
// Certificate verification: independent replay from the input stream.

/// Replays `cert` against `stream` from scratch and checks every condition
/// the certificate's verdict rests on. Only finite and eventually periodic
/// streams can be verified (generator runs never earn certificates).
pub fn verify_certificate(stream: &CoefficientStream, cert: &CycleCertificate) -> bool {
    let mut state = PhiState::new(stream.clone());
    if state.is_generator_backed() || cert.n1 > cert.n2 {
        return false;
    }
    let n1 = cert.n1;
    let n2 = cert.n2;
    let mut p_hist: Vec<Option<usize>> = Vec::with_capacity(n2 + 1);
    let mut lead_good: Vec<bool> = Vec::with_capacity(n2 + 1);
    let mut anchor: Option<PhiState> = None;
    let mut drift_values: Vec<BigInt> = Vec::new();
    for k in 0..=n2 {
        if k > 0 {
            match state.advance() {
                Ok(info) if info.rule != PhiRule::Fixed => {}
                _ => return false,
            }
        }
        match state.first_bad_position(DEFAULT_SCAN_HORIZON) {
            Ok(p) => p_hist.push(p),
            Err(_) => return false,
        }
        lead_good.push(state.peek(0).is_some_and(|b| !b.is_zero() && !b.abs().is_one()));
        if k == n1 {
            anchor = Some(state.clone());
        }
        if let (Some(j), true) = (cert.drift_position, k >= n1) {
            match state.peek(j) {
                Some(w) => drift_values.push(w),
                None => return false,
            }
        }
    }
    let anchor = anchor.expect("n1 <= n2 was visited");

    match cert.kind {
        CertificateKind::FixedPoint => n1 == n2 && p_hist[n2].is_none(),
        CertificateKind::ExactCycle => {
            n1 < n2
                && match (anchor.periodic_parts(), state.periodic_parts()) {
                    (Some(a), Some(b)) => a == b,
                    _ => false,
                }
        }
        CertificateKind::ShiftCycle => {
            let (Some(Some(p1)), Some(Some(p2))) =
                (p_hist.get(n1).copied(), p_hist.get(n2).copied())
            else {
                return false;
            };
            let Some(expected_block) = &cert.emitted_period else {
                return false;
            };
            let (Some(a), Some(b)) = (anchor.periodic_parts(), state.periodic_parts()) else {
                return false;
            };
            let a = (a.0.to_vec(), a.1.to_vec());
            let b = (b.0.to_vec(), b.1.to_vec());
            let block: Vec<BigInt> = (p1 - 1..p2 - 1).map(|i| peek(&state, i)).collect();
            n1 < n2
                && p2 > p1
                && p_hist[n1..=n2]
                    .iter()
                    .all(|p| p.is_some_and(|v| v >= p1))
                && (p1 > 1 || lead_good[n1..=n2].iter().all(|&g| g))
                && shift_parts(&a, p1 - 1) == shift_parts(&b, p2 - 1)
                && &block == expected_block
        }
        CertificateKind::DriftCycle => {
            let Some(j) = cert.drift_position else {
                return false;
            };
            let Some(delta) = &cert.drift_delta else {
                return false;
            };
            let p = j + 1;
            let (Some(a), Some(b)) = (anchor.periodic_parts(), state.periodic_parts()) else {
                return false;
            };
            let a = (a.0.to_vec(), a.1.to_vec());
            let b = (b.0.to_vec(), b.1.to_vec());
            n1 < n2
                && !delta.is_zero()
                && p_hist[n1] == Some(p)
                && p_hist[n2] == Some(p)
                && p_hist[n1..=n2]
                    .iter()
                    .all(|pk| pk.is_some_and(|v| v >= p))
                && (0..j).all(|i| anchor.peek(i) == state.peek(i))
                && shift_parts(&a, p) == shift_parts(&b, p)
                && &drift_values[n2 - n1] - &drift_values[0] == *delta
                && (j == 0
                    || drift_values.iter().all(|w| w.signum() == delta.signum()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::GeneratorStream;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&n| BigInt::from(n)).collect()
    }

    fn ep(prefix: &[i64], period: &[i64]) -> CoefficientStream {
        CoefficientStream::eventually_periodic(ints(prefix), ints(period)).unwrap()
    }

    fn exact(n: i64, d: i64) -> ReportedValue {
        ReportedValue::Exact(ExtendedRational::new(BigInt::from(n), BigInt::from(d)).unwrap())
    }

    #[test]
    fn finite_fractions_evaluate_directly() {
        let report = classify(&CoefficientStream::finite([3i64, 2]));
        assert_eq!(report.status, Status::ConvergesRational);
        assert_eq!(report.mode, Mode::FiniteInput);
        assert_eq!(report.value, Some(exact(5, 2)));

        let report = classify(&CoefficientStream::finite([1i64, 0]));
        assert_eq!(report.status, Status::ConvergesExtendedRational);
        assert_eq!(
            report.value,
            Some(ReportedValue::Exact(ExtendedRational::infinity()))
        );
    }

    #[test]
    fn zero_period_cycles_exactly_and_diverges() {
        let report = classify(&ep(&[5], &[0]));
        assert_eq!(report.status, Status::Diverges);
        assert_eq!(report.mode, Mode::Exact);
        assert_eq!(report.p_liminf, Some(LiminfPosition::Finite(1)));
        let cert = report.certificate.unwrap();
        assert_eq!(cert.kind, CertificateKind::ExactCycle);
        assert!(verify_certificate(&ep(&[5], &[0]), &cert));
    }

    #[test]
    fn all_ones_diverges_by_exact_cycle() {
        let report = classify(&ep(&[1], &[1]));
        assert_eq!(report.status, Status::Diverges);
        assert_eq!(
            report.certificate.unwrap().kind,
            CertificateKind::ExactCycle
        );
    }

    #[test]
    fn zero_three_period_drifts_to_infinity() {
        let stream = ep(&[1], &[0, 3]);
        let report = classify(&stream);
        assert_eq!(report.status, Status::ConvergesExtendedRational);
        assert_eq!(report.mode, Mode::Exact);
        assert_eq!(report.p_liminf, Some(LiminfPosition::Finite(1)));
        assert_eq!(
            report.value,
            Some(ReportedValue::Exact(ExtendedRational::infinity()))
        );
        let cert = report.certificate.unwrap();
        assert_eq!(cert.kind, CertificateKind::DriftCycle);
        assert_eq!(cert.drift_position, Some(0));
        assert_eq!(cert.drift_delta, Some(BigInt::from(3)));
        assert!(verify_certificate(&stream, &cert));

        // Tampering with the drift breaks verification.
        let mut bad = cert.clone();
        bad.drift_delta = Some(BigInt::from(4));
        assert!(!verify_certificate(&stream, &bad));
    }

    #[test]
    fn shift_cycle_escapes_and_pins_the_limit() {
        let stream = ep(&[1], &[1, 5]);
        let report = classify(&stream);
        assert_eq!(report.status, Status::ConvergesIrrational);
        assert_eq!(report.mode, Mode::Exact);
        assert_eq!(report.p_liminf, Some(LiminfPosition::Infinite));
        let cert = report.certificate.unwrap();
        assert_eq!(cert.kind, CertificateKind::ShiftCycle);
        assert_eq!(cert.emitted_period, Some(ints(&[3])));
        assert!(verify_certificate(&stream, &cert));
        // The limit is [0, 3, 3, 3, ...] ≈ -0.381966.
        let Some(ReportedValue::Enclosure(e)) = report.value else {
            panic!("expected an enclosure");
        };
        assert_eq!(e.decimal(6), "[-0.381967, -0.381966]");
    }

    #[test]
    fn bad_leads_poison_front_one_windows() {
        // One step in, this orbit offers a shifted-window match anchored at
        // front 1 whose block would embed a bad lead (-1) at positions
        // where badness counts; emitting it would claim a bogus limit. The
        // truth is an eight-step exact cycle: the stream diverges.
        let stream = ep(&[], &[-2, -1, -4]);
        let report = classify(&stream);
        assert_eq!(report.status, Status::Diverges);
        assert_eq!(report.mode, Mode::Exact);
        assert_eq!(report.p_liminf, Some(LiminfPosition::Finite(1)));
        let cert = report.certificate.unwrap();
        assert_eq!(cert.kind, CertificateKind::ExactCycle);
        assert_eq!((cert.n1, cert.n2), (0, 8));
        assert!(verify_certificate(&stream, &cert));

        // A hand-built front-1 shift certificate over that poisoned window
        // must fail verification even though the shifted states match.
        let forged = CycleCertificate {
            kind: CertificateKind::ShiftCycle,
            n1: 0,
            n2: 1,
            drift_position: None,
            drift_delta: None,
            emitted_period: Some(ints(&[-1, -3])),
        };
        assert!(!verify_certificate(&stream, &forged));
    }

    #[test]
    fn fixed_periodic_states_split_on_their_tail() {
        let report = classify(&ep(&[0], &[3]));
        assert_eq!(report.status, Status::ConvergesIrrational);
        assert_eq!(
            report.certificate.as_ref().unwrap().kind,
            CertificateKind::FixedPoint
        );
        assert_eq!(report.certificate.unwrap().n1, 0);
        let Some(ReportedValue::Enclosure(e)) = report.value else {
            panic!("expected an enclosure");
        };
        let width = e.width();
        let target = BigRational::new(BigInt::one(), BigInt::from(10).pow(12));
        assert!(width < target);

        let report = classify(&ep(&[9], &[4]));
        assert_eq!(report.status, Status::ConvergesIrrational);

        for (stream, num, den) in [
            (ep(&[0], &[2]), -1, 1),
            (ep(&[2], &[2]), 1, 1),
            (ep(&[5, 3], &[2]), 9, 2),
            (ep(&[7, 3], &[2]), 13, 2),
            (ep(&[0], &[-2]), 1, 1),
        ] {
            let report = classify(&stream);
            assert_eq!(report.status, Status::ConvergesRational, "for {stream:?}");
            assert_eq!(report.value, Some(exact(num, den)), "for {stream:?}");
        }
    }

    // The four generator shapes exercised throughout: growing blocks
    // punctured by ones, ones interleaved with growing terms, naturals
    // interleaved with zeros, and balanced ±3 blocks around zeros.

    fn growing_blocks_with_ones() -> CoefficientStream {
        CoefficientStream::generator(GeneratorStream::new(|i| {
            let mut j = 0usize;
            let mut start = 0usize;
            while start + j + 3 <= i {
                start += j + 3;
                j += 1;
            }
            BigInt::from(match i - start {
                0 => j as i64 + 3,
                1 => 1,
                o if o <= j + 1 => 2,
                _ => 3,
            })
        }))
    }

    fn interleaved_ones() -> CoefficientStream {
        CoefficientStream::generator(GeneratorStream::new(|i| {
            if i % 2 == 0 {
                BigInt::one()
            } else {
                BigInt::from((i as i64 + 3) / 2)
            }
        }))
    }

    fn zeros_between_naturals() -> CoefficientStream {
        CoefficientStream::generator(GeneratorStream::new(|i| {
            if i % 2 == 0 {
                BigInt::from(i as i64 / 2 + 1)
            } else {
                BigInt::zero()
            }
        }))
    }

    fn balanced_three_blocks() -> CoefficientStream {
        CoefficientStream::generator(GeneratorStream::new(|i| {
            let j = (i as f64 + 1.0).sqrt() as usize;
            let j = if (j + 1) * (j + 1) <= i + 1 { j + 1 } else { j };
            let offset = i - (j * j - 1);
            BigInt::from(if offset < j {
                3
            } else if offset == j {
                0
            } else {
                -3
            })
        }))
    }

    #[test]
    fn growing_blocks_converge_to_one_empirically() {
        let report = classify(&growing_blocks_with_ones());
        assert_eq!(report.status, Status::ConvergesRational);
        assert_eq!(report.mode, Mode::Empirical);
        assert_eq!(report.value, Some(exact(1, 1)));
        assert_eq!(report.p_liminf, Some(LiminfPosition::Infinite));
        assert!(report.certificate.is_none());
    }

    #[test]
    fn interleaved_ones_converge_irrationally_empirically() {
        let report = classify(&interleaved_ones());
        assert_eq!(report.status, Status::ConvergesIrrational);
        assert_eq!(report.mode, Mode::Empirical);
        assert!(matches!(report.value, Some(ReportedValue::Enclosure(_))));
    }

    #[test]
    fn zeros_between_naturals_stall_with_growing_q() {
        let report = classify(&zeros_between_naturals());
        assert_eq!(report.status, Status::ConvergesExtendedRational);
        assert_eq!(report.mode, Mode::Empirical);
        assert_eq!(report.p_liminf, Some(LiminfPosition::Finite(1)));
        assert_eq!(
            report.value,
            Some(ReportedValue::Exact(ExtendedRational::infinity()))
        );
    }

    #[test]
    fn balanced_three_blocks_diverge_empirically() {
        let report = classify(&balanced_three_blocks());
        assert_eq!(report.status, Status::Diverges);
        assert_eq!(report.mode, Mode::Empirical);
        assert!(report.value.is_none());
    }

    #[test]
    fn quiet_generator_is_empirically_fixed_and_irrational() {
        let stream = CoefficientStream::generator(
            GeneratorStream::new(|_| BigInt::from(5)).with_horizon_hint(500),
        );
        let report = classify(&stream);
        assert_eq!(report.status, Status::ConvergesIrrational);
        assert_eq!(report.mode, Mode::Empirical);
        assert_eq!(report.trace.end, TraceEnd::Fixed);
        assert!(report.certificate.is_none());
    }

    #[test]
    fn all_twos_generator_is_rational_one() {
        let stream = CoefficientStream::generator(
            GeneratorStream::new(|_| BigInt::from(2)).with_horizon_hint(500),
        );
        let report = classify(&stream);
        assert_eq!(report.status, Status::ConvergesRational);
        assert_eq!(report.value, Some(exact(1, 1)));
    }

    #[test]
    fn tight_budgets_report_unknown_not_errors() {
        let budget = StepBudget {
            max_steps: 10,
            ..StepBudget::default()
        };
        let report = classify_with(&interleaved_ones(), &budget);
        assert_eq!(report.status, Status::Unknown);
        assert_eq!(report.trace.end, TraceEnd::StepLimit);
        assert!(report.certificate.is_none());

        let budget = StepBudget {
            access_budget: 20,
            ..StepBudget::default()
        };
        let report = classify_with(&interleaved_ones(), &budget);
        assert_eq!(report.status, Status::Unknown);
        assert_eq!(report.trace.end, TraceEnd::AccessBudget);
    }

    #[test]
    fn certificates_round_trip_through_verification() {
        for stream in [ep(&[5], &[0]), ep(&[1], &[0, 3]), ep(&[1], &[1, 5]), ep(&[0], &[3])] {
            let report = classify(&stream);
            let cert = report
                .certificate
                .expect("periodic example earns a certificate");
            assert!(verify_certificate(&stream, &cert), "replay failed: {cert:?}");
            let mut tampered = cert.clone();
            match tampered.kind {
                // A fixed point one step later would need a rewrite applied
                // to a state with nothing to rewrite.
                CertificateKind::FixedPoint => {
                    tampered.n1 += 1;
                    tampered.n2 += 1;
                }
                // A cycle needs two distinct steps.
                CertificateKind::ExactCycle => tampered.n2 = tampered.n1,
                // Stretching the cycle breaks the emitted block / drift.
                CertificateKind::ShiftCycle | CertificateKind::DriftCycle => tampered.n2 += 1,
            }
            assert!(
                !verify_certificate(&stream, &tampered),
                "tampered replay should fail: {tampered:?}"
            );
        }
    }

    #[test]
    fn tail_tendencies_split_on_the_canonical_period() {
        assert_eq!(tail_tendency(&ep(&[7, 3], &[2])), TailTendency::Plus2);
        assert_eq!(tail_tendency(&ep(&[0], &[-2])), TailTendency::Minus2);
        assert_eq!(tail_tendency(&ep(&[0], &[3])), TailTendency::Neither);
        assert_eq!(
            tail_tendency(&CoefficientStream::finite([5i64, 2, 2])),
            TailTendency::Neither
        );
        let all_twos = CoefficientStream::generator(
            GeneratorStream::new(|_| BigInt::from(2)).with_horizon_hint(200),
        );
        assert_eq!(tail_tendency(&all_twos), TailTendency::Plus2);
        let all_fives = CoefficientStream::generator(
            GeneratorStream::new(|_| BigInt::from(5)).with_horizon_hint(200),
        );
        assert_eq!(tail_tendency(&all_fives), TailTendency::Neither);
    }

    #[test]
    fn tail_values_come_from_the_anchored_map() {
        for (stream, start, num, den) in [
            (ep(&[0], &[2]), 1, -1, 1),
            (ep(&[2], &[2]), 1, 1, 1),
            (ep(&[5, 3], &[2]), 2, 9, 2),
            (ep(&[0], &[-2]), 1, 1, 1),
        ] {
            let value = rational_value_from_tail(&stream, start).unwrap();
            assert_eq!(ReportedValue::Exact(value), exact(num, den), "for {stream:?}");
        }
        // A finite trailing run works the same way.
        let finite = CoefficientStream::finite([5i64, 2, 2, 2]);
        assert_eq!(
            ReportedValue::Exact(rational_value_from_tail(&finite, 1).unwrap()),
            exact(4, 1)
        );
        assert!(matches!(
            rational_value_from_tail(&ep(&[0], &[3]), 1),
            Err(Error::TailMismatch { .. })
        ));
        assert!(matches!(
            rational_value_from_tail(&CoefficientStream::finite([5i64]), 1),
            Err(Error::TailMismatch { .. })
        ));
    }

    #[test]
    fn stalled_fronts_value_at_the_convergent_below() {
        let trace = crate::phi::phi_trace(&zeros_between_naturals(), 40).unwrap();
        assert_eq!(
            stalled_front_value(&trace, 1).unwrap(),
            ExtendedRational::infinity()
        );
        assert!(stalled_front_value(&trace, 40).is_err());

        // A front stalled at 2 values the lone stable coefficient.
        let trace = crate::phi::phi_trace(&ep(&[4, 5], &[0, 3]), 30).unwrap();
        assert_eq!(
            stalled_front_value(&trace, 2).unwrap(),
            ExtendedRational::from_integer(4)
        );
    }

    #[test]
    fn detection_over_retained_states_matches_classification() {
        for (stream, kind) in [
            (ep(&[9], &[4]), CertificateKind::FixedPoint),
            (ep(&[5], &[0]), CertificateKind::ExactCycle),
            (ep(&[1], &[0, 3]), CertificateKind::DriftCycle),
            (ep(&[1], &[1, 5]), CertificateKind::ShiftCycle),
        ] {
            let trace = PhiTrace::run(PhiState::new(stream.clone()), 10, true);
            let states = trace.states().expect("states were retained");
            let cert = detect_certificate(states).expect("certificate within ten steps");
            assert_eq!(cert.kind, kind, "for {stream:?}");
            assert!(verify_certificate(&stream, &cert));
        }
        let unseen = detect_certificate(&[]);
        assert!(unseen.is_none());
    }

    #[test]
    fn summaries_expose_recent_p_and_q() {
        let report = classify(&zeros_between_naturals());
        assert!(!report.trace.p_tail.is_empty());
        assert!(report.trace.p_tail.iter().all(|p| *p == Some(1)));
        let q = &report.trace.q_tail;
        assert!(q.windows(2).all(|w| w[0] < w[1]), "q tail not rising: {q:?}");
    }
}
