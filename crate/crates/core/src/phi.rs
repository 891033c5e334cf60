//! The singularization dynamics: repeatedly rewriting a continued fraction to
//! squeeze out coefficients in `{0, 1, -1}` at positions `>= 1`.
//!
//! One rewrite finds the least position `m >= 1` whose coefficient is bad —
//! equal to 0, 1 or -1; position 0 is exempt — removes it, and adjusts its
//! neighbors:
//!
//! ```text
//! b_m =  0:  [..., b_{m-2}, b_{m-1} + b_{m+1}, b_{m+2}, ...]
//! b_m =  1:  [..., b_{m-2}, b_{m-1} - 1, b_{m+1} - 1, b_{m+2}, ...]
//! b_m = -1:  [..., b_{m-2}, b_{m-1} + 1, b_{m+1} + 1, b_{m+2}, ...]
//! ```
//!
//! For `m = 1` the left neighbor is `b_0` itself. A finite fraction whose bad
//! coefficient sits at the very end has no right neighbor; the value-preserving
//! degenerate forms apply instead (`[..., b_{m-1}, 0]` drops the last two
//! coefficients, `[..., b_{m-1}, ±1]` becomes `[..., b_{m-1} ∓ 1]`).
//!
//! Every rewrite keeps the convergent sequence intact except for the one or
//! two positions reported in [`StepInfo::deleted_convergent_positions`], so
//! convergence and limits survive each step. The classifier reads the verdict
//! off the long-run behavior of the first bad position across repeated steps;
//! this module only performs and records the steps.
//!
//! Eventually periodic states stay eventually periodic (re-canonicalized after
//! every step, so equal sequences compare equal). Generator-backed states
//! materialize coefficients into an explicit head on demand, paying one unit
//! of access budget per generator call; the untouched tail is never evaluated
//! twice.

use std::fmt;
use std::sync::Arc;

use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::stream::{canonical_parts, CoefficientStream, GeneratorStream};

/// How far a single bad-coefficient scan looks past the known-clear region of
/// a generator stream before giving up. Finite and eventually periodic states
/// are scanned exactly and ignore this.
pub const DEFAULT_SCAN_HORIZON: usize = 10_000;

/// Generator accesses allowed per state lineage before scans start failing
/// with [`Error::BudgetExhausted`].
pub const DEFAULT_ACCESS_BUDGET: u64 = 1_000_000;

/// Coefficients retained per recorded trace row.
pub const TRACE_ROW_CAP: usize = 64;

fn is_bad(b: &BigInt) -> bool {
    b.abs() <= BigInt::one()
}

#[derive(Clone, Debug)]
enum Repr {
    Finite(Vec<BigInt>),
    Periodic {
        prefix: Vec<BigInt>,
        period: Vec<BigInt>,
    },
    Buffered {
        head: Vec<BigInt>,
        tail: GeneratorStream,
        tail_offset: usize,
    },
}

/// Which rewrite a step performed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiRule {
    /// `b_m = 0`: neighbors merge into one coefficient.
    Zero,
    /// `b_m = 1`: both neighbors decrease by one.
    PlusOne,
    /// `b_m = -1`: both neighbors increase by one.
    MinusOne,
    /// No bad coefficient found; the state is left untouched.
    Fixed,
}

impl fmt::Display for PhiRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhiRule::Zero => "0",
            PhiRule::PlusOne => "+1",
            PhiRule::MinusOne => "-1",
            PhiRule::Fixed => "fixed",
        })
    }
}

/// What a single step did: the rule, the removed position, and which
/// convergent positions of the pre-step state no longer appear afterwards
/// (`{m-1, m}` for the merge rule, `{m-1}` for the ±1 rules).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepInfo {
    pub rule: PhiRule,
    pub m: Option<usize>,
    pub deleted_convergent_positions: Vec<usize>,
}

impl StepInfo {
    fn fixed() -> Self {
        StepInfo {
            rule: PhiRule::Fixed,
            m: None,
            deleted_convergent_positions: Vec::new(),
        }
    }
}

/// A continued fraction mid-singularization: the current coefficient sequence
/// plus step count, stability watermark, and the access budget that meters
/// generator evaluations.
#[derive(Clone, Debug)]
pub struct PhiState {
    repr: Repr,
    step: usize,
    stable_upto: Option<usize>,
    budget: u64,
    scan_horizon: usize,
    // Scan memo for the current sequence: an exact least bad position once
    // found, else the largest position the sequence is known clear through
    // (`usize::MAX` when provably clear everywhere).
    scan_found: Option<usize>,
    scan_clear_upto: usize,
}

impl PhiState {
    /// Wraps a stream as the step-zero state. Eventually periodic input is
    /// canonicalized. A generator's horizon hint, when present, overrides
    /// [`DEFAULT_SCAN_HORIZON`].
    pub fn new(stream: CoefficientStream) -> Self {
        let mut scan_horizon = DEFAULT_SCAN_HORIZON;
        let repr = match stream.canonicalize() {
            CoefficientStream::Finite(coeffs) => Repr::Finite(coeffs),
            CoefficientStream::EventuallyPeriodic { prefix, period } => {
                assert!(!period.is_empty(), "eventually periodic stream with empty period");
                Repr::Periodic { prefix, period }
            }
            CoefficientStream::Generator(g) => {
                if let Some(hint) = g.horizon_hint() {
                    scan_horizon = hint;
                }
                Repr::Buffered {
                    head: Vec::new(),
                    tail: g,
                    tail_offset: 0,
                }
            }
        };
        PhiState {
            repr,
            step: 0,
            stable_upto: None,
            budget: DEFAULT_ACCESS_BUDGET,
            scan_horizon,
            scan_found: None,
            scan_clear_upto: 0,
        }
    }

    /// Replaces the remaining generator-access budget (`u64::MAX` to
    /// effectively disable metering). Finite and periodic states never
    /// consume budget.
    pub fn with_access_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Replaces the per-scan horizon used by [`PhiState::advance`].
    pub fn with_scan_horizon(mut self, horizon: usize) -> Self {
        self.scan_horizon = horizon;
        self
    }

    /// Number of steps applied to reach this state.
    pub fn step(&self) -> usize {
        self.step
    }

    /// Watermark maintained from every scan that observed a bad position:
    /// rewrites only ever touch positions at or above it, so every position
    /// strictly below still holds its original coefficient (and positions
    /// `>= 1` there all have `|b| >= 2`). `None` until a scan first finds a
    /// bad position.
    pub fn stable_upto(&self) -> Option<usize> {
        self.stable_upto
    }

    pub fn budget_remaining(&self) -> u64 {
        self.budget
    }

    /// The current coefficient sequence as a stream. For generator-backed
    /// states this snapshots the materialized head and shares the tail;
    /// accesses through the returned stream are not metered.
    pub fn stream(&self) -> CoefficientStream {
        match &self.repr {
            Repr::Finite(coeffs) => CoefficientStream::Finite(coeffs.clone()),
            Repr::Periodic { prefix, period } => CoefficientStream::EventuallyPeriodic {
                prefix: prefix.clone(),
                period: period.clone(),
            },
            Repr::Buffered {
                head,
                tail,
                tail_offset,
            } => {
                let head = Arc::new(head.clone());
                let tail = tail.clone();
                let offset = *tail_offset;
                CoefficientStream::generator(GeneratorStream::new(move |i| {
                    if i < head.len() {
                        head[i].clone()
                    } else {
                        tail.coefficient(offset + (i - head.len()))
                    }
                }))
            }
        }
    }

    /// Canonical `(prefix, period)` view of an eventually periodic state.
    pub fn periodic_parts(&self) -> Option<(&[BigInt], &[BigInt])> {
        match &self.repr {
            Repr::Periodic { prefix, period } => Some((prefix, period)),
            _ => None,
        }
    }

    /// Coefficient list of a finite state.
    pub fn finite_coeffs(&self) -> Option<&[BigInt]> {
        match &self.repr {
            Repr::Finite(coeffs) => Some(coeffs),
            _ => None,
        }
    }

    pub fn is_generator_backed(&self) -> bool {
        matches!(self.repr, Repr::Buffered { .. })
    }

    /// The coefficient at `index` without touching the budget, when it is
    /// already available: always for finite/periodic states, only within the
    /// materialized head for generator-backed ones.
    pub fn peek(&self, index: usize) -> Option<BigInt> {
        match &self.repr {
            Repr::Finite(coeffs) => coeffs.get(index).cloned(),
            Repr::Periodic { prefix, period } => Some(if index < prefix.len() {
                prefix[index].clone()
            } else {
                period[(index - prefix.len()) % period.len()].clone()
            }),
            Repr::Buffered { head, .. } => head.get(index).cloned(),
        }
    }

    /// Leading coefficients that are available without budget charges, at
    /// most `cap` of them. Periodic states unroll prefix plus one period;
    /// generator-backed states expose only their materialized head.
    pub fn head_snapshot(&self, cap: usize) -> Vec<BigInt> {
        let extent = match &self.repr {
            Repr::Finite(coeffs) => coeffs.len(),
            Repr::Periodic { prefix, period } => prefix.len() + period.len(),
            Repr::Buffered { head, .. } => head.len(),
        };
        (0..extent.min(cap))
            .map(|i| self.peek(i).expect("index within snapshot extent"))
            .collect()
    }

    /// The coefficient at `index`, materializing (and charging for)
    /// generator coefficients as needed.
    pub fn coefficient(&mut self, index: usize) -> Result<BigInt> {
        self.ensure_materialized(index)?;
        match &self.repr {
            Repr::Finite(coeffs) => coeffs.get(index).cloned().ok_or(Error::IndexOutOfRange {
                index,
                len: coeffs.len(),
            }),
            _ => Ok(self.peek(index).expect("materialized above")),
        }
    }

    fn ensure_materialized(&mut self, index: usize) -> Result<()> {
        let PhiState { repr, budget, .. } = self;
        if let Repr::Buffered {
            head,
            tail,
            tail_offset,
        } = repr
        {
            while head.len() <= index {
                if *budget == 0 {
                    return Err(Error::BudgetExhausted);
                }
                *budget -= 1;
                head.push(tail.coefficient(*tail_offset));
                *tail_offset += 1;
            }
        }
        Ok(())
    }

    /// Least position `m >= 1` whose coefficient lies in `{0, 1, -1}`.
    ///
    /// Exact (and horizon-independent) for finite and eventually periodic
    /// states — a periodic state needs only the prefix plus one period
    /// scanned. For generator-backed states the scan materializes
    /// coefficients up to `horizon` and `None` means only "no bad
    /// coefficient within that range".
    pub fn first_bad_position(&mut self, horizon: usize) -> Result<Option<usize>> {
        if let Some(m) = self.scan_found {
            return Ok(Some(m));
        }
        if self.scan_clear_upto == usize::MAX {
            return Ok(None);
        }
        match &self.repr {
            Repr::Finite(coeffs) => {
                let found = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .find(|(_, b)| is_bad(b))
                    .map(|(i, _)| i);
                self.note_scan_exact(found);
                Ok(found)
            }
            Repr::Periodic { prefix, period } => {
                let bound = prefix.len() + period.len();
                let mut found = None;
                for m in 1..=bound {
                    if is_bad(&self.peek(m).expect("within prefix + period")) {
                        found = Some(m);
                        break;
                    }
                }
                self.note_scan_exact(found);
                Ok(found)
            }
            Repr::Buffered { .. } => {
                let start = self.scan_clear_upto + 1;
                for m in start..=horizon {
                    self.ensure_materialized(m)?;
                    let bad = match &self.repr {
                        Repr::Buffered { head, .. } => is_bad(&head[m]),
                        _ => unreachable!("repr variants never change"),
                    };
                    if bad {
                        self.note_bad_observed(m);
                        return Ok(Some(m));
                    }
                }
                self.scan_clear_upto = self.scan_clear_upto.max(horizon);
                Ok(None)
            }
        }
    }

    fn note_scan_exact(&mut self, found: Option<usize>) {
        match found {
            Some(m) => self.note_bad_observed(m),
            None => self.scan_clear_upto = usize::MAX,
        }
    }

    fn note_bad_observed(&mut self, m: usize) {
        self.scan_found = Some(m);
        self.stable_upto = Some(self.stable_upto.unwrap_or(usize::MAX).min(m - 1));
    }

    /// Applies one rewrite in place and reports what happened. Returns the
    /// `Fixed` rule (state untouched) when no bad coefficient exists —
    /// exactly for finite/periodic states, within the scan horizon for
    /// generator-backed ones.
    pub fn advance(&mut self) -> Result<StepInfo> {
        let horizon = self.scan_horizon;
        let Some(m) = self.first_bad_position(horizon)? else {
            return Ok(StepInfo::fixed());
        };
        let bad = self.peek(m).expect("scan materialized position m");
        let rule = if bad.is_zero() {
            PhiRule::Zero
        } else if bad.is_one() {
            PhiRule::PlusOne
        } else {
            PhiRule::MinusOne
        };

        let at_finite_end = match &self.repr {
            Repr::Finite(coeffs) => m == coeffs.len() - 1,
            _ => {
                self.ensure_materialized(m + 1)?;
                false
            }
        };

        match &mut self.repr {
            Repr::Finite(coeffs) => {
                if at_finite_end {
                    match rule {
                        PhiRule::Zero => coeffs.truncate(m - 1),
                        PhiRule::PlusOne => {
                            coeffs.truncate(m);
                            coeffs[m - 1] -= 1;
                        }
                        PhiRule::MinusOne => {
                            coeffs.truncate(m);
                            coeffs[m - 1] += 1;
                        }
                        PhiRule::Fixed => unreachable!(),
                    }
                } else {
                    apply_interior(coeffs, m, rule);
                }
            }
            Repr::Periodic { prefix, period } => {
                // Unroll the period far enough that the rewrite works on
                // explicit coefficients; the untouched tail is the same
                // period, rotated to match its new starting phase.
                let unrolled = (m + 2).max(prefix.len());
                let mut head: Vec<BigInt> = Vec::with_capacity(unrolled);
                for i in 0..unrolled {
                    head.push(if i < prefix.len() {
                        prefix[i].clone()
                    } else {
                        period[(i - prefix.len()) % period.len()].clone()
                    });
                }
                let rot = (unrolled - prefix.len()) % period.len();
                let mut rotated = period[rot..].to_vec();
                rotated.extend_from_slice(&period[..rot]);
                apply_interior(&mut head, m, rule);
                let (new_prefix, new_period) = canonical_parts(head, rotated);
                *prefix = new_prefix;
                *period = new_period;
            }
            Repr::Buffered { head, .. } => apply_interior(head, m, rule),
        }

        self.step += 1;
        self.scan_found = None;
        // Positions up to m-2 were certified good by the scan and are not
        // touched by the rewrite; only m-1 needs re-checking.
        self.scan_clear_upto = m.saturating_sub(2);

        let deleted_convergent_positions = match rule {
            PhiRule::Zero => vec![m - 1, m],
            _ => vec![m - 1],
        };
        Ok(StepInfo {
            rule,
            m: Some(m),
            deleted_convergent_positions,
        })
    }
}

fn apply_interior(coeffs: &mut Vec<BigInt>, m: usize, rule: PhiRule) {
    match rule {
        PhiRule::Zero => {
            let carried = coeffs.remove(m + 1);
            coeffs.remove(m);
            coeffs[m - 1] += carried;
        }
        PhiRule::PlusOne => {
            coeffs[m - 1] -= 1;
            coeffs[m + 1] -= 1;
            coeffs.remove(m);
        }
        PhiRule::MinusOne => {
            coeffs[m - 1] += 1;
            coeffs[m + 1] += 1;
            coeffs.remove(m);
        }
        PhiRule::Fixed => unreachable!("fixed steps perform no rewrite"),
    }
}

/// One rewrite, functionally: the stepped state plus what the step did.
pub fn phi_step(state: &PhiState) -> Result<(PhiState, StepInfo)> {
    let mut next = state.clone();
    let info = next.advance()?;
    Ok((next, info))
}

/// Maps a convergent position of the pre-step state to its position after
/// the step, or `None` for the deleted positions (`{m-1, m}` under the merge
/// rule, `{m-1}` under ±1). The convergent value at the mapped position is
/// unchanged.
pub fn index_map_step(e: usize, info: &StepInfo) -> Option<usize> {
    let Some(m) = info.m else {
        return Some(e);
    };
    if e + 2 <= m {
        return Some(e);
    }
    match info.rule {
        PhiRule::Zero => {
            if e <= m {
                None
            } else {
                Some(e - 2)
            }
        }
        PhiRule::PlusOne | PhiRule::MinusOne => {
            if e == m - 1 {
                None
            } else {
                Some(e - 1)
            }
        }
        PhiRule::Fixed => Some(e),
    }
}

/// Why a trace stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceStop {
    /// A state with no bad coefficient was reached (exact for
    /// finite/periodic states, horizon-limited for generator-backed ones).
    Fixed,
    /// The step allowance ran out first.
    MaxSteps,
    /// The generator-access budget ran out mid-step.
    BudgetExhausted,
}

/// What one recorded step produced: the post-step state's first bad position
/// `p` (`None` when it has none), the coefficient modulus just below it, and
/// a bounded row of leading coefficients.
#[derive(Clone, Debug)]
pub struct StepRecord {
    /// 1-based count of steps applied to produce the state described here.
    pub step: usize,
    pub rule: PhiRule,
    /// Position removed by this step (in pre-step indexing).
    pub m: usize,
    pub deleted_convergent_positions: Vec<usize>,
    /// First bad position of the post-step state.
    pub p: Option<usize>,
    /// `|coefficient at p - 1|` of the post-step state.
    pub q: Option<BigInt>,
    /// Coefficients `0 ..= min(p, TRACE_ROW_CAP)` of the post-step state
    /// (a bounded snapshot when `p` is `None`).
    pub row: Vec<BigInt>,
}

/// A bounded run of steps: per-step records, the final state, and optionally
/// every intermediate state.
#[derive(Clone, Debug)]
pub struct PhiTrace {
    records: Vec<StepRecord>,
    states: Option<Vec<PhiState>>,
    final_state: PhiState,
    fixed_at: Option<usize>,
    stop: TraceStop,
}

impl PhiTrace {
    /// Runs up to `max_steps` rewrites from `initial`. Stops early at a fixed
    /// state or when the access budget dies (recorded in
    /// [`PhiTrace::stop`], not an error). `retain_states` keeps a clone of
    /// every state, the initial one included.
    pub fn run(initial: PhiState, max_steps: usize, retain_states: bool) -> Self {
        let mut state = initial;
        let mut records = Vec::new();
        let mut states = retain_states.then(|| vec![state.clone()]);
        let mut fixed_at = None;
        let mut stop = TraceStop::MaxSteps;

        for _ in 0..max_steps {
            let info = match state.advance() {
                Ok(info) => info,
                Err(Error::BudgetExhausted) => {
                    stop = TraceStop::BudgetExhausted;
                    break;
                }
                Err(err) => unreachable!("stepping cannot fail otherwise: {err}"),
            };
            if info.rule == PhiRule::Fixed {
                fixed_at = Some(state.step());
                stop = TraceStop::Fixed;
                break;
            }
            let p = match state.first_bad_position(state.scan_horizon) {
                Ok(p) => p,
                Err(Error::BudgetExhausted) => {
                    stop = TraceStop::BudgetExhausted;
                    break;
                }
                Err(err) => unreachable!("scanning cannot fail otherwise: {err}"),
            };
            let q = p.map(|p| {
                state
                    .peek(p - 1)
                    .expect("positions below p are materialized")
                    .abs()
            });
            let row = match p {
                Some(p) => state.head_snapshot(p.min(TRACE_ROW_CAP) + 1),
                None => state.head_snapshot(TRACE_ROW_CAP),
            };
            records.push(StepRecord {
                step: state.step(),
                rule: info.rule,
                m: info.m.expect("non-fixed steps remove a position"),
                deleted_convergent_positions: info.deleted_convergent_positions,
                p,
                q,
                row,
            });
            if let Some(states) = states.as_mut() {
                states.push(state.clone());
            }
            if p.is_none() {
                fixed_at = Some(state.step());
                stop = TraceStop::Fixed;
                break;
            }
        }

        PhiTrace {
            records,
            states,
            final_state: state,
            fixed_at,
            stop,
        }
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    /// Decomposes the trace for callers that resume stepping from the final
    /// state: `(records, final_state, fixed_at, stop)`.
    pub fn into_parts(self) -> (Vec<StepRecord>, PhiState, Option<usize>, TraceStop) {
        (self.records, self.final_state, self.fixed_at, self.stop)
    }

    /// Retained states `Φ⁰, Φ¹, …` when the trace was run with retention.
    pub fn states(&self) -> Option<&[PhiState]> {
        self.states.as_deref()
    }

    pub fn final_state(&self) -> &PhiState {
        &self.final_state
    }

    /// Step count at which the trace found the state fixed, if it did.
    pub fn fixed_at(&self) -> Option<usize> {
        self.fixed_at
    }

    pub fn stop(&self) -> TraceStop {
        self.stop
    }

    /// First bad positions of the recorded states (`None` is the ∞ marker).
    pub fn p_seq(&self) -> Vec<Option<usize>> {
        self.records.iter().map(|r| r.p).collect()
    }

    /// Smallest first bad position observed anywhere in the trace.
    pub fn p_running_min(&self) -> Option<usize> {
        self.records.iter().filter_map(|r| r.p).min()
    }

    /// `|coefficient at basis - 1|` per recorded state: the q-sequence
    /// measured against a committed or provisional first-bad floor. Entries
    /// are `None` where the recorded row is too short for the basis.
    pub fn q_seq_at(&self, basis: usize) -> Vec<Option<BigInt>> {
        assert!(basis >= 1, "q is measured at basis - 1 >= 0");
        self.records
            .iter()
            .map(|r| r.row.get(basis - 1).map(|b| b.abs()))
            .collect()
    }

    /// Leading coefficients of the final state that stayed out of every
    /// rewrite's reach across the recent window (the last 100 recorded
    /// steps): positions `0 ..= min p - 2` over that window. A trace that
    /// ended fixed exposes everything the final state knows.
    pub fn stable_prefix(&self) -> Vec<BigInt> {
        if self.fixed_at.is_some() {
            return self.final_state.head_snapshot(usize::MAX);
        }
        let window = &self.records[self.records.len().saturating_sub(100)..];
        let Some(p_min) = window.iter().filter_map(|r| r.p).min() else {
            return Vec::new();
        };
        self.final_state.head_snapshot(p_min.saturating_sub(1))
    }
}

/// Runs up to `max_steps` rewrites over a stream, failing on budget
/// exhaustion. [`PhiTrace::run`] is the non-failing form that keeps the
/// partial trace.
pub fn phi_trace(stream: &CoefficientStream, max_steps: usize) -> Result<PhiTrace> {
    let trace = PhiTrace::run(PhiState::new(stream.clone()), max_steps, false);
    match trace.stop() {
        TraceStop::BudgetExhausted => Err(Error::BudgetExhausted),
        _ => Ok(trace),
    }
}
