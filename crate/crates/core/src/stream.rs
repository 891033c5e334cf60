//! Coefficient streams for continued fractions.
//!
//! A stream is the integer sequence `b_0, b_1, b_2, ...` of a continued
//! fraction, in one of three shapes: an explicit finite list, an eventually
//! periodic sequence (exactly analyzable), or an opaque generator function
//! (analyzable only over an inspected range). All coefficients are arbitrary
//! precision; nothing here assumes they fit a machine word.
//!
//! The same stream type carries both conventions used in this crate:
//!
//! * negative form `[b0, b1, ...] = b0 - 1/(b1 - 1/(b2 - ...))`
//! * regular form `(b0, b1, ...) = b0 + 1/(b1 + 1/(b2 + ...))`
//!
//! The two are linked by flipping the sign of every odd-indexed coefficient,
//! which keeps the convergent sequence unchanged.

use std::fmt;
use std::sync::Arc;

use num::BigInt;

use crate::error::{Error, Result};

/// A generator-backed stream: a pure function from index to coefficient plus
/// an optional hint for how far scanning it stays meaningful.
#[derive(Clone)]
pub struct GeneratorStream {
    gen: Arc<dyn Fn(usize) -> BigInt + Send + Sync>,
    horizon_hint: Option<usize>,
}

impl GeneratorStream {
    pub fn new(gen: impl Fn(usize) -> BigInt + Send + Sync + 'static) -> Self {
        Self {
            gen: Arc::new(gen),
            horizon_hint: None,
        }
    }

    pub fn with_horizon_hint(mut self, hint: usize) -> Self {
        self.horizon_hint = Some(hint);
        self
    }

    pub fn horizon_hint(&self) -> Option<usize> {
        self.horizon_hint
    }

    pub fn coefficient(&self, index: usize) -> BigInt {
        (self.gen)(index)
    }
}

impl fmt::Debug for GeneratorStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GeneratorStream(horizon_hint: {:?})", self.horizon_hint)
    }
}

/// The coefficient sequence of a continued fraction.
#[derive(Clone, Debug)]
pub enum CoefficientStream {
    /// Explicit list; the continued fraction terminates.
    Finite(Vec<BigInt>),
    /// `prefix` followed by `period` repeating forever. Build through
    /// [`CoefficientStream::eventually_periodic`] so the representation is
    /// canonical (minimal period, shortest prefix).
    EventuallyPeriodic {
        prefix: Vec<BigInt>,
        period: Vec<BigInt>,
    },
    /// Opaque index-to-coefficient function.
    Generator(GeneratorStream),
}

impl CoefficientStream {
    pub fn finite(coeffs: impl IntoIterator<Item = impl Into<BigInt>>) -> Self {
        Self::Finite(coeffs.into_iter().map(Into::into).collect())
    }

    /// Builds an eventually periodic stream in canonical form.
    pub fn eventually_periodic(
        prefix: impl IntoIterator<Item = impl Into<BigInt>>,
        period: impl IntoIterator<Item = impl Into<BigInt>>,
    ) -> Result<Self> {
        let prefix: Vec<BigInt> = prefix.into_iter().map(Into::into).collect();
        let period: Vec<BigInt> = period.into_iter().map(Into::into).collect();
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let (prefix, period) = canonical_parts(prefix, period);
        Ok(Self::EventuallyPeriodic { prefix, period })
    }

    pub fn generator(gen: GeneratorStream) -> Self {
        Self::Generator(gen)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    /// Number of coefficients, or `None` for the two infinite shapes.
    pub fn len(&self) -> Option<usize> {
        match self {
            Self::Finite(v) => Some(v.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// The coefficient at `index`. Errors only for an out-of-range index into
    /// a finite stream; generator access is assumed affordable here — budgeted
    /// call sites meter themselves before asking.
    pub fn coefficient_at(&self, index: usize) -> Result<BigInt> {
        match self {
            Self::Finite(v) => v.get(index).cloned().ok_or(Error::IndexOutOfRange {
                index,
                len: v.len(),
            }),
            Self::EventuallyPeriodic { prefix, period } => {
                if index < prefix.len() {
                    Ok(prefix[index].clone())
                } else {
                    Ok(period[(index - prefix.len()) % period.len()].clone())
                }
            }
            Self::Generator(g) => Ok(g.coefficient(index)),
        }
    }

    /// First `n` coefficients as a vector.
    pub fn head(&self, n: usize) -> Result<Vec<BigInt>> {
        if let Self::Finite(v) = self {
            if v.len() < n {
                return Err(Error::StreamExhausted {
                    needed: n,
                    available: v.len(),
                });
            }
        }
        (0..n).map(|i| self.coefficient_at(i)).collect()
    }

    /// Rewrites an eventually periodic stream into canonical form; other
    /// shapes pass through unchanged. Idempotent.
    pub fn canonicalize(self) -> Self {
        match self {
            Self::EventuallyPeriodic { prefix, period } => {
                let (prefix, period) = canonical_parts(prefix, period);
                Self::EventuallyPeriodic { prefix, period }
            }
            other => other,
        }
    }
}

/// Structural equality where it is decidable: finite and eventually periodic
/// streams compare by canonical content, generators only by function identity.
impl PartialEq for CoefficientStream {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => a == b,
            (
                Self::EventuallyPeriodic {
                    prefix: pa,
                    period: qa,
                },
                Self::EventuallyPeriodic {
                    prefix: pb,
                    period: qb,
                },
            ) => {
                let (pa, qa) = canonical_parts(pa.clone(), qa.clone());
                let (pb, qb) = canonical_parts(pb.clone(), qb.clone());
                pa == pb && qa == qb
            }
            (Self::Generator(a), Self::Generator(b)) => Arc::ptr_eq(&a.gen, &b.gen),
            _ => false,
        }
    }
}

/// Minimal period first, then shortest prefix: a trailing prefix coefficient
/// equal to the period's last entry is absorbed by rotating the period right.
/// The result is the unique normal form of the expanded sequence.
pub(crate) fn canonical_parts(
    mut prefix: Vec<BigInt>,
    mut period: Vec<BigInt>,
) -> (Vec<BigInt>, Vec<BigInt>) {
    debug_assert!(!period.is_empty());
    'shrink: for d in 1..=period.len() / 2 {
        if !period.len().is_multiple_of(d) {
            continue;
        }
        for i in d..period.len() {
            if period[i] != period[i % d] {
                continue 'shrink;
            }
        }
        period.truncate(d);
        break;
    }
    while let Some(last) = prefix.last() {
        if last != period.last().expect("period is non-empty") {
            break;
        }
        prefix.pop();
        period.rotate_right(1);
    }
    (prefix, period)
}

/// Flips the sign of every odd-indexed coefficient starting at `start_parity`.
fn alternate(coeffs: &[BigInt], start_parity: usize) -> Vec<BigInt> {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, b)| {
            if (start_parity + i).is_multiple_of(2) {
                b.clone()
            } else {
                -b
            }
        })
        .collect()
}

/// Sign-flips every odd-indexed coefficient. This is the coefficient map in
/// both directions between the regular and negative conventions, and it is an
/// involution; see [`neg_from_regular`] and [`regular_from_neg`].
fn alternate_stream(stream: &CoefficientStream) -> CoefficientStream {
    match stream {
        CoefficientStream::Finite(v) => CoefficientStream::Finite(alternate(v, 0)),
        CoefficientStream::EventuallyPeriodic { prefix, period } => {
            // An odd period flips parity every repetition, so it doubles.
            let new_prefix = alternate(prefix, 0);
            let tail_parity = prefix.len() % 2;
            let new_period = if period.len() % 2 == 0 {
                alternate(period, tail_parity)
            } else {
                let doubled: Vec<BigInt> = period.iter().chain(period.iter()).cloned().collect();
                alternate(&doubled, tail_parity)
            };
            CoefficientStream::eventually_periodic(new_prefix, new_period)
                .expect("period stays non-empty")
        }
        CoefficientStream::Generator(g) => {
            let inner = g.clone();
            let mut flipped = GeneratorStream::new(move |i| {
                let b = inner.coefficient(i);
                if i % 2 == 0 {
                    b
                } else {
                    -b
                }
            });
            flipped.horizon_hint = g.horizon_hint;
            CoefficientStream::Generator(flipped)
        }
    }
}

/// Coefficients of the negative-form continued fraction with the same
/// convergents as the given regular-form one.
pub fn neg_from_regular(stream: &CoefficientStream) -> CoefficientStream {
    alternate_stream(stream)
}

/// Coefficients of the regular-form continued fraction with the same
/// convergents as the given negative-form one.
pub fn regular_from_neg(stream: &CoefficientStream) -> CoefficientStream {
    alternate_stream(stream)
}
