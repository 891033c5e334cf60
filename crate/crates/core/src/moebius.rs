//! Integer Moebius maps and continued fraction convergents.
//!
//! Every negative continued fraction factors into maps `s(b): z -> b - 1/z`;
//! the value of `[b0, ..., bn]` is `(s(b0) ∘ ... ∘ s(bn))(∞)`. Convergents are
//! computed by the companion integer recurrence rather than by repeated map
//! application, which keeps the arithmetic linear in the depth:
//!
//! ```text
//! c_n = b_n c_{n-1} - c_{n-2}        c_0 = b_0,  c_{-1} = 1
//! d_n = b_n d_{n-1} - d_{n-2}        d_0 = 1,    d_{-1} = 0
//! ```
//!
//! with `v_n = c_n / d_n` and the unimodularity identity
//! `c_{n-1} d_n - c_n d_{n-1} = 1` at every depth.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{decimal_ceil, decimal_floor, ExtendedRational};
use crate::stream::CoefficientStream;

/// An element of SL2(Z) acting on the projective line:
/// `z -> (a z + b) / (c z + d)` with `a d - b c = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoebiusMap {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl MoebiusMap {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(Error::NotUnimodular {
                entries: Box::new([a, b, c, d]),
                det,
            });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    /// The single-coefficient step `s(b): z -> b - 1/z`, i.e. the matrix
    /// `[b, -1; 1, 0]` (determinant 1).
    pub fn s_map(b: &BigInt) -> Self {
        Self {
            a: b.clone(),
            b: BigInt::from(-1),
            c: BigInt::one(),
            d: BigInt::zero(),
        }
    }

    pub fn entries(&self) -> (&BigInt, &BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    /// `self ∘ other` (apply `other` first). Determinants multiply, so the
    /// result stays unimodular; the debug assertion guards the invariant.
    pub fn compose(&self, other: &Self) -> Self {
        let m = Self {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        };
        debug_assert!((&m.a * &m.d - &m.b * &m.c).is_one());
        m
    }

    /// Image of a point of the projective line. A unimodular map sends
    /// primitive integer vectors to primitive ones, so `0/0` cannot arise.
    pub fn apply(&self, x: &ExtendedRational) -> ExtendedRational {
        let (p, q) = (x.numerator(), x.denominator());
        let num = &self.a * p + &self.b * q;
        let den = &self.c * p + &self.d * q;
        ExtendedRational::new(num, den).expect("unimodular image of a projective point")
    }
}

/// Convergents `v_0, ..., v_{n-1}` of a stream together with the raw
/// companion numerators and denominators of the recurrence.
#[derive(Clone, Debug)]
pub struct ConvergentSeq {
    values: Vec<ExtendedRational>,
    numerators: Vec<BigInt>,
    denominators: Vec<BigInt>,
}

impl ConvergentSeq {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[ExtendedRational] {
        &self.values
    }

    pub fn value(&self, k: usize) -> &ExtendedRational {
        &self.values[k]
    }

    /// Raw recurrence numerators `c_0, ..., c_{n-1}` (not reduced).
    pub fn numerators(&self) -> &[BigInt] {
        &self.numerators
    }

    /// Raw recurrence denominators `d_0, ..., d_{n-1}` (not reduced).
    pub fn denominators(&self) -> &[BigInt] {
        &self.denominators
    }
}

/// First `n` convergents of the stream. `v_k` may be `∞` along the way (for
/// example right after a zero coefficient); that is a legal vertex, not an
/// error.
pub fn convergents(stream: &CoefficientStream, n: usize) -> Result<ConvergentSeq> {
    let coeffs = stream.head(n)?;
    Ok(convergents_of(&coeffs))
}

/// Convergents of an explicit coefficient list.
pub fn convergents_of(coeffs: &[BigInt]) -> ConvergentSeq {
    let mut values = Vec::with_capacity(coeffs.len());
    let mut numerators = Vec::with_capacity(coeffs.len());
    let mut denominators = Vec::with_capacity(coeffs.len());
    // Pre-seeds (c_{-2}, c_{-1}) = (0, 1) and (d_{-2}, d_{-1}) = (-1, 0) make
    // the generic update produce the seeds c_0 = b_0, d_0 = 1.
    let (mut c_prev, mut c_cur) = (BigInt::zero(), BigInt::one());
    let (mut d_prev, mut d_cur) = (BigInt::from(-1), BigInt::zero());
    for b in coeffs {
        let c_next = b * &c_cur - &c_prev;
        let d_next = b * &d_cur - &d_prev;
        c_prev = std::mem::replace(&mut c_cur, c_next);
        d_prev = std::mem::replace(&mut d_cur, d_next);
        values.push(
            ExtendedRational::new(c_cur.clone(), d_cur.clone())
                .expect("consecutive convergents are coprime"),
        );
        numerators.push(c_cur.clone());
        denominators.push(d_cur.clone());
    }
    ConvergentSeq {
        values,
        numerators,
        denominators,
    }
}

/// Exact value of a finite continued fraction: its last convergent, or `∞`
/// for the empty fraction (the path starts at `∞` before `b_0` is read).
pub fn evaluate_slice(coeffs: &[BigInt]) -> ExtendedRational {
    match coeffs.len() {
        0 => ExtendedRational::infinity(),
        n => convergents_of(coeffs).value(n - 1).clone(),
    }
}

/// Exact value of a finite stream.
pub fn evaluate_finite(stream: &CoefficientStream) -> Result<ExtendedRational> {
    match stream {
        CoefficientStream::Finite(coeffs) => Ok(evaluate_slice(coeffs)),
        _ => Err(Error::NotFinite),
    }
}

/// A closed interval `[lo, hi]` of finite rationals that provably contains a
/// continued fraction value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: ExtendedRational,
    pub hi: ExtendedRational,
}

impl Enclosure {
    pub fn width(&self) -> BigRational {
        let lo = self.lo.to_rational().expect("enclosure bounds are finite");
        let hi = self.hi.to_rational().expect("enclosure bounds are finite");
        hi - lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let lo = self.lo.to_rational().expect("enclosure bounds are finite");
        let hi = self.hi.to_rational().expect("enclosure bounds are finite");
        lo <= *x && *x <= hi
    }

    pub fn contains_value(&self, x: &ExtendedRational) -> bool {
        match x.to_rational() {
            Some(r) => self.contains(&r),
            None => false,
        }
    }

    /// `[lo, hi]` as decimal strings rounded outward at `digits` fractional
    /// digits, so the printed interval still contains the true one.
    pub fn decimal(&self, digits: u32) -> String {
        let lo = self.lo.to_rational().expect("enclosure bounds are finite");
        let hi = self.hi.to_rational().expect("enclosure bounds are finite");
        format!(
            "[{}, {}]",
            decimal_floor(&lo, digits),
            decimal_ceil(&hi, digits)
        )
    }
}

/// Guaranteed enclosure of the limit value of a stream whose coefficients
/// satisfy `|b_i| >= 2` for `1 <= i <= n` (checked over that range; the
/// guarantee extends to the limit when the rest of the stream keeps the
/// bound). The endpoints are the images of `+1` and `-1` under
/// `s(b_0) ∘ ... ∘ s(b_n)`, nested and within `[b_0 - 1, b_0 + 1]`; the lower
/// endpoint is attained only by an all-2 tail and the upper only by an
/// all-(-2) tail.
pub fn enclose_value(stream: &CoefficientStream, n: usize) -> Result<Enclosure> {
    let mut composites = composite_prefix_maps(stream, n)?;
    Ok(enclosure_endpoints(
        &composites.pop().expect("at least b_0 is composed"),
    ))
}

/// Enclosures at every depth `0..=n` (depth 0 is the coarse bracket
/// `[b_0 - 1, b_0 + 1]`), for nesting checks and width-driven refinement
/// without recomposing from scratch.
pub fn enclose_value_sequence(stream: &CoefficientStream, n: usize) -> Result<Vec<Enclosure>> {
    let composites = composite_prefix_maps(stream, n)?;
    Ok(composites.iter().map(enclosure_endpoints).collect())
}

/// Deepens an enclosure until it is narrower than `target` (or the stream or
/// `depth_cap` runs out, whichever comes first — the best bracket reached is
/// returned either way). Depths double per round, so the cost is dominated by
/// the final bracket.
pub fn enclose_to_width(
    stream: &CoefficientStream,
    target: &BigRational,
    depth_cap: usize,
) -> Result<Enclosure> {
    let mut depth = 16usize.min(depth_cap);
    loop {
        let effective = match stream.len() {
            Some(len) => depth.min(len.saturating_sub(1)),
            None => depth,
        };
        let e = enclose_value(stream, effective)?;
        if &e.width() < target || effective < depth || depth >= depth_cap {
            return Ok(e);
        }
        depth = (depth * 2).min(depth_cap);
    }
}

/// Composites `s(b_0) ∘ ... ∘ s(b_k)` for `k = 0..=n`, checking `|b| >= 2`
/// from position 1 on.
fn composite_prefix_maps(stream: &CoefficientStream, n: usize) -> Result<Vec<MoebiusMap>> {
    let coeffs = stream.head(n + 1)?;
    let two = BigInt::from(2);
    let mut out = Vec::with_capacity(n + 1);
    let mut m = MoebiusMap::s_map(&coeffs[0]);
    out.push(m.clone());
    for (i, b) in coeffs.iter().enumerate().skip(1) {
        if b.abs() < two {
            return Err(Error::CoefficientTooSmall {
                position: i,
                value: b.clone(),
            });
        }
        m = m.compose(&MoebiusMap::s_map(b));
        out.push(m.clone());
    }
    Ok(out)
}

fn enclosure_endpoints(m: &MoebiusMap) -> Enclosure {
    let at_plus = m.apply(&ExtendedRational::from_integer(1));
    let at_minus = m.apply(&ExtendedRational::from_integer(-1));
    if at_plus <= at_minus {
        Enclosure {
            lo: at_plus,
            hi: at_minus,
        }
    } else {
        Enclosure {
            lo: at_minus,
            hi: at_plus,
        }
    }
}
