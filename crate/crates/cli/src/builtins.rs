//! Named demonstration streams, one per convergence class. They are
//! addressable from the expression grammar as `@example1` .. `@example4`.

use std::sync::OnceLock;

use num::{BigInt, One, Zero};

use cfconv_core::{CoefficientStream, GeneratorStream};

/// Looks a builtin up by its `@name`. Unknown names return `None`. Each
/// name always hands back the same underlying stream, so two lookups of
/// `@example1` compare equal.
pub fn by_name(name: &str) -> Option<CoefficientStream> {
    static STREAMS: OnceLock<[CoefficientStream; 4]> = OnceLock::new();
    let streams = STREAMS.get_or_init(|| {
        [
            growing_blocks_with_ones(),
            interleaved_ones(),
            zeros_between_naturals(),
            balanced_three_blocks(),
        ]
    });
    let index = match name {
        "@example1" => 0,
        "@example2" => 1,
        "@example3" => 2,
        "@example4" => 3,
        _ => return None,
    };
    Some(streams[index].clone())
}

/// All builtin names, in display order.
pub fn names() -> [&'static str; 4] {
    ["@example1", "@example2", "@example3", "@example4"]
}

/// Blocks `(j+3), 1, 2, ..., 2, 3` with `j` twos, for `j = 0, 1, 2, ...`.
/// The ones keep getting rewritten away, the fraction converges to 1, and
/// rewriting never settles — a rational limit reached only in the limit.
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

/// `[1, 2, 1, 3, 1, 4, ...]`: ones interleaved with the naturals from 2.
/// Every rewrite swallows one of the ones and the stream converges to an
/// irrational number.
fn interleaved_ones() -> CoefficientStream {
    CoefficientStream::generator(GeneratorStream::new(|i| {
        if i % 2 == 0 {
            BigInt::one()
        } else {
            BigInt::from((i as i64 + 3) / 2)
        }
    }))
}

/// `[1, 0, 2, 0, 3, 0, ...]`: the naturals separated by zeros. The front
/// coefficient grows without bound while the first rewrite site stays
/// pinned at position 1, so the value runs off to the point at infinity.
fn zeros_between_naturals() -> CoefficientStream {
    CoefficientStream::generator(GeneratorStream::new(|i| {
        if i % 2 == 0 {
            BigInt::from(i as i64 / 2 + 1)
        } else {
            BigInt::zero()
        }
    }))
}

/// Blocks of `j` threes, a zero, then `j` minus-threes, for `j = 1, 2, ...`.
/// The zeros keep folding opposite-signed blocks into each other and the
/// convergents oscillate forever.
fn balanced_three_blocks() -> CoefficientStream {
    CoefficientStream::generator(GeneratorStream::new(|i| {
        let j = (i + 1).isqrt();
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

#[cfg(test)]
mod tests {
    use super::*;

    fn heads(name: &str, n: usize) -> Vec<i64> {
        by_name(name)
            .unwrap()
            .head(n)
            .unwrap()
            .iter()
            .map(|b| i64::try_from(b).unwrap())
            .collect()
    }

    #[test]
    fn openings_match_their_descriptions() {
        assert_eq!(heads("@example1", 9), [3, 1, 3, 4, 1, 2, 3, 5, 1]);
        assert_eq!(heads("@example2", 8), [1, 2, 1, 3, 1, 4, 1, 5]);
        assert_eq!(heads("@example3", 8), [1, 0, 2, 0, 3, 0, 4, 0]);
        assert_eq!(heads("@example4", 9), [3, 0, -3, 3, 3, 0, -3, -3, 3]);
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(by_name("@example5").is_none());
        assert!(by_name("example1").is_none());
    }

    #[test]
    fn every_listed_name_resolves() {
        for name in names() {
            assert!(by_name(name).is_some(), "{name} did not resolve");
        }
    }
}
