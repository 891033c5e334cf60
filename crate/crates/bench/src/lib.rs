//! Shared fixtures for the criterion benches: a small corpus of streams
//! spanning every interesting shape the pipeline handles.

use num::BigInt;

use cfconv_core::CoefficientStream;

fn ep(prefix: &[i64], period: &[i64]) -> CoefficientStream {
    CoefficientStream::eventually_periodic(
        prefix.iter().map(|&n| BigInt::from(n)).collect::<Vec<_>>(),
        period.iter().map(|&n| BigInt::from(n)).collect::<Vec<_>>(),
    )
    .expect("period is nonempty")
}

/// The four builtin generators plus periodic streams hitting each verdict:
/// rational tail, irrational, divergent cycle, and a stalled front.
pub fn corpus() -> Vec<(&'static str, CoefficientStream)> {
    let mut streams: Vec<(&'static str, CoefficientStream)> = cfconv_cli::builtins::names()
        .into_iter()
        .map(|name| (name, cfconv_cli::builtins::by_name(name).expect("builtin resolves")))
        .collect();
    streams.push(("rational-tail", ep(&[5, 3], &[2])));
    streams.push(("irrational-periodic", ep(&[5], &[4])));
    streams.push(("divergent-cycle", ep(&[], &[1])));
    streams.push(("stalled-front", ep(&[4], &[0, 3])));
    streams
}
