//! Inputs shared by the pipeline benchmarks.

use lbstar_core::{bench_family, parse_sequent, Sequent};

/// Members `ks` of a named family, parsed.
pub fn family(name: &str, ks: &[usize]) -> Vec<(usize, Sequent)> {
    ks.iter()
        .map(|&k| {
            let text = bench_family(name, k).unwrap_or_else(|| panic!("unknown family {name}"));
            (k, parse_sequent(&text).expect("family members parse"))
        })
        .collect()
}

/// Derivable sequents with a few brackets, from short to long.
pub const LINGUISTIC: [&str; 3] = [
    r"N, (N\S)/S, N, (N\S)/N, N => S",
    r"CN, (CN\CN)/(S/N), N, (N\S)/S, N, (N\S)/N => CN",
    r"{ N }, <>N\S, { []((<>N\S)\(<>N\S))/(<>N\S), <>N\S } => S",
];
