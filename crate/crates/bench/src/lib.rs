//! Fixtures shared by the benchmarks in `benches/`.

use involute::exactnum::{int, rat};
use involute::{LambdaSeq, WeightSpec};

/// One member of each named family.
pub fn families() -> Vec<(&'static str, WeightSpec)> {
    vec![
        ("gamma(1,1/2)", WeightSpec::gamma_ab(int(1), rat(1, 2)).unwrap()),
        ("gammac(2)", WeightSpec::gamma_c(int(2)).unwrap()),
        ("delta(40,3)", WeightSpec::delta_ab(int(40), int(3)).unwrap()),
    ]
}

/// `lambda_d = 1/(d+1)` on `n` states.
pub fn harmonic(n: usize) -> LambdaSeq {
    LambdaSeq::new((0..n as i64).map(|d| rat(1, d + 1)).collect())
}
