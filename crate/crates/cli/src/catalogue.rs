//! Bundled example problems.

use crate::problem::{read_problem, ProblemFile};

pub const EXAMPLES: &[(&str, &str)] = &[
    ("cotangent_a1", include_str!("../fixtures/cotangent_a1.json")),
    ("cotangent_gm", include_str!("../fixtures/cotangent_gm.json")),
    ("cotangent_gm_log_twist", include_str!("../fixtures/cotangent_gm_log_twist.json")),
    ("cotangent_toy", include_str!("../fixtures/cotangent_toy.json")),
    ("gm_log_class", include_str!("../fixtures/gm_log_class.json")),
    ("hyperbolic_line", include_str!("../fixtures/hyperbolic_line.json")),
    ("not_maurer_cartan", include_str!("../fixtures/not_maurer_cartan.json")),
    ("rank2_chern", include_str!("../fixtures/rank2_chern.json")),
    ("zero_poisson", include_str!("../fixtures/zero_poisson.json")),
];

pub fn example(name: &str) -> Option<&'static str> {
    EXAMPLES.iter().find(|(n, _)| *n == name).map(|(_, src)| *src)
}

pub fn all() -> Vec<ProblemFile> {
    EXAMPLES.iter().map(|(n, src)| read_problem(src).unwrap_or_else(|e| panic!("bundled example {n}: {e}"))).collect()
}
