//! Bundled benchmark circuits.

use crate::circuit::Circuit;
use crate::qasm::parse_qasm;

const SMALL: &[(&str, &str)] = &[
    ("tof_3", include_str!("../benchmarks/tof_3.qasm")),
    ("barenco_tof_3", include_str!("../benchmarks/barenco_tof_3.qasm")),
    ("mod5_4", include_str!("../benchmarks/mod5_4.qasm")),
    ("tof_4", include_str!("../benchmarks/tof_4.qasm")),
    ("tof_5", include_str!("../benchmarks/tof_5.qasm")),
    ("barenco_tof_4", include_str!("../benchmarks/barenco_tof_4.qasm")),
    ("vbe_adder_3", include_str!("../benchmarks/vbe_adder_3.qasm")),
];

/// Names of the bundled suites.
pub const SUITES: &[&str] = &["small", "empty"];

/// Parsed circuits of a bundled suite, or `None` for an unknown name.
pub fn suite(name: &str) -> Option<Vec<Circuit>> {
    let entries: &[(&str, &str)] = match name {
        "small" => SMALL,
        "empty" => &[],
        _ => return None,
    };
    Some(
        entries
            .iter()
            .map(|(n, text)| {
                let mut c = parse_qasm(text).expect("bundled benchmark parses");
                c.name = n.to_string();
                c
            })
            .collect(),
    )
}

/// A single bundled benchmark by name.
pub fn benchmark(name: &str) -> Option<Circuit> {
    suite("small")?.into_iter().find(|c| c.name == name)
}
