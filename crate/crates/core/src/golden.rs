//! Named example graphs shipped with the crate (also used by the tests).

use crate::error::{Error, Result};
use crate::graph::{parse_graph, Dag};

macro_rules! fixtures {
    ($($name:literal),* $(,)?) => {
        pub const NAMES: &[&str] = &[$($name),*];

        fn source(name: &str) -> Option<&'static str> {
            match name {
                $($name => Some(include_str!(concat!("../fixtures/", $name, ".graph"))),)*
                _ => None,
            }
        }
    };
}

fixtures!(
    "motivating",
    "motivating_projected",
    "motivating_reduced",
    "motivating_equivalent",
    "taxonomy_demo",
    "front_door",
    "mediator_g1",
    "mediator_g1_reduced",
    "mediator_g2",
    "mediator_g3",
    "mediator_g3_equiv",
    "mediator_g3_reduced",
    "two_confounders_g1",
    "two_confounders_g2",
    "two_confounders_g3",
    "two_confounders_g3_reduced",
    "three_mediators",
    "three_mediators_ni_projected",
    "three_mediators_reduced",
    "long_chain",
    "long_chain_reduced",
    "saturation_demo",
    "saturation_demo_projected",
);

/// Graph text of a named fixture.
pub fn text(name: &str) -> Result<&'static str> {
    source(name).ok_or_else(|| Error::UnknownLabel(name.to_string()))
}

/// Parsed named fixture.
pub fn graph(name: &str) -> Result<Dag> {
    parse_graph(text(name)?)
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_fixtures_parse() {
        for name in super::NAMES {
            super::graph(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}
