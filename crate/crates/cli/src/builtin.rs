//! Scenarios shipped with the binary. The same files live under
//! `crates/cli/scenarios/`.

use crate::config::{ConfigError, Scenario};

pub const BUILTINS: [(&str, &str); 10] = [
    (
        "allen-cahn-kink-1d",
        include_str!("../scenarios/allen-cahn-kink-1d.toml"),
    ),
    (
        "warped-sharpness-n2",
        include_str!("../scenarios/warped-sharpness-n2.toml"),
    ),
    (
        "warped-sharpness-n3",
        include_str!("../scenarios/warped-sharpness-n3.toml"),
    ),
    (
        "allen-cahn-stripe-torus",
        include_str!("../scenarios/allen-cahn-stripe-torus.toml"),
    ),
    (
        "modica-cross-validation",
        include_str!("../scenarios/modica-cross-validation.toml"),
    ),
    (
        "sphere-family",
        include_str!("../scenarios/sphere-family.toml"),
    ),
    (
        "anisotropic-stripe-torus",
        include_str!("../scenarios/anisotropic-stripe-torus.toml"),
    ),
    (
        "dirichlet-ball",
        include_str!("../scenarios/dirichlet-ball.toml"),
    ),
    (
        "oracle-equivalences",
        include_str!("../scenarios/oracle-equivalences.toml"),
    ),
    (
        "manufactured-sine-torus",
        include_str!("../scenarios/manufactured-sine-torus.toml"),
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Option<Result<Scenario, ConfigError>> {
    source(name).map(|text| Scenario::parse(text, &format!("builtin:{name}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_parses_under_its_own_name() {
        for (name, _) in BUILTINS {
            let s = load(name).unwrap().unwrap();
            assert_eq!(s.name, name);
        }
    }
}
