use serde::{Deserialize, Serialize};

/// Size limits for the desk-scale search space.
///
/// Every cap violation is a refusal of the individual operation, never a
/// silent truncation. The defaults are generous for the bundled campaigns
/// and suites; callers may tighten or relax them per run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    /// Largest group order that may be enumerated eagerly.
    pub enumeration: u64,
    /// Largest square matrix accepted by determinant/permanent.
    pub matrix_k: usize,
    /// Largest k for which all k! permutations may be enumerated.
    pub permutation_k: usize,
    /// Largest number of character tuples an exhaustive sweep may visit.
    pub exhaustive_tuples: u64,
    /// Trial budget for the random character-search strategy.
    pub random_trials: u64,
    /// Largest cyclotomic level for which the cyclotomic polynomial is computed.
    pub cyclotomic_level: u64,
    /// Largest field size in bits (d log2 q) for finite-field construction.
    pub field_bits: u32,
    /// Largest number of character tuples swept when replicating an
    /// orthogonality sum over all of the dual group.
    pub sigma_sweep: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enumeration: 10_000,
            matrix_k: 10,
            permutation_k: 7,
            exhaustive_tuples: 10_000_000,
            random_trials: 10_000,
            cyclotomic_level: 1_024,
            field_bits: 48,
            sigma_sweep: 20_000,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_json() {
        let caps = Caps::default();
        let text = serde_json::to_string(&caps).unwrap();
        let back: Caps = serde_json::from_str(&text).unwrap();
        assert_eq!(caps, back);
        // Serialized form always carries every cap explicitly.
        for key in [
            "enumeration",
            "matrix_k",
            "permutation_k",
            "exhaustive_tuples",
            "random_trials",
            "cyclotomic_level",
            "field_bits",
            "sigma_sweep",
        ] {
            assert!(text.contains(key), "missing cap {key} in {text}");
        }
    }

    #[test]
    fn partial_config_fills_defaults() {
        let caps: Caps = serde_json::from_str(r#"{"matrix_k": 12}"#).unwrap();
        assert_eq!(caps.matrix_k, 12);
        assert_eq!(caps.enumeration, Caps::default().enumeration);
    }
}
