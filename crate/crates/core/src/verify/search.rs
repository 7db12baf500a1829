//! Character-tuple searches shared by the certificate-producing verifiers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::caps::Caps;
use crate::chars::{Character, CharacterSet, Strategy};
use crate::error::{Error, Result};

/// How a tuple search ended.
#[derive(Debug)]
pub enum SearchOutcome {
    /// A tuple passing the predicate, plus how many tuples were tested.
    Found { tuple: Vec<Character>, tested: u64 },
    /// The whole domain was swept and no tuple passed.
    Exhausted { tested: u64 },
    /// The random budget ran out before any tuple passed.
    BudgetSpent { tested: u64 },
}

/// Powers 0..k-1 of a generator of the dual domain, when it is cyclic.
/// Rows evaluated at distinct elements then form a Vandermonde system.
pub fn vandermonde_tuple(domain: &CharacterSet, k: usize) -> Option<Vec<Character>> {
    let gen = domain.cyclic_generator()?;
    Some((0..k).map(|i| gen.pow(i as u64)).collect())
}

/// Searches `domain^k` for a tuple accepted by the predicate.
///
/// `VandermondeFirst` tries the generator-power tuple before sweeping;
/// `Auto` does the same but falls back to random sampling when the sweep
/// would not fit the exhaustive cap. A `Random` trial count of zero means
/// the capped default.
pub fn search_tuples(
    domain: &CharacterSet,
    k: usize,
    strategy: &Strategy,
    seed: u64,
    caps: &Caps,
    mut accept: impl FnMut(&[Character]) -> Result<bool>,
) -> Result<SearchOutcome> {
    match strategy {
        Strategy::VandermondeFirst => {
            if let Some(tuple) = vandermonde_tuple(domain, k) {
                if accept(&tuple)? {
                    return Ok(SearchOutcome::Found { tuple, tested: 1 });
                }
            }
            exhaustive(domain, k, caps, accept)
        }
        Strategy::Exhaustive => exhaustive(domain, k, caps, accept),
        Strategy::Random { trials } => {
            let budget = if *trials == 0 {
                caps.random_trials
            } else {
                *trials
            };
            random(domain, k, budget, seed, accept)
        }
        Strategy::Auto => {
            if let Some(tuple) = vandermonde_tuple(domain, k) {
                if accept(&tuple)? {
                    return Ok(SearchOutcome::Found { tuple, tested: 1 });
                }
            }
            match domain.tuple_count(k) {
                Some(total) if total <= caps.exhaustive_tuples as u128 => {
                    exhaustive(domain, k, caps, accept)
                }
                _ => random(domain, k, caps.random_trials, seed, accept),
            }
        }
    }
}

fn exhaustive(
    domain: &CharacterSet,
    k: usize,
    caps: &Caps,
    mut accept: impl FnMut(&[Character]) -> Result<bool>,
) -> Result<SearchOutcome> {
    let total = domain.tuple_count(k).ok_or_else(|| {
        Error::CapExceeded(format!("tuple space {}^{k} overflows", domain.size()))
    })?;
    if total > caps.exhaustive_tuples as u128 {
        return Err(Error::CapExceeded(format!(
            "exhaustive sweep needs {total} tuples, cap is {}",
            caps.exhaustive_tuples
        )));
    }
    for index in 0..total {
        let tuple = domain.tuple_at(index, k)?;
        if accept(&tuple)? {
            return Ok(SearchOutcome::Found {
                tuple,
                tested: index as u64 + 1,
            });
        }
    }
    Ok(SearchOutcome::Exhausted {
        tested: total as u64,
    })
}

fn random(
    domain: &CharacterSet,
    k: usize,
    budget: u64,
    seed: u64,
    mut accept: impl FnMut(&[Character]) -> Result<bool>,
) -> Result<SearchOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for tested in 1..=budget {
        let tuple = domain.random_tuple(&mut rng, k);
        if accept(&tuple)? {
            return Ok(SearchOutcome::Found { tuple, tested });
        }
    }
    Ok(SearchOutcome::BudgetSpent { tested: budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn exhaustive_sweep_finds_lexicographically_first_match() {
        let group = GroupSpec::parse("c5").unwrap();
        let domain = CharacterSet::full(&group);
        // Accept tuples whose labels sum to 3: the first in lexicographic
        // order is (chi_0, chi_3).
        let outcome = search_tuples(&domain, 2, &Strategy::Exhaustive, 0, &caps(), |t| {
            Ok(t.iter().map(|c| c.label()[0]).sum::<u64>() == 3)
        })
        .unwrap();
        match outcome {
            SearchOutcome::Found { tuple, tested } => {
                assert_eq!(tuple[0].label(), &[0]);
                assert_eq!(tuple[1].label(), &[3]);
                assert_eq!(tested, 4);
            }
            other => panic!("unexpected outcome {other:?}"),
        }

        let none = search_tuples(&domain, 2, &Strategy::Exhaustive, 0, &caps(), |_| Ok(false))
            .unwrap();
        assert!(matches!(none, SearchOutcome::Exhausted { tested: 25 }));
    }

    #[test]
    fn vandermonde_tuple_is_generator_powers() {
        let group = GroupSpec::parse("c7").unwrap();
        let domain = CharacterSet::full(&group);
        let tuple = vandermonde_tuple(&domain, 3).unwrap();
        let labels: Vec<u64> = tuple.iter().map(|c| c.label()[0]).collect();
        assert_eq!(labels, vec![0, 1, 2]);

        // Non-cyclic duals have no generator tuple.
        let klein = GroupSpec::parse("c2xc2").unwrap();
        assert!(vandermonde_tuple(&CharacterSet::full(&klein), 2).is_none());
    }

    #[test]
    fn random_budget_is_respected_and_seeded() {
        let group = GroupSpec::parse("c5").unwrap();
        let domain = CharacterSet::full(&group);
        let run = |seed: u64| -> Vec<u64> {
            let mut seen = Vec::new();
            let outcome = search_tuples(
                &domain,
                1,
                &Strategy::Random { trials: 8 },
                seed,
                &caps(),
                |t| {
                    seen.push(t[0].label()[0]);
                    Ok(false)
                },
            )
            .unwrap();
            assert!(matches!(outcome, SearchOutcome::BudgetSpent { tested: 8 }));
            seen
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
    }

    #[test]
    fn caps_refuse_oversized_sweeps() {
        let group = GroupSpec::parse("c5").unwrap();
        let domain = CharacterSet::full(&group);
        let mut tight = caps();
        tight.exhaustive_tuples = 24;
        let err = search_tuples(&domain, 2, &Strategy::Exhaustive, 0, &tight, |_| Ok(true));
        assert!(matches!(err, Err(Error::CapExceeded(_))));
        // Auto degrades to random sampling instead of erroring.
        tight.random_trials = 3;
        let outcome =
            search_tuples(&domain, 2, &Strategy::Auto, 5, &tight, |_| Ok(false)).unwrap();
        assert!(matches!(outcome, SearchOutcome::BudgetSpent { tested: 3 }));
    }
}
