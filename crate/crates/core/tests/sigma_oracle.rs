mod common;

use common::{naive_sigma, random_set, random_vector, test_spaces, KINDS};
use greedy_lab::greedy::project_complement;
use greedy_lab::sigma::{sigma, sigma_value, SigmaKind};
use greedy_lab::space::{IndexSet, Norm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn is_admissible(kind: SigmaKind, set: &IndexSet, lambda_set: &IndexSet, m: usize) -> bool {
    if set.is_empty() {
        return true;
    }
    let fits = set.len() <= m;
    match kind {
        SigmaKind::Reverse => fits && lambda_set.max().is_none_or(|top| set.min().unwrap() > top),
        SigmaKind::Check => {
            fits && set.is_interval()
                && lambda_set.max().is_none_or(|top| top <= set.max().unwrap())
        }
        SigmaKind::Hat => {
            fits && set.is_interval() && lambda_set.min().is_none_or(|b| set.min().unwrap() <= b)
        }
        SigmaKind::PgTail => fits && set.is_interval() && set.min() == Some(1),
    }
}

#[test]
fn optimized_functionals_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for cap in [5usize, 8, 10, 12] {
        for space in test_spaces(cap) {
            for _ in 0..8 {
                let x = random_vector(&mut rng, cap);
                let density = rng.gen_range(0.0..0.5);
                let lambda_set = random_set(&mut rng, cap, density);
                let m = rng.gen_range(0..=cap);
                for kind in KINDS {
                    let oracle = naive_sigma(kind, &x, &lambda_set, m, &space, cap);
                    let full = sigma(kind, &x, &lambda_set, m, &space);
                    let fast = sigma_value(kind, &x, &lambda_set, m, &space);
                    let ctx = format!("{} {kind:?} x={x} L={lambda_set} m={m}", space.name);
                    assert_eq!(full.value, oracle, "{ctx}");
                    assert_eq!(fast, oracle, "{ctx}");
                    assert_eq!(
                        space.norm(&project_complement(&x, &full.minimizer)),
                        full.value,
                        "{ctx}"
                    );
                    assert!(
                        is_admissible(kind, &full.minimizer, &lambda_set, m),
                        "{ctx}: {}",
                        full.minimizer
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 1000);
}

#[test]
fn documented_examples() {
    let spaces = test_spaces(6);
    let l1 = &spaces[0];
    let ones = "1:1,2:1,3:1".parse_vector();
    let set = |v: &[usize]| IndexSet::new(v.iter().copied()).unwrap();
    assert_eq!(
        sigma(SigmaKind::Reverse, &ones, &set(&[1]), 1, l1).value,
        2.0
    );
    assert_eq!(sigma(SigmaKind::Check, &ones, &set(&[1]), 1, l1).value, 2.0);
    let ends = "1:1,4:1".parse_vector();
    let r = sigma(SigmaKind::Check, &ends, &set(&[4]), 2, l1);
    assert_eq!((r.value, r.minimizer), (1.0, set(&[3, 4])));
    assert_eq!(sigma(SigmaKind::Hat, &ends, &set(&[1]), 2, l1).value, 1.0);
    assert_eq!(
        sigma(SigmaKind::Hat, &"4:1".parse_vector(), &set(&[4]), 1, l1).value,
        0.0
    );
    assert_eq!(
        sigma(SigmaKind::PgTail, &ones, &IndexSet::empty(), 2, l1).value,
        1.0
    );
    for kind in KINDS {
        let r = sigma(kind, &ones, &set(&[2]), 0, l1);
        assert_eq!((r.value, r.minimizer), (3.0, IndexSet::empty()));
    }
}

trait ParseVector {
    fn parse_vector(&self) -> greedy_lab::Vector;
}

impl ParseVector for str {
    fn parse_vector(&self) -> greedy_lab::Vector {
        greedy_lab::Vector::parse_literal(self).unwrap()
    }
}
