//! Free factor support of the attracting lamination of the EG stratum,
//! from the iterates of a loop cut out of a leaf segment.

use serde::{Deserialize, Serialize};

use super::graph::GraphMap;
use super::strata::analyze_strata;
#[cfg(test)]
use super::strata::validate_rtt;
use crate::error::{CoreError, Result};
use crate::whitehead::{free_factor_support, FreeFactorSystem, DEFAULT_NODE_BUDGET};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaminationBudget {
    /// Consecutive iterations with an unchanged support before stopping.
    pub streak: usize,
    pub max_iterations: usize,
    /// Loops longer than this end the iteration with a budget error.
    pub max_length: usize,
    pub node_budget: usize,
}

impl Default for LaminationBudget {
    fn default() -> Self {
        LaminationBudget { streak: 3, max_iterations: 50, max_length: 4000, node_budget: DEFAULT_NODE_BUDGET }
    }
}

/// A closed path `e ... ` ending just before a second occurrence of the
/// oriented EG edge `e` inside some `f^k(E)`. This is a leaf segment only
/// when `f` is a train track on the EG stratum; callers validate first.
pub fn leaf_loop(f: &GraphMap) -> Result<Word> {
    let strata = analyze_strata(f);
    let eg = strata.eg_strata();
    let &r = match eg.as_slice() {
        [] => return Err(CoreError::NoEgStratum),
        [r] => r,
        _ => return Err(CoreError::Unsupported("more than one EG stratum".into())),
    };
    let e = strata.strata[r].edges[0];
    let mut seg = Word::gen(e);
    for _ in 0..64 {
        if seg.len() >= 16 {
            let ls = seg.letters();
            // start from the middle of the segment, away from its ends
            let mid = ls.len() / 4;
            for i in mid..ls.len() {
                if strata.level[ls[i].index()] != r {
                    continue;
                }
                if let Some(j) = (i + 1..ls.len()).find(|&j| ls[j] == ls[i]) {
                    return Ok(Word::reduce(ls[i..j].iter().copied()));
                }
            }
        }
        seg = f.apply(&seg);
    }
    Err(CoreError::Budget("no repeated edge in the iterated segment".into()))
}

fn closed_to_element(f: &GraphMap, gamma: &Word) -> Word {
    let g = &f.graph;
    let (s, _) = g.path_ends(gamma).expect("loop is a path");
    g.read(&g.tree_path(0, s).mul(gamma).mul(&g.tree_path(s, 0)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaminationSupport {
    pub system: FreeFactorSystem,
    pub iterations: usize,
    /// The loops `γ_0, ..., γ_s` as elements of `F_n`.
    pub loops: Vec<Word>,
}

pub fn lamination_support(f: &GraphMap, budget: &LaminationBudget) -> Result<LaminationSupport> {
    f.validate()?;
    let rank = f.graph.rank();
    let mut gamma = leaf_loop(f)?;
    let mut loops = Vec::new();
    let mut last: Option<Vec<Vec<u32>>> = None;
    let mut streak = 0;
    for i in 0..budget.max_iterations {
        let elem = closed_to_element(f, &gamma).cyclic_core().0;
        if elem.len() > budget.max_length {
            break;
        }
        loops.push(elem);
        let system = free_factor_support(&loops, rank, budget.node_budget)?;
        let key = system.canonical();
        if last.as_ref() == Some(&key) {
            streak += 1;
        } else {
            streak = 1;
            last = Some(key);
        }
        if streak >= budget.streak || system.is_whole_group() {
            return Ok(LaminationSupport { system, iterations: i + 1, loops });
        }
        gamma = cyclic_tighten(&f.apply(&gamma));
    }
    Err(CoreError::Budget("lamination support did not stabilise".into()))
}

/// Cyclic tightening of a closed edge path.
fn cyclic_tighten(p: &Word) -> Word {
    p.cyclic_core().0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::{elementary, Automorphism};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn support(images: &[&[i32]]) -> FreeFactorSystem {
        let f = GraphMap::rose(&Automorphism::from_ints(images));
        lamination_support(&f, &LaminationBudget::default()).unwrap().system
    }

    #[test]
    fn wedge_example_is_carried_by_ab() {
        let s = support(&[&[1, 2], &[1], &[3, 1]]);
        assert_eq!(s.factor_ranks(), vec![2]);
        let ab = FreeFactorSystem::new(3, vec![vec![0, 1]], Automorphism::identity(3));
        assert!(s.equivalent(&ab));
    }

    #[test]
    fn rank_two_golden() {
        let s = support(&[&[1, 2], &[1]]);
        assert!(s.is_whole_group());
    }

    #[test]
    fn punctured_torus_lamination_fills() {
        let s = support(&[&[1, 2], &[3, 1, 2, 2, 1, 2], &[3]]);
        assert!(s.is_whole_group());
    }

    #[test]
    fn cyclic_rotation_lamination_fills() {
        let s = support(&[&[2], &[3], &[1, 2]]);
        assert!(s.is_whole_group());
    }

    #[test]
    fn no_eg_stratum() {
        let f = GraphMap::rose(&Automorphism::from_ints(&[&[1], &[2, 1], &[3, 2]]));
        assert_eq!(lamination_support(&f, &LaminationBudget::default()).unwrap_err(), CoreError::NoEgStratum);
    }

    #[test]
    fn equivariant_under_conjugation() {
        // the support of the conjugated map, read in the new basis, is the transported support
        let phi = Automorphism::from_ints(&[&[1, 2], &[1], &[3, 1]]);
        let base = support(&[&[1, 2], &[1], &[3, 1]]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        for _ in 0..60 {
            let chi = elementary::random_word(3, rng.gen_range(1..=3), |n| rng.gen_range(0..n));
            let psi = phi.conjugate_by(&chi).inner_normalize().0;
            let f = GraphMap::rose(&psi);
            if !validate_rtt(&f).unwrap().valid {
                continue;
            }
            let Ok(s) = lamination_support(&f, &LaminationBudget::default()) else { continue };
            assert!(s.system.equivalent(&base.transport(&chi)), "{chi:?}");
            checked += 1;
        }
        assert!(checked >= 10, "{checked}");
    }
}
