//! Entity-voting split assignment.
//!
//! Every (instance, entity) pair holds a vote for a split. Rounds alternate
//! two repairs: unification sets all votes of an instance to the vote of one
//! random member, and membership repair gives every entity a vote in each
//! split it misses by flipping one of its votes away from its most frequent
//! split. During the final `conflict_iters` rounds unification sends any
//! instance with conflicting votes to train instead. A missing train vote is
//! always repaired, while valid/test are only repaired from a split holding
//! at least two votes, so the final conflict resolution leaves every entity
//! with a training instance.

use std::collections::HashMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::InstanceRecord;
use crate::dataset::Split;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct VoteSplitConfig {
    pub ratios: [f64; 3],
    pub unify_iters: usize,
    pub conflict_iters: usize,
    pub seed: u64,
}

impl Default for VoteSplitConfig {
    fn default() -> Self {
        Self { ratios: [0.6, 0.2, 0.2], unify_iters: 50, conflict_iters: 20, seed: 42 }
    }
}

/// Entity coverage after splitting. Entities absent from train should not
/// occur; entities confined to one non-train split are the tolerated residue.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub entities: usize,
    pub in_train: usize,
    pub in_all_splits: usize,
    pub missing_from_train: usize,
    pub only_valid: usize,
    pub only_test: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitAssignment {
    /// Split of each instance, in input order.
    pub splits: Vec<Split>,
    /// Entity labels with their membership in train, valid and test.
    pub membership: Vec<(String, [bool; 3])>,
}

impl SplitAssignment {
    pub fn coverage(&self) -> CoverageReport {
        let mut r = CoverageReport { entities: self.membership.len(), ..Default::default() };
        for (_, m) in &self.membership {
            r.in_train += m[0] as usize;
            r.in_all_splits += m.iter().all(|x| *x) as usize;
            r.missing_from_train += !m[0] as usize;
            r.only_valid += (*m == [false, true, false]) as usize;
            r.only_test += (*m == [false, false, true]) as usize;
        }
        r
    }

    pub fn counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for s in &self.splits {
            c[s.index()] += 1;
        }
        c
    }

    /// Partitions instances in input order.
    pub fn apply<T: Clone>(&self, instances: &[T]) -> [Vec<T>; 3] {
        let mut out: [Vec<T>; 3] = Default::default();
        for (inst, s) in instances.iter().zip(&self.splits) {
            out[s.index()].push(inst.clone());
        }
        out
    }
}

struct Votes {
    votes: Vec<Vec<Split>>,
    occurrences: Vec<Vec<(usize, usize)>>,
}

impl Votes {
    fn unify(&mut self, rng: &mut ChaCha8Rng, conflicts_to_train: bool) {
        for v in &mut self.votes {
            let Some(&first) = v.first() else { continue };
            if v.iter().all(|s| *s == first) {
                continue;
            }
            let target = if conflicts_to_train { Split::Train } else { *v.choose(rng).expect("non-empty") };
            v.fill(target);
        }
    }

    fn entity_counts(&self, e: usize) -> [usize; 3] {
        let mut c = [0; 3];
        for &(i, k) in &self.occurrences[e] {
            c[self.votes[i][k].index()] += 1;
        }
        c
    }

    fn repair(&mut self) {
        for e in 0..self.occurrences.len() {
            for missing in Split::ALL {
                let counts = self.entity_counts(e);
                if counts[missing.index()] > 0 {
                    continue;
                }
                // Ties go to the earlier split in train, valid, test order.
                let donor = Split::ALL.into_iter().rev().max_by_key(|s| counts[s.index()]).expect("three splits");
                if missing != Split::Train && counts[donor.index()] < 2 {
                    continue;
                }
                let &(i, k) = self.occurrences[e]
                    .iter()
                    .find(|(i, k)| self.votes[*i][*k] == donor)
                    .expect("donor split holds a vote");
                self.votes[i][k] = missing;
            }
        }
    }
}

/// Assigns every instance to a split so that all entities occur in train.
pub fn vote_split(instances: &[InstanceRecord], config: &VoteSplitConfig) -> Result<SplitAssignment> {
    let total: f64 = config.ratios.iter().sum();
    if (total - 1.0).abs() > 1e-6 || config.ratios.iter().any(|r| *r < 0.0) {
        return Err(CoreError::Config(format!("split ratios {:?} must be non-negative and sum to 1", config.ratios)));
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut labels: Vec<&str> = Vec::new();
    let members: Vec<Vec<usize>> = instances
        .iter()
        .map(|inst| {
            inst.entities()
                .into_iter()
                .map(|e| {
                    *index.entry(e).or_insert_with(|| {
                        labels.push(e);
                        labels.len() - 1
                    })
                })
                .collect()
        })
        .collect();
    let mut occurrences = vec![Vec::new(); labels.len()];
    for (i, m) in members.iter().enumerate() {
        for (k, &e) in m.iter().enumerate() {
            occurrences[e].push((i, k));
        }
    }

    let n = instances.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let splits = if n <= 1 {
        log::warn!("vote split of {n} instance(s): everything goes to train");
        vec![Split::Train; n]
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let n_train = (config.ratios[0] * n as f64).round() as usize;
        let n_valid = ((config.ratios[1] * n as f64).round() as usize).min(n - n_train.min(n));
        let mut initial = vec![Split::Test; n];
        for (rank, &i) in order.iter().enumerate() {
            initial[i] = if rank < n_train {
                Split::Train
            } else if rank < n_train + n_valid {
                Split::Valid
            } else {
                Split::Test
            };
        }
        let votes = members.iter().zip(&initial).map(|(m, s)| vec![*s; m.len()]).collect();
        let mut state = Votes { votes, occurrences };
        for round in 0..config.unify_iters + config.conflict_iters {
            state.unify(&mut rng, round >= config.unify_iters);
            state.repair();
        }
        state
            .votes
            .iter()
            .zip(&initial)
            .map(|(v, init)| match v.first() {
                None => *init,
                Some(&first) if v.iter().all(|s| *s == first) => first,
                Some(_) => Split::Train,
            })
            .collect()
    };

    let mut membership: Vec<(String, [bool; 3])> = labels.iter().map(|l| (l.to_string(), [false; 3])).collect();
    for (inst, s) in instances.iter().zip(&splits) {
        for e in inst.entities() {
            membership[index[e]].1[s.index()] = true;
        }
    }
    let assignment = SplitAssignment { splits, membership };
    let cov = assignment.coverage();
    log::info!(
        "vote split {:?}: {} entities, {} missing from train, {} only in valid, {} only in test",
        assignment.counts(),
        cov.entities,
        cov.missing_from_train,
        cov.only_valid,
        cov.only_test
    );
    Ok(assignment)
}
