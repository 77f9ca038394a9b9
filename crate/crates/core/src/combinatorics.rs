//! Set systems with bounded t-wise intersections and the bound
//! Σ|S_i| ≤ m + N√(m(t−1)).

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystem {
    pub ground_size: usize,
    pub subsets: Vec<BTreeSet<usize>>,
    pub t: usize,
}

impl SetSystem {
    pub fn new(ground_size: usize, subsets: Vec<BTreeSet<usize>>, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidInput("t must be at least 1".into()));
        }
        if let Some(x) = subsets.iter().flatten().find(|&&x| x >= ground_size) {
            return Err(Error::InvalidInput(format!("element {x} outside ground set of size {ground_size}")));
        }
        Ok(Self { ground_size, subsets, t })
    }

    pub fn m(&self) -> usize {
        self.subsets.len()
    }

    pub fn total_size(&self) -> u64 {
        self.subsets.iter().map(|s| s.len() as u64).sum()
    }

    pub fn without(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.subsets.remove(i);
        s
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let s: SetSystem = serde_json::from_value(v.clone())?;
        Self::new(s.ground_size, s.subsets, s.t)
    }
}

/// m + N√(m(t−1)).
pub fn extremal_bound(m: u64, n: u64, t: u64) -> f64 {
    m as f64 + n as f64 * ((m * t.saturating_sub(1)) as f64).sqrt()
}

/// E ≤ m + N√(m(t−1)), decided in integers: E ≤ m or (E−m)² ≤ N²m(t−1).
pub fn within_extremal_bound(e: u64, m: u64, n: u64, t: u64) -> bool {
    if e <= m {
        return true;
    }
    let d = (e - m) as u128;
    d * d <= (n as u128).pow(2) * m as u128 * t.saturating_sub(1) as u128
}

fn choose2(n: u64) -> u128 {
    n as u128 * n.saturating_sub(1) as u128 / 2
}

/// Every t distinct subsets meet in at most one element, by enumerating t-subsets.
pub fn check_hypothesis_enumerate(sys: &SetSystem) -> bool {
    fn rec(sys: &SetSystem, start: usize, depth: usize, acc: &BTreeSet<usize>) -> bool {
        if depth == sys.t {
            return acc.len() <= 1;
        }
        if acc.len() <= 1 {
            // Intersections only shrink.
            return true;
        }
        (start..sys.m()).all(|i| {
            let next: BTreeSet<usize> = acc.intersection(&sys.subsets[i]).copied().collect();
            rec(sys, i + 1, depth + 1, &next)
        })
    }
    (0..sys.m()).all(|i| rec(sys, i + 1, 1, &sys.subsets[i]))
}

/// Every pair of ground elements lies in at most t−1 subsets.
pub fn check_hypothesis_pairs(sys: &SetSystem) -> bool {
    let mut deg: HashMap<(usize, usize), usize> = HashMap::new();
    for s in &sys.subsets {
        let v: Vec<usize> = s.iter().copied().collect();
        for (i, &x) in v.iter().enumerate() {
            for &y in &v[i + 1..] {
                let d = deg.entry((x, y)).or_insert(0);
                *d += 1;
                if *d > sys.t - 1 {
                    return false;
                }
            }
        }
    }
    true
}

pub fn check_hypothesis(sys: &SetSystem) -> bool {
    check_hypothesis_pairs(sys)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum LemmaOutcome {
    HypothesisFails,
    BoundHolds {
        total: u64,
        bound: String,
        pair_incidences: u128,
        pair_capacity: u128,
    },
    Counterexample {
        total: u64,
        reason: String,
    },
}

/// Checks Σ|S_i| ≤ m + N√(m(t−1)) and the double count
/// Σ C(|S_i|,2) ≤ (t−1)C(N,2) whenever the hypothesis holds.
pub fn check_lemma(sys: &SetSystem) -> LemmaOutcome {
    if !check_hypothesis(sys) {
        return LemmaOutcome::HypothesisFails;
    }
    let (m, n, t) = (sys.m() as u64, sys.ground_size as u64, sys.t as u64);
    let total = sys.total_size();
    let pair_incidences: u128 = sys.subsets.iter().map(|s| choose2(s.len() as u64)).sum();
    let pair_capacity = (t - 1) as u128 * choose2(n);
    if pair_incidences > pair_capacity {
        return LemmaOutcome::Counterexample { total, reason: format!("double count {pair_incidences} > {pair_capacity}") };
    }
    if !within_extremal_bound(total, m, n, t) {
        return LemmaOutcome::Counterexample { total, reason: format!("sum {total} exceeds m + N sqrt(m(t-1))") };
    }
    LemmaOutcome::BoundHolds { total, bound: format!("{:.6}", extremal_bound(m, n, t)), pair_incidences, pair_capacity }
}

/// Pigeonhole: subsets of size ≥ 2 meeting pairwise in ≤ 1 element number at most C(N,2).
/// Returns `None` when the premise does not hold.
pub fn pigeonhole_check(sys: &SetSystem) -> Option<bool> {
    if sys.subsets.iter().any(|s| s.len() < 2) {
        return None;
    }
    let pairwise = SetSystem { t: 2, ..sys.clone() };
    if !check_hypothesis_pairs(&pairwise) {
        return None;
    }
    Some(sys.m() as u128 <= choose2(sys.ground_size as u64))
}

/// Parameters for random systems.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomParams {
    pub max_ground: usize,
    pub max_subsets: usize,
    pub max_t: usize,
    pub density: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        Self { max_ground: 30, max_subsets: 20, max_t: 4, density: 0.3 }
    }
}

/// Independent random subsets; the hypothesis may or may not hold.
pub fn random_system(rng: &mut impl Rng, p: &RandomParams) -> SetSystem {
    let n = rng.gen_range(1..=p.max_ground);
    let m = rng.gen_range(0..=p.max_subsets);
    let t = rng.gen_range(1..=p.max_t);
    let subsets = (0..m).map(|_| (0..n).filter(|_| rng.gen_bool(p.density)).collect()).collect();
    SetSystem { ground_size: n, subsets, t }
}

/// Random subsets grown greedily so that no pair exceeds degree t−1.
pub fn random_hypothesis_system(rng: &mut impl Rng, p: &RandomParams) -> SetSystem {
    let n = rng.gen_range(1..=p.max_ground);
    let m = rng.gen_range(0..=p.max_subsets);
    let t = rng.gen_range(1..=p.max_t);
    let mut deg: HashMap<(usize, usize), usize> = HashMap::new();
    let mut subsets = Vec::with_capacity(m);
    for _ in 0..m {
        let mut s: Vec<usize> = Vec::new();
        for x in 0..n {
            if !rng.gen_bool(p.density) {
                continue;
            }
            if s.iter().all(|&y| deg.get(&(y, x)).copied().unwrap_or(0) < t - 1) {
                for &y in &s {
                    *deg.entry((y, x)).or_insert(0) += 1;
                }
                s.push(x);
            }
        }
        subsets.push(s.into_iter().collect());
    }
    SetSystem { ground_size: n, subsets, t }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TrialSummary {
    pub trials: u64,
    pub hypothesis_true: u64,
    pub bound_holds: u64,
    pub counterexamples: u64,
    pub criteria_disagree: u64,
}

/// Runs `trials` seeded systems, half unconstrained and half built to satisfy the hypothesis.
pub fn run_trials(seed: u64, trials: u64, params: &RandomParams) -> TrialSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TrialSummary { trials, ..Default::default() };
    for i in 0..trials {
        let sys = if i % 2 == 0 { random_system(&mut rng, params) } else { random_hypothesis_system(&mut rng, params) };
        if sys.m() <= 12 && check_hypothesis_enumerate(&sys) != check_hypothesis_pairs(&sys) {
            out.criteria_disagree += 1;
        }
        match check_lemma(&sys) {
            LemmaOutcome::HypothesisFails => {}
            LemmaOutcome::BoundHolds { .. } => {
                out.hypothesis_true += 1;
                out.bound_holds += 1;
            }
            LemmaOutcome::Counterexample { .. } => {
                out.hypothesis_true += 1;
                out.counterexamples += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(n: usize, sets: &[&[usize]], t: usize) -> SetSystem {
        SetSystem::new(n, sets.iter().map(|s| s.iter().copied().collect()).collect(), t).unwrap()
    }

    #[test]
    fn bound_values() {
        assert_eq!(extremal_bound(5, 10, 1), 5.0);
        assert!((extremal_bound(3, 4, 2) - (3.0 + 4.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!((extremal_bound(1, 7, 5) - 15.0).abs() < 1e-12);
        // 3 + 4√3 ≈ 9.93
        assert!(within_extremal_bound(9, 3, 4, 2));
        assert!(!within_extremal_bound(10, 3, 4, 2));
        // 1 + 2√4 = 5 exactly.
        assert!(within_extremal_bound(5, 1, 2, 5));
        assert!(!within_extremal_bound(6, 1, 2, 5));
    }

    #[test]
    fn hypothesis_examples() {
        let disjoint = sys(6, &[&[0, 1], &[2, 3], &[4, 5]], 2);
        assert!(check_hypothesis_enumerate(&disjoint) && check_hypothesis_pairs(&disjoint));
        for t in 1..5 {
            let copies = sys(4, &vec![&[1usize, 2][..]; t], t);
            assert!(!check_hypothesis_enumerate(&copies));
            assert!(!check_hypothesis_pairs(&copies));
        }
        assert!(SetSystem::new(3, vec![BTreeSet::from([3])], 2).is_err());
        assert!(SetSystem::new(3, vec![], 0).is_err());
    }

    #[test]
    fn criteria_agree_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = RandomParams::default();
        let mut both = [0u32; 2];
        for i in 0..1000 {
            let s = if i % 2 == 0 { random_system(&mut rng, &p) } else { random_hypothesis_system(&mut rng, &p) };
            let e = check_hypothesis_enumerate(&s);
            assert_eq!(e, check_hypothesis_pairs(&s), "{s:?}");
            both[e as usize] += 1;
        }
        assert!(both[0] > 50 && both[1] > 50, "{both:?}");
    }

    #[test]
    fn lemma_examples() {
        let empty = sys(5, &[], 3);
        assert!(matches!(check_lemma(&empty), LemmaOutcome::BoundHolds { total: 0, .. }));
        let copies = sys(4, &[&[1, 2], &[1, 2]], 2);
        assert_eq!(check_lemma(&copies), LemmaOutcome::HypothesisFails);
        // Lines of the Fano plane: 7 subsets of size 3, pairwise meeting in one point.
        let fano = sys(7, &[&[0, 1, 2], &[0, 3, 4], &[0, 5, 6], &[1, 3, 5], &[1, 4, 6], &[2, 3, 6], &[2, 4, 5]], 2);
        match check_lemma(&fano) {
            LemmaOutcome::BoundHolds { total, pair_incidences, pair_capacity, .. } => {
                assert_eq!(total, 21);
                assert_eq!(pair_incidences, 21);
                assert_eq!(pair_capacity, 21);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(pigeonhole_check(&fano), Some(true));
        assert_eq!(pigeonhole_check(&sys(3, &[&[0]], 2)), None);
    }

    #[test]
    fn random_trials_never_find_counterexamples() {
        let s = run_trials(5, 20_000, &RandomParams::default());
        assert_eq!(s.counterexamples, 0);
        assert_eq!(s.criteria_disagree, 0);
        assert!(s.hypothesis_true > 10_000 / 2);
        assert_eq!(run_trials(5, 200, &RandomParams::default()), run_trials(5, 200, &RandomParams::default()));
    }

    #[test]
    fn json_round_trip() {
        let s = sys(4, &[&[0, 3], &[1]], 2);
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(SetSystem::from_json(&v).unwrap(), s);
        assert!(SetSystem::from_json(&serde_json::json!({"ground_size": 2, "subsets": [[5]], "t": 2})).is_err());
    }

    proptest::proptest! {
        #[test]
        fn hypothesis_is_monotone(seed in 0u64..5000, drop in 0usize..20) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_system(&mut rng, &RandomParams::default());
            if s.m() > 0 && check_hypothesis(&s) {
                proptest::prop_assert!(check_hypothesis(&s.without(drop % s.m())));
            }
        }

        #[test]
        fn greedy_systems_satisfy_lemma(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_hypothesis_system(&mut rng, &RandomParams { density: 0.6, ..Default::default() });
            proptest::prop_assert!(check_hypothesis_enumerate(&s) || s.m() > 12);
            let holds = matches!(check_lemma(&s), LemmaOutcome::BoundHolds { .. });
            proptest::prop_assert!(holds);
        }
    }
}
