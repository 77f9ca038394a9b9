use super::*;
use std::collections::BTreeSet;

#[test]
fn counts_ratio_matches_exact_ratio() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        let h = FamilyHandle::kloosterman(1, 3);
        let base = h.counts(1, p).unwrap();
        for t in 1..p as i64 {
            let other = h.counts(t, p).unwrap();
            let exact = base.to_exact().unwrap().rational_ratio(&other.to_exact().unwrap()).unwrap();
            let fast = prime_counts_ratio(&base, &other).unwrap();
            assert_eq!(fast.is_some(), exact.is_some(), "p={p} t={t}");
            if let (Some((n, d)), Some(q)) = (fast, exact) {
                assert_eq!(BigRational::new(n.into(), d.into()), q);
            }
        }
    }
    let zero = RootSum::from_counts(5, vec![1; 5]).unwrap();
    assert!(prime_counts_zero(&zero));
    assert_eq!(prime_counts_ratio(&zero, &zero), None);
}

#[test]
fn t_multiplicative_families() {
    assert!(check_t_multiplicative(&FamilyHandle::kloosterman(1, 1), 200).unwrap().passed);
    assert!(check_t_multiplicative(&FamilyHandle::kloosterman(2, 3), 120).unwrap().passed);
    for range in [Range::Unit, Range::Full] {
        assert!(check_t_multiplicative(&FamilyHandle::birch(1, 1, range), 100).unwrap().passed);
    }
    assert!(check_t_multiplicative(&FamilyHandle::salie(1, 2), 100).unwrap().passed);
    let bad = check_t_multiplicative(&FamilyHandle::corrupted_kloosterman(1, 1), 60).unwrap();
    assert!(!bad.passed);
    let w = bad.first_witness().unwrap();
    assert!(w.m.is_some());
    assert!(check_t_multiplicative(&FamilyHandle::kloosterman(1, 1), 1).is_err());
}

#[test]
fn nonvanishing_examples() {
    assert!(check_nonvanishing(&FamilyHandle::kloosterman(1, 1), 200, None).unwrap().passed);
    let salie = check_nonvanishing(&FamilyHandle::salie(1, 2), 5, None).unwrap();
    assert!(!salie.passed);
    assert!(salie.witnesses.iter().any(|w| w.modulus == 5 && w.t == 1));
    assert!(check_nonvanishing(&FamilyHandle::salie(1, 1), 200, None).unwrap().passed);
}

#[test]
fn irrational_examples() {
    let kl = check_irrational(&FamilyHandle::kloosterman(1, 1), 100, None).unwrap();
    assert!(kl.passed && kl.converse_witnesses.is_empty());
    assert!(kl.checked > 1000);
    let birch = check_irrational(&FamilyHandle::birch(1, 1, Range::Unit), 60, None).unwrap();
    assert!(birch.passed && birch.converse_witnesses.is_empty());
    let g = salie_good_primes(1, 1).unwrap();
    let salie = check_irrational(&FamilyHandle::salie(1, 1), 60, Some(&g)).unwrap();
    assert!(salie.passed && salie.converse_witnesses.is_empty());
}

#[test]
fn kloosterman_is_kloostermanian() {
    for (a, b) in [(1, 1), (1, 2), (2, 3)] {
        let r = check_class(&FamilyHandle::kloosterman(a, b), 200, 120, None).unwrap();
        assert!(r.passed, "{a} {b}");
    }
}

#[test]
fn birch_condition_clauses() {
    let t = birch_condition(1, 2);
    assert!(!t.holds);
    let failing: Vec<_> = t.clauses.iter().filter(|c| !c.holds).collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0].prime, Some(2));
    assert!(!birch_condition(0, 1).holds);
    // 3 ∤ 1+1: the p = 3 clause fails.
    let t = birch_condition(1, 1);
    assert!(!t.holds);
    assert_eq!(t.clauses.iter().find(|c| !c.holds).unwrap().prime, Some(3));
    assert!(birch_condition(1, 2 * 4).clauses.iter().any(|c| !c.holds && c.prime == Some(2)));
    assert!(birch_condition(2, 4).holds);
    assert!(birch_condition(1, -1).holds);
}

#[test]
fn birch_condition_matches_full_range_vanishing() {
    for a in -6i64..=6 {
        for b in -6i64..=6 {
            if a == 0 {
                continue;
            }
            let scan = check_nonvanishing(&FamilyHandle::birch(a, b, Range::Full), 100, None).unwrap();
            assert_eq!(birch_condition(a, b).holds, scan.passed, "a={a} b={b}");
        }
    }
    // The unit-range sum does not vanish at p = 3 for (1, 1) or at p = 2 for (1, 2).
    assert!(check_nonvanishing(&FamilyHandle::birch(1, 1, Range::Unit), 100, None).unwrap().passed);
    assert!(check_nonvanishing(&FamilyHandle::birch(1, 2, Range::Unit), 100, None).unwrap().passed);
    let full = check_nonvanishing(&FamilyHandle::birch(1, 2, Range::Full), 100, None).unwrap();
    assert_eq!(full.first_witness().unwrap().modulus, 2);
}

#[test]
fn good_prime_sets() {
    let g = birch_good_primes(1, 1).unwrap();
    assert!(!g.contains(3) && g.contains(5) && g.contains(2));
    let g = birch_good_primes(1, 2).unwrap();
    assert!(!g.contains(2) && g.contains(3));
    let g = birch_good_primes(6, 35).unwrap();
    // 2 | a, 2 ∤ b; 5 ≡ 2 mod 3 divides b but not a; 7 ≡ 1 mod 3 is fine.
    assert_eq!(g.excluded(20), vec![2, 3, 5]);
    assert!(birch_good_primes(0, 1).is_err());
    assert!(salie_condition(2, 8));
    assert!(!salie_condition(1, 2));
    assert!(!salie_condition(1, 0));
    assert!(!salie_condition(-1, -1) || (-1i64 * -1) == 1);
    assert!(!salie_condition(-1, 4));
    let s = salie_good_primes(1, 2).unwrap();
    assert!(!s.contains(5) && s.contains(7) && !s.contains(3));
    assert!(salie_good_primes(1, 0).is_err());
}

fn odd_common_primes(a: i64, b: i64) -> Vec<u64> {
    factor(gcd(a.unsigned_abs(), b.unsigned_abs())).into_iter().map(|(p, _)| p).filter(|p| p % 2 == 1).collect()
}

#[test]
fn good_set_soundness_unit_range() {
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            if a * b == 0 {
                continue;
            }
            let h = FamilyHandle::birch(a, b, Range::Unit);
            let g = birch_good_primes(a, b).unwrap();
            assert!(check_nonvanishing(&h, 60, Some(&g)).unwrap().passed, "{a} {b}");
            assert!(check_irrational(&h, 60, Some(&g)).unwrap().passed, "{a} {b}");
        }
    }
}

#[test]
fn salie_good_set_fails_only_at_common_primes() {
    // S̃(a,b;p) = Σ (x/p) = 0 when p divides both a and b, although (ab/p) = 0.
    for a in -6i64..=6 {
        for b in -6i64..=6 {
            if a * b == 0 {
                continue;
            }
            let s = FamilyHandle::salie(a, b);
            let gs = salie_good_primes(a, b).unwrap();
            let nv = check_nonvanishing(&s, 60, Some(&gs)).unwrap();
            let failing: BTreeSet<u64> = nv.witnesses.iter().map(|w| w.modulus).collect();
            assert_eq!(failing.into_iter().collect::<Vec<_>>(), odd_common_primes(a, b), "{a} {b}");
            assert!(check_irrational(&s, 60, Some(&gs)).unwrap().passed, "{a} {b}");
        }
    }
}

#[test]
fn full_range_good_set_breaks_at_five() {
    let h = FamilyHandle::birch(1, 2, Range::Full);
    let g = birch_good_primes(1, 2).unwrap();
    let v = check_irrational(&h, 60, Some(&g)).unwrap();
    assert!(!v.passed);
    assert_eq!(v.first_witness().unwrap().modulus, 5);
}

#[test]
fn salie_classification() {
    for a in -5i64..=5 {
        for b in -5i64..=5 {
            if a * b == 0 {
                continue;
            }
            let bad = salie_bad_primes(a, b, 200).unwrap();
            assert_eq!(salie_condition(a, b), bad.is_empty(), "{a} {b}");
            let vanishing = salie_vanishing_primes(a, b, 200).unwrap();
            for p in primes_up_to(200).into_iter().skip(1) {
                let j = jacobi((a * b).rem_euclid(p as i64), p).unwrap();
                assert_eq!(bad.contains(&p), j == -1, "{a} {b} {p}");
                let common = odd_common_primes(a, b).contains(&p);
                assert_eq!(vanishing.contains(&p), j == -1 || common, "{a} {b} {p}");
            }
        }
    }
}

#[test]
fn salie_formula() {
    for p in primes_up_to(60).into_iter().skip(1) {
        for (a, b) in [(1, 1), (1, 2), (3, 5), (2, 8)] {
            let exact = salie_formula_exact(a, b, p).unwrap();
            let residue = jacobi((a * b).rem_euclid(p as i64), p).unwrap();
            assert_eq!(exact.is_some(), residue == 1);
            assert_ne!(exact, Some(false), "{a} {b} {p}");
        }
    }
    for p in primes_up_to(300).into_iter().skip(1) {
        if let Some(gap) = salie_formula_gap(1, 1, p).unwrap() {
            assert!(gap < 2f64.powi(-60), "{p} {gap}");
        }
    }
    assert!(salie_formula_counts(1, 1, 9).is_err());
}

#[test]
fn livne_normalized_congruence() {
    for p in primes_up_to(100).into_iter().filter(|&p| p >= 7) {
        for t in [1, 2] {
            let c = livne_congruence_check(1, 1, t, p).unwrap();
            assert_eq!(c.normalized, LivneStatus::Holds, "{p} {t}");
            assert_eq!(c.valuation, Some(c.l as i64));
            assert_eq!(c.unit_range_valuation, Some(0));
            let expected = if livne_literal_expected(1, 1, t, p) { LivneStatus::Holds } else { LivneStatus::Fails };
            assert_eq!(c.literal, expected, "{p} {t}");
        }
    }
    // l = 2 and 2! ≠ 1 mod 7.
    assert_eq!(livne_congruence_check(1, 1, 1, 7).unwrap().literal, LivneStatus::Fails);
    // p | b with p ≡ 1 mod 3 is covered; p ≡ 2 mod 3 with p | b is not.
    assert_eq!(livne_congruence_check(1, 7, 1, 7).unwrap().normalized, LivneStatus::Holds);
    assert_eq!(livne_congruence_check(1, 11, 1, 11).unwrap().normalized, LivneStatus::Inapplicable);
    assert_eq!(livne_congruence_check(1, 1, 5, 5).unwrap().literal, LivneStatus::Inapplicable);
}

#[test]
fn livne_other_pairs() {
    for (a, b) in [(2, 3), (5, 1), (-1, 4)] {
        for p in primes_up_to(60).into_iter().filter(|&p| p >= 7) {
            for t in 1..4 {
                let c = livne_congruence_check(a, b, t, p).unwrap();
                if c.normalized != LivneStatus::Inapplicable {
                    assert_eq!(c.normalized, LivneStatus::Holds, "{a} {b} {t} {p}");
                    assert_eq!(c.literal == LivneStatus::Holds, livne_literal_expected(a, b, t, p));
                }
            }
        }
    }
}

#[test]
fn probe_examples() {
    let x = IntPoly::monomial(1);
    let r = conjecture_probe(&x, &x, Range::Unit, Twist::None, 2, 30).unwrap();
    assert!(r.candidates.iter().all(|c| c.passed));
    assert_eq!(r.candidates.len(), 16);
    assert!(r.degree_warning.is_none());
    let sq = IntPoly::monomial(2);
    let r = conjecture_probe(&sq, &sq, Range::Full, Twist::Jacobi, 2, 30).unwrap();
    assert!(r.degree_warning.is_some());
    for c in r.candidates.iter().filter(|c| !is_perfect_square(c.a * c.b)) {
        assert!(!c.passed);
        assert!(c.failed_properties.contains(&"non-vanishing".to_string()));
        assert!(c.witness.is_some());
    }
    assert_eq!(r.label, "finite evidence, not proof");
}
