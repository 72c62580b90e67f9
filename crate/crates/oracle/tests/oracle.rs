use fairrank::mallows::{log_normalization_constant, normalization_constant};
use fairrank::rankers::{approx_multi_valued_ipf, exact_fair_dcg, NoPerturbation};
use fairrank::rng::rng_from_seed;
use fairrank::{CandidateSet, FairnessSpec, GroupAssignment, MallowsParams, Ranking, RankingTask};
use fairrank_oracle::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn groups_of(membership: &[usize], g: usize) -> GroupAssignment {
    GroupAssignment::new("grp", (0..g).map(|p| format!("g{p}")).collect(), membership.to_vec()).unwrap()
}

fn random_instance(n: usize, g: usize, seed: u64) -> (CandidateSet, GroupAssignment, FairnessSpec) {
    let mut rng = rng_from_seed(seed);
    let scores: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let membership: Vec<usize> = (0..n).map(|i| if i < g { i } else { rng.random_range(0..g) }).collect();
    let groups = groups_of(&membership, g);
    let spec = FairnessSpec::proportional(&groups, 1).unwrap();
    (CandidateSet::from_scores(&scores).unwrap(), groups, spec)
}

#[test]
fn two_singletons_both_orders_fair() {
    let set = CandidateSet::from_scores(&[1.0, 0.5]).unwrap();
    let groups = groups_of(&[0, 1], 2);
    let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 1).unwrap();
    let fair = enumerate_fair_rankings(&set, &groups, &spec, EnumerationBudget::default()).unwrap();
    let orders: Vec<&[usize]> = fair.iter().map(Ranking::order).collect();
    assert_eq!(orders, [&[0, 1][..], &[1, 0][..]]);
}

#[test]
fn vacuous_constraints_admit_everything() {
    let (set, groups, _) = random_instance(6, 3, 1);
    let spec = FairnessSpec::unconstrained(3);
    let fair = enumerate_fair_rankings(&set, &groups, &spec, EnumerationBudget::default()).unwrap();
    assert_eq!(fair.len(), 720);
    assert_eq!(count_fair_rankings(&groups, &spec), 720);
}

#[test]
fn enumeration_matches_recursive_counter() {
    // three and three: every even prefix balanced, odd prefixes off by one
    let set = CandidateSet::from_scores(&[6.0, 5.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
    let groups = groups_of(&[0, 0, 0, 1, 1, 1], 2);
    let spec = FairnessSpec::new(vec![0.5, 0.5], vec![0.5, 0.5], 1).unwrap();
    let fair = enumerate_fair_rankings(&set, &groups, &spec, EnumerationBudget::default()).unwrap();
    // each consecutive pair is AB or BA: 2^3 sequences, 3! * 3! member orders
    assert_eq!(fair.len(), 288);
    assert_eq!(count_fair_rankings(&groups, &spec), 288);
    for seed in 0..40 {
        let n = 4 + seed as usize % 5;
        let (set, groups, spec) = random_instance(n, 2 + seed as usize % 2, seed);
        let spec = spec.with_k(1 + seed as usize % 3).unwrap();
        let listed = enumerate_fair_rankings(&set, &groups, &spec, EnumerationBudget::default()).unwrap();
        assert_eq!(listed.len() as u128, count_fair_rankings(&groups, &spec), "seed {seed}");
    }
}

#[test]
fn budget_is_enforced() {
    let (set, groups, spec) = random_instance(9, 2, 3);
    assert!(matches!(
        enumerate_fair_rankings(&set, &groups, &spec, EnumerationBudget::default()),
        Err(OracleError::BudgetExceeded { .. })
    ));
    let (set, groups, spec) = random_instance(6, 4, 3);
    assert!(matches!(
        brute_force_optimum(&set, &groups, &spec, &Objective::MaxDcg, EnumerationBudget::default()),
        Err(OracleError::BudgetExceeded { .. })
    ));
    let params = MallowsParams::new(Ranking::identity(7), 1.0).unwrap();
    assert!(exact_mallows_distribution(&params, EnumerationBudget::default()).is_err());
}

#[test]
fn mallows_pmf_by_enumeration() {
    for theta in [0.0, 0.3, 1.0, 2.5] {
        let params = MallowsParams::new(Ranking::new(vec![2, 0, 3, 1, 4]).unwrap(), theta).unwrap();
        let dist = exact_mallows_distribution(&params, EnumerationBudget::default()).unwrap();
        assert_eq!(dist.len(), 120);
        let total: f64 = dist.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let center_p = dist[params.center()];
        assert!(dist.values().all(|&p| p <= center_p + 1e-15));
    }
    let theta = 0.7;
    let dist = exact_mallows_distribution(
        &MallowsParams::new(Ranking::identity(2), theta).unwrap(),
        EnumerationBudget::default(),
    )
    .unwrap();
    let expected = 1.0 / (1.0 + (-theta as f64).exp());
    assert!((dist[&Ranking::identity(2)] - expected).abs() < 1e-15);
    let uniform = exact_mallows_distribution(
        &MallowsParams::new(Ranking::identity(4), 0.0).unwrap(),
        EnumerationBudget::default(),
    )
    .unwrap();
    assert!(uniform.values().all(|&p| (p - 1.0 / 24.0).abs() < 1e-15));
}

#[test]
fn normalization_matches_closed_form() {
    for k in 1..=8 {
        for theta in [0.0, 0.1, 1.0, 3.0] {
            let z = enumerated_normalization_constant(k, theta, EnumerationBudget::default()).unwrap();
            assert!((normalization_constant(k, theta) - z).abs() / z < 1e-12, "k={k} theta={theta}");
            assert!((log_normalization_constant(k, theta) - z.ln()).abs() < 1e-12);
        }
    }
}

#[test]
fn unconstrained_optimum_is_score_order() {
    let (set, groups, _) = random_instance(7, 3, 4);
    let spec = FairnessSpec::unconstrained(3);
    let opt = brute_force_optimum(&set, &groups, &spec, &Objective::MaxDcg, EnumerationBudget::default()).unwrap();
    assert_eq!(opt.ranking, fairrank::ranking_from_scores(&set));
}

#[test]
fn exact_fair_dcg_agrees_with_brute_force() {
    for seed in 0..100 {
        let g = 2 + seed as usize % 2;
        let (set, groups, spec) = random_instance(8, g, 100 + seed);
        let task = RankingTask::new(&set, &groups, &spec).unwrap();
        let oracle = brute_force_optimum(&set, &groups, &spec, &Objective::MaxDcg, EnumerationBudget::default());
        match (exact_fair_dcg(&task), oracle) {
            (Ok(out), Ok(opt)) => {
                let got = out.diagnostic("dcg").unwrap();
                assert!((got - opt.value).abs() < 1e-9, "seed {seed}: {got} vs {}", opt.value);
            }
            (Err(e), Err(OracleError::EmptyFeasibleSet)) => assert!(e.is_infeasibility()),
            (a, b) => panic!("seed {seed}: {a:?} vs {b:?}"),
        }
    }
}

#[test]
fn ipf_attains_the_order_preserving_footrule_optimum() {
    let mut rng = rng_from_seed(77);
    for seed in 0..60 {
        let n = 4 + seed as usize % 5;
        let g = 2 + seed as usize % 2;
        let (set, groups, spec) = random_instance(n, g, 300 + seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let input = Ranking::new(order).unwrap();
        let task = RankingTask::new(&set, &groups, &spec).unwrap().with_input(input.clone()).unwrap();
        let budget = EnumerationBudget::default();
        let preserving = brute_force_optimum(
            &set,
            &groups,
            &spec,
            &Objective::MinFootruleOrderPreserving(input.clone()),
            budget,
        );
        let free = brute_force_optimum(&set, &groups, &spec, &Objective::MinFootrule(input.clone()), budget);
        match (approx_multi_valued_ipf(&task, &NoPerturbation), preserving, free) {
            (Ok(out), Ok(p), Ok(f)) => {
                let got = fairrank::metrics::footrule_distance(&out.ranking, &input).unwrap() as f64;
                assert_eq!(got, p.value, "seed {seed}");
                assert!(f.value <= got);
            }
            (Err(e), Err(_), Err(_)) => assert!(e.is_infeasibility()),
            (a, b, c) => panic!("seed {seed}: {a:?} {b:?} {c:?}"),
        }
    }
}

#[test]
fn optimum_value_ignores_candidate_order() {
    let (set, groups, spec) = random_instance(7, 2, 55);
    let opt = brute_force_optimum(&set, &groups, &spec, &Objective::MaxDcg, EnumerationBudget::default()).unwrap();
    let perm: Vec<usize> = (0..7).rev().collect();
    let set2 = set.subset(&perm).unwrap();
    let groups2 = groups.subset(&perm).unwrap();
    let opt2 = brute_force_optimum(&set2, &groups2, &spec, &Objective::MaxDcg, EnumerationBudget::default()).unwrap();
    assert!((opt.value - opt2.value).abs() < 1e-12);
}
