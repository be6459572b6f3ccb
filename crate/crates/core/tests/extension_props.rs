mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teamsolve_core::extension::{audit_counts, extend_ne, extend_ne_audited, ne_gap, vi_residual};
use teamsolve_core::generators::random_game;
use teamsolve_core::lp::zero_sum_value;
use teamsolve_core::MixedProfile;

fn simplex_point(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// With one team player the extension at the minimax strategy is a Nash
/// equilibrium of the matrix game.
#[test]
fn single_player_extension_at_minimax_is_exact() {
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ka, kb) = (rng.gen_range(2..=4), rng.gen_range(2..=4));
        let g = random_game(1, &[ka], kb, seed, (-1.0, 1.0)).unwrap();
        let values = g.payoff().dense_values().unwrap();
        let matrix: Vec<Vec<f64>> = (0..ka).map(|a| values[a * kb..(a + 1) * kb].to_vec()).collect();
        let (v, x, _) = zero_sum_value(&matrix).unwrap();
        let y = extend_ne(&g, &[x.clone()]).unwrap();
        let dists = vec![x.clone(), y.clone()];
        let (team, adv) = common::ne_gaps(values, g.payoff().dims(), 1, &dists);
        assert!(team.max(adv) <= 1e-6, "seed {seed}: gaps {team} {adv}");
        let u = common::expectation(values, g.payoff().dims(), &dists);
        assert!((u - v).abs() <= 1e-6, "seed {seed}: {u} vs {v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Audit relations at arbitrary team strategies: `u* >= u_opt`, strong
    /// duality, `u*` is the best-response value, and the adversary strategy
    /// is a distribution.
    #[test]
    fn audit_relations(seed in any::<u64>(), n in 1usize..=3, nb in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let g = random_game(n, &sizes, nb, seed, (-1.0, 1.0)).unwrap();
        let team: Vec<Vec<f64>> = sizes.iter().map(|&k| simplex_point(&mut rng, k)).collect();
        let a = extend_ne_audited(&g, &team).unwrap();
        prop_assert!(a.u_star >= a.u_opt.unwrap() - 1e-7);
        prop_assert!((a.primal_value - a.dual_value).abs() <= 1e-7);
        prop_assert!((a.weight - n as f64).abs() == 0.0);
        let mut dists = team.clone();
        let best = (0..nb).map(|b| {
            let mut d = dists.clone();
            d.push((0..nb).map(|c| if c == b { 1.0 } else { 0.0 }).collect());
            common::expectation(g.payoff().dense_values().unwrap(), g.payoff().dims(), &d)
        }).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((a.u_star - best).abs() <= 1e-9);
        prop_assert!(a.adversary.iter().all(|&p| p >= 0.0));
        prop_assert!((a.adversary.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        dists.push(a.adversary.clone());
        let profile = MixedProfile::new(team, a.adversary);
        let cert = ne_gap(&g, &profile).unwrap();
        let (t, adv) = common::ne_gaps(g.payoff().dense_values().unwrap(), g.payoff().dims(), n, &dists);
        prop_assert!((cert.gap_team - t).abs() <= 1e-9 && (cert.gap_adversary - adv).abs() <= 1e-9);
        prop_assert!(vi_residual(&g, &profile).unwrap() >= cert.gap() - 1e-12);
    }
}

#[test]
fn no_audit_failures_recorded() {
    let g = random_game(2, &[3, 2], 4, 9, (-1.0, 1.0)).unwrap();
    extend_ne(&g, &[vec![0.2, 0.3, 0.5], vec![0.6, 0.4]]).unwrap();
    let (calls, failures) = audit_counts();
    assert!(calls >= 1);
    assert_eq!(failures, 0);
}
