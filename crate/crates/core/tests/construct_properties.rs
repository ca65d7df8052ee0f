use interalign::construct3::{build_alignment_matrix, path_parameter, solve_three_user};
use interalign::feasibility::decide_3user_symmetric;
use interalign::linalg::{kernel_basis, random_gaussian};
use interalign::verify::{check_orthogonality, DEFAULT_TOL};
use interalign::{generate_channels, ProblemSpec, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn kernel_dimension_matches_count() {
    for m in 1..=6 {
        for n in m + 1..=8 {
            let r = path_parameter(m, n);
            let spec = ProblemSpec::symmetric(3, m, n, 1).unwrap();
            for seed in 0..5 {
                let ch = generate_channels(&spec, seed);
                for start in 0..3 {
                    for rr in [r, r + 1] {
                        let expected = ((rr + 1) * m).saturating_sub(rr * n);
                        let a = build_alignment_matrix(&ch, start, rr).unwrap();
                        assert_eq!(kernel_basis(&a.matrix).ncols(), expected, "M={m} N={n} r={rr}");
                    }
                }
            }
        }
    }
}

#[test]
fn constructions_keep_direct_rank() {
    for m in 1..=6 {
        for n in 1..=6 {
            for d in 1..=3 {
                if !decide_3user_symmetric(m, n, d).is_feasible() || (m == n && m != 2 * d) {
                    continue;
                }
                let spec = ProblemSpec::symmetric(3, m, n, d).unwrap();
                let ch = generate_channels(&spec, 40 + (m * 100 + n * 10 + d) as u64);
                let s = solve_three_user(&ch).unwrap();
                let report = check_orthogonality(&ch, &s, DEFAULT_TOL).unwrap();
                assert!(report.passed, "({m},{n},{d}): {}", report.max_orthogonality_residual);
                assert_eq!(report.direct_rank_ok, Some(vec![true; 3]));
            }
        }
    }
}

#[test]
fn perturbed_channels_break_alignment() {
    let spec = ProblemSpec::symmetric(3, 3, 5, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..10 {
        let ch = generate_channels(&spec, seed);
        let s = solve_three_user(&ch).unwrap();
        assert!(check_orthogonality(&ch, &s, DEFAULT_TOL).unwrap().passed);
        let noisy = ch.cross(1, 0) + random_gaussian(5, 3, &mut rng) * interalign::linalg::c(1e-3, 0.0);
        let perturbed = ch.clone().with_cross(1, 0, noisy).unwrap();
        let report = check_orthogonality(&perturbed, &s, DEFAULT_TOL).unwrap();
        assert!(!report.passed);
        assert!(report.max_orthogonality_residual > 1e-6);
    }
}

#[test]
fn reciprocal_strategy_swaps_roles() {
    for (m, n, d) in [(3, 5, 2), (2, 3, 1), (4, 4, 2)] {
        let spec = ProblemSpec::symmetric(3, m, n, d).unwrap();
        let ch = generate_channels(&spec, 77);
        let s = solve_three_user(&ch).unwrap();
        let swapped = Strategy::new(s.v.clone(), s.u.clone());
        assert!(check_orthogonality(&ch.reciprocal(), &swapped, DEFAULT_TOL).unwrap().passed);
    }
}
