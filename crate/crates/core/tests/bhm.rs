use graphbus::bhm::{
    basis_dimension, couplings_from_depth, enumerate_basis, run_fidelity_detailed, sample_noise, spin_couplings_from_bhm,
    BhmConfig, BhmCouplings, BhmStructure, BosonicBasis, DepthCalibration, NoiseConfig, NoiseModel,
};
use graphbus::krylov::LinearOperator;
use graphbus::C64;
use proptest::prelude::*;

fn couplings_strategy(n: usize) -> impl Strategy<Value = BhmCouplings> {
    (
        prop::collection::vec(0.0f64..2.0, n - 1),
        prop::collection::vec(0.0f64..2.0, n - 1),
        1.0f64..30.0,
        1.0f64..30.0,
        0.5f64..15.0,
        -2.0f64..2.0,
    )
        .prop_map(|(t_a, t_b, u_a, u_b, u_ab, field)| BhmCouplings {
            t_a,
            t_b,
            u_a,
            u_b,
            u_ab,
            field,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lattice_hamiltonian_is_hermitian_and_conserving(
        (n, n_max, c) in (2usize..=4, 1usize..=3).prop_flat_map(|(n, m)| (Just(n), Just(m), couplings_strategy(n)))
    ) {
        let s = BhmStructure::new(BosonicBasis::new(n, n_max, n, usize::MAX).unwrap());
        let h = s.hamiltonian(&c).unwrap();
        let m = h.to_dense();
        prop_assert!((&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        let b = s.basis();
        for r in 0..b.dim() {
            for col in 0..b.dim() {
                if m[(r, col)].norm() > 0.0 {
                    prop_assert_eq!(b.species_counts(r), b.species_counts(col));
                }
            }
        }
        // Diagonal matches the on-site energies evaluated directly.
        for i in 0..b.dim() {
            let e: f64 = b.site_states(i).iter().map(|&(a, bb)| {
                let (a, bb) = (a as f64, bb as f64);
                c.u_a / 2.0 * a * (a - 1.0) + c.u_b / 2.0 * bb * (bb - 1.0) + c.u_ab * a * bb + c.field / 2.0 * (a - bb)
            }).sum();
            prop_assert!((m[(i, i)].re - e).abs() < 1e-12);
        }
        prop_assert_eq!(h.dim(), b.dim());
    }

    #[test]
    fn basis_size_matches_count(n in 1usize..=6, n_max in 1usize..=3) {
        let b = BosonicBasis::new(n, n_max, n, usize::MAX).unwrap();
        prop_assert_eq!(b.dim() as u128, basis_dimension(n, n_max, n));
        for i in 0..b.dim() {
            prop_assert_eq!(b.index_of(&b.site_states(i)), Some(i));
        }
    }

    #[test]
    fn symmetric_lattice_gives_pure_xy(t in prop::collection::vec(0.01f64..1.0, 1..8), u in 2.0f64..50.0, field in -1.0f64..1.0) {
        let c = BhmCouplings { t_a: t.clone(), t_b: t.clone(), u_a: u, u_b: u, u_ab: u / 2.0, field };
        let p = spin_couplings_from_bhm(&c).unwrap();
        prop_assert!(p.lambda_zz.iter().all(|x| x.abs() < 1e-14));
        prop_assert!(p.lambda_z.iter().all(|x| (x - field / 2.0).abs() < 1e-14));
        for (l, ti) in p.lambda_xy.iter().zip(&t) {
            prop_assert!((l - 2.0 * ti * ti / u).abs() < 1e-14);
        }
    }

    #[test]
    fn deeper_lattice_hops_less(s in 0.5f64..40.0, ds in 0.01f64..5.0) {
        let cal = DepthCalibration { t0: 1.0, u0: 26.0, s0: 15.0 };
        let (t1, u1) = couplings_from_depth(s, &cal).unwrap();
        let (t2, u2) = couplings_from_depth(s + ds, &cal).unwrap();
        prop_assert!(t2 < t1);
        prop_assert!(u2 > u1);
    }

    #[test]
    fn noise_is_reproducible(seed in any::<u64>(), delta in 0.0f64..0.1, increment in any::<bool>()) {
        let c = NoiseConfig {
            model: if increment { NoiseModel::Increment } else { NoiseModel::OrnsteinUhlenbeck },
            ..NoiseConfig::new(delta, seed)
        };
        let a = sample_noise(&c, 3.0).unwrap();
        prop_assert_eq!(&a, &sample_noise(&c, 3.0).unwrap());
        prop_assert!(a.depth_a.iter().chain(&a.depth_b).all(|&s| s > 0.0));
    }
}

#[test]
fn default_lattice_dimension() {
    assert_eq!(enumerate_basis(&BhmConfig::default()).unwrap().dim(), 5284);
}

#[test]
fn ou_noise_statistics() {
    let c = NoiseConfig {
        correlation_time: Some(0.5),
        update_interval: Some(0.05),
        ..NoiseConfig::new(0.05, 17)
    };
    let tr = sample_noise(&c, 2000.0).unwrap();
    assert!(tr.segments() >= 10_000);
    for path in [&tr.depth_a, &tr.depth_b] {
        let n = path.len() as f64;
        let mean = path.iter().sum::<f64>() / n;
        let std = (path.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((std / (0.05 * 15.0) - 1.0).abs() < 0.2, "std {std}");
    }
}

#[test]
fn noisy_run_conserves_norm_and_numbers() {
    let cfg = BhmConfig::new(4, 16.0);
    let run = run_fidelity_detailed(&cfg, &NoiseConfig::new(0.05, 3)).unwrap();
    assert!(run.diagnostics.norm_error < 1e-8);
    // Noise keeps both species numbers; only the noiseless run also fixes energy.
    assert!(run.diagnostics.sector_drift < 1e-8);
    assert!(run.diagnostics.energy_drift.is_none());
    assert!((0.0..=1.0 + 1e-9).contains(&run.record.fidelity));
}

#[test]
fn noiseless_energy_is_conserved() {
    let run = run_fidelity_detailed(&BhmConfig::new(5, 20.0), &NoiseConfig::noiseless()).unwrap();
    assert!(run.diagnostics.energy_drift.unwrap() < 1e-7);
    assert!(run.diagnostics.norm_error < 1e-8);
    assert!(run.diagnostics.sector_drift < 1e-8);
}

#[test]
fn matrix_free_product_is_linear() {
    let s = BhmStructure::new(enumerate_basis(&BhmConfig::new(3, 8.0)).unwrap());
    let h = s.hamiltonian(&BhmCouplings::ideal(&BhmConfig::new(3, 8.0))).unwrap();
    let d = h.dim();
    let x: Vec<C64> = (0..d).map(|i| C64::new(i as f64, 1.0)).collect();
    let y: Vec<C64> = (0..d).map(|i| C64::new(0.5, -(i as f64))).collect();
    let z: Vec<C64> = x.iter().zip(&y).map(|(a, b)| a * 2.0 + b).collect();
    let (mut hx, mut hy, mut hz) = (vec![C64::default(); d], vec![C64::default(); d], vec![C64::default(); d]);
    h.apply(&x, &mut hx);
    h.apply(&y, &mut hy);
    h.apply(&z, &mut hz);
    for i in 0..d {
        assert!((hz[i] - (hx[i] * 2.0 + hy[i])).norm() < 1e-10);
    }
}
