mod common;

use common::{dmatrix, kron_prod, kron_sum, max_abs_diff, null_distribution, queue_t_dense, real_eigs_desc, sorted_desc, sym_eigs_desc};
use nalgebra::DMatrix;
use proptest::prelude::*;
use tau_spectra::markov::{
    kron_spectrum, queue_generator, queue_spectrum, symmetrize, transient_evolve, walk_spectrum, walk_transition,
    AxisParams, BirthDeathParams, Evolution, RandomWalkParams, SpectrumKind,
};
use tau_spectra::{MultiIndexSpace, ProbabilityTensor};

fn rate() -> impl Strategy<Value = f64> {
    0.05f64..5.0
}

fn random_distribution(weights: Vec<f64>) -> Vec<f64> {
    let s: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / s).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generator_rows_sum_to_zero(n in 2usize..30, up in rate(), down in rate()) {
        let q = queue_generator(BirthDeathParams::new(n, up, down).unwrap()).unwrap();
        for s in q.row_sums() {
            prop_assert!(s.abs() <= 1e-14 * (up + down).max(1.0));
        }
    }

    #[test]
    fn transition_rows_sum_to_one(n in 2usize..30, p in 0.01f64..0.5, q in 0.01f64..0.5) {
        let t = walk_transition(RandomWalkParams::new(n, p, q).unwrap()).unwrap();
        for s in t.row_sums() {
            prop_assert!((s - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn steady_state_is_stationary(n in 2usize..20, up in rate(), down in rate()) {
        let params = BirthDeathParams::new(n, up, down).unwrap();
        let p = queue_spectrum(params).unwrap().steady_state.unwrap();
        let qt = queue_generator(params).unwrap().transpose();
        let r = qt.matvec(&p.values);
        prop_assert!(r.iter().all(|v| v.abs() <= 1e-12));
        prop_assert!((p.values.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(p.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn spectrum_matches_symmetrized_dense(n in 2usize..13, up in rate(), down in rate()) {
        let params = BirthDeathParams::new(n, up, down).unwrap();
        let report = queue_spectrum(params).unwrap();
        let sym = symmetrize(&queue_generator(params).unwrap().transpose()).unwrap();
        let dense = sym_eigs_desc(&dmatrix(&sym.matrix.to_dense()));
        prop_assert!(max_abs_diff(&sorted_desc(report.eigenvalues.clone()), &dense) <= 1e-10);
        prop_assert!(report.gap < 0.0);
        let bound = -(up.sqrt() - down.sqrt()).powi(2)
            - 2.0 * (up * down).sqrt() * (1.0 - (std::f64::consts::PI / n as f64).cos());
        prop_assert!(report.gap <= bound + 1e-12);
    }

    #[test]
    fn walk_spectrum_matches_dense(n in 2usize..13, p in 0.01f64..0.5, q in 0.01f64..0.5) {
        let params = RandomWalkParams::new(n, p, q).unwrap();
        let report = walk_spectrum(params).unwrap();
        let pt = dmatrix(&walk_transition(params).unwrap().transpose().to_dense());
        prop_assert!(max_abs_diff(&sorted_desc(report.eigenvalues.clone()), &real_eigs_desc(&pt)) <= 1e-10);
    }

    #[test]
    fn symmetrization_reconstructs(n in 2usize..12, up in rate(), down in rate()) {
        let t = queue_generator(BirthDeathParams::new(n, up, down).unwrap()).unwrap().transpose();
        let s = symmetrize(&t).unwrap();
        let x = s.matrix.to_dense();
        let dense = t.to_dense();
        let scale = dense.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in 0..n {
                let rebuilt = s.scaling[i] * x[i][j] / s.scaling[j];
                prop_assert!((rebuilt - dense[i][j]).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn expansion_round_trips(dims in prop::collection::vec(2usize..5, 1..4), seed in prop::collection::vec(0.01f64..1.0, 64), up in rate(), down in rate()) {
        let axes: Vec<AxisParams> = dims
            .iter()
            .enumerate()
            .map(|(r, &n)| AxisParams::Queue(BirthDeathParams::new(n, up * (1.0 + r as f64 * 0.3), down).unwrap()))
            .collect();
        let space = MultiIndexSpace::new(dims.clone()).unwrap();
        let report = kron_spectrum(&space, &axes, SpectrumKind::Generator).unwrap();
        let p = random_distribution(seed[..space.len()].to_vec());
        let back = report.synthesize(&report.expand(&p).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&p, &back) <= 1e-10);
    }

    #[test]
    fn convergence_slope_approaches_gap(n in 3usize..8, up in 0.3f64..3.0, down in 0.3f64..3.0, seed in prop::collection::vec(0.01f64..1.0, 8)) {
        let params = BirthDeathParams::new(n, up, down).unwrap();
        let report = queue_spectrum(params).unwrap();
        let steady = report.steady_state.clone().unwrap();
        let p0 = ProbabilityTensor::new(vec![n], random_distribution(seed[..n].to_vec())).unwrap();
        // Keep a visible component along the slowest mode.
        let c = report.expand(&p0.values).unwrap();
        prop_assume!(c[1].abs() > 1e-3 * c.iter().map(|x| x.abs()).fold(0.0, f64::max));
        let nu1 = report.eigenvalues[1];
        let nu2 = report.eigenvalues[2];
        let t = 12.0 / (nu1 - nu2).abs() + 1.0 / nu1.abs();
        let dt = 0.1 / nu1.abs();
        let dist = |t: f64| {
            let p = transient_evolve(&report, &p0, Evolution::GeneratorTime(t)).unwrap();
            p.values.iter().zip(&steady.values).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
        };
        let (d0, d1) = (dist(t), dist(t + dt));
        prop_assume!(d1 > 1e-12);
        let slope = (d1.ln() - d0.ln()) / dt;
        prop_assert!((slope - nu1).abs() <= 0.01 * nu1.abs(), "slope {} vs gap {}", slope, nu1);
    }
}

#[test]
fn kron_chain_matches_dense_product() {
    let walks = [RandomWalkParams::new(3, 0.2, 0.3).unwrap(), RandomWalkParams::new(4, 0.35, 0.1).unwrap()];
    let space = MultiIndexSpace::new(vec![3, 4]).unwrap();
    let axes: Vec<AxisParams> = walks.iter().map(|w| AxisParams::Walk(*w)).collect();
    let report = kron_spectrum(&space, &axes, SpectrumKind::Chain).unwrap();
    let mats: Vec<DMatrix<f64>> = walks.iter().map(|w| dmatrix(&walk_transition(*w).unwrap().transpose().to_dense())).collect();
    let dense = kron_prod(&mats);
    assert!(max_abs_diff(&sorted_desc(report.eigenvalues.clone()), &real_eigs_desc(&dense)) <= 1e-10);
    let steady = report.steady_state.clone().unwrap();
    assert!(max_abs_diff(&steady.values, &null_distribution(&(dense.clone() - DMatrix::identity(12, 12)))) <= 1e-10);

    // Eigenvectors are Kronecker products in lexicographic order.
    for flat in 0..12 {
        let idx = space.delinearize(flat).unwrap();
        let k: Vec<usize> = idx.iter().map(|i| i - 1).collect();
        let w = report.eigenvector(&k).unwrap();
        let pw = &dense * nalgebra::DVector::from_vec(w.clone());
        let lam = report.eigenvalues[flat];
        let res: f64 = pw.iter().zip(&w).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
        assert!(res <= 1e-12, "mode {k:?}: {res}");
    }

    let p0 = ProbabilityTensor::new(vec![3, 4], vec![1.0 / 12.0; 12]).unwrap();
    let stepped = transient_evolve(&report, &p0, Evolution::ChainSteps(5)).unwrap();
    let mut direct = nalgebra::DVector::from_vec(p0.values.clone());
    for _ in 0..5 {
        direct = &dense * direct;
    }
    assert!(max_abs_diff(&stepped.values, direct.as_slice()) <= 1e-13);
}

#[test]
fn kron_generator_matches_dense_sum() {
    let queues = [BirthDeathParams::new(3, 1.3, 0.4).unwrap(), BirthDeathParams::new(4, 0.5, 2.2).unwrap()];
    let space = MultiIndexSpace::new(vec![3, 4]).unwrap();
    let axes: Vec<AxisParams> = queues.iter().map(|q| AxisParams::Queue(*q)).collect();
    let report = kron_spectrum(&space, &axes, SpectrumKind::Generator).unwrap();
    let mats: Vec<DMatrix<f64>> = queues.iter().map(|q| queue_t_dense(q.n, q.lambda, q.mu)).collect();
    let dense = kron_sum(&mats);
    assert!(max_abs_diff(&sorted_desc(report.eigenvalues.clone()), &real_eigs_desc(&dense)) <= 1e-10);
    let steady = report.steady_state.clone().unwrap();
    assert!(max_abs_diff(&steady.values, &null_distribution(&dense)) <= 1e-10);

    let p0 = ProbabilityTensor::new(vec![3, 4], {
        let mut v = vec![0.0; 12];
        v[0] = 1.0;
        v
    })
    .unwrap();
    let t = 0.7;
    let evolved = transient_evolve(&report, &p0, Evolution::GeneratorTime(t)).unwrap();
    // Matrix exponential by scaling and squaring of a Taylor series.
    let steps = 10;
    let a = &dense * (t / f64::from(1 << steps));
    let mut term = DMatrix::<f64>::identity(12, 12);
    let mut exp = DMatrix::<f64>::identity(12, 12);
    for k in 1..20 {
        term = &term * &a / k as f64;
        exp += &term;
    }
    for _ in 0..steps {
        exp = &exp * &exp;
    }
    let direct = exp * nalgebra::DVector::from_vec(p0.values.clone());
    assert!(max_abs_diff(&evolved.values, direct.as_slice()) <= 1e-12);
}

#[test]
fn random_queues_have_stationary_geometric_laws() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let n = rng.random_range(2..=20);
        let up = rng.random_range(0.05..5.0);
        let down = rng.random_range(0.05..5.0);
        let params = BirthDeathParams::new(n, up, down).unwrap();
        let report = queue_spectrum(params).unwrap();
        let p = report.steady_state.as_ref().unwrap();
        let r = queue_t_dense(n, up, down) * nalgebra::DVector::from_vec(p.values.clone());
        assert!(r.amax() <= 1e-12);
        // Qᵀ is far from normal when up/down is large, so the reference
        // eigenvalues come from its symmetric similarity transform.
        let mut x = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            x[(i, i)] = if i == 0 { -up } else if i == n - 1 { -down } else { -up - down };
            if i + 1 < n {
                x[(i, i + 1)] = (up * down).sqrt();
                x[(i + 1, i)] = (up * down).sqrt();
            }
        }
        let dense = sym_eigs_desc(&x);
        assert!((report.gap - dense[1]).abs() <= 1e-12 * (up + down).max(1.0), "{params:?}");
    }
}
