use offload_core::coordinator::{
    build_dictionary, coordinated_run, frame_quantiles, quantile_distance, select_profile, ttc_optimize,
    DictionaryEntry, ProfileDictionary,
};
use offload_core::dynamics::RunState;
use offload_core::harness::{synth_uniform, Synthetic};
use offload_core::solver::{best_single_sensor_allocation, brute_force_ctm, PredictedCoefficients, WidthMode};
use offload_core::{simulate_frame, Algorithm, Allocation, AllocationProfile, FrameDistribution, ScenarioConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn twin_sensor_instance() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::from_coefficients(vec![vec![1.0, 1.0]; 2], vec![5.0, 5.0]).unwrap();
    cfg.overlap = 0.1;
    cfg.alpha_d = 0.0;
    cfg.frame_width = 1100;
    cfg
}

fn small_instance() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::from_coefficients(vec![vec![0.4, 0.9], vec![0.8, 0.5]], vec![1.5, 2.0]).unwrap();
    cfg.overlap = 0.06;
    cfg.alpha_d = 0.00125;
    cfg.frame_width = 720;
    cfg
}

#[test]
fn system_optimizer_beats_the_selfish_equilibrium() {
    let cfg = twin_sensor_instance();
    let r = ttc_optimize(&cfg, &[], 40).unwrap();
    assert!(r.completion <= 6.31, "{}", r.completion);
    assert!(r.trajectory.windows(2).all(|w| w[1] <= w[0]), "{:?}", r.trajectory);
    let t = simulate_frame(&r.profile, &cfg, &[]).unwrap().system_completion;
    assert_eq!(t, r.completion);
}

#[test]
fn single_sensor_optimizer_matches_isolation_solution() {
    let mut cfg = ScenarioConfig::from_coefficients(vec![vec![0.5, 1.0, 0.8]], vec![2.0, 1.0, 3.0]).unwrap();
    cfg.overlap = 0.05;
    cfg.alpha_d = 0.0;
    cfg.frame_width = 720;
    let r = ttc_optimize(&cfg, &[], 20).unwrap();
    let pred = PredictedCoefficients::new(cfg.transmission[0].clone(), cfg.processing.clone(), cfg.overlap);
    let plan = best_single_sensor_allocation(&pred, WidthMode::Linear).unwrap();
    assert_eq!(r.profile[0].assignment, plan.allocation.assignment);
    // one pixel of the slowest coefficient sum
    let step = (1.0 + 3.0) / 720.0;
    assert!((r.completion - plan.predicted).abs() <= step, "{} {}", r.completion, plan.predicted);
}

#[test]
fn system_optimizer_is_close_to_brute_force() {
    let cfg = small_instance();
    let dists = vec![FrameDistribution::exact_uniform(400); 2];
    let (_, oracle) = brute_force_ctm(&cfg, &dists, 720 / 100).unwrap();
    let r = ttc_optimize(&cfg, &dists, 40).unwrap();
    assert!(r.completion <= oracle * 1.02, "{} vs {oracle}", r.completion);
}

fn random_dictionary(rng: &mut StdRng, m: usize) -> ProfileDictionary {
    let mut d = ProfileDictionary::default();
    for _ in 0..m {
        let mut q: Vec<u32> = (0..3).map(|_| rng.gen_range(0..40)).collect();
        q.sort_unstable();
        d.push(DictionaryEntry {
            quantiles: vec![q],
            profile: AllocationProfile::new(vec![Allocation::whole(0)]),
            completion: 1.0,
        });
    }
    d
}

#[test]
fn bounded_heap_matches_full_sort() {
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..200 {
        let m = rng.gen_range(1..40);
        let l = rng.gen_range(1..50);
        let dict = random_dictionary(&mut rng, m);
        let mut q: Vec<u32> = (0..3).map(|_| rng.gen_range(0..40)).collect();
        q.sort_unstable();
        let target = vec![q];
        let mut all: Vec<(f64, usize)> = dict
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| (quantile_distance(&target, &e.quantiles).unwrap(), i))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let expect: Vec<usize> = all.iter().take(l).map(|x| x.1).collect();
        assert_eq!(dict.nearest(&target, l).unwrap(), expect);
    }
}

fn two_entry_dictionary(cfg: &ScenarioConfig, dists: &[FrameDistribution]) -> ProfileDictionary {
    let good = ttc_optimize(cfg, dists, 40).unwrap().profile;
    let poor = AllocationProfile::new(vec![Allocation::whole(1), Allocation::whole(0)]);
    let q = frame_quantiles(dists, cfg);
    let mut dict = ProfileDictionary::default();
    for (p, far) in [(poor, 0), (good, 50)] {
        let quantiles = q.iter().map(|v| v.iter().map(|x| x + far).collect()).collect();
        let completion = simulate_frame(&p, cfg, dists).unwrap().system_completion;
        dict.push(DictionaryEntry {
            quantiles,
            profile: p,
            completion,
        });
    }
    dict
}

#[test]
fn selection_rules() {
    let cfg = small_instance();
    let dists = vec![FrameDistribution::exact_uniform(400); 2];
    let dict = two_entry_dictionary(&cfg, &dists);
    let q = frame_quantiles(&dists, &cfg);
    // nearest only
    let one = select_profile(&q, &dict, 1, &cfg, &dists).unwrap();
    assert_eq!(one.index, 0);
    assert_eq!(one.predicted, None);
    // L >= M: engine argmin over everything
    let all = select_profile(&q, &dict, 5, &cfg, &dists).unwrap();
    assert_eq!(all.index, 1);
    let best = dict.entries.iter().map(|e| e.completion).fold(f64::INFINITY, f64::min);
    assert_eq!(all.predicted, Some(best));
    let mut single = ProfileDictionary::default();
    single.push(dict.entries[0].clone());
    assert_eq!(select_profile(&q, &single, 3, &cfg, &dists).unwrap().index, 0);
    assert!(select_profile(&q, &ProfileDictionary::default(), 1, &cfg, &dists).is_err());
}

#[test]
fn refreshing_every_frame_keeps_the_profile() {
    let cfg = small_instance();
    let dists = vec![FrameDistribution::exact_uniform(400); 2];
    let dict = build_dictionary(&[dists.clone()], &cfg, 1).unwrap();
    let frames = vec![dists; 10];
    let st = coordinated_run(&cfg, &frames, Algorithm::TT_A, 1, 1, &dict).unwrap();
    assert!(st.history.iter().all(|r| r.profile == dict.entries[0].profile));
}

#[test]
fn one_refresh_then_frozen_assignments() {
    let cfg = small_instance();
    let trace = synth_uniform(Synthetic::Uniform, 8, 2, 400, 4).unwrap();
    let dict = build_dictionary(&trace.frames()[..2], &cfg, 2).unwrap();
    let st = coordinated_run(&cfg, trace.frames(), Algorithm::TT_S, 1000, 2, &dict).unwrap();
    let installed = st.history[0].profile.clone();
    let mut manual = RunState::new(Algorithm::TT_S, installed.clone());
    for (i, f) in trace.frames().iter().enumerate() {
        if i > 0 {
            manual.revise(&cfg, true).unwrap();
        }
        manual.observe(&cfg, f).unwrap();
    }
    for (a, b) in st.history.iter().zip(&manual.history) {
        assert_eq!(a.profile, b.profile);
        for (x, y) in a.profile.allocations.iter().zip(&installed.allocations) {
            assert_eq!(x.assignment, y.assignment);
        }
    }
}

#[test]
fn dictionary_file_round_trip() {
    let cfg = small_instance();
    let trace = synth_uniform(Synthetic::Uniform, 3, 2, 400, 8).unwrap();
    let dict = build_dictionary(trace.frames(), &cfg, 3).unwrap();
    assert_eq!(dict.len(), 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dict.csv");
    dict.save(&path, cfg.frame_width).unwrap();
    let (back, w) = ProfileDictionary::load(&path).unwrap();
    assert_eq!(w, cfg.frame_width);
    assert_eq!(back.entries.len(), dict.entries.len());
    for (a, b) in back.entries.iter().zip(&dict.entries) {
        assert_eq!(a.quantiles, b.quantiles);
        assert_eq!(a.profile, b.profile);
        assert_eq!(a.completion, b.completion);
    }
}

#[test]
fn single_entry_dictionary_matches_optimizer() {
    let cfg = small_instance();
    let dists = vec![FrameDistribution::exact_uniform(400); 2];
    let dict = build_dictionary(&[dists.clone(), dists.clone()], &cfg, 1).unwrap();
    assert_eq!(dict.len(), 1);
    let r = ttc_optimize(&cfg, &dists, offload_core::coordinator::default_revisions(&cfg)).unwrap();
    assert_eq!(dict.entries[0].profile, r.profile);
    assert_eq!(dict.entries[0].completion, r.completion);
}

#[test]
fn measurement_only_sensors_leave_the_installed_profile() {
    let cfg = ScenarioConfig::for_topology(4, 100.0, &Default::default()).unwrap();
    let trace = synth_uniform(Synthetic::ExactUniform, 40, 4, 400, 0).unwrap();
    let dict = build_dictionary(&trace.frames()[..1], &cfg, 1).unwrap();
    let st = coordinated_run(&cfg, trace.frames(), Algorithm::MO_A, 1000, 1, &dict).unwrap();
    assert!(st.history.iter().any(|r| r.profile != dict.entries[0].profile));
    let mean = st.history.iter().map(|r| r.system_completion).sum::<f64>() / st.history.len() as f64;
    assert!(mean > dict.entries[0].completion, "{mean} vs {}", dict.entries[0].completion);
}
