use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tmaze_core::analysis::activity::{bin_activity_matrix, expected_matrix};
use tmaze_core::analysis::decode::{decode_matrix, nearest_row};
use tmaze_core::analysis::synthetic::log_from_positions;
use tmaze_core::analysis::transitions::transition_matrix_from_orders;
use tmaze_core::analysis::BinGrid;
use tmaze_core::evolution::{Evolution, EvolutionConfig};
use tmaze_core::geometry::{Segment, Vec2};
use tmaze_core::maze::canonical;
use tmaze_core::maze::file::{load_layout, parse_layout, write_layout};
use tmaze_core::maze::layout::{DoorStates, Texture};
use tmaze_core::maze::{run_trial, Environment, Event, Pose};
use tmaze_core::rnn::{decode_genotype, rnn_step, shuffle_frame, shuffle_weights, RnnState, WeightSet, N_HIDDEN};
use tmaze_core::sensors::{read_proximity, render_camera, SensorConfig, SensorFrame, CAMERA_COLS, CAMERA_ROWS, N_INPUTS};
use tmaze_core::{Ablation, ExperimentConfig, Genotype, RnnController, GENE_COUNT};

fn random_genotype(seed: u64, scale: f64) -> Genotype {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Genotype::new((0..GENE_COUNT).map(|_| rng.random_range(-scale..scale)).collect()).unwrap()
}

fn short_env(steps: usize) -> Environment {
    let mut env = Environment::new(canonical::triple_t());
    env.trial.max_steps = steps;
    env
}

fn rnn_trial(genes_seed: u64, trial_seed: u64, steps: usize) -> tmaze_core::TrialLog {
    let env = short_env(steps);
    let mut ctrl = RnnController::from_genotype(&random_genotype(genes_seed, 1.0), 0.01).unwrap();
    run_trial(&mut ctrl, &env, trial_seed, Ablation::None).unwrap()
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trials_are_deterministic(g in 0u64..1000, s in 0u64..1000) {
        prop_assert_eq!(rnn_trial(g, s, 300), rnn_trial(g, s, 300));
    }

    #[test]
    fn robot_stays_in_the_corridors(g in 0u64..1000, s in 0u64..1000) {
        let log = rnn_trial(g, s, 400);
        let layout = canonical::triple_t();
        for r in &log.rows {
            prop_assert!(layout.in_corridor(r.pose.position()), "left the maze at step {}: {:?}", r.step, r.pose);
        }
    }

    #[test]
    fn doors_close_at_most_once_per_lap(g in 0u64..1000, s in 0u64..1000) {
        let log = rnn_trial(g, s, 600);
        let mut closed: Vec<String> = Vec::new();
        for ev in log.rows.iter().flat_map(|r| &r.events) {
            match ev {
                Event::DoorsOpened => closed.clear(),
                Event::DoorClosed(id) => {
                    prop_assert!(!closed.contains(id), "door {} closed twice", id);
                    closed.push(id.clone());
                }
                _ => {}
            }
        }
    }

    #[test]
    fn fitness_is_bounded(g in 0u64..1000, s in 0u64..1000) {
        let log = rnn_trial(g, s, 500);
        let f = log.summary.fitness;
        prop_assert!((-0.2 * log.summary.num_repeats as f64 - 1e-12..=5.0).contains(&f));
        prop_assert!(log.summary.rewards_obtained.len() <= 4);
        prop_assert_eq!(log.rows.len(), log.summary.elapsed_steps);
    }

    #[test]
    fn activity_stays_in_unit_interval(
        seed in 0u64..10_000,
        scale in 0.1f64..20.0,
        leak in 0.0f64..=1.0,
        r0 in prop::collection::vec(-1.0f64..=1.0, N_HIDDEN),
        x in prop::collection::vec(0.0f64..=1.0, N_INPUTS),
    ) {
        let w = decode_genotype(random_genotype(seed, scale).genes()).unwrap();
        let mut st = RnnState::default();
        st.r.copy_from_slice(&r0);
        for _ in 0..5 {
            st = rnn_step(&st, &x, &w, leak);
            prop_assert!(st.r.iter().all(|v| v.abs() <= 1.0));
        }
    }

    #[test]
    fn full_leak_freezes_and_zero_weights_decay(
        r0 in prop::collection::vec(-1.0f64..=1.0, N_HIDDEN),
        leak in 0.0f64..=1.0,
        seed in 0u64..1000,
    ) {
        let mut st = RnnState::default();
        st.r.copy_from_slice(&r0);
        let x = [0.5; N_INPUTS];
        let w = decode_genotype(random_genotype(seed, 1.0).genes()).unwrap();
        prop_assert_eq!(rnn_step(&st, &x, &w, 1.0), st.clone());
        let next = rnn_step(&st, &x, &WeightSet::zeros(), leak);
        for (a, b) in next.r.iter().zip(&r0) {
            prop_assert!((a - leak * b).abs() < 1e-15);
        }
    }

    #[test]
    fn self_connections_are_ignored(seed in 0u64..1000, i in 0..N_HIDDEN, v in -50.0f64..50.0) {
        let g = random_genotype(seed, 1.0);
        let mut genes = g.genes().to_vec();
        genes[91 * 50 + i * 50 + i] = v;
        let a = decode_genotype(g.genes()).unwrap();
        let b = decode_genotype(&genes).unwrap();
        let mut st = RnnState::default();
        st.r.iter_mut().enumerate().for_each(|(k, r)| *r = ((k as f64) * 0.37).sin());
        let x = [0.3; N_INPUTS];
        prop_assert_eq!(rnn_step(&st, &x, &a, 0.01), rnn_step(&st, &x, &b, 0.01));
    }

    #[test]
    fn shuffles_conserve_values(seed in 0u64..1000, which in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = decode_genotype(random_genotype(seed, 1.0).genes()).unwrap();
        let flat: Vec<f64> = (0..N_INPUTS).map(|k| (k as f64 * 0.13).fract()).collect();
        let frame = SensorFrame::from_flat(&flat.clone().try_into().unwrap());
        let ab = Ablation::ALL[which + 1];
        let mut f2 = frame;
        let mut w2 = w.clone();
        shuffle_frame(ab, &mut f2, &mut rng);
        shuffle_weights(ab, &mut w2, &mut rng);
        prop_assert_eq!(sorted(&f2.flatten()), sorted(&frame.flatten()));
        prop_assert_eq!(sorted(&w2.w_xr), sorted(&w.w_xr));
        prop_assert_eq!(sorted(&w2.w_rr), sorted(&w.w_rr));
        prop_assert_eq!(sorted(&w2.w_ry), sorted(&w.w_ry));
        // only the named group moves
        if !ab.is_sensor() {
            prop_assert_eq!(f2, frame);
        }
        if !ab.is_weight() {
            prop_assert_eq!(w2, w);
        }
    }

    #[test]
    fn sensors_stay_in_range(x in 0.0f64..1.6, y in 0.0f64..1.25, h in -3.2f64..3.2) {
        let layout = canonical::triple_t();
        let p = Vec2::new(x, y);
        prop_assume!(layout.in_corridor(p));
        let obstacles: Vec<_> = layout.obstacles(&DoorStates::all_open(layout.doors.len())).collect();
        let pose = Pose::new(x, y, h);
        let cfg = SensorConfig::default();
        prop_assert!(read_proximity(&pose, 0.037, &obstacles, &cfg).iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!(render_camera(&pose, 0.037, &obstacles, &cfg).iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn sensors_mirror_left_right(x in 0.0f64..1.6, y in 0.0f64..1.25, h in -3.2f64..3.2) {
        let layout = canonical::triple_t();
        prop_assume!(layout.in_corridor(Vec2::new(x, y)));
        let axis = 0.8;
        let walls: Vec<(Segment, Texture)> = layout.walls.iter().map(|w| (w.seg, Texture::UniformLight)).collect();
        let mirrored: Vec<(Segment, Texture)> = walls.iter().map(|(s, t)| (s.mirrored_x(axis), *t)).collect();
        let cfg = SensorConfig::default();
        let a = Pose::new(x, y, h);
        let b = Pose::new(2.0 * axis - x, y, std::f64::consts::PI - h);
        let pa = read_proximity(&a, 0.037, &walls, &cfg);
        let pb = read_proximity(&b, 0.037, &mirrored, &cfg);
        for k in 0..8 {
            prop_assert!((pa[k] - pb[7 - k]).abs() < 1e-9, "sensor {}: {} vs {}", k, pa[k], pb[7 - k]);
        }
        let ca = render_camera(&a, 0.037, &walls, &cfg);
        let cb = render_camera(&b, 0.037, &mirrored, &cfg);
        for row in 0..CAMERA_ROWS {
            for col in 0..CAMERA_COLS {
                let (i, j) = (row * CAMERA_COLS + col, row * CAMERA_COLS + CAMERA_COLS - 1 - col);
                prop_assert!((ca[i] - cb[j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn bin_matrix_matches_naive_means(seed in 0u64..1000, n in 1usize..200) {
        use rand::Rng;
        let layout = canonical::triple_t();
        let grid = BinGrid::new(&layout, 0.037, 0.08, 0.10);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec2> = (0..n)
            .map(|_| grid.bins[rng.random_range(0..grid.len())].center)
            .collect();
        let log = log_from_positions(&pts, |i, p| vec![i as f64, p.x * p.y, 1.0]);
        let m = bin_activity_matrix(&log, &grid);
        for b in 0..grid.len() {
            let members: Vec<usize> = (0..n).filter(|&i| pts[i] == grid.bins[b].center).collect();
            prop_assert_eq!(m.counts[b], members.len());
            if !members.is_empty() {
                let mean0 = members.iter().map(|&i| i as f64).sum::<f64>() / members.len() as f64;
                prop_assert!((m.row(b)[0] - mean0).abs() < 1e-9);
                prop_assert!((m.row(b)[2] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn expected_matrix_averages_visiting_trials(seed in 0u64..1000, trials in 1usize..6) {
        use rand::Rng;
        let layout = canonical::double_t();
        let grid = BinGrid::new(&layout, 0.037, 0.08, 0.10);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let logs: Vec<_> = (0..trials)
            .map(|t| {
                let pts: Vec<Vec2> = (0..rng.random_range(1..40)).map(|_| grid.bins[rng.random_range(0..grid.len())].center).collect();
                log_from_positions(&pts, |i, _| vec![(t * 100 + i) as f64])
            })
            .collect();
        let e = expected_matrix(&logs, &grid);
        let mats: Vec<_> = logs.iter().map(|l| bin_activity_matrix(l, &grid)).collect();
        for b in 0..grid.len() {
            let rows: Vec<f64> = mats.iter().filter(|m| m.visited(b)).map(|m| m.row(b)[0]).collect();
            prop_assert_eq!(e.support[b], rows.len());
            if !rows.is_empty() {
                prop_assert!((e.row(b)[0] - rows.iter().sum::<f64>() / rows.len() as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn nearest_row_is_brute_force_minimum(seed in 0u64..1000, dims in 1usize..6) {
        use rand::Rng;
        let layout = canonical::double_t();
        let grid = BinGrid::new(&layout, 0.037, 0.08, 0.10);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec2> = (0..60).map(|_| grid.bins[rng.random_range(0..grid.len())].center).collect();
        let acts: Vec<Vec<f64>> = (0..60).map(|_| (0..dims).map(|_| rng.random_range(0..4) as f64).collect()).collect();
        let log = log_from_positions(&pts, |i, _| acts[i].clone());
        let e = expected_matrix(std::slice::from_ref(&log), &grid);
        let probe: Vec<f64> = (0..dims).map(|_| rng.random_range(0.0..4.0)).collect();
        let got = nearest_row(&probe, &e).unwrap();
        let dist = |b: usize| e.row(b).iter().zip(&probe).map(|(a, c)| (a - c).powi(2)).sum::<f64>();
        let best = (0..grid.len()).filter(|&b| e.supported(b)).min_by(|&a, &b| dist(a).total_cmp(&dist(b))).unwrap();
        prop_assert!(dist(got) <= dist(best));
        prop_assert!((0..got).filter(|&b| e.supported(b)).all(|b| dist(b) > dist(got)));
    }

    #[test]
    fn decoding_own_templates_is_exact(seed in 0u64..1000) {
        use rand::Rng;
        let layout = canonical::triple_t();
        let grid = BinGrid::new(&layout, 0.037, 0.08, 0.10);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // distinct random code per bin
        let codes: Vec<Vec<f64>> = (0..grid.len()).map(|_| (0..8).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let pts: Vec<Vec2> = grid.bins.iter().map(|b| b.center).collect();
        let log = log_from_positions(&pts, |i, _| codes[i].clone());
        let e = expected_matrix(std::slice::from_ref(&log), &grid);
        let preds = decode_matrix(&bin_activity_matrix(&log, &grid), &e, &grid).unwrap();
        prop_assert_eq!(preds.len(), grid.len());
        prop_assert!(preds.iter().all(|p| p.actual == p.predicted && p.error_bins == 0.0));
    }

    #[test]
    fn transitions_match_hand_count(orders in prop::collection::vec(prop::collection::vec(1u8..=4, 0..8), 0..10)) {
        let t = transition_matrix_from_orders(&orders, 4);
        for a in 1..=4u8 {
            for b in 1..=4u8 {
                let c = orders.iter().map(|o| o.windows(2).filter(|w| w[0] == a && w[1] == b).count()).sum::<usize>();
                prop_assert_eq!(t.counts[a as usize - 1][b as usize - 1] as usize, c);
            }
            let row = &t.probs[a as usize - 1];
            let total: f64 = row.iter().sum();
            if t.zero_rows.contains(&a) {
                prop_assert_eq!(total, 0.0);
            } else {
                prop_assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn config_round_trips(seed in any::<u64>(), leak in 0.0f64..=1.0, pop in 2usize..100, steps in 1usize..10_000) {
        let mut c = ExperimentConfig::default();
        c.master_seed = seed;
        c.rnn.leak = leak;
        c.evolution.population_size = pop;
        c.trial.max_steps = steps;
        let back = ExperimentConfig::parse(&c.to_toml(), std::path::Path::new("c.toml")).unwrap();
        prop_assert_eq!(back.to_toml(), c.to_toml());
        prop_assert_eq!(back.hash().unwrap(), c.hash().unwrap());
    }
}

#[test]
fn best_so_far_never_drops() {
    let env = short_env(300);
    let cfg = EvolutionConfig {
        population_size: 8,
        generations: 5,
        trials_per_genotype: 1,
        ..EvolutionConfig::default()
    };
    let mut evo = Evolution::new(cfg, 3, &env).unwrap();
    let mut prev_best: Option<Genotype> = None;
    while !evo.finished() {
        evo.step().unwrap();
        // the previous best is carried unchanged into the new population
        if let Some(b) = &prev_best {
            assert!(evo.population().contains(b));
        }
        prev_best = Some(evo.best().unwrap().genotype.clone());
    }
    let h = evo.history();
    assert!(h.windows(2).all(|w| w[1].best_so_far_fitness >= w[0].best_so_far_fitness));
}

#[test]
fn shipped_layout_files_match_builtins() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let triple = load_layout(&root.join("layouts/triple_t.layout")).unwrap();
    let double = load_layout(&root.join("layouts/double_t.layout")).unwrap();
    assert_eq!(triple, canonical::triple_t());
    assert_eq!(double, canonical::double_t());
    let text = write_layout(&triple);
    assert_eq!(parse_layout(&text, std::path::Path::new("x")).unwrap(), triple);
}
