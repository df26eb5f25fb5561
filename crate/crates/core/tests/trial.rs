use tmaze_core::geometry::Vec2;
use tmaze_core::maze::canonical;
use tmaze_core::maze::scripted::{ConstantController, WaypointController};
use tmaze_core::maze::{run_trial, Environment, Event};
use tmaze_core::Ablation;

fn route(points: &[(f64, f64)]) -> Vec<Vec2> {
    points.iter().map(|&(x, y)| Vec2::new(x, y)).collect()
}

#[test]
fn scripted_path_one_with_return_scores_two() {
    let env = Environment::new(canonical::triple_t());
    let mut ctrl = WaypointController::new(route(&[
        (0.8, 0.45),
        (0.4, 0.45),
        (0.4, 0.75),
        (0.2, 0.75),
        (0.2, 1.15),
        (0.05, 1.15),
        (0.05, 0.05),
        (0.8, 0.05),
    ]));
    let log = run_trial(&mut ctrl, &env, 7, Ablation::None).unwrap();
    let events: Vec<String> = log.rows.iter().flat_map(|r| r.events.iter().map(|e| e.to_string())).collect();
    println!("{events:?}");
    assert_eq!(log.summary.fitness, 2.0, "{:?}", log.summary);
    assert!(log.rows.iter().any(|r| r.events.contains(&Event::Reward(1))));
}

#[test]
fn null_controller_stays_home() {
    let env = Environment::new(canonical::triple_t());
    let log = run_trial(&mut ConstantController([0.0, 0.0]), &env, 3, Ablation::None).unwrap();
    assert_eq!(log.summary.fitness, 0.0);
    assert_eq!(log.summary.elapsed_steps, 5000);
    assert_eq!(log.rows.len(), 5000);
    let start = log.rows[0].pose;
    assert!(log.rows.iter().all(|r| r.pose == start));
}

fn lap(path: u8) -> Vec<(f64, f64)> {
    let (junction, arm, side) = match path {
        1 => (0.4, 0.2, 0.05),
        2 => (0.4, 0.6, 0.05),
        3 => (1.2, 1.0, 1.55),
        _ => (1.2, 1.4, 1.55),
    };
    vec![
        (0.8, 0.45),
        (junction, 0.45),
        (junction, 0.75),
        (arm, 0.75),
        (arm, 1.15),
        (side, 1.15),
        (side, 0.05),
        (0.8, 0.05),
    ]
}

#[test]
fn four_laps_score_five_and_end_early() {
    let env = Environment::new(canonical::triple_t());
    let pts: Vec<(f64, f64)> = [1, 4, 2, 3].iter().flat_map(|&p| lap(p)).collect();
    let mut ctrl = WaypointController::new(route(&pts));
    let log = run_trial(&mut ctrl, &env, 11, Ablation::None).unwrap();
    assert_eq!(log.summary.fitness, 5.0, "{:?}", log.summary);
    assert_eq!(log.summary.path_order(), vec![1, 4, 2, 3]);
    assert!(log.summary.elapsed_steps < 5000);
    assert_eq!(log.rows.len(), log.summary.elapsed_steps);
    println!("elapsed {}", log.summary.elapsed_steps);
}

#[test]
fn repeated_path_costs_point_two() {
    let env = Environment::new(canonical::triple_t());
    let pts: Vec<(f64, f64)> = [3, 3].iter().flat_map(|&p| lap(p)).collect();
    let log = run_trial(&mut WaypointController::new(route(&pts)), &env, 5, Ablation::None).unwrap();
    assert_eq!(log.summary.num_repeats, 1);
    assert!((log.summary.fitness - (1.0 + 1.0 - 0.2)).abs() < 1e-12);
}

#[test]
fn double_t_scripted_laps() {
    let env = Environment::new(canonical::double_t());
    let pts = [
        (0.8, 0.45),
        (0.4, 0.45),
        (0.4, 1.15),
        (0.05, 1.15),
        (0.05, 0.05),
        (0.8, 0.05),
        (0.8, 0.45),
        (1.2, 0.45),
        (1.2, 1.15),
        (1.55, 1.15),
        (1.55, 0.05),
        (0.8, 0.05),
    ];
    let log = run_trial(&mut WaypointController::new(route(&pts)), &env, 1, Ablation::None).unwrap();
    assert_eq!(log.summary.fitness, 3.0, "{:?}", log.summary);
    assert!(log.summary.elapsed_steps < 2000, "{}", log.summary.elapsed_steps);
}
