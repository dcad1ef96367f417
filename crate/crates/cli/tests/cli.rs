use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dsavoid_core::demo::FIG6_SCENE;
use dsavoid_core::flow::ModeState;
use dsavoid_core::scenario_io::{read_field_csv, read_trajectory_csv};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsavoid"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scene(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("corner.scn");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn simulate_writes_one_csv_per_start() {
    let dir = tempfile::tempdir().unwrap();
    let scn = scene(dir.path(), FIG6_SCENE);
    let o = run(&["simulate", "--scenario", scn.to_str().unwrap(), "--out", "res"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = dir.path().join("res/corner_along_0.csv");
    let samples = read_trajectory_csv(&fs::read_to_string(&csv).unwrap()).unwrap();
    assert!(samples.len() > 1000);
    assert!(samples.iter().any(|s| s.mode == ModeState::Intersection));
    assert!(stdout(&o).contains("reached"));
}

#[test]
fn overrides_change_the_sign_in_file_names() {
    let dir = tempfile::tempdir().unwrap();
    let scn = scene(dir.path(), FIG6_SCENE);
    let o = run(
        &["simulate", "--scenario", scn.to_str().unwrap(), "--out", "res", "--set", "flow.sign_pref=opposite"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("res/corner_opposite_0.csv").exists());
    assert!(!dir.path().join("res/corner_along_0.csv").exists());
}

#[test]
fn max_steps_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let scn = scene(dir.path(), FIG6_SCENE);
    let o = run(&["simulate", "--scenario", scn.to_str().unwrap(), "--set", "integrator.max_steps=10"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn input_errors_exit_two_and_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "--scenario", "nowhere.scn"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nowhere.scn"));

    let scn = scene(dir.path(), &FIG6_SCENE.replace("(0.85, 0.5, 0)", "(3, 0, 0)"));
    let o = run(&["simulate", "--scenario", scn.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside workspace"));

    let o = run(&["simulate", "--scenario", scn.to_str().unwrap(), "--set", "flow.bogus=1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_marks_invalid_points() {
    let dir = tempfile::tempdir().unwrap();
    let scn = scene(dir.path(), FIG6_SCENE);
    let o = run(
        &[
            "sweep", "--scenario", scn.to_str().unwrap(), "--out", "res",
            "--set", "sweep.min=(-2,-2,0)", "--set", "sweep.max=(2,2,0)", "--set", "sweep.counts=(2,2,1)",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("res/corner_along_field.csv")).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert_eq!(text.lines().skip(1).filter(|l| l.ends_with(",invalid")).count(), 4);
}

#[test]
fn sweep_pair_differs_only_on_intersection_rows() {
    let dir = tempfile::tempdir().unwrap();
    let scn = scene(dir.path(), FIG6_SCENE);
    let grid = ["--set", "sweep.min=(0.5,-0.8,-0.2)", "--set", "sweep.max=(1,0.8,0.2)", "--set", "sweep.counts=(21,33,9)"];
    for sign in ["along", "opposite"] {
        let set = format!("flow.sign_pref={sign}");
        let mut args = vec!["sweep", "--scenario", scn.to_str().unwrap(), "--out", "res", "--set", &set];
        args.extend(grid);
        assert_eq!(run(&args, dir.path()).status.code(), Some(0));
    }
    let read = |s: &str| read_field_csv(&fs::read_to_string(dir.path().join(format!("res/corner_{s}_field.csv"))).unwrap()).unwrap();
    let (a, b) = (read("along"), read("opposite"));
    assert_eq!(a.len(), b.len());
    let mut intersect = 0;
    for (p, q) in a.iter().zip(&b) {
        assert_eq!(p.xi, q.xi);
        assert_eq!(p.mode, q.mode);
        if p.mode == Some(ModeState::Intersection) {
            intersect += 1;
            assert_eq!(p.v, -q.v);
        } else {
            assert_eq!(p.v, q.v);
        }
    }
    assert!(intersect > 0);
}

#[test]
fn verify_passes_and_catches_a_mutation() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "--seed", "5", "--set", "verify.scenarios=20"];
    let first = run(&args, dir.path());
    assert_eq!(first.status.code(), Some(0), "{}", stdout(&first));
    assert!(stdout(&first).contains("9/9 checks passed"));
    assert_eq!(stdout(&run(&args, dir.path())), stdout(&first));

    let o = run(&["verify", "--seed", "5", "--set", "verify.scenarios=20", "--set", "verify.mutation=flip_lambda_sign"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL workspace_boundary")));
}

#[test]
fn demo_writes_scenes_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["demo", "--out", "d"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for name in ["fig4a_original", "fig4b_obstacle_only", "fig4c_full", "fig6_along", "fig6_opposite"] {
        assert!(dir.path().join(format!("d/{name}.scn")).exists(), "{name}");
        assert!(dir.path().join(format!("d/{name}.csv")).exists(), "{name}");
    }
    // Written scenes load back through the normal path.
    let o = run(&["simulate", "--scenario", "d/fig4c_full.scn", "--out", "d2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
}
