//! End-to-end checks of the `skycart` binary: subcommands, file outputs,
//! and the exit-code contract (0 ok, 1 failure, 2 usage/config).

use std::path::Path;
use std::process::Command;

fn skycart() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skycart"))
}

#[test]
fn simulate_fig3_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig3.csv");
    let plot = dir.path().join("fig3.py");
    let out = skycart()
        .args(["simulate", "paper-fig3", "--csv"])
        .arg(&csv)
        .arg("--plot")
        .arg(&plot)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,x,x_dot,alpha,alpha_dot,beta,beta_dot,u1,u2,u3,u1_cmd,u2_cmd,u3_cmd,ref_x,ref_alpha"
    );
    assert_eq!(lines.count(), 40_001);
    assert!(std::fs::read_to_string(&plot).unwrap().contains("fig3.csv"));

    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("min applied thrust"), "{stdout}");
}

#[test]
fn simulate_is_deterministic_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        // short custom scenario to keep the files small
        let toml = short_scenario(dir.path());
        let st = skycart()
            .args(["simulate"])
            .arg(&toml)
            .arg("--csv")
            .arg(path)
            .status()
            .unwrap();
        assert!(st.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn equilibria_reports_the_attainable_ranges() {
    let out = skycart().args(["equilibria", "paper-fig3"]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("attainable inclination range"), "{stdout}");
    assert!(stdout.contains("0.755"), "{stdout}");
    assert!(stdout.contains("steady-state input"), "{stdout}");
}

#[test]
fn analyze_reports_gains_and_bounds() {
    let out = skycart()
        .args(["analyze", "paper-fig3", "--gamma-out-samples", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("disturbance bound constant"), "{stdout}");
    assert!(stdout.contains("0.874334"), "{stdout}");
    assert!(stdout.contains("inner-loop gain"), "{stdout}");
}

#[test]
fn verify_model_suite_passes() {
    let out = skycart().args(["verify", "model"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert_eq!(stdout.matches("[PASS]").count(), 3, "{stdout}");
    assert!(stdout.contains("3 of 3 criteria passed"), "{stdout}");
}

#[test]
fn config_errors_exit_with_code_2() {
    // malformed scenario file
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "this is not a scenario").unwrap();
    let st = skycart().args(["simulate"]).arg(&bad).status().unwrap();
    assert_eq!(st.code(), Some(2));

    // governor subcommand on an ungoverned scenario
    let st = skycart().args(["rg", "paper-fig3"]).status().unwrap();
    assert_eq!(st.code(), Some(2));

    // unknown verify suite
    let st = skycart().args(["verify", "everything"]).status().unwrap();
    assert_eq!(st.code(), Some(2));

    // clap usage errors are also 2
    let st = skycart().args(["no-such-command"]).status().unwrap();
    assert_eq!(st.code(), Some(2));

    // --plot needs the CSV it would reference
    let st = skycart()
        .args(["simulate", "paper-fig3", "--plot", "/tmp/p.py"])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));
}

#[test]
fn rg_subcommand_runs_the_governed_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let toml = governed_short_scenario(dir.path());
    let out = skycart().args(["rg"]).arg(&toml).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("governor"), "{stdout}");
    assert!(stdout.contains("constraint violations = 0"), "{stdout}");
}

fn short_scenario(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("short.toml");
    std::fs::write(&path, SHORT_TOML).unwrap();
    path
}

fn governed_short_scenario(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("governed.toml");
    let mut text = SHORT_TOML.to_string();
    text.push_str("\n[rg]\nhorizon = 3.0\n");
    std::fs::write(&path, text).unwrap();
    path
}

const SHORT_TOML: &str = r#"
dynamics_model = "full"
dt = 0.001
duration = 2.0

[params]
m_u = 0.2
I_u = 0.000881
m_c = 2.0
m_b = 1.0
I_b = 0.33
L = 1.0
d_G = 0.5
g = 9.81

[limits]
U_max = 5.0
T_max = 1.3
F_max = 10.0

[controller]
thrust_law = "improved"

[controller.ugv]
k_p_x = 3.0
k_d_x = 3.0
lambda_1 = 10.0
lambda_2 = 2.0

[controller.outer]
k_p_alpha = 20.0
k_d_alpha = 5.0
epsilon = 1.0

[controller.inner]
k_p_beta = 0.5
k_d_beta = 0.01

[initial_state]
x = 0.0
x_dot = 0.0
alpha = 1.5707963267948966
alpha_dot = 0.0
beta = 1.5707963267948966
beta_dot = 0.0

[desired]
x_ref = 0.1
alpha_ref = 1.6
"#;
