//! Every example runs to completion and prints what it promises.

use std::process::Command;

fn run_example(name: &str) -> String {
    // Built through cargo so the binary always matches the current sources.
    let release = std::env::current_exe().unwrap().ancestors().any(|p| p.ends_with("release"));
    let mut cmd = Command::new(env!("CARGO"));
    cmd.args(["run", "-q", "--example", name]).current_dir(env!("CARGO_MANIFEST_DIR"));
    if release {
        cmd.arg("--release");
    }
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn examples_run() {
    let expect = [
        ("model_basics", "XYI: 43 parameters, 31 non-gauge"),
        ("fiducial_selection", "rank 4/4"),
        ("germ_selection", "amplified per model [25]"),
        ("build_design", "plaquettes"),
        ("per_germ_fpr", "circuits: full"),
        ("random_fpr", "keeps  4 of 36"),
        ("certify", "robust: 2350 circuits, 25 growing, 6 plateaued"),
        ("simulate", "log-likelihood"),
        ("wallclock", "transmon upload, 104002 circuits: 1041 s"),
    ];
    for (name, text) in expect {
        let out = run_example(name);
        assert!(out.contains(text), "{name} output lacks {text:?}:\n{out}");
    }
}
