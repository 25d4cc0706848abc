use std::path::Path;
use std::process::{Command, Output};

fn nema(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nema")).args(args).current_dir(cwd).env_remove("NEMA_WORKERS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn generate_then_describe_reports_default_counts() {
    let dir = tempfile::tempdir().unwrap();
    let gen = nema(&["generate", "6", "worm.json"], dir.path());
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    let out = nema(&["describe", "worm.json"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    let value = |key: &str| -> String {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("no `{key}` row in {text}"));
        line.split_whitespace().last().unwrap().to_string()
    };
    assert_eq!(value("motor"), "72");
    assert_eq!(value("muscle"), "96");
    assert_eq!(value("neurons"), "168");
}

#[test]
fn describe_minimal_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = r#"{
  "neurons": [
    {"id": 0, "name": "DB1", "class": "Motor", "subtype": "DB", "segment": 0, "polarity": "Excitatory"},
    {"id": 1, "name": "MD1", "class": "Muscle", "subtype": "MuscleDorsal", "segment": 0, "polarity": "Excitatory"}
  ],
  "synapses": [{"pre": 0, "post": 1, "sign": 1, "count": 1}]
}"#;
    std::fs::write(dir.path().join("two.json"), file).unwrap();
    let out = nema(&["describe", "two.json"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("neurons") && l.ends_with(" 2")));
    assert!(text.lines().any(|l| l.starts_with("synapses") && l.ends_with(" 1")));
    assert!(text.lines().any(|l| l.starts_with("sparsity") && l.ends_with(" 0.500000")));
}

#[test]
fn missing_files_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["describe", "absent.json"][..], &["run", "absent.toml"][..], &["resume", "absent.bin"][..]] {
        let out = nema(args, dir.path());
        assert!(!out.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn invalid_config_fails_before_writing_anything() {
    let dir = tempfile::tempdir().unwrap();
    let shown = stdout(&nema(&["show", "desk_biophysical_realism"], dir.path()));
    let broken = shown
        .replace("seeds = [0, 1, 2, 3, 4]", "seeds = []")
        .replace("output_dir = \"runs/desk_biophysical_realism\"", "output_dir = \"out\"");
    std::fs::write(dir.path().join("bad.toml"), broken).unwrap();
    let out = nema(&["run", "bad.toml"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seeds"));
    assert!(!dir.path().join("out").exists());
}

fn tiny_config(dir: &Path, generations: u64) -> String {
    let shown = stdout(&nema(&["show", "desk_biophysical_realism"], dir));
    let mut lines = Vec::new();
    let mut section = String::new();
    for line in shown.lines() {
        if line.starts_with('[') {
            section = line.to_string();
        }
        let key = line.split(" = ").next().unwrap_or("");
        let replaced = match (section.as_str(), key) {
            ("[experiment]", "arms") => "arms = [\"exact_connectome:izhikevich\"]".to_string(),
            ("[experiment]", "seeds") => "seeds = [7]".to_string(),
            ("[experiment]", "output_dir") => "output_dir = \"out\"".to_string(),
            ("[experiment]", "checkpoint_every") => "checkpoint_every = 2".to_string(),
            ("[network]", "segments") => "segments = 1".to_string(),
            ("[network]", "substeps") => "substeps = 2".to_string(),
            ("[swimmer]", "episode_length") => "episode_length = 30".to_string(),
            ("[ga]", "population_size") => "population_size = 6".to_string(),
            ("[ga]", "elite_size") => "elite_size = 2".to_string(),
            ("[ga]", "generations") => format!("generations = {generations}"),
            ("[es]", "population_size") => "population_size = 4".to_string(),
            ("[es]", "epochs") => "epochs = 2".to_string(),
            _ => line.to_string(),
        };
        lines.push(replaced);
    }
    lines.join("\n")
}

#[test]
fn run_and_resume_produce_identical_artifacts() {
    let a = tempfile::tempdir().unwrap();
    std::fs::write(a.path().join("c.toml"), tiny_config(a.path(), 4)).unwrap();
    let out = nema(&["run", "--quiet", "c.toml"], a.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run_dir = a.path().join("out");
    for f in ["config.toml", "summary.csv", "timing.csv", "exact_connectome-izhikevich/curve_7.csv"] {
        assert!(run_dir.join(f).is_file(), "{f}");
    }
    let curve = std::fs::read_to_string(run_dir.join("exact_connectome-izhikevich/curve_7.csv")).unwrap();
    assert_eq!(curve.lines().count(), 1 + 5);

    let again = tempfile::tempdir().unwrap();
    std::fs::write(again.path().join("c.toml"), tiny_config(again.path(), 4)).unwrap();
    assert!(nema(&["run", "--quiet", "c.toml"], again.path()).status.success());
    let summary = |d: &Path| std::fs::read(d.join("out/summary.csv")).unwrap();
    assert_eq!(summary(a.path()), summary(again.path()));

    let b = tempfile::tempdir().unwrap();
    std::fs::write(b.path().join("c.toml"), tiny_config(b.path(), 2)).unwrap();
    assert!(nema(&["run", "--quiet", "c.toml"], b.path()).status.success());
    assert_ne!(summary(a.path()), summary(b.path()));
    let resumed = nema(
        &["resume", "--quiet", "--generations", "4", "out/exact_connectome-izhikevich/checkpoint_7.bin"],
        b.path(),
    );
    assert!(resumed.status.success(), "{}", String::from_utf8_lossy(&resumed.stderr));
    assert_eq!(summary(a.path()), summary(b.path()));
    assert_eq!(
        std::fs::read_to_string(b.path().join("out/exact_connectome-izhikevich/curve_7.csv")).unwrap(),
        curve
    );
}

#[test]
fn workers_variable_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), tiny_config(dir.path(), 1)).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nema"))
        .args(["run", "--quiet", "c.toml"])
        .current_dir(dir.path())
        .env("NEMA_WORKERS", "zero")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("NEMA_WORKERS"));

    let out = Command::new(env!("CARGO_BIN_EXE_nema"))
        .args(["run", "--quiet", "c.toml"])
        .current_dir(dir.path())
        .env("NEMA_WORKERS", "3")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn show_prints_a_loadable_preset() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["desk_limitations", "full_architecture_statistics"] {
        let out = nema(&["show", name], dir.path());
        assert!(out.status.success());
        assert!(stdout(&out).contains(&format!("name = \"{name}\"")));
    }
    assert!(!nema(&["show", "desk_unknown"], dir.path()).status.success());
}
