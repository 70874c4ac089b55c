//! End-to-end checks of the `zodiac-lab` binary.

use std::path::Path;
use std::process::{Command, Output};

use zodiac_lab::eval::{read_accuracy_summary, read_confusion_csv, EvaluationReport};
use zodiac_lab::lexicon::LexiconDocument;
use zodiac_lab::models::io::load_model;
use zodiac_lab::synthpop::{read_population_csv, write_population_csv, GenerationConfig};

fn zodiac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zodiac-lab"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) -> String {
    let text = r#"{
  "generation": { "population_size": 400, "signal_probability": 0.5, "seed": 3 },
  "models": [
    { "kind": "logreg", "seed": 1, "logreg": { "epochs": 10 } },
    { "kind": "forest", "seed": 1, "forest": { "n_trees": 8 } },
    { "kind": "mlp", "seed": 1, "mlp": { "epochs": 5, "hidden_units": 16 } }
  ],
  "evaluation": { "k_folds": 3, "permutation_repetitions": 2, "experiment_seed": 9 }
}
"#;
    let path = dir.join("small.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn export_lexicon_is_complete_and_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert!(zodiac(&["export-lexicon", "--out", s(&a)]).status.success());
    assert!(zodiac(&["export-lexicon", "--out", s(&b)]).status.success());
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let doc: LexiconDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.descriptors.len(), 100);
    assert_eq!(doc.assignments.0.len(), 12);
    assert!(doc.assignments.0.iter().all(|(_, ids)| ids.len() == 10));
    doc.into_parts().unwrap();
}

#[test]
fn generate_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(zodiac(&["generate", "--config", &cfg, "--out", s(&a)]).status.success());
    assert!(zodiac(&["generate", "--config", &cfg, "--out", s(&b)]).status.success());
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(bytes.iter().filter(|&&c| c == b'\n').count(), 401);

    let sidecar = std::fs::read_to_string(dir.path().join("a.config.json")).unwrap();
    let gen: GenerationConfig = serde_json::from_str(&sidecar).unwrap();
    assert_eq!(gen.population_size, 400);
    assert_eq!(gen.signal_probability, 0.5);

    // the CSV reads back and re-serializes to the same bytes
    let pop = read_population_csv(&bytes[..], gen).unwrap();
    let mut again = Vec::new();
    write_population_csv(&pop, &mut again).unwrap();
    assert_eq!(again, bytes);
}

#[test]
fn seed_flag_changes_population() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(zodiac(&["generate", "--config", &cfg, "--out", s(&a)]).status.success());
    assert!(zodiac(&["generate", "--config", &cfg, "--out", s(&b), "--seed", "4"]).status.success());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn invalid_probability_exits_2_naming_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"generation\": {\n    \"signal_probability\": 1.7\n  }\n}\n").unwrap();
    let out = zodiac(&["generate", "--config", s(&path), "--out", s(&dir.path().join("x.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:3") && err.contains("generation.signal_probability"), "{err}");
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn missing_config_exits_3() {
    let out = zodiac(&["run", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn divergence_exits_4_naming_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("diverge.json");
    std::fs::write(
        &path,
        r#"{"generation": {"population_size": 200},
            "models": [{"kind": "logreg", "logreg": {"learning_rate": 1e300, "epochs": 5}}],
            "evaluation": {"permutation_repetitions": 1}}"#,
    )
    .unwrap();
    let out = zodiac(&["run", "--config", s(&path), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("logreg"));
}

#[test]
fn run_writes_parseable_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out_dir = dir.path().join("results");
    let models_dir = dir.path().join("models");
    let out = zodiac(&[
        "run",
        "--config",
        &cfg,
        "--out",
        s(&out_dir),
        "--dump-features",
        "--save-models",
        s(&models_dir),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(out_dir.join("report.json")).unwrap();
    let report = EvaluationReport::from_json(&text).unwrap();
    assert_eq!(report.to_json().unwrap(), text);
    assert_eq!(report.models.len(), 3);

    let summary = std::fs::read(out_dir.join("accuracy_summary.csv")).unwrap();
    assert_eq!(read_accuracy_summary(&summary[..]).unwrap(), report.summary_rows());

    for m in &report.models {
        let csv = std::fs::read(out_dir.join(format!("confusion_{}.csv", m.kind))).unwrap();
        assert_eq!(read_confusion_csv(&csv[..]).unwrap(), m.confusion);
    }

    let svg = std::fs::read_to_string(out_dir.join("accuracy_comparison.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let groups: Vec<_> = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("model-group"))
        .collect();
    assert_eq!(groups.len(), 3);
    for g in &groups {
        let bars: Vec<_> = g.descendants().filter(|n| n.has_tag_name("rect")).collect();
        assert_eq!(bars.len(), 2);
    }
    for class in ["baseline uniform", "baseline bayes"] {
        assert!(doc.descendants().any(|n| n.attribute("class") == Some(class)));
    }

    let train_csv = std::fs::read_to_string(out_dir.join("features_train.csv")).unwrap();
    assert_eq!(train_csv.lines().count(), report.n_train + 1);
    assert!(train_csv.starts_with("sign_Aries,"));
    assert!(out_dir.join("standardizer.json").exists());

    for m in &report.models {
        let model = load_model(&models_dir.join(format!("model_{}.json", m.kind))).unwrap();
        assert_eq!(model.kind(), m.kind);
        assert_eq!(model.input_width(), 28);
    }
}

#[test]
fn models_flag_filters_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out_dir = dir.path().join("r");
    let out = zodiac(&["run", "--config", &cfg, "--out", s(&out_dir), "--models", "logreg"]);
    assert!(out.status.success());
    let report = EvaluationReport::from_json(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.models.len(), 1);
    assert!(!out_dir.join("confusion_forest.csv").exists());

    let bad = zodiac(&["run", "--config", &cfg, "--out", s(&out_dir), "--models", "svm"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(zodiac(&["fly"]).status.code(), Some(2));
}
