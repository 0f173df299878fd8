//! End-to-end tests of the `presuppose` binary: output formats, resume,
//! cache behavior, exit codes, and the report subcommands.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use presuppose::evaldata::{read_predictions, write_canonical, DatasetInstance, Split};
use presuppose::llm::MockProvider;
use presuppose::prompts::PromptRenderer;
use presuppose::types::{Corpus, InputKind, Label, QuestionRecord};

const MODEL: &str = "mock-model";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_presuppose"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let output = cmd.output().expect("spawn presuppose");
    assert!(
        output.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

fn instance(id: &str, text: &str, gold: u8) -> DatasetInstance {
    DatasetInstance {
        id: id.into(),
        question_text: text.into(),
        gold_label: Label::from_code(gold).unwrap(),
        gold_evidence: None,
        split: Split::Test,
        corpus: Corpus::Custom,
    }
}

/// Three questions with scripted direct-identification replies.
fn direct_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let renderer = PromptRenderer::builtin(MODEL);
    let mock = MockProvider::new();
    let data = [
        ("d1", "When did they stop using lead in pencils?", "Yes"),
        ("d2", "Why is the sky blue?", "No"),
        ("d3", "Who is the Duke of Oxford?", "No"),
    ];
    let mut instances = Vec::new();
    for (id, text, reply) in data {
        let req = renderer.render_identify(text, InputKind::Question, None).unwrap();
        mock.script(&req, reply);
        let gold = if reply == "Yes" { 0 } else { 1 };
        instances.push(instance(id, text, gold));
    }
    let script = dir.join("script.json");
    mock.save_script(&script).unwrap();
    let dataset = dir.join("dataset.jsonl");
    write_canonical(&dataset, &instances).unwrap();
    (script, dataset)
}

#[test]
fn run_eval_compare_cost_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (script, dataset) = direct_fixture(dir.path());
    let out = dir.path().join("preds.jsonl");

    run_ok(bin().args([
        "--mock-script", script.to_str().unwrap(),
        "--model", MODEL,
        "run",
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
        "--out", out.to_str().unwrap(),
    ]));
    let records = read_predictions(&out).unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!(records[0].label.code(), 0);
    assert!(records[0].assumptions.is_none());

    // Predictions match gold by construction: accuracy 1.0.
    let eval_out = run_ok(bin().args([
        "eval",
        "--preds", out.to_str().unwrap(),
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
        "--json-out", dir.path().join("report.json").to_str().unwrap(),
    ]));
    let stdout = String::from_utf8_lossy(&eval_out.stdout).to_string();
    assert!(stdout.contains("accuracy             1.0000"), "stdout: {stdout}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["n"], 3);
    assert_eq!(report["accuracy"], 1.0);

    // Comparing a file with itself: no discordance.
    let cmp_out = run_ok(bin().args([
        "compare",
        "--preds-a", out.to_str().unwrap(),
        "--preds-b", out.to_str().unwrap(),
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
    ]));
    let stdout = String::from_utf8_lossy(&cmp_out.stdout).to_string();
    assert!(stdout.contains("b=0 c=0 p=1.000000 method=exact"), "stdout: {stdout}");
    assert!(!stdout.contains('*'));

    let cost_out = run_ok(bin().args(["cost", "--preds", out.to_str().unwrap()]));
    let stdout = String::from_utf8_lossy(&cost_out.stdout).to_string();
    assert!(stdout.contains("questions                 3"), "stdout: {stdout}");
    assert!(stdout.contains("mean llm calls            1.0000"), "stdout: {stdout}");
    assert!(stdout.contains("estimated (chars/4)"), "stdout: {stdout}");
}

#[test]
fn rerun_with_warm_cache_makes_zero_provider_calls() {
    let dir = tempfile::tempdir().unwrap();
    let (script, dataset) = direct_fixture(dir.path());
    let cache = dir.path().join("cache");
    let out1 = dir.path().join("cold.jsonl");
    let out2 = dir.path().join("warm.jsonl");

    run_ok(bin().args([
        "--mock-script", script.to_str().unwrap(),
        "--cache-dir", cache.to_str().unwrap(),
        "--model", MODEL,
        "run",
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
        "--out", out1.to_str().unwrap(),
    ]));

    // Empty the script: any provider call would now fail, so success proves
    // every completion came from the cache.
    std::fs::write(&script, "{}").unwrap();
    run_ok(bin().args([
        "--mock-script", script.to_str().unwrap(),
        "--cache-dir", cache.to_str().unwrap(),
        "--model", MODEL,
        "run",
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
        "--out", out2.to_str().unwrap(),
    ]));
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
}

#[test]
fn rerun_on_same_output_skips_done_ids() {
    let dir = tempfile::tempdir().unwrap();
    let (script, dataset) = direct_fixture(dir.path());
    let out = dir.path().join("preds.jsonl");
    let args = |script: &Path, dataset: &Path, out: &Path| {
        vec![
            "--mock-script".to_string(), script.display().to_string(),
            "--model".to_string(), MODEL.to_string(),
            "run".to_string(),
            "--dataset".to_string(), dataset.display().to_string(),
            "--corpus".to_string(), "custom".to_string(),
            "--out".to_string(), out.display().to_string(),
        ]
    };
    run_ok(bin().args(args(&script, &dataset, &out)));
    let first = std::fs::read(&out).unwrap();
    // All ids done: second run appends nothing, even with an empty script.
    std::fs::write(&script, "{}").unwrap();
    run_ok(bin().args(args(&script, &dataset, &out)));
    assert_eq!(std::fs::read(&out).unwrap(), first);
}

#[test]
fn unscripted_question_exits_nonzero_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let renderer = PromptRenderer::builtin(MODEL);
    let mock = MockProvider::new();
    // Script only two of three questions.
    let instances = vec![
        instance("ok-1", "Why is the sky blue?", 1),
        instance("missing", "Why is the grass loud?", 1),
        instance("ok-2", "Who is the Duke of Oxford?", 1),
    ];
    for inst in &instances {
        if inst.id != "missing" {
            let req = renderer
                .render_identify(&inst.question_text, InputKind::Question, None)
                .unwrap();
            mock.script(&req, "No");
        }
    }
    let script = dir.path().join("script.json");
    mock.save_script(&script).unwrap();
    let dataset = dir.path().join("dataset.jsonl");
    write_canonical(&dataset, &instances).unwrap();
    let out = dir.path().join("preds.jsonl");

    let output = bin()
        .args([
            "--mock-script", script.to_str().unwrap(),
            "--model", MODEL,
            "run",
            "--dataset", dataset.to_str().unwrap(),
            "--corpus", "custom",
            "--out", out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr).to_string();
    assert!(stderr.contains("missing"), "stderr: {stderr}");
    // Partial output is preserved.
    let records = read_predictions(&out).unwrap();
    assert_eq!(records.len(), 2);
}

#[test]
fn empty_dataset_succeeds_with_no_output_lines() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = dir.path().join("empty.jsonl");
    std::fs::write(&dataset, "").unwrap();
    let script = dir.path().join("script.json");
    std::fs::write(&script, "{}").unwrap();
    let out = dir.path().join("statements.jsonl");
    run_ok(bin().args([
        "--mock-script", script.to_str().unwrap(),
        "transform",
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
        "--out", out.to_str().unwrap(),
    ]));
    let raw = std::fs::read_to_string(&out).unwrap();
    // Just the config header, no statement lines.
    assert_eq!(raw.lines().count(), 1);
    assert!(raw.contains("run_config"));
}

#[test]
fn transform_command_writes_statements() {
    let dir = tempfile::tempdir().unwrap();
    let renderer = PromptRenderer::builtin(MODEL);
    let mock = MockProvider::new();
    let instances = vec![
        instance("t1", "What kind of meat can be made into soybean milk?", 0),
        instance("t2", "Why is the sky blue?", 1),
    ];
    for (inst, statement) in instances.iter().zip([
        "Soybean milk can be made from meat.",
        "The sky is blue.",
    ]) {
        let q = QuestionRecord::new(&inst.id, &inst.question_text, Corpus::Custom).unwrap();
        mock.script(&renderer.render_transform(&q), statement);
    }
    let script = dir.path().join("script.json");
    mock.save_script(&script).unwrap();
    let dataset = dir.path().join("dataset.jsonl");
    write_canonical(&dataset, &instances).unwrap();
    let out = dir.path().join("statements.jsonl");

    run_ok(bin().args([
        "--mock-script", script.to_str().unwrap(),
        "--model", MODEL,
        "transform",
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
        "--out", out.to_str().unwrap(),
    ]));
    let raw = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<serde_json::Value> = raw
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(lines[0].get("run_config").is_some());
    assert_eq!(lines[1]["id"], "t1");
    assert_eq!(lines[1]["statement"], "Soybean milk can be made from meat.");
    assert_eq!(lines.len(), 3);
}

#[test]
fn retrieve_command_ranks_fixture_evidence() {
    let dir = tempfile::tempdir().unwrap();
    let question = "When did they stop using lead in pencils?";
    let url = "https://en.wikipedia.org/wiki/Pencil";
    let search_fixture = dir.path().join("search.json");
    std::fs::write(
        &search_fixture,
        serde_json::to_string(&HashMap::from([(
            question,
            vec![serde_json::json!({"url": url})],
        )]))
        .unwrap(),
    )
    .unwrap();
    let pages_fixture = dir.path().join("pages.json");
    std::fs::write(
        &pages_fixture,
        serde_json::to_string(&HashMap::from([(
            url,
            "<p>Lead has never been used in pencils for writing. Graphite is used in pencils. Snakes are long.</p>",
        )]))
        .unwrap(),
    )
    .unwrap();
    let config = dir.path().join("config.toml");
    std::fs::write(
        &config,
        format!(
            "[llm]\nkind = \"mock\"\nscript = \"{}\"\n\n[search]\nkind = \"fixture\"\nfixture = \"{}\"\npages_fixture = \"{}\"\n",
            dir.path().join("script.json").display(),
            search_fixture.display(),
            pages_fixture.display(),
        ),
    )
    .unwrap();
    std::fs::write(dir.path().join("script.json"), "{}").unwrap();

    let instances = vec![
        instance("r1", question, 0),
        instance("r2", "A question with no search hits?", 1),
    ];
    let dataset = dir.path().join("dataset.jsonl");
    write_canonical(&dataset, &instances).unwrap();
    let out = dir.path().join("evidence.jsonl");

    run_ok(bin().args([
        "--config", config.to_str().unwrap(),
        "retrieve",
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
        "--out", out.to_str().unwrap(),
        "--k", "2",
    ]));
    let raw = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<serde_json::Value> =
        raw.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[1]["id"], "r1");
    assert_eq!(lines[1]["origin"], "retrieved_by_question");
    let sentences = lines[1]["sentences"].as_array().unwrap();
    assert_eq!(sentences.len(), 2, "k cap honored: {sentences:?}");
    assert_eq!(sentences[0]["source_url"], url);
    assert_eq!(
        sentences[0]["text"],
        "Lead has never been used in pencils for writing."
    );
    // Zero hits: empty sentence list, not an error.
    assert_eq!(lines[2]["id"], "r2");
    assert_eq!(lines[2]["sentences"].as_array().unwrap().len(), 0);
}

#[test]
fn tag_errors_command_tabulates_categories() {
    let dir = tempfile::tempdir().unwrap();
    let (script, dataset) = direct_fixture(dir.path());
    let out = dir.path().join("preds.jsonl");
    run_ok(bin().args([
        "--mock-script", script.to_str().unwrap(),
        "--model", MODEL,
        "run",
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
        "--out", out.to_str().unwrap(),
    ]));

    // Flip one gold label so the predictions contain exactly one error.
    let mut instances = presuppose::evaldata::load_canonical(&dataset).unwrap();
    instances[0].gold_label = Label::AllValid; // prediction was 0 -> now an FP
    let flipped = dir.path().join("flipped.jsonl");
    write_canonical(&flipped, &instances).unwrap();
    let tags = dir.path().join("tags.json");
    std::fs::write(&tags, r#"{"d1": "Irrelevant Evidence"}"#).unwrap();

    let output = run_ok(bin().args([
        "tag-errors",
        "--preds", out.to_str().unwrap(),
        "--dataset", flipped.to_str().unwrap(),
        "--corpus", "custom",
        "--tags", tags.to_str().unwrap(),
    ]));
    let stdout = String::from_utf8_lossy(&output.stdout).to_string();
    assert!(stdout.contains("Irrelevant Evidence"), "stdout: {stdout}");
    assert!(stdout.contains("tagged errors: 1 FP, 0 FN"), "stdout: {stdout}");
}

#[test]
fn cost_command_reports_mean_assumptions() {
    use presuppose::evaldata::{write_predictions, PredictedAssumption, PredictionRecord, RunHeader};
    use presuppose::types::UsageRecord;

    let dir = tempfile::tempdir().unwrap();
    let preds = dir.path().join("atomic.jsonl");
    let per_question = [5usize, 5, 5, 5, 5, 5, 5, 4, 4, 4];
    let records: Vec<PredictionRecord> = per_question
        .iter()
        .enumerate()
        .map(|(i, count)| PredictionRecord {
            id: format!("a{i}"),
            label: Label::AllValid,
            strategy: "atomic+question+none+k10".into(),
            assumptions: Some(
                (0..*count)
                    .map(|j| PredictedAssumption {
                        text: format!("Assumption {j}."),
                        label: Label::AllValid,
                    })
                    .collect(),
            ),
            answer: Some("The question's assumptions hold.".into()),
            usage: UsageRecord {
                prompt_tokens: 100,
                completion_tokens: 10,
                llm_calls: 1 + *count as u64,
                estimated: false,
            },
            flags: None,
        })
        .collect();
    write_predictions(&preds, &RunHeader { run_config: serde_json::json!({}) }, &records)
        .unwrap();

    let output = run_ok(bin().args(["cost", "--preds", preds.to_str().unwrap()]));
    let stdout = String::from_utf8_lossy(&output.stdout).to_string();
    assert!(stdout.contains("mean assumptions          4.7000"), "stdout: {stdout}");
    assert!(stdout.contains("provider-reported"), "stdout: {stdout}");
}

#[test]
fn rerunning_from_the_echoed_header_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let (script, dataset) = direct_fixture(dir.path());
    let out1 = dir.path().join("first.jsonl");
    run_ok(bin().args([
        "--mock-script", script.to_str().unwrap(),
        "--model", MODEL,
        "run",
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
        "--out", out1.to_str().unwrap(),
        "--k", "7",
    ]));

    // Reconstruct the command line from the echoed header alone.
    let raw = std::fs::read_to_string(&out1).unwrap();
    let header: serde_json::Value = serde_json::from_str(raw.lines().next().unwrap()).unwrap();
    let cfg = &header["run_config"];
    let evidence_flag = match cfg["strategy"]["evidence_mode"].as_str().unwrap() {
        "none" => "none",
        "gold" => "gold",
        "retrieved_by_question" => "question",
        "retrieved_by_statement" => "statement",
        other => panic!("unexpected evidence mode {other}"),
    };
    let family = cfg["strategy"]["family"].as_str().unwrap().replace('_', "-");
    let out2 = dir.path().join("second.jsonl");
    run_ok(bin().args([
        "--mock-script", cfg["config"]["llm"]["script"].as_str().unwrap(),
        "--model", cfg["config"]["llm"]["model"].as_str().unwrap(),
        cfg["command"].as_str().unwrap(),
        "--dataset", cfg["dataset"].as_str().unwrap(),
        "--corpus", cfg["corpus"].as_str().unwrap(),
        "--out", out2.to_str().unwrap(),
        "--family", &family,
        "--input-kind", cfg["strategy"]["input_kind"].as_str().unwrap(),
        "--evidence", evidence_flag,
        "--k", &cfg["strategy"]["k"].as_u64().unwrap().to_string(),
        "--fv-threshold", &cfg["strategy"]["fv_threshold"].as_f64().unwrap().to_string(),
    ]));
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
}

/// (id, question, [(assumption, validation reply)], gold label code).
type DemoQuestion = (&'static str, &'static str, Vec<(&'static str, &'static str)>, u8);

/// The committed offline demo under fixtures/demo. One question (the moon
/// one) is deliberately mislabeled relative to the scripted prediction so
/// eval and tag-errors have an error to show.
fn demo_questions() -> Vec<DemoQuestion> {
    vec![
        (
            "demo-pencils",
            "When did they stop using lead in pencils?",
            vec![
                ("Pencils were once made using lead.", "Yes"),
                ("Pencils no longer contain lead.", "No"),
                ("There was a specific time when people stopped using lead in pencils.", "Yes"),
            ],
            0,
        ),
        (
            "demo-icecubes",
            "Why are ice cubes mostly clear but icebergs are white?",
            vec![
                ("Ice cubes and icebergs are made of water.", "No"),
                ("Ice cubes are mostly clear.", "No"),
                ("Icebergs are white.", "No"),
                ("Ice cubes and icebergs can be different in color despite they are made of the same material.", "No"),
            ],
            1,
        ),
        (
            "demo-sanandreas",
            "When did the San Andreas Fault last erupt?",
            vec![
                ("The San Andreas Fault is a geological feature.", "No"),
                ("The San Andreas Fault can erupt.", "Yes"),
                ("The San Andreas Fault has erupted during a known time.", "Yes"),
            ],
            0,
        ),
        (
            "demo-kansas",
            "Which countries border Kansas?",
            vec![
                ("Kansas is a U.S. state.", "No"),
                ("Kansas shares a border with at least one country.", "Yes"),
            ],
            0,
        ),
        (
            "demo-sky",
            "Why is the sky blue?",
            vec![("The sky appears blue during the day.", "No")],
            1,
        ),
        (
            "demo-moon",
            "How can we see the moon in the middle of the day?",
            vec![
                ("The moon is visible in the middle of the day.", "No"),
                ("The moon is expected to be seen only at night.", "Yes"),
            ],
            1, // predicted 0: the one deliberate error
        ),
    ]
}

fn demo_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/demo")
}

fn build_demo_fixture() -> (MockProvider, Vec<DatasetInstance>, serde_json::Value) {
    let renderer = PromptRenderer::builtin(MODEL);
    let mock = MockProvider::new();
    let mut instances = Vec::new();
    for (id, question_text, assumptions, gold) in demo_questions() {
        let q = QuestionRecord::new(id, question_text, Corpus::Custom).unwrap();
        let enumeration: String = assumptions
            .iter()
            .enumerate()
            .map(|(i, (text, _))| format!("({}) {text}", i + 1))
            .collect::<Vec<_>>()
            .join("\n");
        mock.script(&renderer.render_atomic(&q), enumeration);
        for (text, reply) in &assumptions {
            let req = renderer.render_identify(text, InputKind::Statement, None).unwrap();
            mock.script(&req, *reply);
        }
        instances.push(instance(id, question_text, gold));
    }
    let tags = serde_json::json!({"demo-moon": "Ambiguous"});
    (mock, instances, tags)
}

/// Rewrites fixtures/demo; run after an intentional prompt-template change:
/// `cargo test -p presuppose --test cli regenerate_demo_fixtures -- --ignored`
#[test]
#[ignore = "regenerates the committed fixtures/demo files"]
fn regenerate_demo_fixtures() {
    let dir = demo_dir();
    std::fs::create_dir_all(&dir).unwrap();
    let (mock, instances, tags) = build_demo_fixture();
    mock.save_script(&dir.join("script.json")).unwrap();
    write_canonical(&dir.join("dataset.jsonl"), &instances).unwrap();
    std::fs::write(
        dir.join("tags.json"),
        serde_json::to_string_pretty(&tags).unwrap(),
    )
    .unwrap();
}

#[test]
fn committed_demo_fixtures_replay() {
    let dir = demo_dir();
    let script = dir.join("script.json");
    let dataset = dir.join("dataset.jsonl");
    let tags = dir.join("tags.json");
    assert!(
        script.exists() && dataset.exists() && tags.exists(),
        "fixtures/demo missing; run the regenerate_demo_fixtures test"
    );
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("demo-preds.jsonl");
    run_ok(bin().args([
        "--mock-script", script.to_str().unwrap(),
        "--model", MODEL,
        "run",
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
        "--out", out.to_str().unwrap(),
        "--family", "atomic",
        "--evidence", "none",
    ]));
    let records = read_predictions(&out).unwrap();
    assert_eq!(records.len(), 6);

    let eval_out = run_ok(bin().args([
        "eval",
        "--preds", out.to_str().unwrap(),
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
    ]));
    let stdout = String::from_utf8_lossy(&eval_out.stdout).to_string();
    // 5 of 6 correct by construction.
    assert!(stdout.contains("accuracy             0.8333"), "stdout: {stdout}");

    let tag_out = run_ok(bin().args([
        "tag-errors",
        "--preds", out.to_str().unwrap(),
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
        "--tags", tags.to_str().unwrap(),
    ]));
    let stdout = String::from_utf8_lossy(&tag_out.stdout).to_string();
    assert!(stdout.contains("tagged errors: 1 FP, 0 FN"), "stdout: {stdout}");
}

#[test]
fn header_echoes_effective_config() {
    let dir = tempfile::tempdir().unwrap();
    let (script, dataset) = direct_fixture(dir.path());
    let out = dir.path().join("preds.jsonl");
    run_ok(bin().args([
        "--mock-script", script.to_str().unwrap(),
        "--model", MODEL,
        "--concurrency", "1",
        "run",
        "--dataset", dataset.to_str().unwrap(),
        "--corpus", "custom",
        "--out", out.to_str().unwrap(),
        "--k", "5",
    ]));
    let raw = std::fs::read_to_string(&out).unwrap();
    let header: serde_json::Value = serde_json::from_str(raw.lines().next().unwrap()).unwrap();
    let config = &header["run_config"];
    assert_eq!(config["command"], "run");
    assert_eq!(config["strategy"]["k"], 5);
    assert_eq!(config["strategy"]["family"], "direct");
    assert_eq!(config["config"]["run"]["concurrency"], 1);
    assert_eq!(config["config"]["llm"]["model"], MODEL);
    assert_eq!(config["corpus"], "custom");
}
