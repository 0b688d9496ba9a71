use std::path::Path;
use std::process::Command;

use chiralchain::cli::config::{
    parse_config, FitSection, JobConfig, JobKind, JobSection, OutputSection, ParamOverride, Point,
    QuenchObservable, QuenchSection, SweepAxis, TimeGrid, AnalysisSection,
};
use chiralchain::cli::csv;
use chiralchain::ModelParams;
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chiralchain"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const PHASE: &str = r#"
[job]
kind = "phase-diagram"
name = "pd"

[model]
gamma = 0.5
h = -0.5
n = 64

[[sweep]]
param = "alpha"
min = 0.5
max = 2.5
steps = 5

[[sweep]]
param = "d"
min = 0.0
max = 2.0
steps = 4
"#;

const TABLE: &str = r#"
[job]
kind = "correlations"
name = "tab"

[model]
gamma = 0.5
n = 128

[[points]]
label = "gapless"
d = 1.5
h = 0.5
alpha = 1.3

[[points]]
label = "gapped"
d = 2.5
h = -0.5
alpha = 0.8

[fit]
r_max = 16
"#;

#[test]
fn output_is_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "pd.toml", PHASE);
    let mut outputs = Vec::new();
    for (k, workers) in ["1", "4", "4"].iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let (code, stdout, stderr) = run(&[
            "phase-diagram",
            "--config",
            &cfg,
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{stderr}");
        assert!(stdout.contains("pd.csv"));
        outputs.push(std::fs::read(out.join("pd.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn phase_diagram_csv_has_expected_columns_and_echo() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "pd.toml", PHASE);
    let out = dir.path().join("out");
    let (code, _, stderr) = run(&["phase-diagram", "-c", &cfg, "--out", out.to_str().unwrap(), "--plot"]);
    assert_eq!(code, 0, "{stderr}");
    let text = std::fs::read_to_string(out.join("pd.csv")).unwrap();
    assert!(text.starts_with("# chiralchain"));
    assert!(text.contains("# [model]"));
    let table = csv::parse(&text).unwrap();
    for col in ["alpha", "D", "gap", "chiral_order"] {
        table.column(col).unwrap();
    }
    assert_eq!(table.rows.len(), 20);
    // row-major grid: alpha is the slow axis
    let alpha = table.floats("alpha").unwrap();
    assert_eq!(alpha[0], alpha[3]);
    assert_ne!(alpha[3], alpha[4]);
    // every float carries 17 significant digits
    let gap_cell = &table.rows[0][table.column("gap").unwrap()];
    assert_eq!(gap_cell.split('e').next().unwrap().replace(['-', '.'], "").len(), 17);
    // chiral order vanishes wherever the gap is open
    let gap = table.floats("gap").unwrap();
    let ch = table.floats("chiral_order").unwrap();
    for (g, c) in gap.iter().zip(&ch) {
        if *g > 0.0 {
            assert!(c.abs() < 1e-6);
        }
    }
    for svg in ["pd_chiral_order.svg", "pd_gap.svg", "pd_fm_order.svg"] {
        let s = std::fs::read_to_string(out.join(svg)).unwrap();
        assert!(s.starts_with("<svg"));
    }
}

#[test]
fn correlations_job_reports_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tab.toml", TABLE);
    let out = dir.path().join("out");
    let (code, _, stderr) = run(&["correlations", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    let t = csv::read(&out.join("tab.csv")).unwrap();
    assert_eq!(t.strings("label").unwrap(), vec!["gapless", "gapped"]);
    for col in ["i_exponent", "i_r2", "cxx_exponent", "cxx_r2"] {
        assert!(t.floats(col).unwrap().iter().all(|v| v.is_finite()), "{col}");
    }
    let prof = csv::read(&out.join("tab_profile.csv")).unwrap();
    assert_eq!(prof.rows.len(), 2 * 64);
}

#[test]
fn overrides_and_flags_take_effect() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "pd.toml", PHASE);
    let out = dir.path().join("out");
    let (code, _, stderr) = run(&[
        "phase-diagram",
        "--config",
        &cfg,
        "--set",
        "job.name=renamed",
        "--set",
        "model.n=32",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    let t = csv::read(&out.join("renamed.csv")).unwrap();
    assert!(t.floats("n").unwrap().iter().all(|&n| n == 32.0));
}

#[test]
fn configuration_errors_exit_with_code_2_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[job]\nkind = \"entropy\"\n[model]\ngama = 0.5\n");
    let (code, _, stderr) = run(&["entropy", "--config", &bad]);
    assert_eq!(code, 2);
    let record: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(record["exit_code"], 2);
    assert_eq!(record["error"], "config");
    let msg = record["message"].as_str().unwrap();
    assert!(msg.contains("gama") && msg.contains("line 4"), "{msg}");

    let cfg = write(dir.path(), "pd.toml", PHASE);
    assert_eq!(run(&["quench", "--config", &cfg]).0, 2);
    assert_eq!(run(&["phase-diagram", "--config", &cfg, "--set", "model.n=7"]).0, 2);
    assert_eq!(run(&["phase-diagram", "--config", &cfg, "--set", "nonsense"]).0, 2);
    assert_eq!(run(&["phase-diagram"]).0, 2);
}

#[test]
fn shipped_reproduction_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/reproduce");
    let mut names: Vec<String> = std::fs::read_dir(&root)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".toml"))
        .collect();
    names.sort();
    for want in ["fig1", "fig2", "fig3", "fig4a", "fig4b", "fig5", "fig6", "fig7", "table1", "ceff_a", "ceff_b"] {
        assert!(names.contains(&format!("{want}.toml")), "missing {want}.toml");
    }
    for n in names {
        let text = std::fs::read_to_string(root.join(&n)).unwrap();
        let cfg = parse_config(&text).unwrap_or_else(|e| panic!("{n}: {e}"));
        assert!(!cfg.grid().unwrap().is_empty());
    }
}

fn model() -> impl Strategy<Value = ModelParams> {
    (0.0..=1.0f64, 0.0..=2.5f64, -1.5..=1.5f64, 0.3..=3.0f64, 2usize..=300, any::<bool>()).prop_map(
        |(gamma, d, h, alpha, half, kac)| {
            ModelParams::new(gamma, d, h, alpha, 2 * half).unwrap().with_kac(kac)
        },
    )
}

fn sweep() -> impl Strategy<Value = SweepAxis> {
    (
        prop_oneof![Just("gamma"), Just("d"), Just("h"), Just("alpha")],
        0.3..=1.0f64,
        1.0..=1.5f64,
        1usize..5,
    )
        .prop_map(|(param, min, max, steps)| SweepAxis {
            param: param.to_string(),
            min,
            max,
            steps,
            ..Default::default()
        })
}

fn job_config() -> impl Strategy<Value = JobConfig> {
    let kind = prop_oneof![
        Just(JobKind::PhaseDiagram),
        Just(JobKind::Correlations),
        Just(JobKind::Entropy),
        Just(JobKind::Quench),
    ];
    (
        kind,
        "[a-z][a-z0-9_]{0,8}",
        0usize..8,
        model(),
        proptest::collection::vec(sweep(), 0..3),
        proptest::option::of(4usize..20),
        proptest::option::of(1.0..100.0f64),
        proptest::option::of(0.3..=3.0f64),
        any::<bool>(),
    )
        .prop_map(|(kind, name, workers, model, sweep, r_max, t_min, post_alpha, plot)| {
            let quench = kind == JobKind::Quench;
            JobConfig {
                job: JobSection { kind, name, workers },
                model,
                post: quench.then(|| ParamOverride { alpha: post_alpha, ..Default::default() }),
                sweep,
                points: Vec::new(),
                fit: FitSection { r_max, t_min, ..Default::default() },
                quench: quench.then(|| QuenchSection {
                    observable: QuenchObservable::Steady,
                    t_start: 1.0,
                    t_end: 10.0,
                    t_steps: 5,
                    grid: TimeGrid::Linear,
                    m: 1,
                    n_site: 2,
                    block: 4,
                }),
                analysis: AnalysisSection::default(),
                output: OutputSection { plot, ..Default::default() },
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn config_serialization_round_trips(cfg in job_config()) {
        let text = cfg.to_toml().unwrap();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_toml().unwrap(), text);
    }

    #[test]
    fn explicit_points_round_trip(labels in proptest::collection::vec("[a-z]{1,6}", 1..4), h in -1.0..1.0f64) {
        let mut cfg = parse_config("[job]\nkind = \"correlations\"\n").unwrap();
        cfg.points = labels
            .into_iter()
            .map(|l| Point { label: Some(l), pre: ParamOverride { h: Some(h), ..Default::default() }, post: None })
            .collect();
        let text = cfg.to_toml().unwrap();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
