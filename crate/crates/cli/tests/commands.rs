use manner_core::world::WorldConfig;
use manner_itl::commands::{check, demo, resolve_config, run};

#[test]
fn run_writes_both_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = WorldConfig::fully_expressed();
    cfg.situations_per_trial = 20;
    let mut out = Vec::new();
    let o = run(&cfg, &["full", "random"], 3, dir.path(), &mut out).unwrap();
    assert!(o.regret_csv.is_file());
    assert!(o.curves_csv.is_file());
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("full vs random"));
    assert_eq!(o.result.trials["full"].len(), 3);
}

#[test]
fn check_prints_one_line_per_criterion() {
    let mut out = Vec::new();
    let reports = check(&WorldConfig::fully_expressed(), &WorldConfig::partial(), &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    for id in ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8"] {
        assert_eq!(
            text.lines().filter(|l| l.starts_with(&format!("{id} "))).count(),
            1,
            "{id}"
        );
    }
    assert_eq!(reports.len(), 8);
}

#[test]
fn demo_narrates_each_step() {
    let mut out = Vec::new();
    demo(&WorldConfig::fully_expressed(), "full", 12, 0, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with('#')).count(), 12);
    assert!(text.contains("rules:"));
}

#[test]
fn config_resolution() {
    assert_eq!(resolve_config(None).unwrap(), WorldConfig::fully_expressed());
    assert_eq!(resolve_config(Some("partial")).unwrap(), WorldConfig::partial());
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../config/partial.toml");
    assert_eq!(resolve_config(Some(path)).unwrap(), WorldConfig::partial());
    assert!(resolve_config(Some("nowhere")).is_err());
}
