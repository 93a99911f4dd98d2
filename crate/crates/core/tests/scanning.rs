use k3zeta::arith::Zmod;
use k3zeta::counter::VarietyModel;
use k3zeta::families::preset;
use k3zeta::mpoly::parse;
use k3zeta::scan::{analyze_sextic, family_scan, AnalysisOptions, ParamSelection, RowStatus, ScanOptions};
use k3zeta::weil::validate_weil;

#[test]
fn too_few_counts_is_a_precision_error() {
    let f = parse(k3zeta::EXAMPLE_SEXTIC, &Zmod::new(7).unwrap(), None).unwrap();
    let m = VarietyModel::double_cover(f).unwrap();
    // three counts cannot fix a degree-22 polynomial
    let e = analyze_sextic(&m, None, &AnalysisOptions { n: Some(3), ..Default::default() }).unwrap_err();
    assert_eq!(e.exit_code(), 3, "{e}");
}

#[test]
fn cm_family_ranks_follow_the_prime() {
    let fam = preset("mu7").unwrap();
    let opts =
        ScanOptions { params: ParamSelection::All, jobs: 2, checkpoint: None, analysis: AnalysisOptions::default() };
    let report = family_scan(fam, &[29, 31], &opts).unwrap();
    let ranks: Vec<Option<u32>> = report.rows.iter().map(|r| r.picard_upper).collect();
    assert_eq!(ranks, [Some(16), Some(22)]);
    assert_eq!(report.per_prime.len(), 2);
    assert!(report.rows.iter().all(|r| r.status == RowStatus::Ok));
    let csv = report.to_csv();
    assert_eq!(csv.lines().count(), 3);
    for s in &report.per_prime {
        assert_eq!(s.splitting, fam.splitting_class(s.p).name());
    }
    assert!(report.rows.iter().all(|r| r.ordinary.is_some()));
    let mu9 = preset("mu9").unwrap();
    let a = analyze_sextic(
        &mu9.specialize(13, &[])
            .map(|s| match s {
                k3zeta::families::Specialization::Model(m) => m.model,
                _ => panic!("mu9 excluded at 13"),
            })
            .unwrap(),
        Some(&mu9.field),
        &AnalysisOptions::default(),
    )
    .unwrap();
    assert!(a.chi2.iter().all(|w| validate_weil(w, &a.counts_resolved())));
}

#[test]
fn checkpoint_resume_matches_fresh_run() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("scan.jsonl");
    let fam = preset("v2a").unwrap();
    let opts = |jobs| ScanOptions {
        params: ParamSelection::Sample(3),
        jobs,
        checkpoint: Some(ck.clone()),
        analysis: AnalysisOptions::default(),
    };
    let first = family_scan(fam, &[17], &opts(1)).unwrap();
    // truncate to a torn line: the damaged row is recomputed
    let text = std::fs::read_to_string(&ck).unwrap();
    let keep: Vec<&str> = text.lines().take(2).collect();
    std::fs::write(&ck, format!("{}\n{{\"family\":", keep.join("\n"))).unwrap();
    let second = family_scan(fam, &[17], &opts(2)).unwrap();
    assert_eq!(serde_json::to_string(&first).unwrap(), serde_json::to_string(&second).unwrap());
}
