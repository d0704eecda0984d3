use resolvent_lab::harness::{self, ExperimentConfig, ExperimentKind};

#[test]
fn conditional_overlap_mean_follows_one_minus_modulus_squared() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::template(ExperimentKind::ChalkerMehlig);
    cfg.output_dir = dir.path().to_path_buf();
    cfg.extras.z_moduli = vec![0.0, 0.3, 0.5, 0.7];
    let r = harness::run(&cfg).unwrap();
    assert_eq!(r.config.ensemble.n(), 500);
    for m in &cfg.extras.z_moduli {
        let err = r.estimate(&format!("relative_error[{m}]")).unwrap();
        assert!(err < 0.1, "|z|={m}: relative error {err}");
    }
}
