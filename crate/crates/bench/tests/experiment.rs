use std::fs;
use std::path::Path;

use mubqp_bench::eaf::export_eaf;
use mubqp_bench::experiment::{
    read_reports, run_experiment, ExperimentConfig, FrontPoint, MethodId, ReferenceSource,
    RunRecord, RunReport,
};
use mubqp_bench::format::save_instance;
use mubqp_bench::summary::summarize;
use mubqp_core::{generate_instance, GeneratorParams, SolverParams};

fn small_solver() -> SolverParams {
    SolverParams {
        t0: 1e3,
        interval: 50,
        offset_rate: 10.0,
        iterations: 2_000,
        replicas: 4,
        top_k: 4,
        ..SolverParams::default()
    }
}

fn write_instance(dir: &Path, m: usize) -> std::path::PathBuf {
    let inst = generate_instance(&GeneratorParams {
        n: 12,
        m,
        rho: -0.2,
        density: 0.8,
        coeff_bound: 100,
        seed: 5,
    })
    .unwrap();
    let path = dir.join(format!("-0.2_{m}_12_0.8_0"));
    save_instance(&inst, &path).unwrap();
    path
}

fn config(instance: &Path, out: &Path, methods: Vec<MethodId>, runs: usize) -> ExperimentConfig {
    ExperimentConfig {
        instance_path: instance.to_owned(),
        methods,
        n_weights: 10,
        runs,
        base_seed: 42,
        solver: small_solver(),
        reference: None,
        output_dir: out.to_owned(),
    }
}

fn without_time(mut reports: Vec<RunReport>) -> Vec<RunReport> {
    for r in &mut reports {
        r.record.wall_ms = 0;
    }
    reports
}

#[test]
fn single_uniform_run() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = write_instance(tmp.path(), 2);
    let out = tmp.path().join("out");
    let outcome = run_experiment(&config(&inst, &out, vec![MethodId::Uniform], 1)).unwrap();
    assert_eq!(outcome.reports.len(), 1);
    let r = &outcome.reports[0];
    assert_eq!(r.record.weights.len(), 10);
    assert_eq!(r.record.nd_count, r.record.front.len());
    assert!(r.hv > 0.0);
    assert_eq!(outcome.reference.source, ReferenceSource::Uniform);
    assert!(out.join("fronts/uniform_0.csv").exists());
    assert!(out.join("reference.json").exists());
    let csv = fs::read_to_string(out.join("fronts/uniform_0.csv")).unwrap();
    assert!(csv.starts_with("c1,c2,bits\n"));
    assert_eq!(csv.lines().count(), 1 + r.record.front.len());
}

#[test]
fn reruns_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = write_instance(tmp.path(), 3);
    let methods = vec![
        MethodId::Uniform,
        MethodId::AvgManhattan,
        MethodId::AvgEuclidean,
    ];
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let ra = run_experiment(&config(&inst, &a, methods.clone(), 3)).unwrap();
    let rb = run_experiment(&config(&inst, &b, methods, 3)).unwrap();
    assert_eq!(without_time(ra.reports), without_time(rb.reports));
    for entry in fs::read_dir(a.join("fronts")).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(
            fs::read(a.join("fronts").join(&name)).unwrap(),
            fs::read(b.join("fronts").join(&name)).unwrap()
        );
    }
    assert_eq!(
        fs::read(a.join("reference.json")).unwrap(),
        fs::read(b.join("reference.json")).unwrap()
    );
}

#[test]
fn interrupted_experiment_resumes() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = write_instance(tmp.path(), 2);
    let methods = vec![MethodId::Uniform, MethodId::Dichotomic];
    let full = tmp.path().join("full");
    let reference = run_experiment(&config(&inst, &full, methods.clone(), 3)).unwrap();

    let partial = tmp.path().join("partial");
    fs::create_dir_all(&partial).unwrap();
    let log = fs::read_to_string(full.join("runs.jsonl")).unwrap();
    let lines: Vec<&str> = log.lines().collect();
    // two finished cells and half of a third
    let cut = format!(
        "{}\n{}\n{}",
        lines[0],
        lines[1],
        &lines[2][..lines[2].len() / 2]
    );
    fs::write(partial.join("runs.jsonl"), cut).unwrap();

    let resumed = run_experiment(&config(&inst, &partial, methods, 3)).unwrap();
    assert_eq!(resumed.resumed, 2);
    assert_eq!(
        without_time(resumed.reports.clone()),
        without_time(reference.reports.clone())
    );
    // a second resume has nothing left to do
    let again = run_experiment(&config(
        &inst,
        &partial,
        vec![MethodId::Uniform, MethodId::Dichotomic],
        3,
    ))
    .unwrap();
    assert_eq!(again.resumed, 6);
    assert_eq!(
        read_reports(&partial.join("reports.jsonl")).unwrap().len(),
        6
    );
}

#[test]
fn changed_settings_are_not_resumed() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = write_instance(tmp.path(), 2);
    let out = tmp.path().join("out");
    run_experiment(&config(&inst, &out, vec![MethodId::Uniform], 2)).unwrap();
    let mut changed = config(&inst, &out, vec![MethodId::Uniform], 2);
    changed.base_seed = 43;
    assert_eq!(run_experiment(&changed).unwrap().resumed, 0);
}

#[test]
fn explicit_reference_is_used_unchanged() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = write_instance(tmp.path(), 2);
    let out = tmp.path().join("out");
    let mut cfg = config(&inst, &out, vec![MethodId::AvgEuclidean], 1);
    cfg.reference = Some(vec![1e6, 2e6]);
    let outcome = run_experiment(&cfg).unwrap();
    assert_eq!(outcome.reference.reference, vec![1e6, 2e6]);
    assert_eq!(outcome.reference.source, ReferenceSource::Explicit);
}

#[test]
fn reference_without_uniform_runs_uses_all_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = write_instance(tmp.path(), 2);
    let out = tmp.path().join("out");
    let outcome = run_experiment(&config(&inst, &out, vec![MethodId::Dichotomic], 2)).unwrap();
    assert_eq!(outcome.reference.source, ReferenceSource::AllMethods);
    let max0 = outcome
        .reports
        .iter()
        .map(|r| r.record.upper[0])
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(outcome.reference.reference[0], max0 + 1.0);
}

#[test]
fn shared_reference_bounds_every_front() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = write_instance(tmp.path(), 2);
    let out = tmp.path().join("out");
    let methods = MethodId::ALL.to_vec();
    let outcome = run_experiment(&config(&inst, &out, methods, 2)).unwrap();
    assert_eq!(outcome.reports.len(), 8);
    assert_eq!(outcome.failures, 0);
    for r in &outcome.reports {
        assert!(r.hv >= 0.0);
        for w in &r.record.weights {
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-9);
        }
    }
    let summary = summarize(&outcome.reports).unwrap();
    assert_eq!(summary.methods.len(), 4);
    assert!(summary.methods.iter().any(|m| m.best));
}

#[test]
fn invalid_method_for_instance_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = write_instance(tmp.path(), 3);
    let out = tmp.path().join("out");
    let err = run_experiment(&config(&inst, &out, vec![MethodId::Dichotomic], 1)).unwrap_err();
    assert!(err.to_string().contains("configuration error"), "{err}");
    let mut cfg = config(&inst, &out, vec![MethodId::Uniform], 1);
    cfg.n_weights = 7;
    let err = run_experiment(&cfg).unwrap_err();
    assert!(err.to_string().contains("[3, 6, 10]"), "{err}");
}

fn report(run: usize, front: &[[f64; 2]]) -> RunReport {
    RunReport {
        record: RunRecord {
            instance: "i".into(),
            method: MethodId::Uniform,
            run,
            seed: 0,
            config: 0,
            weights: vec![],
            front: front
                .iter()
                .map(|p| FrontPoint {
                    costs: p.to_vec(),
                    bits: String::new(),
                })
                .collect(),
            nd_count: front.len(),
            upper: vec![],
            fallbacks: 0,
            wall_ms: 0,
            error: None,
        },
        hv: 0.0,
    }
}

#[test]
fn eaf_of_one_run_is_its_front() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = export_eaf(
        &[report(0, &[[1.0, 5.0], [2.0, 3.0], [4.0, 1.0]])],
        tmp.path(),
        "u",
    )
    .unwrap();
    assert_eq!(paths.len(), 3);
    for p in &paths {
        assert_eq!(fs::read_to_string(p).unwrap(), "c1,c2\n1,5\n2,3\n4,1\n");
    }
}

#[test]
fn eaf_of_two_disjoint_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let reports = [report(0, &[[1.0, 3.0]]), report(1, &[[3.0, 1.0]])];
    let paths = export_eaf(&reports, tmp.path(), "u").unwrap();
    let read = |i: usize| fs::read_to_string(&paths[i]).unwrap();
    assert_eq!(read(0), "c1,c2\n1,3\n3,1\n");
    assert_eq!(read(1), "c1,c2\n1,3\n3,1\n");
    assert_eq!(read(2), "c1,c2\n3,3\n");
}

#[test]
fn eaf_errors() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(export_eaf(&[], tmp.path(), "u").is_err());
    let mut three = report(0, &[]);
    three.record.front.push(FrontPoint {
        costs: vec![1.0, 2.0, 3.0],
        bits: String::new(),
    });
    assert!(export_eaf(&[three], tmp.path(), "u").is_err());
}
