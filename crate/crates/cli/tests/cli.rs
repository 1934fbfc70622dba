mod common;

use common::*;

#[test]
fn train_smoke_writes_four_files() {
    let dir = tempfile::tempdir().unwrap();
    let (i, l) = idx_fixture(dir.path(), 20, "train");
    let out = dir.path().join("out");
    let o = run(&["train", "--model", "hqfnn", "--dataset", "idx", "--images", path(&i), "--labels", path(&l), "--epochs", "1", "--seed", "7", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["trace.csv", "metrics.json", "confusion.csv", "model.ckpt"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let trace = read(&out.join("trace.csv"));
    assert_eq!(trace.lines().next(), Some("epoch,loss,train_acc,val_acc"));
    assert_eq!(trace.lines().count(), 2);
    let m = check_metrics_json(&out.join("metrics.json"));
    check_confusion_csv(&out.join("confusion.csv"), 10, m["n_samples"].as_u64().unwrap());
}

#[test]
fn missing_file_is_named() {
    let o = run(&["train", "--images", "/nonexistent/imgs.idx", "--labels", "/nonexistent/l.idx"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("error:"), "{err}");
    assert!(err.contains("/nonexistent/imgs.idx"));
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn fdnn_and_feature_models_share_the_plumbing() {
    let dir = tempfile::tempdir().unwrap();
    let (i, l) = idx_fixture(dir.path(), 20, "train");
    let o = run(&["train", "--model", "fdnn", "--images", path(&i), "--labels", path(&l), "--epochs", "1", "--out", path(&dir.path().join("a"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = csv_fixture(dir.path(), 30);
    for m in ["dnn", "hqfnn", "fdnn"] {
        let out = dir.path().join(m);
        let o = run(&["train", "--model", m, "--dataset", "csv", "--csv", path(&csv), "--classes", "2", "--epochs", "2", "--batch", "8", "--out", path(&out)]);
        assert_eq!(o.status.code(), Some(0), "{m}: {}", stderr(&o));
        check_metrics_json(&out.join("metrics.json"));
    }
}

#[test]
fn eval_reproduces_train_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let (i, l) = idx_fixture(dir.path(), 30, "train");
    let (ti, tl) = idx_fixture(dir.path(), 12, "test");
    let out = dir.path().join("t");
    let common = ["--images", path(&i), "--labels", path(&l), "--noise", "0.05", "--seed", "3"];
    let mut args = vec!["train", "--model", "cnn", "--epochs", "2", "--batch", "8", "--out", path(&out)];
    args.extend(common);
    args.extend(["--test-images", path(&ti), "--test-labels", path(&tl)]);
    assert_eq!(run(&args).status.code(), Some(0));

    let ev = dir.path().join("e");
    let ck = out.join("model.ckpt");
    let mut args = vec!["eval", "--checkpoint", path(&ck), "--out", path(&ev)];
    args.extend(common);
    args.extend(["--test-images", path(&ti), "--test-labels", path(&tl)]);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read(&out.join("metrics.json")), read(&ev.join("metrics.json")));
    assert_eq!(read(&out.join("confusion.csv")), read(&ev.join("confusion.csv")));

    // Without test files train reports on its validation hold-out.
    let out2 = dir.path().join("t2");
    let mut args = vec!["train", "--model", "hqfnn", "--epochs", "1", "--out", path(&out2)];
    args.extend(common);
    assert_eq!(run(&args).status.code(), Some(0));
    let ev2 = dir.path().join("e2");
    let ck2 = out2.join("model.ckpt");
    let mut args = vec!["eval", "--checkpoint", path(&ck2), "--subset", "val", "--out", path(&ev2)];
    args.extend(common);
    assert_eq!(run(&args).status.code(), Some(0));
    assert_eq!(read(&out2.join("metrics.json")), read(&ev2.join("metrics.json")));
}

#[test]
fn eval_error_paths() {
    let dir = tempfile::tempdir().unwrap();
    let (i, l) = idx_fixture(dir.path(), 20, "train");
    let out = dir.path().join("t");
    assert_eq!(run(&["train", "--model", "cnn", "--images", path(&i), "--labels", path(&l), "--epochs", "1", "--out", path(&out)]).status.code(), Some(0));
    let ck = out.join("model.ckpt");

    let (ei, el) = idx_fixture(dir.path(), 0, "empty");
    let o = run(&["eval", "--checkpoint", path(&ck), "--images", path(&ei), "--labels", path(&el), "--out", path(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error:"));

    let csv = csv_fixture(dir.path(), 10);
    let o = run(&["eval", "--checkpoint", path(&ck), "--dataset", "csv", "--csv", path(&csv), "--classes", "10"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let o = run(&["eval", "--checkpoint", path(&ck), "--images", path(&i), "--labels", path(&l), "--classes", "3"]);
    assert_eq!(o.status.code(), Some(2));

    let bad = dir.path().join("bad.ckpt");
    std::fs::write(&bad, b"HQFN\x01\x00\x00\x00").unwrap();
    let o = run(&["eval", "--checkpoint", path(&bad), "--images", path(&i), "--labels", path(&l)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("byte"), "{}", stderr(&o));
}

#[test]
fn numeric_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 1..4 {
        let csv = noise_csv_fixture(dir.path(), 40, seed);
        let o = run(&["train", "--model", "dnn", "--dataset", "csv", "--csv", path(&csv), "--classes", "2", "--epochs", "8", "--lr", "1e300", "--out", path(&dir.path().join("o"))]);
        assert_eq!(o.status.code(), Some(3), "seed {seed}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error: numeric failure at epoch"));
    }
}

#[test]
fn gradcheck_verdicts() {
    let o = run(&["gradcheck"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["gradcheck", "--seed", "99"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["gradcheck", "--tolerance", "1e-12"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: gradient check failed"));
}

#[test]
fn noise_sweep_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ad0");
    let o = run(&["noise-sweep", "--channel", "ad", "--gammas", "0", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let grid = read(&out.join("fidelity_grid.csv"));
    assert_eq!(grid.lines().next(), Some("gamma,x,fidelity"));
    assert_eq!(grid.lines().count(), 101);
    assert!(grid.lines().skip(1).all(|l| l.ends_with(",1.000000")));

    let out = dir.path().join("dp");
    let o = run(&["noise-sweep", "--channel", "dp", "--placement", "end", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let summary = read(&out.join("fidelity_summary.csv"));
    assert_eq!(summary.lines().next(), Some("gamma,mean_fidelity"));
    for l in summary.lines().skip(1) {
        let (g, f) = l.split_once(',').unwrap();
        let (g, f): (f64, f64) = (g.parse().unwrap(), f.parse().unwrap());
        assert!((f - (1.0 - 2.0 * g / 3.0)).abs() < 1e-6);
    }

    let o = run(&["noise-sweep", "--channel", "bitflip"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error:"));
    assert_eq!(run(&["noise-sweep", "--placement", "middle"]).status.code(), Some(2));
    assert_eq!(run(&["noise-sweep", "--gammas", "0.1,x"]).status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.ini");
    std::fs::write(&cfg, "samples = 5\n[noise-sweep]\nchannel = dp\ngammas = 0.1\n[train]\nepochs = 3\n").unwrap();
    let out = dir.path().join("a");
    let o = run(&["noise-sweep", "--config", path(&cfg), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read(&out.join("fidelity_summary.csv")), "gamma,mean_fidelity\n0.100000,0.933333\n");
    let o = run(&["noise-sweep", "--config", path(&cfg), "--channel", "mix_dp", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read(&out.join("fidelity_summary.csv")), "gamma,mean_fidelity\n0.100000,0.950000\n");

    std::fs::write(&cfg, "[sweep]\nchannel = dp\n").unwrap();
    let o = run(&["noise-sweep", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown section"));

    std::fs::write(&cfg, "bogus_key = 1\n").unwrap();
    let o = run(&["noise-sweep", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error:"));
    assert_eq!(run(&["noise-sweep", "--config", "/nonexistent.ini"]).status.code(), Some(2));
    assert_eq!(run(&["train", "--preset", "full-mnist"]).status.code(), Some(2));
}

#[test]
fn help_lists_flags_with_defaults() {
    for (sub, flags) in [
        ("train", &["--model", "--epochs", "--batch", "--lr", "--seed", "--threads", "--preset", "--config", "--layers", "--noise"][..]),
        ("eval", &["--checkpoint", "--images", "--subset", "--threads"][..]),
        ("gradcheck", &["--tolerance", "--e2e-tolerance", "--cases", "--seed"][..]),
        ("noise-sweep", &["--channel", "--placement", "--gammas", "--samples", "--layers"][..]),
    ] {
        let o = run(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let h = stdout(&o);
        for f in flags {
            assert!(h.contains(f), "{sub} help lacks {f}");
        }
        assert!(h.contains("[default:"), "{sub}");
    }
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn two_qubit_hybrid_trains_on_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let (i, l) = idx_fixture(dir.path(), 10, "train");
    let o = run(&["train", "--model", "hqfnn", "--qubits", "2", "--images", path(&i), "--labels", path(&l), "--epochs", "1", "--out", path(&dir.path().join("q2"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn preset_is_accepted_by_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["noise-sweep", "--preset", "desk-mnist", "--gammas", "0.1", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&["gradcheck", "--preset", "desk-mnist", "--cases", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // A preset's data paths can still be overridden.
    let (i, l) = idx_fixture(dir.path(), 20, "own");
    let o = run(&["train", "--preset", "desk-mnist", "--images", path(&i), "--labels", path(&l), "--test-images", path(&i), "--test-labels", path(&l), "--epochs", "1", "--out", path(&dir.path().join("t"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(check_metrics_json(&dir.path().join("t/metrics.json"))["n_samples"], 20);
}
