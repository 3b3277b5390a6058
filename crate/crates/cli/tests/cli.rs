use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sgbench(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgbench"))
        .args(args)
        .env("SGBENCH_CACHE", cache)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn count_graphs(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().split("\n\n").filter(|b| !b.trim().is_empty()).count()
}

#[test]
fn generate_is_reproducible_and_sized() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = sgbench(tmp.path(), &["generate", "syn-paths", "--train", "10", "--valid", "4", "--test", "4", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{o:?}");
    }
    assert_eq!(count_graphs(&a.join("train.tsv")), 10);
    for f in ["train.tsv", "valid.tsv", "test.tsv", "entities.txt", "relations.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let read = |dir: &Path| -> serde_json::Value {
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
    };
    let (manifest, other) = (read(&a), read(&b));
    let hashes = |m: &serde_json::Value| -> Vec<serde_json::Value> {
        m["generation"]["files"].as_array().unwrap().iter().map(|f| f["sha256"].clone()).collect()
    };
    assert_eq!(hashes(&manifest), hashes(&other));
    assert_eq!(manifest["generation"]["seed"], 42);
    assert_eq!(manifest["generation"]["counts"], serde_json::json!([10, 4, 4]));
}

#[test]
fn verify_reports_violations_with_lines() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("syn-tipr");
    let o = sgbench(tmp.path(), &["generate", "syn-tipr", "--train", "50", "--valid", "5", "--test", "5"]);
    assert!(o.status.success(), "{o:?}");
    let o = sgbench(tmp.path(), &["verify", "syn-tipr"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("50 graphs, 50 valid (100.00%)"), "{}", stdout(&o));

    let text = fs::read_to_string(dir.join("train.tsv")).unwrap();
    let corrupted = text.replacen("has_role", "has_rank", 1);
    let bad = tmp.path().join("bad.tsv");
    fs::write(&bad, corrupted).unwrap();
    let o = sgbench(tmp.path(), &["verify", "syn-tipr", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("49 valid"), "{out}");
    assert!(out.contains("lines 1-5 (graph 0)"), "{out}");

    let empty = tmp.path().join("empty.tsv");
    fs::write(&empty, "").unwrap();
    let o = sgbench(tmp.path(), &["verify", "--dataset", "syn-tipr", empty.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("0 graphs"));
}

#[test]
fn train_compress_and_sample_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let c = tmp.path();
    assert!(sgbench(c, &["generate", "syn-types", "--train", "200", "--valid", "20", "--test", "20"]).status.success());

    let o = sgbench(c, &["compress", "syn-types", "random"]);
    assert!(o.status.success(), "{o:?}");
    let row = stdout(&o);
    // 30 entities at 2 bits each.
    assert!(row.contains("60.00"), "{row}");

    let ckpt = c.join("m.ckpt");
    let o = sgbench(c, &["train", "syn-types", "distmult", "--epochs", "0", "--out", ckpt.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    assert!(ckpt.is_file());
    let report = c.join("report.json");
    let o = sgbench(c, &["compress", "syn-types", "--checkpoint", ckpt.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let r = &doc["report"];
    let sum = r["structure_bits"].as_f64().unwrap() + r["entity_bits"].as_f64().unwrap();
    assert!((sum - r["total_bits"].as_f64().unwrap()).abs() < 1e-9);

    let o = sgbench(c, &["sample", "syn-types", "random", "--samples", "0", "--setting", "s-only"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("0.00    0.00    0.00"), "{}", stdout(&o));

    let dump = c.join("samples");
    let o = sgbench(c, &["sample", "syn-types", "random", "--samples", "300", "--setting", "e-and-s", "--out", dump.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dump.join("manifest.json")).unwrap()).unwrap();
    let m = &manifest["results"][0]["metrics"];
    assert_eq!(m["valid"].as_f64(), Some(0.0));
    assert_eq!(m["novel"].as_f64(), Some(100.0));
    // Re-verification of the dump agrees with the reported rate.
    let o = sgbench(c, &["verify", "syn-types", dump.join("samples-e-and-s.tsv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("300 graphs, 0 valid"), "{}", stdout(&o));
}

#[test]
fn usage_and_io_errors_have_distinct_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(sgbench(tmp.path(), &["generate", "syn-nothing"]).status.code(), Some(2));
    assert_eq!(sgbench(tmp.path(), &["generate", "wd-movies"]).status.code(), Some(2));
    assert_eq!(sgbench(tmp.path(), &["train", "syn-paths", "random"]).status.code(), Some(2));
    assert_eq!(sgbench(tmp.path(), &["compress", "syn-paths", "complex", "--data", "/nonexistent"]).status.code(), Some(3));
    assert_eq!(sgbench(tmp.path(), &["compress", "wd-movies", "random"]).status.code(), Some(3));
}

/// A stand-in release with the published split sizes, one tiny movie per graph.
fn fake_movies(dir: &Path) {
    fs::create_dir_all(dir).unwrap();
    for (file, n) in [("train.tsv", 38267), ("valid.tsv", 15698), ("test.tsv", 15796)] {
        let text: Vec<String> =
            (0..n).map(|i| format!("_movie\thas_director\tD{}\n_movie\thas_actor\tA{}\n", i % 7, i % 11)).collect();
        fs::write(dir.join(file), text.join("\n")).unwrap();
    }
}

#[test]
fn download_uses_an_intact_cache_and_rejects_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("wd-movies");
    fake_movies(&dir);
    sgbench_core::wd::write_checksums(&dir).unwrap();
    let o = sgbench(tmp.path(), &["download", "wd-movies"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("38267/15698/15796"), "{}", stdout(&o));

    fs::write(dir.join("test.tsv"), "_movie\thas_director\tX\n").unwrap();
    assert_eq!(sgbench(tmp.path(), &["download", "wd-movies"]).status.code(), Some(3));
}
