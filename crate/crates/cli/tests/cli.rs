mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use common::{glass, json, stderr, stdout, write_data, Fixture};

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Absorption probabilities by repeated substitution `h <- P_UU h + P_UL`,
/// independent of the LU solver.
fn iterate_h(edges: &[(&str, &str, f64)], labelled: &BTreeMap<&str, bool>) -> BTreeMap<String, f64> {
    let mut adj: BTreeMap<&str, Vec<(&str, f64)>> = BTreeMap::new();
    for &(a, b, w) in edges {
        adj.entry(a).or_default().push((b, w));
        adj.entry(b).or_default().push((a, w));
    }
    let mut h: BTreeMap<&str, f64> =
        adj.keys().map(|n| (*n, labelled.get(n).map_or(0.5, |k1| if *k1 { 1.0 } else { 0.0 }))).collect();
    for _ in 0..20_000 {
        let next: BTreeMap<&str, f64> = adj
            .iter()
            .map(|(n, nbrs)| {
                if labelled.contains_key(n) {
                    return (*n, h[n]);
                }
                let d: f64 = nbrs.iter().map(|x| x.1).sum();
                (*n, nbrs.iter().map(|(m, w)| w / d * h[m]).sum())
            })
            .collect();
        h = next;
    }
    h.into_iter().filter(|(n, _)| !labelled.contains_key(n)).map(|(n, v)| (n.to_string(), v)).collect()
}

fn two_clique_edges() -> Vec<(&'static str, &'static str, f64)> {
    let mut edges = Vec::new();
    let groups = [["a1", "a2", "a3", "a4", "a5"], ["b1", "b2", "b3", "b4", "b5"]];
    for g in groups {
        for i in 0..5 {
            for j in i + 1..5 {
                edges.push((g[i], g[j], 3.0));
            }
        }
    }
    edges.push(("a5", "b5", 1.0));
    edges.push(("a4", "b4", 0.5));
    edges
}

#[test]
fn two_cliques_label_by_clique() {
    let dir = tempfile::tempdir().unwrap();
    let edges = two_clique_edges();
    let edge_text: String = edges.iter().map(|(a, b, w)| format!("{a},{b},{w}\n")).collect();
    fs::write(dir.path().join("edges.csv"), edge_text).unwrap();
    fs::write(dir.path().join("labels.csv"), "a1,A\nb1,B\n").unwrap();
    let truth: String = (1..=5).map(|i| format!("a{i},A\nb{i},B\n")).collect();
    fs::write(dir.path().join("truth.csv"), truth).unwrap();
    let out = dir.path().join("out");
    let o = glass(&[
        "label",
        "--edges",
        s(&dir.path().join("edges.csv")),
        "--labels",
        s(&dir.path().join("labels.csv")),
        "--truth",
        s(&dir.path().join("truth.csv")),
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&out.join("result.json"));
    let est = r["result"]["estimates"].as_object().unwrap();
    assert_eq!(est.len(), 8);
    for (node, label) in est {
        assert_eq!(label.as_str().unwrap(), &node[..1].to_uppercase());
    }
    assert_eq!(r["evaluation"]["f1_k1_pos"], 1.0);

    let oracle = iterate_h(&edges, &BTreeMap::from([("a1", true), ("b1", false)]));
    let nodes = r["result"]["distribution"]["nodes"].as_array().unwrap();
    let probs = r["result"]["distribution"]["p_k1"].as_array().unwrap();
    for (n, p) in nodes.iter().zip(probs) {
        let want = oracle[n.as_str().unwrap()];
        assert!((p.as_f64().unwrap() - want).abs() < 1e-9, "{n}: {p} vs {want}");
    }
    assert!(out.join("nodes.csv").is_file());
    assert!(out.join("manifest.json").is_file());
}

#[test]
fn iqr_filter_lists_removed_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let mut edge_text: String = two_clique_edges().iter().map(|(a, b, w)| format!("{a},{b},{w}\n")).collect();
    // a weakly attached tail has large absorption times
    edge_text.push_str("a3,t1,0.01\nt1,t2,1\n");
    fs::write(dir.path().join("edges.csv"), edge_text).unwrap();
    fs::write(dir.path().join("labels.csv"), "a1,A\nb1,B\n").unwrap();
    let out = dir.path().join("out");
    let o = glass(&[
        "label",
        "--edges",
        s(&dir.path().join("edges.csv")),
        "--labels",
        s(&dir.path().join("labels.csv")),
        "--m",
        "4",
        "--filter",
        "iqr:1.5",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("filtered:")).expect(&text);
    for t in ["t1", "t2"] {
        assert!(line.contains(t), "{line}");
    }
    let r = json(&out.join("result.json"));
    assert_eq!(r["result"]["filtered_out"].as_array().unwrap().len(), 2);
    assert_eq!(json(&out.join("manifest.json"))["config"]["filter"], "iqr:1.5");
}

#[test]
fn missing_leaders_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    write_data(dir.path(), &[Fixture::default()], &[101]);
    let missing = dir.path().join("no-such-leaders.csv");
    let o = glass(&[
        "ingest",
        "--data-dir",
        s(dir.path()),
        "--leaders",
        s(&missing),
        "--congress",
        "101",
        "--chamber",
        "senate",
        "--out",
        s(&dir.path().join("out")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no-such-leaders.csv"), "{}", stderr(&o));
}

#[test]
fn missing_data_dir_is_a_user_error() {
    let o = glass(&["batch", "--out", "/tmp/glass-never-written"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("GLASS_DATA_DIR"));
    let o = glass(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(glass(&["--help"]).status.code(), Some(0));
}

#[test]
fn ingest_writes_network_files_and_toggle_keeps_agreeing_votes() {
    let dir = tempfile::tempdir().unwrap();
    let fx = Fixture::default();
    let leaders = write_data(dir.path(), &[fx], &[101]);
    let run = |extra: &[&str], out: &str| {
        let out = dir.path().join(out);
        let mut args = vec![
            "ingest",
            "--data-dir",
            s(dir.path()),
            "--leaders",
            s(&leaders),
            "--congress",
            "101",
            "--chamber",
            "senate",
            "--out",
        ];
        args.push(s(&out));
        args.extend_from_slice(extra);
        let o = glass(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        json(&out.join("101-senate/stats.json"))
    };
    let base = run(&[], "base");
    let incl = run(&["--include-agreeing"], "incl");
    let rolls = |v: &serde_json::Value| v["stages"].as_array().unwrap().last().unwrap()["rollcalls"].as_u64().unwrap();
    let agreeing = base["agreeing_rollcalls"].as_u64().unwrap();
    assert_eq!(agreeing, (fx.rollcalls / fx.bipartisan_every) as u64);
    assert_eq!(rolls(&base) + agreeing, rolls(&incl));
    assert_eq!(incl["include_agreeing"], true);

    let net = dir.path().join("base/101-senate");
    let labels = fs::read_to_string(net.join("labels.csv")).unwrap();
    assert_eq!(labels.lines().count(), 2);
    let truth = fs::read_to_string(net.join("truth.csv")).unwrap();
    assert_eq!(truth.lines().count(), (fx.democrats + fx.republicans) as usize);
    assert!(fs::read_to_string(net.join("edges.csv")).unwrap().lines().count() > 0);
    let shapes = fs::read_to_string(dir.path().join("base/shapes.csv")).unwrap();
    assert_eq!(shapes.lines().nth(1).unwrap(), format!("101,senate,22,11,9,1,1,{}", rolls(&base)));
}

#[test]
fn batch_flags_failing_network_and_completes() {
    let dir = tempfile::tempdir().unwrap();
    let a = Fixture::default();
    let b = Fixture { congress: 102, seed: 8, ..a };
    let leaders = write_data(dir.path(), &[a, b], &[101]);
    let out = dir.path().join("out");
    let o = glass(&[
        "batch",
        "--data-dir",
        s(dir.path()),
        "--leaders",
        s(&leaders),
        "--congress",
        "101-102",
        "--chamber",
        "senate",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("102-senate"));
    let report = json(&out.join("report.json"));
    let rows = report.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["error"].is_null());
    assert_eq!(rows[0]["n"], 22);
    assert_eq!(rows[0]["ell"], 2);
    assert!(rows[0]["f1_dem_pos"].as_f64().unwrap() > 0.5);
    assert!(rows[1]["error"].as_str().unwrap().contains("102"));
    let series = fs::read_to_string(out.join("series.csv")).unwrap();
    let lines: Vec<&str> = series.lines().collect();
    assert_eq!(lines[0], "congress,chamber,f1,gap");
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[2], "102,senate,,");
    assert!(out.join("probs/101-senate.csv").is_file());
    assert!(!out.join("probs/102-senate.csv").exists());
}

#[test]
fn batch_reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let leaders = write_data(dir.path(), &[Fixture::default()], &[101]);
    let run = |out: &str, jobs: &str| {
        let out = dir.path().join(out);
        let o = glass(&[
            "batch",
            "--data-dir",
            s(dir.path()),
            "--leaders",
            s(&leaders),
            "--congress",
            "101",
            "--chamber",
            "senate",
            "--jobs",
            jobs,
            "--out",
            s(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        out
    };
    let a = run("a", "1");
    let b = run("b", "3");
    for f in ["report.json", "series.csv", "shapes.csv", "cleaning.json", "probs/101-senate.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let (ma, mb) = (json(&a.join("manifest.json")), json(&b.join("manifest.json")));
    assert_eq!(ma["outputs"], mb["outputs"]);
    assert_eq!(ma["inputs"], mb["inputs"]);
    assert_eq!(ma["inputs"].as_array().unwrap().len(), 4);
}

#[test]
fn sensitivity_with_no_agreeing_votes_correlates_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let fx = Fixture { bipartisan_every: 0, ..Fixture::default() };
    let leaders = write_data(dir.path(), &[fx], &[101]);
    let out = dir.path().join("out");
    let o = glass(&[
        "sensitivity",
        "--data-dir",
        s(dir.path()),
        "--leaders",
        s(&leaders),
        "--congress",
        "101",
        "--chamber",
        "senate",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = json(&out.join("sensitivity.json"));
    let r = &rows[0];
    assert_eq!(r["agreeing_rollcalls"], 0);
    assert_eq!(r["pearson"], 1.0);
    assert_eq!(r["spearman"], 1.0);
    assert_eq!(r["f1_excluding"], r["f1_including"]);
    assert_eq!(r["common_nodes"], 20);
    assert!(out.join("paired/101-senate.csv").is_file());
}

#[test]
fn sensitivity_with_agreeing_votes_pairs_both_arms() {
    let dir = tempfile::tempdir().unwrap();
    let leaders = write_data(dir.path(), &[Fixture::default()], &[101]);
    let out = dir.path().join("out");
    let o = glass(&[
        "sensitivity",
        "--data-dir",
        s(dir.path()),
        "--leaders",
        s(&leaders),
        "--congress",
        "101",
        "--chamber",
        "senate",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = &json(&out.join("sensitivity.json"))[0];
    assert_eq!(r["agreeing_rollcalls"], 10);
    let p = r["pearson"].as_f64().unwrap();
    assert!(p > 0.5 && p <= 1.0, "{p}");
}

fn control_rows() -> Vec<(u32, bool, bool, bool)> {
    let text = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/control.csv")).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("congress"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1] == "R", f[2] == "R", f[3] == "R")
        })
        .collect()
}

#[test]
fn regress_detects_a_planted_house_effect() {
    let dir = tempfile::tempdir().unwrap();
    let mut series = String::from("congress,chamber,f1,gap\n");
    for (c, h, _, _) in control_rows() {
        // small deterministic wiggle so the residual variance is non-zero
        let noise = 0.002 * ((c * 7919 % 13) as f64 / 13.0 - 0.5);
        let f = 0.9 + if h { 0.06 } else { 0.0 } + noise;
        series.push_str(&format!("{c},house,{f},\n"));
    }
    let path = dir.path().join("series.csv");
    fs::write(&path, series).unwrap();
    let out = dir.path().join("out");
    let o = glass(&["regress", "--series", s(&path), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fits = json(&out.join("fits.json"));
    let full = &fits[0];
    assert_eq!(full["model"], "full-three-factor");
    assert_eq!(full["observations"], 42);
    let sig: Vec<&str> = full["significant_terms"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(sig.contains(&"H"), "{sig:?}");
    let h = full["terms"].as_array().unwrap().iter().find(|t| t["term"] == "H").unwrap();
    assert!((h["estimate"].as_f64().unwrap() - 0.06).abs() < 0.005);
    assert_eq!(fits[1]["model"], "agreement-two-factor (house)");
    assert!(stdout(&o).contains("significant at level 0.05"));
}

#[test]
fn regress_drops_the_never_observed_senate_interaction() {
    let dir = tempfile::tempdir().unwrap();
    let mut series = String::from("congress,chamber,f1,gap\n");
    for (c, ..) in control_rows() {
        let noise = 0.01 * ((c * 7919 % 13) as f64 / 13.0 - 0.5);
        series.push_str(&format!("{c},senate,{},\n", 0.95 + noise));
    }
    let path = dir.path().join("series.csv");
    fs::write(&path, series).unwrap();
    let out = dir.path().join("out");
    let o = glass(&["regress", "--series", s(&path), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fits = json(&out.join("fits.json"));
    assert_eq!(fits.as_array().unwrap().len(), 2);
    // the House never matches the President against the Senate majority
    assert_eq!(fits[1]["aliased"], serde_json::json!(["H':P'"]));
    assert_eq!(fits[0]["aliased"], serde_json::json!(["S:P", "H:S:P"]));
    for f in fits.as_array().unwrap() {
        for t in f["terms"].as_array().unwrap() {
            let p = t["p"].as_f64().unwrap();
            assert!((0.0..=1.0).contains(&p));
        }
    }
}

#[test]
fn stats_reports_rule_averages() {
    let dir = tempfile::tempdir().unwrap();
    let a = Fixture::default();
    let b = Fixture { congress: 102, seed: 9, ..a };
    let leaders = write_data(dir.path(), &[a, b], &[101, 102]);
    let out = dir.path().join("out");
    let o = glass(&[
        "stats",
        "--data-dir",
        s(dir.path()),
        "--leaders",
        s(&leaders),
        "--congress",
        "101-102",
        "--chamber",
        "senate",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&out.join("stats.json"));
    assert_eq!(v["networks"].as_array().unwrap().len(), 2);
    let avg = v["averages"].as_array().unwrap();
    let rule5 = avg.iter().find(|a| a["stage"] == "rule5").unwrap();
    // a quarter of the roll calls are bipartisan in both networks
    assert!((rule5["rollcalls_pct"].as_f64().unwrap() - 25.0).abs() < 1e-9);
    assert!(fs::read_to_string(out.join("stats.csv")).unwrap().lines().count() > 1);
}

#[test]
fn label_on_roll_call_network_with_walk_check() {
    let dir = tempfile::tempdir().unwrap();
    let leaders = write_data(dir.path(), &[Fixture::default()], &[101]);
    let out = dir.path().join("out");
    let o = glass(&[
        "label",
        "--data-dir",
        s(dir.path()),
        "--leaders",
        s(&leaders),
        "--congress",
        "101",
        "--chamber",
        "senate",
        "--walks",
        "2000",
        "--seed",
        "3",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&out.join("result.json"));
    assert_eq!(r["network"], "101-senate");
    assert_eq!(r["result"]["m"], 9);
    let walks = fs::read_to_string(out.join("walks.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(walks.as_bytes());
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let f = |i: usize| rec[i].parse::<f64>().unwrap();
        let (exact, mc, se) = (f(1), f(2), f(3));
        assert!((exact - mc).abs() <= 5.0 * se.max(1e-3), "{exact} vs {mc} ± {se}");
        rows += 1;
    }
    assert_eq!(rows, 20);
}
