use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn seqrac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqrac"))
        .args(args)
        .env_remove("SEQRAC_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn emit(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    let mut full = vec!["emit"];
    full.extend_from_slice(args);
    full.extend(["--out", &p]);
    let o = seqrac(&full);
    assert!(o.status.success(), "{}", stderr(&o));
    p
}

#[test]
fn evaluate_canonical_document() {
    let dir = tempfile::tempdir().unwrap();
    let doc = emit(
        dir.path(),
        "c.json",
        &["canonical", "--eta", "0.70710678118654752"],
    );
    let o = seqrac(&["evaluate", &doc]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("w_ab = 0.750000"), "{out}");
    assert!(out.contains("w_ac = 0.801777"), "{out}");
    let rows = out
        .lines()
        .filter(|l| {
            let t: Vec<&str> = l.split_whitespace().collect();
            t.len() == 6
                && t[..5]
                    .iter()
                    .all(|d| d.len() == 1 && d.as_bytes()[0].is_ascii_digit())
        })
        .count();
    assert_eq!(rows, 64);
    assert!(out.contains("in quantum set:   yes"));
    assert!(out.contains("in classical set: no"));
}

#[test]
fn evaluate_classical_relay() {
    let dir = tempfile::tempdir().unwrap();
    let doc = emit(dir.path(), "k.json", &["classical"]);
    let out = stdout(&seqrac(&["evaluate", &doc]));
    assert!(
        out.contains("w_ab = 0.750000") && out.contains("w_ac = 0.750000"),
        "{out}"
    );
    assert!(out.contains("in classical set: yes"));
}

#[test]
fn emitted_documents_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let doc = emit(dir.path(), "c.json", &["canonical", "--eta", "0.3"]);
    let text = fs::read_to_string(&doc).unwrap();
    let again = emit(dir.path(), "d.json", &["canonical", "--eta", "0.3"]);
    assert_eq!(fs::read_to_string(again).unwrap(), text);
}

#[test]
fn malformed_kraus_entry_exits_2_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let doc = emit(dir.path(), "c.json", &["canonical"]);
    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&doc).unwrap()).unwrap();
    v["instruments"][0]["kraus"][1][0][1] = serde_json::json!("x");
    fs::write(&doc, v.to_string()).unwrap();
    let o = seqrac(&["evaluate", &doc]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("instruments[0].kraus[1]"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn invalid_instrument_exits_3_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let doc = emit(dir.path(), "c.json", &["canonical"]);
    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&doc).unwrap()).unwrap();
    // doubling one Kraus operator breaks completeness
    v["instruments"][1]["kraus"][0][0][0] = serde_json::json!(2.0);
    fs::write(&doc, v.to_string()).unwrap();
    let o = seqrac(&["evaluate", &doc]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("instruments[1]"), "{}", stderr(&o));
}

#[test]
fn unphysical_state_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let doc = emit(dir.path(), "c.json", &["canonical"]);
    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&doc).unwrap()).unwrap();
    v["preparations"][3] = serde_json::json!([0.0, 0.0, 1.5]);
    fs::write(&doc, v.to_string()).unwrap();
    let o = seqrac(&["evaluate", &doc]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("preparations[3]"), "{}", stderr(&o));
}

#[test]
fn matrix_preparations_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let doc = emit(dir.path(), "c.json", &["canonical", "--eta", "1"]);
    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&doc).unwrap()).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2 / 2.0;
    v["preparations"][0] = serde_json::json!([[0.5 + h, 0.0], [h, 0.0], [h, 0.0], [0.5 - h, 0.0]]);
    fs::write(&doc, v.to_string()).unwrap();
    let o = seqrac(&["evaluate", &doc]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("w_ab = 0.853553"));
}

#[test]
fn certify_examples() {
    let o = seqrac(&["certify", "--wab", "0.7138", "--wac", "0.7826"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("[0.6047, 0.8010]"), "{}", stdout(&o));

    let o = seqrac(&["certify", "--wab", "0.5", "--wac", "0.5"]);
    assert!(stdout(&o).contains("[0.0000, 1.0000]"));

    let o = seqrac(&["certify", "--wab", "0.86", "--wac", "0.85"]);
    assert_eq!(o.status.code(), Some(5));

    let o = seqrac(&["certify", "--wab", "1.2", "--wac", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn noise_example() {
    let o = seqrac(&[
        "noise",
        "--eta",
        "0.70710678",
        "--va",
        "0.95",
        "--vb",
        "0.90",
        "--vc",
        "0.95",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(
        out.contains("(0.7138)") && out.contains("(0.7826)"),
        "{out}"
    );
    assert!(
        out.contains("rounded:            [0.6047, 0.8010]"),
        "{out}"
    );
}

#[test]
fn sequence_csv() {
    let o = seqrac(&["sequence", "--parties", "4"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("k,witness,radius,closed_form,diff"));
    for (k, line) in lines.enumerate() {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let law = 0.5 * (1.0 + std::f64::consts::SQRT_2 / 2f64.powi(k as i32 + 1));
        assert!((cols[1] - law).abs() < 1e-12 && cols[4] <= 1e-12, "{line}");
        assert!((cols[2] - 2f64.powi(-(k as i32))).abs() < 1e-15, "{line}");
    }
    assert!(!out.contains('\r'));

    let o = seqrac(&["sequence", "--parties", "3", "--eta-profile", "0.5,0.2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = seqrac(&["sequence", "--eta-profile", "0.5,1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn boundary_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = seqrac(&["boundary", "--points", "21", "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    // 21 grid points plus the row at 3/4
    assert_eq!(rows.len(), 22);
    for r in &rows {
        assert!(
            r[3].parse::<f64>().unwrap() <= 1e-6 && r[6] == "ok",
            "{r:?}"
        );
    }
    let num = |r: &Vec<String>, i: usize| r[i].parse::<f64>().unwrap();
    let three_quarters = rows.iter().find(|r| num(r, 0) == 0.75).expect("row at 3/4");
    assert!((num(three_quarters, 1) - 0.801777).abs() < 1e-6);
    assert!((num(&rows[0], 1) - 0.853553).abs() < 1e-6 && num(&rows[0], 0) == 0.5);
    assert!((num(&rows[21], 0) - 0.853553).abs() < 1e-6);
    assert!((num(&rows[21], 1) - 0.676777).abs() < 1e-6);
    assert!(rows.windows(2).all(|w| num(&w[0], 0) < num(&w[1], 0)));
    assert!(text.starts_with("alpha,wac_closed_form,wac_numeric,gap,theta,phi,status\n"));
}

#[test]
fn boundary_row_at_three_quarters() {
    let o = seqrac(&["boundary", "--points", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row = out
        .lines()
        .find(|l| l.starts_with("0.75"))
        .expect("alpha = 0.75 row");
    let wac: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((wac - 0.801777).abs() < 1e-6);
}

#[test]
fn boundary_with_seesaw_uses_the_seed() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_seqrac"))
            .args(["boundary", "--points", "2", "--with-seesaw"])
            .env("SEQRAC_SEED", seed)
            .output()
            .unwrap()
    };
    let (a, b) = (run("5"), run("5"));
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    for line in stdout(&a).lines().skip(1) {
        let gap: f64 = line.split(',').nth(8).unwrap().parse().unwrap();
        assert!(gap.abs() < 1e-3, "{line}");
    }
    assert!(stdout(&a).starts_with(
        "alpha,wac_closed_form,wac_numeric,gap,theta,phi,wab_seesaw,wac_seesaw,seesaw_gap,status\n"
    ));
}

#[test]
fn too_few_restarts_at_the_sharp_end_report_exit_4() {
    // only a measure-zero set of strategies reaches W_AB = (2+√2)/4
    let o = seqrac(&[
        "boundary",
        "--points",
        "2",
        "--with-seesaw",
        "--restarts",
        "1",
        "--seed",
        "1",
    ]);
    if o.status.code() == Some(4) {
        let out = stdout(&o);
        assert!(out.lines().last().unwrap().contains("seesaw:"), "{out}");
    } else {
        assert_eq!(o.status.code(), Some(0));
    }
}

#[test]
fn classical_report() {
    let out = stdout(&seqrac(&["classical"]));
    assert!(out.contains("max w_ab = 0.750000 (6/8)"), "{out}");
    assert!(out.contains("max w_ac = 0.750000 (12/16)"), "{out}");
    assert!(out.contains("(0.750000, 0.750000)"));
}

#[test]
fn checks_report() {
    let o = seqrac(&["checks", "--samples", "500", "--grid", "20", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("no violations"));
    let again = seqrac(&["checks", "--samples", "500", "--grid", "20", "--seed", "3"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(
        seqrac(&["boundary", "--points", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(seqrac(&["noise", "--va", "1.5"]).status.code(), Some(2));
    assert_eq!(seqrac(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        seqrac(&["evaluate", "/nonexistent/doc.json"]).status.code(),
        Some(2)
    );
}
