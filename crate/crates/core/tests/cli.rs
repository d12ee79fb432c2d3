use std::path::Path;
use std::process::{Command, Output};

use quick_xml::events::Event;
use quick_xml::Reader;

use contour_kmeans::cli::{ResultsTable, TABLE_VERSION_LINE};

fn contour(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contour"))
        .args(args)
        .current_dir(dir)
        .env("CONTOUR_OUT_DIR", dir.join("out"))
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Element names and attributes, in document order. Panics on malformed XML.
fn xml_tags(text: &str) -> Vec<(String, Vec<(String, String)>)> {
    let mut reader = Reader::from_str(text);
    let mut tags = Vec::new();
    loop {
        match reader.read_event().expect("well-formed XML") {
            Event::Start(e) | Event::Empty(e) => {
                let name = String::from_utf8(e.name().as_ref().to_vec()).unwrap();
                let attrs = e
                    .attributes()
                    .map(|a| {
                        let a = a.unwrap();
                        (
                            String::from_utf8(a.key.as_ref().to_vec()).unwrap(),
                            a.unescape_value().unwrap().into_owned(),
                        )
                    })
                    .collect();
                tags.push((name, attrs));
            }
            Event::Eof => break,
            _ => {}
        }
    }
    tags
}

fn count_class(tags: &[(String, Vec<(String, String)>)], element: &str, class: &str) -> usize {
    tags.iter()
        .filter(|(n, attrs)| n == element && attrs.iter().any(|(k, v)| k == "class" && v == class))
        .count()
}

#[test]
fn bad_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&contour(dir.path(), &["generate", "--bogus"])), 2);
    assert_eq!(
        code(&contour(dir.path(), &["generate", "--ratio", "0:1"])),
        2
    );
    assert_eq!(code(&contour(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&contour(dir.path(), &["--help"])), 0);
}

#[test]
fn generate_writes_seeded_csv() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let o = contour(
            dir.path(),
            &[
                "generate", "--ratio", "1:10", "--n", "550", "--seed", "3", "--out", name,
            ],
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        std::fs::read_to_string(dir.path().join(name)).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "x0,x1,label");
    assert_eq!(lines.len(), 551);

    // default destination is the output directory
    let o = contour(dir.path(), &["generate", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("out/uneven_1_2_seed1.csv").exists());
}

#[test]
fn coreset_is_deterministic_and_plots_one_star_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(
        code(&contour(
            p,
            &["generate", "--ratio", "1:2", "--out", "d.csv"]
        )),
        0
    );

    let build = |out: &str| {
        let o = contour(
            p,
            &[
                "coreset", "--in", "d.csv", "--m", "5", "--out", out, "--plot", "c.svg",
            ],
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        std::fs::read_to_string(p.join(out)).unwrap()
    };
    assert_eq!(build("c1.csv"), build("c2.csv"));

    let svg = std::fs::read_to_string(p.join("c.svg")).unwrap();
    let tags = xml_tags(&svg);
    assert_eq!(count_class(&tags, "polygon", "star"), 5);
    assert_eq!(count_class(&tags, "circle", "point"), 750);

    let o = contour(p, &["coreset", "--in", "d.csv", "--m", "1000"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn run_with_brute_force_has_no_ground_gap() {
    let dir = tempfile::tempdir().unwrap();
    let o = contour(
        dir.path(),
        &[
            "run",
            "--override",
            "solver=brute_force",
            "--override",
            "repeats=3",
            "--override",
            "dataset.n_total=200",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = ResultsTable::read(&dir.path().join("out/results.csv")).unwrap();
    assert_eq!(table.rows.len(), 1);
    let row = &table.rows[0];
    assert_eq!(row.solver, "brute_force");
    assert!(
        row.failures == 3 || row.mean_ground_gap.abs() < 1e-9,
        "{row:?}"
    );

    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with(TABLE_VERSION_LINE));
    let json = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with("run_"))
        .count();
    assert_eq!(json, 1);
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"solvr": "vqe"}"#).unwrap();
    let o = contour(dir.path(), &["run", "--config", "c.json"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let o = contour(dir.path(), &["run", "--override", "no_such_key=1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn sweep_covers_the_product_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = contour(
        p,
        &[
            "sweep",
            "--axis",
            "order=0,1",
            "--axis",
            "lambda=0,0.1",
            "--override",
            "solver=brute_force",
            "--override",
            "repeats=2",
            "--override",
            "dataset.n_total=150",
            "--override",
            "output.figures=true",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = ResultsTable::read(&p.join("out/sweep.csv")).unwrap();
    assert_eq!(table.rows.len(), 4);
    let cells: Vec<(u8, f64)> = table.rows.iter().map(|r| (r.order, r.lambda)).collect();
    assert_eq!(cells, vec![(0, 0.0), (0, 0.1), (1, 0.0), (1, 0.1)]);

    let svg = std::fs::read_to_string(p.join("out/sweep_accuracy.svg")).unwrap();
    assert_eq!(count_class(&xml_tags(&svg), "g", "bar-group"), 4);

    for kind in ["accuracy_bars", "noise_curve"] {
        let o = contour(
            p,
            &[
                "plot",
                "--results",
                "out/sweep.csv",
                "--kind",
                kind,
                "--out",
                "p.svg",
            ],
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        xml_tags(&std::fs::read_to_string(p.join("p.svg")).unwrap());
    }
}

#[test]
fn plotting_an_empty_table_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ResultsTable::default().write(&p.join("empty.csv")).unwrap();
    let o = contour(
        p,
        &[
            "plot",
            "--results",
            "empty.csv",
            "--kind",
            "accuracy_bars",
            "--out",
            "x.svg",
        ],
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no rows"));
    assert!(!p.join("x.svg").exists());
}
