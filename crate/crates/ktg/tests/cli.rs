use std::process::Command;

use clap::Parser;
use ktg::cli::{run_with, Cli};
use ktg::report::Format;
use ktg::BasisCache;

fn render(args: &[&str], cache: &BasisCache) -> (String, i32) {
    let cli = Cli::try_parse_from(std::iter::once("ktg").chain(args.iter().copied())).unwrap();
    let r = run_with(&cli, cache).unwrap();
    (r.render(cli.format), r.status.exit_code())
}

fn ktg(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ktg")).args(args).env_remove("KTG_CACHE_DIR").output().unwrap()
}

#[test]
fn dims_table() {
    let (out, code) = render(&["dims", "--skeleton", "theta", "--degree", "2"], &BasisCache::in_memory());
    assert_eq!(code, 0);
    assert!(out.contains("     2        45        81     9       9"), "{out}");
}

#[test]
fn cache_hits_and_misses_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for cmd in [&["dims", "--skeleton", "tetrahedron", "--degree", "2"][..], &["solve-degree2", "--format", "machine"], &["certify-nonexistence"]] {
        let cold = render(cmd, &BasisCache::on_disk(d).unwrap());
        let warm_cache = BasisCache::on_disk(d).unwrap();
        let warm = render(cmd, &warm_cache);
        assert_eq!(cold, warm);
        assert_eq!(warm_cache.stats().1, 0);
        assert_eq!(cold, render(cmd, &BasisCache::in_memory()));
    }
}

#[test]
fn machine_format_is_key_value() {
    let (out, _) = render(&["solve-degree2", "--format", "machine"], &BasisCache::in_memory());
    assert!(out.lines().all(|l| l.contains('=')));
    assert!(out.contains("constraint=β+γ = -1/24\n"));
    assert!(out.contains("relations_version="));
    assert!(out.contains("constraint_matrix=(0, 1, 1) | -1/24\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(ktg(&["certify-nonexistence"]).status.code(), Some(0));
    assert_eq!(ktg(&["properties"]).status.code(), Some(1));
    assert_eq!(ktg(&["dims"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "skeleton theta\n\n1 | 0:0 7:0\n").unwrap();
    let out = ktg(&["reduce", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.txt:3:"));
}

#[test]
fn pipeline_reaches_the_certificate_vector() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("v.txt");
    std::fs::write(&f, "skeleton tetrahedron\n1 | 1:0 1:1\n").unwrap();
    let cache = BasisCache::in_memory();
    let a = render(&["apply", f.to_str().unwrap(), "op switch e=1 | op unzip e=5 | op sweep tree=4 strands=1,3 | reduce"], &cache);
    assert!(a.0.contains("skeleton strands(2)"), "{}", a.0);
    let b = render(&["apply", f.to_str().unwrap(), "op switch e=1 | op unzip e=5 | reduce | op sweep tree=4 strands=1,3 | reduce"], &cache);
    assert_eq!(a, b);
}

#[test]
fn runs_are_deterministic() {
    let args = ["certify-nonexistence", "--all-routes", "--format", "machine"];
    let a = ktg(&args);
    let b = ktg(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(Format::Machine, Cli::try_parse_from(["ktg", "dims", "--format", "machine"]).unwrap().format);
}
