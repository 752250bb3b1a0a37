//! The checked-in fuzz seeds exercise the same parsers under `cargo test`.

use std::fs;
use std::path::PathBuf;

use fracdrift::io::{decode_field_snapshot, encode_field_snapshot, parse_profile_csv};

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            let data = fs::read(&p).unwrap();
            (p, data)
        })
        .collect();
    out.sort();
    out
}

#[test]
fn snapshot_seeds() {
    let mut ok = 0;
    for (path, data) in seeds("field_snapshot") {
        match decode_field_snapshot(&data) {
            Ok((field, prov)) => {
                assert_eq!(encode_field_snapshot(&field, &prov).unwrap(), data, "{}", path.display());
                ok += 1;
            }
            Err(_) => assert!(path.ends_with("truncated.bin"), "{}", path.display()),
        }
    }
    assert_eq!(ok, 2);
}

#[test]
fn profile_seeds() {
    for (path, data) in seeds("profile_csv") {
        let parsed = parse_profile_csv(std::str::from_utf8(&data).unwrap());
        let expect_ok = path.ends_with("basic.csv");
        assert_eq!(parsed.is_ok(), expect_ok, "{}", path.display());
    }
}
