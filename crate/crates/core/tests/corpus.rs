use std::path::PathBuf;

use khh::corpus::{compute_quantities, load_corpus, regenerate_goldens};
use khh::table::DimensionTable;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn goldens_are_current() {
    let rows = regenerate_goldens(&dir(), false).unwrap();
    assert!(!rows.is_empty());
    let drift: Vec<_> = rows.iter().filter(|r| r.status != "unchanged").collect();
    assert!(drift.is_empty(), "{drift:?}");
}

#[test]
fn required_members_present() {
    let names: Vec<String> = load_corpus(&dir()).unwrap().into_iter().map(|e| e.name).collect();
    for m in ["rational", "line", "plane", "cusp", "t2t5", "quadric-cone", "dual-numbers", "curve-37a"] {
        assert!(names.iter().any(|n| n == m), "missing {m}");
    }
}

#[test]
fn cusp_goldens_hold_known_values() {
    let entry = load_corpus(&dir()).unwrap().into_iter().find(|e| e.name == "cusp").unwrap();
    let q = compute_quantities(&entry).unwrap();
    let hh: &DimensionTable = &q["hh"].table;
    assert_eq!(hh.get(&[1, 5]), Some(2));
    assert_eq!(hh.get(&[1, 1]), Some(0));
    let tk = &q["tk"].table;
    assert_eq!(tk.get(&[0, 1]), Some(1));
    assert_eq!(tk.get(&[2, 5]), Some(1));
    assert_eq!(tk.get(&[2, 6]), Some(0));
    let golden = entry.expected_table("tk").unwrap();
    assert_eq!(&golden, tk);
}
