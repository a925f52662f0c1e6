//! Replays the fuzz corpus seeds with the same assertions as the fuzz targets.

use std::path::PathBuf;
use std::sync::Arc;

use sympoisson::expr::{parse, parse_with_names};
use sympoisson::geometry::Chart;
use sympoisson::io::{parse_point_list, CatalogRef, StructureFile};
use sympoisson::pw::PhaseField;
use sympoisson::sampling::Sampling;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn expr_seeds() {
    for (name, data) in seeds("parse_expr") {
        let Some((&arity, rest)) = data.split_first() else {
            continue;
        };
        let Ok(s) = std::str::from_utf8(rest) else {
            continue;
        };
        let arity = usize::from(arity % 5);
        if let Ok(f) = parse(s, arity) {
            let names: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
            let printed = f.expr().display(&names).to_string();
            let back =
                parse_with_names(&printed, &names).unwrap_or_else(|e| panic!("{name}: {e:?}"));
            assert_eq!(back.expr(), f.expr(), "{name}");
            let _ = f.evaluate(&vec![0.5; arity]);
        }
    }
}

#[test]
fn structure_file_seeds() {
    for (name, data) in seeds("parse_structure_file") {
        let s = String::from_utf8(data).unwrap();
        match StructureFile::parse(&s) {
            Ok(file) => {
                let again = StructureFile::parse(&file.to_string())
                    .unwrap_or_else(|e| panic!("{name}: {e}"));
                assert_eq!(again.to_string(), file.to_string(), "{name}");
                file.build(&Sampling::default().with_count(2))
                    .unwrap_or_else(|e| panic!("{name}: {e}"));
            }
            Err(e) => assert_eq!(name, "malformed", "{e}"),
        }
    }
}

#[test]
fn point_list_seeds() {
    for (name, data) in seeds("parse_point_list") {
        let s = String::from_utf8(data).unwrap();
        if let Ok(v) = parse_point_list(&s) {
            assert!(v.iter().all(|x| x.is_finite()), "{name}");
        }
    }
}

#[test]
fn catalog_ref_seeds() {
    for (name, data) in seeds("parse_catalog_ref") {
        let s = String::from_utf8(data).unwrap();
        if let Ok(r) = CatalogRef::parse(&s) {
            assert_eq!(CatalogRef::parse(&r.to_string()).as_ref(), Ok(&r), "{name}");
        }
    }
}

#[test]
fn phase_field_seeds() {
    let chart = Arc::new(Chart::standard(2));
    for (_, data) in seeds("parse_phase_field") {
        let s = String::from_utf8(data).unwrap();
        let _ = PhaseField::parse(&chart, &s);
    }
}
