use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rdfforge_core::entity::{shapes_from_db, shapes_from_schema};
use rdfforge_core::pipeline::{convert, load, Conversion, Options};
use rdfforge_core::relational::ObjectKind;
use rdfforge_core::Exec;

fn fixtures() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    out.sort();
    assert!(out.len() >= 5);
    out
}

fn run(path: &Path, exec: Exec) -> Conversion {
    convert(&load(path).unwrap(), &Options { deterministic: true, exec, ..Options::default() })
}

#[test]
fn shapes_survive_the_database() {
    for path in fixtures() {
        let c = run(&path, Exec::default());
        let dir = tempfile::tempdir().unwrap();
        let db = dir.path().join("x.db");
        c.write_database(&db).unwrap();
        let conn = rusqlite::Connection::open(&db).unwrap();
        assert_eq!(shapes_from_db(&conn).unwrap(), shapes_from_schema(&c.schema), "{}", path.display());
    }
}

#[test]
fn no_rows_are_lost() {
    for path in fixtures() {
        let c = run(&path, Exec::default());
        let entity_rows = c.records.iter().filter(|r| c.schema.entity_table(&r.table).is_some()).count();
        let instances: usize = c.classes.iter().map(|ci| ci.instances.len()).sum();
        assert_eq!(entity_rows, instances, "{}", path.display());
        for mm in &c.schema.mm_tables {
            let rows = c.records.iter().filter(|r| r.table == mm.name).count();
            let expected = if mm.object_kind == ObjectKind::TypeRef {
                let class = c.classes.get(&mm.domain).unwrap();
                class.instances.iter().map(|i| c.classes.types_of(i).unwrap().len()).sum()
            } else {
                c.classification.profiles.iter().find(|p| p.property == mm.property && p.domain == mm.domain && p.range == mm.range).unwrap().statements
            };
            assert_eq!(rows, expected, "{} {}", path.display(), mm.name);
        }
    }
}

#[test]
fn predicate_counts_cover_typed_usage() {
    for path in fixtures() {
        let c = run(&path, Exec::default());
        let s = c.stats();
        let predicates: BTreeSet<_> = c
            .graph
            .iter()
            .filter(|t| !t.is_type() && t.subject.as_iri().is_some_and(|i| c.classes.is_typed(i)))
            .map(|t| t.predicate.clone())
            .collect();
        assert_eq!(s.op + s.dp, predicates.len(), "{}", path.display());
        assert_eq!(s.oo + s.mo + s.om + s.mm, c.classification.entity_profiles().count());
        assert_eq!(s.et, s.cls);
    }
}

#[test]
fn strategies_produce_identical_output() {
    for path in fixtures() {
        let a = run(&path, Exec::Sequential);
        let b = run(&path, Exec::Parallel);
        assert_eq!(a.classification, b.classification);
        assert_eq!(a.records, b.records);
        assert_eq!(a.dump(), b.dump());
    }
}
