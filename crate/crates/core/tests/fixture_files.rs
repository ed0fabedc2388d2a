//! The JSON files under `fixtures/` describe the same instances as
//! `leray_persist::fixtures`.
//!
//! Regenerate them with `cargo test --test fixture_files -- --ignored`.

use std::path::PathBuf;

use leray_persist::fixtures;
use leray_persist::io::InstanceFile;
use leray_persist::FieldChoice;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[test]
#[ignore = "rewrites the fixture files"]
fn regenerate() {
    std::fs::create_dir_all(dir()).unwrap();
    for (name, inst) in fixtures::all() {
        let text = InstanceFile::from_instance(&inst, FieldChoice::default()).to_text();
        std::fs::write(dir().join(format!("{name}.json")), text).unwrap();
    }
}

#[test]
fn files_match_code() {
    for (name, inst) in fixtures::all() {
        let path = dir().join(format!("{name}.json"));
        let loaded = leray_persist::io::load(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(loaded.warnings.is_empty(), "{name}");
        assert_eq!(loaded.instance.complex, inst.complex, "{name}");
        assert_eq!(loaded.instance.system.target(), inst.system.target(), "{name}");
        assert_eq!(loaded.instance.system.map(), inst.system.map(), "{name}");
        assert_eq!(loaded.instance.system.pieces(), inst.system.pieces(), "{name}");
    }
}

#[test]
fn files_round_trip_byte_for_byte() {
    for (name, _) in fixtures::all() {
        let path = dir().join(format!("{name}.json"));
        let text = std::fs::read_to_string(&path).unwrap();
        let file = InstanceFile::parse(&text).unwrap();
        assert_eq!(file.to_text(), text, "{name}");
        let rebuilt = file.build().unwrap();
        assert_eq!(InstanceFile::from_instance(&rebuilt.instance, rebuilt.field), file, "{name}");
    }
}
