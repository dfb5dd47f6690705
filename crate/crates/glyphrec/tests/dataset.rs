use std::fs;
use std::path::Path;

use glyphrec::dataset::{self, split, Source, SplitSpec};
use glyphrec::pgm::encode_pgm;
use glyphrec::synth::synth_glyphs;
use glyphrec::Error;
use glyphrec_core::GrayImage;

fn write_glyph(path: &Path, shade: u8) {
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    let img = GrayImage::new(4, 4, vec![shade; 16]).unwrap();
    fs::write(path, encode_pgm(&img)).unwrap();
}

#[test]
fn class_folders_become_labels() {
    let tmp = tempfile::tempdir().unwrap();
    for c in 0..49 {
        write_glyph(&tmp.path().join(format!("class_{c:02}/a.pgm")), 0);
        write_glyph(&tmp.path().join(format!("class_{c:02}/b.pgm")), 255);
    }
    fs::write(tmp.path().join("class_03/notes.txt"), "ignored").unwrap();
    let m = dataset::ingest(tmp.path()).unwrap();
    assert_eq!(m.entries.len(), 98);
    for (i, e) in m.entries.iter().enumerate() {
        assert_eq!(e.label, i / 2);
        assert_eq!(e.source, Source::Own);
    }
    assert_eq!(m.class_names[17], "class_17");
}

#[test]
fn unnumbered_folders_use_sorted_order() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["zeta", "alpha", "mu"] {
        write_glyph(&tmp.path().join(name).join("x.pgm"), 9);
    }
    let m = dataset::ingest(tmp.path()).unwrap();
    assert_eq!(m.labels(), vec![0, 1, 2]);
    assert_eq!(&m.class_names[..3], ["alpha", "mu", "zeta"]);
}

#[test]
fn empty_directory_has_no_samples() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(matches!(dataset::ingest(tmp.path()), Err(Error::NoSamples)));
    fs::create_dir(tmp.path().join("class_00")).unwrap();
    assert!(matches!(dataset::ingest(tmp.path()), Err(Error::NoSamples)));
}

#[test]
fn out_of_range_labels() {
    let tmp = tempfile::tempdir().unwrap();
    write_glyph(&tmp.path().join("a.pgm"), 0);
    let json = tmp.path().join("m.json");
    fs::write(&json, r#"{"entries": [{"path": "a.pgm", "label": 49, "source": "isi"}]}"#).unwrap();
    assert!(matches!(dataset::ingest(&json), Err(Error::BadLabel { label: 49, .. })));
    let csv = tmp.path().join("m.csv");
    fs::write(&csv, "path,label\na.pgm,-1\n").unwrap();
    assert!(matches!(dataset::ingest(&csv), Err(Error::BadLabel { label: -1, .. })));
    fs::write(&csv, "path,label,source\na.pgm,48,own\n").unwrap();
    assert_eq!(dataset::ingest(&csv).unwrap().entries[0].label, 48);
    let dir = tempfile::tempdir().unwrap();
    write_glyph(&dir.path().join("class_60/a.pgm"), 0);
    assert!(matches!(dataset::ingest(dir.path()), Err(Error::BadLabel { label: 60, .. })));
}

#[test]
fn unreadable_images_are_listed() {
    let tmp = tempfile::tempdir().unwrap();
    write_glyph(&tmp.path().join("good.pgm"), 0);
    fs::write(tmp.path().join("bad.pgm"), b"P5\n4 4\n255\n\x00").unwrap();
    let json = tmp.path().join("m.json");
    fs::write(
        &json,
        r#"{"entries": [
            {"path": "good.pgm", "label": 1, "source": "own"},
            {"path": "bad.pgm", "label": 1, "source": "own"},
            {"path": "missing.png", "label": 2, "source": "own"}
        ]}"#,
    )
    .unwrap();
    match dataset::ingest(&json) {
        Err(Error::UnreadableImage(list)) => {
            let names: Vec<String> = list.iter().map(|(p, _)| p.file_name().unwrap().to_string_lossy().into()).collect();
            assert_eq!(names, ["bad.pgm", "missing.png"]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn duplicate_paths_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    write_glyph(&tmp.path().join("a.pgm"), 0);
    let json = tmp.path().join("m.json");
    fs::write(
        &json,
        r#"{"entries": [{"path": "a.pgm", "label": 1, "source": "own"}, {"path": "a.pgm", "label": 2, "source": "own"}]}"#,
    )
    .unwrap();
    assert!(matches!(dataset::ingest(&json), Err(Error::ConfigInvalid(_))));
}

#[test]
fn synthetic_dataset_round_trips_through_disk() {
    let tmp = tempfile::tempdir().unwrap();
    let d = synth_glyphs(3, 4, 0.05, 8).unwrap();
    d.write(tmp.path()).unwrap();
    assert!(tmp.path().join("class_02/sample_0003.pgm").is_file());
    let m = dataset::ingest(&tmp.path().join("manifest.json")).unwrap();
    assert_eq!(m.entries, d.manifest.entries);
    assert!(m.entries.iter().all(|e| e.source == Source::Synthetic));
    assert_eq!(m.load_images().unwrap(), d.images);
}

#[test]
fn stratified_split_sizes() {
    let labels: Vec<usize> = (0..10).flat_map(|c| std::iter::repeat_n(c, 10)).collect();
    let s = split(&labels, &SplitSpec::new(0.7, 0.2, 4)).unwrap();
    for c in 0..10 {
        let count = |v: &[usize]| v.iter().filter(|&&i| labels[i] == c).count();
        assert_eq!((count(&s.train), count(&s.selection), count(&s.test)), (7, 2, 1));
    }
    let mut flat = SplitSpec::new(0.5, 0.0, 4);
    flat.stratified = false;
    let s = split(&labels, &flat).unwrap();
    assert_eq!((s.train.len(), s.test.len()), (50, 50));
}
