use std::collections::BTreeSet;

use xgl::synthdata::{generate_synthetic, initial_training_set, stratified_kfold, Dataset, SyntheticConfig};

fn default_dataset() -> Dataset {
    generate_synthetic(&SyntheticConfig::default()).unwrap()
}

#[test]
fn default_dataset_shape() {
    let ds = default_dataset();
    assert_eq!(ds.len(), 1041);
    assert_eq!((ds.counts().red, ds.counts().blue), (100, 941));
    let meta = ds.generator().unwrap();
    for i in 0..ds.len() {
        let p = ds.point(i);
        assert!((0.0..=1.0).contains(&p.x1) && (0.0..=1.0).contains(&p.x2));
        if !ds.label(i).is_red() {
            assert!(meta.centers.iter().all(|c| p.dist(c) >= 0.06));
        }
    }
}

#[test]
fn ten_folds_of_default_dataset() {
    let ds = default_dataset();
    let folds = stratified_kfold(&ds, 10, 0).unwrap();
    let mut seen = BTreeSet::new();
    for f in &folds {
        let n = f.test_indices.len();
        assert!(n == 104 || n == 105, "test fold size {n}");
        let red = f.test_indices.iter().filter(|&&i| ds.label(i).is_red()).count();
        assert!((9..=11).contains(&red), "red count {red}");
        assert_eq!(f.train_indices.len() + n, 1041);
        for &i in &f.test_indices {
            assert!(seen.insert(i), "index {i} in two test folds");
        }
    }
    assert_eq!(seen.len(), 1041);
}

#[test]
fn initial_sets_have_two_per_class() {
    let ds = default_dataset();
    let folds = stratified_kfold(&ds, 10, 0).unwrap();
    for (seed, f) in folds.iter().enumerate() {
        let init = initial_training_set(f, &ds, seed as u64).unwrap();
        assert_eq!(init.len(), 5);
        let red = init.iter().filter(|&&i| ds.label(i).is_red()).count();
        assert!((2..=3).contains(&red));
        assert!(init.iter().all(|i| f.train_indices.contains(i)));
        assert_eq!(init, initial_training_set(f, &ds, seed as u64).unwrap());
    }
}

#[test]
fn csv_round_trip() {
    let ds = default_dataset();
    let mut buf = Vec::new();
    ds.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("x1,x2,label\n"));
    assert_eq!(text.lines().count(), 1042);
    let back = Dataset::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.examples(), ds.examples());
}
