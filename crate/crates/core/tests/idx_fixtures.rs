use std::path::PathBuf;

use nalgebra::DMatrix;
use riemann_inexact::idx::{encode_idx_images, load_mnist_idx, parse_idx_images, parse_idx_labels, IdxError};
use riemann_inexact::problems::{pca_instance_from_data, DataSource};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn two_image_fixture_loads_exactly() {
    let (m, manifest) = load_mnist_idx(fixture("two_images.idx")).unwrap();
    let expected = DMatrix::from_row_slice(2, 4, &[0.0, 0.2, 0.4, 1.0, 1.0, 0.0, 0.8, 0.6]);
    assert_eq!(m, expected);
    assert!(matches!(manifest.source, DataSource::MnistIdx { .. }));
    assert_eq!(manifest.digest.len(), 64);
    let (_, again) = load_mnist_idx(fixture("two_images.idx")).unwrap();
    assert_eq!(manifest.digest, again.digest);
}

#[test]
fn fixture_round_trips_through_encoder() {
    let bytes = std::fs::read(fixture("two_images.idx")).unwrap();
    let imgs = parse_idx_images(&bytes).unwrap();
    assert_eq!(encode_idx_images(&imgs), bytes);
}

#[test]
fn bad_magic_fixture() {
    let err = load_mnist_idx(fixture("bad_magic.idx")).unwrap_err();
    assert!(matches!(
        err,
        IdxError::BadMagic {
            expected: 0x803,
            found: 0x801
        }
    ));
    assert!(err.to_string().contains("expected image tensor magic"));
    assert_eq!(err.offset(), Some(0));
}

#[test]
fn truncated_fixture() {
    let err = load_mnist_idx(fixture("truncated.idx")).unwrap_err();
    assert!(matches!(
        err,
        IdxError::Truncated {
            offset: 20,
            needed: 24,
            available: 20
        }
    ));
    assert_eq!(err.offset(), Some(20));
}

#[test]
fn missing_file_is_io_error() {
    let err = load_mnist_idx(fixture("does_not_exist.idx")).unwrap_err();
    assert!(matches!(err, IdxError::Io { .. }));
}

#[test]
fn label_file_is_accepted_but_not_an_image() {
    let bytes = std::fs::read(fixture("labels.idx")).unwrap();
    assert_eq!(parse_idx_labels(&bytes).unwrap(), vec![7, 2, 1]);
    assert!(matches!(
        load_mnist_idx(fixture("labels.idx")),
        Err(IdxError::BadMagic { .. })
    ));
}

#[test]
fn pca_from_fixture_data() {
    let (m, _) = load_mnist_idx(fixture("two_images.idx")).unwrap();
    let inst = pca_instance_from_data(&m, 1, 1000, 0).unwrap();
    let expected = m.transpose() * &m / 2.0;
    assert!((inst.matrix() - expected).norm() < 1e-15);
}
