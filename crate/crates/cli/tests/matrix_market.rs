use eigopt::linalg::CMatrix;
use eigopt_cli::mm::{format_matrix, parse_matrix, read_matrix, write_matrix};
use eigopt_cli::CliError;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn array_real_is_column_major() {
    let m = parse_matrix(
        "%%MatrixMarket matrix array real general\n% comment\n2 2\n1\n2\n3.5\n-4e-3\n",
        "t",
    )
    .unwrap();
    assert_eq!(m[(0, 0)], c(1.0, 0.0));
    assert_eq!(m[(1, 0)], c(2.0, 0.0));
    assert_eq!(m[(0, 1)], c(3.5, 0.0));
    assert_eq!(m[(1, 1)], c(-4e-3, 0.0));
}

#[test]
fn coordinate_hermitian_lower_triangle_is_mirrored() {
    let text = "%%MatrixMarket matrix coordinate complex hermitian\n3 3 3\n1 1 2 0\n2 1 1 -1\n3 2 0 5\n";
    let m = parse_matrix(text, "t").unwrap();
    assert_eq!(m[(1, 0)], c(1.0, -1.0));
    assert_eq!(m[(0, 1)], c(1.0, 1.0));
    assert_eq!(m[(2, 1)], c(0.0, 5.0));
    assert_eq!(m[(1, 2)], c(0.0, -5.0));
    assert_eq!(m, m.adjoint());
}

#[test]
fn symmetric_and_skew_arrays() {
    let s = parse_matrix("%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n", "t").unwrap();
    assert_eq!(s[(0, 1)], c(2.0, 0.0));
    assert_eq!(s[(1, 1)], c(3.0, 0.0));
    let k = parse_matrix("%%MatrixMarket matrix array integer skew-symmetric\n2 2\n7\n", "t").unwrap();
    assert_eq!(k[(1, 0)], c(7.0, 0.0));
    assert_eq!(k[(0, 1)], c(-7.0, 0.0));
    assert_eq!(k[(0, 0)], c(0.0, 0.0));
}

#[test]
fn empty_coordinate_file_is_zero() {
    let m = parse_matrix("%%MatrixMarket matrix coordinate real general\n4 4 0\n", "t").unwrap();
    assert_eq!(m, CMatrix::zeros(4, 4));
}

#[test]
fn pattern_entries_are_ones() {
    let m = parse_matrix(
        "%%MatrixMarket matrix coordinate pattern general\n2 3 2\n1 3\n2 1\n",
        "t",
    )
    .unwrap();
    assert_eq!(m.shape(), (2, 3));
    assert_eq!(m[(0, 2)], c(1.0, 0.0));
    assert_eq!(m[(1, 0)], c(1.0, 0.0));
}

fn line_of(text: &str) -> usize {
    match parse_matrix(text, "bad.mtx") {
        Err(CliError::Parse { line, path, .. }) => {
            assert_eq!(path, "bad.mtx");
            line
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn errors_name_the_line() {
    assert_eq!(line_of("%%MatrixMarket matrix array real\n2 2\n"), 1);
    assert_eq!(line_of("%%MatrixMarket matrix array real general\n2 x\n"), 2);
    assert_eq!(line_of("%%MatrixMarket matrix array real general\n2 1\n1.0\nabc\n"), 4);
    assert_eq!(
        line_of("%%MatrixMarket matrix coordinate real general\n2 2 1\n% c\n3 1 1.0\n"),
        4
    );
    assert_eq!(
        line_of("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1.0\n"),
        3
    );
    assert_eq!(line_of("%%MatrixMarket matrix array real general\n1 1\n1\n2\n"), 4);
    assert_eq!(line_of("%%MatrixMarket matrix array real general\n2 1\n1\n"), 3);
    assert_eq!(line_of(""), 1);
}

#[test]
fn write_then_read_is_exact() {
    let m = CMatrix::from_fn(3, 2, |i, j| c(0.1 * i as f64 - 1.0 / 3.0, (j as f64).sqrt() * 1e-300));
    let back = parse_matrix(&format_matrix(&m), "t").unwrap();
    assert_eq!(back, m);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.mtx");
    let real = CMatrix::from_fn(2, 2, |i, j| c(std::f64::consts::PI * (i + 2 * j) as f64, 0.0));
    write_matrix(&p, &real).unwrap();
    assert!(std::fs::read_to_string(&p).unwrap().contains("array real general"));
    assert_eq!(read_matrix(&p).unwrap(), real);
}

#[test]
fn missing_file_is_io_error() {
    let e = read_matrix(std::path::Path::new("/nonexistent/a.mtx")).unwrap_err();
    assert!(matches!(e, CliError::Io { .. }));
    assert_eq!(e.exit_code(), 2);
}
