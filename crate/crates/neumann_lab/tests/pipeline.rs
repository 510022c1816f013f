use neumann_lab::atoms::haar_atomic_decomposition;
use neumann_lab::factorization::{weak_factorize, HChoice};
use neumann_lab::grid::{norm, Norm};
use neumann_lab::{Grid, GridFunction, OperatorConfig};

fn dyadic_pair(grid: Grid) -> GridFunction {
    GridFunction::from_fn(grid, |x| {
        let x = x[0];
        if (12.0..12.125).contains(&x) {
            4.0
        } else if (12.125..12.25).contains(&x) {
            -4.0
        } else if (-4.25..-4.125).contains(&x) {
            -1.0
        } else if (-4.125..-4.0).contains(&x) {
            1.0
        } else {
            0.0
        }
    })
}

#[test]
fn decompose_factor_and_write() {
    let grid = Grid::new(1, 16.0, 1024).unwrap();
    let f = dyadic_pair(grid);

    let dec = haar_atomic_decomposition(&f, None).unwrap();
    assert!(dec.terms.iter().all(|(_, a)| a.check().ok()));
    let back = dec.reconstruct(grid);
    assert!(norm(&back.sub(&f), Norm::L2) < 1e-12);

    let ledger = weak_factorize(&f, 0.1, 1, 3, HChoice::Balanced, &OperatorConfig::default()).unwrap();
    assert!(!ledger.levels.is_empty());
    assert!(ledger.ratios().iter().all(|&r| r < 1.0), "{:?}", ledger.ratios());
    assert!(ledger.reconstruction_error(&f) < 1e-9);

    let dir = tempfile::tempdir().unwrap();
    dec.write(&dir.path().join("atoms")).unwrap();
    assert!(dir.path().join("atoms/decomposition.json").exists());
    ledger.write(&dir.path().join("ledger")).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("ledger.csv")).unwrap();
    assert!(csv.starts_with("level,residual_h1,ratio,cost"));
    assert_eq!(csv.lines().count(), ledger.levels.len() + 1);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ledger.json")).unwrap()).unwrap();
    assert_eq!(json["levels"].as_array().unwrap().len(), ledger.levels.len());
}
