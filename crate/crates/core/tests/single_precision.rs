//! The same pipelines instantiated at `f32`.

use clarklab::clark::{finite_spectral_measure, theta_from_measure};
use clarklab::sample::jordan_block;
use clarklab::*;

type C = nalgebra::Complex<f32>;

#[test]
fn jordan_block_in_single_precision() {
    let rec: ContractionRecord32 = defect_data(&jordan_block::<f32>(), 1e-6).unwrap();
    assert_eq!((rec.n, rec.n_star), (1, 1));
    let z = C::new(0.3, -0.4);
    let theta = char_fn_definition(&rec, z).unwrap()[(0, 0)];
    assert!((theta - z * z).norm() < 1e-6);
}

#[test]
fn two_point_measure_in_single_precision() {
    let mu: CircleMeasure32 =
        CircleMeasure::atomic(vec![Atom::at_fraction(0.0, 0.5), Atom::at_fraction(0.5, 0.5)]).unwrap();
    let z = C::new(0.5, 0.2);
    assert!((theta_from_measure(&mu, z).unwrap() - z * z).norm() < 1e-6);
    let mi = finite_spectral_measure(&mu, C::new(0.0, 1.0)).unwrap();
    assert_eq!(mi.atoms().len(), 2);
    assert!(mi.atoms().iter().all(|a| (a.weight - 0.5).abs() < 1e-5));
}

#[test]
fn dilation_in_single_precision() {
    let rec = defect_data(&jordan_block::<f32>(), 1e-6).unwrap();
    let id = Matrix32::identity(1, 1);
    let b = build_dilation(&rec, 4, &id, &id, DilationMode::Cyclic).unwrap();
    assert!(verify_dilation(&b, 4).unwrap() < 1e-6);
}
