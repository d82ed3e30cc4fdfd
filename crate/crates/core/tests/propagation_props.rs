//! Randomized properties of the propagator and the matrix exponential.

mod support;

use nalgebra::DMatrix;
use proptest::prelude::*;
use sympoctl_core::optimizer::{initial_field, InitKind};
use sympoctl_core::symplectic::{expm, propagate_unitary};
use support::{composition, expm_inverse, field_case, generator, model, symplecticity, unit_determinant};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn symplecticity_is_preserved(c in field_case()) {
        symplecticity(&c)?;
    }

    #[test]
    fn propagated_determinant_is_one(c in field_case()) {
        unit_determinant(&c)?;
    }

    #[test]
    fn split_propagation_composes(c in field_case(), cut in 0.0f64..1.0) {
        composition(&c, cut)?;
    }

    #[test]
    fn expm_inverse_consistency(a in generator()) {
        expm_inverse(&a)?;
    }

    #[test]
    fn expm_inverse_is_tight_on_rotations(entries in prop::collection::vec(-1.0f64..1.0, 36), scale in 0.0f64..10.0) {
        // Rotation generators have ‖e^A‖ = √d, so no conditioning slack is needed.
        let raw = DMatrix::from_column_slice(6, 6, &entries);
        let k = &raw - raw.transpose();
        prop_assume!(k.norm() > 0.0);
        let a = &k * (scale / k.norm());
        let err = (expm(&a).unwrap() * expm(&(-&a)).unwrap() - DMatrix::identity(6, 6)).norm();
        prop_assert!(err <= 1e-10, "err {err}");
    }

    #[test]
    fn unitary_propagation_stays_unitary(n in 2usize..4, t_f in 0.1f64..3.0, q in 2usize..30, seed in any::<u64>()) {
        let sys = model(&format!("nmr:{n}"));
        let f = initial_field(InitKind::Random, sys.n_controls(), q, t_f, 2.0, seed).unwrap();
        for u in propagate_unitary(&sys, &f).unwrap() {
            prop_assert!(u.unitarity_residual() <= 1e-9 * q as f64);
        }
    }
}
