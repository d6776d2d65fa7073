use approx::assert_abs_diff_eq;
use mqc_core::exact::{evolve_lindblad_full, mqc_direct_full, FullDensityMatrix, Frame};
use mqc_core::sym::{build_dissipator, build_interaction_blocks, evolve_sym, SymmetricState};
use mqc_core::{DecoherenceRates, Direction, ModelParams, SpinAxis};

fn max_dev(a: &FullDensityMatrix, b: &FullDensityMatrix) -> f64 {
    (a.matrix() - b.matrix()).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

#[test]
fn rotation_matches_oracle() {
    let axis = SpinAxis::normalized(0.3, -0.6, 0.5).unwrap();
    for n in 1..=4 {
        let s = SymmetricState::all_up(n).unwrap().rotate(&SpinAxis::Y, 0.7).rotate(&axis, 1.9);
        let f = FullDensityMatrix::all_up(n).unwrap().rotate(&SpinAxis::Y, 0.7).rotate(&axis, 1.9);
        assert!(max_dev(&FullDensityMatrix::from_sym(&s).unwrap(), &f) < 1e-12, "n = {n}");
    }
}

#[test]
fn twisting_with_decoherence_matches_oracle() {
    for n in 1..=4 {
        let rates = DecoherenceRates::new(0.13, 0.31, 0.7).unwrap();
        let j = 1.7;
        let gen = build_interaction_blocks(n, j).unwrap().combine(&build_dissipator(n, rates).unwrap()).unwrap();
        let params = ModelParams::new(n, j, 0.0).unwrap();
        let s0 = SymmetricState::all_up(n).unwrap().rotate(&SpinAxis::Y, 1.1);
        let f0 = FullDensityMatrix::all_up(n).unwrap().rotate(&SpinAxis::Y, 1.1);
        for dir in [Direction::Forward, Direction::Backward] {
            let s = evolve_sym(&s0, &gen, 0.8, dir).unwrap();
            let f = evolve_lindblad_full(&f0, &params, &rates, 0.8, dir, Frame::Twist).unwrap();
            let dev = max_dev(&FullDensityMatrix::from_sym(&s).unwrap(), &f);
            assert!(dev < 1e-9, "n = {n}, {dir:?}: {dev}");
            let a = s.mqc_z();
            let b = mqc_direct_full(&f, &SpinAxis::Z);
            for m in -(n as i64)..=n as i64 {
                assert_abs_diff_eq!(a.get(m), b.get(m), epsilon = 1e-9);
            }
        }
    }
}
