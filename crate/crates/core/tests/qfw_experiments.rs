use spinfw::opalg::Case;
use spinfw::qfw::*;

fn setup(case: Case) -> (LatticeSpec, spinfw::ParticleParams) {
    let p = default_params(case);
    (default_lattice(case, &p).unwrap(), p)
}

#[test]
fn default_lattices_have_the_documented_size() {
    let (s1, p1) = setup(Case::I);
    let (s2, p2) = setup(Case::II);
    assert_eq!(s1.matrix_dim(), 576);
    assert_eq!(s2.matrix_dim(), 256);
    assert!(s1.check_cutoff(&p1).is_ok() && s2.check_cutoff(&p2).is_ok());
}

#[test]
fn transform_preserves_spectrum_on_default_lattices() {
    for case in [Case::I, Case::II] {
        let (s, p) = setup(case);
        for lambda in [1e-2, 1e-3] {
            let h = build_hamiltonian(case, &s, lambda, &p).unwrap();
            let hp = eriksen_fw(&h, &p).unwrap();
            assert!(spectrum_defect(&h, &hp) < 1e-10);
            assert!(hp.block_defect() < 1e-11);
        }
    }
}

#[test]
fn second_order_scaling_with_darwin_term() {
    for case in [Case::I, Case::II] {
        let (s, p) = setup(case);
        let r = residual_scaling(case, &s, &p, &default_lambdas(case), true).unwrap();
        assert!((r.slope - 2.0).abs() <= 0.1, "{r:?}");
    }
}

#[test]
fn first_order_scaling_without_darwin_term() {
    let (s, p) = setup(Case::II);
    let r = residual_scaling(Case::II, &s, &p, &default_lambdas(Case::II), false).unwrap();
    assert!((r.slope - 1.0).abs() <= 0.1, "{r:?}");
    let records = r.records(1.0, 0.1);
    assert_eq!(records.len(), 3);
    assert!(records.iter().all(|x| x.pass));
}

#[test]
fn parity_is_a_symmetry_of_both_hamiltonians() {
    for case in [Case::I, Case::II] {
        let (s, p) = setup(case);
        let r = parity_check(case, &s, 1e-2, &p).unwrap();
        assert!(r.hamiltonian < 1e-12 && r.transformed < 1e-12, "{r:?}");
    }
}

#[test]
fn plain_darwin_candidate_loses_to_the_weyl_form() {
    let (s, p) = setup(Case::II);
    let c = darwin_vs_classical_hd(&s, &p, &default_lambdas(Case::II)).unwrap();
    assert!(c.nr_agrees(), "{c:?}");
    assert!(c.weyl_wins_at(c.fit_index()), "{c:?}");
    assert!((c.slope_weyl - 2.0).abs() <= 0.1);
    assert!((c.slope_plain - 1.0).abs() <= 0.1);
    assert!((c.slope_none - 1.0).abs() <= 0.1);
    assert!(c.negative_result_holds());
}

#[test]
fn symbolic_series_agrees_with_the_lattice_transform() {
    let (s, p) = setup(Case::I);
    let c = opalg_crosscheck(&s, 1e-3, &p, 6, 4, 17).unwrap();
    assert!(c.holds(), "{c:?}");
}

#[test]
fn strong_vector_potential_leaves_the_convergence_domain() {
    let p = default_params(Case::I);
    let s = LatticeSpec::at_cutoff(2, 8, 0.9, &p).unwrap();
    assert!(build_correspondence(Case::I, &s, 1e-3, &p, true).is_ok());
    // eA = 0.6 mc² on top of |p| = 0.9 mc pushes π²/m²c² past 1
    let r = build_correspondence(Case::I, &s, 0.6, &p, true);
    assert!(matches!(r, Err(spinfw::Error::SeriesTruncation(_))), "{r:?}");
}
