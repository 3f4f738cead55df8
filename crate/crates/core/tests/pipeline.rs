use hmm_core::cell::{symmetric_eigenvalues, tensor_asymmetry, MicroCell, MicroCoefficients};
use hmm_core::hmm::{hmm_solve, zeroth_order_field, HmmConfig};
use hmm_core::C64;

#[test]
fn trivial_cell_gives_scaled_identity() {
    let coeffs = MicroCoefficients { eps0_inv: 2.5, eps1_inv: C64::new(1.0, -0.01) };
    let cell = MicroCell::new(4, None, coeffs).unwrap();
    for k in [1.0, 8.886, 20.0] {
        let t = cell.solve_all(k).unwrap().effective_tensors();
        for i in 0..3 {
            for j in 0..3 {
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((t.eps_inv_hom[i][j] - 2.5 * id).abs() < 1e-10);
                assert!((t.mu_hom[i][j] - id).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn tensors_are_symmetric_with_dissipative_mu() {
    let cell = MicroCell::standard(8, MicroCoefficients::default()).unwrap();
    for k in [3.0, 12.5] {
        let t = cell.solve_all(k).unwrap().effective_tensors();
        let e = t.eps_inv_hom;
        let asym = (0..3).flat_map(|i| (0..3).map(move |j| (e[i][j] - e[j][i]).abs())).fold(0.0, f64::max);
        assert!(asym < 1e-10);
        assert!(symmetric_eigenvalues(e).iter().all(|&l| l > 0.0));
        assert!(tensor_asymmetry(&t.mu_hom) < 1e-8);
        let im = t.mu_hom.map(|r| r.map(|z| 0.5 * z.im));
        let im = core::array::from_fn(|i| core::array::from_fn(|j| im[i][j] + im[j][i]));
        assert!(symmetric_eigenvalues(im).iter().all(|&l| l > 0.0));
    }
}

#[test]
fn correctors_follow_their_expansions() {
    let cfg = HmmConfig::default();
    let mesh = cfg.macro_mesh(4).unwrap();
    let cell = cfg.micro_cell(4).unwrap();
    let k = 6.0;
    let hmm = hmm_solve(&cfg, &mesh, &cell, k).unwrap();
    assert_eq!(hmm.correctors.len(), 48);
    let w = &hmm.correctors[5];
    let u3 = hmm.corrector3(5, 2);
    for (d, z) in u3.iter().enumerate() {
        let mut s = C64::new(0.0, 0.0);
        for j in 0..3 {
            s += (w.values[2][j] * C64::new(k * k, 0.0)) * hmm.cells.cell3.w3[j].coeffs[d];
        }
        assert_eq!(*z, s);
    }
    let u1 = hmm.corrector1(5);
    assert_eq!(u1.len(), hmm.cells.cell1.w1[0].coeffs.len());
    assert_eq!(hmm.corrector2(5, 0).len(), hmm.cells.cell2.p[0].coeffs.len());
}

#[test]
fn macro_part_does_not_depend_on_delta() {
    let cfg = HmmConfig::default();
    let mesh = cfg.macro_mesh(4).unwrap();
    let cell = cfg.micro_cell(4).unwrap();
    let hmm = hmm_solve(&cfg, &mesh, &cell, 9.0).unwrap();
    let pts = [[0.1, 0.1, 0.9], [0.5, 0.45, 0.55], [0.3, 0.6, 0.7]];
    let a = zeroth_order_field(&hmm, 0.1, &pts);
    let b = zeroth_order_field(&hmm, 0.07, &pts);
    assert_eq!(a[0], hmm.u_h().eval(pts[0]));
    assert_eq!(a[0], b[0]);
    assert_ne!(a[1], b[1]);
    let u = hmm.u_h().eval(pts[1]).unwrap();
    assert!(a[1].unwrap().iter().zip(&u).map(|(p, q)| (p - q).norm()).sum::<f64>() > 0.0);
}
