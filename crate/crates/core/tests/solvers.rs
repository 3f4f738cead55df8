use hmm_core::linalg::{cg_projected, norm2, CgOptions, CsrMatrix, LuFactors, TripletBuilder};
use hmm_core::C64;
use proptest::prelude::*;

fn dense_solve(n: usize, mut a: Vec<C64>, mut b: Vec<C64>) -> Vec<C64> {
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i * n + c].norm().total_cmp(&a[j * n + c].norm())).unwrap();
        for j in 0..n {
            a.swap(c * n + j, p * n + j);
        }
        b.swap(c, p);
        for i in c + 1..n {
            let f = a[i * n + c] / a[c * n + c];
            for j in c..n {
                let v = a[c * n + j];
                a[i * n + j] -= f * v;
            }
            let v = b[c];
            b[i] -= f * v;
        }
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i * n + j] * x[j];
        }
        x[i] = s / a[i * n + i];
    }
    x
}

type Entry = (usize, usize, f64, f64);

fn system(n: usize, entries: &[Entry], symmetric: bool) -> CsrMatrix {
    let mut tb = TripletBuilder::new(n, n);
    for &(i, j, re, im) in entries {
        let (i, j) = (i % n, j % n);
        tb.push(i, j, C64::new(re, im));
        if symmetric && i != j {
            tb.push(j, i, C64::new(re, im));
        } else if i != j {
            tb.push(j, i, C64::new(0.5 * im, -re));
        }
    }
    for i in 0..n {
        let sign = if i % 3 == 0 { -1.0 } else { 1.0 };
        tb.push(i, i, C64::new(sign * 2.0 * entries.len() as f64, 0.3));
    }
    tb.build()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sparse_lu_matches_dense_elimination(
        n in 2usize..40,
        entries in prop::collection::vec((0usize..40, 0usize..40, -1.0f64..1.0, -1.0f64..1.0), 1..120),
        symmetric in any::<bool>(),
        rhs_seed in -1.0f64..1.0,
    ) {
        let a = system(n, &entries, symmetric);
        let b: Vec<C64> = (0..n).map(|i| C64::new(rhs_seed + i as f64, (i as f64 * 0.7).sin())).collect();
        let lu = LuFactors::factorize(&a).unwrap();
        prop_assert_eq!(lu.is_symmetric(), a.max_asymmetry() == 0.0);
        let x = lu.solve(&b).unwrap();
        let y = dense_solve(n, a.to_dense(), b.clone());
        let diff: Vec<C64> = x.iter().zip(&y).map(|(p, q)| p - q).collect();
        prop_assert!(norm2(&diff) <= 1e-10 * norm2(&y).max(1.0));
    }
}

#[test]
fn cg_error_energy_is_monotone() {
    let n = 60;
    let mut tb = TripletBuilder::new(n, n);
    for i in 0..n {
        tb.push(i, i, C64::new(2.0 + (i as f64).sin().abs(), 0.0));
        if i + 1 < n {
            tb.push(i, i + 1, C64::new(-1.0, 0.0));
            tb.push(i + 1, i, C64::new(-1.0, 0.0));
        }
    }
    let a = tb.build();
    let x_star: Vec<C64> = (0..n).map(|i| C64::new((i as f64).cos(), 0.1 * i as f64)).collect();
    let b = a.spmv(&x_star).unwrap();
    let energy = |x: &[C64]| {
        let e: Vec<C64> = x.iter().zip(&x_star).map(|(p, q)| p - q).collect();
        a.quadratic(&e).re
    };
    let mut last = f64::INFINITY;
    for it in 1..40 {
        let opts = CgOptions { tol: 1e-14, max_iter: it, ..CgOptions::default() };
        let (x, _) = cg_projected(&a, &b, &|_: &mut [C64]| {}, opts).unwrap();
        let e = energy(&x);
        assert!(e <= last * (1.0 + 1e-12), "iteration {it}: {e} > {last}");
        last = e;
    }
    assert!(last < 1e-16);
}
