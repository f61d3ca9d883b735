mod common;

use common::*;
use tensor_tprod::factor::{t_jordan, t_svd};
use tensor_tprod::fourier::to_fourier;
use tensor_tprod::ginv::{t_drazin, t_group, t_inverse, t_pinv_blocks, t_pinv_svd};
use tensor_tprod::structure::is_f_diagonal;
use tensor_tprod::{Error, Tensor3};

#[test]
fn bcirc_matches_definition() {
    for (seed, (m, n, p)) in [(2, 3, 4), (1, 1, 5), (3, 2, 1), (2, 2, 6)].into_iter().enumerate() {
        let a = dense(seed as u64, m, n, p);
        assert_eq!(a.bcirc().matrix(), &bcirc_oracle(&a));
    }
}

#[test]
fn fourier_blocks_match_naive_dft() {
    for (seed, p) in [1, 2, 3, 4, 5, 8, 12].into_iter().enumerate() {
        let a = dense(10 + seed as u64, 2, 3, p);
        let fb = to_fourier(&a);
        for (got, want) in fb.blocks().iter().zip(dft_oracle(&a)) {
            assert!(max_abs_c(&(got - want)) < 1e-12);
        }
    }
}

#[test]
fn block_singular_values_are_those_of_bcirc() {
    for seed in 0..10 {
        let a = dense(20 + seed, 3, 2, 1 + seed as usize % 6);
        let mut want = singular_values(a.bcirc().matrix());
        let mut got: Vec<f64> = to_fourier(&a).blocks().iter().flat_map(singular_values_c).collect();
        got.sort_by(|x, y| y.total_cmp(x));
        want.truncate(got.len());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10);
        }
        let svd = t_svd(&a).unwrap();
        let mut tsvd: Vec<f64> = svd.sigmas.concat();
        tsvd.sort_by(|x, y| y.total_cmp(x));
        for (g, w) in tsvd.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10);
        }
    }
}

#[test]
fn inverse_transports_to_bcirc() {
    for seed in 0..10 {
        let a = dense(30 + seed, 3, 3, 1 + seed as usize % 5);
        let x = t_inverse(&a).unwrap();
        let want = a.bcirc().matrix().clone().try_inverse().unwrap();
        assert!(max_abs_r(&(x.x.bcirc().matrix() - want)) < 1e-9);
    }
}

#[test]
fn pinv_transports_to_bcirc() {
    for seed in 0..10 {
        let p = 1 + seed as usize % 5;
        let a = if seed % 2 == 0 { dense(40 + seed, 3, 2, p) } else { rank_deficient(40 + seed, 3, p) };
        let want = pinv_oracle(a.bcirc().matrix());
        for x in [t_pinv_blocks(&a).unwrap(), t_pinv_svd(&a).unwrap()] {
            assert!(x.report.pass, "{}", x.report);
            assert!(max_abs_r(&(x.x.bcirc().matrix() - &want)) < 1e-9);
        }
    }
}

#[test]
fn drazin_transports_to_bcirc_with_index() {
    for seed in 0..12 {
        let p = 1 + seed as usize % 5;
        let (a, index) = with_nilpotent_blocks(50 + seed, 3, p, 3);
        let d = t_drazin(&a).unwrap();
        assert!(d.report.pass, "{}", d.report);
        assert_eq!(d.index, index);
        let (want, k) = drazin_oracle(a.bcirc().matrix());
        assert_eq!(k, index);
        assert!(max_abs_r(&(d.ad.bcirc().matrix() - want)) < 1e-9);
    }
}

#[test]
fn group_inverse_existence_follows_bcirc_ranks() {
    for seed in 0..12 {
        let p = 1 + seed as usize % 4;
        let (a, _) = with_nilpotent_blocks(60 + seed, 3, p, 2);
        let b = a.bcirc().matrix().clone();
        let smax = singular_values(&b)[0];
        let exists = rank(&(&b * &b), 1e-9, smax * smax) == rank(&b, 1e-9, smax);
        match t_group(&a) {
            Ok(g) => {
                assert!(exists);
                let (want, _) = drazin_oracle(&b);
                assert!(max_abs_r(&(g.x.bcirc().matrix() - want)) < 1e-9);
            }
            Err(Error::GroupInverseNotExist { .. }) => assert!(!exists),
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn jordan_of_f_diagonal_is_f_diagonal() {
    // tubes (1, 0, 0), (2, 1, 0), (-1, 0, 2) give distinct real eigenvalues
    // on the real-forced blocks
    let mut a = Tensor3::zeros(3, 3, 3);
    let tubes = [[1.0, 0.0, 0.0], [2.0, 1.0, 0.0], [-1.0, 0.0, 2.0]];
    let mut data = a.data().to_vec();
    for (i, tube) in tubes.iter().enumerate() {
        for (k, &x) in tube.iter().enumerate() {
            data[k * 9 + i * 3 + i] = x;
        }
    }
    a = Tensor3::from_vec(3, 3, 3, data).unwrap();
    let j = t_jordan(&a).unwrap();
    assert!(j.report.pass, "{}", j.report);
    assert!(is_f_diagonal(&j.j, 1e-12));
    assert_eq!(j.realized_partition, vec![1, 1, 1]);
}
