//! Seeded test tensors.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`. Entries are
//! drawn uniformly from `[-1, 1]` in storage order (slice by slice, row-major
//! within a slice).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Dense,
    /// `(G + G^T) / 2`, exactly t-symmetric.
    TSymmetric,
    /// `B * C` with inner dimension `ceil(n / 2)`.
    RankDeficient,
    FDiagonal,
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dense" => Ok(Kind::Dense),
            "t_symmetric" => Ok(Kind::TSymmetric),
            "rank_deficient" => Ok(Kind::RankDeficient),
            "f_diagonal" => Ok(Kind::FDiagonal),
            _ => Err(format!("unknown kind `{s}` (dense, t_symmetric, rank_deficient, f_diagonal)")),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Dense => "dense",
            Kind::TSymmetric => "t_symmetric",
            Kind::RankDeficient => "rank_deficient",
            Kind::FDiagonal => "f_diagonal",
        })
    }
}

fn dense(rng: &mut ChaCha8Rng, m: usize, n: usize, p: usize) -> Tensor3 {
    let data = (0..m * n * p).map(|_| rng.random_range(-1.0..=1.0)).collect();
    Tensor3::from_vec(m, n, p, data).expect("finite entries")
}

pub fn gen(seed: u64, m: usize, n: usize, p: usize, kind: Kind) -> Result<Tensor3> {
    if m == 0 || n == 0 || p == 0 {
        return Err(Error::dim("dimensions must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        Kind::Dense => Ok(dense(&mut rng, m, n, p)),
        Kind::TSymmetric => {
            if m != n {
                return Err(Error::dim(format!("t_symmetric needs m = n, got {m}x{n}")));
            }
            let g = dense(&mut rng, n, n, p);
            Ok(g.add(&g.transpose())?.scale(0.5))
        }
        Kind::RankDeficient => {
            let r = n.div_ceil(2);
            let b = dense(&mut rng, m, r, p);
            let c = dense(&mut rng, r, n, p);
            b.tprod(&c)
        }
        Kind::FDiagonal => {
            let mut data = vec![0.0; m * n * p];
            for k in 0..p {
                for i in 0..m.min(n) {
                    data[k * m * n + i * n + i] = rng.random_range(-1.0..=1.0);
                }
            }
            Tensor3::from_vec(m, n, p, data)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure;

    #[test]
    fn deterministic() {
        let a = gen(1, 3, 4, 5, Kind::Dense).unwrap();
        let b = gen(1, 3, 4, 5, Kind::Dense).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen(2, 3, 4, 5, Kind::Dense).unwrap());
        assert!(a.data().iter().all(|x| (-1.0..=1.0).contains(x)));
    }

    #[test]
    fn t_symmetric_is_exact() {
        for p in 1..6 {
            let a = gen(p as u64, 3, 3, p, Kind::TSymmetric).unwrap();
            assert!(structure::is_t_symmetric(&a, 0.0));
        }
    }

    #[test]
    fn f_diagonal_kind() {
        let a = gen(3, 3, 2, 4, Kind::FDiagonal).unwrap();
        assert!(structure::is_f_diagonal(&a, 0.0));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in [Kind::Dense, Kind::TSymmetric, Kind::RankDeficient, Kind::FDiagonal] {
            assert_eq!(k.to_string().parse::<Kind>().unwrap(), k);
        }
    }
}
