use super::Preconditioner;
use crate::error::{Result, SolverError};
use crate::meshcore::CellOrdering;
use crate::Mat2;

/// Block symmetric Gauss-Seidel preconditioner `(D+U)^-1 D (D+L)^-1` on 2x2
/// blocks, where `L` and `U` hold the couplings to cells earlier and later in
/// the sweep order.
#[derive(Debug, Clone)]
pub struct SgsPreconditioner {
    order: Vec<usize>,
    diag_inv: Vec<Mat2>,
    lower: Vec<Vec<(usize, Mat2)>>,
    upper: Vec<Vec<(usize, Mat2)>>,
}

impl SgsPreconditioner {
    /// `couplings[i]` lists off-diagonal blocks `(j, A_ij)` of row `i`.
    pub fn new(diag: &[Mat2], couplings: &[Vec<(usize, Mat2)>], ordering: &CellOrdering) -> Result<Self> {
        let mut diag_inv = Vec::with_capacity(diag.len());
        for (i, d) in diag.iter().enumerate() {
            let det = d.determinant();
            let scale = d.abs().max().max(f64::MIN_POSITIVE);
            if !(det.abs() > 1e-14 * scale * scale) {
                return Err(SolverError::SingularPreconditioner(i).into());
            }
            diag_inv.push(d.try_inverse().ok_or(SolverError::SingularPreconditioner(i))?);
        }
        let mut lower = vec![Vec::new(); diag.len()];
        let mut upper = vec![Vec::new(); diag.len()];
        for (i, row) in couplings.iter().enumerate() {
            let me = ordering.permutation[i];
            for &(j, a) in row {
                if ordering.permutation[j] < me {
                    lower[i].push((j, a));
                } else {
                    upper[i].push((j, a));
                }
            }
        }
        Ok(Self {
            order: ordering.order.clone(),
            diag_inv,
            lower,
            upper,
        })
    }

    pub fn n_blocks(&self) -> usize {
        self.diag_inv.len()
    }
}

impl Preconditioner for SgsPreconditioner {
    fn apply(&self, q: &[f64], r: &mut [f64]) -> Result<()> {
        let n = self.diag_inv.len();
        if q.len() != 2 * n || r.len() != 2 * n {
            return Err(SolverError::DimensionMismatch { expected: 2 * n, got: q.len() }.into());
        }
        let get = |v: &[f64], i: usize| crate::Vec2::new(v[2 * i], v[2 * i + 1]);
        // forward sweep: (D + L) q~ = q, stored in r
        for &i in &self.order {
            let mut s = get(q, i);
            for &(j, a) in &self.lower[i] {
                s -= a * get(r, j);
            }
            let v = self.diag_inv[i] * s;
            r[2 * i] = v.x;
            r[2 * i + 1] = v.y;
        }
        // backward sweep: (D + U) r = D q~
        for &i in self.order.iter().rev() {
            let mut s = crate::Vec2::zeros();
            for &(j, a) in &self.upper[i] {
                s += a * get(r, j);
            }
            let v = get(r, i) - self.diag_inv[i] * s;
            r[2 * i] = v.x;
            r[2 * i + 1] = v.y;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krylov::testing::{dense_solve, random_vector};
    use crate::krylov::{gmres_solve, KrylovConfig, KrylovMethod, LinearOperator};
    use crate::meshcore::order_by_bins;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct BlockSystem {
        diag: Vec<Mat2>,
        couplings: Vec<Vec<(usize, Mat2)>>,
    }

    impl BlockSystem {
        fn dense(&self) -> Vec<Vec<f64>> {
            let n = self.diag.len();
            let mut a = vec![vec![0.0; 2 * n]; 2 * n];
            for i in 0..n {
                for r in 0..2 {
                    for c in 0..2 {
                        a[2 * i + r][2 * i + c] = self.diag[i][(r, c)];
                    }
                }
                for &(j, m) in &self.couplings[i] {
                    for r in 0..2 {
                        for c in 0..2 {
                            a[2 * i + r][2 * j + c] += m[(r, c)];
                        }
                    }
                }
            }
            a
        }
    }

    impl LinearOperator for BlockSystem {
        fn dim(&self) -> usize {
            2 * self.diag.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            let a = self.dense();
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = a[i].iter().zip(x).map(|(p, q)| p * q).sum();
            }
        }
    }

    fn random_system(n: usize, seed: u64, density: f64) -> BlockSystem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = || Mat2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let diag = (0..n).map(|_| m() + Mat2::identity() * 4.0).collect();
        let mut rng2 = ChaCha8Rng::seed_from_u64(seed + 1);
        let couplings = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && rng2.random_bool(density)).map(|j| (j, m())).collect())
            .collect();
        BlockSystem { diag, couplings }
    }

    fn ordering_from(perm_keys: &[f64]) -> CellOrdering {
        let (order, bins) = order_by_bins(perm_keys, 1e-9).unwrap();
        let mut permutation = vec![0; order.len()];
        for (k, &o) in order.iter().enumerate() {
            permutation[o] = k;
        }
        CellOrdering { permutation, order, bin_of_cell: bins, ..CellOrdering::identity(perm_keys.len()) }
    }

    #[test]
    fn identity_blocks() {
        let n = 3;
        let p = SgsPreconditioner::new(&vec![Mat2::identity(); n], &vec![Vec::new(); n], &CellOrdering::identity(n)).unwrap();
        let q = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let mut r = [0.0; 6];
        p.apply(&q, &mut r).unwrap();
        assert_eq!(q, r);
    }

    #[test]
    fn singular_block_rejected() {
        let d = vec![Mat2::identity(), Mat2::new(1.0, 2.0, 2.0, 4.0)];
        assert!(matches!(
            SgsPreconditioner::new(&d, &vec![Vec::new(); 2], &CellOrdering::identity(2)),
            Err(crate::Error::Solver(SolverError::SingularPreconditioner(1)))
        ));
    }

    #[test]
    fn dense_oracle_on_four_blocks() {
        let sys = random_system(4, 7, 0.7);
        let ord = ordering_from(&[2.0, 0.0, 3.0, 1.0]);
        let p = SgsPreconditioner::new(&sys.diag, &sys.couplings, &ord).unwrap();
        let full = sys.dense();
        // split the dense matrix by ordering position
        let n = 8;
        let (mut l, mut d, mut u) = (vec![vec![0.0; n]; n], vec![vec![0.0; n]; n], vec![vec![0.0; n]; n]);
        for r in 0..n {
            for c in 0..n {
                let (pr, pc) = (ord.permutation[r / 2], ord.permutation[c / 2]);
                let t = if pr == pc { &mut d } else if pc < pr { &mut l } else { &mut u };
                t[r][c] = full[r][c];
            }
        }
        let q = random_vector(n, 99);
        let add = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()
        };
        let y1 = dense_solve(&add(&d, &l), &q);
        let y2: Vec<f64> = (0..n).map(|r| (0..n).map(|c| d[r][c] * y1[c]).sum()).collect();
        let oracle = dense_solve(&add(&d, &u), &y2);
        let mut r = vec![0.0; n];
        p.apply(&q, &mut r).unwrap();
        for (a, b) in r.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lower_triangular_chain_is_exact() {
        // implicit upwind advection chain: row i couples only to i - 1
        let n = 25;
        let diag = vec![Mat2::identity() * 1.5; n];
        let couplings: Vec<Vec<(usize, Mat2)>> = (0..n).map(|i| if i > 0 { vec![(i - 1, Mat2::identity() * -0.5)] } else { vec![] }).collect();
        let sys = BlockSystem { diag: diag.clone(), couplings: couplings.clone() };
        let p = SgsPreconditioner::new(&diag, &couplings, &CellOrdering::identity(n)).unwrap();
        let x = random_vector(2 * n, 5);
        let mut jx = vec![0.0; 2 * n];
        sys.apply(&x, &mut jx);
        let mut back = vec![0.0; 2 * n];
        p.apply(&jx, &mut back).unwrap();
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
        let cfg = KrylovConfig { method: KrylovMethod::Gmres, tol: 1e-12, max_iter: 50, restart: 30 };
        let (sol, stats) = gmres_solve(&sys, &jx, &p, &cfg).unwrap();
        assert!(stats.converged && stats.iterations <= 2);
        for (a, b) in sol.iter().zip(&x) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn inverse_of_sgs_factorization(seed in 0u64..10_000, n in 2usize..9) {
            // P^-1 ((D+L) D^-1 (D+U) x) = x
            let sys = random_system(n, seed, 0.5);
            let keys: Vec<f64> = random_vector(n, seed + 7);
            let ord = ordering_from(&keys);
            let p = SgsPreconditioner::new(&sys.diag, &sys.couplings, &ord).unwrap();
            let x = random_vector(2 * n, seed + 3);
            let get = |v: &[f64], i: usize| crate::Vec2::new(v[2 * i], v[2 * i + 1]);
            let part = |v: &[f64], lower: bool| -> Vec<f64> {
                let mut out = vec![0.0; 2 * n];
                for i in 0..n {
                    let mut s = sys.diag[i] * get(v, i);
                    for &(j, a) in &sys.couplings[i] {
                        if (ord.permutation[j] < ord.permutation[i]) == lower { s += a * get(v, j); }
                    }
                    out[2 * i] = s.x; out[2 * i + 1] = s.y;
                }
                out
            };
            let y = part(&x, false);
            let mut z = vec![0.0; 2 * n];
            for i in 0..n {
                let v = sys.diag[i].try_inverse().unwrap() * get(&y, i);
                z[2 * i] = v.x; z[2 * i + 1] = v.y;
            }
            let w = part(&z, true);
            let mut back = vec![0.0; 2 * n];
            p.apply(&w, &mut back).unwrap();
            for (a, b) in back.iter().zip(&x) {
                prop_assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()) * 10.0);
            }
        }
    }
}
