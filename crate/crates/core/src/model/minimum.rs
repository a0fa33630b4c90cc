use nalgebra::{DMatrix, DVector};

use super::polynomial::{gradient, hessian, Polynomial};
use crate::error::{Error, Result};
use crate::linalg::sym_eigenvalues;

const MAX_ITER: usize = 200;

/// Locates a strict local minimum of `u` by Newton iteration on `∇u`.
///
/// Stops once the gradient is below `tol` and the Newton step has stagnated at
/// round-off level, then checks that the Hessian is nondegenerate.
pub fn find_minimum(u: &Polynomial, guess: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
    let m = u.nvars();
    if guess.len() != m {
        return Err(Error::validation(format!("guess has {} entries, expected {m}", guess.len())));
    }
    let grad = gradient(u);
    let hess = hessian(u);
    let eval_g = |x: &DVector<f64>| DVector::from_iterator(m, grad.iter().map(|g| g.eval(x.as_slice())));
    let eval_h = |x: &DVector<f64>| DMatrix::from_fn(m, m, |i, j| hess[i][j].eval(x.as_slice()));

    let mut x = guess.clone();
    let mut gnorm = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let g = eval_g(&x);
        gnorm = g.norm();
        let h = eval_h(&x);
        let Some(step) = h.clone().lu().solve(&g) else {
            return check_hessian(&h).and(Err(Error::NonConvergence {
                context: "model::find_minimum",
                iterations: MAX_ITER,
                residual: gnorm,
            }));
        };
        x -= &step;
        if !x.iter().all(|v| v.is_finite()) {
            break;
        }
        if step.norm() <= 1e-15 * (1.0 + x.norm()) && gnorm <= tol {
            check_hessian(&eval_h(&x))?;
            return Ok(x);
        }
    }
    if gnorm <= tol {
        check_hessian(&eval_h(&x))?;
        return Ok(x);
    }
    Err(Error::NonConvergence { context: "model::find_minimum", iterations: MAX_ITER, residual: gnorm })
}

fn check_hessian(h: &DMatrix<f64>) -> Result<()> {
    let eig = sym_eigenvalues(h);
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);
    if lo.abs() <= 1e-10 * hi.abs().max(1.0) {
        return Err(Error::DegenerateMinimum { min_eig: lo, max_eig: hi });
    }
    if lo < 0.0 {
        return Err(Error::HypothesisViolation(format!(
            "stationary point is not a minimum (Hessian eigenvalue {lo:e})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p1(terms: &[(u32, f64)]) -> Polynomial {
        Polynomial::from_terms(1, terms.iter().map(|&(e, c)| (vec![e], c))).unwrap()
    }

    #[test]
    fn quadratic_with_linear_term() {
        let u = p1(&[(2, 0.5), (1, -1.0)]);
        let c = find_minimum(&u, &DVector::from_element(1, 0.9), 1e-12).unwrap();
        assert_eq!(c[0], 1.0);
    }

    #[test]
    fn quartic_well_is_centered() {
        let u = p1(&[(2, 0.5), (4, 0.25)]);
        let c = find_minimum(&u, &DVector::from_element(1, 0.1), 1e-12).unwrap();
        assert!(c[0].abs() < 1e-15);
    }

    #[test]
    fn flat_quartic_is_degenerate() {
        let u = p1(&[(4, 0.25)]);
        let r = find_minimum(&u, &DVector::from_element(1, 0.1), 1e-12);
        assert!(matches!(r, Err(Error::DegenerateMinimum { .. })), "{r:?}");
    }

    #[test]
    fn maximum_is_rejected() {
        let u = p1(&[(2, -0.5)]);
        assert!(find_minimum(&u, &DVector::from_element(1, 0.3), 1e-12).is_err());
    }

    #[test]
    fn asymmetric_two_dimensional() {
        // U = x1²/2 + x2²/2 + x1²x2 − 0.1 x1 has a minimum near (0.1, 0)
        let u = Polynomial::from_terms(
            2,
            vec![(vec![2, 0], 0.5), (vec![0, 2], 0.5), (vec![2, 1], 1.0), (vec![1, 0], -0.1)],
        )
        .unwrap();
        let c = find_minimum(&u, &DVector::zeros(2), 1e-12).unwrap();
        let g: Vec<f64> = gradient(&u).iter().map(|q| q.eval(c.as_slice())).collect();
        assert!(g.iter().all(|v| v.abs() < 1e-14));
    }

    proptest! {
        #[test]
        fn gradient_matches_finite_differences(
            coeffs in proptest::collection::vec(-2.0f64..2.0, 6),
            x in proptest::collection::vec(-1.0f64..1.0, 2),
        ) {
            let exps = [[1, 0], [0, 1], [2, 0], [1, 1], [3, 1], [0, 4]];
            let v = Polynomial::from_terms(2, exps.iter().zip(&coeffs).map(|(e, &c)| (e.to_vec(), c))).unwrap();
            let u = super::super::polynomial::build_u(&v, &[0.3, -0.2]);
            let g = gradient(&u);
            let h = 1e-5;
            for i in 0..2 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (u.eval(&xp) - u.eval(&xm)) / (2.0 * h);
                let exact = g[i].eval(&x);
                prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0));
            }
        }
    }
}
