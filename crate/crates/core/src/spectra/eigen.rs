//! Principal eigenvalues by shifted inverse power iteration, and low
//! spectra of symmetric operators by shift-invert subspace iteration.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::geometry::ScalarField;
use crate::spectra::operator::OperatorMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub max_iters: usize,
    /// Relative change of the Rayleigh ratio that counts as converged.
    pub tol: f64,
    /// Required residual `‖𝓛φ − λφ‖_∞ / ‖φ‖_∞` on success.
    pub residual_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { max_iters: 10_000, tol: 1e-12, residual_tol: 1e-8 }
    }
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub lambda1: f64,
    /// Normalized to maximum node value 1.
    pub eigenfunction: ScalarField,
    pub residual: f64,
    pub iterations: usize,
    /// Minimum node value strictly positive.
    pub positive: bool,
    pub adjoint_lambda1: f64,
    pub adjoint_eigenfunction: ScalarField,
    /// Shift `δ` used to make `𝓛 + δ` invertible with positive inverse.
    pub shift: f64,
}

/// LU factorization of `K + σM`.
struct ShiftedSolver {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    n: usize,
}

impl ShiftedSolver {
    fn new(op: &OperatorMatrix, sigma: f64) -> Result<Self> {
        let n = op.dim();
        let mut trip: Vec<Triplet<usize, usize, f64>> =
            op.triplets().into_iter().map(|(a, b, v)| Triplet::new(a, b, v)).collect();
        for (a, m) in op.mass.iter().enumerate() {
            trip.push(Triplet::new(a, a, sigma * m));
        }
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
            .map_err(|e| Error::LinearSolver(format!("{e:?}")))?;
        let lu = mat.sp_lu().map_err(|e| Error::LinearSolver(format!("{e:?}")))?;
        Ok(ShiftedSolver { lu, n })
    }

    fn solve(&self, rhs: &[f64], transpose: bool) -> Result<Vec<f64>> {
        let mut x = Mat::from_fn(self.n, 1, |i, _| rhs[i]);
        if transpose {
            self.lu.solve_transpose_in_place(x.as_mut());
        } else {
            self.lu.solve_in_place(x.as_mut());
        }
        let out: Vec<f64> = (0..self.n).map(|i| x[(i, 0)]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolver("singular shifted operator".into()));
        }
        Ok(out)
    }
}

/// `δ = max(0, −min c) + 1`.
pub fn default_shift(op: &OperatorMatrix) -> f64 {
    let cmin = op.node_c.iter().cloned().fold(f64::INFINITY, f64::min);
    (-cmin).max(0.0) + 1.0
}

fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn mass_dot(m: &[f64], x: &[f64], y: &[f64]) -> f64 {
    m.iter().zip(x).zip(y).map(|((m, a), b)| m * a * b).sum()
}

struct PowerOutcome {
    lambda: f64,
    vector: Vec<f64>,
    iterations: usize,
}

/// Power iteration on `(K + δM)⁻¹ M` or its transpose counterpart
/// `(Kᵀ + δM)⁻¹ M`, which represents `(𝓛* + δ)⁻¹` in the `L²(dμ)` pairing.
fn power(op: &OperatorMatrix, solver: &ShiftedSolver, shift: f64, transpose: bool, opts: &EigenOptions) -> Result<PowerOutcome> {
    let n = op.dim();
    let mass = &op.mass;
    let mut x = vec![1.0; n];
    let mut xi_prev = f64::NAN;
    let mut last_change = f64::INFINITY;
    for it in 1..=opts.max_iters {
        let rhs: Vec<f64> = x.iter().zip(mass).map(|(a, m)| a * m).collect();
        let y = solver.solve(&rhs, transpose)?;
        let xi = mass_dot(mass, &x, &y) / mass_dot(mass, &x, &x);
        let norm = inf_norm(&y);
        if norm == 0.0 || !xi.is_finite() {
            return Err(Error::LinearSolver("power iteration collapsed".into()));
        }
        // keep the dominant entry positive so successive iterates are comparable
        let sign = if y.iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m }) < 0.0 { -1.0 } else { 1.0 };
        x = y.into_iter().map(|v| sign * v / norm).collect();
        last_change = (xi - xi_prev).abs();
        if last_change <= opts.tol * xi.abs() {
            let lambda = 1.0 / xi - shift;
            let r = residual(op, &x, lambda, transpose);
            if r < opts.residual_tol * lambda.abs().max(1.0) {
                return Ok(PowerOutcome { lambda, vector: x, iterations: it });
            }
        }
        xi_prev = xi;
    }
    Err(Error::IterationFailure { iterations: opts.max_iters, last_change })
}

fn residual(op: &OperatorMatrix, x: &[f64], lambda: f64, transpose: bool) -> f64 {
    let kx = if transpose { op.stiffness_apply_transpose(x) } else { op.stiffness_apply(x) };
    let r = kx.iter().zip(&op.mass).zip(x).fold(0.0f64, |m, ((k, mu), xi)| m.max((k / mu - lambda * xi).abs()));
    r / inf_norm(x)
}

/// Principal eigenpair of `𝓛` and the principal eigenvalue of its adjoint.
pub fn principal_eigenvalue(op: &OperatorMatrix) -> Result<EigenResult> {
    principal_eigenvalue_with(op, &EigenOptions::default())
}

pub fn principal_eigenvalue_with(op: &OperatorMatrix, opts: &EigenOptions) -> Result<EigenResult> {
    let shift = default_shift(op);
    let solver = ShiftedSolver::new(op, shift)?;
    let direct = power(op, &solver, shift, false, opts)?;
    let adjoint = if op.symmetric {
        None
    } else {
        Some(power(op, &solver, shift, true, opts)?)
    };
    let residual = residual(op, &direct.vector, direct.lambda, false);
    let positive = direct.vector.iter().all(|&v| v > 0.0);
    let (adjoint_lambda1, adjoint_vec) = match adjoint {
        Some(a) => (a.lambda, a.vector),
        None => (direct.lambda, direct.vector.clone()),
    };
    Ok(EigenResult {
        lambda1: direct.lambda,
        eigenfunction: ScalarField(direct.vector),
        residual,
        iterations: direct.iterations,
        positive,
        adjoint_lambda1,
        adjoint_eigenfunction: ScalarField(adjoint_vec),
        shift,
    })
}

fn require_symmetric(op: &OperatorMatrix) -> Result<()> {
    if !op.symmetric {
        return Err(Error::Unsupported(format!("operator {} is not symmetric", op.label)));
    }
    Ok(())
}

/// Lowest `count` eigenvalues of the symmetric generalized problem
/// `Kx = λMx`, in nondecreasing order.
pub fn symmetric_spectrum(op: &OperatorMatrix, count: usize) -> Result<Vec<f64>> {
    require_symmetric(op)?;
    lowest_eigenvalues(op, count, false)
}

/// Lowest `count` eigenvalues of a symmetric operator restricted to
/// functions with `∫φ dμ = 0`.
pub fn mean_zero_spectrum(op: &OperatorMatrix, count: usize) -> Result<Vec<f64>> {
    require_symmetric(op)?;
    lowest_eigenvalues(op, count.min(op.dim().saturating_sub(1)), true)
}

fn lowest_eigenvalues(op: &OperatorMatrix, count: usize, mean_zero: bool) -> Result<Vec<f64>> {
    let n = op.dim();
    if count == 0 {
        return Ok(vec![]);
    }
    let count = count.min(n);
    let p = (count + count / 2 + 4).min(n);
    let shift = default_shift(op);
    let solver = ShiftedSolver::new(op, shift)?;
    let sqm: Vec<f64> = op.mass.iter().map(|m| m.sqrt()).collect();
    // work in the symmetric standard form B = M^{-1/2} K M^{-1/2}
    let apply_inverse = |v: &[f64]| -> Result<Vec<f64>> {
        let rhs: Vec<f64> = v.iter().zip(&sqm).map(|(a, s)| a * s).collect();
        let y = solver.solve(&rhs, false)?;
        Ok(y.iter().zip(&sqm).map(|(a, s)| a * s).collect())
    };
    // with the constraint ⟨u, y⟩ = 0, u = √m / |√m|, iterate with the
    // inverse restricted to u⊥: S⁻¹ − S⁻¹u uᵀS⁻¹ / (uᵀS⁻¹u)
    let constraint = if mean_zero {
        let norm = op.mass.iter().sum::<f64>().sqrt();
        let u: Vec<f64> = sqm.iter().map(|s| s / norm).collect();
        let z = apply_inverse(&u)?;
        let uz: f64 = u.iter().zip(&z).map(|(a, b)| a * b).sum();
        Some((u, z, uz))
    } else {
        None
    };
    let mut basis: Vec<Vec<f64>> = (0..p)
        .map(|c| {
            (0..n)
                .map(|i| {
                    let t = (i as f64 + 1.0) * (c as f64 + 1.0);
                    (0.37 * t).sin() + 0.5 * (1.3 * t).cos() + if c == 0 { 1.0 } else { 0.0 }
                })
                .collect()
        })
        .collect();
    if let Some((u, _, _)) = &constraint {
        for v in basis.iter_mut() {
            let d: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
        }
    }
    orthonormalize(&mut basis);
    let mut prev: Vec<f64> = vec![f64::NAN; count];
    let max_iters = 2000;
    for _ in 0..max_iters {
        for v in basis.iter_mut() {
            let mut y = apply_inverse(v)?;
            if let Some((_, z, uz)) = &constraint {
                let d: f64 = z.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<f64>() / uz;
                y.iter_mut().zip(z).for_each(|(x, zi)| *x -= d * zi);
            }
            *v = y;
        }
        orthonormalize(&mut basis);
        let bv: Vec<Vec<f64>> = basis
            .iter()
            .map(|v| {
                let x: Vec<f64> = v.iter().zip(&sqm).map(|(a, s)| a / s).collect();
                op.stiffness_apply(&x).iter().zip(&sqm).map(|(a, s)| a / s).collect()
            })
            .collect();
        let t = Mat::from_fn(p, p, |a, b| {
            let ab: f64 = basis[a].iter().zip(&bv[b]).map(|(x, y)| x * y).sum();
            let ba: f64 = basis[b].iter().zip(&bv[a]).map(|(x, y)| x * y).sum();
            0.5 * (ab + ba)
        });
        let evd = t.self_adjoint_eigen(Side::Lower).map_err(|e| Error::LinearSolver(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let vals: Vec<f64> = (0..p).map(|i| s[i]).collect();
        basis = (0..p)
            .map(|c| (0..n).map(|i| (0..p).map(|r| basis[r][i] * u[(r, c)]).sum()).collect())
            .collect();
        let scale = vals.iter().take(count).fold(1.0f64, |m, v| m.max(v.abs()));
        let done = vals.iter().zip(&prev).take(count).all(|(a, b)| (a - b).abs() <= 1e-11 * scale);
        prev = vals[..count].to_vec();
        if done {
            return Ok(prev);
        }
    }
    Err(Error::IterationFailure { iterations: max_iters, last_change: f64::NAN })
}

fn orthonormalize(basis: &mut [Vec<f64>]) {
    for pass in 0..2 {
        for c in 0..basis.len() {
            for r in 0..c {
                let d: f64 = basis[r].iter().zip(&basis[c]).map(|(a, b)| a * b).sum();
                let (head, tail) = basis.split_at_mut(c);
                for (x, y) in tail[0].iter_mut().zip(&head[r]) {
                    *x -= d * y;
                }
            }
            let norm: f64 = basis[c].iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                basis[c].iter_mut().for_each(|x| *x /= norm);
            } else if pass == 0 {
                let len = basis[c].len();
                basis[c][c % len] = 1.0;
            }
        }
    }
}

/// Default index tolerance `1e-8 · max(1, max|c|)`.
pub fn index_tolerance(op: &OperatorMatrix) -> f64 {
    1e-8 * op.node_c.iter().fold(1.0f64, |m, c| m.max(c.abs()))
}

/// Number of eigenvalues below `−tol`.
pub fn morse_index(op: &OperatorMatrix) -> Result<usize> {
    morse_index_with(op, index_tolerance(op))
}

pub fn morse_index_with(op: &OperatorMatrix, tol: f64) -> Result<usize> {
    require_symmetric(op)?;
    let mut count = 8.min(op.dim());
    loop {
        let vals = lowest_eigenvalues(op, count, false)?;
        let neg = vals.iter().filter(|&&v| v < -tol).count();
        if neg < vals.len() || count == op.dim() {
            return Ok(neg);
        }
        count = (2 * count).min(op.dim());
    }
}
