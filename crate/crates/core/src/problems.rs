//! HJB control-problem definitions: coefficient callbacks, control-set
//! discretisation, Dirichlet/initial data and (optional) exact solutions.
//!
//! The value function solves
//! `u_t − inf_α { tr[a^α D²u] + b^α·Du + c^α u + f^α } = 0` on `(0,T] × Ω`
//! with `a^α = ½ σ^α σ^{α,T}`, `u(0,·) = g` and `u = ψ` on the boundary.
//! Discretely we work with the equivalent positive-type max-form, so the
//! per-node optimisation is an argmax over the negated expressions.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

pub type FieldFn = Box<dyn Fn(f64, &[f64], &[f64], &mut [f64]) + Send + Sync>;
pub type ScalarCoeffFn = Box<dyn Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync>;
pub type SpaceFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Box<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;

/// Finite control set. For the built-in problems these are equally spaced
/// points on the unit circle, `α_i = (cos θ_i, sin θ_i)`, `θ_i = 2πi/N_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteControls {
    pub points: Vec<Vec<f64>>,
}

impl DiscreteControls {
    pub fn unit_circle(n_alpha: usize) -> DiscreteControls {
        assert!(n_alpha >= 1);
        let points = (0..n_alpha)
            .map(|i| {
                let theta = 2.0 * PI * i as f64 / n_alpha as f64;
                vec![theta.cos(), theta.sin()]
            })
            .collect();
        DiscreteControls { points }
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }
}

/// An HJB problem on a rectangular domain `[lo, hi]` with horizon `T`.
///
/// Coefficient callbacks must be pure; σ is written column-major into a
/// `dim × p_cols` buffer. User-defined problems fill the same fields.
pub struct ControlProblem {
    pub name: String,
    pub dim: usize,
    /// Number of diffusion columns P of σ.
    pub p_cols: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub horizon: f64,
    pub controls: DiscreteControls,
    /// Sub-box used for interior error norms, when defined.
    pub interior_box: Option<(Vec<f64>, Vec<f64>)>,
    /// σ(t, x, α) → column-major `dim × p_cols` output.
    pub sigma: FieldFn,
    /// b(t, x, α) → `dim` output.
    pub drift: FieldFn,
    /// c(t, x, α).
    pub discount: ScalarCoeffFn,
    /// f(t, x, α).
    pub forcing: ScalarCoeffFn,
    /// Initial data g(x).
    pub initial: SpaceFn,
    /// Dirichlet data ψ(t, x) on ∂Ω.
    pub dirichlet: SpaceTimeFn,
    pub exact: Option<SpaceTimeFn>,
}

impl fmt::Debug for ControlProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlProblem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("p_cols", &self.p_cols)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("horizon", &self.horizon)
            .field("n_alpha", &self.controls.count())
            .finish()
    }
}

impl ControlProblem {
    pub fn control(&self, idx: usize) -> Result<&[f64]> {
        self.controls
            .points
            .get(idx)
            .map(|p| p.as_slice())
            .ok_or(Error::InvalidControl(idx))
    }

    /// Pointwise coefficient evaluation for one control index:
    /// `(σ column-major, b, c, f)`.
    pub fn eval_coefficients(
        &self,
        t: f64,
        x: &[f64],
        alpha_index: usize,
    ) -> Result<(Vec<f64>, Vec<f64>, f64, f64)> {
        let alpha = self.control(alpha_index)?;
        let mut sigma = vec![0.0; self.dim * self.p_cols];
        let mut b = vec![0.0; self.dim];
        (self.sigma)(t, x, alpha, &mut sigma);
        (self.drift)(t, x, alpha, &mut b);
        Ok((sigma, b, (self.discount)(t, x, alpha), (self.forcing)(t, x, alpha)))
    }
}

/// Built-in benchmark problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinProblem {
    ProblemA,
    ProblemB,
    /// Problem A on the domain shifted by 7π/8 in both coordinates, so that
    /// both sides of the diffusion stencil overstep near the bottom-left
    /// corner; Dirichlet data is nonzero there.
    ProblemAShifted,
}

impl FromStr for BuiltinProblem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "problem-a" | "a" => Ok(BuiltinProblem::ProblemA),
            "problem-b" | "b" => Ok(BuiltinProblem::ProblemB),
            "problem-a-shifted" | "a-shifted" | "shifted" => Ok(BuiltinProblem::ProblemAShifted),
            other => Err(Error::UnknownProblem(other.to_string())),
        }
    }
}

impl fmt::Display for BuiltinProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BuiltinProblem::ProblemA => "problem-a",
            BuiltinProblem::ProblemB => "problem-b",
            BuiltinProblem::ProblemAShifted => "problem-a-shifted",
        };
        f.write_str(s)
    }
}

fn exact_a(t: f64, x: &[f64]) -> f64 {
    (1.5 - t) * x[0].sin() * x[1].sin()
}

fn exact_b(t: f64, x: &[f64]) -> f64 {
    (2.0 - t) * x[0].sin() * x[1].sin()
}

/// Constructs a built-in problem with `n_alpha` equally spaced controls.
pub fn builtin_problem(name: BuiltinProblem, n_alpha: usize) -> ControlProblem {
    assert!(n_alpha >= 1);
    let controls = DiscreteControls::unit_circle(n_alpha);
    match name {
        BuiltinProblem::ProblemA | BuiltinProblem::ProblemAShifted => {
            let shift = if name == BuiltinProblem::ProblemAShifted { 7.0 * PI / 8.0 } else { 0.0 };
            let (lo, hi) = (-PI + shift, PI + shift);
            let interior_box = if shift == 0.0 {
                (vec![-PI / 2.0; 2], vec![PI / 2.0; 2])
            } else {
                (vec![3.0 * PI / 8.0; 2], vec![11.0 * PI / 8.0; 2])
            };
            ControlProblem {
                name: name.to_string(),
                dim: 2,
                p_cols: 1,
                lo: vec![lo; 2],
                hi: vec![hi; 2],
                horizon: 0.5,
                controls,
                interior_box: Some(interior_box),
                sigma: Box::new(|_t, x, _a, out| {
                    let (s, c) = (x[0] + x[1]).sin_cos();
                    out[0] = 2f64.sqrt() * s;
                    out[1] = 2f64.sqrt() * c;
                }),
                drift: Box::new(|_t, _x, a, out| out.copy_from_slice(a)),
                discount: Box::new(|_, _, _| 0.0),
                forcing: Box::new(|t, x, _a| {
                    let (s1, c1) = x[0].sin_cos();
                    let (s2, c2) = x[1].sin_cos();
                    let (s12, c12) = (x[0] + x[1]).sin_cos();
                    (0.5 - t) * s1 * s2
                        + (1.5 - t)
                            * ((c1 * c1 * s2 * s2 + s1 * s1 * c2 * c2).sqrt()
                                - 2.0 * s12 * c12 * c1 * c2)
                }),
                initial: Box::new(|x| exact_a(0.0, x)),
                dirichlet: Box::new(exact_a),
                exact: Some(Box::new(exact_a)),
            }
        }
        BuiltinProblem::ProblemB => ControlProblem {
            name: name.to_string(),
            dim: 2,
            p_cols: 1,
            lo: vec![-PI; 2],
            hi: vec![PI; 2],
            horizon: 0.5,
            controls,
            interior_box: Some((vec![-PI / 2.0; 2], vec![PI / 2.0; 2])),
            sigma: Box::new(|_t, _x, a, out| {
                out[0] = 2f64.sqrt() * a[0];
                out[1] = 2f64.sqrt() * a[1];
            }),
            drift: Box::new(|_t, _x, _a, out| out.fill(0.0)),
            discount: Box::new(|_, _, _| 0.0),
            forcing: Box::new(|t, x, a| {
                let (s1, c1) = x[0].sin_cos();
                let (s2, c2) = x[1].sin_cos();
                (1.0 - t) * s1 * s2 - 2.0 * a[0] * a[1] * (2.0 - t) * c1 * c2
            }),
            initial: Box::new(|x| exact_b(0.0, x)),
            dirichlet: Box::new(exact_b),
            exact: Some(Box::new(exact_b)),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn problem_a_exact_values() {
        let p = builtin_problem(BuiltinProblem::ProblemA, 40);
        let exact = p.exact.as_ref().unwrap();
        assert!((exact(0.0, &[PI / 2.0, PI / 2.0]) - 1.5).abs() < 1e-15);
        // homogeneous Dirichlet data on x₁ = π
        for t in [0.0, 0.25, 0.5] {
            for x2 in [-2.0, 0.3, 1.0] {
                assert!((p.dirichlet)(t, &[PI, x2]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn problem_b_has_no_drift_or_discount() {
        let p = builtin_problem(BuiltinProblem::ProblemB, 8);
        for i in 0..8 {
            let (_, b, c, _) = p.eval_coefficients(0.2, &[0.4, -1.0], i).unwrap();
            assert!(b.iter().all(|&v| v == 0.0));
            assert_eq!(c, 0.0);
        }
    }

    #[test]
    fn coefficient_spot_checks() {
        let pa = builtin_problem(BuiltinProblem::ProblemA, 40);
        let (sigma, b, _, _) = pa.eval_coefficients(0.0, &[0.0, 0.0], 3).unwrap();
        assert!(sigma[0].abs() < 1e-15 && (sigma[1] - 2f64.sqrt()).abs() < 1e-15);
        // drift equals the control value
        let alpha = pa.control(3).unwrap();
        assert_eq!(b, alpha);

        let pb = builtin_problem(BuiltinProblem::ProblemB, 8);
        let (sigma, _, _, _) = pb.eval_coefficients(0.1, &[1.0, 1.0], 0).unwrap();
        assert!((sigma[0] - 2f64.sqrt()).abs() < 1e-15 && sigma[1].abs() < 1e-15);
    }

    #[test]
    fn control_angles_start_at_zero() {
        let c = DiscreteControls::unit_circle(4);
        assert_eq!(c.points[0], vec![1.0, 0.0]);
        assert!((c.points[1][0]).abs() < 1e-15 && (c.points[1][1] - 1.0).abs() < 1e-15);
        // distinct points
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(c.points[i] != c.points[j]);
            }
        }
    }

    #[test]
    fn initial_data_matches_exact_at_mesh_nodes() {
        for name in [BuiltinProblem::ProblemA, BuiltinProblem::ProblemB, BuiltinProblem::ProblemAShifted] {
            let p = builtin_problem(name, 4);
            let g = Grid::new(p.lo.clone(), p.hi.clone(), vec![41, 41]).unwrap();
            let exact = p.exact.as_ref().unwrap();
            for j in 0..g.num_nodes() {
                let x = g.node(j);
                assert!(((p.initial)(&x) - exact(0.0, &x)).abs() < 1e-12);
                if g.is_boundary(j) {
                    assert!(((p.dirichlet)(0.0, &x) - exact(0.0, &x)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn unknown_problem_name() {
        assert!(matches!("problem-z".parse::<BuiltinProblem>(), Err(Error::UnknownProblem(_))));
    }

    /// Independent PDE-residual oracle: substitute the exact solution into
    /// the equation using hand-derived analytic derivatives and the discrete
    /// min over controls. The residual must shrink (non-strictly) as the
    /// control set is refined by doubling, and vanish in the limit.
    #[test]
    fn pde_residual_oracle() {
        let sample = [[0.7, -0.3], [1.9, 0.4], [-2.2, 2.9]];
        let t = 0.2;
        // Problem A: the min over α only affects the α·Du drift term.
        let residual_a = |n_alpha: usize, x: &[f64]| -> f64 {
            let p = builtin_problem(BuiltinProblem::ProblemA, n_alpha);
            let (s1, c1) = x[0].sin_cos();
            let (s2, c2) = x[1].sin_cos();
            let (s12, c12) = (x[0] + x[1]).sin_cos();
            let w = 1.5 - t;
            let u_t = -s1 * s2;
            let du = [w * c1 * s2, w * s1 * c2];
            let d2 = [-w * s1 * s2, w * c1 * c2, -w * s1 * s2]; // u₁₁, u₁₂, u₂₂
            // ½ tr[σσᵀ D²u] with σ = √2 (sin, cos)ᵀ of (x₁+x₂)
            let diff = s12 * s12 * d2[0] + 2.0 * s12 * c12 * d2[1] + c12 * c12 * d2[2];
            let f = (p.forcing)(t, x, &[1.0, 0.0]);
            let min_drift = p
                .controls
                .points
                .iter()
                .map(|a| a[0] * du[0] + a[1] * du[1])
                .fold(f64::INFINITY, f64::min);
            (u_t - (diff + min_drift + f)).abs()
        };
        for x in &sample {
            let res: Vec<f64> = [4usize, 8, 16, 32, 64].iter().map(|&n| residual_a(n, x)).collect();
            for k in 1..res.len() {
                assert!(res[k] <= res[k - 1] + 1e-14, "residuals {res:?} not monotone");
            }
            assert!(res[res.len() - 1] < res[0]);
            assert!(res[res.len() - 1] < 1e-2);
        }

        // Problem B: the inner expression is control-independent at the exact
        // solution, so any unit-circle control set gives a zero residual.
        let p = builtin_problem(BuiltinProblem::ProblemB, 4);
        for x in &sample {
            let (s1, c1) = x[0].sin_cos();
            let (s2, c2) = x[1].sin_cos();
            let w = 2.0 - t;
            let u_t = -s1 * s2;
            let min = p
                .controls
                .points
                .iter()
                .map(|a| {
                    let diff = a[0] * a[0] * (-w * s1 * s2)
                        + 2.0 * a[0] * a[1] * (w * c1 * c2)
                        + a[1] * a[1] * (-w * s1 * s2);
                    diff + (p.forcing)(t, x, a)
                })
                .fold(f64::INFINITY, f64::min);
            assert!((u_t - min).abs() < 1e-12);
        }
    }
}
