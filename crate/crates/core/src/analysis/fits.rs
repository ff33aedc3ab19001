//! User-facing curve fits returning [`FitResult`]s in physical units.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::lm::{covariance, solve, CurveModel, LmOptions, LmSolution, Problem};
use super::models::{kuhr_envelope, kuhr_phase, Cosine, DampedCosine, Exponential, GaussianDecay, KuhrRamsey, PiTrain};
use crate::error::{Error, Result};
use crate::noise::EnsembleResult;

/// Scan data: abscissa, ordinate and optional per-point standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct XyData {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub y_err: Option<Vec<f64>>,
}

impl XyData {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::param("data", "contains non-finite values"));
        }
        Ok(XyData { x, y, y_err: None })
    }

    /// Weighted data; every error must be finite and positive.
    pub fn with_errors(x: Vec<f64>, y: Vec<f64>, y_err: Vec<f64>) -> Result<Self> {
        let mut d = XyData::new(x, y)?;
        if y_err.len() != d.y.len() {
            return Err(Error::DimensionMismatch { expected: d.y.len(), found: y_err.len() });
        }
        if y_err.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::param("y_err", "errors must be finite and positive"));
        }
        d.y_err = Some(y_err);
        Ok(d)
    }

    /// Unweighted view of an ensemble scan (shot-noise errors can vanish at
    /// points where every shot agrees, so they are not used as weights).
    pub fn from_ensemble(r: &EnsembleResult) -> Result<Self> {
        XyData::new(r.scan_values.clone(), r.mean_observable.clone())
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn weights(&self) -> Option<Vec<f64>> {
        self.y_err.as_ref().map(|e| e.iter().map(|s| 1.0 / s).collect())
    }

    fn x_scale(&self) -> f64 {
        let m = self.x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if m > 0.0 {
            m
        } else {
            1.0
        }
    }

    fn is_flat(&self) -> bool {
        let (lo, hi) = min_max(&self.y);
        let mag = self.y.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        hi - lo <= 1e-12 * mag
    }

    fn require(&self, model: &str, n: usize) -> Result<()> {
        if self.len() < n {
            return Err(Error::param("data", format!("model `{model}` needs at least {n} points, got {}", self.len())));
        }
        Ok(())
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)))
}

/// Diagnostic attached to a fit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitFlag {
    /// Data has no variation.
    Degenerate,
    /// Parameter not constrained by the data.
    Unidentifiable(String),
    /// Parameter finished on a bound.
    AtBound(String),
    /// A model-free estimate replaced the fit.
    Fallback,
    NegativeTau,
}

impl fmt::Display for FitFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitFlag::Degenerate => write!(f, "degenerate"),
            FitFlag::Unidentifiable(p) => write!(f, "unidentifiable:{p}"),
            FitFlag::AtBound(p) => write!(f, "at-bound:{p}"),
            FitFlag::Fallback => write!(f, "fallback"),
            FitFlag::NegativeTau => write!(f, "negative-tau"),
        }
    }
}

/// Fitted parameters in physical units (seconds, Hz, rad/s, rad).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: String,
    pub names: Vec<String>,
    pub params: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    /// Norm of the (weighted) residual vector.
    pub residual_norm: f64,
    pub reduced_chi_square: f64,
    pub n_points: usize,
    pub converged: bool,
    pub iterations: usize,
    pub flags: Vec<FitFlag>,
}

impl FitResult {
    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.params[i])
    }

    pub fn sigma(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.sigmas[i])
    }

    pub fn has_flag(&self, flag: &FitFlag) -> bool {
        self.flags.contains(flag)
    }

    pub fn is_unidentifiable(&self, name: &str) -> bool {
        self.has_flag(&FitFlag::Unidentifiable(name.to_string()))
    }

    /// Evaluates the fitted curve.
    pub fn predict(&self, x: f64) -> f64 {
        let p = |n: &str| self.param(n).unwrap_or(0.0);
        let decay = |tau: f64, t: f64| if tau.is_infinite() { 1.0 } else { (-t / tau).exp() };
        match self.model.as_str() {
            "damped-cosine" => p("offset") + p("A") * decay(p("tau"), x) * (TAU * p("frequency") * x + p("phase")).cos(),
            "cosine" => p("offset") + p("A") * (TAU * p("frequency") * x + p("phase")).cos(),
            "exponential" => p("offset") + p("A") * decay(p("tau"), x),
            "gaussian" => p("offset") + p("A") * (-(x / p("tau_g")).powi(2)).exp(),
            "kuhr" => {
                let t2 = p("t2_star");
                p("B") + kuhr_envelope(x, t2) * p("A") * (p("delta_prime") * x + kuhr_phase(x, t2) + p("phi")).cos()
            }
            "pi-train" => p("p1d") - p("prd") * p("pre").powf(x),
            "parabola" => p("a") * x * x + p("b") * x + p("c"),
            _ => f64::NAN,
        }
    }
}

/// Model selector used by the command line and generic callers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitModel {
    DampedCosine,
    Cosine,
    Exponential { offset: Option<f64> },
    Gaussian,
    Kuhr,
    Parabola,
    PiTrain { p1d: Option<f64> },
}

impl FitModel {
    pub const NAMES: [&'static str; 9] = [
        "damped-cosine",
        "cosine",
        "exponential",
        "exponential-no-offset",
        "exponential-half-offset",
        "gaussian",
        "kuhr",
        "parabola",
        "pi-train",
    ];
}

impl FromStr for FitModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "damped-cosine" => FitModel::DampedCosine,
            "cosine" => FitModel::Cosine,
            "exponential" => FitModel::Exponential { offset: None },
            "exponential-no-offset" => FitModel::Exponential { offset: Some(0.0) },
            "exponential-half-offset" => FitModel::Exponential { offset: Some(0.5) },
            "gaussian" => FitModel::Gaussian,
            "kuhr" => FitModel::Kuhr,
            "parabola" => FitModel::Parabola,
            "pi-train" => FitModel::PiTrain { p1d: None },
            other => {
                return Err(Error::config("fit", format!("unknown model {other:?}; expected one of {}", FitModel::NAMES.join(", "))))
            }
        })
    }
}

/// Dispatches to the matching fit function.
pub fn fit(model: FitModel, data: &XyData) -> Result<FitResult> {
    match model {
        FitModel::DampedCosine => fit_damped_cosine(data),
        FitModel::Cosine => fit_cosine(data, None),
        FitModel::Exponential { offset } => fit_exponential_decay(data, offset),
        FitModel::Gaussian => fit_gaussian_decay(data),
        FitModel::Kuhr => fit_ramsey_kuhr(data),
        FitModel::Parabola => fit_parabola(data),
        FitModel::PiTrain { p1d } => fit_pi_train(data, p1d),
    }
}

/// How an optimizer parameter maps to its reported value, given the abscissa
/// scale `s`: `Direct(k)` reports `q·s^k`, `Inverse(k)` reports `s^k / q`.
#[derive(Debug, Clone, Copy)]
enum Transform {
    Direct(i32),
    Inverse(i32),
}

struct FitSpec<'a> {
    model: &'a dyn CurveModel,
    names: &'a [&'a str],
    transforms: &'a [Transform],
}

/// Sign convention for cosine-like models: amplitude ≥ 0, phase in (−π, π].
fn normalize_amplitude(q: &mut [f64], cov: &mut DMatrix<f64>, amp: usize, phase: usize) {
    if q[amp] < 0.0 {
        q[amp] = -q[amp];
        q[phase] += PI;
        let k = cov.nrows();
        for j in 0..k {
            if j != amp {
                cov[(amp, j)] = -cov[(amp, j)];
                cov[(j, amp)] = -cov[(j, amp)];
            }
        }
    }
    q[phase] = wrap_phase(q[phase]);
}

fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

struct Outcome<'a> {
    problem: Problem<'a>,
    solution: LmSolution,
}

fn best_of<'a>(name: &str, problem: Problem<'a>, starts: &[Vec<f64>]) -> Result<Outcome<'a>> {
    let opts = LmOptions::default();
    let mut best: Option<LmSolution> = None;
    let mut any = None;
    for s in starts {
        let sol = solve(&problem, s, &opts);
        if !sol.cost.is_finite() {
            continue;
        }
        if sol.converged {
            if best.as_ref().is_none_or(|b| sol.cost < b.cost) {
                best = Some(sol);
            }
        } else {
            any = Some(sol);
        }
    }
    match best {
        Some(solution) => Ok(Outcome { problem, solution }),
        None => Err(Error::fit(
            name,
            match any {
                Some(s) => format!("did not converge within {} iterations (gradient {:e})", s.iterations, s.gradient_norm),
                None => "objective is not finite at any start".into(),
            },
        )),
    }
}

fn finish(
    spec: &FitSpec,
    out: Outcome,
    data: &XyData,
    scale: f64,
    post: impl Fn(&mut [f64], &mut DMatrix<f64>),
) -> FitResult {
    let Outcome { problem, solution } = out;
    let (mut cov, unident) = covariance(&problem, &solution);
    let mut q = solution.params.clone();
    post(&mut q, &mut cov);

    let k = q.len();
    let mut params = vec![0.0; k];
    let mut deriv = vec![0.0; k];
    for i in 0..k {
        let (v, d) = match spec.transforms[i] {
            Transform::Direct(p) => (q[i] * scale.powi(p), scale.powi(p)),
            Transform::Inverse(p) => {
                let s = scale.powi(p);
                if q[i] == 0.0 {
                    (f64::INFINITY, f64::INFINITY)
                } else {
                    (s / q[i], -s / (q[i] * q[i]))
                }
            }
        };
        params[i] = v;
        deriv[i] = d;
    }
    let mut covariance = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let c = if i == j && cov[(i, i)] == 0.0 { 0.0 } else { deriv[i] * deriv[j] * cov[(i, j)] };
            covariance[i][j] = if c.is_finite() {
                c
            } else if i == j {
                f64::INFINITY
            } else {
                0.0
            };
        }
    }
    let sigmas: Vec<f64> = (0..k).map(|i| covariance[i][i].max(0.0).sqrt()).collect();

    let mut flags = Vec::new();
    if data.is_flat() {
        flags.push(FitFlag::Degenerate);
    }
    for &u in &unident {
        flags.push(FitFlag::Unidentifiable(spec.names[u].to_string()));
    }
    for i in 0..k {
        if problem.free[i] && (solution.params[i] == problem.lower[i] || solution.params[i] == problem.upper[i]) {
            flags.push(FitFlag::AtBound(spec.names[i].to_string()));
        }
    }
    let dof = data.len().saturating_sub(problem.n_free());
    FitResult {
        model: spec.model.name().to_string(),
        names: spec.names.iter().map(|s| s.to_string()).collect(),
        params,
        sigmas,
        covariance,
        residual_norm: solution.cost.sqrt(),
        reduced_chi_square: if dof > 0 { solution.cost / dof as f64 } else { 0.0 },
        n_points: data.len(),
        converged: solution.converged,
        iterations: solution.iterations,
        flags,
    }
}

/// Best single-frequency cosine over a frequency grid by linear least squares
/// on `[1, cos, sin]`. Returns (frequency, amplitude, phase, offset).
fn periodogram_guess(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let (lo, hi) = min_max(x);
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let n = x.len();
    let nu_min = 0.25 / span;
    let nu_max = (n as f64 / 2.0).max(1.0) / span;
    let steps = (40 * n).clamp(200, 4000);
    let mut best = (f64::INFINITY, nu_min, 0.0, 0.0, 0.0);
    for s in 0..=steps {
        let nu = nu_min + (nu_max - nu_min) * s as f64 / steps as f64;
        let mut m = Matrix3::<f64>::zeros();
        let mut b = Vector3::<f64>::zeros();
        for (&xi, &yi) in x.iter().zip(y) {
            let (sn, cs) = (TAU * nu * xi).sin_cos();
            let v = Vector3::new(1.0, cs, sn);
            m += v * v.transpose();
            b += v * yi;
        }
        let Some(sol) = m.lu().solve(&b) else { continue };
        let rss: f64 = x
            .iter()
            .zip(y)
            .map(|(&xi, &yi)| {
                let (sn, cs) = (TAU * nu * xi).sin_cos();
                (yi - sol[0] - sol[1] * cs - sol[2] * sn).powi(2)
            })
            .sum();
        if rss < best.0 {
            best = (rss, nu, sol[0], sol[1], sol[2]);
        }
    }
    let (_, nu, off, a, b) = best;
    // a cos + b sin = A cos(θ + φ) with A = √(a²+b²), φ = atan2(−b, a)
    (nu, a.hypot(b), (-b).atan2(a), off)
}

fn normalized(data: &XyData, scale: f64) -> Vec<f64> {
    data.x.iter().map(|x| x / scale).collect()
}

fn x_span(x: &[f64]) -> f64 {
    let (lo, hi) = min_max(x);
    (hi - lo).max(f64::MIN_POSITIVE)
}

/// `y = offset + A e^{−t/τ} cos(2πft + φ)`; reports A, offset, frequency
/// (cycles per unit x), phase, tau. Multi-starts over phase and decay rate.
pub fn fit_damped_cosine(data: &XyData) -> Result<FitResult> {
    const NAMES: [&str; 5] = ["A", "offset", "frequency", "phase", "tau"];
    data.require("damped-cosine", 8)?;
    let scale = data.x_scale();
    let x = normalized(data, scale);
    let (nu, amp, phase, off) = periodogram_guess(&x, &data.y);
    let span = x_span(&x);
    let mut starts = Vec::new();
    for rate in [0.3, 1.0, 3.0] {
        for dphi in [0.0, 0.5 * PI, PI, 1.5 * PI] {
            starts.push(vec![amp.max(1e-3), off, nu, phase + dphi, rate / span]);
        }
    }
    let mut problem = Problem::new(&DampedCosine, &x, &data.y);
    problem.weights = data.weights();
    problem.lower[2] = 0.0;
    problem.lower[4] = 0.0;
    let out = best_of("damped-cosine", problem, &starts)?;
    let spec = FitSpec {
        model: &DampedCosine,
        names: &NAMES,
        transforms: &[Transform::Direct(0), Transform::Direct(0), Transform::Direct(-1), Transform::Direct(0), Transform::Inverse(1)],
    };
    let mut r = finish(&spec, out, data, scale, |q, c| normalize_amplitude(q, c, 0, 3));
    if r.is_unidentifiable("A") || r.params[0].abs() < 1e-12 {
        for n in ["tau", "frequency", "phase"] {
            let f = FitFlag::Unidentifiable(n.to_string());
            if !r.has_flag(&f) {
                r.flags.push(f);
            }
        }
    }
    Ok(r)
}

/// Plain cosine `offset + A cos(2πfx + φ)`; `frequency` freezes f.
pub fn fit_cosine(data: &XyData, frequency: Option<f64>) -> Result<FitResult> {
    const NAMES: [&str; 4] = ["A", "offset", "frequency", "phase"];
    data.require("cosine", 4)?;
    let scale = data.x_scale();
    let x = normalized(data, scale);
    let (nu_guess, amp, phase, off) = periodogram_guess(&x, &data.y);
    let nu = frequency.map_or(nu_guess, |f| f * scale);
    let starts: Vec<Vec<f64>> = [0.0, 0.5 * PI, PI, 1.5 * PI].iter().map(|d| vec![amp.max(1e-3), off, nu, phase + d]).collect();
    let mut problem = Problem::new(&Cosine, &x, &data.y);
    problem.weights = data.weights();
    problem.lower[2] = 0.0;
    if frequency.is_some() {
        problem.free[2] = false;
    }
    let out = best_of("cosine", problem, &starts)?;
    let spec = FitSpec {
        model: &Cosine,
        names: &NAMES,
        transforms: &[Transform::Direct(0), Transform::Direct(0), Transform::Direct(-1), Transform::Direct(0)],
    };
    Ok(finish(&spec, out, data, scale, |q, c| normalize_amplitude(q, c, 0, 3)))
}

/// `y = offset + A e^{−t/τ}`, optionally with the offset frozen.
/// A negative fitted τ (growing data) is reported and flagged.
pub fn fit_exponential_decay(data: &XyData, offset_fixed: Option<f64>) -> Result<FitResult> {
    const NAMES: [&str; 3] = ["A", "tau", "offset"];
    data.require("exponential", 4)?;
    let scale = data.x_scale();
    let x = normalized(data, scale);
    let span = x_span(&x);
    let (i_first, i_last) = extreme_indices(&x);
    let off0 = offset_fixed.unwrap_or(data.y[i_last]);
    let a0 = data.y[i_first] - off0;
    let starts: Vec<Vec<f64>> = [0.3, 1.0, 3.0, -0.5].iter().map(|r| vec![a0, r / span, off0]).collect();
    let mut problem = Problem::new(&Exponential, &x, &data.y);
    problem.weights = data.weights();
    if offset_fixed.is_some() {
        problem.free[2] = false;
    }
    let out = best_of("exponential", problem, &starts)?;
    let spec = FitSpec { model: &Exponential, names: &NAMES, transforms: &[Transform::Direct(0), Transform::Inverse(1), Transform::Direct(0)] };
    let mut r = finish(&spec, out, data, scale, |_, _| {});
    if r.params[1] < 0.0 {
        r.flags.push(FitFlag::NegativeTau);
    }
    Ok(r)
}

fn extreme_indices(x: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, v) in x.iter().enumerate() {
        if *v < x[lo] {
            lo = i;
        }
        if *v > x[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

/// `y = offset + A e^{−(t/τ_g)²}`.
pub fn fit_gaussian_decay(data: &XyData) -> Result<FitResult> {
    const NAMES: [&str; 3] = ["A", "tau_g", "offset"];
    data.require("gaussian", 4)?;
    let scale = data.x_scale();
    let x = normalized(data, scale);
    let (i_first, i_last) = extreme_indices(&x);
    let off0 = data.y[i_last];
    let a0 = data.y[i_first] - off0;
    let starts: Vec<Vec<f64>> = [0.5, 1.0, 2.0].iter().map(|u| vec![a0, *u, off0]).collect();
    let mut problem = Problem::new(&GaussianDecay, &x, &data.y);
    problem.weights = data.weights();
    problem.lower[1] = 0.0;
    let out = best_of("gaussian", problem, &starts)?;
    let spec = FitSpec { model: &GaussianDecay, names: &NAMES, transforms: &[Transform::Direct(0), Transform::Inverse(1), Transform::Direct(0)] };
    Ok(finish(&spec, out, data, scale, |_, _| {}))
}

/// Kuhr Ramsey model `B + α(t) A cos[δ′t + κ(t) + φ]`; reports A, B,
/// delta_prime (rad per unit x), phi, t2_star. T2* is confined to
/// [10⁻³, 10³] times the scan span and flagged when it ends on a bound.
pub fn fit_ramsey_kuhr(data: &XyData) -> Result<FitResult> {
    const NAMES: [&str; 5] = ["A", "B", "delta_prime", "phi", "t2_star"];
    data.require("kuhr", 12)?;
    let scale = data.x_scale();
    let x = normalized(data, scale);
    let span = x_span(&x);
    let (nu, amp, phase, off) = periodogram_guess(&x, &data.y);
    let w = TAU * nu;
    let mut starts = Vec::new();
    for u in [0.3, 1.0, 3.0] {
        let u = u / span;
        // small-t phase drag is −2.91·u·t, shifting the apparent frequency
        for (delta, phi) in [(w + 2.91 * u, phase), (-w + 2.91 * u, -phase)] {
            for dphi in [0.0, 0.5 * PI, PI, 1.5 * PI] {
                starts.push(vec![amp.max(1e-3), off, delta, phi + dphi, u]);
            }
        }
    }
    let mut problem = Problem::new(&KuhrRamsey, &x, &data.y);
    problem.weights = data.weights();
    problem.lower[4] = 1e-3 / span;
    problem.upper[4] = 1e3 / span;
    let out = best_of("kuhr", problem, &starts)?;
    let spec = FitSpec {
        model: &KuhrRamsey,
        names: &NAMES,
        transforms: &[Transform::Direct(0), Transform::Direct(0), Transform::Direct(-1), Transform::Direct(0), Transform::Inverse(1)],
    };
    Ok(finish(&spec, out, data, scale, |q, c| normalize_amplitude(q, c, 0, 3)))
}

/// π-train survival `P(n) = p1d − prd·pre^n` over pulse count n; `p1d_fixed`
/// freezes the ground detection efficiency.
pub fn fit_pi_train(data: &XyData, p1d_fixed: Option<f64>) -> Result<FitResult> {
    const NAMES: [&str; 3] = ["p1d", "prd", "pre"];
    let need = if p1d_fixed.is_some() { 2 } else { 3 };
    data.require("pi-train", need.max(3))?;
    if data.x.iter().any(|n| *n < 0.0) {
        return Err(Error::param("data", "pulse counts must be non-negative"));
    }
    let (_, ymax) = min_max(&data.y);
    let p1d0 = p1d_fixed.unwrap_or(ymax.max(0.5));
    let (i_lo, _) = extreme_indices(&data.x);
    let starts: Vec<Vec<f64>> = [0.9, 0.97, 0.995]
        .iter()
        .map(|&pre: &f64| vec![p1d0, (p1d0 - data.y[i_lo]) / pre.powf(data.x[i_lo]), pre])
        .collect();
    let mut problem = Problem::new(&PiTrain, &data.x, &data.y);
    problem.weights = data.weights();
    problem.lower[2] = 0.0;
    problem.upper[2] = 1.5;
    if p1d_fixed.is_some() {
        problem.free[0] = false;
    }
    let out = best_of("pi-train", problem, &starts)?;
    let spec = FitSpec { model: &PiTrain, names: &NAMES, transforms: &[Transform::Direct(0); 3] };
    Ok(finish(&spec, out, data, 1.0, |_, _| {}))
}

/// `y = a x² + b x + c` by linear least squares (weighted when errors are
/// present). Needs at least three points; three points interpolate exactly.
pub fn fit_parabola(data: &XyData) -> Result<FitResult> {
    data.require("parabola", 3)?;
    let n = data.len();
    let w = data.weights().unwrap_or_else(|| vec![1.0; n]);
    let v = DMatrix::from_fn(n, 3, |i, j| data.x[i].powi(2 - j as i32) * w[i]);
    let rhs = DVector::from_iterator(n, data.y.iter().zip(&w).map(|(y, w)| y * w));
    let normal = v.transpose() * &v;
    let chol = normal
        .clone()
        .cholesky()
        .ok_or_else(|| Error::fit("parabola", "design matrix is singular (need three distinct x values)"))?;
    let coef = chol.solve(&(v.transpose() * &rhs));
    let resid = &rhs - &v * &coef;
    let cost = resid.norm_squared();
    let dof = n - 3;
    let chi2 = if dof > 0 { cost / dof as f64 } else { 0.0 };
    let inv = chol.inverse() * chi2;
    let covariance: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| inv[(i, j)]).collect()).collect();
    Ok(FitResult {
        model: "parabola".into(),
        names: vec!["a".into(), "b".into(), "c".into()],
        params: coef.iter().copied().collect(),
        sigmas: (0..3).map(|i| inv[(i, i)].max(0.0).sqrt()).collect(),
        covariance,
        residual_norm: cost.sqrt(),
        reduced_chi_square: chi2,
        n_points: n,
        converged: true,
        iterations: 1,
        flags: if data.is_flat() { vec![FitFlag::Degenerate] } else { vec![] },
    })
}

/// Fringe contrast with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contrast {
    pub value: f64,
    /// `None` when the min-max fallback was used.
    pub sigma: Option<f64>,
    pub fallback: bool,
}

/// Contrast of a fringe: fitted cosine amplitude over its offset, clamped to
/// [0, 1]. Falls back to `(max − min)/(max + min)` when the fit fails or the
/// amplitude is unconstrained.
pub fn extract_contrast(data: &XyData) -> Result<Contrast> {
    contrast_impl(data, None)
}

/// As [`extract_contrast`] with the fringe frequency known (e.g. 1/2π per
/// radian of analysis phase).
pub fn extract_contrast_with_frequency(data: &XyData, frequency: f64) -> Result<Contrast> {
    contrast_impl(data, Some(frequency))
}

fn contrast_impl(data: &XyData, frequency: Option<f64>) -> Result<Contrast> {
    data.require("contrast", if frequency.is_some() { 4 } else { 8 })?;
    let fitted = fit_cosine(data, frequency).ok().filter(|r| {
        !r.has_flag(&FitFlag::Degenerate) && !r.is_unidentifiable("A") && !r.is_unidentifiable("offset") && r.params[1] > 0.0
    });
    if let Some(r) = fitted {
        let (a, o) = (r.params[0], r.params[1]);
        let c = a / o;
        let rel2 = r.covariance[0][0] / (a * a) + r.covariance[1][1] / (o * o) - 2.0 * r.covariance[0][1] / (a * o);
        let sigma = c.abs() * rel2.max(0.0).sqrt();
        if c.is_finite() && sigma.is_finite() {
            return Ok(Contrast { value: c.clamp(0.0, 1.0), sigma: Some(sigma), fallback: false });
        }
    }
    let (lo, hi) = min_max(&data.y);
    let value = if hi + lo > 0.0 { ((hi - lo) / (hi + lo)).clamp(0.0, 1.0) } else { 0.0 };
    Ok(Contrast { value, sigma: None, fallback: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, end: f64) -> Vec<f64> {
        (0..n).map(|i| end * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn damped_cosine_exact_recovery() {
        let t = grid(60, 20e-6);
        let truth = [0.4, 0.5, 0.25e6, 0.3, 10e-6];
        let y: Vec<f64> = t.iter().map(|&t| truth[1] + truth[0] * (-t / truth[4]).exp() * (TAU * truth[2] * t + truth[3]).cos()).collect();
        let r = fit_damped_cosine(&XyData::new(t, y).unwrap()).unwrap();
        for (p, want) in r.params.iter().zip(truth) {
            assert!((p - want).abs() <= 1e-8 * want.abs(), "{:?}", r.params);
        }
    }

    #[test]
    fn flat_data_flags() {
        let t = grid(20, 1.0);
        let r = fit_damped_cosine(&XyData::new(t.clone(), vec![0.5; 20]).unwrap()).unwrap();
        assert!(r.converged);
        assert!(r.params[0].abs() < 1e-9);
        assert!(r.is_unidentifiable("tau"));
        assert!(r.has_flag(&FitFlag::Degenerate));
        let c = extract_contrast(&XyData::new(t, vec![0.5; 20]).unwrap()).unwrap();
        assert!(c.fallback && c.value == 0.0);
    }

    #[test]
    fn exponential_machine_precision() {
        let t = grid(10, 50e-6);
        let y: Vec<f64> = t.iter().map(|t| 0.8 * (-t / 17e-6).exp() + 0.1).collect();
        let r = fit_exponential_decay(&XyData::new(t.clone(), y).unwrap(), None).unwrap();
        assert!(r.residual_norm < 1e-10);
        assert!((r.param("tau").unwrap() / 17e-6 - 1.0).abs() < 1e-9);
        let grow: Vec<f64> = t.iter().map(|t| 0.1 * (t / 30e-6).exp()).collect();
        let r = fit_exponential_decay(&XyData::new(t, grow).unwrap(), Some(0.0)).unwrap();
        assert!(r.has_flag(&FitFlag::NegativeTau));
        assert!((r.param("tau").unwrap() + 30e-6).abs() < 1e-12);
    }

    #[test]
    fn contrast_of_full_fringe() {
        let phi = grid(16, TAU);
        let y: Vec<f64> = phi.iter().map(|p| 0.5 + 0.5 * (p + 0.2).cos()).collect();
        let c = extract_contrast_with_frequency(&XyData::new(phi, y).unwrap(), 1.0 / TAU).unwrap();
        assert!(!c.fallback);
        assert!((c.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn parabola_examples() {
        let x = vec![-1.0, 0.5, 2.0];
        let y: Vec<f64> = x.iter().map(|x| 2.0 * x * x - 0.5 * x + 3.0).collect();
        let r = fit_parabola(&XyData::new(x, y).unwrap()).unwrap();
        assert!((r.params[0] - 2.0).abs() < 1e-12 && (r.params[1] + 0.5).abs() < 1e-12 && (r.params[2] - 3.0).abs() < 1e-12);
        assert!(fit_parabola(&XyData::new(vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]).unwrap()).is_err());
    }

    #[test]
    fn model_names_round_trip() {
        for n in FitModel::NAMES {
            n.parse::<FitModel>().unwrap();
        }
        assert!(matches!("spline".parse::<FitModel>(), Err(Error::Config { .. })));
    }
}
