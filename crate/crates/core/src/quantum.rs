//! States, measurements and Hamiltonian time evolution.
//!
//! Validation happens at construction: a [`DensityMatrix`] or
//! [`MeasurementSet`] that exists is well formed, so downstream numerics only
//! check dimensional compatibility. Eigenvalues of a density matrix that dip
//! a hair below zero (roundoff from upstream conjugations) are clipped and
//! the state renormalized; anything beyond the tolerance window is an error
//! rather than a repair.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigensystem, trace_product, ComplexMatrix, EigenSystem};
use crate::tolerances;

/// Trace-one positive semidefinite Hermitian matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity. Eigenvalues in
    /// `[-1e-10, 0)` are clipped to zero and the state renormalized.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.require_square()?;
        matrix.require_hermitian(tolerances::HERMITICITY)?;
        let trace_dev = (matrix.trace() - Complex64::new(1.0, 0.0)).norm();
        if trace_dev > tolerances::TRACE {
            return Err(Error::InvalidTrace(trace_dev));
        }
        let eig = hermitian_eigensystem(&matrix, tolerances::HERMITICITY)?;
        let min = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -tolerances::NEGATIVE_EIGENVALUE {
            return Err(Error::NotPositiveSemidefinite(min));
        }
        if min < 0.0 {
            let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&x| x.max(0.0)).collect();
            let total: f64 = clipped.iter().sum();
            let columns: Vec<Vec<Complex64>> =
                (0..dim).map(|c| eig.eigenvectors.column(c)).collect();
            let mut rebuilt = ComplexMatrix::zeros(dim, dim);
            for (lambda, col) in clipped.iter().zip(&columns) {
                if *lambda > 0.0 {
                    let proj =
                        ComplexMatrix::outer(col, col).scale(Complex64::new(lambda / total, 0.0));
                    rebuilt = rebuilt.add(&proj);
                }
            }
            return Ok(Self {
                dim,
                matrix: rebuilt.hermitian_part(),
            });
        }
        Ok(Self { dim, matrix })
    }

    /// Wraps a matrix that is valid by construction (unitary conjugation of a
    /// valid state, convex mixtures of projectors and the like), skipping the
    /// eigenvalue check.
    pub(crate) fn trusted(matrix: ComplexMatrix) -> Self {
        let dim = matrix.rows();
        debug_assert!(matrix.is_square());
        debug_assert!((matrix.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        Self { dim, matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let scale = Complex64::new(1.0 / dim as f64, 0.0);
        Self::trusted(ComplexMatrix::identity(dim).scale(scale))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `tr(rho^2)`, which is the squared Frobenius norm for Hermitian input.
    pub fn purity(&self) -> f64 {
        let f = self.matrix.frobenius_norm();
        f * f
    }
}

/// Normalized state vector.
#[derive(Debug, Clone)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFiniteEntry);
        }
        let norm = linalg::vector_norm(&amplitudes);
        let dev = (norm - 1.0).abs();
        if dev > tolerances::STATE_NORM {
            return Err(Error::NotNormalized(dev));
        }
        // Renormalize exactly so the projector built from this vector has
        // unit trace to machine precision.
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(Self { amplitudes })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::trusted(ComplexMatrix::outer(&self.amplitudes, &self.amplitudes))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    /// General positive operator-valued measure.
    Povm,
    /// Mutually orthogonal projectors.
    Pvm,
    /// Orthogonal rank-1 projectors.
    Rank1Pvm,
}

/// A complete set of measurement operators summing to the identity.
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    dim: usize,
    kind: MeasurementKind,
    elements: Vec<ComplexMatrix>,
}

impl MeasurementSet {
    pub fn new(elements: Vec<ComplexMatrix>, kind: MeasurementKind) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::TooFewElements(0));
        }
        let dim = elements[0].require_square()?;
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for m in &elements {
            let d = m.require_square()?;
            if d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: d,
                });
            }
            m.require_hermitian(tolerances::HERMITICITY)?;
            let eig = hermitian_eigensystem(m, tolerances::HERMITICITY)?;
            let min = eig
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if min < -tolerances::HERMITICITY {
                return Err(Error::NotPositiveSemidefinite(min));
            }
            if kind == MeasurementKind::Rank1Pvm {
                let top = eig.eigenvalues.first().copied().unwrap_or(0.0);
                let residual = eig
                    .eigenvalues
                    .iter()
                    .skip(1)
                    .map(|x| x.abs())
                    .fold((top - 1.0).abs(), f64::max);
                if residual > tolerances::HERMITICITY {
                    return Err(Error::NotRank1Pvm(residual));
                }
            }
            sum = sum.add(m);
        }
        let completeness = sum.sub(&ComplexMatrix::identity(dim)).max_abs_entry();
        if completeness > tolerances::HERMITICITY {
            return Err(Error::IncompleteMeasurement(completeness));
        }
        if matches!(kind, MeasurementKind::Pvm | MeasurementKind::Rank1Pvm) {
            let mut worst = 0.0f64;
            for (j, mj) in elements.iter().enumerate() {
                for (k, mk) in elements.iter().enumerate() {
                    let product = mj.matmul(mk);
                    let target = if j == k {
                        product.sub(mj).max_abs_entry()
                    } else {
                        product.max_abs_entry()
                    };
                    worst = worst.max(target);
                }
            }
            if worst > tolerances::HERMITICITY {
                return Err(Error::NotProjective(worst));
            }
        }
        Ok(Self {
            dim,
            kind,
            elements,
        })
    }

    /// Rank-1 projective measurement onto the columns of an orthonormal basis.
    pub fn from_basis(basis: &ComplexMatrix) -> Result<Self> {
        let dim = basis.require_square()?;
        let defect = basis.unitarity_defect();
        if defect > tolerances::HERMITICITY {
            return Err(Error::IncompleteMeasurement(defect));
        }
        let elements = (0..dim)
            .map(|c| {
                let col = basis.column(c);
                ComplexMatrix::outer(&col, &col)
            })
            .collect();
        Self::new(elements, MeasurementKind::Rank1Pvm)
    }

    /// Projective measurement in the computational basis.
    pub fn computational(dim: usize) -> Self {
        Self::from_basis(&ComplexMatrix::identity(dim)).expect("identity basis is orthonormal")
    }

    /// Tensors every element with the identity on a right factor, turning a
    /// local measurement into a joint one that ignores the second subsystem.
    pub fn lift_right(&self, right_dim: usize) -> Self {
        let id = ComplexMatrix::identity(right_dim);
        let elements: Vec<ComplexMatrix> = self.elements.iter().map(|m| m.kron(&id)).collect();
        // Lifted rank-1 projectors have rank `right_dim`, so the kind drops
        // to plain projective unless nothing changed.
        let kind = match self.kind {
            MeasurementKind::Povm => MeasurementKind::Povm,
            _ if right_dim == 1 => self.kind,
            _ => MeasurementKind::Pvm,
        };
        Self {
            dim: self.dim * right_dim,
            kind,
            elements,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    #[inline]
    pub fn element(&self, k: usize) -> &ComplexMatrix {
        &self.elements[k]
    }

    #[inline]
    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

/// Outcome distribution `p_k = tr(M_k rho)`, clamped to `[0, 1]` entrywise.
pub fn born_probabilities(state: &DensityMatrix, measurement: &MeasurementSet) -> Result<Vec<f64>> {
    if state.dim() != measurement.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: measurement.dim(),
        });
    }
    Ok(measurement
        .elements()
        .iter()
        .map(|m| trace_product(m, state.matrix()).re.clamp(0.0, 1.0))
        .collect())
}

/// Time dependence of the driving Hamiltonian over a fixed horizon.
#[derive(Debug, Clone)]
pub enum Protocol {
    Constant(ComplexMatrix),
    LinearRamp {
        start: ComplexMatrix,
        end: ComplexMatrix,
    },
    /// Equal-length segments of constant driving.
    Piecewise(Vec<ComplexMatrix>),
}

/// A Hermitian generator profile `H(t)` on `t` in `[0, duration]`.
#[derive(Debug, Clone)]
pub struct HamiltonianSchedule {
    dim: usize,
    duration: f64,
    protocol: Protocol,
}

impl HamiltonianSchedule {
    pub fn constant(h: ComplexMatrix, duration: f64) -> Result<Self> {
        Self::build(Protocol::Constant(h), duration)
    }

    pub fn linear_ramp(start: ComplexMatrix, end: ComplexMatrix, duration: f64) -> Result<Self> {
        Self::build(Protocol::LinearRamp { start, end }, duration)
    }

    pub fn piecewise(segments: Vec<ComplexMatrix>, duration: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::TooFewElements(0));
        }
        Self::build(Protocol::Piecewise(segments), duration)
    }

    fn build(protocol: Protocol, duration: f64) -> Result<Self> {
        if !duration.is_finite() || duration <= 0.0 {
            return Err(Error::InvalidSteps);
        }
        let matrices: Vec<&ComplexMatrix> = match &protocol {
            Protocol::Constant(h) => vec![h],
            Protocol::LinearRamp { start, end } => vec![start, end],
            Protocol::Piecewise(segments) => segments.iter().collect(),
        };
        let dim = matrices[0].require_square()?;
        for m in matrices {
            m.require_hermitian(tolerances::HERMITICITY)?;
            if m.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.rows(),
                });
            }
        }
        Ok(Self {
            dim,
            duration,
            protocol,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// `H(t)` with `t` clamped to the horizon.
    pub fn evaluate(&self, t: f64) -> ComplexMatrix {
        let t = t.clamp(0.0, self.duration);
        match &self.protocol {
            Protocol::Constant(h) => h.clone(),
            Protocol::LinearRamp { start, end } => {
                let s = t / self.duration;
                start
                    .scale(Complex64::new(1.0 - s, 0.0))
                    .add(&end.scale(Complex64::new(s, 0.0)))
            }
            Protocol::Piecewise(segments) => {
                let n = segments.len();
                let idx = ((t / self.duration * n as f64).floor() as usize).min(n - 1);
                segments[idx].clone()
            }
        }
    }
}

/// States, propagators and outcome probabilities on a uniform time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    propagators: Vec<ComplexMatrix>,
    probabilities: Vec<Vec<f64>>,
    measurement: MeasurementSet,
    schedule: HamiltonianSchedule,
}

impl Trajectory {
    #[inline]
    pub fn len(&self) -> usize {
        self.times.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    #[inline]
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    #[inline]
    pub fn state(&self, i: usize) -> &DensityMatrix {
        &self.states[i]
    }

    #[inline]
    pub fn propagator(&self, i: usize) -> &ComplexMatrix {
        &self.propagators[i]
    }

    #[inline]
    pub fn probabilities(&self, i: usize) -> &[f64] {
        &self.probabilities[i]
    }

    #[inline]
    pub fn measurement(&self) -> &MeasurementSet {
        &self.measurement
    }

    #[inline]
    pub fn schedule(&self) -> &HamiltonianSchedule {
        &self.schedule
    }

    #[inline]
    pub fn duration(&self) -> f64 {
        self.schedule.duration()
    }
}

/// Evolves a state over the schedule's horizon with `steps` midpoint
/// exponential steps, recording the state, propagator and outcome
/// probabilities at every grid point. The stepper is exact for piecewise
/// constant driving and second-order accurate for ramps.
pub fn evolve_trajectory(
    initial: &DensityMatrix,
    schedule: &HamiltonianSchedule,
    steps: usize,
    measurement: &MeasurementSet,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::InvalidSteps);
    }
    if initial.dim() != schedule.dim() {
        return Err(Error::DimensionMismatch {
            expected: schedule.dim(),
            got: initial.dim(),
        });
    }
    if measurement.dim() != schedule.dim() {
        return Err(Error::DimensionMismatch {
            expected: schedule.dim(),
            got: measurement.dim(),
        });
    }
    let dt = schedule.duration() / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut propagators = Vec::with_capacity(steps + 1);
    let mut probabilities = Vec::with_capacity(steps + 1);

    let mut u = ComplexMatrix::identity(schedule.dim());
    for i in 0..=steps {
        let t = if i == steps {
            schedule.duration()
        } else {
            i as f64 * dt
        };
        if i > 0 {
            let h_mid = schedule.evaluate((i as f64 - 0.5) * dt);
            u = linalg::unitary_step(&h_mid, dt)?.matmul(&u);
        }
        let state = DensityMatrix::trusted(
            u.matmul(initial.matrix())
                .matmul(&u.adjoint())
                .hermitian_part(),
        );
        probabilities.push(born_probabilities(&state, measurement)?);
        times.push(t);
        states.push(state);
        propagators.push(u.clone());
    }
    Ok(Trajectory {
        times,
        states,
        propagators,
        probabilities,
        measurement: measurement.clone(),
        schedule: schedule.clone(),
    })
}

/// Evolves a state to time `t` along the schedule (clamped to the horizon),
/// subdividing `[0, t]` into `steps` midpoint exponential steps.
pub fn evolve_state_to(
    initial: &DensityMatrix,
    schedule: &HamiltonianSchedule,
    t: f64,
    steps: usize,
) -> Result<DensityMatrix> {
    if steps == 0 {
        return Err(Error::InvalidSteps);
    }
    if initial.dim() != schedule.dim() {
        return Err(Error::DimensionMismatch {
            expected: schedule.dim(),
            got: initial.dim(),
        });
    }
    let t = t.clamp(0.0, schedule.duration());
    if t == 0.0 {
        return Ok(initial.clone());
    }
    let dt = t / steps as f64;
    let mut u = ComplexMatrix::identity(schedule.dim());
    for i in 0..steps {
        let h_mid = schedule.evaluate((i as f64 + 0.5) * dt);
        u = linalg::unitary_step(&h_mid, dt)?.matmul(&u);
    }
    Ok(DensityMatrix::trusted(
        u.matmul(initial.matrix())
            .matmul(&u.adjoint())
            .hermitian_part(),
    ))
}

/// Marks which factor of a bipartite system an operation refers to. The left
/// factor owns the slow index: the joint basis index is `a * dim_b + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Reduced state of one factor of a bipartite system.
pub fn partial_trace(
    state: &DensityMatrix,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityMatrix> {
    let (da, db) = dims;
    if da * db != state.dim() {
        return Err(Error::BadFactorization(da, db, state.dim()));
    }
    let rho = state.matrix();
    let reduced = match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |a, a2| {
            (0..db).map(|b| rho.get(a * db + b, a2 * db + b)).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |b, b2| {
            (0..da).map(|a| rho.get(a * db + b, a * db + b2)).sum()
        }),
    };
    DensityMatrix::new(reduced.hermitian_part())
}

/// Canonical purification on system x ancilla with the ancilla dimension
/// equal to the system dimension: `sum_e sqrt(lambda_e) |v_e> |e>`.
pub fn purify(state: &DensityMatrix) -> Result<PureState> {
    let dim = state.dim();
    let eig = hermitian_eigensystem(state.matrix(), tolerances::HERMITICITY)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim * dim];
    for e in 0..dim {
        let weight = eig.eigenvalues[e].max(0.0).sqrt();
        if weight == 0.0 {
            continue;
        }
        let col = eig.eigenvectors.column(e);
        for a in 0..dim {
            amplitudes[a * dim + e] = col[a] * weight;
        }
    }
    PureState::new(amplitudes)
}

/// Gibbs state `exp(-beta H) / Z` through the eigensystem of `H`, with
/// energies shifted by the ground energy for numerical stability.
pub fn thermal_state(h: &ComplexMatrix, beta: f64) -> Result<DensityMatrix> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::NegativeBeta(beta));
    }
    let eig = hermitian_eigensystem(h, tolerances::HERMITICITY)?;
    let ground = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&e| (-beta * (e - ground)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let dim = h.rows();
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for (w, c) in weights.iter().zip(0..dim) {
        let col = eig.eigenvectors.column(c);
        rho = rho.add(&ComplexMatrix::outer(&col, &col).scale(Complex64::new(w / z, 0.0)));
    }
    DensityMatrix::new(rho.hermitian_part())
}

/// Two-copy purification of the Gibbs state of `H`: Schmidt coefficients
/// `sqrt(exp(-beta E_k) / Z)` across matched energy eigenvectors, so tracing
/// out either copy leaves the thermal state.
pub fn thermofield_double(h: &ComplexMatrix, beta: f64) -> Result<PureState> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::NegativeBeta(beta));
    }
    let eig = hermitian_eigensystem(h, tolerances::HERMITICITY)?;
    let ground = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&e| (-beta * (e - ground)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let dim = h.rows();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim * dim];
    for k in 0..dim {
        let coeff = (weights[k] / z).sqrt();
        let col = eig.eigenvectors.column(k);
        for a in 0..dim {
            for b in 0..dim {
                amplitudes[a * dim + b] += col[a] * col[b] * coeff;
            }
        }
    }
    PureState::new(amplitudes)
}

/// Random mixed state of the given rank: `G G^dag / tr(G G^dag)` with `G` a
/// complex Gaussian `dim x rank` matrix.
pub fn random_density_matrix(dim: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    if rank < 1 || rank > dim {
        return Err(Error::BadRank { rank, dim });
    }
    let g = linalg::random_complex_gaussian(dim, rank, rng);
    let w = g.matmul(&g.adjoint());
    let trace = w.trace().re;
    Ok(DensityMatrix::trusted(
        w.scale(Complex64::new(1.0 / trace, 0.0)).hermitian_part(),
    ))
}

/// Random pure state with Haar-uniform direction.
pub fn random_pure_state(dim: usize, rng: &mut impl Rng) -> PureState {
    loop {
        let g = linalg::random_complex_gaussian(dim, 1, rng);
        let v = g.column(0);
        let norm = linalg::vector_norm(&v);
        if norm > 1e-12 {
            return PureState::new(v.iter().map(|z| z / norm).collect())
                .expect("normalized by construction");
        }
    }
}

/// Random POVM with `n_elements` outcomes: Wishart matrices `A_k` normalized
/// by the inverse square root of their sum.
pub fn random_povm(dim: usize, n_elements: usize, rng: &mut impl Rng) -> Result<MeasurementSet> {
    if n_elements < 2 {
        return Err(Error::TooFewElements(n_elements));
    }
    let parts: Vec<ComplexMatrix> = (0..n_elements)
        .map(|_| {
            let g = linalg::random_complex_gaussian(dim, dim, rng);
            g.matmul(&g.adjoint())
        })
        .collect();
    let mut total = ComplexMatrix::zeros(dim, dim);
    for a in &parts {
        total = total.add(a);
    }
    let eig = hermitian_eigensystem(&total.hermitian_part(), 1e-8 * total.frobenius_norm())?;
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min <= tolerances::PSD_CLIP * top.max(1.0) {
        return Err(Error::SingularNormalizer(min));
    }
    let inv_sqrt_cols: Vec<Vec<Complex64>> = (0..dim).map(|c| eig.eigenvectors.column(c)).collect();
    let mut normalizer = ComplexMatrix::zeros(dim, dim);
    for (lambda, col) in eig.eigenvalues.iter().zip(&inv_sqrt_cols) {
        normalizer = normalizer
            .add(&ComplexMatrix::outer(col, col).scale(Complex64::new(1.0 / lambda.sqrt(), 0.0)));
    }
    let elements: Vec<ComplexMatrix> = parts
        .iter()
        .map(|a| normalizer.matmul(a).matmul(&normalizer).hermitian_part())
        .collect();
    MeasurementSet::new(elements, MeasurementKind::Povm)
}

/// Applies a Kraus channel to the right factor of a bipartite state, leaving
/// the left factor untouched.
pub fn apply_channel_b(
    state: &DensityMatrix,
    dims: (usize, usize),
    kraus: &[ComplexMatrix],
) -> Result<DensityMatrix> {
    let (da, db) = dims;
    if da * db != state.dim() {
        return Err(Error::BadFactorization(da, db, state.dim()));
    }
    if kraus.is_empty() {
        return Err(Error::TooFewElements(0));
    }
    let mut completeness = ComplexMatrix::zeros(db, db);
    for k in kraus {
        let d = k.require_square()?;
        if d != db {
            return Err(Error::DimensionMismatch {
                expected: db,
                got: d,
            });
        }
        completeness = completeness.add(&k.adjoint().matmul(k));
    }
    let defect = completeness
        .sub(&ComplexMatrix::identity(db))
        .max_abs_entry();
    if defect > tolerances::HERMITICITY {
        return Err(Error::NotTracePreserving(defect));
    }
    let id_a = ComplexMatrix::identity(da);
    let mut out = ComplexMatrix::zeros(state.dim(), state.dim());
    for k in kraus {
        let lifted = id_a.kron(k);
        out = out.add(&lifted.matmul(state.matrix()).matmul(&lifted.adjoint()));
    }
    DensityMatrix::new(out.hermitian_part())
}

/// A state on a declared tensor factorization.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    dims: (usize, usize),
    state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, dims: (usize, usize)) -> Result<Self> {
        if dims.0 * dims.1 != state.dim() {
            return Err(Error::BadFactorization(dims.0, dims.1, state.dim()));
        }
        Ok(Self { dims, state })
    }

    pub fn from_pure(psi: &PureState, dims: (usize, usize)) -> Result<Self> {
        Self::new(psi.density(), dims)
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    #[inline]
    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn reduced(&self, keep: Subsystem) -> Result<DensityMatrix> {
        partial_trace(&self.state, self.dims, keep)
    }
}

pub(crate) fn eigensystem_of_state(state: &DensityMatrix) -> Result<EigenSystem> {
    hermitian_eigensystem(state.matrix(), tolerances::HERMITICITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_x, pauli_z};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus_state() -> PureState {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![c(r, 0.0), c(r, 0.0)]).unwrap()
    }

    #[test]
    fn density_matrix_validation_paths() {
        let ok = DensityMatrix::new(ComplexMatrix::from_diagonal(&[c(0.25, 0.0), c(0.75, 0.0)]));
        assert!(ok.is_ok());

        let bad_trace =
            DensityMatrix::new(ComplexMatrix::from_diagonal(&[c(0.6, 0.0), c(0.6, 0.0)]));
        assert!(matches!(bad_trace, Err(Error::InvalidTrace(_))));

        let negative =
            DensityMatrix::new(ComplexMatrix::from_diagonal(&[c(1.2, 0.0), c(-0.2, 0.0)]));
        assert!(matches!(negative, Err(Error::NotPositiveSemidefinite(_))));

        // A hair of negativity is clipped and renormalized.
        let eps = 5e-11;
        let repaired = DensityMatrix::new(ComplexMatrix::from_diagonal(&[
            c(1.0 + eps, 0.0),
            c(-eps, 0.0),
        ]))
        .unwrap();
        let eig = eigensystem_of_state(&repaired).unwrap();
        assert!(eig.eigenvalues.iter().all(|&x| x >= 0.0));
        assert!((repaired.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn purity_of_mixed_and_pure_states() {
        assert!((DensityMatrix::maximally_mixed(4).purity() - 0.25).abs() < 1e-13);
        assert!((plus_state().density().purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn born_rule_for_plus_state() {
        let rho = plus_state().density();
        let z = MeasurementSet::computational(2);
        let pz = born_probabilities(&rho, &z).unwrap();
        assert!((pz[0] - 0.5).abs() < 1e-12 && (pz[1] - 0.5).abs() < 1e-12);

        let hadamard = ComplexMatrix::from_fn(2, 2, |r, c2| {
            let sign = if r == 1 && c2 == 1 { -1.0 } else { 1.0 };
            c(sign * std::f64::consts::FRAC_1_SQRT_2, 0.0)
        });
        let x = MeasurementSet::from_basis(&hadamard).unwrap();
        let px = born_probabilities(&rho, &x).unwrap();
        assert!((px[0] - 1.0).abs() < 1e-12 && px[1] < 1e-12);
    }

    #[test]
    fn measurement_validation_paths() {
        let half = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        let povm = MeasurementSet::new(vec![half.clone(), half.clone()], MeasurementKind::Povm);
        assert!(povm.is_ok());
        let not_projective =
            MeasurementSet::new(vec![half.clone(), half.clone()], MeasurementKind::Pvm);
        assert!(matches!(not_projective, Err(Error::NotProjective(_))));
        let incomplete = MeasurementSet::new(vec![half], MeasurementKind::Povm);
        assert!(matches!(incomplete, Err(Error::IncompleteMeasurement(_))));

        let z = MeasurementSet::computational(2);
        assert_eq!(z.kind(), MeasurementKind::Rank1Pvm);
        assert_eq!(z.len(), 2);
    }

    #[test]
    fn lifted_measurement_acts_on_the_left_factor() {
        let z_lifted = MeasurementSet::computational(2).lift_right(3);
        assert_eq!(z_lifted.dim(), 6);
        assert_eq!(z_lifted.kind(), MeasurementKind::Pvm);
        let rho = DensityMatrix::maximally_mixed(6);
        let p = born_probabilities(&rho, &z_lifted).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_evolution_matches_the_closed_form() {
        // Under H = sigma_z from |+>, the X-basis outcome follows cos^2(t).
        let schedule =
            HamiltonianSchedule::constant(pauli_z(), std::f64::consts::FRAC_PI_4).unwrap();
        let hadamard = ComplexMatrix::from_fn(2, 2, |r, c2| {
            let sign = if r == 1 && c2 == 1 { -1.0 } else { 1.0 };
            c(sign * std::f64::consts::FRAC_1_SQRT_2, 0.0)
        });
        let x = MeasurementSet::from_basis(&hadamard).unwrap();
        let traj = evolve_trajectory(&plus_state().density(), &schedule, 64, &x).unwrap();
        assert_eq!(traj.len(), 65);
        for i in 0..traj.len() {
            let t = traj.times()[i];
            assert!((traj.probabilities(i)[0] - t.cos().powi(2)).abs() < 1e-12);
            assert!(traj.propagator(i).unitarity_defect() < 1e-12);
            let direct = born_probabilities(traj.state(i), traj.measurement()).unwrap();
            assert!((direct[0] - traj.probabilities(i)[0]).abs() < 1e-14);
        }
        // Final state is the sigma_y eigenstate: Z outcomes stay even.
        let pz = born_probabilities(
            traj.state(traj.len() - 1),
            &MeasurementSet::computational(2),
        )
        .unwrap();
        assert!((pz[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ramp_evolution_converges_at_second_order() {
        let schedule = HamiltonianSchedule::linear_ramp(pauli_z(), pauli_x(), 1.0).unwrap();
        let z = MeasurementSet::computational(2);
        let rho0 = plus_state().density();
        let reference = evolve_trajectory(&rho0, &schedule, 1600, &z).unwrap();
        let p_ref = reference.probabilities(reference.len() - 1)[0];
        let err = |steps: usize| {
            let traj = evolve_trajectory(&rho0, &schedule, steps, &z).unwrap();
            (traj.probabilities(traj.len() - 1)[0] - p_ref).abs()
        };
        let ratio = err(50) / err(100);
        assert!(
            (3.0..5.0).contains(&ratio),
            "halving the step should quarter the error, got ratio {ratio}"
        );
    }

    #[test]
    fn evolve_state_to_matches_grid_states() {
        let schedule = HamiltonianSchedule::constant(pauli_x(), 1.0).unwrap();
        let z = MeasurementSet::computational(2);
        let rho0 =
            DensityMatrix::new(ComplexMatrix::from_diagonal(&[c(0.9, 0.0), c(0.1, 0.0)])).unwrap();
        let traj = evolve_trajectory(&rho0, &schedule, 10, &z).unwrap();
        let probe = evolve_state_to(&rho0, &schedule, traj.times()[7], 7).unwrap();
        let gap = probe.matrix().sub(traj.state(7).matrix()).max_abs_entry();
        assert!(gap < 1e-12);
    }

    #[test]
    fn purification_recovers_the_state() {
        let rho = DensityMatrix::new(ComplexMatrix::from_diagonal(&[c(0.25, 0.0), c(0.75, 0.0)]))
            .unwrap();
        let psi = purify(&rho).unwrap();
        assert_eq!(psi.dim(), 4);
        let back = partial_trace(&psi.density(), (2, 2), Subsystem::A).unwrap();
        assert!(back.matrix().sub(rho.matrix()).max_abs_entry() < 1e-12);
        // Schmidt weights are the eigenvalues of rho.
        let weights: f64 = psi.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert!((weights - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_a_product_state() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let a = random_density_matrix(2, 2, &mut rng).unwrap();
        let b = random_density_matrix(3, 3, &mut rng).unwrap();
        let joint = DensityMatrix::trusted(a.matrix().kron(b.matrix()));
        let ra = partial_trace(&joint, (2, 3), Subsystem::A).unwrap();
        let rb = partial_trace(&joint, (2, 3), Subsystem::B).unwrap();
        assert!(ra.matrix().sub(a.matrix()).max_abs_entry() < 1e-12);
        assert!(rb.matrix().sub(b.matrix()).max_abs_entry() < 1e-12);
    }

    #[test]
    fn thermal_state_of_a_two_level_system() {
        let h = ComplexMatrix::from_diagonal(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let rho = thermal_state(&h, 1.0).unwrap();
        let p0 = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((rho.matrix().get(0, 0).re - p0).abs() < 1e-12);
        assert!((rho.matrix().get(1, 1).re - (1.0 - p0)).abs() < 1e-12);

        let flat = thermal_state(&h, 0.0).unwrap();
        assert!((flat.matrix().get(0, 0).re - 0.5).abs() < 1e-12);
        assert!(matches!(
            thermal_state(&h, -1.0),
            Err(Error::NegativeBeta(_))
        ));
    }

    #[test]
    fn thermofield_double_reduces_to_thermal() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let h = crate::linalg::random_hermitian(3, &mut rng);
        let beta = 1.3;
        let psi = thermofield_double(&h, beta).unwrap();
        let reduced = partial_trace(&psi.density(), (3, 3), Subsystem::A).unwrap();
        let thermal = thermal_state(&h, beta).unwrap();
        assert!(reduced.matrix().sub(thermal.matrix()).max_abs_entry() < 1e-10);

        // Diagonal H pins the Schmidt coefficients to sqrt(p_k).
        let hd = ComplexMatrix::from_diagonal(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let tfd = thermofield_double(&hd, 1.0).unwrap();
        let p0 = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((tfd.amplitudes()[0].norm() - p0.sqrt()).abs() < 1e-12);
        assert!((tfd.amplitudes()[3].norm() - (1.0 - p0).sqrt()).abs() < 1e-12);
        assert!(tfd.amplitudes()[1].norm() < 1e-13 && tfd.amplitudes()[2].norm() < 1e-13);
    }

    #[test]
    fn random_states_have_the_requested_rank() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let pure = random_density_matrix(4, 1, &mut rng).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-10);
        let eig = eigensystem_of_state(&random_density_matrix(4, 2, &mut rng).unwrap()).unwrap();
        assert!(eig.eigenvalues[2].abs() < 1e-12 && eig.eigenvalues[3].abs() < 1e-12);
        assert!(matches!(
            random_density_matrix(3, 0, &mut rng),
            Err(Error::BadRank { .. })
        ));
        assert!(matches!(
            random_density_matrix(3, 4, &mut rng),
            Err(Error::BadRank { .. })
        ));
    }

    #[test]
    fn random_povm_is_complete_and_normalizes_probabilities() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let povm = random_povm(3, 4, &mut rng).unwrap();
        assert_eq!(povm.len(), 4);
        let rho = random_density_matrix(3, 3, &mut rng).unwrap();
        let p = born_probabilities(&rho, &povm).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(matches!(
            random_povm(3, 1, &mut rng),
            Err(Error::TooFewElements(1))
        ));
    }

    #[test]
    fn dephasing_channel_scales_off_diagonal_blocks() {
        // Kraus set {sqrt(1-p) I, sqrt(p) P0, sqrt(p) P1} leaves diagonal
        // blocks alone and multiplies off-diagonal blocks by 1-p.
        let p: f64 = 0.3;
        let kraus = vec![
            ComplexMatrix::identity(2).scale(c((1.0 - p).sqrt(), 0.0)),
            ComplexMatrix::from_diagonal(&[c(p.sqrt(), 0.0), c(0.0, 0.0)]),
            ComplexMatrix::from_diagonal(&[c(0.0, 0.0), c(p.sqrt(), 0.0)]),
        ];
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(vec![c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)]).unwrap();
        let out = apply_channel_b(&bell.density(), (2, 2), &kraus).unwrap();
        assert!((out.matrix().get(0, 3).re - 0.35).abs() < 1e-12);
        assert!((out.matrix().get(0, 0).re - 0.5).abs() < 1e-12);

        let broken = vec![ComplexMatrix::identity(2).scale(c(0.9, 0.0))];
        assert!(matches!(
            apply_channel_b(&bell.density(), (2, 2), &broken),
            Err(Error::NotTracePreserving(_))
        ));
    }

    #[test]
    fn bipartite_state_checks_factorization() {
        let rho = DensityMatrix::maximally_mixed(6);
        assert!(BipartiteState::new(rho.clone(), (2, 3)).is_ok());
        assert!(matches!(
            BipartiteState::new(rho, (2, 2)),
            Err(Error::BadFactorization(2, 2, 6))
        ));
    }
}
