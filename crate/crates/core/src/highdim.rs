//! N-dimensional states, degree-of-freedom counting, post-selection onto
//! two-dimensional subsystems and the information-based positivity test.
//!
//! For a pair `(i, j)` of outcomes of a complete measurement `Z`, the
//! post-selected qubit has sectors `p_xij/w`, `p_yij/w` and `(p_i, p_j)/w`
//! with branch weight `w = p_i + p_j`. Its quadratic total uncertainty is at
//! least 2 exactly when `ρ_ii ρ_jj ≥ |ρ_ij|²`; requiring this for every pair
//! in every basis is equivalent to `ρ ≥ 0`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{EntropyMeasure, PROB_TOL};
use crate::qubit::{total_uncertainty_state, QubitState};
use crate::seed::{Domain, SeedStream};

pub type CMatrix = DMatrix<Complex64>;

/// Entrywise tolerance for hermiticity, unit trace and basis orthonormality.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Branch weights at or below this are untestable.
pub const BRANCH_EPS: f64 = 1e-12;
pub const DEFAULT_POSITIVITY_TOL: f64 = 1e-9;
/// Relative slack under which two basis witnesses count as equally bad.
const TIE_SLACK: f64 = 1e-10;

// ---------------------------------------------------------------------------
// counting

/// `K(N) = N - 1 + N(N-1)(m-1)/2` independent probabilities when each
/// post-selected two-dimensional system needs `m` measurements.
pub fn degrees_of_freedom(n: u64, m: u64) -> Result<u64> {
    if n < 2 || m < 1 {
        return Err(Error::InvalidArgument(format!("need n >= 2 and m >= 1, got n={n}, m={m}")));
    }
    let overflow = || Error::Overflow(format!("K({n}) with m={m}"));
    // n(n-1)/2, halving the even factor first
    let pairs = if n.is_multiple_of(2) { (n / 2).checked_mul(n - 1) } else { n.checked_mul((n - 1) / 2) }.ok_or_else(overflow)?;
    pairs
        .checked_mul(m - 1)
        .and_then(|x| x.checked_add(n - 1))
        .ok_or_else(overflow)
}

/// `K(N) = N^r - 1`.
pub fn hierarchy_k(n: u64, r: u32) -> Result<u64> {
    if n < 2 || r < 1 {
        return Err(Error::InvalidArgument(format!("need n >= 2 and r >= 1, got n={n}, r={r}")));
    }
    n.checked_pow(r)
        .map(|x| x - 1)
        .ok_or_else(|| Error::Overflow(format!("{n}^{r}")))
}

/// All `(m, r)` for which `degrees_of_freedom(N, m) == N^r - 1` holds for
/// every `N` in `2..=n_max`. Values too large for `u64` count as mismatches.
pub fn counting_consistency(n_max: u64, ms: &[u64], rs: &[u32]) -> Result<Vec<(u64, u32)>> {
    if n_max < 2 || ms.is_empty() || rs.is_empty() {
        return Err(Error::InvalidArgument("need n_max >= 2 and non-empty m and r ranges".into()));
    }
    let mut matches = Vec::new();
    for &m in ms {
        for &r in rs {
            let all = (2..=n_max).all(|n| match (degrees_of_freedom(n, m), hierarchy_k(n, r)) {
                (Ok(k), Ok(h)) => k == h,
                _ => false,
            });
            if all {
                matches.push((m, r));
            }
        }
    }
    Ok(matches)
}

// ---------------------------------------------------------------------------
// operators and bases

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Dimension(format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols())));
        }
        let asym = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(asym <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian(asym));
        }
        let trace = m.trace();
        if !((trace.re - 1.0).abs() <= HERMITIAN_TOL) {
            return Err(Error::InvalidTrace(trace.re));
        }
        Ok(Self { m: hermitize(m) })
    }

    /// Row-major real and imaginary parts.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let n = re.len();
        if im.len() != n || re.iter().chain(im).any(|row| row.len() != n) {
            return Err(Error::Dimension(format!("re and im must both be {n}x{n}")));
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| Complex64::new(re[i][j], im[i][j])))
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(d[i], 0.0) } else { Complex64::new(0.0, 0.0) }))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self::diagonal(&vec![1.0 / n as f64; n]).expect("I/n is a state")
    }

    /// `U diag(spectrum) U†` for the given basis.
    pub fn from_spectrum(spectrum: &[f64], basis: &Basis) -> Result<Self> {
        if spectrum.len() != basis.dim() {
            return Err(Error::Dimension("spectrum and basis sizes differ".into()));
        }
        let d = CMatrix::from_diagonal(&DVector::from_iterator(
            spectrum.len(),
            spectrum.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        Self::new(&basis.u * d * basis.u.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    /// Matrix elements `⟨b_k|ρ|b_l⟩` in the given basis.
    pub fn in_basis(&self, basis: &Basis) -> Result<HermitianOperator> {
        if basis.dim() != self.dim() {
            return Err(Error::Dimension(format!("basis of size {} for operator of size {}", basis.dim(), self.dim())));
        }
        Ok(Self { m: hermitize(basis.u.adjoint() * &self.m * &basis.u) })
    }

    /// Largest diagonal magnitude; positivity tolerances are relative to it.
    pub fn tolerance_scale(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re.abs()).fold(0.0, f64::max)
    }

    pub fn parts(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let n = self.dim();
        let re = (0..n).map(|i| (0..n).map(|j| self.m[(i, j)].re).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| self.m[(i, j)].im).collect()).collect();
        (re, im)
    }
}

fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// An orthonormal basis of `C^N`; the columns of `u` are the basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    u: CMatrix,
}

impl Basis {
    pub fn new(u: CMatrix) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(Error::Dimension("basis matrix must be square".into()));
        }
        let n = u.nrows();
        let dev = (u.adjoint() * &u - CMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(dev <= HERMITIAN_TOL) {
            return Err(Error::NonOrthonormalBasis(dev));
        }
        Ok(Self { u })
    }

    pub fn computational(n: usize) -> Self {
        Self { u: CMatrix::identity(n, n) }
    }

    /// Haar-random basis: Gram–Schmidt on a complex Gaussian matrix.
    pub fn random_haar<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let g = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
            if let Some(u) = gram_schmidt(g) {
                return Self { u };
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }

    pub fn vector(&self, k: usize) -> DVector<Complex64> {
        self.u.column(k).into_owned()
    }
}

/// Serialized as `{"re": [[..]], "im": [[..]]}`, row-major; columns are the basis vectors.
impl Serialize for Basis {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let n = self.dim();
        let re: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| self.u[(i, j)].re).collect()).collect();
        let im: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| self.u[(i, j)].im).collect()).collect();
        let mut st = serializer.serialize_struct("Basis", 2)?;
        st.serialize_field("re", &re)?;
        st.serialize_field("im", &im)?;
        st.end()
    }
}

fn serialize_complex_vec<S: serde::Serializer>(v: &[Complex64], serializer: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = serializer.serialize_struct("ComplexVector", 2)?;
    st.serialize_field("re", &v.iter().map(|z| z.re).collect::<Vec<_>>())?;
    st.serialize_field("im", &v.iter().map(|z| z.im).collect::<Vec<_>>())?;
    st.end()
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gram_schmidt(mut g: CMatrix) -> Option<CMatrix> {
    let n = g.ncols();
    for k in 0..n {
        for _ in 0..2 {
            for j in 0..k {
                let proj = g.column(j).dotc(&g.column(k));
                let qj = g.column(j).into_owned();
                let mut ck = g.column_mut(k);
                ck -= qj * proj;
            }
        }
        let norm = g.column(k).norm();
        if norm < 1e-10 {
            return None;
        }
        g.column_mut(k).unscale_mut(norm);
    }
    Some(g)
}

// ---------------------------------------------------------------------------
// probability representation

/// A state given by `N - 1 + N(N-1)` probabilities: the `N` outcomes of `Z`
/// plus `(p_xij, p_yij)` for every pair `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GptStateN {
    n: usize,
    z_probs: Vec<f64>,
    pair_probs: Vec<(f64, f64)>,
}

impl GptStateN {
    /// Checks shapes only; see [`GptStateN::violations`] for the invariants.
    pub fn new(z_probs: Vec<f64>, pair_probs: Vec<(f64, f64)>) -> Result<Self> {
        let n = z_probs.len();
        if n < 2 {
            return Err(Error::Dimension(format!("need N >= 2, got {n}")));
        }
        if pair_probs.len() != n * (n - 1) / 2 {
            return Err(Error::Dimension(format!("expected {} pairs, got {}", n * (n - 1) / 2, pair_probs.len())));
        }
        Ok(Self { n, z_probs, pair_probs })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn z_probs(&self) -> &[f64] {
        &self.z_probs
    }

    /// Number of independent parameters, `N² - 1`.
    pub fn parameter_count(&self) -> usize {
        (self.n - 1) + self.n * (self.n - 1)
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    /// `(p_xij, p_yij)` for the ordered pair. Swapping the pair leaves `X`
    /// unchanged and maps `p_y` to `w - p_y`.
    pub fn pair(&self, i: usize, j: usize) -> (f64, f64) {
        if i < j {
            self.pair_probs[self.pair_index(i, j)]
        } else {
            let (px, py) = self.pair_probs[self.pair_index(j, i)];
            (px, self.z_probs[i] + self.z_probs[j] - py)
        }
    }

    /// Every violated invariant, in words. Empty for states of positive operators.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (k, &p) in self.z_probs.iter().enumerate() {
            if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&p) {
                out.push(format!("z probability {k} = {p} outside [0, 1]"));
            }
        }
        let sum: f64 = self.z_probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            out.push(format!("z probabilities sum to {sum}"));
        }
        for i in 0..self.n {
            for j in i + 1..self.n {
                let (px, py) = self.pair(i, j);
                let w = self.z_probs[i] + self.z_probs[j];
                for (name, p) in [("x", px), ("y", py)] {
                    if p < -PROB_TOL || p > w + PROB_TOL {
                        out.push(format!("p_{name}{i}{j} = {p} outside [0, {w}]"));
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_empty()
    }
}

/// Probabilities of `Z`, `X_ij`, `Y_ij` built from `ρ` in `basis`:
/// `z_k = ρ_kk`, `p_xij = (ρ_ii + ρ_jj)/2 + Re ρ_ij`, `p_yij = (ρ_ii + ρ_jj)/2 + Im ρ_ij`.
pub fn gpt_from_density(rho: &HermitianOperator, basis: &Basis) -> Result<GptStateN> {
    let r = rho.in_basis(basis)?;
    Ok(gpt_from_matrix(&r))
}

fn gpt_from_matrix(r: &HermitianOperator) -> GptStateN {
    let n = r.dim();
    let z: Vec<f64> = (0..n).map(|k| r.entry(k, k).re).collect();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let half = 0.5 * (z[i] + z[j]);
            let rij = r.entry(i, j);
            pairs.push((half + rij.re, half + rij.im));
        }
    }
    GptStateN { n, z_probs: z, pair_probs: pairs }
}

/// The two-dimensional system prepared when only outcomes `i` or `j` of `Z`
/// occur, normalized by the branch weight.
pub fn postselect(s: &GptStateN, i: usize, j: usize) -> Result<QubitState> {
    if i == j || i >= s.n || j >= s.n {
        return Err(Error::InvalidArgument(format!("invalid pair ({i}, {j}) for N = {}", s.n)));
    }
    let (pi, pj) = (s.z_probs[i], s.z_probs[j]);
    let w = pi + pj;
    if !(w > BRANCH_EPS) {
        return Err(Error::ZeroBranch { i, j, weight: w });
    }
    let (px, py) = s.pair(i, j);
    let (px, py) = (px / w, py / w);
    QubitState::from_sectors([px, 1.0 - px, py, 1.0 - py, pi / w, pj / w])
}

fn quadratic() -> EntropyMeasure {
    EntropyMeasure::new(2.0, 2.0).expect("valid constants")
}

/// Quadratic total uncertainty of the post-selected qubit; at least 2 for
/// physical states.
pub fn pair_uncertainty(s: &GptStateN, i: usize, j: usize) -> Result<f64> {
    total_uncertainty_state(&postselect(s, i, j)?, &quadratic())
}

/// `ρ_ii ρ_jj - |ρ_ij|²`.
pub fn minor_condition(rho: &HermitianOperator, i: usize, j: usize) -> f64 {
    rho.entry(i, i).re * rho.entry(j, j).re - rho.entry(i, j).norm_sqr()
}

// ---------------------------------------------------------------------------
// positivity

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Computational basis only; a necessary condition.
    FixedBasis,
    /// Computational basis plus `n_bases` Haar-random bases.
    Sampled,
    /// As `Sampled`, plus a basis adapted to the eigenvectors of `ρ`.
    EigenDirected,
    /// Ground truth from the smallest eigenvalue.
    EigenOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum BasisLabel {
    Computational,
    Sampled { index: usize },
    EigenAdapted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// A post-selected qubit carrying more than one bit.
    Pair {
        basis_label: BasisLabel,
        basis: Basis,
        i: usize,
        j: usize,
        branch_weight: f64,
        pair_uncertainty: f64,
        /// `w (1 - |m|) / 2`: the smaller eigenvalue of the unnormalized 2x2 block.
        deficit: f64,
        minor: f64,
    },
    Eigen {
        min_eigenvalue: f64,
        #[serde(serialize_with = "serialize_complex_vec")]
        eigenvector: Vec<Complex64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityVerdict {
    pub positive: bool,
    pub witness: Option<Witness>,
    pub strategy: Strategy,
    pub pairs_checked: usize,
    pub pairs_untestable: usize,
}

struct PairOutcome {
    deficit: f64,
    witness: Witness,
}

/// Runs the one-bit test on every pair in `basis`. A pair violates when the
/// post-selected qubit's quadratic total uncertainty `H` implies
/// `w (1 - sqrt(3 - H)) / 2 < -tau`.
fn check_basis(rho: &HermitianOperator, basis: &Basis, label: BasisLabel, tau: f64) -> Result<(usize, usize, Option<PairOutcome>)> {
    let r = rho.in_basis(basis)?;
    let gpt = gpt_from_matrix(&r);
    let (mut checked, mut untestable) = (0, 0);
    let mut worst: Option<PairOutcome> = None;
    for i in 0..gpt.n {
        for j in i + 1..gpt.n {
            let h = match pair_uncertainty(&gpt, i, j) {
                Ok(h) => h,
                Err(Error::ZeroBranch { .. }) => {
                    untestable += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            checked += 1;
            let w = gpt.z_probs[i] + gpt.z_probs[j];
            let deficit = 0.5 * w * (1.0 - (3.0 - h).max(0.0).sqrt());
            if deficit < -tau && worst.as_ref().is_none_or(|o| deficit < o.deficit) {
                worst = Some(PairOutcome {
                    deficit,
                    witness: Witness::Pair {
                        basis_label: label.clone(),
                        basis: basis.clone(),
                        i,
                        j,
                        branch_weight: w,
                        pair_uncertainty: h,
                        deficit,
                        minor: minor_condition(&r, i, j),
                    },
                });
            }
        }
    }
    Ok((checked, untestable, worst))
}

/// Eigenbasis of `ρ`, modified so that one pair isolates a negative direction
/// with positive branch weight whenever `ρ` has a negative eigenvalue.
///
/// Pairs the most negative eigenvector with the most positive one. If that
/// branch would be too light (`λ_min ≤ -λ_max/2`) and a second positive
/// eigenvalue exists, the negative eigenvector is first rotated towards it so
/// its diagonal element becomes `-λ_max/2`.
fn eigen_adapted_basis(rho: &HermitianOperator) -> Result<(Basis, usize, usize)> {
    let eig = SymmetricEigen::try_new(rho.matrix().clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
    let vals = &eig.eigenvalues;
    let mut u = eig.eigenvectors;
    let n = vals.len();
    let imin = (0..n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("n >= 1");
    let imax = (0..n).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).expect("n >= 1");
    let (lmin, lmax) = (vals[imin], vals[imax]);
    let partner = (0..n)
        .filter(|&k| k != imin && k != imax && vals[k] > 0.0)
        .max_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    if let (true, Some(k)) = (lmin <= -0.5 * lmax, partner) {
        let target = -0.5 * lmax;
        let lk = vals[k];
        let c = ((lk - target) / (lk - lmin)).sqrt();
        let s = (1.0 - c * c).max(0.0).sqrt();
        let (vmin, vk) = (u.column(imin).into_owned(), u.column(k).into_owned());
        u.set_column(imin, &(&vmin * Complex64::new(c, 0.0) + &vk * Complex64::new(s, 0.0)));
        u.set_column(k, &(&vk * Complex64::new(c, 0.0) - &vmin * Complex64::new(s, 0.0)));
    }
    Ok((Basis::new(u)?, imin.min(imax), imin.max(imax)))
}

/// Information-based positivity test.
///
/// `tol` is relative to [`HermitianOperator::tolerance_scale`], the same
/// scaling used by [`eigen_positivity_oracle`]. With
/// [`Strategy::EigenDirected`] the verdict agrees with the oracle.
pub fn info_positivity_check(
    rho: &HermitianOperator,
    strategy: Strategy,
    n_bases: usize,
    seeds: &SeedStream,
    tol: f64,
) -> Result<PositivityVerdict> {
    if strategy == Strategy::EigenOracle {
        return eigen_positivity_oracle(rho, tol);
    }
    let n = rho.dim();
    if n < 2 {
        return Err(Error::Dimension("positivity test needs N >= 2".into()));
    }
    let tau = tol * rho.tolerance_scale();
    let mut bases = vec![(Basis::computational(n), BasisLabel::Computational)];
    if strategy != Strategy::FixedBasis {
        bases.extend(
            (0..n_bases).map(|b| (Basis::random_haar(n, &mut seeds.rng(Domain::Bases, b as u64)), BasisLabel::Sampled { index: b })),
        );
    }
    if strategy == Strategy::EigenDirected {
        let (basis, _, _) = eigen_adapted_basis(rho)?;
        bases.push((basis, BasisLabel::EigenAdapted));
    }
    let results: Vec<(usize, usize, Option<PairOutcome>)> = bases
        .into_par_iter()
        .map(|(basis, label)| check_basis(rho, &basis, label, tau))
        .collect::<Result<_>>()?;
    let mut checked = 0;
    let mut untestable = 0;
    let mut worst: Option<PairOutcome> = None;
    // in basis order; deficits equal up to rounding keep the earlier basis
    for (c, u, w) in results {
        checked += c;
        untestable += u;
        if let Some(w) = w {
            if worst.as_ref().is_none_or(|o| w.deficit < o.deficit - TIE_SLACK * o.deficit.abs().max(tau)) {
                worst = Some(w);
            }
        }
    }
    Ok(PositivityVerdict {
        positive: worst.is_none(),
        witness: worst.map(|w| w.witness),
        strategy,
        pairs_checked: checked,
        pairs_untestable: untestable,
    })
}

/// Smallest eigenvalue of `ρ` via its real symmetric embedding
/// `[[Re ρ, -Im ρ], [Im ρ, Re ρ]]`, which has the spectrum of `ρ` twice.
pub fn eigen_positivity_oracle(rho: &HermitianOperator, tol: f64) -> Result<PositivityVerdict> {
    let (min, vec) = min_eigenpair(rho)?;
    let positive = min >= -tol * rho.tolerance_scale();
    Ok(PositivityVerdict {
        positive,
        witness: (!positive).then_some(Witness::Eigen { min_eigenvalue: min, eigenvector: vec }),
        strategy: Strategy::EigenOracle,
        pairs_checked: 0,
        pairs_untestable: 0,
    })
}

/// Smallest eigenvalue and a unit eigenvector.
pub fn min_eigenpair(rho: &HermitianOperator) -> Result<(f64, Vec<Complex64>)> {
    let n = rho.dim();
    let m = rho.matrix();
    let embed = DMatrix::<f64>::from_fn(2 * n, 2 * n, |r, c| {
        let z = m[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let eig = SymmetricEigen::try_new(embed, 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let k = (0..2 * n)
        .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
        .expect("n >= 1");
    let col = eig.eigenvectors.column(k);
    let v: Vec<Complex64> = (0..n).map(|i| Complex64::new(col[i], col[i + n])).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok((eig.eigenvalues[k], v.into_iter().map(|z| z / norm).collect()))
}

// ---------------------------------------------------------------------------
// test matrices

/// `GG† / Tr(GG†)` for a complex Gaussian `G`; positive semidefinite.
pub fn random_psd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianOperator {
    let g = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let p = &g * g.adjoint();
    let tr = p.trace().re;
    HermitianOperator::new(p.unscale(tr)).expect("normalized Gram matrix")
}

/// A random PSD matrix minus a random rank-one term of weight in
/// `[0.05, 0.8]`, renormalized; often, not always, indefinite.
pub fn random_perturbed<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianOperator {
    let p = random_psd(n, rng);
    let v = DVector::from_fn(n, |_, _| complex_gaussian(rng));
    let v = v.unscale(v.norm());
    let t: f64 = rng.random_range(0.05..0.8);
    let m = p.matrix() - (&v * v.adjoint()) * Complex64::new(t, 0.0);
    HermitianOperator::new(m.unscale(1.0 - t)).expect("trace 1 - t > 0")
}

/// A random PSD matrix shifted along its lowest eigenvector so the smallest
/// eigenvalue of the renormalized result equals `min_eigenvalue`.
pub fn random_with_min_eigenvalue<R: Rng + ?Sized>(n: usize, min_eigenvalue: f64, rng: &mut R) -> Result<HermitianOperator> {
    let p = random_psd(n, rng);
    let eig = SymmetricEigen::try_new(p.matrix().clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
    let k = (0..n)
        .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
        .expect("n >= 1");
    let lmin = eig.eigenvalues[k];
    // new eigenvalue e, new trace 1 - lmin + e; want e / trace = min_eigenvalue
    let e = min_eigenvalue * (1.0 - lmin) / (1.0 - min_eigenvalue);
    let v = eig.eigenvectors.column(k).into_owned();
    let m = p.matrix() - (&v * v.adjoint()) * Complex64::new(lmin - e, 0.0);
    let tr = m.trace().re;
    HermitianOperator::new(m.unscale(tr))
}
