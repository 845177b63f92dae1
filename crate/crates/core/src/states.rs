//! Canonical test states, parametric families and seeded random generators.
//!
//! Every family has a textual form `family:param1[,param2...]`:
//!
//! | text                        | state                                          |
//! |-----------------------------|------------------------------------------------|
//! | `bell:psi-` (`psi+`, `phi-`, `phi+`) | Bell projector, ψ± = (\|01⟩±\|10⟩)/√2, φ± = (\|00⟩±\|11⟩)/√2 |
//! | `ghz:N`, `w:N`              | N-qubit GHZ / W state                          |
//! | `werner:P`                  | `P·ψ⁻ + (1−P)·I/4`                             |
//! | `isotropic:D,F`             | `F·Φ⁺ + (1−F)(I−Φ⁺)/(D²−1)` on D×D             |
//! | `horodecki3x3:A`            | 3×3 bound entangled family                     |
//! | `horodecki2x4:B`            | 2×4 bound entangled family                     |
//! | `maxmixed:2x3`              | `I/D` with the given subsystem dimensions      |
//! | `product:2x3[,SEED]`        | random pure product state                      |
//! | `separable:2x3,TERMS[,SEED]`| mixture of TERMS random pure product states    |
//! | `random:2x3,RANK[,SEED]`    | `G G† / tr(G G†)`, G a D×RANK Gaussian matrix  |

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Bell(BellState),
    Ghz(usize),
    W(usize),
    Werner(f64),
    Isotropic { dim: usize, fidelity: f64 },
    Horodecki3x3(f64),
    Horodecki2x4(f64),
    MaxMixed(Vec<usize>),
    ProductRandom { dims: Vec<usize>, seed: u64 },
    SeparableMixture { dims: Vec<usize>, terms: usize, seed: u64 },
    RandomDensity { dims: Vec<usize>, rank: usize, seed: u64 },
}

fn parse_num<T: std::str::FromStr>(text: &str, what: &str) -> Result<T> {
    text.trim().parse().map_err(|_| Error::arg(format!("cannot parse {what} from '{text}'")))
}

fn parse_dims(text: &str) -> Result<Vec<usize>> {
    text.split('x').map(|d| parse_num(d, "subsystem dimension")).collect()
}

fn fmt_dims(dims: &[usize]) -> String {
    dims.iter().map(ToString::to_string).collect::<Vec<_>>().join("x")
}

impl StateSpec {
    /// Parses the textual form; seeded families without an explicit seed use `default_seed`.
    pub fn parse_with_seed(text: &str, default_seed: u64) -> Result<Self> {
        let text = text.trim();
        let (family, rest) = text.split_once(':').unwrap_or((text, ""));
        let params: Vec<&str> = if rest.is_empty() { Vec::new() } else { rest.split(',').collect() };
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if params.len() < lo || params.len() > hi {
                let want = if lo == hi { lo.to_string() } else { format!("{lo}-{hi}") };
                return Err(Error::arg(format!(
                    "'{family}' takes {want} parameter(s), got {} in '{text}'",
                    params.len()
                )));
            }
            Ok(())
        };
        let seed_at = |i: usize| -> Result<u64> { params.get(i).map_or(Ok(default_seed), |s| parse_num(s, "seed")) };
        let spec = match family.to_ascii_lowercase().as_str() {
            "bell" => {
                arity(1, 1)?;
                StateSpec::Bell(match params[0].trim() {
                    "psi-" => BellState::PsiMinus,
                    "psi+" => BellState::PsiPlus,
                    "phi-" => BellState::PhiMinus,
                    "phi+" => BellState::PhiPlus,
                    other => return Err(Error::arg(format!("unknown Bell state '{other}'"))),
                })
            }
            "ghz" => {
                arity(1, 1)?;
                StateSpec::Ghz(parse_num(params[0], "qubit count")?)
            }
            "w" => {
                arity(1, 1)?;
                StateSpec::W(parse_num(params[0], "qubit count")?)
            }
            "werner" => {
                arity(1, 1)?;
                StateSpec::Werner(parse_num(params[0], "mixing parameter")?)
            }
            "isotropic" => {
                arity(2, 2)?;
                StateSpec::Isotropic {
                    dim: parse_num(params[0], "local dimension")?,
                    fidelity: parse_num(params[1], "fidelity")?,
                }
            }
            "horodecki3x3" => {
                arity(1, 1)?;
                StateSpec::Horodecki3x3(parse_num(params[0], "parameter a")?)
            }
            "horodecki2x4" => {
                arity(1, 1)?;
                StateSpec::Horodecki2x4(parse_num(params[0], "parameter b")?)
            }
            "maxmixed" => {
                arity(1, 1)?;
                StateSpec::MaxMixed(parse_dims(params[0])?)
            }
            "product" => {
                arity(1, 2)?;
                StateSpec::ProductRandom { dims: parse_dims(params[0])?, seed: seed_at(1)? }
            }
            "separable" => {
                arity(2, 3)?;
                StateSpec::SeparableMixture {
                    dims: parse_dims(params[0])?,
                    terms: parse_num(params[1], "term count")?,
                    seed: seed_at(2)?,
                }
            }
            "random" => {
                arity(2, 3)?;
                StateSpec::RandomDensity {
                    dims: parse_dims(params[0])?,
                    rank: parse_num(params[1], "rank")?,
                    seed: seed_at(2)?,
                }
            }
            other => return Err(Error::arg(format!("unknown state family '{other}'"))),
        };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        let unit = |x: f64, name: &str| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::arg(format!("{name} must lie in [0, 1], got {x}")))
            }
        };
        let dims_ok = |dims: &[usize]| {
            if dims.is_empty() || dims.contains(&0) {
                Err(Error::arg(format!("invalid subsystem dimensions {dims:?}")))
            } else {
                Ok(())
            }
        };
        match self {
            StateSpec::Bell(_) => Ok(()),
            StateSpec::Ghz(n) | StateSpec::W(n) if *n == 0 => Err(Error::arg("need at least one qubit")),
            StateSpec::Ghz(n) | StateSpec::W(n) if *n > 12 => {
                Err(Error::Size(format!("{n} qubits exceed the 12-qubit generator limit")))
            }
            StateSpec::Ghz(_) | StateSpec::W(_) => Ok(()),
            StateSpec::Werner(p) => unit(*p, "p"),
            StateSpec::Isotropic { dim, fidelity } => {
                if *dim < 2 {
                    return Err(Error::arg("isotropic states need local dimension ≥ 2"));
                }
                unit(*fidelity, "F")
            }
            StateSpec::Horodecki3x3(a) => unit(*a, "a"),
            StateSpec::Horodecki2x4(b) => unit(*b, "b"),
            StateSpec::MaxMixed(dims) | StateSpec::ProductRandom { dims, .. } => dims_ok(dims),
            StateSpec::SeparableMixture { dims, terms, .. } => {
                dims_ok(dims)?;
                if *terms == 0 {
                    return Err(Error::arg("a mixture needs at least one term"));
                }
                Ok(())
            }
            StateSpec::RandomDensity { dims, rank, .. } => {
                dims_ok(dims)?;
                let side: usize = dims.iter().product();
                if *rank == 0 || *rank > side {
                    return Err(Error::arg(format!("rank must lie in 1..={side}, got {rank}")));
                }
                Ok(())
            }
        }
    }

    pub fn generate(&self) -> Result<DensityMatrix> {
        self.check()?;
        match self {
            StateSpec::Bell(which) => bell(*which),
            StateSpec::Ghz(n) => ghz(*n),
            StateSpec::W(n) => w_state(*n),
            StateSpec::Werner(p) => werner(*p),
            StateSpec::Isotropic { dim, fidelity } => isotropic(*dim, *fidelity),
            StateSpec::Horodecki3x3(a) => horodecki_3x3(*a),
            StateSpec::Horodecki2x4(b) => horodecki_2x4(*b),
            StateSpec::MaxMixed(dims) => DensityMatrix::maximally_mixed(dims.clone()),
            StateSpec::ProductRandom { dims, seed } => random_pure_product(dims, &mut ChaCha8Rng::seed_from_u64(*seed)),
            StateSpec::SeparableMixture { dims, terms, seed } => separable_mixture(dims, *terms, *seed),
            StateSpec::RandomDensity { dims, rank, seed } => random_density(dims, *rank, *seed),
        }
    }
}

impl std::str::FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with_seed(s, 0)
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Bell(b) => write!(
                f,
                "bell:{}",
                match b {
                    BellState::PsiMinus => "psi-",
                    BellState::PsiPlus => "psi+",
                    BellState::PhiMinus => "phi-",
                    BellState::PhiPlus => "phi+",
                }
            ),
            StateSpec::Ghz(n) => write!(f, "ghz:{n}"),
            StateSpec::W(n) => write!(f, "w:{n}"),
            StateSpec::Werner(p) => write!(f, "werner:{p}"),
            StateSpec::Isotropic { dim, fidelity } => write!(f, "isotropic:{dim},{fidelity}"),
            StateSpec::Horodecki3x3(a) => write!(f, "horodecki3x3:{a}"),
            StateSpec::Horodecki2x4(b) => write!(f, "horodecki2x4:{b}"),
            StateSpec::MaxMixed(dims) => write!(f, "maxmixed:{}", fmt_dims(dims)),
            StateSpec::ProductRandom { dims, seed } => write!(f, "product:{},{seed}", fmt_dims(dims)),
            StateSpec::SeparableMixture { dims, terms, seed } => {
                write!(f, "separable:{},{terms},{seed}", fmt_dims(dims))
            }
            StateSpec::RandomDensity { dims, rank, seed } => {
                write!(f, "random:{},{rank},{seed}", fmt_dims(dims))
            }
        }
    }
}

/// A state family with exactly one free real parameter, used by threshold sweeps.
///
/// Text form is the family's spec with the real parameter left out:
/// `werner`, `isotropic:D`, `horodecki3x3`, `horodecki2x4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamFamily {
    Werner,
    Isotropic(usize),
    Horodecki3x3,
    Horodecki2x4,
}

impl ParamFamily {
    pub fn at(&self, x: f64) -> StateSpec {
        match *self {
            ParamFamily::Werner => StateSpec::Werner(x),
            ParamFamily::Isotropic(dim) => StateSpec::Isotropic { dim, fidelity: x },
            ParamFamily::Horodecki3x3 => StateSpec::Horodecki3x3(x),
            ParamFamily::Horodecki2x4 => StateSpec::Horodecki2x4(x),
        }
    }

    pub fn parameter_name(&self) -> &'static str {
        match self {
            ParamFamily::Werner => "p",
            ParamFamily::Isotropic(_) => "F",
            ParamFamily::Horodecki3x3 => "a",
            ParamFamily::Horodecki2x4 => "b",
        }
    }
}

impl std::str::FromStr for ParamFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let fam = match (family.to_ascii_lowercase().as_str(), rest.trim()) {
            ("werner", "") => ParamFamily::Werner,
            ("horodecki3x3", "") => ParamFamily::Horodecki3x3,
            ("horodecki2x4", "") => ParamFamily::Horodecki2x4,
            ("isotropic", d) if !d.is_empty() && !d.contains(',') => {
                let dim = parse_num(d, "local dimension")?;
                if dim < 2 {
                    return Err(Error::arg("isotropic states need local dimension ≥ 2"));
                }
                ParamFamily::Isotropic(dim)
            }
            _ => {
                return Err(Error::arg(format!(
                    "'{s}' is not a one-parameter family; use werner, isotropic:D, horodecki3x3 or horodecki2x4"
                )))
            }
        };
        Ok(fam)
    }
}

impl fmt::Display for ParamFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamFamily::Werner => write!(f, "werner"),
            ParamFamily::Isotropic(d) => write!(f, "isotropic:{d}"),
            ParamFamily::Horodecki3x3 => write!(f, "horodecki3x3"),
            ParamFamily::Horodecki2x4 => write!(f, "horodecki2x4"),
        }
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn bell_vector(which: BellState) -> [Complex64; 4] {
    let h = real(FRAC_1_SQRT_2);
    match which {
        BellState::PsiMinus => [ZERO, h, -h, ZERO],
        BellState::PsiPlus => [ZERO, h, h, ZERO],
        BellState::PhiMinus => [h, ZERO, ZERO, -h],
        BellState::PhiPlus => [h, ZERO, ZERO, h],
    }
}

pub fn bell(which: BellState) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(&bell_vector(which), vec![2, 2])
}

pub fn ghz(n: usize) -> Result<DensityMatrix> {
    let side = 1usize << n;
    let mut psi = vec![ZERO; side];
    psi[0] = ONE;
    psi[side - 1] = ONE;
    DensityMatrix::from_pure(&psi, vec![2; n])
}

pub fn w_state(n: usize) -> Result<DensityMatrix> {
    let side = 1usize << n;
    let mut psi = vec![ZERO; side];
    for k in 0..n {
        psi[1 << k] = ONE;
    }
    DensityMatrix::from_pure(&psi, vec![2; n])
}

/// `p·|ψ⁻⟩⟨ψ⁻| + (1−p)·I/4`.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    let singlet = bell(BellState::PsiMinus)?;
    let noise = DensityMatrix::maximally_mixed(vec![2, 2])?;
    mix(&[singlet, noise], &[p, 1.0 - p])
}

/// `F·|Φ⁺⟩⟨Φ⁺| + (1−F)/(d²−1)·(I − |Φ⁺⟩⟨Φ⁺|)` on `d × d`.
pub fn isotropic(dim: usize, fidelity: f64) -> Result<DensityMatrix> {
    let side = dim * dim;
    let amp = real(1.0 / (dim as f64).sqrt());
    let mut phi = vec![ZERO; side];
    for i in 0..dim {
        phi[i * dim + i] = amp;
    }
    let phi = ComplexMatrix::column(phi)?;
    let proj = ComplexMatrix::outer(&phi, &phi)?;
    let rest = ComplexMatrix::identity(side)?.sub(&proj)?;
    let m = proj.scale_real(fidelity).add(&rest.scale_real((1.0 - fidelity) / (side as f64 - 1.0)))?;
    DensityMatrix::normalized(m, vec![dim, dim], &Default::default())
}

/// Bound entangled 3×3 family, entangled and PPT for `0 < a < 1`.
pub fn horodecki_3x3(a: f64) -> Result<DensityMatrix> {
    let mut m = [[0.0f64; 9]; 9];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = a;
    }
    for &i in &[0, 4, 8] {
        for &j in &[0, 4, 8] {
            m[i][j] = a;
        }
    }
    let s = (1.0 - a * a).sqrt() / 2.0;
    m[6][6] = (1.0 + a) / 2.0;
    m[8][8] = (1.0 + a) / 2.0;
    m[6][8] = s;
    m[8][6] = s;
    let norm = 8.0 * a + 1.0;
    let flat: Vec<f64> = m.iter().flatten().map(|x| x / norm).collect();
    DensityMatrix::new(ComplexMatrix::from_real(9, 9, &flat)?, vec![3, 3])
}

/// Bound entangled 2×4 family, entangled and PPT for `0 < b < 1`.
pub fn horodecki_2x4(b: f64) -> Result<DensityMatrix> {
    let mut m = [[0.0f64; 8]; 8];
    for i in 0..3 {
        m[i][i] = b;
        m[i][i + 5] = b;
        m[i + 5][i] = b;
        m[i + 5][i + 5] = b;
    }
    let s = (1.0 - b * b).sqrt() / 2.0;
    m[3][3] = b;
    m[4][4] = (1.0 + b) / 2.0;
    m[7][7] = (1.0 + b) / 2.0;
    m[4][7] = s;
    m[7][4] = s;
    let norm = 7.0 * b + 1.0;
    let flat: Vec<f64> = m.iter().flatten().map(|x| x / norm).collect();
    DensityMatrix::new(ComplexMatrix::from_real(8, 8, &flat)?, vec![2, 4])
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, data)
}

fn random_unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    let g = gaussian_matrix(dim, 1, rng)?;
    let norm = g.frobenius_norm();
    Ok(g.scale_real(1.0 / norm))
}

fn random_pure_product(dims: &[usize], rng: &mut ChaCha8Rng) -> Result<DensityMatrix> {
    let mut acc: Option<ComplexMatrix> = None;
    for &d in dims {
        let u = random_unit_vector(d, rng)?;
        let p = ComplexMatrix::outer(&u, &u)?;
        acc = Some(match acc {
            None => p,
            Some(a) => a.kron(&p)?,
        });
    }
    let m = acc.ok_or_else(|| Error::arg("no subsystems"))?;
    DensityMatrix::normalized(m, dims.to_vec(), &Default::default())
}

/// Convex mixture of `terms` random pure product states with random weights.
fn separable_mixture(dims: &[usize], terms: usize, seed: u64) -> Result<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let states = (0..terms).map(|_| random_pure_product(dims, &mut rng)).collect::<Result<Vec<_>>>()?;
    mix(&states, &probs)
}

/// `G G† / tr(G G†)` with `G` a seeded `D × rank` complex Gaussian matrix.
pub fn random_density(dims: &[usize], rank: usize, seed: u64) -> Result<DensityMatrix> {
    let side: usize = dims.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(side, rank, &mut rng)?;
    let m = g.matmul(&g.adjoint())?;
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr), dims.to_vec())
}

/// Random unitary from the QR decomposition of a complex Gaussian matrix,
/// with `R`'s diagonal phases moved into `Q`.
pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    Ok(gaussian_matrix(dim, dim, rng)?.phase_fixed_q())
}

/// `U_1 ⊗ ⋯ ⊗ U_n` with independently drawn unitaries per subsystem.
pub fn random_local_unitary(dims: &[usize], seed: u64) -> Result<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = ComplexMatrix::identity(1)?;
    for &d in dims {
        acc = acc.kron(&random_unitary(d, &mut rng)?)?;
    }
    Ok(acc)
}

/// Convex combination `Σ p_i ρ_i`.
pub fn mix(states: &[DensityMatrix], probs: &[f64]) -> Result<DensityMatrix> {
    if states.is_empty() || states.len() != probs.len() {
        return Err(Error::arg(format!(
            "need one probability per state, got {} states and {} probabilities",
            states.len(),
            probs.len()
        )));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::arg(format!("probabilities must be non-negative, got {p}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::arg(format!("probabilities sum to {total}, expected 1")));
    }
    let dims = states[0].dims();
    if let Some(s) = states.iter().find(|s| s.dims() != dims) {
        return Err(Error::Shape(format!("cannot mix states with dimensions {dims:?} and {:?}", s.dims())));
    }
    let mut acc = states[0].matrix().scale_real(probs[0]);
    for (s, &p) in states.iter().zip(probs).skip(1) {
        acc = acc.add(&s.matrix().scale_real(p))?;
    }
    DensityMatrix::new(acc, dims.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Tolerances;

    #[test]
    fn spec_text_round_trips() {
        for text in [
            "bell:psi-",
            "bell:phi+",
            "ghz:3",
            "w:4",
            "werner:0.2",
            "isotropic:3,0.5",
            "horodecki3x3:0.25",
            "horodecki2x4:0.5",
            "maxmixed:2x3",
            "product:2x2,7",
            "separable:2x2x2,5,11",
            "random:2x3,4,9",
        ] {
            let spec: StateSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
    }

    #[test]
    fn seeds_default_when_missing() {
        let spec = StateSpec::parse_with_seed("product:2x2", 42).unwrap();
        assert_eq!(spec, StateSpec::ProductRandom { dims: vec![2, 2], seed: 42 });
    }

    #[test]
    fn bad_specs_are_rejected() {
        for text in [
            "bell:xyz",
            "werner:1.5",
            "werner",
            "ghz:0",
            "isotropic:1,0.5",
            "random:2x2,5",
            "maxmixed:2x0",
            "nope:1",
            "separable:2x2,0",
            "horodecki2x4:-0.1",
        ] {
            assert!(text.parse::<StateSpec>().is_err(), "{text} should fail");
        }
    }

    #[test]
    fn werner_endpoints() {
        let w1 = werner(1.0).unwrap();
        let singlet = bell(BellState::PsiMinus).unwrap();
        assert!(w1.matrix().max_abs_diff(singlet.matrix()).unwrap() < 1e-15);
        let w0 = werner(0.0).unwrap();
        let mm = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        assert!(w0.matrix().max_abs_diff(mm.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn all_zoo_states_are_valid() {
        let tol = Tolerances::default();
        for text in [
            "bell:psi-",
            "bell:psi+",
            "bell:phi-",
            "bell:phi+",
            "ghz:3",
            "w:3",
            "werner:0.7",
            "isotropic:3,0.2",
            "isotropic:4,0.9",
            "horodecki3x3:0.5",
            "horodecki2x4:0.3",
            "maxmixed:3x2",
            "product:2x3,1",
            "separable:2x2x2,6,2",
            "random:3x3,2,5",
        ] {
            let rho = text.parse::<StateSpec>().unwrap().generate().unwrap();
            rho.validate_psd(&tol).unwrap_or_else(|e| panic!("{text}: {e}"));
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let spec: StateSpec = "random:2x3,3,17".parse().unwrap();
        assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
        let other: StateSpec = "random:2x3,3,18".parse().unwrap();
        assert_ne!(spec.generate().unwrap(), other.generate().unwrap());
    }

    #[test]
    fn random_density_rank() {
        let rho = random_density(&[2, 2], 1, 3).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        let eig = rho.matrix().hermitian_eigenvalues().unwrap();
        let nonzero = eig.iter().filter(|&&x| x > 1e-12).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn local_unitaries_are_unitary() {
        for seed in 0..20 {
            let u = random_local_unitary(&[2, 3], seed).unwrap();
            let gram = u.adjoint().matmul(&u).unwrap();
            let err = gram.max_abs_diff(&ComplexMatrix::identity(6).unwrap()).unwrap();
            assert!(err <= 1e-12, "seed {seed}: {err}");
        }
        let phase = random_local_unitary(&[1], 5).unwrap();
        assert_eq!(phase.shape(), (1, 1));
        assert!((phase.get(0, 0).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mix_checks_inputs() {
        let a = bell(BellState::PsiMinus).unwrap();
        let b = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        let c = DensityMatrix::maximally_mixed(vec![4]).unwrap();
        assert_eq!(mix(std::slice::from_ref(&a), &[1.0]).unwrap(), a);
        assert!(mix(&[a.clone(), b.clone()], &[0.5, 0.6]).is_err());
        assert!(mix(&[a.clone(), b.clone()], &[1.5, -0.5]).is_err());
        assert!(mix(&[a.clone(), c], &[0.5, 0.5]).is_err());
        assert!(mix(&[a.clone(), b.clone()], &[1.0]).is_err());
        let w = mix(&[a, b], &[0.3, 0.7]).unwrap();
        assert!(w.matrix().max_abs_diff(werner(0.3).unwrap().matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn param_families_parse() {
        assert_eq!("werner".parse::<ParamFamily>().unwrap(), ParamFamily::Werner);
        assert_eq!("isotropic:3".parse::<ParamFamily>().unwrap(), ParamFamily::Isotropic(3));
        assert!("isotropic".parse::<ParamFamily>().is_err());
        assert!("werner:0.3".parse::<ParamFamily>().is_err());
        assert!("ghz".parse::<ParamFamily>().is_err());
        assert_eq!(ParamFamily::Isotropic(3).at(0.5).to_string(), "isotropic:3,0.5");
    }
}
