//! Causal maps of Minkowski space: affine maps `x -> A x + b` preserving the
//! causal order `x <= y <=> y - x in C`, and their factorization into a
//! dilation, an orthochronous Lorentz transformation and a translation.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::lorentz::{self, ConeRegion, LorentzFrame};
use crate::sampling::{self, SeededRng};

/// Relative band used when deciding cone membership of sampled differences.
pub const SAMPLE_BAND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    linear: DMatrix<f64>,
    translation: Vec<f64>,
}

impl AffineMap {
    pub fn new(linear: DMatrix<f64>, translation: Vec<f64>) -> Result<Self> {
        if !linear.is_square() {
            return Err(Error::Input("linear part must be square".into()));
        }
        Error::check_len(linear.nrows(), translation.len())?;
        Ok(AffineMap { linear, translation })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            linear: DMatrix::identity(n, n),
            translation: vec![0.0; n],
        }
    }

    pub fn linear_only(linear: DMatrix<f64>) -> Result<Self> {
        let n = linear.nrows();
        Self::new(linear, vec![0.0; n])
    }

    pub fn translation_only(v: Vec<f64>) -> Self {
        AffineMap {
            linear: DMatrix::identity(v.len(), v.len()),
            translation: v,
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        linalg::add(&linalg::mat_vec(&self.linear, x), &self.translation)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &self.linear * &inner.linear,
            translation: self.apply(&inner.translation),
        }
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let inv = self
            .linear
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Input("linear part is singular".into()))?;
        let t = linalg::scale(&linalg::mat_vec(&inv, &self.translation), -1.0);
        Ok(AffineMap {
            linear: inv,
            translation: t,
        })
    }

    fn is_invertible(&self) -> bool {
        let svd = self.linear.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        smax > 0.0 && smin > 1e-13 * smax
    }
}

fn check_dim(f: &AffineMap, q: usize) -> Result<()> {
    Error::check_len(q + 1, f.dim())
}

fn in_cone(v: &[f64], scale: f64) -> bool {
    lorentz::classify_unchecked(v, SAMPLE_BAND * scale).in_closed_cone()
}

fn in_open_cone(v: &[f64], scale: f64) -> bool {
    lorentz::classify_unchecked(v, SAMPLE_BAND * scale) == ConeRegion::Interior
}

/// A sampled pair `(x, y)`: `x` in a box, `y - x` near the light cone,
/// exactly null, or generic.
fn sample_pair(rng: &mut SeededRng, q: usize) -> (Vec<f64>, Vec<f64>) {
    let x: Vec<f64> = (0..=q).map(|_| rng.random_range(-1.0..1.0)).collect();
    let kind: f64 = rng.random();
    let mut d = if kind < 0.2 {
        sampling::null_vector(rng, q)
    } else if kind < 0.6 {
        let mut v = sampling::null_vector(rng, q);
        v[0] *= 1.0 + rng.random_range(-0.3..0.3);
        v
    } else {
        sampling::gaussian(rng, q + 1)
    };
    if rng.random::<bool>() {
        d = linalg::scale(&d, -1.0);
    }
    let y = linalg::add(&x, &d);
    (x, y)
}

fn pair_scale(a: &[f64], b: &[f64]) -> f64 {
    1.0 + linalg::max_abs(a) + linalg::max_abs(b)
}

/// A sampled pair on which `f` fails to preserve the causal order in
/// either direction, if any is found among `samples` draws.
pub fn causal_counterexample(
    f: &AffineMap,
    q: usize,
    samples: usize,
    seed: u64,
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    check_dim(f, q)?;
    if !f.is_invertible() {
        return Err(Error::Input("a causal map must have an invertible linear part".into()));
    }
    let mut rng = sampling::rng(seed);
    for _ in 0..samples {
        let (x, y) = sample_pair(&mut rng, q);
        let (fx, fy) = (f.apply(&x), f.apply(&y));
        let before = in_cone(&linalg::sub(&y, &x), pair_scale(&x, &y));
        let after = in_cone(&linalg::sub(&fy, &fx), pair_scale(&fx, &fy));
        if before != after {
            return Ok(Some((x, y)));
        }
    }
    Ok(None)
}

/// Monte Carlo verdict on `(y - x in C) <=> (f(y) - f(x) in C)`.
pub fn is_causal_map(f: &AffineMap, q: usize, samples: usize, seed: u64) -> Result<bool> {
    Ok(causal_counterexample(f, q, samples, seed)?.is_none())
}

/// Same sampling as [`is_causal_map`] with the open cone in both places.
pub fn preserves_open_order(f: &AffineMap, q: usize, samples: usize, seed: u64) -> Result<bool> {
    check_dim(f, q)?;
    let mut rng = sampling::rng(seed);
    for _ in 0..samples {
        let (x, y) = sample_pair(&mut rng, q);
        let (fx, fy) = (f.apply(&x), f.apply(&y));
        let d = linalg::sub(&y, &x);
        let fd = linalg::sub(&fy, &fx);
        // Pairs inside the band are undecidable for the open order.
        let band = SAMPLE_BAND * pair_scale(&x, &y);
        if lorentz::classify_unchecked(&d, band) == ConeRegion::Boundary {
            continue;
        }
        if in_open_cone(&d, pair_scale(&x, &y)) != in_open_cone(&fd, pair_scale(&fx, &fy)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Does `A` map sampled boundary and interior rays of the cone into the
/// closed cone? Tests `A(C) ⊆ C`.
pub fn is_cone_endomorphism(a: &DMatrix<f64>, q: usize, rays: usize, seed: u64, tol: f64) -> Result<bool> {
    Error::check_len(q + 1, a.nrows())?;
    Error::check_len(q + 1, a.ncols())?;
    let mut rng = sampling::rng(seed);
    for k in 0..rays {
        let r = if k % 2 == 0 {
            sampling::null_vector(&mut rng, q)
        } else {
            sampling::interior_vector(&mut rng, q)
        };
        let img = linalg::mat_vec(a, &r);
        let band = tol * (1.0 + linalg::max_abs(&img));
        if !lorentz::classify_unchecked(&img, band).in_closed_cone() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `f(x) = lambda * lorentz * x + translation`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeemanFactors {
    pub lambda: f64,
    pub lorentz: DMatrix<f64>,
    pub translation: Vec<f64>,
    pub orthochronous: bool,
}

impl ZeemanFactors {
    pub fn to_map(&self) -> AffineMap {
        AffineMap {
            linear: &self.lorentz * self.lambda,
            translation: self.translation.clone(),
        }
    }
}

/// Factor a causal affine map. `tol` bounds the deviation of `A^T eta A`
/// from `c * eta`, relative to the rounding scale `max(|A|^T |A|)`.
pub fn zeeman_decompose(f: &AffineMap, q: usize, tol: f64) -> Result<ZeemanFactors> {
    check_dim(f, q)?;
    if !f.is_invertible() {
        return Err(Error::Input("linear part is singular".into()));
    }
    let frame = LorentzFrame::minkowski(q)?;
    let eta = frame.eta();
    let a = &f.linear;
    let s = a.transpose() * &eta * a;
    let abs = a.abs();
    let scale = (abs.transpose() * &abs).max();
    let n = q + 1;
    let c = (0..n).map(|i| eta[(i, i)] * s[(i, i)]).sum::<f64>() / n as f64;
    let dev = linalg::max_abs_diff(&s, &(&eta * c));
    if dev > tol * scale {
        return Err(Error::NotCausal(format!(
            "A^T eta A deviates from c*eta by {dev:e} (scale {scale:e})"
        )));
    }
    if c <= tol * scale {
        return Err(Error::NotCausal(format!("A^T eta A = c*eta with c = {c:e} <= 0")));
    }
    let lambda = c.sqrt();
    let lorentz = a / lambda;
    if lorentz[(0, 0)] <= 0.0 {
        return Err(Error::Anticausal);
    }
    Ok(ZeemanFactors {
        lambda,
        lorentz,
        translation: f.translation.clone(),
        orthochronous: true,
    })
}

/// One generator of the causal group.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Boost { rapidity: f64, axis: usize },
    Rotation(DMatrix<f64>),
    Dilation(f64),
    Translation(Vec<f64>),
}

impl Generator {
    pub fn to_map(&self, q: usize) -> AffineMap {
        let n = q + 1;
        match self {
            Generator::Boost { rapidity, axis } => {
                AffineMap::linear_only(lorentz::boost(q, *rapidity, *axis).expect("sampled axis in range"))
                    .expect("square")
            }
            Generator::Rotation(r) => AffineMap::linear_only(lorentz::embed_rotation(r)).expect("square"),
            Generator::Dilation(l) => AffineMap::linear_only(DMatrix::identity(n, n) * *l).expect("square"),
            Generator::Translation(v) => AffineMap::translation_only(v.clone()),
        }
    }
}

/// Seeded word of generators: boosts with rapidity in `[-2, 2]`, spatial
/// rotations, dilations with factor in `[0.25, 4]` (log-uniform) and
/// translations in `[-1, 1]^n`.
pub fn random_causal_word(q: usize, word_length: usize, seed: u64) -> Result<Vec<Generator>> {
    if word_length == 0 {
        return Err(Error::Input("word length must be at least 1".into()));
    }
    if q == 0 {
        return Err(Error::Input("q must be positive".into()));
    }
    let mut rng = sampling::rng(seed);
    let word = (0..word_length)
        .map(|_| match rng.random_range(0..4) {
            0 => Generator::Boost {
                rapidity: rng.random_range(-2.0..=2.0),
                axis: rng.random_range(1..=q),
            },
            1 => Generator::Rotation(sampling::rotation(&mut rng, q)),
            2 => Generator::Dilation(rng.random_range(0.25f64.ln()..=4f64.ln()).exp()),
            _ => Generator::Translation((0..=q).map(|_| rng.random_range(-1.0..=1.0)).collect()),
        })
        .collect();
    Ok(word)
}

/// Compose a word left to right: `g_1 ∘ g_2 ∘ ... ∘ g_k`.
pub fn compose_word(q: usize, word: &[Generator]) -> AffineMap {
    word.iter()
        .fold(AffineMap::identity(q + 1), |acc, g| acc.compose(&g.to_map(q)))
}

pub fn random_causal_element(q: usize, word_length: usize, seed: u64) -> Result<AffineMap> {
    Ok(compose_word(q, &random_causal_word(q, word_length, seed)?))
}
