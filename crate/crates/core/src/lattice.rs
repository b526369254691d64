//! Finitely supported functions on `Z^d` and the discrete difference operators.
//!
//! The Laplacian uses the positive sign convention
//! `Δu(n) = Σ_j (2u(n) - u(n - e_j) - u(n + e_j))`, and `D_j u(n) = u(n) - u(n - e_j)`.
//! Storage is a hash map; every reduction walks the support in lexicographic
//! order so sums are reproducible bit for bit.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::index::MultiIndex;

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeFunction {
    dim: usize,
    values: HashMap<MultiIndex, f64>,
}

impl LatticeFunction {
    /// The zero function on `Z^dim`.
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "lattice dimension must be positive");
        LatticeFunction {
            dim,
            values: HashMap::new(),
        }
    }

    /// Kronecker delta at `n`.
    pub fn delta(n: MultiIndex) -> Self {
        let mut u = Self::zero(n.dim());
        u.set(n, 1.0);
        u
    }

    pub fn from_entries(
        dim: usize,
        entries: impl IntoIterator<Item = (MultiIndex, f64)>,
    ) -> Result<Self> {
        let mut u = Self::zero(dim);
        for (n, v) in entries {
            if n.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: n.dim(),
                });
            }
            u.add_at(n, v);
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: &MultiIndex) -> f64 {
        self.values.get(n).copied().unwrap_or(0.0)
    }

    /// Overwrites the value at `n`; an exact zero removes the entry.
    pub fn set(&mut self, n: MultiIndex, value: f64) {
        debug_assert_eq!(n.dim(), self.dim);
        if value == 0.0 {
            self.values.remove(&n);
        } else {
            self.values.insert(n, value);
        }
    }

    fn add_at(&mut self, n: MultiIndex, value: f64) {
        *self.values.entry(n).or_insert(0.0) += value;
    }

    fn prune(mut self) -> Self {
        self.values.retain(|_, v| *v != 0.0);
        self
    }

    /// Support entries in lexicographic order.
    pub fn entries(&self) -> Vec<(&MultiIndex, f64)> {
        let mut e: Vec<_> = self.values.iter().map(|(n, &v)| (n, v)).collect();
        e.sort_unstable_by(|a, b| a.0.cmp(b.0));
        e
    }

    /// Largest `ℓ∞` norm over the support (0 for the zero function).
    pub fn support_radius(&self) -> u32 {
        self.values.keys().map(MultiIndex::linf_norm).max().unwrap_or(0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        LatticeFunction {
            dim: self.dim,
            values: self.values.iter().map(|(n, &v)| (n.clone(), v * factor)).collect(),
        }
        .prune()
    }

    /// `n ↦ u(n - shift)`.
    pub fn translated(&self, shift: &MultiIndex) -> Self {
        LatticeFunction {
            dim: self.dim,
            values: self.values.iter().map(|(n, &v)| (n.add(shift), v)).collect(),
        }
    }

    pub fn sum(&self, other: &LatticeFunction) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (n, v) in other.entries() {
            out.add_at(n.clone(), v);
        }
        Ok(out.prune())
    }

    fn check_dim(&self, other: &LatticeFunction) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// `⟨u, v⟩ = Σ_n u(n) v(n)`.
    pub fn inner(&self, other: &LatticeFunction) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .entries()
            .into_iter()
            .map(|(n, v)| v * other.get(n))
            .sum())
    }

    /// `Σ_n |u(n)|²`.
    pub fn norm_sq(&self) -> f64 {
        self.entries().into_iter().map(|(_, v)| v * v).sum()
    }

    /// Backward difference `D_axis u(n) = u(n) - u(n - e_axis)` (0-based axis).
    pub fn backward_difference(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim,
            });
        }
        let mut out = Self::zero(self.dim);
        for (n, v) in self.entries() {
            out.add_at(n.clone(), v);
            out.add_at(n.shifted(axis, 1), -v);
        }
        Ok(out.prune())
    }

    /// Positive discrete Laplacian.
    pub fn laplacian(&self) -> Self {
        let two_d = 2.0 * self.dim as f64;
        let mut out = Self::zero(self.dim);
        for (n, v) in self.entries() {
            out.add_at(n.clone(), two_d * v);
            for axis in 0..self.dim {
                out.add_at(n.shifted(axis, -1), -v);
                out.add_at(n.shifted(axis, 1), -v);
            }
        }
        out.prune()
    }

    /// `Δ^k u`; `k = 0` is the identity.
    pub fn laplacian_power(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |u, _| u.laplacian())
    }

    /// `Σ_n Σ_j |D_j(Δ^k u)(n)|²`.
    pub fn dirichlet_form(&self, k: u32) -> f64 {
        let w = self.laplacian_power(k);
        (0..self.dim)
            .map(|axis| {
                w.backward_difference(axis)
                    .expect("axis is in range")
                    .norm_sq()
            })
            .sum()
    }

    /// `Σ_n |Δ^k u(n)|²`.
    pub fn rellich_form(&self, k: u32) -> f64 {
        self.laplacian_power(k).norm_sq()
    }

    /// `Σ_{n≠0} |u(n)|² / |n|^s` with `|n|` the Euclidean norm.
    ///
    /// For `s > 0` the function must vanish at the origin.
    pub fn weighted_norm_sq(&self, s: u32) -> Result<f64> {
        if s > 0 && self.get(&MultiIndex::origin(self.dim)) != 0.0 {
            return Err(Error::Precondition(
                "u(0) must vanish when the weight |n|^-s is singular".into(),
            ));
        }
        Ok(self
            .entries()
            .into_iter()
            .filter(|(n, _)| s == 0 || !n.is_origin())
            .map(|(n, v)| v * v / norm_power(n, s))
            .sum())
    }

    /// Writes the text exchange format: a `dim d` header followed by one
    /// `n_1 … n_d value` record per support point.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "dim {}", self.dim)?;
        for (n, v) in self.entries() {
            writeln!(out, "{n} {v:?}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut dim = None;
        let mut u: Option<LatticeFunction> = None;
        for (i, line) in input.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let mut fields = line.split_whitespace();
            match dim {
                None => {
                    if fields.next() != Some("dim") {
                        return Err(parse_err("expected header `dim d`".into()));
                    }
                    let d: usize = fields
                        .next()
                        .ok_or_else(|| parse_err("missing dimension".into()))?
                        .parse()
                        .map_err(|e| parse_err(format!("bad dimension: {e}")))?;
                    if d == 0 || fields.next().is_some() {
                        return Err(parse_err("malformed header".into()));
                    }
                    dim = Some(d);
                    u = Some(Self::zero(d));
                }
                Some(d) => {
                    let tokens: Vec<&str> = fields.collect();
                    if tokens.len() != d + 1 {
                        return Err(parse_err(format!(
                            "expected {} fields, found {}",
                            d + 1,
                            tokens.len()
                        )));
                    }
                    let coords = tokens[..d]
                        .iter()
                        .map(|t| t.parse::<i32>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| parse_err(format!("bad coordinate: {e}")))?;
                    let value: f64 = tokens[d]
                        .parse()
                        .map_err(|e| parse_err(format!("bad value: {e}")))?;
                    if !value.is_finite() {
                        return Err(parse_err("value must be finite".into()));
                    }
                    let u = u.as_mut().expect("initialised with header");
                    let n = MultiIndex::from(coords);
                    if u.values.contains_key(&n) {
                        return Err(parse_err(format!("duplicate point {n}")));
                    }
                    u.set(n, value);
                }
            }
        }
        u.ok_or(Error::Parse {
            line: 0,
            message: "empty input".into(),
        })
    }
}

/// `|n|^s` computed from the exact integer `|n|²`.
pub(crate) fn norm_power(n: &MultiIndex, s: u32) -> f64 {
    let r2 = n.norm_sq() as f64;
    if s % 2 == 0 {
        r2.powi((s / 2) as i32)
    } else {
        r2.powi((s / 2) as i32) * r2.sqrt()
    }
}

/// Indicator of the `2d` unit vectors `±e_j`: the test function giving the
/// upper bounds `4^{2k+1} d^{2k+1}` and `4^{2k} d^{2k}`.
pub fn unit_shell_indicator(dim: usize) -> LatticeFunction {
    let mut u = LatticeFunction::zero(dim);
    for axis in 0..dim {
        let e = MultiIndex::unit(dim, axis);
        u.set(e.neg(), 1.0);
        u.set(e, 1.0);
    }
    u
}

/// Values uniform in `[-1, 1]` on the cube of `ℓ∞` radius `radius`, deterministic in `seed`;
/// the origin is left at zero when `vanish_at_origin` is set.
pub fn random_lattice_function(dim: usize, radius: u32, seed: u64, vanish_at_origin: bool) -> LatticeFunction {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut u = LatticeFunction::zero(dim);
    for n in crate::index::cube_points(dim, radius) {
        let v: f64 = rng.gen_range(-1.0..=1.0);
        if !(vanish_at_origin && n.is_origin()) {
            u.set(n, v);
        }
    }
    u
}
