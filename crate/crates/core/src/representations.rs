//! Client-side encoders for the six input representations and the CRT
//! moduli-selection heuristics.

use serde::{Deserialize, Serialize};

use crate::error::{HeError, Result};

/// Bytes charged per uploaded slot when converting slot counts to bandwidth.
pub const BYTES_PER_SLOT: u64 = 8;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Smallest `k` with `2^k >= n`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Smallest integer `r` with `r * r >= q`.
pub fn ceil_sqrt(q: u64) -> u64 {
    let mut r = (q as f64).sqrt() as u64;
    while r * r < q {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= q {
        r -= 1;
    }
    r
}

// ---- categories -------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Category {
    Real(f64),
    Label(String),
}

/// Affine quantisation `phi(v) = scale * v + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub scale: f64,
    pub offset: f64,
}

impl Affine {
    pub fn apply(&self, v: f64) -> f64 {
        self.scale * v + self.offset
    }
}

/// Ordered categories `c` with an optional affine map onto consecutive integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMap {
    categories: Vec<Category>,
    affine: Option<Affine>,
}

impl ClassMap {
    pub fn new(categories: Vec<Category>) -> Result<Self> {
        for (i, c) in categories.iter().enumerate() {
            if categories[..i].contains(c) {
                return Err(HeError::InvalidParameter(format!("duplicate category {c:?}")));
            }
        }
        if categories.is_empty() {
            return Err(HeError::InvalidParameter("empty class map".into()));
        }
        Ok(ClassMap { categories, affine: None })
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Category::Real(v)).collect())
    }

    /// Attaches `phi`; it must send the categories, in order, onto
    /// consecutive integers.
    pub fn with_affine(mut self, affine: Affine) -> Result<Self> {
        let image = self
            .categories
            .iter()
            .map(|c| match c {
                Category::Real(v) => Ok(affine.apply(*v)),
                Category::Label(_) => Err(HeError::InvalidParameter("affine map needs real categories".into())),
            })
            .collect::<Result<Vec<f64>>>()?;
        let base = image[0].round();
        for (i, v) in image.iter().enumerate() {
            if (v - (base + i as f64)).abs() > 1e-9 {
                return Err(HeError::InvalidParameter(format!(
                    "affine map is not a bijection onto consecutive integers (category {i} -> {v})"
                )));
            }
        }
        self.affine = Some(affine);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.categories.len()
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn affine(&self) -> Option<Affine> {
        self.affine
    }

    /// Index of `c` in `[n]`.
    pub fn index_of(&self, c: &Category) -> Result<usize> {
        if let (Some(affine), Category::Real(v)) = (self.affine, c) {
            let base = match self.categories[0] {
                Category::Real(c0) => affine.apply(c0).round(),
                Category::Label(_) => unreachable!("checked in with_affine"),
            };
            let k = affine.apply(*v) - base;
            if (k - k.round()).abs() < 1e-9 && k.round() >= 0.0 && (k.round() as usize) < self.n() {
                return Ok(k.round() as usize);
            }
            return Err(HeError::UnknownCategory);
        }
        self.categories.iter().position(|x| x == c).ok_or(HeError::UnknownCategory)
    }

    /// Numeric class values used for dot products (`Real` categories only).
    pub fn real_values(&self) -> Option<Vec<f64>> {
        self.categories
            .iter()
            .map(|c| match c {
                Category::Real(v) => Some(*v),
                Category::Label(_) => None,
            })
            .collect()
    }
}

// ---- maps ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OneHotMap {
    bits: Vec<u8>,
}

impl OneHotMap {
    pub fn new(index: usize, n: usize) -> Result<Self> {
        if index >= n {
            return Err(HeError::OutOfRange { value: index, n });
        }
        let mut bits = vec![0; n];
        bits[index] = 1;
        Ok(OneHotMap { bits })
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) || bits.iter().filter(|&&b| b == 1).count() != 1 {
            return Err(HeError::InvalidParameter("not a one-hot map".into()));
        }
        Ok(OneHotMap { bits })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn hot_index(&self) -> usize {
        self.bits.iter().position(|&b| b == 1).expect("one-hot invariant")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `bits[i] = 1` iff `i > a`.
    Greater,
    /// `bits[i] = 1` iff `i < a`.
    Less,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreaterMap {
    pub bits: Vec<u8>,
    pub orientation: Orientation,
}

pub fn greater_map_of(a: usize, n: usize, orientation: Orientation) -> Result<GreaterMap> {
    if a >= n {
        return Err(HeError::OutOfRange { value: a, n });
    }
    let bits = (0..n)
        .map(|i| match orientation {
            Orientation::Greater => u8::from(i > a),
            Orientation::Less => u8::from(i < a),
        })
        .collect();
    Ok(GreaterMap { bits, orientation })
}

/// Binary decomposition, least-significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BinaryRep {
    bits: Vec<u8>,
}

impl BinaryRep {
    pub fn encode(a: u64, n: u64) -> Result<Self> {
        if a >= n {
            return Err(HeError::OutOfRange { value: a as usize, n: n as usize });
        }
        let width = ceil_log2(n);
        Ok(BinaryRep { bits: (0..width).map(|i| ((a >> i) & 1) as u8).collect() })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }
}

// ---- CRT ----------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrtBasis {
    moduli: Vec<u64>,
    m: u64,
    n: u64,
}

impl CrtBasis {
    pub fn new(moduli: Vec<u64>, n: u64) -> Result<Self> {
        if moduli.is_empty() || moduli.contains(&0) {
            return Err(HeError::InvalidParameter("moduli must be positive".into()));
        }
        for i in 0..moduli.len() {
            for j in i + 1..moduli.len() {
                if gcd(moduli[i], moduli[j]) != 1 {
                    return Err(HeError::NotCoprime(moduli[i], moduli[j]));
                }
            }
        }
        let m = moduli
            .iter()
            .try_fold(1u64, |acc, &q| acc.checked_mul(q))
            .ok_or_else(|| HeError::InvalidParameter("moduli product overflows u64".into()))?;
        if m < n {
            return Err(HeError::BasisTooSmall { product: m, n });
        }
        Ok(CrtBasis { moduli, m, n })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Slot cost `r`, the sum of the moduli.
    pub fn slot_cost(&self) -> u64 {
        self.moduli.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrtRep {
    pub basis: CrtBasis,
    pub submaps: Vec<OneHotMap>,
}

impl CrtRep {
    pub fn encode(a: u64, basis: &CrtBasis) -> Result<Self> {
        if a >= basis.n {
            return Err(HeError::OutOfRange { value: a as usize, n: basis.n as usize });
        }
        let submaps = basis
            .moduli
            .iter()
            .map(|&q| OneHotMap::new((a % q) as usize, q as usize))
            .collect::<Result<_>>()?;
        Ok(CrtRep { basis: basis.clone(), submaps })
    }

    pub fn residues(&self) -> Vec<u64> {
        self.submaps.iter().map(|m| m.hot_index() as u64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "strategy")]
pub enum BasisStrategy {
    /// Every subset of the `ell` smallest primes.
    PrimeCombination { ell: usize },
    /// Every `m` in `[n, n + t]`, split into its prime-power factors.
    ScanRange { t: u64 },
}

impl Default for BasisStrategy {
    fn default() -> Self {
        BasisStrategy::PrimeCombination { ell: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSearch {
    pub basis: CrtBasis,
    /// Set when nothing beat the trivial single-modulus basis.
    pub fallback: bool,
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut c = 2u64;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

fn prime_power_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut pk = 1;
            while m.is_multiple_of(p) {
                m /= p;
                pk *= p;
            }
            out.push(pk);
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out.sort_unstable();
    out
}

/// Candidate ordering: smaller slot cost, then smaller product, then
/// lexicographically smaller moduli.
fn better(cand: &(u64, u64, Vec<u64>), best: &Option<(u64, u64, Vec<u64>)>) -> bool {
    match best {
        None => true,
        Some(b) => (cand.0, cand.1, &cand.2) < (b.0, b.1, &b.2),
    }
}

pub fn find_crt_basis(n: u64, strategy: BasisStrategy) -> Result<BasisSearch> {
    if n < 2 {
        return Err(HeError::InvalidParameter("n must be at least 2".into()));
    }
    let mut best: Option<(u64, u64, Vec<u64>)> = None;
    match strategy {
        BasisStrategy::PrimeCombination { ell } => {
            if ell == 0 || ell > 24 {
                return Err(HeError::InvalidParameter("ell must be in 1..=24".into()));
            }
            let primes = first_primes(ell);
            for mask in 1u32..(1 << ell) {
                let moduli: Vec<u64> =
                    (0..ell).filter(|i| mask & (1 << i) != 0).map(|i| primes[i]).collect();
                let Some(m) = moduli.iter().try_fold(1u64, |acc, &q| acc.checked_mul(q)) else {
                    continue;
                };
                if m < n {
                    continue;
                }
                let cand = (moduli.iter().sum(), m, moduli);
                if better(&cand, &best) {
                    best = Some(cand);
                }
            }
        }
        BasisStrategy::ScanRange { t } => {
            for m in n..=n.saturating_add(t) {
                let moduli = prime_power_factors(m);
                let cand = (moduli.iter().sum(), m, moduli);
                if better(&cand, &best) {
                    best = Some(cand);
                }
            }
        }
    }
    match best {
        Some((r, _, moduli)) if r < n => Ok(BasisSearch { basis: CrtBasis::new(moduli, n)?, fallback: false }),
        _ => Ok(BasisSearch { basis: CrtBasis::new(vec![n], n)?, fallback: true }),
    }
}

// ---- hierarchical CRT -----------------------------------------------------------

/// Modulus tree: a split node `q` has children `ceil(sqrt(q))` and
/// `ceil(sqrt(q)) + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierNode {
    pub modulus: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<HierNode>,
}

impl HierNode {
    fn split(q: u64, levels: u32) -> Result<HierNode> {
        if levels == 0 {
            return Ok(HierNode { modulus: q, children: Vec::new() });
        }
        let lo = ceil_sqrt(q);
        if lo + 1 >= q {
            return Err(HeError::HierarchyTooDeep(q));
        }
        Ok(HierNode { modulus: q, children: vec![Self::split(lo, levels - 1)?, Self::split(lo + 1, levels - 1)?] })
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Leaves from left to right.
    pub fn leaves(&self) -> Vec<u64> {
        if self.is_leaf() {
            vec![self.modulus]
        } else {
            self.children.iter().flat_map(|c| c.leaves()).collect()
        }
    }

    fn collect_levels(&self, depth: usize, out: &mut Vec<Vec<u64>>) {
        if out.len() <= depth {
            out.push(Vec::new());
        }
        out[depth].push(self.modulus);
        for c in &self.children {
            c.collect_levels(depth + 1, out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierBasis {
    pub n: u64,
    pub levels: u32,
    pub root: HierNode,
}

pub fn build_hier_basis(n: u64, levels: u32) -> Result<HierBasis> {
    if levels == 0 {
        return Err(HeError::InvalidParameter("levels must be at least 1".into()));
    }
    Ok(HierBasis { n, levels, root: HierNode::split(n, levels)? })
}

impl HierBasis {
    /// Moduli per level below the root, left to right.
    pub fn level_moduli(&self) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        self.root.collect_levels(0, &mut out);
        out.remove(0);
        out
    }

    /// Slot count `m_1, m_2, …` needed to send the maps of each level.
    pub fn level_costs(&self) -> Vec<u64> {
        self.level_moduli().iter().map(|l| l.iter().sum()).collect()
    }

    /// Slot cost of the leaf-level maps.
    pub fn slot_cost(&self) -> u64 {
        self.root.leaves().iter().sum()
    }

    pub fn leaf_count(&self) -> usize {
        self.root.leaves().len()
    }
}

/// Residue tree mirroring a [`HierBasis`]; every node stores the encoded value
/// reduced modulo its modulus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueNode {
    pub modulus: u64,
    pub residue: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ResidueNode>,
}

impl ResidueNode {
    fn build(value: u64, node: &HierNode) -> ResidueNode {
        let residue = value % node.modulus;
        ResidueNode {
            modulus: node.modulus,
            residue,
            children: node.children.iter().map(|c| ResidueNode::build(residue, c)).collect(),
        }
    }

    pub fn leaves(&self) -> Vec<&ResidueNode> {
        if self.children.is_empty() {
            vec![self]
        } else {
            self.children.iter().flat_map(|c| c.leaves()).collect()
        }
    }

    /// Node at the given child path (e.g. `[1, 1]` is `a_22`).
    pub fn at(&self, path: &[usize]) -> Option<&ResidueNode> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children.get(i)?.at(rest),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierCrtRep {
    pub basis: HierBasis,
    pub residues: ResidueNode,
    pub leaf_maps: Vec<OneHotMap>,
}

pub fn encode_hier(a: u64, basis: &HierBasis) -> Result<HierCrtRep> {
    if a >= basis.n {
        return Err(HeError::OutOfRange { value: a as usize, n: basis.n as usize });
    }
    let residues = ResidueNode::build(a, &basis.root);
    let leaf_maps = residues
        .leaves()
        .iter()
        .map(|l| OneHotMap::new(l.residue as usize, l.modulus as usize))
        .collect::<Result<_>>()?;
    Ok(HierCrtRep { basis: basis.clone(), residues, leaf_maps })
}

impl HierCrtRep {
    pub fn leaf_residues(&self) -> Vec<u64> {
        self.residues.leaves().iter().map(|l| l.residue).collect()
    }
}

// ---- the six kinds -------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepKind {
    OneHot,
    Numeric,
    Crt,
    HierCrt,
    NumericHierCrt,
    Binary,
}

impl RepKind {
    pub const ALL: [RepKind; 6] = [
        RepKind::OneHot,
        RepKind::Numeric,
        RepKind::Crt,
        RepKind::HierCrt,
        RepKind::NumericHierCrt,
        RepKind::Binary,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RepKind::OneHot => "one-hot",
            RepKind::Numeric => "numeric",
            RepKind::Crt => "crt",
            RepKind::HierCrt => "hier-crt",
            RepKind::NumericHierCrt => "numeric-hier-crt",
            RepKind::Binary => "binary",
        }
    }

    pub fn parse(s: &str) -> Result<RepKind> {
        RepKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HeError::InvalidParameter(format!("unknown representation '{s}'")))
    }
}

/// Bases needed by the CRT-style kinds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EncodeParams {
    pub crt: Option<CrtBasis>,
    pub hier: Option<HierBasis>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "payload")]
pub enum Encoded {
    OneHot(OneHotMap),
    Numeric(u64),
    Crt(CrtRep),
    HierCrt(HierCrtRep),
    NumericHierCrt(Vec<u64>),
    Binary(BinaryRep),
}

impl Encoded {
    pub fn kind(&self) -> RepKind {
        match self {
            Encoded::OneHot(_) => RepKind::OneHot,
            Encoded::Numeric(_) => RepKind::Numeric,
            Encoded::Crt(_) => RepKind::Crt,
            Encoded::HierCrt(_) => RepKind::HierCrt,
            Encoded::NumericHierCrt(_) => RepKind::NumericHierCrt,
            Encoded::Binary(_) => RepKind::Binary,
        }
    }

    /// Number of slots the client uploads.
    pub fn slot_cost(&self) -> u64 {
        match self {
            Encoded::OneHot(m) => m.len() as u64,
            Encoded::Numeric(_) => 1,
            Encoded::Crt(r) => r.basis.slot_cost(),
            Encoded::HierCrt(r) => r.basis.slot_cost(),
            Encoded::NumericHierCrt(v) => v.len() as u64,
            Encoded::Binary(b) => b.bits().len() as u64,
        }
    }

    pub fn bandwidth_bytes(&self) -> u64 {
        self.slot_cost() * BYTES_PER_SLOT
    }
}

fn need<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| HeError::InvalidParameter(format!("{what} basis required")))
}

/// Encodes `a in [n]` in the requested representation.
pub fn encode(a: u64, n: u64, kind: RepKind, params: &EncodeParams) -> Result<Encoded> {
    if a >= n {
        return Err(HeError::OutOfRange { value: a as usize, n: n as usize });
    }
    let check_n = |basis_n: u64| {
        if basis_n != n {
            Err(HeError::InvalidParameter(format!("basis built for n = {basis_n}, not {n}")))
        } else {
            Ok(())
        }
    };
    Ok(match kind {
        RepKind::OneHot => Encoded::OneHot(OneHotMap::new(a as usize, n as usize)?),
        RepKind::Numeric => Encoded::Numeric(a),
        RepKind::Crt => {
            let basis = need(&params.crt, "CRT")?;
            check_n(basis.n)?;
            Encoded::Crt(CrtRep::encode(a, basis)?)
        }
        RepKind::HierCrt => {
            let basis = need(&params.hier, "hierarchical")?;
            check_n(basis.n)?;
            Encoded::HierCrt(encode_hier(a, basis)?)
        }
        RepKind::NumericHierCrt => {
            let basis = need(&params.hier, "hierarchical")?;
            check_n(basis.n)?;
            Encoded::NumericHierCrt(encode_hier(a, basis)?.leaf_residues())
        }
        RepKind::Binary => Encoded::Binary(BinaryRep::encode(a, n)?),
    })
}

/// Slot cost of a representation without encoding a value.
pub fn slot_cost(n: u64, kind: RepKind, params: &EncodeParams) -> Result<u64> {
    Ok(match kind {
        RepKind::OneHot => n,
        RepKind::Numeric => 1,
        RepKind::Crt => need(&params.crt, "CRT")?.slot_cost(),
        RepKind::HierCrt => need(&params.hier, "hierarchical")?.slot_cost(),
        RepKind::NumericHierCrt => need(&params.hier, "hierarchical")?.leaf_count() as u64,
        RepKind::Binary => ceil_log2(n) as u64,
    })
}

/// Encodes a category through its class map.
pub fn encode_category(
    classes: &ClassMap,
    category: &Category,
    kind: RepKind,
    params: &EncodeParams,
) -> Result<Encoded> {
    let a = classes.index_of(category)?;
    encode(a as u64, classes.n() as u64, kind, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crt_example_submaps() {
        let basis = CrtBasis::new(vec![2, 3, 5], 30).unwrap();
        let rep = CrtRep::encode(17, &basis).unwrap();
        assert_eq!(rep.submaps[0].bits(), &[0, 1]);
        assert_eq!(rep.submaps[1].bits(), &[0, 0, 1]);
        assert_eq!(rep.submaps[2].bits(), &[0, 0, 1, 0, 0]);
        assert_eq!(basis.slot_cost(), 10);
    }

    #[test]
    fn binary_and_one_hot_examples() {
        assert_eq!(BinaryRep::encode(3, 8).unwrap().bits(), &[1, 1, 0]);
        assert_eq!(OneHotMap::new(0, 4).unwrap().bits(), &[1, 0, 0, 0]);
        assert_eq!(BinaryRep::encode(0, 10000).unwrap().bits().len(), 14);
        assert_eq!(BinaryRep::encode(0, 100).unwrap().bits().len(), 7);
    }

    #[test]
    fn basis_search_examples() {
        let s = find_crt_basis(10000, BasisStrategy::default()).unwrap();
        assert_eq!(s.basis.moduli(), &[2, 5, 7, 11, 13]);
        assert_eq!(s.basis.m(), 10010);
        assert_eq!(s.basis.slot_cost(), 38);
        let s = find_crt_basis(100, BasisStrategy::default()).unwrap();
        assert_eq!(s.basis.moduli(), &[3, 5, 7]);
        assert_eq!(s.basis.m(), 105);
        let s = find_crt_basis(30, BasisStrategy::default()).unwrap();
        assert_eq!(s.basis.moduli(), &[2, 3, 5]);

        let scan = find_crt_basis(10000, BasisStrategy::ScanRange { t: 20 }).unwrap();
        assert_eq!(scan.basis.m(), 10010);
        assert!(!scan.fallback);
        // 11 is prime and nothing in [11, 11] factors
        let scan = find_crt_basis(11, BasisStrategy::ScanRange { t: 0 }).unwrap();
        assert!(scan.fallback);
        assert_eq!(scan.basis.moduli(), &[11]);
    }

    #[test]
    fn basis_errors() {
        assert!(matches!(CrtBasis::new(vec![2, 4], 8), Err(HeError::NotCoprime(2, 4))));
        assert!(matches!(CrtBasis::new(vec![2, 3], 7), Err(HeError::BasisTooSmall { .. })));
        assert!(find_crt_basis(1, BasisStrategy::default()).is_err());
    }

    #[test]
    fn hierarchy_examples() {
        let h = build_hier_basis(10000, 1).unwrap();
        assert_eq!(h.level_moduli(), vec![vec![100, 101]]);
        assert_eq!(h.level_costs(), vec![201]);
        let h = build_hier_basis(10000, 3).unwrap();
        assert_eq!(h.level_costs(), vec![201, 44, 36]);
        assert_eq!(h.root.leaves(), vec![4, 5, 4, 5, 4, 5, 4, 5]);
        assert_eq!(build_hier_basis(4, 1).unwrap().level_costs(), vec![5]);
        assert!(matches!(build_hier_basis(4, 2), Err(HeError::HierarchyTooDeep(_))));
        assert!(build_hier_basis(10, 0).is_err());
    }

    #[test]
    fn hierarchy_residues_for_5678() {
        let h = build_hier_basis(10000, 3).unwrap();
        let rep = encode_hier(5678, &h).unwrap();
        assert_eq!(rep.residues.at(&[0]).unwrap().residue, 78);
        assert_eq!(rep.residues.at(&[1]).unwrap().residue, 22);
        assert_eq!(rep.residues.at(&[1, 1]).unwrap().residue, 10);
        assert!(encode_hier(10000, &h).is_err());
    }

    #[test]
    fn greater_map_examples() {
        assert_eq!(greater_map_of(2, 5, Orientation::Greater).unwrap().bits, vec![0, 0, 0, 1, 1]);
        assert_eq!(greater_map_of(4, 5, Orientation::Greater).unwrap().bits, vec![0; 5]);
        assert_eq!(greater_map_of(2, 5, Orientation::Less).unwrap().bits, vec![1, 1, 0, 0, 0]);
        assert!(greater_map_of(5, 5, Orientation::Greater).is_err());
    }

    #[test]
    fn class_map_affine() {
        let cm = ClassMap::from_reals(&[1.0, 1.2, 1.4, 1.6, 1.8, 2.0])
            .unwrap()
            .with_affine(Affine { scale: 5.0, offset: -4.0 })
            .unwrap();
        assert_eq!(cm.index_of(&Category::Real(1.4)).unwrap(), 2);
        assert!(cm.index_of(&Category::Real(1.5)).is_err());
        let labels = ClassMap::new(vec![Category::Label("dog".into()), Category::Label("cat".into())]).unwrap();
        assert_eq!(labels.index_of(&Category::Label("cat".into())).unwrap(), 1);
        assert!(labels.index_of(&Category::Label("bird".into())).is_err());
        assert!(ClassMap::from_reals(&[1.0, 1.0]).is_err());
        assert!(ClassMap::from_reals(&[1.0, 3.0]).unwrap().with_affine(Affine { scale: 1.0, offset: 0.0 }).is_err());
    }

    #[test]
    fn encode_reports_slot_costs() {
        let n = 10010;
        let params = EncodeParams {
            crt: Some(find_crt_basis(n, BasisStrategy::default()).unwrap().basis),
            hier: Some(build_hier_basis(n, 3).unwrap()),
        };
        let costs: Vec<u64> = RepKind::ALL
            .iter()
            .map(|&k| encode(17, n, k, &params).unwrap().slot_cost())
            .collect();
        for (k, c) in RepKind::ALL.iter().zip(&costs) {
            assert_eq!(*c, slot_cost(n, *k, &params).unwrap());
        }
        assert!(encode(n, n, RepKind::Numeric, &params).is_err());
        assert!(encode(3, n, RepKind::Crt, &EncodeParams::default()).is_err());
    }

    #[test]
    fn json_payloads() {
        let basis = CrtBasis::new(vec![2, 3, 5], 30).unwrap();
        let e = encode(17, 30, RepKind::Crt, &EncodeParams { crt: Some(basis), hier: None }).unwrap();
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(v["kind"], "crt");
        assert_eq!(v["payload"]["submaps"][0], serde_json::json!([0, 1]));
        let back: Encoded = serde_json::from_value(v).unwrap();
        assert_eq!(back, e);
        let h = serde_json::to_value(build_hier_basis(100, 1).unwrap()).unwrap();
        assert_eq!(h["root"]["children"][1]["modulus"], 11);
    }
}
