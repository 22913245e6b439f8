//! Two-dimensional tile tensors: a logical `[rows, cols]` matrix cut into
//! `[t1, t2]` tiles, each flattened row-major into one ciphertext.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{HeError, Result};
use crate::measure::{measure, Depth, Measured};
use crate::rational::int;
use crate::simd::{CipherVec, ExactComplex, HeContext, PlainVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileShape {
    pub t1: usize,
    pub t2: usize,
}

impl TileShape {
    pub fn new(t1: usize, t2: usize, slot_count: usize) -> Result<Self> {
        if t1 == 0 || t2 == 0 || t1 * t2 != slot_count {
            return Err(HeError::InvalidTileShape(format!("{t1} x {t2} does not fill {slot_count} slots")));
        }
        Ok(TileShape { t1, t2 })
    }

    /// Every `[t1, t2]` with `t1 * t2 = s`.
    pub fn all(slot_count: usize) -> Vec<TileShape> {
        (1..=slot_count)
            .filter(|t1| slot_count.is_multiple_of(*t1))
            .map(|t1| TileShape { t1, t2: slot_count / t1 })
            .collect()
    }

    pub fn slots(&self) -> usize {
        self.t1 * self.t2
    }

    /// `[rows/t1,cols/t2]`.
    pub fn notation(&self, rows: usize, cols: usize) -> String {
        format!("[{rows}/{},{cols}/{}]", self.t1, self.t2)
    }
}

/// One side of a shape string: a dimension and its tile size, each either a
/// number or a symbol such as `n`, `m` or `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Term {
    Num(usize),
    Sym(String),
}

impl Term {
    fn parse(s: &str) -> Result<Term> {
        let s = s.trim();
        if s.is_empty() {
            return Err(HeError::InvalidTileShape("empty term".into()));
        }
        if let Ok(v) = s.parse() {
            return Ok(Term::Num(v));
        }
        if s.chars().all(|c| c.is_ascii_alphabetic() || c == '_') {
            return Ok(Term::Sym(s.to_string()));
        }
        Err(HeError::InvalidTileShape(format!("bad term '{s}'")))
    }

    fn resolve(&self, vars: &BTreeMap<&str, usize>) -> Result<usize> {
        match self {
            Term::Num(v) => Ok(*v),
            Term::Sym(s) => vars
                .get(s.as_str())
                .copied()
                .ok_or_else(|| HeError::InvalidTileShape(format!("unbound symbol '{s}'"))),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Num(v) => write!(f, "{v}"),
            Term::Sym(s) => f.write_str(s),
        }
    }
}

/// Parsed shape string `"[d1/t1,d2/t2]"`, possibly symbolic like `"[n/1,m/s]"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub dims: [Term; 2],
    pub tiles: [Term; 2],
}

impl ShapeSpec {
    pub fn parse(s: &str) -> Result<ShapeSpec> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| HeError::InvalidTileShape(format!("'{s}' is not of the form [a/b,c/d]")))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(HeError::InvalidTileShape(format!("'{s}' needs exactly two dimensions")));
        }
        let mut dims = Vec::new();
        let mut tiles = Vec::new();
        for p in parts {
            let (d, t) = p
                .split_once('/')
                .ok_or_else(|| HeError::InvalidTileShape(format!("'{p}' lacks a tile size")))?;
            dims.push(Term::parse(d)?);
            tiles.push(Term::parse(t)?);
        }
        let [d0, d1]: [Term; 2] = dims.try_into().expect("two dims");
        let [t0, t1]: [Term; 2] = tiles.try_into().expect("two tiles");
        Ok(ShapeSpec { dims: [d0, d1], tiles: [t0, t1] })
    }

    /// Binds symbols (including `s`, the slot count) and returns the
    /// logical dimensions with the tile shape.
    pub fn resolve(&self, vars: &BTreeMap<&str, usize>, slot_count: usize) -> Result<(usize, usize, TileShape)> {
        let mut vars = vars.clone();
        vars.entry("s").or_insert(slot_count);
        let rows = self.dims[0].resolve(&vars)?;
        let cols = self.dims[1].resolve(&vars)?;
        let shape = TileShape::new(self.tiles[0].resolve(&vars)?, self.tiles[1].resolve(&vars)?, slot_count)?;
        Ok((rows, cols, shape))
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}/{},{}/{}]", self.dims[0], self.tiles[0], self.dims[1], self.tiles[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dim {
    Rows,
    Cols,
}

#[derive(Debug, Clone)]
pub struct TileTensor {
    rows: usize,
    cols: usize,
    shape: TileShape,
    /// Row-major grid of `grid_rows x grid_cols` tiles.
    tiles: Vec<CipherVec>,
}

impl Depth for TileTensor {
    fn depths(&self) -> (u32, u32) {
        self.tiles.depths()
    }
}

impl TileTensor {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> TileShape {
        self.shape
    }

    pub fn tiles(&self) -> &[CipherVec] {
        &self.tiles
    }

    pub fn grid(&self) -> (usize, usize) {
        grid(self.rows, self.cols, self.shape)
    }

    pub fn has_padding(&self) -> bool {
        !self.rows.is_multiple_of(self.shape.t1) || !self.cols.is_multiple_of(self.shape.t2)
    }

    pub fn notation(&self) -> String {
        self.shape.notation(self.rows, self.cols)
    }

    /// Tile index and slot of logical element `(r, c)`.
    pub fn locate(&self, r: usize, c: usize) -> (usize, usize) {
        locate(self.cols, self.shape, r, c)
    }

    fn tile_mask(&self, tile: usize, keep: impl Fn(usize, usize) -> bool) -> PlainVec {
        let (_, gc) = self.grid();
        let (gi, gj) = (tile / gc, tile % gc);
        let t = self.shape;
        PlainVec::from_ints((0..t.slots()).map(|slot| {
            let (r, c) = (gi * t.t1 + slot / t.t2, gj * t.t2 + slot % t.t2);
            i64::from(r < self.rows && c < self.cols && keep(r, c))
        }))
    }
}

fn grid(rows: usize, cols: usize, shape: TileShape) -> (usize, usize) {
    (rows.div_ceil(shape.t1), cols.div_ceil(shape.t2))
}

fn locate(cols: usize, shape: TileShape, r: usize, c: usize) -> (usize, usize) {
    let gc = cols.div_ceil(shape.t2);
    ((r / shape.t1) * gc + c / shape.t2, (r % shape.t1) * shape.t2 + c % shape.t2)
}

fn check_shape(ctx: &HeContext, shape: TileShape) -> Result<()> {
    if shape.slots() != ctx.slot_count() {
        return Err(HeError::InvalidTileShape(format!(
            "{} x {} does not fill {} slots",
            shape.t1,
            shape.t2,
            ctx.slot_count()
        )));
    }
    Ok(())
}

pub fn pack(ctx: &HeContext, m: &[Vec<BigRational>], shape: TileShape) -> Result<TileTensor> {
    check_shape(ctx, shape)?;
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(HeError::ShapeMismatch("matrix must be non-empty and rectangular".into()));
    }
    let (gr, gc) = grid(rows, cols, shape);
    let zero = || ExactComplex::new(BigRational::zero(), BigRational::zero());
    let mut slots: Vec<Vec<ExactComplex>> = (0..gr * gc).map(|_| (0..shape.slots()).map(|_| zero()).collect()).collect();
    for (r, row) in m.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let (t, s) = locate(cols, shape, r, c);
            slots[t][s] = ExactComplex::new(v.clone(), BigRational::zero());
        }
    }
    let tiles = slots.into_iter().map(|s| ctx.encrypt_exact(s)).collect::<Result<_>>()?;
    Ok(TileTensor { rows, cols, shape, tiles })
}

pub fn pack_ints(ctx: &HeContext, m: &[Vec<i64>], shape: TileShape) -> Result<TileTensor> {
    let m: Vec<Vec<BigRational>> = m.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
    pack(ctx, &m, shape)
}

/// Real parts of the logical entries (exact profile only).
pub fn unpack_exact(ctx: &HeContext, t: &TileTensor) -> Result<Vec<Vec<BigRational>>> {
    let tiles = t
        .tiles
        .iter()
        .map(|c| {
            ctx.decrypt_exact(c)
                .ok_or_else(|| HeError::InvalidParameter("exact unpack needs the exact profile".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..t.rows)
        .map(|r| {
            (0..t.cols)
                .map(|c| {
                    let (ti, s) = t.locate(r, c);
                    tiles[ti][s].re.clone()
                })
                .collect()
        })
        .collect())
}

pub fn unpack(ctx: &HeContext, t: &TileTensor) -> Vec<Vec<f64>> {
    let tiles: Vec<Vec<f64>> = t.tiles.iter().map(|c| ctx.decrypt_real(c)).collect();
    (0..t.rows)
        .map(|r| {
            (0..t.cols)
                .map(|c| {
                    let (ti, s) = t.locate(r, c);
                    tiles[ti][s]
                })
                .collect()
        })
        .collect()
}

/// Applies `f` tile by tile.
pub fn ew_map2(
    ctx: &HeContext,
    a: &TileTensor,
    b: &TileTensor,
    f: impl Fn(&HeContext, &CipherVec, &CipherVec) -> Result<CipherVec>,
) -> Result<Measured<TileTensor>> {
    if (a.rows, a.cols, a.shape) != (b.rows, b.cols, b.shape) {
        return Err(HeError::ShapeMismatch(format!("{} vs {}", a.notation(), b.notation())));
    }
    measure(ctx, || {
        let tiles = a.tiles.iter().zip(&b.tiles).map(|(x, y)| f(ctx, x, y)).collect::<Result<Vec<_>>>()?;
        let n = tiles.len() as u64 * ctx.slot_count() as u64;
        Ok((TileTensor { tiles, ..a.clone() }, n))
    })
}

/// Applies `f` to every tile.
pub fn ew_map(
    ctx: &HeContext,
    a: &TileTensor,
    f: impl Fn(&HeContext, &CipherVec) -> Result<CipherVec>,
) -> Result<Measured<TileTensor>> {
    measure(ctx, || {
        let tiles = a.tiles.iter().map(|x| f(ctx, x)).collect::<Result<Vec<_>>>()?;
        Ok((TileTensor { tiles, ..a.clone() }, 0))
    })
}

/// Zeroes padding slots (one plaintext multiplication per padded tile).
pub fn clear_padding(ctx: &HeContext, t: &TileTensor) -> Result<TileTensor> {
    if !t.has_padding() {
        return Ok(t.clone());
    }
    let tiles = (0..t.tiles.len())
        .map(|i| {
            let mask = t.tile_mask(i, |_, _| true);
            if mask.slots().iter().all(|v| !v.re.is_zero()) {
                Ok(t.tiles[i].clone())
            } else {
                ctx.pt_mul(&mask, &t.tiles[i])
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TileTensor { tiles, ..t.clone() })
}

/// Cyclic replication along `dim`: the result has `factor` times as many
/// rows (or columns) and entry `(r, c)` copies `(r mod rows, c)` (or
/// `(r, c mod cols)`). Built from masked, rotated copies of source tiles.
pub fn broadcast_dim(ctx: &HeContext, t: &TileTensor, dim: Dim, factor: usize) -> Result<Measured<TileTensor>> {
    if factor == 0 {
        return Err(HeError::InvalidParameter("broadcast factor must be positive".into()));
    }
    measure(ctx, || {
        if factor == 1 {
            return Ok((t.clone(), 0));
        }
        let (rows, cols) = match dim {
            Dim::Rows => (t.rows * factor, t.cols),
            Dim::Cols => (t.rows, t.cols * factor),
        };
        let shape = t.shape;
        let (gr, gc) = grid(rows, cols, shape);
        let mut tiles = Vec::with_capacity(gr * gc);
        for gi in 0..gr {
            for gj in 0..gc {
                // (source tile, rotation) -> source slots feeding this tile
                let mut groups: BTreeMap<(usize, i64), Vec<usize>> = BTreeMap::new();
                let mut filled = 0;
                for slot in 0..shape.slots() {
                    let (r, c) = (gi * shape.t1 + slot / shape.t2, gj * shape.t2 + slot % shape.t2);
                    if r >= rows || c >= cols {
                        continue;
                    }
                    let (sr, sc) = match dim {
                        Dim::Rows => (r % t.rows, c),
                        Dim::Cols => (r, c % t.cols),
                    };
                    let (st, ss) = t.locate(sr, sc);
                    groups.entry((st, ss as i64 - slot as i64)).or_default().push(ss);
                    filled += 1;
                }
                let mut acc: Option<CipherVec> = None;
                for ((st, shift), src) in groups {
                    let piece = if src.len() == shape.slots() && filled == shape.slots() {
                        t.tiles[st].clone()
                    } else {
                        let mut mask = vec![0i64; shape.slots()];
                        for s in src {
                            mask[s] = 1;
                        }
                        ctx.pt_mul(&PlainVec::from_ints(mask), &t.tiles[st])?
                    };
                    let piece = if shift == 0 { piece } else { ctx.rotate(&piece, shift)? };
                    acc = Some(match acc {
                        None => piece,
                        Some(a) => ctx.add(&a, &piece)?,
                    });
                }
                let tile = match acc {
                    Some(a) => a,
                    None => ctx.encrypt_ints(&[])?,
                };
                tiles.push(tile);
            }
        }
        Ok((TileTensor { rows, cols, shape, tiles }, 0))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReduceMode {
    /// Result has a single row (or column).
    Collapse,
    /// Result keeps the input shape with every entry replaced by the sum.
    Broadcast,
}

/// Sums along `dim`: rotate-and-sum inside tiles, then additions across the
/// tile grid. Padding is masked out first.
pub fn reduce_dim(ctx: &HeContext, t: &TileTensor, dim: Dim, mode: ReduceMode) -> Result<Measured<TileTensor>> {
    measure(ctx, || {
        let src = clear_padding(ctx, t)?;
        let shape = t.shape;
        let (gr, gc) = t.grid();
        // within-tile sums
        let summed = src
            .tiles
            .iter()
            .map(|tile| match dim {
                // rotations by multiples of t2 permute rows cyclically, so
                // every row ends with the column sums
                Dim::Rows => {
                    let mut acc = tile.clone();
                    let mut step = 1;
                    while step < shape.t1 {
                        let r = ctx.rotate(&acc, (step * shape.t2) as i64)?;
                        acc = ctx.add(&acc, &r)?;
                        step <<= 1;
                    }
                    Ok(acc)
                }
                // slot (r, 0) ends with the row sum; other slots are discarded
                Dim::Cols => ctx.rotate_and_sum(tile, shape.t2),
            })
            .collect::<Result<Vec<_>>>()?;
        // across the grid
        let lines: Vec<CipherVec> = match dim {
            Dim::Rows => (0..gc)
                .map(|j| (1..gr).try_fold(summed[j].clone(), |a, i| ctx.add(&a, &summed[i * gc + j])))
                .collect::<Result<_>>()?,
            Dim::Cols => (0..gr)
                .map(|i| (1..gc).try_fold(summed[i * gc].clone(), |a, j| ctx.add(&a, &summed[i * gc + j])))
                .collect::<Result<_>>()?,
        };
        let (rows, cols) = match (dim, mode) {
            (_, ReduceMode::Broadcast) => (t.rows, t.cols),
            (Dim::Rows, ReduceMode::Collapse) => (1, t.cols),
            (Dim::Cols, ReduceMode::Collapse) => (t.rows, 1),
        };
        let mut out = TileTensor { rows, cols, shape, tiles: Vec::new() };
        let (ogr, ogc) = out.grid();
        let mut tiles = Vec::with_capacity(ogr * ogc);
        for i in 0..ogr {
            for j in 0..ogc {
                let line = match dim {
                    Dim::Rows => &lines[j],
                    Dim::Cols => &lines[i],
                };
                tiles.push(line.clone());
            }
        }
        out.tiles = tiles;
        let tiles = match dim {
            Dim::Rows => (0..out.tiles.len())
                .map(|i| {
                    let mask = out.tile_mask(i, |_, _| true);
                    if mask.slots().iter().all(|v| !v.re.is_zero()) {
                        Ok(out.tiles[i].clone())
                    } else {
                        ctx.pt_mul(&mask, &out.tiles[i])
                    }
                })
                .collect::<Result<Vec<_>>>()?,
            Dim::Cols => (0..out.tiles.len())
                .map(|i| {
                    // keep column 0 of each tile row, then spread it
                    let first = PlainVec::from_ints((0..shape.slots()).map(|s| i64::from(s % shape.t2 == 0)));
                    let mut acc = ctx.pt_mul(&first, &out.tiles[i])?;
                    let width = match mode {
                        ReduceMode::Collapse => 1,
                        ReduceMode::Broadcast => shape.t2,
                    };
                    let mut span = 1;
                    while span < width {
                        let r = ctx.rotate(&acc, -(span as i64))?;
                        acc = ctx.add(&acc, &r)?;
                        span <<= 1;
                    }
                    let mask = out.tile_mask(i, |_, _| true);
                    if mask.slots().iter().all(|v| !v.re.is_zero()) {
                        Ok(acc)
                    } else {
                        ctx.pt_mul(&mask, &acc)
                    }
                })
                .collect::<Result<Vec<_>>>()?,
        };
        out.tiles = tiles;
        Ok((out, 0))
    })
}
