//! Representation counts `r(n, z)` for `n <= X` by lattice enumeration.
//!
//! The range `[1, X]` is split into one contiguous block per shard, and each
//! block is walked in segments of at most `segment_width` integers. For every
//! segment the lattice points `(x, y)` with `x, y >= 0` and `x^2 + z y^2` in
//! the segment are visited once, weighted by the number of sign changes
//! `2^{#nonzero coordinates}`. The raw count is even for every `z` in `W`
//! and is halved on the way out.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::arith::ShapeZ;
use crate::error::{Error, Result};

pub const DEFAULT_SEGMENT_WIDTH: u64 = 1 << 24;

const MAGIC: &[u8; 4] = b"QFRT";
const FORMAT_VERSION: u16 = 1;
const ELEMENT_WIDTH: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveOptions {
    pub shards: usize,
    pub segment_width: u64,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions {
            shards: 1,
            segment_width: DEFAULT_SEGMENT_WIDTH,
        }
    }
}

impl SieveOptions {
    pub fn with_shards(shards: usize) -> Self {
        SieveOptions {
            shards,
            ..Default::default()
        }
    }
}

/// `r(n, z)` for `1 <= n <= bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepTable {
    bound: u64,
    z: ShapeZ,
    // counts[0] is a placeholder so that counts[n] = r(n, z)
    counts: Vec<u16>,
}

impl RepTable {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn z(&self) -> ShapeZ {
        self.z
    }

    pub fn g_z(&self) -> u32 {
        self.z.g_z()
    }

    /// `r(n, z)`; zero outside `[1, bound]`.
    pub fn get(&self, n: u64) -> u16 {
        if n == 0 || n > self.bound {
            0
        } else {
            self.counts[n as usize]
        }
    }

    /// Counts for `n = 1..=bound`.
    pub fn counts(&self) -> &[u16] {
        &self.counts[1..]
    }

    /// `sum_{n <= x} r(n, z)` for `x <= bound`.
    pub fn partial_sum(&self, x: u64) -> u64 {
        let x = x.min(self.bound) as usize;
        self.counts[1..=x].iter().map(|&c| u64::from(c)).sum()
    }

    pub fn total(&self) -> u64 {
        self.partial_sum(self.bound)
    }

    pub fn sum_of_squares(&self) -> u64 {
        self.counts().iter().map(|&c| u64::from(c) * u64::from(c)).sum()
    }

    pub fn max_count(&self) -> u16 {
        self.counts().iter().copied().max().unwrap_or(0)
    }

    /// `(n, r(n, z))` for the represented `n`.
    pub fn nonzero(&self) -> impl Iterator<Item = (u64, u16)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c > 0)
            .map(|(n, &c)| (n as u64, c))
    }

    pub fn indicator(&self) -> Indicator {
        let mut ind = Indicator::new(self.bound);
        for (n, _) in self.nonzero() {
            ind.set(n);
        }
        ind
    }

    /// Binary cache: `"QFRT"`, version `u16`, `X: u64`, `z: u64`, width `u8 = 2`,
    /// then `r(n, z)` as little-endian `u16` for `n = 1..=X`.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&self.bound.to_le_bytes())?;
        w.write_all(&self.z.z().to_le_bytes())?;
        w.write_all(&[ELEMENT_WIDTH])?;
        let mut buf = Vec::with_capacity(self.counts().len() * 2);
        for &c in self.counts() {
            buf.extend_from_slice(&c.to_le_bytes());
        }
        w.write_all(&buf)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 4 + 2 + 8 + 8 + 1];
        r.read_exact(&mut header)
            .map_err(|_| Error::Cache("truncated header".into()))?;
        if &header[0..4] != MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        let version = u16::from_le_bytes([header[4], header[5]]);
        if version != FORMAT_VERSION {
            return Err(Error::Cache(format!("unsupported version {version}")));
        }
        let bound = u64::from_le_bytes(header[6..14].try_into().unwrap());
        let z = u64::from_le_bytes(header[14..22].try_into().unwrap());
        if header[22] != ELEMENT_WIDTH {
            return Err(Error::Cache(format!("element width {}", header[22])));
        }
        let z = ShapeZ::new(z).map_err(|e| Error::Cache(e.to_string()))?;
        let len = usize::try_from(bound).map_err(|_| Error::Cache("bound too large".into()))?;
        let mut body = Vec::new();
        r.read_to_end(&mut body)?;
        if body.len() != len * 2 {
            return Err(Error::Cache(format!(
                "expected {} count bytes, found {}",
                len * 2,
                body.len()
            )));
        }
        let mut counts = Vec::with_capacity(len + 1);
        counts.push(0);
        counts.extend(
            body.chunks_exact(2)
                .map(|c| u16::from_le_bytes([c[0], c[1]])),
        );
        Ok(RepTable { bound, z, counts })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_cache(std::io::BufWriter::new(f))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_cache(std::io::BufReader::new(f))
    }

    /// CSV with columns `n,r`, one row per `n` in `[1, X]`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "r"])?;
        for (n, &c) in self.counts.iter().enumerate().skip(1) {
            out.write_record([n.to_string(), c.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// File name used for a cached table.
pub fn cache_file_name(bound: u64, z: ShapeZ) -> String {
    format!("qfrt_z{}_x{}.bin", z.z(), bound)
}

pub fn rep_counts(bound: u64, z: ShapeZ) -> Result<RepTable> {
    rep_counts_with(bound, z, SieveOptions::default())
}

pub fn rep_counts_with(bound: u64, z: ShapeZ, opts: SieveOptions) -> Result<RepTable> {
    if bound == 0 {
        return Err(Error::invalid("table bound X must be at least 1"));
    }
    if opts.shards == 0 || opts.segment_width == 0 {
        return Err(Error::invalid("shard count and segment width must be positive"));
    }
    let len = usize::try_from(bound).map_err(|_| Error::invalid("bound exceeds address space"))?;
    let mut counts = vec![0u16; len + 1];
    let block = len.div_ceil(opts.shards);
    counts[1..]
        .par_chunks_mut(block)
        .enumerate()
        .try_for_each(|(i, out)| {
            let lo = 1 + (i * block) as u64;
            fill_block(lo, out, z, opts.segment_width)
        })?;
    Ok(RepTable { bound, z, counts })
}

// out[k] receives r(lo + k, z)
fn fill_block(lo: u64, out: &mut [u16], z: ShapeZ, segment_width: u64) -> Result<()> {
    let width = usize::try_from(segment_width).unwrap_or(usize::MAX);
    let mut raw = vec![0u32; width.min(out.len())];
    for (s, seg) in out.chunks_mut(width).enumerate() {
        let seg_lo = lo + (s * width) as u64;
        let seg_hi = seg_lo + seg.len() as u64 - 1;
        let raw = &mut raw[..seg.len()];
        raw.fill(0);
        lattice_segment(seg_lo, seg_hi, z.z(), raw);
        for (k, (&c, dst)) in raw.iter().zip(seg.iter_mut()).enumerate() {
            if c % z.g_z() != 0 {
                return Err(Error::invariant(format!(
                    "lattice count {c} at n = {} is not divisible by g_z = {}",
                    seg_lo + k as u64,
                    z.g_z()
                )));
            }
            *dst = u16::try_from(c / z.g_z()).map_err(|_| {
                Error::invariant(format!(
                    "r({}, {}) overflows 16 bits",
                    seg_lo + k as u64,
                    z.z()
                ))
            })?;
        }
    }
    Ok(())
}

/// Adds the signed lattice multiplicities of `x^2 + z y^2 = n` for `n` in
/// `[lo, hi]` into `raw[n - lo]`.
fn lattice_segment(lo: u64, hi: u64, z: u64, raw: &mut [u32]) {
    let mut y = 0u64;
    loop {
        let zy2 = z * y * y;
        if zy2 > hi {
            break;
        }
        let wy: u32 = if y == 0 { 1 } else { 2 };
        let rest_hi = hi - zy2;
        let x_min = if lo > zy2 { ceil_sqrt(lo - zy2) } else { 0 };
        let x_max = rest_hi.isqrt();
        for x in x_min..=x_max {
            let n = x * x + zy2;
            if n == 0 {
                continue;
            }
            let wx: u32 = if x == 0 { 1 } else { 2 };
            raw[(n - lo) as usize] += wx * wy;
        }
        y += 1;
    }
}

fn ceil_sqrt(n: u64) -> u64 {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// Bitmap over `n in [0, bound]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Indicator {
    bound: u64,
    words: Vec<u64>,
}

impl Indicator {
    pub fn new(bound: u64) -> Self {
        Indicator {
            bound,
            words: vec![0; (bound as usize + 1).div_ceil(64)],
        }
    }

    /// Indicator of the `n <= bound` represented by `x^2 + z y^2`.
    pub fn of_shape(bound: u64, z: ShapeZ) -> Self {
        let mut ind = Indicator::new(bound);
        let z = z.z();
        let mut y = 0u64;
        while z * y * y <= bound {
            let zy2 = z * y * y;
            for x in 0..=(bound - zy2).isqrt() {
                let n = x * x + zy2;
                if n > 0 {
                    ind.set(n);
                }
            }
            y += 1;
        }
        ind
    }

    pub fn set(&mut self, n: u64) {
        self.words[(n / 64) as usize] |= 1 << (n % 64);
    }

    pub fn contains(&self, n: u64) -> bool {
        n <= self.bound && self.words[(n / 64) as usize] >> (n % 64) & 1 == 1
    }

    pub fn union_with(&mut self, other: &Indicator) {
        assert_eq!(self.bound, other.bound, "indicator bounds differ");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    /// Number of set `n` in `[1, bound]`.
    pub fn count(&self) -> u64 {
        // bit 0 (n = 0) is never set
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Number of set `n` in `[1, x]`.
    pub fn count_up_to(&self, x: u64) -> u64 {
        let x = x.min(self.bound);
        let full = (x + 1) / 64;
        let mut c: u64 = self.words[..full as usize]
            .iter()
            .map(|w| u64::from(w.count_ones()))
            .sum();
        let rem = (x + 1) % 64;
        if rem > 0 {
            c += u64::from((self.words[full as usize] & ((1u64 << rem) - 1)).count_ones());
        }
        c
    }
}

/// `N_S(X)`: how many `n <= X` are represented by `x^2 + z y^2` for some `z` in `shapes`.
pub fn union_count(bound: u64, shapes: &[ShapeZ]) -> u64 {
    union_indicator(bound, shapes).map_or(0, |ind| ind.count())
}

pub fn union_indicator(bound: u64, shapes: &[ShapeZ]) -> Option<Indicator> {
    shapes
        .par_iter()
        .map(|&z| Indicator::of_shape(bound, z))
        .reduce_with(|mut a, b| {
            a.union_with(&b);
            a
        })
}
