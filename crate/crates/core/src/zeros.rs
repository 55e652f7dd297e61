//! Critical-line zero tables: locate ordinates by sign changes of the real
//! rotated zeta function between Gram points, certify completeness by
//! Rosser-block counting against the exact relation N = 1 + θ/π + S, and
//! attach to each zero its unit phase e(θ(γ)/π).
//!
//! Block structure: Gram points where |Z| is comfortably nonzero and the
//! sign matches (−1)^n anchor the count exactly (N(g_n) = n + 1 there).
//! Between consecutive anchors the expected number of zeros equals the
//! number of Gram intervals; blocks failing the expectation at 8 samples
//! per interval are rescanned at 32/128/512/2048 before the table build
//! aborts. Blocks are solved in parallel and merged in index order, so the
//! resulting table is bit-identical for any worker count.

use crate::dd::{e_of_turns, Dd};
use crate::hardy::hardy_z;
use crate::theta::{gram_point, theta_dd};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

/// Heights above this are rejected: the Z-function backend is tuned and
/// tested to 1e5 and the certification margins are calibrated there.
pub const HEIGHT_CEILING: f64 = 1.0e5;

const GOOD_MIN_ABS: f64 = 0.005;
const REFINE_WIDTH: f64 = 5e-11;
const ESCALATION: [usize; 5] = [8, 32, 128, 512, 2048];
// no ordinate lies below this (first is 14.13...)
const FIRST_ZERO_FLOOR: f64 = 14.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableSource {
    Computed,
    Ingested,
}

#[derive(Clone, Debug)]
pub struct ZeroEntry {
    /// 1-based rank of the zero.
    pub index: u64,
    pub gamma: f64,
    /// S at the ordinate under the half-weight counting convention:
    /// index − 3/2 − θ(γ)/π.
    pub s_at_gamma: f64,
    /// e(θ(γ)/π), the common one-sided limit of conj(e(S(T))) at γ.
    pub phase: Complex64,
    pub multiplicity: u32,
}

#[derive(Clone, Debug)]
pub struct ZeroTable {
    pub entries: Vec<ZeroEntry>,
    /// Height up to which the table is certified complete.
    pub height_max: f64,
    pub source: TableSource,
}

pub(crate) fn make_entry(index: u64, gamma: f64) -> ZeroEntry {
    let turns = theta_dd(gamma).mul(Dd::FRAC_1_PI);
    let (c, s) = e_of_turns(turns);
    let s_at_gamma = Dd::from_f64(index as f64 - 1.5).sub(turns).to_f64();
    ZeroEntry {
        index,
        gamma,
        s_at_gamma,
        phase: Complex64::new(c, s),
        multiplicity: 1,
    }
}

/// All zeros with 0 < γ ≤ height_max, each refined to better than 1e-10,
/// completeness certified block by block.
pub fn find_zeros(height_max: f64) -> Result<ZeroTable> {
    if !height_max.is_finite() || height_max > HEIGHT_CEILING {
        return Err(Error::Precondition(format!(
            "height {height_max} outside supported range (ceiling {HEIGHT_CEILING:.0})"
        )));
    }
    if height_max < FIRST_ZERO_FLOOR {
        return Ok(ZeroTable {
            entries: Vec::new(),
            height_max,
            source: TableSource::Computed,
        });
    }

    // Gram points with Z values, up to a good anchor at or above height_max
    let mut grams: Vec<(i64, f64, f64)> = Vec::new();
    let mut n: i64 = -1;
    loop {
        let g = gram_point(n)?;
        let z = hardy_z(g)?;
        grams.push((n, g, z));
        if g >= height_max && is_good(n, z) {
            break;
        }
        if g > HEIGHT_CEILING * 1.02 {
            return Err(Error::Completeness {
                t: g,
                msg: "no good Gram anchor found above the requested height".into(),
            });
        }
        n += 1;
    }

    // blocks span consecutive good anchors; the opening block is anchored
    // below the first ordinate instead of at a Gram point
    let mut blocks: Vec<Block> = Vec::new();
    let mut lo = 1.0f64;
    let mut lo_rank = 0u64; // zeros expected strictly below lo
    let mut pending = Vec::new();
    for &(idx, g, z) in &grams {
        pending.push(g);
        if is_good(idx, z) {
            let expected = (idx + 1) as u64 - lo_rank;
            blocks.push(Block {
                lo,
                hi: g,
                cuts: std::mem::take(&mut pending),
                expected: expected as usize,
            });
            lo = g;
            lo_rank = (idx + 1) as u64;
        }
    }
    if !pending.is_empty() {
        // unreachable: the gram loop always terminates on a good point
        return Err(Error::Completeness {
            t: lo,
            msg: "scan ended without a closing anchor".into(),
        });
    }

    let found: Result<Vec<Vec<f64>>> = blocks.par_iter().map(solve_block).collect();
    let mut gammas: Vec<f64> = Vec::new();
    for v in found? {
        gammas.extend(v);
    }
    for w in gammas.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Completeness {
                t: w[0],
                msg: "refined ordinates failed to stay strictly ascending".into(),
            });
        }
    }

    let entries = gammas
        .iter()
        .enumerate()
        .filter(|&(_, &g)| g <= height_max)
        .map(|(i, &g)| make_entry(i as u64 + 1, g))
        .collect();
    Ok(ZeroTable {
        entries,
        height_max,
        source: TableSource::Computed,
    })
}

fn is_good(n: i64, z: f64) -> bool {
    let parity = if n & 1 == 0 { 1.0 } else { -1.0 };
    z * parity > 0.0 && z.abs() >= GOOD_MIN_ABS
}

struct Block {
    lo: f64,
    hi: f64,
    /// right endpoints of the Gram intervals making up the block
    cuts: Vec<f64>,
    expected: usize,
}

fn solve_block(block: &Block) -> Result<Vec<f64>> {
    if block.expected == 0 && block.lo >= block.hi {
        return Ok(Vec::new());
    }
    for &per_interval in &ESCALATION {
        let grid = block_grid(block, per_interval);
        let mut brackets = Vec::new();
        let mut prev_t = grid[0];
        let mut prev_z = hardy_z(prev_t)?;
        for &t in &grid[1..] {
            let z = hardy_z(t)?;
            if (z > 0.0) != (prev_z > 0.0) {
                brackets.push((prev_t, t, prev_z));
            }
            prev_t = t;
            prev_z = z;
        }
        if brackets.len() == block.expected {
            return brackets
                .into_iter()
                .map(|(a, b, za)| bisect(a, b, za))
                .collect();
        }
        if brackets.len() > block.expected {
            return Err(Error::Completeness {
                t: block.lo,
                msg: format!(
                    "found {} sign changes in a block certified for {}",
                    brackets.len(),
                    block.expected
                ),
            });
        }
    }
    Err(Error::Completeness {
        t: block.lo,
        msg: format!(
            "only partial sign changes found for {} expected zeros in [{:.6}, {:.6}] after finest rescan",
            block.expected, block.lo, block.hi
        ),
    })
}

fn block_grid(block: &Block, per_interval: usize) -> Vec<f64> {
    let mut grid = vec![block.lo];
    let mut left = block.lo;
    for &right in &block.cuts {
        // the opening block spans many Gram widths; scale its sampling
        let width = right - left;
        let n = (per_interval as f64 * (width / 2.0).max(1.0)).ceil() as usize;
        for i in 1..=n {
            grid.push(left + width * i as f64 / n as f64);
        }
        left = right;
    }
    grid
}

fn bisect(mut a: f64, mut b: f64, za: f64) -> Result<f64> {
    let a_pos = za > 0.0;
    for _ in 0..200 {
        if b - a <= REFINE_WIDTH {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (hardy_z(m)? > 0.0) == a_pos {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// N(T): zeros with γ ≤ T, half-weighted when T is exactly a stored
/// ordinate, weighted by multiplicity.
pub fn count_n(t: f64, table: &ZeroTable) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("count height must be positive, got {t}")));
    }
    if t > table.height_max {
        return Err(Error::Precondition(format!(
            "count at {t} exceeds certified height {}",
            table.height_max
        )));
    }
    let idx = table.entries.partition_point(|e| e.gamma < t);
    let mut n: f64 = table.entries[..idx]
        .iter()
        .map(|e| e.multiplicity as f64)
        .sum();
    if let Some(e) = table.entries.get(idx) {
        if e.gamma == t {
            n += 0.5 * e.multiplicity as f64;
        }
    }
    Ok(n)
}

/// S(T) = N(T) − 1 − θ(T)/π, with the θ/π subtraction carried in
/// double-double so the O(1)-sized result survives the large cancellation.
pub fn s_of_t(t: f64, table: &ZeroTable) -> Result<f64> {
    let n = count_n(t, table)?;
    Ok(Dd::from_f64(n - 1.0)
        .sub(theta_dd(t).mul(Dd::FRAC_1_PI))
        .to_f64())
}

/// Unit phase attached to the zero: e(θ(γ)/π). This is the common value of
/// conj(e(S(T))) as T approaches γ from either side; the integer jump of S
/// at the ordinate cancels inside e(·).
pub fn zeta_phase(entry: &ZeroEntry) -> Complex64 {
    let (c, s) = e_of_turns(theta_dd(entry.gamma).mul(Dd::FRAC_1_PI));
    Complex64::new(c, s)
}
