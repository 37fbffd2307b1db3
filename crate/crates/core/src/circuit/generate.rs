use super::{Circuit, Gate, GateKind, MAX_PHASE_EXPONENT};
use crate::error::{Error, Result};

/// xorshift64* seeded through one round of splitmix64.
///
/// Seeding: `z = seed + 0x9E3779B97F4A7C15`,
/// `z = (z ^ z>>30)·0xBF58476D1CE4E5B9`, `z = (z ^ z>>27)·0x94D049BB133111EB`,
/// `state = z ^ z>>31` (a zero state is replaced by `0x9E3779B97F4A7C15`).
/// Step: `x ^= x>>12; x ^= x<<25; x ^= x>>27; out = x·0x2545F4914F6CDD1D`.
/// All arithmetic wraps modulo 2^64.
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Rng {
        let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        Rng {
            state: if z == 0 { 0x9E37_79B9_7F4A_7C15 } else { z },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `0..n` via the high 32 bits (`n` must be nonzero).
    pub fn below(&mut self, n: usize) -> usize {
        (((self.next_u64() >> 32) * n as u64) >> 32) as usize
    }
}

/// Quantum Fourier transform without the final qubit reversal: for each
/// qubit `i`, `h i` followed by `cp (j−i+1) j i` for every `j > i`.
///
/// The resulting operator is `U[r][c] = ω^{rev(r)·c}/√N` with `ω = e^{2πi/N}`
/// and `rev` reversing the `n` index bits, i.e. the DFT with bit-reversed rows.
pub fn gen_qft(n: usize) -> Result<Circuit> {
    if n == 0 || n > MAX_PHASE_EXPONENT as usize {
        return Err(Error::Index(format!("QFT size {n} outside 1..={MAX_PHASE_EXPONENT}")));
    }
    let mut c = Circuit::new(n)?;
    for i in 0..n {
        c.push(Gate::single(GateKind::H, i))?;
        for j in i + 1..n {
            c.push(Gate::controlled(GateKind::Cp((j - i + 1) as u32), j, i))?;
        }
    }
    Ok(c)
}

/// CZ pairs of one of the 8 cyclic grid patterns. Qubit `(r, c)` has index
/// `r·cols + c`.
fn cz_pattern(rows: usize, cols: usize, layer: usize) -> Vec<(usize, usize)> {
    const ORDER: [usize; 8] = [0, 3, 2, 1, 4, 7, 6, 5];
    let idx = ORDER[layer % 8];
    let dir_row = idx % 2;
    let dir_col = 1 - dir_row;
    let shift = (idx >> 1) % 4;
    let mut pairs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let (r2, c2) = (r + dir_row, c + dir_col);
            if r2 >= rows || c2 >= cols {
                continue;
            }
            if (r * (2 - dir_row) + c * (1 + dir_row)) % 4 != shift {
                continue;
            }
            pairs.push((r * cols + c, r2 * cols + c2));
        }
    }
    pairs
}

/// Random circuit on a `rows × cols` grid in the style of supremacy
/// experiments. Cycle 0 applies H everywhere. Every later cycle applies the
/// next non-empty CZ pattern, then one single-qubit gate on each qubit that
/// is idle in this cycle but took part in a CZ in the previous cycle. A
/// qubit's first such gate is `t`; later ones are drawn from `{sx, sy, t}`
/// excluding the qubit's previous single-qubit gate. `depth` counts cycles.
pub fn gen_supremacy(rows: usize, cols: usize, depth: usize, seed: u64) -> Result<Circuit> {
    if rows == 0 || cols == 0 || depth == 0 {
        return Err(Error::Index(format!(
            "supremacy grid {rows}x{cols} with depth {depth}: all must be positive"
        )));
    }
    let n = rows
        .checked_mul(cols)
        .filter(|&n| n <= u16::MAX as usize)
        .ok_or_else(|| Error::Index(format!("grid {rows}x{cols} too large")))?;
    let mut rng = Rng::new(seed);
    let mut c = Circuit::new(n)?;
    for q in 0..n {
        c.push(Gate::single(GateKind::H, q))?;
    }
    let mut last_single: Vec<Option<GateKind>> = vec![None; n];
    let mut in_cz_prev = vec![false; n];
    let mut layer = 0;
    for _ in 1..depth {
        let mut pairs = Vec::new();
        for _ in 0..8 {
            pairs = cz_pattern(rows, cols, layer);
            layer += 1;
            if !pairs.is_empty() {
                break;
            }
        }
        let mut in_cz = vec![false; n];
        for &(a, b) in &pairs {
            c.push(Gate::controlled(GateKind::Cz, a, b))?;
            in_cz[a] = true;
            in_cz[b] = true;
        }
        for q in 0..n {
            if in_cz[q] || !in_cz_prev[q] {
                continue;
            }
            let kind = match last_single[q] {
                None => GateKind::T,
                Some(prev) => {
                    let options: Vec<GateKind> = [GateKind::Sx, GateKind::Sy, GateKind::T]
                        .into_iter()
                        .filter(|&k| k != prev)
                        .collect();
                    options[rng.below(options.len())]
                }
            };
            c.push(Gate::single(kind, q))?;
            last_single[q] = Some(kind);
        }
        in_cz_prev = in_cz;
    }
    Ok(c)
}

/// Uniformly random gates over the whole gate set (controlled kinds only
/// when `n ≥ 2`; `cp` exponents in `1..=4`).
pub fn gen_random(n: usize, gates: usize, seed: u64) -> Result<Circuit> {
    let mut rng = Rng::new(seed);
    let mut c = Circuit::new(n)?;
    let kinds = if n >= 2 { GateKind::SINGLE.len() + 3 } else { GateKind::SINGLE.len() };
    for _ in 0..gates {
        let k = rng.below(kinds);
        let target = rng.below(n);
        let gate = if k < GateKind::SINGLE.len() {
            Gate::single(GateKind::SINGLE[k], target)
        } else {
            let control = (target + 1 + rng.below(n - 1)) % n;
            let kind = match k - GateKind::SINGLE.len() {
                0 => GateKind::Cx,
                1 => GateKind::Cz,
                _ => GateKind::Cp(1 + rng.below(4) as u32),
            };
            Gate::controlled(kind, control, target)
        };
        c.push(gate)?;
    }
    Ok(c)
}
