//! Bit-packed stabilizer tableau with destabilizers (CHP style).
//!
//! Rows `0..n` are destabilizers, rows `n..2n` stabilizers. Each row stores its
//! X and Z parts as `u64` words; row products compute their phase a word at a time.

use rand::Rng;

#[derive(Debug, Clone)]
pub struct Tableau {
    n: usize,
    words: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    signs: Vec<bool>,
}

/// Multiply Pauli row `(x1, z1)` in place by `(x2, z2)` and return the power of
/// `i` picked up by the product (mod 4).
#[inline]
fn mul_into(x1: &mut [u64], z1: &mut [u64], x2: &[u64], z2: &[u64]) -> u32 {
    let mut cnt1 = 0u64;
    let mut cnt2 = 0u64;
    for k in 0..x1.len() {
        let (ox, oz) = (x1[k], z1[k]);
        let nx = ox ^ x2[k];
        let nz = oz ^ z2[k];
        x1[k] = nx;
        z1[k] = nz;
        let x1z2 = ox & z2[k];
        let anti = (x2[k] & oz) ^ x1z2;
        cnt2 ^= (cnt1 ^ nx ^ nz ^ x1z2) & anti;
        cnt1 ^= anti;
    }
    (cnt1.count_ones() + 2 * cnt2.count_ones()) & 3
}

impl Tableau {
    /// All qubits in |0⟩.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut t = Tableau { n, words, xs: vec![0; 2 * n * words], zs: vec![0; 2 * n * words], signs: vec![false; 2 * n] };
        for q in 0..n {
            t.xs[q * words + q / 64] |= 1 << (q % 64);
            t.zs[(n + q) * words + q / 64] |= 1 << (q % 64);
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn loc(q: usize) -> (usize, u64) {
        (q / 64, 1u64 << (q % 64))
    }

    pub fn h(&mut self, q: usize) {
        let (w, m) = Self::loc(q);
        for row in 0..2 * self.n {
            let i = row * self.words + w;
            let (x, z) = (self.xs[i] & m, self.zs[i] & m);
            if x != 0 && z != 0 {
                self.signs[row] ^= true;
            }
            self.xs[i] = (self.xs[i] & !m) | z;
            self.zs[i] = (self.zs[i] & !m) | x;
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let (wa, ma) = Self::loc(a);
        let (wb, mb) = Self::loc(b);
        for row in 0..2 * self.n {
            let base = row * self.words;
            let xa = self.xs[base + wa] & ma != 0;
            let xb = self.xs[base + wb] & mb != 0;
            if !xa && !xb {
                continue;
            }
            let za = self.zs[base + wa] & ma != 0;
            let zb = self.zs[base + wb] & mb != 0;
            if xa && xb && (za ^ zb) {
                self.signs[row] ^= true;
            }
            if xb {
                self.zs[base + wa] ^= ma;
            }
            if xa {
                self.zs[base + wb] ^= mb;
            }
        }
    }

    /// Conjugate the state by a Pauli with the given X and Z components.
    pub fn apply_pauli(&mut self, q: usize, x: bool, z: bool) {
        let (w, m) = Self::loc(q);
        for row in 0..2 * self.n {
            let i = row * self.words + w;
            let anti = (x && self.zs[i] & m != 0) ^ (z && self.xs[i] & m != 0);
            if anti {
                self.signs[row] ^= true;
            }
        }
    }

    fn row_mul(&mut self, h: usize, i: usize) {
        let w = self.words;
        let (lo, hi) = if h < i { (h, i) } else { (i, h) };
        let (xa, xb) = self.xs.split_at_mut(hi * w);
        let (za, zb) = self.zs.split_at_mut(hi * w);
        let phase = if h < i {
            mul_into(&mut xa[lo * w..lo * w + w], &mut za[lo * w..lo * w + w], &xb[..w], &zb[..w])
        } else {
            mul_into(&mut xb[..w], &mut zb[..w], &xa[lo * w..lo * w + w], &za[lo * w..lo * w + w])
        };
        self.signs[h] ^= self.signs[i] ^ (phase & 2 != 0);
    }

    /// Outcome of a Z measurement if it is deterministic.
    pub fn peek_z(&self, q: usize) -> Option<bool> {
        let (w, m) = Self::loc(q);
        if (self.n..2 * self.n).any(|row| self.xs[row * self.words + w] & m != 0) {
            return None;
        }
        let mut sx = vec![0u64; self.words];
        let mut sz = vec![0u64; self.words];
        let mut sign = false;
        for row in 0..self.n {
            if self.xs[row * self.words + w] & m != 0 {
                let s = (self.n + row) * self.words;
                let phase = mul_into(&mut sx, &mut sz, &self.xs[s..s + self.words], &self.zs[s..s + self.words]);
                sign ^= self.signs[self.n + row] ^ (phase & 2 != 0);
            }
        }
        Some(sign)
    }

    /// Measure in the Z basis; returns `(outcome, was_random)`.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> (bool, bool) {
        let (w, m) = Self::loc(q);
        let n = self.n;
        let Some(p) = (n..2 * n).find(|&row| self.xs[row * self.words + w] & m != 0) else {
            return (self.peek_z(q).expect("deterministic"), false);
        };
        for row in 0..2 * n {
            if row != p && self.xs[row * self.words + w] & m != 0 {
                self.row_mul(row, p);
            }
        }
        let words = self.words;
        let (dst, src) = ((p - n) * words, p * words);
        self.xs.copy_within(src..src + words, dst);
        self.zs.copy_within(src..src + words, dst);
        self.signs[p - n] = self.signs[p];
        self.xs[src..src + words].fill(0);
        self.zs[src..src + words].fill(0);
        self.zs[src + w] |= m;
        let outcome = rng.gen::<bool>();
        self.signs[p] = outcome;
        (outcome, true)
    }

    pub fn measure_x<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> (bool, bool) {
        self.h(q);
        let out = self.measure_z(q, rng);
        self.h(q);
        out
    }

    /// Put qubit `q` in |0⟩, discarding whatever it held.
    pub fn reset<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) {
        if self.measure_z(q, rng).0 {
            self.apply_pauli(q, true, false);
        }
    }
}
