//! Philox4x32-10 counter-based generator.
//!
//! Every draw is a pure function of `(seed, counter)`, so simulations can be
//! split across threads in any order and still reproduce bit for bit.

const M0: u32 = 0xD251_1F53;
const M1: u32 = 0xCD9E_8D57;
const W0: u32 = 0x9E37_79B9;
const W1: u32 = 0xBB67_AE85;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Philox4x32 {
    key: [u32; 2],
}

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

impl Philox4x32 {
    pub fn new(seed: u64) -> Self {
        Self {
            key: [seed as u32, (seed >> 32) as u32],
        }
    }

    pub fn from_key(key: [u32; 2]) -> Self {
        Self { key }
    }

    #[inline]
    pub fn block(&self, counter: [u32; 4]) -> [u32; 4] {
        let mut c = counter;
        let mut k = self.key;
        for round in 0..10 {
            if round > 0 {
                k[0] = k[0].wrapping_add(W0);
                k[1] = k[1].wrapping_add(W1);
            }
            let (hi0, lo0) = mulhilo(M0, c[0]);
            let (hi1, lo1) = mulhilo(M1, c[2]);
            c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
        }
        c
    }

    /// Two uniforms in `[0, 1)` with 53 random bits each.
    #[inline]
    pub fn uniforms(&self, counter: [u32; 4]) -> (f64, f64) {
        let b = self.block(counter);
        (to_unit(b[0], b[1]), to_unit(b[2], b[3]))
    }

    /// Two independent standard normals by Box-Muller.
    #[inline]
    pub fn normals(&self, counter: [u32; 4]) -> (f64, f64) {
        let (u1, u2) = self.uniforms(counter);
        box_muller(u1, u2)
    }
}

#[inline]
fn to_unit(hi: u32, lo: u32) -> f64 {
    let bits = ((u64::from(hi) << 32) | u64::from(lo)) >> 11;
    bits as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn box_muller(u1: f64, u2: f64) -> (f64, f64) {
    // 1 - u1 lies in (0, 1]
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    let (s, c) = (core::f64::consts::TAU * u2).sin_cos();
    (r * c, r * s)
}

/// Key layout for simulation draws: `(path, step, stream)`.
#[inline]
pub fn sim_counter(path: u64, step: u32, stream: u32) -> [u32; 4] {
    [path as u32, (path >> 32) as u32, step, stream]
}

/// Sequential stream on top of the counter generator, for optimizer restarts
/// and network initialisation.
#[derive(Debug, Clone)]
pub struct StreamRng {
    gen: Philox4x32,
    stream: u32,
    counter: u64,
    spare: Option<f64>,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u32) -> Self {
        Self {
            gen: Philox4x32::new(seed),
            stream,
            counter: 0,
            spare: None,
        }
    }

    fn next_block(&mut self) -> [u32; 4] {
        let c = self.counter;
        self.counter += 1;
        self.gen.block([c as u32, (c >> 32) as u32, self.stream, 0x5EED])
    }

    pub fn uniform(&mut self) -> f64 {
        let b = self.next_block();
        to_unit(b[0], b[1])
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let b = self.next_block();
        let (a, z) = box_muller(to_unit(b[0], b[1]), to_unit(b[2], b[3]));
        self.spare = Some(z);
        a
    }
}
