//! Deterministic random number generation.
//!
//! Every sampled value is a pure function of (seed, purpose tag, item index,
//! position within the item's stream), so outputs never depend on evaluation
//! order or thread count: each work item gets its own ChaCha8 stream, and
//! normal variates come from a fixed inverse-CDF applied to a 64-bit uniform.
//! ChaCha output and the quantile polynomial are both platform-independent,
//! which makes downstream artifacts byte-reproducible.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Purpose tags keep independent uses of one seed on disjoint streams.
#[derive(Clone, Copy, Debug)]
pub enum StreamKind {
    /// One stream per edge; yields the m independent weights under H0.
    NullEdge = 1,
    /// One stream per reference edge; yields (W0, W1..Wm) under H1.
    AltEdge = 2,
    /// One stream per non-reference graph; yields its latent permutation.
    Profile = 3,
    /// One stream per fixed-size chunk of quadratic-form samples.
    QuadFormChunk = 4,
}

/// A dedicated ChaCha8 substream for one unit of work.
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    /// Stream `item` of kind `kind` under `seed`. Item indices must stay
    /// below 2^56, far beyond any feasible edge count.
    pub fn new(seed: u64, kind: StreamKind, item: u64) -> Self {
        assert!(item < 1 << 56, "stream item index out of range");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((kind as u64) << 56) | item);
        Stream { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in the open interval (0, 1) at 2^-53 resolution; both
    /// endpoints are excluded so the quantile below is always finite.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    /// Standard normal variate via the fixed inverse-CDF.
    pub fn normal(&mut self) -> f64 {
        normal_quantile(self.uniform_open())
    }

    /// Uniform index in `0..bound` by masked rejection (unbiased).
    pub fn index(&mut self, bound: usize) -> usize {
        assert!(bound > 0);
        let mask = (bound as u64).next_power_of_two() - 1;
        loop {
            let v = self.next_u64() & mask;
            if (v as usize) < bound {
                return v as usize;
            }
        }
    }

    /// Image vector of a uniform permutation of `0..n` (Fisher-Yates).
    pub fn permutation_images(&mut self, n: usize) -> Vec<usize> {
        let mut img: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.index(i + 1);
            img.swap(i, j);
        }
        img
    }
}

/// Seed for a nested scope, derived by chained splitmix64 finalizer steps.
/// Keys per-trial and per-cell work so grid cells stay independent and
/// inserting new grid values never perturbs existing cells.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut h = base;
    for &t in tags {
        h = mix64(h.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(t));
    }
    h
}

fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Standard normal quantile function (Wichura's AS 241, PPND16 precision:
/// relative error below ~1e-15 on (0, 1)). Uses only basic f64 arithmetic,
/// so results are identical across platforms.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile argument must lie in (0, 1)");
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let z = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -z
    } else {
        z
    }
}

fn poly(coef: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coef.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

// AS 241 rational-approximation coefficients (central region).
const A: [f64; 8] = [
    3.387_132_872_796_366_608e0,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
const B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561e3,
];
// Intermediate tail (sqrt(-ln r) in (1.6, 5]).
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34e0,
    4.630_337_846_156_545_295_9e0,
    5.769_497_221_460_691_405_5e0,
    3.647_848_324_763_204_605_04e0,
    1.270_458_252_452_368_382_58e0,
    2.417_807_251_774_506_117_7e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_4e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87e0,
    1.676_384_830_183_803_849_4e0,
    6.897_673_349_851_000_045_5e-1,
    1.481_039_764_274_800_745_9e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
// Far tail (sqrt(-ln r) > 5).
const E: [f64; 8] = [
    6.657_904_643_501_103_777_2e0,
    5.463_784_911_164_114_369_9e0,
    1.784_826_539_917_291_335_8e0,
    2.965_605_718_285_048_912_3e-1,
    2.653_218_952_657_612_309_3e-2,
    1.242_660_947_388_078_438_6e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_9e-1,
    1.369_298_809_227_358_053_1e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];
