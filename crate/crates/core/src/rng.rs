//! Counter-based random streams.
//!
//! Every random item (a medium gap, a walk step, a replica's oracle draw) is
//! generated from a generator keyed by `(root seed, replica, role, item index)`.
//! Items never share generator state, so lazily extending a medium or
//! regenerating a single replica reproduces exactly the same numbers, and
//! results do not depend on evaluation order or thread count.

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Finalizer from SplitMix64.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of two words.
#[inline]
pub fn combine(a: u64, b: u64) -> u64 {
    mix64(a ^ mix64(b.wrapping_add(GOLDEN)))
}

/// What a stream is used for. Medium and walk randomness never overlap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Medium,
    Walk,
    /// Draws that belong to neither the medium nor the walk
    /// (oracle samples, calibration rounds).
    Auxiliary(u64),
}

impl Role {
    fn tag(self) -> u64 {
        match self {
            Role::Medium => 0x6d65_6469_756d,
            Role::Walk => 0x7761_6c6b,
            Role::Auxiliary(k) => combine(0x0061_7578, k),
        }
    }
}

/// A keyed family of independent generators, one per item index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedStream {
    pub root: u64,
    pub replica: u64,
    pub role: Role,
}

impl SeedStream {
    pub fn new(root: u64, replica: u64, role: Role) -> Self {
        SeedStream { root, replica, role }
    }

    /// Same replica and root, different role.
    pub fn with_role(self, role: Role) -> Self {
        SeedStream { role, ..self }
    }

    /// A stream whose replica id is derived from this one and `tag`.
    /// Used to give each grid point of an experiment its own replicas.
    pub fn derive(self, tag: u64) -> Self {
        SeedStream {
            replica: combine(self.replica, tag ^ 0xD1B5_4A32_D192_ED03),
            ..self
        }
    }

    pub fn key(&self) -> u64 {
        combine(combine(mix64(self.root), self.replica), self.role.tag())
    }

    /// Generator for item `index`.
    #[inline]
    pub fn rng(&self, index: u64) -> CounterRng {
        CounterRng::new(combine(self.key(), index))
    }

    /// Generator for an item addressed by a signed 128-bit index.
    #[inline]
    pub fn rng_wide(&self, index: i128) -> CounterRng {
        let bits = index as u128;
        let lo = bits as u64;
        let hi = (bits >> 64) as u64;
        CounterRng::new(combine(combine(self.key(), hi ^ 0x5851_F42D_4C95_7F2D), lo))
    }
}

/// SplitMix64 generator. Cheap to create, which matters because one is
/// created per item.
#[derive(Clone, Debug)]
pub struct CounterRng {
    state: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { state: seed }
    }
}

impl RngCore for CounterRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Uniform on (0, 1].
#[inline]
pub fn unit_open_closed<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * INV_2_53
}

/// Uniform on the open interval (0, 1).
#[inline]
pub fn unit_open<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * INV_2_53
}

/// Standard exponential by inversion.
#[inline]
pub fn exp1<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    -unit_open_closed(rng).ln()
}
