//! Static membership sets embedded in labels.
//!
//! Hash-and-displace: keys are split into buckets by one hash, buckets are
//! placed largest first, and each bucket searches for the smallest
//! displacement that sends all its keys to free slots. A lookup reads one
//! displacement and one slot. If no displacement works under any of the fixed
//! seeds the set is stored as a sorted array instead.
//!
//! Layout: `mode:1 | kw:6 | cw:6 | m:cw`, then either
//! `seed:4 | dw:5 | disp:r*dw | slots:t*kw` (hashed) or `keys:m*kw` (sorted),
//! with `r = max(1, ceil(m/4))` buckets and `t = m + ceil(m/4)` slots.

use crate::bitio::{bits_to_hold, width_for, BitString, Cursor};
use crate::error::{Error, Result};

const SEEDS: [u64; 8] = [
    0x9e37_79b9_7f4a_7c15,
    0xd1b5_4a32_d192_ed03,
    0x8cb9_2ba7_2f3d_8dd7,
    0xa076_1d64_78bd_642f,
    0xe703_7ed1_a0b4_28db,
    0x8ebc_6af0_9c88_c6e3,
    0x5899_65cc_7537_4cc3,
    0x1d8e_4e27_c47d_124f,
];
const MAX_DISPLACEMENT: u64 = 1 << 16;
const MODE_HASHED: u64 = 0;
const MODE_SORTED: u64 = 1;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn bucket_of(x: u64, seed: u64, r: u64) -> u64 {
    mix(x ^ seed) % r
}

fn slot_of(x: u64, seed: u64, d: u64, t: u64) -> u64 {
    mix(x ^ seed.rotate_left(29) ^ d.wrapping_mul(0x2545_f491_4f6c_dd1d)) % t
}

fn shape(m: u64) -> (u64, u64) {
    let extra = m.div_ceil(4);
    (extra.max(1), m + extra)
}

/// An immutable set of integers below `universe_bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticSet {
    universe_bound: u64,
    size: usize,
    payload: BitString,
}

impl StaticSet {
    pub fn build(keys: &[u64], universe_bound: u64) -> Result<Self> {
        if let Some(&bad) = keys.iter().find(|&&k| k >= universe_bound) {
            return Err(Error::ValueOutOfRange {
                value: bad,
                width: width_for(universe_bound),
            });
        }
        let mut keys = keys.to_vec();
        keys.sort_unstable();
        keys.dedup();
        let kw = width_for(universe_bound);
        let m = keys.len() as u64;
        let cw = bits_to_hold(m);
        let mut payload = BitString::new();
        let placed = if keys.is_empty() { None } else { place(&keys) };
        let mode = if placed.is_some() { MODE_HASHED } else { MODE_SORTED };
        payload.write_fixed(1, mode)?;
        payload.write_fixed(6, kw as u64)?;
        payload.write_fixed(6, cw as u64)?;
        payload.write_fixed(cw, m)?;
        match placed {
            Some((seed_idx, disp, slots)) => {
                let dw = disp.iter().copied().max().map_or(0, bits_to_hold);
                payload.write_fixed(4, seed_idx as u64)?;
                payload.write_fixed(5, dw as u64)?;
                for d in disp {
                    payload.write_fixed(dw, d)?;
                }
                for s in slots {
                    payload.write_fixed(kw, s)?;
                }
            }
            None => {
                for &k in &keys {
                    payload.write_fixed(kw, k)?;
                }
            }
        }
        Ok(Self {
            universe_bound,
            size: keys.len(),
            payload,
        })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn universe_bound(&self) -> u64 {
        self.universe_bound
    }

    pub fn bits(&self) -> &BitString {
        &self.payload
    }

    pub fn is_hashed(&self) -> bool {
        self.payload.read_fixed(0, 1).ok() == Some(MODE_HASHED)
    }

    pub fn contains(&self, x: u64) -> Result<bool> {
        if x >= self.universe_bound {
            return Err(Error::ValueOutOfRange {
                value: x,
                width: width_for(self.universe_bound),
            });
        }
        contains_at(&self.payload, 0, x)
    }
}

/// Places keys into slots; `None` if every seed fails.
fn place(keys: &[u64]) -> Option<(usize, Vec<u64>, Vec<u64>)> {
    let m = keys.len() as u64;
    let (r, t) = shape(m);
    'seeds: for (seed_idx, &seed) in SEEDS.iter().enumerate() {
        let mut buckets: Vec<Vec<u64>> = vec![Vec::new(); r as usize];
        for &k in keys {
            buckets[bucket_of(k, seed, r) as usize].push(k);
        }
        let mut by_size: Vec<usize> = (0..r as usize).collect();
        by_size.sort_by_key(|&b| std::cmp::Reverse(buckets[b].len()));
        let mut taken = vec![false; t as usize];
        let mut slots = vec![u64::MAX; t as usize];
        let mut disp = vec![0u64; r as usize];
        let mut trial = Vec::new();
        for b in by_size {
            if buckets[b].is_empty() {
                continue;
            }
            let found = (0..MAX_DISPLACEMENT).find(|&d| {
                trial.clear();
                for &k in &buckets[b] {
                    let s = slot_of(k, seed, d, t) as usize;
                    if taken[s] || trial.contains(&s) {
                        return false;
                    }
                    trial.push(s);
                }
                true
            });
            let Some(d) = found else { continue 'seeds };
            disp[b] = d;
            for (&k, &s) in buckets[b].iter().zip(&trial) {
                taken[s] = true;
                slots[s] = k;
            }
        }
        // an empty slot may hold any member: a member never hashes there
        for s in slots.iter_mut().filter(|s| **s == u64::MAX) {
            *s = keys[0];
        }
        return Some((seed_idx, disp, slots));
    }
    None
}

/// Membership test on a set serialized at `offset` inside `bits`.
pub fn contains_at(bits: &BitString, offset: usize, x: u64) -> Result<bool> {
    let mut c = Cursor::new(bits, offset);
    let mode = c.read(1)?;
    let kw = c.read(6)? as u32;
    let cw = c.read(6)? as u32;
    let m = c.read(cw)?;
    if m == 0 || (kw < 64 && x >> kw != 0) {
        return Ok(false);
    }
    if mode == MODE_SORTED {
        let base = c.pos();
        let (mut lo, mut hi) = (0u64, m);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let k = bits.read_fixed(base + (mid * kw as u64) as usize, kw)?;
            if k == x {
                return Ok(true);
            } else if k < x {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        return Ok(false);
    }
    let seed_idx = c.read(4)? as usize;
    let seed = *SEEDS
        .get(seed_idx)
        .ok_or_else(|| Error::Malformed(format!("dictionary seed {seed_idx}")))?;
    let dw = c.read(5)? as u32;
    let (r, t) = shape(m);
    let disp_base = c.pos();
    let slot_base = disp_base + (r * dw as u64) as usize;
    let b = bucket_of(x, seed, r);
    let d = bits.read_fixed(disp_base + (b * dw as u64) as usize, dw)?;
    let s = slot_of(x, seed, d, t);
    Ok(bits.read_fixed(slot_base + (s * kw as u64) as usize, kw)? == x)
}

/// Length in bits of a set serialized at `offset`.
pub fn encoded_len_at(bits: &BitString, offset: usize) -> Result<usize> {
    let mut c = Cursor::new(bits, offset);
    let mode = c.read(1)?;
    let kw = c.read(6)? as usize;
    let cw = c.read(6)? as u32;
    let m = c.read(cw)?;
    if mode == MODE_SORTED {
        return Ok(c.pos() - offset + m as usize * kw);
    }
    c.read(4)?;
    let dw = c.read(5)? as usize;
    let (r, t) = shape(m);
    Ok(c.pos() - offset + r as usize * dw + t as usize * kw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_set_contains_nothing() {
        let s = StaticSet::build(&[], 10).unwrap();
        assert!(s.is_empty());
        for x in 0..10 {
            assert!(!s.contains(x).unwrap());
        }
    }

    #[test]
    fn small_set() {
        let s = StaticSet::build(&[3, 7], 10).unwrap();
        assert!(s.contains(3).unwrap());
        assert!(s.contains(7).unwrap());
        assert!(!s.contains(4).unwrap());
        assert!(s.contains(10).is_err());
        assert!(StaticSet::build(&[10], 10).is_err());
    }

    #[test]
    fn random_set_matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let keys: Vec<u64> = (0..100).map(|_| rng.random_range(0..1_000_000)).collect();
        let s = StaticSet::build(&keys, 1_000_000).unwrap();
        assert!(s.is_hashed());
        for k in &keys {
            assert!(s.contains(*k).unwrap());
        }
        for _ in 0..10_000 {
            let x = rng.random_range(0..1_000_000);
            assert_eq!(s.contains(x).unwrap(), keys.contains(&x));
        }
    }

    #[test]
    fn construction_is_deterministic() {
        let keys: Vec<u64> = (0..300).map(|i| i * 37 % 1009).collect();
        assert_eq!(
            StaticSet::build(&keys, 1009).unwrap(),
            StaticSet::build(&keys, 1009).unwrap()
        );
    }

    #[test]
    fn lookup_is_constant_probes() {
        let keys: Vec<u64> = (0..5000).map(|i| i * 13).collect();
        let s = StaticSet::build(&keys, 100_000).unwrap();
        assert!(s.is_hashed());
        for x in [0u64, 13, 14, 64_987, 99_999] {
            crate::probe::reset();
            s.contains(x).unwrap();
            assert!(crate::probe::word_reads() <= 4);
        }
    }

    proptest! {
        #[test]
        fn exact_membership_and_linear_size(keys in proptest::collection::btree_set(0u64..5000, 0..400),
                                            probes in proptest::collection::vec(0u64..5000, 50)) {
            let keys: Vec<u64> = keys.into_iter().collect();
            let s = StaticSet::build(&keys, 5000).unwrap();
            for x in probes.iter().chain(keys.iter()) {
                prop_assert_eq!(s.contains(*x).unwrap(), keys.binary_search(x).is_ok());
            }
            prop_assert!(s.bits().len() <= 4 * keys.len() * 64 + 2 * 64);
            prop_assert_eq!(encoded_len_at(s.bits(), 0).unwrap(), s.bits().len());
        }
    }
}
