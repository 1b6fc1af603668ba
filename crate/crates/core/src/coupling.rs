//! Counter-based uniforms.
//!
//! Every random quantity in the crate is a pure function of `(seed, domain, index)`,
//! so results do not depend on enumeration order or on the number of worker threads.

/// Stream tags keeping edge, site and thinning uniforms independent.
pub mod domain {
    pub const EDGE: u64 = 0x45_44_47_45;
    pub const SITE: u64 = 0x53_49_54_45;
    pub const THIN: u64 = 0x54_48_49_4e;
    pub const REPLICA: u64 = 0x52_45_50_4c;
}

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
pub fn hash3(seed: u64, domain: u64, index: u64) -> u64 {
    let k = mix64(seed ^ domain.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    mix64(k.wrapping_add(index.wrapping_add(1).wrapping_mul(0xd1b5_4a32_d192_ed03)))
}

/// Top 53 bits as a float in [0, 1).
#[inline]
pub fn to_unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
pub fn uniform(seed: u64, domain: u64, index: u64) -> f64 {
    to_unit(hash3(seed, domain, index))
}

/// Independent seed for replica `k` of an experiment seeded with `seed`.
pub fn sub_seed(seed: u64, k: u64) -> u64 {
    hash3(seed, domain::REPLICA, k)
}

/// Zigzag map from Z to N used to key integer sites.
#[inline]
pub fn zigzag(x: i64) -> u64 {
    ((x << 1) ^ (x >> 63)) as u64
}
