//! Sizes of the formation and clustering spaces.

use serde::{Deserialize, Serialize};

use super::FormationError;

/// Counts of integer partitions (formations) and set partitions
/// (clusterings) of `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceCounts {
    pub n: u32,
    pub min_part: u32,
    /// Integer partitions of `n` with every part ≥ `min_part`.
    pub partitions: u64,
    /// Integer partitions of `n` with no part equal to 1.
    pub partitions_no_singletons: u64,
    /// Bell number `B_n`.
    #[serde(with = "u128_string")]
    pub bell: u128,
    /// Set partitions of `n` elements without singleton blocks.
    #[serde(with = "u128_string")]
    pub bell_no_singletons: u128,
}

mod u128_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub const MAX_COUNT_N: u32 = 40;

/// Number of partitions of `n` into parts of size at least `min_part`.
pub fn partitions_min_part(n: u32, min_part: u32) -> u64 {
    let n = n as usize;
    let mut ways = vec![0u64; n + 1];
    ways[0] = 1;
    for part in (min_part.max(1) as usize)..=n {
        for total in part..=n {
            ways[total] += ways[total - part];
        }
    }
    ways[n]
}

/// Bell numbers `B_0..=B_n` from the Bell triangle.
pub fn bell_numbers(n: u32) -> Vec<u128> {
    let mut bells = vec![1u128];
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().expect("non-empty row"));
        for &v in &row {
            let prev = *next.last().expect("non-empty row");
            next.push(prev + v);
        }
        row = next;
        bells.push(row[0]);
    }
    bells
}

/// Set partitions without singletons, `A_0..=A_n`, via `A_{m+1} = B_m − A_m`.
pub fn bell_no_singletons(n: u32) -> Vec<u128> {
    let bells = bell_numbers(n);
    let mut out = vec![1u128];
    for m in 0..n as usize {
        out.push(bells[m] - out[m]);
    }
    out
}

pub fn count_spaces(n: u32, min_part: u32) -> Result<SpaceCounts, FormationError> {
    if !(1..=MAX_COUNT_N).contains(&n) {
        return Err(FormationError::CountRange { n, max: MAX_COUNT_N });
    }
    if min_part == 0 {
        return Err(FormationError::InvalidMinPart);
    }
    Ok(SpaceCounts {
        n,
        min_part,
        partitions: partitions_min_part(n, min_part),
        partitions_no_singletons: partitions_min_part(n, 2),
        bell: bell_numbers(n)[n as usize],
        bell_no_singletons: bell_no_singletons(n)[n as usize],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Stirling numbers of the second kind, summed per row.
    fn bell_via_stirling(n: usize) -> u128 {
        let mut s = vec![vec![0u128; n + 1]; n + 1];
        s[0][0] = 1;
        for i in 1..=n {
            for k in 1..=i {
                s[i][k] = k as u128 * s[i - 1][k] + s[i - 1][k - 1];
            }
        }
        s[n].iter().sum()
    }

    fn binom(n: usize, k: usize) -> i128 {
        (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
    }

    // Inclusion-exclusion over the set of forced singletons.
    fn no_singletons_ie(n: usize) -> u128 {
        let mut acc: i128 = 0;
        for k in 0..=n {
            let term = binom(n, k) * bell_via_stirling(n - k) as i128;
            acc += if k % 2 == 0 { term } else { -term };
        }
        acc as u128
    }

    fn brute_partitions(n: u32, max_part: u32, min_part: u32) -> u64 {
        if n == 0 {
            return 1;
        }
        (min_part..=max_part.min(n))
            .map(|p| brute_partitions(n - p, p, min_part))
            .sum()
    }

    #[test]
    fn small_bells() {
        assert_eq!(&bell_numbers(6)[..], &[1, 1, 2, 5, 15, 52, 203]);
        assert_eq!(&bell_no_singletons(6)[..], &[1, 0, 1, 1, 4, 11, 41]);
    }

    #[test]
    fn bells_match_stirling_oracle() {
        let triangle = bell_numbers(30);
        let ns = bell_no_singletons(30);
        for n in 0..=30 {
            assert_eq!(triangle[n], bell_via_stirling(n), "B_{n}");
            assert_eq!(ns[n], no_singletons_ie(n), "A_{n}");
        }
    }

    #[test]
    fn partitions_match_recursion() {
        for n in 1..=24 {
            assert_eq!(partitions_min_part(n, 1), brute_partitions(n, n, 1));
            assert_eq!(partitions_min_part(n, 2), brute_partitions(n, n, 2));
            assert_eq!(partitions_min_part(n, 3), brute_partitions(n, n, 3));
        }
    }

    #[test]
    fn soccer_space() {
        let c = count_spaces(24, 1).unwrap();
        assert_eq!(c.partitions, 1575);
        assert_eq!(c.partitions_no_singletons, 320);
        assert_eq!(c.bell, 445_958_869_294_805_289);
        assert_eq!(c.bell_no_singletons, 40_073_660_040_755_337);
        assert_eq!(count_spaces(24, 2).unwrap().partitions, 320);
    }

    #[test]
    fn range_checks() {
        assert!(count_spaces(0, 1).is_err());
        assert!(count_spaces(41, 1).is_err());
        assert!(count_spaces(5, 0).is_err());
        let c = count_spaces(40, 1).unwrap();
        assert_eq!(c.partitions, 37338);
        assert_eq!(c.bell, bell_via_stirling(40));
    }
}
