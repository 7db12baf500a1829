//! Permutations of {1..k} with parity, iterated in lexicographic order.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Permutation stored as 0-based images; serialized 1-based together with
/// its sign, which is re-validated on deserialization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation {
            images: (0..k).collect(),
        }
    }

    /// Builds from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &j in &images {
            if j >= k || seen[j] {
                return Err(Error::Domain(format!(
                    "images {images:?} are not a permutation of 0..{k}"
                )));
            }
            seen[j] = true;
        }
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Image of position i (0-based).
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Parity: +1 for even, -1 for odd, by counting inversions.
    pub fn sign(&self) -> i32 {
        let mut inversions = 0usize;
        for i in 0..self.images.len() {
            for j in i + 1..self.images.len() {
                if self.images[i] > self.images[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Advances to the next permutation in lexicographic order; false once
    /// the last one has been reached.
    pub fn step_lex(&mut self) -> bool {
        let v = &mut self.images;
        if v.len() < 2 {
            return false;
        }
        let mut i = v.len() - 1;
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = v.len() - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
        true
    }

    /// All k! permutations in lexicographic order.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = Permutation::identity(k);
        loop {
            out.push(cur.clone());
            if !cur.step_lex() {
                return out;
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PermWire {
    images: Vec<usize>,
    sign: i32,
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PermWire {
            images: self.images.iter().map(|&j| j + 1).collect(),
            sign: self.sign(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = PermWire::deserialize(deserializer)?;
        let zero_based: Vec<usize> = wire
            .images
            .iter()
            .map(|&j| {
                j.checked_sub(1)
                    .ok_or_else(|| D::Error::custom("permutation images are 1-based"))
            })
            .collect::<std::result::Result<_, _>>()?;
        let perm = Permutation::from_images(zero_based).map_err(D::Error::custom)?;
        if perm.sign() != wire.sign {
            return Err(D::Error::custom("permutation sign does not match images"));
        }
        Ok(perm)
    }
}
