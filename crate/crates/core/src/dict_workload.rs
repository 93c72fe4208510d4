//! Loop-based insertion and deletion over the standard hash map and ordered
//! tree map. Both use unique-key insert-or-replace semantics.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::prng::KeyValueWorkload;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AdsKind {
    HashMap,
    OrderedTreeMap,
}

impl AdsKind {
    pub const ALL: [AdsKind; 2] = [AdsKind::HashMap, AdsKind::OrderedTreeMap];

    pub fn label(self) -> &'static str {
        match self {
            AdsKind::HashMap => "hash_map",
            AdsKind::OrderedTreeMap => "tree_map",
        }
    }
}

impl fmt::Display for AdsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AdsKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hash_map" => Ok(AdsKind::HashMap),
            "tree_map" => Ok(AdsKind::OrderedTreeMap),
            other => Err(format!("unknown data structure {other:?}")),
        }
    }
}

/// A populated dictionary of either kind.
#[derive(Debug, Clone)]
pub enum Dictionary {
    Hash(HashMap<u64, f64>),
    Tree(BTreeMap<u64, f64>),
}

/// Outcome of a deletion pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DeleteStats {
    pub removed: usize,
    /// Keys that were already gone (later duplicates in the key vector).
    pub absent: usize,
}

impl Dictionary {
    pub fn kind(&self) -> AdsKind {
        match self {
            Dictionary::Hash(_) => AdsKind::HashMap,
            Dictionary::Tree(_) => AdsKind::OrderedTreeMap,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Dictionary::Hash(m) => m.len(),
            Dictionary::Tree(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: u64) -> Option<f64> {
        match self {
            Dictionary::Hash(m) => m.get(&key).copied(),
            Dictionary::Tree(m) => m.get(&key).copied(),
        }
    }

    /// Contents as an association list sorted by key.
    pub fn sorted_entries(&self) -> Vec<(u64, f64)> {
        match self {
            Dictionary::Hash(m) => {
                let mut out: Vec<_> = m.iter().map(|(&k, &v)| (k, v)).collect();
                out.sort_unstable_by_key(|&(k, _)| k);
                out
            }
            Dictionary::Tree(m) => m.iter().map(|(&k, &v)| (k, v)).collect(),
        }
    }
}

/// Inserts every `(key, value)` pair in order, starting from an empty map
/// with no reserved capacity.
pub fn insert_all(ads: AdsKind, w: &KeyValueWorkload) -> Dictionary {
    match ads {
        AdsKind::HashMap => {
            let mut m = HashMap::new();
            for (k, v) in w.iter() {
                m.insert(k, v);
            }
            Dictionary::Hash(m)
        }
        AdsKind::OrderedTreeMap => {
            let mut m = BTreeMap::new();
            for (k, v) in w.iter() {
                m.insert(k, v);
            }
            Dictionary::Tree(m)
        }
    }
}

/// Removes every key of the workload one by one.
pub fn delete_all(d: &mut Dictionary, w: &KeyValueWorkload) -> DeleteStats {
    let mut stats = DeleteStats::default();
    match d {
        Dictionary::Hash(m) => {
            for k in w.keys() {
                if m.remove(k).is_some() {
                    stats.removed += 1;
                } else {
                    stats.absent += 1;
                }
            }
        }
        Dictionary::Tree(m) => {
            for k in w.keys() {
                if m.remove(k).is_some() {
                    stats.removed += 1;
                } else {
                    stats.absent += 1;
                }
            }
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prng::SplitMix64;
    use std::collections::HashSet;

    fn workload(keys: Vec<u64>, values: Vec<f64>) -> KeyValueWorkload {
        KeyValueWorkload::new(keys, values).unwrap()
    }

    #[test]
    fn empty_workload() {
        let w = KeyValueWorkload::default();
        for ads in AdsKind::ALL {
            let mut d = insert_all(ads, &w);
            assert!(d.is_empty());
            assert_eq!(d.kind(), ads);
            assert_eq!(delete_all(&mut d, &w), DeleteStats::default());
            assert!(d.is_empty());
        }
    }

    #[test]
    fn duplicate_key_replaces_then_deletes_once() {
        let w = workload(vec![7, 7], vec![1.0, 2.0]);
        for ads in AdsKind::ALL {
            let mut d = insert_all(ads, &w);
            assert_eq!(d.len(), 1);
            assert_eq!(d.get(7), Some(2.0));
            let stats = delete_all(&mut d, &w);
            assert_eq!(
                stats,
                DeleteStats {
                    removed: 1,
                    absent: 1
                }
            );
            assert!(d.is_empty());
        }
    }

    #[test]
    fn seeded_workload_round_trip() {
        let w = SplitMix64::new(2).make_kv_workload(10_000);
        let distinct: HashSet<u64> = w.keys().iter().copied().collect();
        let hash = insert_all(AdsKind::HashMap, &w);
        let tree = insert_all(AdsKind::OrderedTreeMap, &w);
        assert_eq!(hash.len(), distinct.len());
        assert_eq!(tree.len(), distinct.len());
        assert_eq!(hash.sorted_entries(), tree.sorted_entries());

        for mut d in [hash, tree] {
            delete_all(&mut d, &w);
            assert!(d.is_empty());
        }
    }

    #[test]
    fn labels_round_trip() {
        for ads in AdsKind::ALL {
            assert_eq!(ads.label().parse::<AdsKind>().unwrap(), ads);
        }
        assert!("btree".parse::<AdsKind>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn kinds_agree_and_empty_after_delete(
            keys in proptest::collection::vec(0u64..64, 0..200),
        ) {
            let values = keys.iter().map(|&k| k as f64 + 0.5).collect();
            let w = workload(keys, values);
            let mut hash = insert_all(AdsKind::HashMap, &w);
            let mut tree = insert_all(AdsKind::OrderedTreeMap, &w);
            proptest::prop_assert_eq!(hash.sorted_entries(), tree.sorted_entries());
            let a = delete_all(&mut hash, &w);
            let b = delete_all(&mut tree, &w);
            proptest::prop_assert_eq!(a, b);
            proptest::prop_assert_eq!(a.removed + a.absent, w.len());
            proptest::prop_assert!(hash.is_empty() && tree.is_empty());
        }
    }
}
