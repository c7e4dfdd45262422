use std::collections::HashMap;

use super::MarkovError;

/// Ordered set of opaque state keys with a key → position index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpace {
    keys: Vec<String>,
    index: HashMap<String, usize>,
}

impl StateSpace {
    pub fn new(keys: Vec<String>) -> Result<Self, MarkovError> {
        let mut index = HashMap::with_capacity(keys.len());
        for (i, k) in keys.iter().enumerate() {
            if index.insert(k.clone(), i).is_some() {
                return Err(MarkovError::DuplicateState(k.clone()));
            }
        }
        Ok(Self { keys, index })
    }

    /// States named `0`, `1`, ... `n-1`.
    pub fn numbered(n: usize) -> Self {
        Self::new((0..n).map(|i| i.to_string()).collect()).expect("numbered keys are distinct")
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn key(&self, i: usize) -> &str {
        &self.keys[i]
    }

    pub fn position(&self, key: &str) -> Option<usize> {
        self.index.get(key).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_is_inverse_of_lookup() {
        let s = StateSpace::new(vec!["x".into(), "y".into(), "z".into()]).unwrap();
        for (i, k) in s.keys().iter().enumerate() {
            assert_eq!(s.position(k), Some(i));
            assert_eq!(s.key(i), k);
        }
        assert_eq!(s.position("w"), None);
    }

    #[test]
    fn duplicate_keys_rejected() {
        let err = StateSpace::new(vec!["x".into(), "x".into()]).unwrap_err();
        assert_eq!(err, MarkovError::DuplicateState("x".into()));
    }
}
