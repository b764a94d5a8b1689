//! Finite posets, coherent linear orders and adjacent-transposition paths
//! between coherent orders.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A linear order written as the sequence of its elements, smallest first.
pub type LinearOrder = Vec<String>;

/// A strict partial order given by generating pairs `a < b`. The order used
/// is the transitive closure of `less_than`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poset {
    pub elements: Vec<String>,
    pub less_than: Vec<(String, String)>,
}

/// A poset with its transitive closure materialized.
#[derive(Clone, Debug)]
pub struct ClosedPoset {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    /// `below[b]` holds every `a` with `a < b`.
    below: Vec<BTreeSet<usize>>,
}

impl Poset {
    pub fn new(elements: Vec<String>, less_than: Vec<(String, String)>) -> Self {
        Poset { elements, less_than }
    }

    /// Checks element uniqueness, known endpoints and irreflexivity of the
    /// closure (i.e. acyclicity).
    pub fn close(&self) -> Result<ClosedPoset> {
        let mut index = HashMap::new();
        for (i, e) in self.elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::Parse(format!("poset element `{e}` listed twice")));
            }
        }
        let n = self.elements.len();
        let mut direct: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (a, b) in &self.less_than {
            let ia = *index.get(a).ok_or_else(|| Error::Parse(format!("unknown poset element `{a}`")))?;
            let ib = *index.get(b).ok_or_else(|| Error::Parse(format!("unknown poset element `{b}`")))?;
            direct[ib].insert(ia);
        }
        // Warshall-style closure; n is small.
        let mut below = direct;
        loop {
            let mut changed = false;
            for b in 0..n {
                let extra: BTreeSet<usize> = below[b]
                    .iter()
                    .flat_map(|&a| below[a].iter().copied())
                    .filter(|x| !below[b].contains(x))
                    .collect();
                if !extra.is_empty() {
                    below[b].extend(extra);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if let Some(e) = (0..n).find(|&i| below[i].contains(&i)) {
            return Err(Error::Parse(format!(
                "relation is not a strict partial order (cycle through `{}`)",
                self.elements[e]
            )));
        }
        Ok(ClosedPoset {
            elements: self.elements.clone(),
            index,
            below,
        })
    }
}

impl ClosedPoset {
    pub fn less(&self, a: &str, b: &str) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&ia), Some(&ib)) => self.below[ib].contains(&ia),
            _ => false,
        }
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    /// `order` is a permutation of the elements with `a < b` in the poset
    /// implying `a` before `b`.
    pub fn check_coherent(&self, order: &[String]) -> Result<()> {
        let pos = self.positions(order)?;
        for (b, below) in self.below.iter().enumerate() {
            for &a in below {
                if pos[a] > pos[b] {
                    return Err(Error::IncoherentOrder(format!(
                        "`{}` precedes `{}` in the poset but not in the order",
                        self.elements[a], self.elements[b]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_coherent(&self, order: &[String]) -> bool {
        self.check_coherent(order).is_ok()
    }

    /// Position of each element (by element index) in `order`.
    fn positions(&self, order: &[String]) -> Result<Vec<usize>> {
        let n = self.elements.len();
        if order.len() != n {
            return Err(Error::IncoherentOrder(format!("order has {} elements, poset has {n}", order.len())));
        }
        let mut pos = vec![usize::MAX; n];
        for (p, e) in order.iter().enumerate() {
            let i = *self
                .index
                .get(e)
                .ok_or_else(|| Error::IncoherentOrder(format!("unknown element `{e}`")))?;
            if pos[i] != usize::MAX {
                return Err(Error::IncoherentOrder(format!("element `{e}` repeated")));
            }
            pos[i] = p;
        }
        Ok(pos)
    }
}

/// Number of pairs ordered one way by `a` and the other way by `b`.
pub fn differentiating_pairs(a: &[String], b: &[String]) -> usize {
    let pos_b: HashMap<&str, usize> = b.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
    let mut count = 0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if pos_b[a[i].as_str()] > pos_b[a[j].as_str()] {
                count += 1;
            }
        }
    }
    count
}

/// Transforms `from` into `to` by adjacent transpositions, every
/// intermediate order coherent with `poset`. Each step swaps the earliest
/// adjacent pair of `from`'s current order that `to` orders the other way,
/// so the number of steps is the number of differentiating pairs.
///
/// The returned path starts with `from` and ends with `to`.
pub fn transposition_path(poset: &Poset, from: &[String], to: &[String]) -> Result<Vec<LinearOrder>> {
    let closed = poset.close()?;
    closed.check_coherent(from)?;
    closed.check_coherent(to)?;
    let target: HashMap<&str, usize> = to.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
    let mut current: LinearOrder = from.to_vec();
    let mut path = vec![current.clone()];
    loop {
        let swap_at = (0..current.len().saturating_sub(1))
            .find(|&i| target[current[i].as_str()] > target[current[i + 1].as_str()]);
        let Some(i) = swap_at else { break };
        // a differentiating pair of two coherent orders is incomparable
        debug_assert!(!closed.less(&current[i], &current[i + 1]));
        current.swap(i, i + 1);
        path.push(current.clone());
    }
    debug_assert_eq!(current, to);
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(s: &[&str]) -> LinearOrder {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn identical_orders_give_empty_path() {
        let p = Poset::new(order(&["a", "b"]), vec![]);
        let path = transposition_path(&p, &order(&["a", "b"]), &order(&["a", "b"])).unwrap();
        assert_eq!(path, vec![order(&["a", "b"])]);
    }

    #[test]
    fn single_swap() {
        let p = Poset::new(order(&["a", "b"]), vec![]);
        let path = transposition_path(&p, &order(&["a", "b"]), &order(&["b", "a"])).unwrap();
        assert_eq!(path.len() - 1, 1);
        assert_eq!(path.last().unwrap(), &order(&["b", "a"]));
    }

    #[test]
    fn incoherent_input_is_rejected() {
        let p = Poset::new(order(&["a", "b"]), vec![("a".into(), "b".into())]);
        assert!(matches!(
            transposition_path(&p, &order(&["b", "a"]), &order(&["a", "b"])),
            Err(Error::IncoherentOrder(_))
        ));
        assert!(transposition_path(&p, &order(&["a"]), &order(&["a", "b"])).is_err());
    }

    #[test]
    fn cyclic_relation_is_rejected() {
        let p = Poset::new(order(&["a", "b"]), vec![("a".into(), "b".into()), ("b".into(), "a".into())]);
        assert!(p.close().is_err());
    }

    #[test]
    fn closure_is_transitive() {
        let p = Poset::new(order(&["a", "b", "c"]), vec![("a".into(), "b".into()), ("b".into(), "c".into())]);
        let c = p.close().unwrap();
        assert!(c.less("a", "c"));
        assert!(!c.is_coherent(&order(&["b", "c", "a"])));
        // middle element forced, so a->c path stays put
        assert!(transposition_path(&p, &order(&["a", "b", "c"]), &order(&["a", "b", "c"])).unwrap().len() == 1);
    }
}
