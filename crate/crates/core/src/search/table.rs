use std::collections::BTreeSet;
use std::sync::Arc;

use super::{KeywordSetMask, PartialAnswer, TreeEdge};
use crate::graph::{NodeId, Weight};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub entry: Arc<PartialAnswer>,
    /// Superstep in which the entry entered the table.
    pub born: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Absorbed {
    pub kept: usize,
    /// Full-mask entries formed, minimal or not, without repeats.
    pub completed: Vec<PartialAnswer>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Insert {
    Kept,
    /// Same tree already present with an equal or smaller assignment.
    Duplicate,
    /// Outside the per-mask cap.
    Rejected,
}

/// Per keyword-set list of the best partial answers rooted at one vertex.
/// The path-lengths are S_K, the entry node sets V_K.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkVkTable {
    full: KeywordSetMask,
    /// `None` keeps every entry (local-tree filtering off).
    cap: Option<usize>,
    /// Indexed by mask bits; slot 0 is unused.
    lists: Vec<Vec<Slot>>,
}

impl SkVkTable {
    pub fn new(m: usize, cap: Option<usize>) -> Self {
        let full = KeywordSetMask::full(m);
        SkVkTable {
            full,
            cap,
            lists: vec![Vec::new(); full.index() + 1],
        }
    }

    pub fn full_mask(&self) -> KeywordSetMask {
        self.full
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    /// Entries for `mask`, ascending in table order.
    pub fn list(&self, mask: KeywordSetMask) -> &[Slot] {
        &self.lists[mask.index()]
    }

    pub fn len(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn insert(&mut self, entry: Arc<PartialAnswer>, born: usize) -> Insert {
        let list = &mut self.lists[entry.mask.index()];
        if let Some(i) = list
            .iter()
            .position(|s| s.entry.path_length == entry.path_length && s.entry.same_tree(&entry))
        {
            if entry.table_cmp(&list[i].entry).is_lt() {
                list.remove(i);
            } else {
                return Insert::Duplicate;
            }
        }
        let pos = list.partition_point(|s| s.entry.table_cmp(&entry).is_lt());
        if self.cap.is_some_and(|cap| pos >= cap) {
            return Insert::Rejected;
        }
        list.insert(pos, Slot { entry, born });
        if let Some(cap) = self.cap {
            list.truncate(cap);
        }
        Insert::Kept
    }

    /// Inserts already-shifted message entries one at a time and closes the
    /// table under combination of disjoint masks. Entries and combinations
    /// with `path_length >= threshold` are dropped.
    ///
    /// Full-mask combinations are complete answers: they are returned in
    /// [`Absorbed::completed`], never combined further, and stored only when
    /// already minimal under `node_masks`.
    pub fn absorb(
        &mut self,
        incoming: Vec<PartialAnswer>,
        born: usize,
        threshold: Weight,
        node_masks: &[u32],
    ) -> Absorbed {
        let m = self.full.len();
        let mut out = Absorbed::default();
        // incoming entries that missed the cap still combine with later ones
        let mut spilled: Vec<Arc<PartialAnswer>> = Vec::new();
        let mut work: Vec<(PartialAnswer, bool)> = incoming.into_iter().rev().map(|e| (e, true)).collect();
        while let Some((entry, original)) = work.pop() {
            if entry.path_length >= threshold {
                continue;
            }
            if entry.mask == self.full {
                if out.completed.iter().any(|c| c.same_tree(&entry)) {
                    continue;
                }
                if entry.is_minimal(node_masks, m) {
                    match self.insert(Arc::new(entry.clone()), born) {
                        Insert::Kept => out.kept += 1,
                        Insert::Duplicate => continue,
                        Insert::Rejected => {}
                    }
                }
                out.completed.push(entry);
                continue;
            }
            let entry = Arc::new(entry);
            match self.insert(entry.clone(), born) {
                Insert::Kept => out.kept += 1,
                Insert::Duplicate => continue,
                Insert::Rejected if original => spilled.push(entry.clone()),
                Insert::Rejected => continue,
            }
            let free = KeywordSetMask(self.full.bits() & !entry.mask.bits());
            let mut fresh = Vec::new();
            for sub in free.submasks() {
                for slot in &self.lists[sub.index()] {
                    if let Some(c) = entry.combine(&slot.entry) {
                        if c.path_length < threshold {
                            fresh.push(c);
                        }
                    }
                }
            }
            for other in &spilled {
                if let Some(c) = entry.combine(other) {
                    if c.path_length < threshold {
                        fresh.push(c);
                    }
                }
            }
            fresh.sort_by(|a, b| b.table_cmp(a));
            work.extend(fresh.into_iter().map(|c| (c, false)));
        }
        out
    }

    /// Entries born in `superstep`, by mask then table order.
    pub fn delta(&self, superstep: usize) -> Vec<Arc<PartialAnswer>> {
        self.lists
            .iter()
            .flatten()
            .filter(|s| s.born == superstep)
            .map(|s| s.entry.clone())
            .collect()
    }

    /// Smallest path-length per mask among entries born in `superstep`.
    pub fn delta_minima(&self, superstep: usize) -> Vec<Option<Weight>> {
        self.lists
            .iter()
            .map(|l| l.iter().filter(|s| s.born == superstep).map(|s| s.entry.path_length).min())
            .collect()
    }

    /// Smallest path-length per mask over the whole table.
    pub fn minima(&self) -> Vec<Option<Weight>> {
        self.lists.iter().map(|l| l.first().map(|s| s.entry.path_length)).collect()
    }

    /// Union of the edges and nodes of every stored entry.
    pub fn local_tree(&self) -> (BTreeSet<TreeEdge>, BTreeSet<NodeId>) {
        let mut edges = BTreeSet::new();
        let mut nodes = BTreeSet::new();
        for slot in self.lists.iter().flatten() {
            edges.extend(slot.entry.edges.iter().copied());
            nodes.extend(slot.entry.nodes.iter().copied());
        }
        (edges, nodes)
    }

    /// Keeps the top `k` entries of every mask and returns the edges that
    /// no longer belong to any retained entry.
    pub fn filter_local_tree(&mut self, k: usize) -> Vec<TreeEdge> {
        let (before, _) = self.local_tree();
        for list in &mut self.lists {
            list.truncate(k);
        }
        let (after, _) = self.local_tree();
        before.difference(&after).copied().collect()
    }
}
