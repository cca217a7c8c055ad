//! The minimum spanning tree of patches.
//!
//! Vertices hold only a fitness value and an alive flag. Edges hold the patch
//! between their endpoints, and the edge set is kept a minimum spanning tree of
//! the stored individuals under Hamming distance. One bit string, the
//! *complete individual*, equals the individual at the *anchor* vertex; every
//! other individual is reached from it by applying patches along tree paths.
//!
//! Every operator works through the scratch [`IndexSet`]:
//!
//! 1. the complete individual is moved to the (first) parent;
//! 2. the scratch set is filled with the positions to flip;
//! 3. the flip set is applied to the complete individual while the fitness is
//!    updated incrementally;
//! 4. a depth-first traversal merges edge patches into the scratch set, which
//!    yields the distance from the offspring to every vertex;
//! 5. the tree is updated to the minimum spanning tree of the old tree plus
//!    all edges to the offspring, in one bottom-up pass.
//!
//! Discarded vertices stay in the tree while they are needed to connect
//! others and are removed as soon as they become leaves.

use std::fmt::Write as _;

use rand::Rng;
use rustc_hash::FxHashMap;

use super::{NodeId, PopulationStore};
use crate::error::{Error, Result};
use crate::fitness::{Evaluator, FitnessValue};
use crate::index_patch::{BitString, IndexSet, Patch};
use crate::operators::{binomial, CrossoverSpec};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Adj {
    to: u32,
    edge: u32,
}

#[derive(Debug)]
struct Vertex {
    id: NodeId,
    fitness: FitnessValue,
    alive: bool,
    adj: Vec<Adj>,
}

#[derive(Debug)]
struct Edge {
    ends: [u32; 2],
    patch: Patch,
}

/// Candidate edge during the insertion pass.
#[derive(Clone, Copy, Debug)]
enum Candidate {
    /// The tree edge from this vertex to its parent in the traversal.
    Tree(u32),
    /// A new edge from the offspring to this vertex.
    New(u32),
}

/// Store backed by a minimum spanning tree of patches.
#[derive(Debug)]
pub struct PopulationTree {
    evaluator: Evaluator,
    vertices: Vec<Option<Vertex>>,
    free_vertices: Vec<u32>,
    slot_of: FxHashMap<NodeId, u32>,
    edges: Vec<Option<Edge>>,
    free_edges: Vec<u32>,
    next_id: u64,
    complete: BitString,
    anchor: u32,
    scratch: IndexSet,
    total_weight: u64,
    alive: usize,
    // Traversal buffers, indexed by vertex slot.
    parent: Vec<u32>,
    parent_edge: Vec<u32>,
    dist: Vec<u32>,
    rank: Vec<u32>,
    best: Vec<Candidate>,
    order: Vec<u32>,
    stack: Vec<(u32, u32)>,
}

impl PopulationTree {
    /// The vertex whose individual currently equals [`Self::complete`].
    pub fn anchor(&self) -> NodeId {
        self.vertex(self.anchor).id
    }

    pub fn complete(&self) -> &BitString {
        &self.complete
    }

    /// Number of stored vertices, discarded ones included.
    pub fn vertex_count(&self) -> usize {
        self.slot_of.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len() - self.free_edges.len()
    }

    /// Ids of all stored vertices in increasing order.
    pub fn node_ids(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = self.slot_of.keys().copied().collect();
        ids.sort_unstable();
        ids
    }

    /// Moves the complete individual to `x` by applying the patches on the
    /// path from the anchor.
    pub fn promote(&mut self, x: NodeId) -> Result<()> {
        let slot = self.slot(x)?;
        self.promote_slot(slot);
        Ok(())
    }

    /// Text dump, one line per vertex then one per edge:
    /// `vertex <id> fitness=<f> alive=<0|1>` and `edge <a> <b> <k> <i_1> .. <i_k>`,
    /// sorted by id with `a < b`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for id in self.node_ids() {
            let v = self.vertex(self.slot_of[&id]);
            writeln!(out, "vertex {} fitness={} alive={}", id, v.fitness, v.alive as u8).unwrap();
        }
        let mut lines: Vec<(NodeId, NodeId, &Patch)> = self
            .edges
            .iter()
            .flatten()
            .map(|e| {
                let (a, b) = (self.vertex(e.ends[0]).id, self.vertex(e.ends[1]).id);
                (a.min(b), a.max(b), &e.patch)
            })
            .collect();
        lines.sort_by_key(|&(a, b, _)| (a, b));
        for (a, b, p) in lines {
            write!(out, "edge {a} {b} {}", p.len()).unwrap();
            for i in p.iter() {
                write!(out, " {i}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Exhaustive consistency check, `O(vertices · n)`: tree shape, lazy
    /// removal, cached totals, and stored fitness against a full evaluation
    /// of every reconstructed individual.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let count = self.vertex_count();
        if self.edge_count() + 1 != count {
            return Err(format!("{} edges for {count} vertices", self.edge_count()));
        }
        let mut bits: Vec<Option<BitString>> = vec![None; self.vertices.len()];
        bits[self.anchor as usize] = Some(self.complete.clone());
        let mut queue = vec![self.anchor];
        let mut reached = 1;
        while let Some(v) = queue.pop() {
            let here = bits[v as usize].clone().unwrap();
            for a in &self.vertex(v).adj {
                if bits[a.to as usize].is_none() {
                    let mut next = here.clone();
                    next.apply(&self.edge(a.edge).patch).map_err(|e| e.to_string())?;
                    bits[a.to as usize] = Some(next);
                    queue.push(a.to);
                    reached += 1;
                }
            }
        }
        if reached != count {
            return Err(format!("reached {reached} of {count} vertices"));
        }
        let mut weight = 0u64;
        let mut alive = 0;
        for (slot, v) in self.vertices.iter().enumerate() {
            let Some(v) = v else { continue };
            let full = self
                .evaluator
                .evaluate(bits[slot].as_ref().unwrap())
                .map_err(|e| e.to_string())?;
            if full != v.fitness {
                return Err(format!("vertex {} stores {} but evaluates to {full}", v.id, v.fitness));
            }
            if !v.alive && v.adj.len() <= 1 {
                return Err(format!("discarded vertex {} has degree {}", v.id, v.adj.len()));
            }
            alive += v.alive as usize;
            for a in &v.adj {
                let e = self.edge(a.edge);
                if !e.ends.contains(&(slot as u32)) || !e.ends.contains(&a.to) {
                    return Err(format!("adjacency of {} disagrees with edge endpoints", v.id));
                }
                let expected = bits[slot].as_ref().unwrap().difference(bits[a.to as usize].as_ref().unwrap());
                if expected.as_ref() != Ok(&e.patch) {
                    return Err(format!("edge patch at vertex {} is not the difference", v.id));
                }
                weight += e.patch.len() as u64;
            }
        }
        if weight != 2 * self.total_weight {
            return Err(format!("cached weight {} but edges sum to {}", self.total_weight, weight / 2));
        }
        if alive != self.alive {
            return Err(format!("cached alive count {} but {alive} alive", self.alive));
        }
        Ok(())
    }

    fn vertex(&self, slot: u32) -> &Vertex {
        self.vertices[slot as usize].as_ref().expect("live vertex slot")
    }

    fn vertex_mut(&mut self, slot: u32) -> &mut Vertex {
        self.vertices[slot as usize].as_mut().expect("live vertex slot")
    }

    fn edge(&self, e: u32) -> &Edge {
        self.edges[e as usize].as_ref().expect("live edge slot")
    }

    fn slot(&self, id: NodeId) -> Result<u32> {
        match self.slot_of.get(&id) {
            Some(&s) => Ok(s),
            None if id.0 < self.next_id => Err(Error::NodeRemoved(id)),
            None => Err(Error::UnknownNode(id)),
        }
    }

    fn alive_slot(&self, id: NodeId) -> Result<u32> {
        let slot = self.slot(id)?;
        if self.vertex(slot).alive {
            Ok(slot)
        } else {
            Err(Error::NodeDiscarded(id))
        }
    }

    fn new_vertex(&mut self, fitness: FitnessValue) -> u32 {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        let vertex = Vertex {
            id,
            fitness,
            alive: true,
            adj: Vec::new(),
        };
        let slot = match self.free_vertices.pop() {
            Some(s) => {
                self.vertices[s as usize] = Some(vertex);
                s
            }
            None => {
                self.vertices.push(Some(vertex));
                self.parent.push(NONE);
                self.parent_edge.push(NONE);
                self.dist.push(0);
                self.rank.push(0);
                self.best.push(Candidate::New(0));
                (self.vertices.len() - 1) as u32
            }
        };
        self.slot_of.insert(id, slot);
        self.alive += 1;
        slot
    }

    fn add_edge(&mut self, a: u32, b: u32, patch: Patch) {
        self.total_weight += patch.len() as u64;
        let edge = Edge { ends: [a, b], patch };
        let e = match self.free_edges.pop() {
            Some(e) => {
                self.edges[e as usize] = Some(edge);
                e
            }
            None => {
                self.edges.push(Some(edge));
                (self.edges.len() - 1) as u32
            }
        };
        self.vertex_mut(a).adj.push(Adj { to: b, edge: e });
        self.vertex_mut(b).adj.push(Adj { to: a, edge: e });
    }

    fn remove_edge(&mut self, e: u32) -> Edge {
        let edge = self.edges[e as usize].take().expect("live edge slot");
        self.free_edges.push(e);
        self.total_weight -= edge.patch.len() as u64;
        for &end in &edge.ends {
            let adj = &mut self.vertex_mut(end).adj;
            let pos = adj.iter().position(|a| a.edge == e).expect("edge in adjacency");
            adj.swap_remove(pos);
        }
        edge
    }

    /// Physically removes `slot` and then its neighbours, for as long as the
    /// current vertex is discarded and a leaf.
    fn prune(&mut self, mut slot: u32) {
        loop {
            let v = self.vertex(slot);
            if v.alive || v.adj.len() != 1 {
                return;
            }
            let Adj { to, edge } = v.adj[0];
            let edge = self.remove_edge(edge);
            if slot == self.anchor {
                self.complete.apply_unchecked(edge.patch.as_slice());
                self.anchor = to;
            }
            let v = self.vertices[slot as usize].take().unwrap();
            self.slot_of.remove(&v.id);
            self.free_vertices.push(slot);
            slot = to;
        }
    }

    /// Depth-first search from `from` (no patch merging) until `to` is found.
    /// Afterwards `parent`/`parent_edge` lead from `to` back to `from`.
    fn search_path(&mut self, from: u32, to: u32) {
        self.parent[from as usize] = NONE;
        if from == to {
            return;
        }
        self.stack.clear();
        self.stack.push((from, 0));
        while let Some((v, _)) = self.stack.pop() {
            let vertex = self.vertices[v as usize].as_ref().unwrap();
            for a in &vertex.adj {
                if a.to == self.parent[v as usize] {
                    continue;
                }
                self.parent[a.to as usize] = v;
                self.parent_edge[a.to as usize] = a.edge;
                if a.to == to {
                    return;
                }
                self.stack.push((a.to, 0));
            }
        }
        unreachable!("tree is connected");
    }

    fn promote_slot(&mut self, slot: u32) {
        if slot == self.anchor {
            return;
        }
        self.search_path(slot, self.anchor);
        let mut v = self.anchor;
        while v != slot {
            let e = self.parent_edge[v as usize];
            let patch = &self.edges[e as usize].as_ref().unwrap().patch;
            self.complete.apply_unchecked(patch.as_slice());
            v = self.parent[v as usize];
        }
        self.anchor = slot;
    }

    /// Toggles into the scratch set every patch on the path between the two
    /// vertices, i.e. merges in their difference.
    fn merge_difference(&mut self, a: u32, b: u32) {
        self.search_path(a, b);
        let mut v = b;
        while v != a {
            let e = self.parent_edge[v as usize];
            let patch = &self.edges[e as usize].as_ref().unwrap().patch;
            self.scratch.merge_unchecked(patch.as_slice());
            v = self.parent[v as usize];
        }
    }

    /// Full traversal from `root`. On entry the scratch set holds
    /// `offspring ⊕ root`; merging each edge patch on the way down keeps it at
    /// `offspring ⊕ v`, so its size is the distance to `v`. Fills `order`
    /// (preorder), `parent`, `parent_edge`, `dist` and `rank`, and leaves the
    /// scratch set as it found it.
    fn gather_distances(&mut self, root: u32) {
        let Self {
            vertices,
            edges,
            scratch,
            parent,
            parent_edge,
            dist,
            rank,
            order,
            stack,
            ..
        } = self;
        order.clear();
        stack.clear();
        parent[root as usize] = NONE;
        dist[root as usize] = scratch.len() as u32;
        rank[root as usize] = 0;
        order.push(root);
        stack.push((root, 0));
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            let adj = &vertices[v as usize].as_ref().unwrap().adj;
            if let Some(&a) = adj.get(next as usize) {
                top.1 += 1;
                if a.to == parent[v as usize] {
                    continue;
                }
                scratch.merge_unchecked(edges[a.edge as usize].as_ref().unwrap().patch.as_slice());
                let w = a.to as usize;
                parent[w] = v;
                parent_edge[w] = a.edge;
                dist[w] = scratch.len() as u32;
                rank[w] = order.len() as u32;
                order.push(a.to);
                stack.push((a.to, 0));
            } else {
                stack.pop();
                if v != root {
                    let e = parent_edge[v as usize];
                    scratch.merge_unchecked(edges[e as usize].as_ref().unwrap().patch.as_slice());
                }
            }
        }
    }

    /// Order on candidate edges: by weight, then existing tree edges before
    /// new ones, then by traversal order.
    fn key(&self, c: Candidate) -> (u32, u8, u32) {
        match c {
            Candidate::Tree(child) => {
                let e = self.parent_edge[child as usize];
                (self.edge(e).patch.len() as u32, 0, self.rank[child as usize])
            }
            Candidate::New(v) => (self.dist[v as usize], 1, self.rank[v as usize]),
        }
    }

    /// One bottom-up pass over the traversal from `root` computing the minimum
    /// spanning tree of the current tree plus an edge from the offspring to
    /// every vertex. Each subtree reports the heaviest edge on its path to the
    /// offspring; joining a child subtree closes one cycle through the parent,
    /// and the heaviest of the three candidate edges on it is dropped.
    ///
    /// Returns the tree edges to drop and the vertices the offspring attaches
    /// to.
    fn plan_insertion(&mut self, root: u32) -> (Vec<u32>, Vec<u32>) {
        let mut dropped = Vec::new();
        let mut attach = Vec::new();
        for i in 0..self.order.len() {
            let v = self.order[i];
            self.best[v as usize] = Candidate::New(v);
        }
        for i in (1..self.order.len()).rev() {
            let w = self.order[i];
            let p = self.parent[w as usize];
            let up = self.best[w as usize];
            let tree = Candidate::Tree(w);
            let (keep, heavy) = if self.key(up) < self.key(tree) {
                (up, tree)
            } else {
                (tree, up)
            };
            if let Candidate::New(v) = keep {
                attach.push(v);
            }
            let incumbent = self.best[p as usize];
            let loser = if self.key(heavy) < self.key(incumbent) {
                self.best[p as usize] = heavy;
                incumbent
            } else {
                heavy
            };
            if let Candidate::Tree(child) = loser {
                dropped.push(self.parent_edge[child as usize]);
            }
        }
        if let Candidate::New(v) = self.best[root as usize] {
            attach.push(v);
        }
        (dropped, attach)
    }

    /// Steps 3 to 5 of every operator. The anchor is the (first) parent and
    /// the scratch set holds the positions to flip.
    fn insert_offspring(&mut self) -> NodeId {
        let root = self.anchor;
        let flips = self.scratch.snapshot();
        self.complete.apply_unchecked(flips.as_slice());
        let fitness =
            self.evaluator
                .delta(self.vertex(root).fitness, flips.as_slice(), &self.complete);

        self.gather_distances(root);
        let (dropped, attach) = self.plan_insertion(root);

        // Patches for the new edges, taken before any tree edge is freed.
        let mut patches = Vec::with_capacity(attach.len());
        for &v in &attach {
            if v == root {
                patches.push(flips.clone());
                continue;
            }
            self.walk_to_root(v);
            patches.push(self.scratch.snapshot());
            self.walk_to_root(v);
        }

        let mut touched = Vec::with_capacity(2 * dropped.len());
        for e in dropped {
            touched.extend(self.remove_edge(e).ends);
        }
        let z = self.new_vertex(fitness);
        for (v, patch) in attach.into_iter().zip(patches) {
            self.add_edge(z, v, patch);
        }
        self.anchor = z;
        for v in touched {
            if self.vertices[v as usize].is_some() {
                self.prune(v);
            }
        }
        self.scratch.clear();
        self.vertex(z).id
    }

    /// Merges the patches on the traversal path from `v` up to the root.
    fn walk_to_root(&mut self, mut v: u32) {
        while self.parent[v as usize] != NONE {
            let e = self.parent_edge[v as usize];
            self.scratch
                .merge_unchecked(self.edges[e as usize].as_ref().unwrap().patch.as_slice());
            v = self.parent[v as usize];
        }
    }

    fn mutate_slot<R: Rng + ?Sized>(&mut self, slot: u32, flips: usize, rng: &mut R) -> NodeId {
        self.promote_slot(slot);
        self.scratch.clear();
        for _ in 0..flips {
            self.scratch.add_random_absent(rng).expect("flips <= n");
        }
        self.insert_offspring()
    }
}

impl PopulationStore for PopulationTree {
    fn create<R: Rng + ?Sized>(n: usize, evaluator: Evaluator, rng: &mut R) -> Result<(Self, NodeId)> {
        if n == 0 {
            return Err(Error::EmptyUniverse);
        }
        Self::from_individual(BitString::random(n, rng), evaluator)
    }

    fn from_individual(bits: BitString, evaluator: Evaluator) -> Result<(Self, NodeId)> {
        let fitness = evaluator.evaluate(&bits)?;
        let mut store = Self {
            scratch: IndexSet::new(bits.len())?,
            evaluator,
            vertices: Vec::new(),
            free_vertices: Vec::new(),
            slot_of: FxHashMap::default(),
            edges: Vec::new(),
            free_edges: Vec::new(),
            next_id: 0,
            complete: bits,
            anchor: 0,
            total_weight: 0,
            alive: 0,
            parent: Vec::new(),
            parent_edge: Vec::new(),
            dist: Vec::new(),
            rank: Vec::new(),
            best: Vec::new(),
            order: Vec::new(),
            stack: Vec::new(),
        };
        store.anchor = store.new_vertex(fitness);
        let id = store.anchor();
        Ok((store, id))
    }

    fn bit_len(&self) -> usize {
        self.complete.len()
    }

    fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    fn alive_count(&self) -> usize {
        self.alive
    }

    /// Mutates the anchor with `ℓ ~ Bin(n, 1/2)` flips, which makes the
    /// offspring uniform over all bit strings whatever the anchor is.
    fn add_random<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<NodeId> {
        let flips = binomial(self.bit_len(), 0.5, rng);
        Ok(self.mutate_slot(self.anchor, flips, rng))
    }

    fn mutate<R: Rng + ?Sized>(&mut self, parent: NodeId, flips: usize, rng: &mut R) -> Result<NodeId> {
        let n = self.bit_len();
        if flips > n {
            return Err(Error::TooManyFlips { flips, n });
        }
        let slot = self.alive_slot(parent)?;
        Ok(self.mutate_slot(slot, flips, rng))
    }

    fn mutate_explicit(&mut self, parent: NodeId, flips: &Patch) -> Result<NodeId> {
        flips.check_bounds(self.bit_len())?;
        let slot = self.alive_slot(parent)?;
        self.promote_slot(slot);
        self.scratch.clear();
        self.scratch.merge_unchecked(flips.as_slice());
        Ok(self.insert_offspring())
    }

    fn crossover<C: CrossoverSpec, R: Rng + ?Sized>(
        &mut self,
        first: NodeId,
        second: NodeId,
        spec: &C,
        rng: &mut R,
    ) -> Result<NodeId> {
        let a = self.alive_slot(first)?;
        let b = self.alive_slot(second)?;
        let n = self.bit_len();
        self.promote_slot(a);
        self.scratch.clear();
        self.merge_difference(a, b);
        let d = self.scratch.len();
        let (differing, same) = spec.sample(d, n, rng);
        if differing > d || same > n - d {
            self.scratch.clear();
            return Err(Error::CrossoverOutOfRange {
                differing,
                same,
                distance: d,
                n,
            });
        }
        self.scratch
            .flip_random(same, d - differing, rng)
            .expect("counts checked above");
        Ok(self.insert_offspring())
    }

    fn difference(&mut self, a: NodeId, b: NodeId) -> Result<Patch> {
        let (a, b) = (self.slot(a)?, self.slot(b)?);
        self.scratch.clear();
        self.merge_difference(a, b);
        let out = self.scratch.snapshot();
        self.scratch.clear();
        Ok(out)
    }

    fn discard(&mut self, x: NodeId) -> Result<()> {
        let slot = self.alive_slot(x)?;
        if self.alive == 1 {
            return Err(Error::LastAlive(x));
        }
        self.vertex_mut(slot).alive = false;
        self.alive -= 1;
        self.prune(slot);
        Ok(())
    }

    fn fitness(&self, x: NodeId) -> Result<FitnessValue> {
        Ok(self.vertex(self.slot(x)?).fitness)
    }

    fn is_alive(&self, x: NodeId) -> Result<bool> {
        match self.slot(x) {
            Ok(slot) => Ok(self.vertex(slot).alive),
            Err(Error::NodeRemoved(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }

    fn total_patch_size(&self) -> u64 {
        self.total_weight
    }

    fn bits_of(&mut self, x: NodeId) -> Result<BitString> {
        let slot = self.slot(x)?;
        let mut bits = self.complete.clone();
        self.search_path(slot, self.anchor);
        let mut v = self.anchor;
        while v != slot {
            let e = self.parent_edge[v as usize];
            bits.apply_unchecked(self.edge(e).patch.as_slice());
            v = self.parent[v as usize];
        }
        Ok(bits)
    }
}
