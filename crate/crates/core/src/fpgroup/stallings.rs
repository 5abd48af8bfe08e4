use std::collections::HashMap;

use super::word::{gen_of, Letter, Word};

/// Folded Stallings graph of a finitely generated subgroup of a free group.
#[derive(Clone, Debug)]
pub struct StallingsGraph {
    base: usize,
    next: HashMap<(usize, Letter), usize>,
    n_vertices: usize,
}

fn find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

impl StallingsGraph {
    pub fn new(gens: &[Word]) -> Self {
        let mut n = 1;
        let mut edges: Vec<(usize, usize, usize)> = Vec::new();
        for w in gens {
            let ls = w.letters();
            let mut v = 0;
            for (i, &l) in ls.iter().enumerate() {
                let t = if i + 1 == ls.len() {
                    0
                } else {
                    n += 1;
                    n - 1
                };
                if l > 0 {
                    edges.push((v, gen_of(l), t));
                } else {
                    edges.push((t, gen_of(l), v));
                }
                v = t;
            }
        }
        let mut uf: Vec<usize> = (0..n).collect();
        let next = loop {
            let mut next: HashMap<(usize, Letter), usize> = HashMap::new();
            let mut changed = false;
            for &(a, g, b) in &edges {
                let ra = find(&mut uf, a);
                let rb = find(&mut uf, b);
                let l = g as Letter + 1;
                for (from, lab, to) in [(ra, l, rb), (rb, -l, ra)] {
                    match next.get(&(from, lab)) {
                        Some(&t) if t != to => {
                            let (x, y) = (find(&mut uf, t), find(&mut uf, to));
                            if x != y {
                                uf[x.max(y)] = x.min(y);
                                changed = true;
                            }
                        }
                        Some(_) => {}
                        None => {
                            next.insert((from, lab), to);
                        }
                    }
                }
            }
            if !changed {
                break next;
            }
        };
        let base = find(&mut uf, 0);
        let n_vertices = (0..n).filter(|&v| find(&mut uf, v) == v).count();
        StallingsGraph { base, next, n_vertices }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Number of positive edges; the subgroup rank is `edges - vertices + 1`.
    pub fn n_edges(&self) -> usize {
        self.next.keys().filter(|(_, l)| *l > 0).count()
    }

    pub fn rank(&self) -> usize {
        self.n_edges() + 1 - self.n_vertices
    }

    pub fn contains(&self, w: &Word) -> bool {
        let mut v = self.base;
        for &l in w.letters() {
            match self.next.get(&(v, l)) {
                Some(&t) => v = t,
                None => return false,
            }
        }
        v == self.base
    }
}

/// Whether the subgroups of a free group generated by `a` and by `b` coincide.
pub fn same_subgroup(a: &[Word], b: &[Word]) -> bool {
    let ga = StallingsGraph::new(a);
    let gb = StallingsGraph::new(b);
    b.iter().all(|w| ga.contains(w)) && a.iter().all(|w| gb.contains(w))
}

/// Membership of `w` in the subgroup of the free group of rank `free_rank` generated by `sub_gens`.
pub fn stallings_membership(free_rank: usize, sub_gens: &[Word], w: &Word) -> bool {
    debug_assert!(sub_gens
        .iter()
        .chain([w])
        .all(|x| x.max_gen().is_none_or(|g| g < free_rank)));
    StallingsGraph::new(sub_gens).contains(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_and_membership() {
        let a = Word::gen(0);
        let b = Word::gen(1);
        let g = StallingsGraph::new(&[a.pow(2), b.conjugate_by(&a)]);
        assert!(g.contains(&a.pow(4)));
        assert!(g.contains(&a.mul(&b).mul(&a)));
        assert!(!g.contains(&a));
        assert!(!g.contains(&b));
        assert_eq!(g.rank(), 2);
        // folding merges a, a b a^-1 a = a b into one graph
        let h = StallingsGraph::new(&[a.clone(), a.mul(&b)]);
        assert!(h.contains(&b));
        assert_eq!(h.rank(), 2);
        assert_eq!(h.n_vertices(), 1);
    }

    #[test]
    fn index_p_kernel_basis() {
        // kernel of F(2) -> Z/2, a -> 1, b -> 0: free of rank 3
        let a = Word::gen(0);
        let b = Word::gen(1);
        let basis = [a.pow(2), b.clone(), b.conjugate_by(&a)];
        let g = StallingsGraph::new(&basis);
        assert_eq!(g.rank(), 3);
        assert_eq!(g.n_vertices(), 2);
        assert!(same_subgroup(&basis, &[a.pow(2), b.clone(), a.mul(&b).mul(&a)]));
        assert!(!same_subgroup(&basis, &[a.pow(2), b.clone()]));
        assert!(!stallings_membership(2, &basis, &a));
        assert!(stallings_membership(2, &basis, &b.pow(2).conjugate_by(&a)));
        assert!(stallings_membership(2, &basis, &basis[2]));
    }
}
