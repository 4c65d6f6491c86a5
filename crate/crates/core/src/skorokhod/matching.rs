//! Maximum bipartite matching (Hopcroft-Karp).

use std::collections::VecDeque;

const NIL: usize = usize::MAX;

/// Maximum matching of left vertices `0..left` to right vertices `0..right`
/// along `adjacency[left_vertex]`. Returns each left vertex's partner.
pub fn max_bipartite_matching(left: usize, right: usize, adjacency: &[Vec<usize>]) -> Vec<Option<usize>> {
    let mut mate_l = vec![NIL; left];
    let mut mate_r = vec![NIL; right];
    let mut dist = vec![u32::MAX; left];
    let mut queue = VecDeque::new();
    // greedy start
    for u in 0..left {
        if let Some(&v) = adjacency[u].iter().find(|&&v| mate_r[v] == NIL) {
            mate_l[u] = v;
            mate_r[v] = u;
        }
    }
    loop {
        // layer the free left vertices
        queue.clear();
        for u in 0..left {
            if mate_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                let w = mate_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; left];
        for u in 0..left {
            if mate_l[u] == NIL {
                augment(u, adjacency, &mut mate_l, &mut mate_r, &mut dist, &mut next);
            }
        }
    }
    mate_l.into_iter().map(|v| (v != NIL).then_some(v)).collect()
}

/// Iterative depth-first search for an augmenting path along the layers.
fn augment(
    root: usize,
    adjacency: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [u32],
    next: &mut [usize],
) -> bool {
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if next[u] == adjacency[u].len() {
            dist[u] = u32::MAX;
            stack.pop();
            continue;
        }
        let v = adjacency[u][next[u]];
        next[u] += 1;
        let w = mate_r[v];
        if w == NIL {
            // flip the path recorded on the stack
            let mut v = v;
            while let Some(u) = stack.pop() {
                let prev = mate_l[u];
                mate_l[u] = v;
                mate_r[v] = u;
                v = prev;
            }
            return true;
        }
        if dist[w] == dist[u] + 1 {
            stack.push(w);
        }
    }
    false
}
