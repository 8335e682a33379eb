//! Maximum-cardinality bipartite matching (Hopcroft-Karp).

use std::collections::VecDeque;

const FREE: usize = usize::MAX;

/// Size of a maximum matching between `adjacency.len()` left vertices and
/// `n_right` right vertices.
pub fn maximum_matching(adjacency: &[Vec<usize>], n_right: usize) -> usize {
    let n_left = adjacency.len();
    let mut match_left = vec![FREE; n_left];
    let mut match_right = vec![FREE; n_right];
    let mut layer = vec![usize::MAX; n_left];
    let mut size = 0;

    loop {
        // BFS from free left vertices builds the layered graph
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_left[u] == FREE {
                layer[u] = 0;
                queue.push_back(u);
            } else {
                layer[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &w in &adjacency[u] {
                let partner = match_right[w];
                if partner == FREE {
                    found = true;
                } else if layer[partner] == usize::MAX {
                    layer[partner] = layer[u] + 1;
                    queue.push_back(partner);
                }
            }
        }
        if !found {
            return size;
        }

        // iterative DFS along layers
        let mut next_edge = vec![0usize; n_left];
        for root in 0..n_left {
            if match_left[root] != FREE {
                continue;
            }
            let mut stack = vec![root];
            while let Some(&u) = stack.last() {
                if next_edge[u] == adjacency[u].len() {
                    layer[u] = usize::MAX;
                    stack.pop();
                    continue;
                }
                let w = adjacency[u][next_edge[u]];
                next_edge[u] += 1;
                let partner = match_right[w];
                if partner == FREE {
                    // augment along the stack
                    let mut right = w;
                    for &left in stack.iter().rev() {
                        let previous = match_left[left];
                        match_left[left] = right;
                        match_right[right] = left;
                        right = previous;
                    }
                    size += 1;
                    for &left in &stack {
                        layer[left] = usize::MAX;
                    }
                    break;
                } else if layer[partner] == layer[u] + 1 {
                    stack.push(partner);
                }
            }
        }
    }
}

pub fn has_perfect_matching(adjacency: &[Vec<usize>], n_right: usize) -> bool {
    adjacency.len() == n_right && maximum_matching(adjacency, n_right) == n_right
}
