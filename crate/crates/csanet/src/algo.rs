//! Index-based graph kernels shared by the metric and robustness modules.
//!
//! All functions take adjacency as sorted index lists (`adj[v]` holds the
//! neighbors of `v`) and are deterministic: traversal visits vertices in
//! ascending index order, which upstream code maps to lexicographic
//! agency order.

use std::collections::VecDeque;

/// Connected-component labels in order of each component's smallest
/// vertex, plus the component count.
pub fn components(adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = adj.len();
    let mut labels = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if labels[start] != usize::MAX {
            continue;
        }
        labels[start] = count;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if labels[w] == usize::MAX {
                    labels[w] = count;
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    (labels, count)
}

/// Connected-component labels over a vertex subset, in order of each
/// component's smallest member, plus the component count. `adj` must not
/// lead out of `members`; labels of non-members are unspecified.
pub fn components_of(adj: &[Vec<usize>], members: &[usize]) -> (Vec<usize>, usize) {
    let mut labels = vec![usize::MAX; adj.len()];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for &start in members {
        if labels[start] != usize::MAX {
            continue;
        }
        labels[start] = count;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if labels[w] == usize::MAX {
                    labels[w] = count;
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    (labels, count)
}

/// BFS distances from `source`; unreachable vertices get `usize::MAX`.
pub fn bfs_distances(adj: &[Vec<usize>], source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[source] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Raw betweenness by Brandes' algorithm on the unweighted graph: one
/// BFS per source with dependency back-propagation. Each unordered pair
/// is counted once (accumulated scores are halved); endpoints are
/// excluded. Callers apply their own normalization.
pub fn brandes(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    let mut centrality = vec![0.0; n];
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    let mut predecessors: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = VecDeque::new();

    for source in 0..n {
        stack.clear();
        for v in 0..n {
            predecessors[v].clear();
            sigma[v] = 0.0;
            dist[v] = usize::MAX;
            delta[v] = 0.0;
        }
        sigma[source] = 1.0;
        dist[source] = 0;
        queue.push_back(source);

        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    predecessors[w].push(v);
                }
            }
        }

        while let Some(w) = stack.pop() {
            let coefficient = (1.0 + delta[w]) / sigma[w];
            for &v in &predecessors[w] {
                delta[v] += sigma[v] * coefficient;
            }
            if w != source {
                centrality[w] += delta[w];
            }
        }
    }

    for value in &mut centrality {
        *value /= 2.0;
    }
    centrality
}

/// Mean shortest-path distance over unordered vertex pairs of one
/// component, given its members. Returns `None` when the component has
/// fewer than two vertices.
pub fn component_apl(adj: &[Vec<usize>], members: &[usize]) -> Option<f64> {
    if members.len() < 2 {
        return None;
    }
    let mut total: u64 = 0;
    for &source in members {
        let dist = bfs_distances(adj, source);
        for &target in members {
            if target > source {
                debug_assert_ne!(dist[target], usize::MAX);
                total += dist[target] as u64;
            }
        }
    }
    let pairs = members.len() as u64 * (members.len() as u64 - 1) / 2;
    Some(total as f64 / pairs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_center_dependency() {
        // A - B - C: only the (A, C) pair routes through B.
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        let bc = brandes(&adj);
        assert_eq!(bc, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn component_labels_follow_smallest_member() {
        let adj = vec![vec![2], vec![3], vec![0], vec![1], vec![]];
        let (labels, count) = components(&adj);
        assert_eq!(count, 3);
        assert_eq!(labels, vec![0, 1, 0, 1, 2]);
    }

    #[test]
    fn apl_of_path_is_four_thirds() {
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        let members = vec![0, 1, 2];
        let apl = component_apl(&adj, &members).expect("defined");
        assert!((apl - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn apl_undefined_on_single_vertex() {
        assert_eq!(component_apl(&[vec![]], &[0]), None);
    }
}
