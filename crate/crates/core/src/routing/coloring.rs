//! Proper edge coloring of bipartite multigraphs with exactly Δ colors.
//!
//! Edges are inserted one at a time. If the lowest color free at the left
//! endpoint (`a`) is busy at the right endpoint, the a/b alternating path
//! starting at the right endpoint (where `b` is its lowest free color) is
//! flipped, which frees `a` there. In a bipartite graph that path cannot end
//! at the left endpoint, so the flip never breaks properness.

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("edge {edge} has an endpoint outside the vertex range")]
    EndpointOutOfRange { edge: usize },
    #[error("maximum degree {degree} exceeds the color bound {max_colors}")]
    DegreeExceedsBound { degree: usize, max_colors: usize },
    #[error("graph is not bipartite")]
    NotBipartite,
}

/// Bipartite multigraph with `left` and `right` vertex sides; each edge is a
/// `(left index, right index)` pair and parallel edges are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMultigraph {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<(usize, usize)>,
}

impl BipartiteMultigraph {
    pub fn new(left: usize, right: usize, edges: Vec<(usize, usize)>) -> Result<Self, ColoringError> {
        if let Some(edge) = edges.iter().position(|&(u, v)| u >= left || v >= right) {
            return Err(ColoringError::EndpointOutOfRange { edge });
        }
        Ok(BipartiteMultigraph { left, right, edges })
    }

    /// Splits an undirected multigraph on `0..n` into sides by BFS
    /// two-coloring. Returns the bipartite view and each vertex's
    /// `(is_right, index within side)`.
    pub fn from_undirected(
        n: usize,
        edges: &[(usize, usize)],
    ) -> Result<(Self, Vec<(bool, usize)>), ColoringError> {
        if let Some(edge) = edges.iter().position(|&(u, v)| u >= n || v >= n) {
            return Err(ColoringError::EndpointOutOfRange { edge });
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut side: Vec<Option<bool>> = vec![None; n];
        let mut queue = VecDeque::new();
        for start in 0..n {
            if side[start].is_some() {
                continue;
            }
            side[start] = Some(false);
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                let su = side[u].unwrap();
                for &w in &adj[u] {
                    match side[w] {
                        None => {
                            side[w] = Some(!su);
                            queue.push_back(w);
                        }
                        Some(sw) if sw == su => return Err(ColoringError::NotBipartite),
                        Some(_) => {}
                    }
                }
            }
        }
        let mut counts = [0usize; 2];
        let placement: Vec<(bool, usize)> = side
            .into_iter()
            .map(|s| {
                let right = s.unwrap();
                let idx = counts[right as usize];
                counts[right as usize] += 1;
                (right, idx)
            })
            .collect();
        let bip_edges = edges
            .iter()
            .map(|&(u, v)| {
                let (pu, pv) = (placement[u], placement[v]);
                if pu.0 {
                    (pv.1, pu.1)
                } else {
                    (pu.1, pv.1)
                }
            })
            .collect();
        Ok((
            BipartiteMultigraph {
                left: counts[0],
                right: counts[1],
                edges: bip_edges,
            },
            placement,
        ))
    }

    pub fn max_degree(&self) -> usize {
        let mut left = vec![0usize; self.left];
        let mut right = vec![0usize; self.right];
        for &(u, v) in &self.edges {
            left[u] += 1;
            right[v] += 1;
        }
        left.into_iter().chain(right).max().unwrap_or(0)
    }
}

const FREE: usize = usize::MAX;

/// Colors the edges of `mg` with at most Δ colors (Δ = maximum degree).
/// `result[e]` is the color of `mg.edges[e]`. Color choices always try the
/// lowest index first, so the output is deterministic.
pub fn edge_color_bipartite(mg: &BipartiteMultigraph, max_colors: usize) -> Result<Vec<usize>, ColoringError> {
    let delta = mg.max_degree();
    if delta > max_colors {
        return Err(ColoringError::DegreeExceedsBound {
            degree: delta,
            max_colors,
        });
    }
    // at_left[u * delta + c] = edge colored c at left vertex u, or FREE.
    let mut at_left = vec![FREE; mg.left * delta];
    let mut at_right = vec![FREE; mg.right * delta];
    let mut color = vec![FREE; mg.edges.len()];

    let first_free = |slots: &[usize], v: usize| -> usize {
        (0..delta)
            .find(|&c| slots[v * delta + c] == FREE)
            .expect("degree bound guarantees a free color")
    };

    let mut path = Vec::new();
    for (e, &(u, v)) in mg.edges.iter().enumerate() {
        let a = first_free(&at_left, u);
        if at_right[v * delta + a] != FREE {
            let b = first_free(&at_right, v);
            // Walk from v: color a to the left, color b to the right, ...
            path.clear();
            let mut on_right = true;
            let mut x = v;
            let mut want = a;
            loop {
                let slot = if on_right {
                    at_right[x * delta + want]
                } else {
                    at_left[x * delta + want]
                };
                if slot == FREE {
                    break;
                }
                path.push(slot);
                let (l, r) = mg.edges[slot];
                x = if on_right { l } else { r };
                on_right = !on_right;
                want = if want == a { b } else { a };
            }
            for &pe in &path {
                let (l, r) = mg.edges[pe];
                at_left[l * delta + color[pe]] = FREE;
                at_right[r * delta + color[pe]] = FREE;
            }
            for &pe in &path {
                let (l, r) = mg.edges[pe];
                color[pe] = if color[pe] == a { b } else { a };
                at_left[l * delta + color[pe]] = pe;
                at_right[r * delta + color[pe]] = pe;
            }
        }
        debug_assert_eq!(at_left[u * delta + a], FREE);
        debug_assert_eq!(at_right[v * delta + a], FREE);
        color[e] = a;
        at_left[u * delta + a] = e;
        at_right[v * delta + a] = e;
    }
    Ok(color)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute force over all edge pairs.
    fn is_proper(mg: &BipartiteMultigraph, colors: &[usize]) -> bool {
        for i in 0..mg.edges.len() {
            for j in i + 1..mg.edges.len() {
                let (a, b) = (mg.edges[i], mg.edges[j]);
                if (a.0 == b.0 || a.1 == b.1) && colors[i] == colors[j] {
                    return false;
                }
            }
        }
        true
    }

    fn distinct(colors: &[usize]) -> usize {
        let mut c = colors.to_vec();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    #[test]
    fn single_edge() {
        let mg = BipartiteMultigraph::new(1, 1, vec![(0, 0)]).unwrap();
        assert_eq!(edge_color_bipartite(&mg, 1).unwrap(), vec![0]);
    }

    #[test]
    fn parallel_pair() {
        let mg = BipartiteMultigraph::new(1, 1, vec![(0, 0), (0, 0)]).unwrap();
        let colors = edge_color_bipartite(&mg, 2).unwrap();
        assert_eq!(distinct(&colors), 2);
    }

    #[test]
    fn complete_3x3() {
        let edges = (0..3).flat_map(|u| (0..3).map(move |v| (u, v))).collect();
        let mg = BipartiteMultigraph::new(3, 3, edges).unwrap();
        let colors = edge_color_bipartite(&mg, 3).unwrap();
        assert!(is_proper(&mg, &colors));
        assert_eq!(distinct(&colors), 3);
    }

    #[test]
    fn forces_path_flip() {
        // (0,0)=0, (1,1)=0, (1,0) takes 1, then (0,1) finds 0 busy at right 1.
        let mg = BipartiteMultigraph::new(2, 2, vec![(0, 0), (1, 1), (1, 0), (0, 1)]).unwrap();
        let colors = edge_color_bipartite(&mg, 2).unwrap();
        assert!(is_proper(&mg, &colors));
        assert!(colors.iter().all(|&c| c < 2));
    }

    #[test]
    fn errors() {
        assert_eq!(
            BipartiteMultigraph::new(1, 1, vec![(0, 2)]),
            Err(ColoringError::EndpointOutOfRange { edge: 0 })
        );
        let mg = BipartiteMultigraph::new(1, 2, vec![(0, 0), (0, 1)]).unwrap();
        assert_eq!(
            edge_color_bipartite(&mg, 1),
            Err(ColoringError::DegreeExceedsBound {
                degree: 2,
                max_colors: 1
            })
        );
        assert_eq!(
            BipartiteMultigraph::from_undirected(3, &[(0, 1), (1, 2), (2, 0)]),
            Err(ColoringError::NotBipartite)
        );
    }

    #[test]
    fn undirected_even_cycle() {
        let (mg, placement) =
            BipartiteMultigraph::from_undirected(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!((mg.left, mg.right), (2, 2));
        assert!(!placement[0].0 && placement[1].0);
        let colors = edge_color_bipartite(&mg, 2).unwrap();
        assert!(is_proper(&mg, &colors));
    }

    proptest! {
        #[test]
        fn proper_with_delta_colors(
            left in 1usize..8,
            right in 1usize..8,
            raw in prop::collection::vec((0usize..64, 0usize..64), 0..60),
        ) {
            let edges: Vec<_> = raw.into_iter().map(|(u, v)| (u % left, v % right)).collect();
            let mg = BipartiteMultigraph::new(left, right, edges).unwrap();
            let delta = mg.max_degree();
            let colors = edge_color_bipartite(&mg, delta).unwrap();
            prop_assert!(is_proper(&mg, &colors));
            prop_assert!(colors.iter().all(|&c| c < delta.max(1)));
        }
    }
}
