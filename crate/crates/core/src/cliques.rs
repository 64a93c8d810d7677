//! Maximal clique enumeration (Bron-Kerbosch with Tomita pivoting).

use crate::error::{HglError, Result};

/// Enumerates all maximal cliques with at least `min_size` nodes of the graph given by
/// sorted neighbor lists. Cliques come out sorted ascending, in discovery order.
/// Fails with `CliqueExplosion` once more than `cap` such cliques have been found.
pub fn maximal_cliques(adj: &[Vec<usize>], min_size: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
    let n = adj.len();
    let mut dense = vec![vec![false; n]; n];
    for (u, nb) in adj.iter().enumerate() {
        for &v in nb {
            if v != u {
                dense[u][v] = true;
                dense[v][u] = true;
            }
        }
    }
    let mut out = Vec::new();
    let mut found = 0;
    let mut r = Vec::new();
    expand(&dense, &mut r, (0..n).collect(), Vec::new(), min_size, cap, &mut found, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn expand(
    adj: &[Vec<bool>],
    r: &mut Vec<usize>,
    p: Vec<usize>,
    x: Vec<usize>,
    min_size: usize,
    cap: usize,
    found: &mut usize,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    if p.is_empty() {
        if x.is_empty() && r.len() >= min_size {
            *found += 1;
            if *found > cap {
                return Err(HglError::CliqueExplosion { cap });
            }
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
        }
        return Ok(());
    }
    if r.len() + p.len() < min_size {
        return Ok(());
    }
    // pivot maximizing |P ∩ N(u)|
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .expect("P nonempty");
    let branch: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    let mut p = p;
    let mut x = x;
    for v in branch {
        let np: Vec<usize> = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let nx: Vec<usize> = x.iter().copied().filter(|&u| adj[v][u]).collect();
        r.push(v);
        expand(adj, r, np, nx, min_size, cap, found, out)?;
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
    Ok(())
}
