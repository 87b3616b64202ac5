use crate::error::{Error, Result};

use super::diagram::{Diagram, Endpoint};
use super::state::Momentum;

fn check_momenta(d: &Diagram, momenta: &[Option<Momentum>]) -> Result<usize> {
    if momenta.len() != d.lines.len() {
        return Err(Error::invalid(format!(
            "{} momenta for {} lines",
            momenta.len(),
            d.lines.len()
        )));
    }
    let mut dim = None;
    for (l, p) in d.lines.iter().zip(momenta) {
        match (l.is_internal(), p) {
            (false, None) => return Err(Error::invalid("every external line needs a momentum")),
            (_, Some(p)) => {
                if *dim.get_or_insert(p.len()) != p.len() {
                    return Err(Error::invalid("momenta have inconsistent dimensions"));
                }
            }
            (true, None) => {}
        }
    }
    Ok(dim.unwrap_or(0))
}

fn add(acc: &mut [i64], p: &[i64], sign: i64) {
    for (a, x) in acc.iter_mut().zip(p) {
        *a += sign * x;
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Union-find roots of the dots (indices 1..=num_dots) joined by internal lines;
/// also reports whether some internal line closed a cycle.
fn components(d: &Diagram) -> (Vec<usize>, bool) {
    let mut parent: Vec<usize> = (0..=d.num_dots).collect();
    let mut cycle = false;
    for l in &d.lines {
        if let (Endpoint::Dot(a), Endpoint::Dot(b)) = (l.start, l.end) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                cycle = true;
            } else {
                parent[ra] = rb;
            }
        }
    }
    let roots = (0..=d.num_dots).map(|x| find(&mut parent, x)).collect();
    (roots, cycle)
}

/// Solves the vertex conservation laws Σ_{ending at x} p − Σ_{starting at x} p = 0 for
/// the internal momenta of a tree diagram by eliminating leaves. `momenta` is aligned
/// with `d.lines` and must carry every external momentum; internal entries are ignored.
/// Returns the full assignment, or `None` when the external data admit no solution
/// (including incoming momenta that do not add up to `total`).
pub fn tree_solve(d: &Diagram, momenta: &[Option<Momentum>], total: &[i64]) -> Result<Option<Vec<Momentum>>> {
    let dim = check_momenta(d, momenta)?.max(total.len());
    let (roots, cycle) = components(d);
    if cycle {
        return Err(Error::NotATree("internal lines close a cycle".into()));
    }
    if d.num_dots > 1 && (2..=d.num_dots).any(|x| roots[x] != roots[1]) {
        return Err(Error::NotATree("dots are not connected".into()));
    }
    let mut incoming = vec![0i64; dim];
    let mut outgoing = vec![0i64; dim];
    for (l, p) in d.lines.iter().zip(momenta) {
        if l.start == Endpoint::ExternalIn {
            add(&mut incoming, p.as_ref().expect("checked"), 1);
        }
        if l.end == Endpoint::ExternalOut {
            add(&mut outgoing, p.as_ref().expect("checked"), 1);
        }
    }
    if incoming != total || outgoing != total {
        return Ok(None);
    }

    // balance[x] = Σ known momenta ending at x − Σ known momenta starting at x.
    let mut balance = vec![vec![0i64; dim]; d.num_dots + 1];
    let mut solved: Vec<Option<Momentum>> = Vec::with_capacity(d.lines.len());
    for (l, p) in d.lines.iter().zip(momenta) {
        if l.is_internal() {
            solved.push(None);
            continue;
        }
        let p = p.clone().expect("checked");
        if let Endpoint::Dot(x) = l.end {
            add(&mut balance[x], &p, 1);
        }
        if let Endpoint::Dot(x) = l.start {
            add(&mut balance[x], &p, -1);
        }
        solved.push(Some(p));
    }
    let mut unknown = vec![0usize; d.num_dots + 1];
    for l in d.lines.iter().filter(|l| l.is_internal()) {
        for e in [l.start, l.end] {
            if let Endpoint::Dot(x) = e {
                unknown[x] += 1;
            }
        }
    }
    while let Some(x) = (1..=d.num_dots).find(|&x| unknown[x] == 1) {
        let (k, line) = d
            .lines
            .iter()
            .enumerate()
            .find(|(k, l)| solved[*k].is_none() && (l.start == Endpoint::Dot(x) || l.end == Endpoint::Dot(x)))
            .expect("a leaf has one unsolved line");
        let mut p = balance[x].clone();
        if line.end == Endpoint::Dot(x) {
            p.iter_mut().for_each(|v| *v = -*v);
        }
        for e in [line.start, line.end] {
            if let Endpoint::Dot(y) = e {
                add(&mut balance[y], &p, if e == line.end { 1 } else { -1 });
                unknown[y] -= 1;
            }
        }
        solved[k] = Some(p);
    }
    if balance.iter().skip(1).any(|b| b.iter().any(|&v| v != 0)) {
        return Ok(None);
    }
    Ok(Some(solved.into_iter().map(|p| p.expect("tree elimination solves every line")).collect()))
}

/// Whether the external momenta balance on every connected component of the dots.
pub fn connected_component_conservation(d: &Diagram, momenta: &[Option<Momentum>]) -> Result<bool> {
    let dim = check_momenta(d, momenta)?;
    let (roots, _) = components(d);
    let mut net = vec![vec![0i64; dim]; d.num_dots + 1];
    for (l, p) in d.lines.iter().zip(momenta) {
        if l.is_internal() || l.is_spectator() {
            continue;
        }
        let p = p.as_ref().expect("checked");
        if let Endpoint::Dot(x) = l.end {
            add(&mut net[roots[x]], p, 1);
        }
        if let Endpoint::Dot(x) = l.start {
            add(&mut net[roots[x]], p, -1);
        }
    }
    Ok(net.iter().all(|v| v.iter().all(|&x| x == 0)))
}
