use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::matcore::{c64, C64};
use crate::resolvent::PATH_GUARD;

use super::model::SparseInteraction;
use super::state::{MultisetState, Particle};

/// Where a line begins or ends. Dot x is the transition from the (x−1)-th to the
/// x-th state of the sequence (states counted from 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    ExternalIn,
    Dot(usize),
    ExternalOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    pub species: usize,
    pub start: Endpoint,
    pub end: Endpoint,
}

impl Line {
    pub fn is_internal(&self) -> bool {
        matches!((self.start, self.end), (Endpoint::Dot(_), Endpoint::Dot(_)))
    }

    pub fn is_spectator(&self) -> bool {
        self.start == Endpoint::ExternalIn && self.end == Endpoint::ExternalOut
    }
}

/// Time-ordered diagram: `num_dots` transitions and the lines between them, kept
/// sorted so that equality is equality of canonical forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram {
    pub num_dots: usize,
    pub lines: Vec<Line>,
}

impl Diagram {
    pub fn new(num_dots: usize, mut lines: Vec<Line>) -> Result<Self> {
        for l in &lines {
            for e in [l.start, l.end] {
                if let Endpoint::Dot(x) = e {
                    if x == 0 || x > num_dots {
                        return Err(Error::invalid(format!("dot {x} outside 1..={num_dots}")));
                    }
                }
            }
            if l.start == Endpoint::ExternalOut || l.end == Endpoint::ExternalIn {
                return Err(Error::invalid("line endpoints are reversed"));
            }
            if let (Endpoint::Dot(a), Endpoint::Dot(b)) = (l.start, l.end) {
                if a >= b {
                    return Err(Error::invalid(format!("internal line runs backwards from dot {a} to dot {b}")));
                }
            }
        }
        lines.sort();
        Ok(Diagram { num_dots, lines })
    }

    /// The diagram of the reversed state sequence.
    pub fn reversed(&self) -> Diagram {
        let flip = |e: Endpoint| match e {
            Endpoint::ExternalIn => Endpoint::ExternalOut,
            Endpoint::ExternalOut => Endpoint::ExternalIn,
            Endpoint::Dot(x) => Endpoint::Dot(self.num_dots + 1 - x),
        };
        let mut lines: Vec<Line> = self
            .lines
            .iter()
            .map(|l| Line {
                species: l.species,
                start: flip(l.end),
                end: flip(l.start),
            })
            .collect();
        lines.sort();
        Diagram {
            num_dots: self.num_dots,
            lines,
        }
    }

    pub fn internal_lines(&self) -> usize {
        self.lines.iter().filter(|l| l.is_internal()).count()
    }
}

impl std::fmt::Display for Diagram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |e: Endpoint| match e {
            Endpoint::ExternalIn => "in".to_string(),
            Endpoint::ExternalOut => "out".to_string(),
            Endpoint::Dot(x) => x.to_string(),
        };
        let parts: Vec<String> = self
            .lines
            .iter()
            .map(|l| format!("{}[{}>{}]", l.species, show(l.start), show(l.end)))
            .collect();
        write!(f, "{}:{}", self.num_dots, parts.join(" "))
    }
}

/// Draws the diagram of a state sequence k₀, …, k_L: one line per interval of
/// consecutive states carrying a particle, started at the dot where it appears
/// and ended at the dot where it disappears. When several identical particles
/// are present and only some disappear, the earliest-created ones end first.
pub fn diagram_of(seq: &[MultisetState]) -> Result<Diagram> {
    if seq.is_empty() {
        return Err(Error::invalid("diagram of an empty sequence"));
    }
    let last = seq.len() - 1;
    let mut keys: Vec<&Particle> = seq.iter().flat_map(|s| s.particles()).collect();
    keys.sort();
    keys.dedup();
    let mut lines = Vec::new();
    for key in keys {
        let mut open: VecDeque<Endpoint> = VecDeque::new();
        let mut prev = 0;
        for (m, state) in seq.iter().enumerate() {
            let count = state.count(key);
            let here = if m == 0 { Endpoint::ExternalIn } else { Endpoint::Dot(m) };
            if count > prev {
                open.extend(std::iter::repeat_n(here, count - prev));
            } else {
                for _ in count..prev {
                    let start = open.pop_front().expect("open interval for every present particle");
                    lines.push(Line {
                        species: key.species,
                        start,
                        end: here,
                    });
                }
            }
            prev = count;
        }
        for start in open {
            lines.push(Line {
                species: key.species,
                start,
                end: Endpoint::ExternalOut,
            });
        }
    }
    Diagram::new(last, lines)
}

/// Basis-index paths i = k₀, k₁, …, k_ℓ = j with every B_{k_m k_{m+1}} ≠ 0.
pub fn enumerate_paths(bop: &SparseInteraction, i: usize, j: usize, ell: usize) -> Result<Vec<Vec<usize>>> {
    if ell == 0 {
        return Err(Error::invalid("paths need at least one step"));
    }
    if bop.depth < ell.div_ceil(2) {
        return Err(Error::invalid(format!(
            "basis closure depth {} is too shallow for order {ell}; need {}",
            bop.depth,
            ell.div_ceil(2)
        )));
    }
    // Breadth-first distances to j prune branches that cannot return in time.
    let mut dist: HashMap<usize, usize> = HashMap::new();
    dist.insert(j, 0);
    let mut queue = VecDeque::from([j]);
    while let Some(k) = queue.pop_front() {
        let d = dist[&k];
        if d + 1 >= ell {
            continue;
        }
        for &(c, _) in bop.row(k) {
            dist.entry(c).or_insert_with(|| {
                queue.push_back(c);
                d + 1
            });
        }
    }
    let mut out = Vec::new();
    let mut path = vec![i];
    fn walk(
        bop: &SparseInteraction,
        dist: &HashMap<usize, usize>,
        j: usize,
        left: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        let cur = *path.last().expect("path starts at i");
        if left == 0 {
            if cur == j {
                if out.len() as f64 >= PATH_GUARD {
                    return Err(Error::EnumerationGuard {
                        count: out.len() as f64 + 1.0,
                        limit: PATH_GUARD,
                    });
                }
                out.push(path.clone());
            }
            return Ok(());
        }
        for &(next, _) in bop.row(cur) {
            if dist.get(&next).is_some_and(|&d| d < left) {
                path.push(next);
                walk(bop, dist, j, left - 1, path, out)?;
                path.pop();
            }
        }
        Ok(())
    }
    walk(bop, &dist, j, ell, &mut path, &mut out)?;
    Ok(out)
}

fn endpoints(bop: &SparseInteraction, i: &MultisetState, j: &MultisetState) -> Result<(usize, usize)> {
    let pi = bop
        .position(i)
        .ok_or_else(|| Error::invalid(format!("state {i} is not in the basis")))?;
    let pj = bop
        .position(j)
        .ok_or_else(|| Error::invalid(format!("state {j} is not in the basis")))?;
    Ok((pi, pj))
}

/// All contributing paths of order ℓ from i to j, grouped by their diagram.
pub fn group_terms_by_diagram(
    bop: &SparseInteraction,
    i: &MultisetState,
    j: &MultisetState,
    ell: usize,
) -> Result<BTreeMap<Diagram, Vec<Vec<usize>>>> {
    let (pi, pj) = endpoints(bop, i, j)?;
    let mut groups: BTreeMap<Diagram, Vec<Vec<usize>>> = BTreeMap::new();
    for path in enumerate_paths(bop, pi, pj, ell)? {
        let states: Vec<MultisetState> = path.iter().map(|&k| bop.basis[k].clone()).collect();
        groups.entry(diagram_of(&states)?).or_default().push(path);
    }
    Ok(groups)
}

/// λ_τ, the prefactor (−1)^{ℓ+1} iτ/(¼(λᵢ−λⱼ)²+τ²), and the weight of one path.
struct PathWeights {
    lambda_tau: C64,
    front: C64,
}

impl PathWeights {
    fn new(bop: &SparseInteraction, pi: usize, pj: usize, tau: f64, ell: usize) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::invalid(format!("tau must be positive, got {tau}")));
        }
        let (li, lj) = (bop.energies[pi], bop.energies[pj]);
        let sign = if ell % 2 == 1 { 1.0 } else { -1.0 };
        let d = li - lj;
        Ok(PathWeights {
            lambda_tau: c64(0.5 * (li + lj), -tau),
            front: c64(0.0, sign * tau) / (0.25 * d * d + tau * tau),
        })
    }

    fn term(&self, bop: &SparseInteraction, path: &[usize]) -> C64 {
        let mut w = c64(1.0, 0.0);
        for pair in path.windows(2) {
            w *= bop.entry(pair[0], pair[1]);
        }
        for &k in &path[1..path.len() - 1] {
            w /= bop.energies[k] - self.lambda_tau;
        }
        w
    }
}

#[derive(Debug, Clone)]
pub struct DiagramTerm {
    pub diagram: Diagram,
    pub multiplicity: usize,
    pub value: C64,
}

/// S^{(ℓ,T)}_{ij}(τ) for every realized diagram T, in canonical order.
pub fn diagram_values(
    bop: &SparseInteraction,
    i: &MultisetState,
    j: &MultisetState,
    tau: f64,
    ell: usize,
) -> Result<Vec<DiagramTerm>> {
    let (pi, pj) = endpoints(bop, i, j)?;
    let weights = PathWeights::new(bop, pi, pj, tau, ell)?;
    Ok(group_terms_by_diagram(bop, i, j, ell)?
        .into_iter()
        .map(|(diagram, paths)| DiagramTerm {
            value: weights.front * paths.iter().map(|p| weights.term(bop, p)).sum::<C64>(),
            multiplicity: paths.len(),
            diagram,
        })
        .collect())
}

/// S^{(ℓ,T)}_{ij}(τ) for one diagram; zero when T is not realized.
pub fn diagram_value(
    bop: &SparseInteraction,
    i: &MultisetState,
    j: &MultisetState,
    tau: f64,
    ell: usize,
    d: &Diagram,
) -> Result<C64> {
    Ok(diagram_values(bop, i, j, tau, ell)?
        .into_iter()
        .find(|t| &t.diagram == d)
        .map_or(c64(0.0, 0.0), |t| t.value))
}
