use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::matcore::{c64, CMatrix, C64};

use super::state::{Momentum, MultisetState, Particle};

#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub name: String,
    pub mass: f64,
}

/// A local interaction term φ_{s₁}⋯φ_{s_r}: every leg either creates or annihilates
/// one particle of its species, with total momentum conserved. The amplitude is
/// `coupling` times ω^{−1/2} of each leg listed in `damped_legs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub legs: Vec<usize>,
    pub coupling: f64,
    pub damped_legs: Vec<usize>,
}

/// Multi-species lattice model: A = Σ ω_{pᵢ} with ω_p = √(m² + |p|²), B built from
/// vertex terms, momenta restricted to the cube {−G, …, G}^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub dim: usize,
    pub grid_bound: i64,
    pub species: Vec<Species>,
    pub vertices: Vec<Vertex>,
}

impl Model {
    pub const MAX_GRID_POINTS: usize = 100_000;

    pub fn new(dim: usize, grid_bound: i64, species: Vec<Species>, vertices: Vec<Vertex>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("momentum dimension must be at least 1"));
        }
        if grid_bound < 0 {
            return Err(Error::invalid(format!("grid bound must be nonnegative, got {grid_bound}")));
        }
        let points = ((2 * grid_bound + 1) as f64).powi(dim as i32);
        if points > Self::MAX_GRID_POINTS as f64 {
            return Err(Error::EnumerationGuard {
                count: points,
                limit: Self::MAX_GRID_POINTS as f64,
            });
        }
        for s in &species {
            if !(s.mass >= 0.0) || !s.mass.is_finite() {
                return Err(Error::invalid(format!("species {} has invalid mass {}", s.name, s.mass)));
            }
        }
        for (k, v) in vertices.iter().enumerate() {
            if v.legs.is_empty() {
                return Err(Error::invalid(format!("vertex {k} has no legs")));
            }
            if v.legs.iter().any(|&s| s >= species.len()) {
                return Err(Error::invalid(format!("vertex {k} refers to an unknown species")));
            }
            if v.damped_legs.iter().any(|&l| l >= v.legs.len()) {
                return Err(Error::invalid(format!("vertex {k} damps a leg it does not have")));
            }
            if !v.coupling.is_finite() {
                return Err(Error::invalid(format!("vertex {k} has a non-finite coupling")));
            }
        }
        Ok(Model {
            dim,
            grid_bound,
            species,
            vertices,
        })
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s.name == name)
    }

    pub fn omega(&self, species: usize, p: &[i64]) -> f64 {
        let m = self.species[species].mass;
        (m * m + p.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt()
    }

    pub fn energy(&self, state: &MultisetState) -> f64 {
        state.particles().iter().map(|p| self.omega(p.species, &p.momentum)).sum()
    }

    pub fn in_grid(&self, p: &[i64]) -> bool {
        p.len() == self.dim && p.iter().all(|x| x.abs() <= self.grid_bound)
    }

    pub fn validate_state(&self, state: &MultisetState) -> Result<()> {
        for p in state.particles() {
            if p.species >= self.species.len() {
                return Err(Error::invalid(format!("unknown species index {}", p.species)));
            }
            if !self.in_grid(&p.momentum) {
                return Err(Error::invalid(format!("momentum {:?} lies outside the grid", p.momentum)));
            }
        }
        Ok(())
    }

    pub fn grid_points(&self) -> Vec<Momentum> {
        let g = self.grid_bound;
        let mut out: Vec<Momentum> = vec![vec![]];
        for _ in 0..self.dim {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (-g..=g).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// Nonzero entries B_{k,s} of column `s`, keyed by the row state k.
    pub fn column(&self, s: &MultisetState) -> BTreeMap<MultisetState, C64> {
        let grid = self.grid_points();
        let mut out = BTreeMap::new();
        for v in &self.vertices {
            let r = v.legs.len();
            for mask in 0u32..(1 << r) {
                let created: Vec<usize> = (0..r).filter(|&l| mask & (1 << l) != 0).collect();
                let annihilated: Vec<usize> = (0..r).filter(|&l| mask & (1 << l) == 0).collect();
                let mut legs: Vec<Option<Momentum>> = vec![None; r];
                self.annihilate(v, &annihilated, &created, s.clone(), &mut legs, &grid, &mut out);
            }
        }
        out.retain(|_, x| *x != c64(0.0, 0.0));
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn annihilate(
        &self,
        v: &Vertex,
        todo: &[usize],
        created: &[usize],
        state: MultisetState,
        legs: &mut Vec<Option<Momentum>>,
        grid: &[Momentum],
        out: &mut BTreeMap<MultisetState, C64>,
    ) {
        let Some((&leg, rest)) = todo.split_first() else {
            let mut removed = vec![0i64; self.dim];
            for l in 0..legs.len() {
                if let Some(p) = &legs[l] {
                    if !created.contains(&l) {
                        add_into(&mut removed, p);
                    }
                }
            }
            self.create(v, created, state, removed, legs, grid, out);
            return;
        };
        let species = v.legs[leg];
        let mut candidates: Vec<&Particle> = state.particles().iter().filter(|p| p.species == species).collect();
        candidates.dedup();
        for p in candidates {
            let mut next = state.clone();
            next.remove_one(p);
            legs[leg] = Some(p.momentum.clone());
            self.annihilate(v, rest, created, next, legs, grid, out);
        }
        legs[leg] = None;
    }

    #[allow(clippy::too_many_arguments)]
    fn create(
        &self,
        v: &Vertex,
        created: &[usize],
        state: MultisetState,
        balance: Momentum,
        legs: &mut Vec<Option<Momentum>>,
        grid: &[Momentum],
        out: &mut BTreeMap<MultisetState, C64>,
    ) {
        match created {
            [] => {
                if balance.iter().all(|&x| x == 0) {
                    *out.entry(state).or_insert(c64(0.0, 0.0)) += self.amplitude(v, legs);
                }
            }
            [last] => {
                if !self.in_grid(&balance) {
                    return;
                }
                let mut next = state;
                next.insert(Particle::new(v.legs[*last], balance.clone()));
                legs[*last] = Some(balance);
                *out.entry(next).or_insert(c64(0.0, 0.0)) += self.amplitude(v, legs);
                legs[*last] = None;
            }
            [leg, rest @ ..] => {
                for p in grid {
                    let mut next = state.clone();
                    next.insert(Particle::new(v.legs[*leg], p.clone()));
                    let mut remaining = balance.clone();
                    for (r, x) in remaining.iter_mut().zip(p) {
                        *r -= x;
                    }
                    legs[*leg] = Some(p.clone());
                    self.create(v, rest, next, remaining, legs, grid, out);
                }
                legs[*leg] = None;
            }
        }
    }

    fn amplitude(&self, v: &Vertex, legs: &[Option<Momentum>]) -> C64 {
        let mut amp = v.coupling;
        for &l in &v.damped_legs {
            let p = legs[l].as_ref().expect("every leg is assigned before evaluation");
            amp /= self.omega(v.legs[l], p).sqrt();
        }
        c64(amp, 0.0)
    }

    /// Closure of `seeds` under at most `depth` applications of B, with every
    /// entry between retained states.
    pub fn interaction(&self, seeds: &[MultisetState], depth: usize) -> Result<SparseInteraction> {
        for s in seeds {
            self.validate_state(s)?;
        }
        let mut basis: Vec<MultisetState> = Vec::new();
        let mut index: HashMap<MultisetState, usize> = HashMap::new();
        let mut columns: Vec<BTreeMap<MultisetState, C64>> = Vec::new();
        for s in seeds {
            if !index.contains_key(s) {
                index.insert(s.clone(), basis.len());
                basis.push(s.clone());
            }
        }
        let mut level = 0;
        let mut start = 0;
        loop {
            let end = basis.len();
            for k in start..end {
                let col = self.column(&basis[k]);
                if level < depth {
                    for row in col.keys() {
                        if !index.contains_key(row) {
                            if basis.len() >= SparseInteraction::MAX_BASIS {
                                return Err(Error::EnumerationGuard {
                                    count: (basis.len() + 1) as f64,
                                    limit: SparseInteraction::MAX_BASIS as f64,
                                });
                            }
                            index.insert(row.clone(), basis.len());
                            basis.push(row.clone());
                        }
                    }
                }
                columns.push(col);
            }
            if basis.len() == end {
                break;
            }
            start = end;
            level += 1;
        }

        let n = basis.len();
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); n];
        for (c, col) in columns.iter().enumerate() {
            for (state, &v) in col {
                if let Some(&r) = index.get(state) {
                    rows[r].push((c, v));
                }
            }
        }
        for row in rows.iter_mut() {
            row.sort_by_key(|&(c, _)| c);
        }
        let energies = basis.iter().map(|s| self.energy(s)).collect();
        let out = SparseInteraction {
            dim: self.dim,
            basis,
            index,
            rows,
            energies,
            depth,
        };
        let defect = out.hermitian_defect();
        if defect > 1e-12 {
            return Err(Error::NotHermitian { defect });
        }
        Ok(out)
    }
}

fn add_into(acc: &mut [i64], p: &[i64]) {
    for (a, x) in acc.iter_mut().zip(p) {
        *a += x;
    }
}

/// B over a finite set of basis states, stored by rows: `rows[r]` lists (c, B_{rc}).
#[derive(Debug, Clone)]
pub struct SparseInteraction {
    pub dim: usize,
    pub basis: Vec<MultisetState>,
    index: HashMap<MultisetState, usize>,
    rows: Vec<Vec<(usize, C64)>>,
    /// Diagonal of A on the basis.
    pub energies: Vec<f64>,
    /// Closure depth used to build the basis.
    pub depth: usize,
}

impl SparseInteraction {
    pub const MAX_BASIS: usize = 100_000;
    pub const MAX_DENSE: usize = 4096;

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn position(&self, s: &MultisetState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn row(&self, r: usize) -> &[(usize, C64)] {
        &self.rows[r]
    }

    pub fn entry(&self, r: usize, c: usize) -> C64 {
        let row = &self.rows[r];
        match row.binary_search_by_key(&c, |&(k, _)| k) {
            Ok(k) => row[k].1,
            Err(_) => c64(0.0, 0.0),
        }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                worst = worst.max((v - self.entry(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Number of nonzero B_{rc} between states of different total momentum (zero by construction).
    pub fn momentum_defect(&self) -> usize {
        let mut bad = 0;
        for (r, row) in self.rows.iter().enumerate() {
            let pr = self.basis[r].total_momentum(self.dim);
            bad += row
                .iter()
                .filter(|&&(c, _)| self.basis[c].total_momentum(self.dim) != pr)
                .count();
        }
        bad
    }

    fn ensure_dense(&self) -> Result<usize> {
        let n = self.len();
        if n > Self::MAX_DENSE {
            return Err(Error::EnumerationGuard {
                count: n as f64,
                limit: Self::MAX_DENSE as f64,
            });
        }
        Ok(n)
    }

    /// Dense (A, B) on the basis.
    pub fn dense(&self) -> Result<(CMatrix, CMatrix)> {
        let n = self.ensure_dense()?;
        let a = CMatrix::from_fn(n, n, |r, c| if r == c { c64(self.energies[r], 0.0) } else { c64(0.0, 0.0) });
        let mut b = CMatrix::zeros(n, n);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                b[(r, c)] = v;
            }
        }
        Ok((a, b))
    }

    /// Diagonal operator whose eigenvalue on a state injectively encodes its total momentum.
    pub fn momentum_operator(&self) -> Result<CMatrix> {
        let n = self.ensure_dense()?;
        let totals: Vec<Momentum> = self.basis.iter().map(|s| s.total_momentum(self.dim)).collect();
        let span = totals.iter().flatten().map(|x| x.abs()).max().unwrap_or(0);
        let radix = (2 * span + 1) as f64;
        Ok(CMatrix::from_fn(n, n, |r, c| {
            if r != c {
                return c64(0.0, 0.0);
            }
            let code: f64 = totals[r]
                .iter()
                .enumerate()
                .map(|(k, &x)| x as f64 * radix.powi(k as i32))
                .sum();
            c64(code, 0.0)
        }))
    }
}
