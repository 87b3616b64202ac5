use std::fmt;

/// Integer lattice momentum.
pub type Momentum = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Particle {
    pub species: usize,
    pub momentum: Momentum,
}

impl Particle {
    pub fn new(species: usize, momentum: impl Into<Momentum>) -> Self {
        Particle {
            species,
            momentum: momentum.into(),
        }
    }
}

/// A basis vector |p₁, …, p_l⟩, stored as a sorted multiset so that equality
/// and hashing ignore the order in which particles were listed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultisetState {
    particles: Vec<Particle>,
}

impl MultisetState {
    pub fn new(mut particles: Vec<Particle>) -> Self {
        particles.sort();
        MultisetState { particles }
    }

    pub fn vacuum() -> Self {
        MultisetState::default()
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn count(&self, p: &Particle) -> usize {
        self.particles.iter().filter(|q| *q == p).count()
    }

    /// Σ pᵢ in dimension `dim` (the vacuum has total momentum zero).
    pub fn total_momentum(&self, dim: usize) -> Momentum {
        let mut total = vec![0; dim];
        for p in &self.particles {
            for (t, x) in total.iter_mut().zip(&p.momentum) {
                *t += x;
            }
        }
        total
    }

    pub(crate) fn remove_one(&mut self, p: &Particle) -> bool {
        match self.particles.iter().position(|q| q == p) {
            Some(k) => {
                self.particles.remove(k);
                true
            }
            None => false,
        }
    }

    pub(crate) fn insert(&mut self, p: Particle) {
        let k = self.particles.partition_point(|q| q < &p);
        self.particles.insert(k, p);
    }
}

impl fmt::Display for MultisetState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (k, p) in self.particles.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            let mom: Vec<String> = p.momentum.iter().map(|x| x.to_string()).collect();
            write!(f, "{}:{}", p.species, mom.join(","))?;
        }
        write!(f, ">")
    }
}
