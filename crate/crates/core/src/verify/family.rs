use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{Primitive, Region, Term, TestFunction};

fn default_index_range() -> (i32, i32) {
    (-6, 6)
}

fn default_max_terms() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    /// `f_s(x) = f(s·x)` for `s = 2^m`, `m ∈ scales`.
    Dilations {
        base: TestFunction,
        scales: Vec<i32>,
    },
    /// `χ_{A_j}` for `j ∈ indices`.
    AnnulusShifts {
        n: usize,
        indices: Vec<i32>,
    },
    /// Seeded random combinations of indicators and power pieces with
    /// dyadic indices drawn from `index_range`.
    RandomCombinations {
        n: usize,
        count: usize,
        #[serde(default = "default_index_range")]
        index_range: (i32, i32),
        #[serde(default = "default_max_terms")]
        max_terms: usize,
        /// Allow negative coefficients.
        #[serde(default)]
        signed: bool,
        /// Draw only annulus and ball indicators.
        #[serde(default)]
        indicators_only: bool,
    },
    Explicit {
        members: Vec<TestFunction>,
    },
}

impl Generator {
    fn name(&self) -> &'static str {
        match self {
            Generator::Dilations { .. } => "dilations",
            Generator::AnnulusShifts { .. } => "annulus_shifts",
            Generator::RandomCombinations { .. } => "random_combinations",
            Generator::Explicit { .. } => "explicit",
        }
    }
}

/// How the generators' outputs are merged into one sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    /// Round-robin over the generators, so every prefix of the family
    /// samples each generator.
    #[default]
    Interleave,
    /// All members of the first generator, then the second, ...
    Concatenate,
}

/// An ordered, reproducible list of test functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFamily {
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub order: Order,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub label: String,
    pub generator: &'static str,
    pub function: TestFunction,
}

impl FunctionFamily {
    pub fn new(generators: Vec<Generator>, seed: u64) -> Self {
        FunctionFamily {
            generators,
            seed,
            order: Order::default(),
        }
    }

    pub fn with_order(self, order: Order) -> Self {
        FunctionFamily { order, ..self }
    }

    pub fn explicit(members: Vec<TestFunction>) -> Self {
        FunctionFamily::new(vec![Generator::Explicit { members }], 0)
    }

    pub fn random(n: usize, count: usize, seed: u64) -> Self {
        FunctionFamily::new(
            vec![Generator::RandomCombinations {
                n,
                count,
                index_range: default_index_range(),
                max_terms: default_max_terms(),
                signed: false,
                indicators_only: false,
            }],
            seed,
        )
    }

    pub fn size(&self) -> usize {
        self.generators
            .iter()
            .map(|g| match g {
                Generator::Dilations { scales, .. } => scales.len(),
                Generator::AnnulusShifts { indices, .. } => indices.len(),
                Generator::RandomCombinations { count, .. } => *count,
                Generator::Explicit { members } => members.len(),
            })
            .sum()
    }

    /// Members in family order. Random generators draw sequentially from
    /// a ChaCha8 stream, so a larger `count` extends the same sequence.
    pub fn members(&self) -> Result<Vec<Member>> {
        let mut lists = Vec::with_capacity(self.generators.len());
        for (gi, g) in self.generators.iter().enumerate() {
            lists.push(self.generate(gi, g)?);
        }
        Ok(match self.order {
            Order::Concatenate => lists.into_iter().flatten().collect(),
            Order::Interleave => {
                let mut iters: Vec<_> = lists.into_iter().map(Vec::into_iter).collect();
                let mut out = Vec::with_capacity(self.size());
                loop {
                    let before = out.len();
                    out.extend(iters.iter_mut().filter_map(Iterator::next));
                    if out.len() == before {
                        break out;
                    }
                }
            }
        })
    }

    fn generate(&self, gi: usize, g: &Generator) -> Result<Vec<Member>> {
        let mut out = Vec::new();
        let name = g.name();
        match g {
            Generator::Dilations { base, scales } => {
                for &m in scales {
                    out.push(Member {
                        label: format!("{name}[{gi}] m={m}"),
                        generator: name,
                        function: base.dilate_dyadic(m),
                    });
                }
            }
            Generator::AnnulusShifts { n, indices } => {
                check_dim(*n)?;
                for &j in indices {
                    out.push(Member {
                        label: format!("{name}[{gi}] j={j}"),
                        generator: name,
                        function: TestFunction::annulus_indicator(*n, j),
                    });
                }
            }
            Generator::RandomCombinations {
                n,
                count,
                index_range,
                max_terms,
                signed,
                indicators_only,
            } => {
                check_dim(*n)?;
                if index_range.0 > index_range.1 {
                    return Err(Error::config("index_range must satisfy lo <= hi"));
                }
                if *max_terms == 0 {
                    return Err(Error::config("max_terms must be positive"));
                }
                let stream = self.seed ^ (gi as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                let mut rng = ChaCha8Rng::seed_from_u64(stream);
                for i in 0..*count {
                    let terms = (0..rng.gen_range(1..=*max_terms))
                        .map(|_| random_term(&mut rng, *index_range, *signed, *indicators_only))
                        .collect();
                    out.push(Member {
                        label: format!("{name}[{gi}] #{i}"),
                        generator: name,
                        function: TestFunction::new(*n, terms)?,
                    });
                }
            }
            Generator::Explicit { members } => {
                for (i, f) in members.iter().enumerate() {
                    out.push(Member {
                        label: format!("{name}[{gi}] #{i}"),
                        generator: name,
                        function: f.clone(),
                    });
                }
            }
        }
        Ok(out)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(Error::config(format!(
            "dimension n must be 1, 2 or 3 (got {n})"
        )))
    }
}

// Coefficients and exponents are drawn on dyadic grids so the descriptors
// print exactly.
fn random_term(
    rng: &mut ChaCha8Rng,
    (lo, hi): (i32, i32),
    signed: bool,
    indicators_only: bool,
) -> Term {
    let mut coef = rng.gen_range(16..=128) as f64 / 64.0;
    if signed && rng.gen_bool(0.5) {
        coef = -coef;
    }
    let j = rng.gen_range(lo..=hi);
    let kind = if indicators_only {
        rng.gen_range(0..2)
    } else {
        rng.gen_range(0..4)
    };
    let primitive = match kind {
        0 => Primitive::AnnulusIndicator { j },
        1 => Primitive::BallIndicator { k: j },
        2 => Primitive::RadialPower {
            s: rng.gen_range(-8..=16) as f64 / 16.0,
            piece: Region::Annulus { j },
        },
        _ => Primitive::RadialPowerLog {
            s: rng.gen_range(-8..=16) as f64 / 16.0,
            t: rng.gen_range(-8..=8) as f64 / 8.0,
            piece: Region::Annulus { j },
            scale: 1.0,
        },
    };
    Term { coef, primitive }
}
