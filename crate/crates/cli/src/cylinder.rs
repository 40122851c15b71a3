//! Cylinder selection shared by the subcommands.

use crate::UsageError;
use anyhow::Result;
use clap::Args;
use supercrit::game::Board;
use supercrit::graph::{
    build_cylinder, cylinder_compression, derive_parameters, make_explicit_parameters, verify_parameter_properties,
    Cylinder, GraphCompression, PropertyReport,
};

#[derive(Args, Clone, Debug)]
pub struct CylArgs {
    /// Number of rows.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Slack parameter of the robber strategy.
    #[arg(long, default_value_t = 1)]
    pub c: usize,
    /// Row moduli, comma separated. Defaults to the toy instance for k = 2 or 3.
    #[arg(long, value_delimiter = ',')]
    pub moduli: Option<Vec<usize>>,
    /// Middle length.
    #[arg(long = "L")]
    pub middle: Option<usize>,
    /// Ear length.
    #[arg(long)]
    pub r: Option<usize>,
    /// Derive the parameters from the primes in [n, 2n] instead.
    #[arg(long, conflicts_with_all = ["moduli", "middle", "r"])]
    pub n: Option<u64>,
    /// Use the identity compression.
    #[arg(long)]
    pub uncompressed: bool,
}

pub struct Instance {
    pub cyl: Cylinder,
    pub comp: GraphCompression,
    pub properties: PropertyReport,
    pub compressed: bool,
}

/// Moduli, middle length and ear length of the toy instances.
pub fn toy(k: usize) -> Option<(Vec<usize>, usize, usize)> {
    match k {
        2 => Some((vec![6, 15], 30, 3)),
        3 => Some((vec![48, 120, 80], 240, 5)),
        _ => None,
    }
}

impl CylArgs {
    pub fn toy(k: usize) -> Self {
        CylArgs { k, c: 1, moduli: None, middle: None, r: None, n: None, uncompressed: false }
    }

    pub fn build(&self) -> Result<Instance> {
        let (cyl, properties) = match self.n {
            Some(n) => {
                let params = derive_parameters::<u64>(n, self.k, self.c)?;
                (build_cylinder(&params)?, verify_parameter_properties(&params))
            }
            None => {
                let (moduli, middle, r) = match (&self.moduli, self.middle, self.r) {
                    (Some(m), Some(l), Some(r)) => (m.clone(), l, r),
                    (None, None, None) => toy(self.k).ok_or_else(|| {
                        UsageError(format!("no toy instance for k = {}; give --moduli, --L and --r", self.k))
                    })?,
                    _ => return Err(UsageError("--moduli, --L and --r go together".into()).into()),
                };
                let params = make_explicit_parameters::<u64>(
                    self.k,
                    self.c,
                    moduli.iter().map(|&m| m as u64).collect(),
                    middle as u64,
                    r,
                )?;
                (build_cylinder(&params)?, verify_parameter_properties(&params))
            }
        };
        let comp = if self.uncompressed { GraphCompression::identity(cyl.graph()) } else { cylinder_compression(&cyl) };
        Ok(Instance { cyl, comp, properties, compressed: !self.uncompressed })
    }
}

impl Instance {
    pub fn board(&self) -> Board {
        if self.compressed {
            Board::compressed(self.cyl.clone())
        } else {
            Board::uncompressed(self.cyl.clone())
        }
    }

    pub fn describe(&self) -> String {
        let m: Vec<String> = self.cyl.moduli.iter().map(|m| m.to_string()).collect();
        format!(
            "k={} c={} moduli={} L={} r={} compressed={}",
            self.cyl.k,
            self.cyl.c,
            m.join(","),
            self.cyl.middle,
            self.cyl.ear,
            self.compressed
        )
    }

    /// `P1=pass P2=fail ...` in one line.
    pub fn property_line(&self) -> String {
        let p = &self.properties;
        let v = |name: &str, holds: bool| format!("{name}={}", if holds { "pass" } else { "fail" });
        [v("P1", p.p1.holds), v("P2", p.p2.holds), v("P3", p.p3.holds), v("P4", p.p4.holds)].join(" ")
    }
}
