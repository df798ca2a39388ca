//! Plain-text ensemble files.
//!
//! Layout:
//!   line 1: `n m rho`
//!   line 2: the alignment profile as m-1 concatenated permutations of
//!           length n (1-based images, space-separated), or `null` when no
//!           profile exists (independent samples)
//!   next m lines: C(n,2) space-separated floats per graph, strict upper
//!           triangle row-major
//!
//! All floats carry 17 significant digits, so read(write(x)) recovers the
//! exact f64 values.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{GraphEnsemble, ModelParams, Permutation, PermutationProfile, WeightedGraph};
use crate::error::{Error, Result};
use crate::util::fmt_g17;

/// An ensemble as stored on disk: dimensions and rho from the header, the
/// graphs, and the profile when the file records one.
#[derive(Clone, Debug)]
pub struct StoredEnsemble {
    pub params: ModelParams,
    pub ensemble: GraphEnsemble,
    pub profile: Option<PermutationProfile>,
}

pub fn write_ensemble<W: Write>(
    w: &mut W,
    rho: f64,
    ens: &GraphEnsemble,
    profile: Option<&PermutationProfile>,
) -> Result<()> {
    if let Some(p) = profile {
        ens.check_profile(p)?;
    }
    writeln!(w, "{} {} {}", ens.n(), ens.m(), fmt_g17(rho))?;
    match profile {
        None => writeln!(w, "null")?,
        Some(p) => {
            let mut first = true;
            for perm in p.perms() {
                for &v in perm.images() {
                    if first {
                        write!(w, "{}", v + 1)?;
                        first = false;
                    } else {
                        write!(w, " {}", v + 1)?;
                    }
                }
            }
            writeln!(w)?;
        }
    }
    for g in ens.graphs() {
        let line: Vec<String> = g.weights().iter().map(|&x| fmt_g17(x)).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_ensemble<R: BufRead>(r: &mut R) -> Result<StoredEnsemble> {
    let mut lines = r.lines();
    let mut next_line = |what: &str| -> Result<String> {
        match lines.next() {
            Some(Ok(l)) => Ok(l),
            Some(Err(e)) => Err(Error::Io(e)),
            None => Err(Error::Parse(format!("missing {what} line"))),
        }
    };

    let header = next_line("header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::Parse(format!(
            "header must be `n m rho`, got {} fields",
            fields.len()
        )));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| Error::Parse(format!("bad n: {}", fields[0])))?;
    let m: usize = fields[1]
        .parse()
        .map_err(|_| Error::Parse(format!("bad m: {}", fields[1])))?;
    let rho: f64 = fields[2]
        .parse()
        .map_err(|_| Error::Parse(format!("bad rho: {}", fields[2])))?;
    let params = ModelParams::new(n, m, rho)
        .map_err(|e| Error::Parse(format!("bad header values: {e}")))?;

    let profile_line = next_line("profile")?;
    let profile = if profile_line.trim() == "null" {
        None
    } else {
        let vals: Vec<&str> = profile_line.split_whitespace().collect();
        if vals.len() != (m - 1) * n {
            return Err(Error::Parse(format!(
                "profile line must hold {} integers, got {}",
                (m - 1) * n,
                vals.len()
            )));
        }
        let mut perms = Vec::with_capacity(m - 1);
        for chunk in vals.chunks(n) {
            let mut img = Vec::with_capacity(n);
            for v in chunk {
                let label: usize = v
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad node label: {v}")))?;
                if label == 0 || label > n {
                    return Err(Error::Parse(format!(
                        "node label {label} out of range 1..={n}"
                    )));
                }
                img.push(label - 1);
            }
            perms.push(
                Permutation::from_images(img)
                    .map_err(|e| Error::Parse(format!("profile line: {e}")))?,
            );
        }
        Some(PermutationProfile::new(perms).map_err(|e| Error::Parse(e.to_string()))?)
    };

    let edge_count = params.edge_count();
    let mut graphs = Vec::with_capacity(m);
    for k in 0..m {
        let line = next_line(&format!("graph {} weights", k + 1))?;
        let mut w = Vec::with_capacity(edge_count);
        for v in line.split_whitespace() {
            let x: f64 = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad weight: {v}")))?;
            w.push(x);
        }
        if w.len() != edge_count {
            return Err(Error::Parse(format!(
                "graph {} holds {} weights, expected {edge_count}",
                k + 1,
                w.len()
            )));
        }
        graphs.push(WeightedGraph::from_weights(n, w)?);
    }

    Ok(StoredEnsemble {
        params,
        ensemble: GraphEnsemble::new(graphs)?,
        profile,
    })
}

pub fn write_ensemble_file<P: AsRef<Path>>(
    path: P,
    rho: f64,
    ens: &GraphEnsemble,
    profile: Option<&PermutationProfile>,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_ensemble(&mut w, rho, ens, profile)?;
    w.flush()?;
    Ok(())
}

pub fn read_ensemble_file<P: AsRef<Path>>(path: P) -> Result<StoredEnsemble> {
    let mut r = BufReader::new(File::open(path)?);
    read_ensemble(&mut r)
}
