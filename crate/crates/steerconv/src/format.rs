//! Line-oriented text formats shared by the CLI and the file interfaces:
//! point clouds, rotation sets, feature fields, weights, and layer configs.
//!
//! All numbers are emitted with Rust's shortest round-trip decimal formatting
//! (at most 17 significant digits, parses back bit-exactly), fields separated
//! by single spaces, LF line endings. `#` starts a comment line. Parsers
//! reject NaN/infinity and trailing garbage.

use crate::basis::{KernelBasisSpec, RadialProfile};
use crate::error::{Error, Result};
use crate::field::{FeatureField, PointCloud};
use crate::rotation::{Rotation, Vec3};
use crate::sampling::{RotationSampleSet, SampleKind};
use crate::weights::{Se3Weights, TfnWeights};
use ndarray::{Array4, Array5, Array6};
use std::collections::BTreeMap;
use std::fmt::Write as _;

fn parse_f64(tok: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse(format!("bad number {tok:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite number {tok:?}")));
    }
    Ok(v)
}

fn parse_usize(tok: &str) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse(format!("bad integer {tok:?}")))
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    let mut s = String::new();
    for (i, v) in values.into_iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{v}");
    }
    s
}

// ---------------------------------------------------------------- point cloud

pub fn write_point_cloud(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
    }
    out
}

pub fn read_point_cloud(text: &str) -> Result<PointCloud> {
    let mut points = Vec::new();
    for line in data_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::Parse(format!("expected 3 coordinates, got {line:?}")));
        }
        points.push(Vec3::new(parse_f64(toks[0])?, parse_f64(toks[1])?, parse_f64(toks[2])?));
    }
    PointCloud::new(points)
}

// --------------------------------------------------------------- rotation set

pub fn write_rotation_set(set: &RotationSampleSet) -> String {
    let mut out = String::new();
    for (r, w) in set.rotations.iter().zip(&set.weights) {
        let m = r.matrix();
        let vals = m.iter().flatten().copied().chain(std::iter::once(*w));
        let _ = writeln!(out, "{}", join(vals));
    }
    out
}

pub fn read_rotation_set(text: &str) -> Result<RotationSampleSet> {
    let mut rotations = Vec::new();
    let mut weights = Vec::new();
    for line in data_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 10 {
            return Err(Error::Parse(format!("expected 10 numbers per rotation line, got {}", toks.len())));
        }
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = parse_f64(toks[3 * i + j])?;
            }
        }
        rotations.push(Rotation::from_matrix(m)?);
        weights.push(parse_f64(toks[9])?);
    }
    RotationSampleSet::from_parts(rotations, weights, SampleKind::FiniteGroup)
}

// -------------------------------------------------------------- feature field

pub fn write_feature_field(field: &FeatureField) -> String {
    let mut out = String::new();
    let channels: Vec<String> = (0..=field.lmax())
        .map(|l| format!("{l}:{}", field.channels(l)))
        .collect();
    let _ = writeln!(
        out,
        "FIELD N={} LMAX={} CHANNELS {}",
        field.n_points(),
        field.lmax(),
        channels.join(" ")
    );
    for l in 0..=field.lmax() {
        let b = field.block(l);
        for p in 0..field.n_points() {
            for c in 0..field.channels(l) {
                let _ = writeln!(out, "POINT {p} L {l} C {c}");
                for i in 0..2 * l + 1 {
                    let row = (0..2 * l + 1).map(|j| b[[p, i, j, c]]);
                    let _ = writeln!(out, "{}", join(row));
                }
            }
        }
    }
    out
}

pub fn read_feature_field(text: &str) -> Result<FeatureField> {
    let mut lines = data_lines(text);
    let header = lines.next().ok_or_else(|| Error::Parse("empty field file".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() < 4 || toks[0] != "FIELD" {
        return Err(Error::Parse(format!("bad field header {header:?}")));
    }
    let n = parse_usize(
        toks[1]
            .strip_prefix("N=")
            .ok_or_else(|| Error::Parse("missing N=".into()))?,
    )?;
    let lmax = parse_usize(
        toks[2]
            .strip_prefix("LMAX=")
            .ok_or_else(|| Error::Parse("missing LMAX=".into()))?,
    )?;
    if toks[3] != "CHANNELS" || toks.len() != 4 + lmax + 1 {
        return Err(Error::Parse("bad CHANNELS list".into()));
    }
    let mut channels = vec![0usize; lmax + 1];
    for (l, t) in toks[4..].iter().enumerate() {
        let (ls, cs) = t
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad channel spec {t:?}")))?;
        if parse_usize(ls)? != l {
            return Err(Error::Parse(format!("channel spec out of order at {t:?}")));
        }
        channels[l] = parse_usize(cs)?;
    }
    let mut blocks: Vec<Array4<f64>> = channels
        .iter()
        .enumerate()
        .map(|(l, &c)| Array4::zeros((n, 2 * l + 1, 2 * l + 1, c)))
        .collect();
    let mut lines = lines.peekable();
    while let Some(line) = lines.next() {
        // header is "POINT p L l C c": tokens [POINT, p, L, l, C, c]
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 6 || toks[0] != "POINT" || toks[2] != "L" || toks[4] != "C" {
            return Err(Error::Parse(format!("bad block header {line:?}")));
        }
        let p = parse_usize(toks[1])?;
        let l = parse_usize(toks[3])?;
        let c = parse_usize(toks[5])?;
        if p >= n || l > lmax || c >= channels[l] {
            return Err(Error::Parse(format!("block index out of range: {line:?}")));
        }
        for i in 0..2 * l + 1 {
            let row = lines
                .next()
                .ok_or_else(|| Error::Parse("truncated field block".into()))?;
            let vals: Vec<&str> = row.split_whitespace().collect();
            if vals.len() != 2 * l + 1 {
                return Err(Error::Parse(format!("bad row width in block {line:?}")));
            }
            for (j, v) in vals.iter().enumerate() {
                blocks[l][[p, i, j, c]] = parse_f64(v)?;
            }
        }
    }
    FeatureField::from_blocks(blocks)
}

// ------------------------------------------------------------------- weights

pub fn write_se3_weights(w: &Se3Weights) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "WEIGHTS form=se3");
    for (&(lp, big_l), b) in &w.blocks {
        let s = b.shape();
        let _ = writeln!(out, "BLOCK lp={lp} L={big_l} d={} c={} r={}", s[1], s[2], s[3]);
        for j in 0..s[0] {
            for d in 0..s[1] {
                let mut row = Vec::with_capacity(s[2] * s[3] * s[4] * s[5]);
                for c in 0..s[2] {
                    for r in 0..s[3] {
                        for mp in 0..s[4] {
                            for big_m in 0..s[5] {
                                row.push(b[[j, d, c, r, mp, big_m]]);
                            }
                        }
                    }
                }
                let _ = writeln!(out, "{}", join(row));
            }
        }
    }
    let _ = writeln!(out, "BIAS");
    let _ = writeln!(out, "{}", join(w.bias.iter().copied()));
    out
}

pub fn write_tfn_weights(w: &TfnWeights) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "WEIGHTS form=tfn");
    for (&(l, lp, big_l), b) in &w.blocks {
        let s = b.shape();
        let _ = writeln!(out, "BLOCK l={l} lp={lp} L={big_l} d={} c={} r={}", s[1], s[2], s[3]);
        for j in 0..s[0] {
            for d in 0..s[1] {
                let mut row = Vec::with_capacity(s[2] * s[3] * s[4]);
                for c in 0..s[2] {
                    for r in 0..s[3] {
                        for m in 0..s[4] {
                            row.push(b[[j, d, c, r, m]]);
                        }
                    }
                }
                let _ = writeln!(out, "{}", join(row));
            }
        }
    }
    let _ = writeln!(out, "BIAS");
    let _ = writeln!(out, "{}", join(w.bias.iter().copied()));
    out
}

#[derive(Debug, Clone)]
pub enum AnyWeights {
    Se3(Se3Weights),
    Tfn(TfnWeights),
}

struct KvHeader<'a> {
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> KvHeader<'a> {
    fn parse(toks: &[&'a str]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for t in toks {
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {t:?}")))?;
            map.insert(k, v);
        }
        Ok(KvHeader { map })
    }

    fn get(&self, key: &str) -> Result<usize> {
        parse_usize(
            self.map
                .get(key)
                .ok_or_else(|| Error::Parse(format!("missing key {key:?} in block header")))?,
        )
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }
}

pub fn read_weights(text: &str) -> Result<AnyWeights> {
    let mut lines = data_lines(text).peekable();
    let header = lines.next().ok_or_else(|| Error::Parse("empty weights file".into()))?;
    let form = header
        .strip_prefix("WEIGHTS form=")
        .ok_or_else(|| Error::Parse(format!("bad weights header {header:?}")))?
        .trim();
    match form {
        "se3" => {
            let mut blocks = BTreeMap::new();
            let mut bias = Vec::new();
            while let Some(line) = lines.next() {
                if line == "BIAS" {
                    let row = lines.next().ok_or_else(|| Error::Parse("missing bias row".into()))?;
                    for t in row.split_whitespace() {
                        bias.push(parse_f64(t)?);
                    }
                    break;
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.first() != Some(&"BLOCK") {
                    return Err(Error::Parse(format!("expected BLOCK, got {line:?}")));
                }
                let kv = KvHeader::parse(&toks[1..])?;
                if kv.has("l") {
                    return Err(Error::Parse(
                        "tfn-form block header in a se3-form file".into(),
                    ));
                }
                let (lp, big_l) = (kv.get("lp")?, kv.get("L")?);
                let (nd, nc, nr) = (kv.get("d")?, kv.get("c")?, kv.get("r")?);
                let (nj, nlp, nbl) = (2 * big_l + 1, 2 * lp + 1, 2 * big_l + 1);
                let mut b = Array6::zeros((nj, nd, nc, nr, nlp, nbl));
                for j in 0..nj {
                    for d in 0..nd {
                        let row = lines
                            .next()
                            .ok_or_else(|| Error::Parse("truncated weight block".into()))?;
                        let vals: Vec<&str> = row.split_whitespace().collect();
                        if vals.len() != nc * nr * nlp * nbl {
                            return Err(Error::Parse(format!(
                                "weight row has {} values, expected {}",
                                vals.len(),
                                nc * nr * nlp * nbl
                            )));
                        }
                        let mut it = vals.iter();
                        for c in 0..nc {
                            for r in 0..nr {
                                for mp in 0..nlp {
                                    for big_m in 0..nbl {
                                        b[[j, d, c, r, mp, big_m]] = parse_f64(it.next().unwrap())?;
                                    }
                                }
                            }
                        }
                    }
                }
                blocks.insert((lp, big_l), b);
            }
            if lines.next().is_some() {
                return Err(Error::Parse("trailing content after BIAS".into()));
            }
            let w = Se3Weights { blocks, bias };
            w.validate()?;
            Ok(AnyWeights::Se3(w))
        }
        "tfn" => {
            let mut blocks = BTreeMap::new();
            let mut bias = Vec::new();
            while let Some(line) = lines.next() {
                if line == "BIAS" {
                    let row = lines.next().ok_or_else(|| Error::Parse("missing bias row".into()))?;
                    for t in row.split_whitespace() {
                        bias.push(parse_f64(t)?);
                    }
                    break;
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.first() != Some(&"BLOCK") {
                    return Err(Error::Parse(format!("expected BLOCK, got {line:?}")));
                }
                let kv = KvHeader::parse(&toks[1..])?;
                let (l, lp, big_l) = (kv.get("l")?, kv.get("lp")?, kv.get("L")?);
                crate::cg::check_triangle(l, lp, big_l)?;
                let (nd, nc, nr) = (kv.get("d")?, kv.get("c")?, kv.get("r")?);
                let (nj, nl) = (2 * big_l + 1, 2 * l + 1);
                let mut b = Array5::zeros((nj, nd, nc, nr, nl));
                for j in 0..nj {
                    for d in 0..nd {
                        let row = lines
                            .next()
                            .ok_or_else(|| Error::Parse("truncated weight block".into()))?;
                        let vals: Vec<&str> = row.split_whitespace().collect();
                        if vals.len() != nc * nr * nl {
                            return Err(Error::Parse(format!(
                                "weight row has {} values, expected {}",
                                vals.len(),
                                nc * nr * nl
                            )));
                        }
                        let mut it = vals.iter();
                        for c in 0..nc {
                            for r in 0..nr {
                                for m in 0..nl {
                                    b[[j, d, c, r, m]] = parse_f64(it.next().unwrap())?;
                                }
                            }
                        }
                    }
                }
                blocks.insert((l, lp, big_l), b);
            }
            if lines.next().is_some() {
                return Err(Error::Parse("trailing content after BIAS".into()));
            }
            let w = TfnWeights { blocks, bias };
            w.validate()?;
            Ok(AnyWeights::Tfn(w))
        }
        other => Err(Error::Parse(format!("unknown weights form {other:?}"))),
    }
}

// -------------------------------------------------------------- layer config

/// Activation selector of a layer config.
#[derive(Debug, Clone, PartialEq)]
pub enum ActivationSpec {
    None,
    /// `relu_wt(set = ico | fps:N | grid:B)`
    ReluWt(SampleSetSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleSetSpec {
    Ico,
    Fps(usize),
    Grid(usize),
}

/// Parsed `key = value` layer configuration.
#[derive(Debug, Clone)]
pub struct LayerConfig {
    pub form: String,
    pub weights_path: String,
    pub support_radius: f64,
    pub kernel: KernelBasisSpec,
    pub activation: ActivationSpec,
    pub lmax_out: Option<usize>,
    pub exclude_self: bool,
}

pub fn read_layer_config(text: &str) -> Result<LayerConfig> {
    let mut form = None;
    let mut weights_path = None;
    let mut support_radius = 1.0;
    let mut activation = ActivationSpec::None;
    let mut lmax_out = None;
    let mut exclude_self = false;
    // kernel.<lp>.<r> = gaussian RHO SIGMA | zernike N
    let mut kernel_entries: BTreeMap<(usize, usize), RadialProfile> = BTreeMap::new();
    for line in data_lines(text) {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key = value, got {line:?}")))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "form" => {
                if value != "se3" && value != "tfn" {
                    return Err(Error::Parse(format!("form must be se3 or tfn, got {value:?}")));
                }
                form = Some(value.to_string());
            }
            "weights" => weights_path = Some(value.to_string()),
            "support_radius" => support_radius = parse_f64(value)?,
            "lmax_out" => lmax_out = Some(parse_usize(value)?),
            "exclude_self" => {
                exclude_self = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(Error::Parse(format!("bad boolean {value:?}"))),
                }
            }
            "activation" => activation = parse_activation(value)?,
            _ if key.starts_with("kernel.") => {
                let rest = &key["kernel.".len()..];
                let (lp_s, r_s) = rest
                    .split_once('.')
                    .ok_or_else(|| Error::Parse(format!("bad kernel key {key:?}")))?;
                let (lp, r) = (parse_usize(lp_s)?, parse_usize(r_s)?);
                let toks: Vec<&str> = value.split_whitespace().collect();
                let profile = match toks.as_slice() {
                    ["gaussian", rho, sigma] => RadialProfile::GaussianShell {
                        rho: parse_f64(rho)?,
                        sigma: parse_f64(sigma)?,
                    },
                    ["zernike", n] => RadialProfile::Zernike { n: parse_usize(n)? },
                    _ => return Err(Error::Parse(format!("bad kernel profile {value:?}"))),
                };
                kernel_entries.insert((lp, r), profile);
            }
            _ => return Err(Error::Parse(format!("unknown config key {key:?}"))),
        }
    }
    let lp_max = kernel_entries
        .keys()
        .map(|(lp, _)| *lp)
        .max()
        .ok_or_else(|| Error::Parse("config declares no kernel profiles".into()))?;
    let mut profiles: Vec<Vec<RadialProfile>> = vec![Vec::new(); lp_max + 1];
    for ((lp, r), p) in kernel_entries {
        if r != profiles[lp].len() {
            return Err(Error::Parse(format!(
                "kernel.{lp}.{r} out of order (radial indices must be contiguous from 0)"
            )));
        }
        profiles[lp].push(p);
    }
    Ok(LayerConfig {
        form: form.ok_or_else(|| Error::Parse("config is missing form".into()))?,
        weights_path: weights_path.ok_or_else(|| Error::Parse("config is missing weights".into()))?,
        support_radius,
        kernel: KernelBasisSpec::new(support_radius, profiles)?,
        activation,
        lmax_out,
        exclude_self,
    })
}

fn parse_activation(value: &str) -> Result<ActivationSpec> {
    if value == "none" {
        return Ok(ActivationSpec::None);
    }
    let inner = value
        .strip_prefix("relu_wt(")
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("bad activation {value:?}")))?;
    let (k, v) = inner
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("bad activation {value:?}")))?;
    if k.trim() != "set" {
        return Err(Error::Parse(format!("bad activation {value:?}")));
    }
    let v = v.trim();
    let set = if v == "ico" {
        SampleSetSpec::Ico
    } else if let Some(n) = v.strip_prefix("fps:") {
        SampleSetSpec::Fps(parse_usize(n)?)
    } else if let Some(b) = v.strip_prefix("grid:") {
        SampleSetSpec::Grid(parse_usize(b)?)
    } else {
        return Err(Error::Parse(format!("bad sample set {v:?}")));
    };
    Ok(ActivationSpec::ReluWt(set))
}
