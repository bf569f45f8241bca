//! Synthetic dueling environments: latent rewards, transfer links, the duel
//! oracle, and string ids used by the harness configs.

mod covering;
mod oracle;
mod reward;
mod transfer;

pub use covering::covering_number;
pub use oracle::{DuelOracle, Environment};
pub use reward::{evaluate_f, RewardFunction, RewardShape};
pub use transfer::{gamma_of, transfer_eval, TransferFunction, TransferKind};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Default optimum coordinate for the cone and ridge presets. Off the dyadic
/// grid, so `x⋆` never sits on a cube face.
pub const DEFAULT_OPTIMUM: f64 = 0.3;

pub const REWARD_IDS: &str = "cone_peak:d=<d>[,opt=<x>], ridge:d=<d>,k=<k>[,opt=<x>], table:d=<d>,anchor=<x1/x2/..@v>[,anchor=...]";
pub const TRANSFER_IDS: &str = "logistic, probit[:sigma=<s>], linear, poly:c=<c>,p=<p>";

/// Splits `name:k=v,k=v` into the name and its parameters.
pub(crate) fn split_id(id: &str) -> Result<(&str, Vec<(&str, &str)>)> {
    let (name, rest) = match id.split_once(':') {
        Some((n, r)) => (n.trim(), r),
        None => (id.trim(), ""),
    };
    let mut params = Vec::new();
    for part in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::param(part, format!("expected key=value in `{id}`")))?;
        params.push((k.trim(), v.trim()));
    }
    Ok((name, params))
}

pub(crate) fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::param(key, format!("cannot parse `{value}`")))
}

fn parse_coords(key: &str, value: &str, d: usize) -> Result<Point> {
    let coords = value
        .split('/')
        .map(|v| parse_num::<f64>(key, v))
        .collect::<Result<Vec<_>>>()?;
    match coords.len() {
        1 => Point::splat(d, coords[0]),
        n if n == d => Point::new(coords),
        n => Err(Error::DimensionMismatch {
            expected: d,
            got: n,
        }),
    }
}

fn unknown_param(id: &str, key: &str) -> Error {
    Error::param(key, format!("not a parameter of `{id}`"))
}

/// Parses a reward preset id such as `cone_peak:d=2` or `ridge:d=2,k=1`.
pub fn parse_reward(id: &str) -> Result<RewardFunction> {
    let (name, params) = split_id(id)?;
    let mut d = None;
    let mut k = None;
    let mut opt = None;
    let mut anchors = Vec::new();
    for &(key, value) in &params {
        match key {
            "d" => d = Some(parse_num::<usize>(key, value)?),
            "k" if name == "ridge" => k = Some(parse_num::<usize>(key, value)?),
            "opt" if name != "table" => opt = Some(value),
            "anchor" if name == "table" => anchors.push(value),
            _ => return Err(unknown_param(id, key)),
        }
    }
    let d = d.ok_or_else(|| Error::param("d", format!("missing in `{id}`")))?;
    crate::geometry::check_dim(d)?;
    let optimum = match opt {
        Some(v) => parse_coords("opt", v, d)?,
        None => Point::splat(d, DEFAULT_OPTIMUM)?,
    };
    match name {
        "cone_peak" => Ok(RewardFunction::cone_peak(optimum)),
        "ridge" => {
            let k = k.ok_or_else(|| Error::param("k", format!("missing in `{id}`")))?;
            RewardFunction::ridge(optimum, k)
        }
        "table" => {
            let anchors = anchors
                .into_iter()
                .map(|a| {
                    let (p, v) = a.split_once('@').ok_or_else(|| {
                        Error::param("anchor", format!("expected point@value, got `{a}`"))
                    })?;
                    Ok((
                        parse_coords("anchor", p, d)?,
                        parse_num::<f64>("anchor", v)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            RewardFunction::table(anchors)
        }
        other => Err(Error::UnknownId {
            kind: "environment",
            id: other.to_string(),
            registered: REWARD_IDS.to_string(),
        }),
    }
}

/// Parses a transfer id such as `logistic` or `probit:sigma=1`.
pub fn parse_transfer(id: &str) -> Result<TransferFunction> {
    let (name, params) = split_id(id)?;
    let get = |key: &str| params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
    let allowed: &[&str] = match name {
        "probit" => &["sigma"],
        "poly" => &["c", "p"],
        _ => &[],
    };
    if let Some((key, _)) = params.iter().find(|(k, _)| !allowed.contains(k)) {
        return Err(unknown_param(id, key));
    }
    match name {
        "logistic" => Ok(TransferFunction::logistic()),
        "linear" => Ok(TransferFunction::linear()),
        "probit" => {
            let sigma = get("sigma").map(|v| parse_num("sigma", v)).transpose()?;
            TransferFunction::probit(sigma.unwrap_or(1.0))
        }
        "poly" => {
            let c = get("c").ok_or_else(|| Error::param("c", format!("missing in `{id}`")))?;
            let p = get("p").ok_or_else(|| Error::param("p", format!("missing in `{id}`")))?;
            TransferFunction::polynomial(parse_num("c", c)?, parse_num("p", p)?)
        }
        other => Err(Error::UnknownId {
            kind: "transfer",
            id: other.to_string(),
            registered: TRANSFER_IDS.to_string(),
        }),
    }
}
