use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{vsh_norm_sq, VshFamily};
use crate::error::{Error, Result};
use crate::sphere::{sh_count, sh_degree_order, sh_index, ShCoeffs};

/// One of the three orthogonal channels of a spherical vector field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    /// External sources, expanded in `G^ext_{n,k}`, `n ≥ 1`.
    Ext,
    /// Internal sources, expanded in `G^int_{n,k}`, `n ≥ 0`.
    Int,
    /// Tangential divergence-free part, expanded in `Φ_{n,k}`, `n ≥ 1`.
    Df,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Ext, Channel::Int, Channel::Df];

    pub fn min_degree(self) -> usize {
        match self {
            Channel::Int => 0,
            Channel::Ext | Channel::Df => 1,
        }
    }

    pub fn family(self) -> VshFamily {
        match self {
            Channel::Ext => VshFamily::Gext,
            Channel::Int => VshFamily::Gint,
            Channel::Df => VshFamily::Phi,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::Ext => "ext",
            Channel::Int => "int",
            Channel::Df => "df",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ext" => Ok(Channel::Ext),
            "int" => Ok(Channel::Int),
            "df" => Ok(Channel::Df),
            other => Err(Error::InvalidParameter(format!("unknown channel '{other}'"))),
        }
    }
}

/// Coefficients of one channel. Degrees below the channel's minimum have no slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelCoeffs {
    channel: Channel,
    max_degree: Option<usize>,
    values: Vec<f64>,
}

impl ChannelCoeffs {
    pub fn empty(channel: Channel) -> Self {
        Self {
            channel,
            max_degree: None,
            values: Vec::new(),
        }
    }

    /// Zero coefficients up to `max_degree`; empty if `max_degree` is below the
    /// channel minimum.
    pub fn zeros(channel: Channel, max_degree: usize) -> Self {
        if max_degree < channel.min_degree() {
            return Self::empty(channel);
        }
        Self {
            channel,
            max_degree: Some(max_degree),
            values: vec![0.0; Self::len_for(channel, max_degree)],
        }
    }

    fn len_for(channel: Channel, max_degree: usize) -> usize {
        let m = channel.min_degree();
        sh_count(max_degree) - m * m
    }

    pub fn from_vec(channel: Channel, max_degree: Option<usize>, values: Vec<f64>) -> Result<Self> {
        let expected = match max_degree {
            Some(n) if n >= channel.min_degree() => Self::len_for(channel, n),
            Some(_) => {
                return Err(Error::InvalidIndex(format!(
                    "{channel} channel has no slots below degree {}",
                    channel.min_degree()
                )))
            }
            None => 0,
        };
        if values.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{channel} channel at degree {max_degree:?} needs {expected} values, got {}",
                values.len()
            )));
        }
        Ok(Self {
            channel,
            max_degree,
            values,
        })
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.max_degree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn slot(&self, n: usize, k: i64) -> Result<usize> {
        let m = self.channel.min_degree();
        if k.unsigned_abs() as usize > n {
            return Err(Error::InvalidIndex(format!("|k| > n for (n, k) = ({n}, {k})")));
        }
        if n < m {
            return Err(Error::InvalidIndex(format!(
                "{} channel has no degree-{n} slot",
                self.channel
            )));
        }
        match self.max_degree {
            Some(max) if n <= max => Ok(sh_index(n, k) - m * m),
            _ => Err(Error::InvalidIndex(format!(
                "degree {n} outside {} channel (max {:?})",
                self.channel, self.max_degree
            ))),
        }
    }

    pub fn get(&self, n: usize, k: i64) -> Result<f64> {
        Ok(self.values[self.slot(n, k)?])
    }

    /// Coefficient or zero when `(n, k)` has no slot.
    pub fn get_or_zero(&self, n: usize, k: i64) -> f64 {
        self.slot(n, k).map(|i| self.values[i]).unwrap_or(0.0)
    }

    pub fn set(&mut self, n: usize, k: i64, value: f64) -> Result<()> {
        let i = self.slot(n, k)?;
        self.values[i] = value;
        Ok(())
    }

    /// Iterates `(n, k, value)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, f64)> + '_ {
        let offset = self.channel.min_degree().pow(2);
        self.values.iter().enumerate().map(move |(i, v)| {
            let (n, k) = sh_degree_order(i + offset);
            (n, k, *v)
        })
    }

    /// L²(𝕊)³ norm of the field represented by this channel.
    pub fn field_norm(&self) -> f64 {
        let family = self.channel.family();
        self.iter()
            .map(|(n, _, v)| v * v * vsh_norm_sq(family, n).expect("valid degree"))
            .sum::<f64>()
            .sqrt()
    }

    /// Same coefficients at another degree (truncating or zero-padding).
    pub fn with_max_degree(&self, max_degree: Option<usize>) -> Self {
        let mut out = match max_degree {
            Some(n) => Self::zeros(self.channel, n),
            None => Self::empty(self.channel),
        };
        let keep = out.values.len().min(self.values.len());
        out.values[..keep].copy_from_slice(&self.values[..keep]);
        out
    }

    /// Entrywise `self + other`, widened to the larger degree.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.channel, other.channel, "channel mismatch");
        let degree = match (self.max_degree, other.max_degree) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let mut out = self.with_max_degree(degree);
        for (o, v) in out.values.iter_mut().zip(&other.values) {
            *o += v;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Converts to a scalar coefficient set (degree-0 slot zero for ext/df).
    pub fn to_sh(&self) -> ShCoeffs {
        let degree = self.max_degree.unwrap_or(0);
        let mut out = ShCoeffs::zeros(degree);
        for (n, k, v) in self.iter() {
            out.set(n, k, v).expect("in range");
        }
        out
    }
}

/// Coefficients of a square-integrable spherical vector field in the
/// `(ext, int, df)` channel basis `{G^ext_{n,k}, G^int_{n,k}, Φ_{n,k}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorFieldCoeffs {
    pub ext: ChannelCoeffs,
    pub int: ChannelCoeffs,
    pub df: ChannelCoeffs,
}

impl VectorFieldCoeffs {
    pub fn zeros(max_ext: usize, max_int: usize, max_df: usize) -> Self {
        Self {
            ext: ChannelCoeffs::zeros(Channel::Ext, max_ext),
            int: ChannelCoeffs::zeros(Channel::Int, max_int),
            df: ChannelCoeffs::zeros(Channel::Df, max_df),
        }
    }

    pub fn empty() -> Self {
        Self {
            ext: ChannelCoeffs::empty(Channel::Ext),
            int: ChannelCoeffs::empty(Channel::Int),
            df: ChannelCoeffs::empty(Channel::Df),
        }
    }

    /// Field consisting of one mode with unit coefficient.
    pub fn single(channel: Channel, n: usize, k: i64) -> Result<Self> {
        let mut c = Self::empty();
        *c.channel_mut(channel) = ChannelCoeffs::zeros(channel, n);
        c.channel_mut(channel).set(n, k, 1.0)?;
        Ok(c)
    }

    pub fn channel(&self, channel: Channel) -> &ChannelCoeffs {
        match channel {
            Channel::Ext => &self.ext,
            Channel::Int => &self.int,
            Channel::Df => &self.df,
        }
    }

    pub fn channel_mut(&mut self, channel: Channel) -> &mut ChannelCoeffs {
        match channel {
            Channel::Ext => &mut self.ext,
            Channel::Int => &mut self.int,
            Channel::Df => &mut self.df,
        }
    }

    /// Largest degree present in any channel.
    pub fn max_degree(&self) -> Option<usize> {
        Channel::ALL
            .iter()
            .filter_map(|c| self.channel(*c).max_degree())
            .max()
    }

    /// Squared L²(𝕊)³ norm, `Σ a² n(2n+1) + Σ b² (n+1)(2n+1) + Σ d² n(n+1)`.
    pub fn norm_sq(&self) -> f64 {
        Channel::ALL
            .iter()
            .map(|c| self.channel(*c).field_norm().powi(2))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            ext: self.ext.add(&other.ext),
            int: self.int.add(&other.int),
            df: self.df.add(&other.df),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            ext: self.ext.scale(s),
            int: self.int.scale(s),
            df: self.df.scale(s),
        }
    }

    /// Iterates `(channel, n, k, value)` over all channels in (channel, n, k) order.
    pub fn iter(&self) -> impl Iterator<Item = (Channel, usize, i64, f64)> + '_ {
        Channel::ALL.into_iter().flat_map(move |c| {
            self.channel(c).iter().map(move |(n, k, v)| (c, n, k, v))
        })
    }
}
