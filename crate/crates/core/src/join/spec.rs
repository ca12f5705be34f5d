//! JSON input for joins and the report written back.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::chain::{collapse_chain, ChainAtlas, CollapseOrder, Collapsed, IntervalChart};
use super::diffeo::{Func, NumericDiffeo};
use super::verify::{uniform_tolerances, Piece, PiecewiseMap, SeamedMap, SmoothCert, DEFAULT_TOLERANCES};
use crate::{Error, Result};

/// A map of an interval: `"identity"`, `{"affine": [scale, shift]}`,
/// `{"samples": [[x, y], ...], "seams": [...]}` or
/// `{"pieces": [{"from", "to", "coeffs"}, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapSpec {
    Named(String),
    Affine {
        affine: [f64; 2],
    },
    Samples {
        samples: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        seams: Vec<f64>,
    },
    Pieces {
        pieces: Vec<Piece>,
    },
}

impl Default for MapSpec {
    fn default() -> Self {
        MapSpec::Named("identity".into())
    }
}

fn piecewise_diffeo(pieces: &[Piece]) -> Result<NumericDiffeo> {
    let m = Arc::new(PiecewiseMap::new(pieces.to_vec())?);
    let (lo, hi) = m.domain();
    let seams = m.seams();
    let (m1, m2) = (m.clone(), m);
    let f: Func = Arc::new(move |x| m1.eval(x));
    let df: Func = Arc::new(move |x| m2.derivative(x));
    NumericDiffeo::from_arcs(lo, hi, f, Some(df), seams)
}

impl MapSpec {
    fn check_named(name: &str) -> Result<()> {
        if name == "identity" {
            Ok(())
        } else {
            Err(Error::Input(format!("unknown map {name:?}; expected \"identity\"")))
        }
    }

    /// The map as a diffeomorphism; `domain` is used by the forms that do
    /// not carry their own.
    pub fn to_diffeo(&self, domain: (f64, f64)) -> Result<NumericDiffeo> {
        match self {
            MapSpec::Named(name) => {
                Self::check_named(name)?;
                NumericDiffeo::identity(domain.0, domain.1)
            }
            &MapSpec::Affine { affine: [s, t] } => {
                NumericDiffeo::from_fn(domain.0, domain.1, move |x| s * x + t, Some(Box::new(move |_| s)))
            }
            MapSpec::Samples { samples, seams } => {
                let (xs, ys) = samples.iter().map(|p| (p[0], p[1])).unzip();
                Ok(NumericDiffeo::from_samples(xs, ys)?.with_seams(seams.iter().copied()))
            }
            MapSpec::Pieces { pieces } => piecewise_diffeo(pieces),
        }
    }

    /// The map for certification. Piecewise polynomials need not be monotone.
    pub fn to_seamed(&self) -> Result<Box<dyn SeamedMap>> {
        match self {
            MapSpec::Pieces { pieces } => Ok(Box::new(PiecewiseMap::new(pieces.clone())?)),
            MapSpec::Samples { .. } => Ok(Box::new(self.to_diffeo((0.0, 1.0))?)),
            MapSpec::Named(_) | MapSpec::Affine { .. } => {
                Err(Error::Input("certification needs \"samples\" or \"pieces\"".into()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub image: [f64; 2],
    #[serde(default)]
    pub map: MapSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Transition between consecutive charts, given as `"map"` or directly by
/// `"samples"` (with optional `"seams"`) or `"pieces"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub between: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seams: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<Piece>>,
}

impl TransitionSpec {
    fn map_spec(&self) -> Result<MapSpec> {
        match (&self.map, &self.samples, &self.pieces) {
            (Some(m), None, None) if self.seams.is_none() => Ok(m.clone()),
            (None, Some(s), None) => Ok(MapSpec::Samples { samples: s.clone(), seams: self.seams.clone().unwrap_or_default() }),
            (None, None, Some(p)) if self.seams.is_none() => Ok(MapSpec::Pieces { pieces: p.clone() }),
            _ => Err(Error::Input(format!(
                "transition {:?} needs exactly one of \"map\", \"samples\", \"pieces\"",
                self.between
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JoinSpec {
    pub charts: Vec<ChartSpec>,
    /// Derived from the chart maps when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transitions: Vec<TransitionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<CollapseOrder>,
    /// Uniform certification tolerance; per-order defaults otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl ChartSpec {
    fn build(&self, index: usize) -> Result<IntervalChart> {
        let label = self.label.clone().unwrap_or_else(|| format!("chart{index}"));
        let [lo, hi] = self.image;
        let chart = match &self.map {
            MapSpec::Named(name) => {
                MapSpec::check_named(name)?;
                IntervalChart::identity(label, lo, hi)?
            }
            &MapSpec::Affine { affine: [s, t] } => IntervalChart::affine(label, (lo, hi), s, t)?,
            other => IntervalChart::numeric(label, other.to_diffeo((lo, hi))?)?,
        };
        let scale = (hi - lo).abs().max(1.0);
        if (chart.image.0 - lo).abs() > 1e-9 * scale || (chart.image.1 - hi).abs() > 1e-9 * scale {
            return Err(Error::InvalidAtlas(format!(
                "chart {index}: map covers ({}; {}), not the stated image ({lo}; {hi})",
                chart.image.0, chart.image.1
            )));
        }
        Ok(chart)
    }
}

impl JoinSpec {
    pub fn k(&self) -> usize {
        self.k.unwrap_or(2)
    }

    pub fn tolerances(&self) -> Vec<f64> {
        self.tolerance.map(uniform_tolerances).unwrap_or_else(|| DEFAULT_TOLERANCES.to_vec())
    }

    pub fn atlas(&self) -> Result<ChainAtlas> {
        let charts = self.charts.iter().enumerate().map(|(i, c)| c.build(i)).collect::<Result<Vec<_>>>()?;
        if self.transitions.is_empty() {
            return ChainAtlas::from_charts(charts);
        }
        let m = charts.len();
        let mut transitions: Vec<Option<NumericDiffeo>> = vec![None; m.saturating_sub(1)];
        for t in &self.transitions {
            let [i, j] = t.between;
            if j != i + 1 || j >= m {
                return Err(Error::InvalidAtlas(format!("transition between {i} and {j}: charts must be consecutive")));
            }
            if transitions[i].is_some() {
                return Err(Error::InvalidAtlas(format!("transition between {i} and {j} given twice")));
            }
            let overlap = (charts[j].image.0, charts[i].image.1);
            transitions[i] = Some(t.map_spec()?.to_diffeo(overlap)?);
        }
        let transitions = transitions
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| Error::InvalidAtlas(format!("missing transition between {i} and {}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        ChainAtlas::new(charts, transitions)
    }

    pub fn run(&self) -> Result<(Collapsed, JoinReport)> {
        let atlas = self.atlas()?;
        let order = self.order.unwrap_or(CollapseOrder::LeftToRight);
        let collapsed = collapse_chain(&atlas, self.k(), &self.tolerances(), order)?;
        let report = JoinReport::new(&atlas, &collapsed, self.k());
        Ok((collapsed, report))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartReport {
    pub index: usize,
    pub label: String,
    pub image: [f64; 2],
    /// Samples of `W ∘ φ⁻¹` on the chart image.
    pub presentation: Vec<[f64; 2]>,
    pub cert: SmoothCert,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub chart: usize,
    pub side: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
    pub p: SmoothCert,
    pub q: SmoothCert,
}

/// The collapsed chart, sampled, and every certificate behind it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JoinReport {
    pub image: [f64; 2],
    pub k: usize,
    pub order: CollapseOrder,
    pub certified: bool,
    /// `(s, W(s))` on the abstract domain.
    pub chart: Vec<[f64; 2]>,
    pub charts: Vec<ChartReport>,
    pub steps: Vec<StepReport>,
}

const REPORT_SAMPLES: usize = 32;

fn sample(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> Vec<[f64; 2]> {
    (0..=REPORT_SAMPLES)
        .map(|i| {
            let x = if i == REPORT_SAMPLES { hi } else { lo + (hi - lo) * i as f64 / REPORT_SAMPLES as f64 };
            [x, f(x)]
        })
        .collect()
}

impl JoinReport {
    pub fn new(atlas: &ChainAtlas, c: &Collapsed, k: usize) -> Self {
        let charts = atlas
            .charts()
            .iter()
            .zip(&c.presentations)
            .zip(&c.presentation_certs)
            .enumerate()
            .map(|(index, ((chart, tau), cert))| ChartReport {
                index,
                label: chart.label.clone(),
                image: [chart.image.0, chart.image.1],
                presentation: sample(chart.image.0, chart.image.1, |x| tau.eval(x)),
                cert: cert.clone(),
            })
            .collect();
        let steps = c
            .steps
            .iter()
            .map(|s| StepReport {
                chart: s.chart,
                side: if s.from_left { "left" } else { "right" }.into(),
                eps: s.glue.as_ref().map(|g| g.eps),
                area: s.glue.as_ref().map(|g| g.area),
                p: s.p_cert.clone(),
                q: s.q_cert.clone(),
            })
            .collect();
        let (lo, hi) = c.chart.domain;
        JoinReport {
            image: [c.chart.image.0, c.chart.image.1],
            k,
            order: c.order,
            certified: c.cert.pass,
            chart: sample(lo, hi, |s| c.chart.map.eval(s)),
            charts,
            steps,
        }
    }
}
