use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use super::kernel::rbf_unchecked;
use super::SvrHyperparams;
use crate::error::{Error, Result};
use crate::featureset::{EncodedSample, ScalerParams};

const MAGIC: &str = "# jamcast svr model";
const FORMAT_VERSION: u32 = 1;

/// A trained epsilon-SVR.
///
/// Support vectors live in the scaled feature space; the embedded scaler maps
/// raw feature vectors into that space (see [`SvrModel::predict_unscaled`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    support_vectors: Vec<Vec<f64>>,
    dual_coefs: Vec<f64>,
    bias: f64,
    hyperparams: SvrHyperparams,
    scaler: ScalerParams,
    feature_layout_tag: String,
}

impl SvrModel {
    /// Assembles a model, checking the coefficient box and shapes.
    pub fn from_parts(
        support_vectors: Vec<Vec<f64>>,
        dual_coefs: Vec<f64>,
        bias: f64,
        hyperparams: SvrHyperparams,
        scaler: ScalerParams,
        feature_layout_tag: String,
    ) -> Result<Self> {
        hyperparams.validate()?;
        if support_vectors.len() != dual_coefs.len() {
            return Err(Error::Shape(format!(
                "{} support vectors but {} coefficients",
                support_vectors.len(),
                dual_coefs.len()
            )));
        }
        let dim = scaler.dim();
        if let Some(sv) = support_vectors.iter().find(|sv| sv.len() != dim) {
            return Err(Error::Shape(format!(
                "support vector of dimension {} in a model of dimension {dim}",
                sv.len()
            )));
        }
        if let Some(b) = dual_coefs.iter().find(|b| !(b.abs() <= hyperparams.c)) {
            return Err(Error::validation("dual_coefs", format!("{b} outside [-C, C]")));
        }
        if !bias.is_finite() {
            return Err(Error::validation("bias", "not finite"));
        }
        Ok(Self {
            support_vectors,
            dual_coefs,
            bias,
            hyperparams,
            scaler,
            feature_layout_tag,
        })
    }

    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.support_vectors
    }

    pub fn dual_coefs(&self) -> &[f64] {
        &self.dual_coefs
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn hyperparams(&self) -> &SvrHyperparams {
        &self.hyperparams
    }

    pub fn scaler(&self) -> &ScalerParams {
        &self.scaler
    }

    pub fn feature_layout_tag(&self) -> &str {
        &self.feature_layout_tag
    }

    pub fn dim(&self) -> usize {
        self.scaler.dim()
    }

    /// Replaces the embedded scaler; its dimension must match the model.
    pub fn with_scaler(mut self, scaler: ScalerParams) -> Result<Self> {
        if scaler.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "scaler of dimension {} for a model of dimension {}",
                scaler.dim(),
                self.dim()
            )));
        }
        self.scaler = scaler;
        Ok(self)
    }

    pub fn with_layout_tag(mut self, tag: impl Into<String>) -> Self {
        self.feature_layout_tag = tag.into();
        self
    }

    /// Raw decision value `sum_i beta_i K(sv_i, x) + bias` for a scaled `x`.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Shape(format!(
                "input of dimension {} for a model of dimension {} ({})",
                x.len(),
                self.dim(),
                self.feature_layout_tag
            )));
        }
        let gamma = self.hyperparams.gamma;
        let sum: f64 = self
            .support_vectors
            .iter()
            .zip(&self.dual_coefs)
            .map(|(sv, b)| b * rbf_unchecked(sv, x, gamma))
            .sum();
        Ok(sum + self.bias)
    }

    /// Scales raw features with the embedded scaler, then predicts.
    pub fn predict_unscaled(&self, features: &[f64]) -> Result<f64> {
        self.predict(&self.scaler.transform(features)?)
    }

    /// Recovers the dual coefficient of every sample by matching support
    /// vectors on exact feature equality. Samples that are not support
    /// vectors get 0; repeated points consume matches in order.
    pub fn coefficients_for(&self, samples: &[EncodedSample]) -> Result<Vec<f64>> {
        let mut pool: HashMap<Vec<u64>, VecDeque<f64>> = HashMap::new();
        for (sv, b) in self.support_vectors.iter().zip(&self.dual_coefs) {
            pool.entry(bits(sv)).or_default().push_back(*b);
        }
        samples
            .iter()
            .map(|s| {
                if s.dim() != self.dim() {
                    return Err(Error::Shape(format!(
                        "sample of dimension {} for a model of dimension {}",
                        s.dim(),
                        self.dim()
                    )));
                }
                Ok(pool
                    .get_mut(&bits(&s.features))
                    .and_then(|q| q.pop_front())
                    .unwrap_or(0.0))
            })
            .collect()
    }

    /// Largest violation of the epsilon-SVR KKT conditions over `samples`
    /// (the scaled training set). Zero means exact optimality.
    ///
    /// With residual `r = y - f(x)` and `alpha = max(beta, 0)`,
    /// `alpha* = max(-beta, 0)`:
    /// `alpha < C => r <= eps`, `alpha > 0 => r >= eps`,
    /// `alpha* < C => r >= -eps`, `alpha* > 0 => r <= -eps`.
    pub fn kkt_violation(&self, samples: &[EncodedSample]) -> Result<f64> {
        let coefs = self.coefficients_for(samples)?;
        let c = self.hyperparams.c;
        let eps = self.hyperparams.epsilon;
        let mut worst: f64 = 0.0;
        for (s, beta) in samples.iter().zip(coefs) {
            let r = s.target - self.predict(&s.features)?;
            let (alpha, alpha_star) = (beta.max(0.0), (-beta).max(0.0));
            if alpha < c {
                worst = worst.max(r - eps);
            }
            if alpha > 0.0 {
                worst = worst.max(eps - r);
            }
            if alpha_star < c {
                worst = worst.max(-eps - r);
            }
            if alpha_star > 0.0 {
                worst = worst.max(r + eps);
            }
        }
        Ok(worst)
    }

    /// Serializes to the self-describing text format: a `key = value` header
    /// followed by one `sv = coef x_1 ... x_d` line per support vector.
    /// Floats are written in shortest round-trip form.
    pub fn to_text(&self) -> String {
        let hp = &self.hyperparams;
        let mut out = String::new();
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "format = {FORMAT_VERSION}");
        let _ = writeln!(out, "feature_layout = {}", self.feature_layout_tag);
        let _ = writeln!(out, "dimension = {}", self.dim());
        let _ = writeln!(out, "c = {:?}", hp.c);
        let _ = writeln!(out, "epsilon = {:?}", hp.epsilon);
        let _ = writeln!(out, "gamma = {:?}", hp.gamma);
        let _ = writeln!(out, "tol = {:?}", hp.tol);
        let _ = writeln!(out, "max_passes = {}", hp.max_passes);
        let _ = writeln!(out, "bias = {:?}", self.bias);
        let _ = writeln!(out, "scaler_mean = {}", join(self.scaler.mean()));
        let _ = writeln!(out, "scaler_scale = {}", join(self.scaler.scale()));
        let _ = writeln!(out, "support_vectors = {}", self.support_vectors.len());
        for (sv, b) in self.support_vectors.iter().zip(&self.dual_coefs) {
            let _ = writeln!(out, "sv = {b:?} {}", join(sv));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == MAGIC => {}
            _ => return Err(Error::parse("line 1", format!("expected `{MAGIC}`"))),
        }
        let mut header: HashMap<String, (usize, String)> = HashMap::new();
        let mut svs = Vec::new();
        let mut coefs = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("line {lineno}"), "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "sv" {
                let nums = parse_floats(value, lineno)?;
                let (b, x) = nums
                    .split_first()
                    .ok_or_else(|| Error::parse(format!("line {lineno}"), "empty support vector"))?;
                coefs.push(*b);
                svs.push(x.to_vec());
            } else if header.insert(key.to_string(), (lineno, value.to_string())).is_some() {
                return Err(Error::parse(format!("line {lineno}"), format!("duplicate key `{key}`")));
            }
        }
        let get = |key: &str| {
            header
                .get(key)
                .ok_or_else(|| Error::parse(key, "missing header key"))
        };
        let num = |key: &str| -> Result<f64> {
            let (lineno, v) = get(key)?;
            v.parse()
                .map_err(|_| Error::parse(format!("line {lineno}"), format!("`{key}` is not a number")))
        };
        let int = |key: &str| -> Result<usize> {
            let (lineno, v) = get(key)?;
            v.parse()
                .map_err(|_| Error::parse(format!("line {lineno}"), format!("`{key}` is not an integer")))
        };

        let version = int("format")?;
        if version != FORMAT_VERSION as usize {
            return Err(Error::parse("format", format!("unsupported version {version}")));
        }
        let dim = int("dimension")?;
        let hyperparams = SvrHyperparams {
            c: num("c")?,
            epsilon: num("epsilon")?,
            gamma: num("gamma")?,
            tol: num("tol")?,
            max_passes: int("max_passes")?,
        };
        let (mean_line, mean) = get("scaler_mean")?;
        let (scale_line, scale) = get("scaler_scale")?;
        let mean = parse_floats(mean, *mean_line)?;
        let scale = parse_floats(scale, *scale_line)?;
        if mean.len() != dim {
            return Err(Error::parse("scaler_mean", format!("expected {dim} values")));
        }
        let scaler = ScalerParams::new(mean, scale)?;
        let declared = int("support_vectors")?;
        if declared != svs.len() {
            return Err(Error::parse(
                "support_vectors",
                format!("header declares {declared}, file has {}", svs.len()),
            ));
        }
        let layout = get("feature_layout")?.1.clone();
        Self::from_parts(svs, coefs, num("bias")?, hyperparams, scaler, layout)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn parse_floats(s: &str, lineno: usize) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::parse(format!("line {lineno}"), format!("`{tok}` is not a number")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svr::train_svr;

    fn hp() -> SvrHyperparams {
        SvrHyperparams {
            c: 5.0,
            epsilon: 0.1,
            gamma: 0.5,
            tol: 1e-3,
            max_passes: 100,
        }
    }

    fn samples() -> Vec<EncodedSample> {
        (0..12)
            .map(|i| {
                let x = i as f64 * 0.37;
                EncodedSample::new(vec![x, (x * 1.7).cos()], 3.0 + 2.0 * x.sin())
            })
            .collect()
    }

    #[test]
    fn zero_model_predicts_bias() {
        let m = SvrModel::from_parts(vec![], vec![], 2.5, hp(), ScalerParams::identity(3), "t".into())
            .unwrap();
        assert_eq!(m.predict(&[1.0, -4.0, 9.0]).unwrap(), 2.5);
        assert!(matches!(m.predict(&[1.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn zero_model_on_zero_targets_is_optimal() {
        let m = SvrModel::from_parts(vec![], vec![], 0.0, hp(), ScalerParams::identity(2), "t".into())
            .unwrap();
        let zeros: Vec<_> = samples()
            .into_iter()
            .map(|s| EncodedSample::new(s.features, 0.0))
            .collect();
        assert_eq!(m.kkt_violation(&zeros).unwrap(), 0.0);
    }

    #[test]
    fn forced_bound_coefficient_on_in_tube_point_violates_kkt() {
        let s = samples();
        let model = train_svr(&s, &hp()).unwrap();
        assert!(model.kkt_violation(&s).unwrap() <= hp().tol);

        // Pick a point strictly inside the tube and pin its coefficient to C.
        let inside = s
            .iter()
            .find(|x| (x.target - model.predict(&x.features).unwrap()).abs() < hp().epsilon * 0.5)
            .expect("some point inside the tube")
            .clone();
        let mut svs = model.support_vectors().to_vec();
        let mut coefs = model.dual_coefs().to_vec();
        svs.push(inside.features.clone());
        coefs.push(hp().c);
        let broken = SvrModel::from_parts(
            svs,
            coefs,
            model.bias(),
            hp(),
            ScalerParams::identity(2),
            "t".into(),
        )
        .unwrap();
        assert!(broken.kkt_violation(&s).unwrap() > hp().tol);
    }

    #[test]
    fn rejects_out_of_box_coefficients() {
        let r = SvrModel::from_parts(
            vec![vec![0.0]],
            vec![5.5],
            0.0,
            hp(),
            ScalerParams::identity(1),
            "t".into(),
        );
        assert!(matches!(r, Err(Error::Validation { .. })));
    }

    #[test]
    fn text_round_trip_is_bitwise() {
        let s = samples();
        let scaler = ScalerParams::new(vec![0.1, -0.2], vec![1.5, 0.3]).unwrap();
        let model = train_svr(&s, &hp()).unwrap().with_scaler(scaler).unwrap().with_layout_tag("a,b");
        let text = model.to_text();
        let back = SvrModel::from_text(&text).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.to_text(), text);
        for x in s.iter() {
            assert_eq!(
                back.predict_unscaled(&x.features).unwrap().to_bits(),
                model.predict_unscaled(&x.features).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn malformed_text_is_rejected() {
        let text = train_svr(&samples(), &hp()).unwrap().to_text();
        assert!(SvrModel::from_text("garbage").is_err());
        let missing = text.replace("gamma = ", "gama = ");
        assert!(matches!(SvrModel::from_text(&missing), Err(Error::Parse { .. })));
        let truncated: String = text.lines().take(text.lines().count() - 1).collect::<Vec<_>>().join("\n");
        assert!(matches!(SvrModel::from_text(&truncated), Err(Error::Parse { .. })));
        let bad_num = text.replace("bias = ", "bias = x");
        assert!(matches!(SvrModel::from_text(&bad_num), Err(Error::Parse { .. })));
    }
}
