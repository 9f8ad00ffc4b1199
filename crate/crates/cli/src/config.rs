//! Run configuration: defaults, a flat `key = value` file, then flags.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rcdensity::{
    ContentWords, ExclusionPolicy, FactorConfig, GivennessConfig, InterveningCount, PunctuationSet,
    TrainOptions,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorpusFormat {
    Vertical,
    Plain,
}

/// Modelling unit: lemmas, or surface forms taken as lemmas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Unit {
    Lemma,
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Counting {
    Mentions,
    Distinct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: Vec<PathBuf>,
    pub format: CorpusFormat,
    pub unit: Unit,
    pub punctuation: String,
    pub content_tags: Vec<String>,
    pub stoplist: Option<PathBuf>,
    pub factor: FactorConfig,
    pub discount: Option<f64>,
    pub unk_share: Option<f64>,
    pub include_punctuation: bool,
    pub givenness_window: usize,
    pub givenness_counting: Counting,
    pub exclude_rc_first: bool,
    pub exclude_matrix_first: bool,
    pub model: Option<PathBuf>,
    pub clauses: Option<PathBuf>,
    pub referents: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// Accepted and recorded; the pipeline has no randomness.
    pub seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let exclusion = ExclusionPolicy::default();
        let givenness = GivennessConfig::default();
        Self {
            corpus: Vec::new(),
            format: CorpusFormat::Vertical,
            unit: Unit::Lemma,
            punctuation: PunctuationSet::default().as_string(),
            content_tags: ContentWords::default().tag_prefixes().to_vec(),
            stoplist: None,
            factor: FactorConfig::default(),
            discount: None,
            unk_share: None,
            include_punctuation: false,
            givenness_window: givenness.window,
            givenness_counting: Counting::Mentions,
            exclude_rc_first: exclusion.rc_first,
            exclude_matrix_first: exclusion.matrix_first,
            model: None,
            clauses: None,
            referents: None,
            out_dir: PathBuf::from("report"),
            seed: None,
        }
    }
}

/// Flags shared by all pipeline subcommands; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Corpus file(s); repeat the flag for several.
    #[arg(long, value_name = "PATH")]
    pub corpus: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<CorpusFormat>,
    #[arg(long, value_enum)]
    pub unit: Option<Unit>,
    /// Characters treated as punctuation tokens.
    #[arg(long, value_name = "CHARS")]
    pub punctuation: Option<String>,
    /// Comma-separated POS tag prefixes that mark content words.
    #[arg(long, value_name = "TAGS")]
    pub content_tags: Option<String>,
    /// Function-word list used for tokens without a POS tag.
    #[arg(long, value_name = "PATH")]
    pub stoplist: Option<PathBuf>,
    #[arg(long)]
    pub bonus: Option<f64>,
    #[arg(long)]
    pub wearout: Option<u32>,
    /// Decay window in words, or `inf` for no decay.
    #[arg(long, value_name = "WORDS|inf")]
    pub window: Option<String>,
    #[arg(long)]
    pub floor: Option<u32>,
    /// Fixed Kneser-Ney discount in (0, 1).
    #[arg(long)]
    pub discount: Option<f64>,
    /// Continuation mass reserved for unknown words, in [0, 1).
    #[arg(long)]
    pub unk_share: Option<f64>,
    #[arg(long)]
    pub include_punctuation: bool,
    #[arg(long)]
    pub givenness_window: Option<usize>,
    #[arg(long, value_enum)]
    pub givenness_counting: Option<Counting>,
    #[arg(long, value_name = "BOOL")]
    pub exclude_rc_first: Option<bool>,
    #[arg(long, value_name = "BOOL")]
    pub exclude_matrix_first: Option<bool>,
    /// ARPA model; trained from the corpus when omitted.
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Clause annotations (JSON).
    #[arg(long, value_name = "PATH")]
    pub clauses: Option<PathBuf>,
    /// Referent annotations (TSV).
    #[arg(long, value_name = "PATH")]
    pub referents: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn invalid(key: &str, value: &str, why: &str) -> CliError {
    CliError::Input(format!("config `{key}`: invalid value `{value}` ({why})"))
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| invalid(key, value, std::any::type_name::<T>()))
}

fn parse_bool(key: &str, value: &str) -> CliResult<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(invalid(key, value, "expected true or false")),
    }
}

fn parse_window(key: &str, value: &str) -> CliResult<u64> {
    match value {
        "inf" | "none" => Ok(u64::MAX),
        _ => parse(key, value),
    }
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> CliResult<T> {
    T::from_str(value, true).map_err(|e| invalid(key, value, &e))
}

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}

impl RunConfig {
    /// Defaults, overridden by `file` (if any), overridden by `args`.
    pub fn resolve(file: Option<&str>, args: &ConfigArgs) -> CliResult<Self> {
        let mut cfg = Self::default();
        if let Some(text) = file {
            cfg.apply_file(text)?;
        }
        cfg.apply_args(args)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `key = value` lines; `#` starts a comment line.
    pub fn apply_file(&mut self, text: &str) -> CliResult<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Input(format!("config line {}: expected `key = value`", i + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| CliError::Input(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let path = || Some(PathBuf::from(value));
        match key {
            "corpus" => self.corpus = split_list(value).into_iter().map(PathBuf::from).collect(),
            "format" => self.format = parse_enum(key, value)?,
            "unit" => self.unit = parse_enum(key, value)?,
            "punctuation" => self.punctuation = value.to_owned(),
            "content_tags" => self.content_tags = split_list(value),
            "stoplist" => self.stoplist = path(),
            "bonus" => self.factor.bonus = parse(key, value)?,
            "wearout" => self.factor.wearout = parse(key, value)?,
            "window" => self.factor.window = parse_window(key, value)?,
            "floor" => self.factor.floor = parse(key, value)?,
            "discount" => self.discount = Some(parse(key, value)?),
            "unk_share" => self.unk_share = Some(parse(key, value)?),
            "include_punctuation" => self.include_punctuation = parse_bool(key, value)?,
            "givenness_window" => self.givenness_window = parse(key, value)?,
            "givenness_counting" => self.givenness_counting = parse_enum(key, value)?,
            "exclude_rc_first" => self.exclude_rc_first = parse_bool(key, value)?,
            "exclude_matrix_first" => self.exclude_matrix_first = parse_bool(key, value)?,
            "model" => self.model = path(),
            "clauses" => self.clauses = path(),
            "referents" => self.referents = path(),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "seed" => self.seed = Some(parse(key, value)?),
            _ => return Err(CliError::Input(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    fn apply_args(&mut self, a: &ConfigArgs) -> CliResult<()> {
        if !a.corpus.is_empty() {
            self.corpus = a.corpus.clone();
        }
        macro_rules! copy {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = &a.$field { $target = v.clone(); })*
            };
        }
        copy!(
            format => self.format,
            unit => self.unit,
            punctuation => self.punctuation,
            bonus => self.factor.bonus,
            wearout => self.factor.wearout,
            floor => self.factor.floor,
            givenness_window => self.givenness_window,
            givenness_counting => self.givenness_counting,
            exclude_rc_first => self.exclude_rc_first,
            exclude_matrix_first => self.exclude_matrix_first,
            out_dir => self.out_dir,
        );
        if let Some(v) = &a.content_tags {
            self.content_tags = split_list(v);
        }
        if let Some(v) = &a.window {
            self.factor.window = parse_window("window", v)?;
        }
        if a.include_punctuation {
            self.include_punctuation = true;
        }
        for (flag, target) in [
            (&a.stoplist, &mut self.stoplist),
            (&a.model, &mut self.model),
            (&a.clauses, &mut self.clauses),
            (&a.referents, &mut self.referents),
        ] {
            if flag.is_some() {
                target.clone_from(flag);
            }
        }
        if a.discount.is_some() {
            self.discount = a.discount;
        }
        if a.unk_share.is_some() {
            self.unk_share = a.unk_share;
        }
        if a.seed.is_some() {
            self.seed = a.seed;
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        self.factor.validate()?;
        if let Some(d) = self.discount {
            if !(d > 0.0 && d < 1.0) {
                return Err(CliError::Input(format!("discount {d} outside (0, 1)")));
            }
        }
        if let Some(u) = self.unk_share {
            if !(0.0..1.0).contains(&u) {
                return Err(CliError::Input(format!("unk_share {u} outside [0, 1)")));
            }
        }
        if self.givenness_window == 0 {
            return Err(CliError::Input("givenness_window must be positive".into()));
        }
        Ok(())
    }

    /// Fails with every referenced input path that does not exist.
    pub fn check_paths(&self) -> CliResult<()> {
        let optional = [&self.stoplist, &self.model, &self.clauses, &self.referents];
        let missing: Vec<String> = self
            .corpus
            .iter()
            .chain(optional.into_iter().flatten())
            .filter(|p| !p.exists())
            .map(|p| p.display().to_string())
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(CliError::Input(format!(
                "no such file: {}",
                missing.join(", ")
            )))
        }
    }

    pub fn punctuation_set(&self) -> PunctuationSet {
        PunctuationSet::from_chars(&self.punctuation)
    }

    pub fn train_options(&self) -> TrainOptions {
        TrainOptions {
            discount: self.discount,
            unk_share: self.unk_share,
        }
    }

    pub fn exclusion(&self) -> ExclusionPolicy {
        ExclusionPolicy {
            rc_first: self.exclude_rc_first,
            matrix_first: self.exclude_matrix_first,
        }
    }

    pub fn givenness(&self) -> GivennessConfig {
        GivennessConfig {
            window: self.givenness_window,
            counting: match self.givenness_counting {
                Counting::Mentions => InterveningCount::Mentions,
                Counting::Distinct => InterveningCount::DistinctReferents,
            },
        }
    }

    /// Parameters that affect results, keyed as in the config file. Paths are
    /// left out; the manifest records input digests instead.
    pub fn parameters(&self) -> BTreeMap<&'static str, String> {
        let opt = |v: Option<f64>| v.map_or_else(|| "auto".to_owned(), |v| v.to_string());
        let window = if self.factor.window == u64::MAX {
            "inf".to_owned()
        } else {
            self.factor.window.to_string()
        };
        BTreeMap::from([
            ("format", enum_name(self.format)),
            ("unit", enum_name(self.unit)),
            ("punctuation", self.punctuation.clone()),
            ("content_tags", self.content_tags.join(",")),
            ("bonus", self.factor.bonus.to_string()),
            ("wearout", self.factor.wearout.to_string()),
            ("window", window),
            ("floor", self.factor.floor.to_string()),
            ("discount", opt(self.discount)),
            ("unk_share", opt(self.unk_share)),
            ("include_punctuation", self.include_punctuation.to_string()),
            ("givenness_window", self.givenness_window.to_string()),
            ("givenness_counting", enum_name(self.givenness_counting)),
            ("exclude_rc_first", self.exclude_rc_first.to_string()),
            (
                "exclude_matrix_first",
                self.exclude_matrix_first.to_string(),
            ),
            (
                "seed",
                self.seed
                    .map_or_else(|| "none".to_owned(), |s| s.to_string()),
            ),
        ])
    }

    /// `key=value` lines of [`parameters`](Self::parameters), sorted.
    pub fn canonical(&self) -> String {
        self.parameters()
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }
}

fn enum_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_owned())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file =
            "# run\ncorpus = a.vert, b.vert\nbonus = 3\nwindow = inf\nexclude_rc_first = false\n";
        let args = ConfigArgs {
            bonus: Some(5.0),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Some(file), &args).unwrap();
        assert_eq!(
            cfg.corpus,
            vec![PathBuf::from("a.vert"), PathBuf::from("b.vert")]
        );
        assert_eq!(cfg.factor.bonus, 5.0);
        assert_eq!(cfg.factor.window, u64::MAX);
        assert!(!cfg.exclude_rc_first);
        assert!(cfg.exclude_matrix_first);
    }

    #[test]
    fn bad_lines_are_reported() {
        let err =
            RunConfig::resolve(Some("bonus = 4\nfloor: 2\n"), &ConfigArgs::default()).unwrap_err();
        assert!(err.to_string().contains("line 2"));
        let err = RunConfig::resolve(Some("colour = red\n"), &ConfigArgs::default()).unwrap_err();
        assert!(err.to_string().contains("colour"));
        assert!(RunConfig::resolve(Some("unit = word\n"), &ConfigArgs::default()).is_err());
    }

    #[test]
    fn invalid_factor_config_is_rejected() {
        let args = ConfigArgs {
            floor: Some(0),
            ..Default::default()
        };
        assert_eq!(RunConfig::resolve(None, &args).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn canonical_rendering_is_sorted_and_pathless() {
        let cfg = RunConfig {
            corpus: vec![PathBuf::from("/somewhere/corpus.vert")],
            ..RunConfig::default()
        };
        let text = cfg.canonical();
        assert!(!text.contains("somewhere"));
        let keys: Vec<&str> = text.lines().map(|l| l.split('=').next().unwrap()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(text.contains("window=200\n"));
    }
}
