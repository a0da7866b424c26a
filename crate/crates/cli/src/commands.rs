//! The subcommands, as functions from parsed input to report text.

use std::fmt::Write;
use std::path::Path;

use orbit_rank::ordinal::Ordinal;
use orbit_rank::par::Strategy;
use orbit_rank::permgroup::{ChainGroup, GroupConfig};
use orbit_rank::symrank::{build_example, classify, truncate_with_budget, Classification, ExampleKind, GroupExpr};
use orbit_rank::verify::{run_on_chains, run_suite, VerifyConfig};
use thiserror::Error;

use crate::spec::{parse_spec_with, Definition, SpecError, SpecFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Io(String),
    #[error("no chain or group named `{0}`")]
    UnknownName(String),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub const EXIT_CODE: u8 = 2;
}

pub const EXIT_VERIFY_FAILED: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeFormat {
    Json,
    Dot,
}

pub fn load_spec(path: &Path, config: &GroupConfig) -> Result<SpecFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_spec_with(&text, config).map_err(|e| match e {
        SpecError::Syntax { .. } | SpecError::UnknownName { .. } | SpecError::DuplicateName { .. } | SpecError::Validation { .. } => {
            CliError::Input(format!("{}:{e}", path.display()))
        }
    })
}

pub fn parse_ordinal(text: &str) -> Result<Ordinal, CliError> {
    text.parse().map_err(|e| CliError::Input(format!("bad ordinal `{text}`: {e}")))
}

/// `α-CLI` and `L-α-CLI` verdicts as one phrase.
pub fn verdict(c: &Classification, alpha: &Ordinal) -> String {
    if c.is_alpha_cli(alpha) {
        format!("{alpha}-CLI")
    } else if c.is_l_alpha_cli(alpha) {
        format!("L-{alpha}-CLI, not {alpha}-CLI")
    } else {
        format!("not L-{alpha}-CLI")
    }
}

fn classification_report(out: &mut String, c: &Classification, alpha: Option<&Ordinal>) {
    let alpha = alpha.unwrap_or(&c.rank);
    writeln!(out, "classification: {c}").unwrap();
    writeln!(out, "rank: {}", c.rank).unwrap();
    writeln!(out, "at alpha = {alpha}: {}", verdict(c, alpha)).unwrap();
}

pub fn cmd_rank(spec: &SpecFile, name: &str, alpha: Option<&Ordinal>, strategy: Strategy) -> Result<String, CliError> {
    let mut out = String::new();
    match spec.lookup(name).ok_or_else(|| CliError::UnknownName(name.into()))? {
        Definition::Chain(g) => {
            writeln!(out, "chain {name} (degree {}, order {}, {} members)", g.degree(), g.order(0), g.len()).unwrap();
            writeln!(out, "k\trho^k").unwrap();
            let profile = g.rho_profile(strategy);
            for (k, r) in profile.iter().enumerate() {
                writeln!(out, "{k}\t{r}").unwrap();
            }
            let rho = Ordinal::sup(&profile);
            writeln!(out, "rho = {rho}").unwrap();
            if let Some(a) = alpha {
                let c = Classification::new(Ordinal::zero(), rho.is_zero());
                writeln!(out, "at alpha = {a}: {}", verdict(&c, a)).unwrap();
            }
        }
        Definition::Group(e) => {
            writeln!(out, "group {name} = {e}").unwrap();
            let c = classify(e).map_err(|err| CliError::Input(err.to_string()))?;
            classification_report(&mut out, &c, alpha);
        }
    }
    Ok(out)
}

pub fn cmd_tree(spec: &SpecFile, name: &str, k: usize, format: TreeFormat) -> Result<String, CliError> {
    let g = spec.chain(name).ok_or_else(|| match spec.group(name) {
        Some(_) => CliError::Input(format!("`{name}` is a group expression; truncate it to a chain first")),
        None => CliError::UnknownName(name.into()),
    })?;
    let tree = g.coset_eqseq(k).map_err(|e| CliError::Input(e.to_string()))?.orbit_tree().tree;
    Ok(match format {
        TreeFormat::Json => tree.to_json() + "\n",
        TreeFormat::Dot => tree.to_dot(&format!("{name}_k{k}")),
    })
}

/// The report and whether every check passed.
pub fn cmd_verify(spec: Option<&SpecFile>, config: &VerifyConfig) -> (String, bool) {
    let report = match spec {
        Some(s) => run_on_chains(config, &s.chains()),
        None => run_suite(config),
    };
    (report.to_string() + "\n", report.passed())
}

/// A spec file holding the truncation as a chain named
/// `<name>_d<depth>_b<breadth>`.
pub fn cmd_truncate(spec: &SpecFile, name: &str, depth: usize, breadth: usize, config: &GroupConfig) -> Result<String, CliError> {
    let e = spec.group(name).ok_or_else(|| match spec.chain(name) {
        Some(_) => CliError::Input(format!("`{name}` is already a chain")),
        None => CliError::UnknownName(name.into()),
    })?;
    let g = truncate_with_budget(e, depth, breadth, config.max_group_order).map_err(|err| CliError::Input(err.to_string()))?;
    Ok(chain_file(&format!("{name}_d{depth}_b{breadth}"), &g, &format!("truncate({e}, depth {depth}, breadth {breadth})")))
}

pub fn chain_file(name: &str, g: &ChainGroup, comment: &str) -> String {
    format!("# {comment}\nchain {name} degree {} = {g}\n", g.degree())
}

pub fn cmd_examples(alpha: &Ordinal, kind: Option<ExampleKind>) -> Result<String, CliError> {
    let kinds = match kind {
        Some(k) => vec![k],
        None => vec![ExampleKind::H, ExampleKind::G],
    };
    let mut out = String::new();
    for k in kinds {
        let e: GroupExpr = build_example(k, alpha).map_err(|err| CliError::Input(err.to_string()))?;
        let c = classify(&e).map_err(|err| CliError::Input(err.to_string()))?;
        writeln!(out, "{k}_{alpha} = {e}").unwrap();
        writeln!(out, "  classification: {c}").unwrap();
        writeln!(out, "  {}", verdict(&c, alpha)).unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_spec;

    const S3: &str = "chain S3deg3 = [ (0 1 2),(0 1) ] > [ (0 1 2) ] > [ ]\n\
                      group H0 = example(H, 0)\n\
                      group G1 = example(G, 1)";

    #[test]
    fn rank_reports() {
        let spec = parse_spec(S3).unwrap();
        let chain = cmd_rank(&spec, "S3deg3", None, Strategy::Sequential).unwrap();
        assert!(chain.contains("0\t0\n1\t1\n2\t2\nrho = 2"), "{chain}");
        let h0 = cmd_rank(&spec, "H0", None, Strategy::Sequential).unwrap();
        assert!(h0.contains("rank: 0") && h0.contains("(0, tight)") && h0.contains(": 0-CLI"), "{h0}");
        let g1 = cmd_rank(&spec, "G1", None, Strategy::Sequential).unwrap();
        assert!(g1.contains("(1, not tight)") && g1.contains("L-1-CLI, not 1-CLI"), "{g1}");
        assert!(matches!(cmd_rank(&spec, "nope", None, Strategy::Sequential), Err(CliError::UnknownName(_))));
    }

    #[test]
    fn tree_reports() {
        let spec = parse_spec(S3).unwrap();
        assert_eq!(cmd_tree(&spec, "S3deg3", 0, TreeFormat::Json).unwrap().trim(), "[]");
        let dot = cmd_tree(&spec, "S3deg3", 2, TreeFormat::Dot).unwrap();
        assert_eq!(dot.matches("[label=").count(), 3);
        assert!(dot.contains("lh=0 rank=1"), "{dot}");
        assert!(cmd_tree(&spec, "S3deg3", 3, TreeFormat::Json).is_err());
    }

    #[test]
    fn truncations_reparse() {
        let spec = parse_spec(S3).unwrap();
        let text = cmd_truncate(&spec, "G1", 3, 2, &GroupConfig::default()).unwrap();
        let back = parse_spec(&text).unwrap();
        let g = back.chain("G1_d3_b2").unwrap();
        assert_eq!(g.order(0), 32);
        assert!(cmd_truncate(&spec, "G1", 3, 0, &GroupConfig::default()).is_err());
    }

    #[test]
    fn example_listing() {
        let out = cmd_examples(&Ordinal::omega(), None).unwrap();
        assert!(out.contains("H_w = prodinf(ladder(G, w))") && out.contains("(w, not tight)"), "{out}");
    }
}
