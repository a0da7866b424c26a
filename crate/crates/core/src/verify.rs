//! Seeded property suite over the structural laws of chain ranks, orbit
//! trees and the rank calculus, with greedy counterexample shrinking.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::eqseq::{surjection_embedding, EqSeq, PointMap};
use crate::gen::{Gen, MAX_DEGREE, MAX_ORDER};
use crate::ordinal::Ordinal;
use crate::par::{self, Strategy};
use crate::permgroup::{
    gset_rank, interleave_chains, stabilizer, tsi_check, ChainGroup, GSet, GroupError, Perm,
};
use crate::symrank::{build_example, classify, Classification, ExampleKind, GroupExpr};
use crate::wftree::{check_order_preserving, MapReport, NodeMap, NodeRecord, WfTree};

/// Deliberate faults used to confirm that the suite detects violations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutant {
    /// Expect `ρ^k(G × H) = ρ^k(G) + ρ^k(H)` instead of the maximum.
    ProductSum,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub strategy: Strategy,
    pub mutant: Option<Mutant>,
    pub max_degree: usize,
    pub max_order: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 1,
            trials: 100,
            strategy: Strategy::default(),
            mutant: None,
            max_degree: MAX_DEGREE,
            max_order: MAX_ORDER,
        }
    }
}

/// One generated instance.
#[derive(Clone, Debug)]
pub enum Subject {
    Chain(ChainGroup),
    ChainPair(ChainGroup, ChainGroup),
    /// A chain with generators of a subgroup of its first member.
    ChainWith(ChainGroup, Vec<Perm>),
    Power(ChainGroup, usize),
    Tree(WfTree, Vec<usize>),
    SeqPair(EqSeq, EqSeq),
    Ordinals(Vec<Ordinal>),
    Example(ExampleKind, Ordinal),
}

enum Outcome {
    Pass,
    Fail(String),
    /// The instance does not meet the check's hypotheses.
    Skip,
}

type Generate = fn(&mut Gen, &VerifyConfig) -> Subject;
type Test = fn(&Subject, &VerifyConfig) -> Outcome;

struct Check {
    name: &'static str,
    law: &'static str,
    generate: Generate,
    test: Test,
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub trial: usize,
    pub message: String,
    pub subject: Subject,
    pub shrink_steps: usize,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: &'static str,
    pub law: &'static str,
    pub trials: usize,
    pub passed: usize,
    pub skipped: usize,
    pub failure: Option<Counterexample>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<CheckReport>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::ok)
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

const CHECKS: &[Check] = &[
    Check { name: "rho0-zero", law: "rho^0 = 0", generate: gen_chain, test: test_rho0 },
    Check {
        name: "rho-monotone",
        law: "rho^k <= rho^(k+1), witnessed by the coset projection embedding",
        generate: gen_chain,
        test: test_monotone,
    },
    Check {
        name: "product-max",
        law: "rho^k(G x H) = max(rho^k(G), rho^k(H))",
        generate: gen_pair,
        test: test_product,
    },
    Check {
        name: "subgroup-monotone",
        law: "rho^k(H) <= rho^k(G) for H_n = H & G_n, witnessed by inclusion",
        generate: gen_subgroup,
        test: test_subgroup,
    },
    Check {
        name: "quotient-monotone",
        law: "rho^k(G/N) <= rho^k(G)",
        generate: gen_normal,
        test: test_quotient,
    },
    Check {
        name: "power-bound",
        law: "rho^k(G^c staggered) <= rho^k(G) + k",
        generate: gen_power,
        test: test_power,
    },
    Check {
        name: "normal-chain-bound",
        law: "normal chains have rho^k <= k; conjugates of G_(m_k) lie in G_k",
        generate: gen_normal_chain,
        test: test_normal_chain,
    },
    Check {
        name: "gset-rank-bound",
        law: "rho(T^X) <= rho(G), and rho(T^(G.x)) <= rho^k(G) when G_k fixes x",
        generate: gen_subgroup,
        test: test_gset,
    },
    Check {
        name: "tree-propositions",
        law: "rank recursion, level bounds, order preserving maps",
        generate: gen_tree,
        test: test_tree,
    },
    Check {
        name: "level-subtree",
        law: "w(rho(T)) <= rho(T|(n_i)) <= rho(T), limit ranks preserved",
        generate: gen_weighted_tree,
        test: test_level_subtree,
    },
    Check {
        name: "eqseq-product-max",
        law: "rho(T_(E x F)) = max(rho(T_E), rho(T_F)) against direct recursion",
        generate: gen_seq_pair,
        test: test_seq_product,
    },
    Check {
        name: "interleave",
        law: "T_G' is isomorphic to T_H|(n_i) for a common refinement H",
        generate: gen_compatible,
        test: test_interleave,
    },
    Check {
        name: "hierarchy",
        law: "classify(H_a) = (a, tight), classify(G_a) = (a, not tight)",
        generate: gen_example,
        test: test_example,
    },
    Check {
        name: "classify-laws",
        law: "product classification is symmetric and ignores trivial factors",
        generate: gen_ordinals,
        test: test_classify_laws,
    },
    Check {
        name: "ordinal-laws",
        law: "associativity, monotonicity, limit_part, w(b+c) = wb + wc",
        generate: gen_ordinals,
        test: test_ordinals,
    },
];

/// Names of every check in suite order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Runs the full randomized suite.
pub fn run_suite(config: &VerifyConfig) -> Report {
    let mut warnings = Vec::new();
    if config.trials == 0 {
        warnings.push("trials = 0: every check passes vacuously".to_string());
    }
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(i, check)| run_check(check, i as u64, config))
        .collect();
    Report { seed: config.seed, checks, warnings }
}

/// Runs the chain-level checks on the given chains and the product law on
/// every pair of them.
pub fn run_on_chains(config: &VerifyConfig, chains: &[(String, ChainGroup)]) -> Report {
    let mut subjects: Vec<(&Check, Vec<Subject>)> = Vec::new();
    let single: Vec<Subject> = chains.iter().map(|(_, g)| Subject::Chain(g.clone())).collect();
    for name in ["rho0-zero", "rho-monotone", "normal-chain-bound"] {
        subjects.push((find(name), single.clone()));
    }
    let natural: Vec<Subject> = chains.iter().map(|(_, g)| Subject::ChainWith(g.clone(), Vec::new())).collect();
    subjects.push((find("gset-rank-bound"), natural));
    let pairs = chains
        .iter()
        .flat_map(|(_, a)| chains.iter().map(move |(_, b)| Subject::ChainPair(a.clone(), b.clone())))
        .collect();
    subjects.push((find("product-max"), pairs));
    let checks = subjects
        .into_iter()
        .map(|(check, list)| {
            let outcomes = par::map(config.strategy, &list, |s| (check.test)(s, config));
            summarize(check, config, list, outcomes)
        })
        .collect();
    let mut warnings = Vec::new();
    if chains.is_empty() {
        warnings.push("no chains defined: every check passes vacuously".to_string());
    }
    Report { seed: config.seed, checks, warnings }
}

fn find(name: &str) -> &'static Check {
    CHECKS.iter().find(|c| c.name == name).expect("known check")
}

fn run_check(check: &Check, index: u64, config: &VerifyConfig) -> CheckReport {
    let trials: Vec<u64> = (0..config.trials as u64).collect();
    let subjects: Vec<Subject> = trials
        .iter()
        .map(|&t| (check.generate)(&mut Gen::for_trial(config.seed, index, t), config))
        .collect();
    let outcomes = par::map(config.strategy, &subjects, |s| (check.test)(s, config));
    summarize(check, config, subjects, outcomes)
}

fn summarize(check: &Check, config: &VerifyConfig, subjects: Vec<Subject>, outcomes: Vec<Outcome>) -> CheckReport {
    let mut passed = 0;
    let mut skipped = 0;
    let mut failure = None;
    for (trial, (subject, outcome)) in subjects.into_iter().zip(outcomes).enumerate() {
        match outcome {
            Outcome::Pass => passed += 1,
            Outcome::Skip => skipped += 1,
            Outcome::Fail(message) if failure.is_none() => {
                failure = Some(shrink(check, config, trial, subject, message));
            }
            Outcome::Fail(_) => {}
        }
    }
    CheckReport { name: check.name, law: check.law, trials: passed + skipped + usize::from(failure.is_some()), passed, skipped, failure }
}

const MAX_SHRINK_STEPS: usize = 200;

fn shrink(check: &Check, config: &VerifyConfig, trial: usize, subject: Subject, message: String) -> Counterexample {
    let mut current = (subject, message);
    let mut steps = 0;
    'outer: while steps < MAX_SHRINK_STEPS {
        for candidate in candidates(&current.0) {
            if let Outcome::Fail(m) = (check.test)(&candidate, config) {
                current = (candidate, m);
                steps += 1;
                continue 'outer;
            }
        }
        break;
    }
    Counterexample { trial, message: current.1, subject: current.0, shrink_steps: steps }
}

/// Chains obtained by deleting one member, keeping the first and last.
fn chain_deletions(g: &ChainGroup, keep_top: bool) -> Vec<ChainGroup> {
    let start = if keep_top { 1 } else { 0 };
    (start..g.depth())
        .filter_map(|drop| {
            let levels = (0..g.len()).filter(|&n| n != drop).map(|n| g.elements(n).to_vec()).collect();
            ChainGroup::from_subgroups(g.degree(), levels, g.budget()).ok()
        })
        .collect()
}

fn tree_deletions(t: &WfTree) -> Vec<WfTree> {
    t.ids()
        .filter(|&id| t.children(id).next().is_none())
        .filter_map(|leaf| {
            let records: Vec<NodeRecord> = t.records().iter().filter(|r| r.id != leaf).cloned().collect();
            (!records.is_empty()).then(|| WfTree::validate(records).ok()).flatten()
        })
        .collect()
}

fn point_deletions(e: &EqSeq) -> Vec<EqSeq> {
    e.points()
        .iter()
        .filter(|_| e.points().len() > 1)
        .map(|&p| e.restrict(&e.points().iter().copied().filter(|&q| q != p).collect::<BTreeSet<_>>()))
        .collect()
}

fn candidates(s: &Subject) -> Vec<Subject> {
    match s {
        Subject::Chain(g) => chain_deletions(g, false).into_iter().map(Subject::Chain).collect(),
        Subject::ChainPair(a, b) => {
            let mut out: Vec<Subject> = chain_deletions(a, true).into_iter().map(|x| Subject::ChainPair(x, b.clone())).collect();
            out.extend(chain_deletions(b, true).into_iter().map(|y| Subject::ChainPair(a.clone(), y)));
            out
        }
        Subject::ChainWith(g, gens) => {
            let mut out: Vec<Subject> = chain_deletions(g, true).into_iter().map(|x| Subject::ChainWith(x, gens.clone())).collect();
            for i in 0..gens.len() {
                let mut fewer = gens.clone();
                fewer.remove(i);
                out.push(Subject::ChainWith(g.clone(), fewer));
            }
            out
        }
        Subject::Power(g, c) => {
            let mut out: Vec<Subject> = (1..*c).rev().map(|c| Subject::Power(g.clone(), c)).collect();
            out.extend(chain_deletions(g, true).into_iter().map(|x| Subject::Power(x, *c)));
            out
        }
        Subject::Tree(t, idx) => {
            let mut out: Vec<Subject> = tree_deletions(t).into_iter().map(|x| Subject::Tree(x, idx.clone())).collect();
            for i in 0..idx.len().saturating_sub(1) {
                let mut fewer = idx.clone();
                fewer.remove(i);
                out.push(Subject::Tree(t.clone(), fewer));
            }
            out
        }
        Subject::SeqPair(e, f) => {
            let mut out: Vec<Subject> = point_deletions(e).into_iter().map(|x| Subject::SeqPair(x, f.clone())).collect();
            out.extend(point_deletions(f).into_iter().map(|y| Subject::SeqPair(e.clone(), y)));
            out
        }
        Subject::Ordinals(v) => {
            let mut out = Vec::new();
            for i in 0..v.len() {
                for smaller in [Ordinal::zero(), v[i].limit_part(), v[i].pred().unwrap_or_default()] {
                    if smaller < v[i] {
                        let mut w = v.clone();
                        w[i] = smaller;
                        out.push(Subject::Ordinals(w));
                    }
                }
            }
            out
        }
        Subject::Example(kind, a) => a.pred().into_iter().map(|p| Subject::Example(*kind, p)).collect(),
    }
}

fn gen_chain(g: &mut Gen, c: &VerifyConfig) -> Subject {
    Subject::Chain(g.chain_group(c.max_degree, c.max_order, 6))
}

fn gen_pair(g: &mut Gen, c: &VerifyConfig) -> Subject {
    let order = ((c.max_order as f64).sqrt() as usize).max(2);
    let degree = c.max_degree.min(6);
    let a = g.chain_group(degree, order, 5).rebudget(c.max_order);
    Subject::ChainPair(a, g.chain_group(degree, order, 5).rebudget(c.max_order))
}

fn gen_subgroup(g: &mut Gen, c: &VerifyConfig) -> Subject {
    let chain = g.chain_group(c.max_degree, c.max_order, 6);
    let gens = g.subgroup_gens(&chain);
    Subject::ChainWith(chain, gens)
}

fn gen_normal(g: &mut Gen, c: &VerifyConfig) -> Subject {
    let chain = g.chain_group(c.max_degree, c.max_order.min(500), 6);
    let gens = g.normal_subgroup_gens(&chain);
    Subject::ChainWith(chain, gens)
}

fn gen_power(g: &mut Gen, c: &VerifyConfig) -> Subject {
    let copies = g.rng().gen_range(1..=3);
    let order = match copies {
        1 => c.max_order,
        2 => 40,
        _ => 12,
    };
    Subject::Power(g.chain_group(c.max_degree.min(6), order, 5).rebudget(c.max_order), copies)
}

fn gen_normal_chain(g: &mut Gen, c: &VerifyConfig) -> Subject {
    Subject::Chain(g.normal_chain_group(c.max_degree, c.max_order, 6))
}

fn gen_tree(g: &mut Gen, _: &VerifyConfig) -> Subject {
    let t = g.tree(40);
    let bound = t.max_level().map_or(1, |l| l + 2);
    let idx = g.indices(bound);
    Subject::Tree(t, idx)
}

fn gen_weighted_tree(g: &mut Gen, _: &VerifyConfig) -> Subject {
    let t = if g.rng().gen_bool(0.5) { g.weighted_tree(40) } else { g.tree(40) };
    let bound = sentinel_level(&t);
    let idx = g.indices(bound);
    Subject::Tree(t, idx)
}

fn gen_seq_pair(g: &mut Gen, _: &VerifyConfig) -> Subject {
    Subject::SeqPair(g.eqseq(6, 5), g.eqseq(6, 5))
}

fn gen_compatible(g: &mut Gen, c: &VerifyConfig) -> Subject {
    let (a, b) = g.compatible_pair(c.max_degree.min(6), c.max_order.min(720));
    Subject::ChainPair(a, b)
}

fn gen_example(g: &mut Gen, _: &VerifyConfig) -> Subject {
    let kind = if g.rng().gen_bool(0.5) { ExampleKind::G } else { ExampleKind::H };
    Subject::Example(kind, g.ordinal_below_omega_cubed(4))
}

fn gen_ordinals(g: &mut Gen, _: &VerifyConfig) -> Subject {
    Subject::Ordinals((0..3).map(|_| g.ordinal_below_omega_cubed(4)).collect())
}

/// A level beyond every node and every finite weight chain of `t`.
fn sentinel_level(t: &WfTree) -> usize {
    t.records()
        .iter()
        .map(|r| r.level + r.weight.as_ref().map_or(0, |w| w.finite_part() as usize))
        .max()
        .unwrap_or(0)
        + 2
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Outcome::Fail(format!($($msg)+));
        }
    };
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(GroupError::BudgetExceeded { .. }) | Err(GroupError::NotNormal) => return Outcome::Skip,
            Err(e) => return Outcome::Fail(e.to_string()),
        }
    };
}

fn test_rho0(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::Chain(g) = s else { return Outcome::Skip };
    let r = attempt!(g.rho_k(0));
    ensure!(r.is_zero(), "rho^0 = {r}");
    Outcome::Pass
}

fn test_monotone(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::Chain(g) = s else { return Outcome::Skip };
    for k in 0..g.depth() {
        let (fine, coarse) = (attempt!(g.cosets(k + 1)), attempt!(g.cosets(k)));
        let theta: PointMap = (0..fine.len())
            .map(|c| (c as u64, coarse.coset_of(fine.rep(c)).expect("same group") as u64))
            .collect();
        let e = attempt!(g.coset_eqseq(k + 1));
        let f = attempt!(g.coset_eqseq(k));
        let emb = match surjection_embedding(&theta, &e, &f) {
            Ok(emb) => emb,
            Err(err) => return Outcome::Fail(format!("k = {k}: {err}")),
        };
        ensure!(emb.verified(), "k = {k}: projection embedding does not verify: {:?}", emb.report);
        let (lo, hi) = (attempt!(g.rho_k(k)), attempt!(g.rho_k(k + 1)));
        ensure!(lo <= hi, "rho^{k} = {lo} > rho^{} = {hi}", k + 1);
        ensure!(emb.report.source_rank == lo && emb.report.target_rank == hi, "k = {k}: embedding ranks disagree");
    }
    Outcome::Pass
}

fn test_product(s: &Subject, c: &VerifyConfig) -> Outcome {
    let Subject::ChainPair(a, b) = s else { return Outcome::Skip };
    let p = attempt!(a.product_chain(b));
    for k in 0..p.len() {
        let ra = attempt!(a.rho_k(k.min(a.depth())));
        let rb = attempt!(b.rho_k(k.min(b.depth())));
        let expect = match c.mutant {
            Some(Mutant::ProductSum) => ra.add(&rb),
            None => ra.clone().max(rb.clone()),
        };
        let got = attempt!(p.rho_k(k));
        ensure!(got == expect, "k = {k}: rho^k(G x H) = {got}, factors {ra} and {rb}, expected {expect}");
    }
    Outcome::Pass
}

fn test_subgroup(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::ChainWith(g, gens) = s else { return Outcome::Skip };
    let h = attempt!(g.subgroup_chain(gens));
    for k in 0..g.len() {
        let (rh, rg) = (attempt!(h.rho_k(k)), attempt!(g.rho_k(k)));
        ensure!(rh <= rg, "k = {k}: rho^k(H) = {rh} > rho^k(G) = {rg}");
        let (hs, gs) = (attempt!(h.cosets(k)), attempt!(g.cosets(k)));
        let theta: Vec<u64> = (0..hs.len()).map(|c| gs.coset_of(hs.rep(c)).expect("H lies in G") as u64).collect();
        let (e, f) = (attempt!(h.coset_eqseq(k)), attempt!(g.coset_eqseq(k)));
        let report = match inclusion_map(&theta, &e, &f) {
            Ok(r) => r,
            Err(err) => return Outcome::Fail(format!("k = {k}: {err}")),
        };
        ensure!(report.passes() && report.rank_bound_holds(), "k = {k}: inclusion of orbit trees is not level and order preserving");
    }
    Outcome::Pass
}

/// The map `(n, C) -> (n, [theta(C)]_n)` induced by an injective map of
/// points that sends `E_n` classes into `F_n` classes.
fn inclusion_map(theta: &[u64], e: &EqSeq, f: &EqSeq) -> Result<MapReport, String> {
    let (source, target) = (e.orbit_tree(), f.orbit_tree());
    let mut map = NodeMap::default();
    for id in source.tree.ids() {
        let (n, c) = source.class_of_node(id).expect("node of the orbit tree");
        let class = &e.partition(n)[c];
        let images: BTreeSet<u64> = class.iter().map(|&x| theta[x as usize]).collect();
        let tc = f
            .partition(n)
            .iter()
            .position(|d| images.iter().all(|y| d.contains(y)))
            .ok_or_else(|| format!("class {class:?} at level {n} is split by the map"))?;
        let tid = target.node_of_class(n, tc).ok_or_else(|| format!("class {class:?} lands on a singleton"))?;
        map.insert(id, tid);
    }
    check_order_preserving(&map, &source.tree, &target.tree, true).map_err(|e| e.to_string())
}

fn test_quotient(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::ChainWith(g, gens) = s else { return Outcome::Skip };
    let q = attempt!(g.quotient_chain(gens));
    for k in 0..g.len() {
        let (rq, rg) = (attempt!(q.rho_k(k)), attempt!(g.rho_k(k)));
        ensure!(rq <= rg, "k = {k}: rho^k(G/N) = {rq} > rho^k(G) = {rg}");
    }
    Outcome::Pass
}

fn test_power(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::Power(g, copies) = s else { return Outcome::Skip };
    let p = attempt!(g.power_chain(*copies));
    for k in 0..p.len() {
        let bound = attempt!(g.rho_k(k.min(g.depth()))).add_nat(k as u64);
        let got = attempt!(p.rho_k(k));
        ensure!(got <= bound, "k = {k}, copies = {copies}: rho^k = {got} exceeds {bound}");
    }
    Outcome::Pass
}

fn test_normal_chain(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::Chain(g) = s else { return Outcome::Skip };
    let report = tsi_check(g);
    for w in &report.witnesses {
        ensure!(w.conjugates_inside, "k = {}: conjugates of G_{} escape G_{}", w.k, w.m, w.k);
    }
    if !report.all_normal() {
        return Outcome::Skip;
    }
    ensure!(report.core_is_identity(g), "normal chain differs from its core chain");
    for k in 0..g.len() {
        let r = attempt!(g.rho_k(k));
        ensure!(r <= Ordinal::from(k as u64), "normal chain with rho^{k} = {r}");
    }
    Outcome::Pass
}

fn test_gset(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::ChainWith(g, gens) = s else { return Outcome::Skip };
    let x = if gens.is_empty() { GSet::natural(g) } else { attempt!(GSet::left_cosets_of(g, gens)) };
    let rank = attempt!(gset_rank(g, &x));
    let rho = g.rho();
    ensure!(rank <= rho, "rho(T^X) = {rank} > rho(G) = {rho}");
    let e = attempt!(x.eqseq(g));
    let mut seen = BTreeSet::new();
    for p in 0..x.len() {
        if seen.contains(&(p as u64)) {
            continue;
        }
        let orbit: BTreeSet<u64> = g.elements(0).iter().map(|h| x.act(h, p).expect("group element") as u64).collect();
        seen.extend(orbit.iter().copied());
        let st = stabilizer(g, &x, p);
        let local = e.restrict(&orbit).orbit_tree().tree.rank();
        let bound = attempt!(g.rho_k(st.level));
        ensure!(local <= bound, "orbit of {p}: rank {local} > rho^{} = {bound}", st.level);
    }
    Outcome::Pass
}

fn test_tree(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::Tree(t, idx) = s else { return Outcome::Skip };
    let sub_rank = |id| t.subtree_at(Some(id)).rank();
    let all = Ordinal::sup(&t.ids().map(sub_rank).collect::<Vec<_>>());
    let roots = Ordinal::sup(&t.roots().map(sub_rank).collect::<Vec<_>>());
    ensure!(t.rank() == all && t.rank() == roots, "rank {} vs sup over nodes {all} / roots {roots}", t.rank());
    for id in t.ids() {
        let own = sub_rank(id);
        let node = t.node_rank(id).expect("node exists").succ();
        let kids = Ordinal::sup(&t.children(id).map(sub_rank).collect::<Vec<_>>());
        ensure!(own == node, "node {id}: rho(T_s) = {own} but rho_T(s) + 1 = {node}");
        ensure!(t.node(id).is_some_and(|r| r.weight.is_some()) || own == kids.succ(), "node {id}: children give {kids}");
    }
    let top = t.max_level().map_or(0, |l| l + 1);
    for k in 0..=top {
        let level: Vec<Ordinal> = t.level_nodes(k).map(sub_rank).collect();
        let sup = Ordinal::sup(&level);
        ensure!(sup <= t.rank() && t.rank() <= sup.add_nat(k as u64), "level {k}: sup {sup} vs rank {}", t.rank());
        ensure!(sup.limit_part() == t.rank().limit_part(), "level {k}: limit parts differ");
        for r in &level {
            ensure!(t.rank() >= r.add_nat(k as u64), "level {k}: rank below {r} + {k}");
        }
    }
    let sub = match t.level_subtree(idx) {
        Ok(sub) => sub,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let id = NodeMap::identity(&sub);
    let report = match check_order_preserving(&id, &sub, t, false) {
        Ok(r) => r,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    ensure!(report.order_preserving && report.rank_bound_holds(), "level-subtree inclusion is not order preserving");
    Outcome::Pass
}

fn test_level_subtree(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::Tree(t, idx) = s else { return Outcome::Skip };
    let mut idx = idx.clone();
    let sentinel = sentinel_level(t);
    if idx.last().is_none_or(|&l| l < sentinel) {
        idx.push(sentinel);
    }
    let r = match t.level_subtree(&idx) {
        Ok(r) => r,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let (full, part) = (t.rank(), r.rank());
    ensure!(part <= full, "rho(T|(n_i)) = {part} > rho(T) = {full}");
    ensure!(full.limit_part() <= part, "w(rho(T)) = {} > rho(T|(n_i)) = {part}", full.limit_part());
    for id in t.ids() {
        let rank = t.node_rank(id).expect("node exists");
        if rank.is_limit() && r.contains(id) {
            let kept = r.node_rank(id).expect("node kept");
            ensure!(kept == rank, "limit-rank node {id}: {rank} became {kept}");
        }
    }
    Outcome::Pass
}

/// Rank of the orbit tree straight from the partitions, without building
/// the tree.
fn direct_rank(e: &EqSeq) -> Ordinal {
    fn node(e: &EqSeq, n: usize, class: &[u64]) -> Ordinal {
        if n + 1 >= e.len() {
            return Ordinal::zero();
        }
        let next = e.partition(n + 1);
        let kids: Vec<Ordinal> = next
            .iter()
            .filter(|d| d.len() > 1 && class.contains(&d[0]))
            .map(|d| node(e, n + 1, d).succ())
            .collect();
        Ordinal::sup(&kids)
    }
    let ranks: Vec<Ordinal> = (0..e.len())
        .flat_map(|n| e.partition(n).into_iter().filter(|c| c.len() > 1).map(move |c| node(e, n, &c).succ()))
        .collect();
    Ordinal::sup(&ranks)
}

fn test_seq_product(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::SeqPair(e, f) = s else { return Outcome::Skip };
    let p = e.product(f);
    let (re, rf, rp) = (direct_rank(e), direct_rank(f), direct_rank(&p));
    ensure!(re == e.orbit_tree().tree.rank() && rf == f.orbit_tree().tree.rank(), "tree rank disagrees with recursion");
    ensure!(rp == p.orbit_tree().tree.rank(), "product tree rank disagrees with recursion");
    ensure!(rp == re.clone().max(rf.clone()), "rho(E x F) = {rp}, factors {re} and {rf}");
    Outcome::Pass
}

fn test_interleave(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::ChainPair(a, b) = s else { return Outcome::Skip };
    let il = match interleave_chains(a, b) {
        Ok(il) => il,
        Err(GroupError::BudgetExceeded { .. }) => return Outcome::Skip,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    for c in &il.checks {
        ensure!(c.verified(), "k = {}: level-subtree isomorphism fails", c.k);
        let full = attempt!(il.chain.rho_k(c.k));
        ensure!(c.left_report.target_rank <= full && c.right_report.target_rank <= full, "k = {}: restriction outranks the tree", c.k);
    }
    Outcome::Pass
}

fn test_example(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::Example(kind, a) = s else { return Outcome::Skip };
    let e = match build_example(*kind, a) {
        Ok(e) => e,
        Err(_) => return Outcome::Skip,
    };
    match classify(&e) {
        Ok(c) => {
            let expect = Classification::new(a.clone(), *kind == ExampleKind::H);
            ensure!(c == expect, "{kind}_{a} classified as {c}");
            ensure!(c.is_l_alpha_cli(a) && c.is_alpha_cli(&a.succ()), "{kind}_{a}: verdicts inconsistent");
            Outcome::Pass
        }
        Err(err) => Outcome::Fail(format!("{kind}_{a}: {err}")),
    }
}

fn test_classify_laws(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::Ordinals(v) = s else { return Outcome::Skip };
    let list: Vec<GroupExpr> = v
        .iter()
        .enumerate()
        .map(|(i, a)| GroupExpr::Example(if i % 2 == 0 { ExampleKind::G } else { ExampleKind::H }, a.clone()))
        .collect();
    let mut reversed = list.clone();
    reversed.reverse();
    let c = classify(&GroupExpr::Prod(list.clone())).expect("examples classify");
    let r = classify(&GroupExpr::Prod(reversed)).expect("examples classify");
    ensure!(c == r, "product classification depends on order: {c} vs {r}");
    for e in &list {
        let with = classify(&GroupExpr::Prod(vec![e.clone(), GroupExpr::Trivial])).expect("examples classify");
        ensure!(with == classify(e).expect("examples classify"), "trivial factor changes {e}");
    }
    let rank = Ordinal::sup(v);
    ensure!(c.rank == rank, "product rank {} is not the maximum {rank}", c.rank);
    Outcome::Pass
}

fn test_ordinals(s: &Subject, _: &VerifyConfig) -> Outcome {
    let Subject::Ordinals(v) = s else { return Outcome::Skip };
    let (a, b, c) = (&v[0], &v[1], &v[2]);
    ensure!(a.add(b).add(c) == a.add(&b.add(c)), "({a} + {b}) + {c} != {a} + ({b} + {c})");
    if b < c {
        ensure!(a.add(b) < a.add(c), "{a} + {b} >= {a} + {c}");
    }
    if b <= c {
        ensure!(b.add(a) <= c.add(a), "{b} + {a} > {c} + {a}");
    }
    ensure!(a <= &a.add(b) && b <= &a.add(b), "{a} + {b} is below a summand");
    ensure!(a.limit_part().limit_part() == a.limit_part(), "limit_part of {a} is not idempotent");
    ensure!(a.limit_part() <= *a && a.limit_part().add_nat(a.finite_part()) == *a, "{a} does not split as limit + finite");
    ensure!(b.add(c).mul_omega() == b.mul_omega().add(&c.mul_omega()), "w({b} + {c}) != w{b} + w{c}");
    ensure!(a.to_string().parse::<Ordinal>().ok().as_ref() == Some(a), "{a} does not round-trip");
    Outcome::Pass
}

fn write_chain(f: &mut fmt::Formatter<'_>, name: &str, g: &ChainGroup) -> fmt::Result {
    writeln!(f, "chain {name} degree {} = {g}", g.degree())
}

impl fmt::Display for Subject {
    /// A dump in spec-file syntax where one exists.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Chain(g) => write_chain(f, "G", g),
            Subject::ChainPair(a, b) => {
                write_chain(f, "G", a)?;
                write_chain(f, "H", b)
            }
            Subject::ChainWith(g, gens) => {
                write_chain(f, "G", g)?;
                let list: Vec<String> = gens.iter().map(|p| p.to_string()).collect();
                writeln!(f, "# subgroup generators: [ {} ]", list.join(", "))
            }
            Subject::Power(g, c) => {
                write_chain(f, "G", g)?;
                writeln!(f, "# copies: {c}")
            }
            Subject::Tree(t, idx) => {
                writeln!(f, "{}", t.to_json())?;
                writeln!(f, "# levels: {idx:?}")
            }
            Subject::SeqPair(e, g) => {
                writeln!(f, "{}", e.to_json())?;
                writeln!(f, "{}", g.to_json())
            }
            Subject::Ordinals(v) => {
                let list: Vec<String> = v.iter().map(|o| o.to_string()).collect();
                writeln!(f, "# ordinals: {}", list.join(", "))
            }
            Subject::Example(kind, a) => writeln!(f, "group E = example({kind}, {a})"),
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for c in &self.checks {
            let status = if c.ok() { "PASS" } else { "FAIL" };
            write!(f, "{status} {:<20} {:>4}/{:<4}", c.name, c.passed, c.trials)?;
            if c.skipped > 0 {
                write!(f, " ({} skipped)", c.skipped)?;
            }
            writeln!(f, "  {}", c.law)?;
            if let Some(cx) = &c.failure {
                writeln!(f, "  counterexample from trial {} after {} shrink steps: {}", cx.trial, cx.shrink_steps, cx.message)?;
                for line in cx.subject.to_string().lines() {
                    writeln!(f, "    {line}")?;
                }
            }
        }
        let failed = self.checks.iter().filter(|c| !c.ok()).count();
        write!(f, "seed {}: {} checks, {} failed", self.seed, self.checks.len(), failed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: usize) -> VerifyConfig {
        VerifyConfig { trials, max_order: 200, ..VerifyConfig::default() }
    }

    #[test]
    fn suite_passes() {
        let report = run_suite(&small(8));
        assert!(report.passed(), "{report}");
        assert_eq!(report.checks.len(), CHECKS.len());
    }

    #[test]
    fn zero_trials_pass_with_warning() {
        let report = run_suite(&small(0));
        assert!(report.passed());
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn product_mutant_is_caught_and_shrunk() {
        let config = VerifyConfig { mutant: Some(Mutant::ProductSum), ..small(20) };
        let report = run_suite(&config);
        let check = report.check("product-max").unwrap();
        let cx = check.failure.as_ref().expect("mutant detected");
        assert!(matches!(cx.subject, Subject::ChainPair(..)));
        assert!(report.checks.iter().filter(|c| !c.ok()).count() == 1, "{report}");
    }

    #[test]
    fn deterministic_for_a_seed() {
        let a = run_suite(&VerifyConfig { strategy: Strategy::Sequential, ..small(4) }).to_string();
        let b = run_suite(&VerifyConfig { strategy: Strategy::Parallel, ..small(4) }).to_string();
        assert_eq!(a, b);
    }

    #[test]
    fn explicit_chains() {
        let chains = vec![("S3".to_string(), ChainGroup::s3()), ("Z2".to_string(), ChainGroup::cyclic(2))];
        let report = run_on_chains(&small(1), &chains);
        assert!(report.passed(), "{report}");
        assert_eq!(report.check("product-max").unwrap().passed, 4);
    }
}
