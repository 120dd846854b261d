use treepull::pulldown::*;
use treepull::oracle::*;
use treepull::trees::*;
use std::collections::BTreeMap;

fn main() {
    let base = nice_embed(&FiniteTree::two_path(2)).0;
    let sc = PulldownScenario {
        label: "trivial".into(),
        l: 0,
        tprime: StagedTree::constant(base, 0),
        w_fixtures: BTreeMap::new(),
        phi_fixtures: BTreeMap::new(),
        stage_budget: 2000,
        depth_budget: 8,
    };
    let res = run_pulldown(&sc).unwrap();
    println!("tree size {}, gamma size {}", res.final_tree.len(), res.final_gamma.len());
    for (d, v) in &res.final_gamma {
        println!("  Γ({d}) = {v}   [codes {} -> {}]", d.code(), v.code());
    }
    println!("log lines: {}", res.log.len());
    for r in res.log.iter().take(40) {
        println!("  {} {} {} {}", r.stage, r.actor, r.action, r.payload);
    }
    println!("tree членов:");
    for t in res.final_tree.iter().take(50) {
        println!("  {t} (entry {})", res.tree_entry[t]);
    }
}
