// Enumerating stable graphs, automorphisms and the JSON encoding.

use tautrel::graphs::enumerate_stable_graphs;

pub fn run() -> tautrel::Result<()> {
    for (g, n) in [(0, 4), (0, 5), (1, 1), (1, 2), (2, 0)] {
        let graphs = enumerate_stable_graphs(g, n, 3 * g + n - 3)?;
        let mut by_edges = vec![0; (3 * g + n - 2) as usize];
        for graph in &graphs {
            by_edges[graph.num_edges()] += 1;
        }
        println!("(g,n)=({g},{n}): {} graphs, by edge count {by_edges:?}", graphs.len());
    }
    let loops = enumerate_stable_graphs(1, 1, 1)?;
    let nodal = &loops[1];
    println!("aut order of the (1,1) loop: {}", nodal.plain_aut_order());
    println!("{}", serde_json::to_string(nodal).expect("graphs serialize"));
    Ok(())
}

fn main() {
    run().expect("graph example");
}
